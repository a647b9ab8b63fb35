// scratch: per-N mset experiment shape, tuning gamma0 (not part of the build)
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use symtensor::mset::{fit_multiset, DegreeSchedule, Multiset};
use symtensor::one_body::{BasisSpec, Point};
use symtensor::tightbind::{Observable, TightBindingOracle};

fn centered(tb: &TightBindingOracle, ms: &Multiset) -> f64 {
    let mut pts = vec![Point::scalar(0.0).unwrap()];
    pts.extend_from_slice(ms.points());
    tb.site_energy(&pts).unwrap()
}

fn sample_env(rng: &mut StdRng, m: usize, sep: f64) -> Multiset {
    let mut pts: Vec<f64> = Vec::new();
    let mut tries = 0;
    while pts.len() < m {
        tries += 1;
        if tries > 100_000 {
            pts.clear();
            tries = 0;
        }
        let x: f64 = rng.gen_range(-1.0..=1.0);
        if x.abs() >= sep && pts.iter().all(|&p| (p - x).abs() >= sep) {
            pts.push(x);
        }
    }
    Multiset::from_scalars(&pts).unwrap()
}

fn main() {
    for gamma0 in [1.0f64, 0.5, 0.25] {
        let tb = TightBindingOracle::new(0.5, gamma0, Observable::Exp, 1).unwrap();
        println!("== gamma0 {gamma0}");
        for seed in [1u64, 7] {
            let mut line = format!("seed {seed}:");
            for n in [2usize, 4, 6] {
                let mut rng = StdRng::seed_from_u64(seed);
                let schedule = DegreeSchedule::log(n, 1.0).unwrap();
                let d1 = schedule.degree(1);
                let spec = BasisSpec::chebyshev_1d(d1);
                let model0 =
                    symtensor::mset::MultisetModel::zeroed(&spec, &schedule, false).unwrap();
                let p = model0.total_params();
                let n_train = (5 * (p + 1)).max(200);
                let train: Vec<Multiset> = (0..n_train)
                    .map(|_| {
                        let m = rng.gen_range(1..=n);
                        sample_env(&mut rng, m, 0.1)
                    })
                    .collect();
                let mut test_rng = StdRng::seed_from_u64(seed ^ 0xABCD);
                let test: Vec<Multiset> = (0..100)
                    .map(|_| {
                        let m = test_rng.gen_range(1..=2);
                        sample_env(&mut test_rng, m, 0.1)
                    })
                    .collect();
                let fit = fit_multiset(
                    |ms| centered(&tb, ms),
                    &spec,
                    &schedule,
                    &train,
                    1e-10,
                    false,
                )
                .unwrap();
                let sup = test
                    .iter()
                    .map(|ms| (fit.model.eval(ms).unwrap().value - centered(&tb, ms)).abs())
                    .fold(0.0, f64::max);
                line += &format!("  N={n},D={d1},P={p}->{sup:.2e}");
            }
            println!("{line}");
        }
    }
}
