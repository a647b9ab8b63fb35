//! Error-split invariant for the tight-binding ground truth: on every test
//! multiset, the fitted model's error is bounded by the body-order
//! truncation error plus the binomially weighted per-order component errors.
//! Also checks that model capacity pays off: sup error falls as the maximum
//! body order grows.

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use symtensor::mset::{fit_multiset, DegreeSchedule, Multiset, MultisetModel};
use symtensor::one_body::{BasisSpec, Point};
use symtensor::tightbind::{sample_separated, TightBindingOracle};

fn binom(n: usize, k: usize) -> f64 {
    let mut acc = 1.0f64;
    for i in 0..k.min(n - k) {
        acc = acc * (n - i) as f64 / (i + 1) as f64;
    }
    if k > n {
        0.0
    } else {
        acc
    }
}

/// Site energy of a particle at the origin surrounded by the multiset.
fn centered_site_energy(tb: &TightBindingOracle, ms: &Multiset) -> f64 {
    let mut pts = vec![Point::scalar(0.0).unwrap()];
    pts.extend_from_slice(ms.points());
    tb.site_energy(&pts).unwrap()
}

fn fit_model(
    tb: &TightBindingOracle,
    n_max: usize,
    degree: usize,
    train: &[Multiset],
) -> MultisetModel {
    let spec = BasisSpec::chebyshev_1d(degree);
    let schedule = DegreeSchedule::constant(n_max, degree).unwrap();
    fit_multiset(
        |ms| centered_site_energy(tb, ms),
        &spec,
        &schedule,
        train,
        1e-12,
        false,
    )
    .unwrap()
    .model
}

fn sample_train(rng: &mut StdRng, count: usize, m_max: usize) -> Vec<Multiset> {
    (0..count)
        .map(|_| {
            let m = rng.gen_range(1..=m_max);
            Multiset::new(sample_separated(rng, 1, m, 0.05).unwrap()).unwrap()
        })
        .collect()
}

#[test]
fn error_split_bound_holds_pointwise() {
    let tb = TightBindingOracle::default_1d();
    let n_max = 4usize;
    let degree = 8usize;
    let tb_degree = 10usize;

    let mut rng = StdRng::seed_from_u64(0x5711);
    let train = sample_train(&mut rng, 200, n_max);
    let model = fit_model(&tb, n_max, degree, &train);

    let test: Vec<Multiset> = (0..40)
        .map(|_| {
            let m = rng.gen_range(1..=n_max);
            Multiset::new(sample_separated(&mut rng, 1, m, 0.05).unwrap()).unwrap()
        })
        .collect();

    // one shared polynomial over the hull of all certified intervals, so
    // cluster sums telescope exactly
    let origin = Point::scalar(0.0).unwrap();
    let mut hull = (f64::INFINITY, f64::NEG_INFINITY);
    for ms in &test {
        let mut pts = vec![origin.clone()];
        pts.extend_from_slice(ms.points());
        let (a, b) = tb.spectral_interval(&pts).unwrap();
        hull = (hull.0.min(a), hull.1.max(b));
    }
    let poly = tb.chebyshev_observable(tb_degree, hull).unwrap();

    // fitted per-order sup errors over all subclusters seen in the test set
    let mut sup = vec![0.0f64; n_max + 1];
    sup[0] = (poly.eval(tb.h0) - model.constant_term()).abs();
    for ms in &test {
        let pts = ms.points();
        for mask in 1u32..(1 << pts.len()) {
            let subset: Vec<Point> = pts
                .iter()
                .enumerate()
                .filter(|(j, _)| mask & (1 << j) != 0)
                .map(|(_, p)| p.clone())
                .collect();
            let n = subset.len();
            let truth = tb.v_n_with(&origin, &subset, &poly).unwrap();
            let implied = model.implied_component(&subset).unwrap();
            sup[n] = sup[n].max((truth - implied).abs());
        }
    }

    for ms in &test {
        let m = ms.len();
        let exact = centered_site_energy(&tb, ms);
        let fitted = model.eval(ms).unwrap().value;

        let mut pts = vec![origin.clone()];
        pts.extend_from_slice(ms.points());
        let body_ordered = tb.body_ordered_with(&pts, &poly).unwrap();

        let truncation = (exact - body_ordered).abs();
        let component_budget: f64 =
            (0..=m.min(n_max)).map(|n| binom(m, n) * sup[n]).sum();
        let total = (exact - fitted).abs();
        assert!(
            total <= truncation + component_budget + 1e-9,
            "split violated at M = {m}: |f - fit| = {total:.3e} > {truncation:.3e} + {component_budget:.3e}"
        );
    }
}

#[test]
fn sup_error_falls_with_body_order() {
    let tb = TightBindingOracle::default_1d();
    let mut rng = StdRng::seed_from_u64(0xBEEF);
    let train = sample_train(&mut rng, 260, 4);
    let test = sample_train(&mut rng, 60, 4);

    let mut previous = f64::INFINITY;
    for (n_max, degree) in [(1usize, 4usize), (2, 6), (4, 8)] {
        let model = fit_model(&tb, n_max, degree, &train);
        let sup = test
            .iter()
            .map(|ms| (model.eval(ms).unwrap().value - centered_site_energy(&tb, ms)).abs())
            .fold(0.0, f64::max);
        assert!(
            sup <= previous,
            "sup error should not grow with capacity: {sup} after {previous}"
        );
        previous = sup;
    }
    assert!(previous < 1e-3, "largest model should fit well, got {previous}");
}
