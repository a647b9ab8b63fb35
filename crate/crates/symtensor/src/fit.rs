//! Least-squares fitting of symmetric targets in the product basis and
//! empirical convergence studies of the total-degree approximation.

use std::time::Instant;

use nalgebra::{DMatrix, DVector};
use num_bigint::BigUint;

use crate::error::{Error, Result};
use crate::indexing::{count_params, ln_biguint, IndexSet};
use crate::one_body::{BasisSpec, BasisTable};
use crate::sampling;
use crate::symbasis::{eval_product_basis, pool_with_table, PointCloud, ProductConvention, SymmetricModel};

/// Training or test data: clouds with target values, reproducible from the
/// seed that generated the clouds.
#[derive(Debug, Clone)]
pub struct SampleSet {
    pub clouds: Vec<PointCloud>,
    pub targets: Vec<f64>,
    pub seed: u64,
}

impl SampleSet {
    /// Fills the targets by evaluating an oracle on every cloud.
    pub fn fill_targets<F: Fn(&PointCloud) -> f64>(&mut self, oracle: F) {
        self.targets = self.clouds.iter().map(|c| oracle(c)).collect();
    }
}

/// Draws `count` i.i.d. uniform clouds of `n` points in `[-1,1]^d`,
/// deterministic in the seed; targets are left unfilled.
pub fn sample_clouds(spec: &BasisSpec, n: usize, count: usize, seed: u64) -> Result<SampleSet> {
    if count == 0 {
        return Err(Error::Invalid("sample count must be at least 1".into()));
    }
    if n == 0 {
        return Err(Error::Invalid("cloud size must be at least 1".into()));
    }
    Ok(SampleSet {
        clouds: sampling::uniform_clouds(spec.d, n, count, seed),
        targets: Vec::new(),
        seed,
    })
}

/// A fitted model together with its training residual report.
#[derive(Debug, Clone)]
pub struct FitResult {
    pub model: SymmetricModel,
    pub residual_rms: f64,
    pub residual_max: f64,
}

/// Assembles the design matrix of raw product-basis values, one row per
/// cloud, one column per multi-index.
fn design_matrix(set: &IndexSet, clouds: &[PointCloud]) -> Result<DMatrix<f64>> {
    let table = BasisTable::new(set.spec(), set.max_one_body_degree());
    let mut x = DMatrix::zeros(clouds.len(), set.len());
    for (row, cloud) in clouds.iter().enumerate() {
        let pooled = pool_with_table(&table, cloud.points())?;
        let products = eval_product_basis(set, &pooled, ProductConvention::Raw)?;
        for (col, &v) in products.values.iter().enumerate() {
            x[(row, col)] = v;
        }
    }
    Ok(x)
}

/// Ridge-regularized least squares through a rank-revealing singular value
/// decomposition. The ridge is applied as row augmentation in the original
/// coordinates, and the augmented matrix is column-equilibrated before
/// factorizing (an exact reparametrization; product-basis columns span many
/// orders of magnitude, which would otherwise defeat the rank cutoff).
pub(crate) fn ridge_least_squares(
    x: &DMatrix<f64>,
    y: &DVector<f64>,
    ridge: f64,
) -> Result<DVector<f64>> {
    let (m, p) = (x.nrows(), x.ncols());
    let (mut x_aug, y_aug) = if ridge > 0.0 {
        let sqrt_ridge = ridge.sqrt();
        let mut xa = DMatrix::zeros(m + p, p);
        xa.view_mut((0, 0), (m, p)).copy_from(x);
        for j in 0..p {
            xa[(m + j, j)] = sqrt_ridge;
        }
        let mut ya = DVector::zeros(m + p);
        ya.rows_mut(0, m).copy_from(y);
        (xa, ya)
    } else {
        (x.clone(), y.clone())
    };
    let scales: Vec<f64> = (0..p)
        .map(|j| {
            let norm = x_aug.column(j).norm();
            if norm > 0.0 {
                norm
            } else {
                1.0
            }
        })
        .collect();
    for (j, &s) in scales.iter().enumerate() {
        x_aug.column_mut(j).scale_mut(1.0 / s);
    }
    let svd = x_aug.svd(true, true);
    let s_max = svd.singular_values.max();
    let mut coeffs = svd
        .solve(&y_aug, s_max * 1e-13)
        .map_err(|e| Error::Numerical(format!("least-squares solve failed: {e}")))?;
    for (j, &s) in scales.iter().enumerate() {
        coeffs[j] /= s;
    }
    Ok(coeffs)
}

/// Minimizes `sum_i (f_D(cloud_i) - target_i)^2 + ridge ||c||^2` over the
/// total-degree index set by a rank-revealing orthogonal factorization.
pub fn fit_least_squares(
    spec: &BasisSpec,
    n: usize,
    degree_budget: usize,
    samples: &SampleSet,
    ridge: f64,
) -> Result<FitResult> {
    if ridge < 0.0 {
        return Err(Error::Invalid("ridge must be nonnegative".into()));
    }
    if samples.targets.len() != samples.clouds.len() {
        return Err(Error::Invalid("sample set has unfilled targets".into()));
    }
    if samples.targets.iter().any(|t| !t.is_finite()) {
        return Err(Error::Numerical("non-finite target values".into()));
    }
    let set = IndexSet::enumerate(spec, n, degree_budget)?;
    let p = set.len();
    let m = samples.clouds.len();
    if (m as u128) < 2 * p as u128 {
        return Err(Error::Invalid(format!(
            "underdetermined fit: {m} samples for {p} parameters (need at least {})",
            2 * p
        )));
    }

    let x = design_matrix(&set, &samples.clouds)?;
    let y = DVector::from_column_slice(&samples.targets);
    let coeffs = ridge_least_squares(&x, &y, ridge)?;

    let residual = &x * &coeffs - &y;
    let residual_rms = (residual.norm_squared() / m as f64).sqrt();
    let residual_max = residual.amax();

    let model = SymmetricModel::new(set, coeffs.iter().copied().collect())?;
    Ok(FitResult { model, residual_rms, residual_max })
}

/// Largest absolute deviation of a model from an oracle over a test set.
pub fn sup_error<F: Fn(&PointCloud) -> f64>(
    model: &SymmetricModel,
    oracle: F,
    test: &SampleSet,
) -> Result<f64> {
    let mut worst = 0.0f64;
    for cloud in &test.clouds {
        let err = (model.eval(cloud)? - oracle(cloud)).abs();
        worst = worst.max(err);
    }
    Ok(worst)
}

/// One row of a convergence study.
#[derive(Debug, Clone)]
pub struct ConvergenceRow {
    pub degree: usize,
    pub params: BigUint,
    pub sup_error: f64,
    pub l2_error: f64,
    pub fit_seconds: f64,
}

/// Convergence study output: per-degree rows plus the fitted decay
/// diagnostics. `alpha` is the decay rate in
/// `error ~ C exp(-alpha (log P)^(1+1/d))`; `pearson_r` correlates
/// `log error` with the degree.
#[derive(Debug, Clone)]
pub struct ConvergenceStudy {
    pub rows: Vec<ConvergenceRow>,
    pub alpha: f64,
    pub slope_log_p: f64,
    pub pearson_r: f64,
}

/// Simple least-squares line fit returning (slope, intercept, Pearson r).
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    assert_eq!(xs.len(), ys.len());
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    let mut sxy = 0.0;
    for (&x, &y) in xs.iter().zip(ys) {
        sxx += (x - mx) * (x - mx);
        syy += (y - my) * (y - my);
        sxy += (x - mx) * (y - my);
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r = sxy / (sxx * syy).sqrt();
    (slope, intercept, r)
}

/// Samples per parameter used when training the per-degree fits of a
/// convergence study.
const TRAIN_OVERSAMPLE: usize = 10;

/// Fits the target at every degree in `degree_list` and measures sup and l2
/// errors on a disjoint test set. Training draws are nested prefixes of one
/// stream, sized `10 P(N, D, d)` per degree, so larger degrees see strictly
/// more data; the test set is sized ten times the largest basis (capped at
/// `10^5`).
pub fn convergence_study<F: Fn(&PointCloud) -> f64>(
    spec: &BasisSpec,
    n: usize,
    oracle: F,
    degree_list: &[usize],
    seed: u64,
    ridge: f64,
) -> Result<ConvergenceStudy> {
    if degree_list.is_empty() || degree_list.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Invalid("degree list must be strictly increasing".into()));
    }
    let d_max = *degree_list.last().unwrap();
    let p_max = count_params(spec, n, d_max)
        .try_into()
        .map_err(|_| Error::TooLarge("basis too large for a convergence study".into()))?;
    let p_max: usize = p_max;

    let train_count = (TRAIN_OVERSAMPLE * p_max).max(64);
    let test_count = (TRAIN_OVERSAMPLE * p_max).clamp(256, 100_000);
    let mut train = sample_clouds(spec, n, train_count, seed)?;
    // disjoint stream for the test set
    let test_seed = seed.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut test = sample_clouds(spec, n, test_count, test_seed)?;
    train.fill_targets(&oracle);
    test.fill_targets(&oracle);

    let mut rows = Vec::with_capacity(degree_list.len());
    for &degree in degree_list {
        let p: usize = count_params(spec, n, degree)
            .try_into()
            .map_err(|_| Error::TooLarge("basis too large for a convergence study".into()))?;
        let n_train = (TRAIN_OVERSAMPLE * p).max(64).min(train.clouds.len());
        let slice = SampleSet {
            clouds: train.clouds[..n_train].to_vec(),
            targets: train.targets[..n_train].to_vec(),
            seed,
        };
        let start = Instant::now();
        let fit = fit_least_squares(spec, n, degree, &slice, ridge)?;
        let fit_seconds = start.elapsed().as_secs_f64();
        let mut sup = 0.0f64;
        let mut sq = 0.0f64;
        for (cloud, &target) in test.clouds.iter().zip(&test.targets) {
            let err = (fit.model.eval(cloud)? - target).abs();
            sup = sup.max(err);
            sq += err * err;
        }
        rows.push(ConvergenceRow {
            degree,
            params: count_params(spec, n, degree),
            sup_error: sup,
            l2_error: (sq / test.clouds.len() as f64).sqrt(),
            fit_seconds,
        });
    }

    let exponent = 1.0 + 1.0 / spec.d as f64;
    let xs_logp: Vec<f64> =
        rows.iter().map(|r| ln_biguint(&r.params).powf(exponent)).collect();
    let xs_d: Vec<f64> = rows.iter().map(|r| r.degree as f64).collect();
    let ys: Vec<f64> = rows.iter().map(|r| r.sup_error.max(1e-300).ln()).collect();
    let (slope_log_p, _, _) = linear_fit(&xs_logp, &ys);
    let (_, _, pearson_r) = linear_fit(&xs_d, &ys);

    Ok(ConvergenceStudy { rows, alpha: -slope_log_p, slope_log_p, pearson_r })
}

/// The default analytic test target `sum_{i<j} 1 / (4 + <x_i, x_j>)`:
/// symmetric, analytic on the domain, and not separable across arguments.
pub fn default_target(cloud: &PointCloud) -> f64 {
    let pts = cloud.points();
    let mut acc = 0.0;
    for i in 0..pts.len() {
        for j in (i + 1)..pts.len() {
            let dot: f64 = pts[i]
                .coords()
                .iter()
                .zip(pts[j].coords())
                .map(|(a, b)| a * b)
                .sum();
            acc += 1.0 / (4.0 + dot);
        }
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    #[test]
    fn sampling_is_deterministic_and_in_domain() {
        let spec = BasisSpec::chebyshev_1d(4);
        let a = sample_clouds(&spec, 3, 10, 42).unwrap();
        let b = sample_clouds(&spec, 3, 10, 42).unwrap();
        assert_eq!(a.clouds, b.clouds);
        for cloud in &a.clouds {
            for p in cloud.points() {
                assert!(p.coords().iter().all(|x| x.abs() <= 1.0));
            }
        }
        assert!(sample_clouds(&spec, 3, 0, 1).is_err());
    }

    #[test]
    fn recovers_model_in_span() {
        let spec = BasisSpec::chebyshev_1d(6);
        let set = IndexSet::enumerate(&spec, 3, 4).unwrap();
        let mut rng = StdRng::seed_from_u64(3);
        let coeffs: Vec<f64> = (0..set.len()).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let truth = SymmetricModel::new(set, coeffs.clone()).unwrap();

        let mut samples = sample_clouds(&spec, 3, 4 * truth.coefficients().len(), 9).unwrap();
        samples.fill_targets(|c| truth.eval(c).unwrap());
        let fit = fit_least_squares(&spec, 3, 4, &samples, 0.0).unwrap();

        let worst = fit
            .model
            .coefficients()
            .iter()
            .zip(&coeffs)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0f64, f64::max);
        assert!(worst < 1e-8, "max coefficient error {worst}");
        assert!(fit.residual_max < 1e-8);
    }

    #[test]
    fn zero_target_gives_zero_model() {
        let spec = BasisSpec::chebyshev_1d(5);
        let mut samples = sample_clouds(&spec, 2, 64, 5).unwrap();
        samples.fill_targets(|_| 0.0);
        let fit = fit_least_squares(&spec, 2, 3, &samples, 0.0).unwrap();
        assert!(fit.model.coefficients().iter().all(|c| c.abs() < 1e-10));
    }

    #[test]
    fn rejects_underdetermined_and_bad_targets() {
        let spec = BasisSpec::chebyshev_1d(5);
        let mut samples = sample_clouds(&spec, 2, 5, 5).unwrap();
        samples.fill_targets(|_| 1.0);
        assert!(fit_least_squares(&spec, 2, 3, &samples, 0.0).is_err());

        let mut samples = sample_clouds(&spec, 2, 64, 5).unwrap();
        samples.fill_targets(|_| f64::NAN);
        assert!(fit_least_squares(&spec, 2, 3, &samples, 0.0).is_err());
    }

    #[test]
    fn fit_invariant_under_permuting_cloud_points() {
        let spec = BasisSpec::chebyshev_1d(5);
        let mut samples = sample_clouds(&spec, 3, 80, 17).unwrap();
        samples.fill_targets(default_target);
        let base = fit_least_squares(&spec, 3, 3, &samples, 0.0).unwrap();

        let mut rng = StdRng::seed_from_u64(99);
        let mut permuted = samples.clone();
        permuted.clouds = permuted
            .clouds
            .iter()
            .map(|c| {
                let mut perm: Vec<usize> = (0..c.len()).collect();
                for i in (1..perm.len()).rev() {
                    perm.swap(i, rng.gen_range(0..=i));
                }
                c.permuted(&perm)
            })
            .collect();
        permuted.fill_targets(default_target);
        let other = fit_least_squares(&spec, 3, 3, &permuted, 0.0).unwrap();

        let worst = base
            .model
            .coefficients()
            .iter()
            .zip(other.model.coefficients())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0f64, f64::max);
        assert!(worst < 1e-10, "coefficient drift {worst}");
    }

    #[test]
    fn training_residual_nonincreasing_in_degree() {
        let spec = BasisSpec::chebyshev_1d(8);
        let mut samples = sample_clouds(&spec, 3, 400, 23).unwrap();
        samples.fill_targets(default_target);
        let mut prev = f64::INFINITY;
        for degree in [1usize, 2, 4, 6] {
            let fit = fit_least_squares(&spec, 3, degree, &samples, 0.0).unwrap();
            assert!(
                fit.residual_rms <= prev + 1e-12,
                "residual grew at D = {degree}: {} > {prev}",
                fit.residual_rms
            );
            prev = fit.residual_rms;
        }
    }

    #[test]
    fn sup_error_of_in_span_model_is_tiny() {
        let spec = BasisSpec::chebyshev_1d(4);
        let set = IndexSet::enumerate(&spec, 2, 3).unwrap();
        let coeffs: Vec<f64> = (0..set.len()).map(|i| (i as f64 + 1.0) * 0.1).collect();
        let truth = SymmetricModel::new(set, coeffs).unwrap();

        let mut samples = sample_clouds(&spec, 2, 100, 31).unwrap();
        samples.fill_targets(|c| truth.eval(c).unwrap());
        let fit = fit_least_squares(&spec, 2, 3, &samples, 0.0).unwrap();

        let test = sample_clouds(&spec, 2, 200, 77).unwrap();
        let err = sup_error(&fit.model, |c| truth.eval(c).unwrap(), &test).unwrap();
        assert!(err < 1e-8, "sup error {err}");
    }

    #[test]
    fn study_rows_match_counts_and_decay() {
        let spec = BasisSpec::chebyshev_1d(8);
        let study =
            convergence_study(&spec, 3, default_target, &[2, 4, 6, 8], 7, 1e-10).unwrap();
        for row in &study.rows {
            assert_eq!(row.params, count_params(&spec, 3, row.degree));
        }
        for pair in study.rows.windows(2) {
            assert!(pair[1].sup_error < pair[0].sup_error, "sup error should fall");
        }
        assert!(study.alpha > 0.0);
        assert!(study.pearson_r < -0.9, "pearson r = {}", study.pearson_r);
        assert!(convergence_study(&spec, 3, default_target, &[4, 2], 7, 0.0).is_err());
    }
}
