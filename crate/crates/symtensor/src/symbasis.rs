//! Pooled symmetric one-body functions, the product basis over ordered
//! multi-indices with linear-cost recursive evaluation, the naive
//! symmetrized basis used as an oracle, and the change-of-basis check
//! between the two.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::indexing::{IndexSet, MultiIndex};
use crate::one_body::{BasisSpec, BasisTable, Point};

/// A fixed-size configuration of points, one slot per argument.
#[derive(Debug, Clone, PartialEq)]
pub struct PointCloud {
    points: Vec<Point>,
}

impl PointCloud {
    pub fn new(points: Vec<Point>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::Invalid("point cloud must be nonempty".into()));
        }
        let d = points[0].dim();
        if points.iter().any(|p| p.dim() != d) {
            return Err(Error::DimensionMismatch("mixed point dimensions in cloud".into()));
        }
        Ok(PointCloud { points })
    }

    /// 1-d convenience constructor.
    pub fn from_scalars(xs: &[f64]) -> Result<Self> {
        PointCloud::new(xs.iter().map(|&x| Point::scalar(x)).collect::<Result<_>>()?)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn permuted(&self, perm: &[usize]) -> Self {
        PointCloud { points: perm.iter().map(|&i| self.points[i].clone()).collect() }
    }
}

/// Pooled one-body values `A_v = sum_n phi_v(x_n)`, stored densely in flat
/// index order (the flat order is (degree, lex), so degree-truncated pools
/// are contiguous prefixes).
#[derive(Debug, Clone)]
pub struct PooledVector {
    values: Vec<f64>,
    n_points: usize,
}

impl PooledVector {
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn n_points(&self) -> usize {
        self.n_points
    }

    pub fn get(&self, v: usize) -> Result<f64> {
        self.values
            .get(v)
            .copied()
            .ok_or_else(|| Error::IndexOutOfRange(format!("pooled vector has no entry {v}")))
    }
}

/// Pools the one-body basis over a cloud: `A_v = sum_n phi_v(x_n)` for every
/// admitted `v` with degree at most `max_deg`.
pub fn pool(spec: &BasisSpec, cloud: &PointCloud, max_deg: usize) -> Result<PooledVector> {
    let table = BasisTable::new(spec, max_deg);
    pool_with_table(&table, cloud.points())
}

pub(crate) fn pool_with_table(table: &BasisTable, points: &[Point]) -> Result<PooledVector> {
    let mut acc = vec![0.0f64; table.len()];
    let mut row = Vec::new();
    for p in points {
        table.eval_all(p, &mut row)?;
        for (a, &v) in acc.iter_mut().zip(&row) {
            *a += v;
        }
    }
    Ok(PooledVector { values: acc, n_points: points.len() })
}

/// Which product convention a product-basis evaluation uses.
///
/// `Raw` keeps all slots, so zero entries contribute factors `A_0 = N`;
/// `Trimmed` drops zero entries. The two differ by the scalar `N^z` where
/// `z` is the number of zero entries of the multi-index.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProductConvention {
    Raw,
    Trimmed,
}

/// Product-basis values for every member of an index set, plus the number
/// of multiplications the parent-link recursion spent beyond the pooled
/// values (exactly one per index beyond the root).
#[derive(Debug, Clone)]
pub struct ProductEval {
    pub values: Vec<f64>,
    pub multiplications: usize,
}

/// Evaluates every product `A_v = prod_t A_{v_t}` over the index set from a
/// pooled vector, walking the lexicographic list once and reusing the parent
/// value of each index.
pub fn eval_product_basis(
    set: &IndexSet,
    pooled: &PooledVector,
    convention: ProductConvention,
) -> Result<ProductEval> {
    let needed = set
        .indices()
        .iter()
        .map(|m| m.entries().last().copied().unwrap_or(0))
        .max()
        .unwrap_or(0);
    if needed >= pooled.values().len() {
        return Err(Error::IndexOutOfRange(format!(
            "pooled vector covers {} entries, index set needs index {}",
            pooled.values().len(),
            needed
        )));
    }
    let n_points = pooled.n_points() as f64;
    // factor applied per recursion step: A_v for trimmed, A_v / A_0 for raw
    let factors: Vec<f64> = match convention {
        ProductConvention::Trimmed => pooled.values().to_vec(),
        ProductConvention::Raw => pooled.values().iter().map(|a| a / n_points).collect(),
    };
    let root = match convention {
        ProductConvention::Trimmed => 1.0,
        ProductConvention::Raw => n_points.powi(set.n() as i32),
    };
    let mut values = vec![0.0f64; set.len()];
    let mut multiplications = 0usize;
    for pos in 0..set.len() {
        let peeled = set.peeled(pos);
        if peeled == 0 {
            values[pos] = root;
        } else {
            values[pos] = values[set.parent(pos)] * factors[peeled];
            multiplications += 1;
        }
    }
    Ok(ProductEval { values, multiplications })
}

/// A symmetric polynomial in the product basis: an index set with one
/// coefficient per member (raw product convention).
#[derive(Debug, Clone)]
pub struct SymmetricModel {
    index_set: IndexSet,
    coefficients: Vec<f64>,
}

impl SymmetricModel {
    pub fn new(index_set: IndexSet, coefficients: Vec<f64>) -> Result<Self> {
        if coefficients.len() != index_set.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} coefficients for {} indices",
                coefficients.len(),
                index_set.len()
            )));
        }
        Ok(SymmetricModel { index_set, coefficients })
    }

    pub fn index_set(&self) -> &IndexSet {
        &self.index_set
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    /// Evaluates `sum_v c_v A_v(x)` on a cloud of the model's arity.
    pub fn eval(&self, cloud: &PointCloud) -> Result<f64> {
        if cloud.len() != self.index_set.n() {
            return Err(Error::DimensionMismatch(format!(
                "cloud has {} points, model expects {}",
                cloud.len(),
                self.index_set.n()
            )));
        }
        let pooled = pool(
            self.index_set.spec(),
            cloud,
            self.index_set.max_one_body_degree(),
        )?;
        let products = eval_product_basis(&self.index_set, &pooled, ProductConvention::Raw)?;
        Ok(products
            .values
            .iter()
            .zip(&self.coefficients)
            .map(|(a, c)| a * c)
            .sum())
    }

    pub fn to_json(&self) -> serde_json::Value {
        let terms: Vec<TermJson> = self
            .index_set
            .indices()
            .iter()
            .zip(&self.coefficients)
            .map(|(m, &c)| TermJson { v: m.entries().to_vec(), c })
            .collect();
        serde_json::to_value(ModelJson {
            spec: *self.index_set.spec(),
            n: self.index_set.n(),
            degree: self.index_set.degree_budget(),
            terms,
        })
        .expect("model serialization cannot fail")
    }

    pub fn from_json(value: &serde_json::Value) -> Result<Self> {
        let raw: ModelJson = serde_json::from_value(value.clone())
            .map_err(|e| Error::Invalid(format!("bad model JSON: {e}")))?;
        let set = IndexSet::enumerate(&raw.spec, raw.n, raw.degree)?;
        let mut coefficients = vec![0.0f64; set.len()];
        for term in &raw.terms {
            let pos = set.position_of(&term.v).ok_or_else(|| {
                Error::Invalid(format!("term {:?} not in the index set", term.v))
            })?;
            coefficients[pos] = term.c;
        }
        SymmetricModel::new(set, coefficients)
    }
}

#[derive(Serialize, Deserialize)]
struct ModelJson {
    spec: BasisSpec,
    #[serde(rename = "N")]
    n: usize,
    #[serde(rename = "D")]
    degree: usize,
    terms: Vec<TermJson>,
}

#[derive(Serialize, Deserialize)]
struct TermJson {
    v: Vec<usize>,
    c: f64,
}

/// Convenience wrapper matching the free-function shape of the module API.
pub fn eval_model(model: &SymmetricModel, cloud: &PointCloud) -> Result<f64> {
    model.eval(cloud)
}

/// Naive symmetrization oracle
/// `(1/N!) sum_sigma prod_t phi_{v_t}(x_{sigma(t)})`; factorial cost,
/// guarded at `N <= 8`.
pub fn eval_sym_naive(spec: &BasisSpec, index: &MultiIndex, cloud: &PointCloud) -> Result<f64> {
    let n = cloud.len();
    if n > 8 {
        return Err(Error::TooLarge(format!("naive symmetrization guarded at N <= 8, got {n}")));
    }
    if index.entries().len() != n {
        return Err(Error::DimensionMismatch(format!(
            "multi-index has {} entries, cloud has {n} points",
            index.entries().len()
        )));
    }
    // phi[t][j] = phi_{v_t}(x_j); the symmetrized value is perm(phi) / N!
    let mut phi = vec![vec![0.0f64; n]; n];
    for (t, &v) in index.entries().iter().enumerate() {
        for (j, p) in cloud.points().iter().enumerate() {
            phi[t][j] = spec.eval_one_body(v, p)?;
        }
    }
    let mut used = vec![false; n];
    let total = permanent_rec(&phi, 0, &mut used);
    let factorial: f64 = (1..=n).map(|k| k as f64).product();
    Ok(total / factorial)
}

fn permanent_rec(phi: &[Vec<f64>], row: usize, used: &mut [bool]) -> f64 {
    if row == phi.len() {
        return 1.0;
    }
    let mut acc = 0.0;
    for j in 0..phi.len() {
        if !used[j] {
            used[j] = true;
            acc += phi[row][j] * permanent_rec(phi, row + 1, used);
            used[j] = false;
        }
    }
    acc
}

/// Matrix expressing each symmetrized tensor basis function in the product
/// basis, computed by least-squares collocation on a 4x oversampled random
/// grid with a fixed seed. Row `i`, column `j` holds the coefficient of
/// product `j` in the expansion of symmetrized index `i`; the result is
/// lower triangular in lexicographic order with `1/N!` on the diagonal at
/// zero-free indices.
pub fn change_of_basis(spec: &BasisSpec, n: usize, degree_budget: usize) -> Result<DMatrix<f64>> {
    if n > 5 || degree_budget > 8 {
        return Err(Error::TooLarge(
            "change_of_basis is an oracle-scale check (N <= 5, D <= 8)".into(),
        ));
    }
    let set = IndexSet::enumerate(spec, n, degree_budget)?;
    let p = set.len();
    let n_samples = 4 * p;
    let clouds = crate::sampling::uniform_clouds(spec.d, n, n_samples, 0x5EED_CB01);

    let table = BasisTable::new(spec, set.max_one_body_degree());
    let mut a = DMatrix::zeros(n_samples, p);
    let mut s = DMatrix::zeros(n_samples, p);
    for (row, cloud) in clouds.iter().enumerate() {
        let pooled = pool_with_table(&table, cloud.points())?;
        let products = eval_product_basis(&set, &pooled, ProductConvention::Raw)?;
        for (col, &val) in products.values.iter().enumerate() {
            a[(row, col)] = val;
        }
        for (col, index) in set.indices().iter().enumerate() {
            s[(row, col)] = eval_sym_naive(spec, index, cloud)?;
        }
    }

    let svd = a.svd(true, true);
    let s_max = svd.singular_values.max();
    let tol = s_max * 1e-10;
    let rank = svd.singular_values.iter().filter(|&&sv| sv > tol).count();
    if rank < p {
        return Err(Error::Numerical(format!(
            "collocation system rank {rank} < {p}; product basis is degenerate"
        )));
    }
    let x = svd
        .solve(&s, tol)
        .map_err(|e| Error::Numerical(format!("least-squares solve failed: {e}")))?;
    Ok(x.transpose())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn cloud1(xs: &[f64]) -> PointCloud {
        PointCloud::from_scalars(xs).unwrap()
    }

    #[test]
    fn pool_examples() {
        let spec = BasisSpec::chebyshev_1d(4);

        // identical points: A_v = N phi_v(x)
        let c = cloud1(&[0.3, 0.3, 0.3]);
        let pooled = pool(&spec, &c, 4).unwrap();
        for v in 0..pooled.values().len() {
            let phi = spec.eval_one_body(v, &Point::scalar(0.3).unwrap()).unwrap();
            assert!((pooled.get(v).unwrap() - 3.0 * phi).abs() < 1e-14);
        }

        // T_2(0.5) = T_2(-0.5) = -0.5
        let c = cloud1(&[0.5, -0.5]);
        let pooled = pool(&spec, &c, 4).unwrap();
        assert!((pooled.get(2).unwrap() - (-1.0)).abs() < 1e-15);
        assert_eq!(pooled.get(0).unwrap(), 2.0);
    }

    #[test]
    fn pool_rejects_dimension_mismatch() {
        let spec = BasisSpec::tensor_chebyshev(2, 3).unwrap();
        let c = cloud1(&[0.1, 0.2]);
        assert!(pool(&spec, &c, 3).is_err());
    }

    #[test]
    fn product_basis_examples() {
        let spec = BasisSpec::chebyshev_1d(4);
        let set = IndexSet::enumerate(&spec, 2, 2).unwrap();
        let c = cloud1(&[0.5, -0.25]);
        let pooled = pool(&spec, &c, 2).unwrap();
        let eval = eval_product_basis(&set, &pooled, ProductConvention::Raw).unwrap();

        // all-zero index under raw products
        let zero_pos = set.position_of(&[0, 0]).unwrap();
        assert!((eval.values[zero_pos] - 4.0).abs() < 1e-14);

        // A_1 = 0.5 - 0.25
        let pos = set.position_of(&[1, 1]).unwrap();
        assert!((eval.values[pos] - 0.0625).abs() < 1e-15);

        assert_eq!(eval.multiplications, set.len() - 1);
    }

    #[test]
    fn trimmed_and_raw_differ_by_zero_count_scaling() {
        let spec = BasisSpec::chebyshev_1d(5);
        let set = IndexSet::enumerate(&spec, 3, 5).unwrap();
        let c = cloud1(&[0.4, -0.9, 0.2]);
        let pooled = pool(&spec, &c, 5).unwrap();
        let raw = eval_product_basis(&set, &pooled, ProductConvention::Raw).unwrap();
        let trimmed = eval_product_basis(&set, &pooled, ProductConvention::Trimmed).unwrap();
        for (pos, index) in set.indices().iter().enumerate() {
            let scale = 3.0f64.powi(index.zero_count() as i32);
            assert!(
                (raw.values[pos] - trimmed.values[pos] * scale).abs()
                    <= 1e-12 * (1.0 + raw.values[pos].abs())
            );
        }
    }

    #[test]
    fn recursion_matches_direct_products() {
        let spec = BasisSpec::tensor_chebyshev(2, 6).unwrap();
        let set = IndexSet::enumerate(&spec, 3, 6).unwrap();
        let mut rng = StdRng::seed_from_u64(7);
        for _ in 0..200 {
            let cloud = PointCloud::new(
                (0..3)
                    .map(|_| {
                        Point::new(vec![rng.gen_range(-1.0..=1.0), rng.gen_range(-1.0..=1.0)])
                            .unwrap()
                    })
                    .collect(),
            )
            .unwrap();
            let pooled = pool(&spec, &cloud, 6).unwrap();
            let eval = eval_product_basis(&set, &pooled, ProductConvention::Raw).unwrap();
            for (pos, index) in set.indices().iter().enumerate() {
                let direct: f64 =
                    index.entries().iter().map(|&v| pooled.get(v).unwrap()).product();
                let err = (eval.values[pos] - direct).abs();
                assert!(err <= 1e-12 * (1.0 + direct.abs()), "pos {pos}: {err}");
            }
        }
    }

    #[test]
    fn model_eval_examples() {
        let spec = BasisSpec::chebyshev_1d(3);
        let set = IndexSet::enumerate(&spec, 2, 2).unwrap();
        let mut coeffs = vec![0.0; set.len()];
        coeffs[set.position_of(&[0, 0]).unwrap()] = 1.0;
        let model = SymmetricModel::new(set.clone(), coeffs).unwrap();
        assert!((model.eval(&cloud1(&[0.9, -0.3])).unwrap() - 4.0).abs() < 1e-13);

        let mut coeffs = vec![0.0; set.len()];
        coeffs[set.position_of(&[1, 1]).unwrap()] = 1.0;
        let model = SymmetricModel::new(set, coeffs).unwrap();
        assert!((model.eval(&cloud1(&[0.5, -0.25])).unwrap() - 0.0625).abs() < 1e-15);
    }

    #[test]
    fn model_is_permutation_invariant() {
        let spec = BasisSpec::chebyshev_1d(5);
        let set = IndexSet::enumerate(&spec, 4, 5).unwrap();
        let mut rng = StdRng::seed_from_u64(11);
        let coeffs: Vec<f64> = (0..set.len()).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let model = SymmetricModel::new(set, coeffs).unwrap();
        for _ in 0..50 {
            let xs: Vec<f64> = (0..4).map(|_| rng.gen_range(-1.0..=1.0)).collect();
            let base = model.eval(&cloud1(&xs)).unwrap();
            let mut perm: Vec<usize> = (0..4).collect();
            for i in (1..4).rev() {
                perm.swap(i, rng.gen_range(0..=i));
            }
            let permuted = model.eval(&cloud1(&xs).permuted(&perm)).unwrap();
            assert!((base - permuted).abs() <= 1e-12 * (1.0 + base.abs()));
        }
    }

    #[test]
    fn sym_naive_examples() {
        let spec = BasisSpec::chebyshev_1d(4);
        let c = cloud1(&[0.5, -0.25]);

        let idx = MultiIndex::new(&spec, vec![1, 1]).unwrap();
        assert!((eval_sym_naive(&spec, &idx, &c).unwrap() - (-0.125)).abs() < 1e-15);

        let idx = MultiIndex::new(&spec, vec![0, 0]).unwrap();
        assert!((eval_sym_naive(&spec, &idx, &c).unwrap() - 1.0).abs() < 1e-15);

        let idx = MultiIndex::new(&spec, vec![1, 2]).unwrap();
        let swapped = cloud1(&[-0.25, 0.5]);
        assert!(
            (eval_sym_naive(&spec, &idx, &c).unwrap()
                - eval_sym_naive(&spec, &idx, &swapped).unwrap())
            .abs()
                < 1e-15
        );

        let big = cloud1(&[0.0; 9]);
        let idx = MultiIndex::new(&spec, vec![0; 9]).unwrap();
        assert!(eval_sym_naive(&spec, &idx, &big).is_err());
    }

    #[test]
    fn change_of_basis_n1_is_identity() {
        let spec = BasisSpec::chebyshev_1d(6);
        let m = change_of_basis(&spec, 1, 6).unwrap();
        for i in 0..m.nrows() {
            for j in 0..m.ncols() {
                let expected = if i == j { 1.0 } else { 0.0 };
                assert!((m[(i, j)] - expected).abs() < 1e-8, "({i},{j}) = {}", m[(i, j)]);
            }
        }
    }

    #[test]
    fn change_of_basis_triangular_with_diagonal() {
        let spec = BasisSpec::chebyshev_1d(4);
        let set = IndexSet::enumerate(&spec, 2, 4).unwrap();
        let m = change_of_basis(&spec, 2, 4).unwrap();

        for i in 0..m.nrows() {
            for j in (i + 1)..m.ncols() {
                assert!(m[(i, j)].abs() < 1e-8, "entry above diagonal ({i},{j}) = {}", m[(i, j)]);
            }
        }
        let pos = set.position_of(&[1, 1]).unwrap();
        assert!((m[(pos, pos)] - 0.5).abs() < 1e-8);
    }

    #[test]
    fn model_json_round_trip() {
        let spec = BasisSpec::chebyshev_1d(3);
        let set = IndexSet::enumerate(&spec, 2, 3).unwrap();
        let coeffs: Vec<f64> = (0..set.len()).map(|i| i as f64 * 0.25 - 0.5).collect();
        let model = SymmetricModel::new(set, coeffs.clone()).unwrap();
        let json = model.to_json();
        assert!(json.get("terms").is_some() && json.get("N").is_some());
        let back = SymmetricModel::from_json(&json).unwrap();
        assert_eq!(back.coefficients(), coeffs.as_slice());
    }
}
