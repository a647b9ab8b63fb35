//! Cluster-expansion representation of multi-set functions: degree
//! schedules per body order, efficient pooled evaluation that is linear in
//! the input size, a combinatorial cluster-sum oracle for equivalence
//! testing, the vacuum cluster expansion, and joint least-squares fitting.

use nalgebra::{DMatrix, DVector};
use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fit::ridge_least_squares;
use crate::indexing::count_params_trimmed;
use crate::one_body::{BasisSpec, BasisTable, Point};
use crate::sampling;
use crate::symbasis::pool_with_table;

/// An unordered, variable-size collection of points; empty is allowed.
#[derive(Debug, Clone, PartialEq)]
pub struct Multiset {
    points: Vec<Point>,
}

impl Multiset {
    pub fn new(points: Vec<Point>) -> Result<Self> {
        if let Some(first) = points.first() {
            if points.iter().any(|p| p.dim() != first.dim()) {
                return Err(Error::DimensionMismatch("mixed point dimensions in multiset".into()));
            }
        }
        Ok(Multiset { points })
    }

    pub fn empty() -> Self {
        Multiset { points: Vec::new() }
    }

    pub fn from_scalars(xs: &[f64]) -> Result<Self> {
        Multiset::new(xs.iter().map(|&x| Point::scalar(x)).collect::<Result<_>>()?)
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
}

/// How the per-order degrees of a schedule are generated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ScheduleKind {
    Constant,
    LogSchedule,
    BetaSchedule,
}

/// Parameters of a schedule; which fields apply depends on the kind.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ScheduleParams {
    #[serde(rename = "D", skip_serializing_if = "Option::is_none")]
    pub degree: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c1: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
}

/// Total-degree budgets `D_1 >= D_2 >= ... >= D_N`, one per body order.
/// The nonincrease is required for the self-interaction terms produced by
/// the pooled resummation to be absorbable into lower orders.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DegreeSchedule {
    kind: ScheduleKind,
    degrees: Vec<usize>,
    params: ScheduleParams,
}

impl DegreeSchedule {
    pub fn constant(n_max: usize, degree: usize) -> Result<Self> {
        schedule_degrees(
            ScheduleKind::Constant,
            n_max,
            &ScheduleParams { degree: Some(degree), ..Default::default() },
        )
    }

    pub fn log(n_max: usize, c1: f64) -> Result<Self> {
        schedule_degrees(
            ScheduleKind::LogSchedule,
            n_max,
            &ScheduleParams { c1: Some(c1), ..Default::default() },
        )
    }

    pub fn beta(n_max: usize, c1: f64, beta: f64) -> Result<Self> {
        schedule_degrees(
            ScheduleKind::BetaSchedule,
            n_max,
            &ScheduleParams { c1: Some(c1), beta: Some(beta), ..Default::default() },
        )
    }

    pub fn kind(&self) -> ScheduleKind {
        self.kind
    }

    pub fn params(&self) -> &ScheduleParams {
        &self.params
    }

    /// Maximum body order `N`.
    pub fn n_max(&self) -> usize {
        self.degrees.len()
    }

    /// Degree budget of body order `n` (1-based).
    pub fn degree(&self, n: usize) -> usize {
        self.degrees[n - 1]
    }

    pub fn degrees(&self) -> &[usize] {
        &self.degrees
    }
}

/// Generates a degree schedule: constant `D_n = D`; log schedule
/// `D_n = ceil(c1 N ln N)`; beta schedule `D_n = ceil(c1 n^(-beta) N)` up to
/// the crossover `n* = (ln N)^(-1/beta) N` and `ceil(c1 N^(1-beta) ln N)`
/// beyond it. Output is clipped nonincreasing by a running maximum from the
/// right; at `N = 1` the log-free fallback `D_n = ceil(c1 N)` applies.
pub fn schedule_degrees(
    kind: ScheduleKind,
    n_max: usize,
    params: &ScheduleParams,
) -> Result<DegreeSchedule> {
    if n_max == 0 {
        return Err(Error::Invalid("schedule needs N >= 1".into()));
    }
    let nf = n_max as f64;
    let mut degrees = vec![0usize; n_max];
    match kind {
        ScheduleKind::Constant => {
            let d = params
                .degree
                .ok_or_else(|| Error::Invalid("constant schedule needs params.D".into()))?;
            degrees.fill(d);
        }
        ScheduleKind::LogSchedule => {
            let c1 = require_c1(params)?;
            let d = if n_max >= 2 { (c1 * nf * nf.ln()).ceil() } else { (c1 * nf).ceil() };
            degrees.fill(d as usize);
        }
        ScheduleKind::BetaSchedule => {
            let c1 = require_c1(params)?;
            let beta = params
                .beta
                .ok_or_else(|| Error::Invalid("beta schedule needs params.beta".into()))?;
            if !(beta > 0.0 && beta < 1.0) {
                return Err(Error::Invalid(format!("beta must lie in (0, 1), got {beta}")));
            }
            if n_max == 1 {
                degrees[0] = (c1 * nf).ceil() as usize;
            } else {
                let threshold = nf.ln().powf(-1.0 / beta) * nf;
                let tail = (c1 * nf.powf(1.0 - beta) * nf.ln()).ceil() as usize;
                for (i, slot) in degrees.iter_mut().enumerate() {
                    let n = (i + 1) as f64;
                    *slot = if n <= threshold {
                        (c1 * n.powf(-beta) * nf).ceil() as usize
                    } else {
                        tail
                    };
                }
            }
        }
    }
    // running maximum from the right enforces D_n <= D_{n-1}
    for i in (0..n_max.saturating_sub(1)).rev() {
        degrees[i] = degrees[i].max(degrees[i + 1]);
    }
    Ok(DegreeSchedule { kind, degrees, params: *params })
}

fn require_c1(params: &ScheduleParams) -> Result<f64> {
    match params.c1 {
        Some(c1) if c1 > 0.0 => Ok(c1),
        _ => Err(Error::Invalid("schedule needs params.c1 > 0".into())),
    }
}

/// One body order of a multiset model: ordered tuples of strictly positive
/// basis indices (plus the optional degree-0 count feature at order 1),
/// their coefficients, and the parent links into the previous order.
#[derive(Debug, Clone)]
struct OrderTable {
    tuples: Vec<Vec<usize>>,
    coeffs: Vec<f64>,
    parent_pos: Vec<usize>,
    multiplier: Vec<usize>,
}

/// Operation counts of one efficient evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EvalOps {
    /// One-body evaluations spent pooling: `M x (pooled basis size)`.
    pub pool_evals: usize,
    /// Multiplications spent extending products across orders.
    pub product_mults: usize,
    /// Multiplications spent applying coefficients.
    pub coeff_mults: usize,
}

impl EvalOps {
    pub fn total(&self) -> usize {
        self.pool_evals + self.product_mults + self.coeff_mults
    }
}

/// Value and measured cost of one efficient evaluation.
#[derive(Debug, Clone)]
pub struct ClusterEval {
    pub value: f64,
    pub ops: EvalOps,
}

/// A body-ordered multiset function in efficient pooled form:
/// `f(x) = V0 + sum_n sum_v c_v prod_t A_{v_t}(x)` with trimmed tuples.
#[derive(Debug, Clone)]
pub struct MultisetModel {
    spec: BasisSpec,
    schedule: DegreeSchedule,
    constant_term: f64,
    orders: Vec<OrderTable>,
    count_feature: bool,
    table: BasisTable,
}

impl MultisetModel {
    /// Builds the model structure for a spec and schedule with all
    /// coefficients zero. When `count_feature` is set, a single degree-0
    /// pooled feature (`A_0 = M`, the point count) is admitted at order 1 so
    /// that pure-count targets are representable.
    pub fn zeroed(spec: &BasisSpec, schedule: &DegreeSchedule, count_feature: bool) -> Result<Self> {
        let d1 = schedule.degree(1).min(spec.max_degree);
        let table = BasisTable::new(spec, d1);
        let degrees_by_flat: Vec<usize> = (0..table.len()).map(|v| table.degree(v)).collect();

        let mut orders: Vec<OrderTable> = Vec::with_capacity(schedule.n_max());
        for n in 1..=schedule.n_max() {
            let budget = schedule.degree(n).min(spec.max_degree * n);
            let mut tuples = Vec::new();
            if n == 1 && count_feature {
                tuples.push(vec![0]);
            }
            let mut stack = Vec::with_capacity(n);
            enumerate_trimmed(&degrees_by_flat, n, budget, 1, &mut stack, &mut tuples);

            let expected = count_params_trimmed(spec, n, schedule.degree(n));
            let enumerated = tuples.len() - usize::from(n == 1 && count_feature);
            debug_assert_eq!(BigUint::from(enumerated), expected, "order {n} enumeration");

            let mut parent_pos = Vec::with_capacity(tuples.len());
            let mut multiplier = Vec::with_capacity(tuples.len());
            for tuple in &tuples {
                multiplier.push(*tuple.last().unwrap());
                if n == 1 {
                    parent_pos.push(0);
                } else {
                    let prefix = &tuple[..n - 1];
                    let pos = orders[n - 2]
                        .tuples
                        .binary_search_by(|t| t.as_slice().cmp(prefix))
                        .map_err(|_| {
                            Error::Invalid(format!(
                                "schedule not absorbable: prefix {prefix:?} missing at order {}",
                                n - 1
                            ))
                        })?;
                    parent_pos.push(pos);
                }
            }
            let coeffs = vec![0.0; tuples.len()];
            orders.push(OrderTable { tuples, coeffs, parent_pos, multiplier });
        }
        Ok(MultisetModel {
            spec: *spec,
            schedule: schedule.clone(),
            constant_term: 0.0,
            orders,
            count_feature,
            table,
        })
    }

    pub fn spec(&self) -> &BasisSpec {
        &self.spec
    }

    pub fn schedule(&self) -> &DegreeSchedule {
        &self.schedule
    }

    pub fn constant_term(&self) -> f64 {
        self.constant_term
    }

    pub fn set_constant_term(&mut self, v0: f64) {
        self.constant_term = v0;
    }

    pub fn has_count_feature(&self) -> bool {
        self.count_feature
    }

    /// Number of coefficients across all order tables (the parameter count
    /// that drives the evaluation cost; the constant term is not included).
    pub fn total_params(&self) -> usize {
        self.orders.iter().map(|o| o.tuples.len()).sum()
    }

    /// Per-order table sizes.
    pub fn order_sizes(&self) -> Vec<usize> {
        self.orders.iter().map(|o| o.tuples.len()).collect()
    }

    /// Number of pooled one-body entries an evaluation computes.
    pub fn pooled_len(&self) -> usize {
        self.table.len()
    }

    pub fn order_tuples(&self, n: usize) -> &[Vec<usize>] {
        &self.orders[n - 1].tuples
    }

    pub fn order_coefficients(&self, n: usize) -> &[f64] {
        &self.orders[n - 1].coeffs
    }

    pub fn order_coefficients_mut(&mut self, n: usize) -> &mut [f64] {
        &mut self.orders[n - 1].coeffs
    }

    pub fn set_coefficient(&mut self, n: usize, tuple: &[usize], c: f64) -> Result<()> {
        let table = &mut self.orders[n - 1];
        let pos = table
            .tuples
            .binary_search_by(|t| t.as_slice().cmp(tuple))
            .map_err(|_| Error::Invalid(format!("tuple {tuple:?} not in order {n} table")))?;
        table.coeffs[pos] = c;
        Ok(())
    }

    /// Pools once over the whole input, then evaluates all product features
    /// by the cross-order parent recursion (one multiplication per feature
    /// beyond order 1). Returns the flattened feature row
    /// (orders concatenated) and operation counts.
    fn features(&self, ms: &Multiset) -> Result<(Vec<f64>, EvalOps)> {
        let pooled = pool_with_table(&self.table, ms.points())?;
        let mut ops = EvalOps {
            pool_evals: ms.len() * self.table.len(),
            product_mults: 0,
            coeff_mults: 0,
        };
        let mut features = Vec::with_capacity(self.total_params());
        let mut prev: Vec<f64> = Vec::new();
        for (order_idx, order) in self.orders.iter().enumerate() {
            let mut values = Vec::with_capacity(order.tuples.len());
            for i in 0..order.tuples.len() {
                let a = pooled.get(order.multiplier[i])?;
                if order_idx == 0 {
                    values.push(a);
                } else {
                    values.push(prev[order.parent_pos[i]] * a);
                    ops.product_mults += 1;
                }
            }
            features.extend_from_slice(&values);
            prev = values;
        }
        Ok((features, ops))
    }

    /// Efficient evaluation `V0 + sum c_v prod_t A_{v_t}`; any input size,
    /// including the empty multiset (which returns the constant term).
    pub fn eval(&self, ms: &Multiset) -> Result<ClusterEval> {
        let (features, mut ops) = self.features(ms)?;
        let mut acc = self.constant_term;
        let mut offset = 0;
        for order in &self.orders {
            for (i, &c) in order.coeffs.iter().enumerate() {
                acc += c * features[offset + i];
            }
            ops.coeff_mults += order.coeffs.len();
            offset += order.coeffs.len();
        }
        Ok(ClusterEval { value: acc, ops })
    }

    /// The `k`-body component implied by the pooled form: the coefficient
    /// tables resummed over all ways the slots of each tuple can collapse
    /// onto exactly `k` distinct points (the self-interaction bookkeeping of
    /// the naive cluster oracle).
    pub fn implied_component(&self, points: &[Point]) -> Result<f64> {
        let k = points.len();
        if k == 0 || k > self.schedule.n_max() {
            return Ok(0.0);
        }
        let mut phi: Vec<Vec<f64>> = Vec::with_capacity(k);
        for p in points {
            let mut row = Vec::new();
            self.table.eval_all(p, &mut row)?;
            phi.push(row);
        }
        let mut acc = 0.0;
        for (order_idx, order) in self.orders.iter().enumerate() {
            let n = order_idx + 1;
            if n < k {
                continue;
            }
            for (tuple, &c) in order.tuples.iter().zip(&order.coeffs) {
                if c != 0.0 {
                    acc += c * surjection_sum(tuple, &phi);
                }
            }
        }
        Ok(acc)
    }
}

fn enumerate_trimmed(
    degrees_by_flat: &[usize],
    slots_left: usize,
    budget: usize,
    lo: usize,
    stack: &mut Vec<usize>,
    out: &mut Vec<Vec<usize>>,
) {
    if slots_left == 0 {
        out.push(stack.clone());
        return;
    }
    for v in lo..degrees_by_flat.len() {
        let deg = degrees_by_flat[v];
        if deg > budget {
            break;
        }
        // remaining slots each need at least degree 1
        if deg + (slots_left - 1) > budget {
            break;
        }
        stack.push(v);
        enumerate_trimmed(degrees_by_flat, slots_left - 1, budget - deg, v, stack, out);
        stack.pop();
    }
}

/// Sum over all surjections `g: slots -> points` of
/// `prod_t phi_{v_t}(y_{g(t)})`.
fn surjection_sum(tuple: &[usize], phi: &[Vec<f64>]) -> f64 {
    let n = tuple.len();
    let k = phi.len();
    if k > n {
        return 0.0;
    }
    let full: u32 = (1 << k) - 1;
    let mut assign = vec![0usize; n];
    let mut acc = 0.0;
    loop {
        let mut mask = 0u32;
        for &a in &assign {
            mask |= 1 << a;
        }
        if mask == full {
            let mut prod = 1.0;
            for (t, &v) in tuple.iter().enumerate() {
                prod *= phi[assign[t]][v];
            }
            acc += prod;
        }
        // odometer over [k]^n
        let mut pos = 0;
        loop {
            if pos == n {
                return acc;
            }
            assign[pos] += 1;
            if assign[pos] < k {
                break;
            }
            assign[pos] = 0;
            pos += 1;
        }
    }
}

/// Combinatorial cluster-sum oracle: `V0 + sum_k sum_{|S| = k} Vhat_k(x_S)`
/// over all subclusters, with the per-order components reconstructed from
/// the model's tables including self-interaction corrections. Exponential in
/// `M`, guarded at `M <= 12`; used to validate the efficient form.
pub fn naive_cluster_eval(model: &MultisetModel, ms: &Multiset) -> Result<f64> {
    let m = ms.len();
    if m > 12 {
        return Err(Error::TooLarge(format!("naive cluster sum guarded at M <= 12, got {m}")));
    }
    let mut acc = model.constant_term();
    let k_max = model.schedule().n_max().min(m);
    let mut subset = Vec::new();
    for k in 1..=k_max {
        acc += sum_over_subsets(model, ms.points(), k, 0, &mut subset)?;
    }
    Ok(acc)
}

fn sum_over_subsets(
    model: &MultisetModel,
    points: &[Point],
    k: usize,
    start: usize,
    subset: &mut Vec<Point>,
) -> Result<f64> {
    if subset.len() == k {
        return model.implied_component(subset);
    }
    let mut acc = 0.0;
    let needed = k - subset.len();
    for j in start..=points.len().saturating_sub(needed) {
        subset.push(points[j].clone());
        acc += sum_over_subsets(model, points, k, j + 1, subset)?;
        subset.pop();
    }
    Ok(acc)
}

/// Vacuum cluster expansion component
/// `V_n(x_1..x_n) = sum_{K subset} (-1)^(n-|K|) f(x_K)`, by exact subset
/// summation; guarded at `n <= 12`.
pub fn vacuum_expansion<F: Fn(&[Point]) -> f64>(oracle: F, points: &[Point]) -> Result<f64> {
    let n = points.len();
    if n > 12 {
        return Err(Error::TooLarge(format!("vacuum expansion guarded at n <= 12, got {n}")));
    }
    let mut acc = 0.0;
    for mask in 0u32..(1u32 << n) {
        let subset: Vec<Point> = points
            .iter()
            .enumerate()
            .filter(|(j, _)| mask & (1 << j) != 0)
            .map(|(_, p)| p.clone())
            .collect();
        let sign = if (n - mask.count_ones() as usize) % 2 == 0 { 1.0 } else { -1.0 };
        acc += sign * oracle(&subset);
    }
    Ok(acc)
}

/// A fitted multiset model with its training residual report.
#[derive(Debug, Clone)]
pub struct MultisetFit {
    pub model: MultisetModel,
    pub residual_rms: f64,
    pub residual_max: f64,
}

/// One joint linear least-squares over the concatenated pooled-product
/// features of all orders plus the constant term.
pub fn fit_multiset<F: Fn(&Multiset) -> f64>(
    oracle: F,
    spec: &BasisSpec,
    schedule: &DegreeSchedule,
    train: &[Multiset],
    ridge: f64,
    count_feature: bool,
) -> Result<MultisetFit> {
    let mut model = MultisetModel::zeroed(spec, schedule, count_feature)?;
    let p = model.total_params() + 1;
    if train.len() < 2 * p {
        return Err(Error::Invalid(format!(
            "underdetermined multiset fit: {} samples for {p} parameters (need at least {})",
            train.len(),
            2 * p
        )));
    }
    let mut x = DMatrix::zeros(train.len(), p);
    let mut y = DVector::zeros(train.len());
    for (row, ms) in train.iter().enumerate() {
        let target = oracle(ms);
        if !target.is_finite() {
            return Err(Error::Numerical("non-finite oracle value".into()));
        }
        y[row] = target;
        x[(row, 0)] = 1.0;
        let (features, _) = model.features(ms)?;
        for (col, &f) in features.iter().enumerate() {
            x[(row, col + 1)] = f;
        }
    }
    let coeffs = ridge_least_squares(&x, &y, ridge)?;

    let residual = &x * &coeffs - &y;
    let residual_rms = (residual.norm_squared() / train.len() as f64).sqrt();
    let residual_max = residual.amax();

    model.set_constant_term(coeffs[0]);
    let mut offset = 1;
    for n in 1..=model.schedule().n_max() {
        let len = model.order_coefficients(n).len();
        model
            .order_coefficients_mut(n)
            .copy_from_slice(&coeffs.as_slice()[offset..offset + len]);
        offset += len;
    }
    Ok(MultisetFit { model, residual_rms, residual_max })
}

/// Training multisets with sizes uniform in `{1, ..., m_max}` and uniform
/// i.i.d. points, deterministic in the seed.
pub fn sample_multisets(d: usize, m_max: usize, count: usize, seed: u64) -> Result<Vec<Multiset>> {
    if m_max == 0 || count == 0 {
        return Err(Error::Invalid("sample_multisets needs m_max >= 1 and count >= 1".into()));
    }
    let mut rng = sampling::rng_from_seed(seed);
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        let m = rand::Rng::gen_range(&mut rng, 1..=m_max);
        let points = (0..m).map(|_| sampling::uniform_point(&mut rng, d)).collect();
        out.push(Multiset::new(points)?);
    }
    Ok(out)
}

/// Closed-form and measured operation counts of one evaluation at input
/// size `m`, against the budget `M D_1^d + P`.
#[derive(Debug, Clone)]
pub struct OpCountReport {
    /// `M x (number of pooled one-body indices)`.
    pub pool_ops: usize,
    /// Total number of product-basis parameters.
    pub product_ops: usize,
    /// Measured total from an actual evaluation.
    pub measured_total: usize,
    /// `M D_1^d + P`.
    pub budget: f64,
    /// `measured_total / budget`; bounded by a modest constant.
    pub c_factor: f64,
}

/// Evaluates the model on a synthetic input of size `m` and reports measured
/// operation counts against the closed-form budget.
pub fn op_count_bound(model: &MultisetModel, m: usize) -> Result<OpCountReport> {
    let d = model.spec().d;
    let origin = Point::new(vec![0.0; d])?;
    let ms = Multiset::new(vec![origin; m])?;
    let eval = model.eval(&ms)?;
    let pool_ops = m * model.pooled_len();
    let product_ops = model.total_params();
    let d1 = model.schedule().degree(1).max(1);
    let budget = m as f64 * (d1 as f64).powi(d as i32) + product_ops as f64;
    let measured_total = eval.ops.total();
    Ok(OpCountReport {
        pool_ops,
        product_ops,
        measured_total,
        budget,
        c_factor: measured_total as f64 / budget,
    })
}

#[derive(Serialize, Deserialize)]
struct MsetModelJson {
    spec: BasisSpec,
    schedule: DegreeSchedule,
    #[serde(rename = "V0")]
    v0: f64,
    orders: Vec<OrderJson>,
}

#[derive(Serialize, Deserialize)]
struct OrderJson {
    n: usize,
    terms: Vec<MsetTermJson>,
}

#[derive(Serialize, Deserialize)]
struct MsetTermJson {
    v: Vec<usize>,
    c: f64,
}

impl MultisetModel {
    pub fn to_json(&self) -> serde_json::Value {
        let orders = self
            .orders
            .iter()
            .enumerate()
            .map(|(i, o)| OrderJson {
                n: i + 1,
                terms: o
                    .tuples
                    .iter()
                    .zip(&o.coeffs)
                    .map(|(t, &c)| MsetTermJson { v: t.clone(), c })
                    .collect(),
            })
            .collect();
        serde_json::to_value(MsetModelJson {
            spec: self.spec,
            schedule: self.schedule.clone(),
            v0: self.constant_term,
            orders,
        })
        .expect("model serialization cannot fail")
    }

    pub fn from_json(value: &serde_json::Value) -> Result<Self> {
        let raw: MsetModelJson = serde_json::from_value(value.clone())
            .map_err(|e| Error::Invalid(format!("bad multiset model JSON: {e}")))?;
        let count_feature = raw
            .orders
            .iter()
            .find(|o| o.n == 1)
            .map(|o| o.terms.iter().any(|t| t.v == [0]))
            .unwrap_or(false);
        let mut model = MultisetModel::zeroed(&raw.spec, &raw.schedule, count_feature)?;
        model.set_constant_term(raw.v0);
        for order in &raw.orders {
            for term in &order.terms {
                model.set_coefficient(order.n, &term.v, term.c)?;
            }
        }
        Ok(model)
    }
}
