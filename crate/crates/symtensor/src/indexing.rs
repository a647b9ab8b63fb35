//! Ordered multi-index enumeration with parent links, exact parameter
//! counting by dynamic programming, and the analytic upper bounds on the
//! parameter count (Hardy-Ramanujan style, infinite-N, finite-N) together
//! with a few diagnostic formulas.

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::one_body::BasisSpec;

/// Default cap on the number of multi-indices an enumeration may produce.
pub const DEFAULT_ENUM_CAP: u128 = 100_000_000;

/// An ordered (nondecreasing) tuple of flat one-body indices with its total
/// degree.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct MultiIndex {
    entries: Vec<usize>,
    total_degree: usize,
}

impl MultiIndex {
    pub fn new(spec: &BasisSpec, entries: Vec<usize>) -> Result<Self> {
        if entries.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::Invalid("multi-index entries must be nondecreasing".into()));
        }
        let total_degree = entries.iter().map(|&v| spec.degree_of(v)).sum();
        Ok(MultiIndex { entries, total_degree })
    }

    pub fn entries(&self) -> &[usize] {
        &self.entries
    }

    pub fn total_degree(&self) -> usize {
        self.total_degree
    }

    /// Number of leading zero entries (padding slots).
    pub fn zero_count(&self) -> usize {
        self.entries.iter().take_while(|&&v| v == 0).count()
    }
}

/// All ordered multi-indices of length `n` with total degree at most `D`,
/// lexicographically sorted, with parent links for recursive product
/// evaluation. The parent of an index is the index with its largest entry
/// replaced by zero; the family is closed under that reduction.
#[derive(Debug, Clone)]
pub struct IndexSet {
    spec: BasisSpec,
    n: usize,
    degree_budget: usize,
    indices: Vec<MultiIndex>,
    parents: Vec<usize>,
    peeled: Vec<usize>,
}

impl IndexSet {
    /// Enumerates with the default cap.
    pub fn enumerate(spec: &BasisSpec, n: usize, degree_budget: usize) -> Result<Self> {
        Self::enumerate_with_cap(spec, n, degree_budget, DEFAULT_ENUM_CAP)
    }

    pub fn enumerate_with_cap(
        spec: &BasisSpec,
        n: usize,
        degree_budget: usize,
        cap: u128,
    ) -> Result<Self> {
        if n == 0 {
            return Err(Error::Invalid("index set needs at least one slot".into()));
        }
        let expected = count_params(spec, n, degree_budget);
        match expected.to_u128() {
            Some(c) if c <= cap => {}
            Some(c) => return Err(Error::ResourceCap { requested: c, cap }),
            None => return Err(Error::ResourceCap { requested: u128::MAX, cap }),
        }

        // degree per flat index over the reachable range, for cheap pruning
        let cutoff = degree_budget.min(spec.max_degree);
        let flat_count = usize::try_from(spec.count_up_to(cutoff))
            .map_err(|_| Error::ResourceCap { requested: u128::MAX, cap })?;
        let degrees: Vec<usize> = (0..flat_count).map(|v| spec.degree_of(v)).collect();

        let mut indices = Vec::new();
        let mut stack = Vec::with_capacity(n);
        enumerate_rec(&degrees, n, degree_budget, 0, &mut stack, &mut indices);
        debug_assert_eq!(indices.len() as u128, expected.to_u128().unwrap());

        let mut set = IndexSet {
            spec: *spec,
            n,
            degree_budget,
            indices,
            parents: Vec::new(),
            peeled: Vec::new(),
        };
        set.link_parents();
        Ok(set)
    }

    fn link_parents(&mut self) {
        self.parents = Vec::with_capacity(self.indices.len());
        self.peeled = Vec::with_capacity(self.indices.len());
        for (pos, idx) in self.indices.iter().enumerate() {
            let last = *idx.entries.last().unwrap();
            if last == 0 {
                // all-zero root
                self.parents.push(pos);
                self.peeled.push(0);
                continue;
            }
            let mut reduced = Vec::with_capacity(self.n);
            reduced.push(0);
            reduced.extend_from_slice(&idx.entries[..self.n - 1]);
            let parent = self
                .indices
                .binary_search_by(|m| m.entries.as_slice().cmp(reduced.as_slice()))
                .expect("downset property: reduction must be a member");
            self.parents.push(parent);
            self.peeled.push(last);
        }
    }

    pub fn spec(&self) -> &BasisSpec {
        &self.spec
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn degree_budget(&self) -> usize {
        self.degree_budget
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn indices(&self) -> &[MultiIndex] {
        &self.indices
    }

    /// Position of the reduction of index `pos` (largest entry zeroed).
    pub fn parent(&self, pos: usize) -> usize {
        self.parents[pos]
    }

    /// Flat one-body index removed when passing from `pos` to its parent.
    pub fn peeled(&self, pos: usize) -> usize {
        self.peeled[pos]
    }

    /// Position of a multi-index given by its sorted entries.
    pub fn position_of(&self, entries: &[usize]) -> Option<usize> {
        self.indices
            .binary_search_by(|m| m.entries.as_slice().cmp(entries))
            .ok()
    }

    /// Largest one-body degree appearing in any member.
    pub fn max_one_body_degree(&self) -> usize {
        self.indices
            .iter()
            .map(|m| self.spec.degree_of(*m.entries.last().unwrap()))
            .max()
            .unwrap_or(0)
    }
}

fn enumerate_rec(
    degrees: &[usize],
    slots_left: usize,
    budget: usize,
    lo: usize,
    stack: &mut Vec<usize>,
    out: &mut Vec<MultiIndex>,
) {
    if slots_left == 0 {
        let entries = stack.clone();
        let total_degree = entries.iter().map(|&v| degrees[v]).sum();
        out.push(MultiIndex { entries, total_degree });
        return;
    }
    // flat order is (degree, lex), so degree is nondecreasing along v
    for v in lo..degrees.len() {
        if degrees[v] > budget {
            break;
        }
        stack.push(v);
        enumerate_rec(degrees, slots_left - 1, budget - degrees[v], v, stack, out);
        stack.pop();
    }
}

fn binomial_big(n: u128, k: u128) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc = acc * BigUint::from(n - i) / BigUint::from(i + 1);
    }
    acc
}

/// Multisets of size `k` drawn from `c` distinguishable items.
fn multichoose(c: u64, k: usize) -> BigUint {
    if k == 0 {
        return BigUint::one();
    }
    if c == 0 {
        return BigUint::zero();
    }
    binomial_big(c as u128 + k as u128 - 1, k as u128)
}

fn count_multisets(spec: &BasisSpec, slots: usize, budget: usize, exact_parts: bool) -> BigUint {
    let top = budget.min(spec.max_degree);
    // f[b][m] = number of multisets of positive-degree indices with total
    // degree <= b and at most (resp. exactly) m parts, using degrees >= i
    let mut f = vec![vec![BigUint::zero(); slots + 1]; budget + 1];
    for b in 0..=budget {
        for m in 0..=slots {
            if !exact_parts || m == 0 {
                f[b][m] = BigUint::one();
            }
        }
    }
    for i in (1..=top).rev() {
        let c_i = spec.count_degree(i);
        let mut next = vec![vec![BigUint::zero(); slots + 1]; budget + 1];
        for b in 0..=budget {
            for m in 0..=slots {
                let mut acc = BigUint::zero();
                let k_max = (b / i).min(m);
                for k in 0..=k_max {
                    acc += multichoose(c_i, k) * &f[b - k * i][m - k];
                }
                next[b][m] = acc;
            }
        }
        f = next;
    }
    f[budget][slots].clone()
}

/// Exact number of ordered multi-indices of length `n` with total degree at
/// most `degree_budget` (zero entries allowed as padding), as a big integer.
pub fn count_params(spec: &BasisSpec, n: usize, degree_budget: usize) -> BigUint {
    count_multisets(spec, n, degree_budget, false)
}

/// Exact number of ordered `n`-tuples with strictly positive entries and
/// total degree at most `degree_budget` (the trimmed convention used by the
/// per-order tables of multi-set models).
pub fn count_params_trimmed(spec: &BasisSpec, n: usize, degree_budget: usize) -> BigUint {
    count_multisets(spec, n, degree_budget, true)
}

/// Number of additive integer partitions of `n`, by the Euler dynamic
/// program over part sizes.
pub fn partition_count(n: usize) -> BigUint {
    let mut ways = vec![BigUint::zero(); n + 1];
    ways[0] = BigUint::one();
    for part in 1..=n {
        for j in part..=n {
            let add = ways[j - part].clone();
            ways[j] += add;
        }
    }
    ways[n].clone()
}

/// A quantity carried in log space, exponentiated only on demand.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogValue {
    pub ln: f64,
}

impl LogValue {
    pub fn from_ln(ln: f64) -> Self {
        LogValue { ln }
    }

    /// The plain value when representable in `f64`, otherwise `None`.
    pub fn value(&self) -> Option<f64> {
        let v = self.ln.exp();
        v.is_finite().then_some(v)
    }

    /// Whether this bound dominates the exact count `p`.
    pub fn dominates(&self, p: &BigUint) -> bool {
        ln_biguint(p) <= self.ln
    }
}

/// Natural log of a positive big integer (`-inf` for zero), exact to f64
/// rounding even when the integer does not fit an `f64`.
pub fn ln_biguint(x: &BigUint) -> f64 {
    if x.is_zero() {
        return f64::NEG_INFINITY;
    }
    if let Some(v) = x.to_f64() {
        if v.is_finite() {
            return v.ln();
        }
    }
    let bits = x.bits();
    let shift = bits - 64;
    let top = (x >> shift).to_f64().expect("64-bit mantissa fits f64");
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

fn ln_factorial(n: usize) -> f64 {
    (2..=n).map(|k| (k as f64).ln()).sum()
}

/// Hardy-Ramanujan style N-independent bound on `P(N, D)` for `d = 1`:
/// `exp(pi sqrt(4D/3)) / (8 sqrt(3) D)`.
pub fn hr_bound(degree_budget: usize) -> Result<f64> {
    if degree_budget == 0 {
        return Err(Error::Invalid("hr_bound requires D >= 1".into()));
    }
    let d = degree_budget as f64;
    Ok((std::f64::consts::PI * (4.0 * d / 3.0).sqrt()).exp() / (8.0 * 3.0f64.sqrt() * d))
}

/// Riemann zeta at integer `s >= 2` by direct summation with an
/// Euler-Maclaurin tail correction; absolute error well below 1e-14.
pub fn zeta(s: usize) -> f64 {
    assert!(s >= 2);
    let k = 200u32;
    let kf = f64::from(k);
    let sf = s as f64;
    let mut sum: f64 = (1..k).map(|n| f64::from(n).powi(-(s as i32))).sum();
    // integral + boundary + Bernoulli corrections for the tail from k
    sum += kf.powf(1.0 - sf) / (sf - 1.0);
    sum += 0.5 * kf.powf(-sf);
    let b = [(1.0 / 6.0, 1), (-1.0 / 30.0, 2), (1.0 / 42.0, 3)];
    for (b2j, j) in b {
        let mut rising = 1.0;
        for m in 0..(2 * j - 1) {
            rising *= sf + m as f64;
        }
        let fact: f64 = (1..=(2 * j)).map(|t| t as f64).product();
        sum += b2j / fact * rising * kf.powf(-sf - (2 * j - 1) as f64);
    }
    sum
}

fn golden_section_max<F: Fn(f64) -> f64>(f: &F, mut a: f64, mut b: f64, iters: usize) -> f64 {
    let inv_phi = (5.0f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..iters {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    f(0.5 * (a + b))
}

/// `p_d = sup_{x > 0} x^{d+1} e^{-x} / (1 - e^{-x})^{d+1}`, with the
/// `x -> 0+` limit value 1 handled analytically.
pub fn p_d(d: usize) -> Result<f64> {
    assert!(d >= 1);
    let g = move |x: f64| -> f64 {
        let em = (-x).exp();
        (x / (1.0 - em)).powi(d as i32 + 1) * em
    };
    // log-spaced grid on [1e-6, 50] plus the limit value at 0
    let (lo, hi) = (1e-6f64, 50.0f64);
    let n_grid = 400;
    let mut best_val = 1.0f64; // x -> 0+ limit
    let mut best_i: Option<usize> = None;
    let mut xs = Vec::with_capacity(n_grid);
    for i in 0..n_grid {
        let t = i as f64 / (n_grid - 1) as f64;
        let x = lo * (hi / lo).powf(t);
        let v = g(x);
        if !v.is_finite() {
            return Err(Error::Numerical(format!("p_d objective non-finite at x = {x}")));
        }
        xs.push(x);
        if v > best_val {
            best_val = v;
            best_i = Some(i);
        }
    }
    if let Some(i) = best_i {
        let a = xs[i.saturating_sub(1)];
        let b = xs[(i + 1).min(n_grid - 1)];
        if !(b > a) {
            return Err(Error::Numerical("p_d bracketing failed".into()));
        }
        best_val = best_val.max(golden_section_max(&g, a, b, 80));
    }
    Ok(best_val)
}

/// `beta_d = ((d+1)/d) (c d! p_d zeta(d+1))^(1/(d+1))`, the exponent
/// constant of the N-independent parameter bound.
pub fn beta_d(d: usize, c: f64) -> Result<f64> {
    if d == 0 || c <= 0.0 {
        return Err(Error::Invalid("beta_d requires d >= 1 and c > 0".into()));
    }
    let fact: f64 = (1..=d).map(|k| k as f64).product();
    let pd = p_d(d)?;
    let inner = c * fact * pd * zeta(d + 1);
    Ok((d as f64 + 1.0) / d as f64 * inner.powf(1.0 / (d as f64 + 1.0)))
}

/// N-independent bound `D exp(beta_d D^(d/(d+1)))` on `P(N, D, d)`.
pub fn infinite_n_bound(d: usize, degree_budget: usize, c: f64) -> Result<LogValue> {
    if degree_budget == 0 {
        return Err(Error::Invalid("infinite_n_bound requires D >= 1".into()));
    }
    let beta = beta_d(d, c)?;
    let df = degree_budget as f64;
    Ok(LogValue::from_ln(df.ln() + beta * df.powf(d as f64 / (d as f64 + 1.0))))
}

/// Growth constant `alpha_d` of the finite-N bound:
/// `alpha_1 = 1`, `alpha_d = max{(d-1)! 2^d, (d-1)! + d (d-1)^(d-1)}`.
pub fn alpha_d(d: usize) -> f64 {
    assert!(d >= 1);
    if d == 1 {
        return 1.0;
    }
    let fact: f64 = (1..d).map(|k| k as f64).product();
    let a = fact * 2f64.powi(d as i32);
    let b = fact + d as f64 * ((d - 1) as f64).powi(d as i32 - 1);
    a.max(b)
}

/// Finite-N bound `D c1^N (D + c2 N^((d+1)/d))^(dN) / ((dN)! (N-1)!)` with
/// `c1 = 1 + c_tilde alpha_d` and `c2 = d`, computed in log space.
pub fn finite_n_bound(d: usize, n: usize, degree_budget: usize, c_tilde: f64) -> Result<LogValue> {
    if d == 0 || n == 0 || degree_budget == 0 {
        return Err(Error::Invalid("finite_n_bound requires d, N, D >= 1".into()));
    }
    let c1 = 1.0 + c_tilde * alpha_d(d);
    let c2 = d as f64;
    let df = degree_budget as f64;
    let nf = n as f64;
    let ln = df.ln()
        + nf * c1.ln()
        + (d * n) as f64 * (df + c2 * nf.powf((d as f64 + 1.0) / d as f64)).ln()
        - ln_factorial(d * n)
        - ln_factorial(n - 1);
    Ok(LogValue::from_ln(ln))
}

/// Korobov-class weighted-summability parameters.
#[derive(Debug, Clone, Copy)]
pub struct KorobovParams {
    pub m: f64,
    pub mu: f64,
    pub rho: f64,
}

impl KorobovParams {
    pub fn new(m: f64, mu: f64, rho: f64) -> Result<Self> {
        if !(rho > 1.0) || !(m > 0.0) || !(mu > 0.0) {
            return Err(Error::Invalid("Korobov parameters need M, mu > 0 and rho > 1".into()));
        }
        Ok(KorobovParams { m, mu, rho })
    }
}

/// Total-degree truncation error estimate `M mu^N rho^(-D)`.
pub fn korobov_error(k: &KorobovParams, n: usize, degree_budget: usize) -> f64 {
    k.m * k.mu.powi(n as i32) * k.rho.powi(-(degree_budget as i32))
}

/// Asymptotic lower-bound expression for `D` in the high-degree regime
/// `D = N^t`, `t > 1 + 1/d`:
/// `(t - 1 - 1/d)^(-t) (log P / log log P)^t`. Diagnostic only.
pub fn regime_diagnostic(d: usize, t: f64, p: f64) -> Result<f64> {
    if d == 0 {
        return Err(Error::Invalid("regime_diagnostic requires d >= 1".into()));
    }
    let margin = t - 1.0 - 1.0 / d as f64;
    if margin <= 0.0 {
        return Err(Error::Invalid(format!(
            "regime_diagnostic requires t > 1 + 1/d (t = {t}, d = {d})"
        )));
    }
    let loglog = p.ln().ln();
    if !(loglog > 1.0) {
        return Err(Error::Invalid("regime_diagnostic requires P > e^e".into()));
    }
    Ok(margin.powf(-t) * (p.ln() / loglog).powf(t))
}

/// Fits the two constants of the sandwich `c0^N D^N / (N!)^2 <= P <=
/// c1^N D^(N+1) / (N!)^2` over a `d = 1` grid of `(N, D)` pairs, returning
/// `(c0, c1)`; the caller reports rather than assumes them.
pub fn sandwich_constants(grid: &[(usize, usize)]) -> Result<(f64, f64)> {
    if grid.is_empty() {
        return Err(Error::Invalid("sandwich_constants needs a nonempty grid".into()));
    }
    let mut c0 = f64::INFINITY;
    let mut c1 = 0.0f64;
    for &(n, degree_budget) in grid {
        if degree_budget < 4 * n * n {
            return Err(Error::Invalid(format!(
                "sandwich regime requires D >= 4N^2 (N = {n}, D = {degree_budget})"
            )));
        }
        let spec = BasisSpec::chebyshev_1d(degree_budget);
        let p = count_params(&spec, n, degree_budget);
        let ln_p = ln_biguint(&p);
        let nf = n as f64;
        let df = degree_budget as f64;
        let ln_c0 = (ln_p + 2.0 * ln_factorial(n) - nf * df.ln()) / nf;
        let ln_c1 = (ln_p + 2.0 * ln_factorial(n) - (nf + 1.0) * df.ln()) / nf;
        c0 = c0.min(ln_c0.exp());
        c1 = c1.max(ln_c1.exp());
    }
    Ok((c0, c1))
}
