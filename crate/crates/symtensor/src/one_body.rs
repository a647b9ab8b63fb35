//! One-body basis families on `[-1, 1]^d`: plain Chebyshev polynomials for
//! `d = 1` and tensor-product Chebyshev polynomials for general `d`, together
//! with their degree map and per-degree counts.
//!
//! Basis indices are flat integers. The bijection to `d`-tuples orders tuples
//! by (degree, lexicographic), so index 0 is always the constant function and
//! the first `K` indices are exactly those of degree below a cutoff.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance accepted beyond the closed domain `[-1, 1]` before an input is
/// rejected; absorbs round-off-perturbed samples without clamping.
pub const DOMAIN_TOL: f64 = 1e-12;

/// Which one-body family a [`BasisSpec`] describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BasisKind {
    /// Chebyshev polynomials of the first kind on `[-1, 1]` (`d = 1`).
    Chebyshev1d,
    /// Tensor products of Chebyshev polynomials on `[-1, 1]^d`.
    TensorChebyshev,
}

/// A one-body basis family: kind, spatial dimension and the largest one-body
/// degree admitted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BasisSpec {
    pub kind: BasisKind,
    pub d: usize,
    pub max_degree: usize,
}

/// A point of the one-particle domain `[-1, 1]^d`.
#[derive(Debug, Clone, PartialEq)]
pub struct Point {
    coords: Vec<f64>,
}

impl Point {
    /// Validates every coordinate against the closed domain.
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        for (i, &x) in coords.iter().enumerate() {
            if !x.is_finite() || x.abs() > 1.0 + DOMAIN_TOL {
                return Err(Error::Invalid(format!(
                    "coordinate {i} = {x} outside [-1, 1]"
                )));
            }
        }
        Ok(Point { coords })
    }

    /// Shorthand for a 1-d point.
    pub fn scalar(x: f64) -> Result<Self> {
        Point::new(vec![x])
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }
}

/// Evaluates the Chebyshev polynomial of the first kind `T_k(x)` by the
/// three-term recurrence `T_{k+1} = 2 x T_k - T_{k-1}`.
pub fn chebyshev_eval(k: usize, x: f64) -> Result<f64> {
    if !x.is_finite() || x.abs() > 1.0 + DOMAIN_TOL {
        return Err(Error::Invalid(format!("chebyshev argument {x} outside [-1, 1]")));
    }
    Ok(chebyshev_eval_unchecked(k, x))
}

fn chebyshev_eval_unchecked(k: usize, x: f64) -> f64 {
    match k {
        0 => 1.0,
        1 => x,
        _ => {
            let mut prev = 1.0;
            let mut cur = x;
            for _ in 1..k {
                let next = 2.0 * x * cur - prev;
                prev = cur;
                cur = next;
            }
            cur
        }
    }
}

/// Fills `out[0..=k_max]` with `T_0(x), ..., T_{k_max}(x)`.
fn chebyshev_row(k_max: usize, x: f64, out: &mut Vec<f64>) {
    out.clear();
    out.push(1.0);
    if k_max == 0 {
        return;
    }
    out.push(x);
    for _ in 1..k_max {
        let n = out.len();
        out.push(2.0 * x * out[n - 1] - out[n - 2]);
    }
}

/// Number of compositions of `total` into `parts` nonnegative integers,
/// i.e. `binom(total + parts - 1, parts - 1)`.
fn compositions(total: usize, parts: usize) -> u128 {
    if parts == 0 {
        return u128::from(total == 0);
    }
    binomial(total + parts - 1, parts - 1)
}

/// Exact binomial coefficient in `u128`; panics on overflow, which is out of
/// reach at the index ranges this crate enumerates.
pub(crate) fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

impl BasisSpec {
    pub fn new(kind: BasisKind, d: usize, max_degree: usize) -> Result<Self> {
        if d == 0 {
            return Err(Error::Invalid("spatial dimension d must be positive".into()));
        }
        if kind == BasisKind::Chebyshev1d && d != 1 {
            return Err(Error::Invalid(format!("Chebyshev1d requires d = 1, got d = {d}")));
        }
        Ok(BasisSpec { kind, d, max_degree })
    }

    pub fn chebyshev_1d(max_degree: usize) -> Self {
        BasisSpec { kind: BasisKind::Chebyshev1d, d: 1, max_degree }
    }

    pub fn tensor_chebyshev(d: usize, max_degree: usize) -> Result<Self> {
        BasisSpec::new(BasisKind::TensorChebyshev, d, max_degree)
    }

    /// Exact number of admitted indices of degree `i`: one per degree for
    /// `d = 1`, otherwise the number of `d`-tuples summing to `i`.
    pub fn count_degree(&self, i: usize) -> u64 {
        let c = compositions(i, self.d);
        u64::try_from(c).expect("per-degree count overflows u64")
    }

    /// Number of admitted indices of degree at most `deg`,
    /// `binom(deg + d, d)`.
    pub fn count_up_to(&self, deg: usize) -> u128 {
        binomial(deg + self.d, self.d)
    }

    /// Degree of the basis function with flat index `v` (total on all of ℕ).
    pub fn degree_of(&self, v: usize) -> usize {
        if self.d == 1 {
            return v;
        }
        let mut deg = 0usize;
        let mut cum = 0u128;
        loop {
            let here = compositions(deg, self.d);
            if cum + here > v as u128 {
                return deg;
            }
            cum += here;
            deg += 1;
        }
    }

    /// Whether the flat index `v` is admitted by this spec.
    pub fn is_admitted(&self, v: usize) -> bool {
        self.degree_of(v) <= self.max_degree
    }

    /// Decodes a flat index into its `d`-tuple of per-coordinate degrees.
    /// Tuples are ordered by (degree, lexicographic), so index 0 is the zero
    /// tuple.
    pub fn index_to_tuple(&self, v: usize) -> Vec<usize> {
        let deg = self.degree_of(v);
        let mut rank = v as u128;
        let mut g = 0usize;
        while g < deg {
            rank -= compositions(g, self.d);
            g += 1;
        }
        // unrank the `rank`-th composition of `deg` into d parts, lex order
        let mut tuple = Vec::with_capacity(self.d);
        let mut remaining = deg;
        for slot in 0..self.d {
            let slots_left = self.d - slot - 1;
            if slots_left == 0 {
                tuple.push(remaining);
                break;
            }
            let mut value = 0usize;
            loop {
                let below = compositions(remaining - value, slots_left);
                if rank < below {
                    break;
                }
                rank -= below;
                value += 1;
            }
            tuple.push(value);
            remaining -= value;
        }
        tuple
    }

    /// Encodes a `d`-tuple of per-coordinate degrees into its flat index.
    pub fn tuple_to_index(&self, tuple: &[usize]) -> Result<usize> {
        if tuple.len() != self.d {
            return Err(Error::DimensionMismatch(format!(
                "tuple has {} entries, spec has d = {}",
                tuple.len(),
                self.d
            )));
        }
        let deg: usize = tuple.iter().sum();
        let mut flat: u128 = (0..deg).map(|g| compositions(g, self.d)).sum();
        let mut remaining = deg;
        for (slot, &value) in tuple.iter().enumerate() {
            let slots_left = self.d - slot - 1;
            for below in 0..value {
                flat += compositions(remaining - below, slots_left);
            }
            remaining -= value;
        }
        usize::try_from(flat)
            .map_err(|_| Error::IndexOutOfRange("flat index overflows usize".into()))
    }

    /// Evaluates the one-body basis function `phi_v` at `p`.
    pub fn eval_one_body(&self, v: usize, p: &Point) -> Result<f64> {
        if !self.is_admitted(v) {
            return Err(Error::IndexOutOfRange(format!(
                "index {v} has degree {} > max_degree {}",
                self.degree_of(v),
                self.max_degree
            )));
        }
        if p.dim() != self.d {
            return Err(Error::DimensionMismatch(format!(
                "point has dimension {}, spec has d = {}",
                p.dim(),
                self.d
            )));
        }
        let tuple = self.index_to_tuple(v);
        let mut acc = 1.0;
        for (k, &x) in tuple.iter().zip(p.coords()) {
            acc *= chebyshev_eval(*k, x)?;
        }
        Ok(acc)
    }

    /// Smallest constant `c` with `c_d(i) <= c (i+d-1)(i+d-2)...(i+1)` for
    /// all `0 <= i <= i_max`; the empirical witness for the per-degree count
    /// growth assumption.
    pub fn phi4_constant(&self, i_max: usize) -> f64 {
        assert!(i_max >= 1, "phi4_constant needs i_max >= 1");
        let mut c: f64 = 0.0;
        for i in 0..=i_max {
            let mut prod = 1.0f64;
            for j in 1..self.d {
                prod *= (i + j) as f64;
            }
            c = c.max(self.count_degree(i) as f64 / prod);
        }
        c
    }

    /// Smallest constant `c` with `c_d(i) <= c * i^(d-1)` for all
    /// `1 <= i <= i_max`; the growth-constant variant entering the finite-N
    /// parameter bound.
    pub fn phi4_power_constant(&self, i_max: usize) -> f64 {
        assert!(i_max >= 1, "phi4_power_constant needs i_max >= 1");
        let mut c: f64 = 0.0;
        for i in 1..=i_max {
            let denom = (i as f64).powi(self.d as i32 - 1);
            c = c.max(self.count_degree(i) as f64 / denom);
        }
        c
    }
}

/// Precomputed table of all admitted indices with degree at most a cutoff,
/// in flat order, for repeated evaluation over many points.
#[derive(Debug, Clone)]
pub struct BasisTable {
    spec: BasisSpec,
    tuples: Vec<Vec<usize>>,
    degrees: Vec<usize>,
    max_component: usize,
}

impl BasisTable {
    /// Tabulates indices of degree `<= max_deg` (clipped to the spec's
    /// `max_degree`).
    pub fn new(spec: &BasisSpec, max_deg: usize) -> Self {
        let cutoff = max_deg.min(spec.max_degree);
        let n = usize::try_from(spec.count_up_to(cutoff)).expect("basis table too large");
        let mut tuples = Vec::with_capacity(n);
        let mut degrees = Vec::with_capacity(n);
        let mut max_component = 0;
        for v in 0..n {
            let t = spec.index_to_tuple(v);
            max_component = max_component.max(t.iter().copied().max().unwrap_or(0));
            degrees.push(t.iter().sum());
            tuples.push(t);
        }
        BasisTable { spec: *spec, tuples, degrees, max_component }
    }

    pub fn len(&self) -> usize {
        self.tuples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tuples.is_empty()
    }

    pub fn degree(&self, v: usize) -> usize {
        self.degrees[v]
    }

    pub fn spec(&self) -> &BasisSpec {
        &self.spec
    }

    /// Evaluates every tabulated basis function at `p` into `out`
    /// (resized to `self.len()`); one Chebyshev recurrence per coordinate,
    /// one multiplication chain per index.
    pub fn eval_all(&self, p: &Point, out: &mut Vec<f64>) -> Result<()> {
        if p.dim() != self.spec.d {
            return Err(Error::DimensionMismatch(format!(
                "point has dimension {}, spec has d = {}",
                p.dim(),
                self.spec.d
            )));
        }
        let mut rows: Vec<Vec<f64>> = Vec::with_capacity(self.spec.d);
        for &x in p.coords() {
            let mut row = Vec::new();
            chebyshev_row(self.max_component, x, &mut row);
            rows.push(row);
        }
        out.clear();
        out.reserve(self.tuples.len());
        for tuple in &self.tuples {
            let mut acc = 1.0;
            for (dim, &k) in tuple.iter().enumerate() {
                acc *= rows[dim][k];
            }
            out.push(acc);
        }
        Ok(())
    }
}
