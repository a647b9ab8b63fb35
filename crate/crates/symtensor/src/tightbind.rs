//! Two-centre tight-binding model used as a ground-truth multi-set function:
//! Hamiltonian assembly from an exponentially decaying pair function, exact
//! site energies through a symmetric eigendecomposition, Chebyshev
//! matrix-polynomial approximants evaluated by the three-term recurrence,
//! and inclusion-exclusion correlation potentials.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::Rng;

use crate::error::{Error, Result};
use crate::one_body::Point;

/// Scalar observable applied to the Hamiltonian spectrum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Observable {
    /// `o(z) = exp(z)`; entire, so the Chebyshev approximant converges
    /// exponentially on any interval.
    Exp,
    /// `o(z) = 1 / (z0 - z)` with the pole held outside the spectrum.
    Resolvent { z0: f64 },
    /// `o(z) = z^2`; exactly reproduced at polynomial degree 2, useful for
    /// hand-checkable cases.
    Square,
}

impl Observable {
    pub fn apply(&self, z: f64) -> f64 {
        match *self {
            Observable::Exp => z.exp(),
            Observable::Resolvent { z0 } => 1.0 / (z0 - z),
            Observable::Square => z * z,
        }
    }
}

/// Pair-function parameters and observable defining the ground truth:
/// `h(xi) = h0 exp(-gamma0 |xi|)`.
#[derive(Debug, Clone, Copy)]
pub struct TightBindingOracle {
    pub h0: f64,
    pub gamma0: f64,
    pub observable: Observable,
    pub d: usize,
}

impl TightBindingOracle {
    pub fn new(h0: f64, gamma0: f64, observable: Observable, d: usize) -> Result<Self> {
        if !(h0 > 0.0) || !(gamma0 > 0.0) || d == 0 {
            return Err(Error::Invalid("tight binding requires h0, gamma0 > 0 and d >= 1".into()));
        }
        Ok(TightBindingOracle { h0, gamma0, observable, d })
    }

    /// Defaults used by the experiments: a moderately short-ranged hopping
    /// in one dimension with the entire observable.
    pub fn default_1d() -> Self {
        TightBindingOracle { h0: 0.5, gamma0: 1.0, observable: Observable::Exp, d: 1 }
    }

    fn pair(&self, a: &Point, b: &Point) -> f64 {
        let dist2: f64 = a
            .coords()
            .iter()
            .zip(b.coords())
            .map(|(x, y)| (x - y) * (x - y))
            .sum();
        self.h0 * (-self.gamma0 * dist2.sqrt()).exp()
    }

    /// Assembles the symmetric Hamiltonian `H_ij = h(x_i - x_j)`; both
    /// triangles are filled from one pair evaluation, so symmetry is exact.
    pub fn hamiltonian(&self, points: &[Point]) -> Result<DMatrix<f64>> {
        let m = points.len();
        if m == 0 {
            return Err(Error::Invalid("hamiltonian needs at least one point".into()));
        }
        let mut h = DMatrix::zeros(m, m);
        for i in 0..m {
            h[(i, i)] = self.h0;
            for j in (i + 1)..m {
                let v = self.pair(&points[i], &points[j]);
                h[(i, j)] = v;
                h[(j, i)] = v;
            }
        }
        Ok(h)
    }

    /// Gershgorin-certified spectral interval `[h0 - r, h0 + r]` with the
    /// radius padded by 10% (unit fallback when `M = 1`).
    pub fn spectral_interval(&self, points: &[Point]) -> Result<(f64, f64)> {
        let h = self.hamiltonian(points)?;
        let mut radius = 0.0f64;
        for i in 0..h.nrows() {
            let mut off = 0.0;
            for j in 0..h.ncols() {
                if i != j {
                    off += h[(i, j)].abs();
                }
            }
            radius = radius.max(off);
        }
        let half = if radius > 0.0 { 1.1 * radius } else { 1.0 };
        Ok((self.h0 - half, self.h0 + half))
    }

    /// Exact site energy `o(H)_11` through the symmetric
    /// eigendecomposition `sum_k o(lambda_k) (u_k)_1^2`.
    pub fn site_energy(&self, points: &[Point]) -> Result<f64> {
        let h = self.hamiltonian(points)?;
        if let Observable::Resolvent { z0 } = self.observable {
            let (a, b) = self.spectral_interval(points)?;
            if z0 >= a && z0 <= b {
                return Err(Error::Invalid(format!(
                    "resolvent pole z0 = {z0} inside the certified interval [{a}, {b}]"
                )));
            }
        }
        let eig = SymmetricEigen::new(h);
        let mut acc = 0.0;
        for (k, lambda) in eig.eigenvalues.iter().enumerate() {
            let u1 = eig.eigenvectors[(0, k)];
            acc += self.observable.apply(*lambda) * u1 * u1;
        }
        if !acc.is_finite() {
            return Err(Error::Numerical("eigendecomposition produced non-finite energy".into()));
        }
        Ok(acc)
    }

    /// Chebyshev interpolant of the observable on an explicit interval.
    pub fn chebyshev_observable(&self, degree: usize, interval: (f64, f64)) -> Result<ChebPolynomial> {
        ChebPolynomial::interpolate(self.observable, degree, interval)
    }

    /// Body-ordered site energy `o_N(H)_11`: Chebyshev interpolant of the
    /// observable on the configuration's certified interval, applied to the
    /// first unit coordinate by the matrix three-term recurrence.
    pub fn body_ordered_site_energy(&self, points: &[Point], degree: usize) -> Result<f64> {
        let interval = self.spectral_interval(points)?;
        let poly = self.chebyshev_observable(degree, interval)?;
        poly.eval_site(&self.hamiltonian(points)?)
    }

    /// As [`Self::body_ordered_site_energy`] but with a caller-supplied
    /// polynomial; rejects configurations whose certified interval escapes
    /// the polynomial's.
    pub fn body_ordered_with(&self, points: &[Point], poly: &ChebPolynomial) -> Result<f64> {
        let (a, b) = self.spectral_interval(points)?;
        if a < poly.lower() || b > poly.upper() {
            return Err(Error::Numerical(format!(
                "certified interval [{a}, {b}] escapes polynomial interval [{}, {}]",
                poly.lower(),
                poly.upper()
            )));
        }
        poly.eval_site(&self.hamiltonian(points)?)
    }

    /// Inclusion-exclusion n-correlation potential
    /// `V_nN = sum_{K subset of neighbors} (-1)^(n-|K|) o_N(H|_{1,K})_11`,
    /// with the polynomial interpolated on the full configuration's interval.
    pub fn v_n(&self, center: &Point, neighbors: &[Point], degree: usize) -> Result<f64> {
        let mut all = Vec::with_capacity(neighbors.len() + 1);
        all.push(center.clone());
        all.extend_from_slice(neighbors);
        let poly = self.chebyshev_observable(degree, self.spectral_interval(&all)?)?;
        self.v_n_with(center, neighbors, &poly)
    }

    /// As [`Self::v_n`] with a shared polynomial, so sums over clusters of a
    /// common configuration telescope exactly.
    pub fn v_n_with(&self, center: &Point, neighbors: &[Point], poly: &ChebPolynomial) -> Result<f64> {
        let n = neighbors.len();
        if n > 10 {
            return Err(Error::TooLarge(format!("v_n guarded at n <= 10 neighbors, got {n}")));
        }
        let mut acc = 0.0;
        for mask in 0u32..(1u32 << n) {
            let mut cluster = Vec::with_capacity(n + 1);
            cluster.push(center.clone());
            for (j, neighbor) in neighbors.iter().enumerate() {
                if mask & (1 << j) != 0 {
                    cluster.push(neighbor.clone());
                }
            }
            let sign = if (n - mask.count_ones() as usize) % 2 == 0 { 1.0 } else { -1.0 };
            acc += sign * poly.eval_site(&self.hamiltonian(&cluster)?)?;
        }
        Ok(acc)
    }
}

/// A polynomial in Chebyshev form on `[a, b]`:
/// `p(z) = sum_k c_k T_k((2z - a - b) / (b - a))`.
#[derive(Debug, Clone)]
pub struct ChebPolynomial {
    a: f64,
    b: f64,
    coeffs: Vec<f64>,
}

impl ChebPolynomial {
    /// Interpolates the observable at the `degree + 1` Chebyshev nodes of
    /// `[a, b]`.
    pub fn interpolate(observable: Observable, degree: usize, (a, b): (f64, f64)) -> Result<Self> {
        if !(b > a) || !a.is_finite() || !b.is_finite() {
            return Err(Error::Invalid(format!("degenerate interval [{a}, {b}]")));
        }
        if let Observable::Resolvent { z0 } = observable {
            if z0 >= a && z0 <= b {
                return Err(Error::Invalid(format!(
                    "resolvent pole z0 = {z0} inside interpolation interval [{a}, {b}]"
                )));
            }
        }
        let m = degree + 1;
        let mf = m as f64;
        let fvals: Vec<f64> = (0..m)
            .map(|j| {
                let t = (std::f64::consts::PI * (j as f64 + 0.5) / mf).cos();
                observable.apply(0.5 * (a + b) + 0.5 * (b - a) * t)
            })
            .collect();
        let mut coeffs = Vec::with_capacity(m);
        for k in 0..m {
            let mut acc = 0.0;
            for (j, fv) in fvals.iter().enumerate() {
                acc += fv * (std::f64::consts::PI * k as f64 * (j as f64 + 0.5) / mf).cos();
            }
            let scale = if k == 0 { 1.0 / mf } else { 2.0 / mf };
            coeffs.push(scale * acc);
        }
        Ok(ChebPolynomial { a, b, coeffs })
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn lower(&self) -> f64 {
        self.a
    }

    pub fn upper(&self) -> f64 {
        self.b
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// The interpolation nodes of this polynomial.
    pub fn nodes(&self) -> Vec<f64> {
        let m = self.coeffs.len();
        (0..m)
            .map(|j| {
                let t = (std::f64::consts::PI * (j as f64 + 0.5) / m as f64).cos();
                0.5 * (self.a + self.b) + 0.5 * (self.b - self.a) * t
            })
            .collect()
    }

    /// Clenshaw evaluation at a scalar argument.
    pub fn eval(&self, z: f64) -> f64 {
        let t = (2.0 * z - self.a - self.b) / (self.b - self.a);
        let mut d = 0.0;
        let mut dd = 0.0;
        for &c in self.coeffs.iter().skip(1).rev() {
            let tmp = d;
            d = 2.0 * t * d - dd + c;
            dd = tmp;
        }
        t * d - dd + self.coeffs[0]
    }

    /// `p(H)_11` by the Chebyshev three-term recurrence applied to the first
    /// unit coordinate; never forms matrix powers.
    pub fn eval_site(&self, h: &DMatrix<f64>) -> Result<f64> {
        let m = h.nrows();
        if m == 0 || h.ncols() != m {
            return Err(Error::DimensionMismatch("eval_site needs a square matrix".into()));
        }
        let scale = 2.0 / (self.b - self.a);
        let shift = (self.a + self.b) / (self.b - self.a);
        let scaled_mul = |v: &DVector<f64>| -> DVector<f64> { h * v * scale - v * shift };

        let mut prev = DVector::zeros(m);
        prev[0] = 1.0;
        let mut acc = self.coeffs[0] * prev[0];
        if self.coeffs.len() == 1 {
            return Ok(acc);
        }
        let mut cur = scaled_mul(&prev);
        acc += self.coeffs[1] * cur[0];
        for &c in self.coeffs.iter().skip(2) {
            let next = scaled_mul(&cur) * 2.0 - &prev;
            acc += c * next[0];
            prev = cur;
            cur = next;
        }
        Ok(acc)
    }

    /// Largest magnitude of the polynomial over its interval, estimated on a
    /// dense grid.
    pub fn sup_abs(&self) -> f64 {
        let grid = 2000;
        (0..=grid)
            .map(|i| {
                let z = self.a + (self.b - self.a) * i as f64 / grid as f64;
                self.eval(z).abs()
            })
            .fold(0.0, f64::max)
    }
}

/// Uniform points in `[-1,1]^d` with a minimum pairwise separation, by
/// rejection sampling.
pub fn sample_separated<R: Rng>(
    rng: &mut R,
    d: usize,
    m: usize,
    min_sep: f64,
) -> Result<Vec<Point>> {
    let mut points: Vec<Point> = Vec::with_capacity(m);
    let mut attempts = 0usize;
    while points.len() < m {
        attempts += 1;
        if attempts > 100_000 {
            return Err(Error::Numerical(format!(
                "rejection sampling failed to place {m} points at separation {min_sep}"
            )));
        }
        let coords: Vec<f64> = (0..d).map(|_| rng.gen_range(-1.0..=1.0)).collect();
        let candidate = Point::new(coords)?;
        let ok = points.iter().all(|p| {
            let dist2: f64 = p
                .coords()
                .iter()
                .zip(candidate.coords())
                .map(|(x, y)| (x - y) * (x - y))
                .sum();
            dist2.sqrt() >= min_sep
        });
        if ok {
            points.push(candidate);
        }
    }
    Ok(points)
}
