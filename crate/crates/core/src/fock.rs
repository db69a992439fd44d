//! Truncated number-basis numerics: labels, vectors, operators, ladder
//! matrices, fractional complex powers and associated Laguerre polynomials.

use std::f64::consts::PI;
use std::fmt;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};

pub(crate) const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };
pub(crate) const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };

fn check_exponent(s: f64, name: &str) -> Result<()> {
    if s > 0.0 && s <= 1.0 {
        Ok(())
    } else {
        Err(Error::domain(format!("{name} = {s} is outside (0, 1]")))
    }
}

/// Principal-branch fractional power `|z|^s e^{i s Arg z}`, `Arg z ∈ (-π, π]`.
pub fn complex_power(z: Complex64, s: f64) -> Result<Complex64> {
    check_exponent(s, "exponent")?;
    Ok(principal_power(z, s))
}

pub(crate) fn principal_power(z: Complex64, s: f64) -> Complex64 {
    if z == ZERO {
        return ZERO;
    }
    if s == 1.0 {
        return z;
    }
    let r = z.norm();
    // atan2 returns -π for (-x, -0.0); fold it onto the +π side of the cut.
    let mut arg = z.im.atan2(z.re);
    if arg == -PI {
        arg = PI;
    }
    Complex64::from_polar(r.powf(s), s * arg)
}

/// Size of the number basis and how much Poisson tail it may drop.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncationConfig {
    pub dim: usize,
    pub tail_tol: f64,
}

impl TruncationConfig {
    pub fn new(dim: usize, tail_tol: f64) -> Result<Self> {
        if dim == 0 {
            return Err(Error::domain("dim must be at least 1"));
        }
        if !(0.0..1.0).contains(&tail_tol) {
            return Err(Error::domain(format!("tail_tol = {tail_tol} is outside [0, 1)")));
        }
        Ok(Self { dim, tail_tol })
    }

    /// Smallest basis whose analytic Poisson tail bound is within `tail_tol`.
    pub fn for_mean(mean: f64, tail_tol: f64) -> Result<Self> {
        let dim = required_dim(mean, tail_tol)?;
        Self::new(dim, tail_tol)
    }

    /// Checks that the Poisson tail above `dim` is bounded by `tail_tol`.
    pub fn admit_mean(&self, mean: f64) -> Result<()> {
        if poisson_tail_bound(mean, self.dim) <= self.tail_tol {
            return Ok(());
        }
        Err(Error::Truncation {
            dim: self.dim,
            required_dim: required_dim(mean, self.tail_tol)?,
            reason: format!("Poisson tail with mean {mean} exceeds {:e}", self.tail_tol),
        })
    }
}

/// Chernoff bound on `P(X >= dim)` for `X ~ Poisson(mean)`.
///
/// Returns 1 when `dim <= mean`, where the bound is vacuous.
pub fn poisson_tail_bound(mean: f64, dim: usize) -> f64 {
    if mean <= 0.0 {
        return if dim >= 1 { 0.0 } else { 1.0 };
    }
    let n = dim as f64;
    if n <= mean {
        return 1.0;
    }
    (-mean + n * (1.0 + mean.ln() - n.ln())).exp().min(1.0)
}

fn required_dim(mean: f64, tail_tol: f64) -> Result<usize> {
    if !(mean >= 0.0 && mean.is_finite()) {
        return Err(Error::domain(format!("Poisson mean {mean} is not a finite nonnegative number")));
    }
    if tail_tol <= 0.0 {
        if mean == 0.0 {
            return Ok(1);
        }
        return Err(Error::domain("a zero tail tolerance is unattainable for a nonzero label"));
    }
    let mut dim = (mean.floor() as usize) + 1;
    while poisson_tail_bound(mean, dim) > tail_tol {
        dim += 1;
    }
    Ok(dim)
}

/// Label of a stretched coherent state: `zeta` with exponent `sigma`.
///
/// The canonical amplitude `w = zeta^sigma` is cached on construction and is
/// the only thing states and operators depend on.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StretchLabel {
    zeta: Complex64,
    sigma: f64,
    w: Complex64,
}

impl StretchLabel {
    pub fn new(zeta: Complex64, sigma: f64) -> Result<Self> {
        check_exponent(sigma, "sigma")?;
        if !(zeta.re.is_finite() && zeta.im.is_finite()) {
            return Err(Error::domain("label must be finite"));
        }
        Ok(Self {
            zeta,
            sigma,
            w: principal_power(zeta, sigma),
        })
    }

    pub fn from_polar(r: f64, phi: f64, sigma: f64) -> Result<Self> {
        Self::new(Complex64::from_polar(r, phi), sigma)
    }

    pub fn zeta(&self) -> Complex64 {
        self.zeta
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    /// `zeta^sigma` on the principal branch.
    pub fn w(&self) -> Complex64 {
        self.w
    }

    /// `(zeta^sigma)*`, the conjugate of the canonical amplitude.
    pub fn w_conj(&self) -> Complex64 {
        self.w.conj()
    }

    /// `|zeta|^{2 sigma}`, the Poisson mean of the photon distribution.
    pub fn mean(&self) -> f64 {
        self.w.norm_sqr()
    }

    pub(crate) fn same_sigma(&self, other: &Self) -> Result<()> {
        if self.sigma == other.sigma {
            Ok(())
        } else {
            Err(Error::SigmaMismatch(self.sigma, other.sigma))
        }
    }
}

/// Finite amplitude list over number states `|0>..|dim-1>`.
#[derive(Debug, Clone, PartialEq)]
pub struct FockVector {
    pub amps: DVector<Complex64>,
}

impl FockVector {
    pub fn new(amps: DVector<Complex64>) -> Self {
        Self { amps }
    }

    pub fn from_vec(amps: Vec<Complex64>) -> Self {
        Self::new(DVector::from_vec(amps))
    }

    pub fn zeros(dim: usize) -> Self {
        Self::new(DVector::zeros(dim))
    }

    /// Number state `|n>` in a basis of size `dim`.
    pub fn basis(n: usize, dim: usize) -> Result<Self> {
        if n >= dim {
            return Err(Error::Truncation {
                dim,
                required_dim: n + 1,
                reason: format!("number state |{n}> does not fit"),
            });
        }
        let mut v = Self::zeros(dim);
        v.amps[n] = ONE;
        Ok(v)
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    /// `Σ |amps_n|²`.
    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// `<self|other>` in the number basis.
    pub fn inner(&self, other: &Self) -> Result<Complex64> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch(self.dim(), other.dim()));
        }
        Ok(self.amps.dotc(&other.amps))
    }

    /// `|amps_n|²` for every level.
    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    /// Largest `|self_n - other_n|` over `n < block`.
    pub fn block_distance(&self, other: &Self, block: usize) -> f64 {
        let block = block.min(self.dim()).min(other.dim());
        (0..block)
            .map(|n| (self.amps[n] - other.amps[n]).norm())
            .fold(0.0, f64::max)
    }

    /// `<self|op|self>`.
    pub fn expectation(&self, op: &FockOperator) -> Complex64 {
        self.amps.dotc(&(&op.mat * &self.amps))
    }

    /// Unit vector with components drawn uniformly from the square
    /// `[-1, 1] x [-1, 1]` before normalization.
    pub fn random_normalized<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Self {
        let amps: Vec<Complex64> = (0..dim)
            .map(|_| Complex64::new(rng.gen_range(-1.0..=1.0), rng.gen_range(-1.0..=1.0)))
            .collect();
        let v = Self::from_vec(amps);
        let norm = v.norm_sqr().sqrt();
        Self::new(v.amps.unscale(norm))
    }
}

/// Dense complex matrix in the number basis.
#[derive(Clone, PartialEq)]
pub struct FockOperator {
    pub mat: DMatrix<Complex64>,
}

impl fmt::Debug for FockOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FockOperator({}x{})", self.mat.nrows(), self.mat.ncols())
    }
}

impl FockOperator {
    pub fn new(mat: DMatrix<Complex64>) -> Self {
        Self { mat }
    }

    pub fn identity(dim: usize) -> Self {
        Self::new(DMatrix::identity(dim, dim))
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn adjoint(&self) -> Self {
        Self::new(self.mat.adjoint())
    }

    pub fn apply(&self, v: &FockVector) -> FockVector {
        FockVector::new(&self.mat * &v.amps)
    }

    pub fn compose(&self, rhs: &Self) -> Self {
        Self::new(&self.mat * &rhs.mat)
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self::new(&self.mat * c)
    }

    pub fn entry(&self, m: usize, n: usize) -> Complex64 {
        self.mat[(m, n)]
    }

    /// Largest `|self_mn - other_mn|` with `m, n < block`.
    pub fn block_distance(&self, other: &Self, block: usize) -> f64 {
        let block = block.min(self.dim()).min(other.dim());
        let mut worst: f64 = 0.0;
        for n in 0..block {
            for m in 0..block {
                worst = worst.max((self.mat[(m, n)] - other.mat[(m, n)]).norm());
            }
        }
        worst
    }

    /// `max |(M†M - I)_mn|` over the low block.
    pub fn unitarity_residual(&self, block: usize) -> f64 {
        let gram = Self::new(self.mat.adjoint() * &self.mat);
        gram.block_distance(&Self::identity(self.dim()), block)
    }
}

/// Truncated annihilation, creation and number operators.
#[derive(Debug, Clone)]
pub struct Ladder {
    pub a: FockOperator,
    pub adag: FockOperator,
    pub num: FockOperator,
}

pub fn ladder_matrices(cfg: &TruncationConfig) -> Ladder {
    let dim = cfg.dim;
    let mut a = DMatrix::zeros(dim, dim);
    let mut num = DMatrix::zeros(dim, dim);
    for n in 0..dim {
        num[(n, n)] = Complex64::new(n as f64, 0.0);
        if n >= 1 {
            a[(n - 1, n)] = Complex64::new((n as f64).sqrt(), 0.0);
        }
    }
    let adag = a.adjoint();
    Ladder {
        a: FockOperator::new(a),
        adag: FockOperator::new(adag),
        num: FockOperator::new(num),
    }
}

/// Cumulative `ln n!` table for `n = 0..=max`.
#[derive(Debug, Clone)]
pub struct LogFactorials(Vec<f64>);

impl LogFactorials {
    pub fn new(max: usize) -> Self {
        let mut table = Vec::with_capacity(max + 1);
        let mut acc = 0.0;
        table.push(acc);
        for n in 1..=max {
            acc += (n as f64).ln();
            table.push(acc);
        }
        Self(table)
    }

    pub fn get(&self, n: usize) -> f64 {
        self.0[n]
    }
}

pub fn ln_factorial(n: usize) -> f64 {
    (2..=n).map(|k| (k as f64).ln()).sum()
}

/// Associated Laguerre polynomial `L_n^{(k)}(x)`.
///
/// Nonnegative `k` runs the three-term recurrence in `n`. Negative `k = -j`
/// (with `j <= n`) uses `L_n^{(-j)}(x) = (-x)^j (n-j)!/n! L_{n-j}^{(j)}(x)`.
pub fn laguerre_assoc(n: usize, k: i64, x: f64) -> Result<f64> {
    if k >= 0 {
        return Ok(laguerre_recurrence(n, k as f64, x));
    }
    let j = k.unsigned_abs() as usize;
    if j > n {
        return Err(Error::domain(format!("upper index {k} < -n = -{n}")));
    }
    let ratio = (ln_factorial(n - j) - ln_factorial(n)).exp();
    Ok((-x).powi(j as i32) * ratio * laguerre_recurrence(n - j, j as f64, x))
}

fn laguerre_recurrence(n: usize, k: f64, x: f64) -> f64 {
    let mut prev = 1.0;
    if n == 0 {
        return prev;
    }
    let mut cur = 1.0 + k - x;
    for j in 1..n {
        let jf = j as f64;
        let next = ((2.0 * jf + 1.0 + k - x) * cur - (jf + k) * prev) / (jf + 1.0);
        prev = cur;
        cur = next;
    }
    cur
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn complex_power_examples() {
        assert!((complex_power(c(4.0, 0.0), 0.5).unwrap() - c(2.0, 0.0)).norm() < 1e-15);
        assert!((complex_power(c(-1.0, 0.0), 0.5).unwrap() - c(0.0, 1.0)).norm() < 1e-15);
        // -1 - 0i sits on the cut too and must not flip to -i.
        assert!((complex_power(c(-1.0, -0.0), 0.5).unwrap() - c(0.0, 1.0)).norm() < 1e-15);
        let z = Complex64::from_polar(2.0, PI / 3.0);
        let expect = Complex64::from_polar(2f64.sqrt(), PI / 6.0);
        assert!((complex_power(z, 0.5).unwrap() - expect).norm() < 1e-15);
        assert_eq!(complex_power(ZERO, 0.3).unwrap(), ZERO);
    }

    #[test]
    fn complex_power_rejects_bad_exponent() {
        for s in [0.0, -0.5, 1.5, f64::NAN] {
            assert!(matches!(complex_power(ONE, s), Err(Error::Domain(_))));
        }
    }

    #[test]
    fn label_invariants() {
        let l = StretchLabel::new(c(1.0, 2.0), 1.0).unwrap();
        assert_eq!(l.w(), c(1.0, 2.0));
        let l = StretchLabel::from_polar(3.0, 2.5, 0.4).unwrap();
        assert!((l.w().norm() - 3f64.powf(0.4)).abs() < 1e-15);
        assert_eq!(l.w_conj(), l.w().conj());
        assert!(StretchLabel::new(ONE, 0.0).is_err());
    }

    #[test]
    fn ladder_small_dims() {
        let l = ladder_matrices(&TruncationConfig::new(2, 0.0).unwrap());
        assert_eq!(l.a.entry(0, 1), ONE);
        assert_eq!(l.a.entry(1, 0), ZERO);
        assert_eq!(l.a.entry(0, 0), ZERO);

        let l = ladder_matrices(&TruncationConfig::new(3, 0.0).unwrap());
        assert_eq!(l.adag.entry(2, 1), c(2f64.sqrt(), 0.0));
        let n = l.adag.compose(&l.a);
        for i in 0..3 {
            for j in 0..3 {
                let expect = if i == j { i as f64 } else { 0.0 };
                assert!((n.entry(i, j) - c(expect, 0.0)).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn commutator_is_identity_below_top() {
        let dim = 12;
        let l = ladder_matrices(&TruncationConfig::new(dim, 0.0).unwrap());
        let comm = &l.a.mat * &l.adag.mat - &l.adag.mat * &l.a.mat;
        let comm = FockOperator::new(comm);
        assert!(comm.block_distance(&FockOperator::identity(dim), dim - 1) < 1e-14);
        // The top level carries the known truncation artifact 1 - dim.
        assert!((comm.entry(dim - 1, dim - 1) - c(1.0 - dim as f64, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn laguerre_examples() {
        for k in [-0, 3, 7] {
            assert_eq!(laguerre_assoc(0, k, 2.3).unwrap(), 1.0);
        }
        for x in [0.0, 0.7, 5.0] {
            assert!((laguerre_assoc(1, 0, x).unwrap() - (1.0 - x)).abs() < 1e-15);
        }
        assert!((laguerre_assoc(2, 1, 2.0).unwrap() + 1.0).abs() < 1e-14);
        assert!(laguerre_assoc(2, -3, 1.0).is_err());
    }

    #[test]
    fn laguerre_negative_index_matches_explicit_sum() {
        // L_n^{(k)}(x) = Σ_i (-1)^i binom(n+k, n-i) x^i / i!, valid for integer k >= -n
        // when binom is read as the falling-factorial ratio.
        fn explicit(n: usize, k: i64, x: f64) -> f64 {
            let mut s = 0.0;
            for i in 0..=n {
                let top = n as i64 + k;
                let choose = {
                    let r = (n - i) as i64;
                    let mut v = 1.0;
                    for t in 0..r {
                        v *= (top - t) as f64 / (t + 1) as f64;
                    }
                    v
                };
                let mut xi = 1.0;
                let mut fact = 1.0;
                for t in 1..=i {
                    xi *= x;
                    fact *= t as f64;
                }
                s += if i % 2 == 0 { 1.0 } else { -1.0 } * choose * xi / fact;
            }
            s
        }
        for n in 0..8usize {
            for k in -(n as i64)..=4 {
                for x in [0.3, 1.5, 4.0] {
                    let got = laguerre_assoc(n, k, x).unwrap();
                    let want = explicit(n, k, x);
                    assert!((got - want).abs() < 1e-10 * (1.0 + want.abs()), "n={n} k={k} x={x}");
                }
            }
        }
    }

    #[test]
    fn laguerre_generating_function() {
        // Σ_n L_n^{(m-n)}(x) y^n = e^{-xy} (1+y)^m
        for m in 0..6usize {
            for (x, y) in [(1.5, 0.3), (0.4, -0.5), (2.0, 0.5), (1.5, -0.3)] {
                let lhs: f64 = (0..=60usize)
                    .map(|n| laguerre_assoc(n, m as i64 - n as i64, x).unwrap() * f64::powi(y, n as i32))
                    .sum();
                let rhs = (-x * y).exp() * (1.0 + y).powi(m as i32);
                assert!((lhs - rhs).abs() < 1e-10, "m={m} x={x} y={y}: {lhs} vs {rhs}");
            }
        }
    }

    #[test]
    fn tail_bound_and_required_dim() {
        assert_eq!(poisson_tail_bound(0.0, 1), 0.0);
        assert_eq!(poisson_tail_bound(4.0, 3), 1.0);
        let cfg = TruncationConfig::for_mean(4.0, 1e-12).unwrap();
        assert!(poisson_tail_bound(4.0, cfg.dim) <= 1e-12);
        assert!(poisson_tail_bound(4.0, cfg.dim - 1) > 1e-12);
        let small = TruncationConfig::new(8, 1e-12).unwrap();
        match small.admit_mean(4.0) {
            Err(Error::Truncation { required_dim, .. }) => assert_eq!(required_dim, cfg.dim),
            other => panic!("unexpected {other:?}"),
        }
        assert!(TruncationConfig::new(0, 0.1).is_err());
        assert!(TruncationConfig::new(4, 1.0).is_err());
    }

    #[test]
    fn tail_bound_dominates_exact_tail() {
        for mean in [0.25f64, 1.0, 4.0, 16.0] {
            for dim in 1..60usize {
                let mut p = (-mean).exp();
                let mut head = 0.0;
                for n in 0..dim {
                    if n > 0 {
                        p *= mean / n as f64;
                    }
                    head += p;
                }
                let tail = (1.0 - head).max(0.0);
                assert!(poisson_tail_bound(mean, dim) + 1e-15 >= tail, "mean {mean} dim {dim}");
            }
        }
    }
}
