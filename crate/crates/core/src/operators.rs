//! Stretched displacement and squeezing operators on the truncated basis.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fock::{laguerre_assoc, ladder_matrices, principal_power, FockOperator, StretchLabel, TruncationConfig, LogFactorials, ONE, ZERO};
use crate::linalg::expm_antihermitian;

/// Squeeze parameter `xi = rho e^{i theta}` with exponent `upsilon`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SqueezeLabel {
    xi: Complex64,
    upsilon: f64,
    xi_pow: Complex64,
    cosh_term: f64,
    sinh_phase: Complex64,
}

impl SqueezeLabel {
    pub fn new(xi: Complex64, upsilon: f64) -> Result<Self> {
        if !(upsilon > 0.0 && upsilon <= 1.0) {
            return Err(Error::domain(format!("upsilon = {upsilon} is outside (0, 1]")));
        }
        if !(xi.re.is_finite() && xi.im.is_finite()) {
            return Err(Error::domain("squeeze parameter must be finite"));
        }
        let xi_pow = principal_power(xi, upsilon);
        let r = xi_pow.norm();
        let sinh_phase = if r == 0.0 {
            ZERO
        } else {
            xi_pow / r * r.sinh()
        };
        Ok(Self {
            xi,
            upsilon,
            xi_pow,
            cosh_term: r.cosh(),
            sinh_phase,
        })
    }

    pub fn from_polar(rho: f64, theta: f64, upsilon: f64) -> Result<Self> {
        Self::new(Complex64::from_polar(rho, theta), upsilon)
    }

    pub fn xi(&self) -> Complex64 {
        self.xi
    }

    pub fn upsilon(&self) -> f64 {
        self.upsilon
    }

    /// `xi^upsilon = rho^upsilon e^{i upsilon theta}` on the principal branch.
    pub fn xi_pow(&self) -> Complex64 {
        self.xi_pow
    }

    /// `rho^upsilon`.
    pub fn strength(&self) -> f64 {
        self.xi_pow.norm()
    }

    /// `upsilon * theta`, the phase of `xi^upsilon`.
    pub fn phase(&self) -> f64 {
        if self.xi_pow == ZERO {
            0.0
        } else {
            self.xi_pow.arg()
        }
    }

    /// `cosh rho^upsilon`.
    pub fn cosh_term(&self) -> f64 {
        self.cosh_term
    }

    /// `e^{i upsilon theta} sinh rho^upsilon`.
    pub fn sinh_phase(&self) -> Complex64 {
        self.sinh_phase
    }
}

/// `exp(w a† - w* a)` on a basis of size `dim`.
pub fn displacement_from_amplitude(w: Complex64, dim: usize) -> FockOperator {
    let cfg = TruncationConfig { dim, tail_tol: 0.0 };
    let l = ladder_matrices(&cfg);
    let g = &l.adag.mat * w - &l.a.mat * w.conj();
    FockOperator::new(expm_antihermitian(&g))
}

/// `D_σ(ζ) = exp(ζ^σ a† - (ζ^σ)* a)`.
///
/// Depends on the label only through `w = ζ^σ`. Identities hold on
/// [`displacement_block`](crate::block::displacement_block).
pub fn displacement(label: &StretchLabel, cfg: &TruncationConfig) -> FockOperator {
    displacement_from_amplitude(label.w(), cfg.dim)
}

const SERIES_FLOOR: f64 = 1e-16;

/// `Σ_k (c X)^k / k!` where `X` is `a†` (raising) or `a` (lowering).
fn ladder_exponential(c: Complex64, dim: usize, raising: bool) -> Result<DMatrix<Complex64>> {
    let mut term = DMatrix::<Complex64>::identity(dim, dim);
    let mut sum = term.clone();
    let mut last = if dim > 1 { f64::INFINITY } else { 0.0 };
    for k in 1..dim {
        let mut next = DMatrix::zeros(dim, dim);
        let scale = c / k as f64;
        if raising {
            // (a† T)[m, n] = √m T[m-1, n]
            for n in 0..dim {
                for m in 1..dim {
                    next[(m, n)] = scale * (m as f64).sqrt() * term[(m - 1, n)];
                }
            }
        } else {
            // (a T)[m, n] = √(m+1) T[m+1, n]
            for n in 0..dim {
                for m in 0..dim - 1 {
                    next[(m, n)] = scale * ((m + 1) as f64).sqrt() * term[(m + 1, n)];
                }
            }
        }
        term = next;
        sum += &term;
        last = term.iter().map(|z| z.norm()).fold(0.0, f64::max);
    }
    if last > SERIES_FLOOR {
        return Err(Error::SeriesNonConvergence {
            steps: dim,
            last,
            threshold: SERIES_FLOOR,
        });
    }
    Ok(sum)
}

/// `e^{-|w|²/2} exp(w a†) exp(-w* a)`, the normal-ordered form of `D_σ(ζ)`.
///
/// Each factor is nilpotent on the truncated basis, so its power series is
/// summed exactly; an error is returned when the last term is not below
/// `1e-16`.
pub fn displacement_normal_ordered(label: &StretchLabel, cfg: &TruncationConfig) -> Result<FockOperator> {
    let w = label.w();
    if w == ZERO {
        return Ok(FockOperator::identity(cfg.dim));
    }
    let raise = ladder_exponential(w, cfg.dim, true)?;
    let lower = ladder_exponential(-w.conj(), cfg.dim, false)?;
    let pre = Complex64::new((-0.5 * label.mean()).exp(), 0.0);
    Ok(FockOperator::new(raise * lower * pre))
}

/// Closed-form `<m|D_σ(ζ)|n>` through associated Laguerre polynomials.
pub fn matrix_element(m: usize, n: usize, label: &StretchLabel) -> Complex64 {
    let w = label.w();
    let x = label.mean();
    if w == ZERO {
        return if m == n { ONE } else { ZERO };
    }
    let lf = LogFactorials::new(m.max(n));
    let ratio = (0.5 * (lf.get(n) - lf.get(m))).exp();
    let k = m as i64 - n as i64;
    let lag = laguerre_assoc(n, k, x).expect("k = m - n >= -n always holds");
    let power = if k >= 0 { w.powi(k as i32) } else { w.inv().powi((-k) as i32) };
    power * (ratio * (-0.5 * x).exp() * lag)
}

/// Right side of `D_σ(ζ) D_σ(η) = D(ζ^σ + η^σ) · phase`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProductDecomposition {
    pub combined_amplitude: Complex64,
    pub phase_factor: Complex64,
}

pub fn multiplication_law(z1: &StretchLabel, z2: &StretchLabel) -> Result<ProductDecomposition> {
    z1.same_sigma(z2)?;
    let (w1, w2) = (z1.w(), z2.w());
    let exponent = 0.5 * (w1 * w2.conj() - w1.conj() * w2);
    // The exponent is purely imaginary; drop the roundoff real part.
    Ok(ProductDecomposition {
        combined_amplitude: w1 + w2,
        phase_factor: Complex64::from_polar(1.0, exponent.im),
    })
}

/// `S_υ(ξ) = exp(½ (ξ^υ)* a² - ½ ξ^υ a†²)`.
///
/// Identities hold on [`squeezing_block`](crate::block::squeezing_block).
pub fn squeezing(label: &SqueezeLabel, cfg: &TruncationConfig) -> FockOperator {
    squeezing_from_amplitude(label.xi_pow(), cfg.dim)
}

pub(crate) fn squeezing_from_amplitude(c: Complex64, dim: usize) -> FockOperator {
    let cfg = TruncationConfig { dim, tail_tol: 0.0 };
    let l = ladder_matrices(&cfg);
    let a2 = &l.a.mat * &l.a.mat;
    let adag2 = &l.adag.mat * &l.adag.mat;
    let g = a2 * (0.5 * c.conj()) - adag2 * (0.5 * c);
    FockOperator::new(expm_antihermitian(&g))
}

/// `(u, v)` with `S†aS = u a - v a†` and `S†a†S = u a† - v* a`.
pub fn bogoliubov(label: &SqueezeLabel) -> (f64, Complex64) {
    (label.cosh_term(), label.sinh_phase())
}
