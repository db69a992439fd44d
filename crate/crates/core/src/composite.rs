//! Squeezed, displaced-number and modified-displacement state families.

use num_complex::Complex64;

use crate::block::{composite_block, displacement_block};
use crate::error::{Error, Result};
use crate::fock::{ladder_matrices, FockOperator, FockVector, StretchLabel, TruncationConfig, ZERO};
use crate::linalg::expm_antihermitian;
use crate::operators::{displacement, matrix_element, squeezing, SqueezeLabel};
use crate::states::{coherent_amplitudes, make_state};

/// `D_σ(ζ) S_υ(ξ) |n>` parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CompositeLabel {
    pub displace: StretchLabel,
    pub squeeze: SqueezeLabel,
    pub n: usize,
}

impl CompositeLabel {
    pub fn new(displace: StretchLabel, squeeze: SqueezeLabel, n: usize) -> Self {
        Self { displace, squeeze, n }
    }

    /// Levels of the realized vector that are free of truncation artifacts.
    pub fn block(&self, dim: usize) -> usize {
        composite_block(dim, self.displace.w().norm(), self.squeeze.strength())
    }

    fn admit(&self, dim: usize) -> Result<()> {
        if self.n < self.block(dim) {
            return Ok(());
        }
        let mut required = dim.max(self.n + 1);
        while self.n >= self.block(required) {
            required += 1;
        }
        Err(Error::Truncation {
            dim,
            required_dim: required,
            reason: format!("level {} is outside the trusted block {}", self.n, self.block(dim)),
        })
    }
}

/// `D_σ(ζ) S_υ(ξ) |0>`.
pub fn squeezed_coherent(label: &CompositeLabel, cfg: &TruncationConfig) -> Result<FockVector> {
    squeezed_displaced_number(&CompositeLabel { n: 0, ..*label }, cfg)
}

/// `D_σ(ζ) S_υ(ξ) |n>`.
pub fn squeezed_displaced_number(label: &CompositeLabel, cfg: &TruncationConfig) -> Result<FockVector> {
    label.admit(cfg.dim)?;
    let ket = FockVector::basis(label.n, cfg.dim)?;
    let squeezed = squeezing(&label.squeeze, cfg).apply(&ket);
    Ok(displacement(&label.displace, cfg).apply(&squeezed))
}

/// Closed-form expectations in `D_σ(ζ) S_υ(ξ)|0>`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SqueezedExpectations {
    /// `<a> = ζ^σ`.
    pub ea: Complex64,
    /// `<a²>` as written in the source: `|ζ|^{2σ} - e^{2iυθ} sinh r cosh r`.
    pub ea2_reported: Complex64,
    /// `<a²>` from operator algebra: `(ζ^σ)² - e^{iυθ} sinh r cosh r`.
    pub ea2_operator: Complex64,
    /// `<a†a> = |ζ|^{2σ} + sinh² r`.
    pub en: f64,
}

impl SqueezedExpectations {
    /// `|ea2_reported - ea2_operator|`; nonzero whenever ζ^σ or ξ^υ is complex.
    pub fn ea2_discrepancy(&self) -> f64 {
        (self.ea2_reported - self.ea2_operator).norm()
    }
}

pub fn squeezed_expectations(label: &CompositeLabel) -> SqueezedExpectations {
    let w = label.displace.w();
    let sq = &label.squeeze;
    let r = sq.strength();
    let sc = r.sinh() * r.cosh();
    SqueezedExpectations {
        ea: w,
        ea2_reported: Complex64::new(w.norm_sqr(), 0.0) - Complex64::from_polar(sc, 2.0 * sq.phase()),
        ea2_operator: w * w - sq.sinh_phase() * sq.cosh_term(),
        en: w.norm_sqr() + r.sinh().powi(2),
    }
}

/// `<ψ|a|ψ>`, `<ψ|a²|ψ>` and `<ψ|a†a|ψ>` on a truncated vector.
pub fn sandwich_expectations(state: &FockVector) -> (Complex64, Complex64, f64) {
    let cfg = TruncationConfig { dim: state.dim(), tail_tol: 0.0 };
    let l = ladder_matrices(&cfg);
    let a2 = l.a.compose(&l.a);
    (
        state.expectation(&l.a),
        state.expectation(&a2),
        state.expectation(&l.num).re,
    )
}

/// `D_σ(ζ)|n>` from the closed-form Laguerre expansion.
pub fn displaced_number(label: &StretchLabel, n: usize, cfg: &TruncationConfig) -> Result<FockVector> {
    let block = displacement_block(cfg.dim, label.w().norm());
    if n >= block {
        return Err(Error::Truncation {
            dim: cfg.dim,
            required_dim: required_for(n, |d| displacement_block(d, label.w().norm())),
            reason: format!("level {n} is outside the trusted block {block}"),
        });
    }
    let amps = (0..cfg.dim).map(|m| matrix_element(m, n, label)).collect();
    Ok(FockVector::from_vec(amps))
}

/// `(a† - (ζ^σ)*)^n / √(n!)` applied to `|ζ>_σ`.
pub fn displaced_number_ladder(label: &StretchLabel, n: usize, cfg: &TruncationConfig) -> Result<FockVector> {
    let mut v = make_state(label, cfg)?;
    let l = ladder_matrices(cfg);
    let wc = label.w_conj();
    for k in 1..=n {
        let raised = l.adag.apply(&v);
        v = FockVector::new((raised.amps - &v.amps * wc) * Complex64::new(1.0 / (k as f64).sqrt(), 0.0));
    }
    Ok(v)
}

fn required_for(n: usize, block: impl Fn(usize) -> usize) -> usize {
    let mut d = n + 1;
    while n >= block(d) {
        d += 1;
    }
    d
}

/// `exp{(α^σ)* ζ^σ - α^σ (ζ^σ)*}`, a pure phase.
pub fn modified_prefactor(alpha: &StretchLabel, zeta: &StretchLabel) -> Result<Complex64> {
    alpha.same_sigma(zeta)?;
    let x = alpha.w_conj() * zeta.w();
    Ok(Complex64::from_polar(1.0, 2.0 * x.im))
}

/// `exp{α^σ(a† - (ζ^σ)*) - (α^σ)*(a - ζ^σ)}`, exponentiated directly.
pub fn modified_displacement(alpha: &StretchLabel, zeta: &StretchLabel, cfg: &TruncationConfig) -> Result<FockOperator> {
    alpha.same_sigma(zeta)?;
    let l = ladder_matrices(cfg);
    let (wa, wz) = (alpha.w(), zeta.w());
    let shift = wa.conj() * wz - wa * wz.conj();
    let mut g = &l.adag.mat * wa - &l.a.mat * wa.conj();
    for k in 0..cfg.dim {
        g[(k, k)] += shift;
    }
    Ok(FockOperator::new(expm_antihermitian(&g)))
}

/// `D_σ(α, ζ)|ζ>_σ`, through the operator.
pub fn modified_coherent(alpha: &StretchLabel, zeta: &StretchLabel, cfg: &TruncationConfig) -> Result<FockVector> {
    let op = modified_displacement(alpha, zeta, cfg)?;
    Ok(op.apply(&make_state(zeta, cfg)?))
}

/// The same state from its number-state expansion
/// `prefactor · Σ_n e^{-|ζ|^{2σ}/2} ζ^{σn}/√(n!) <m|D_σ(α)|n>`.
pub fn modified_coherent_expansion(alpha: &StretchLabel, zeta: &StretchLabel, dim: usize) -> Result<FockVector> {
    let pre = modified_prefactor(alpha, zeta)?;
    let coeffs = coherent_amplitudes(zeta.w(), dim);
    let mut out = FockVector::zeros(dim);
    for m in 0..dim {
        let mut acc = ZERO;
        for n in 0..dim {
            acc += coeffs.amps[n] * matrix_element(m, n, alpha);
        }
        out.amps[m] = pre * acc;
    }
    Ok(out)
}
