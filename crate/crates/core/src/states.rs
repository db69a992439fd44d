//! Stretched coherent states, their photon statistics, overlaps and
//! free evolution.

use num_complex::Complex64;

use crate::block::state_block;
use crate::error::Result;
use crate::fock::{ladder_matrices, FockVector, LogFactorials, StretchLabel, TruncationConfig, ONE};

/// `e^{-|w|²/2} w^n / √(n!)` for `n < dim`, evaluated in log-polar form.
pub fn coherent_amplitudes(w: Complex64, dim: usize) -> FockVector {
    let mut v = FockVector::zeros(dim);
    if dim == 0 {
        return v;
    }
    let r = w.norm();
    if r == 0.0 {
        v.amps[0] = ONE;
        return v;
    }
    let ln_r = r.ln();
    let arg = w.arg();
    let half_mean = 0.5 * r * r;
    let lf = LogFactorials::new(dim);
    for n in 0..dim {
        let ln_mod = -half_mean + n as f64 * ln_r - 0.5 * lf.get(n);
        v.amps[n] = Complex64::from_polar(ln_mod.exp(), n as f64 * arg);
    }
    v
}

/// The stretched coherent state `|zeta>_sigma` truncated to `cfg.dim`.
///
/// Fails with [`crate::Error::Truncation`] when the Poisson tail above the basis
/// may exceed `cfg.tail_tol`.
pub fn make_state(label: &StretchLabel, cfg: &TruncationConfig) -> Result<FockVector> {
    cfg.admit_mean(label.mean())?;
    Ok(coherent_amplitudes(label.w(), cfg.dim))
}

/// `‖a|ψ> - w|ψ>‖` on the low block, where `ψ` is the truncated state.
pub fn annihilation_residual(label: &StretchLabel, cfg: &TruncationConfig) -> Result<f64> {
    let state = make_state(label, cfg)?;
    let ladder = ladder_matrices(cfg);
    let lowered = ladder.a.apply(&state);
    let block = state_block(cfg.dim, label.w().norm());
    let w = label.w();
    let sq: f64 = (0..block)
        .map(|n| (lowered.amps[n] - w * state.amps[n]).norm_sqr())
        .sum();
    Ok(sq.sqrt())
}

/// Poisson probability of finding `n` photons, mean `|zeta|^{2 sigma}`.
pub fn photon_pmf(label: &StretchLabel, n: usize) -> f64 {
    poisson_pmf(label.mean(), n)
}

pub(crate) fn poisson_pmf(mean: f64, n: usize) -> f64 {
    if mean == 0.0 {
        return if n == 0 { 1.0 } else { 0.0 };
    }
    let lf = LogFactorials::new(n);
    (n as f64 * mean.ln() - mean - lf.get(n)).exp()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhotonStats {
    pub mean: f64,
    pub second_moment: f64,
    /// `None` for the vacuum, where the Mandel ratio is 0/0.
    pub mandel_q: Option<f64>,
}

impl PhotonStats {
    /// Builds the statistics from the first two moments.
    pub fn from_moments(mean: f64, second_moment: f64) -> Self {
        let mandel_q = if mean > 0.0 {
            Some((second_moment - mean * mean) / mean - 1.0)
        } else {
            None
        };
        Self {
            mean,
            second_moment,
            mandel_q,
        }
    }

    pub fn variance(&self) -> f64 {
        self.second_moment - self.mean * self.mean
    }
}

/// Closed-form moments of the stretched coherent state.
pub fn photon_stats(label: &StretchLabel) -> PhotonStats {
    let mean = label.mean();
    PhotonStats::from_moments(mean, mean + mean * mean)
}

/// Moments of an arbitrary (possibly truncated) number distribution.
pub fn stats_from_distribution(pmf: &[f64]) -> PhotonStats {
    let mut m1 = 0.0;
    let mut m2 = 0.0;
    for (n, p) in pmf.iter().enumerate() {
        let nf = n as f64;
        m1 += nf * p;
        m2 += nf * nf * p;
    }
    PhotonStats::from_moments(m1, m2)
}

/// Dimensionless `ωt` of free evolution under `ħω a†a`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvolutionPhase {
    pub omega_t: f64,
}

impl EvolutionPhase {
    pub fn new(omega_t: f64) -> Self {
        Self { omega_t }
    }
}

/// `amps_n ↦ e^{-i n ωt} amps_n`.
pub fn evolve(state: &FockVector, phase: EvolutionPhase) -> FockVector {
    let mut out = state.clone();
    for (n, z) in out.amps.iter_mut().enumerate() {
        *z *= Complex64::from_polar(1.0, -(n as f64) * phase.omega_t);
    }
    out
}

/// Label map `zeta ↦ e^{-iωt/σ} zeta` of the evolved state.
///
/// This agrees with [`evolve`] only while the rotated label stays on the
/// same sheet of the principal branch; use [`evolved_amplitude`] for the
/// branch-independent statement.
pub fn evolved_label(label: &StretchLabel, phase: EvolutionPhase) -> Result<StretchLabel> {
    let rot = Complex64::from_polar(1.0, -phase.omega_t / label.sigma());
    StretchLabel::new(rot * label.zeta(), label.sigma())
}

/// `e^{-iωt} w`, the canonical amplitude after evolution.
pub fn evolved_amplitude(label: &StretchLabel, phase: EvolutionPhase) -> Complex64 {
    Complex64::from_polar(1.0, -phase.omega_t) * label.w()
}

/// Whether [`evolved_label`] reproduces the evolved amplitude to `tol`.
pub fn label_map_agrees(label: &StretchLabel, phase: EvolutionPhase, tol: f64) -> Result<bool> {
    let mapped = evolved_label(label, phase)?;
    Ok((mapped.w() - evolved_amplitude(label, phase)).norm() <= tol)
}

/// `_σ<eta|zeta>_σ = exp(-|η|^{2σ}/2 - |ζ|^{2σ}/2 + (η^σ)* ζ^σ)`.
pub fn overlap(eta: &StretchLabel, zeta: &StretchLabel) -> Result<Complex64> {
    eta.same_sigma(zeta)?;
    let exponent = -0.5 * eta.mean() - 0.5 * zeta.mean() + eta.w_conj() * zeta.w();
    Ok(exponent.exp())
}
