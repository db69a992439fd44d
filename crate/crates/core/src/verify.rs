//! Cross-module identity checks, registered by name.
//!
//! Each check reduces one identity to a nonnegative residual over a parameter
//! grid. A check passes when its residual is at most the tolerance.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::block::{displacement_block, squeezing_block};
use crate::composite::{
    displaced_number, displaced_number_ladder, modified_coherent, modified_coherent_expansion, sandwich_expectations,
    squeezed_coherent, squeezed_displaced_number, squeezed_expectations, CompositeLabel,
};
use crate::error::{Error, Result};
use crate::fock::{ladder_matrices, FockOperator, FockVector, StretchLabel, TruncationConfig, ZERO};
use crate::operators::{
    bogoliubov, displacement, displacement_from_amplitude, displacement_normal_ordered, matrix_element,
    multiplication_law, squeezing, SqueezeLabel,
};
use crate::quadrature::{
    inner_product, operator_kernel_compose, radial_completeness, reconstruct_vector, CoherentKernel, OperatorKernel,
    QuadratureSpec,
};
use crate::states::{
    annihilation_residual, coherent_amplitudes, evolve, evolved_amplitude, make_state, overlap, photon_stats,
    stats_from_distribution, EvolutionPhase,
};

const TAIL_TOL: f64 = 1e-14;

/// Parameter grid shared by all checks.
#[derive(Debug, Clone, PartialEq)]
pub struct VerifyContext {
    pub sigmas: Vec<f64>,
    pub upsilons: Vec<f64>,
    pub zetas: Vec<Complex64>,
    pub xis: Vec<Complex64>,
    pub alpha: Complex64,
    /// Basis size for operator identities. State checks use `2 * dim`.
    pub dim: usize,
    pub seed: u64,
}

impl Default for VerifyContext {
    fn default() -> Self {
        Self {
            sigmas: vec![0.25, 0.5, 0.75, 1.0],
            upsilons: vec![0.5, 1.0],
            zetas: vec![
                Complex64::from_polar(0.8, PI / 5.0),
                Complex64::from_polar(1.5, -2.2),
                Complex64::new(2.0, 0.0),
            ],
            xis: vec![Complex64::from_polar(0.6, PI / 4.0), Complex64::from_polar(0.4, -1.0)],
            alpha: Complex64::from_polar(0.7, 0.9),
            dim: 64,
            seed: 0,
        }
    }
}

impl VerifyContext {
    fn stretch_labels(&self) -> Result<Vec<StretchLabel>> {
        let mut out = Vec::new();
        for &s in &self.sigmas {
            for &z in &self.zetas {
                out.push(StretchLabel::new(z, s)?);
            }
        }
        Ok(out)
    }

    fn squeeze_labels(&self) -> Result<Vec<SqueezeLabel>> {
        let mut out = Vec::new();
        for &u in &self.upsilons {
            for &x in &self.xis {
                out.push(SqueezeLabel::new(x, u)?);
            }
        }
        Ok(out)
    }

    fn cfg(&self, dim: usize) -> Result<TruncationConfig> {
        TruncationConfig::new(dim, TAIL_TOL)
    }

    fn state_dim(&self) -> usize {
        2 * self.dim
    }
}

/// One identity to be checked.
pub trait Check: Send + Sync {
    fn name(&self) -> &'static str;
    /// The identity in formula form.
    fn formula(&self) -> &'static str;
    /// Largest residual over the context grid.
    fn residual(&self, ctx: &VerifyContext) -> Result<f64>;
}

/// Result of one check.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub formula: &'static str,
    pub residual: Option<f64>,
    pub error: Option<Error>,
    pub passed: bool,
}

/// Every registered check, in report order.
pub fn registry() -> Vec<Box<dyn Check>> {
    vec![
        Box::new(Normalization),
        Box::new(Eigenrelation),
        Box::new(Poisson),
        Box::new(Overlap),
        Box::new(TemporalStability),
        Box::new(Unitarity),
        Box::new(Commutator),
        Box::new(Conjugation),
        Box::new(NormalOrdering),
        Box::new(MatrixElements),
        Box::new(MultiplicationLaw),
        Box::new(Bogoliubov),
        Box::new(Completeness),
        Box::new(Reproducing),
        Box::new(InnerProduct),
        Box::new(KernelComposition),
        Box::new(Reduction),
        Box::new(CompositeExpectations),
        Box::new(DisplacedNumber),
        Box::new(ModifiedCoherent),
    ]
}

pub fn check_names() -> Vec<&'static str> {
    registry().iter().map(|c| c.name()).collect()
}

/// The registered checks named in `names`, in registry order. Unknown names
/// are a domain error.
pub fn select(names: &[String]) -> Result<Vec<Box<dyn Check>>> {
    let all = registry();
    for n in names {
        if !all.iter().any(|c| c.name() == n) {
            return Err(Error::domain(format!(
                "unknown check '{n}' (known: {})",
                check_names().join(", ")
            )));
        }
    }
    Ok(all.into_iter().filter(|c| names.iter().any(|n| n == c.name())).collect())
}

/// Runs `checks` in parallel and returns outcomes in the given order.
pub fn run_checks(checks: &[Box<dyn Check>], ctx: &VerifyContext, tol: f64) -> Vec<CheckOutcome> {
    checks
        .par_iter()
        .map(|c| match c.residual(ctx) {
            Ok(r) => CheckOutcome {
                name: c.name(),
                formula: c.formula(),
                residual: Some(r),
                error: None,
                passed: r <= tol,
            },
            Err(e) => CheckOutcome {
                name: c.name(),
                formula: c.formula(),
                residual: None,
                error: Some(e),
                passed: false,
            },
        })
        .collect()
}

fn require_block(block: usize, min: usize, dim: usize, grow: impl Fn(usize) -> usize, what: &str) -> Result<()> {
    if block >= min {
        return Ok(());
    }
    let mut required = dim + 1;
    while grow(required) < min {
        required += 1;
        if required > 1 << 16 {
            break;
        }
    }
    Err(Error::Truncation {
        dim,
        required_dim: required,
        reason: format!("{what} block has {block} levels, need {min}"),
    })
}

fn displacement_block_checked(dim: usize, amplitude: f64, min: usize) -> Result<usize> {
    let block = displacement_block(dim, amplitude);
    require_block(block, min, dim, |d| displacement_block(d, amplitude), "displacement")?;
    Ok(block)
}

fn max_of(values: impl IntoIterator<Item = Result<f64>>) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for v in values {
        worst = worst.max(v?);
    }
    Ok(worst)
}

fn rng(ctx: &VerifyContext, salt: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(ctx.seed ^ salt.wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

struct Normalization;
impl Check for Normalization {
    fn name(&self) -> &'static str {
        "normalization"
    }
    fn formula(&self) -> &'static str {
        "<w|w> = 1"
    }
    fn residual(&self, ctx: &VerifyContext) -> Result<f64> {
        max_of(ctx.stretch_labels()?.iter().map(|l| {
            let cfg = TruncationConfig::for_mean(l.mean(), TAIL_TOL)?;
            Ok((1.0 - make_state(l, &cfg)?.norm_sqr()).abs())
        }))
    }
}

struct Eigenrelation;
impl Check for Eigenrelation {
    fn name(&self) -> &'static str {
        "eigenrelation"
    }
    fn formula(&self) -> &'static str {
        "a|w> = w|w>"
    }
    fn residual(&self, ctx: &VerifyContext) -> Result<f64> {
        let cfg = ctx.cfg(ctx.state_dim())?;
        max_of(ctx.stretch_labels()?.iter().map(|l| annihilation_residual(l, &cfg)))
    }
}

struct Poisson;
impl Check for Poisson {
    fn name(&self) -> &'static str {
        "poisson"
    }
    fn formula(&self) -> &'static str {
        "Q = (<n^2> - <n>^2 - <n>) / <n> = 0"
    }
    fn residual(&self, ctx: &VerifyContext) -> Result<f64> {
        let cfg = ctx.cfg(ctx.state_dim())?;
        max_of(ctx.stretch_labels()?.iter().filter(|l| l.mean() > 0.0).map(|l| {
            let closed = photon_stats(l).mandel_q.unwrap_or(0.0);
            let pmf = make_state(l, &cfg)?.probabilities();
            let truncated = stats_from_distribution(&pmf).mandel_q.unwrap_or(0.0);
            Ok(closed.abs().max(truncated.abs()))
        }))
    }
}

struct Overlap;
impl Check for Overlap {
    fn name(&self) -> &'static str {
        "overlap"
    }
    fn formula(&self) -> &'static str {
        "<v|w> = exp(-|v|^2/2 - |w|^2/2 + v* w)"
    }
    fn residual(&self, ctx: &VerifyContext) -> Result<f64> {
        let cfg = ctx.cfg(ctx.state_dim())?;
        let labels = ctx.stretch_labels()?;
        let mut worst: f64 = 0.0;
        for eta in &labels {
            for zeta in labels.iter().filter(|z| z.sigma() == eta.sigma()) {
                let closed = overlap(eta, zeta)?;
                let direct = make_state(eta, &cfg)?.inner(&make_state(zeta, &cfg)?)?;
                worst = worst.max((closed - direct).norm());
            }
        }
        Ok(worst)
    }
}

struct TemporalStability;
impl Check for TemporalStability {
    fn name(&self) -> &'static str {
        "temporal-stability"
    }
    fn formula(&self) -> &'static str {
        "exp(-i wt N)|w> = |exp(-i wt) w>"
    }
    fn residual(&self, ctx: &VerifyContext) -> Result<f64> {
        let cfg = ctx.cfg(ctx.state_dim())?;
        let mut worst: f64 = 0.0;
        for l in ctx.stretch_labels()? {
            for wt in [0.7, -2.5, 4.0] {
                let phase = EvolutionPhase::new(wt);
                let evolved = evolve(&make_state(&l, &cfg)?, phase);
                let relabeled = coherent_amplitudes(evolved_amplitude(&l, phase), cfg.dim);
                worst = worst.max(evolved.block_distance(&relabeled, cfg.dim));
            }
        }
        Ok(worst)
    }
}

struct Unitarity;
impl Check for Unitarity {
    fn name(&self) -> &'static str {
        "unitarity"
    }
    fn formula(&self) -> &'static str {
        "D^dag D = I, S^dag S = I"
    }
    fn residual(&self, ctx: &VerifyContext) -> Result<f64> {
        let cfg = ctx.cfg(ctx.dim)?;
        let d = max_of(
            ctx.stretch_labels()?
                .iter()
                .map(|l| Ok(displacement(l, &cfg).unitarity_residual(cfg.dim))),
        )?;
        let s = max_of(
            ctx.squeeze_labels()?
                .iter()
                .map(|l| Ok(squeezing(l, &cfg).unitarity_residual(cfg.dim))),
        )?;
        Ok(d.max(s))
    }
}

struct Commutator;
impl Check for Commutator {
    fn name(&self) -> &'static str {
        "commutator"
    }
    fn formula(&self) -> &'static str {
        "[a, D] = w D"
    }
    fn residual(&self, ctx: &VerifyContext) -> Result<f64> {
        let cfg = ctx.cfg(ctx.dim)?;
        let lad = ladder_matrices(&cfg);
        max_of(ctx.stretch_labels()?.iter().map(|l| {
            let block = displacement_block_checked(cfg.dim, l.w().norm(), 1)?;
            let d = displacement(l, &cfg);
            let comm = FockOperator::new(&lad.a.mat * &d.mat - &d.mat * &lad.a.mat);
            Ok(comm.block_distance(&d.scale(l.w()), block))
        }))
    }
}

struct Conjugation;
impl Check for Conjugation {
    fn name(&self) -> &'static str {
        "conjugation"
    }
    fn formula(&self) -> &'static str {
        "D^dag a D = a + w, D a D^dag = a - w"
    }
    fn residual(&self, ctx: &VerifyContext) -> Result<f64> {
        let cfg = ctx.cfg(ctx.dim)?;
        let lad = ladder_matrices(&cfg);
        let id = DMatrix::<Complex64>::identity(cfg.dim, cfg.dim);
        max_of(ctx.stretch_labels()?.iter().map(|l| {
            let w = l.w();
            let block = displacement_block_checked(cfg.dim, w.norm(), 1)?;
            let d = displacement(l, &cfg);
            let plus = FockOperator::new(&lad.a.mat + &id * w);
            let minus = FockOperator::new(&lad.a.mat - &id * w);
            let r1 = d.adjoint().compose(&lad.a).compose(&d).block_distance(&plus, block);
            let r2 = d.compose(&lad.a).compose(&d.adjoint()).block_distance(&minus, block);
            Ok(r1.max(r2))
        }))
    }
}

struct NormalOrdering;
impl Check for NormalOrdering {
    fn name(&self) -> &'static str {
        "normal-ordering"
    }
    fn formula(&self) -> &'static str {
        "D = exp(-|w|^2/2) exp(w a^dag) exp(-w* a)"
    }
    fn residual(&self, ctx: &VerifyContext) -> Result<f64> {
        let cfg = ctx.cfg(ctx.dim)?;
        max_of(ctx.stretch_labels()?.iter().map(|l| {
            let block = displacement_block_checked(cfg.dim, l.w().norm(), 1)?;
            Ok(displacement_normal_ordered(l, &cfg)?.block_distance(&displacement(l, &cfg), block))
        }))
    }
}

struct MatrixElements;
impl Check for MatrixElements {
    fn name(&self) -> &'static str {
        "matrix-elements"
    }
    fn formula(&self) -> &'static str {
        "<m|D|n> = sqrt(n!/m!) w^(m-n) exp(-|w|^2/2) L_n^(m-n)(|w|^2)"
    }
    fn residual(&self, ctx: &VerifyContext) -> Result<f64> {
        let cfg = ctx.cfg(ctx.dim)?;
        max_of(ctx.stretch_labels()?.iter().map(|l| {
            let block = displacement_block_checked(cfg.dim, l.w().norm(), 1)?;
            let top = block.min(13);
            let d = displacement(l, &cfg);
            let mut worst: f64 = 0.0;
            for m in 0..top {
                for n in 0..top {
                    worst = worst.max((matrix_element(m, n, l) - d.entry(m, n)).norm());
                }
            }
            Ok(worst)
        }))
    }
}

struct MultiplicationLaw;
impl Check for MultiplicationLaw {
    fn name(&self) -> &'static str {
        "multiplication-law"
    }
    fn formula(&self) -> &'static str {
        "D(v) D(w) = exp((v w* - v* w)/2) D(v + w)"
    }
    fn residual(&self, ctx: &VerifyContext) -> Result<f64> {
        let dim = ctx.state_dim();
        let cfg = ctx.cfg(dim)?;
        let mut worst: f64 = 0.0;
        for &s in &ctx.sigmas {
            let first = StretchLabel::new(ctx.alpha, s)?;
            let d1 = displacement(&first, &cfg);
            for &z in &ctx.zetas {
                let second = StretchLabel::new(z, s)?;
                let p = multiplication_law(&first, &second)?;
                let block = displacement_block_checked(dim, first.w().norm() + second.w().norm(), 1)?;
                let lhs = d1.compose(&displacement(&second, &cfg));
                let rhs = displacement_from_amplitude(p.combined_amplitude, dim).scale(p.phase_factor);
                worst = worst
                    .max(lhs.block_distance(&rhs, block))
                    .max((p.phase_factor.norm() - 1.0).abs());
            }
        }
        Ok(worst)
    }
}

struct Bogoliubov;
impl Check for Bogoliubov {
    fn name(&self) -> &'static str {
        "bogoliubov"
    }
    fn formula(&self) -> &'static str {
        "S^dag a S = u a - v a^dag, u^2 - |v|^2 = 1"
    }
    fn residual(&self, ctx: &VerifyContext) -> Result<f64> {
        let dim = ctx.state_dim();
        let cfg = ctx.cfg(dim)?;
        let lad = ladder_matrices(&cfg);
        max_of(ctx.squeeze_labels()?.iter().map(|sl| {
            let r = sl.strength();
            let block = squeezing_block(dim, r);
            require_block(block, 1, dim, |d| squeezing_block(d, r), "squeezing")?;
            let s = squeezing(sl, &cfg);
            let (u, v) = bogoliubov(sl);
            let uc = Complex64::new(u, 0.0);
            let lhs = s.adjoint().compose(&lad.a).compose(&s);
            let rhs = FockOperator::new(&lad.a.mat * uc - &lad.adag.mat * v);
            let lhs2 = s.adjoint().compose(&lad.adag).compose(&s);
            let rhs2 = FockOperator::new(&lad.adag.mat * uc - &lad.a.mat * v.conj());
            Ok(lhs
                .block_distance(&rhs, block)
                .max(lhs2.block_distance(&rhs2, block))
                .max((u * u - v.norm_sqr() - 1.0).abs()))
        }))
    }
}

struct Completeness;
impl Check for Completeness {
    fn name(&self) -> &'static str {
        "completeness"
    }
    fn formula(&self) -> &'static str {
        "(1/n!) int r^(2n sigma + 1) W(r^2) exp(-r^(2 sigma)) dr = 1"
    }
    fn residual(&self, ctx: &VerifyContext) -> Result<f64> {
        let mut worst: f64 = 0.0;
        for &s in &ctx.sigmas {
            let spec = QuadratureSpec::analytic(21, s)?;
            for n in 0..=20 {
                worst = worst.max((radial_completeness(n, &spec).value - 1.0).abs());
            }
        }
        Ok(worst)
    }
}

struct Reproducing;
impl Check for Reproducing {
    fn name(&self) -> &'static str {
        "reproducing"
    }
    fn formula(&self) -> &'static str {
        "sum_k W_k |w_k><w_k|psi> = |psi>"
    }
    fn residual(&self, ctx: &VerifyContext) -> Result<f64> {
        let dim = 32;
        let mut rng = rng(ctx, 1);
        let mut worst: f64 = 0.0;
        for &s in &ctx.sigmas {
            let spec = QuadratureSpec::analytic(48, s)?;
            let mut vectors: Vec<FockVector> = (0..5).map(|_| FockVector::random_normalized(dim, &mut rng)).collect();
            for &z in &ctx.zetas {
                let l = StretchLabel::new(z, s)?;
                if TruncationConfig::new(dim, TAIL_TOL)?.admit_mean(l.mean()).is_ok() {
                    vectors.push(coherent_amplitudes(l.w(), dim));
                }
            }
            for psi in &vectors {
                worst = worst.max(reconstruct_vector(psi, &spec)?.block_distance(psi, dim));
            }
        }
        Ok(worst)
    }
}

struct InnerProduct;
impl Check for InnerProduct {
    fn name(&self) -> &'static str {
        "inner-product"
    }
    fn formula(&self) -> &'static str {
        "sum_k W_k <phi|w_k><w_k|psi> = <phi|psi>"
    }
    fn residual(&self, ctx: &VerifyContext) -> Result<f64> {
        let dim = 32;
        let mut rng = rng(ctx, 2);
        let mut worst: f64 = 0.0;
        for &s in &ctx.sigmas {
            let spec = QuadratureSpec::analytic(dim, s)?;
            for _ in 0..3 {
                let phi = FockVector::random_normalized(dim, &mut rng);
                let psi = FockVector::random_normalized(dim, &mut rng);
                worst = worst.max((inner_product(&phi, &psi, &spec)? - phi.inner(&psi)?).norm());
            }
        }
        Ok(worst)
    }
}

struct KernelComposition;
impl Check for KernelComposition {
    fn name(&self) -> &'static str {
        "kernel-composition"
    }
    fn formula(&self) -> &'static str {
        "K[A1 A2](k,l) = sum_j K[A1](k,j) W_j K[A2](j,l)"
    }
    fn residual(&self, ctx: &VerifyContext) -> Result<f64> {
        let dim = 16;
        let cfg = ctx.cfg(dim)?;
        let lad = ladder_matrices(&cfg);
        let mut worst: f64 = 0.0;
        for &s in &ctx.sigmas {
            let grid = std::sync::Arc::new(CoherentKernel::new(&QuadratureSpec::analytic(dim, s)?, dim)?);
            let d = displacement(&StretchLabel::new(ctx.alpha, s)?, &cfg);
            let pairs = [(&lad.a, &lad.adag), (&d, &lad.num)];
            for (a1, a2) in pairs {
                let k1 = OperatorKernel::sample(a1, &grid)?;
                let k2 = OperatorKernel::sample(a2, &grid)?;
                let composed = operator_kernel_compose(&k1, &k2)?;
                let product = a1.compose(a2);
                worst = worst
                    .max(composed.distance(&OperatorKernel::sample(&product, &grid)?)?)
                    .max(composed.decompose().block_distance(&product, dim));
            }
        }
        Ok(worst)
    }
}

struct Reduction;
impl Check for Reduction {
    fn name(&self) -> &'static str {
        "reduction"
    }
    fn formula(&self) -> &'static str {
        "D(w)S(0)|0> = |w>, D(0)S(c)|0> = S(c)|0>, D(w)S(0)|n> = D(w)|n>, D(0)S(0)|n> = |n>"
    }
    fn residual(&self, ctx: &VerifyContext) -> Result<f64> {
        let dim = ctx.dim;
        let cfg = ctx.cfg(dim)?;
        let mut worst: f64 = 0.0;
        for &u in &ctx.upsilons {
            let no_squeeze = SqueezeLabel::new(ZERO, u)?;
            for &s in &ctx.sigmas {
                let origin = StretchLabel::new(ZERO, s)?;
                for &z in &ctx.zetas {
                    let l = StretchLabel::new(z, s)?;
                    let coh = CompositeLabel::new(l, no_squeeze, 0);
                    let block = coh.block(dim);
                    require_block(block, 1, dim, |d| coh.block(d), "composite")?;
                    worst = worst.max(squeezed_coherent(&coh, &cfg)?.block_distance(&make_state(&l, &cfg)?, block));
                    for n in 1..=2 {
                        let lab = CompositeLabel::new(l, no_squeeze, n);
                        if n >= lab.block(dim) {
                            continue;
                        }
                        let via = squeezed_displaced_number(&lab, &cfg)?;
                        worst = worst.max(via.block_distance(&displaced_number(&l, n, &cfg)?, lab.block(dim)));
                    }
                }
                for &x in &ctx.xis {
                    let sl = SqueezeLabel::new(x, u)?;
                    let lab = CompositeLabel::new(origin, sl, 0);
                    let block = lab.block(dim);
                    require_block(block, 1, dim, |d| lab.block(d), "composite")?;
                    let direct = squeezing(&sl, &cfg).apply(&FockVector::basis(0, dim)?);
                    worst = worst.max(squeezed_coherent(&lab, &cfg)?.block_distance(&direct, block));
                }
                for n in 0..4 {
                    let lab = CompositeLabel::new(origin, no_squeeze, n);
                    let via = squeezed_displaced_number(&lab, &cfg)?;
                    worst = worst.max(via.block_distance(&FockVector::basis(n, dim)?, dim));
                }
            }
        }
        Ok(worst)
    }
}

struct CompositeExpectations;
impl Check for CompositeExpectations {
    fn name(&self) -> &'static str {
        "composite-expectations"
    }
    fn formula(&self) -> &'static str {
        "<a> = w, <a^2> = w^2 - exp(i arg c) sinh r cosh r, <n> = |w|^2 + sinh^2 r"
    }
    fn residual(&self, ctx: &VerifyContext) -> Result<f64> {
        let dim = ctx.state_dim();
        let cfg = ctx.cfg(dim)?;
        let mut worst: f64 = 0.0;
        for &s in &ctx.sigmas {
            for &z in &ctx.zetas {
                let l = StretchLabel::new(z, s)?;
                for sl in ctx.squeeze_labels()? {
                    let lab = CompositeLabel::new(l, sl, 0);
                    require_block(lab.block(dim), 1, dim, |d| lab.block(d), "composite")?;
                    let closed = squeezed_expectations(&lab);
                    let (ea, ea2, en) = sandwich_expectations(&squeezed_coherent(&lab, &cfg)?);
                    worst = worst
                        .max((closed.ea - ea).norm())
                        .max((closed.ea2_operator - ea2).norm())
                        .max((closed.en - en).abs());
                }
            }
        }
        Ok(worst)
    }
}

struct DisplacedNumber;
impl Check for DisplacedNumber {
    fn name(&self) -> &'static str {
        "displaced-number"
    }
    fn formula(&self) -> &'static str {
        "D|n> = (a^dag - w*)^n / sqrt(n!) |w>"
    }
    fn residual(&self, ctx: &VerifyContext) -> Result<f64> {
        let cfg = ctx.cfg(ctx.dim)?;
        max_of(ctx.stretch_labels()?.iter().map(|l| {
            let block = displacement_block_checked(cfg.dim, l.w().norm(), 6)?;
            let mut worst: f64 = 0.0;
            for n in 0..=5 {
                let closed = displaced_number(l, n, &cfg)?;
                let ladder = displaced_number_ladder(l, n, &cfg)?;
                worst = worst.max(closed.block_distance(&ladder, block));
            }
            Ok(worst)
        }))
    }
}

struct ModifiedCoherent;
impl Check for ModifiedCoherent {
    fn name(&self) -> &'static str {
        "modified-coherent"
    }
    fn formula(&self) -> &'static str {
        "D(v; w)|w> = exp(v* w - v w*) sum_n c_n(w) D(v)|n>"
    }
    fn residual(&self, ctx: &VerifyContext) -> Result<f64> {
        let dim = ctx.state_dim();
        let cfg = ctx.cfg(dim)?;
        let mut worst: f64 = 0.0;
        for &s in &ctx.sigmas {
            let alpha = StretchLabel::new(ctx.alpha, s)?;
            for &z in &ctx.zetas {
                let zeta = StretchLabel::new(z, s)?;
                let amp = alpha.w().norm() + zeta.w().norm();
                let block = displacement_block_checked(dim, amp, 1)?;
                let op = modified_coherent(&alpha, &zeta, &cfg)?;
                let exp = modified_coherent_expansion(&alpha, &zeta, dim)?;
                worst = worst.max(op.block_distance(&exp, block));
            }
        }
        Ok(worst)
    }
}
