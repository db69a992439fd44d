//! Resolution of unity over the complex plane.
//!
//! Radial integrals are taken in the variable `u = r^{2 sigma}`, where the
//! weighted projector integrand becomes `u^n e^{-u}` and Gauss–Laguerre is
//! exact. Angular integrals follow the covering-space average
//! `lim (1/2Φ) ∫_{-Φ}^{Φ}`, which is `δ_{nm}` in the limit; a finite-Φ mode
//! shows the approach to that limit.

use std::f64::consts::PI;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fock::{laguerre_assoc, FockOperator, FockVector, LogFactorials, ZERO};
use crate::states::coherent_amplitudes;

/// `2 sigma |z|^{2(sigma - 1)}`.
pub fn weight(z_mod_sq: f64, sigma: f64) -> Result<f64> {
    check_sigma(sigma)?;
    if !(z_mod_sq >= 0.0) || !z_mod_sq.is_finite() {
        return Err(Error::domain(format!("|z|^2 must be finite and >= 0, got {z_mod_sq}")));
    }
    if sigma == 1.0 {
        return Ok(2.0);
    }
    if z_mod_sq == 0.0 {
        return Err(Error::Singularity(sigma));
    }
    Ok(2.0 * sigma * z_mod_sq.powf(sigma - 1.0))
}

fn check_sigma(sigma: f64) -> Result<()> {
    if sigma > 0.0 && sigma <= 1.0 {
        Ok(())
    } else {
        Err(Error::domain(format!("sigma must lie in (0, 1], got {sigma}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AngularMode {
    /// The limit `Φ → ∞`, exactly `δ_{nm}`.
    AnalyticCovering,
    /// Trapezoid average over `[-Φ, Φ]` with `steps` panels per covering
    /// sheet of length `2π/sigma`.
    FinitePhi { phi: f64, steps: usize },
}

/// Overall factor in front of the weighted projector integral.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Prefactor {
    /// No factor. With the covering-space average this is the normalization
    /// that makes the projector integral the identity.
    #[default]
    Unit,
    /// `1/π`, as in the flat-plane form of the inner product. The reconstructed
    /// identity is then `I/π`.
    InversePi,
}

impl Prefactor {
    pub fn factor(self) -> f64 {
        match self {
            Prefactor::Unit => 1.0,
            Prefactor::InversePi => 1.0 / PI,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    radial_nodes: usize,
    angular: AngularMode,
    sigma: f64,
    prefactor: Prefactor,
}

impl QuadratureSpec {
    pub fn new(radial_nodes: usize, angular: AngularMode, sigma: f64) -> Result<Self> {
        if radial_nodes == 0 {
            return Err(Error::domain("radial_nodes must be >= 1"));
        }
        check_sigma(sigma)?;
        if let AngularMode::FinitePhi { phi, steps } = angular {
            if !(phi > 0.0) || !phi.is_finite() {
                return Err(Error::domain(format!("phi must be finite and > 0, got {phi}")));
            }
            if steps == 0 {
                return Err(Error::domain("angular steps must be >= 1"));
            }
        }
        Ok(Self {
            radial_nodes,
            angular,
            sigma,
            prefactor: Prefactor::Unit,
        })
    }

    pub fn analytic(radial_nodes: usize, sigma: f64) -> Result<Self> {
        Self::new(radial_nodes, AngularMode::AnalyticCovering, sigma)
    }

    pub fn with_prefactor(mut self, prefactor: Prefactor) -> Self {
        self.prefactor = prefactor;
        self
    }

    pub fn radial_nodes(&self) -> usize {
        self.radial_nodes
    }

    pub fn angular(&self) -> AngularMode {
        self.angular
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn prefactor(&self) -> Prefactor {
        self.prefactor
    }
}

/// Nodes and weights for `∫_0^∞ f(u) e^{-u} du`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussLaguerre {
    pub nodes: Vec<f64>,
    pub ln_weights: Vec<f64>,
}

impl GaussLaguerre {
    /// Golub–Welsch eigenvalues polished by Newton steps on `L_N`. Weights use
    /// `-x / (N (N+1) L_{N-1}(x) L_{N+1}(x))` in log form; the first-order node
    /// errors of the two Laguerre factors cancel.
    pub fn new(order: usize) -> Self {
        assert!(order >= 1, "Gauss–Laguerre order must be >= 1");
        let jacobi = DMatrix::from_fn(order, order, |i, j| {
            if i == j {
                (2 * i + 1) as f64
            } else if i + 1 == j || j + 1 == i {
                (i.max(j)) as f64
            } else {
                0.0
            }
        });
        let mut nodes: Vec<f64> = jacobi.symmetric_eigenvalues().iter().copied().collect();
        nodes.sort_by(|a, b| a.total_cmp(b));
        let n = order;
        let nf = n as f64;
        for x in nodes.iter_mut() {
            for _ in 0..8 {
                let ln = lag(n, *x);
                let lnm1 = lag(n - 1, *x);
                let deriv = nf * (ln - lnm1) / *x;
                let step = ln / deriv;
                *x -= step;
                if step.abs() <= 1e-16 * x.abs() {
                    break;
                }
            }
        }
        let ln_weights = nodes
            .iter()
            .map(|&x| {
                let below = lag(n - 1, x).abs();
                let above = lag(n + 1, x).abs();
                x.ln() - nf.ln() - (nf + 1.0).ln() - below.ln() - above.ln()
            })
            .collect();
        Self { nodes, ln_weights }
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    pub fn weights(&self) -> Vec<f64> {
        self.ln_weights.iter().map(|w| w.exp()).collect()
    }
}

fn lag(n: usize, x: f64) -> f64 {
    laguerre_assoc(n, 0, x).expect("nonnegative upper index")
}

/// A radial moment together with whether the rule is exact for it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialMoment {
    pub value: f64,
    /// False when `radial_nodes < n + 1`; the value is then only approximate.
    pub exact: bool,
}

/// `(1/n!) ∫ r^{2n sigma + 1} W(r²) e^{-r^{2 sigma}} dr`, which must be 1.
pub fn radial_completeness(n: usize, spec: &QuadratureSpec) -> RadialMoment {
    let gl = GaussLaguerre::new(spec.radial_nodes);
    let lnf = LogFactorials::new(n).get(n);
    let value = gl
        .nodes
        .iter()
        .zip(&gl.ln_weights)
        .map(|(&u, &lw)| (lw + n as f64 * u.ln() - lnf).exp())
        .sum();
    RadialMoment {
        value,
        exact: spec.radial_nodes > n,
    }
}

/// The same radial integral in the raw variable `r`, composite trapezoid on
/// `[0, r_max]`. Poor near the origin for `sigma < 1`.
pub fn radial_completeness_trapezoid(n: usize, sigma: f64, r_max: f64, panels: usize) -> Result<f64> {
    check_sigma(sigma)?;
    if panels == 0 || !(r_max > 0.0) {
        return Err(Error::domain("trapezoid needs r_max > 0 and panels >= 1"));
    }
    let lnf = LogFactorials::new(n).get(n);
    let integrand = |r: f64| -> f64 {
        if r == 0.0 {
            // r^{2n sigma + 2 sigma - 1} vanishes at 0 unless n = 0 and sigma <= 1/2.
            let p = 2.0 * n as f64 * sigma + 2.0 * sigma - 1.0;
            return if p > 0.0 { 0.0 } else if p == 0.0 { 2.0 * sigma / lnf.exp() } else { f64::INFINITY };
        }
        let r2 = r * r;
        let w = 2.0 * sigma * r2.powf(sigma - 1.0);
        let ln_rest = (2.0 * n as f64 * sigma + 1.0) * r.ln() - r.powf(2.0 * sigma) - lnf;
        w * ln_rest.exp()
    };
    let h = r_max / panels as f64;
    let mut acc = 0.5 * (integrand(0.0) + integrand(r_max));
    for k in 1..panels {
        acc += integrand(k as f64 * h);
    }
    Ok(acc * h)
}

/// `(1/2Φ) ∫_{-Φ}^{Φ} e^{i sigma (n - m) φ} dφ`, or its limit `δ_{nm}`.
pub fn angular_average(n: i64, m: i64, sigma: f64, spec: &QuadratureSpec) -> Result<Complex64> {
    check_sigma(sigma)?;
    let d = n - m;
    match spec.angular {
        AngularMode::AnalyticCovering => Ok(if d == 0 { Complex64::new(1.0, 0.0) } else { ZERO }),
        AngularMode::FinitePhi { phi, steps } => {
            let need = 64 * (1 + d.unsigned_abs() as usize);
            if steps < need {
                return Err(Error::domain(format!(
                    "finite-phi averaging needs >= {need} steps per sheet for n - m = {d}, got {steps}"
                )));
            }
            if d == 0 {
                return Ok(Complex64::new(1.0, 0.0));
            }
            let sheets = (phi * sigma / PI).ceil().max(1.0) as usize;
            let panels = steps * sheets;
            let h = 2.0 * phi / panels as f64;
            let k = sigma * d as f64;
            let at = |x: f64| Complex64::from_polar(1.0, k * x);
            let mut acc = 0.5 * (at(-phi) + at(phi));
            for j in 1..panels {
                acc += at(-phi + j as f64 * h);
            }
            Ok(acc * h / (2.0 * phi))
        }
    }
}

/// One sample point of the coherent kernel.
///
/// The angle lives on the covering space and may exceed `π` in magnitude,
/// so the point is stored through its amplitude `w = u^{1/2} e^{i sigma angle}`
/// rather than as a principal-branch label.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelNode {
    pub radius: f64,
    pub angle: f64,
    pub amplitude: Complex64,
    pub weight: f64,
}

/// Weighted coherent-state projectors whose sum is the identity on a
/// `dim`-level basis.
#[derive(Debug, Clone, PartialEq)]
pub struct CoherentKernel {
    spec: QuadratureSpec,
    dim: usize,
    nodes: Vec<KernelNode>,
    /// Column `k` is the truncated coherent vector at node `k`.
    vectors: DMatrix<Complex64>,
}

impl CoherentKernel {
    /// Tensor grid of `radial_nodes` Gauss–Laguerre radii and equispaced
    /// angles. The covering mode uses `max(dim, 1)` angles on
    /// `[-π/sigma, π/sigma)`, which annihilates every `e^{i sigma d φ}` with
    /// `0 < |d| < dim`; finite-Φ mode uses `steps` angles on `[-Φ, Φ)`.
    pub fn new(spec: &QuadratureSpec, dim: usize) -> Result<Self> {
        if spec.radial_nodes < dim {
            return Err(Error::InsufficientNodes {
                required: dim,
                available: spec.radial_nodes,
            });
        }
        let sigma = spec.sigma;
        let (angles, angular_weight) = match spec.angular {
            AngularMode::AnalyticCovering => {
                let m = dim.max(1);
                let span = 2.0 * PI / sigma;
                let a: Vec<f64> = (0..m).map(|j| -PI / sigma + span * j as f64 / m as f64).collect();
                (a, 1.0 / m as f64)
            }
            AngularMode::FinitePhi { phi, steps } => {
                let a: Vec<f64> = (0..steps).map(|j| -phi + 2.0 * phi * j as f64 / steps as f64).collect();
                (a, 1.0 / steps as f64)
            }
        };
        let gl = GaussLaguerre::new(spec.radial_nodes);
        let scale = spec.prefactor.factor();
        let mut nodes = Vec::with_capacity(gl.order() * angles.len());
        for (&u, &lw) in gl.nodes.iter().zip(&gl.ln_weights) {
            // The projector carries e^{-u}; the rule already includes it.
            let w_rad = (lw + u).exp();
            let modulus = u.sqrt();
            for &angle in &angles {
                nodes.push(KernelNode {
                    radius: u.powf(0.5 / sigma),
                    angle,
                    amplitude: Complex64::from_polar(modulus, sigma * angle),
                    weight: scale * w_rad * angular_weight,
                });
            }
        }
        let columns: Vec<DVector<Complex64>> = nodes
            .par_iter()
            .map(|node| coherent_amplitudes(node.amplitude, dim).amps)
            .collect();
        let vectors = if columns.is_empty() {
            DMatrix::zeros(dim, 0)
        } else {
            DMatrix::from_columns(&columns)
        };
        Ok(Self {
            spec: *spec,
            dim,
            nodes,
            vectors,
        })
    }

    pub fn spec(&self) -> &QuadratureSpec {
        &self.spec
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nodes(&self) -> &[KernelNode] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// `<w_k|psi>` for every node.
    pub fn analyze(&self, psi: &FockVector) -> Result<DVector<Complex64>> {
        if psi.dim() != self.dim {
            return Err(Error::DimensionMismatch(psi.dim(), self.dim));
        }
        Ok(self.vectors.ad_mul(&psi.amps))
    }

    /// `Σ_k weight_k c_k |w_k>`.
    pub fn synthesize(&self, coeffs: &DVector<Complex64>) -> FockVector {
        let weighted = DVector::from_iterator(
            coeffs.len(),
            coeffs.iter().zip(&self.nodes).map(|(c, n)| c * n.weight),
        );
        FockVector::new(&self.vectors * weighted)
    }

    fn weights_diag(&self) -> DVector<Complex64> {
        DVector::from_iterator(self.len(), self.nodes.iter().map(|n| Complex64::new(n.weight, 0.0)))
    }
}

/// `Σ_k weight_k <phi|w_k><w_k|psi>`, which equals `<phi|psi>` when the
/// kernel resolves the identity.
pub fn inner_product(phi: &FockVector, psi: &FockVector, spec: &QuadratureSpec) -> Result<Complex64> {
    if phi.dim() != psi.dim() {
        return Err(Error::DimensionMismatch(phi.dim(), psi.dim()));
    }
    let kernel = CoherentKernel::new(spec, phi.dim())?;
    let left = kernel.analyze(phi)?;
    let right = kernel.analyze(psi)?;
    Ok(left
        .iter()
        .zip(right.iter())
        .zip(kernel.nodes())
        .fold(ZERO, |acc, ((l, r), node)| acc + l.conj() * r * node.weight))
}

/// `Σ_k weight_k |w_k><w_k|psi>`.
pub fn reconstruct_vector(psi: &FockVector, spec: &QuadratureSpec) -> Result<FockVector> {
    let kernel = CoherentKernel::new(spec, psi.dim())?;
    let coeffs = kernel.analyze(psi)?;
    Ok(kernel.synthesize(&coeffs))
}

/// An operator sampled between kernel nodes, `K(k, l) = <w_k|A|w_l>`.
#[derive(Debug, Clone)]
pub struct OperatorKernel {
    grid: Arc<CoherentKernel>,
    values: DMatrix<Complex64>,
}

impl OperatorKernel {
    pub fn sample(op: &FockOperator, grid: &Arc<CoherentKernel>) -> Result<Self> {
        if op.dim() != grid.dim {
            return Err(Error::DimensionMismatch(op.dim(), grid.dim));
        }
        let values = grid.vectors.ad_mul(&(&op.mat * &grid.vectors));
        Ok(Self {
            grid: Arc::clone(grid),
            values,
        })
    }

    pub fn grid(&self) -> &Arc<CoherentKernel> {
        &self.grid
    }

    pub fn values(&self) -> &DMatrix<Complex64> {
        &self.values
    }

    /// `Σ_{k,l} weight_k weight_l K(k, l) |w_k><w_l|`.
    pub fn decompose(&self) -> FockOperator {
        let wd = self.grid.weights_diag();
        let mut scaled = self.values.clone();
        for (k, mut row) in scaled.row_iter_mut().enumerate() {
            row *= wd[k];
        }
        for (l, mut col) in scaled.column_iter_mut().enumerate() {
            col *= wd[l];
        }
        let v = &self.grid.vectors;
        FockOperator::new(v * scaled * v.adjoint())
    }

    /// Largest entry of `|K - other|`.
    pub fn distance(&self, other: &Self) -> Result<f64> {
        same_grid(self, other)?;
        Ok(self
            .values
            .iter()
            .zip(other.values.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }
}

fn same_grid(a: &OperatorKernel, b: &OperatorKernel) -> Result<()> {
    if Arc::ptr_eq(&a.grid, &b.grid) || a.grid == b.grid {
        Ok(())
    } else {
        Err(Error::GridMismatch)
    }
}

/// Kernel of `A1 A2` from the kernels of its factors:
/// `K(k, l) = Σ_j K1(k, j) weight_j K2(j, l)`.
pub fn operator_kernel_compose(a1: &OperatorKernel, a2: &OperatorKernel) -> Result<OperatorKernel> {
    same_grid(a1, a2)?;
    let wd = a1.grid.weights_diag();
    let mut right = a2.values.clone();
    for (j, mut row) in right.row_iter_mut().enumerate() {
        row *= wd[j];
    }
    Ok(OperatorKernel {
        grid: Arc::clone(&a1.grid),
        values: &a1.values * right,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{ladder_matrices, StretchLabel, TruncationConfig};
    use crate::operators::displacement;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn weight_examples() {
        for z in [0.0, 0.3, 7.0] {
            assert_eq!(weight(z, 1.0).unwrap(), 2.0);
        }
        assert!((weight(4.0, 0.5).unwrap() - 0.5).abs() < 1e-15);
        assert!((weight(16.0, 0.25).unwrap() - 0.0625).abs() < 1e-15);
        assert_eq!(weight(0.0, 0.5), Err(Error::Singularity(0.5)));
        assert!(weight(-1.0, 0.5).is_err());
    }

    #[test]
    fn gauss_laguerre_small_orders() {
        // Order 2: nodes 2 ∓ √2, weights (2 ± √2)/4.
        let gl = GaussLaguerre::new(2);
        let s = 2f64.sqrt();
        assert!((gl.nodes[0] - (2.0 - s)).abs() < 1e-14);
        assert!((gl.nodes[1] - (2.0 + s)).abs() < 1e-14);
        let w = gl.weights();
        assert!((w[0] - (2.0 + s) / 4.0).abs() < 1e-14);
        assert!((w[1] - (2.0 - s) / 4.0).abs() < 1e-14);
        let gl = GaussLaguerre::new(1);
        assert!((gl.nodes[0] - 1.0).abs() < 1e-15);
        assert!((gl.weights()[0] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn gauss_laguerre_nodes_are_roots() {
        for order in [5, 20, 48, 80] {
            let gl = GaussLaguerre::new(order);
            assert!(gl.nodes.iter().all(|&x| x > 0.0));
            let total: f64 = gl.weights().iter().sum();
            assert!((total - 1.0).abs() < 1e-13, "order {order}: {total}");
        }
    }

    #[test]
    fn completeness_examples() {
        for sigma in [0.25, 0.5, 0.75, 1.0] {
            let spec = QuadratureSpec::analytic(21, sigma).unwrap();
            let m = radial_completeness(0, &spec);
            assert!((m.value - 1.0).abs() < 1e-14 && m.exact);
        }
        let spec = QuadratureSpec::analytic(16, 0.3).unwrap();
        let m = radial_completeness(7, &spec);
        assert!((m.value - 1.0).abs() < 1e-12);
        let spec = QuadratureSpec::analytic(3, 0.3).unwrap();
        assert!(!radial_completeness(7, &spec).exact);
    }

    #[test]
    fn raw_trapezoid_agrees_at_sigma_one() {
        let v = radial_completeness_trapezoid(0, 1.0, 12.0, 20_000).unwrap();
        assert!((v - 1.0).abs() < 1e-6, "{v}");
    }

    #[test]
    fn angular_examples() {
        let fin = |phi, steps| QuadratureSpec::new(8, AngularMode::FinitePhi { phi, steps }, 0.5).unwrap();
        assert_eq!(angular_average(3, 3, 0.5, &fin(2.7, 64)).unwrap(), c(1.0, 0.0));
        let cov = QuadratureSpec::analytic(8, 0.5).unwrap();
        assert_eq!(angular_average(3, 1, 0.5, &cov).unwrap(), ZERO);
        assert_eq!(angular_average(2, 2, 0.5, &cov).unwrap(), c(1.0, 0.0));

        let spec = QuadratureSpec::new(8, AngularMode::FinitePhi { phi: 5.0 * PI, steps: 128 }, 1.0).unwrap();
        assert!(angular_average(1, 0, 1.0, &spec).unwrap().norm() < 1e-14);

        let spec = fin(1e4, 192);
        assert!(angular_average(2, 0, 0.5, &spec).unwrap().norm() < 1e-4);
        assert!(angular_average(2, 0, 0.5, &fin(1e4, 191)).is_err());
    }

    #[test]
    fn finite_phi_matches_sinc_and_decays() {
        let sigma = 0.6;
        let d = 3i64;
        let mut prev_bound = f64::INFINITY;
        for k in 0..8 {
            let phi = 1.3 * 2f64.powi(k);
            let spec = QuadratureSpec::new(4, AngularMode::FinitePhi { phi, steps: 1024 }, sigma).unwrap();
            let got = angular_average(d, 0, sigma, &spec).unwrap();
            let x = sigma * d as f64 * phi;
            let sinc = x.sin() / x;
            assert!((got.re - sinc).abs() < 1e-4 * (1.0 + sinc.abs()), "phi {phi}: {got} vs {sinc}");
            assert!(got.im.abs() < 1e-12);
            let bound = 1.0 / x;
            assert!(got.norm() <= bound * (1.0 + 1e-3));
            assert!(bound < prev_bound);
            prev_bound = bound;
        }
    }

    fn pseudo_random_vector(dim: usize, seed: u64) -> FockVector {
        FockVector::random_normalized(dim, &mut ChaCha8Rng::seed_from_u64(seed))
    }

    #[test]
    fn inner_product_examples() {
        let spec = QuadratureSpec::analytic(8, 0.5).unwrap();
        let e0 = FockVector::basis(0, 8).unwrap();
        let e1 = FockVector::basis(1, 8).unwrap();
        assert!((inner_product(&e0, &e0, &spec).unwrap() - 1.0).norm() < 1e-13);
        assert!(inner_product(&e0, &e1, &spec).unwrap().norm() < 1e-13);

        let spec = QuadratureSpec::analytic(32, 0.5).unwrap();
        let phi = pseudo_random_vector(32, 1);
        let psi = pseudo_random_vector(32, 2);
        let direct = phi.inner(&psi).unwrap();
        let via = inner_product(&phi, &psi, &spec).unwrap();
        assert!((direct - via).norm() < 1e-10, "{direct} vs {via}");
    }

    #[test]
    fn inner_product_matches_moment_form() {
        // Independent route: Σ conj(phi_n) psi_m A_nm R_nm with R_nm the
        // Gauss–Laguerre radial moment of u^{(n+m)/2} / √(n! m!).
        let dim = 10;
        let spec = QuadratureSpec::new(dim, AngularMode::FinitePhi { phi: 3.1, steps: 64 * dim }, 0.7).unwrap();
        let phi = pseudo_random_vector(dim, 5);
        let psi = pseudo_random_vector(dim, 6);
        let gl = GaussLaguerre::new(dim);
        let lf = LogFactorials::new(dim);
        let mut expect = ZERO;
        for n in 0..dim {
            for m in 0..dim {
                let r: f64 = gl
                    .nodes
                    .iter()
                    .zip(&gl.ln_weights)
                    .map(|(&u, &lw)| (lw + 0.5 * (n + m) as f64 * u.ln() - 0.5 * (lf.get(n) + lf.get(m))).exp())
                    .sum();
                // The kernel uses a periodic rule on [-Φ, Φ); compare against
                // the same discrete angular sum.
                let steps = 64 * dim;
                let a: Complex64 = (0..steps)
                    .map(|j| {
                        let x = -3.1 + 6.2 * j as f64 / steps as f64;
                        Complex64::from_polar(1.0, 0.7 * (n as f64 - m as f64) * x)
                    })
                    .sum::<Complex64>()
                    / steps as f64;
                expect += phi.amps[n].conj() * psi.amps[m] * a * r;
            }
        }
        let got = inner_product(&phi, &psi, &spec).unwrap();
        assert!((got - expect).norm() < 1e-12, "{got} vs {expect}");
    }

    #[test]
    fn inverse_pi_prefactor_scales_identity() {
        let spec = QuadratureSpec::analytic(12, 0.5).unwrap().with_prefactor(Prefactor::InversePi);
        let psi = pseudo_random_vector(12, 9);
        let back = reconstruct_vector(&psi, &spec).unwrap();
        for (a, b) in back.amps.iter().zip(psi.amps.iter()) {
            assert!((a * PI - b).norm() < 1e-11);
        }
    }

    #[test]
    fn reconstruct_examples() {
        let spec = QuadratureSpec::analytic(48, 0.5).unwrap();
        let e0 = FockVector::basis(0, 32).unwrap();
        let back = reconstruct_vector(&e0, &spec).unwrap();
        assert!(back.block_distance(&e0, 32) < 1e-10);

        let label = StretchLabel::new(c(1.0, 0.0), 0.5).unwrap();
        let cfg = TruncationConfig::new(32, 1e-12).unwrap();
        let psi = crate::states::make_state(&label, &cfg).unwrap();
        let back = reconstruct_vector(&psi, &spec).unwrap();
        assert!(back.block_distance(&psi, 32) < 1e-9);

        let psi = pseudo_random_vector(32, 77);
        let back = reconstruct_vector(&psi, &spec).unwrap();
        assert!(back.block_distance(&psi, 32) < 1e-9);

        let small = QuadratureSpec::analytic(16, 0.5).unwrap();
        assert_eq!(
            reconstruct_vector(&psi, &small),
            Err(Error::InsufficientNodes { required: 32, available: 16 })
        );
    }

    #[test]
    fn reproducing_property_at_sigma_one() {
        // <z|psi> = Σ_k weight_k <z|w_k><w_k|psi>, with the Glauber overlap
        // <z|w> = exp(-|z|²/2 - |w|²/2 + z* w) as oracle.
        let dim = 24;
        let spec = QuadratureSpec::analytic(dim, 1.0).unwrap();
        let kernel = CoherentKernel::new(&spec, dim).unwrap();
        let psi = pseudo_random_vector(dim, 3);
        let coeffs = kernel.analyze(&psi).unwrap();
        let z = c(0.4, -0.3);
        let direct = coherent_amplitudes(z, dim).inner(&psi).unwrap();
        let via = kernel.nodes().iter().zip(coeffs.iter()).fold(ZERO, |acc, (node, cf)| {
            let w = node.amplitude;
            let glauber = (-(z.norm_sqr() + w.norm_sqr()) / 2.0 + z.conj() * w).exp();
            acc + glauber * cf * node.weight
        });
        assert!((direct - via).norm() < 1e-9, "{direct} vs {via}");
    }

    #[test]
    fn kernel_composition_examples() {
        let dim = 24;
        let spec = QuadratureSpec::analytic(dim, 0.5).unwrap();
        let grid = Arc::new(CoherentKernel::new(&spec, dim).unwrap());
        let cfg = TruncationConfig::new(dim, 1e-12).unwrap();

        let id = OperatorKernel::sample(&FockOperator::identity(dim), &grid).unwrap();
        let idid = operator_kernel_compose(&id, &id).unwrap();
        assert!(idid.distance(&id).unwrap() < 1e-9);

        let l = ladder_matrices(&cfg);
        let ka = OperatorKernel::sample(&l.a, &grid).unwrap();
        let kad = OperatorKernel::sample(&l.adag, &grid).unwrap();
        let prod = operator_kernel_compose(&ka, &kad).unwrap();
        let oracle = OperatorKernel::sample(&l.a.compose(&l.adag), &grid).unwrap();
        assert!(prod.distance(&oracle).unwrap() < 1e-8);
        let back = prod.decompose();
        assert!(back.block_distance(&l.a.compose(&l.adag), dim) < 1e-8);
        // Below the top level a a† is n + 1.
        let np1 = FockOperator::new(l.num.mat.clone() + DMatrix::identity(dim, dim));
        assert!(back.block_distance(&np1, dim - 1) < 1e-8);

        let label = StretchLabel::new(c(0.6, 0.3), 0.5).unwrap();
        let d = displacement(&label, &cfg);
        let kd = OperatorKernel::sample(&d, &grid).unwrap();
        let kdd = OperatorKernel::sample(&d.adjoint(), &grid).unwrap();
        let prod = operator_kernel_compose(&kd, &kdd).unwrap();
        assert!(prod.distance(&id).unwrap() < 1e-8);
        assert!(prod.decompose().block_distance(&FockOperator::identity(dim), dim) < 1e-8);
    }

    #[test]
    fn kernel_grid_mismatch() {
        let a = Arc::new(CoherentKernel::new(&QuadratureSpec::analytic(6, 0.5).unwrap(), 6).unwrap());
        let b = Arc::new(CoherentKernel::new(&QuadratureSpec::analytic(7, 0.5).unwrap(), 6).unwrap());
        let ka = OperatorKernel::sample(&FockOperator::identity(6), &a).unwrap();
        let kb = OperatorKernel::sample(&FockOperator::identity(6), &b).unwrap();
        assert!(matches!(operator_kernel_compose(&ka, &kb), Err(Error::GridMismatch)));
        // An equal grid built separately is accepted.
        let a2 = Arc::new(CoherentKernel::new(&QuadratureSpec::analytic(6, 0.5).unwrap(), 6).unwrap());
        let ka2 = OperatorKernel::sample(&FockOperator::identity(6), &a2).unwrap();
        assert!(operator_kernel_compose(&ka, &ka2).is_ok());
    }

    #[test]
    fn kernel_weights_positive() {
        let spec = QuadratureSpec::analytic(20, 0.25).unwrap();
        let k = CoherentKernel::new(&spec, 20).unwrap();
        assert!(k.nodes().iter().all(|n| n.weight > 0.0 && n.radius > 0.0));
        assert_eq!(k.len(), 400);
    }
}
