use nalgebra::DMatrix;
use num_complex::Complex64;

/// `exp(G)` for anti-Hermitian `G`.
///
/// Diagonalizes the Hermitian matrix `H = iG`, so `exp(G) = V e^{-iΛ} V†`
/// is unitary up to roundoff regardless of the norm of `G`.
pub fn expm_antihermitian(g: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    let n = g.nrows();
    assert_eq!(n, g.ncols(), "generator must be square");
    let i = Complex64::new(0.0, 1.0);
    let h = g * i;
    let h = (&h + h.adjoint()) * Complex64::new(0.5, 0.0);
    let eig = h.symmetric_eigen();
    let mut scaled = eig.eigenvectors.clone();
    for (k, &lambda) in eig.eigenvalues.iter().enumerate() {
        let phase = Complex64::from_polar(1.0, -lambda);
        for z in scaled.column_mut(k).iter_mut() {
            *z *= phase;
        }
    }
    scaled * eig.eigenvectors.adjoint()
}

/// Largest entry-wise modulus of `a - b`.
pub fn max_abs_diff(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Taylor series with scaling and squaring, an independent route to exp.
    fn expm_taylor(g: &DMatrix<Complex64>) -> DMatrix<Complex64> {
        let norm: f64 = g.iter().map(|z| z.norm()).sum();
        let squarings = (norm.max(1.0).log2().ceil() as i32 + 4).max(0);
        let scaled = g * Complex64::new(0.5f64.powi(squarings), 0.0);
        let n = g.nrows();
        let mut term = DMatrix::<Complex64>::identity(n, n);
        let mut sum = term.clone();
        for k in 1..30 {
            term = &term * &scaled * Complex64::new(1.0 / k as f64, 0.0);
            sum += &term;
        }
        for _ in 0..squarings {
            sum = &sum * &sum;
        }
        sum
    }

    fn random_antihermitian(n: usize, seed: u64) -> DMatrix<Complex64> {
        let mut state = seed;
        let mut next = || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((state >> 11) as f64 / (1u64 << 53) as f64) - 0.5
        };
        let m = DMatrix::from_fn(n, n, |_, _| Complex64::new(next(), next()));
        &m - m.adjoint()
    }

    #[test]
    fn matches_taylor_and_is_unitary() {
        for seed in 0..4 {
            let g = random_antihermitian(10, seed);
            let e = expm_antihermitian(&g);
            assert!(max_abs_diff(&e, &expm_taylor(&g)) < 1e-11);
            let gram = e.adjoint() * &e;
            assert!(max_abs_diff(&gram, &DMatrix::identity(10, 10)) < 1e-13);
        }
    }

    #[test]
    fn zero_generator_gives_identity() {
        let g = DMatrix::<Complex64>::zeros(5, 5);
        assert!(max_abs_diff(&expm_antihermitian(&g), &DMatrix::identity(5, 5)) < 1e-15);
    }

    #[test]
    fn scalar_phase() {
        let g = DMatrix::from_element(1, 1, Complex64::new(0.0, 0.7));
        let e = expm_antihermitian(&g);
        assert!((e[(0, 0)] - Complex64::from_polar(1.0, 0.7)).norm() < 1e-15);
    }
}
