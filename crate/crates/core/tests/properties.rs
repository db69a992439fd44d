use std::f64::consts::PI;

use num_complex::Complex64;
use proptest::prelude::*;
use stretched_fock::fock::{complex_power, laguerre_assoc, ln_factorial, poisson_tail_bound};
use stretched_fock::operators::{bogoliubov, displacement, multiplication_law, SqueezeLabel};
use stretched_fock::quadrature::{reconstruct_vector, weight, QuadratureSpec};
use stretched_fock::states::{evolve, make_state, overlap, photon_stats, EvolutionPhase};
use stretched_fock::sweep::RangeSpec;
use stretched_fock::{FockVector, StretchLabel, TruncationConfig};

fn sigma() -> impl Strategy<Value = f64> {
    0.05f64..=1.0
}

fn label_point() -> impl Strategy<Value = (f64, f64)> {
    (0.0f64..4.0, -PI..PI)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn power_keeps_modulus_and_scales_argument(r in 1e-3f64..10.0, phi in -PI..=PI, s in sigma()) {
        let z = Complex64::from_polar(r, phi);
        let p = complex_power(z, s).unwrap();
        prop_assert!((p.norm() - r.powf(s)).abs() <= 1e-12 * r.powf(s));
        prop_assert!(p.arg().abs() <= s * PI + 1e-12);
    }

    #[test]
    fn states_are_normalized_within_tail((r, phi) in label_point(), s in sigma()) {
        let l = StretchLabel::from_polar(r, phi, s).unwrap();
        let cfg = TruncationConfig::for_mean(l.mean(), 1e-13).unwrap();
        let n = make_state(&l, &cfg).unwrap().norm_sqr();
        prop_assert!(n <= 1.0 + 1e-14);
        prop_assert!(n >= 1.0 - 1e-12);
        prop_assert!(poisson_tail_bound(l.mean(), cfg.dim) <= 1e-13);
    }

    #[test]
    fn closed_form_statistics_are_poissonian((r, phi) in label_point(), s in sigma()) {
        let l = StretchLabel::from_polar(r.max(1e-3), phi, s).unwrap();
        let st = photon_stats(&l);
        prop_assert!((st.variance() - st.mean).abs() <= 1e-12 * (1.0 + st.mean * st.mean));
        prop_assert!(st.mandel_q.unwrap().abs() < 1e-10);
    }

    #[test]
    fn overlap_modulus_is_gaussian(a in label_point(), b in label_point(), s in sigma()) {
        let x = StretchLabel::from_polar(a.0, a.1, s).unwrap();
        let y = StretchLabel::from_polar(b.0, b.1, s).unwrap();
        let o = overlap(&x, &y).unwrap();
        let expect = (-(x.w() - y.w()).norm_sqr() / 2.0).exp();
        prop_assert!((o.norm() - expect).abs() < 1e-13);
        let back = overlap(&y, &x).unwrap();
        prop_assert!((back - o.conj()).norm() < 1e-13);
    }

    #[test]
    fn evolution_preserves_norm((r, phi) in label_point(), s in sigma(), wt in -10.0f64..10.0) {
        let l = StretchLabel::from_polar(r, phi, s).unwrap();
        let cfg = TruncationConfig::for_mean(l.mean(), 1e-12).unwrap();
        let v = make_state(&l, &cfg).unwrap();
        let e = evolve(&v, EvolutionPhase::new(wt));
        prop_assert!((e.norm_sqr() - v.norm_sqr()).abs() < 1e-14);
    }

    #[test]
    fn multiplication_phase_is_unimodular(a in label_point(), b in label_point(), s in sigma()) {
        let x = StretchLabel::from_polar(a.0, a.1, s).unwrap();
        let y = StretchLabel::from_polar(b.0, b.1, s).unwrap();
        let p = multiplication_law(&x, &y).unwrap();
        prop_assert!((p.phase_factor.norm() - 1.0).abs() < 1e-14);
        prop_assert!((p.combined_amplitude - x.w() - y.w()).norm() < 1e-14);
    }

    #[test]
    fn bogoliubov_coefficients_are_hyperbolic(rho in 0.0f64..2.0, theta in -PI..PI, u in sigma()) {
        let (c, v) = bogoliubov(&SqueezeLabel::from_polar(rho, theta, u).unwrap());
        prop_assert!((c * c - v.norm_sqr() - 1.0).abs() < 1e-12 * c * c);
    }

    #[test]
    fn weight_is_positive(z in 1e-12f64..1e6, s in sigma()) {
        prop_assert!(weight(z, s).unwrap() > 0.0);
    }

    #[test]
    fn negative_index_laguerre_matches_sum(n in 0usize..15, j in 0usize..15, x in 0.0f64..6.0) {
        prop_assume!(j <= n);
        // L_n^{(k)}(x) = Σ_i (-1)^i C(n + k, n - i) x^i / i!, with the
        // binomial continued to negative upper argument.
        let k = -(j as i64);
        let top = n as i64 + k;
        let mut sum = 0.0;
        for i in 0..=n {
            let lo = n - i;
            let mut binom = 1.0;
            for t in 0..lo {
                binom *= (top - t as i64) as f64 / (t + 1) as f64;
            }
            sum += (-1f64).powi(i as i32) * binom * x.powi(i as i32) / ln_factorial(i).exp();
        }
        let got = laguerre_assoc(n, k, x).unwrap();
        prop_assert!((got - sum).abs() < 1e-9 * (1.0 + sum.abs()), "{} vs {}", got, sum);
    }

    #[test]
    fn linspace_ranges_hit_both_ends(a in -5.0f64..5.0, span in 0.0f64..5.0, count in 2usize..40) {
        let text = format!("{a}:{}:{count}", a + span);
        let r = RangeSpec::parse(&text).unwrap();
        prop_assert_eq!(r.0.len(), count);
        prop_assert_eq!(r.0[0], a);
        prop_assert_eq!(*r.0.last().unwrap(), a + span);
        prop_assert!(r.0.windows(2).all(|w| w[0] <= w[1]));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn displacement_is_unitary((r, phi) in label_point(), s in sigma()) {
        let l = StretchLabel::from_polar(r, phi, s).unwrap();
        let d = displacement(&l, &TruncationConfig::new(24, 0.0).unwrap());
        prop_assert!(d.unitarity_residual(24) < 1e-12);
    }

    #[test]
    fn resolution_reproduces_vectors(
        amps in proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 12),
        s in sigma(),
    ) {
        let v = FockVector::from_vec(amps.into_iter().map(|(a, b)| Complex64::new(a, b)).collect());
        let spec = QuadratureSpec::analytic(16, s).unwrap();
        let back = reconstruct_vector(&v, &spec).unwrap();
        prop_assert!(back.block_distance(&v, 12) < 1e-10);
    }
}
