//! Property tests for the algebraic invariants.

use proptest::prelude::*;

use henon_core::basis::BasisSpec;
use henon_core::bubbles::{bubble_u, kelvin};
use henon_core::energy::{cpq, quotient_system, ExponentConfig};
use henon_core::field::{to_coefficients, to_physical, SpectralField};

fn shared_basis() -> &'static BasisSpec {
    static BASIS: std::sync::OnceLock<BasisSpec> = std::sync::OnceLock::new();
    BASIS.get_or_init(|| BasisSpec::new(16, 64))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn quotient_is_scale_invariant(
        coeffs in prop::collection::vec(-1.0f64..1.0, 16),
        shift in prop::collection::vec(-0.5f64..0.5, 16),
        t in 0.05f64..20.0,
    ) {
        let basis = shared_basis();
        let u = SpectralField::from_coeffs(coeffs);
        let v = u.axpy(1.0, &SpectralField::from_coeffs(shift));
        prop_assume!(u.l2_norm() > 1e-3 && v.l2_norm() > 1e-3);
        let exp = ExponentConfig::new(2.5, 1.5).unwrap();
        let q0 = quotient_system(&u, &v, &exp, 1.0, 0.3, basis);
        let q1 = quotient_system(&u.scaled(t), &v.scaled(t), &exp, 1.0, 0.3, basis);
        if let (Ok(q0), Ok(q1)) = (q0, q1) {
            prop_assert!(((q0 - q1) / q0).abs() < 1e-12, "drift {}", (q0 - q1) / q0);
        }
    }

    #[test]
    fn coupling_constant_bounds_and_symmetry(p in 1.01f64..6.0, q in 1.01f64..6.0) {
        let c = cpq(p, q);
        prop_assert!(c > 0.0 && c <= 2.0 + 1e-14);
        prop_assert!(((c - cpq(q, p)) / c).abs() < 1e-14);
        if (p - q).abs() > 1e-6 {
            prop_assert!(c < 2.0);
        }
    }

    #[test]
    fn transform_round_trip(coeffs in prop::collection::vec(-1.0f64..1.0, 16)) {
        let basis = shared_basis();
        let u = SpectralField::from_coeffs(coeffs);
        let samples = to_physical(&u, basis).unwrap();
        let back = to_coefficients(samples, basis).unwrap();
        let norm = u.l2_norm().max(1e-12);
        for (a, b) in u.coeffs().iter().zip(back.coeffs()) {
            prop_assert!((a - b).abs() < 1e-10 * norm);
        }
    }

    #[test]
    fn kelvin_involution_everywhere(x in -4.0f64..4.0, pole in -1.0f64..1.0) {
        prop_assume!((x - pole).abs() > 1e-3);
        let f = |y: f64| bubble_u(y - 0.3, 1, 0.3);
        let once = move |y: f64| kelvin(f, pole, 1, 0.3, y).unwrap();
        let twice = kelvin(once, pole, 1, 0.3, x).unwrap();
        prop_assert!(((twice - f(x)) / f(x)).abs() < 1e-12);
    }
}
