//! Property tests for the measure calculus.

use proptest::prelude::*;
use shiftlab::{linear_combine, DensityPiece, Measure1D, PowerTerm};

fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
}

prop_compose! {
    fn arb_atoms(max_atoms: usize, min_loc: f64)
        (atoms in prop::collection::vec((min_loc..1.5f64, 0.05f64..2.0), 1..=max_atoms)) -> Vec<(f64, f64)> {
        atoms
    }
}

prop_compose! {
    fn arb_piece()(lo in 0.0f64..0.5, width in 0.2f64..1.0, c in 0.05f64..2.0, p in -0.9f64..3.0) -> DensityPiece {
        DensityPiece { lo, hi: lo + width, terms: vec![PowerTerm { coefficient: c, exponent: p }] }
    }
}

prop_compose! {
    fn arb_positive_measure()(atoms in arb_atoms(4, 0.0), piece in prop::option::of(arb_piece())) -> Measure1D {
        Measure1D::new_positive(atoms, piece.into_iter().collect()).unwrap()
    }
}

prop_compose! {
    fn arb_measure_off_zero()(atoms in arb_atoms(4, 0.05), keep in proptest::bool::ANY) -> Measure1D {
        let pieces = if keep {
            vec![DensityPiece { lo: 0.1, hi: 1.0, terms: vec![PowerTerm { coefficient: 0.7, exponent: 1.0 }] }]
        } else {
            vec![]
        };
        Measure1D::new_positive(atoms, pieces).unwrap()
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn moment_linearity(a in arb_positive_measure(), b in arb_positive_measure(),
                        ca in -2.0f64..2.0, cb in -2.0f64..2.0) {
        let combo = linear_combine(&[(ca, &a), (cb, &b)]);
        for k in 0..=20u32 {
            let want = ca * a.moment(k) + cb * b.moment(k);
            prop_assert!(rel_close(combo.moment(k), want, 1e-12));
        }
    }

    #[test]
    fn pushforward_moment_identity(mu in arb_positive_measure(), m in 1u32..=5) {
        let push = mu.pushforward_power(m);
        for k in 0..=10u32 {
            prop_assert!(rel_close(push.moment(k), mu.moment(m * k), 1e-12));
        }
    }

    #[test]
    fn tilt_is_normalised(mu in arb_positive_measure(), n in 1u32..=6) {
        let g = mu.moment(n);
        prop_assume!(g > 1e-12);
        let t = mu.tilt(n, g).unwrap();
        prop_assert!((t.mass() - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn divide_undoes_multiplication_by_t(mu in arb_measure_off_zero()) {
        // multiply by t (an unnormalised tilt), then divide again
        let g1 = mu.moment(1);
        let mult = mu.tilt(1, g1).unwrap().scaled(g1);
        let back = mult.divide_by_t().unwrap();
        for k in 0..=12u32 {
            prop_assert!(rel_close(back.moment(k), mu.moment(k), 1e-12));
        }
    }

    #[test]
    fn positive_measures_are_nonnegative(mu in arb_positive_measure()) {
        prop_assert!(mu.is_nonnegative(1e-9).pass);
    }

    #[test]
    fn self_difference_is_zero(mu in arb_positive_measure()) {
        prop_assert!(linear_combine(&[(1.0, &mu), (-1.0, &mu)]).is_zero());
    }
}
