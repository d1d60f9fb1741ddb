//! Acceptance suite: one test per criterion, each printing a summary line.
//!
//! Criterion 7 (the parameter-region scan) exercises the command line and
//! lives in the CLI crate's acceptance suite.

mod common;

use common::{random_non_subnormal, random_subnormal, rng};
use rand::Rng;
use shiftlab::tensor_core::{
    build_grid_windowed, flat_tuple, is_subnormal, power, psi_phi, verify_theorem,
};
use shiftlab::{
    backward_extension, hankel_check, power_decompose, weights_from_measure, Measure1D, Tail,
    WeightSeq,
};

fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1e-300)
}

#[test]
fn criterion_1_flat_example_closed_forms() {
    let ft = flat_tuple(0.6, 0.8, 0.7).unwrap();
    let (psi, phi) = psi_phi(&ft).unwrap();
    assert_eq!(psi.atoms().len(), 1);
    assert!((psi.atoms()[0].0 - 1.0).abs() < 1e-12);
    assert!((psi.atoms()[0].1 - 0.51).abs() < 1e-12);
    assert_eq!(phi.atoms().len(), 2);
    assert!((phi.atoms()[0].0 - 0.0).abs() < 1e-12);
    assert!((phi.atoms()[0].1 - 0.3136).abs() < 1e-12);
    assert!((phi.atoms()[1].0 - 1.0).abs() < 1e-12);
    assert!((phi.atoms()[1].1 - 0.0464).abs() < 1e-12);
    assert!(is_subnormal(&ft, 1e-9).pass);

    let bad = flat_tuple(0.3, 0.99, 0.1).unwrap();
    let (_, phi) = psi_phi(&bad).unwrap();
    assert!(phi.atoms()[0].0 == 0.0 && phi.atoms()[0].1 < 0.0);
    assert!(!is_subnormal(&bad, 1e-9).pass);

    println!(
        "criterion 1: PASS — closed-form ψ/φ atoms match to 1e-12 and verdicts split as required"
    );
}

#[test]
fn criterion_2_power_invariance_on_random_tuples() {
    let mut rng = rng(0x5eed_0002);
    let mut checked = 0;
    for i in 0..50 {
        let parts = if i % 2 == 0 {
            random_subnormal(&mut rng)
        } else {
            random_non_subnormal(&mut rng)
        };
        let base = is_subnormal(&parts.tuple, 1e-9);
        assert!(
            base.margin.abs() >= 1e-6,
            "generator must keep margins decisive, got {}",
            base.margin
        );
        let report = verify_theorem(&parts.tuple, 3, 3, 1e-6);
        assert_eq!(report.defects(), 0, "tuple {i}: {:?}", report.entries);
        assert!(report.all_agree(), "tuple {i}: {:?}", report.entries);
        checked += 1;
    }
    println!("criterion 2: PASS — {checked}/50 tuples agree with all powers ≤ (3,3), zero defects");
}

#[test]
fn criterion_3_power_functional_identities() {
    let mut rng = rng(0x5eed_0003);
    let mut cases = 0;
    for i in 0..20 {
        let parts = if i % 2 == 0 {
            random_subnormal(&mut rng)
        } else {
            random_non_subnormal(&mut rng)
        };
        let ft = &parts.tuple;
        let (psi, _) = psi_phi(ft).unwrap();
        for n in 2u32..=4 {
            let summands = power(ft, 1, n).unwrap();
            // moment identity for the q = 1 summand:
            // ∫t^k dψ' = (1/(y₁²···y_n²)) ∫u^{n(k+1)} dψ
            let (psi1, _) = psi_phi(&summands[1]).unwrap();
            let y_prod = ft.tau().moment(n + 1) / ft.tau().moment(1);
            for k in 0..=10u32 {
                let lhs = psi1.moment(k);
                let rhs = psi.moment(n * (k + 1)) / y_prod;
                assert!(rel_close(lhs, rhs, 1e-10), "n={n} k={k}: {lhs} vs {rhs}");
            }
            // norm identity for the q = 0 summand:
            // y₀²···y_{n−1}² ∫t⁻¹dψ' = y₀² ∫t⁻¹dψ
            let (psi0, _) = psi_phi(&summands[0]).unwrap();
            let lhs = ft.tau().moment(n) * psi0.integrate_power(-1.0).unwrap().finite().unwrap();
            let rhs = ft.tau().moment(1) * psi.integrate_power(-1.0).unwrap().finite().unwrap();
            assert!(rel_close(lhs, rhs, 1e-10), "n={n}: {lhs} vs {rhs}");
            cases += 1;
        }
    }
    println!("criterion 3: PASS — ψ-tilt and t⁻¹-norm identities hold to 1e-10 in {cases} cases");
}

#[test]
fn criterion_4_power_decomposition_grid_oracle() {
    let mut rng = rng(0x5eed_0004);
    let mut compared = 0usize;
    for i in 0..20 {
        let parts = if i % 2 == 0 {
            random_subnormal(&mut rng)
        } else {
            random_non_subnormal(&mut rng)
        };
        let ft = &parts.tuple;
        let full = build_grid_windowed(ft, (18, 18)).unwrap();
        for (m, n) in [(1u32, 2u32), (2, 1), (2, 2), (1, 3)] {
            let summands = power(ft, m, n).unwrap();
            for (idx, s) in summands.iter().enumerate() {
                let (p, q) = (idx as u32 / n, idx as u32 % n);
                let sub = build_grid_windowed(s, (8, 8)).unwrap();
                let base = full.gamma2d((p as usize, q as usize)).unwrap();
                for k1 in 0..=4usize {
                    for k2 in 0..=4usize {
                        let want = full
                            .gamma2d((
                                (m as usize) * k1 + p as usize,
                                (n as usize) * k2 + q as usize,
                            ))
                            .unwrap()
                            / base;
                        let got = sub.gamma2d((k1, k2)).unwrap();
                        assert!(
                            rel_close(got, want, 1e-10),
                            "tuple {i} power ({m},{n}) summand ({p},{q}) k=({k1},{k2}): {got} vs {want}"
                        );
                        compared += 1;
                    }
                }
            }
        }
    }
    println!(
        "criterion 4: PASS — {compared} restricted-grid moments match the summand grids to 1e-10"
    );
}

#[test]
fn criterion_5_one_variable_facts() {
    // shift(1/3, 1/2, 1, 1, ...) fails the Hankel check by order 3 ...
    let w = WeightSeq::explicit(vec![1.0 / 3.0, 0.5, 1.0], Tail::Constant).unwrap();
    let failing_order = (1..=3u32).find(|&k| !hankel_check(&w, k, 10).pass);
    assert!(
        failing_order.is_some(),
        "expected a Hankel failure at order ≤ 3"
    );

    // ... while its restriction shift(1/2, 1, 1, ...) passes ...
    let restriction = WeightSeq::explicit(vec![0.5, 1.0], Tail::Constant).unwrap();
    for k in 1..=3 {
        assert!(hankel_check(&restriction, k, 10).pass);
    }

    // ... and so do all packet shifts of its powers m ≤ 3
    for m in 2..=3u32 {
        for packet in power_decompose(&w, m).unwrap() {
            for k in 1..=3 {
                assert!(
                    hankel_check(&packet.shift, k, 10).pass,
                    "packet of power {m} must pass"
                );
            }
        }
    }

    // no backward extension of shift(1/2, 1, 1, ...) is subnormal
    let xi = Measure1D::atomic(&[(0.0, 0.75), (1.0, 0.25)]).unwrap();
    for a in [1e-3, 0.1, 0.25, 0.5, 0.75, 1.0, 1.5, 10.0] {
        let (v, m) = backward_extension(a, &xi).unwrap();
        assert!(!v.pass && m.is_none(), "a = {a} must be rejected");
    }

    println!(
        "criterion 5: PASS — Hankel failure at order {}, restriction and packet powers clean, every backward extension rejected",
        failing_order.unwrap()
    );
}

#[test]
fn criterion_6_six_point_equals_order_one_window_test() {
    let mut rng = rng(0x5eed_0006);
    let mut pass_count = 0;
    let mut fail_count = 0;
    for i in 0..20 {
        let grid = if i % 2 == 0 {
            build_grid_windowed(&random_subnormal(&mut rng).tuple, (11, 11)).unwrap()
        } else {
            let x = rng.gen_range(0.2..0.45);
            let y = rng.gen_range(0.9..0.98);
            let a = rng.gen_range(0.75..0.95);
            build_grid_windowed(&flat_tuple(x, y, a).unwrap(), (11, 11)).unwrap()
        };
        let six = grid.six_point_test((6, 6), 1e-9);
        let one = grid.k_hyponormal_window(1, (6, 6), 1e-9);
        assert_eq!(six.pass, one.pass, "grid {i}: {six} vs {one}");
        if !six.pass {
            assert_eq!(six.witness, one.witness, "grid {i}: first witnesses differ");
            fail_count += 1;
        } else {
            pass_count += 1;
        }
    }
    assert!(
        pass_count >= 5 && fail_count >= 5,
        "need both verdicts represented: {pass_count} pass, {fail_count} fail"
    );
    println!("criterion 6: PASS — verdicts and first witnesses agree on {pass_count} passing and {fail_count} failing grids");
}

#[test]
fn criterion_8_measure_calculus_properties() {
    let mut rng = rng(0x5eed_0008);
    let mut cases = 0;

    // pushforward moment identity
    for _ in 0..70 {
        let mu = common::random_probability_measure(&mut rng);
        let m = rng.gen_range(1..=5u32);
        let push = mu.pushforward_power(m);
        for k in 0..=10u32 {
            assert!(rel_close(push.moment(k), mu.moment(m * k), 1e-12));
        }
        cases += 1;
    }

    // tilt normalisation: the restriction tilt is a probability measure
    for _ in 0..70 {
        let mu = common::random_probability_measure(&mut rng);
        let n = rng.gen_range(1..=6u32);
        let tilted = mu.tilt(n, mu.moment(n)).unwrap();
        assert!((tilted.mass() - 1.0).abs() <= 1e-12);
        cases += 1;
    }

    // Berger round trip: squared-weight products reproduce the moments
    for _ in 0..60 {
        let mu = common::random_probability_measure(&mut rng);
        let w = weights_from_measure(&mu).unwrap();
        let mut product = 1.0;
        for k in 1..=20u32 {
            let wk = w.weight(k - 1).unwrap();
            product *= wk * wk;
            assert!(rel_close(product, mu.moment(k), 1e-12), "k={k}");
        }
        cases += 1;
    }

    assert_eq!(cases, 200);
    println!("criterion 8: PASS — pushforward, tilt and Berger round-trip identities hold in {cases} randomized cases");
}
