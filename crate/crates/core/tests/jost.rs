mod common;

use common::*;
use proptest::prelude::*;
use resolab::jost::{self, neumann_psi_plus, JostSolver};
use resolab::{Interpolation, Potential};

fn fixtures() -> Vec<Potential> {
    vec![
        Potential::square_well(2.0),
        Potential::bump(1, 1, 6.0).unwrap(),
        Potential::bump(2, 1, -15.0).unwrap(),
        Potential::step(vec![0.0, 0.5, 1.0], vec![1.0, 3.0]).unwrap(),
        Potential::piecewise_poly(vec![0.0, 0.4, 1.0], vec![vec![1.0, -2.0, 3.0], vec![0.5, 4.0]]).unwrap(),
        Potential::grid(vec![0.0, 2.0, -1.0, 3.0, 0.5], Interpolation::Cubic).unwrap(),
    ]
}

#[test]
fn square_well_matches_closed_form() {
    for depth in [-20.0, -2.0, 1.0, 2.0, 10.0] {
        let q = Potential::square_well(depth);
        let oracle = SquareWell { depth };
        for k in halton_points(100, (-50.0, 50.0), (-10.0, 10.0)) {
            let b = JostSolver::default().boundary(&q, k).unwrap();
            let ew = rel(b.omega, oracle.omega(k), 1e-300);
            let es = rel(b.s, oracle.s(k), 1e-300);
            assert!(ew < 1e-9 && es < 1e-9, "c={depth} k={k} ew={ew:e} es={es:e}");
        }
    }
}

#[test]
fn deep_lower_half_plane() {
    // |e^{2ikx}| reaches e^{400} here.
    let q = Potential::square_well(2.0);
    let oracle = SquareWell { depth: 2.0 };
    for k in halton_points(30, (-200.0, 200.0), (-210.0, -150.0)) {
        let b = JostSolver::default().boundary(&q, k).unwrap();
        let ew = rel(b.omega, oracle.omega(k), 1e-300);
        assert!(ew < 1e-8, "k={k} ew={ew:e}");
    }
}

#[test]
fn oracle_forms_agree_where_both_are_accurate() {
    let o = SquareWell { depth: 2.0 };
    for k in halton_points(50, (-10.0, 10.0), (-2.0, 2.0)) {
        assert!(rel(o.omega(k), o.omega_trig(k), 1e-300) < 1e-12, "k = {k}");
    }
}

#[test]
fn spec_values_at_k_one() {
    let q = Potential::square_well(2.0);
    // ω(1) = 2i cosh(1) e^{i} ≈ -2.59692 + 1.66746i.
    let w = jost::omega(&q, c(1.0, 0.0)).unwrap();
    assert!((w - 2.0 * I * 1f64.cosh() * I.exp()).norm() < 1e-10);
    assert!((w - c(-2.59692, 1.66746)).norm() < 1e-5);
    let s = jost::s_func(&q, c(1.0, 0.0)).unwrap();
    assert!((s - 2.0 * 1f64.sinh() * I.exp()).norm() < 1e-10);
    assert!((s - c(1.26993, 1.97780)).norm() < 1e-5);
}

#[test]
fn psi_plus_profile_matches_closed_form() {
    let o = SquareWell { depth: 2.0 };
    let q = Potential::square_well(2.0);
    let xs: Vec<f64> = (0..=10).map(|i| i as f64 / 10.0).collect();
    for k in [c(1.0, 0.0), c(0.3, 0.2), c(7.0, -3.0), c(-4.0, 5.0)] {
        for e in jost::jost_plus(&q, k, &xs).unwrap() {
            let (psi, dpsi) = o.psi_plus(k, e.x);
            assert!(rel(e.psi, psi, 1e-3) < 1e-9, "k={k} x={}", e.x);
            assert!(rel(e.dpsi, dpsi, 1e-3) < 1e-9, "k={k} x={}", e.x);
        }
    }
}

#[test]
fn jost_minus_mirrors_plus_of_reflection() {
    // ψ₋(x, k; q) = e^{-ik} ψ₊(1 - x, k; q(1 - ·)).
    let o = SquareWell { depth: 2.0 };
    let q = Potential::square_well(2.0);
    let k = c(1.0, 0.0);
    let m = jost::jost_minus(&q, k, &[1.0]).unwrap()[0];
    let (psi, dpsi) = o.psi_plus(k, 0.0);
    assert!(rel(m.psi, (-I * k).exp() * psi, 1e-3) < 1e-9);
    assert!(rel(m.dpsi, -(-I * k).exp() * dpsi, 1e-3) < 1e-9);
}

#[test]
fn free_line_is_exact() {
    let z = Potential::zero();
    for k in halton_points(200, (-70.0, 70.0), (-70.0, 70.0)).into_iter().filter(|k| k.norm() <= 100.0) {
        let b = JostSolver::default().boundary(&z, k).unwrap();
        assert!((b.omega - 2.0 * I * k).norm() <= 1e-12);
        assert!(b.s.norm() <= 1e-12);
    }
}

#[test]
fn omega_prime_matches_oracles() {
    let o = SquareWell { depth: 2.0 };
    let q = Potential::square_well(2.0);
    let d = jost::omega_prime(&q, c(1.0, 0.0)).unwrap();
    assert!(rel(d, o.omega_prime(c(1.0, 0.0)), 1e-300) < 1e-8);
    for q in fixtures() {
        for k in [c(0.2, 0.0), c(0.49, 0.1), c(0.51, -0.1), c(3.0, 1.0), c(12.0, -4.0)] {
            let d = jost::omega_prime(&q, k).unwrap();
            let h = 1e-5;
            let fd = (jost::omega(&q, k + h).unwrap() - jost::omega(&q, k - h).unwrap()) / (2.0 * h);
            assert!(rel(d, fd, 1e-300) <= 1e-6, "k = {k}: {d} vs {fd}");
        }
    }
}

#[test]
fn large_k_behaviour() {
    let q = Potential::square_well(3.0);
    let mut worst_scaled = 0.0f64;
    for k in [10.0, 20.0, 40.0, 80.0, 160.0] {
        let kc = c(k, 0.0);
        let e = jost::jost_plus(&q, kc, &[0.0]).unwrap()[0];
        worst_scaled = worst_scaled.max((e.psi - 1.0).norm() * k);
        let w = jost::omega(&q, kc).unwrap();
        // ω - 2ik → -∫q as k → ∞ along the real axis.
        assert!((w - 2.0 * I * kc).norm() < 6.0, "ω - 2ik = O(1) at k = {k}");
    }
    assert!(worst_scaled < 3.0, "|ψ₊ e^{{-ikx}} - 1| * |k| = {worst_scaled}");
}

#[test]
fn wronskian_constancy_random() {
    let mut rng_k = halton_points(20, (-15.0, 15.0), (-4.0, 4.0)).into_iter();
    for (i, q) in fixtures().iter().cycle().take(20).enumerate() {
        let k = rng_k.next().unwrap();
        let xs = [0.0, 0.25, 0.5, 0.75, 1.0];
        let p = jost::jost_plus(q, k, &xs).unwrap();
        let m = jost::jost_minus(q, k, &xs).unwrap();
        let w = jost::omega(q, k).unwrap();
        for (a, b) in m.iter().zip(&p) {
            let r = (jost::wronskian(a, b).unwrap() - w).norm();
            assert!(r <= 1e-9 * (1.0 + w.norm()), "case {i} k={k} x={}", a.x);
        }
    }
}

#[test]
fn unitarity_on_real_axis() {
    for q in fixtures() {
        for k in [0.05, 0.3, 1.0, 4.0, -7.5, 25.0] {
            let sd = jost::scattering_coefficients(&q, k).unwrap();
            assert!(sd.unitarity_residual().unwrap() < 1e-8, "k = {k}");
            assert!((sd.omega - 2.0 * I * k / sd.t.unwrap()).norm() < 1e-10 * sd.omega.norm());
        }
    }
    let z = jost::scattering_coefficients(&Potential::zero(), 3.0).unwrap();
    assert!((z.t.unwrap() - 1.0).norm() < 1e-14 && z.r_plus.unwrap().norm() < 1e-14);
}

#[test]
fn neumann_series_agrees_with_solver() {
    let q = Potential::square_well(2.0);
    let r = neumann_psi_plus(&q, c(5.0, 0.0), 0.0, 8).unwrap();
    let e = jost::jost_plus(&q, c(5.0, 0.0), &[0.0]).unwrap()[0];
    assert!(r.tail_bound < 1e-6);
    assert!((r.psi - e.psi).norm() <= r.tail_bound + 1e-11, "{} > {}", (r.psi - e.psi).norm(), r.tail_bound);
    for q in fixtures() {
        for (k, x) in [(c(6.0, 1.0), 0.0), (c(-9.0, -0.5), 0.3), (c(4.0, 2.0), 0.7)] {
            let r = neumann_psi_plus(&q, k, x, 14).unwrap();
            if r.tail_bound < 1e-6 {
                let e = jost::jost_plus(&q, k, &[x]).unwrap()[0];
                assert!((r.psi - e.psi).norm() <= r.tail_bound + 1e-10 * e.psi.norm());
            }
        }
    }
}

#[test]
fn first_iterate_on_imaginary_axis() {
    // k = iτ with τ = -1 and q = c on [0, 1]:
    // ψ₁ = e^{-τx}/(2τ) c(1-x) - e^{τx}/(2τ) c (e^{-2τx} - e^{-2τ})/(2τ).
    let (cc, tau) = (2.0, -1.0);
    let q = Potential::square_well(cc);
    for x in [0.0, 0.3, 0.8] {
        let r = neumann_psi_plus(&q, c(0.0, tau), x, 1).unwrap();
        let exact = (-tau * x).exp() / (2.0 * tau) * cc * (1.0 - x)
            - (tau * x).exp() / (2.0 * tau) * cc * ((-2.0 * tau * x).exp() - (-2.0 * tau).exp()) / (2.0 * tau);
        assert!((r.iterates[1] - exact).norm() < 1e-12, "x = {x}: {} vs {exact}", r.iterates[1]);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn conjugation_symmetry(idx in 0usize..6, re in -20.0f64..20.0, im in -5.0f64..5.0) {
        let q = &fixtures()[idx];
        let k = c(re, im);
        let a = JostSolver::default().boundary(q, k).unwrap();
        let b = JostSolver::default().boundary(q, -k.conj()).unwrap();
        prop_assert!(rel(b.omega, a.omega.conj(), 1e-300) <= 1e-9);
        prop_assert!((b.s - a.s.conj()).norm() <= 1e-9 * a.s.norm().max(1e-3 * a.omega.norm()));
    }
}
