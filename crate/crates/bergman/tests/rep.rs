use bergman::geometry::{cocycle_sigma, GroupElement};
use bergman::holo::{CoeffFunction, QuadratureGrid};
use bergman::rep::*;
use bergman::Complex64;
use proptest::prelude::*;
use rand::Rng;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn max_diff(a: &CoeffFunction, b: &CoeffFunction) -> f64 {
    a.coeffs.iter().zip(&b.coeffs).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

#[test]
fn unitarity() {
    let mut rng = bergman::rng(21);
    for (n, gamma, degree) in [(1, 3.0, 60), (2, 4.5, 32)] {
        for _ in 0..20 {
            let f = CoeffFunction::random(n, degree, 4, gamma, &mut rng);
            let x = GroupElement::random(n, 0.5, &mut rng);
            let g = apply_rep_to(&x, &f, degree).unwrap().f;
            let rel = (g.norm() - f.norm()).abs() / f.norm();
            assert!(rel < 1e-6, "n = {n}: {rel:e}");
        }
    }
}

#[test]
fn homomorphism_with_cocycle() {
    let mut rng = bergman::rng(22);
    for (n, gamma, degree, rmax) in [(1, 2.5, 48, 0.5), (2, 4.0, 32, 0.4)] {
        for _ in 0..5 {
            let f = CoeffFunction::random(n, degree, 3, gamma, &mut rng);
            let x = GroupElement::random(n, rmax, &mut rng);
            let y = GroupElement::random(n, rmax, &mut rng);
            let lhs = apply_rep_to(&x, &apply_rep_to(&y, &f, degree).unwrap().f, degree).unwrap().f;
            let s = cocycle_sigma(&x, &y, gamma).conj();
            let rhs = apply_rep_to(&x.mul(&y), &f, degree).unwrap().f.scale(s);
            let d = max_diff(&lhs, &rhs) / f.norm();
            assert!(d < 1e-8, "n = {n}: {d:e}");
        }
    }
}

#[test]
fn series_path_matches_fft() {
    let mut rng = bergman::rng(23);
    let f = CoeffFunction::random(1, 40, 5, 2.2, &mut rng);
    for _ in 0..5 {
        let x = GroupElement::random(1, 0.6, &mut rng);
        let a = apply_rep_with(&x, &f, 40, RepMethod::Series).unwrap().f;
        let b = apply_rep_with(&x, &f, 40, RepMethod::Fft).unwrap().f;
        assert!(max_diff(&a, &b) < 1e-10);
    }
}

#[test]
fn constant_wavelet_modulus() {
    // |W_1 f(x)| = h(x·0)^{γ/2}|f(x·0)|, and the general path agrees
    let mut rng = bergman::rng(24);
    for (n, gamma) in [(1, 3.0), (2, 3.5)] {
        let f = CoeffFunction::random(n, 6, 6, gamma, &mut rng);
        let one = CoeffFunction::constant(n, 0, gamma, c(1.0, 0.0));
        for _ in 0..100 {
            let x = GroupElement::random(n, 0.7, &mut rng);
            let z = x.origin_image();
            let w = wavelet_const(&f, &x);
            let expected = x.h().powf(gamma / 2.0) * f.eval(&z).norm();
            assert!((w.norm() - expected).abs() < 1e-8 * (1.0 + expected));
            if n == 1 {
                assert!((wavelet(&f, &one, &x).unwrap() - w).norm() < 1e-8);
            }
        }
    }
}

#[test]
fn lp_isometry_of_constant_wavelet() {
    // ‖W_1 f‖_{L^p_{α−γp/2}(G)} = c_α^{−1/p}‖f‖_{A^p_α}
    let gamma = 3.0;
    let alpha = 2.5;
    let mut rng = bergman::rng(25);
    let f = CoeffFunction::random(1, 5, 5, gamma, &mut rng);
    let grid = GroupGrid::section(1, alpha - 2.0, 48, 80).unwrap();
    let disc = QuadratureGrid::new(1, alpha, 96, 160).unwrap();
    for p in [1.0, 2.0, 4.0] {
        let lhs = group_lp_norm(|pt| wavelet_const(&f, &pt.element()), p, alpha - gamma * p / 2.0, &grid);
        assert!(!lhs.divergent);
        let rhs = disc.c_alpha.powf(-1.0 / p) * disc.lp_alpha_norm(&f, p).unwrap().value;
        assert!((lhs.value - rhs).abs() / rhs < 1e-4, "p = {p}: {} vs {rhs}", lhs.value);
    }
}

#[test]
fn lp_isometry_on_the_ball() {
    let gamma = 4.0;
    let alpha = 3.5;
    let mut rng = bergman::rng(26);
    let f = CoeffFunction::random(2, 3, 3, gamma, &mut rng);
    let grid = GroupGrid::section(2, alpha - 3.0, 16, 16).unwrap();
    let disc = QuadratureGrid::for_degree(2, alpha, 6).unwrap();
    for p in [1.0, 2.0] {
        let lhs = group_lp_norm(|pt| wavelet_const(&f, &pt.element()), p, alpha - gamma * p / 2.0, &grid);
        let rhs = disc.c_alpha.powf(-1.0 / p) * disc.lp_alpha_norm(&f, p).unwrap().value;
        assert!((lhs.value - rhs).abs() / rhs < 1e-4, "p = {p}: {} vs {rhs}", lhs.value);
    }
}

#[test]
fn divergent_weight_is_flagged() {
    // |W_1(1)| = h^{γ/2}, so the weight h^{α−γ/2} leaves L^1 once α ≤ g − 1
    let gamma = 5.0;
    let one = CoeffFunction::constant(1, 0, gamma, c(1.0, 0.0));
    let grid = GroupGrid::section(1, 0.0, 24, 8).unwrap();
    let bad = group_lp_norm(|pt| wavelet_const(&one, &pt.element()), 1.0, 0.5 - gamma / 2.0, &grid);
    assert!(bad.divergent, "slope {}", bad.tail_slope);
    let good = group_lp_norm(|pt| wavelet_const(&one, &pt.element()), 1.0, 3.0 - gamma / 2.0, &grid);
    assert!(!good.divergent);
}

fn probes(count: usize, seed: u64) -> Vec<GroupElement> {
    let mut rng = bergman::rng(seed);
    (0..count)
        .map(|_| {
            let w = bergman::geometry::random_point(1, 0.6, &mut rng);
            GroupElement::disc_polar(w[0], rng.gen_range(-3.0..3.0)).unwrap()
        })
        .collect()
}

#[test]
fn reproducing_identity() {
    let gamma = 3.0;
    let mut rng = bergman::rng(27);
    let f = CoeffFunction::random(1, 4, 4, gamma, &mut rng);
    let one = normalize_psi(&CoeffFunction::constant(1, 0, gamma, c(1.0, 0.0))).unwrap();
    let grid = GroupGrid::section(1, gamma - 2.0, 40, 64).unwrap();
    let r = reproducing_residual(&f, &one, &grid, &probes(8, 1)).unwrap();
    assert!(r < 1e-8, "ψ = 1: {r:e}");

    let psi = normalize_psi(&"poly:1,0,1".parse::<PsiSpec>().unwrap().build(1, 2, gamma).unwrap()).unwrap();
    let grid = GroupGrid::new(1, gamma - 2.0, 40, 64, 12).unwrap();
    let r = reproducing_residual(&f, &psi, &grid, &probes(6, 2)).unwrap();
    assert!(r < 1e-2, "ψ = z² + 1: {r:e}");
}

#[test]
fn vector_swap_constant() {
    let gamma = 3.0;
    let build = |s: &str| s.parse::<PsiSpec>().unwrap().build(1, 2, gamma).unwrap();
    let psi = build("poly:1,0.3");
    let phi = build("poly:1,0,1");
    let eta = build("poly:0.5,i,0.2");
    let mut rng = bergman::rng(28);
    let f = CoeffFunction::random(1, 4, 4, gamma, &mut rng);
    let grid = GroupGrid::new(1, gamma - 2.0, 40, 64, 12).unwrap();
    let r = vector_swap(&f, &psi, &phi, &eta, &grid, &probes(6, 3)).unwrap();
    // ⟨η, ψ⟩ = 0.5 + i·0.3·‖z‖², with ‖z‖² = 1/γ, and d_γ = 2
    assert!((r.expected - c(0.25, 0.05)).norm() < 1e-12);
    assert!(r.max_rel_spread < 1e-2, "{r:?}");
}

#[test]
fn norm_equivalence_for_polynomial_vector() {
    let gamma = 3.0;
    let alpha = 2.5;
    let p = 2.0;
    let psi = normalize_psi(&"poly:1,0,1".parse::<PsiSpec>().unwrap().build(1, 2, gamma).unwrap()).unwrap();
    let grid = GroupGrid::new(1, alpha - 2.0, 32, 48, 12).unwrap();
    let disc = QuadratureGrid::for_degree(1, alpha, 8).unwrap();
    let mut rng = bergman::rng(29);
    let ratios: Vec<f64> = (0..20)
        .map(|_| {
            let f = CoeffFunction::random(1, 4, 4, gamma, &mut rng);
            let w = group_lp_norm(|pt| wavelet_su11(&f, &psi, &pt.su11()).unwrap(), p, alpha - gamma * p / 2.0, &grid);
            w.value / disc.lp_alpha_norm(&f, p).unwrap().value
        })
        .collect();
    let hi = ratios.iter().cloned().fold(0.0, f64::max);
    let lo = ratios.iter().cloned().fold(f64::INFINITY, f64::min);
    assert!(lo > 0.0 && hi / lo < 50.0, "{lo} {hi}");
}

#[test]
fn formal_dimension_values() {
    assert!((formal_dimension(1, 3.0) - 2.0).abs() < 1e-12);
    assert!((formal_dimension(1, 2.4) - 1.4).abs() < 1e-12);
    // Γ(4)/(2!Γ(2)) = 3
    assert!((formal_dimension(2, 4.0) - 3.0).abs() < 1e-12);
}

#[test]
fn psi_spec_forms() {
    assert_eq!("const".parse::<PsiSpec>().unwrap(), PsiSpec::Const);
    assert!("poly:".parse::<PsiSpec>().is_err());
    assert!("wave".parse::<PsiSpec>().is_err());
    assert!("poly:1,2,3".parse::<PsiSpec>().unwrap().build(1, 1, 3.0).is_err());
    let f = "file:/nonexistent/psi.json".parse::<PsiSpec>().unwrap();
    assert!(f.build(1, 4, 3.0).is_err());
}

proptest! {
    #[test]
    fn psi_spec_round_trip(coeffs in prop::collection::vec((-5.0f64..5.0, -5.0f64..5.0), 1..6)) {
        let spec = PsiSpec::Poly(coeffs.iter().map(|&(a, b)| c(a, b)).collect());
        let back: PsiSpec = spec.to_string().parse().unwrap();
        prop_assert_eq!(back, spec);
    }

    #[test]
    fn parse_complex_forms(a in -10.0f64..10.0, b in -10.0f64..10.0) {
        let z = parse_complex(&format!("{a}{b:+}i")).unwrap();
        prop_assert_eq!(z, c(a, b));
        prop_assert_eq!(parse_complex(&format!("{b}i")).unwrap(), c(0.0, b));
    }
}
