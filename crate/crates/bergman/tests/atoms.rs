use bergman::atoms::*;
use bergman::domain::{make_domain, DomainKind, DomainParams};
use bergman::geometry::Su11;
use bergman::holo::CoeffFunction;
use bergman::rep::{apply_rep_series, normalize_psi, wavelet_su11, PsiSpec};
use bergman::Complex64;
use proptest::prelude::*;
use rand::Rng;

const GAMMA: f64 = 3.0;
const DEGREE: usize = 32;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn disc() -> DomainParams {
    make_domain(DomainKind::Disc).unwrap()
}

fn one() -> CoeffFunction {
    normalize_psi(&CoeffFunction::constant(1, 0, GAMMA, c(1.0, 0.0))).unwrap()
}

fn bank(count: usize, seed: u64) -> Vec<CoeffFunction> {
    let mut rng = bergman::rng(seed);
    (0..count).map(|_| CoeffFunction::random(1, DEGREE, 4, GAMMA, &mut rng)).collect()
}

fn worst_error(eps: f64, boundary: f64, fibers: usize, psi: &CoeffFunction, terms: usize) -> (f64, f64, f64) {
    let l = build_lattice(eps, boundary, fibers, &disc()).unwrap();
    let model = FrameModel::new(&l, psi, DEGREE, 3).unwrap();
    let mut out = (0.0f64, 0.0f64, 0.0f64);
    for f in bank(3, 41) {
        let r = reconstruct(&model, &l, &f, 2.0, 2.0, terms, &disc()).unwrap();
        assert!(r.in_window);
        out = (out.0.max(r.rel_error), out.1.max(r.oracle_error), out.2.max(r.rho_hat));
    }
    out
}

#[test]
fn constant_vector_reconstruction() {
    let (err, oracle, rho) = worst_error(0.3, 0.99, 1, &one(), 8);
    assert!(err < 1e-2 && err <= 3.0 * oracle.max(1e-12) || err < 1e-8, "{err:e} vs oracle {oracle:e}");
    assert!(rho < 0.1);
}

#[test]
fn finer_lattices_reconstruct_better() {
    let errs: Vec<(f64, f64, f64)> = [0.6, 0.3, 0.15].iter().map(|&e| worst_error(e, 0.97, 1, &one(), 12)).collect();
    for w in errs.windows(2) {
        assert!(w[1].0 < w[0].0, "{errs:?}");
    }
}

#[test]
fn neumann_terms_improve_monotonically() {
    let l = build_lattice(0.3, 0.97, 1, &disc()).unwrap();
    let model = FrameModel::new(&l, &one(), DEGREE, 3).unwrap();
    for f in bank(2, 42) {
        let r = reconstruct(&model, &l, &f, 2.0, 2.0, 8, &disc()).unwrap();
        let e = &r.errors_by_terms;
        assert_eq!(e.len(), 9);
        for k in 1..e.len() {
            assert!(e[k] <= e[k - 1] + 1e-3 * e[0], "{e:?}");
        }
    }
}

#[test]
fn general_vector_on_fibered_lattice() {
    let psi = normalize_psi(&"poly:1,0,1".parse::<PsiSpec>().unwrap().build(1, 2, GAMMA).unwrap()).unwrap();
    let l = build_lattice(0.2, 0.81, default_fibers(0.2), &disc()).unwrap();
    assert!(l.len() <= 3000);
    let section = build_lattice(0.2, 0.81, 1, &disc()).unwrap();
    assert!(FrameModel::new(&section, &psi, DEGREE, 3).is_err());
    let model = FrameModel::new(&l, &psi, DEGREE, 3).unwrap();
    for f in bank(2, 43) {
        let r = reconstruct(&model, &l, &f, 2.0, 2.0, 8, &disc()).unwrap();
        assert!(r.rel_error < 5e-2, "{:e}", r.rel_error);
    }
}

#[test]
fn solid_norm_within_constants() {
    let l = build_lattice(0.3, 0.9, 1, &disc()).unwrap();
    assert_eq!(l.len(), 113);
    let mut rng = bergman::rng(44);
    let coeffs: Vec<Complex64> = (0..l.len()).map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
    for p in [1.0, 2.0, 4.0] {
        let s = solid_norm_check(&coeffs, &l, p, 2.0, GAMMA, 60, 160).unwrap();
        assert!(s.within, "p = {p}: {s:?}");
        assert!(s.overlap >= 1);
    }
    let fibered = build_lattice(0.3, 0.9, 4, &disc()).unwrap();
    assert!(solid_norm_check(&vec![c(1.0, 0.0); fibered.len()], &fibered, 2.0, 2.0, GAMMA, 8, 8).is_err());
}

#[test]
fn functionals_sum_to_the_integral() {
    // at γ = 4 the cocycle is trivial, so Σ λ̃_i(h^s) = ∫ h^s over the cells
    let l = build_lattice(0.3, 0.95, 1, &disc()).unwrap();
    let nodes = cell_nodes(&l, 6);
    for s in [2.5, 3.0, 4.0] {
        let values: Vec<Complex64> = nodes.points.iter().map(|y| c(y.h().powf(s), 0.0)).collect();
        let lam = analysis_functionals(&values, &nodes, &l, 4.0).unwrap();
        let total: Complex64 = lam.iter().sum();
        let ch = l.outer_radius.cosh();
        let exact = (1.0 - ch.powf(2.0 * (1.0 - s))) / (s - 1.0);
        assert!((total.re - exact).abs() < 1e-8 * exact && total.im.abs() < 1e-12, "s = {s}: {total} vs {exact}");
    }
}

#[test]
fn single_point_lattice() {
    let l = build_lattice(5.0, 0.9, 1, &disc()).unwrap();
    assert_eq!(l.len(), 1);
    let model = FrameModel::new(&l, &one(), DEGREE, 40).unwrap();
    let sv = model.t.clone().singular_values();
    assert!(sv.iter().filter(|s| **s > 1e-10 * sv[0]).count() == 1);
    // one cell of radius R: λ̃ = ∫ W_ψψ = ‖ψ‖²∫ h^{γ/2} dx = 4(1 − 1/cosh R)
    let f = one().with_degree(DEGREE);
    let lam = model.analysis(&f).unwrap();
    let exact = 4.0 * (1.0 - 1.0 / l.outer_radius.cosh());
    assert!((lam[0] - c(exact, 0.0)).norm() < 1e-9, "{} vs {exact}", lam[0]);
    // SF = λ̃·W_ψψ
    let at: Vec<Su11> = [(0.2, 0.1, 0.5), (-0.6, 0.3, -1.0)].iter().map(|&(a, b, t)| Su11::polar(c(a, b), t)).collect();
    let sf = s_apply(&lam, &l, &one(), &at).unwrap();
    for (y, v) in at.iter().zip(&sf) {
        assert!((v - lam[0] * wavelet_su11(&one(), &one(), y).unwrap()).norm() < 1e-12);
    }
    // f̂ = λ̃ f, so I − S is not a contraction on this example
    assert!(matches!(reconstruct(&model, &l, &f, 2.0, 2.0, 0, &disc()), Err(bergman::Error::NonContraction(_))));
}

#[test]
fn zero_function() {
    let l = build_lattice(0.6, 0.9, 1, &disc()).unwrap();
    let model = FrameModel::new(&l, &one(), DEGREE, 3).unwrap();
    let r = reconstruct(&model, &l, &CoeffFunction::zeros(1, DEGREE, GAMMA), 2.0, 2.0, 4, &disc()).unwrap();
    assert_eq!(r.rel_error, 0.0);
    assert!(r.lambda.iter().all(|x| *x == c(0.0, 0.0)));
}

#[test]
fn synthesis_ratio_is_stable() {
    let l = build_lattice(0.3, 0.93, 1, &disc()).unwrap();
    assert!((150..300).contains(&l.len()), "{}", l.len());
    let model = FrameModel::new(&l, &one(), DEGREE, 2).unwrap();
    let mut rng = bergman::rng(45);
    let ratios: Vec<f64> = (0..10)
        .map(|_| {
            let coeffs: Vec<Complex64> =
                (0..l.len()).map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
            synthesize(&coeffs, &model, &l, 2.0, 2.0).unwrap().1.ratio
        })
        .collect();
    let mut sorted = ratios.clone();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let median = sorted[5];
    assert!(ratios.iter().all(|r| *r > median / 2.0 && *r < 2.0 * median), "{ratios:?}");
    assert!(synthesize(&[c(1.0, 0.0)], &model, &l, 2.0, 2.0).is_err());
}

#[test]
fn coifman_rochberg_modulus() {
    // |atom| = h(w)^{gθ/(2p)}·|π_γ(x_w)1| with γ = (2α + gθ)/p
    let d = disc();
    let mut rng = bergman::rng(46);
    for _ in 0..20 {
        let (p, alpha, theta) = (rng.gen_range(1.0..4.0), rng.gen_range(1.5..4.0), rng.gen_range(0.0..2.0));
        let gamma = (2.0 * alpha + 2.0 * theta) / p;
        let z = Complex64::from_polar(rng.gen_range(0.0..0.5), rng.gen_range(-3.0..3.0));
        let w = Complex64::from_polar(rng.gen_range(0.0..0.5), rng.gen_range(-3.0..3.0));
        let atom = coifman_rochberg_atom(&[z], &[w], p, alpha, theta, &d);
        let unit = CoeffFunction::constant(1, 0, gamma, c(1.0, 0.0));
        let pi1 = apply_rep_series(&Su11::transvection(w), &unit, 90).unwrap().eval(&[z]);
        let hw = 1.0 - w.norm_sqr();
        let expected = hw.powf(theta / p) * pi1.norm();
        assert!((atom.norm() - expected).abs() < 1e-8 * expected, "{} vs {expected}", atom.norm());
    }
}

#[test]
fn lattice_json_rows() {
    let l = build_lattice(0.6, 0.9, 2, &disc()).unwrap();
    let rows: Vec<(f64, f64, f64, f64)> = serde_json::from_str(&l.to_json()).unwrap();
    assert_eq!(rows.len(), l.len());
    let mass: f64 = rows.iter().map(|r| r.3).sum();
    let expected: f64 = l.points.iter().map(|p| p.cell_mass).sum();
    assert!((mass - expected).abs() < 1e-12);
}

#[test]
fn direct_operator_matches_galerkin_model() {
    let psi = normalize_psi(&"poly:1,0.5".parse::<PsiSpec>().unwrap().build(1, 1, GAMMA).unwrap()).unwrap();
    let l = build_lattice(0.6, 0.8, 4, &disc()).unwrap();
    let model = FrameModel::new(&l, &psi, DEGREE, 2).unwrap();
    let f = bank(1, 47).remove(0);
    let lambda = model.analysis(&f).unwrap();
    let direct = analysis_functionals(&model.sample_wavelet(&f).unwrap(), &model.nodes, &l, GAMMA).unwrap();
    for (a, b) in lambda.iter().zip(&direct) {
        assert!((a - b).norm() < 1e-12 * (1.0 + a.norm()));
    }
    let tf = model.t_apply(&f).unwrap();
    let at: Vec<Su11> = [(0.1, 0.3, 0.0), (-0.3, 0.2, 1.0), (0.4, -0.1, -2.0)]
        .iter()
        .map(|&(a, b, t)| Su11::polar(c(a, b), t))
        .collect();
    let sf = s_apply(&lambda, &l, &psi, &at).unwrap();
    for (y, v) in at.iter().zip(&sf) {
        let w = wavelet_su11(&tf, &psi, y).unwrap();
        assert!((w - v).norm() < 1e-9 * (1.0 + v.norm()), "{w} vs {v}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn lattices_are_certified(eps in 0.25f64..0.9, boundary in 0.5f64..0.9, fibered in any::<bool>()) {
        let fibers = if fibered { default_fibers(eps) } else { 1 };
        let l = build_lattice(eps, boundary, fibers, &disc()).unwrap();
        let cert = certify_lattice(&l, 200, 5);
        prop_assert!(cert.partition_ok);
        prop_assert!(cert.cover_radius <= eps + 1e-12);
        prop_assert!(cert.min_mass > 0.0);
        prop_assert!(cert.mass_residual < 1e-10);
    }

    #[test]
    fn u_radius_of_polar_elements(r in 0.0f64..2.0, phi in -3.0f64..3.0, theta in -1.5f64..1.5) {
        let u = Su11::polar(Complex64::from_polar(r.tanh(), phi), theta);
        prop_assert!((u_radius(&u) - r.max(theta.abs())).abs() < 1e-9);
    }
}
