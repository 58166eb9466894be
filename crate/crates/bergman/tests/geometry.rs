use bergman::geometry::*;
use bergman::Complex64;
use proptest::prelude::*;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

#[test]
fn identity_suite_disc_and_ball() {
    for n in [1, 2] {
        let r = identity_residuals(n, 1000, 11);
        for (name, v) in [
            ("reciprocity", r.reciprocity),
            ("kernel transform", r.kernel_transform),
            ("h inverse", r.h_inverse),
            ("chain rule", r.chain_rule),
            ("two-point h", r.h_two_point),
            ("biinvariance", r.h_biinvariance),
            ("composition", r.composition),
        ] {
            assert!(v < 1e-10, "n = {n}: {name} residual {v:e}");
        }
    }
}

#[test]
fn h_ratio_on_u_eps_is_uniform() {
    // the ratio stays inside [e^{−2ε}, e^{2ε}] whatever the base point
    let bound = (2.0f64 * 0.3).exp();
    for (n, seed) in [(1, 1), (1, 2), (2, 3)] {
        let (lo, hi) = identity_residuals(n, 10, seed).h_ratio_range;
        assert!(lo >= 1.0 / bound - 1e-12 && hi <= bound + 1e-12, "{lo} {hi}");
        assert!(lo < 0.7 && hi > 1.4);
    }
}

#[test]
fn su11_matches_matrix_group() {
    let mut rng = bergman::rng(4);
    for _ in 0..50 {
        let x = GroupElement::random(1, 0.9, &mut rng);
        let y = GroupElement::random(1, 0.9, &mut rng);
        let (sx, sy) = (Su11::from_group(&x).unwrap(), Su11::from_group(&y).unwrap());
        let z = c(0.2, -0.5);
        assert!((sx.act(z) - x.act(&[z]).unwrap()[0]).norm() < 1e-13);
        assert!((sx.log_jacobian(z) - x.log_jacobian(&[z])).norm() < 1e-12);
        assert!((sigma_su11(&sx, &sy, 2.5) - cocycle_sigma(&x, &y, 2.5)).norm() < 1e-12);
    }
}

#[test]
fn worked_values() {
    let x = GroupElement::transvection(&[c(0.6, 0.0)]).unwrap();
    assert!((x.jacobian(&[c(0.0, 0.0)]).unwrap() - c(0.64, 0.0)).norm() < 1e-14);
    assert!((h_point(&[c(0.3, 0.0), c(0.0, 0.4)], &[c(0.3, 0.0), c(0.0, 0.4)]) - c(0.75, 0.0)).norm() < 1e-15);
    let half = GroupElement::transvection(&[c(0.5, 0.0)]).unwrap();
    assert!((h_group(&half, &GroupElement::identity(1)) - 0.75).abs() < 1e-15);
}

proptest! {
    #[test]
    fn cocycle_is_unimodular(seed in 0u64..10_000, gamma in 0.5f64..6.0) {
        let mut rng = bergman::rng(seed);
        let x = GroupElement::random(1, 0.95, &mut rng);
        let y = GroupElement::random(1, 0.95, &mut rng);
        prop_assert!((cocycle_sigma(&x, &y, gamma).norm() - 1.0).abs() < 1e-10);
        // γ/g = 2 makes σ an exact power of J-ratios that multiply to 1
        prop_assert!((cocycle_sigma(&x, &y, 4.0) - c(1.0, 0.0)).norm() < 1e-10);
        prop_assert!((cocycle_sigma(&GroupElement::identity(1), &y, gamma) - c(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn action_stays_inside(seed in 0u64..10_000, n in 1usize..4) {
        let mut rng = bergman::rng(seed);
        let x = GroupElement::random(n, 0.99, &mut rng);
        let z = random_point(n, 0.99, &mut rng);
        let xz = x.act(&z).unwrap();
        prop_assert!(norm2(&xz) < 1.0);
        prop_assert!(x.form_residual() < 1e-10);
        let back = x.inverse().act(&xz).unwrap();
        let err: f64 = back.iter().zip(&z).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        prop_assert!(err < 1e-9);
    }

    #[test]
    fn h_is_symmetric(seed in 0u64..10_000) {
        let mut rng = bergman::rng(seed);
        let x = GroupElement::random(2, 0.95, &mut rng);
        let y = GroupElement::random(2, 0.95, &mut rng);
        let (a, b) = (h_group(&x, &y), h_group(&y, &x));
        prop_assert!(a > 0.0 && (a - b).abs() < 1e-12);
    }
}
