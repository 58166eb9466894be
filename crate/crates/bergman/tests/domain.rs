use bergman::domain::*;
use proptest::prelude::*;

fn q(n: i64) -> Q {
    Q::from_integer(n)
}

#[test]
fn windows_at_p_two() {
    // (kind, γ, lo, hi), hand-computed from (n, r, a, g)
    let table = [
        ("disc", 4, 1, 7),
        ("ball:2", 4, 2, 6),
        ("ball:3", 5, 3, 7),
        ("ball:4", 6, 4, 8),
        ("type1:2,2", 5, 4, 6),
        ("type1:3,3", 8, 7, 9),
    ];
    for (kind, gamma, lo, hi) in table {
        let d = make_domain(kind.parse().unwrap()).unwrap();
        let w = wavelet_window(q(2), q(gamma), &d).unwrap();
        let a = atom_window(q(2), q(gamma), &d).unwrap();
        assert_eq!((w.lo, w.hi), (q(lo), q(hi)), "{kind}");
        assert_eq!((a.lo, a.hi), (q(lo), q(hi)), "{kind}");
    }
}

#[test]
fn coifman_rochberg_ranges() {
    let range = |k: &str| coifman_rochberg_p_range(&make_domain(k.parse().unwrap()).unwrap());
    assert_eq!(range("disc"), None);
    assert_eq!(range("ball:3"), None);
    assert_eq!(range("type1:2,2"), Some(q(2)));
    assert_eq!(range("type1:3,3"), Some(Q::new(9, 5)));
    assert!(coifman_rochberg_p_range_f64(&make_domain(DomainKind::Disc).unwrap()).is_infinite());
}

#[test]
fn gamma_below_threshold_is_rejected() {
    let d = make_domain(DomainKind::TypeI(2, 2)).unwrap();
    // γ must exceed g − 1 + (r−1)a/2 = 4
    assert!(wavelet_window(q(2), q(4), &d).is_err());
    assert!(atom_window(q(2), Q::new(41, 10), &d).is_ok());
    assert!(wavelet_window(Q::new(1, 2), q(5), &d).is_err());
}

proptest! {
    #[test]
    fn type1_constants(p in 1u32..8, qq in 1u32..8) {
        let d = make_domain(DomainKind::TypeI(p, qq)).unwrap();
        let (p, qq) = (p as i64, qq as i64);
        prop_assert_eq!(d.n, p * qq);
        prop_assert_eq!(d.r, p.min(qq));
        prop_assert_eq!(d.g, q(p + qq));
        if d.r > 1 {
            prop_assert_eq!(d.a, q(2));
        }
        let back: DomainKind = DomainKind::TypeI(p as u32, qq as u32).to_string().parse().unwrap();
        prop_assert_eq!(back, DomainKind::TypeI(p as u32, qq as u32));
    }

    #[test]
    fn wavelet_and_atom_windows_coincide(p1 in 1u32..5, q1 in 1u32..5, pn in 2i64..30, gshift in 1i64..40) {
        let d = make_domain(DomainKind::TypeI(p1, q1)).unwrap();
        let p = Q::new(pn, 2);
        let gamma = d.g - q(1) + d.half_ra() + Q::new(gshift, 4);
        let w = wavelet_window(p, gamma, &d).unwrap();
        let a = atom_window(p, gamma, &d).unwrap();
        prop_assert_eq!(w, a);
        prop_assert!(w.nonempty());
        // the width grows linearly in p
        prop_assert_eq!(w.hi - w.lo, p * (gamma - d.g + q(1) - d.half_ra()));
    }
}
