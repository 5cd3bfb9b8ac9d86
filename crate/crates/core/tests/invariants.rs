use dlpad::asymptotics::{h_scaling, k0_tilde, kappa_star};
use dlpad::cgf::{activity, cgf, critical_cumulant, mean_activity};
use dlpad::mc::{simulate, McConfig};
use dlpad::model::{critical_point, dispersion};
use dlpad::oracles::{build_sector_hamiltonian, cgf_from_ed, fd_cumulants};
use dlpad::{ModelParams, Sector};
use proptest::prelude::*;

fn sector() -> impl Strategy<Value = Sector> {
    prop_oneof![Just(Sector::Even), Just(Sector::Odd)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn formula_matches_ed(w in 0.1f64..2.0, mu in 0.05f64..2.0, s in -1.5f64..1.0, half in 1usize..=4, sec in sector()) {
        let p = ModelParams::new(w, mu).unwrap();
        let size = 2 * half;
        let k = cgf(&p, s, size, sec).unwrap();
        let e = cgf_from_ed(&p, s, size, sec).unwrap();
        prop_assert!((k - e).abs() < 1e-11 * (1.0 + k.abs()), "{k} vs {e}");
    }

    #[test]
    fn conservation_at_zero_tilt(w in 0.01f64..5.0, mu in 0.01f64..5.0, half in 1usize..200, sec in sector()) {
        let p = ModelParams::new(w, mu).unwrap();
        prop_assert!(cgf(&p, 0.0, 2 * half, sec).unwrap().abs() < 1e-12 * (w + mu).max(1.0));
    }

    #[test]
    fn cgf_is_convex_and_activity_positive(nu in 0.0f64..0.99, s in -2.0f64..1.0, half in 2usize..64) {
        let p = ModelParams::from_nu(nu).unwrap();
        let size = 2 * half;
        let h = 1e-3;
        let (a, b, c) = (cgf(&p, s - h, size, Sector::Even).unwrap(), cgf(&p, s, size, Sector::Even).unwrap(), cgf(&p, s + h, size, Sector::Even).unwrap());
        prop_assert!(a + c - 2.0 * b >= -1e-12);
        prop_assert!(activity(&p, s, size, Sector::Even).unwrap() > 0.0);
    }

    #[test]
    fn activity_is_cgf_derivative(nu in 0.1f64..0.95, s in -1.0f64..0.5, half in 1usize..8, sec in sector()) {
        let p = ModelParams::from_nu(nu).unwrap();
        let size = 2 * half;
        let fd = fd_cumulants(&p, size, s, 1, sec).unwrap();
        let a = activity(&p, s, size, sec).unwrap();
        prop_assert!((a - fd.value).abs() < 1e-9, "{a} vs {}", fd.value);
    }

    #[test]
    fn dispersion_mirror_symmetry(nu in 0.0f64..0.99, s in -1.0f64..1.0, half in 1usize..32, sec in sector()) {
        let p = ModelParams::from_nu(nu).unwrap();
        let size = 2 * half;
        for r in 1..size {
            let a = dispersion(&p, s, size, r, sec).unwrap();
            let b = match sec {
                Sector::Even => dispersion(&p, s, size, size - 1 - r, sec).unwrap(),
                Sector::Odd => dispersion(&p, s, size, size - r, sec).unwrap(),
            };
            prop_assert!((a - b).abs() <= 1e-14 * a.abs().max(1.0));
        }
    }

    #[test]
    fn hamiltonian_is_symmetric(nu in 0.0f64..0.99, s in -1.0f64..1.0, half in 1usize..=4, sec in sector()) {
        let p = ModelParams::from_nu(nu).unwrap();
        let h = build_sector_hamiltonian(&p, s, 2 * half, sec).unwrap();
        prop_assert!(h.asymmetry() < 1e-14);
        prop_assert_eq!(h.dim(), 1 << (2 * half - 1));
    }

    #[test]
    fn collapse_vanishes_at_origin(nu in 0.1f64..0.95, half in 4usize..64) {
        prop_assert_eq!(k0_tilde(nu, 2 * half, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn limit_curve_is_even(u in 0.0f64..4.0) {
        let a = h_scaling(u, 1e-13).unwrap();
        let b = h_scaling(-u, 1e-13).unwrap();
        prop_assert_eq!(a, b);
        prop_assert!(a <= 0.0);
    }
}

#[test]
fn first_cumulant_is_critical_activity() {
    for &nu in &[0.2, 0.6, 0.9] {
        let p = ModelParams::from_nu(nu).unwrap();
        let sc = critical_point(&p).unwrap();
        for &size in &[8, 64, 512] {
            let a = critical_cumulant(nu, size, 1).unwrap();
            let b = mean_activity(&p, sc, size).unwrap();
            assert!((a - b).abs() < 1e-14, "{a} vs {b}");
        }
    }
}

#[test]
fn fourth_cumulant_sign_follows_coefficient() {
    for &nu in &[0.3, 0.7, 0.9] {
        let k = critical_cumulant(nu, 2048, 4).unwrap();
        assert_eq!(k.signum(), kappa_star(4, nu).unwrap().signum());
    }
}

#[test]
fn monte_carlo_is_reproducible() {
    let p = ModelParams::from_nu(0.5).unwrap();
    let cfg = McConfig::new(16, 50.0, 11, 3);
    let a = simulate(&p, &cfg).unwrap();
    let b = simulate(&p, &cfg).unwrap();
    assert_eq!(a, b);
    let c = simulate(&p, &McConfig::new(16, 50.0, 12, 3)).unwrap();
    assert_ne!(a, c);
}
