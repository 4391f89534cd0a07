use proptest::prelude::*;

use trapdiff::fde::{self, FdeParams};
use trapdiff::specfun::{gauss_legendre, mainardi, mainardi_half};
use trapdiff::harness::builtin;

fn fig1a() -> FdeParams {
    FdeParams::from_transport(&builtin("fig1a").unwrap().transport)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn gauss_legendre_is_a_positive_rule_of_unit_mass(n in 1usize..80) {
        let q = gauss_legendre(n).unwrap();
        let total: f64 = q.weights().iter().sum();
        prop_assert!((total - 1.0).abs() < 1e-13);
        prop_assert!(q.nodes().iter().all(|&m| m > 0.0 && m < 1.0));
        prop_assert!(q.weights().iter().all(|&w| w > 0.0));
    }

    #[test]
    fn half_order_series_tracks_the_gaussian(z in 0.0f64..3.5) {
        let m = mainardi(0.5, z).unwrap();
        prop_assert!((m - mainardi_half(z)).abs() < 1e-10);
    }

    #[test]
    fn normal_diffusion_is_even_and_decreasing(x in 0.0f64..20.0, dx in 0.01f64..5.0, t in 1.0f64..500.0) {
        let p = fig1a();
        let u = fde::normal_diffusion(&p, x, t).unwrap();
        prop_assert_eq!(u, fde::normal_diffusion(&p, -x, t).unwrap());
        prop_assert!(fde::normal_diffusion(&p, x + dx, t).unwrap() < u);
    }

    #[test]
    fn fractional_profile_is_positive_and_decreasing(x in 0.0f64..8.0, t in 5.0f64..200.0) {
        let p = fig1a();
        let near = fde::u_de_half(&p, x, t, 1e-9).unwrap();
        let far = fde::u_de_half(&p, x + 0.5, t, 1e-9).unwrap();
        prop_assert!(far > 0.0 && far < near);
    }
}
