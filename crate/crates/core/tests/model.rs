mod common;

use common::{base, fraction, grws, neg_unit, params, q, unit};
use grws_core::model::{classify, Sector};
use grws_core::transforms::reciprocal;
use grws_core::Rational;
use num_traits::{One, Zero};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn moment_ratio_is_weight(params in params()) {
        for n in 0..16 {
            prop_assert_eq!(params.moment(n + 1) / params.moment(n), params.weight_sq(n));
        }
    }

    #[test]
    fn diagonal_is_unweighted(p in base(), n in unit()) {
        let params = grws(p, n.clone(), n);
        prop_assert!(params.on_diagonal());
        for i in 0..16 {
            prop_assert!(params.weight_sq(i).is_one());
        }
    }

    #[test]
    fn classification_is_radial(params in params(), t in fraction()) {
        let scaled = grws(params.p().clone(), params.N() * &t, params.D() * &t);
        prop_assert_eq!(classify(&params, 0).sectors, classify(&scaled, 0).sectors);
    }

    #[test]
    fn reflection_inverts_weights(params in params()) {
        let flipped = reciprocal(&params);
        prop_assert_eq!(flipped.N(), params.D());
        for n in 0..16 {
            prop_assert!((params.weight_sq(n) * flipped.weight_sq(n)).is_one());
        }
    }

    #[test]
    fn negative_diagonal_is_shared(p in base(), n in neg_unit()) {
        let label = classify(&grws(p, n.clone(), n), 8);
        prop_assert!(label.contains(Sector::I) && label.contains(Sector::VIII));
        prop_assert_eq!(label.special_ray_k, Some(0));
    }

    #[test]
    fn every_point_has_a_sector(params in params()) {
        prop_assert!(!classify(&params, 0).sectors.is_empty());
    }
}

#[test]
fn origin_touches_every_sector() {
    let label = classify(&grws(q(2, 1), Rational::zero(), Rational::zero()), 0);
    assert_eq!(label.sectors.len(), 8);
}

#[test]
fn ray_depth_bounds_the_search() {
    let params = grws(q(2, 1), q(1, 64), q(1, 2));
    assert_eq!(classify(&params, 4).special_ray_k, None);
    assert_eq!(classify(&params, 5).special_ray_k, Some(5));
}
