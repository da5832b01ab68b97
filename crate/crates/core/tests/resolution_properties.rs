use num_bigint::BigInt;
use proptest::prelude::*;
use toric_vanishing::fans::{resolve, star_subdivide, validate_refinement};
use toric_vanishing::{Cone, Lattice};

fn cone_strategy() -> impl Strategy<Value = Cone> {
    (2usize..=3)
        .prop_flat_map(|n| (Just(n), prop::collection::vec(prop::collection::vec(-3i64..=3, n), n..=n + 1)))
        .prop_filter_map("not a valid cone of small multiplicity", |(n, rays)| {
            let rays: Vec<Lattice> = rays.into_iter().map(|r| r.into_iter().map(BigInt::from).collect()).collect();
            let c = Cone::new(n, rays).ok()?;
            let profile = c.classify().ok()?;
            match profile.multiplicity {
                Some(m) if m > BigInt::from(12) => None,
                _ => Some(c),
            }
        })
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 40, ..ProptestConfig::default() })]

    #[test]
    fn resolve_is_smooth_and_keeps_support(sigma in cone_strategy()) {
        let fan = resolve(&sigma, false).unwrap();
        let profile = validate_refinement(&sigma, &fan).unwrap();
        prop_assert!(profile.smooth);
        prop_assert!(fan.is_smooth());
        for (i, ray) in sigma.rays().iter().enumerate() {
            prop_assert_eq!(&fan.rays()[i], ray);
        }
    }

    #[test]
    fn strong_resolution_has_z_equal_to_singular_locus(sigma in cone_strategy()) {
        if let Ok(fan) = resolve(&sigma, true) {
            let profile = validate_refinement(&sigma, &fan).unwrap();
            prop_assert!(profile.strong);
            prop_assert_eq!(profile.codim_z, sigma.classify().unwrap().codim_sing);
        }
    }

    #[test]
    fn subdividing_at_the_ray_sum_keeps_support(sigma in cone_strategy()) {
        let n = sigma.ambient_rank();
        let mut sum = vec![BigInt::from(0); n];
        for r in sigma.rays() {
            for (s, x) in sum.iter_mut().zip(r) {
                *s += x;
            }
        }
        let g = sum.iter().fold(BigInt::from(0), |g, x| num_integer::Integer::gcd(&g, x));
        let point: Lattice = sum.iter().map(|x| x / &g).collect();
        let fan = star_subdivide(&toric_vanishing::Fan::face_fan(&sigma), &point).unwrap();
        let profile = validate_refinement(&sigma, &fan).unwrap();
        prop_assert_eq!(fan.rays().len(), sigma.ray_count() + 1);
        prop_assert_eq!(profile.exceptional_rays, vec![sigma.ray_count()]);
    }
}
