mod common;

use std::collections::BTreeSet;

use common::{open_from_mask, star_of, surfaces};
use proptest::prelude::*;

use cutpaste::site::{
    compose, enumerate_simple_covers, localization_square, validate_square, SitePresentation, SiteObject, SpanMorphism,
};
use cutpaste::toric::{barycentric_ray, star_subdivide, ToricObject};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    /// `Z ↪ Y → X ⤏ U` through a blowup.
    #[test]
    fn composition_is_associative_and_unital(f in surfaces(), k in 0usize..64, mask in any::<u64>(), zmask in any::<u64>(), zc in 0usize..64) {
        let twos: Vec<usize> = (0..f.num_cones()).filter(|&c| f.cone(c).dim() == 2).collect();
        let s = star_subdivide(&f, &barycentric_ray(&f, twos[k % twos.len()])).unwrap();
        let x = ToricObject::whole(f.clone());
        let y = s.square.y.as_toric().unwrap().clone();
        let z = star_of(&s.fan, zc).intersect(&open_from_mask(&s.fan, zmask).closure()).unwrap();
        let u = open_from_mask(&f, mask);

        let ff = SpanMorphism::inclusion(&z, &y).unwrap();
        let g = s.square.p.clone();
        let h = SpanMorphism::restriction(&x, &u).unwrap();

        let left = compose(&compose(&h, &g).unwrap(), &ff).unwrap();
        let right = compose(&h, &compose(&g, &ff).unwrap()).unwrap();
        prop_assert_eq!(left.key(), right.key());
        prop_assert_eq!(&left, &right);

        for m in [&ff, &g, &h] {
            let src = SpanMorphism::identity(&m.source());
            let tgt = SpanMorphism::identity(&m.target());
            prop_assert_eq!(&compose(m, &src).unwrap(), m);
            prop_assert_eq!(&compose(&tgt, m).unwrap(), m);
            let z_in = SpanMorphism::zero(&m.target(), &m.target()).unwrap();
            let z_out = SpanMorphism::zero(&m.source(), &m.source()).unwrap();
            prop_assert!(compose(&z_in, m).unwrap().is_zero());
            prop_assert!(compose(m, &z_out).unwrap().is_zero());
        }
    }

    #[test]
    fn localization_squares_validate(f in surfaces(), mask in any::<u64>(), c in 0usize..64) {
        let x = ToricObject::whole(f.clone());
        let u = open_from_mask(&f, mask);
        prop_assert!(validate_square(&localization_square(&x, &u).unwrap()).passed());
        // Inside a closed star the open need not be dense.
        let star = star_of(&f, c);
        let inner = u.intersect(&star).unwrap();
        if inner.is_open_in(&star) && !inner.is_empty() {
            prop_assert!(validate_square(&localization_square(&star, &inner).unwrap()).passed());
        }
    }

    #[test]
    fn cover_enumeration_is_monotone(f in surfaces(), k in 0usize..64) {
        let twos: Vec<usize> = (0..f.num_cones()).filter(|&c| f.cone(c).dim() == 2).collect();
        let s = star_subdivide(&f, &barycentric_ray(&f, twos[k % twos.len()])).unwrap();
        let mut site = SitePresentation::new();
        site.add_square(s.square.clone());
        let x: SiteObject = ToricObject::whole(f.clone()).into();
        let mut prev: BTreeSet<String> = BTreeSet::new();
        for d in 0..=3 {
            let covers = enumerate_simple_covers(&site, &x, d);
            let keys: BTreeSet<String> = covers.iter().map(|c| c.key()).collect();
            prop_assert!(prev.is_subset(&keys));
            for c in &covers {
                prop_assert_eq!(c.is_jointly_surjective(), Some(true));
                prop_assert!(c.replays());
            }
            prev = keys;
        }
        prop_assert!(prev.len() >= 2);
    }
}
