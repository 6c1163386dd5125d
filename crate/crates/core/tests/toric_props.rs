mod common;

use std::collections::BTreeSet;
use std::sync::Arc;

use common::{builtin, open_from_mask, surfaces};
use num_bigint::BigInt;
use proptest::prelude::*;

use cutpaste::kring::{verify_square_relation, RelationSet};
use cutpaste::measures::{apply_measure, MeasureSpec};
use cutpaste::toric::{complete, complete_surface, fan_properties, Fan, ToricObject};

/// `Σ_σ (q-1)^(n - dim σ)` over the given cones.
fn orbit_count(f: &Fan, ids: &BTreeSet<usize>, q: u32) -> BigInt {
    ids.iter().map(|&c| BigInt::from(q - 1).pow((f.rank() - f.cone(c).dim()) as u32)).sum()
}

/// Coefficients of `1, L, L^2, ...` in a Lefschetz polynomial class.
fn lefschetz_coeffs(o: &ToricObject) -> Vec<BigInt> {
    let p = o.class().as_lefschetz_poly().expect("toric classes are Lefschetz polynomials");
    p.coeffs().to_vec()
}

/// `h_k` from face numbers, rank at most 3, written out by hand.
fn h_by_hand(f: &Fan) -> Vec<BigInt> {
    let fv = f.face_numbers();
    let v: Vec<i64> = match f.rank() {
        1 => vec![fv[1] as i64 - 1, 1],
        2 => vec![1, fv[1] as i64 - 2, 1],
        3 => {
            let (f1, f2, f3) = (fv[1] as i64, fv[2] as i64, fv[3] as i64);
            vec![f3 - f2 + f1 - 1, f2 - 2 * f1 + 3, f1 - 3, 1]
        }
        _ => unreachable!(),
    };
    // Reversal is harmless: complete simplicial h-vectors are palindromic.
    v.into_iter().rev().map(BigInt::from).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn orbit_count_matches_class(f in surfaces(), mask in any::<u64>()) {
        let whole = ToricObject::whole(f.clone());
        let open = open_from_mask(&f, mask);
        for o in [&whole, &open] {
            let e = apply_measure(MeasureSpec::EPoly, &o.class()).unwrap();
            for q in 2..=5u32 {
                prop_assert_eq!(e.specialize(&BigInt::from(q)).unwrap(), orbit_count(&f, o.cone_ids(), q));
            }
        }
    }

    #[test]
    fn class_is_additive(f in surfaces(), mask in any::<u64>()) {
        let whole = ToricObject::whole(f.clone());
        let open = open_from_mask(&f, mask);
        let rest = whole.minus(&open).unwrap();
        prop_assert!(rest.is_closed());
        prop_assert_eq!(whole.class(), &open.class() + &rest.class());
    }

    #[test]
    fn subdivision_squares_satisfy_the_relation(f in surfaces(), k in 0usize..64) {
        let twos: Vec<usize> = (0..f.num_cones()).filter(|&c| f.cone(c).dim() == 2).collect();
        let c = twos[k % twos.len()];
        let s = cutpaste::toric::star_subdivide(&f, &cutpaste::toric::barycentric_ray(&f, c)).unwrap();
        prop_assert!(verify_square_relation(&s.square, &RelationSet::new()).unwrap().holds);
        prop_assert!(cutpaste::site::validate_square(&s.square).passed());
    }

    #[test]
    fn completion_is_complete_and_keeps_cones(f in surfaces(), mask in any::<u64>()) {
        let open = open_from_mask(&f, mask);
        let sub = f.subfan(open.cone_ids());
        let done = complete_surface(&sub).unwrap();
        prop_assert!(fan_properties(&done).complete);
        for c in sub.cones() {
            prop_assert!(done.find_cone(&sub.cone_vectors(c)).is_some());
        }
    }

    #[test]
    fn smooth_complete_classes_are_h_vectors(f in surfaces(), three in any::<bool>()) {
        let f = if three { Arc::new(f.product(&builtin("P1"))) } else { f };
        let o = ToricObject::whole(f.clone());
        let coeffs = lefschetz_coeffs(&o);
        prop_assert!(coeffs.iter().all(|c| c >= &BigInt::from(0)));
        prop_assert_eq!(coeffs, h_by_hand(&f));
    }
}

#[test]
fn products_of_opens_complete() {
    let a = open_from_mask(&common::surface(true, &[0, 3]), 0b101);
    let b = open_from_mask(&builtin("F2"), 0b1);
    let p = a.product(&b);
    let done = complete(p.fan()).unwrap();
    assert!(done.is_complete());
    assert_eq!(done.rank(), 4);
}
