mod common;

use common::{exprs, locally_closed, open_from_mask, surfaces};
use num_bigint::BigInt;
use proptest::prelude::*;

use cutpaste::csupport::{
    additivity_check, extend_measure, independence_check, CompactificationProvider, MeasureOnCompacts, ToricCompletion,
};
use cutpaste::kring::{normalize, RelationSet, VarietyExpr};
use cutpaste::measures::{apply_measure, MeasureSpec};
use cutpaste::site::SiteObject;
use cutpaste::toric::ToricObject;

fn specs() -> impl Strategy<Value = MeasureSpec> {
    prop::sample::select(vec![
        MeasureSpec::Euler,
        MeasureSpec::EPoly,
        MeasureSpec::VirtualPoincare,
        MeasureSpec::PointCount(2),
        MeasureSpec::PointCount(4),
        MeasureSpec::PointCount(5),
    ])
}

proptest! {
    #[test]
    fn measures_are_ring_maps(spec in specs(), a in exprs(), b in exprs()) {
        let rels = RelationSet::new();
        let (ca, cb) = (normalize(&a, &rels).unwrap(), normalize(&b, &rels).unwrap());
        let (ma, mb) = (apply_measure(spec, &ca).unwrap(), apply_measure(spec, &cb).unwrap());
        prop_assert_eq!(apply_measure(spec, &(&ca + &cb)).unwrap(), ma.add(&mb).unwrap());
        prop_assert_eq!(apply_measure(spec, &(&ca - &cb)).unwrap(), ma.sub(&mb).unwrap());
        prop_assert_eq!(apply_measure(spec, &(&ca * &cb)).unwrap(), ma.mul(&mb).unwrap());
    }

    #[test]
    fn e_poly_specializes_to_point_counts(a in exprs()) {
        let c = normalize(&a, &RelationSet::new()).unwrap();
        let e = apply_measure(MeasureSpec::EPoly, &c).unwrap();
        for q in 2..=5u64 {
            let count = apply_measure(MeasureSpec::PointCount(q), &c).unwrap();
            prop_assert_eq!(Some(&e.specialize(&BigInt::from(q)).unwrap()), count.as_integer());
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn extension_agrees_with_the_class(f in surfaces(), mask in any::<u64>(), cone in 0usize..64, spec in specs()) {
        let o = locally_closed(&f, mask, cone);
        let phi = MeasureOnCompacts::builtin(spec);
        let r = extend_measure(&phi, &o.clone().into(), &CompactificationProvider::default()).unwrap();
        prop_assert_eq!(&r.value, &apply_measure(spec, &o.class()).unwrap());
        prop_assert!(r.cross_check != Some(false));
        prop_assert!(r.depth as i64 <= o.dim() + 1);
        prop_assert!(r.trace.iter().all(|s| s.depth <= r.depth));
    }

    #[test]
    fn additivity_in_random_surfaces(f in surfaces(), mask in any::<u64>(), spec in specs()) {
        let x: SiteObject = ToricObject::whole(f.clone()).into();
        let u: SiteObject = open_from_mask(&f, mask).into();
        let phi = MeasureOnCompacts::builtin(spec);
        let r = additivity_check(&phi, &x, &u, &CompactificationProvider::default()).unwrap();
        prop_assert!(r.holds, "{} vs {}", r.lhs, r.rhs);
    }

    #[test]
    fn completions_do_not_matter(f in surfaces(), mask in any::<u64>(), spec in specs()) {
        let open = open_from_mask(&f, mask);
        let own = ToricObject::whole(std::sync::Arc::new(f.subfan(open.cone_ids()))).into();
        let auto = CompactificationProvider::default();
        let alt = CompactificationProvider::new(ToricCompletion::Alternative);
        let (a, b) = match (auto.compactify(&own), alt.compactify(&own)) {
            (Ok(a), Ok(b)) => (a, b),
            _ => return Ok(()),
        };
        let phi = MeasureOnCompacts::builtin(spec);
        prop_assert!(independence_check(&phi, &own, &a, &b, &auto).unwrap().holds);
    }
}

#[test]
fn empty_and_point() {
    for spec in MeasureSpec::builtins() {
        let zero = apply_measure(spec, &normalize(&VarietyExpr::gen("empty"), &RelationSet::new()).unwrap()).unwrap();
        assert!(zero.is_zero());
        let one = apply_measure(spec, &normalize(&VarietyExpr::gen("pt"), &RelationSet::new()).unwrap()).unwrap();
        assert_eq!(one, spec.one());
    }
}
