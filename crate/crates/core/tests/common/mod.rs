#![allow(dead_code)]

use std::collections::BTreeSet;
use std::sync::Arc;

use proptest::prelude::*;

use cutpaste::kring::VarietyExpr;
use cutpaste::toric::{barycentric_ray, star_subdivide, Fan, ToricObject};

pub fn builtin(name: &str) -> Arc<Fan> {
    Arc::new(Fan::builtin(name).unwrap())
}

/// A smooth complete surface: P2 or P1xP1 blown up at torus-fixed points
/// chosen by `picks`.
pub fn surface(p2: bool, picks: &[usize]) -> Arc<Fan> {
    let mut f = builtin(if p2 { "P2" } else { "P1xP1" });
    for &k in picks {
        let twos: Vec<usize> = (0..f.num_cones()).filter(|&c| f.cone(c).dim() == 2).collect();
        let c = twos[k % twos.len()];
        f = star_subdivide(&f, &barycentric_ray(&f, c)).unwrap().fan;
    }
    f
}

pub fn surfaces() -> impl Strategy<Value = Arc<Fan>> {
    (any::<bool>(), prop::collection::vec(0usize..64, 0..4)).prop_map(|(p2, picks)| surface(p2, &picks))
}

/// Faces of the maximal cones selected by `mask`; never empty.
pub fn open_from_mask(f: &Arc<Fan>, mask: u64) -> ToricObject {
    let maximal = f.maximal_ids();
    let mut chosen: Vec<usize> = maximal.iter().enumerate().filter(|(i, _)| mask >> (i % 64) & 1 == 1).map(|(_, &m)| m).collect();
    if chosen.is_empty() {
        chosen.push(maximal[0]);
    }
    let ids: BTreeSet<usize> = chosen.iter().flat_map(|&m| f.faces_of(m)).collect();
    ToricObject::new(f.clone(), ids).unwrap()
}

/// The closed star of a cone.
pub fn star_of(f: &Arc<Fan>, cone: usize) -> ToricObject {
    ToricObject::new(f.clone(), f.star(cone % f.num_cones()).into_iter().collect()).unwrap()
}

/// An open minus a closed star: locally closed, possibly empty.
pub fn locally_closed(f: &Arc<Fan>, mask: u64, cone: usize) -> ToricObject {
    open_from_mask(f, mask).minus(&star_of(f, cone)).unwrap()
}

pub fn exprs() -> impl Strategy<Value = VarietyExpr> {
    let leaf = prop_oneof![
        (-3i64..=3).prop_map(VarietyExpr::int),
        Just(VarietyExpr::Lefschetz),
        prop::sample::select(vec!["pt", "empty", "A1", "A2", "A3", "P1", "P2", "P3", "Gm"]).prop_map(VarietyExpr::gen),
    ];
    leaf.prop_recursive(4, 24, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| VarietyExpr::sum(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| VarietyExpr::diff(a, b)),
            (inner.clone(), inner).prop_map(|(a, b)| VarietyExpr::prod(a, b)),
        ]
    })
}
