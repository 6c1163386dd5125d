//! Simple covers and the c-completeness instance check.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use serde::Serialize;

use super::object::SiteObject;
use super::presentation::SitePresentation;
use super::span::{carrier, compose, is_proper, SpanMorphism, ToricSpan};
use super::square::{localization_square, validate_square, DistinguishedSquare, SquareKind};
use crate::error::Result;
use crate::toric::{lattice, star_subdivide, Fan, ToricObject};

pub const DEFAULT_DEPTH: usize = 3;

/// Derivation of a simple cover: rule (i) is `Identity`; rule (ii)
/// combines covers of `Y` and `C` through `p` and `i`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum CoverTree {
    Identity,
    Square {
        square: Arc<DistinguishedSquare>,
        over_y: Box<CoverTree>,
        over_c: Box<CoverTree>,
    },
}

impl CoverTree {
    pub fn height(&self) -> usize {
        match self {
            CoverTree::Identity => 0,
            CoverTree::Square { over_y, over_c, .. } => 1 + over_y.height().max(over_c.height()),
        }
    }

    /// The family of morphisms into `root` described by the tree.
    pub fn leaves(&self, root: &SiteObject) -> Result<Vec<SpanMorphism>> {
        match self {
            CoverTree::Identity => Ok(vec![SpanMorphism::identity(root)]),
            CoverTree::Square { square, over_y, over_c } => {
                let mut out = Vec::new();
                for m in over_y.leaves(&square.y)? {
                    out.push(compose(&square.p, &m)?);
                }
                for m in over_c.leaves(&square.c)? {
                    out.push(compose(&square.i, &m)?);
                }
                Ok(out)
            }
        }
    }

    fn squares(&self, out: &mut Vec<String>) {
        if let CoverTree::Square { square, over_y, over_c } = self {
            out.push(format!("{square:?}"));
            over_y.squares(out);
            over_c.squares(out);
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimpleCover {
    pub root: SiteObject,
    pub tree: CoverTree,
    pub leaves: Vec<SpanMorphism>,
}

impl SimpleCover {
    pub fn identity(root: &SiteObject) -> Self {
        Self {
            root: root.clone(),
            tree: CoverTree::Identity,
            leaves: vec![SpanMorphism::identity(root)],
        }
    }

    pub fn from_tree(root: &SiteObject, tree: CoverTree) -> Result<Self> {
        let leaves = tree.leaves(root)?;
        Ok(Self {
            root: root.clone(),
            tree,
            leaves,
        })
    }

    /// The cover of a single square: `{i, p}`.
    pub fn of_square(sq: &DistinguishedSquare) -> Result<Self> {
        Self::from_tree(
            &sq.x,
            CoverTree::Square {
                square: Arc::new(sq.clone()),
                over_y: Box::new(CoverTree::Identity),
                over_c: Box::new(CoverTree::Identity),
            },
        )
    }

    pub fn depth(&self) -> usize {
        self.tree.height()
    }

    /// Deduplication key: the sorted multiset of leaf keys.
    pub fn key(&self) -> String {
        let mut keys: Vec<String> = self.leaves.iter().map(SpanMorphism::key).collect();
        keys.sort();
        keys.join(" ; ")
    }

    /// Replays the tree and compares with the stored family.
    pub fn replays(&self) -> bool {
        self.tree.leaves(&self.root).is_ok_and(|l| l == self.leaves)
    }

    /// Whether the images of the leaves exhaust the orbits of the root.
    /// `None` off the toric backend.
    pub fn is_jointly_surjective(&self) -> Option<bool> {
        let root = self.root.as_toric()?;
        let mut hit = BTreeSet::new();
        for l in &self.leaves {
            hit.extend(l.as_toric()?.image());
        }
        Some(root.cone_ids().iter().all(|c| hit.contains(c)))
    }

    pub fn describe(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.tree.squares(&mut out);
        out
    }
}

/// All simple covers of `obj` of height at most `depth` built from the
/// squares of `site`, deduplicated by leaf family and sorted by
/// (depth, key). Families whose composites need an undeclared pullback are
/// skipped.
pub fn enumerate_simple_covers(site: &SitePresentation, obj: &SiteObject, depth: usize) -> Vec<SimpleCover> {
    let mut memo = BTreeMap::new();
    let mut covers = trees(site, obj, depth, &mut memo);
    covers.sort_by(|a, b| a.depth().cmp(&b.depth()).then_with(|| a.key().cmp(&b.key())));
    covers
}

fn trees(
    site: &SitePresentation,
    obj: &SiteObject,
    depth: usize,
    memo: &mut BTreeMap<(String, usize), Vec<SimpleCover>>,
) -> Vec<SimpleCover> {
    let mk = (obj.key(), depth);
    if let Some(v) = memo.get(&mk) {
        return v.clone();
    }
    let mut seen = BTreeMap::new();
    let id = SimpleCover::identity(obj);
    seen.insert(id.key(), id);
    if depth > 0 {
        for sq in site.squares_over(obj) {
            let ys = trees(site, &sq.y, depth - 1, memo);
            let cs = trees(site, &sq.c, depth - 1, memo);
            let sq = Arc::new(sq.clone());
            for ty in &ys {
                for tc in &cs {
                    let tree = CoverTree::Square {
                        square: sq.clone(),
                        over_y: Box::new(ty.tree.clone()),
                        over_c: Box::new(tc.tree.clone()),
                    };
                    if let Ok(c) = SimpleCover::from_tree(obj, tree) {
                        let k = c.key();
                        match seen.get(&k) {
                            Some(old) if old.depth() <= c.depth() => {}
                            _ => {
                                seen.insert(k, c);
                            }
                        }
                    }
                }
            }
        }
    }
    let out: Vec<SimpleCover> = seen.into_values().collect();
    memo.insert(mk, out.clone());
    out
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum CCompleteVerdict {
    Found {
        depth: usize,
        construction: String,
        squares: Vec<String>,
    },
    NotFound {
        depth: usize,
        note: String,
    },
}

impl CCompleteVerdict {
    pub fn found(&self) -> bool {
        matches!(self, CCompleteVerdict::Found { .. })
    }
}

/// Cones of `src` whose carrier in `to` lies in `target`.
fn preimage(src: &ToricObject, to: &Fan, target: &BTreeSet<usize>) -> BTreeSet<usize> {
    src.cone_ids()
        .iter()
        .copied()
        .filter(|&c| carrier(src.fan(), c, to).is_some_and(|t| target.contains(&t)))
        .collect()
}

/// Largest subset of `cand` that is open in `within`.
fn open_part(within: &ToricObject, cand: &BTreeSet<usize>) -> BTreeSet<usize> {
    let f = within.fan();
    cand.iter()
        .copied()
        .filter(|&c| f.faces_of(c).iter().all(|t| !within.contains(*t) || cand.contains(t)))
        .collect()
}

fn factors_through_i(h: &ToricSpan, i: &ToricSpan) -> bool {
    if h.window().is_empty() {
        return true;
    }
    let img = i.image();
    let Ok(through) = ToricObject::new(i.source().fan().clone(), i.source().cone_ids().clone()) else {
        return false;
    };
    h.window().cone_ids().iter().all(|&c| h.image_of(c).is_some_and(|t| img.contains(&t)))
        && is_proper(h.window(), &through).is_ok()
}

fn factors_through_p(h: &ToricSpan, p: &ToricSpan) -> bool {
    if h.window().is_empty() {
        return true;
    }
    let z = h.source();
    let y = p.source();
    let yf = y.fan();
    let w = h.window().cone_ids();
    let vmax = open_part(z, &preimage(z, yf, y.cone_ids()));
    let closure_w: BTreeSet<usize> = h.window().closure_in(z).cone_ids().intersection(&vmax).copied().collect();
    for cand in [vmax.clone(), w.clone(), closure_w] {
        if !w.is_subset(&cand) {
            continue;
        }
        let Ok(v) = ToricObject::new(z.fan().clone(), cand.clone()) else {
            continue;
        };
        if !v.is_open_in(z) {
            continue;
        }
        let back = preimage(&v, yf, p.window().cone_ids());
        if &back != w {
            continue;
        }
        if is_proper(&v, y).is_ok() {
            return true;
        }
    }
    false
}

fn factors(h: &SpanMorphism, sq: &DistinguishedSquare) -> bool {
    if h.is_zero() {
        return true;
    }
    match (h, &sq.i, &sq.p) {
        (SpanMorphism::Toric(h), SpanMorphism::Toric(i), SpanMorphism::Toric(p)) => {
            factors_through_i(h, i) || factors_through_p(h, p)
        }
        (SpanMorphism::Declared(d), SpanMorphism::Declared(i), SpanMorphism::Declared(p)) => {
            d.target == p.target
                && d.maps.last().is_some_and(|m| Some(m) == p.maps.last() || Some(m) == i.maps.last())
        }
        _ => false,
    }
}

fn cover_in_sieve(cover: &SimpleCover, f: &SpanMorphism, sq: &DistinguishedSquare) -> bool {
    cover
        .leaves
        .iter()
        .all(|m| compose(f, m).is_ok_and(|h| factors(&h, sq)))
}

/// Common refinement of two complete-or-partial plane fans over the
/// support of `z`: each 2-cone of `z` is split at the rays of `y` inside it.
fn refine_plane(z: &Fan, y: &Fan) -> Fan {
    let mut rays: Vec<Vec<i64>> = z.rays().to_vec();
    let mut cones: Vec<Vec<usize>> = Vec::new();
    for c in z.maximal_cones() {
        let v = z.cone_vectors(c);
        if v.len() < 2 {
            cones.push(c.rays().to_vec());
            continue;
        }
        let (a, b) = if lattice::cross(&v[0], &v[1]) > 0 {
            (v[0].clone(), v[1].clone())
        } else {
            (v[1].clone(), v[0].clone())
        };
        let mut inside: Vec<Vec<i64>> = y
            .rays()
            .iter()
            .filter(|r| lattice::cross(&a, r) > 0 && lattice::cross(r, &b) > 0)
            .cloned()
            .collect();
        inside.sort_by(|p, q| 0.cmp(&lattice::cross(p, q)));
        let mut chain = vec![a];
        chain.extend(inside);
        chain.push(b);
        let ids: Vec<usize> = chain
            .iter()
            .map(|r| match rays.iter().position(|x| x == r) {
                Some(i) => i,
                None => {
                    rays.push(r.clone());
                    rays.len() - 1
                }
            })
            .collect();
        for w in ids.windows(2) {
            cones.push(vec![w[0], w[1]]);
        }
    }
    Fan::assemble(z.rank(), rays, cones)
}

/// Pullback of a toric blowup square along a proper `f` with full window.
fn pullback_blowup(sq: &DistinguishedSquare, f: &ToricSpan) -> std::result::Result<DistinguishedSquare, String> {
    let (Some(x), Some(y)) = (sq.x.as_toric(), sq.y.as_toric()) else {
        return Err("square is not toric".into());
    };
    let i = sq.i.as_toric().ok_or("square is not toric")?;
    let z = f.source();
    let (zf, xf, yf) = (z.fan(), x.fan(), y.fan());
    let lifted: Arc<Fan> = if zf == xf {
        yf.clone()
    } else if zf.rank() == 2 {
        Arc::new(refine_plane(zf, yf))
    } else {
        let new: Vec<&Vec<i64>> = yf.rays().iter().filter(|r| xf.ray_id(r).is_none()).collect();
        match new.as_slice() {
            [v] => match star_subdivide(zf, v) {
                Ok(s) => s.fan,
                Err(_) => return Err("exceptional ray does not subdivide the source".into()),
            },
            _ => return Err("no fibre product for this pair of fans".into()),
        }
    };
    let whole = ToricObject::whole(lifted.clone());
    let yp = ToricObject::new(lifted.clone(), preimage(&whole, zf, z.cone_ids())).map_err(|e| e.to_string())?;
    let cp = ToricObject::new(zf.clone(), preimage(z, xf, &i.image())).map_err(|e| e.to_string())?;
    let ep = ToricObject::new(lifted.clone(), preimage(&yp, zf, cp.cone_ids())).map_err(|e| e.to_string())?;
    let pulled = DistinguishedSquare::toric_blowup(SquareKind::AbstractBlowup, ep, yp, cp, z.clone())
        .map_err(|e| e.to_string())?;
    let report = validate_square(&pulled);
    if !report.passed() {
        return Err("pulled-back square fails validation".into());
    }
    Ok(pulled)
}

/// Localization square of a glued object `G = Z ∪ cl(W)` with `Z` open in
/// `G`, for `f: Z ⤏(W) U` in the fan of the square.
fn glue_localization(sq: &DistinguishedSquare, f: &ToricSpan) -> std::result::Result<DistinguishedSquare, String> {
    let x = sq.y.as_toric().ok_or("square is not toric")?;
    let z = f.source();
    if !z.same_fan(x) {
        return Err("glue would need a second fan".into());
    }
    let glued = z.union(&f.window().closure_in(x)).map_err(|_| "glued cone set is not locally closed".to_string())?;
    if !z.is_open_in(&glued) {
        return Err("source is not open in the glued object".into());
    }
    let loc = localization_square(&glued, z).map_err(|e| e.to_string())?;
    Ok(loc)
}

/// Searches the pulled-back sieve `f*⟨i, p⟩` for a simple cover of the
/// source of `f` of height at most `depth`.
pub fn check_c_complete(
    site: &SitePresentation,
    sq: &DistinguishedSquare,
    f: &SpanMorphism,
    depth: usize,
) -> CCompleteVerdict {
    let not_found = |note: String| CCompleteVerdict::NotFound { depth, note };
    if f.target() != sq.x {
        return not_found("morphism does not target the base of the square".into());
    }
    let z = f.source();
    let mut candidates: Vec<(SimpleCover, String)> = vec![(SimpleCover::identity(&z), "identity".into())];
    let mut notes = Vec::new();
    if f.is_identity() {
        if let Ok(c) = SimpleCover::of_square(sq) {
            candidates.push((c, "square".into()));
        }
    }
    match (f, sq.kind) {
        (SpanMorphism::Toric(t), k) if k.is_blowup() => {
            if t.window() == t.source() {
                match pullback_blowup(sq, t) {
                    Ok(p) => {
                        if let Ok(c) = SimpleCover::of_square(&p) {
                            candidates.push((c, "pulled-back square".into()));
                        }
                    }
                    Err(e) => notes.push(e),
                }
            } else {
                notes.push("span with a proper window into a blowup base".into());
            }
        }
        (SpanMorphism::Toric(t), _) => match glue_localization(sq, t) {
            Ok(l) => {
                if let Ok(c) = SimpleCover::of_square(&l) {
                    candidates.push((c, "glued localization square".into()));
                }
            }
            Err(e) => notes.push(e),
        },
        (SpanMorphism::Declared(_), _) => {
            for pulled in site.declared_pullbacks(sq, f) {
                if let Ok(c) = SimpleCover::of_square(pulled) {
                    candidates.push((c, "declared pullback".into()));
                }
            }
        }
    }
    for c in enumerate_simple_covers(site, &z, depth) {
        candidates.push((c, "enumerated".into()));
    }
    candidates.retain(|(c, _)| c.depth() <= depth);
    candidates.sort_by_key(|(c, _)| c.depth());
    for (c, how) in &candidates {
        if cover_in_sieve(c, f, sq) {
            return CCompleteVerdict::Found {
                depth: c.depth(),
                construction: how.clone(),
                squares: c.describe(),
            };
        }
    }
    if notes.is_empty() {
        notes.push("no candidate cover lies in the pulled-back sieve".into());
    }
    not_found(notes.join("; "))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::toric::star_subdivide;

    fn p2() -> Arc<Fan> {
        Arc::new(Fan::builtin("P2").unwrap())
    }

    #[test]
    fn depth_zero_and_one() {
        let f = p2();
        let s = star_subdivide(&f, &[1, 1]).unwrap();
        let mut site = SitePresentation::new();
        site.add_square(s.square.clone());
        let x = s.square.x.clone();
        let c0 = enumerate_simple_covers(&site, &x, 0);
        assert_eq!(c0.len(), 1);
        assert_eq!(c0[0].leaves, vec![SpanMorphism::identity(&x)]);
        let c1 = enumerate_simple_covers(&site, &x, 1);
        assert_eq!(c1.len(), 2);
        let two = &c1[1];
        assert_eq!(two.leaves.len(), 2);
        assert!(two.replays());
        assert_eq!(two.is_jointly_surjective(), Some(true));
    }

    #[test]
    fn stacked_blowups() {
        let f = p2();
        let s1 = star_subdivide(&f, &[1, 1]).unwrap();
        let s2 = star_subdivide(&s1.fan, &[2, 1]).unwrap();
        let mut site = SitePresentation::new();
        site.add_square(s1.square.clone());
        site.add_square(s2.square.clone());
        let x = s1.square.x.clone();
        let c2 = enumerate_simple_covers(&site, &x, 2);
        assert!(c2.iter().any(|c| c.leaves.len() == 3 && c.depth() == 2));
        let c1: BTreeSet<String> = enumerate_simple_covers(&site, &x, 1).iter().map(SimpleCover::key).collect();
        let c2k: BTreeSet<String> = c2.iter().map(SimpleCover::key).collect();
        assert!(c1.is_subset(&c2k));
        assert!(c2.iter().all(|c| c.is_jointly_surjective() == Some(true)));
    }

    #[test]
    fn c_complete_identity_and_closed_immersion() {
        let f = p2();
        let s = star_subdivide(&f, &[1, 1]).unwrap();
        let site = SitePresentation::new();
        let id = SpanMorphism::identity(&s.square.x);
        let v = check_c_complete(&site, &s.square, &id, 3);
        assert!(matches!(v, CCompleteVerdict::Found { depth: 1, .. }), "{v:?}");
        let x = s.square.x.as_toric().unwrap();
        // A line through the blown-up point.
        let ray = f.find_cone(&[vec![1, 0]]).unwrap();
        let line = ToricObject::new(f.clone(), f.star(ray).into_iter().collect()).unwrap();
        let inc = SpanMorphism::inclusion(&line, x).unwrap();
        assert!(check_c_complete(&site, &s.square, &inc, 3).found());
        // The line missing the point factors through p directly.
        let far = f.find_cone(&[vec![-1, -1]]).unwrap();
        let line = ToricObject::new(f.clone(), f.star(far).into_iter().collect()).unwrap();
        let inc = SpanMorphism::inclusion(&line, x).unwrap();
        assert!(matches!(check_c_complete(&site, &s.square, &inc, 3), CCompleteVerdict::Found { depth: 0, .. }));
    }

    #[test]
    fn c_complete_other_blowdown() {
        let f = p2();
        let s = star_subdivide(&f, &[1, 1]).unwrap();
        let o = star_subdivide(&f, &[-1, -2]).unwrap();
        let down = SpanMorphism::inclusion(&ToricObject::whole(o.fan.clone()), s.square.x.as_toric().unwrap()).unwrap();
        let v = check_c_complete(&SitePresentation::new(), &s.square, &down, 3);
        assert!(v.found(), "{v:?}");
    }

    #[test]
    fn c_complete_localization() {
        let f = Arc::new(Fan::builtin("P1").unwrap());
        let plus = f.find_cone(&[vec![1]]).unwrap();
        let x = ToricObject::whole(f.clone());
        let a1 = ToricObject::new(f.clone(), [0, plus].into_iter().collect()).unwrap();
        let gm = ToricObject::new(f.clone(), [0].into_iter().collect()).unwrap();
        let sq = localization_square(&x, &gm).unwrap();
        let site = SitePresentation::new();
        let r = SpanMorphism::restriction(&a1, &gm).unwrap();
        let v = check_c_complete(&site, &sq, &r, 3);
        assert!(v.found(), "{v:?}");
        let id = SpanMorphism::identity(&sq.x);
        assert!(check_c_complete(&site, &sq, &id, 3).found());
        let wrong = SpanMorphism::identity(&SiteObject::Toric(a1));
        assert!(!check_c_complete(&site, &sq, &wrong, 3).found());
    }
}
