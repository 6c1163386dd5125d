//! Morphisms of the span category: `X ⊇ U → Y` with `U` open and `U → Y`
//! proper.
//!
//! On the toric backend all maps are toric morphisms whose lattice map is
//! the identity, so a span is determined by its source, window and target:
//! the orbit of `σ` goes to the orbit of the smallest target cone
//! containing `σ` (its carrier).

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::object::{Backend, DeclaredObject, SiteObject};
use crate::error::{Error, Result};
use crate::toric::{coordinates_q, to_q, Fan, ToricObject};

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ToricSpan {
    source: ToricObject,
    window: ToricObject,
    target: ToricObject,
}

impl fmt::Debug for ToricSpan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} ⊇ {} → {}",
            self.source.describe(),
            self.window.describe(),
            self.target.describe()
        )
    }
}

/// Window of a declared span.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum DeclaredWindow {
    Whole,
    Empty,
    Open(String),
}

/// A span on the declared backend. `maps` is the composite in application
/// order, innermost first; the empty list is the identity.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DeclaredSpan {
    pub source: DeclaredObject,
    pub window: DeclaredWindow,
    pub maps: Vec<String>,
    pub target: DeclaredObject,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SpanMorphism {
    Toric(ToricSpan),
    Declared(DeclaredSpan),
}

/// Carrier of cone `id` of `from` in the fan `to`.
pub(crate) fn carrier(from: &Fan, id: usize, to: &Fan) -> Option<usize> {
    if std::ptr::eq(from, to) || from == to {
        return Some(id);
    }
    to.carrier(&from.cone_vectors(from.cone(id)))
}

fn carriers(src: &ToricObject, cones: &BTreeSet<usize>, to: &Fan) -> BTreeMap<usize, Option<usize>> {
    cones.iter().map(|&c| (c, carrier(src.fan(), c, to))).collect()
}

/// Volume of the cross-section `Σ λ = 1` of cone `sub` written in the
/// coordinates of the simplicial cone `outer` of the same dimension.
#[allow(clippy::needless_range_loop)]
fn relative_volume(sub: &[Vec<i64>], outer: &[Vec<i64>]) -> Option<BigRational> {
    let rows: Vec<Vec<BigRational>> = sub
        .iter()
        .map(|v| coordinates_q(outer, &to_q(v)))
        .collect::<Option<_>>()?;
    let k = rows.len();
    let mut m = rows.clone();
    let mut det = BigRational::one();
    for c in 0..k {
        let p = (c..k).find(|&r| !m[r][c].is_zero())?;
        if p != c {
            m.swap(p, c);
            det = -det;
        }
        det *= m[c][c].clone();
        for r in c + 1..k {
            let f = &m[r][c] / &m[c][c];
            for j in c..k {
                let d = &f * &m[c][j];
                m[r][j] -= d;
            }
        }
    }
    let mut denom = BigRational::one();
    for row in &rows {
        denom *= row.iter().fold(BigRational::zero(), |s, x| s + x);
    }
    Some(det.abs() / denom)
}

/// Properness of the identity-lattice map `window → target`.
///
/// A proper map has closed image `I`, so the test runs against `I`: with
/// `G` the open hull of `I` and `F` its preimage in the source fan,
/// `X_F → X_G` is proper when the cones of `F` tile `|G|`, and then the
/// window maps properly onto `I` when it is closed in the preimage of `I`.
pub(crate) fn is_proper(window: &ToricObject, target: &ToricObject) -> std::result::Result<(), String> {
    let (src, dst) = (window.fan(), target.fan());
    let all: BTreeSet<usize> = (0..src.num_cones()).collect();
    let car = carriers(window, &all, dst);
    let mut image = BTreeSet::new();
    for &c in window.cone_ids() {
        match car[&c] {
            Some(t) if target.contains(t) => {
                image.insert(t);
            }
            _ => return Err(format!("orbit of cone #{c} does not map into the target")),
        }
    }
    for &t in &image {
        if dst.star(t).iter().any(|s| target.contains(*s) && !image.contains(s)) {
            return Err("image is not closed in the target".into());
        }
    }
    let image = ToricObject::from_ids_unchecked(dst.clone(), image);
    let hull = image.open_hull();
    for rho in hull.maximal_cones_within() {
        let outer = dst.cone_vectors(dst.cone(rho));
        let mut total = BigRational::zero();
        for (&c, t) in &car {
            if *t == Some(rho) && src.cone(c).dim() == outer.len() {
                total += relative_volume(&src.cone_vectors(src.cone(c)), &outer)
                    .ok_or_else(|| "degenerate cone in volume computation".to_string())?;
            }
        }
        if total != BigRational::one() {
            return Err(format!("cones over target cone #{rho} do not tile it"));
        }
    }
    let pre: BTreeSet<usize> = car
        .iter()
        .filter(|(_, t)| t.is_some_and(|t| image.contains(t)))
        .map(|(c, _)| *c)
        .collect();
    for &c in window.cone_ids() {
        if src.star(c).iter().any(|s| pre.contains(s) && !window.contains(*s)) {
            return Err("window is not closed in the preimage of its image".into());
        }
    }
    Ok(())
}

impl ToricSpan {
    /// Checked constructor: window open in source, orbits mapped into the
    /// target, and the map proper.
    pub fn new(source: ToricObject, window: ToricObject, target: ToricObject) -> Result<Self> {
        if source.rank() != target.rank() {
            return Err(Error::Unsupported(format!(
                "spans between lattices of rank {} and {}",
                source.rank(),
                target.rank()
            )));
        }
        if !window.is_open_in(&source) {
            return Err(Error::NotOpen(format!(
                "{} in {}",
                window.describe(),
                source.describe()
            )));
        }
        is_proper(&window, &target).map_err(Error::NotComposable)?;
        Ok(Self { source, window, target })
    }

    pub(crate) fn new_unchecked(source: ToricObject, window: ToricObject, target: ToricObject) -> Self {
        Self { source, window, target }
    }

    pub fn source(&self) -> &ToricObject {
        &self.source
    }

    pub fn window(&self) -> &ToricObject {
        &self.window
    }

    pub fn target(&self) -> &ToricObject {
        &self.target
    }

    /// Target cone id of each window cone.
    pub fn image_of(&self, cone: usize) -> Option<usize> {
        carrier(self.source.fan(), cone, self.target.fan())
    }

    /// Cone ids of the target hit by the window.
    pub fn image(&self) -> BTreeSet<usize> {
        self.window.cone_ids().iter().filter_map(|&c| self.image_of(c)).collect()
    }
}

impl SpanMorphism {
    pub fn identity(obj: &SiteObject) -> Self {
        match obj {
            SiteObject::Toric(o) => SpanMorphism::Toric(ToricSpan::new_unchecked(o.clone(), o.clone(), o.clone())),
            SiteObject::Declared(d) => SpanMorphism::Declared(DeclaredSpan {
                source: d.clone(),
                window: DeclaredWindow::Whole,
                maps: vec![],
                target: d.clone(),
            }),
        }
    }

    /// The zero span `source ⤏ target` with empty window.
    pub fn zero(source: &SiteObject, target: &SiteObject) -> Result<Self> {
        Ok(match (source, target) {
            (SiteObject::Toric(s), SiteObject::Toric(t)) => SpanMorphism::Toric(ToricSpan::new_unchecked(
                s.clone(),
                ToricObject::empty(s.fan().clone()),
                t.clone(),
            )),
            (SiteObject::Declared(s), SiteObject::Declared(t)) => SpanMorphism::Declared(DeclaredSpan {
                source: s.clone(),
                window: DeclaredWindow::Empty,
                maps: vec![],
                target: t.clone(),
            }),
            _ => return Err(Error::BackendMismatch("zero span across backends".into())),
        })
    }

    /// Inclusion of a subobject with full window (closed immersion when
    /// `sub` is closed in `ambient`).
    pub fn inclusion(sub: &ToricObject, ambient: &ToricObject) -> Result<Self> {
        Ok(SpanMorphism::Toric(ToricSpan::new(sub.clone(), sub.clone(), ambient.clone())?))
    }

    /// `X ⤏ U` with window `U`, for `U` open in `X`.
    pub fn restriction(x: &ToricObject, u: &ToricObject) -> Result<Self> {
        Ok(SpanMorphism::Toric(ToricSpan::new(x.clone(), u.clone(), u.clone())?))
    }

    pub fn toric(source: &ToricObject, window: &ToricObject, target: &ToricObject) -> Result<Self> {
        Ok(SpanMorphism::Toric(ToricSpan::new(source.clone(), window.clone(), target.clone())?))
    }

    pub fn backend(&self) -> Backend {
        match self {
            SpanMorphism::Toric(_) => Backend::Toric,
            SpanMorphism::Declared(_) => Backend::Declared,
        }
    }

    pub fn source(&self) -> SiteObject {
        match self {
            SpanMorphism::Toric(s) => SiteObject::Toric(s.source.clone()),
            SpanMorphism::Declared(d) => SiteObject::Declared(d.source.clone()),
        }
    }

    pub fn target(&self) -> SiteObject {
        match self {
            SpanMorphism::Toric(s) => SiteObject::Toric(s.target.clone()),
            SpanMorphism::Declared(d) => SiteObject::Declared(d.target.clone()),
        }
    }

    pub fn as_toric(&self) -> Option<&ToricSpan> {
        match self {
            SpanMorphism::Toric(s) => Some(s),
            SpanMorphism::Declared(_) => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            SpanMorphism::Toric(s) => s.window.is_empty(),
            SpanMorphism::Declared(d) => d.window == DeclaredWindow::Empty || d.source.dim == -1,
        }
    }

    pub fn is_identity(&self) -> bool {
        match self {
            SpanMorphism::Toric(s) => s.source == s.target && s.window == s.source,
            SpanMorphism::Declared(d) => d.source == d.target && d.window == DeclaredWindow::Whole && d.maps.is_empty(),
        }
    }

    /// Whole window and a bijection on orbits onto the whole target with
    /// identical cones.
    pub fn is_isomorphism(&self) -> bool {
        match self {
            SpanMorphism::Toric(s) => {
                s.window == s.source
                    && s.window.cone_ids().len() == s.target.cone_ids().len()
                    && s.window.cone_ids().iter().all(|&c| {
                        s.image_of(c).is_some_and(|t| {
                            s.target.contains(t)
                                && s.source.fan().cone(c).dim() == s.target.fan().cone(t).dim()
                        })
                    })
                    && s.image().len() == s.target.cone_ids().len()
            }
            SpanMorphism::Declared(d) => self.is_identity() || (d.source.dim == -1 && d.target.dim == -1),
        }
    }

    /// Key of the leaf `(source, window, map)` used to deduplicate covers.
    pub fn key(&self) -> String {
        match self {
            SpanMorphism::Toric(s) => format!(
                "{} | {} | {}",
                SiteObject::Toric(s.source.clone()).key(),
                s.window.key(),
                SiteObject::Toric(s.target.clone()).key()
            ),
            SpanMorphism::Declared(d) => format!(
                "declared:{} | {:?} | {} | {}",
                d.source.name,
                d.window,
                d.maps.join("∘"),
                d.target.name
            ),
        }
    }

    pub fn describe(&self) -> String {
        match self {
            SpanMorphism::Toric(s) => format!("{s:?}"),
            SpanMorphism::Declared(d) => {
                let w = match &d.window {
                    DeclaredWindow::Whole => d.source.name.clone(),
                    DeclaredWindow::Empty => "∅".into(),
                    DeclaredWindow::Open(u) => u.clone(),
                };
                let m = if d.maps.is_empty() { "id".to_owned() } else { d.maps.join("∘") };
                format!("{} ⊇ {} --{}--> {}", d.source.name, w, m, d.target.name)
            }
        }
    }
}

/// `second ∘ first`. The window is the preimage of `second`'s window
/// under `first`'s map.
pub fn compose(second: &SpanMorphism, first: &SpanMorphism) -> Result<SpanMorphism> {
    match (second, first) {
        (SpanMorphism::Toric(g), SpanMorphism::Toric(f)) => {
            if f.target != g.source {
                return Err(Error::NotComposable(format!(
                    "target {} is not source {}",
                    f.target.describe(),
                    g.source.describe()
                )));
            }
            let window: BTreeSet<usize> = f
                .window
                .cone_ids()
                .iter()
                .copied()
                .filter(|&c| f.image_of(c).is_some_and(|t| g.window.contains(t)))
                .collect();
            let window = ToricObject::new(f.source.fan().clone(), window)?;
            Ok(SpanMorphism::Toric(ToricSpan::new_unchecked(
                f.source.clone(),
                window,
                g.target.clone(),
            )))
        }
        (SpanMorphism::Declared(g), SpanMorphism::Declared(f)) => {
            if f.target != g.source {
                return Err(Error::NotComposable(format!(
                    "target {} is not source {}",
                    f.target.name, g.source.name
                )));
            }
            if f.window == DeclaredWindow::Empty || g.window == DeclaredWindow::Empty {
                return SpanMorphism::zero(&SiteObject::Declared(f.source.clone()), &SiteObject::Declared(g.target.clone()));
            }
            if first.is_identity() {
                return Ok(second.clone());
            }
            if second.is_identity() {
                return Ok(first.clone());
            }
            if g.window != DeclaredWindow::Whole {
                return Err(Error::MissingPullback(format!(
                    "{} along the open window of {}",
                    first.describe(),
                    second.describe()
                )));
            }
            let mut maps = f.maps.clone();
            maps.extend(g.maps.iter().cloned());
            Ok(SpanMorphism::Declared(DeclaredSpan {
                source: f.source.clone(),
                window: f.window.clone(),
                maps,
                target: g.target.clone(),
            }))
        }
        _ => Err(Error::BackendMismatch("composition across backends".into())),
    }
}

impl ToricObject {
    /// Cones of the object not properly contained in another of its cones.
    fn maximal_cones_within(&self) -> Vec<usize> {
        let f = self.fan();
        self.cone_ids()
            .iter()
            .copied()
            .filter(|&c| !self.cone_ids().iter().any(|&d| d != c && f.cone(c).is_face_of(f.cone(d))))
            .collect()
    }
}
