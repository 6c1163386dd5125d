use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::object::{DeclaredObject, SiteObject};
use super::span::{is_proper, DeclaredSpan, DeclaredWindow, SpanMorphism, ToricSpan};
use crate::error::{Error, Result};
use crate::kring::{KClass, RelationSet};
use crate::toric::ToricObject;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SquareKind {
    SmoothBlowup,
    AbstractBlowup,
    Localization,
}

impl SquareKind {
    pub fn is_blowup(self) -> bool {
        !matches!(self, SquareKind::Localization)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            SquareKind::SmoothBlowup => "smooth_blowup",
            SquareKind::AbstractBlowup => "abstract_blowup",
            SquareKind::Localization => "localization",
        }
    }
}

/// Conditions asserted by the author of a declared square.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(default)]
pub struct DeclaredFlags {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub closed_immersion: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub proper: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cartesian: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub restriction_iso: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub open_window: Option<bool>,
}

/// A commutative square
///
/// ```text
///   E --top--> Y
///   |          |
///  left        p
///   v          v
///   C ---i---> X
/// ```
///
/// For a localization square the corners are `(X∖U, X, ∅, U)`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DistinguishedSquare {
    pub kind: SquareKind,
    pub e: SiteObject,
    pub y: SiteObject,
    pub c: SiteObject,
    pub x: SiteObject,
    pub top: SpanMorphism,
    pub left: SpanMorphism,
    pub p: SpanMorphism,
    pub i: SpanMorphism,
    pub flags: Option<DeclaredFlags>,
    pub refined_by: Vec<DistinguishedSquare>,
}

impl fmt::Debug for DistinguishedSquare {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}({}, {}, {}, {})",
            self.kind.as_str(),
            self.e.describe(),
            self.y.describe(),
            self.c.describe(),
            self.x.describe()
        )
    }
}

impl DistinguishedSquare {
    /// A blowup-type square on the toric backend with the structure maps
    /// induced by the fans.
    pub fn toric_blowup(
        kind: SquareKind,
        e: ToricObject,
        y: ToricObject,
        c: ToricObject,
        x: ToricObject,
    ) -> Result<Self> {
        if !kind.is_blowup() {
            return Err(Error::IllShapedArgs("toric_blowup needs a blowup kind".into()));
        }
        Ok(Self {
            kind,
            top: SpanMorphism::toric(&e, &e, &y)?,
            left: SpanMorphism::toric(&e, &e, &c)?,
            p: SpanMorphism::toric(&y, &y, &x)?,
            i: SpanMorphism::toric(&c, &c, &x)?,
            e: e.into(),
            y: y.into(),
            c: c.into(),
            x: x.into(),
            flags: None,
            refined_by: vec![],
        })
    }

    /// The square `(X∖U, X, ∅, U)` of a toric open subobject.
    pub fn localization(x: &ToricObject, u: &ToricObject) -> Result<Self> {
        localization_square(x, u)
    }

    /// A declared square; maps are named `top`, `left`, `p`, `i` unless a
    /// localization, where the windows are fixed by the shape.
    pub fn declared(
        kind: SquareKind,
        corners: [DeclaredObject; 4],
        maps: [String; 4],
        flags: DeclaredFlags,
    ) -> Self {
        let [e, y, c, x] = corners;
        let [top, left, p, i] = maps;
        let span = |s: &DeclaredObject, w: DeclaredWindow, m: String, t: &DeclaredObject| {
            SpanMorphism::Declared(DeclaredSpan {
                source: s.clone(),
                window: w,
                maps: if m.is_empty() { vec![] } else { vec![m] },
                target: t.clone(),
            })
        };
        let (top, left, p, i) = if kind == SquareKind::Localization {
            (
                span(&e, DeclaredWindow::Whole, top, &y),
                span(&e, DeclaredWindow::Empty, left, &c),
                span(&y, DeclaredWindow::Open(x.name.clone()), p, &x),
                span(&c, DeclaredWindow::Whole, i, &x),
            )
        } else {
            (
                span(&e, DeclaredWindow::Whole, top, &y),
                span(&e, DeclaredWindow::Whole, left, &c),
                span(&y, DeclaredWindow::Whole, p, &x),
                span(&c, DeclaredWindow::Whole, i, &x),
            )
        };
        Self {
            kind,
            e: e.into(),
            y: y.into(),
            c: c.into(),
            x: x.into(),
            top,
            left,
            p,
            i,
            flags: Some(flags),
            refined_by: vec![],
        }
    }

    pub fn corners(&self) -> [&SiteObject; 4] {
        [&self.e, &self.y, &self.c, &self.x]
    }

    pub fn is_declared(&self) -> bool {
        matches!(self.x, SiteObject::Declared(_))
    }

    pub fn key(&self) -> String {
        format!(
            "{}({} ; {} ; {} ; {})",
            self.kind.as_str(),
            self.e.key(),
            self.y.key(),
            self.c.key(),
            self.x.key()
        )
    }
}

/// `(X∖U, X, ∅, U)` with `X∖U → X` a closed immersion, `X ⤏ U` the
/// restriction, `∅ → U` and the zero span `X∖U ⤏ ∅`.
pub fn localization_square(x: &ToricObject, u: &ToricObject) -> Result<DistinguishedSquare> {
    if !u.is_open_in(x) {
        return Err(Error::NotOpen(format!("{} in {}", u.describe(), x.describe())));
    }
    let rest = x.minus(u)?;
    let empty = ToricObject::empty(x.fan().clone());
    let e: SiteObject = rest.clone().into();
    let c: SiteObject = empty.clone().into();
    Ok(DistinguishedSquare {
        kind: SquareKind::Localization,
        top: SpanMorphism::toric(&rest, &rest, x)?,
        left: SpanMorphism::zero(&e, &c)?,
        p: SpanMorphism::restriction(x, u)?,
        i: SpanMorphism::toric(&empty, &empty, u)?,
        e,
        y: x.clone().into(),
        c,
        x: u.clone().into(),
        flags: None,
        refined_by: vec![],
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SquareRelationReport {
    pub holds: bool,
    /// `[E] + [X]`
    pub lhs: KClass,
    /// `[C] + [Y]`
    pub rhs: KClass,
}

/// Compares `[E] + [X]` with `[C] + [Y]` in canonical form.
pub fn verify_square_relation(sq: &DistinguishedSquare, rels: &RelationSet) -> Result<SquareRelationReport> {
    let lhs = &sq.e.class(rels)? + &sq.x.class(rels)?;
    let rhs = &sq.c.class(rels)? + &sq.y.class(rels)?;
    Ok(SquareRelationReport {
        holds: lhs == rhs,
        lhs,
        rhs,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", content = "reason", rename_all = "snake_case")]
pub enum CheckStatus {
    Pass,
    Trusted,
    Fail(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckEntry {
    pub condition: String,
    #[serde(flatten)]
    pub status: CheckStatus,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub entries: Vec<CheckEntry>,
    /// `None` on the declared backend, where orbits are not available.
    pub jointly_surjective: Option<bool>,
    pub trusted: bool,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.failures().next().is_none()
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckEntry> {
        self.entries.iter().filter(|e| matches!(e.status, CheckStatus::Fail(_)))
    }

    fn push(&mut self, condition: &str, ok: std::result::Result<(), String>) {
        self.entries.push(CheckEntry {
            condition: condition.to_owned(),
            status: match ok {
                Ok(()) => CheckStatus::Pass,
                Err(m) => CheckStatus::Fail(m),
            },
        });
    }
}

fn toric_span(m: &SpanMorphism) -> std::result::Result<&ToricSpan, String> {
    m.as_toric().ok_or_else(|| "map is not on the toric backend".to_string())
}

/// Injective on orbits, dimension preserving, whole window, image closed.
fn closed_immersion(m: &SpanMorphism) -> std::result::Result<BTreeSet<usize>, String> {
    let s = toric_span(m)?;
    if s.window() != s.source() {
        return Err("window is not the whole source".into());
    }
    let mut image = BTreeSet::new();
    for &c in s.source().cone_ids() {
        let t = s.image_of(c).ok_or_else(|| format!("cone #{c} has no image"))?;
        if !s.target().contains(t) {
            return Err(format!("cone #{c} maps outside the target"));
        }
        if s.source().fan().cone_vectors(s.source().fan().cone(c)) != s.target().fan().cone_vectors(s.target().fan().cone(t)) {
            return Err(format!("cone #{c} is not mapped isomorphically"));
        }
        if !image.insert(t) {
            return Err("two orbits have the same image".into());
        }
    }
    let img = ToricObject::new(s.target().fan().clone(), image.clone()).map_err(|e| e.to_string())?;
    if !img.is_closed_in(s.target()) {
        return Err("image is not closed".into());
    }
    Ok(image)
}

fn check_proper(m: &SpanMorphism, whole: bool) -> std::result::Result<(), String> {
    let s = toric_span(m)?;
    if whole && s.window() != s.source() {
        return Err("window is not the whole source".into());
    }
    is_proper(s.window(), s.target())
}

fn validate_toric_blowup(sq: &DistinguishedSquare, r: &mut ValidationReport) {
    let ci = closed_immersion(&sq.i);
    r.push("closed-immersion", ci.as_ref().map(|_| ()).map_err(Clone::clone));
    r.push("proper", check_proper(&sq.p, true));
    let (Ok(i), Ok(p), Ok(top), Ok(left)) = (
        toric_span(&sq.i),
        toric_span(&sq.p),
        toric_span(&sq.top),
        toric_span(&sq.left),
    ) else {
        r.push("cartesian", Err("maps are not toric".into()));
        return;
    };
    let center = ci.unwrap_or_default();
    let cart = (|| {
        let top_img = closed_immersion(&sq.top)?;
        let over: BTreeSet<usize> = p
            .source()
            .cone_ids()
            .iter()
            .copied()
            .filter(|&h| p.image_of(h).is_some_and(|t| center.contains(&t)))
            .collect();
        if top_img != over {
            return Err("E is not the preimage of C".to_string());
        }
        for &h in top.source().cone_ids() {
            let via_c = left.image_of(h).and_then(|c| i.image_of(c));
            let via_y = top.image_of(h).and_then(|y| p.image_of(y));
            if via_c.is_none() || via_c != via_y {
                return Err(format!("square does not commute on cone #{h}"));
            }
        }
        Ok(())
    })();
    r.push("cartesian", cart);
    let iso = (|| {
        for &xi in p.target().cone_ids() {
            if center.contains(&xi) {
                continue;
            }
            let over: Vec<usize> = p
                .source()
                .cone_ids()
                .iter()
                .copied()
                .filter(|&h| p.image_of(h) == Some(xi))
                .collect();
            let xf = p.target().fan();
            let yf = p.source().fan();
            match over.as_slice() {
                [h] if yf.cone_vectors(yf.cone(*h)) == xf.cone_vectors(xf.cone(xi)) => {}
                _ => return Err(format!("not an isomorphism over cone #{xi}")),
            }
        }
        Ok(())
    })();
    r.push("restriction-iso", iso);
    let mut hit = center;
    hit.extend(p.image());
    r.jointly_surjective = Some(p.target().cone_ids().iter().all(|c| hit.contains(c)));
}

fn validate_toric_localization(sq: &DistinguishedSquare, r: &mut ValidationReport) {
    let (Ok(p), Ok(top), Ok(i)) = (toric_span(&sq.p), toric_span(&sq.top), toric_span(&sq.i)) else {
        r.push("shape", Err("maps are not toric".into()));
        return;
    };
    let window = (|| {
        let u = sq.x.as_toric().ok_or("base is not toric")?;
        if !p.window().is_open_in(p.source()) {
            return Err("window is not open".to_string());
        }
        if p.window() != u || p.target() != u {
            return Err("restriction is not the identity on U".into());
        }
        Ok(())
    })();
    r.push("open-window", window);
    let compl = (|| {
        let img = closed_immersion(&sq.top)?;
        let expect: BTreeSet<usize> = top.target().cone_ids().difference(p.window().cone_ids()).copied().collect();
        if img != expect {
            return Err("closed corner is not X∖U".to_string());
        }
        Ok(())
    })();
    r.push("complement", compl);
    r.push(
        "empty-corner",
        if sq.c.is_empty() && sq.left.is_zero() {
            Ok(())
        } else {
            Err("corner C is not ∅ or left map is not zero".into())
        },
    );
    r.push("proper", check_proper(&sq.p, false));
    let mut hit = p.image();
    hit.extend(i.image());
    r.jointly_surjective = Some(p.target().cone_ids().iter().all(|c| hit.contains(c)));
}

fn validate_declared(sq: &DistinguishedSquare, r: &mut ValidationReport) {
    r.trusted = true;
    let flags = sq.flags.clone().unwrap_or_default();
    let mut flag = |name: &str, v: Option<bool>| {
        r.entries.push(CheckEntry {
            condition: name.to_owned(),
            status: match v {
                Some(true) => CheckStatus::Trusted,
                Some(false) => CheckStatus::Fail(format!("{name} declared false")),
                None => CheckStatus::Fail(format!("{name} undeclared")),
            },
        });
    };
    if sq.kind.is_blowup() {
        flag("closed-immersion", flags.closed_immersion);
        flag("proper", flags.proper);
        flag("cartesian", flags.cartesian);
        flag("restriction-iso", flags.restriction_iso);
    } else {
        flag("open-window", flags.open_window);
        r.push(
            "empty-corner",
            if sq.c.is_empty() {
                Ok(())
            } else {
                Err("corner C must have dimension -1".into())
            },
        );
    }
    let dims = if sq.kind.is_blowup() {
        if sq.c.dim() <= sq.x.dim() && sq.e.dim() <= sq.y.dim() {
            Ok(())
        } else {
            Err("dim C ≤ dim X and dim E ≤ dim Y required".to_string())
        }
    } else if sq.e.dim() <= sq.y.dim() && sq.x.dim() <= sq.y.dim() {
        Ok(())
    } else {
        Err("corners exceed the dimension of X".to_string())
    };
    r.push("dimensions", dims);
}

/// Checks each defining condition of the square. Failures are entries of
/// the report, never errors.
pub fn validate_square(sq: &DistinguishedSquare) -> ValidationReport {
    let mut r = ValidationReport {
        entries: vec![],
        jointly_surjective: None,
        trusted: false,
    };
    if sq.is_declared() {
        validate_declared(sq, &mut r);
    } else if sq.kind.is_blowup() {
        validate_toric_blowup(sq, &mut r);
    } else {
        validate_toric_localization(sq, &mut r);
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kring::parse_expr;
    use crate::toric::{star_subdivide, Fan};
    use std::sync::Arc;

    fn whole(name: &str) -> ToricObject {
        ToricObject::whole(Arc::new(Fan::builtin(name).unwrap()))
    }

    #[test]
    fn blowup_of_p2_at_a_point() {
        let s = star_subdivide(&Arc::new(Fan::builtin("P2").unwrap()), &[1, 1]).unwrap();
        let sq = &s.square;
        assert_eq!(sq.kind, SquareKind::SmoothBlowup);
        let r = validate_square(sq);
        assert!(r.passed(), "{r:?}");
        assert_eq!(r.jointly_surjective, Some(true));
        let rels = RelationSet::new();
        let rep = verify_square_relation(sq, &rels).unwrap();
        assert!(rep.holds);
        let both = crate::kring::normalize(&parse_expr("L*L + 2*L + 2", &rels).unwrap(), &rels).unwrap();
        assert_eq!(rep.lhs, both);
    }

    #[test]
    fn localization_squares() {
        let p1 = whole("P1");
        let plus = p1.fan().find_cone(&[vec![1]]).unwrap();
        let a1 = ToricObject::new(p1.fan().clone(), [0, plus].into_iter().collect()).unwrap();
        let sq = localization_square(&p1, &a1).unwrap();
        assert_eq!(sq.e.as_toric().unwrap().class(), KClass::one());
        let r = validate_square(&sq);
        assert!(r.passed(), "{r:?}");
        assert_eq!(r.jointly_surjective, Some(true));
        let sq = localization_square(&p1, &p1).unwrap();
        assert!(sq.e.is_empty());
        assert!(validate_square(&sq).passed());
        let p2 = whole("P2");
        let torus = ToricObject::new(p2.fan().clone(), [0].into_iter().collect()).unwrap();
        let sq = localization_square(&p2, &torus).unwrap();
        let three_l = KClass::lefschetz() * KClass::integer(3);
        assert_eq!(sq.e.as_toric().unwrap().class(), three_l);
        assert!(verify_square_relation(&sq, &RelationSet::new()).unwrap().holds);
        let closed = ToricObject::new(p1.fan().clone(), [plus].into_iter().collect()).unwrap();
        assert!(matches!(localization_square(&p1, &closed), Err(Error::NotOpen(_))));
    }

    #[test]
    fn declared_square_missing_flag() {
        let o = |n: &str, d: i64| DeclaredObject::new(n, d, true);
        let sq = DistinguishedSquare::declared(
            SquareKind::AbstractBlowup,
            [o("E", 1), o("Y", 2), o("C", 0), o("X", 2)],
            ["j".into(), "q".into(), "p".into(), "i".into()],
            DeclaredFlags {
                closed_immersion: Some(true),
                proper: Some(true),
                cartesian: Some(true),
                ..Default::default()
            },
        );
        let r = validate_square(&sq);
        assert!(r.trusted);
        let fails: Vec<_> = r.failures().collect();
        assert_eq!(fails.len(), 1);
        assert_eq!(fails[0].status, CheckStatus::Fail("restriction-iso undeclared".into()));
    }

    #[test]
    fn degenerate_square() {
        let p2 = whole("P2");
        let line = ToricObject::new(p2.fan().clone(), p2.fan().star(1).into_iter().collect()).unwrap();
        let sq = DistinguishedSquare::toric_blowup(SquareKind::AbstractBlowup, line.clone(), p2.clone(), line, p2).unwrap();
        assert!(validate_square(&sq).passed());
        assert!(verify_square_relation(&sq, &RelationSet::new()).unwrap().holds);
    }
}
