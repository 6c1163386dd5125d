use serde::Serialize;

use super::square::{DistinguishedSquare, SquareKind};
use crate::error::{Error, Result};
use crate::toric::ToricObject;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DimVerdict {
    Direct,
    Refined(Vec<DistinguishedSquare>),
    Fail(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DimVerdictSummary {
    pub verdict: &'static str,
    pub refined: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
}

impl DimVerdict {
    pub fn summary(&self) -> DimVerdictSummary {
        match self {
            DimVerdict::Direct => DimVerdictSummary {
                verdict: "direct",
                refined: vec![],
                reason: None,
            },
            DimVerdict::Refined(v) => DimVerdictSummary {
                verdict: "refined",
                refined: v.iter().map(|s| format!("{s:?}")).collect(),
                reason: None,
            },
            DimVerdict::Fail(r) => DimVerdictSummary {
                verdict: "fail",
                refined: vec![],
                reason: Some(r.clone()),
            },
        }
    }
}

/// The dimension conditions on the corners of a single square.
pub fn is_direct(sq: &DistinguishedSquare) -> bool {
    let [e, y, c, x] = sq.corners().map(|o| o.dim());
    if sq.kind.is_blowup() {
        c <= x && y <= x && e < x
    } else {
        // (X∖U, X, ∅, U): U dense in X.
        e < y && y <= x
    }
}

fn toric(sq: &DistinguishedSquare) -> Option<[&ToricObject; 4]> {
    Some([sq.e.as_toric()?, sq.y.as_toric()?, sq.c.as_toric()?, sq.x.as_toric()?])
}

fn refine_toric_blowup(sq: &DistinguishedSquare) -> Result<Vec<DistinguishedSquare>> {
    let [_, y, c, x] = toric(sq).expect("toric square");
    let p = sq.p.as_toric().expect("toric square");
    let mut out = Vec::new();
    let comps = x.components();
    // Split off one irreducible component at a time.
    let mut rest = x.clone();
    for comp in comps.iter().take(comps.len().saturating_sub(1)) {
        let others = rest.minus(comp).map(|o| o.closure_in(&rest))?;
        let meet = comp.intersect(&others)?;
        out.push(DistinguishedSquare::toric_blowup(
            SquareKind::AbstractBlowup,
            meet,
            comp.clone(),
            others.clone(),
            rest.clone(),
        )?);
        rest = others;
    }
    for comp in &comps {
        let over: std::collections::BTreeSet<usize> = y
            .cone_ids()
            .iter()
            .copied()
            .filter(|&h| p.image_of(h).is_some_and(|t| comp.contains(t)))
            .collect();
        let yi = ToricObject::new(y.fan().clone(), over)?;
        let ci = comp.intersect(&c.transport(x.fan()).unwrap_or_else(|| c.clone()))?;
        let ei_ids: std::collections::BTreeSet<usize> = yi
            .cone_ids()
            .iter()
            .copied()
            .filter(|&h| p.image_of(h).is_some_and(|t| ci.contains(t)))
            .collect();
        let ei = ToricObject::new(y.fan().clone(), ei_ids)?;
        let strict = yi.minus(&ei)?.closure_in(&yi);
        let meet = strict.intersect(&ei)?;
        out.push(DistinguishedSquare::toric_blowup(SquareKind::AbstractBlowup, meet, strict, ci, comp.clone())?);
    }
    Ok(out)
}

/// Direct if the corner dimensions already satisfy the conditions;
/// otherwise refined by squares that do (irreducible components, strict
/// transforms, closures of non-dense opens).
pub fn check_dim_compatible(sq: &DistinguishedSquare) -> Result<DimVerdict> {
    if is_direct(sq) {
        return Ok(DimVerdict::Direct);
    }
    if sq.i.is_isomorphism() || sq.p.is_isomorphism() {
        return Ok(DimVerdict::Refined(vec![]));
    }
    if sq.is_declared() {
        if sq.corners().iter().any(|o| o.dim() < -1) {
            return Err(Error::MissingDimension(format!("{sq:?}")));
        }
        return Ok(if sq.refined_by.is_empty() {
            DimVerdict::Fail("declared square has no declared refinement".into())
        } else {
            DimVerdict::Refined(sq.refined_by.clone())
        });
    }
    if toric(sq).is_none() {
        return Ok(DimVerdict::Fail("mixed backends".into()));
    }
    if sq.kind.is_blowup() {
        return Ok(DimVerdict::Refined(refine_toric_blowup(sq)?));
    }
    let [_, x, _, u] = toric(sq).expect("toric square");
    let closure = u.closure_in(x);
    Ok(DimVerdict::Refined(vec![DistinguishedSquare::localization(&closure, u)?]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::site::validate_square;
    use crate::toric::{star_subdivide, Fan};
    use std::sync::Arc;

    #[test]
    fn blowup_of_p2_is_direct() {
        let s = star_subdivide(&Arc::new(Fan::builtin("P2").unwrap()), &[1, 1]).unwrap();
        assert_eq!(check_dim_compatible(&s.square).unwrap(), DimVerdict::Direct);
    }

    #[test]
    fn localization_dense_and_not() {
        let f = Arc::new(Fan::builtin("P2").unwrap());
        let x = ToricObject::whole(f.clone());
        let torus = ToricObject::new(f.clone(), [0].into_iter().collect()).unwrap();
        let sq = DistinguishedSquare::localization(&x, &torus).unwrap();
        assert_eq!(check_dim_compatible(&sq).unwrap(), DimVerdict::Direct);
        // Two lines through a point; U is one line minus the point.
        let a = f.find_cone(&[vec![1, 0]]).unwrap();
        let b = f.find_cone(&[vec![0, 1]]).unwrap();
        let lines = ToricObject::new(f.clone(), f.star(a).into_iter().chain(f.star(b)).collect()).unwrap();
        let ab = f.find_cone(&[vec![1, 0], vec![0, 1]]).unwrap();
        let u = ToricObject::new(f.clone(), f.star(a).into_iter().filter(|&c| c != ab).collect()).unwrap();
        assert!(u.is_open_in(&lines));
        let sq = DistinguishedSquare::localization(&lines, &u).unwrap();
        assert!(!is_direct(&sq));
        match check_dim_compatible(&sq).unwrap() {
            DimVerdict::Refined(v) => {
                assert_eq!(v.len(), 1);
                assert!(is_direct(&v[0]));
                assert!(validate_square(&v[0]).passed());
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn total_transform_of_a_line_is_refined() {
        let f = Arc::new(Fan::builtin("P2").unwrap());
        let s = star_subdivide(&f, &[1, 1]).unwrap();
        let ray = f.find_cone(&[vec![1, 0]]).unwrap();
        let line = ToricObject::new(f.clone(), f.star(ray).into_iter().collect()).unwrap();
        let y = s.square.y.as_toric().unwrap();
        let p = s.square.p.as_toric().unwrap();
        let over = y.cone_ids().iter().copied().filter(|&h| p.image_of(h).is_some_and(|t| line.contains(t))).collect();
        let yl = ToricObject::new(y.fan().clone(), over).unwrap();
        let c = s.square.c.as_toric().unwrap().clone();
        let e = s.square.e.as_toric().unwrap().clone();
        let sq = DistinguishedSquare::toric_blowup(SquareKind::AbstractBlowup, e, yl, c, line).unwrap();
        assert!(validate_square(&sq).passed());
        assert!(!is_direct(&sq));
        match check_dim_compatible(&sq).unwrap() {
            DimVerdict::Refined(v) => {
                assert!(!v.is_empty());
                for r in &v {
                    assert!(is_direct(r), "{r:?}");
                    assert!(validate_square(r).passed(), "{r:?}");
                }
            }
            other => panic!("{other:?}"),
        }
    }
}
