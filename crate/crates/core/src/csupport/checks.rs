use serde::Serialize;

use super::compactify::{CompactificationChoice, CompactificationProvider};
use super::extend::{extend_measure, extend_with_choice, ExtensionResult};
use super::measure::MeasureOnCompacts;
use crate::error::{Error, Result};
use crate::kring::Relation;
use crate::measures::MeasureValue;
use crate::site::{DeclaredObject, DistinguishedSquare, SiteObject};
use crate::toric::ToricObject;

/// Outcome of one identity check: `lhs == rhs` exactly.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CheckReport {
    pub check: &'static str,
    pub measure: String,
    pub holds: bool,
    pub lhs: MeasureValue,
    pub rhs: MeasureValue,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
    pub trace: Vec<ExtensionResult>,
}

fn report(check: &'static str, phi: &MeasureOnCompacts, lhs: MeasureValue, rhs: MeasureValue, trace: Vec<ExtensionResult>) -> CheckReport {
    CheckReport {
        check,
        measure: phi.name.clone(),
        holds: lhs == rhs,
        lhs,
        rhs,
        note: None,
        trace,
    }
}

fn sum(values: &[&ExtensionResult]) -> Result<MeasureValue> {
    let mut it = values.iter();
    let first = it.next().expect("nonempty").value.clone();
    it.try_fold(first, |acc, r| acc.add(&r.value))
}

/// Computes `Φ_c(obj)` through two compactifications and compares. A
/// disagreement means `Φ` does not descend along abstract blowups.
pub fn independence_check(
    phi: &MeasureOnCompacts,
    obj: &SiteObject,
    comp_a: &CompactificationChoice,
    comp_b: &CompactificationChoice,
    provider: &CompactificationProvider,
) -> Result<CheckReport> {
    let a = extend_with_choice(phi, obj, comp_a, provider)?;
    let b = extend_with_choice(phi, obj, comp_b, provider)?;
    let mut r = report("independence", phi, a.value.clone(), b.value.clone(), vec![a, b]);
    if !r.holds {
        r.note = Some("descent violation".into());
    }
    Ok(r)
}

fn same_fan(x: &ToricObject, other: &ToricObject) -> Result<ToricObject> {
    if x.same_fan(other) {
        return Ok(other.clone());
    }
    other
        .transport(x.fan())
        .ok_or_else(|| Error::IllShapedArgs(format!("{} does not lie in the fan of {}", other.describe(), x.describe())))
}

fn declared(name: &str, provider: &CompactificationProvider) -> Result<SiteObject> {
    let rels = &provider.relations;
    let dim = rels.dim_of(name).ok_or_else(|| Error::MissingDimension(name.to_owned()))?;
    Ok(DeclaredObject::new(name, dim, rels.is_compact(name).unwrap_or(false)).into())
}

/// `Φ_c(U) + Φ_c(X ∖ U) = Φ_c(X)`. Declared objects need an open relation
/// naming the complement.
pub fn additivity_check(phi: &MeasureOnCompacts, x: &SiteObject, u: &SiteObject, provider: &CompactificationProvider) -> Result<CheckReport> {
    let z: SiteObject = match (x, u) {
        (SiteObject::Toric(x), SiteObject::Toric(u)) => {
            let u = same_fan(x, u)?;
            if !u.is_open_in(x) {
                return Err(Error::NotOpen(format!("{} in {}", u.describe(), x.describe())));
            }
            x.minus(&u)?.into()
        }
        (SiteObject::Declared(xd), SiteObject::Declared(ud)) => {
            if xd.name == ud.name {
                DeclaredObject::empty().into()
            } else {
                match provider.relations.find_open(&xd.name, &ud.name) {
                    Some((_, Relation::Open { complement, .. })) => declared(complement, provider)?,
                    _ => return Err(Error::NotOpen(format!("no open relation for `{}` in `{}`", ud.name, xd.name))),
                }
            }
        }
        _ => return Err(Error::BackendMismatch("additivity across backends".into())),
    };
    let ru = extend_measure(phi, u, provider)?;
    let rz = extend_measure(phi, &z, provider)?;
    let rx = extend_measure(phi, x, provider)?;
    let lhs = sum(&[&ru, &rz])?;
    Ok(report("additivity", phi, lhs, rx.value.clone(), vec![ru, rz, rx]))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ConsistencyKind {
    BlowupDescent,
    MayerVietoris,
    Kunneth,
}

impl ConsistencyKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ConsistencyKind::BlowupDescent => "blowup_descent",
            ConsistencyKind::MayerVietoris => "mayer_vietoris",
            ConsistencyKind::Kunneth => "kunneth",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        [ConsistencyKind::BlowupDescent, ConsistencyKind::MayerVietoris, ConsistencyKind::Kunneth]
            .into_iter()
            .find(|k| k.as_str() == s)
    }
}

pub enum ConsistencyArgs<'a> {
    Square(&'a DistinguishedSquare),
    /// `X = U ∪ V` with `U` and `V` open.
    Cover { x: &'a SiteObject, u: &'a SiteObject, v: &'a SiteObject },
    Pair { x: &'a SiteObject, y: &'a SiteObject },
}

impl ConsistencyArgs<'_> {
    fn shape(&self) -> &'static str {
        match self {
            ConsistencyArgs::Square(_) => "a square",
            ConsistencyArgs::Cover { .. } => "an open cover",
            ConsistencyArgs::Pair { .. } => "a pair",
        }
    }
}

/// Blowup descent: `Φ_c(X) + Φ_c(E) = Φ_c(C) + Φ_c(Y)`.
/// Mayer–Vietoris: `Φ_c(U ∩ V) + Φ_c(X) = Φ_c(U) + Φ_c(V)`.
/// Künneth: `Φ_c(X × Y) = Φ_c(X) · Φ_c(Y)`.
pub fn consistency_check(
    kind: ConsistencyKind,
    phi: &MeasureOnCompacts,
    args: ConsistencyArgs<'_>,
    provider: &CompactificationProvider,
) -> Result<CheckReport> {
    let ext = |o: &SiteObject| extend_measure(phi, o, provider);
    match (kind, args) {
        (ConsistencyKind::BlowupDescent, ConsistencyArgs::Square(sq)) => {
            let [e, y, c, x] = sq.corners().map(ext);
            let (e, y, c, x) = (e?, y?, c?, x?);
            let lhs = sum(&[&x, &e])?;
            let rhs = sum(&[&c, &y])?;
            Ok(report(kind.as_str(), phi, lhs, rhs, vec![e, y, c, x]))
        }
        (ConsistencyKind::MayerVietoris, ConsistencyArgs::Cover { x, u, v }) => {
            let (SiteObject::Toric(xt), SiteObject::Toric(ut), SiteObject::Toric(vt)) = (x, u, v) else {
                return Err(Error::Unsupported("Mayer–Vietoris on declared objects".into()));
            };
            let (ut, vt) = (same_fan(xt, ut)?, same_fan(xt, vt)?);
            for o in [&ut, &vt] {
                if !o.is_open_in(xt) {
                    return Err(Error::NotOpen(format!("{} in {}", o.describe(), xt.describe())));
                }
            }
            if ut.union(&vt)? != *xt {
                return Err(Error::IllShapedArgs("the opens do not cover X".into()));
            }
            let w: SiteObject = ut.intersect(&vt)?.into();
            let (rw, rx, ru, rv) = (ext(&w)?, ext(x)?, ext(u)?, ext(v)?);
            let lhs = sum(&[&rw, &rx])?;
            let rhs = sum(&[&ru, &rv])?;
            Ok(report(kind.as_str(), phi, lhs, rhs, vec![rw, rx, ru, rv]))
        }
        (ConsistencyKind::Kunneth, ConsistencyArgs::Pair { x, y }) => {
            if !phi.multiplicative {
                return Err(Error::NotMultiplicative(phi.name.clone()));
            }
            let (rx, ry) = (ext(x)?, ext(y)?);
            let rxy = match (x, y) {
                (SiteObject::Toric(a), SiteObject::Toric(b)) => ext(&a.product(b).into())?,
                (SiteObject::Declared(a), SiteObject::Declared(b)) if a.compact && b.compact => {
                    let cls = &x.class(&provider.relations)? * &y.class(&provider.relations)?;
                    let value = phi.of_class(&cls)?;
                    ExtensionResult {
                        input: format!("{} × {}", a.name, b.name),
                        measure: phi.name.clone(),
                        value: value.clone(),
                        depth: 0,
                        trace: vec![],
                        cross_check: Some(true),
                    }
                }
                _ => return Err(Error::Unsupported("Künneth needs two toric or two compact declared objects".into())),
            };
            let rhs = rx.value.mul(&ry.value)?;
            Ok(report(kind.as_str(), phi, rxy.value.clone(), rhs, vec![rxy, rx, ry]))
        }
        (kind, args) => Err(Error::IllShapedArgs(format!("{} does not take {}", kind.as_str(), args.shape()))),
    }
}
