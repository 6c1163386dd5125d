use serde::Serialize;

use super::compactify::{CompactificationChoice, CompactificationProvider};
use super::measure::MeasureOnCompacts;
use crate::error::{Error, Result};
use crate::kring::{is_compact_expr, Normalizer, VarietyExpr};
use crate::measures::MeasureValue;
use crate::site::{DeclaredObject, SiteObject};

/// One use of `Φ_c(U) = Φ(X̄) - Φ_c(X̄ ∖ U)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TraceStep {
    pub depth: usize,
    pub object: String,
    pub compact: String,
    pub boundary: String,
    pub compact_value: MeasureValue,
    pub boundary_value: MeasureValue,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ExtensionResult {
    pub input: String,
    pub measure: String,
    pub value: MeasureValue,
    /// Nesting depth of compactifications; 0 for compact input.
    pub depth: usize,
    pub trace: Vec<TraceStep>,
    /// Agreement with the measure applied to the class of the input, when
    /// that class is available.
    pub cross_check: Option<bool>,
}

struct Extender<'a> {
    phi: &'a MeasureOnCompacts,
    provider: &'a CompactificationProvider,
    trace: Vec<TraceStep>,
}

impl Extender<'_> {
    fn object(&mut self, obj: &SiteObject, choice: Option<&CompactificationChoice>, depth: usize) -> Result<(MeasureValue, usize)> {
        if obj.is_empty() {
            return Ok((self.phi.spec.zero(), 0));
        }
        if obj.is_compact() {
            return Ok((self.phi.evaluate(obj, &self.provider.relations)?, 0));
        }
        let owned;
        let choice = match choice {
            Some(c) => c,
            None => {
                owned = self.provider.compactify(obj)?;
                &owned
            }
        };
        let slot = self.trace.len();
        let (compact_value, boundary_value, used) = match choice {
            CompactificationChoice::Toric { compact, boundary, .. } => {
                let x = self.phi.evaluate(&compact.clone().into(), &self.provider.relations)?;
                let (b, used) = self.object(&boundary.clone().into(), None, depth + 1)?;
                (x, b, used)
            }
            CompactificationChoice::Declared { compact, boundary, .. } => {
                let (x, _) = self.expr(compact, depth + 1)?;
                let (b, used) = self.expr(boundary, depth + 1)?;
                (x, b, used)
            }
        };
        let summary = choice.summary();
        self.trace.insert(
            slot,
            TraceStep {
                depth,
                object: obj.describe(),
                compact: summary.compact,
                boundary: summary.boundary,
                compact_value: compact_value.clone(),
                boundary_value: boundary_value.clone(),
            },
        );
        Ok((compact_value.sub(&boundary_value)?, used + 1))
    }

    fn named(&mut self, name: &str, depth: usize) -> Result<(MeasureValue, usize)> {
        let rels = &self.provider.relations;
        let dim = rels.dim_of(name).ok_or_else(|| Error::MissingDimension(name.to_owned()))?;
        let compact = rels.is_compact(name).unwrap_or(false);
        self.object(&DeclaredObject::new(name, dim, compact).into(), None, depth)
    }

    fn expr(&mut self, e: &VarietyExpr, depth: usize) -> Result<(MeasureValue, usize)> {
        let spec = self.phi.spec;
        let rels = &self.provider.relations;
        match e {
            VarietyExpr::Int(n) => Ok((spec.integer(n), 0)),
            VarietyExpr::Lefschetz => {
                let c = self.provider.table.get("L").ok_or_else(|| Error::MissingCompactification("L".into()))?;
                let choice = CompactificationChoice::Declared {
                    open: "L".into(),
                    compact: c.compact,
                    boundary: c.boundary,
                };
                self.object(&DeclaredObject::new("L", 1, false).into(), Some(&choice), depth)
            }
            VarietyExpr::Gen(g) => self.named(&g.name(), depth),
            VarietyExpr::Sum(a, b) | VarietyExpr::Diff(a, b) => {
                let (x, dx) = self.expr(a, depth)?;
                let (y, dy) = self.expr(b, depth)?;
                let v = if matches!(e, VarietyExpr::Sum(..)) { x.add(&y)? } else { x.sub(&y)? };
                Ok((v, dx.max(dy)))
            }
            _ if is_compact_expr(e, rels) => {
                let cls = Normalizer::new(rels)?.normalize(e)?;
                Ok((self.phi.of_class(&cls)?, 0))
            }
            VarietyExpr::Prod(a, b) => {
                if !self.phi.multiplicative {
                    return Err(Error::NotMultiplicative(self.phi.name.clone()));
                }
                let (x, dx) = self.expr(a, depth)?;
                let (y, dy) = self.expr(b, depth)?;
                Ok((x.mul(&y)?, dx.max(dy)))
            }
            VarietyExpr::Derived { name, .. } => self.named(name, depth),
        }
    }
}

fn finish(phi: &MeasureOnCompacts, obj: &SiteObject, provider: &CompactificationProvider, ext: Extender<'_>, value: MeasureValue, depth: usize) -> ExtensionResult {
    let cross_check = obj
        .class(&provider.relations)
        .and_then(|c| phi.of_class(&c))
        .ok()
        .map(|v| v == value);
    ExtensionResult {
        input: obj.describe(),
        measure: phi.name.clone(),
        value,
        depth,
        trace: ext.trace,
        cross_check,
    }
}

/// `Φ_c(obj)`: `Φ(obj)` for compact input, otherwise `Φ(X̄) - Φ_c(X̄ ∖ obj)`
/// for the compactification supplied by `provider`.
pub fn extend_measure(phi: &MeasureOnCompacts, obj: &SiteObject, provider: &CompactificationProvider) -> Result<ExtensionResult> {
    let mut ext = Extender { phi, provider, trace: Vec::new() };
    let (value, depth) = ext.object(obj, None, 0)?;
    Ok(finish(phi, obj, provider, ext, value, depth))
}

/// As [`extend_measure`], with the outermost compactification fixed.
pub fn extend_with_choice(
    phi: &MeasureOnCompacts,
    obj: &SiteObject,
    choice: &CompactificationChoice,
    provider: &CompactificationProvider,
) -> Result<ExtensionResult> {
    let mut ext = Extender { phi, provider, trace: Vec::new() };
    let (value, depth) = ext.object(obj, Some(choice), 0)?;
    Ok(finish(phi, obj, provider, ext, value, depth))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kring::{Compactification, CompactificationTable, RelationSet};
    use crate::measures::MeasureSpec;
    use crate::poly::IntPoly;
    use crate::toric::{Fan, ToricObject};
    use std::sync::Arc;

    fn whole(name: &str) -> SiteObject {
        ToricObject::whole(Arc::new(Fan::builtin(name).unwrap())).into()
    }

    fn hodge(c: &[i64]) -> MeasureValue {
        MeasureValue::Hodge(IntPoly::from_i64s(c))
    }

    #[test]
    fn affine_line_and_torus() {
        let p = CompactificationProvider::default();
        let chi = MeasureOnCompacts::builtin(MeasureSpec::Euler);
        let r = extend_measure(&chi, &whole("A1"), &p).unwrap();
        assert_eq!(r.value, MeasureValue::Integer(1.into()));
        assert_eq!(r.trace[0].compact_value, MeasureValue::Integer(2.into()));
        assert_eq!(r.trace[0].boundary_value, MeasureValue::Integer(1.into()));
        assert_eq!(r.depth, 1);
        assert_eq!(r.cross_check, Some(true));

        let e = MeasureOnCompacts::builtin(MeasureSpec::EPoly);
        let r = extend_measure(&e, &whole("Gm"), &p).unwrap();
        assert_eq!(r.value, hodge(&[-1, 1]));
        assert_eq!(r.trace[0].boundary_value, hodge(&[2]));
    }

    #[test]
    fn compact_and_empty() {
        let p = CompactificationProvider::default();
        let e = MeasureOnCompacts::builtin(MeasureSpec::EPoly);
        let r = extend_measure(&e, &whole("P2"), &p).unwrap();
        assert_eq!(r.value, hodge(&[1, 1, 1]));
        assert!(r.trace.is_empty());
        assert_eq!(r.depth, 0);
        let empty = ToricObject::empty(Arc::new(Fan::builtin("P2").unwrap()));
        assert!(extend_measure(&e, &empty.into(), &p).unwrap().value.is_zero());
        assert!(extend_measure(&e, &DeclaredObject::empty().into(), &p).unwrap().value.is_zero());
    }

    #[test]
    fn declared_recursion() {
        let mut rels = RelationSet::new();
        rels.declare("U", 2, false).unwrap();
        rels.declare("B", 1, false).unwrap();
        // U ⊂ P2 with boundary B, and B ⊂ P1 with boundary two points.
        let table = CompactificationTable::new()
            .with("U", Compactification::new(VarietyExpr::gen("P2"), VarietyExpr::gen("B")))
            .with(
                "B",
                Compactification::new(VarietyExpr::gen("P1"), VarietyExpr::sum(VarietyExpr::gen("pt"), VarietyExpr::gen("pt"))),
            );
        let p = CompactificationProvider::default().with_relations(rels).with_table(table);
        let e = MeasureOnCompacts::builtin(MeasureSpec::EPoly);
        let r = extend_measure(&e, &DeclaredObject::new("U", 2, false).into(), &p).unwrap();
        assert_eq!(r.value, hodge(&[2, 0, 1]));
        assert_eq!(r.depth, 2);
        assert_eq!(r.trace.len(), 2);
        assert_eq!(r.trace[1].depth, 1);
        assert_eq!(r.cross_check, None);
        let r = extend_measure(&e, &DeclaredObject::new("A2", 2, false).into(), &p).unwrap();
        assert_eq!(r.value, hodge(&[0, 0, 1]));
        assert_eq!(r.cross_check, Some(true));
    }

    #[test]
    fn lefschetz_in_boundary() {
        let mut rels = RelationSet::new();
        rels.declare("V", 2, false).unwrap();
        let boundary = VarietyExpr::sum(VarietyExpr::Lefschetz, VarietyExpr::gen("pt"));
        let table = CompactificationTable::new().with("V", Compactification::new(VarietyExpr::gen("P2"), boundary));
        let p = CompactificationProvider::default().with_relations(rels).with_table(table);
        let chi = MeasureOnCompacts::builtin(MeasureSpec::Euler);
        let r = extend_measure(&chi, &DeclaredObject::new("V", 2, false).into(), &p).unwrap();
        assert_eq!(r.value, MeasureValue::Integer(1.into()));
        assert_eq!(r.depth, 2);
    }
}
