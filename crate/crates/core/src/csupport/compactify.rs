use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::kring::{expr_dim, is_compact_expr, CompactificationTable, RelationSet, VarietyExpr};
use crate::site::SiteObject;
use crate::toric::{barycentric_ray, complete, star_subdivide, Fan, ToricObject};

/// How a toric object's fan is completed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ToricCompletion {
    /// [`complete`]: gap filling in rank ≤ 2, factor-wise for products.
    Auto,
    /// The automatic completion with one more star subdivision, at the
    /// barycenter of the first cone of dimension ≥ 2 away from the object.
    Alternative,
    /// A given complete fan that contains the object's cones.
    Fixed(Arc<Fan>),
}

/// Supplies a compactification for every non-compact object met during an
/// extension.
#[derive(Clone, Debug)]
pub struct CompactificationProvider {
    pub relations: RelationSet,
    pub table: CompactificationTable,
    pub toric: ToricCompletion,
}

impl Default for CompactificationProvider {
    fn default() -> Self {
        Self::new(ToricCompletion::Auto)
    }
}

impl CompactificationProvider {
    pub fn new(toric: ToricCompletion) -> Self {
        Self {
            relations: RelationSet::new(),
            table: CompactificationTable::new(),
            toric,
        }
    }

    pub fn with_relations(mut self, relations: RelationSet) -> Self {
        self.relations = relations;
        self
    }

    pub fn with_table(mut self, table: CompactificationTable) -> Self {
        self.table = table;
        self
    }

    pub fn complete_fan(&self, obj: &ToricObject) -> Result<Arc<Fan>> {
        let fan = obj.fan();
        match &self.toric {
            ToricCompletion::Auto => Ok(Arc::new(complete(fan)?)),
            ToricCompletion::Fixed(f) => Ok(f.clone()),
            ToricCompletion::Alternative => {
                let base = Arc::new(complete(fan)?);
                let hull = obj
                    .transport(&base)
                    .ok_or_else(|| Error::MissingCompactification(obj.describe()))?
                    .open_hull();
                let cone = (0..base.num_cones())
                    .find(|&c| base.cone(c).dim() >= 2 && !hull.contains(c))
                    .ok_or_else(|| {
                        Error::Unsupported(format!(
                            "no boundary cone of dimension at least 2 to subdivide for {}",
                            obj.describe()
                        ))
                    })?;
                Ok(star_subdivide(&base, &barycentric_ray(&base, cone))?.fan)
            }
        }
    }

    pub fn compactify(&self, obj: &SiteObject) -> Result<CompactificationChoice> {
        match obj {
            SiteObject::Toric(o) if o.is_compact() => CompactificationChoice::toric(o, o.fan()),
            SiteObject::Toric(o) => CompactificationChoice::toric(o, &self.complete_fan(o)?),
            SiteObject::Declared(d) if d.compact => Ok(CompactificationChoice::Declared {
                open: d.name.clone(),
                compact: VarietyExpr::gen(&d.name),
                boundary: VarietyExpr::int(0),
            }),
            SiteObject::Declared(d) => {
                let c = self
                    .table
                    .get(&d.name)
                    .ok_or_else(|| Error::MissingCompactification(d.name.clone()))?;
                let choice = CompactificationChoice::Declared {
                    open: d.name.clone(),
                    compact: c.compact,
                    boundary: c.boundary,
                };
                choice.validate(d.dim, &self.relations)?;
                Ok(choice)
            }
        }
    }
}

/// An open embedding of an object into a compact one, with the boundary.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CompactificationChoice {
    /// `open` and `boundary` partition `compact`, all in one complete fan.
    Toric {
        open: ToricObject,
        compact: ToricObject,
        boundary: ToricObject,
    },
    Declared {
        open: String,
        compact: VarietyExpr,
        boundary: VarietyExpr,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ChoiceSummary {
    pub open: String,
    pub compact: String,
    pub boundary: String,
}

impl CompactificationChoice {
    /// The closure of `obj` inside the complete fan `completion`.
    pub fn toric(obj: &ToricObject, completion: &Arc<Fan>) -> Result<Self> {
        if !completion.is_complete() && !obj.is_compact() {
            return Err(Error::MissingCompactification(format!(
                "{}: completion is not complete",
                obj.describe()
            )));
        }
        let open = obj
            .transport(completion)
            .ok_or_else(|| Error::MissingCompactification(format!("{}: completion does not contain it", obj.describe())))?;
        let compact = open.closure();
        let boundary = compact.minus(&open)?;
        if !open.is_empty() && boundary.dim() >= compact.dim() {
            return Err(Error::DimensionPrecondition(format!(
                "boundary of {} has dimension {}, not below {}",
                obj.describe(),
                boundary.dim(),
                compact.dim()
            )));
        }
        Ok(CompactificationChoice::Toric { open, compact, boundary })
    }

    fn validate(&self, dim: i64, rels: &RelationSet) -> Result<()> {
        let CompactificationChoice::Declared { open, compact, boundary } = self else {
            return Ok(());
        };
        if !is_compact_expr(compact, rels) {
            return Err(Error::DimensionPrecondition(format!(
                "compactification {compact} of `{open}` is not compact"
            )));
        }
        let (dx, db) = (expr_dim(compact, rels)?, expr_dim(boundary, rels)?);
        if dx != dim {
            return Err(Error::DimensionPrecondition(format!(
                "`{open}` has dimension {dim} but {compact} has dimension {dx}"
            )));
        }
        if db >= dx {
            return Err(Error::DimensionPrecondition(format!(
                "boundary {boundary} of `{open}` has dimension {db}, not below {dx}"
            )));
        }
        Ok(())
    }

    pub fn is_trivial(&self) -> bool {
        match self {
            CompactificationChoice::Toric { boundary, .. } => boundary.is_empty(),
            CompactificationChoice::Declared { boundary, .. } => *boundary == VarietyExpr::int(0),
        }
    }

    pub fn summary(&self) -> ChoiceSummary {
        match self {
            CompactificationChoice::Toric { open, compact, boundary } => ChoiceSummary {
                open: open.describe(),
                compact: compact.describe(),
                boundary: boundary.describe(),
            },
            CompactificationChoice::Declared { open, compact, boundary } => ChoiceSummary {
                open: open.clone(),
                compact: compact.to_string(),
                boundary: boundary.to_string(),
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::site::DeclaredObject;

    fn fan(name: &str) -> Arc<Fan> {
        Arc::new(Fan::builtin(name).unwrap())
    }

    #[test]
    fn toric_choices() {
        let a2 = ToricObject::whole(fan("A2"));
        let auto = CompactificationProvider::default().compactify(&a2.clone().into()).unwrap();
        let CompactificationChoice::Toric { compact, boundary, .. } = &auto else { panic!() };
        assert_eq!(compact.fan().as_ref(), &Fan::builtin("P2").unwrap());
        assert_eq!(boundary.dim(), 1);
        assert_eq!(boundary.cone_ids().len(), 3);

        let alt = CompactificationProvider::new(ToricCompletion::Alternative)
            .compactify(&a2.clone().into())
            .unwrap();
        let CompactificationChoice::Toric { compact, boundary, .. } = &alt else { panic!() };
        assert_eq!(compact.fan().rays().len(), 4);
        assert_eq!(boundary.cone_ids().len(), 5);

        let p1 = ToricObject::whole(fan("P1"));
        assert!(CompactificationProvider::default().compactify(&p1.into()).unwrap().is_trivial());
        let gm = ToricObject::whole(fan("Gm"));
        assert!(matches!(
            CompactificationProvider::new(ToricCompletion::Alternative).compactify(&gm.into()),
            Err(Error::Unsupported(_))
        ));
    }

    #[test]
    fn declared_choices() {
        let p = CompactificationProvider::default();
        let c = p.compactify(&DeclaredObject::new("A2", 2, false).into()).unwrap();
        assert_eq!(c.summary().compact, "P2");
        assert!(matches!(
            p.compactify(&DeclaredObject::new("U", 1, false).into()),
            Err(Error::MissingCompactification(_))
        ));
        let mut rels = RelationSet::new();
        rels.declare("U", 1, false).unwrap();
        let table = CompactificationTable::new().with(
            "U",
            crate::kring::Compactification::new(VarietyExpr::gen("P2"), VarietyExpr::gen("pt")),
        );
        let p = CompactificationProvider::default().with_relations(rels).with_table(table);
        assert!(matches!(
            p.compactify(&DeclaredObject::new("U", 1, false).into()),
            Err(Error::DimensionPrecondition(_))
        ));
    }
}
