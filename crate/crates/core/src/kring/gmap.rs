//! Passing between the open-decomposition presentation and the compact
//! (abstract blowup) presentation.
//!
//! `g_map` rewrites every non-compact generator `U` as `[X] - [X ∖ U]` for a
//! chosen compactification `X`, recursively, until only compact generators
//! remain. `f_map` is the forgetful direction: a compact-only expression read
//! as a class in K₀(Var).

use std::collections::BTreeMap;

use super::class::KClass;
use super::expr::{Builtin, Generator, VarietyExpr};
use super::normalize::Normalizer;
use super::relations::RelationSet;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Compactification {
    /// Expression for the compact variety `X`.
    pub compact: VarietyExpr,
    /// Expression for `X ∖ U`.
    pub boundary: VarietyExpr,
}

impl Compactification {
    pub fn new(compact: VarietyExpr, boundary: VarietyExpr) -> Self {
        Self { compact, boundary }
    }
}

/// Compactifications keyed by generator name. Builtin non-compact
/// generators fall back to `A^n ⊂ P^n`, `Gm ⊂ P1` and `L = A1 ⊂ P1`
/// unless overridden.
#[derive(Clone, Debug, Default)]
pub struct CompactificationTable {
    entries: BTreeMap<String, Compactification>,
}

impl CompactificationTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, name: &str, c: Compactification) {
        self.entries.insert(name.to_owned(), c);
    }

    pub fn with(mut self, name: &str, c: Compactification) -> Self {
        self.insert(name, c);
        self
    }

    /// The entry for `name`, or the builtin default.
    pub fn get(&self, name: &str) -> Option<Compactification> {
        if let Some(c) = self.entries.get(name) {
            return Some(c.clone());
        }
        let g = |s: &str| VarietyExpr::gen(s);
        match name {
            "L" => Some(Compactification::new(g("P1"), g("pt"))),
            _ => match Builtin::parse(name)? {
                Builtin::Affine(n) if n > 0 => {
                    let boundary = if n == 1 { Builtin::Point } else { Builtin::Projective(n - 1) };
                    Some(Compactification::new(
                        VarietyExpr::Gen(Generator::Builtin(Builtin::Projective(n))),
                        VarietyExpr::Gen(Generator::Builtin(boundary)),
                    ))
                }
                Builtin::Torus => Some(Compactification::new(g("P1"), VarietyExpr::sum(g("pt"), g("pt")))),
                _ => None,
            },
        }
    }
}

/// Output of [`g_map`]: an expression in compact generators only, and its
/// canonical class.
#[derive(Clone, Debug)]
pub struct CompactPresentation {
    pub expr: VarietyExpr,
    pub class: KClass,
}

/// Dimension of the variety an expression describes: sums take the
/// maximum, products add, the zero integer is empty.
pub fn expr_dim(expr: &VarietyExpr, rels: &RelationSet) -> Result<i64> {
    Ok(match expr {
        VarietyExpr::Int(n) => {
            if n == &num_bigint::BigInt::from(0) {
                -1
            } else {
                0
            }
        }
        VarietyExpr::Lefschetz => 1,
        VarietyExpr::Gen(g) => {
            let name = g.name();
            rels.dim_of(&name).ok_or(Error::MissingDimension(name))?
        }
        VarietyExpr::Derived { name, .. } => rels.dim_of(name).ok_or_else(|| Error::MissingDimension(name.clone()))?,
        VarietyExpr::Sum(a, b) | VarietyExpr::Diff(a, b) => expr_dim(a, rels)?.max(expr_dim(b, rels)?),
        VarietyExpr::Prod(a, b) => {
            let (da, db) = (expr_dim(a, rels)?, expr_dim(b, rels)?);
            if da < 0 || db < 0 {
                -1
            } else {
                da + db
            }
        }
    })
}

fn compact_leaf(expr: &VarietyExpr, rels: &RelationSet) -> Option<bool> {
    match expr {
        VarietyExpr::Lefschetz => Some(false),
        VarietyExpr::Gen(g) => rels.is_compact(&g.name()),
        VarietyExpr::Derived { name, .. } => rels.is_compact(name),
        _ => None,
    }
}

/// True when every generator of `expr` is compact.
pub fn is_compact_expr(expr: &VarietyExpr, rels: &RelationSet) -> bool {
    let mut ok = true;
    expr.visit(&mut |e| {
        if compact_leaf(e, rels) == Some(false) {
            ok = false;
        }
    });
    ok
}

fn leaf_name(e: &VarietyExpr) -> String {
    match e {
        VarietyExpr::Lefschetz => "L".into(),
        VarietyExpr::Gen(g) => g.name(),
        VarietyExpr::Derived { name, .. } => name.clone(),
        _ => unreachable!(),
    }
}

fn substitute(expr: &VarietyExpr, rels: &RelationSet, table: &CompactificationTable, depth: usize) -> Result<VarietyExpr> {
    if depth > 64 {
        return Err(Error::DimensionPrecondition(
            "compactification boundaries do not reach compact generators".into(),
        ));
    }
    Ok(match expr {
        VarietyExpr::Sum(a, b) => VarietyExpr::sum(
            substitute(a, rels, table, depth)?,
            substitute(b, rels, table, depth)?,
        ),
        VarietyExpr::Diff(a, b) => VarietyExpr::diff(
            substitute(a, rels, table, depth)?,
            substitute(b, rels, table, depth)?,
        ),
        VarietyExpr::Prod(a, b) => VarietyExpr::prod(
            substitute(a, rels, table, depth)?,
            substitute(b, rels, table, depth)?,
        ),
        leaf if compact_leaf(leaf, rels) == Some(false) => {
            let name = leaf_name(leaf);
            let c = table.get(&name).ok_or_else(|| Error::MissingCompactification(name.clone()))?;
            if !is_compact_expr(&c.compact, rels) {
                return Err(Error::DimensionPrecondition(format!(
                    "compactification of `{name}` is not compact: {}",
                    c.compact
                )));
            }
            let dim_u = if name == "L" { 1 } else { rels.dim_of(&name).unwrap_or(-1) };
            let dim_x = expr_dim(&c.compact, rels)?;
            let dim_b = expr_dim(&c.boundary, rels)?;
            if dim_x != dim_u {
                return Err(Error::DimensionPrecondition(format!(
                    "`{name}` has dimension {dim_u} but its compactification {} has dimension {dim_x}",
                    c.compact
                )));
            }
            if dim_b >= dim_x {
                return Err(Error::DimensionPrecondition(format!(
                    "boundary {} of `{name}` has dimension {dim_b}, not below {dim_x}",
                    c.boundary
                )));
            }
            VarietyExpr::diff(c.compact.clone(), substitute(&c.boundary, rels, table, depth + 1)?)
        }
        other => other.clone(),
    })
}

/// Rewrites `expr` into compact generators via `table` and normalizes.
pub fn g_map(expr: &VarietyExpr, rels: &RelationSet, table: &CompactificationTable) -> Result<CompactPresentation> {
    let out = substitute(expr, rels, table, 0)?;
    debug_assert!(is_compact_expr(&out, rels));
    let class = Normalizer::new(rels)?.normalize(&out)?;
    Ok(CompactPresentation { expr: out, class })
}

/// The forgetful map: a compact-only expression read in K₀(Var).
pub fn f_map(expr: &VarietyExpr, rels: &RelationSet) -> Result<KClass> {
    if !is_compact_expr(expr, rels) {
        return Err(Error::IllShapedArgs(format!("`{expr}` mentions a non-compact generator")));
    }
    Normalizer::new(rels)?.normalize(expr)
}
