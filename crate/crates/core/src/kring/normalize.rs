//! Rewriting variety expressions to canonical classes.
//!
//! Each relation is oriented toward the slot generator with the largest
//! `(dimension, declaration index)` among its non-builtin slots; that
//! generator is rewritten in terms of the other slots, which are strictly
//! smaller in the same order. Builtins reduce through their cellular
//! decompositions. A generator that is never a rewrite target stays in the
//! canonical form as a residual symbol.

use std::collections::{BTreeMap, BTreeSet};

use super::class::KClass;
use super::expr::{Builtin, Generator, VarietyExpr};
use super::relations::RelationSet;
use crate::error::{Error, Result};

pub const DEFAULT_REWRITE_BUDGET: usize = 1_000_000;

#[derive(Clone, Debug)]
struct Rule {
    relation: usize,
    /// `[target] = sum c [name]`.
    rhs: Vec<(String, i64)>,
}

/// Rewrite system built from a [`RelationSet`]. Construction orients every
/// relation, resolves every declared generator and checks that all relations
/// hold between the resulting normal forms.
#[derive(Clone, Debug)]
pub struct Normalizer<'a> {
    rels: &'a RelationSet,
    rules: BTreeMap<String, Rule>,
    classes: BTreeMap<String, KClass>,
    budget: usize,
}

fn merged_form(rels: &RelationSet, index: usize) -> BTreeMap<&str, i64> {
    let mut form: BTreeMap<&str, i64> = BTreeMap::new();
    for (name, c) in rels.relations()[index].linear_form() {
        *form.entry(name).or_default() += c;
    }
    form.retain(|_, c| *c != 0);
    form
}

impl<'a> Normalizer<'a> {
    pub fn new(rels: &'a RelationSet) -> Result<Self> {
        Self::with_budget(rels, DEFAULT_REWRITE_BUDGET)
    }

    pub fn with_budget(rels: &'a RelationSet, budget: usize) -> Result<Self> {
        let mut rules = BTreeMap::new();
        for index in 0..rels.relations().len() {
            let form = merged_form(rels, index);
            let target = form
                .keys()
                .filter(|n| Builtin::parse(n).is_none())
                .max_by_key(|n| {
                    let d = rels.generator(n).expect("relation slots are declared");
                    (d.dim, d.index)
                });
            let Some(&target) = target else { continue };
            let ct = form[target];
            if ct.abs() != 1 || rules.contains_key(target) {
                continue;
            }
            let rhs = form
                .iter()
                .filter(|(n, _)| **n != target)
                .map(|(n, c)| ((*n).to_owned(), -ct * c))
                .collect();
            rules.insert(target.to_owned(), Rule { relation: index, rhs });
        }

        let mut n = Normalizer {
            rels,
            rules,
            classes: BTreeMap::new(),
            budget,
        };
        let mut steps = 0;
        let names: Vec<String> = rels.generators().keys().cloned().collect();
        for name in &names {
            let mut active = BTreeSet::new();
            n.resolve(name, &mut steps, &mut active)?;
        }
        n.check_relations()?;
        Ok(n)
    }

    fn resolve(&mut self, name: &str, steps: &mut usize, active: &mut BTreeSet<String>) -> Result<KClass> {
        if let Some(b) = Builtin::parse(name) {
            return Ok(b.class());
        }
        if let Some(c) = self.classes.get(name) {
            return Ok(c.clone());
        }
        let decl = self.rels.generator(name).ok_or_else(|| Error::UnknownGenerator {
            name: name.to_owned(),
            pos: 0,
        })?;
        let class = if decl.dim == -1 {
            KClass::zero()
        } else if let Some(rule) = self.rules.get(name).cloned() {
            *steps += 1;
            if *steps > self.budget || !active.insert(name.to_owned()) {
                return Err(Error::Nontermination {
                    generator: name.to_owned(),
                    budget: self.budget,
                });
            }
            let mut acc = KClass::zero();
            for (other, c) in &rule.rhs {
                let k = self.resolve(other, steps, active)?;
                acc = &acc + &(&KClass::integer(*c) * &k);
            }
            active.remove(name);
            acc
        } else {
            KClass::generator(name)
        };
        self.classes.insert(name.to_owned(), class.clone());
        Ok(class)
    }

    fn check_relations(&self) -> Result<()> {
        for index in 0..self.rels.relations().len() {
            let mut total = KClass::zero();
            for (name, c) in merged_form(self.rels, index) {
                total = &total + &(&KClass::integer(c) * &self.class_of_name(name)?);
            }
            if !total.is_zero() {
                let rel = &self.rels.relations()[index];
                let targets: Vec<String> = rel
                    .slot_names()
                    .into_iter()
                    .filter_map(|n| self.rules.get(n).map(|r| format!("`{n}` by relation #{}", r.relation)))
                    .collect();
                return Err(Error::InconsistentRelation(format!(
                    "relation #{index} ({:?} on {}) leaves {total} after rewriting [{}]",
                    rel.kind(),
                    rel.slot_names().join(", "),
                    targets.join(", ")
                )));
            }
        }
        Ok(())
    }

    pub fn relations(&self) -> &RelationSet {
        self.rels
    }

    /// Relation index used to rewrite `name`, if any.
    pub fn rule_for(&self, name: &str) -> Option<usize> {
        self.rules.get(name).map(|r| r.relation)
    }

    pub fn class_of_name(&self, name: &str) -> Result<KClass> {
        if let Some(b) = Builtin::parse(name) {
            return Ok(b.class());
        }
        self.classes.get(name).cloned().ok_or_else(|| Error::UnknownGenerator {
            name: name.to_owned(),
            pos: 0,
        })
    }

    /// Canonical class of `expr`. Evaluation is iterative, so deep trees
    /// do not exhaust the stack.
    pub fn normalize(&self, expr: &VarietyExpr) -> Result<KClass> {
        enum Op<'e> {
            Visit(&'e VarietyExpr),
            Combine(&'e VarietyExpr),
        }
        let mut steps = 0usize;
        let mut ops = vec![Op::Visit(expr)];
        let mut values: Vec<KClass> = Vec::new();
        while let Some(op) = ops.pop() {
            match op {
                Op::Visit(e) => match e {
                    VarietyExpr::Sum(a, b) | VarietyExpr::Diff(a, b) | VarietyExpr::Prod(a, b) => {
                        ops.push(Op::Combine(e));
                        ops.push(Op::Visit(b));
                        ops.push(Op::Visit(a));
                    }
                    VarietyExpr::Int(n) => values.push(KClass::integer(n.clone())),
                    VarietyExpr::Lefschetz => values.push(KClass::lefschetz()),
                    VarietyExpr::Gen(Generator::Builtin(b)) => {
                        steps += 1;
                        values.push(b.class());
                    }
                    VarietyExpr::Gen(Generator::Named(name)) | VarietyExpr::Derived { name, .. } => {
                        steps += 1;
                        values.push(self.class_of_name(name)?);
                    }
                },
                Op::Combine(e) => {
                    let b = values.pop().expect("operand");
                    let a = values.pop().expect("operand");
                    values.push(match e {
                        VarietyExpr::Sum(..) => &a + &b,
                        VarietyExpr::Diff(..) => &a - &b,
                        _ => {
                            steps += 1;
                            &a * &b
                        }
                    });
                }
            }
            if steps > self.budget {
                return Err(Error::Nontermination {
                    generator: "<expression>".to_owned(),
                    budget: self.budget,
                });
            }
        }
        Ok(values.pop().unwrap_or_default())
    }
}

/// Convenience wrapper: builds the rewrite system for `rels` and normalizes.
pub fn normalize(expr: &VarietyExpr, rels: &RelationSet) -> Result<KClass> {
    Normalizer::new(rels)?.normalize(expr)
}

/// `[P^n]` as `1 + L + ... + L^n`.
pub fn projective_class(n: u32) -> KClass {
    Builtin::Projective(n).class()
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;
    use crate::kring::parse::parse_expr;
    use crate::kring::relations::Relation;
    use crate::poly::IntPoly;

    fn int_class(n: i64) -> KClass {
        KClass::integer(BigInt::from(n))
    }

    fn lpoly(c: &[i64]) -> KClass {
        KClass::from_lefschetz_poly(&IntPoly::from_i64s(c))
    }

    fn eval(text: &str, rels: &RelationSet) -> KClass {
        normalize(&parse_expr(text, rels).unwrap(), rels).unwrap()
    }

    fn p2_blowup() -> RelationSet {
        RelationSet::from_json(
            r#"[{"kind": "smooth_blowup",
                 "slots": {"E": "P1", "Bl": "F1", "C": "pt", "X": "P2"},
                 "dims": {"Bl": 2}, "compact": {"Bl": true}}]"#,
        )
        .unwrap()
    }

    #[test]
    fn cellular_examples() {
        let r = RelationSet::new();
        assert_eq!(eval("P2", &r), lpoly(&[1, 1, 1]));
        assert_eq!(eval("empty + pt*pt", &r), KClass::one());
        // (1+L)^2 - L^2
        assert_eq!(eval("P1*P1 - A2", &r), lpoly(&[1, 2]));
        assert_eq!(eval("Gm*Gm", &r), lpoly(&[1, -2, 1]));
    }

    #[test]
    fn blowup_rewrites_total_space() {
        let r = p2_blowup();
        assert_eq!(eval("Bl(P2;pt) + pt - E(P2;pt)", &r), lpoly(&[1, 1, 1]));
        assert_eq!(eval("Bl(P2;pt)", &r), lpoly(&[1, 2, 1]));
        let n = Normalizer::new(&r).unwrap();
        assert_eq!(n.rule_for("F1"), Some(0));
    }

    #[test]
    fn open_decomposition_rewrites_largest_slot() {
        let mut r = RelationSet::new();
        r.declare("X", 2, true).unwrap();
        r.declare("U", 2, false).unwrap();
        r.declare("D", 1, true).unwrap();
        r.add(Relation::Open {
            whole: "X".into(),
            open: "U".into(),
            complement: "D".into(),
        })
        .unwrap();
        let n = Normalizer::new(&r).unwrap();
        // U is declared after X with equal dimension, so U is the target.
        assert_eq!(n.rule_for("U"), Some(0));
        assert_eq!(n.class_of_name("U").unwrap(), &KClass::generator("X") - &KClass::generator("D"));
    }

    #[test]
    fn empty_dimension_generators_vanish() {
        let mut r = RelationSet::new();
        r.declare("Z", -1, true).unwrap();
        assert!(eval("Z + pt", &r) == KClass::one());
    }

    #[test]
    fn inconsistent_relations_are_detected() {
        let mut r = RelationSet::new();
        r.declare("Y", 2, true).unwrap();
        r.add(Relation::Blowup {
            smooth: false,
            exceptional: "P1".into(),
            total: "Y".into(),
            center: "pt".into(),
            base: "P2".into(),
        })
        .unwrap();
        // A second relation forcing a different value of [Y].
        r.add(Relation::Open {
            whole: "Y".into(),
            open: "A2".into(),
            complement: "pt".into(),
        })
        .unwrap();
        assert!(matches!(Normalizer::new(&r), Err(Error::InconsistentRelation(_))));

        let mut bad = RelationSet::new();
        bad.add(Relation::Open {
            whole: "P2".into(),
            open: "A2".into(),
            complement: "pt".into(),
        })
        .unwrap();
        assert!(matches!(Normalizer::new(&bad), Err(Error::InconsistentRelation(_))));
    }

    #[test]
    fn budget_guard() {
        // A chain X3 -> X2 -> X1 -> X0 of open decompositions.
        let mut r = RelationSet::new();
        for i in 0..4 {
            r.declare(&format!("X{i}"), i, true).unwrap();
        }
        for i in 1..4 {
            r.add(Relation::Open {
                whole: format!("X{i}"),
                open: format!("X{}", i - 1),
                complement: "pt".into(),
            })
            .unwrap();
        }
        assert!(Normalizer::with_budget(&r, 100).is_ok());
        assert!(matches!(
            Normalizer::with_budget(&r, 2),
            Err(Error::Nontermination { .. })
        ));
        let n = Normalizer::new(&r).unwrap();
        assert_eq!(n.class_of_name("X3").unwrap(), &KClass::generator("X0") + &int_class(3));
    }

    #[test]
    fn deep_left_chain_does_not_overflow() {
        let text = vec!["pt"; 20_000].join(" + ");
        let r = RelationSet::new();
        assert_eq!(eval(&text, &r), int_class(20_000));
    }
}
