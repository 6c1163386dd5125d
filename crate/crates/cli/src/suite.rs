//! Check-suite files.
//!
//! A suite is either a bare JSON list of checks or an object
//!
//! ```json
//! {
//!   "site": { "objects": [...], "squares": [...] },
//!   "relations": [ { "kind": "blowup", "slots": {...} } ],
//!   "compactifications": { "U": { "compact": "P2", "boundary": "P1 + pt" } },
//!   "registry": [ { "generator": "V", "measure": "euler", "value": [3] } ],
//!   "checks": [ { "kind": "additivity", "measure": "e_poly", "x": "P1", "u": "A1" } ]
//! }
//! ```
//!
//! Objects are named site objects, builtin fan names, or inline
//! `{ "fan": ..., "cones": [[ray indices], ...] }` references. Squares are
//! site square indices or `{ "base": fan, "ray": [..] }` star subdivisions.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::Deserialize;

use cutpaste::csupport::{
    additivity_check, consistency_check, extend_measure, independence_check, CompactificationChoice,
    CompactificationProvider, ConsistencyArgs, ConsistencyKind, MeasureOnCompacts, ToricCompletion,
};
use cutpaste::kring::{parse_expr, Compactification, CompactificationTable, RelationRecord, RelationSet};
use cutpaste::measures::{MeasureRegistry, MeasureSpec, Registration};
use cutpaste::site::{BackendRef, DistinguishedSquare, FanRef, SiteFile, SiteObject, SitePresentation, SpanMorphism};
use cutpaste::toric::{star_subdivide, Cone, Fan, ToricObject};
use cutpaste::{Error, Result};

use crate::report::{Record, Status};
use crate::run::{c_complete_record, check_record, dim_record, relation_record, validate_record};

#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum ObjectRef {
    Name(String),
    Inline(BackendRef),
}

#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum SquareRef {
    Index(usize),
    Subdivision { base: String, ray: Vec<i64> },
}

#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum CompletionRef {
    /// `auto`, `alternative`, or the name of a complete builtin fan.
    Named(String),
    Declared { compact: String, boundary: String },
}

#[derive(Clone, Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum CheckArgs {
    Additivity { x: ObjectRef, u: ObjectRef },
    Independence { object: ObjectRef, completions: [CompletionRef; 2] },
    BlowupDescent { square: SquareRef },
    MayerVietoris { x: ObjectRef, u: ObjectRef, v: ObjectRef },
    Kunneth { x: ObjectRef, y: ObjectRef },
    Relation { square: SquareRef },
    CComplete { square: SquareRef, morphism: String, depth: Option<usize> },
    DimCompatible { square: SquareRef },
    Validate { square: SquareRef },
    Extend { object: ObjectRef },
}

impl CheckArgs {
    fn kind(&self) -> &'static str {
        match self {
            CheckArgs::Additivity { .. } => "additivity",
            CheckArgs::Independence { .. } => "independence",
            CheckArgs::BlowupDescent { .. } => "blowup_descent",
            CheckArgs::MayerVietoris { .. } => "mayer_vietoris",
            CheckArgs::Kunneth { .. } => "kunneth",
            CheckArgs::Relation { .. } => "square_relation",
            CheckArgs::CComplete { .. } => "c_complete",
            CheckArgs::DimCompatible { .. } => "dim_compatible",
            CheckArgs::Validate { .. } => "validate_square",
            CheckArgs::Extend { .. } => "extend",
        }
    }

    fn uses_measures(&self) -> bool {
        !matches!(
            self,
            CheckArgs::Relation { .. } | CheckArgs::CComplete { .. } | CheckArgs::DimCompatible { .. } | CheckArgs::Validate { .. }
        )
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum MeasureSel {
    One(String),
    Many(Vec<String>),
}

#[derive(Clone, Debug, Deserialize)]
pub struct CheckSpec {
    /// Defaults to the measures given on the command line.
    #[serde(default)]
    pub measure: Option<MeasureSel>,
    #[serde(flatten)]
    pub args: CheckArgs,
}

#[derive(Clone, Debug, Deserialize)]
pub struct CompactRecord {
    pub compact: String,
    pub boundary: String,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SuiteFile {
    #[serde(default)]
    pub site: Option<SiteFile>,
    #[serde(default)]
    pub relations: Vec<RelationRecord>,
    #[serde(default)]
    pub compactifications: BTreeMap<String, CompactRecord>,
    #[serde(default)]
    pub registry: Vec<Registration>,
    #[serde(default)]
    pub checks: Vec<CheckSpec>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum SuiteInput {
    List(Vec<CheckSpec>),
    Full(SuiteFile),
}

/// A loaded suite with its site, relations and compactifications resolved.
pub struct Suite {
    pub site: SitePresentation,
    pub provider: CompactificationProvider,
    pub registry: MeasureRegistry,
    pub checks: Vec<CheckSpec>,
}

/// `e_poly`, or `e_poly+perturbed` for the mutation fixture.
pub fn parse_measure(text: &str) -> Result<MeasureOnCompacts> {
    match text.trim().strip_suffix("+perturbed") {
        Some(base) => Ok(MeasureOnCompacts::perturbed(MeasureSpec::parse(base)?)),
        None => Ok(MeasureOnCompacts::builtin(MeasureSpec::parse(text)?)),
    }
}

impl Suite {
    pub fn from_json(text: &str) -> Result<Self> {
        let file = match serde_json::from_str::<SuiteInput>(text) {
            Ok(SuiteInput::List(checks)) => SuiteFile { checks, ..SuiteFile::default() },
            Ok(SuiteInput::Full(f)) => f,
            // Re-parse as the object form for a precise message.
            Err(_) => serde_json::from_str::<SuiteFile>(text)?,
        };
        Self::from_file(file)
    }

    pub fn from_file(file: SuiteFile) -> Result<Self> {
        let site = match &file.site {
            Some(s) => SitePresentation::from_file(s)?,
            None => SitePresentation::new(),
        };
        let mut relations = RelationSet::new();
        for (_, obj) in site.objects() {
            if let Some(d) = obj.as_declared() {
                if !d.name.is_empty() {
                    relations.declare(&d.name, d.dim, d.compact)?;
                }
            }
        }
        for r in &file.relations {
            relations.add_record(r)?;
        }
        let mut table = CompactificationTable::new();
        for (name, c) in &file.compactifications {
            let compact = parse_expr(&c.compact, &relations)?;
            let boundary = parse_expr(&c.boundary, &relations)?;
            table.insert(name, Compactification::new(compact, boundary));
        }
        let mut registry = MeasureRegistry::new();
        for r in &file.registry {
            registry.register(r)?;
        }
        let provider = CompactificationProvider::default().with_relations(relations).with_table(table);
        Ok(Suite { site, provider, registry, checks: file.checks })
    }

    fn object(&self, r: &ObjectRef) -> Result<SiteObject> {
        match r {
            ObjectRef::Name(n) => match self.site.object(n) {
                Some(o) => Ok(o.clone()),
                None => Ok(ToricObject::whole(Arc::new(Fan::builtin(n)?)).into()),
            },
            ObjectRef::Inline(b) => {
                let fan = Arc::new(match &b.fan {
                    FanRef::Builtin(n) => Fan::builtin(n)?,
                    FanRef::Inline(f) => Fan::from_file(f)?,
                });
                Ok(match &b.cones {
                    None => ToricObject::whole(fan),
                    Some(cs) => ToricObject::from_cones(fan, &cs.iter().map(|c| Cone::new(c.clone())).collect::<Vec<_>>())?,
                }
                .into())
            }
        }
    }

    fn square(&self, r: &SquareRef) -> Result<DistinguishedSquare> {
        match r {
            SquareRef::Index(i) => self
                .site
                .squares()
                .get(*i)
                .cloned()
                .ok_or_else(|| Error::Schema(format!("no square #{i} in the site"))),
            SquareRef::Subdivision { base, ray } => Ok(star_subdivide(&Arc::new(Fan::builtin(base)?), ray)?.square),
        }
    }

    fn choice(&self, obj: &SiteObject, c: &CompletionRef) -> Result<CompactificationChoice> {
        match c {
            CompletionRef::Declared { compact, boundary } => {
                let d = obj
                    .as_declared()
                    .ok_or_else(|| Error::Schema("expression compactifications need a declared object".into()))?;
                let rels = &self.provider.relations;
                Ok(CompactificationChoice::Declared {
                    open: d.name.clone(),
                    compact: parse_expr(compact, rels)?,
                    boundary: parse_expr(boundary, rels)?,
                })
            }
            CompletionRef::Named(n) => {
                let toric = match n.as_str() {
                    "auto" => ToricCompletion::Auto,
                    "alternative" => ToricCompletion::Alternative,
                    name => ToricCompletion::Fixed(Arc::new(Fan::builtin(name)?)),
                };
                CompactificationProvider { toric, ..self.provider.clone() }.compactify(obj)
            }
        }
    }

    fn measures(&self, spec: &CheckSpec, defaults: &[MeasureOnCompacts]) -> Result<Vec<MeasureOnCompacts>> {
        let chosen = match &spec.measure {
            None => defaults.to_vec(),
            Some(MeasureSel::One(m)) => vec![parse_measure(m)?],
            Some(MeasureSel::Many(ms)) => ms.iter().map(|m| parse_measure(m)).collect::<Result<_>>()?,
        };
        Ok(chosen.into_iter().map(|m| m.with_registry(self.registry.clone())).collect())
    }

    fn subject(&self, args: &CheckArgs) -> String {
        let o = |r: &ObjectRef| match r {
            ObjectRef::Name(n) => n.clone(),
            ObjectRef::Inline(b) => serde_json::to_string(b).unwrap_or_default(),
        };
        let s = |r: &SquareRef| match r {
            SquareRef::Index(i) => format!("square#{i}"),
            SquareRef::Subdivision { base, ray } => format!("Bl({base};{ray:?})"),
        };
        match args {
            CheckArgs::Additivity { x, u } => format!("{} ⊇ {}", o(x), o(u)),
            CheckArgs::Independence { object, .. } | CheckArgs::Extend { object } => o(object),
            CheckArgs::MayerVietoris { x, u, v } => format!("{} = {} ∪ {}", o(x), o(u), o(v)),
            CheckArgs::Kunneth { x, y } => format!("{} × {}", o(x), o(y)),
            CheckArgs::CComplete { square, morphism, .. } => format!("{} <- {morphism}", s(square)),
            CheckArgs::BlowupDescent { square }
            | CheckArgs::Relation { square }
            | CheckArgs::DimCompatible { square }
            | CheckArgs::Validate { square } => s(square),
        }
    }

    /// Records for every check, in file order. Schema problems inside one
    /// check become failed records of that check.
    pub fn run(&self, defaults: &[MeasureOnCompacts], depth: usize, trace: bool) -> Vec<Record> {
        let mut out = Vec::new();
        for spec in &self.checks {
            let kind = spec.args.kind();
            let subject = self.subject(&spec.args);
            let measures = if spec.args.uses_measures() { self.measures(spec, defaults) } else { Ok(vec![]) };
            match measures.and_then(|ms| self.run_one(&spec.args, &subject, &ms, depth, trace)) {
                Ok(recs) => out.extend(recs),
                Err(e) => out.push(Record::new(kind, &subject, Status::Fail).reason(e.to_string())),
            }
        }
        out
    }

    fn run_one(&self, args: &CheckArgs, subject: &str, ms: &[MeasureOnCompacts], depth: usize, trace: bool) -> Result<Vec<Record>> {
        let p = &self.provider;
        let each = |f: &dyn Fn(&MeasureOnCompacts) -> Result<cutpaste::csupport::CheckReport>| {
            ms.iter().map(|phi| check_record(args.kind(), subject, phi, f(phi), trace)).collect::<Vec<_>>()
        };
        Ok(match args {
            CheckArgs::Additivity { x, u } => {
                let (x, u) = (self.object(x)?, self.object(u)?);
                each(&|phi| additivity_check(phi, &x, &u, p))
            }
            CheckArgs::Independence { object, completions } => {
                let obj = self.object(object)?;
                let a = self.choice(&obj, &completions[0])?;
                let b = self.choice(&obj, &completions[1])?;
                each(&|phi| independence_check(phi, &obj, &a, &b, p))
            }
            CheckArgs::BlowupDescent { square } => {
                let sq = self.square(square)?;
                each(&|phi| consistency_check(ConsistencyKind::BlowupDescent, phi, ConsistencyArgs::Square(&sq), p))
            }
            CheckArgs::MayerVietoris { x, u, v } => {
                let (x, u, v) = (self.object(x)?, self.object(u)?, self.object(v)?);
                each(&|phi| consistency_check(ConsistencyKind::MayerVietoris, phi, ConsistencyArgs::Cover { x: &x, u: &u, v: &v }, p))
            }
            CheckArgs::Kunneth { x, y } => {
                let (x, y) = (self.object(x)?, self.object(y)?);
                each(&|phi| consistency_check(ConsistencyKind::Kunneth, phi, ConsistencyArgs::Pair { x: &x, y: &y }, p))
            }
            CheckArgs::Extend { object } => {
                let obj = self.object(object)?;
                ms.iter()
                    .map(|phi| match extend_measure(phi, &obj, p) {
                        Ok(r) => {
                            let ok = r.cross_check != Some(false);
                            let rec = Record::pass_if("extend", subject, ok).measure(&phi.name).sides(&r.value, "");
                            rec.trace(serde_json::to_value(&r).expect("extension serializes"))
                        }
                        Err(e) => check_record("extend", subject, phi, Err(e), trace),
                    })
                    .collect()
            }
            CheckArgs::Relation { square } => vec![relation_record(subject, &self.square(square)?, &p.relations)],
            CheckArgs::DimCompatible { square } => vec![dim_record(subject, &self.square(square)?)],
            CheckArgs::Validate { square } => vec![validate_record(subject, &self.square(square)?)],
            CheckArgs::CComplete { square, morphism, depth: d } => {
                let sq = self.square(square)?;
                let f = match (morphism.as_str(), self.site.morphism(morphism)) {
                    (_, Some(f)) => f.clone(),
                    ("identity", None) => SpanMorphism::identity(&sq.x),
                    (name, None) => return Err(Error::Schema(format!("no morphism `{name}` in the site"))),
                };
                let mut site = self.site.clone();
                if matches!(square, SquareRef::Subdivision { .. }) {
                    site.add_square(sq.clone());
                }
                vec![c_complete_record(subject, &site, &sq, &f, d.unwrap_or(depth))]
            }
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_suites() {
        assert!(Suite::from_json("[]").unwrap().checks.is_empty());
        assert!(Suite::from_json("{}").unwrap().checks.is_empty());
        assert!(Suite::from_json(r#"{"bogus": 1}"#).is_err());
    }

    #[test]
    fn toric_checks_pass() {
        let s = Suite::from_json(
            r#"[
              {"kind": "additivity", "x": "P1", "u": "A1"},
              {"kind": "independence", "object": "A2", "completions": ["P2", "P1xP1"]},
              {"kind": "blowup_descent", "square": {"base": "P2", "ray": [1, 1]}},
              {"kind": "relation", "square": {"base": "P2", "ray": [1, 1]}},
              {"kind": "extend", "object": "Gm"}
            ]"#,
        )
        .unwrap();
        let recs = s.run(&[parse_measure("e_poly").unwrap()], 3, false);
        assert_eq!(recs.len(), 5);
        assert!(recs.iter().all(|r| r.status == Status::Pass), "{recs:?}");
        assert_eq!(recs[4].lhs.as_deref(), Some("uv - 1"));
    }

    #[test]
    fn perturbed_measure_breaks_descent() {
        let s = Suite::from_json(
            r#"[
              {"kind": "independence", "measure": "euler+perturbed", "object": "A2", "completions": ["P2", "P1xP1"]},
              {"kind": "additivity", "measure": "euler+perturbed", "x": "P1", "u": "A1"}
            ]"#,
        )
        .unwrap();
        let recs = s.run(&[], 3, false);
        assert_eq!(recs[0].status, Status::Fail);
        assert_eq!(recs[1].status, Status::Pass);
    }

    #[test]
    fn declared_site() {
        let s = Suite::from_json(
            r#"{
              "site": {"objects": [{"name": "U", "dim": 2}]},
              "compactifications": {"U": {"compact": "P2", "boundary": "P1"}},
              "checks": [{"kind": "extend", "measure": "euler", "object": "U"}]
            }"#,
        )
        .unwrap();
        let recs = s.run(&[], 3, false);
        assert_eq!(recs[0].status, Status::Pass, "{recs:?}");
        assert_eq!(recs[0].lhs.as_deref(), Some("1"));
    }
}
