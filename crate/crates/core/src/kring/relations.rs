//! Declared generators and cut-and-paste relations between them.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::expr::Builtin;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RelationKind {
    Open,
    AbstractBlowup,
    SmoothBlowup,
}

impl RelationKind {
    /// Slot keys used in relation files, in a fixed order.
    pub fn slot_keys(self) -> &'static [&'static str] {
        match self {
            RelationKind::Open => &["X", "U", "Z"],
            RelationKind::AbstractBlowup => &["E", "Y", "C", "X"],
            RelationKind::SmoothBlowup => &["E", "Bl", "C", "X"],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Relation {
    /// `[whole] = [open] + [complement]`.
    Open {
        whole: String,
        open: String,
        complement: String,
    },
    /// `[exceptional] + [base] = [center] + [total]`.
    Blowup {
        smooth: bool,
        exceptional: String,
        total: String,
        center: String,
        base: String,
    },
}

impl Relation {
    pub fn kind(&self) -> RelationKind {
        match self {
            Relation::Open { .. } => RelationKind::Open,
            Relation::Blowup { smooth: true, .. } => RelationKind::SmoothBlowup,
            Relation::Blowup { smooth: false, .. } => RelationKind::AbstractBlowup,
        }
    }

    /// The relation as `sum c_i [name_i] = 0`, before merging repeated names.
    pub fn linear_form(&self) -> Vec<(&str, i64)> {
        match self {
            Relation::Open {
                whole,
                open,
                complement,
            } => vec![(whole, 1), (open, -1), (complement, -1)],
            Relation::Blowup {
                exceptional,
                total,
                center,
                base,
                ..
            } => vec![(exceptional, 1), (base, 1), (center, -1), (total, -1)],
        }
    }

    /// Slot names in the order of [`RelationKind::slot_keys`].
    pub fn slot_names(&self) -> Vec<&str> {
        match self {
            Relation::Open {
                whole,
                open,
                complement,
            } => vec![whole, open, complement],
            Relation::Blowup {
                exceptional,
                total,
                center,
                base,
                ..
            } => vec![exceptional, total, center, base],
        }
    }

    fn from_slots(kind: RelationKind, slots: &BTreeMap<String, String>) -> std::result::Result<Self, String> {
        let get = |k: &str| {
            slots
                .get(k)
                .cloned()
                .ok_or_else(|| format!("missing slot `{k}` for {kind:?}"))
        };
        for k in slots.keys() {
            if !kind.slot_keys().contains(&k.as_str()) {
                return Err(format!("unexpected slot `{k}` for {kind:?}"));
            }
        }
        Ok(match kind {
            RelationKind::Open => Relation::Open {
                whole: get("X")?,
                open: get("U")?,
                complement: get("Z")?,
            },
            RelationKind::AbstractBlowup | RelationKind::SmoothBlowup => Relation::Blowup {
                smooth: kind == RelationKind::SmoothBlowup,
                exceptional: get("E")?,
                total: get(if kind == RelationKind::SmoothBlowup { "Bl" } else { "Y" })?,
                center: get("C")?,
                base: get("X")?,
            },
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GeneratorDecl {
    pub dim: i64,
    pub compact: bool,
    /// Order of first declaration; breaks ties when orienting relations.
    pub index: usize,
}

/// One record of a relation file.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RelationRecord {
    pub kind: RelationKind,
    pub slots: BTreeMap<String, String>,
    #[serde(default)]
    pub dims: BTreeMap<String, i64>,
    #[serde(default)]
    pub compact: BTreeMap<String, bool>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RelationSet {
    relations: Vec<Relation>,
    generators: BTreeMap<String, GeneratorDecl>,
}

impl RelationSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn relations(&self) -> &[Relation] {
        &self.relations
    }

    pub fn generators(&self) -> &BTreeMap<String, GeneratorDecl> {
        &self.generators
    }

    pub fn generator(&self, name: &str) -> Option<&GeneratorDecl> {
        self.generators.get(name)
    }

    /// Declares a generator, or checks a repeated declaration against the
    /// first one.
    pub fn declare(&mut self, name: &str, dim: i64, compact: bool) -> Result<()> {
        let bad = |message: String| Error::InvalidRelation {
            index: usize::MAX,
            message,
        };
        if let Some(b) = Builtin::parse(name) {
            if b.dim() != dim || b.is_compact() != compact {
                return Err(bad(format!(
                    "builtin `{name}` has dim {} and compact={}",
                    b.dim(),
                    b.is_compact()
                )));
            }
            return Ok(());
        }
        if name == "L" || !is_name(name) {
            return Err(bad(format!("`{name}` is not a valid generator name")));
        }
        if dim < -1 {
            return Err(bad(format!("`{name}` has dimension {dim} < -1")));
        }
        let index = self.generators.len();
        match self.generators.get(name) {
            Some(d) if d.dim != dim || d.compact != compact => Err(bad(format!(
                "`{name}` redeclared with dim {dim}, compact={compact} (was dim {}, compact={})",
                d.dim, d.compact
            ))),
            Some(_) => Ok(()),
            None => {
                self.generators.insert(name.to_owned(), GeneratorDecl { dim, compact, index });
                Ok(())
            }
        }
    }

    /// Dimension of a builtin or declared generator.
    pub fn dim_of(&self, name: &str) -> Option<i64> {
        Builtin::parse(name)
            .map(|b| b.dim())
            .or_else(|| self.generators.get(name).map(|d| d.dim))
    }

    pub fn is_compact(&self, name: &str) -> Option<bool> {
        Builtin::parse(name)
            .map(|b| b.is_compact())
            .or_else(|| self.generators.get(name).map(|d| d.compact))
    }

    pub fn is_known(&self, name: &str) -> bool {
        self.dim_of(name).is_some()
    }

    /// Appends a relation whose slot generators are already declared.
    pub fn add(&mut self, relation: Relation) -> Result<usize> {
        let index = self.relations.len();
        let bad = |message: String| Error::InvalidRelation { index, message };
        for name in relation.slot_names() {
            if !self.is_known(name) {
                return Err(bad(format!("undeclared generator `{name}`")));
            }
        }
        let dim = |n: &str| self.dim_of(n).unwrap_or(-1);
        match &relation {
            Relation::Open {
                whole,
                open,
                complement,
            } => {
                if dim(open) > dim(whole) || dim(complement) > dim(whole) {
                    return Err(bad(format!(
                        "open decomposition pieces exceed dim({whole}) = {}",
                        dim(whole)
                    )));
                }
            }
            Relation::Blowup {
                exceptional,
                total,
                center,
                base,
                ..
            } => {
                if dim(center) > dim(base) {
                    return Err(bad(format!("dim({center}) > dim({base})")));
                }
                if dim(exceptional) > dim(total) {
                    return Err(bad(format!("dim({exceptional}) > dim({total})")));
                }
            }
        }
        self.relations.push(relation);
        Ok(index)
    }

    /// Declares the slot generators of `record` and appends its relation.
    pub fn add_record(&mut self, record: &RelationRecord) -> Result<usize> {
        let index = self.relations.len();
        let relation = Relation::from_slots(record.kind, &record.slots)
            .map_err(|message| Error::InvalidRelation { index, message })?;
        for key in record.kind.slot_keys() {
            let name = &record.slots[*key];
            if Builtin::parse(name).is_some() && !record.dims.contains_key(*key) {
                continue;
            }
            match (record.dims.get(*key), self.generators.get(name)) {
                (Some(&d), _) => {
                    let compact = record
                        .compact
                        .get(*key)
                        .copied()
                        .or_else(|| self.is_compact(name))
                        .unwrap_or(false);
                    self.declare(name, d, compact).map_err(|e| match e {
                        Error::InvalidRelation { message, .. } => Error::InvalidRelation { index, message },
                        other => other,
                    })?;
                }
                (None, Some(_)) => {}
                (None, None) => {
                    return Err(Error::InvalidRelation {
                        index,
                        message: format!("no dimension given for slot `{key}` (`{name}`)"),
                    })
                }
            }
        }
        self.add(relation)
    }

    /// Parses a relation file: a JSON array of relation records.
    pub fn from_json(text: &str) -> Result<Self> {
        let records: Vec<RelationRecord> = serde_json::from_str(text)?;
        let mut set = Self::new();
        for r in &records {
            set.add_record(r)?;
        }
        Ok(set)
    }

    pub fn to_records(&self) -> Vec<RelationRecord> {
        self.relations
            .iter()
            .map(|r| {
                let kind = r.kind();
                let mut slots = BTreeMap::new();
                let mut dims = BTreeMap::new();
                let mut compact = BTreeMap::new();
                for (key, name) in kind.slot_keys().iter().zip(r.slot_names()) {
                    slots.insert((*key).to_owned(), name.to_owned());
                    dims.insert((*key).to_owned(), self.dim_of(name).unwrap_or(-1));
                    compact.insert((*key).to_owned(), self.is_compact(name).unwrap_or(false));
                }
                RelationRecord {
                    kind,
                    slots,
                    dims,
                    compact,
                }
            })
            .collect()
    }

    /// The first blowup relation with the given base and center; smooth
    /// blowups take precedence over abstract ones.
    pub fn find_blowup(&self, base: &str, center: &str) -> Option<(usize, &Relation)> {
        let matches = |r: &&Relation| matches!(r, Relation::Blowup { base: b, center: c, .. } if b == base && c == center);
        let smooth = self
            .relations
            .iter()
            .enumerate()
            .find(|(_, r)| matches(r) && r.kind() == RelationKind::SmoothBlowup);
        smooth.or_else(|| self.relations.iter().enumerate().find(|(_, r)| matches(r)))
    }

    /// Adds the smooth blowup of `P^n` (n ≥ 2) at a point: exceptional
    /// divisor `P^(n-1)`, total space `BlPnpt`. Returns false when `base` is
    /// not such a space or a blowup of it at `pt` is already declared.
    pub fn add_point_blowup(&mut self, base: &str) -> Result<bool> {
        let Some(Builtin::Projective(n)) = Builtin::parse(base) else {
            return Ok(false);
        };
        if n < 2 || self.find_blowup(base, "pt").is_some() {
            return Ok(false);
        }
        let total = format!("Bl{base}pt");
        self.declare(&total, n as i64, true)?;
        self.add(Relation::Blowup {
            smooth: true,
            exceptional: format!("P{}", n - 1),
            total,
            center: "pt".into(),
            base: base.into(),
        })?;
        Ok(true)
    }

    pub fn find_open(&self, whole: &str, open: &str) -> Option<(usize, &Relation)> {
        self.relations.iter().enumerate().find(
            |(_, r)| matches!(r, Relation::Open { whole: w, open: o, .. } if w == whole && o == open),
        )
    }
}

pub(crate) fn is_name(s: &str) -> bool {
    let mut chars = s.chars();
    chars.next().is_some_and(|c| c.is_ascii_alphabetic()) && chars.all(|c| c.is_ascii_alphanumeric())
}
