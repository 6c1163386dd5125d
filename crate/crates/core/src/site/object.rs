use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kring::{KClass, Normalizer, RelationSet, VarietyExpr};
use crate::toric::ToricObject;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Backend {
    Toric,
    Declared,
}

/// An object known only by its declared name, dimension and compactness.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct DeclaredObject {
    pub name: String,
    pub dim: i64,
    pub compact: bool,
}

impl DeclaredObject {
    pub fn new(name: &str, dim: i64, compact: bool) -> Self {
        Self {
            name: name.to_owned(),
            dim,
            compact,
        }
    }

    pub fn empty() -> Self {
        Self::new("empty", -1, true)
    }
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SiteObject {
    Toric(ToricObject),
    Declared(DeclaredObject),
}

impl fmt::Debug for SiteObject {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.describe())
    }
}

impl From<ToricObject> for SiteObject {
    fn from(o: ToricObject) -> Self {
        SiteObject::Toric(o)
    }
}

impl From<DeclaredObject> for SiteObject {
    fn from(o: DeclaredObject) -> Self {
        SiteObject::Declared(o)
    }
}

impl SiteObject {
    pub fn backend(&self) -> Backend {
        match self {
            SiteObject::Toric(_) => Backend::Toric,
            SiteObject::Declared(_) => Backend::Declared,
        }
    }

    pub fn dim(&self) -> i64 {
        match self {
            SiteObject::Toric(o) => o.dim(),
            SiteObject::Declared(d) => d.dim,
        }
    }

    pub fn is_compact(&self) -> bool {
        match self {
            SiteObject::Toric(o) => o.is_compact(),
            SiteObject::Declared(d) => d.compact,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.dim() == -1
    }

    pub fn as_toric(&self) -> Option<&ToricObject> {
        match self {
            SiteObject::Toric(o) => Some(o),
            SiteObject::Declared(_) => None,
        }
    }

    pub fn as_declared(&self) -> Option<&DeclaredObject> {
        match self {
            SiteObject::Declared(d) => Some(d),
            SiteObject::Toric(_) => None,
        }
    }

    /// Canonical key used for identity and deduplication.
    pub fn key(&self) -> String {
        match self {
            SiteObject::Toric(o) => format!("toric:{}", o.key()),
            SiteObject::Declared(d) => format!("declared:{}", d.name),
        }
    }

    pub fn describe(&self) -> String {
        match self {
            SiteObject::Toric(o) => o.describe(),
            SiteObject::Declared(d) => d.name.clone(),
        }
    }

    /// Class in K₀(Var): orbit decomposition on the toric backend,
    /// normalization of the generator on the declared backend.
    pub fn class(&self, rels: &RelationSet) -> Result<KClass> {
        match self {
            SiteObject::Toric(o) => Ok(o.class()),
            SiteObject::Declared(d) => {
                if d.dim == -1 {
                    return Ok(KClass::zero());
                }
                if !rels.is_known(&d.name) {
                    return Err(Error::UnknownGenerator {
                        name: d.name.clone(),
                        pos: 0,
                    });
                }
                Normalizer::new(rels)?.normalize(&VarietyExpr::gen(&d.name))
            }
        }
    }
}
