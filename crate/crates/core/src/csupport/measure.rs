use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::kring::{projective_class, KClass, RelationSet};
use crate::measures::{apply_measure_with, MeasureRegistry, MeasureSpec, MeasureValue};
use crate::site::SiteObject;

/// A measure on compact objects: a ring substitution on classes, optionally
/// overridden by user values on declared objects.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MeasureOnCompacts {
    pub name: String,
    pub spec: MeasureSpec,
    pub registry: MeasureRegistry,
    /// Values of declared compact objects, by name.
    pub values: BTreeMap<String, MeasureValue>,
    pub multiplicative: bool,
    pub unital: bool,
    perturbed: bool,
}

impl MeasureOnCompacts {
    pub fn builtin(spec: MeasureSpec) -> Self {
        Self {
            name: spec.name(),
            spec,
            registry: MeasureRegistry::new(),
            values: BTreeMap::new(),
            multiplicative: true,
            unital: true,
            perturbed: false,
        }
    }

    /// The builtin measure with its value on every compact object of class
    /// `[P2]` raised by one. It is not additive on blowups and not
    /// multiplicative, so the checks have something to catch.
    pub fn perturbed(spec: MeasureSpec) -> Self {
        Self {
            name: format!("{}+perturbed", spec.name()),
            multiplicative: false,
            perturbed: true,
            ..Self::builtin(spec)
        }
    }

    pub fn with_registry(mut self, registry: MeasureRegistry) -> Self {
        self.registry = registry;
        self
    }

    pub fn with_value(mut self, name: &str, value: MeasureValue) -> Self {
        self.values.insert(name.to_owned(), value);
        self
    }

    pub fn is_perturbed(&self) -> bool {
        self.perturbed
    }

    /// Value on a compact object of class `cls`.
    pub fn of_class(&self, cls: &KClass) -> Result<MeasureValue> {
        let v = apply_measure_with(self.spec, cls, &self.registry)?;
        if self.perturbed && *cls == projective_class(2) {
            return v.add(&self.spec.one());
        }
        Ok(v)
    }

    /// Value on a compact object.
    pub fn evaluate(&self, obj: &SiteObject, rels: &RelationSet) -> Result<MeasureValue> {
        if !obj.is_compact() {
            return Err(Error::MeasureUndefined(format!(
                "{} is not compact; {} is only defined on compact objects",
                obj.describe(),
                self.name
            )));
        }
        if let SiteObject::Declared(d) = obj {
            if let Some(v) = self.values.get(&d.name) {
                return Ok(v.clone());
            }
        }
        self.of_class(&obj.class(rels)?)
    }
}
