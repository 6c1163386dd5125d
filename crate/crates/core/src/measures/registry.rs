use std::collections::BTreeMap;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use super::value::{MeasureSpec, MeasureValue};
use crate::error::{Error, Result};
use crate::poly::IntPoly;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Coeff {
    Int(i64),
    Text(String),
}

impl Coeff {
    fn to_bigint(&self) -> Result<BigInt> {
        match self {
            Coeff::Int(n) => Ok(BigInt::from(*n)),
            Coeff::Text(s) => s.trim().parse().map_err(|_| Error::Schema(format!("bad coefficient `{s}`"))),
        }
    }
}

/// One line of a registration file.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Registration {
    pub generator: String,
    pub measure: String,
    pub value: Vec<Coeff>,
}

/// User-supplied values of residual generators.
///
/// Keys are a generator and a measure name. The measure `point_count`
/// without a `q` holds a polynomial in `q` that serves every point count.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct MeasureRegistry {
    values: BTreeMap<(String, String), Vec<BigInt>>,
}

impl MeasureRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn insert(&mut self, generator: &str, measure: &str, coeffs: Vec<BigInt>) -> Result<()> {
        let key = if measure == "point_count" {
            measure.to_owned()
        } else {
            MeasureSpec::parse(measure)?.name()
        };
        self.values.insert((generator.to_owned(), key), coeffs);
        Ok(())
    }

    pub fn register(&mut self, r: &Registration) -> Result<()> {
        let coeffs = r.value.iter().map(Coeff::to_bigint).collect::<Result<Vec<_>>>()?;
        self.insert(&r.generator, &r.measure, coeffs)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let records: Vec<Registration> = serde_json::from_str(text)?;
        let mut reg = Self::new();
        for r in &records {
            reg.register(r)?;
        }
        Ok(reg)
    }

    pub fn to_records(&self) -> Vec<Registration> {
        self.values
            .iter()
            .map(|((g, m), c)| Registration {
                generator: g.clone(),
                measure: m.clone(),
                value: c.iter().map(|x| Coeff::Text(x.to_string())).collect(),
            })
            .collect()
    }

    pub fn lookup(&self, generator: &str, spec: MeasureSpec) -> Result<MeasureValue> {
        if let Some(c) = self.values.get(&(generator.to_owned(), spec.name())) {
            return spec.value_from_coeffs(c);
        }
        if let MeasureSpec::PointCount(q) = spec {
            if let Some(c) = self.values.get(&(generator.to_owned(), "point_count".to_owned())) {
                let p = IntPoly::from_coeffs(c.clone());
                return Ok(MeasureValue::Integer(p.eval(&BigInt::from(q))));
            }
        }
        Err(Error::UnresolvedResidual {
            generator: generator.to_owned(),
            measure: spec.name(),
        })
    }
}
