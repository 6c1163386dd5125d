use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::ser::SerializeMap;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::poly::IntPoly;

/// A builtin motivic measure, named by the value it gives to `L`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum MeasureSpec {
    /// `L ↦ 1`.
    Euler,
    /// `L ↦ uv`.
    EPoly,
    /// `L ↦ t²`.
    VirtualPoincare,
    /// `L ↦ q`.
    PointCount(u64),
}

impl MeasureSpec {
    /// Accepts `euler`, `e`/`e_poly`, `poincare`/`virtual_poincare`, and
    /// `count:<q>` or `point_count(<q>)`.
    pub fn parse(text: &str) -> Result<MeasureSpec> {
        let t = text.trim();
        let bad = || Error::Schema(format!("unknown measure `{t}`"));
        match t {
            "euler" | "chi" => return Ok(MeasureSpec::Euler),
            "e" | "e_poly" | "epoly" => return Ok(MeasureSpec::EPoly),
            "poincare" | "virtual_poincare" => return Ok(MeasureSpec::VirtualPoincare),
            _ => {}
        }
        let q = t
            .strip_prefix("count:")
            .or_else(|| t.strip_prefix("point_count(").and_then(|r| r.strip_suffix(')')))
            .ok_or_else(bad)?;
        let q: u64 = q.trim().parse().map_err(|_| bad())?;
        if q < 2 {
            return Err(Error::Schema(format!("point count needs q >= 2, got {q}")));
        }
        Ok(MeasureSpec::PointCount(q))
    }

    pub fn name(&self) -> String {
        match self {
            MeasureSpec::Euler => "euler".into(),
            MeasureSpec::EPoly => "e_poly".into(),
            MeasureSpec::VirtualPoincare => "virtual_poincare".into(),
            MeasureSpec::PointCount(q) => format!("point_count({q})"),
        }
    }

    /// Euler, E-polynomial, virtual Poincaré and point counts at 2, 3, 5.
    pub fn builtins() -> Vec<MeasureSpec> {
        vec![
            MeasureSpec::Euler,
            MeasureSpec::EPoly,
            MeasureSpec::VirtualPoincare,
            MeasureSpec::PointCount(2),
            MeasureSpec::PointCount(3),
            MeasureSpec::PointCount(5),
        ]
    }

    /// True for a point count at a q that is not a prime power. Such values
    /// are formal evaluations, not counts over a finite field.
    pub fn is_formal(&self) -> bool {
        match self {
            MeasureSpec::PointCount(q) => !is_prime_power(*q),
            _ => false,
        }
    }

    pub fn zero(&self) -> MeasureValue {
        self.integer(&BigInt::zero())
    }

    pub fn one(&self) -> MeasureValue {
        self.integer(&BigInt::one())
    }

    pub fn integer(&self, n: &BigInt) -> MeasureValue {
        match self {
            MeasureSpec::Euler | MeasureSpec::PointCount(_) => MeasureValue::Integer(n.clone()),
            MeasureSpec::EPoly => MeasureValue::Hodge(IntPoly::constant(n.clone())),
            MeasureSpec::VirtualPoincare => MeasureValue::Poincare(IntPoly::constant(n.clone())),
        }
    }

    /// Image of the Lefschetz class.
    pub fn lefschetz(&self) -> MeasureValue {
        match self {
            MeasureSpec::Euler => MeasureValue::Integer(BigInt::one()),
            MeasureSpec::PointCount(q) => MeasureValue::Integer(BigInt::from(*q)),
            MeasureSpec::EPoly => MeasureValue::Hodge(IntPoly::monomial(1, 1)),
            MeasureSpec::VirtualPoincare => MeasureValue::Poincare(IntPoly::monomial(1, 2)),
        }
    }

    /// Reads a registered coefficient list. Polynomial measures take it as
    /// coefficients in their variable (`uv` or `t`); integer measures need
    /// a single entry.
    pub fn value_from_coeffs(&self, coeffs: &[BigInt]) -> Result<MeasureValue> {
        match self {
            MeasureSpec::EPoly => Ok(MeasureValue::Hodge(IntPoly::from_coeffs(coeffs.to_vec()))),
            MeasureSpec::VirtualPoincare => Ok(MeasureValue::Poincare(IntPoly::from_coeffs(coeffs.to_vec()))),
            _ => match coeffs {
                [] => Ok(self.zero()),
                [c] => Ok(MeasureValue::Integer(c.clone())),
                _ => Err(Error::Schema(format!(
                    "measure {} takes a single integer value, got {} coefficients",
                    self.name(),
                    coeffs.len()
                ))),
            },
        }
    }
}

impl fmt::Display for MeasureSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

fn is_prime_power(q: u64) -> bool {
    if q < 2 {
        return false;
    }
    let p = (2..=q).find(|p| q.is_multiple_of(*p)).expect("q >= 2 has a prime factor");
    let mut r = q;
    while r.is_multiple_of(p) {
        r /= p;
    }
    r == 1
}

/// The value of a measure: an integer, a polynomial in `t`, or a
/// polynomial in `uv`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum MeasureValue {
    Integer(BigInt),
    Poincare(IntPoly),
    Hodge(IntPoly),
}

impl MeasureValue {
    pub fn kind(&self) -> &'static str {
        match self {
            MeasureValue::Integer(_) => "integer",
            MeasureValue::Poincare(_) => "poincare",
            MeasureValue::Hodge(_) => "e_poly",
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            MeasureValue::Integer(n) => n.is_zero(),
            MeasureValue::Poincare(p) | MeasureValue::Hodge(p) => p.is_zero(),
        }
    }

    pub fn as_integer(&self) -> Option<&BigInt> {
        match self {
            MeasureValue::Integer(n) => Some(n),
            _ => None,
        }
    }

    pub fn as_poly(&self) -> Option<&IntPoly> {
        match self {
            MeasureValue::Integer(_) => None,
            MeasureValue::Poincare(p) | MeasureValue::Hodge(p) => Some(p),
        }
    }

    fn zip(&self, other: &MeasureValue, op: &str, n: impl Fn(&BigInt, &BigInt) -> BigInt, p: impl Fn(&IntPoly, &IntPoly) -> IntPoly) -> Result<MeasureValue> {
        Ok(match (self, other) {
            (MeasureValue::Integer(a), MeasureValue::Integer(b)) => MeasureValue::Integer(n(a, b)),
            (MeasureValue::Poincare(a), MeasureValue::Poincare(b)) => MeasureValue::Poincare(p(a, b)),
            (MeasureValue::Hodge(a), MeasureValue::Hodge(b)) => MeasureValue::Hodge(p(a, b)),
            _ => {
                return Err(Error::MeasureMismatch(format!(
                    "{} {op} {}",
                    self.kind(),
                    other.kind()
                )))
            }
        })
    }

    pub fn add(&self, other: &MeasureValue) -> Result<MeasureValue> {
        self.zip(other, "+", |a, b| a + b, |a, b| a + b)
    }

    pub fn sub(&self, other: &MeasureValue) -> Result<MeasureValue> {
        self.zip(other, "-", |a, b| a - b, |a, b| a - b)
    }

    pub fn mul(&self, other: &MeasureValue) -> Result<MeasureValue> {
        self.zip(other, "*", |a, b| a * b, |a, b| a * b)
    }

    pub fn neg(&self) -> MeasureValue {
        match self {
            MeasureValue::Integer(n) => MeasureValue::Integer(-n),
            MeasureValue::Poincare(p) => MeasureValue::Poincare(-p),
            MeasureValue::Hodge(p) => MeasureValue::Hodge(-p),
        }
    }

    /// Substitutes `uv ↦ q` in an E-polynomial.
    pub fn specialize(&self, q: &BigInt) -> Result<BigInt> {
        match self {
            MeasureValue::Hodge(p) => Ok(p.eval(q)),
            other => Err(Error::MeasureMismatch(format!("cannot specialize a {} value", other.kind()))),
        }
    }
}

impl fmt::Display for MeasureValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MeasureValue::Integer(n) => write!(f, "{n}"),
            MeasureValue::Poincare(p) => p.fmt_with("t", f),
            MeasureValue::Hodge(p) => p.fmt_with("uv", f),
        }
    }
}

impl Serialize for MeasureValue {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut m = s.serialize_map(Some(3))?;
        m.serialize_entry("kind", self.kind())?;
        m.serialize_entry("text", &self.to_string())?;
        match self {
            MeasureValue::Integer(n) => m.serialize_entry("coeffs", &[n.to_string()])?,
            MeasureValue::Poincare(p) | MeasureValue::Hodge(p) => {
                let c: Vec<String> = p.coeffs().iter().map(BigInt::to_string).collect();
                m.serialize_entry("coeffs", &c)?
            }
        }
        m.end()
    }
}
