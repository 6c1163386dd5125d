//! Expression trees over varieties.

use std::fmt;

use num_bigint::BigInt;
use num_traits::Zero;

use super::class::KClass;
use crate::poly::IntPoly;

/// Cellular varieties whose classes the engine knows axiomatically.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Builtin {
    Point,
    Empty,
    /// Affine space `A^n`.
    Affine(u32),
    /// Projective space `P^n`.
    Projective(u32),
    /// The multiplicative group `Gm`.
    Torus,
}

impl Builtin {
    pub fn parse(name: &str) -> Option<Builtin> {
        match name {
            "pt" => return Some(Builtin::Point),
            "empty" => return Some(Builtin::Empty),
            "Gm" => return Some(Builtin::Torus),
            _ => {}
        }
        let (head, digits) = name.split_at(1);
        if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
            return None;
        }
        let n: u32 = digits.parse().ok()?;
        match head {
            "A" => Some(Builtin::Affine(n)),
            "P" => Some(Builtin::Projective(n)),
            _ => None,
        }
    }

    pub fn name(&self) -> String {
        match self {
            Builtin::Point => "pt".into(),
            Builtin::Empty => "empty".into(),
            Builtin::Affine(n) => format!("A{n}"),
            Builtin::Projective(n) => format!("P{n}"),
            Builtin::Torus => "Gm".into(),
        }
    }

    pub fn dim(&self) -> i64 {
        match self {
            Builtin::Point => 0,
            Builtin::Empty => -1,
            Builtin::Affine(n) | Builtin::Projective(n) => i64::from(*n),
            Builtin::Torus => 1,
        }
    }

    pub fn is_compact(&self) -> bool {
        match self {
            Builtin::Point | Builtin::Empty | Builtin::Projective(_) => true,
            Builtin::Affine(n) => *n == 0,
            Builtin::Torus => false,
        }
    }

    /// The cellular reduction: `[P^n] = 1 + L + ... + L^n`, `[A^n] = L^n`,
    /// `[Gm] = L - 1`.
    pub fn class(&self) -> KClass {
        match self {
            Builtin::Point => KClass::one(),
            Builtin::Empty => KClass::zero(),
            Builtin::Affine(n) => KClass::lefschetz_power(*n),
            Builtin::Projective(n) => {
                KClass::from_lefschetz_poly(&IntPoly::from_coeffs(vec![BigInt::from(1); *n as usize + 1]))
            }
            Builtin::Torus => &KClass::lefschetz() - &KClass::one(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Generator {
    Builtin(Builtin),
    Named(String),
}

impl Generator {
    pub fn from_name(name: &str) -> Generator {
        Builtin::parse(name).map_or_else(|| Generator::Named(name.to_owned()), Generator::Builtin)
    }

    pub fn name(&self) -> String {
        match self {
            Generator::Builtin(b) => b.name(),
            Generator::Named(n) => n.clone(),
        }
    }
}

/// Terms that denote a corner of a declared relation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum DerivedTerm {
    /// `Bl(X;C)`, the total space of a blowup.
    BlowupTotal,
    /// `E(X;C)`, the exceptional locus.
    Exceptional,
    /// `X ∖ U` of an open decomposition.
    OpenComplement,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum VarietyExpr {
    Int(BigInt),
    Lefschetz,
    Gen(Generator),
    Sum(Box<VarietyExpr>, Box<VarietyExpr>),
    Diff(Box<VarietyExpr>, Box<VarietyExpr>),
    Prod(Box<VarietyExpr>, Box<VarietyExpr>),
    /// A corner of relation `relation`, bound to the generator `name`
    /// occupying that slot.
    Derived {
        term: DerivedTerm,
        relation: usize,
        base: String,
        center: String,
        name: String,
    },
}

impl VarietyExpr {
    pub fn gen(name: &str) -> Self {
        VarietyExpr::Gen(Generator::from_name(name))
    }

    pub fn int(n: i64) -> Self {
        VarietyExpr::Int(BigInt::from(n))
    }

    pub fn sum(a: VarietyExpr, b: VarietyExpr) -> Self {
        VarietyExpr::Sum(Box::new(a), Box::new(b))
    }

    pub fn diff(a: VarietyExpr, b: VarietyExpr) -> Self {
        VarietyExpr::Diff(Box::new(a), Box::new(b))
    }

    pub fn prod(a: VarietyExpr, b: VarietyExpr) -> Self {
        VarietyExpr::Prod(Box::new(a), Box::new(b))
    }

    /// Number of nodes in the tree.
    pub fn size(&self) -> usize {
        let mut n = 0;
        self.visit(&mut |_| n += 1);
        n
    }

    /// Pre-order traversal with an explicit stack (trees can be deep).
    pub fn visit(&self, f: &mut impl FnMut(&VarietyExpr)) {
        let mut stack = vec![self];
        while let Some(e) = stack.pop() {
            f(e);
            match e {
                VarietyExpr::Sum(a, b) | VarietyExpr::Diff(a, b) | VarietyExpr::Prod(a, b) => {
                    stack.push(b);
                    stack.push(a);
                }
                _ => {}
            }
        }
    }

    /// Names of all generators referenced, including those bound by
    /// derived terms.
    pub fn generator_names(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.visit(&mut |e| match e {
            VarietyExpr::Gen(g) => out.push(g.name()),
            VarietyExpr::Derived { name, .. } => out.push(name.clone()),
            _ => {}
        });
        out.sort();
        out.dedup();
        out
    }

    fn precedence(&self) -> u8 {
        match self {
            VarietyExpr::Sum(..) | VarietyExpr::Diff(..) => 1,
            VarietyExpr::Prod(..) => 2,
            _ => 3,
        }
    }
}

impl Drop for VarietyExpr {
    // Left-nested sums from long inputs would otherwise recurse once per node.
    fn drop(&mut self) {
        let mut stack = Vec::new();
        let take = |e: &mut VarietyExpr, stack: &mut Vec<VarietyExpr>| {
            if let VarietyExpr::Sum(a, b) | VarietyExpr::Diff(a, b) | VarietyExpr::Prod(a, b) = e {
                stack.push(std::mem::replace(&mut **a, VarietyExpr::Lefschetz));
                stack.push(std::mem::replace(&mut **b, VarietyExpr::Lefschetz));
            }
        };
        take(self, &mut stack);
        while let Some(mut e) = stack.pop() {
            take(&mut e, &mut stack);
        }
    }
}

impl fmt::Display for VarietyExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn side(f: &mut fmt::Formatter<'_>, e: &VarietyExpr, min: u8) -> fmt::Result {
            if e.precedence() < min {
                write!(f, "({e})")
            } else {
                write!(f, "{e}")
            }
        }
        match self {
            VarietyExpr::Int(n) if n < &BigInt::zero() => write!(f, "(0 - {})", -n),
            VarietyExpr::Int(n) => write!(f, "{n}"),
            VarietyExpr::Lefschetz => write!(f, "L"),
            VarietyExpr::Gen(g) => write!(f, "{}", g.name()),
            VarietyExpr::Sum(a, b) => {
                side(f, a, 1)?;
                write!(f, " + ")?;
                side(f, b, 2)
            }
            VarietyExpr::Diff(a, b) => {
                side(f, a, 1)?;
                write!(f, " - ")?;
                side(f, b, 2)
            }
            VarietyExpr::Prod(a, b) => {
                side(f, a, 2)?;
                write!(f, "*")?;
                side(f, b, 3)
            }
            VarietyExpr::Derived {
                term,
                base,
                center,
                name,
                ..
            } => match term {
                DerivedTerm::BlowupTotal => write!(f, "Bl({base};{center})"),
                DerivedTerm::Exceptional => write!(f, "E({base};{center})"),
                DerivedTerm::OpenComplement => write!(f, "{name}"),
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_names_round_trip() {
        for name in ["pt", "empty", "Gm", "A0", "A3", "P1", "P12"] {
            let b = Builtin::parse(name).unwrap();
            assert_eq!(b.name(), name);
        }
        for name in ["A", "P", "Ax", "L", "X1", "PP2"] {
            assert!(Builtin::parse(name).is_none(), "{name}");
        }
    }

    #[test]
    fn builtin_dimensions() {
        assert_eq!(Builtin::Empty.dim(), -1);
        assert_eq!(Builtin::Projective(3).dim(), 3);
        assert!(!Builtin::Affine(1).is_compact());
        assert!(Builtin::Affine(0).is_compact());
    }
}
