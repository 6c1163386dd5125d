//! Canonical elements of the Grothendieck ring.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Serialize, Serializer};

use crate::poly::IntPoly;

use super::expr::VarietyExpr;

/// A monomial `L^lefschetz * g_1 * ... * g_k` in the Lefschetz class and
/// irreducible generators. `generators` is a sorted multiset.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial {
    pub generators: Vec<String>,
    pub lefschetz: u32,
}

impl Monomial {
    fn unit() -> Self {
        Self {
            generators: Vec::new(),
            lefschetz: 0,
        }
    }

    fn times(&self, other: &Monomial) -> Monomial {
        let mut generators = Vec::with_capacity(self.generators.len() + other.generators.len());
        generators.extend_from_slice(&self.generators);
        generators.extend_from_slice(&other.generators);
        generators.sort();
        Monomial {
            generators,
            lefschetz: self.lefschetz + other.lefschetz,
        }
    }
}

/// Canonical form of a class in K₀(Var).
///
/// Terms are keyed by [`Monomial`] in a `BTreeMap`, so pure Lefschetz terms
/// (empty generator multiset) sort first and the residual terms follow in
/// lexicographic order of their generator multisets. Zero coefficients are
/// never stored; two equal classes therefore have identical representations.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct KClass {
    terms: BTreeMap<Monomial, BigInt>,
}

impl KClass {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::integer(1)
    }

    pub fn integer(n: impl Into<BigInt>) -> Self {
        let mut c = Self::zero();
        c.add_term(Monomial::unit(), n.into());
        c
    }

    /// `L^k`.
    pub fn lefschetz_power(k: u32) -> Self {
        let mut c = Self::zero();
        c.add_term(
            Monomial {
                generators: Vec::new(),
                lefschetz: k,
            },
            BigInt::one(),
        );
        c
    }

    pub fn lefschetz() -> Self {
        Self::lefschetz_power(1)
    }

    /// An irreducible generator kept symbolically.
    pub fn generator(name: &str) -> Self {
        let mut c = Self::zero();
        c.add_term(
            Monomial {
                generators: vec![name.to_owned()],
                lefschetz: 0,
            },
            BigInt::one(),
        );
        c
    }

    /// Embeds an integer polynomial in `L`.
    pub fn from_lefschetz_poly(p: &IntPoly) -> Self {
        let mut c = Self::zero();
        for (k, a) in p.coeffs().iter().enumerate() {
            c.add_term(
                Monomial {
                    generators: Vec::new(),
                    lefschetz: k as u32,
                },
                a.clone(),
            );
        }
        c
    }

    fn add_term(&mut self, m: Monomial, c: BigInt) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &BigInt)> {
        self.terms.iter()
    }

    /// Exponent of `L` to coefficient, for terms without residual generators.
    pub fn lefschetz_part(&self) -> BTreeMap<u32, BigInt> {
        self.terms
            .iter()
            .filter(|(m, _)| m.generators.is_empty())
            .map(|(m, c)| (m.lefschetz, c.clone()))
            .collect()
    }

    /// Terms that mention at least one irreducible generator.
    pub fn residual(&self) -> impl Iterator<Item = (&Monomial, &BigInt)> {
        self.terms.iter().filter(|(m, _)| !m.generators.is_empty())
    }

    pub fn is_lefschetz_polynomial(&self) -> bool {
        self.residual().next().is_none()
    }

    /// The class as a polynomial in `L`, if it has no residual terms.
    pub fn as_lefschetz_poly(&self) -> Option<IntPoly> {
        if !self.is_lefschetz_polynomial() {
            return None;
        }
        let part = self.lefschetz_part();
        let deg = part.keys().next_back().copied().unwrap_or(0) as usize;
        let mut coeffs = vec![BigInt::zero(); deg + 1];
        for (k, c) in part {
            coeffs[k as usize] = c;
        }
        Some(IntPoly::from_coeffs(coeffs))
    }

    /// Residual generator names, deduplicated and sorted.
    pub fn residual_generators(&self) -> Vec<&str> {
        let mut names: Vec<&str> = self
            .residual()
            .flat_map(|(m, _)| m.generators.iter().map(String::as_str))
            .collect();
        names.sort_unstable();
        names.dedup();
        names
    }

    /// Ring homomorphism out of the free polynomial ring: `L` goes to
    /// `lefschetz`, each residual generator through `generator`.
    pub fn substitute<T, E>(
        &self,
        zero: T,
        integer: impl Fn(&BigInt) -> T,
        lefschetz: &T,
        mut generator: impl FnMut(&str) -> Result<T, E>,
        add: impl Fn(T, T) -> Result<T, E>,
        mul: impl Fn(&T, &T) -> Result<T, E>,
    ) -> Result<T, E>
    where
        T: Clone,
    {
        let mut acc = zero;
        let mut powers: Vec<T> = vec![integer(&BigInt::one())];
        for (m, c) in &self.terms {
            while powers.len() <= m.lefschetz as usize {
                let next = mul(powers.last().unwrap(), lefschetz)?;
                powers.push(next);
            }
            let mut term = mul(&integer(c), &powers[m.lefschetz as usize])?;
            for g in &m.generators {
                term = mul(&term, &generator(g)?)?;
            }
            acc = add(acc, term)?;
        }
        Ok(acc)
    }

    /// An expression whose normal form is this class (`L` appears as the
    /// literal Lefschetz symbol).
    pub fn to_expr(&self) -> VarietyExpr {
        use super::expr::Generator;
        let mut out: Option<VarietyExpr> = None;
        for (m, c) in &self.terms {
            let mut term = VarietyExpr::Int(c.abs());
            for _ in 0..m.lefschetz {
                term = VarietyExpr::Prod(Box::new(term), Box::new(VarietyExpr::Lefschetz));
            }
            for g in &m.generators {
                let gen = Generator::from_name(g);
                term = VarietyExpr::Prod(Box::new(term), Box::new(VarietyExpr::Gen(gen)));
            }
            out = Some(match (out, c.is_negative()) {
                (None, false) => term,
                (None, true) => {
                    VarietyExpr::Diff(Box::new(VarietyExpr::Int(BigInt::zero())), Box::new(term))
                }
                (Some(acc), false) => VarietyExpr::Sum(Box::new(acc), Box::new(term)),
                (Some(acc), true) => VarietyExpr::Diff(Box::new(acc), Box::new(term)),
            });
        }
        out.unwrap_or(VarietyExpr::Int(BigInt::zero()))
    }
}

impl Add for &KClass {
    type Output = KClass;
    fn add(self, rhs: &KClass) -> KClass {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }
}

impl Sub for &KClass {
    type Output = KClass;
    fn sub(self, rhs: &KClass) -> KClass {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), -c);
        }
        out
    }
}

impl Mul for &KClass {
    type Output = KClass;
    fn mul(self, rhs: &KClass) -> KClass {
        let mut out = KClass::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                out.add_term(ma.times(mb), ca * cb);
            }
        }
        out
    }
}

impl Neg for &KClass {
    type Output = KClass;
    fn neg(self) -> KClass {
        KClass {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }
}

impl Add for KClass {
    type Output = KClass;
    fn add(self, rhs: KClass) -> KClass {
        &self + &rhs
    }
}

impl Sub for KClass {
    type Output = KClass;
    fn sub(self, rhs: KClass) -> KClass {
        &self - &rhs
    }
}

impl Mul for KClass {
    type Output = KClass;
    fn mul(self, rhs: KClass) -> KClass {
        &self * &rhs
    }
}

impl fmt::Display for KClass {
    /// Lefschetz part in decreasing degree, then residual terms.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let pure = self.terms.iter().filter(|(m, _)| m.generators.is_empty()).rev();
        let mixed = self.residual();
        let mut first = true;
        for (m, c) in pure.chain(mixed) {
            let neg = c.is_negative();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            }
            first = false;
            let a = c.abs();
            let mut factors: Vec<String> = Vec::new();
            match m.lefschetz {
                0 => {}
                1 => factors.push("L".into()),
                k => factors.push(format!("L^{k}")),
            }
            factors.extend(m.generators.iter().cloned());
            if factors.is_empty() {
                write!(f, "{a}")?;
            } else {
                if !a.is_one() {
                    write!(f, "{a}*")?;
                }
                write!(f, "{}", factors.join("*"))?;
            }
        }
        Ok(())
    }
}

impl Serialize for KClass {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_form_drops_cancelled_terms() {
        let l = KClass::lefschetz();
        let x = KClass::generator("X");
        let c = &(&l + &x) - &x;
        assert_eq!(c, l);
        assert!(c.is_lefschetz_polynomial());
    }

    #[test]
    fn residual_terms_carry_lefschetz_factors() {
        let c = &KClass::lefschetz() * &KClass::generator("X");
        assert!(!c.is_lefschetz_polynomial());
        assert_eq!(c.to_string(), "L*X");
        assert_eq!(c.residual_generators(), vec!["X"]);
    }

    #[test]
    fn display_orders_by_decreasing_degree() {
        let p = KClass::from_lefschetz_poly(&IntPoly::from_i64s(&[1, 1, 1]));
        assert_eq!(p.to_string(), "L^2 + L + 1");
        let q = &KClass::integer(-2) + &KClass::lefschetz();
        assert_eq!(q.to_string(), "L - 2");
    }

    #[test]
    fn lefschetz_poly_round_trip() {
        let p = IntPoly::from_i64s(&[3, 0, -2, 5]);
        assert_eq!(KClass::from_lefschetz_poly(&p).as_lefschetz_poly(), Some(p));
        assert_eq!(KClass::zero().as_lefschetz_poly(), Some(IntPoly::zero()));
    }
}
