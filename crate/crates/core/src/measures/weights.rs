use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use serde::{Serialize, Serializer};

use super::value::MeasureValue;
use crate::error::{Error, Result};
use crate::site::SiteObject;
use crate::toric::Fan;

fn big_as_text<S: Serializer>(n: &BigInt, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&n.to_string())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WeightEntry {
    pub weight: usize,
    #[serde(serialize_with = "big_as_text")]
    pub coeff: BigInt,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WeightReport {
    pub weights: Vec<WeightEntry>,
    /// Only given for smooth complete toric varieties.
    pub purity: Option<bool>,
    /// Some weight enters with a negative sign.
    pub mixed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub h_vector: Option<Vec<String>>,
}

/// `h_k = Σ_{i ≥ k} (-1)^(i-k) C(i,k) f_{n-i}`, where `f_j` counts the
/// `j`-dimensional cones of a complete simplicial fan of rank `n`.
pub fn h_vector(f: &Fan) -> Vec<BigInt> {
    let n = f.rank();
    let faces = f.face_numbers();
    let fcount = |j: usize| BigInt::from(faces.get(j).copied().unwrap_or(0));
    (0..=n)
        .map(|k| {
            let mut h = BigInt::zero();
            for i in k..=n {
                let term = binomial(i, k) * fcount(n - i);
                if (i - k) % 2 == 0 {
                    h += term;
                } else {
                    h -= term;
                }
            }
            h
        })
        .collect()
}

fn binomial(n: usize, k: usize) -> BigInt {
    let mut acc = BigInt::from(1);
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

/// Weight table of an E-polynomial: the coefficient of `(uv)^k` sits at
/// weight `2k`.
pub fn weight_report(obj: &SiteObject, value: &MeasureValue) -> Result<WeightReport> {
    let MeasureValue::Hodge(p) = value else {
        return Err(Error::MeasureMismatch(format!(
            "weight table needs an e_poly value, got {}",
            value.kind()
        )));
    };
    let weights: Vec<WeightEntry> = p
        .coeffs()
        .iter()
        .enumerate()
        .filter(|(_, c)| !c.is_zero())
        .map(|(k, c)| WeightEntry { weight: 2 * k, coeff: c.clone() })
        .collect();
    let mixed = weights.iter().any(|w| w.coeff.is_negative());
    let smooth = obj.as_toric().filter(|o| o.is_smooth_complete_variety());
    let (purity, h) = match smooth {
        Some(o) => {
            let h = h_vector(o.fan());
            let matches = (0..h.len().max(p.coeffs().len())).all(|k| p.coeff(k) == h.get(k).cloned().unwrap_or_default());
            (Some(matches && !mixed), Some(h.iter().map(BigInt::to_string).collect()))
        }
        None => (None, None),
    };
    Ok(WeightReport {
        weights,
        purity,
        mixed,
        h_vector: h,
    })
}
