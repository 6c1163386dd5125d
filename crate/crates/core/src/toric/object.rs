//! Torus-invariant locally closed subvarieties of a toric variety, as sets
//! of cones (one torus orbit per cone).

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use super::fan::{Cone, Fan, FanProperties};
use crate::error::{Error, Result};
use crate::kring::KClass;
use crate::poly::IntPoly;

/// A union of torus orbits `O(σ)` of `X(fan)`, closed under the
/// "between" relation so that it is locally closed.
///
/// The orbit `O(σ)` has dimension `rank - dim σ` and lies in the closure of
/// `O(τ)` exactly when `τ` is a face of `σ`. Open subsets are therefore
/// face-closed cone sets (subfans) and closed subsets are star-closed.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ToricObject {
    fan: Arc<Fan>,
    cones: BTreeSet<usize>,
}

impl fmt::Debug for ToricObject {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ToricObject({})", self.key())
    }
}

/// A fan together with its derived flags.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ToricVariety {
    pub fan: Arc<Fan>,
    pub properties: FanProperties,
}

impl ToricVariety {
    pub fn new(fan: Arc<Fan>) -> Self {
        let properties = fan.properties();
        Self { fan, properties }
    }
}

/// Output of [`open_subfan`].
#[derive(Clone, Debug)]
pub struct OpenSubfan {
    /// The subfan as a toric variety of its own.
    pub variety: ToricVariety,
    /// The same open, as a subobject of the ambient variety.
    pub open: ToricObject,
    /// The closed complement `X ∖ U`: cones of the fan outside the subfan.
    pub complement: ToricObject,
}

impl ToricObject {
    pub fn whole(fan: Arc<Fan>) -> Self {
        let cones = (0..fan.num_cones()).collect();
        Self { fan, cones }
    }

    pub fn empty(fan: Arc<Fan>) -> Self {
        Self {
            fan,
            cones: BTreeSet::new(),
        }
    }

    /// Checked constructor from cone ids of `fan`.
    pub fn new(fan: Arc<Fan>, cones: BTreeSet<usize>) -> Result<Self> {
        if cones.iter().any(|&c| c >= fan.num_cones()) {
            return Err(Error::NotSubset);
        }
        let o = Self { fan, cones };
        if !o.is_locally_closed() {
            return Err(Error::NotLocallyClosed);
        }
        Ok(o)
    }

    /// Builds the object from cones given by ray indices of `fan`.
    pub fn from_cones(fan: Arc<Fan>, cones: &[Cone]) -> Result<Self> {
        let ids: Option<BTreeSet<usize>> = cones.iter().map(|c| fan.cone_id(c)).collect();
        Self::new(fan, ids.ok_or(Error::NotSubset)?)
    }

    pub(crate) fn from_ids_unchecked(fan: Arc<Fan>, cones: BTreeSet<usize>) -> Self {
        debug_assert!(Self {
            fan: fan.clone(),
            cones: cones.clone()
        }
        .is_locally_closed());
        Self { fan, cones }
    }

    pub fn fan(&self) -> &Arc<Fan> {
        &self.fan
    }

    pub fn cone_ids(&self) -> &BTreeSet<usize> {
        &self.cones
    }

    pub fn contains(&self, id: usize) -> bool {
        self.cones.contains(&id)
    }

    pub fn is_empty(&self) -> bool {
        self.cones.is_empty()
    }

    pub fn is_whole(&self) -> bool {
        self.cones.len() == self.fan.num_cones()
    }

    pub fn rank(&self) -> usize {
        self.fan.rank()
    }

    fn face(&self, a: usize, b: usize) -> bool {
        self.fan.cone(a).is_face_of(self.fan.cone(b))
    }

    pub fn is_locally_closed(&self) -> bool {
        // σ ≤ τ ≤ ρ with σ, ρ in the set forces τ in the set.
        let n = self.fan.num_cones();
        self.cones.iter().all(|&s| {
            self.cones.iter().all(|&r| {
                s == r || !self.face(s, r) || (0..n).all(|t| !(self.face(s, t) && self.face(t, r)) || self.cones.contains(&t))
            })
        })
    }

    /// Open in `X(fan)`: closed under taking faces.
    pub fn is_open(&self) -> bool {
        self.cones.iter().all(|&c| self.fan.faces_of(c).iter().all(|f| self.cones.contains(f)))
    }

    /// Closed in `X(fan)`: closed under passing to cones containing a member.
    pub fn is_closed(&self) -> bool {
        self.cones.iter().all(|&c| self.fan.star(c).iter().all(|s| self.cones.contains(s)))
    }

    /// `self` is an open subobject of `other`.
    pub fn is_open_in(&self, other: &ToricObject) -> bool {
        self.same_fan(other)
            && self.cones.is_subset(&other.cones)
            && self.cones.iter().all(|&c| {
                self.fan.faces_of(c).iter().all(|f| !other.cones.contains(f) || self.cones.contains(f))
            })
    }

    /// `self` is a closed subobject of `other`.
    pub fn is_closed_in(&self, other: &ToricObject) -> bool {
        self.same_fan(other)
            && self.cones.is_subset(&other.cones)
            && self.cones.iter().all(|&c| {
                self.fan.star(c).iter().all(|s| !other.cones.contains(s) || self.cones.contains(s))
            })
    }

    pub fn same_fan(&self, other: &ToricObject) -> bool {
        Arc::ptr_eq(&self.fan, &other.fan) || self.fan == other.fan
    }

    /// Dimension: the largest orbit dimension `rank - dim σ`, or -1 if empty.
    pub fn dim(&self) -> i64 {
        self.cones
            .iter()
            .map(|&c| (self.fan.rank() - self.fan.cone(c).dim()) as i64)
            .max()
            .unwrap_or(-1)
    }

    /// Minimal cones: the generic orbits of the irreducible components.
    pub fn minimal_cones(&self) -> Vec<usize> {
        self.cones
            .iter()
            .copied()
            .filter(|&c| !self.cones.iter().any(|&d| d != c && self.face(d, c)))
            .collect()
    }

    /// Irreducible components, as closed subobjects of `self`.
    pub fn components(&self) -> Vec<ToricObject> {
        self.minimal_cones()
            .into_iter()
            .map(|m| {
                let cones = self.fan.star(m).into_iter().filter(|c| self.cones.contains(c)).collect();
                Self::from_ids_unchecked(self.fan.clone(), cones)
            })
            .collect()
    }

    /// Compact: closed, and every component's orbit closure is complete.
    pub fn is_compact(&self) -> bool {
        self.is_closed()
            && self.minimal_cones().into_iter().all(|m| {
                let tau = self.fan.cone(m).clone();
                self.fan.facets_paired(|c| tau.is_face_of(c))
            })
    }

    /// Closure in `X(fan)`.
    pub fn closure(&self) -> ToricObject {
        let mut cones = BTreeSet::new();
        for &c in &self.cones {
            cones.extend(self.fan.star(c));
        }
        Self::from_ids_unchecked(self.fan.clone(), cones)
    }

    /// Closure inside `ambient`, which must contain `self`.
    pub fn closure_in(&self, ambient: &ToricObject) -> ToricObject {
        let cl = self.closure();
        self.with_cones(cl.cones.intersection(&ambient.cones).copied().collect())
    }

    /// Smallest open subset of `X(fan)` containing `self`.
    pub fn open_hull(&self) -> ToricObject {
        let mut cones = BTreeSet::new();
        for &c in &self.cones {
            cones.extend(self.fan.faces_of(c));
        }
        Self::from_ids_unchecked(self.fan.clone(), cones)
    }

    fn with_cones(&self, cones: BTreeSet<usize>) -> ToricObject {
        Self::from_ids_unchecked(self.fan.clone(), cones)
    }

    /// `self ∖ other` for objects in the same fan. The result is locally
    /// closed when `other` is open or closed in `self`.
    pub fn minus(&self, other: &ToricObject) -> Result<ToricObject> {
        let cones = self.cones.difference(&other.cones).copied().collect();
        ToricObject::new(self.fan.clone(), cones)
    }

    pub fn intersect(&self, other: &ToricObject) -> Result<ToricObject> {
        ToricObject::new(self.fan.clone(), self.cones.intersection(&other.cones).copied().collect())
    }

    pub fn union(&self, other: &ToricObject) -> Result<ToricObject> {
        ToricObject::new(self.fan.clone(), self.cones.union(&other.cones).copied().collect())
    }

    /// `Σ_σ (L - 1)^(rank - dim σ)`.
    pub fn class(&self) -> KClass {
        let n = self.fan.rank();
        let mut counts = vec![0i64; n + 1];
        for &c in &self.cones {
            counts[n - self.fan.cone(c).dim()] += 1;
        }
        let torus = IntPoly::from_i64s(&[-1, 1]);
        let mut total = IntPoly::zero();
        for (k, &m) in counts.iter().enumerate() {
            if m != 0 {
                total = &total + &(&IntPoly::constant(m) * &torus.pow(k as u32));
            }
        }
        KClass::from_lefschetz_poly(&total)
    }

    /// The same cones, found by generators in another fan.
    pub fn transport(&self, fan: &Arc<Fan>) -> Option<ToricObject> {
        let ids: Option<BTreeSet<usize>> = self
            .cones
            .iter()
            .map(|&c| fan.find_cone(&self.fan.cone_vectors(self.fan.cone(c))))
            .collect();
        ToricObject::new(fan.clone(), ids?).ok()
    }

    /// `self × other` inside the product fan.
    pub fn product(&self, other: &ToricObject) -> ToricObject {
        let fan = Arc::new(self.fan.product(&other.fan));
        let (n, m) = (self.fan.rank(), other.fan.rank());
        let mut cones = BTreeSet::new();
        for &a in &self.cones {
            for &b in &other.cones {
                let mut gens: Vec<Vec<i64>> = self
                    .fan
                    .cone_vectors(self.fan.cone(a))
                    .into_iter()
                    .map(|v| v.into_iter().chain(std::iter::repeat_n(0, m)).collect())
                    .collect();
                gens.extend(
                    other
                        .fan
                        .cone_vectors(other.fan.cone(b))
                        .into_iter()
                        .map(|v| std::iter::repeat_n(0, n).chain(v).collect()),
                );
                cones.insert(fan.find_cone(&gens).expect("product cone"));
            }
        }
        Self::from_ids_unchecked(fan, cones)
    }

    /// Smooth and compact: a complete smooth fan taken whole. Orbit
    /// closures of proper faces are not examined.
    pub fn is_smooth_complete_variety(&self) -> bool {
        self.is_whole() && self.fan.is_complete() && self.fan.is_smooth()
    }

    /// Canonical text key.
    pub fn key(&self) -> String {
        let ids: Vec<String> = self.cones.iter().map(usize::to_string).collect();
        format!("{}{{{}}}", self.fan.key(), ids.join(","))
    }

    /// Short human-readable description.
    pub fn describe(&self) -> String {
        if self.is_whole() {
            return format!("X[{}]", fan_summary(&self.fan));
        }
        let cones: Vec<String> = self
            .cones
            .iter()
            .map(|&c| {
                let v = self.fan.cone_vectors(self.fan.cone(c));
                let parts: Vec<String> = v.iter().map(|r| format!("{r:?}")).collect();
                format!("<{}>", parts.join(""))
            })
            .collect();
        format!("X[{}]{{{}}}", fan_summary(&self.fan), cones.join(" "))
    }
}

fn fan_summary(f: &Fan) -> String {
    let rays: Vec<String> = f.rays().iter().map(|r| format!("{r:?}")).collect();
    format!("rank {}; {}", f.rank(), rays.join(" "))
}

/// The open subvariety given by a face-closed set of cones of `f`.
pub fn open_subfan(f: &Arc<Fan>, cone_subset: &[Cone]) -> Result<OpenSubfan> {
    let ids: Option<BTreeSet<usize>> = cone_subset.iter().map(|c| f.cone_id(c)).collect();
    let ids = ids.ok_or(Error::NotSubset)?;
    let open = ToricObject {
        fan: f.clone(),
        cones: ids,
    };
    if !open.is_open() {
        return Err(Error::NotFaceClosed);
    }
    let complement = ToricObject::whole(f.clone()).minus(&open)?;
    let variety = ToricVariety::new(Arc::new(f.subfan(&open.cones)));
    Ok(OpenSubfan {
        variety,
        open,
        complement,
    })
}

/// Class of the union of orbits of `cone_subset` (default: all cones).
pub fn class_of(f: &Arc<Fan>, cone_subset: Option<&[Cone]>) -> Result<KClass> {
    let Some(subset) = cone_subset else {
        return Ok(ToricObject::whole(f.clone()).class());
    };
    let ids: Option<BTreeSet<usize>> = subset.iter().map(|c| f.cone_id(c)).collect();
    // Any subset is allowed here, locally closed or not.
    Ok(ToricObject {
        fan: f.clone(),
        cones: ids.ok_or(Error::NotSubset)?,
    }
    .class())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fan(name: &str) -> Arc<Fan> {
        Arc::new(Fan::builtin(name).unwrap())
    }

    fn lpoly(c: &[i64]) -> KClass {
        KClass::from_lefschetz_poly(&IntPoly::from_i64s(c))
    }

    #[test]
    fn classes_of_builtins() {
        assert_eq!(class_of(&fan("P2"), None).unwrap(), lpoly(&[1, 1, 1]));
        assert_eq!(class_of(&fan("P2"), Some(&[])).unwrap(), KClass::zero());
        let p2 = fan("P2");
        let lines: Vec<Cone> = p2.cones()[1..].to_vec();
        assert_eq!(class_of(&p2, Some(&lines)).unwrap(), lpoly(&[0, 3]));
        assert_eq!(class_of(&fan("Gm"), None).unwrap(), lpoly(&[-1, 1]));
    }

    #[test]
    fn open_subfans() {
        let p1 = fan("P1");
        let plus = Cone::new(vec![p1.ray_id(&[1]).unwrap()]);
        let a1 = open_subfan(&p1, &[Cone::zero(), plus.clone()]).unwrap();
        assert_eq!(a1.variety.fan.as_ref(), &Fan::builtin("A1").unwrap());
        assert_eq!(a1.complement.class(), KClass::one());
        assert_eq!(open_subfan(&p1, &[plus]).unwrap_err(), Error::NotFaceClosed);
        let p2 = fan("P2");
        let torus = open_subfan(&p2, &[Cone::zero()]).unwrap();
        assert_eq!(torus.open.class(), lpoly(&[1, -2, 1]));
        assert_eq!(torus.complement.class(), lpoly(&[0, 3]));
        let all = open_subfan(&p2, p2.cones()).unwrap();
        assert!(all.complement.is_empty());
        assert_eq!(
            open_subfan(&p2, &[Cone::new(vec![7])]).unwrap_err(),
            Error::NotSubset
        );
    }

    #[test]
    fn compactness() {
        let p2 = fan("P2");
        assert!(ToricObject::whole(p2.clone()).is_compact());
        let line = ToricObject::new(p2.clone(), p2.star(1).into_iter().collect()).unwrap();
        assert!(line.is_compact());
        assert_eq!(line.dim(), 1);
        assert_eq!(line.class(), lpoly(&[1, 1]));
        let a2 = fan("A2");
        assert!(!ToricObject::whole(a2.clone()).is_compact());
        // The origin of A2 is a compact point.
        let origin = ToricObject::new(a2.clone(), [a2.num_cones() - 1].into()).unwrap();
        assert!(origin.is_compact());
        // A coordinate axis of A2 is closed but not compact.
        let axis = ToricObject::new(a2.clone(), a2.star(1).into_iter().collect()).unwrap();
        assert!(axis.is_closed() && !axis.is_compact());
        assert!(ToricObject::empty(a2).is_compact());
    }

    #[test]
    fn local_closedness_is_enforced() {
        let p1 = fan("P1");
        // Zero cone and one ray-orbit is open; zero cone alone is open; the
        // pair {zero, both rays} minus nothing is the whole space.
        assert!(ToricObject::new(p1.clone(), [0, 1].into()).is_ok());
        let a2 = fan("A2");
        // {0, quadrant} without the rays is not locally closed.
        assert_eq!(
            ToricObject::new(a2.clone(), [0, 3].into()).unwrap_err(),
            Error::NotLocallyClosed
        );
    }

    #[test]
    fn products() {
        let gm = ToricObject::whole(fan("Gm"));
        let sq = gm.product(&gm);
        assert_eq!(sq.class(), lpoly(&[1, -2, 1]));
        let p1 = ToricObject::whole(fan("P1"));
        let q = p1.product(&p1);
        assert_eq!(q.fan().as_ref(), &Fan::builtin("P1xP1").unwrap());
        assert!(q.is_compact());
    }

    #[test]
    fn closure_and_components() {
        let p2 = fan("P2");
        let two_lines: BTreeSet<usize> = p2.star(1).into_iter().chain(p2.star(2)).collect();
        let x = ToricObject::new(p2.clone(), two_lines).unwrap();
        assert_eq!(x.components().len(), 2);
        assert_eq!(x.class(), lpoly(&[1, 2]));
        let u = x.minus(&ToricObject::new(p2.clone(), p2.star(2).into_iter().collect()).unwrap()).unwrap();
        assert!(u.is_open_in(&x));
        assert_eq!(u.closure().class(), lpoly(&[1, 1]));
    }
}
