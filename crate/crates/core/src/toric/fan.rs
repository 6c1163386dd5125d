//! Simplicial rational fans.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::lattice::{self, Vector};
use crate::error::{Error, Result};

/// A cone of a fan, given by the sorted indices of its rays in the fan's
/// ray list. Cones are simplicial, so any subset of the rays spans a face.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Cone(Vec<usize>);

impl Cone {
    pub fn new(mut rays: Vec<usize>) -> Self {
        rays.sort_unstable();
        rays.dedup();
        Cone(rays)
    }

    pub fn zero() -> Self {
        Cone(Vec::new())
    }

    pub fn rays(&self) -> &[usize] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn contains_ray(&self, r: usize) -> bool {
        self.0.binary_search(&r).is_ok()
    }

    /// `self` is a face of `other`.
    pub fn is_face_of(&self, other: &Cone) -> bool {
        self.0.iter().all(|r| other.contains_ray(*r))
    }

    pub fn faces(&self) -> Vec<Cone> {
        let k = self.0.len();
        (0u64..1 << k)
            .map(|mask| Cone((0..k).filter(|i| mask >> i & 1 == 1).map(|i| self.0[i]).collect()))
            .collect()
    }
}

/// On-disk form of a fan.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FanFile {
    pub rank: usize,
    pub rays: Vec<Vector>,
    pub maximal_cones: Vec<Vec<usize>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FanProperties {
    pub complete: bool,
    pub smooth: bool,
    pub dimension: i64,
}

/// A fan of simplicial cones in `ℤ^rank`.
///
/// Rays are stored in lexicographic order and every ray belongs to some
/// cone. `cones` lists all cones, faces included, ordered by dimension and
/// then by ray indices; the zero cone is always `cones[0]`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Fan {
    rank: usize,
    rays: Vec<Vector>,
    cones: Vec<Cone>,
    maximal: Vec<usize>,
}

impl fmt::Debug for Fan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Fan({})", self.key())
    }
}

impl Fan {
    /// Validating constructor; see [`build_fan`].
    pub fn new(rank: usize, rays: Vec<Vector>, maximal_cones: Vec<Vec<usize>>) -> Result<Fan> {
        if rank == 0 {
            return Err(Error::InvalidFan("rank must be positive".into()));
        }
        for r in &rays {
            if r.len() != rank {
                return Err(Error::RankMismatch {
                    ray: r.clone(),
                    rank,
                    got: r.len(),
                });
            }
            if !lattice::is_primitive(r) {
                return Err(Error::NonPrimitiveRay(r.clone()));
            }
        }
        let distinct: BTreeSet<&Vector> = rays.iter().collect();
        if distinct.len() != rays.len() {
            return Err(Error::InvalidFan("rays are not distinct".into()));
        }
        for c in &maximal_cones {
            if let Some(&bad) = c.iter().find(|&&i| i >= rays.len()) {
                return Err(Error::InvalidFan(format!("cone {c:?} references ray {bad}")));
            }
            let mut sorted = c.clone();
            sorted.sort_unstable();
            sorted.dedup();
            if sorted.len() != c.len() {
                return Err(Error::InvalidFan(format!("cone {c:?} repeats a ray")));
            }
            let gens: Vec<Vector> = c.iter().map(|&i| rays[i].clone()).collect();
            if lattice::rank(&gens) < gens.len() {
                let cols: Vec<Vec<BigRational>> = gens.iter().map(|g| to_q(g)).collect();
                return Err(if nonnegative_circuits(&cols).is_empty() {
                    Error::NonSimplicial(c.clone())
                } else {
                    Error::NotStronglyConvex(c.clone())
                });
            }
        }
        let fan = Fan::assemble(rank, rays, maximal_cones);
        fan.check_intersections()?;
        Ok(fan)
    }

    /// Canonicalizing constructor without the pairwise intersection check.
    /// Callers guarantee the input is a fan of simplicial cones.
    pub(crate) fn assemble(rank: usize, rays: Vec<Vector>, maximal_cones: Vec<Vec<usize>>) -> Fan {
        let used: BTreeSet<usize> = maximal_cones.iter().flatten().copied().collect();
        let mut order: Vec<usize> = used.into_iter().collect();
        order.sort_by(|&a, &b| rays[a].cmp(&rays[b]));
        let mut remap = BTreeMap::new();
        for (new, &old) in order.iter().enumerate() {
            remap.insert(old, new);
        }
        let new_rays: Vec<Vector> = order.iter().map(|&i| rays[i].clone()).collect();
        let mut all: BTreeSet<Cone> = BTreeSet::new();
        all.insert(Cone::zero());
        for c in &maximal_cones {
            let cone = Cone::new(c.iter().map(|i| remap[i]).collect());
            if !all.contains(&cone) {
                all.extend(cone.faces());
            }
        }
        let mut cones: Vec<Cone> = all.into_iter().collect();
        cones.sort_by(|a, b| a.dim().cmp(&b.dim()).then_with(|| a.cmp(b)));
        let mut maximal = Vec::new();
        for (i, c) in cones.iter().enumerate() {
            if !cones.iter().any(|d| d.dim() > c.dim() && c.is_face_of(d)) {
                maximal.push(i);
            }
        }
        Fan {
            rank,
            rays: new_rays,
            cones,
            maximal,
        }
    }

    fn check_intersections(&self) -> Result<()> {
        for (a, &i) in self.maximal.iter().enumerate() {
            for &j in &self.maximal[a + 1..] {
                let (s, t) = (&self.cones[i], &self.cones[j]);
                let mut cols: Vec<Vec<BigRational>> = s.rays().iter().map(|&r| to_q(&self.rays[r])).collect();
                cols.extend(t.rays().iter().map(|&r| to_q(&self.rays[r]).into_iter().map(|x| -x).collect::<Vec<_>>()));
                for c in nonnegative_circuits(&cols) {
                    let bad_s = s.rays().iter().enumerate().any(|(k, r)| c[k].is_positive() && !t.contains_ray(*r));
                    let bad_t = t
                        .rays()
                        .iter()
                        .enumerate()
                        .any(|(k, r)| c[s.dim() + k].is_positive() && !s.contains_ray(*r));
                    if bad_s || bad_t {
                        return Err(Error::InvalidFan(format!(
                            "cones {:?} and {:?} do not meet in a common face",
                            self.cone_vectors(s),
                            self.cone_vectors(t)
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn from_file(file: &FanFile) -> Result<Fan> {
        Fan::new(file.rank, file.rays.clone(), file.maximal_cones.clone())
    }

    pub fn to_file(&self) -> FanFile {
        FanFile {
            rank: self.rank,
            rays: self.rays.clone(),
            maximal_cones: self.maximal.iter().map(|&i| self.cones[i].rays().to_vec()).collect(),
        }
    }

    pub fn from_json(text: &str) -> Result<Fan> {
        Fan::from_file(&serde_json::from_str(text)?)
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn rays(&self) -> &[Vector] {
        &self.rays
    }

    pub fn ray(&self, i: usize) -> &Vector {
        &self.rays[i]
    }

    pub fn cones(&self) -> &[Cone] {
        &self.cones
    }

    pub fn cone(&self, id: usize) -> &Cone {
        &self.cones[id]
    }

    pub fn num_cones(&self) -> usize {
        self.cones.len()
    }

    pub fn maximal_cones(&self) -> impl Iterator<Item = &Cone> {
        self.maximal.iter().map(|&i| &self.cones[i])
    }

    pub fn maximal_ids(&self) -> &[usize] {
        &self.maximal
    }

    pub fn cone_id(&self, cone: &Cone) -> Option<usize> {
        let lo = self.cones.partition_point(|c| c.dim() < cone.dim());
        self.cones[lo..]
            .iter()
            .take_while(|c| c.dim() == cone.dim())
            .position(|c| c == cone)
            .map(|p| lo + p)
    }

    pub fn ray_id(&self, v: &[i64]) -> Option<usize> {
        self.rays.binary_search_by(|r| r.as_slice().cmp(v)).ok()
    }

    pub fn cone_vectors(&self, cone: &Cone) -> Vec<Vector> {
        cone.rays().iter().map(|&r| self.rays[r].clone()).collect()
    }

    /// The cone of this fan with the given generators, if present.
    pub fn find_cone(&self, gens: &[Vector]) -> Option<usize> {
        let ids: Option<Vec<usize>> = gens.iter().map(|v| self.ray_id(v)).collect();
        self.cone_id(&Cone::new(ids?))
    }

    /// Ids of cones having `id` as a face (including `id`).
    pub fn star(&self, id: usize) -> Vec<usize> {
        let c = &self.cones[id];
        (0..self.cones.len()).filter(|&j| c.is_face_of(&self.cones[j])).collect()
    }

    /// Ids of the faces of cone `id`.
    pub fn faces_of(&self, id: usize) -> Vec<usize> {
        let c = &self.cones[id];
        (0..=id).filter(|&j| self.cones[j].is_face_of(c)).collect()
    }

    /// Id of the cone whose relative interior contains `v`.
    pub fn locate(&self, v: &[BigRational]) -> Option<usize> {
        if v.iter().all(Zero::is_zero) {
            return Some(0);
        }
        for &m in &self.maximal {
            let cone = &self.cones[m];
            let Some(lambda) = coordinates_q(&self.cone_vectors(cone), v) else {
                continue;
            };
            if !lattice::is_nonnegative(&lambda) {
                continue;
            }
            let face = Cone::new(
                cone.rays()
                    .iter()
                    .zip(&lambda)
                    .filter(|(_, l)| l.is_positive())
                    .map(|(r, _)| *r)
                    .collect(),
            );
            return self.cone_id(&face);
        }
        None
    }

    /// Smallest cone containing every vector of `gens`.
    pub fn carrier(&self, gens: &[Vector]) -> Option<usize> {
        if gens.is_empty() {
            return Some(0);
        }
        let mut sum = vec![0i64; self.rank];
        for g in gens {
            for (s, x) in sum.iter_mut().zip(g) {
                *s += x;
            }
        }
        let id = self.locate(&to_q(&sum))?;
        let c = &self.cones[id];
        let gens_c = self.cone_vectors(c);
        gens.iter()
            .all(|g| coordinates_q(&gens_c, &to_q(g)).is_some_and(|l| lattice::is_nonnegative(&l)))
            .then_some(id)
    }

    pub fn is_complete(&self) -> bool {
        match self.rank {
            2 => {
                let mut order: Vec<usize> = (0..self.rays.len()).collect();
                order.sort_by(|&a, &b| lattice::angle_cmp(&self.rays[a], &self.rays[b]));
                order.len() >= 3
                    && (0..order.len()).all(|k| {
                        let (a, b) = (order[k], order[(k + 1) % order.len()]);
                        self.cone_id(&Cone::new(vec![a, b])).is_some()
                    })
            }
            _ => self.facets_paired(|_| true),
        }
    }

    /// Facet pairing restricted to the cones accepted by `within`: every
    /// accepted maximal cone is full-dimensional and each codimension-one
    /// face of one lies in exactly two accepted full-dimensional cones.
    pub(crate) fn facets_paired(&self, within: impl Fn(&Cone) -> bool) -> bool {
        let n = self.rank;
        let mut tops = 0;
        let mut count: BTreeMap<Cone, usize> = BTreeMap::new();
        for c in self.cones.iter().filter(|c| within(c)) {
            let maximal = !self.cones.iter().any(|d| d.dim() > c.dim() && c.is_face_of(d) && within(d));
            if !maximal {
                continue;
            }
            if c.dim() != n {
                return false;
            }
            tops += 1;
            for skip in 0..n {
                let facet = Cone(c.rays().iter().enumerate().filter(|(k, _)| *k != skip).map(|(_, r)| *r).collect());
                *count.entry(facet).or_default() += 1;
            }
        }
        tops > 0 && count.iter().filter(|(f, _)| within(f)).all(|(_, &k)| k == 2)
    }

    pub fn is_smooth(&self) -> bool {
        self.maximal_cones()
            .all(|c| lattice::maximal_minor_gcd(&self.cone_vectors(c)).is_one())
    }

    pub fn properties(&self) -> FanProperties {
        FanProperties {
            complete: self.is_complete(),
            smooth: self.is_smooth(),
            dimension: self.rank as i64,
        }
    }

    /// Number of cones of each dimension, `f[k]` for `k = 0..=rank`.
    pub fn face_numbers(&self) -> Vec<usize> {
        let mut f = vec![0; self.rank + 1];
        for c in &self.cones {
            f[c.dim()] += 1;
        }
        f
    }

    /// The fan formed by a face-closed subset of cones, as a fan in its own
    /// right.
    pub fn subfan(&self, ids: &BTreeSet<usize>) -> Fan {
        let maximal: Vec<Vec<usize>> = ids
            .iter()
            .filter(|&&i| !ids.iter().any(|&j| j != i && self.cones[i].is_face_of(&self.cones[j])))
            .map(|&i| self.cones[i].rays().to_vec())
            .collect();
        Fan::assemble(self.rank, self.rays.clone(), maximal)
    }

    /// Product fan in `ℤ^(n+m)` with cones `σ × τ`.
    pub fn product(&self, other: &Fan) -> Fan {
        let (n, m) = (self.rank, other.rank);
        let mut rays: Vec<Vector> = self
            .rays
            .iter()
            .map(|r| r.iter().copied().chain(std::iter::repeat_n(0, m)).collect())
            .collect();
        rays.extend(other.rays.iter().map(|r| std::iter::repeat_n(0, n).chain(r.iter().copied()).collect()));
        let off = self.rays.len();
        let mut maximal = Vec::new();
        for a in self.maximal_cones() {
            for b in other.maximal_cones() {
                maximal.push(a.rays().iter().copied().chain(b.rays().iter().map(|r| r + off)).collect());
            }
        }
        Fan::assemble(n + m, rays, maximal)
    }

    /// Canonical text key; equal fans have equal keys.
    pub fn key(&self) -> String {
        let rays: Vec<String> = self
            .rays
            .iter()
            .map(|r| r.iter().map(i64::to_string).collect::<Vec<_>>().join(","))
            .collect();
        let cones: Vec<String> = self
            .maximal_cones()
            .map(|c| c.rays().iter().map(usize::to_string).collect::<Vec<_>>().join(","))
            .collect();
        format!("{};[{}];[{}]", self.rank, rays.join(" "), cones.join(" "))
    }

    /// The builtin named fans: `pt`, `P<n>`, `A<n>`, `Gm`, `P1xP1`,
    /// `Hirzebruch(a)` (also `F<a>`).
    pub fn builtin(name: &str) -> Result<Fan> {
        let unknown = || Error::InvalidFan(format!("unknown builtin fan `{name}`"));
        if name == "pt" {
            return Ok(Fan::assemble(0, vec![], vec![]));
        }
        if name == "Gm" {
            return Ok(Fan::assemble(1, vec![], vec![]));
        }
        if name == "P1xP1" {
            return Ok(Fan::builtin("P1")?.product(&Fan::builtin("P1")?));
        }
        if let Some(a) = name.strip_prefix("Hirzebruch(").and_then(|s| s.strip_suffix(')')) {
            return Ok(hirzebruch(a.trim().parse().map_err(|_| unknown())?));
        }
        let (head, digits) = name.split_at(name.len().min(1));
        let n: usize = digits.parse().map_err(|_| unknown())?;
        match head {
            "F" => Ok(hirzebruch(n as i64)),
            "P" if n >= 1 => Ok(projective(n)),
            "A" if n >= 1 => Ok(affine(n)),
            _ => Err(unknown()),
        }
    }
}

fn unit(n: usize, i: usize) -> Vector {
    (0..n).map(|j| i64::from(i == j)).collect()
}

fn projective(n: usize) -> Fan {
    let mut rays: Vec<Vector> = (0..n).map(|i| unit(n, i)).collect();
    rays.push(vec![-1; n]);
    let maximal = (0..=n).map(|skip| (0..=n).filter(|&i| i != skip).collect()).collect();
    Fan::assemble(n, rays, maximal)
}

fn affine(n: usize) -> Fan {
    Fan::assemble(n, (0..n).map(|i| unit(n, i)).collect(), vec![(0..n).collect()])
}

fn hirzebruch(a: i64) -> Fan {
    let rays = vec![vec![1, 0], vec![0, 1], vec![-1, a], vec![0, -1]];
    Fan::assemble(2, rays, vec![vec![0, 1], vec![1, 2], vec![2, 3], vec![3, 0]])
}

/// Validates and canonicalizes a fan from rays and maximal cones.
pub fn build_fan(rank: usize, rays: Vec<Vector>, maximal_cones: Vec<Vec<usize>>) -> Result<Fan> {
    Fan::new(rank, rays, maximal_cones)
}

pub fn fan_properties(f: &Fan) -> FanProperties {
    f.properties()
}

pub(crate) fn to_q(v: &[i64]) -> Vec<BigRational> {
    v.iter().map(|&x| BigRational::from_integer(BigInt::from(x))).collect()
}

pub(crate) fn coordinates_q(gens: &[Vector], v: &[BigRational]) -> Option<Vec<BigRational>> {
    // Scale to integers so the integer solver applies.
    let lcm = v.iter().fold(BigInt::one(), |l, x| num_integer::Integer::lcm(&l, x.denom()));
    let scaled: Option<Vec<i64>> = v
        .iter()
        .map(|x| i64::try_from(x.numer() * (&lcm / x.denom())).ok())
        .collect();
    let lambda = lattice::coordinates(gens, &scaled?)?;
    let d = BigRational::from_integer(lcm);
    Some(lambda.into_iter().map(|l| l / &d).collect())
}

/// Minimal dependent column subsets whose kernel vector can be taken
/// entrywise positive; returned as those kernel vectors (zero outside the
/// subset).
pub(crate) fn nonnegative_circuits(cols: &[Vec<BigRational>]) -> Vec<Vec<BigRational>> {
    let k = cols.len();
    let n = cols.first().map_or(0, Vec::len);
    let mut out = Vec::new();
    for size in 2..=(n + 1).min(k) {
        for subset in lattice::subsets(k, size) {
            let sub: Vec<Vec<BigRational>> = subset.iter().map(|&i| cols[i].clone()).collect();
            let ker = lattice::kernel(&sub);
            if ker.len() != 1 {
                continue;
            }
            let mut v = ker.into_iter().next().unwrap();
            if v.iter().any(Zero::is_zero) {
                continue;
            }
            if v[0].is_negative() {
                v.iter_mut().for_each(|x| *x = -x.clone());
            }
            if v.iter().all(Signed::is_positive) {
                let mut full = vec![BigRational::zero(); k];
                for (&i, x) in subset.iter().zip(v) {
                    full[i] = x;
                }
                out.push(full);
            }
        }
    }
    out
}

impl PartialOrd for Fan {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Fan {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.rank, &self.rays, &self.cones).cmp(&(other.rank, &other.rays, &other.cones))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn p1_has_three_cones() {
        let f = build_fan(1, vec![vec![1], vec![-1]], vec![vec![0], vec![1]]).unwrap();
        assert_eq!(f.num_cones(), 3);
        assert!(f.is_complete());
        assert_eq!(f, Fan::builtin("P1").unwrap());
    }

    #[test]
    fn a2_and_p2() {
        let a2 = build_fan(2, vec![vec![1, 0], vec![0, 1]], vec![vec![0, 1]]).unwrap();
        assert_eq!(a2.num_cones(), 4);
        assert_eq!(
            a2.properties(),
            FanProperties {
                complete: false,
                smooth: true,
                dimension: 2
            }
        );
        let p2 = build_fan(
            2,
            vec![vec![1, 0], vec![0, 1], vec![-1, -1]],
            vec![vec![0, 1], vec![1, 2], vec![0, 2]],
        )
        .unwrap();
        assert_eq!(p2.num_cones(), 7);
        assert_eq!(
            p2.properties(),
            FanProperties {
                complete: true,
                smooth: true,
                dimension: 2
            }
        );
        assert_eq!(p2, Fan::builtin("P2").unwrap());
    }

    #[test]
    fn singular_cone() {
        let f = build_fan(2, vec![vec![0, 1], vec![2, -1]], vec![vec![0, 1]]).unwrap();
        assert!(!f.is_smooth());
    }

    #[test]
    fn rejects_bad_input() {
        assert_eq!(
            build_fan(1, vec![vec![2]], vec![vec![0]]).unwrap_err(),
            Error::NonPrimitiveRay(vec![2])
        );
        assert!(matches!(
            build_fan(2, vec![vec![1, 0], vec![-1, 0]], vec![vec![0, 1]]),
            Err(Error::NotStronglyConvex(_))
        ));
        assert!(matches!(
            build_fan(2, vec![vec![1, 0], vec![0, 1, 0]], vec![]),
            Err(Error::RankMismatch { .. })
        ));
        // Two quadrants overlapping in a half-open region.
        let overlap = build_fan(
            2,
            vec![vec![1, 0], vec![0, 1], vec![1, 1], vec![-1, 1]],
            vec![vec![0, 1], vec![2, 3]],
        );
        assert!(matches!(overlap, Err(Error::InvalidFan(_))), "{overlap:?}");
        // Same ray set in two different 2-cones is fine when they only share a ray.
        assert!(build_fan(2, vec![vec![1, 0], vec![0, 1], vec![-1, 0]], vec![vec![0, 1], vec![1, 2]]).is_ok());
    }

    #[test]
    fn non_simplicial_cone_is_reported() {
        let rays = vec![vec![1, 0, 1], vec![0, 1, 1], vec![-1, 0, 1], vec![0, -1, 1]];
        assert!(matches!(build_fan(3, rays, vec![vec![0, 1, 2, 3]]), Err(Error::NonSimplicial(_))));
    }

    #[test]
    fn three_dimensional_completeness() {
        let p3 = Fan::builtin("P3").unwrap();
        assert!(p3.is_complete() && p3.is_smooth());
        assert_eq!(p3.face_numbers(), vec![1, 4, 6, 4]);
        let cube = Fan::builtin("P1").unwrap().product(&Fan::builtin("P2").unwrap());
        assert!(cube.is_complete());
        assert!(!Fan::builtin("A3").unwrap().is_complete());
        assert!(Fan::new(3, cube.rays().to_vec(), cube.to_file().maximal_cones).is_ok());
    }

    #[test]
    fn builtins() {
        assert_eq!(Fan::builtin("Gm").unwrap().num_cones(), 1);
        let f1 = Fan::builtin("Hirzebruch(1)").unwrap();
        assert!(f1.is_complete() && f1.is_smooth());
        assert_eq!(f1, Fan::builtin("F1").unwrap());
        assert_eq!(Fan::builtin("P1xP1").unwrap().face_numbers(), vec![1, 4, 4]);
        assert!(Fan::builtin("Q7").is_err());
    }

    #[test]
    fn locate_and_carrier() {
        let p2 = Fan::builtin("P2").unwrap();
        let id = p2.locate(&to_q(&[1, 1])).unwrap();
        assert_eq!(p2.cone(id).dim(), 2);
        let id = p2.locate(&to_q(&[3, 0])).unwrap();
        assert_eq!(p2.cone_vectors(p2.cone(id)), vec![vec![1, 0]]);
        assert_eq!(p2.carrier(&[vec![1, 0], vec![1, 1]]), p2.find_cone(&[vec![1, 0], vec![0, 1]]));
        let a1 = Fan::builtin("A1").unwrap();
        assert_eq!(a1.carrier(&[vec![-1]]), None);
    }

    #[test]
    fn file_round_trip() {
        let f = Fan::builtin("F2").unwrap();
        let text = serde_json::to_string(&f.to_file()).unwrap();
        assert_eq!(Fan::from_json(&text).unwrap(), f);
    }
}
