use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::One;

use super::fan::{to_q, Fan};
use super::lattice::{self, Vector};
use super::object::ToricObject;
use crate::error::{Error, Result};
use crate::site::{DistinguishedSquare, SquareKind};

/// The subdivided fan with its blowup square `(E, Y, C, X)`.
#[derive(Clone, Debug)]
pub struct Subdivision {
    pub fan: Arc<Fan>,
    pub square: DistinguishedSquare,
}

/// Star subdivision of `f` at `new_ray`, which must be primitive and lie in
/// the relative interior of a cone of dimension at least 2.
pub fn star_subdivide(f: &Arc<Fan>, new_ray: &[i64]) -> Result<Subdivision> {
    if new_ray.len() != f.rank() {
        return Err(Error::RankMismatch {
            ray: new_ray.to_vec(),
            rank: f.rank(),
            got: new_ray.len(),
        });
    }
    if !lattice::is_primitive(new_ray) {
        return Err(Error::NonPrimitiveRay(new_ray.to_vec()));
    }
    let tau = f
        .locate(&to_q(new_ray))
        .ok_or_else(|| Error::RayOutsideSupport(new_ray.to_vec()))?;
    let center = f.cone(tau).clone();
    if center.dim() <= 1 {
        return Err(Error::RayOnBoundary(new_ray.to_vec()));
    }
    let mut rays: Vec<Vector> = f.rays().to_vec();
    let v = rays.len();
    rays.push(new_ray.to_vec());
    let mut maximal = Vec::new();
    for sigma in f.maximal_cones() {
        if center.is_face_of(sigma) {
            for &i in center.rays() {
                let mut c: Vec<usize> = sigma.rays().iter().copied().filter(|&r| r != i).collect();
                c.push(v);
                maximal.push(c);
            }
        } else {
            maximal.push(sigma.rays().to_vec());
        }
    }
    let y = Arc::new(Fan::assemble(f.rank(), rays, maximal));
    let vid = y.find_cone(&[new_ray.to_vec()]).expect("new ray is a ray of the subdivision");

    let x_obj = ToricObject::whole(f.clone());
    let y_obj = ToricObject::whole(y.clone());
    let c_obj = ToricObject::from_ids_unchecked(f.clone(), f.star(tau).into_iter().collect());
    let e_obj = ToricObject::from_ids_unchecked(y.clone(), y.star(vid).into_iter().collect());

    let sum: Vector = (0..f.rank())
        .map(|k| center.rays().iter().map(|&r| f.ray(r)[k]).sum())
        .collect();
    let smooth = f.is_smooth() && sum == new_ray && lattice::maximal_minor_gcd(&f.cone_vectors(&center)) == BigInt::one();
    let kind = if smooth {
        SquareKind::SmoothBlowup
    } else {
        SquareKind::AbstractBlowup
    };
    let square = DistinguishedSquare::toric_blowup(kind, e_obj, y_obj, c_obj, x_obj)?;
    Ok(Subdivision { fan: y, square })
}

/// Sum of the generators of cone `id`, primitive.
pub fn barycentric_ray(f: &Fan, id: usize) -> Vector {
    let c = f.cone(id);
    let sum: Vector = (0..f.rank()).map(|k| c.rays().iter().map(|&r| f.ray(r)[k]).sum()).collect();
    lattice::primitive(&sum)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fan(name: &str) -> Arc<Fan> {
        Arc::new(Fan::builtin(name).unwrap())
    }

    #[test]
    fn blowup_p2_gives_f1() {
        let s = star_subdivide(&fan("P2"), &[1, 1]).unwrap();
        assert_eq!(s.fan.rays().len(), 4);
        assert_eq!(ToricObject::whole(s.fan.clone()).class(), ToricObject::whole(fan("F1")).class());
        assert_eq!(s.square.kind, SquareKind::SmoothBlowup);
        let e = s.square.e.as_toric().unwrap();
        let c = s.square.c.as_toric().unwrap();
        assert_eq!(e.class(), Fan::builtin("P1").map(|f| ToricObject::whole(Arc::new(f)).class()).unwrap());
        assert_eq!(c.dim(), 0);
        assert!(s.fan.is_complete() && s.fan.is_smooth());
    }

    #[test]
    fn blowup_a2_at_origin() {
        let s = star_subdivide(&fan("A2"), &[1, 1]).unwrap();
        assert_eq!(s.fan.maximal_ids().len(), 2);
        assert!(!s.fan.is_complete());
    }

    #[test]
    fn rejected_rays() {
        let p2 = fan("P2");
        assert!(matches!(star_subdivide(&p2, &[1, 0]), Err(Error::RayOnBoundary(_))));
        assert!(matches!(star_subdivide(&p2, &[2, 2]), Err(Error::NonPrimitiveRay(_))));
        assert!(matches!(star_subdivide(&fan("A2"), &[-1, 1]), Err(Error::RayOutsideSupport(_))));
    }

    #[test]
    fn non_barycentric_is_abstract() {
        let s = star_subdivide(&fan("P2"), &[1, 2]).unwrap();
        assert_eq!(s.square.kind, SquareKind::AbstractBlowup);
        assert!(!s.fan.is_smooth());
        let s3 = star_subdivide(&fan("P3"), &[1, 1, 0]).unwrap();
        assert_eq!(s3.square.kind, SquareKind::SmoothBlowup);
        assert_eq!(s3.square.c.dim(), 1);
    }
}
