use std::cmp::Ordering;
use std::collections::BTreeSet;

use super::fan::Fan;
use super::lattice::{self, Vector};
use crate::error::{Error, Result};

/// Completes a fan of rank at most 2 by filling angular gaps.
///
/// Rays are sorted by angle. A gap wider than π between `a` and `b` gets
/// the ray through `-(a + b)`; a gap of exactly π gets `a` rotated by a
/// quarter turn. Once every gap is below π, each uncovered gap becomes a
/// 2-cone. The input cones are kept, so the input is an open subfan of
/// the output.
pub fn complete_surface(f: &Fan) -> Result<Fan> {
    match f.rank() {
        1 => Ok(complete_line(f)),
        2 => Ok(complete_plane(f)),
        r => Err(Error::Unsupported(format!(
            "automatic completion in rank {r}; supply a completion"
        ))),
    }
}

fn complete_line(f: &Fan) -> Fan {
    let mut rays = vec![vec![-1], vec![1]];
    rays.retain(|r| f.ray_id(r).is_none());
    let mut all: Vec<Vector> = f.rays().to_vec();
    all.extend(rays);
    let maximal = (0..all.len()).map(|i| vec![i]).collect();
    Fan::assemble(1, all, maximal)
}

fn complete_plane(f: &Fan) -> Fan {
    let covered: BTreeSet<(Vector, Vector)> = f
        .cones()
        .iter()
        .filter(|c| c.dim() == 2)
        .map(|c| {
            let mut v = f.cone_vectors(c);
            v.sort_by(|a, b| lattice::angle_cmp(a, b));
            // Store the pair in counter-clockwise order.
            if lattice::cross(&v[0], &v[1]) > 0 {
                (v[0].clone(), v[1].clone())
            } else {
                (v[1].clone(), v[0].clone())
            }
        })
        .collect();
    let mut rays: Vec<Vector> = f.rays().to_vec();
    if rays.is_empty() {
        rays.push(vec![1, 0]);
    }
    loop {
        rays.sort_by(|a, b| lattice::angle_cmp(a, b));
        let n = rays.len();
        let gap = (0..n).find_map(|k| {
            let (a, b) = (&rays[k], &rays[(k + 1) % n]);
            if covered.contains(&(a.clone(), b.clone())) {
                return None;
            }
            match lattice::gap_vs_pi(a, b) {
                Ordering::Less => None,
                Ordering::Equal => Some(lattice::primitive(&[-a[1], a[0]])),
                Ordering::Greater => Some(lattice::primitive(&[-(a[0] + b[0]), -(a[1] + b[1])])),
            }
        });
        match gap {
            Some(r) => rays.push(r),
            None => break,
        }
    }
    let n = rays.len();
    let mut maximal: Vec<Vec<usize>> = f
        .maximal_cones()
        .map(|c| c.rays().iter().map(|&r| rays.iter().position(|v| v == f.ray(r)).expect("ray kept")).collect())
        .collect();
    for k in 0..n {
        let cone = vec![k, (k + 1) % n];
        if !maximal.iter().any(|m| m.len() == 2 && m.contains(&k) && m.contains(&((k + 1) % n))) {
            maximal.push(cone);
        }
    }
    Fan::assemble(2, rays, maximal)
}

/// Splits the coordinates into blocks such that the fan is the product of
/// its block projections, preferring small blocks. The finest candidate
/// puts coordinates in one block whenever a ray is supported on both;
/// coarser candidates merge those blocks.
fn product_blocks(f: &Fan) -> Option<Vec<Vec<usize>>> {
    let n = f.rank();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], i: usize) -> usize {
        let mut r = i;
        while p[r] != r {
            r = p[r];
        }
        p[i] = r;
        r
    }
    for r in f.rays() {
        let support: Vec<usize> = (0..n).filter(|&k| r[k] != 0).collect();
        for w in support.windows(2) {
            let (a, b) = (find(&mut parent, w[0]), find(&mut parent, w[1]));
            parent[a] = b;
        }
    }
    let mut fine: Vec<Vec<usize>> = Vec::new();
    let mut roots: Vec<usize> = Vec::new();
    for k in 0..n {
        let root = find(&mut parent, k);
        match roots.iter().position(|&x| x == root) {
            Some(i) => fine[i].push(k),
            None => {
                roots.push(root);
                fine.push(vec![k]);
            }
        }
    }
    let mut candidates: Vec<Vec<Vec<usize>>> = coarsenings(&fine);
    candidates.sort_by_key(|p| (p.iter().map(Vec::len).max().unwrap_or(0), std::cmp::Reverse(p.len())));
    candidates.into_iter().find(|blocks| {
        let total: usize = blocks.iter().map(|b| block_fan(f, b).num_cones()).product();
        total == f.num_cones()
    })
}

/// Every partition of `blocks` into groups, each group merged.
fn coarsenings(blocks: &[Vec<usize>]) -> Vec<Vec<Vec<usize>>> {
    let Some((first, rest)) = blocks.split_first() else {
        return vec![vec![]];
    };
    let mut out = Vec::new();
    for p in coarsenings(rest) {
        for i in 0..p.len() {
            let mut q = p.clone();
            q[i].extend(first.iter().copied());
            q[i].sort_unstable();
            out.push(q);
        }
        let mut q = p;
        q.insert(0, first.clone());
        out.push(q);
    }
    out
}

fn block_of(f: &Fan, block: &[usize]) -> Vec<usize> {
    (0..f.rays().len())
        .filter(|&r| block.iter().any(|&k| f.ray(r)[k] != 0))
        .collect()
}

fn block_fan(f: &Fan, block: &[usize]) -> Fan {
    let rays_in = block_of(f, block);
    let rays: Vec<Vector> = rays_in.iter().map(|&r| block.iter().map(|&k| f.ray(r)[k]).collect()).collect();
    let maximal: Vec<Vec<usize>> = f
        .maximal_cones()
        .map(|c| {
            c.rays()
                .iter()
                .filter_map(|r| rays_in.iter().position(|x| x == r))
                .collect::<Vec<_>>()
        })
        .filter(|c| !c.is_empty())
        .collect();
    Fan::assemble(block.len(), rays, maximal)
}

/// A complete fan containing `f` as an open subfan: surface completion in
/// rank at most 2, and factor-wise completion of products in higher rank.
pub fn complete(f: &Fan) -> Result<Fan> {
    if f.is_complete() {
        return Ok(f.clone());
    }
    if f.rank() <= 2 {
        return complete_surface(f);
    }
    let unsupported = || Error::Unsupported(format!("automatic completion of a rank {} fan that is not a product of rank ≤ 2 factors", f.rank()));
    let blocks = product_blocks(f).ok_or_else(unsupported)?;
    if blocks.iter().any(|b| b.len() > 2) {
        return Err(unsupported());
    }
    let n = f.rank();
    let mut rays: Vec<Vector> = Vec::new();
    let mut maximal: Vec<Vec<usize>> = vec![vec![]];
    for b in &blocks {
        let done = complete_surface(&block_fan(f, b))?;
        let off = rays.len();
        for r in done.rays() {
            let mut full = vec![0; n];
            for (i, &k) in b.iter().enumerate() {
                full[k] = r[i];
            }
            rays.push(full);
        }
        maximal = maximal
            .iter()
            .flat_map(|m| {
                done.maximal_cones().map(move |c| {
                    let mut m = m.clone();
                    m.extend(c.rays().iter().map(|r| r + off));
                    m
                })
            })
            .collect();
    }
    Ok(Fan::assemble(n, rays, maximal))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::toric::ToricObject;
    use std::sync::Arc;

    fn builtin(name: &str) -> Fan {
        Fan::builtin(name).unwrap()
    }

    fn contains_all(big: &Fan, small: &Fan) -> bool {
        small.cones().iter().all(|c| big.find_cone(&small.cone_vectors(c)).is_some())
    }

    #[test]
    fn line() {
        let a1 = builtin("A1");
        assert_eq!(complete_surface(&a1).unwrap(), builtin("P1"));
        assert_eq!(complete_surface(&builtin("P1")).unwrap(), builtin("P1"));
        assert_eq!(complete_surface(&builtin("Gm")).unwrap(), builtin("P1"));
    }

    #[test]
    fn plane() {
        assert_eq!(complete_surface(&builtin("A2")).unwrap(), builtin("P2"));
        assert_eq!(complete_surface(&builtin("P2")).unwrap(), builtin("P2"));
        let torus = Fan::assemble(2, vec![], vec![]);
        assert_eq!(complete_surface(&torus).unwrap(), builtin("P1xP1"));
        // A single ray: opposite ray first, then a perpendicular pair.
        let ray = Fan::new(2, vec![vec![1, 2]], vec![vec![0]]).unwrap();
        let done = complete_surface(&ray).unwrap();
        assert!(done.is_complete());
        assert!(contains_all(&done, &ray));
        // Two opposite rays leave two gaps of exactly π.
        let line = Fan::new(2, vec![vec![1, 0], vec![-1, 0]], vec![vec![0], vec![1]]).unwrap();
        assert_eq!(complete_surface(&line).unwrap(), builtin("P1xP1"));
    }

    #[test]
    fn singular_input_is_kept() {
        let f = Fan::new(2, vec![vec![0, 1], vec![2, -1]], vec![vec![0, 1]]).unwrap();
        let done = complete_surface(&f).unwrap();
        assert!(done.is_complete());
        assert!(contains_all(&done, &f));
    }

    #[test]
    fn products_in_rank_three() {
        let f = builtin("A2").product(&builtin("A1"));
        let done = complete(&f).unwrap();
        // A2 × A1 is A1³ as a fan, so each factor becomes P1.
        assert_eq!(done, builtin("P1xP1").product(&builtin("P1")));
        let f = builtin("P2").product(&builtin("A1"));
        assert_eq!(complete(&f).unwrap(), builtin("P2").product(&builtin("P1")));
        let g = builtin("A1").product(&builtin("Gm")).product(&builtin("A1"));
        let done = complete(&g).unwrap();
        assert!(done.is_complete());
        assert!(contains_all(&done, &g));
        assert_eq!(ToricObject::whole(Arc::new(done)).dim(), 3);
        assert_eq!(complete(&builtin("A3")).unwrap(), builtin("P1xP1").product(&builtin("P1")));
        // A non-product surface fan times a line.
        let fan3 = Fan::new(2, vec![vec![1, 0], vec![0, 1], vec![-1, 0], vec![0, -1]], vec![vec![0, 1], vec![1, 2], vec![2, 3]]).unwrap();
        let f = fan3.product(&builtin("A1"));
        let done = complete(&f).unwrap();
        assert!(done.is_complete());
        assert!(contains_all(&done, &f));
        let f = fan3.product(&builtin("F1"));
        assert!(complete(&f).unwrap().is_complete());
        let skew = Fan::new(3, vec![vec![1, 0, 0], vec![0, 1, 0], vec![1, 1, 1]], vec![vec![0, 1, 2]]).unwrap();
        assert!(matches!(complete(&skew), Err(Error::Unsupported(_))));
        assert!(matches!(complete_surface(&builtin("A3")), Err(Error::Unsupported(_))));
    }
}
