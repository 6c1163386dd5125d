//! Exact linear algebra over ℤ and ℚ for small lattice computations.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type Vector = Vec<i64>;

fn q(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// Row-reduces `rows` in place; returns the pivot columns.
#[allow(clippy::needless_range_loop)]
fn reduce(rows: &mut [Vec<BigRational>]) -> Vec<usize> {
    let ncols = rows.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let inv = rows[r][c].recip();
        for x in rows[r].iter_mut() {
            *x *= &inv;
        }
        for i in 0..rows.len() {
            if i != r && !rows[i][c].is_zero() {
                let f = rows[i][c].clone();
                for j in 0..ncols {
                    let d = &f * &rows[r][j];
                    rows[i][j] -= d;
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    pivots
}

pub fn rank(vectors: &[Vector]) -> usize {
    let mut rows: Vec<Vec<BigRational>> = vectors.iter().map(|v| v.iter().map(|&x| q(x)).collect()).collect();
    reduce(&mut rows).len()
}

/// Coordinates `λ` with `Σ λ_i gens[i] = v`, if `v` lies in the span.
/// The generators must be linearly independent.
pub fn coordinates(gens: &[Vector], v: &[i64]) -> Option<Vec<BigRational>> {
    let k = gens.len();
    let n = v.len();
    // Augmented system: n equations, k unknowns.
    let mut rows: Vec<Vec<BigRational>> = (0..n)
        .map(|i| {
            let mut row: Vec<BigRational> = gens.iter().map(|g| q(g[i])).collect();
            row.push(q(v[i]));
            row
        })
        .collect();
    let pivots = reduce(&mut rows);
    if pivots.contains(&k) {
        return None;
    }
    debug_assert_eq!(pivots.len(), k, "generators must be independent");
    let mut out = vec![BigRational::zero(); k];
    for (r, &c) in pivots.iter().enumerate() {
        out[c] = rows[r][k].clone();
    }
    Some(out)
}

/// Determinant of a square integer matrix by fraction-free elimination.
pub fn det(m: &[Vector]) -> BigInt {
    let n = m.len();
    let mut a: Vec<Vec<BigInt>> = m.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n {
        if a[k][k].is_zero() {
            let Some(p) = (k + 1..n).find(|&i| !a[i][k].is_zero()) else {
                return BigInt::zero();
            };
            a.swap(k, p);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                a[i][j] = (&a[i][j] * &a[k][k] - &a[i][k] * &a[k][j]) / &prev;
            }
        }
        prev = a[k][k].clone();
    }
    if n == 0 {
        sign
    } else {
        sign * &a[n - 1][n - 1]
    }
}

/// gcd of all maximal minors of the `k × n` matrix with rows `vectors`;
/// equals 1 exactly when the rows extend to a ℤ-basis.
pub fn maximal_minor_gcd(vectors: &[Vector]) -> BigInt {
    let k = vectors.len();
    let n = vectors.first().map_or(0, Vec::len);
    if k == 0 {
        return BigInt::one();
    }
    let mut g = BigInt::zero();
    for cols in subsets(n, k) {
        let sub: Vec<Vector> = vectors.iter().map(|v| cols.iter().map(|&c| v[c]).collect()).collect();
        g = g.gcd(&det(&sub));
        if g.is_one() {
            break;
        }
    }
    g
}

/// All `k`-element subsets of `0..n` in lexicographic order.
pub fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    go(0, n, k, &mut cur, &mut out);
    out
}

pub fn gcd_of(v: &[i64]) -> i64 {
    v.iter().fold(0i64, |g, &x| g.gcd(&x))
}

pub fn is_primitive(v: &[i64]) -> bool {
    gcd_of(v) == 1
}

/// Divides by the gcd of the entries; the zero vector is returned as is.
pub fn primitive(v: &[i64]) -> Vector {
    let g = gcd_of(v);
    if g == 0 {
        v.to_vec()
    } else {
        v.iter().map(|x| x / g).collect()
    }
}

/// Primitive vector on the ray through a rational point.
pub fn primitive_of_rational(v: &[BigRational]) -> Option<Vector> {
    let lcm = v.iter().fold(BigInt::one(), |l, x| l.lcm(x.denom()));
    let ints: Vec<BigInt> = v.iter().map(|x| x.numer() * (&lcm / x.denom())).collect();
    let g = ints.iter().fold(BigInt::zero(), |g, x| g.gcd(x));
    if g.is_zero() {
        return Some(vec![0; v.len()]);
    }
    ints.iter()
        .map(|x| i64::try_from(x / &g).ok())
        .collect()
}

/// A basis of the rational kernel of the `n × k` matrix whose columns are
/// `columns`.
pub fn kernel(columns: &[Vec<BigRational>]) -> Vec<Vec<BigRational>> {
    let k = columns.len();
    let n = columns.first().map_or(0, Vec::len);
    let mut rows: Vec<Vec<BigRational>> = (0..n).map(|i| columns.iter().map(|c| c[i].clone()).collect()).collect();
    let pivots = reduce(&mut rows);
    let free: Vec<usize> = (0..k).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![BigRational::zero(); k];
            v[f] = BigRational::one();
            for (r, &p) in pivots.iter().enumerate() {
                v[p] = -rows[r][f].clone();
            }
            v
        })
        .collect()
}

fn half(v: &[i64]) -> u8 {
    // 0 for angles in [0, π), 1 for [π, 2π).
    if v[1] > 0 || (v[1] == 0 && v[0] > 0) {
        0
    } else {
        1
    }
}

pub fn cross(a: &[i64], b: &[i64]) -> i128 {
    i128::from(a[0]) * i128::from(b[1]) - i128::from(a[1]) * i128::from(b[0])
}

/// Exact counter-clockwise angular order of nonzero plane vectors,
/// starting from the positive x-axis.
pub fn angle_cmp(a: &[i64], b: &[i64]) -> Ordering {
    half(a).cmp(&half(b)).then_with(|| 0.cmp(&cross(a, b)))
}

/// Counter-clockwise angle from `a` to `b` compared with π: `Less`,
/// `Equal` or `Greater`. A zero-width gap (`a == b`) counts as a full turn.
pub fn gap_vs_pi(a: &[i64], b: &[i64]) -> Ordering {
    let c = cross(a, b);
    match c.cmp(&0) {
        Ordering::Greater => Ordering::Less,
        Ordering::Less => Ordering::Greater,
        Ordering::Equal => {
            let dot = i128::from(a[0]) * i128::from(b[0]) + i128::from(a[1]) * i128::from(b[1]);
            if dot < 0 {
                Ordering::Equal
            } else {
                Ordering::Greater
            }
        }
    }
}

pub fn is_nonnegative(v: &[BigRational]) -> bool {
    v.iter().all(|x| !x.is_negative())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn determinants() {
        assert_eq!(det(&[vec![1, 0], vec![0, 1]]), BigInt::from(1));
        assert_eq!(det(&[vec![0, 1], vec![2, -1]]), BigInt::from(-2));
        assert_eq!(det(&[vec![1, 2, 3], vec![4, 5, 6], vec![7, 8, 10]]), BigInt::from(-3));
        assert_eq!(det(&[vec![1, 2], vec![2, 4]]), BigInt::from(0));
        assert_eq!(det(&[vec![0, 0, 1], vec![0, 1, 0], vec![1, 0, 0]]), BigInt::from(-1));
    }

    #[test]
    fn minors_detect_lattice_bases() {
        assert_eq!(maximal_minor_gcd(&[vec![1, 0, 0], vec![0, 1, 0]]), BigInt::from(1));
        assert_eq!(maximal_minor_gcd(&[vec![1, 1, 0], vec![1, -1, 0]]), BigInt::from(2));
        assert_eq!(maximal_minor_gcd(&[vec![2, 3]]), BigInt::from(1));
    }

    #[test]
    fn coordinates_in_span() {
        let gens = [vec![1, 0, 0], vec![1, 1, 0]];
        let c = coordinates(&gens, &[3, 2, 0]).unwrap();
        assert_eq!(c, vec![q(1), q(2)]);
        assert!(coordinates(&gens, &[0, 0, 1]).is_none());
    }

    #[test]
    fn kernel_of_dependent_columns() {
        let cols: Vec<Vec<BigRational>> = [[1, 0], [0, 1], [1, 1]]
            .iter()
            .map(|c| c.iter().map(|&x| q(x)).collect())
            .collect();
        let k = kernel(&cols);
        assert_eq!(k, vec![vec![q(-1), q(-1), q(1)]]);
    }

    #[test]
    fn angular_order() {
        let mut v = vec![vec![0, -1], vec![-1, 0], vec![1, 1], vec![1, 0], vec![-1, -1], vec![0, 1]];
        v.sort_by(|a, b| angle_cmp(a, b));
        assert_eq!(v, vec![vec![1, 0], vec![1, 1], vec![0, 1], vec![-1, 0], vec![-1, -1], vec![0, -1]]);
        assert_eq!(gap_vs_pi(&[1, 0], &[0, 1]), Ordering::Less);
        assert_eq!(gap_vs_pi(&[1, 0], &[-1, 0]), Ordering::Equal);
        assert_eq!(gap_vs_pi(&[0, 1], &[1, 0]), Ordering::Greater);
        assert_eq!(gap_vs_pi(&[1, 0], &[1, 0]), Ordering::Greater);
    }

    #[test]
    fn primitive_vectors() {
        assert_eq!(primitive(&[2, -4]), vec![1, -2]);
        assert!(is_primitive(&[3, 2]));
        assert!(!is_primitive(&[0, 0]));
        let r = primitive_of_rational(&[BigRational::new(1.into(), 2.into()), q(-1)]).unwrap();
        assert_eq!(r, vec![1, -2]);
    }
}
