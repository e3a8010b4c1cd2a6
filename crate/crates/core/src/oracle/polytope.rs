//! Exact volume of the chamber `{μ sorted, Σμ = Σλ, μ ≺ λ}` in rational
//! arithmetic.
//!
//! The chamber is parametrized by its first `n = d - 1` coordinates and cut
//! out by `2n` halfspaces (ordering and partial sums). Vertices come from
//! intersecting every `n`-subset of constraint planes; the volume is a cone
//! decomposition from the vertex centroid over the facets.

use std::cmp::Ordering;
use std::collections::HashSet;

use itertools::Itertools;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::state::SortedSpectrum;

/// Largest support the exact oracle accepts.
pub const MAX_EXACT_DIM: usize = 4;

type Q = BigRational;

struct Halfspace {
    a: Vec<Q>,
    b: Q,
}

impl Halfspace {
    fn eval(&self, x: &[Q]) -> Q {
        self.a.iter().zip(x).map(|(a, x)| a * x).sum()
    }
}

fn q(x: f64) -> Q {
    BigRational::from_float(x).expect("finite spectrum entry")
}

fn int(k: i64) -> Q {
    Q::from_integer(BigInt::from(k))
}

fn constraints(lambda: &[Q]) -> Vec<Halfspace> {
    let d = lambda.len();
    let n = d - 1;
    let total: Q = lambda.iter().sum();
    let mut hs = Vec::with_capacity(2 * n);
    // μ_{k+1} <= μ_k
    for k in 0..n.saturating_sub(1) {
        let mut a = vec![int(0); n];
        a[k] = int(-1);
        a[k + 1] = int(1);
        hs.push(Halfspace { a, b: int(0) });
    }
    // μ_d = total - Σ x <= μ_{d-1}
    let mut a = vec![int(-1); n];
    a[n - 1] = int(-2);
    hs.push(Halfspace { a, b: -total });
    // prefix sums of μ bounded by those of λ
    let mut prefix = int(0);
    for k in 0..n {
        prefix += &lambda[k];
        let a = (0..n).map(|i| int(i64::from(i <= k))).collect();
        hs.push(Halfspace { a, b: prefix.clone() });
    }
    hs
}

fn solve(rows: &[&Halfspace]) -> Option<Vec<Q>> {
    let n = rows.len();
    let mut m: Vec<Vec<Q>> = rows.iter().map(|h| h.a.iter().cloned().chain([h.b.clone()]).collect()).collect();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !m[r][col].is_zero())?;
        m.swap(col, pivot);
        let p = m[col][col].clone();
        for v in m[col].iter_mut() {
            *v /= &p;
        }
        for r in 0..n {
            if r != col && !m[r][col].is_zero() {
                let f = m[r][col].clone();
                for c in col..=n {
                    let delta = &f * &m[col][c];
                    m[r][c] -= delta;
                }
            }
        }
    }
    Some(m.into_iter().map(|row| row[n].clone()).collect())
}

fn vertices(hs: &[Halfspace], n: usize) -> Vec<Vec<Q>> {
    let mut out: Vec<Vec<Q>> = Vec::new();
    for combo in (0..hs.len()).combinations(n) {
        let rows: Vec<&Halfspace> = combo.iter().map(|&i| &hs[i]).collect();
        if let Some(x) = solve(&rows) {
            if hs.iter().all(|h| h.eval(&x) <= h.b) && !out.contains(&x) {
                out.push(x);
            }
        }
    }
    out
}

fn centroid(points: &[&Vec<Q>]) -> Vec<Q> {
    let n = points[0].len();
    let k = int(points.len() as i64);
    (0..n).map(|i| points.iter().map(|p| &p[i]).sum::<Q>() / &k).collect()
}

fn sub(a: &[Q], b: &[Q]) -> Vec<Q> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

fn cross2(u: &[Q], v: &[Q]) -> Q {
    &u[0] * &v[1] - &u[1] * &v[0]
}

fn det3(u: &[Q], v: &[Q], w: &[Q]) -> Q {
    &u[0] * (&v[1] * &w[2] - &v[2] * &w[1]) - &u[1] * (&v[0] * &w[2] - &v[2] * &w[0]) + &u[2] * (&v[0] * &w[1] - &v[1] * &w[0])
}

/// Sorts 2-D points counterclockwise around `c`.
fn angular_order(points: &mut [(Vec<Q>, usize)], c: &[Q]) {
    let half = |p: &[Q]| -> u8 {
        let (x, y) = (&p[0] - &c[0], &p[1] - &c[1]);
        if y.is_positive() || (y.is_zero() && x.is_positive()) {
            0
        } else {
            1
        }
    };
    points.sort_by(|(p, _), (r, _)| {
        half(p).cmp(&half(r)).then_with(|| {
            let cr = cross2(&sub(p, c), &sub(r, c));
            if cr.is_positive() {
                Ordering::Less
            } else if cr.is_negative() {
                Ordering::Greater
            } else {
                Ordering::Equal
            }
        })
    });
}

fn exact_volume(hs: &[Halfspace], verts: &[Vec<Q>], n: usize) -> Q {
    if verts.len() < n + 1 {
        return int(0);
    }
    if n == 1 {
        let (lo, hi) = verts.iter().map(|v| &v[0]).minmax().into_option().expect("nonempty");
        return hi - lo;
    }
    let all: Vec<&Vec<Q>> = verts.iter().collect();
    let c = centroid(&all);
    let mut seen = HashSet::new();
    let mut total = int(0);
    for h in hs {
        let tight: Vec<usize> = (0..verts.len()).filter(|&i| h.eval(&verts[i]) == h.b).collect();
        if tight.len() < n || !seen.insert(tight.clone()) {
            continue;
        }
        if n == 2 {
            if tight.len() == 2 {
                total += cross2(&sub(&verts[tight[0]], &c), &sub(&verts[tight[1]], &c)).abs() / int(2);
            }
            continue;
        }
        // n == 3: order the facet polygon in the coordinate plane where its
        // projection is nondegenerate, then fan it into tetrahedra with `c`
        let drop = (0..3).max_by(|&i, &j| h.a[i].abs().cmp(&h.a[j].abs())).expect("3 axes");
        let keep: Vec<usize> = (0..3).filter(|&i| i != drop).collect();
        let mut proj: Vec<(Vec<Q>, usize)> = tight.iter().map(|&i| (keep.iter().map(|&k| verts[i][k].clone()).collect(), i)).collect();
        let pc = centroid(&proj.iter().map(|(p, _)| p).collect::<Vec<_>>());
        angular_order(&mut proj, &pc);
        let v0 = &verts[proj[0].1];
        for w in proj[1..].windows(2) {
            let (v1, v2) = (&verts[w[0].1], &verts[w[1].1]);
            total += det3(&sub(v0, &c), &sub(v1, &c), &sub(v2, &c)).abs() / int(6);
        }
    }
    total
}

fn support_rationals(lambda: &SortedSpectrum) -> Result<Vec<Q>> {
    let s = lambda.support();
    if s.len() > MAX_EXACT_DIM {
        return Err(Error::Unsupported(format!("exact polytope volume needs support <= {MAX_EXACT_DIM}, got {}", s.len())));
    }
    Ok(s.values().iter().map(|&x| q(x)).collect())
}

/// Vertices of the chamber in the first `d - 1` coordinates (support only).
pub fn polytope_vertices(lambda: &SortedSpectrum) -> Result<Vec<Vec<f64>>> {
    let l = support_rationals(lambda)?;
    if l.len() < 2 {
        return Ok(vec![Vec::new()]);
    }
    let hs = constraints(&l);
    Ok(vertices(&hs, l.len() - 1).iter().map(|v| v.iter().map(|x| x.to_f64().unwrap_or(f64::NAN)).collect()).collect())
}

/// Euclidean volume of `{μ sorted nonincreasing, Σμ = 1, μ ≺ λ}` on the
/// support of `λ`, computed exactly and scaled by the simplex-plane factor
/// `√d`. A support of one element counts as volume 1.
pub fn exact_polytope_volume(lambda: &SortedSpectrum) -> Result<f64> {
    let l = support_rationals(lambda)?;
    let d = l.len();
    if d < 2 {
        return Ok(1.0);
    }
    let hs = constraints(&l);
    let verts = vertices(&hs, d - 1);
    let v = exact_volume(&hs, &verts, d - 1);
    Ok(v.to_f64().unwrap_or(f64::NAN) * (d as f64).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::monotones::{permutation_sum, source_sup_volume};
    use approx::assert_abs_diff_eq;

    fn spec(v: &[f64]) -> SortedSpectrum {
        SortedSpectrum::from_unsorted(v.to_vec()).unwrap()
    }

    #[test]
    fn segment() {
        let v = exact_polytope_volume(&spec(&[0.7, 0.3])).unwrap();
        assert_abs_diff_eq!(v, 0.2 * 2f64.sqrt(), epsilon = 1e-15);
        // (1, 0) strips to a single point
        assert_eq!(exact_polytope_volume(&spec(&[1.0, 0.0])).unwrap(), 1.0);
    }

    #[test]
    fn qutrit_quadrilateral() {
        let l = spec(&[0.5, 1.0 / 3.0, 1.0 / 6.0]);
        let mut verts = polytope_vertices(&l).unwrap();
        verts.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let expect = [[1.0 / 3.0, 1.0 / 3.0], [5.0 / 12.0, 5.0 / 12.0], [0.5, 0.25], [0.5, 1.0 / 3.0]];
        assert_eq!(verts.len(), 4);
        for (v, e) in verts.iter().zip(expect) {
            assert_abs_diff_eq!(v[0], e[0], epsilon = 1e-12);
            assert_abs_diff_eq!(v[1], e[1], epsilon = 1e-12);
        }
        assert_abs_diff_eq!(exact_polytope_volume(&l).unwrap(), 3f64.sqrt() / 72.0, epsilon = 1e-12);
    }

    #[test]
    fn extremes() {
        for d in 2..=4 {
            assert_abs_diff_eq!(exact_polytope_volume(&SortedSpectrum::uniform(d)).unwrap(), 0.0, epsilon = 1e-15);
            let near = {
                let mut v = vec![1e-7; d];
                v[0] = 1.0 - 1e-7 * (d - 1) as f64;
                spec(&v)
            };
            assert_abs_diff_eq!(exact_polytope_volume(&near).unwrap(), source_sup_volume(d), epsilon = 1e-5 * source_sup_volume(d));
        }
    }

    #[test]
    fn matches_permutation_sum_in_four_dims() {
        let l = spec(&[0.4, 0.3, 0.2, 0.1]);
        let exact = exact_polytope_volume(&l).unwrap();
        assert_abs_diff_eq!(exact, source_sup_volume(4) * permutation_sum(&l).unwrap(), epsilon = 1e-12);
    }

    #[test]
    fn too_large() {
        assert!(exact_polytope_volume(&SortedSpectrum::uniform(5)).is_err());
    }
}
