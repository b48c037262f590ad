//! Exact Gaussian elimination over the rationals.

use alloc::vec::Vec;

use num_traits::Zero;

use crate::rational::Q;

/// Row-reduces `m` in place to reduced row echelon form and returns the pivot columns.
pub fn rref(m: &mut [Vec<Q>]) -> Vec<usize> {
    let rows = m.len();
    let cols = m.first().map_or(0, |r| r.len());
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = m[r][c].recip();
        for v in m[r].iter_mut() {
            *v *= &inv;
        }
        let pivot_row = m[r].clone();
        for (i, row) in m.iter_mut().enumerate() {
            if i != r && !row[c].is_zero() {
                let f = row[c].clone();
                for (v, pv) in row.iter_mut().zip(&pivot_row) {
                    *v -= &f * pv;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn rank(m: &[Vec<Q>]) -> usize {
    let mut w = m.to_vec();
    rref(&mut w).len()
}

/// Affine dimension of a point set (`-1` when empty).
pub fn affine_dim(points: &[&[Q]]) -> isize {
    let Some(base) = points.first() else {
        return -1;
    };
    let diffs: Vec<Vec<Q>> = points[1..]
        .iter()
        .map(|p| p.iter().zip(base.iter()).map(|(a, b)| a - b).collect())
        .collect();
    rank(&diffs) as isize
}

/// Unique solution of `a x = b`, or `None` when inconsistent or underdetermined.
pub fn solve_unique(a: &[Vec<Q>], b: &[Q]) -> Option<Vec<Q>> {
    let n = a.first().map_or(0, |r| r.len());
    let mut aug: Vec<Vec<Q>> = a
        .iter()
        .zip(b)
        .map(|(row, bi)| {
            let mut r = row.clone();
            r.push(bi.clone());
            r
        })
        .collect();
    let pivots = rref(&mut aug);
    if pivots.contains(&n) || pivots.len() != n {
        return None;
    }
    Some((0..n).map(|i| aug[i][n].clone()).collect())
}

/// Basis of the null space of `a` (columns = unknowns).
pub fn null_space(a: &[Vec<Q>], cols: usize) -> Vec<Vec<Q>> {
    let mut w = a.to_vec();
    let pivots = rref(&mut w);
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = alloc::vec![Q::zero(); cols];
            v[f] = crate::rational::one();
            for (r, &p) in pivots.iter().enumerate() {
                v[p] = -w[r][f].clone();
            }
            v
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{q, qf};
    use alloc::vec;

    #[test]
    fn solve_small() {
        let a = vec![vec![q(2), q(1)], vec![q(1), q(3)]];
        let x = solve_unique(&a, &[q(3), q(4)]).unwrap();
        assert_eq!(x, vec![q(1), q(1)]);
        let sing = vec![vec![q(1), q(2)], vec![q(2), q(4)]];
        assert!(solve_unique(&sing, &[q(1), q(2)]).is_none());
    }

    #[test]
    fn null_space_is_annihilated() {
        let a = vec![vec![q(1), q(1), q(1)], vec![q(-1), q(0), q(1)]];
        let ns = null_space(&a, 3);
        assert_eq!(ns.len(), 1);
        for row in &a {
            assert!(crate::rational::dot(row, &ns[0]).is_zero());
        }
    }

    #[test]
    fn affine_dims() {
        let pts = [vec![q(0), q(0)], vec![q(1), q(1)], vec![q(2), q(2)]];
        let refs: Vec<&[Q]> = pts.iter().map(|p| p.as_slice()).collect();
        assert_eq!(affine_dim(&refs), 1);
        let tri = [vec![q(0), q(0)], vec![q(1), q(0)], vec![qf(1, 2), q(1)]];
        let refs: Vec<&[Q]> = tri.iter().map(|p| p.as_slice()).collect();
        assert_eq!(affine_dim(&refs), 2);
    }
}
