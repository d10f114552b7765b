//! Exact integer and rational matrix routines.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::num::Rational;

pub type IntMatrix = Vec<Vec<BigInt>>;
pub type RatMatrix = Vec<Vec<Rational>>;

pub fn to_big(m: &[Vec<i64>]) -> IntMatrix {
    m.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect()
}

pub fn identity(n: usize) -> IntMatrix {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect())
        .collect()
}

pub fn mat_mul(a: &IntMatrix, b: &IntMatrix) -> IntMatrix {
    let n = a.len();
    let k = b.len();
    let m = if k == 0 { 0 } else { b[0].len() };
    let mut out = vec![vec![BigInt::zero(); m]; n];
    for i in 0..n {
        for l in 0..k {
            if a[i][l].is_zero() {
                continue;
            }
            for j in 0..m {
                out[i][j] += &a[i][l] * &b[l][j];
            }
        }
    }
    out
}

pub fn transpose<T: Clone>(a: &[Vec<T>]) -> Vec<Vec<T>> {
    if a.is_empty() {
        return Vec::new();
    }
    (0..a[0].len()).map(|j| a.iter().map(|r| r[j].clone()).collect()).collect()
}

/// Fraction-free determinant.
pub fn det_bareiss(m: &[Vec<i64>]) -> BigInt {
    let n = m.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut a = to_big(m);
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                Some(i) => {
                    a.swap(i, k);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                a[i][j] = v / &prev;
            }
        }
        prev = a[k][k].clone();
    }
    sign * &a[n - 1][n - 1]
}

/// Smith form: returns `(u, d, v)` with `u * m * v = diag(d)`, `u`, `v` unimodular,
/// `d[i] >= 0` and `d[i] | d[i+1]`.
pub fn smith_normal_form(m: &[Vec<i64>]) -> (IntMatrix, Vec<BigInt>, IntMatrix) {
    let n = m.len();
    let mut a = to_big(m);
    let mut u = identity(n);
    let mut v = identity(n);
    for t in 0..n {
        loop {
            // smallest nonzero entry of the trailing block
            let mut best: Option<(usize, usize)> = None;
            for i in t..n {
                for j in t..n {
                    if !a[i][j].is_zero()
                        && best.map_or(true, |(bi, bj)| a[i][j].abs() < a[bi][bj].abs())
                    {
                        best = Some((i, j));
                    }
                }
            }
            let Some((pi, pj)) = best else { return finish(a, u, v) };
            a.swap(t, pi);
            u.swap(t, pi);
            for row in a.iter_mut() {
                row.swap(t, pj);
            }
            for row in v.iter_mut() {
                row.swap(t, pj);
            }
            let mut dirty = false;
            for i in t + 1..n {
                if a[i][t].is_zero() {
                    continue;
                }
                let q = a[i][t].div_floor(&a[t][t]);
                for j in 0..n {
                    let d = &q * &a[t][j];
                    a[i][j] -= d;
                    let d = &q * &u[t][j];
                    u[i][j] -= d;
                }
                dirty |= !a[i][t].is_zero();
            }
            for j in t + 1..n {
                if a[t][j].is_zero() {
                    continue;
                }
                let q = a[t][j].div_floor(&a[t][t]);
                for i in 0..n {
                    let d = &q * &a[i][t];
                    a[i][j] -= d;
                    let d = &q * &v[i][t];
                    v[i][j] -= d;
                }
                dirty |= !a[t][j].is_zero();
            }
            if dirty {
                continue;
            }
            // divisibility of the remaining block
            let piv = a[t][t].clone();
            let bad = (t + 1..n).find(|&i| (t + 1..n).any(|j| !a[i][j].is_multiple_of(&piv)));
            match bad {
                Some(i) => {
                    for j in 0..n {
                        let x = a[i][j].clone();
                        a[t][j] += x;
                        let x = u[i][j].clone();
                        u[t][j] += x;
                    }
                }
                None => break,
            }
        }
    }
    finish(a, u, v)
}

fn finish(a: IntMatrix, u: IntMatrix, mut v: IntMatrix) -> (IntMatrix, Vec<BigInt>, IntMatrix) {
    let n = a.len();
    let mut d = Vec::with_capacity(n);
    for t in 0..n {
        if a[t][t].is_negative() {
            for row in v.iter_mut() {
                row[t] = -row[t].clone();
            }
        }
        d.push(a[t][t].abs());
    }
    (u, d, v)
}

/// Counts of positive and negative eigenvalues of a symmetric rational matrix, via
/// congruence diagonalization pivoting on the largest absolute diagonal entry
/// (lowest index on ties).
pub fn signature(m: &[Vec<i64>]) -> (usize, usize) {
    let n = m.len();
    let mut a: RatMatrix =
        m.iter().map(|r| r.iter().map(|&x| Rational::from_integer(x.into())).collect()).collect();
    let mut active: Vec<usize> = (0..n).collect();
    let (mut pos, mut neg) = (0, 0);
    while !active.is_empty() {
        let mut piv: Option<usize> = None;
        for &i in &active {
            if !a[i][i].is_zero() && piv.map_or(true, |p| a[i][i].abs() > a[p][p].abs()) {
                piv = Some(i);
            }
        }
        let p = match piv {
            Some(p) => p,
            None => {
                let pair = active.iter().flat_map(|&i| active.iter().map(move |&j| (i, j))).find(
                    |&(i, j)| i != j && !a[i][j].is_zero(),
                );
                let Some((i, j)) = pair else { break };
                // e_i <- e_i + e_j makes the diagonal entry 2 a_ij
                for k in 0..n {
                    let x = a[j][k].clone();
                    a[i][k] += x;
                }
                for k in 0..n {
                    let x = a[k][j].clone();
                    a[k][i] += x;
                }
                continue;
            }
        };
        if a[p][p].is_positive() {
            pos += 1;
        } else {
            neg += 1;
        }
        active.retain(|&i| i != p);
        for &i in &active {
            if a[i][p].is_zero() {
                continue;
            }
            let f = &a[i][p] / &a[p][p];
            for &j in &active {
                let d = &f * &a[p][j];
                a[i][j] -= d;
            }
            a[i][p] = Rational::zero();
            a[p][i] = Rational::zero();
        }
    }
    (pos, neg)
}

/// Reduced row echelon form in place; returns pivot columns.
pub fn rref(a: &mut RatMatrix) -> Vec<usize> {
    let rows = a.len();
    if rows == 0 {
        return Vec::new();
    }
    let cols = a[0].len();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !a[i][c].is_zero()) else { continue };
        a.swap(r, p);
        let inv = a[r][c].recip();
        for x in a[r].iter_mut() {
            *x *= &inv;
        }
        for i in 0..rows {
            if i != r && !a[i][c].is_zero() {
                let f = a[i][c].clone();
                for j in 0..cols {
                    let d = &f * &a[r][j];
                    a[i][j] -= d;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

/// Basis of the right kernel `{x : a x = 0}`.
pub fn kernel(a: &RatMatrix, cols: usize) -> Vec<Vec<Rational>> {
    let mut m = a.clone();
    let pivots = rref(&mut m);
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut x = vec![Rational::zero(); cols];
            x[f] = Rational::one();
            for (r, &pc) in pivots.iter().enumerate() {
                x[pc] = -m[r][f].clone();
            }
            x
        })
        .collect()
}

pub fn rank(a: &RatMatrix) -> usize {
    let mut m = a.clone();
    rref(&mut m).len()
}

/// Solves `x * rows = target` (x a row vector), if solvable.
pub fn solve_left(rows: &[Vec<Rational>], target: &[Rational]) -> Option<Vec<Rational>> {
    let d = rows.len();
    if d == 0 {
        return if target.iter().all(|t| t.is_zero()) { Some(Vec::new()) } else { None };
    }
    let n = target.len();
    // augmented system: columns are the basis rows, right-hand side is the target
    let mut aug: RatMatrix = (0..n)
        .map(|k| {
            let mut row: Vec<Rational> = rows.iter().map(|r| r[k].clone()).collect();
            row.push(target[k].clone());
            row
        })
        .collect();
    let pivots = rref(&mut aug);
    if pivots.contains(&d) {
        return None;
    }
    let mut x = vec![Rational::zero(); d];
    for (r, &pc) in pivots.iter().enumerate() {
        x[pc] = aug[r][d].clone();
    }
    Some(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e8() -> Vec<Vec<i64>> {
        crate::lattice::standard::e8_gram()
    }

    #[test]
    fn determinants() {
        assert_eq!(det_bareiss(&e8()), BigInt::from(1));
        assert_eq!(det_bareiss(&[vec![0, 1], vec![1, 0]]), BigInt::from(-1));
        assert_eq!(det_bareiss(&[vec![2, 4], vec![1, 2]]), BigInt::from(0));
    }

    #[test]
    fn smith_form_reconstructs() {
        let g = vec![vec![2, 1, 0], vec![1, 4, 2], vec![0, 2, 6]];
        let (u, d, v) = smith_normal_form(&g);
        let prod = mat_mul(&mat_mul(&u, &to_big(&g)), &v);
        for i in 0..3 {
            for j in 0..3 {
                let want = if i == j { d[i].clone() } else { BigInt::zero() };
                assert_eq!(prod[i][j], want);
            }
        }
        let det: BigInt = d.iter().product();
        assert_eq!(det, det_bareiss(&g).abs());
        assert!(d[1].is_multiple_of(&d[0]) && d[2].is_multiple_of(&d[1]));
    }

    #[test]
    fn signatures() {
        assert_eq!(signature(&[vec![0, 1], vec![1, 0]]), (1, 1));
        assert_eq!(signature(&e8()), (8, 0));
        assert_eq!(signature(&[vec![-2]]), (0, 1));
        assert_eq!(signature(&[vec![0, 0, 1], vec![0, -2, 0], vec![1, 0, 0]]), (1, 2));
    }

    #[test]
    fn kernel_and_solve() {
        let a: RatMatrix = vec![vec![crate::num::rint(1), crate::num::rint(2), crate::num::rint(3)]];
        let k = kernel(&a, 3);
        assert_eq!(k.len(), 2);
        let rows = vec![vec![crate::num::rint(1), crate::num::rint(0)]];
        assert!(solve_left(&rows, &[crate::num::rint(3), crate::num::rint(1)]).is_none());
        assert_eq!(
            solve_left(&rows, &[crate::num::rint(3), crate::num::rint(0)]).unwrap(),
            vec![crate::num::rint(3)]
        );
    }
}
