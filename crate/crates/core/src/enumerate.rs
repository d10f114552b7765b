//! Short-vector enumeration in positive definite cosets (Fincke-Pohst).
//!
//! Floating point is used only to prune; every reported value is recomputed exactly.

use num_traits::ToPrimitive;

use crate::lattice::DualVector;
use crate::num::Rational;

struct Decomp {
    q: Vec<f64>,
    u: Vec<Vec<f64>>,
}

fn decompose(gram: &[Vec<i64>]) -> Decomp {
    let n = gram.len();
    // Q(y) = y^T A y with A = gram / 2
    let mut a: Vec<Vec<f64>> = gram.iter().map(|r| r.iter().map(|&x| x as f64 / 2.0).collect()).collect();
    let mut q = vec![0.0; n];
    let mut u = vec![vec![0.0; n]; n];
    for i in 0..n {
        q[i] = a[i][i];
        for j in i + 1..n {
            u[i][j] = a[i][j] / q[i];
        }
        for k in i + 1..n {
            for l in i + 1..n {
                a[k][l] -= q[i] * u[i][k] * u[i][l];
            }
        }
    }
    Decomp { q, u }
}

fn to_f64(x: &Rational) -> f64 {
    x.numer().to_f64().unwrap() / x.denom().to_f64().unwrap()
}

/// Calls `visit(shift)` for every integer shift `x` with `Q(rep + x) <= bound` (up to
/// floating-point slack; callers filter exactly).
pub fn for_each_coset_vector(
    gram: &[Vec<i64>],
    rep: &DualVector,
    bound: &Rational,
    mut visit: impl FnMut(&[i64]),
) {
    let n = gram.len();
    if n == 0 {
        visit(&[]);
        return;
    }
    let d = decompose(gram);
    let b = to_f64(bound);
    let slack = 1e-7 * (1.0 + b.abs());
    let offs: Vec<f64> = rep.num.iter().map(|&c| c as f64 / rep.den as f64).collect();
    let mut y = vec![0.0f64; n];
    let mut x = vec![0i64; n];
    fn rec(
        i: usize,
        rem: f64,
        d: &Decomp,
        offs: &[f64],
        slack: f64,
        y: &mut [f64],
        x: &mut [i64],
        visit: &mut dyn FnMut(&[i64]),
    ) {
        let n = y.len();
        let center: f64 = -(i + 1..n).map(|j| d.u[i][j] * y[j]).sum::<f64>();
        let r = ((rem + slack).max(0.0) / d.q[i]).sqrt();
        let lo = (center - r - offs[i]).ceil() as i64;
        let hi = (center + r - offs[i]).floor() as i64;
        for xi in lo..=hi {
            x[i] = xi;
            y[i] = xi as f64 + offs[i];
            let t = y[i] - center;
            let left = rem - d.q[i] * t * t;
            if left < -slack {
                continue;
            }
            if i == 0 {
                visit(x);
            } else {
                rec(i - 1, left, d, offs, slack, y, x, visit);
            }
        }
    }
    rec(n - 1, b, &d, &offs, slack, &mut y, &mut x, &mut visit);
}

fn exact_q(gram: &[Vec<i64>], rep: &DualVector, x: &[i64]) -> Rational {
    let v: Vec<i128> = rep.num.iter().zip(x).map(|(&a, &b)| a as i128 + b as i128 * rep.den as i128).collect();
    let mut s: i128 = 0;
    for (i, row) in gram.iter().enumerate() {
        for (j, &g) in row.iter().enumerate() {
            s += v[i] * g as i128 * v[j];
        }
    }
    Rational::new(s.into(), (2 * rep.den as i128 * rep.den as i128).into())
}

/// All shifts `x` with `Q(rep + x) = m` exactly.
pub fn coset_vectors_with_norm(gram: &[Vec<i64>], rep: &DualVector, m: &Rational) -> Vec<Vec<i64>> {
    let mut out = Vec::new();
    for_each_coset_vector(gram, rep, m, |x| {
        if exact_q(gram, rep, x) == *m {
            out.push(x.to_vec());
        }
    });
    out
}

/// Counts of `Q(rep + x)` over the coset, for every value up to `bound`.
pub fn coset_value_counts(gram: &[Vec<i64>], rep: &DualVector, bound: &Rational) -> std::collections::BTreeMap<Rational, u64> {
    let mut out = std::collections::BTreeMap::new();
    for_each_coset_vector(gram, rep, bound, |x| {
        let q = exact_q(gram, rep, x);
        if q <= *bound {
            *out.entry(q).or_insert(0) += 1;
        }
    });
    out
}

/// Bound on `|x_i|` over integer shifts with `Q(rep + x) <= m`.
pub fn coordinate_bound(gram: &[Vec<i64>], m: &Rational) -> Vec<i64> {
    let n = gram.len();
    let rows: Vec<Vec<Rational>> = gram
        .iter()
        .map(|r| r.iter().map(|&x| Rational::from_integer(x.into())).collect())
        .collect();
    let mf = to_f64(m).max(0.0);
    (0..n)
        .map(|i| {
            // (G^{-1})_{ii} via solving G y = e_i
            let mut e = vec![Rational::from_integer(0.into()); n];
            e[i] = Rational::from_integer(1.into());
            let y = crate::matrix::solve_left(&crate::matrix::transpose(&rows), &e)
                .expect("definite gram is invertible");
            let gii = to_f64(&y[i]);
            (2.0 * mf * gii).sqrt().floor() as i64 + 1
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::standard::*;

    #[test]
    fn e8_shell_sizes() {
        let g = e8_gram();
        let rep = DualVector { num: vec![0; 8], den: 1 };
        let counts = coset_value_counts(&g, &rep, &Rational::from_integer(2.into()));
        assert_eq!(counts[&Rational::from_integer(1.into())], 240);
        assert_eq!(counts[&Rational::from_integer(2.into())], 2160);
    }

    #[test]
    fn rank_one_coset() {
        // <2>, coset 1/2: values (k + 1/2)^2
        let rep = DualVector { num: vec![1], den: 2 };
        let v = coset_vectors_with_norm(&[vec![2]], &rep, &crate::num::rat(9, 4));
        assert_eq!(v.len(), 2);
    }
}
