//! Gram matrices of lattices used throughout the tests and fixtures.

use super::EvenLattice;

fn cartan(n: usize, edges: &[(usize, usize)]) -> Vec<Vec<i64>> {
    let mut g = vec![vec![0i64; n]; n];
    for (i, row) in g.iter_mut().enumerate() {
        row[i] = 2;
    }
    for &(i, j) in edges {
        g[i][j] = -1;
        g[j][i] = -1;
    }
    g
}

/// Root lattice E8 (Cartan matrix, branch node 2).
pub fn e8_gram() -> Vec<Vec<i64>> {
    cartan(8, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 6), (2, 7)])
}

pub fn d4_gram() -> Vec<Vec<i64>> {
    cartan(4, &[(0, 1), (1, 2), (1, 3)])
}

/// D_n for n >= 3.
pub fn dn_gram(n: usize) -> Vec<Vec<i64>> {
    let mut edges: Vec<(usize, usize)> = (0..n - 2).map(|i| (i, i + 1)).collect();
    edges.push((n - 3, n - 1));
    cartan(n, &edges)
}

pub fn an_gram(n: usize) -> Vec<Vec<i64>> {
    let edges: Vec<(usize, usize)> = (0..n.saturating_sub(1)).map(|i| (i, i + 1)).collect();
    cartan(n, &edges)
}

/// Hyperbolic plane.
pub fn u_gram() -> Vec<Vec<i64>> {
    vec![vec![0, 1], vec![1, 0]]
}

pub fn block_sum(blocks: &[Vec<Vec<i64>>]) -> Vec<Vec<i64>> {
    let n: usize = blocks.iter().map(|b| b.len()).sum();
    let mut g = vec![vec![0i64; n]; n];
    let mut off = 0;
    for b in blocks {
        for (i, row) in b.iter().enumerate() {
            for (j, &x) in row.iter().enumerate() {
                g[off + i][off + j] = x;
            }
        }
        off += b.len();
    }
    g
}

/// E8 + D4 + <-2> + <-2>, signature (12, 2).
pub fn fixture_12_2_gram() -> Vec<Vec<i64>> {
    block_sum(&[e8_gram(), d4_gram(), vec![vec![-2]], vec![vec![-2]]])
}

pub fn fixture_12_2() -> EvenLattice {
    EvenLattice::new(fixture_12_2_gram()).expect("fixture lattice is valid")
}

pub fn e8() -> EvenLattice {
    EvenLattice::new(e8_gram()).expect("E8 is valid")
}
