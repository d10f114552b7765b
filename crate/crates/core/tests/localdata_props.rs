use borcherds_core::localdata::{count, count_gauss, count_naive, CountConfig};
use borcherds_core::num::rat;
use borcherds_core::EvenLattice;
use num_bigint::BigInt;
use proptest::prelude::*;

fn even_gram(rank: usize) -> impl Strategy<Value = Vec<Vec<i64>>> {
    let diag = proptest::collection::vec(-3i64..=3, rank);
    let off = proptest::collection::vec(-6i64..=6, rank * (rank - 1) / 2);
    (diag, off).prop_filter_map("degenerate", move |(d, o)| {
        let mut g = vec![vec![0i64; rank]; rank];
        let mut k = 0;
        for i in 0..rank {
            g[i][i] = 2 * d[i];
            for j in i + 1..rank {
                g[i][j] = o[k];
                g[j][i] = o[k];
                k += 1;
            }
        }
        EvenLattice::new(g.clone()).ok().map(|_| g)
    })
}

fn lattice() -> impl Strategy<Value = EvenLattice> {
    (1usize..=3).prop_flat_map(even_gram).prop_map(|g| EvenLattice::new(g).unwrap())
}

const PRIME_POWERS: [(u64, u32); 12] =
    [(2, 1), (2, 2), (2, 3), (2, 4), (2, 5), (3, 1), (3, 2), (3, 3), (5, 1), (5, 2), (7, 1), (7, 3)];

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn gauss_equals_naive(l in lattice(), pw in 0usize..PRIME_POWERS.len(), mu_seed in 0usize..1000, shift in -3i64..6) {
        let (p, w) = PRIME_POWERS[pw];
        let mu = mu_seed % l.disc().order();
        let m = l.disc().q(mu) + rat(shift, 1);
        let a = p.pow(w);
        let naive = count_naive(&l, &m, mu, a, 1 << 30).unwrap();
        let gauss = count_gauss(&l, &m, mu, p, w).unwrap();
        prop_assert_eq!(naive.count, gauss.count);
    }

    #[test]
    fn count_is_multiplicative(l in lattice(), i in 0usize..4, j in 0usize..4, mu_seed in 0usize..1000, shift in -3i64..6) {
        let a1 = [2u64, 4, 8, 9][i];
        let a2 = [3u64, 5, 7, 25][j];
        prop_assume!(num_integer::gcd(a1, a2) == 1);
        let mu = mu_seed % l.disc().order();
        let m = l.disc().q(mu) + rat(shift, 1);
        let cfg = CountConfig { naive_cap: 1 << 30, cross_check: true };
        let c = count(&l, &m, mu, a1 * a2, &cfg).unwrap().count;
        let c1 = count(&l, &m, mu, a1, &cfg).unwrap().count;
        let c2 = count(&l, &m, mu, a2, &cfg).unwrap().count;
        prop_assert_eq!(c, c1 * c2);
    }
}

#[test]
fn hensel_stability_unimodular_primes() {
    // for p not dividing 2 det, a ternary form takes every unit value p^2 +- p times mod p
    let l = EvenLattice::new(vec![vec![2, 1, 0], vec![1, 2, 1], vec![0, 1, 4]]).unwrap();
    let det = l.det().clone();
    for p in [3u64, 5, 7, 11, 13] {
        if (&det % BigInt::from(p)) == BigInt::from(0) {
            continue;
        }
        for m in 1..6 {
            let c = count(&l, &rat(m, 1), 0, p, &CountConfig::default()).unwrap().count;
            if m as u64 % p == 0 {
                continue;
            }
            let lo = BigInt::from(p * p - p);
            let hi = BigInt::from(p * p + p);
            assert!(c == lo || c == hi, "p={p} m={m} count={c}");
        }
    }
}
