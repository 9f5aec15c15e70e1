//! Brute-force reference computations.
//!
//! Nothing here shares code with the fast paths it checks: no inverse
//! tables, no root tables, no transforms, no sorting tricks.

use std::f64::consts::TAU;

use crate::arith::pow_mod;

/// K_p(a) from the definition, inverses by Fermat, plain summation.
pub fn kloosterman_direct(p: u64, a: u64) -> f64 {
    (1..p)
        .map(|x| {
            let xinv = pow_mod(x, p - 2, p);
            let z = (x + a % p * xinv) % p;
            (TAU * z as f64 / p as f64).cos()
        })
        .sum()
}

/// 2^n f^(r) by the O(4^n) double sum.
pub fn walsh_direct(bits: &[u8]) -> Vec<i64> {
    let len = bits.len();
    (0..len)
        .map(|r| {
            (0..len)
                .map(|a| {
                    let e = (bits[a] as u32 + (a & r).count_ones()) & 1;
                    if e == 0 {
                        1
                    } else {
                        -1
                    }
                })
                .sum()
        })
        .collect()
}

/// sup_gamma |T(gamma)/N - gamma| by evaluating at and just below every
/// sample point and at gamma = 0, 1, counting by linear scan.
pub fn star_discrepancy_brute(points: &[f64]) -> f64 {
    let n = points.len() as f64;
    let count_le = |g: f64| points.iter().filter(|&&x| x <= g).count() as f64;
    let count_lt = |g: f64| points.iter().filter(|&&x| x < g).count() as f64;
    let mut best = (count_le(0.0) / n)
        .abs()
        .max((count_le(1.0) / n - 1.0).abs());
    for &x in points {
        best = best.max((count_le(x) / n - x).abs());
        best = best.max((count_lt(x) / n - x).abs());
    }
    best
}

/// Smallest prime >= m.
pub fn next_prime(mut m: u64) -> u64 {
    while !crate::arith::is_prime(m) {
        m += 1;
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn direct_p5() {
        let want = [0.381966, -3.236068, 1.236068, 2.618034];
        for (a, w) in (1..5).zip(want) {
            assert!((kloosterman_direct(5, a) - w).abs() < 1e-6);
        }
    }

    #[test]
    fn brute_discrepancy_small() {
        assert_eq!(star_discrepancy_brute(&[0.5]), 0.5);
        assert_eq!(star_discrepancy_brute(&[0.25, 0.75]), 0.25);
    }

    #[test]
    fn walsh_constant() {
        assert_eq!(walsh_direct(&[0, 0, 0, 0]), vec![4, 0, 0, 0]);
    }

    #[test]
    fn primes_near_powers() {
        assert_eq!(next_prime(1 << 12), 4099);
        assert_eq!(next_prime(1 << 14), 16411);
        assert_eq!(next_prime(1 << 16), 65537);
    }
}
