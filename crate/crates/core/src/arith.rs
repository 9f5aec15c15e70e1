//! Modular arithmetic over F_p and the per-prime tables shared by the
//! other modules.

use std::f64::consts::TAU;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Default upper limit on p (exclusive).
pub const DEFAULT_PRIME_CAP: u64 = 1 << 26;
/// Hard upper limit on p (exclusive); overriding the cap cannot exceed this.
pub const HARD_PRIME_CAP: u64 = 1 << 31;

// Witnesses {2..37} make Miller-Rabin deterministic below 3.3 * 10^24.
const MR_WITNESSES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

#[inline]
pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Deterministic primality test for every 64-bit input.
pub fn is_prime(m: u64) -> bool {
    if m < 2 {
        return false;
    }
    for &q in &MR_WITNESSES {
        if m.is_multiple_of(q) {
            return m == q;
        }
    }
    let s = (m - 1).trailing_zeros();
    let d = (m - 1) >> s;
    'witness: for &a in &MR_WITNESSES {
        let mut x = pow_mod(a, d, m);
        if x == 1 || x == m - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, m);
            if x == m - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Inverse of `a` modulo the prime `p`, in `1..p`.
pub fn mod_inverse(a: u64, p: u64) -> Result<u64> {
    let a = a % p;
    if a == 0 {
        return Err(Error::ZeroResidue { value: a, p });
    }
    // extended Euclid on (a, p)
    let (mut r0, mut r1) = (p as i128, a as i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    Ok(t0.rem_euclid(p as i128) as u64)
}

/// Distinct prime factors of `m`, ascending.
pub fn prime_factors(mut m: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut q = 2u64;
    while q * q <= m {
        if m.is_multiple_of(q) {
            out.push(q);
            while m.is_multiple_of(q) {
                m /= q;
            }
        }
        q += if q == 2 { 1 } else { 2 };
    }
    if m > 1 {
        out.push(m);
    }
    out
}

/// Smallest generator of F_p*.
pub fn find_generator(p: u64) -> u64 {
    if p == 2 {
        return 1;
    }
    let order = p - 1;
    let factors = prime_factors(order);
    (2..p)
        .find(|&g| factors.iter().all(|&q| pow_mod(g, order / q, p) != 1))
        .expect("F_p* is cyclic, a generator exists")
}

/// exp(2 pi i z / p) for a reduced residue `z`.
#[inline]
pub fn eval_ep(z: u64, p: u64) -> Complex64 {
    let (s, c) = (TAU * (z as f64 / p as f64)).sin_cos();
    Complex64::new(c, s)
}

/// Exponent n with 2^n <= p < 2^(n+1).
pub fn bit_exponent(p: u64) -> u32 {
    63 - p.leading_zeros()
}

#[derive(Debug, Clone, Copy)]
pub struct ContextOptions {
    /// Exclusive upper limit on p; clamped to [`HARD_PRIME_CAP`].
    pub cap: u64,
    /// Build the generator and discrete-log table.
    pub dlog: bool,
}

impl Default for ContextOptions {
    fn default() -> Self {
        ContextOptions {
            cap: DEFAULT_PRIME_CAP,
            dlog: false,
        }
    }
}

/// The field F_p with derived constants and lookup tables.
///
/// Immutable after construction. The inverse table is always built; the
/// generator and discrete-log table only on request.
#[derive(Debug, Clone)]
pub struct PrimeContext {
    p: u64,
    n: u32,
    generator: Option<u64>,
    inv: Vec<u32>,
    dlog: Option<Vec<u32>>,
}

impl PrimeContext {
    pub fn new(p: u64) -> Result<Self> {
        Self::with_options(p, ContextOptions::default())
    }

    pub fn with_options(p: u64, opts: ContextOptions) -> Result<Self> {
        let cap = opts.cap.min(HARD_PRIME_CAP);
        if p < 3 {
            return Err(Error::PrimeTooSmall { p });
        }
        if p >= cap {
            return Err(Error::PrimeTooLarge { p, cap });
        }
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        let inv = inverse_table(p);
        let mut ctx = PrimeContext {
            p,
            n: bit_exponent(p),
            generator: None,
            inv,
            dlog: None,
        };
        if opts.dlog {
            ctx = ctx.with_dlog();
        }
        Ok(ctx)
    }

    /// Builds the generator and discrete-log table if not already present.
    pub fn with_dlog(mut self) -> Self {
        if self.dlog.is_none() {
            let g = find_generator(self.p);
            let mut dlog = vec![0u32; self.p as usize];
            let mut x = 1u64;
            for j in 0..self.p - 1 {
                dlog[x as usize] = j as u32;
                x = x * g % self.p;
            }
            self.generator = Some(g);
            self.dlog = Some(dlog);
        }
        self
    }

    #[inline]
    pub fn p(&self) -> u64 {
        self.p
    }

    /// Bit exponent n with 2^n <= p < 2^(n+1).
    #[inline]
    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn generator(&self) -> Option<u64> {
        self.generator
    }

    /// Table-backed inverse; `a` must be in `1..p`.
    #[inline]
    pub fn inv(&self, a: u64) -> u64 {
        self.inv[a as usize] as u64
    }

    pub fn inverse(&self, a: u64) -> Result<u64> {
        let a = a % self.p;
        if a == 0 {
            return Err(Error::ZeroResidue {
                value: a,
                p: self.p,
            });
        }
        Ok(self.inv(a))
    }

    /// Index of `a` base the generator; `None` without a dlog table.
    pub fn dlog(&self, a: u64) -> Option<u64> {
        self.dlog.as_ref().map(|t| t[a as usize] as u64)
    }

    pub fn has_dlog(&self) -> bool {
        self.dlog.is_some()
    }

    /// Canonical representative of `x` in `0..p`.
    #[inline]
    pub fn reduce(&self, x: u64) -> u64 {
        x % self.p
    }

    /// Checks that `a` lies in `1..p`.
    pub fn check_unit(&self, what: &'static str, a: u64) -> Result<u64> {
        if a == 0 || a >= self.p {
            return Err(Error::out_of_range(what, a, 1, self.p - 1));
        }
        Ok(a)
    }
}

// inv(a) = -(p / a) * inv(p mod a) mod p, in O(p) total.
fn inverse_table(p: u64) -> Vec<u32> {
    let mut inv = vec![0u32; p as usize];
    inv[1] = 1;
    for a in 2..p {
        let prev = inv[(p % a) as usize] as u64;
        inv[a as usize] = ((p - (p / a) * prev % p) % p) as u32;
    }
    inv
}

/// Precomputed e_p(z) for all z in `0..p`.
///
/// Built with exact conjugate symmetry: entry p - k is the conjugate of k.
#[derive(Debug, Clone)]
pub struct RootTable {
    p: u64,
    cos: Vec<f64>,
    sin: Vec<f64>,
}

impl RootTable {
    pub fn new(p: u64) -> Self {
        let len = p as usize;
        let mut cos = vec![0.0; len];
        let mut sin = vec![0.0; len];
        cos[0] = 1.0;
        for k in 1..=len / 2 {
            let w = eval_ep(k as u64, p);
            cos[k] = w.re;
            sin[k] = w.im;
            cos[len - k] = w.re;
            sin[len - k] = -w.im;
        }
        RootTable { p, cos, sin }
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    #[inline]
    pub fn cos(&self, z: u64) -> f64 {
        self.cos[z as usize]
    }

    #[inline]
    pub fn sin(&self, z: u64) -> f64 {
        self.sin[z as usize]
    }

    #[inline]
    pub fn get(&self, z: u64) -> Complex64 {
        Complex64::new(self.cos[z as usize], self.sin[z as usize])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn trial_division(m: u64) -> bool {
        if m < 2 {
            return false;
        }
        let mut d = 2u64;
        while d * d <= m {
            if m.is_multiple_of(d) {
                return false;
            }
            d += 1;
        }
        true
    }

    #[test]
    fn primality_examples() {
        assert!(!is_prime(100));
        assert!(is_prime(101));
        assert!(is_prime(2_147_483_647));
        assert!(trial_division(2_147_483_647));
        assert!(!is_prime(0));
        assert!(!is_prime(1));
        assert!(is_prime(2));
        // strong pseudoprimes to several small bases
        assert!(!is_prime(3_215_031_751));
        assert!(!is_prime(3_825_123_056_546_413_051));
        assert!(is_prime(18_446_744_073_709_551_557));
    }

    #[test]
    fn primality_matches_trial_division() {
        for m in 0..20_000u64 {
            assert_eq!(is_prime(m), trial_division(m), "m = {m}");
        }
    }

    #[test]
    fn inverse_examples() {
        assert_eq!(mod_inverse(1, 101).unwrap(), 1);
        assert_eq!(mod_inverse(2, 5).unwrap(), 3);
        assert_eq!(mod_inverse(3, 7).unwrap(), 5);
        assert!(matches!(mod_inverse(0, 7), Err(Error::ZeroResidue { .. })));
        assert!(matches!(mod_inverse(14, 7), Err(Error::ZeroResidue { .. })));
    }

    #[test]
    fn inverse_table_matches_euclid() {
        for p in [3u64, 5, 7, 101, 1009] {
            let ctx = PrimeContext::new(p).unwrap();
            for a in 1..p {
                assert_eq!(ctx.inv(a), mod_inverse(a, p).unwrap());
                assert_eq!(a * ctx.inv(a) % p, 1);
                assert_eq!(ctx.inv(ctx.inv(a)), a);
            }
        }
    }

    #[test]
    fn generator_examples() {
        assert_eq!(find_generator(5), 2);
        assert_eq!(find_generator(7), 3);
        assert_eq!(find_generator(3), 2);
        assert_eq!(find_generator(41), 6);
    }

    #[test]
    fn dlog_is_bijection() {
        let ctx = PrimeContext::new(1009).unwrap().with_dlog();
        let g = ctx.generator().unwrap();
        let mut seen = vec![false; 1008];
        for a in 1..1009u64 {
            let j = ctx.dlog(a).unwrap();
            assert!(!seen[j as usize]);
            seen[j as usize] = true;
            assert_eq!(pow_mod(g, j, 1009), a);
        }
    }

    #[test]
    fn ep_examples() {
        let one = eval_ep(0, 7);
        assert_eq!((one.re, one.im), (1.0, 0.0));
        let w = eval_ep(1, 5);
        assert!((w.re - 0.309017).abs() < 1e-6);
        assert!((w.im - 0.951057).abs() < 1e-6);
        let ctx = PrimeContext::new(13).unwrap();
        assert_eq!(eval_ep(ctx.reduce(4 + 13), 13), eval_ep(4, 13));
    }

    #[test]
    fn ep_unit_modulus_and_cancellation() {
        for p in [3u64, 101, 10007] {
            let mut sum = Complex64::new(0.0, 0.0);
            for z in 0..p {
                let w = eval_ep(z, p);
                assert!((w.norm() - 1.0).abs() <= 2.0 * f64::EPSILON);
                sum += w;
            }
            assert!(sum.norm() < p as f64 * f64::EPSILON, "p = {p}: {sum}");
        }
    }

    #[test]
    fn root_table_symmetry() {
        let t = RootTable::new(101);
        for k in 1..101u64 {
            assert_eq!(t.cos(k), t.cos(101 - k));
            assert_eq!(t.sin(k), -t.sin(101 - k));
            assert!((t.get(k) - eval_ep(k, 101)).norm() < 1e-15);
        }
    }

    #[test]
    fn context_validation() {
        assert!(matches!(
            PrimeContext::new(2),
            Err(Error::PrimeTooSmall { .. })
        ));
        assert!(matches!(PrimeContext::new(91), Err(Error::NotPrime(91))));
        assert!(matches!(
            PrimeContext::new(67_108_879),
            Err(Error::PrimeTooLarge { .. })
        ));
        let big = ContextOptions {
            cap: u64::MAX,
            dlog: false,
        };
        assert!(matches!(
            PrimeContext::with_options(2_147_483_659, big),
            Err(Error::PrimeTooLarge { .. })
        ));
        let ctx = PrimeContext::new(5).unwrap();
        assert_eq!(ctx.n(), 2);
        assert_eq!(PrimeContext::new(65537).unwrap().n(), 16);
        assert_eq!(PrimeContext::new(65521).unwrap().n(), 15);
    }
}
