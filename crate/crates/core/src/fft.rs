//! Prime-length DFT and cyclic convolution.
//!
//! The power-of-two (and, for Rader, length p - 1) inner transforms come from
//! `rustfft`; the chirp and generator reindexing around them live here.

use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::arith::{find_generator, mod_inverse, pow_mod};
use crate::error::{Error, Result};

/// Largest padded transform length the batch paths will allocate.
pub const MAX_TRANSFORM_LEN: usize = 1 << 27;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DftAlgorithm {
    /// Chirp-z over a power-of-two transform of length >= 2n - 1.
    #[default]
    Bluestein,
    /// Generator reindexing into a length n - 1 cyclic convolution.
    Rader,
}

/// Sign of the exponent in `exp(sign * 2 pi i j k / n)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    /// exp(-2 pi i jk/n)
    Forward,
    /// exp(+2 pi i jk/n), unnormalized
    Backward,
}

impl Direction {
    fn sign(self) -> f64 {
        match self {
            Direction::Forward => -1.0,
            Direction::Backward => 1.0,
        }
    }
}

/// Padded length used by Bluestein for a length-`n` input.
pub fn bluestein_len(n: usize) -> usize {
    (2 * n - 1).next_power_of_two()
}

/// Unnormalized DFT of a prime-length input.
pub fn prime_dft(
    input: &[Complex64],
    dir: Direction,
    algo: DftAlgorithm,
) -> Result<Vec<Complex64>> {
    match algo {
        DftAlgorithm::Bluestein => bluestein(input, dir),
        DftAlgorithm::Rader => rader(input, dir),
    }
}

/// Bluestein chirp-z transform; works for any length.
pub fn bluestein(input: &[Complex64], dir: Direction) -> Result<Vec<Complex64>> {
    let n = input.len();
    if n <= 1 {
        return Ok(input.to_vec());
    }
    let big = bluestein_len(n);
    if big > MAX_TRANSFORM_LEN {
        return Err(Error::TransformTooLarge {
            p: n as u64,
            len: big,
            max: MAX_TRANSFORM_LEN,
        });
    }
    // chirp[k] = exp(sign * i pi k^2 / n); k^2 is reduced mod 2n so the
    // angle stays small and exact.
    let modulus = 2 * n as u64;
    let sign = dir.sign();
    let chirp: Vec<Complex64> = (0..n as u64)
        .map(|k| {
            let e = (k * k) % modulus;
            let (s, c) = (sign * PI * (e as f64 / n as f64)).sin_cos();
            Complex64::new(c, s)
        })
        .collect();

    let mut planner = FftPlanner::<f64>::new();
    let fwd = planner.plan_fft_forward(big);
    let inv = planner.plan_fft_inverse(big);

    let zero = Complex64::new(0.0, 0.0);
    let mut y = vec![zero; big];
    for ((slot, x), c) in y.iter_mut().zip(input).zip(&chirp) {
        *slot = x * c;
    }
    let mut kernel = vec![zero; big];
    kernel[0] = chirp[0].conj();
    for k in 1..n {
        let b = chirp[k].conj();
        kernel[k] = b;
        kernel[big - k] = b;
    }
    fwd.process(&mut y);
    fwd.process(&mut kernel);
    let scale = 1.0 / big as f64;
    for (a, b) in y.iter_mut().zip(&kernel) {
        *a = *a * b * scale;
    }
    inv.process(&mut y);
    Ok(y.iter().zip(&chirp).map(|(z, c)| z * c).collect())
}

/// Rader's algorithm; `input.len()` must be an odd prime.
pub fn rader(input: &[Complex64], dir: Direction) -> Result<Vec<Complex64>> {
    let n = input.len();
    if n < 3 || !crate::arith::is_prime(n as u64) {
        return Err(Error::InvalidArgument(format!(
            "Rader transform needs an odd prime length, got {n}"
        )));
    }
    let p = n as u64;
    let m = n - 1;
    let g = find_generator(p);
    let g_inv = mod_inverse(g, p)?;
    let sign = dir.sign();

    let mut planner = FftPlanner::<f64>::new();
    let fwd = planner.plan_fft_forward(m);
    let inv = planner.plan_fft_inverse(m);

    // a[q] = x[g^-q], w[j] = exp(sign 2 pi i g^j / p)
    let mut a = Vec::with_capacity(m);
    let mut w = Vec::with_capacity(m);
    let (mut gi, mut gp) = (1u64, 1u64);
    for _ in 0..m {
        a.push(input[gi as usize]);
        let (s, c) = (sign * 2.0 * PI * (gp as f64 / p as f64)).sin_cos();
        w.push(Complex64::new(c, s));
        gi = gi * g_inv % p;
        gp = gp * g % p;
    }
    fwd.process(&mut a);
    fwd.process(&mut w);
    let scale = 1.0 / m as f64;
    for (x, y) in a.iter_mut().zip(&w) {
        *x = *x * y * scale;
    }
    inv.process(&mut a);

    let mut out = vec![Complex64::new(0.0, 0.0); n];
    out[0] = input.iter().sum();
    for (r, conv) in a.iter().enumerate() {
        out[pow_mod(g, r as u64, p) as usize] = input[0] + conv;
    }
    Ok(out)
}

/// Cyclic convolution of two real length-`n` sequences,
/// `out[c] = sum_{i + j = c mod n} a[i] b[j]`.
pub fn cyclic_convolution(a: &[f64], b: &[f64]) -> Result<Vec<f64>> {
    assert_eq!(a.len(), b.len(), "convolution operands differ in length");
    let n = a.len();
    if n == 0 {
        return Ok(Vec::new());
    }
    let big = bluestein_len(n);
    if big > MAX_TRANSFORM_LEN {
        return Err(Error::TransformTooLarge {
            p: n as u64,
            len: big,
            max: MAX_TRANSFORM_LEN,
        });
    }
    let mut planner = FftPlanner::<f64>::new();
    let fwd = planner.plan_fft_forward(big);
    let inv = planner.plan_fft_inverse(big);
    // pack both real inputs into one complex transform
    let zero = Complex64::new(0.0, 0.0);
    let mut z = vec![zero; big];
    for (i, slot) in z.iter_mut().take(n).enumerate() {
        *slot = Complex64::new(a[i], b[i]);
    }
    fwd.process(&mut z);
    // A[k] = (Z[k] + conj Z[-k]) / 2, B[k] = (Z[k] - conj Z[-k]) / 2i,
    // so A[k] B[k] = (Z[k]^2 - conj(Z[-k])^2) / 4i
    let mut prod = vec![zero; big];
    let four_i = Complex64::new(0.0, 4.0);
    for k in 0..big {
        let zk = z[k];
        let zm = z[(big - k) % big].conj();
        prod[k] = (zk * zk - zm * zm) / four_i;
    }
    inv.process(&mut prod);
    let scale = 1.0 / big as f64;
    let mut out = vec![0.0; n];
    for (i, v) in prod.iter().enumerate().take(2 * n - 1) {
        out[i % n] += v.re * scale;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn direct_dft(x: &[Complex64], dir: Direction) -> Vec<Complex64> {
        let n = x.len();
        (0..n)
            .map(|k| {
                x.iter()
                    .enumerate()
                    .map(|(j, v)| {
                        let e = ((j * k) % n) as f64 / n as f64;
                        let (s, c) = (dir.sign() * 2.0 * PI * e).sin_cos();
                        v * Complex64::new(c, s)
                    })
                    .sum()
            })
            .collect()
    }

    fn sample(n: usize) -> Vec<Complex64> {
        (0..n)
            .map(|i| {
                let t = i as f64;
                Complex64::new((t * 0.37).sin() + 0.1 * t.cos(), (t * 1.3).cos())
            })
            .collect()
    }

    fn max_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
        a.iter()
            .zip(b)
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max)
    }

    #[test]
    fn bluestein_matches_direct() {
        for n in [2usize, 3, 5, 7, 17, 101, 257, 1009] {
            let x = sample(n);
            for dir in [Direction::Forward, Direction::Backward] {
                let got = bluestein(&x, dir).unwrap();
                let want = direct_dft(&x, dir);
                assert!(max_diff(&got, &want) < 1e-9 * n as f64, "n = {n}");
            }
        }
    }

    #[test]
    fn rader_matches_direct() {
        for n in [3usize, 5, 7, 17, 101, 1009] {
            let x = sample(n);
            for dir in [Direction::Forward, Direction::Backward] {
                let got = rader(&x, dir).unwrap();
                let want = direct_dft(&x, dir);
                assert!(max_diff(&got, &want) < 1e-9 * n as f64, "n = {n}");
            }
        }
        assert!(rader(&sample(9), Direction::Forward).is_err());
    }

    #[test]
    fn padded_length() {
        assert_eq!(bluestein_len(5), 16);
        assert_eq!(bluestein_len(10007), 32768);
        assert_eq!(bluestein_len(100003), 262144);
    }

    #[test]
    fn convolution_matches_direct() {
        let n = 37;
        let a: Vec<f64> = (0..n).map(|i| ((i * 7) % 5) as f64).collect();
        let b: Vec<f64> = (0..n).map(|i| ((i * 3) % 4) as f64 - 1.0).collect();
        let got = cyclic_convolution(&a, &b).unwrap();
        for c in 0..n {
            let want: f64 = (0..n).map(|i| a[i] * b[(c + n - i) % n]).sum();
            assert!((got[c] - want).abs() < 1e-9, "c = {c}");
        }
    }
}
