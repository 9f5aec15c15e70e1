//! The sign sequence of Kloosterman sums as a Boolean function on n bits,
//! its Walsh-Hadamard spectrum, nonlinearity, and correlation sums.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::PrimeContext;
use crate::error::{Error, Result};
use crate::io::{fmt_f64, Csv};
use crate::kloosterman::{kloosterman_compensated, KloostermanTable};
use crate::sample::Sampler;

/// Entries with |K| below this multiple of sqrt(p) are recomputed.
pub const SIGN_RECHECK: f64 = 1e-3;
/// Recomputed entries below this multiple of sqrt(p) are ambiguous.
pub const SIGN_AMBIGUOUS: f64 = 1e-6;
/// Butterfly stages run in parallel above this length.
const PAR_THRESHOLD: usize = 1 << 14;

/// f(a) for a in [0, 2^n): 1 iff K_p(a) < 0, and f(0) = 0.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SignVector {
    n: u32,
    bits: Vec<u8>,
}

impl SignVector {
    pub fn from_bits(n: u32, bits: Vec<u8>) -> Result<Self> {
        if n > 30 {
            return Err(Error::out_of_range("n", n, 0, 30));
        }
        if bits.len() != 1usize << n {
            return Err(Error::InvalidArgument(format!(
                "sign vector for n = {n} needs {} bits, got {}",
                1usize << n,
                bits.len()
            )));
        }
        if bits.iter().any(|&b| b > 1) {
            return Err(Error::InvalidArgument("bits must be 0 or 1".into()));
        }
        Ok(SignVector { n, bits })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn bits(&self) -> &[u8] {
        &self.bits
    }

    #[inline]
    pub fn bit(&self, a: usize) -> u8 {
        self.bits[a]
    }

    /// (-1)^f(a)
    #[inline]
    pub fn sign(&self, a: usize) -> i32 {
        1 - 2 * self.bits[a] as i32
    }

    pub fn complement(&self) -> Self {
        SignVector {
            n: self.n,
            bits: self.bits.iter().map(|b| 1 - b).collect(),
        }
    }
}

/// Builds f from a table.
///
/// Entries with |K| < 1e-3 sqrt(p) are recomputed by compensated direct
/// summation; if the recomputed |K| is still below 1e-6 sqrt(p) the sign is
/// reported as ambiguous instead of guessed.
pub fn sign_vector(ctx: &PrimeContext, table: &KloostermanTable) -> Result<SignVector> {
    if table.p() != ctx.p() {
        return Err(Error::PrimeMismatch {
            expected: ctx.p(),
            found: table.p(),
        });
    }
    let n = ctx.n();
    let len = 1usize << n;
    let root = (ctx.p() as f64).sqrt();
    let mut bits = vec![0u8; len];
    for (a, slot) in bits.iter_mut().enumerate().skip(1) {
        let mut k = table.value(a as u64);
        if k.abs() < SIGN_RECHECK * root {
            k = kloosterman_compensated(ctx, a as u64)?;
            if k.abs() < SIGN_AMBIGUOUS * root {
                return Err(Error::AmbiguousSign {
                    a: a as u64,
                    value: k.abs(),
                });
            }
        }
        *slot = u8::from(k < 0.0);
    }
    SignVector::from_bits(n, bits)
}

/// Unnormalized in-place Walsh-Hadamard butterfly; length must be a power
/// of two. Bit i of an index is the coefficient of 2^i.
pub fn fwht_in_place(data: &mut [i64]) {
    let len = data.len();
    assert!(len.is_power_of_two(), "length {len} is not a power of two");
    let mut h = 1;
    while h < len {
        let stage = |block: &mut [i64]| {
            let (lo, hi) = block.split_at_mut(h);
            for (x, y) in lo.iter_mut().zip(hi.iter_mut()) {
                let (s, d) = (*x + *y, *x - *y);
                *x = s;
                *y = d;
            }
        };
        if len >= PAR_THRESHOLD {
            data.par_chunks_mut(2 * h).for_each(stage);
        } else {
            data.chunks_mut(2 * h).for_each(stage);
        }
        h *= 2;
    }
}

/// Fourier coefficients f^(r) = 2^-n sum_a (-1)^(f(a) + <a, r>).
///
/// Stored as the exact integer sums; `coeff` scales on read.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WalshSpectrum {
    n: u32,
    raw: Vec<i64>,
}

impl WalshSpectrum {
    pub fn n(&self) -> u32 {
        self.n
    }

    /// 2^n f^(r), an integer.
    pub fn raw(&self) -> &[i64] {
        &self.raw
    }

    pub fn coeff(&self, r: usize) -> f64 {
        self.raw[r] as f64 / (1u64 << self.n) as f64
    }

    pub fn coeffs(&self) -> Vec<f64> {
        (0..self.raw.len()).map(|r| self.coeff(r)).collect()
    }

    pub fn max_abs_raw(&self) -> u64 {
        self.raw.iter().map(|v| v.unsigned_abs()).max().unwrap_or(0)
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.max_abs_raw() as f64 / (1u64 << self.n) as f64
    }

    /// sum_r f^(r)^2, which is 1.
    pub fn parseval(&self) -> f64 {
        let scale = (1u64 << self.n) as f64;
        self.raw
            .iter()
            .map(|&v| {
                let c = v as f64 / scale;
                c * c
            })
            .sum()
    }

    /// Rows (r, coeff).
    pub fn to_csv(&self) -> String {
        let mut csv = Csv::new(&["r", "coeff"]);
        for r in 0..self.raw.len() {
            csv.row(&[r.to_string(), fmt_f64(self.coeff(r))]);
        }
        csv.finish()
    }
}

pub fn wht(signs: &SignVector) -> WalshSpectrum {
    let mut raw: Vec<i64> = signs.bits.iter().map(|&b| 1 - 2 * b as i64).collect();
    fwht_in_place(&mut raw);
    WalshSpectrum { n: signs.n, raw }
}

/// N(f) = 2^(n-1) - 2^(n-1) max_r |f^(r)|, computed in integers.
pub fn nonlinearity(spectrum: &WalshSpectrum) -> u64 {
    ((1u64 << spectrum.n) - spectrum.max_abs_raw()) / 2
}

/// sum_{b=0}^{M-1} (-1)^(f(b + c1) + f(b + c2)).
///
/// Requires c1 < c2 (or c1 = c2) and every index b + c2 inside [0, 2^n).
pub fn correlation_sum(signs: &SignVector, m: u64, c1: u64, c2: u64) -> Result<i64> {
    if c1 > c2 {
        return Err(Error::InvalidArgument(format!(
            "correlation offsets need c1 <= c2, got c1 = {c1}, c2 = {c2}"
        )));
    }
    let len = signs.bits.len() as u64;
    if m > 0 && m - 1 + c2 >= len {
        return Err(Error::out_of_range("M - 1 + c2", m - 1 + c2, 0, len - 1));
    }
    let (c1, c2) = (c1 as usize, c2 as usize);
    Ok((0..m as usize)
        .map(|b| (signs.sign(b + c1) * signs.sign(b + c2)) as i64)
        .sum())
}

/// Bound shape M^(2/3) p^(1/6) (ln p)^(1/3) for the correlation sums.
pub fn correlation_shape(p: u64, m: u64) -> f64 {
    let p = p as f64;
    (m as f64).powf(2.0 / 3.0) * p.powf(1.0 / 6.0) * p.ln().cbrt()
}

/// Envelope 2^(-n/16) n^(1/8) of the nonlinearity defect.
pub fn defect_envelope(n: u32) -> f64 {
    let n = n as f64;
    (-n / 16.0).exp2() * n.powf(0.125)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NonlinearitySummary {
    pub p: u64,
    pub n: u32,
    pub nonlinearity: u64,
    pub max_abs_coeff: f64,
    pub defect: f64,
    pub scaled_ratio: f64,
}

pub fn summarize(p: u64, spectrum: &WalshSpectrum) -> NonlinearitySummary {
    let n = spectrum.n();
    let nl = nonlinearity(spectrum);
    let half = (1u64 << n) as f64 / 2.0;
    let defect = 1.0 - nl as f64 / half;
    NonlinearitySummary {
        p,
        n,
        nonlinearity: nl,
        max_abs_coeff: spectrum.max_abs_coeff(),
        defect,
        scaled_ratio: defect / defect_envelope(n),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationScan {
    pub samples: usize,
    pub seed: u64,
    /// max |sum| / (M^(2/3) p^(1/6) (ln p)^(1/3))
    pub max_ratio: f64,
    pub worst_m: u64,
    pub worst_c1: u64,
    pub worst_c2: u64,
    pub worst_sum: i64,
}

/// Correlation sums at `samples` random (M, c1, c2) with c1 < c2 and
/// M - 1 + c2 < 2^n.
pub fn correlation_scan(
    p: u64,
    signs: &SignVector,
    samples: usize,
    seed: u64,
) -> Result<CorrelationScan> {
    let len = signs.bits.len() as u64;
    if len < 2 {
        return Err(Error::InvalidArgument(
            "need n >= 1 for correlations".into(),
        ));
    }
    let mut rng = Sampler::new(seed);
    let mut scan = CorrelationScan {
        samples,
        seed,
        max_ratio: 0.0,
        worst_m: 0,
        worst_c1: 0,
        worst_c2: 0,
        worst_sum: 0,
    };
    for _ in 0..samples {
        let m = rng.range(1, len - 1);
        let c2 = rng.range(1, len - m);
        let c1 = rng.range(0, c2 - 1);
        let sum = correlation_sum(signs, m, c1, c2)?;
        let ratio = sum.unsigned_abs() as f64 / correlation_shape(p, m);
        if ratio > scan.max_ratio {
            scan.max_ratio = ratio;
            scan.worst_m = m;
            scan.worst_c1 = c1;
            scan.worst_c2 = c2;
            scan.worst_sum = sum;
        }
    }
    Ok(scan)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NonlinearityReport {
    #[serde(flatten)]
    pub summary: NonlinearitySummary,
    pub correlation: CorrelationScan,
}

pub fn nonlinearity_report(
    p: u64,
    signs: &SignVector,
    spectrum: &WalshSpectrum,
    samples: usize,
    seed: u64,
) -> Result<NonlinearityReport> {
    Ok(NonlinearityReport {
        summary: summarize(p, spectrum),
        correlation: correlation_scan(p, signs, samples, seed)?,
    })
}
