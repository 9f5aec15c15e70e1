//! Kloosterman sums K_p(a) = sum_{x in F_p*} e_p(x + a x^-1), single and
//! batched over all a in F_p*, with their Sato-Tate angles.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::{eval_ep, PrimeContext, RootTable};
use crate::error::{Error, Result};
use crate::fft::{prime_dft, DftAlgorithm, Direction};

/// Largest p the O(p^2) table path accepts without `force`.
pub const NAIVE_ORACLE_CAP: u64 = 1 << 17;
/// Constant in the per-entry error model `c * eps * p * ln p`.
pub const ERR_MODEL_CONSTANT: f64 = 8.0;
/// Relative overshoot of |K| / (2 sqrt p) above 1 that counts as a Weil
/// violation rather than rounding.
pub const WEIL_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Naive,
    BatchDft,
}

impl Method {
    pub fn as_byte(self) -> u8 {
        match self {
            Method::Naive => 0,
            Method::BatchDft => 1,
        }
    }

    pub fn from_byte(b: u8) -> Option<Self> {
        match b {
            0 => Some(Method::Naive),
            1 => Some(Method::BatchDft),
            _ => None,
        }
    }
}

/// Estimated absolute error per table entry.
pub fn error_model(p: u64) -> f64 {
    let p = p as f64;
    ERR_MODEL_CONSTANT * f64::EPSILON * p * p.ln()
}

/// K_p(a) for a = 1..p-1.
#[derive(Debug, Clone, PartialEq)]
pub struct KloostermanTable {
    p: u64,
    values: Vec<f64>,
    method: Method,
    err_bound: f64,
}

impl KloostermanTable {
    pub fn from_parts(p: u64, values: Vec<f64>, method: Method, err_bound: f64) -> Result<Self> {
        if p < 3 {
            return Err(Error::PrimeTooSmall { p });
        }
        if values.len() as u64 != p - 1 {
            return Err(Error::InvalidArgument(format!(
                "table for p = {p} needs {} values, got {}",
                p - 1,
                values.len()
            )));
        }
        Ok(KloostermanTable {
            p,
            values,
            method,
            err_bound,
        })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn method(&self) -> Method {
        self.method
    }

    pub fn err_bound(&self) -> f64 {
        self.err_bound
    }

    /// Entries for a = 1..p-1 (slot `a - 1`).
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// K_p(a); `a` must be in `1..p`.
    #[inline]
    pub fn value(&self, a: u64) -> f64 {
        self.values[(a - 1) as usize]
    }

    pub fn iter(&self) -> impl Iterator<Item = (u64, f64)> + '_ {
        self.values
            .iter()
            .enumerate()
            .map(|(i, &v)| (i as u64 + 1, v))
    }

    /// sum_a K_p(a); equals 1 exactly.
    pub fn first_moment(&self) -> f64 {
        pairwise_sum(&self.values)
    }

    /// sum_a K_p(a)^2; equals p^2 - p - 1 exactly.
    pub fn second_moment(&self) -> f64 {
        let sq: Vec<f64> = self.values.iter().map(|v| v * v).collect();
        pairwise_sum(&sq)
    }
}

/// Angles psi_p(a) in [0, pi] with K_p(a) = 2 sqrt(p) cos psi_p(a).
#[derive(Debug, Clone, PartialEq)]
pub struct AngleTable {
    p: u64,
    psi: Vec<f64>,
}

impl AngleTable {
    pub fn p(&self) -> u64 {
        self.p
    }

    /// Angles for a = 1..p-1 (slot `a - 1`).
    pub fn psi(&self) -> &[f64] {
        &self.psi
    }

    #[inline]
    pub fn angle(&self, a: u64) -> f64 {
        self.psi[(a - 1) as usize]
    }

    pub fn iter(&self) -> impl Iterator<Item = (u64, f64)> + '_ {
        self.psi.iter().enumerate().map(|(i, &v)| (i as u64 + 1, v))
    }

    /// Wraps precomputed angles, checking range and length.
    pub fn from_angles(p: u64, psi: Vec<f64>) -> Result<Self> {
        if psi.len() as u64 + 1 != p {
            return Err(Error::InvalidArgument(format!(
                "angle table for p = {p} needs {} entries, got {}",
                p - 1,
                psi.len()
            )));
        }
        if let Some(bad) = psi
            .iter()
            .find(|t| !(0.0..=std::f64::consts::PI).contains(*t))
        {
            return Err(Error::out_of_range("angle", bad, 0, "pi"));
        }
        Ok(AngleTable { p, psi })
    }
}

/// Tree summation; error grows like O(eps log n) instead of O(eps n).
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    const BLOCK: usize = 16;
    if xs.len() <= BLOCK {
        return xs.iter().sum();
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}

/// K_p(a) by direct summation.
///
/// The imaginary part is accumulated alongside and must vanish within
/// p * eps, otherwise [`Error::ImaginaryResidue`] is returned.
pub fn kloosterman_naive(ctx: &PrimeContext, a: u64) -> Result<f64> {
    let a = ctx.check_unit("a", a)?;
    let p = ctx.p();
    let (re, im): (Vec<f64>, Vec<f64>) = (1..p)
        .map(|x| eval_ep((x + a * ctx.inv(x) % p) % p, p))
        .map(|w| (w.re, w.im))
        .unzip();
    finish_naive(p, a, pairwise_sum(&re), pairwise_sum(&im))
}

fn finish_naive(p: u64, a: u64, re: f64, im: f64) -> Result<f64> {
    let tolerance = p as f64 * f64::EPSILON;
    if im.abs() > tolerance {
        return Err(Error::ImaginaryResidue {
            a,
            residue: im.abs(),
            tolerance,
        });
    }
    Ok(re)
}

/// K_p(a) by direct summation with Neumaier-compensated accumulation and
/// freshly evaluated roots. Used to re-check entries near zero.
pub fn kloosterman_compensated(ctx: &PrimeContext, a: u64) -> Result<f64> {
    let a = ctx.check_unit("a", a)?;
    let p = ctx.p();
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for x in 1..p {
        let term = eval_ep((x + a * ctx.inv(x) % p) % p, p).re;
        let t = sum + term;
        if sum.abs() >= term.abs() {
            comp += (sum - t) + term;
        } else {
            comp += (term - t) + sum;
        }
        sum = t;
    }
    Ok(sum + comp)
}

/// All K_p(a) by direct summation, O(p^2).
///
/// Refuses p above [`NAIVE_ORACLE_CAP`] unless `force` is set.
pub fn kloosterman_table_naive(ctx: &PrimeContext, force: bool) -> Result<KloostermanTable> {
    let p = ctx.p();
    if p > NAIVE_ORACLE_CAP && !force {
        return Err(Error::OracleCapExceeded {
            p,
            cap: NAIVE_ORACLE_CAP,
        });
    }
    let roots = RootTable::new(p);
    let values = (1..p)
        .into_par_iter()
        .map_init(
            || (vec![0.0; (p - 1) as usize], vec![0.0; (p - 1) as usize]),
            |(re, im), a| {
                for x in 1..p {
                    let z = (x + a * ctx.inv(x) % p) % p;
                    re[(x - 1) as usize] = roots.cos(z);
                    im[(x - 1) as usize] = roots.sin(z);
                }
                finish_naive(p, a, pairwise_sum(re), pairwise_sum(im))
            },
        )
        .collect::<Result<Vec<f64>>>()?;
    KloostermanTable::from_parts(p, values, Method::Naive, error_model(p))
}

/// All K_p(a) in O(p log p).
///
/// With u = x^-1 the sum becomes K_p(a) = sum_u h(u) e_p(a u) where
/// h(u) = e_p(u^-1) and h(0) = 0, i.e. one unnormalized length-p DFT.
pub fn kloosterman_table_batch(ctx: &PrimeContext) -> Result<KloostermanTable> {
    kloosterman_table_batch_with(ctx, DftAlgorithm::Bluestein)
}

pub fn kloosterman_table_batch_with(
    ctx: &PrimeContext,
    algo: DftAlgorithm,
) -> Result<KloostermanTable> {
    let p = ctx.p();
    let mut h = vec![Complex64::new(0.0, 0.0); p as usize];
    h.par_iter_mut()
        .enumerate()
        .skip(1)
        .for_each(|(u, slot)| *slot = eval_ep(ctx.inv(u as u64), p));
    let spectrum = prime_dft(&h, Direction::Backward, algo)?;
    let err_bound = error_model(p);
    let mut values = Vec::with_capacity((p - 1) as usize);
    for (a, z) in spectrum.iter().enumerate().skip(1) {
        if z.im.abs() >= err_bound {
            return Err(Error::ImaginaryResidue {
                a: a as u64,
                residue: z.im.abs(),
                tolerance: err_bound,
            });
        }
        values.push(z.re);
    }
    KloostermanTable::from_parts(p, values, Method::BatchDft, err_bound)
}

/// Largest imaginary residue of the batch transform over a in F_p*.
pub fn batch_imaginary_residue(ctx: &PrimeContext, algo: DftAlgorithm) -> Result<f64> {
    let p = ctx.p();
    let h: Vec<Complex64> = (0..p)
        .map(|u| {
            if u == 0 {
                Complex64::new(0.0, 0.0)
            } else {
                eval_ep(ctx.inv(u), p)
            }
        })
        .collect();
    let spectrum = prime_dft(&h, Direction::Backward, algo)?;
    Ok(spectrum[1..].iter().map(|z| z.im.abs()).fold(0.0, f64::max))
}

/// Sato-Tate angles of a table.
///
/// Ratios within [`WEIL_TOLERANCE`] of +-1 are clamped; anything further
/// out is a Weil-bound violation.
pub fn angles(table: &KloostermanTable) -> Result<AngleTable> {
    let scale = 2.0 * (table.p() as f64).sqrt();
    let psi = table
        .iter()
        .map(|(a, v)| {
            let r = v / scale;
            if r.abs() > 1.0 + WEIL_TOLERANCE {
                return Err(Error::WeilViolation { a, ratio: r.abs() });
            }
            Ok(r.clamp(-1.0, 1.0).acos())
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(AngleTable { p: table.p(), psi })
}

/// max_a |K_p(a)| / (2 sqrt p).
pub fn weil_ratio(table: &KloostermanTable) -> f64 {
    let max = table.values().iter().map(|v| v.abs()).fold(0.0, f64::max);
    max / (2.0 * (table.p() as f64).sqrt())
}

/// Largest |a - b| between two tables for the same prime.
pub fn max_abs_diff(a: &KloostermanTable, b: &KloostermanTable) -> f64 {
    assert_eq!(a.p(), b.p(), "tables for different primes");
    a.values()
        .iter()
        .zip(b.values())
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}
