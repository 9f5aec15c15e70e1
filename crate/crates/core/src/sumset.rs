//! Subsets of F_p*, sum-set and product-set hits in a window set, and the
//! sum-set distribution report.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::PrimeContext;
use crate::error::{Error, Result};
use crate::fft::{cyclic_convolution, prime_dft, DftAlgorithm, Direction};
use crate::kloosterman::AngleTable;
use crate::sample::Sampler;
use crate::sato_tate::{membership, sato_tate_measure, Window};

/// Above `CONVOLUTION_CROSSOVER * p` pairs, [`sumset_count`] convolves.
pub const CONVOLUTION_CROSSOVER: u64 = 64;
pub const DEFAULT_EPSILON: f64 = 0.05;

/// Declarative description of a subset of F_p*.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SetSpec {
    Interval { lo: u64, hi: u64 },
    Explicit { elements: Vec<u64> },
    Random { size: u64, seed: u64 },
    Beatty { theta: f64, rho: f64, m: u64 },
    Geometric { start: u64, ratio: u64, length: u64 },
}

impl fmt::Display for SetSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SetSpec::Interval { lo, hi } => write!(f, "interval:{lo}:{hi}"),
            SetSpec::Explicit { elements } => {
                let parts: Vec<String> = elements.iter().map(u64::to_string).collect();
                write!(f, "explicit:{}", parts.join(","))
            }
            SetSpec::Random { size, seed } => write!(f, "random:{size}:{seed}"),
            SetSpec::Beatty { theta, rho, m } => write!(f, "beatty:{theta}:{rho}:{m}"),
            SetSpec::Geometric {
                start,
                ratio,
                length,
            } => write!(f, "geometric:{start}:{ratio}:{length}"),
        }
    }
}

impl FromStr for SetSpec {
    type Err = Error;

    /// `interval:LO:HI`, `explicit:A,B,...`, `random:SIZE:SEED`,
    /// `beatty:THETA:RHO:M`, `geometric:START:RATIO:LENGTH`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidArgument(format!("cannot parse set spec {s:?}"));
        let (kind, rest) = s.split_once(':').ok_or_else(bad)?;
        let fields: Vec<&str> = rest.split(':').collect();
        let int = |x: &str| x.trim().parse::<u64>().map_err(|_| bad());
        let real = |x: &str| x.trim().parse::<f64>().map_err(|_| bad());
        Ok(match (kind, fields.as_slice()) {
            ("interval", [lo, hi]) => SetSpec::Interval {
                lo: int(lo)?,
                hi: int(hi)?,
            },
            ("explicit", [list]) => SetSpec::Explicit {
                elements: list.split(',').map(int).collect::<Result<_>>()?,
            },
            ("random", [size, seed]) => SetSpec::Random {
                size: int(size)?,
                seed: int(seed)?,
            },
            ("beatty", [theta, rho, m]) => SetSpec::Beatty {
                theta: real(theta)?,
                rho: real(rho)?,
                m: int(m)?,
            },
            ("geometric", [start, ratio, length]) => SetSpec::Geometric {
                start: int(start)?,
                ratio: int(ratio)?,
                length: int(length)?,
            },
            _ => return Err(bad()),
        })
    }
}

/// Nonempty sorted subset of F_p*.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResidueSet {
    p: u64,
    elems: Vec<u64>,
}

impl ResidueSet {
    /// Deduplicates; rejects 0, values >= p, and empty input.
    pub fn new(p: u64, mut elems: Vec<u64>) -> Result<Self> {
        if elems.contains(&0) {
            return Err(Error::SetContainsZero);
        }
        if let Some(&x) = elems.iter().find(|&&x| x >= p) {
            return Err(Error::out_of_range("set element", x, 1, p - 1));
        }
        elems.sort_unstable();
        elems.dedup();
        if elems.is_empty() {
            return Err(Error::EmptySet("no elements".into()));
        }
        Ok(ResidueSet { p, elems })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn len(&self) -> usize {
        self.elems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elems.is_empty()
    }

    pub fn as_slice(&self) -> &[u64] {
        &self.elems
    }

    fn indicator(&self) -> Vec<f64> {
        let mut v = vec![0.0; self.p as usize];
        for &x in &self.elems {
            v[x as usize] = 1.0;
        }
        v
    }
}

/// Builds the set a spec describes.
pub fn materialize(spec: &SetSpec, ctx: &PrimeContext) -> Result<ResidueSet> {
    let p = ctx.p();
    let elems = match *spec {
        SetSpec::Interval { lo, hi } => {
            if lo == 0 || hi >= p || lo > hi {
                return Err(Error::InvalidArgument(format!(
                    "interval [{lo}, {hi}] is not inside [1, {}]",
                    p - 1
                )));
            }
            (lo..=hi).collect()
        }
        SetSpec::Explicit { ref elements } => elements.clone(),
        SetSpec::Random { size, seed } => {
            if size == 0 || size >= p {
                return Err(Error::out_of_range("random set size", size, 1, p - 1));
            }
            Sampler::new(seed).distinct_units(p, size as usize)
        }
        SetSpec::Beatty { theta, rho, m } => beatty_residues(theta, rho, m, p)?
            .into_iter()
            .filter(|&r| r != 0)
            .collect(),
        SetSpec::Geometric {
            start,
            ratio,
            length,
        } => {
            ctx.check_unit("geometric start", start)?;
            ctx.check_unit("geometric ratio", ratio)?;
            if length == 0 {
                return Err(Error::EmptySet("geometric length 0".into()));
            }
            let mut x = start;
            (0..length)
                .map(|_| {
                    let cur = x;
                    x = x * ratio % p;
                    cur
                })
                .collect()
        }
    };
    if elems.is_empty() {
        return Err(Error::EmptySet(spec.to_string()));
    }
    ResidueSet::new(p, elems)
}

/// floor(theta m + rho) mod p for m = 1..=M, in order, zeros kept.
pub fn beatty_residues(theta: f64, rho: f64, m: u64, p: u64) -> Result<Vec<u64>> {
    if !(theta > 0.0 && theta.is_finite() && rho.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "beatty needs finite theta > 0 and finite rho, got theta = {theta}, rho = {rho}"
        )));
    }
    if m == 0 {
        return Err(Error::EmptySet("beatty with M = 0".into()));
    }
    (1..=m)
        .map(|k| {
            let v = (theta * k as f64 + rho).floor();
            if v.abs() >= 2f64.powi(62) {
                return Err(Error::InvalidArgument(format!(
                    "beatty term {v} at m = {k} overflows"
                )));
            }
            Ok((v as i64).rem_euclid(p as i64) as u64)
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CountMethod {
    /// Loop below the crossover, convolution above.
    #[default]
    Auto,
    Loop,
    Convolution,
}

fn check_same_field(angles: &AngleTable, sets: [&ResidueSet; 2]) -> Result<()> {
    for s in sets {
        if s.p() != angles.p() {
            return Err(Error::PrimeMismatch {
                expected: angles.p(),
                found: s.p(),
            });
        }
    }
    Ok(())
}

/// #W_p(U, V; alpha, beta): ordered pairs with u + v in A_p(alpha, beta).
pub fn sumset_count(
    u: &ResidueSet,
    v: &ResidueSet,
    angles: &AngleTable,
    w: &Window,
) -> Result<u64> {
    sumset_count_with(u, v, angles, w, CountMethod::Auto)
}

pub fn sumset_count_with(
    u: &ResidueSet,
    v: &ResidueSet,
    angles: &AngleTable,
    w: &Window,
    method: CountMethod,
) -> Result<u64> {
    check_same_field(angles, [u, v])?;
    let p = angles.p();
    let bits = membership(angles, w);
    let pairs = u.len() as u64 * v.len() as u64;
    let method = match method {
        CountMethod::Auto if pairs > CONVOLUTION_CROSSOVER * p => CountMethod::Convolution,
        CountMethod::Auto => CountMethod::Loop,
        m => m,
    };
    if method == CountMethod::Loop {
        return Ok(pair_loop(u, v, |a, b| {
            let c = a + b;
            bits[(if c >= p { c - p } else { c }) as usize]
        }));
    }
    let reps = cyclic_convolution(&u.indicator(), &v.indicator())?;
    let mut total = 0u64;
    for (c, &r) in reps.iter().enumerate() {
        let k = r.round();
        if (r - k).abs() > 0.25 {
            return Err(Error::InexactConvolution {
                c: c as u64,
                value: r,
            });
        }
        if bits[c] {
            total += k as u64;
        }
    }
    Ok(total)
}

/// #Z_p(U, V; alpha, beta): ordered pairs with u v in A_p(alpha, beta).
pub fn prodset_count(
    u: &ResidueSet,
    v: &ResidueSet,
    angles: &AngleTable,
    w: &Window,
) -> Result<u64> {
    check_same_field(angles, [u, v])?;
    let p = angles.p();
    let bits = membership(angles, w);
    Ok(pair_loop(u, v, |a, b| bits[(a * b % p) as usize]))
}

fn pair_loop(u: &ResidueSet, v: &ResidueSet, hit: impl Fn(u64, u64) -> bool + Sync) -> u64 {
    u.as_slice()
        .par_chunks(64)
        .map(|chunk| {
            chunk
                .iter()
                .map(|&a| v.as_slice().iter().filter(|&&b| hit(a, b)).count() as u64)
                .sum::<u64>()
        })
        .sum()
}

/// Observed sum-set count against its Sato-Tate main term and the
/// unconditional error bound sqrt(#U #V) p^(3/4) (ln p)^(1/2).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SumsetReport {
    pub p: u64,
    pub alpha: f64,
    pub beta: f64,
    pub size_u: u64,
    pub size_v: u64,
    pub observed: u64,
    pub main_term: f64,
    pub abs_error: f64,
    pub bound: f64,
    pub ratio: f64,
    pub threshold_met: bool,
}

impl SumsetReport {
    /// The bound is unconditional; false means a bug upstream.
    pub fn bound_holds(&self) -> bool {
        self.abs_error <= self.bound
    }

    /// |observed - main term| / main term.
    pub fn relative_error(&self) -> f64 {
        self.abs_error / self.main_term
    }
}

pub fn sumset_bound(p: u64, size_u: u64, size_v: u64) -> f64 {
    let pf = p as f64;
    ((size_u * size_v) as f64).sqrt() * pf.powf(0.75) * pf.ln().sqrt()
}

/// #U #V >= p^(3/2 + epsilon).
pub fn threshold_met(p: u64, size_u: u64, size_v: u64, epsilon: f64) -> bool {
    (size_u as f64) * (size_v as f64) >= (p as f64).powf(1.5 + epsilon)
}

pub fn sumset_report(
    u: &ResidueSet,
    v: &ResidueSet,
    angles: &AngleTable,
    w: &Window,
    epsilon: f64,
) -> Result<SumsetReport> {
    let p = angles.p();
    let observed = sumset_count(u, v, angles, w)?;
    let (su, sv) = (u.len() as u64, v.len() as u64);
    let main_term = sato_tate_measure(w) * (su * sv) as f64;
    let abs_error = (observed as f64 - main_term).abs();
    let bound = sumset_bound(p, su, sv);
    Ok(SumsetReport {
        p,
        alpha: w.alpha(),
        beta: w.beta(),
        size_u: su,
        size_v: sv,
        observed,
        main_term,
        abs_error,
        bound,
        ratio: abs_error / bound,
        threshold_met: threshold_met(p, su, sv, epsilon),
    })
}

/// The sum-set count rebuilt from additive characters:
/// #W = (1/p) sum_lambda S_p(-lambda) U^(lambda) V^(lambda), with the
/// lambda = 0 term split off.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FourierDecomposition {
    /// #A #U #V / p
    pub zero_term: f64,
    /// Real part of the lambda != 0 contribution.
    pub remainder: f64,
    /// (1/p) sum_{lambda != 0} |S_p(-lambda)| |U^(lambda)| |V^(lambda)|
    pub remainder_bound: f64,
    /// max_{lambda != 0} |S_p(lambda)|
    pub max_exp_sum: f64,
    /// sum_{lambda != 0} |U^(lambda)|^2, at most p #U
    pub energy_u: f64,
    pub energy_v: f64,
}

impl FourierDecomposition {
    pub fn reconstructed_count(&self) -> f64 {
        self.zero_term + self.remainder
    }
}

pub fn fourier_decomposition(
    u: &ResidueSet,
    v: &ResidueSet,
    angles: &AngleTable,
    w: &Window,
) -> Result<FourierDecomposition> {
    check_same_field(angles, [u, v])?;
    let p = angles.p();
    let to_complex = |xs: Vec<f64>| -> Vec<Complex64> {
        xs.into_iter().map(|x| Complex64::new(x, 0.0)).collect()
    };
    let a_ind: Vec<f64> = membership(angles, w)
        .into_iter()
        .map(|b| if b { 1.0 } else { 0.0 })
        .collect();
    let algo = DftAlgorithm::Bluestein;
    // S_p(-lambda) = sum_a e_p(-lambda a)
    let s = prime_dft(&to_complex(a_ind.clone()), Direction::Forward, algo)?;
    let uh = prime_dft(&to_complex(u.indicator()), Direction::Backward, algo)?;
    let vh = prime_dft(&to_complex(v.indicator()), Direction::Backward, algo)?;
    let size_a: f64 = a_ind.iter().sum();
    let pf = p as f64;
    let mut remainder = Complex64::new(0.0, 0.0);
    let mut remainder_bound = 0.0;
    let mut max_exp_sum: f64 = 0.0;
    let (mut energy_u, mut energy_v) = (0.0, 0.0);
    for l in 1..p as usize {
        remainder += s[l] * uh[l] * vh[l];
        remainder_bound += s[l].norm() * uh[l].norm() * vh[l].norm();
        max_exp_sum = max_exp_sum.max(s[l].norm());
        energy_u += uh[l].norm_sqr();
        energy_v += vh[l].norm_sqr();
    }
    Ok(FourierDecomposition {
        zero_term: size_a * u.len() as f64 * v.len() as f64 / pf,
        remainder: remainder.re / pf,
        remainder_bound: remainder_bound / pf,
        max_exp_sum,
        energy_u,
        energy_v,
    })
}

/// #B_p(theta, rho, M; alpha, beta) = #{m in [1, M] : floor(theta m + rho) in A_p}.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BeattyReport {
    pub p: u64,
    pub theta: f64,
    pub rho: f64,
    pub m: u64,
    pub alpha: f64,
    pub beta: f64,
    pub count: u64,
    /// mu_ST(alpha, beta) M
    pub expected: f64,
    pub deviation: f64,
}

pub fn beatty_count(
    theta: f64,
    rho: f64,
    m: u64,
    angles: &AngleTable,
    w: &Window,
) -> Result<BeattyReport> {
    let p = angles.p();
    let bits = membership(angles, w);
    let count = beatty_residues(theta, rho, m, p)?
        .into_iter()
        .filter(|&r| bits[r as usize])
        .count() as u64;
    let expected = sato_tate_measure(w) * m as f64;
    Ok(BeattyReport {
        p,
        theta,
        rho,
        m,
        alpha: w.alpha(),
        beta: w.beta(),
        count,
        expected,
        deviation: count as f64 - expected,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kloosterman::{angles, kloosterman_table_batch, kloosterman_table_naive};
    use std::f64::consts::PI;

    fn setup(p: u64) -> (PrimeContext, AngleTable) {
        let ctx = PrimeContext::new(p).unwrap();
        let t = if p < 100 {
            kloosterman_table_naive(&ctx, false).unwrap()
        } else {
            kloosterman_table_batch(&ctx).unwrap()
        };
        let a = angles(&t).unwrap();
        (ctx, a)
    }

    fn set(p: u64, xs: &[u64]) -> ResidueSet {
        ResidueSet::new(p, xs.to_vec()).unwrap()
    }

    fn half() -> Window {
        Window::new(0.0, PI / 2.0).unwrap()
    }

    #[test]
    fn materialize_examples() {
        let ctx = PrimeContext::new(5).unwrap();
        let s = materialize(&SetSpec::Interval { lo: 1, hi: 4 }, &ctx).unwrap();
        assert_eq!(s.as_slice(), &[1, 2, 3, 4]);
        let ctx = PrimeContext::new(11).unwrap();
        let b = SetSpec::Beatty {
            theta: 2f64.sqrt(),
            rho: 0.0,
            m: 5,
        };
        assert_eq!(materialize(&b, &ctx).unwrap().as_slice(), &[1, 2, 4, 5, 7]);
        let ctx = PrimeContext::new(101).unwrap();
        let r = SetSpec::Random { size: 3, seed: 42 };
        let x = materialize(&r, &ctx).unwrap();
        assert_eq!(x, materialize(&r, &ctx).unwrap());
        assert_eq!(x.len(), 3);
        let g = SetSpec::Geometric {
            start: 1,
            ratio: 2,
            length: 4,
        };
        let ctx = PrimeContext::new(7).unwrap();
        assert_eq!(materialize(&g, &ctx).unwrap().as_slice(), &[1, 2, 4]);
    }

    #[test]
    fn materialize_errors() {
        let ctx = PrimeContext::new(5).unwrap();
        assert!(materialize(&SetSpec::Interval { lo: 0, hi: 3 }, &ctx).is_err());
        assert!(materialize(&SetSpec::Interval { lo: 1, hi: 5 }, &ctx).is_err());
        assert!(matches!(
            materialize(&SetSpec::Explicit { elements: vec![] }, &ctx),
            Err(Error::EmptySet(_))
        ));
        assert!(matches!(
            materialize(
                &SetSpec::Explicit {
                    elements: vec![0, 1]
                },
                &ctx
            ),
            Err(Error::SetContainsZero)
        ));
        // floor(5m) = 0 mod 5 for every m
        let b = SetSpec::Beatty {
            theta: 5.0,
            rho: 0.0,
            m: 3,
        };
        assert!(matches!(materialize(&b, &ctx), Err(Error::EmptySet(_))));
        let b = SetSpec::Beatty {
            theta: -1.0,
            rho: 0.0,
            m: 3,
        };
        assert!(materialize(&b, &ctx).is_err());
    }

    #[test]
    fn spec_strings_round_trip() {
        for s in [
            "interval:1:4",
            "explicit:3,1,2",
            "random:4000:42",
            "beatty:1.5:0.25:10",
            "geometric:2:3:10",
        ] {
            let spec: SetSpec = s.parse().unwrap();
            assert_eq!(spec.to_string(), s);
        }
        assert!("bogus:1".parse::<SetSpec>().is_err());
        assert!("interval:1".parse::<SetSpec>().is_err());
    }

    #[test]
    fn sumset_examples() {
        let (_, a) = setup(5);
        assert_eq!(
            sumset_count(&set(5, &[1]), &set(5, &[2]), &a, &half()).unwrap(),
            1
        );
        for w in [half(), Window::full()] {
            assert_eq!(
                sumset_count(&set(5, &[1]), &set(5, &[4]), &a, &w).unwrap(),
                0
            );
        }
        let all = set(5, &[1, 2, 3, 4]);
        for m in [CountMethod::Loop, CountMethod::Convolution] {
            assert_eq!(
                sumset_count_with(&all, &all, &a, &Window::full(), m).unwrap(),
                12
            );
        }
    }

    #[test]
    fn prodset_examples() {
        let (_, a) = setup(5);
        assert_eq!(
            prodset_count(&set(5, &[2]), &set(5, &[4]), &a, &half()).unwrap(),
            1
        );
        let all = set(5, &[1, 2, 3, 4]);
        assert_eq!(prodset_count(&all, &all, &a, &Window::full()).unwrap(), 16);
        assert_eq!(
            prodset_count(&set(5, &[1]), &set(5, &[2]), &a, &half()).unwrap(),
            0
        );
    }

    #[test]
    fn loop_and_convolution_agree() {
        let mut rng = Sampler::new(7);
        for p in [101u64, 211, 503, 1009] {
            let (_, a) = setup(p);
            for _ in 0..12 {
                let su = rng.range(1, p - 1) as usize;
                let sv = rng.range(1, p - 1) as usize;
                let u = ResidueSet::new(p, rng.distinct_units(p, su)).unwrap();
                let v = ResidueSet::new(p, rng.distinct_units(p, sv)).unwrap();
                let x = rng.real(0.0, PI - 0.01);
                let w = Window::new(x, rng.real(x + 0.001, PI)).unwrap();
                let lp = sumset_count_with(&u, &v, &a, &w, CountMethod::Loop).unwrap();
                let cv = sumset_count_with(&u, &v, &a, &w, CountMethod::Convolution).unwrap();
                assert_eq!(lp, cv, "p = {p}");
                assert_eq!(lp, sumset_count(&v, &u, &a, &w).unwrap());
                assert_eq!(
                    prodset_count(&u, &v, &a, &w).unwrap(),
                    prodset_count(&v, &u, &a, &w).unwrap()
                );
            }
        }
    }

    #[test]
    fn singleton_translation() {
        let (_, a) = setup(101);
        let u = ResidueSet::new(101, (1..60).collect()).unwrap();
        let w = Window::new(0.7, 2.2).unwrap();
        for v in [1u64, 41, 100] {
            let direct = u
                .as_slice()
                .iter()
                .filter(|&&x| {
                    let c = (x + v) % 101;
                    c != 0 && w.contains(a.angle(c))
                })
                .count() as u64;
            assert_eq!(sumset_count(&u, &set(101, &[v]), &a, &w).unwrap(), direct);
        }
    }

    #[test]
    fn report_p5() {
        let (_, a) = setup(5);
        let all = set(5, &[1, 2, 3, 4]);
        let r = sumset_report(&all, &all, &a, &half(), 0.05).unwrap();
        assert_eq!(r.observed, 9);
        assert!((r.main_term - 8.0).abs() < 1e-12);
        // 4 * 5^(3/4) * (ln 5)^(1/2)
        assert!((r.bound - 16.967764).abs() < 1e-6);
        // 16 >= 5^1.55 = 12.117
        assert!(r.threshold_met);
        assert!(r.bound_holds());
        let text = serde_json::to_string(&r).unwrap();
        let keys: Vec<&str> = text
            .trim_matches(|c| c == '{' || c == '}')
            .split(',')
            .map(|kv| kv.split(':').next().unwrap().trim_matches('"'))
            .collect();
        assert_eq!(
            keys,
            [
                "p",
                "alpha",
                "beta",
                "size_u",
                "size_v",
                "observed",
                "main_term",
                "abs_error",
                "bound",
                "ratio",
                "threshold_met"
            ]
        );
    }

    #[test]
    fn decomposition_rebuilds_count() {
        let (_, a) = setup(211);
        let mut rng = Sampler::new(11);
        let u = ResidueSet::new(211, rng.distinct_units(211, 80)).unwrap();
        let v = ResidueSet::new(211, rng.distinct_units(211, 50)).unwrap();
        let w = Window::new(0.4, 2.0).unwrap();
        let d = fourier_decomposition(&u, &v, &a, &w).unwrap();
        let observed = sumset_count(&u, &v, &a, &w).unwrap() as f64;
        assert!((d.reconstructed_count() - observed).abs() < 1e-8);
        assert!((observed - d.zero_term).abs() <= d.remainder_bound + 1e-9);
        // Parseval: sum over all lambda is p #U, the lambda = 0 term is #U^2
        assert!((d.energy_u - (211.0 * 80.0 - 80.0 * 80.0)).abs() < 1e-6);
        assert!(
            d.remainder_bound <= d.max_exp_sum * (d.energy_u * d.energy_v).sqrt() / 211.0 + 1e-9
        );
    }

    #[test]
    fn beatty_report() {
        let (_, a) = setup(11);
        let r = beatty_count(2f64.sqrt(), 0.0, 5, &a, &Window::full()).unwrap();
        assert_eq!(r.count, 5);
        let r = beatty_count(11.0, 0.0, 4, &a, &Window::full()).unwrap();
        assert_eq!(r.count, 0);
    }

    #[test]
    fn threshold_examples() {
        assert!(threshold_met(5, 4, 4, 0.05));
        assert!(!threshold_met(5, 3, 4, 0.05));
        assert!(threshold_met(10007, 4000, 4000, 0.05));
    }
}
