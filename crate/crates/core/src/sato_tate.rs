//! Sato-Tate measure, window counts over the angle table, deviation and
//! discrepancy statistics, and exponential/character sums over window sets.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::{pow_mod, PrimeContext, RootTable};
use crate::error::{Error, Result};
use crate::io::{fmt_f64, Csv};
use crate::kloosterman::{pairwise_sum, AngleTable};

/// Angle interval [alpha, beta] with 0 <= alpha < beta <= pi.
///
/// Membership is endpoint-inclusive and compares the stored f64 angles
/// directly.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Window {
    alpha: f64,
    beta: f64,
}

impl Window {
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        if !(alpha >= 0.0 && alpha < beta && beta <= PI) {
            return Err(Error::InvalidWindow { alpha, beta });
        }
        Ok(Window { alpha, beta })
    }

    pub fn full() -> Self {
        Window {
            alpha: 0.0,
            beta: PI,
        }
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    #[inline]
    pub fn contains(&self, psi: f64) -> bool {
        self.alpha <= psi && psi <= self.beta
    }

    /// Whether `self` is a subset of `other`.
    pub fn within(&self, other: &Window) -> bool {
        other.alpha <= self.alpha && self.beta <= other.beta
    }
}

/// A ten-window grid spread over [0, pi].
pub fn default_windows() -> Vec<Window> {
    [
        (0.0, PI / 2.0),
        (PI / 2.0, PI),
        (PI / 4.0, 3.0 * PI / 4.0),
        (0.0, PI / 3.0),
        (PI / 3.0, 2.0 * PI / 3.0),
        (2.0 * PI / 3.0, PI),
        (0.0, PI / 6.0),
        (PI / 6.0, PI / 2.0),
        (1.0, 2.0),
        (0.5, 2.5),
    ]
    .into_iter()
    .map(|(a, b)| Window::new(a, b).expect("static window"))
    .collect()
}

/// mu_ST([0, x]) = x / pi - sin(2x) / (2 pi).
#[inline]
pub fn sato_tate_cdf(x: f64) -> f64 {
    x / PI - (2.0 * x).sin() / TAU
}

/// (2/pi) * integral of sin^2 over the window.
pub fn sato_tate_measure(w: &Window) -> f64 {
    let v = (w.beta - w.alpha) / PI - ((2.0 * w.beta).sin() - (2.0 * w.alpha).sin()) / TAU;
    v.clamp(0.0, 1.0)
}

/// Bound shape p^(3/4) for the window-count deviation.
pub fn deviation_shape(p: u64) -> f64 {
    (p as f64).powf(0.75)
}

/// Bound shape p^(-1/4) (ln p)^(1/2) for the window discrepancy.
pub fn discrepancy_shape(p: u64) -> f64 {
    let p = p as f64;
    p.powf(-0.25) * p.ln().sqrt()
}

/// Bound shape p^(3/4) (ln p)^(1/2) for |S_p(lambda; alpha, beta)|.
pub fn exp_sum_shape(p: u64) -> f64 {
    let p = p as f64;
    p.powf(0.75) * p.ln().sqrt()
}

/// Bound shape M^(1/2) p^(1/4) (ln p)^(1/2) for the scaled-subset count.
pub fn scaled_count_shape(p: u64, m: u64) -> f64 {
    let p = p as f64;
    (m as f64).sqrt() * p.powf(0.25) * p.ln().sqrt()
}

pub fn window_count(angles: &AngleTable, w: &Window) -> u64 {
    angles.psi().iter().filter(|&&t| w.contains(t)).count() as u64
}

/// Elements of A_p(alpha, beta), ascending.
pub fn window_members(angles: &AngleTable, w: &Window) -> Vec<u64> {
    angles
        .iter()
        .filter(|&(_, t)| w.contains(t))
        .map(|(a, _)| a)
        .collect()
}

/// Membership bitmap over `0..p`; slot 0 is always false.
pub fn membership(angles: &AngleTable, w: &Window) -> Vec<bool> {
    let mut bits = vec![false; angles.p() as usize];
    for (a, t) in angles.iter() {
        bits[a as usize] = w.contains(t);
    }
    bits
}

/// Supremum of |#A_p(alpha, beta) - mu_ST(alpha, beta) p| over windows.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Deviation {
    /// Over one-sided windows [0, beta].
    pub one_sided: f64,
    /// beta (or the breakpoint it approaches) attaining `one_sided`.
    pub one_sided_beta: f64,
    /// Over all windows [alpha, beta].
    pub two_sided: f64,
    pub two_sided_alpha: f64,
    pub two_sided_beta: f64,
}

/// One-sided supremum of the window-count deviation.
pub fn niederreiter_deviation(angles: &AngleTable) -> f64 {
    deviation_sweep(angles).one_sided
}

/// Exact one- and two-sided suprema of the window-count deviation.
///
/// Write the deviation of [alpha, beta] as D1(beta) - D2(alpha) with
/// D1(x) = #{psi <= x} - p mu(0, x) and D2(x) = #{psi < x} - p mu(0, x).
/// Between consecutive distinct angles both are monotone, so the supremum
/// is attained in the limit at a breakpoint. One sorted sweep that keeps
/// the running min/max of D2 over alpha <= beta covers every pair.
pub fn deviation_sweep(angles: &AngleTable) -> Deviation {
    let p = angles.p() as f64;
    let mut sorted = angles.psi().to_vec();
    sorted.sort_by(f64::total_cmp);

    // (t, #{psi < t}, #{psi <= t})
    let mut points: Vec<(f64, usize, usize)> = Vec::with_capacity(sorted.len() + 2);
    if sorted.first().is_none_or(|&t| t > 0.0) {
        points.push((0.0, 0, 0));
    }
    let mut i = 0;
    while i < sorted.len() {
        let t = sorted[i];
        let mut j = i;
        while j < sorted.len() && sorted[j] == t {
            j += 1;
        }
        points.push((t, i, j));
        i = j;
    }
    if sorted.last().is_none_or(|&t| t < PI) {
        points.push((PI, sorted.len(), sorted.len()));
    }

    let mut dev = Deviation {
        one_sided: 0.0,
        one_sided_beta: 0.0,
        two_sided: 0.0,
        two_sided_alpha: 0.0,
        two_sided_beta: 0.0,
    };
    let (mut min2, mut min2_at) = (f64::INFINITY, 0.0);
    let (mut max2, mut max2_at) = (f64::NEG_INFINITY, 0.0);

    for &(t, below, upto) in &points {
        let main = p * sato_tate_cdf(t);
        let left = below as f64 - main;
        let at = upto as f64 - main;

        // alpha approaching t from the left, or alpha = t
        if left < min2 {
            (min2, min2_at) = (left, t);
        }
        if left > max2 {
            (max2, max2_at) = (left, t);
        }

        let mut betas = [None, Some(at)];
        if t > 0.0 {
            betas[0] = Some(left);
        }
        for d1 in betas.into_iter().flatten() {
            if d1.abs() > dev.one_sided {
                dev.one_sided = d1.abs();
                dev.one_sided_beta = t;
            }
            if d1 - min2 > dev.two_sided {
                dev.two_sided = d1 - min2;
                dev.two_sided_alpha = min2_at;
                dev.two_sided_beta = t;
            }
            if max2 - d1 > dev.two_sided {
                dev.two_sided = max2 - d1;
                dev.two_sided_alpha = max2_at;
                dev.two_sided_beta = t;
            }
        }

        // alpha just right of t
        if t < PI {
            if at < min2 {
                (min2, min2_at) = (at, t);
            }
            if at > max2 {
                (max2, max2_at) = (at, t);
            }
        }
    }
    dev
}

/// #A_p(lambda, M; alpha, beta): members a with canonical(lambda a) in [1, M].
pub fn scaled_subset_count(
    ctx: &PrimeContext,
    angles: &AngleTable,
    lambda: u64,
    m: u64,
    w: &Window,
) -> Result<u64> {
    let lambda = ctx.check_unit("lambda", lambda)?;
    let m = ctx.check_unit("M", m)?;
    let p = ctx.p();
    Ok(angles
        .iter()
        .filter(|&(a, t)| w.contains(t) && (lambda * a % p) <= m)
        .count() as u64)
}

/// Maximum over a (lambda, M, window) grid of the scaled-subset deviation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScaledScan {
    pub max_deviation: f64,
    pub lambda: u64,
    pub m: u64,
    pub alpha: f64,
    pub beta: f64,
    /// Largest deviation / (M^(1/2) p^(1/4) (ln p)^(1/2)) over the grid.
    pub max_ratio: f64,
}

pub fn scaled_deviation_scan(
    ctx: &PrimeContext,
    angles: &AngleTable,
    lambdas: &[u64],
    ms: &[u64],
    windows: &[Window],
) -> Result<ScaledScan> {
    if lambdas.is_empty() || ms.is_empty() || windows.is_empty() {
        return Err(Error::InvalidArgument("empty scan grid".into()));
    }
    for &l in lambdas {
        ctx.check_unit("lambda", l)?;
    }
    for &m in ms {
        ctx.check_unit("M", m)?;
    }
    let p = ctx.p();
    let mut best = ScaledScan {
        max_deviation: 0.0,
        lambda: lambdas[0],
        m: ms[0],
        alpha: windows[0].alpha,
        beta: windows[0].beta,
        max_ratio: 0.0,
    };
    for w in windows {
        let members = window_members(angles, w);
        let mu = sato_tate_measure(w);
        for &lambda in lambdas {
            let mut scaled: Vec<u64> = members.iter().map(|a| lambda * a % p).collect();
            scaled.sort_unstable();
            for &m in ms {
                let count = scaled.partition_point(|&x| x <= m) as f64;
                let dev = (count - mu * m as f64).abs();
                let ratio = dev / scaled_count_shape(p, m);
                if dev > best.max_deviation {
                    best.max_deviation = dev;
                    best.lambda = lambda;
                    best.m = m;
                    best.alpha = w.alpha;
                    best.beta = w.beta;
                }
                best.max_ratio = best.max_ratio.max(ratio);
            }
        }
    }
    Ok(best)
}

/// Exact star discrepancy sup_gamma |#{x <= gamma}/N - gamma| of points in [0, 1).
pub fn star_discrepancy(points: &[f64]) -> Result<f64> {
    if points.is_empty() {
        return Err(Error::EmptyPoints);
    }
    let mut xs = points.to_vec();
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    Ok(xs
        .iter()
        .enumerate()
        .map(|(i, &x)| (x - i as f64 / n).max((i + 1) as f64 / n - x))
        .fold(0.0, f64::max))
}

/// D_p(lambda; alpha, beta): star discrepancy of canonical(lambda a)/p over
/// a in A_p(alpha, beta).
pub fn discrepancy_of_window(
    ctx: &PrimeContext,
    angles: &AngleTable,
    lambda: u64,
    w: &Window,
) -> Result<f64> {
    let lambda = ctx.check_unit("lambda", lambda)?;
    let p = ctx.p();
    let points: Vec<f64> = angles
        .iter()
        .filter(|&(_, t)| w.contains(t))
        .map(|(a, _)| (lambda * a % p) as f64 / p as f64)
        .collect();
    if points.is_empty() {
        return Err(Error::EmptyWindow {
            alpha: w.alpha,
            beta: w.beta,
        });
    }
    star_discrepancy(&points)
}

fn sum_complex(terms: impl Iterator<Item = Complex64>) -> Complex64 {
    let (re, im): (Vec<f64>, Vec<f64>) = terms.map(|z| (z.re, z.im)).unzip();
    Complex64::new(pairwise_sum(&re), pairwise_sum(&im))
}

/// S_p(lambda; alpha, beta) = sum over a in A_p(alpha, beta) of e_p(lambda a).
pub fn exp_sum(
    ctx: &PrimeContext,
    angles: &AngleTable,
    lambda: u64,
    w: &Window,
) -> Result<Complex64> {
    let lambda = ctx.check_unit("lambda", lambda)?;
    let p = ctx.p();
    Ok(sum_complex(
        angles
            .iter()
            .filter(|&(_, t)| w.contains(t))
            .map(|(a, _)| crate::arith::eval_ep(lambda * a % p, p)),
    ))
}

fn exp_sum_with_roots(roots: &RootTable, members: &[u64], lambda: u64) -> Complex64 {
    let p = roots.p();
    sum_complex(members.iter().map(|&a| roots.get(lambda * a % p)))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExpSumScan {
    pub max_abs: f64,
    pub lambda: u64,
    pub alpha: f64,
    pub beta: f64,
    /// max_abs / (p^(3/4) (ln p)^(1/2))
    pub ratio: f64,
}

/// max |S_p(lambda; w)| over a grid of lambdas and windows.
pub fn exp_sum_scan(
    ctx: &PrimeContext,
    angles: &AngleTable,
    lambdas: &[u64],
    windows: &[Window],
) -> Result<ExpSumScan> {
    if lambdas.is_empty() || windows.is_empty() {
        return Err(Error::InvalidArgument("empty scan grid".into()));
    }
    for &l in lambdas {
        ctx.check_unit("lambda", l)?;
    }
    let roots = RootTable::new(ctx.p());
    let members: Vec<Vec<u64>> = windows.iter().map(|w| window_members(angles, w)).collect();
    let cells: Vec<(usize, u64)> = (0..windows.len())
        .flat_map(|wi| lambdas.iter().map(move |&l| (wi, l)))
        .collect();
    let (max_abs, wi, lambda) = cells
        .par_iter()
        .map(|&(wi, l)| (exp_sum_with_roots(&roots, &members[wi], l).norm(), wi, l))
        .reduce(
            || (f64::NEG_INFINITY, 0, lambdas[0]),
            |x, y| {
                // deterministic tie-break on (window, lambda)
                if y.0 > x.0 || (y.0 == x.0 && (y.1, y.2) < (x.1, x.2)) {
                    y
                } else {
                    x
                }
            },
        );
    Ok(ExpSumScan {
        max_abs,
        lambda,
        alpha: windows[wi].alpha,
        beta: windows[wi].beta,
        ratio: max_abs / exp_sum_shape(ctx.p()),
    })
}

/// T_p(chi_k; alpha, beta) with chi_k(g^j) = exp(2 pi i j k / (p - 1)).
pub fn character_sum(
    ctx: &PrimeContext,
    angles: &AngleTable,
    k: u64,
    w: &Window,
) -> Result<Complex64> {
    let order = ctx.p() - 1;
    if k.is_multiple_of(order) {
        return Err(Error::PrincipalCharacter { k, order });
    }
    if !ctx.has_dlog() {
        return Err(Error::MissingDlogTable);
    }
    let k = k % order;
    Ok(sum_complex(
        angles.iter().filter(|&(_, t)| w.contains(t)).map(|(a, _)| {
            let j = ctx.dlog(a).expect("dlog table present");
            let e = (j * k % order) as f64 / order as f64;
            let (s, c) = (TAU * e).sin_cos();
            Complex64::new(c, s)
        }),
    ))
}

/// Legendre symbol of `a` (0 for a = 0 mod p).
pub fn legendre(ctx: &PrimeContext, a: u64) -> i32 {
    let p = ctx.p();
    let a = a % p;
    if a == 0 {
        return 0;
    }
    if pow_mod(a, (p - 1) / 2, p) == 1 {
        1
    } else {
        -1
    }
}

/// #Q_p(alpha, beta) = #{a in F_p : a^2 in A_p(alpha, beta)}.
pub fn quadratic_count(ctx: &PrimeContext, angles: &AngleTable, w: &Window) -> u64 {
    let p = ctx.p();
    (1..p)
        .filter(|&a| w.contains(angles.angle(a * a % p)))
        .count() as u64
}

/// One CSV row per window: count against the Sato-Tate main term.
pub fn window_csv(angles: &AngleTable, windows: &[Window]) -> String {
    let p = angles.p();
    let mut csv = Csv::new(&["alpha", "beta", "count", "measure", "deviation", "ratio"]);
    for w in windows {
        let count = window_count(angles, w);
        let measure = sato_tate_measure(w);
        let deviation = count as f64 - measure * p as f64;
        csv.row(&[
            fmt_f64(w.alpha),
            fmt_f64(w.beta),
            count.to_string(),
            fmt_f64(measure),
            fmt_f64(deviation),
            fmt_f64(deviation.abs() / deviation_shape(p)),
        ]);
    }
    csv.finish()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kloosterman::{angles, kloosterman_table_batch, kloosterman_table_naive};

    fn p5() -> (PrimeContext, AngleTable) {
        let ctx = PrimeContext::new(5).unwrap().with_dlog();
        let t = angles(&kloosterman_table_naive(&ctx, false).unwrap()).unwrap();
        (ctx, t)
    }

    fn table(p: u64) -> (PrimeContext, AngleTable) {
        let ctx = PrimeContext::new(p).unwrap().with_dlog();
        let t = angles(&kloosterman_table_batch(&ctx).unwrap()).unwrap();
        (ctx, t)
    }

    fn half() -> Window {
        Window::new(0.0, PI / 2.0).unwrap()
    }

    // Simpson quadrature of (2/pi) sin^2.
    fn quadrature(a: f64, b: f64) -> f64 {
        let n = 2000;
        let h = (b - a) / n as f64;
        let f = |x: f64| 2.0 / PI * x.sin().powi(2);
        let mut s = f(a) + f(b);
        for i in 1..n {
            let x = a + i as f64 * h;
            s += if i % 2 == 1 { 4.0 } else { 2.0 } * f(x);
        }
        s * h / 3.0
    }

    #[test]
    fn window_validation() {
        assert!(Window::new(0.0, PI).is_ok());
        assert!(Window::new(1.0, 1.0).is_err());
        assert!(Window::new(-0.1, 1.0).is_err());
        assert!(Window::new(0.0, 3.2).is_err());
        assert!(Window::new(f64::NAN, 1.0).is_err());
    }

    #[test]
    fn measure_examples() {
        assert!((sato_tate_measure(&Window::full()) - 1.0).abs() < 1e-15);
        assert!((sato_tate_measure(&half()) - 0.5).abs() < 1e-15);
        let w = Window::new(PI / 3.0, 2.0 * PI / 3.0).unwrap();
        assert!((quadrature(PI / 3.0, 2.0 * PI / 3.0) - 0.608998).abs() < 1e-6);
        assert!((sato_tate_measure(&w) - 0.608998).abs() < 1e-6);
        for (a, b) in [(0.1, 0.2), (0.5, 2.9), (1.0, 3.0), (2.0, PI)] {
            let w = Window::new(a, b).unwrap();
            assert!((sato_tate_measure(&w) - quadrature(a, b)).abs() < 1e-12);
        }
    }

    #[test]
    fn count_examples() {
        let (_, t) = p5();
        assert_eq!(window_count(&t, &Window::full()), 4);
        assert_eq!(window_count(&t, &half()), 3);
        assert_eq!(window_count(&t, &Window::new(0.0, 0.1).unwrap()), 0);
        assert_eq!(window_members(&t, &half()), vec![1, 3, 4]);
    }

    #[test]
    fn deviation_p5() {
        let (_, t) = p5();
        let d = deviation_sweep(&t);
        // just below beta = 2.379810: 5 mu(0, beta) - 3 = 1.582473
        assert!((d.one_sided - 1.582473).abs() < 1e-6, "{d:?}");
        assert!((d.one_sided_beta - 2.37981).abs() < 1e-5);
        assert!(d.two_sided >= d.one_sided);
        assert!(d.two_sided <= 2.0 * d.one_sided + 1e-12);
    }

    // Brute force over alpha, beta at every angle and just either side of it.
    fn brute_deviation(t: &AngleTable) -> (f64, f64) {
        let p = t.p() as f64;
        let delta = 1e-10;
        let mut cands = vec![0.0, PI];
        for &x in t.psi() {
            cands.extend([x, (x - delta).max(0.0), (x + delta).min(PI)]);
        }
        cands.sort_by(f64::total_cmp);
        cands.dedup();
        let count = |a: f64, b: f64| t.psi().iter().filter(|&&x| a <= x && x <= b).count() as f64;
        let mut one: f64 = 0.0;
        let mut two: f64 = 0.0;
        for (i, &a) in cands.iter().enumerate() {
            for &b in &cands[i + 1..] {
                let mu = sato_tate_cdf(b) - sato_tate_cdf(a);
                let d = (count(a, b) - mu * p).abs();
                two = two.max(d);
                if a == 0.0 {
                    one = one.max(d);
                }
            }
        }
        (one, two)
    }

    #[test]
    fn deviation_matches_brute_force() {
        for p in [5u64, 7, 13, 101, 211] {
            let (_, t) = table(p);
            let d = deviation_sweep(&t);
            let (one, two) = brute_deviation(&t);
            assert!(
                (d.one_sided - one).abs() < 1e-6,
                "p = {p}: {} vs {one}",
                d.one_sided
            );
            assert!(
                (d.two_sided - two).abs() < 1e-6,
                "p = {p}: {} vs {two}",
                d.two_sided
            );
            assert!(d.one_sided >= 1.0 - 1e-12);
        }
    }

    #[test]
    fn deviation_p101_envelope() {
        let (_, t) = table(101);
        assert!(niederreiter_deviation(&t) <= 10.0 * deviation_shape(101));
    }

    #[test]
    fn scaled_examples() {
        let (ctx, t) = p5();
        assert_eq!(scaled_subset_count(&ctx, &t, 1, 4, &half()).unwrap(), 3);
        assert_eq!(scaled_subset_count(&ctx, &t, 1, 2, &half()).unwrap(), 1);
        assert_eq!(scaled_subset_count(&ctx, &t, 2, 2, &half()).unwrap(), 2);
        assert!(scaled_subset_count(&ctx, &t, 0, 2, &half()).is_err());
        assert!(scaled_subset_count(&ctx, &t, 1, 5, &half()).is_err());
    }

    #[test]
    fn scaled_scan_agrees_with_counts() {
        let (ctx, t) = table(101);
        let ws = default_windows();
        let scan = scaled_deviation_scan(&ctx, &t, &[1, 7, 50], &[10, 50, 100], &ws).unwrap();
        let w = Window::new(scan.alpha, scan.beta).unwrap();
        let c = scaled_subset_count(&ctx, &t, scan.lambda, scan.m, &w).unwrap() as f64;
        let dev = (c - sato_tate_measure(&w) * scan.m as f64).abs();
        assert!((dev - scan.max_deviation).abs() < 1e-9);
    }

    #[test]
    fn star_discrepancy_examples() {
        assert_eq!(star_discrepancy(&[0.5]).unwrap(), 0.5);
        assert_eq!(star_discrepancy(&[0.25, 0.75]).unwrap(), 0.25);
        let n = 8;
        let pts: Vec<f64> = (1..=n)
            .map(|i| (2 * i - 1) as f64 / (2 * n) as f64)
            .collect();
        assert!((star_discrepancy(&pts).unwrap() - 1.0 / 16.0).abs() < 1e-15);
        assert!(matches!(star_discrepancy(&[]), Err(Error::EmptyPoints)));
    }

    #[test]
    fn window_discrepancy_examples() {
        let (ctx, t) = p5();
        let full = Window::full();
        let d = discrepancy_of_window(&ctx, &t, 1, &full).unwrap();
        assert!((d - 0.2).abs() < 1e-15);
        for l in 2..5 {
            assert_eq!(discrepancy_of_window(&ctx, &t, l, &full).unwrap(), d);
        }
        let empty = Window::new(0.0, 0.1).unwrap();
        assert!(matches!(
            discrepancy_of_window(&ctx, &t, 1, &empty),
            Err(Error::EmptyWindow { .. })
        ));
        let (ctx, t) = table(101);
        let d = discrepancy_of_window(&ctx, &t, 7, &half()).unwrap();
        assert!(d <= 5.0 * discrepancy_shape(101));
    }

    #[test]
    fn exp_sum_examples() {
        let (ctx, t) = p5();
        for l in 1..5 {
            let s = exp_sum(&ctx, &t, l, &Window::full()).unwrap();
            assert!((s - Complex64::new(-1.0, 0.0)).norm() < 5.0 * f64::EPSILON);
        }
        assert!((exp_sum(&ctx, &t, 1, &half()).unwrap().norm() - 0.618034).abs() < 1e-6);
        assert!((exp_sum(&ctx, &t, 2, &half()).unwrap().norm() - 1.618034).abs() < 1e-6);
        assert!(exp_sum(&ctx, &t, 0, &half()).is_err());
    }

    #[test]
    fn exp_sum_scan_examples() {
        let (ctx, t) = p5();
        let s = exp_sum_scan(&ctx, &t, &[1, 2, 3, 4], &[Window::full()]).unwrap();
        assert!((s.max_abs - 1.0).abs() < 1e-12);
        let s = exp_sum_scan(&ctx, &t, &[1, 2], &[half()]).unwrap();
        assert!((s.max_abs - 1.618034).abs() < 1e-6);
        assert_eq!(s.lambda, 2);
    }

    #[test]
    fn full_window_exp_sum_random_lambdas() {
        let (ctx, t) = table(10007);
        let mut rng = crate::sample::Sampler::new(3);
        for l in rng.distinct_units(10007, 20) {
            let s = exp_sum(&ctx, &t, l, &Window::full()).unwrap();
            assert!(
                (s + 1.0).norm() < 10007.0 * f64::EPSILON,
                "lambda = {l}: {s}"
            );
        }
    }

    #[test]
    fn character_sum_examples() {
        let (ctx, t) = p5();
        for k in 1..4 {
            assert!(
                character_sum(&ctx, &t, k, &Window::full()).unwrap().norm() < 5.0 * f64::EPSILON
            );
        }
        let s = character_sum(&ctx, &t, 2, &half()).unwrap();
        assert!((s - Complex64::new(1.0, 0.0)).norm() < 1e-12);
        assert!(matches!(
            character_sum(&ctx, &t, 0, &half()),
            Err(Error::PrincipalCharacter { .. })
        ));
        assert!(matches!(
            character_sum(&ctx, &t, 4, &half()),
            Err(Error::PrincipalCharacter { .. })
        ));
        let no_dlog = PrimeContext::new(5).unwrap();
        assert!(matches!(
            character_sum(&no_dlog, &t, 1, &half()),
            Err(Error::MissingDlogTable)
        ));
    }

    #[test]
    fn quadratic_examples() {
        let (ctx, t) = p5();
        assert_eq!(quadratic_count(&ctx, &t, &Window::full()), 4);
        assert_eq!(quadratic_count(&ctx, &t, &half()), 4);
        assert_eq!(
            quadratic_count(&ctx, &t, &Window::new(2.3, 2.4).unwrap()),
            0
        );
    }

    #[test]
    fn quadratic_matches_legendre_count() {
        let (ctx, t) = table(1009);
        for w in default_windows() {
            let via_legendre: i64 = window_members(&t, &w)
                .iter()
                .map(|&b| 1 + legendre(&ctx, b) as i64)
                .sum();
            assert_eq!(quadratic_count(&ctx, &t, &w) as i64, via_legendre);
        }
    }

    #[test]
    fn full_window_counts_everything() {
        for p in [101u64, 1009] {
            let (_, t) = table(p);
            assert_eq!(window_count(&t, &Window::full()), p - 1);
        }
    }

    #[test]
    fn window_csv_has_rows() {
        let (_, t) = p5();
        let csv = window_csv(&t, &[Window::full(), half()]);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "alpha,beta,count,measure,deviation,ratio");
        assert_eq!(lines.len(), 3);
        assert_eq!(lines[2].split(',').nth(2), Some("3"));
    }
}
