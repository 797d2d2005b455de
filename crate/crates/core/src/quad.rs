//! One-dimensional quadrature for the continuum integrals.
//!
//! The primary rule is globally adaptive Gauss–Legendre with a 10/21 point
//! pair for the error estimate. Double-exponential (tanh-sinh) quadrature is
//! an independent second rule used to cross-check results. Oscillatory
//! integrands are split at known zeros of their kernels before integration.

use crate::{Error, Result};
use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::sync::OnceLock;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    /// Upper bound on the number of subintervals kept by the adaptive rule.
    pub max_intervals: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        QuadOptions { abs_tol: 0.0, rel_tol: 1e-10, max_intervals: 2_000_000 }
    }
}

impl QuadOptions {
    pub fn new(abs_tol: f64, rel_tol: f64) -> Self {
        QuadOptions { abs_tol, rel_tol, ..Default::default() }
    }

    fn target(&self, value: f64) -> f64 {
        self.abs_tol.max(self.rel_tol * value.abs())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    /// Estimated absolute error.
    pub error: f64,
    pub evaluations: usize,
}

/// Gauss–Legendre nodes and weights on [−1, 1], by Newton iteration on P_n.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let p = if n == 0 { 1.0 } else if n == 1 { z } else { p1 };
            let pm1 = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (z * p - pm1) / (z * z - 1.0);
            let dz = p / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    (x, w)
}

struct Rule {
    low: (Vec<f64>, Vec<f64>),
    high: (Vec<f64>, Vec<f64>),
}

fn rule() -> &'static Rule {
    static R: OnceLock<Rule> = OnceLock::new();
    R.get_or_init(|| Rule { low: gauss_legendre(10), high: gauss_legendre(21) })
}

/// The rule's value and the same rule applied to |f|.
fn apply(nodes: &(Vec<f64>, Vec<f64>), f: &mut impl FnMut(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let (c, h) = (0.5 * (a + b), 0.5 * (b - a));
    let (mut s, mut s_abs) = (0.0, 0.0);
    for (x, w) in nodes.0.iter().zip(&nodes.1) {
        let v = w * f(c + h * x);
        s += v;
        s_abs += v.abs();
    }
    (s * h, s_abs * h)
}

#[derive(Clone, Copy)]
struct Piece {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
    /// Rounding level of the piece.
    floor: f64,
}

impl PartialEq for Piece {
    fn eq(&self, o: &Self) -> bool {
        self.error.total_cmp(&o.error) == Ordering::Equal
    }
}
impl Eq for Piece {}
impl PartialOrd for Piece {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for Piece {
    fn cmp(&self, o: &Self) -> Ordering {
        self.error.total_cmp(&o.error)
    }
}

fn estimate(f: &mut impl FnMut(f64) -> f64, a: f64, b: f64) -> Piece {
    let r = rule();
    let (value, magnitude) = apply(&r.high, f, a, b);
    let (low, _) = apply(&r.low, f, a, b);
    let floor = 8.0 * f64::EPSILON * magnitude;
    Piece { a, b, value, error: (value - low).abs().max(floor), floor }
}

fn kahan_sum(items: impl Iterator<Item = f64>) -> f64 {
    let (mut s, mut c) = (0.0, 0.0);
    for v in items {
        let y = v - c;
        let t = s + y;
        c = (t - s) - y;
        s = t;
    }
    s
}

/// Globally adaptive integral over [b_0, b_1] ∪ [b_1, b_2] ∪ ... . The pieces
/// given by `breaks` (sorted) are refined by bisection in order of their
/// error estimates until the summed estimate meets the tolerance.
pub fn integrate_pieces(mut f: impl FnMut(f64) -> f64, breaks: &[f64], opts: QuadOptions) -> Result<QuadResult> {
    if breaks.len() < 2 || breaks.windows(2).any(|w| !(w[1] > w[0])) || breaks.iter().any(|b| !b.is_finite()) {
        return Err(Error::InvalidInput("integration breakpoints must be finite and increasing".into()));
    }
    let per_eval = rule().low.0.len() + rule().high.0.len();
    let mut heap: BinaryHeap<Piece> = breaks.windows(2).map(|w| estimate(&mut f, w[0], w[1])).collect();
    let mut evaluations = heap.len() * per_eval;
    let mut frozen: Vec<Piece> = vec![];
    loop {
        let value = kahan_sum(heap.iter().chain(&frozen).map(|p| p.value));
        let error: f64 = heap.iter().chain(&frozen).map(|p| p.error).sum();
        let target = opts.target(value);
        if !value.is_finite() || !error.is_finite() {
            return Err(Error::Quadrature { estimate: f64::INFINITY, target });
        }
        if error <= target {
            return Ok(QuadResult { value, error, evaluations });
        }
        // Once rounding dominates, further bisection cannot help.
        let floor: f64 = heap.iter().chain(&frozen).map(|p| p.floor).sum();
        if error <= 2.0 * floor || heap.is_empty() || heap.len() + frozen.len() >= opts.max_intervals {
            return Err(Error::Quadrature { estimate: error, target });
        }
        // Refine the worst pieces in a batch so each pass costs O(n log n).
        let batch = (heap.len() / 8).max(1);
        let mut removed_error = 0.0;
        for _ in 0..batch {
            let Some(p) = heap.pop() else { break };
            let mid = 0.5 * (p.a + p.b);
            if !(mid > p.a && mid < p.b) || (p.b - p.a) <= 64.0 * f64::EPSILON * p.a.abs().max(p.b.abs()) {
                frozen.push(p);
                continue;
            }
            heap.push(estimate(&mut f, p.a, mid));
            heap.push(estimate(&mut f, mid, p.b));
            evaluations += 2 * per_eval;
            removed_error += p.error;
            if error - removed_error <= target {
                break;
            }
        }
    }
}

/// Adaptive integral over [a, b].
pub fn integrate(f: impl FnMut(f64) -> f64, a: f64, b: f64, opts: QuadOptions) -> Result<QuadResult> {
    if a == b {
        return Ok(QuadResult { value: 0.0, error: 0.0, evaluations: 0 });
    }
    if a > b {
        let r = integrate(f, b, a, opts)?;
        return Ok(QuadResult { value: -r.value, ..r });
    }
    integrate_pieces(f, &[a, b], opts)
}

/// Integral over [a, ∞) through x = a + u/(1 − u) on u ∈ [0, 1).
pub fn integrate_to_infinity(mut f: impl FnMut(f64) -> f64, a: f64, opts: QuadOptions) -> Result<QuadResult> {
    let g = |u: f64| {
        if u >= 1.0 {
            return 0.0;
        }
        let d = 1.0 - u;
        f(a + u / d) / (d * d)
    };
    integrate(g, 0.0, 1.0, opts)
}

/// Sorted breakpoints a, z_1, ..., b where z_k = offset + k·period are the
/// zeros of a periodic kernel inside (a, b).
pub fn periodic_breaks(a: f64, b: f64, offset: f64, period: f64) -> Vec<f64> {
    let mut out = vec![a];
    if period > 0.0 && period.is_finite() {
        let mut k = ((a - offset) / period).floor() + 1.0;
        loop {
            let z = offset + k * period;
            if z >= b {
                break;
            }
            if z > a {
                out.push(z);
            }
            k += 1.0;
        }
    }
    out.push(b);
    out
}

/// Merge extra interior points into a sorted breakpoint list.
pub fn merge_breaks(mut breaks: Vec<f64>, extra: &[f64]) -> Vec<f64> {
    let (a, b) = (breaks[0], *breaks.last().unwrap());
    breaks.extend(extra.iter().copied().filter(|x| *x > a && *x < b));
    breaks.sort_by(f64::total_cmp);
    breaks.dedup_by(|x, y| (*x - *y).abs() <= 4.0 * f64::EPSILON * x.abs().max(y.abs()));
    breaks
}

/// Tanh-sinh quadrature on each piece, halving the step until successive
/// levels agree. Independent of the Gauss rule; meant for cross-checks.
pub fn tanh_sinh_pieces(mut f: impl FnMut(f64) -> f64, breaks: &[f64], opts: QuadOptions) -> Result<QuadResult> {
    const T_MAX: f64 = 3.5;
    const MAX_LEVEL: usize = 12;
    if breaks.len() < 2 || breaks.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidInput("integration breakpoints must be increasing".into()));
    }
    let hpi = std::f64::consts::FRAC_PI_2;
    let mut total = vec![];
    let mut error = 0.0;
    let mut evaluations = 0;
    let pieces = (breaks.len() - 1) as f64;
    for w in breaks.windows(2) {
        let (c, h) = (0.5 * (w[0] + w[1]), 0.5 * (w[1] - w[0]));
        let mut node = |t: f64| {
            let s = hpi * t.sinh();
            let ch = s.cosh();
            let x = s.tanh();
            let weight = hpi * t.cosh() / (ch * ch);
            // Nodes that round onto an endpoint carry negligible weight.
            if weight == 0.0 || x.abs() >= 1.0 {
                0.0
            } else {
                weight * f(c + h * x)
            }
        };
        let mut step = 1.0;
        let mut sum = node(0.0);
        let mut k = 1.0;
        while k * step <= T_MAX {
            sum += node(k * step) + node(-k * step);
            k += 1.0;
        }
        evaluations += 2 * k as usize;
        let mut prev = sum * step * h;
        let mut converged = None;
        for _ in 0..MAX_LEVEL {
            step *= 0.5;
            let mut k = 1.0;
            while k * step <= T_MAX {
                sum += node(k * step) + node(-k * step);
                k += 2.0;
            }
            evaluations += k as usize;
            let cur = sum * step * h;
            let diff = (cur - prev).abs();
            if diff <= opts.target(cur) / pieces || diff <= 8.0 * f64::EPSILON * (cur.abs() + h) {
                converged = Some((cur, diff));
                break;
            }
            prev = cur;
        }
        match converged {
            Some((v, e)) => {
                total.push(v);
                error += e;
            }
            None => {
                return Err(Error::Quadrature { estimate: (sum * step * h - prev).abs(), target: opts.target(prev) });
            }
        }
    }
    Ok(QuadResult { value: kahan_sum(total.into_iter()), error, evaluations })
}
