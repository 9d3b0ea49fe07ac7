//! Detecting eventual periodicity in orbits, refining periodic points, and
//! classifying a parameter point from many random initial pairs.

use crate::error::{Error, Result};
use crate::lyapunov::{lyapunov_from_state, LyapunovOptions, LyapunovVerdict, Matrix2};
use crate::map::{
    generate_orbit, MapParameters, Orbit, OrbitIter, OrbitSpec, OrbitStatus, DEFAULT_GUARD_EPSILON,
};
use crate::rng;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::fmt;

pub const DEFAULT_MATCH_TOL: f64 = 1e-7;
pub const DEFAULT_P_MAX: usize = 2048;
pub const QUICK_TRANSIENT: usize = 1_000;
pub const HUNT_TRANSIENT: usize = 100_000;
/// Fraction of seeds that must agree before a verdict is issued.
pub const AGREEMENT_THRESHOLD: f64 = 0.8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DetectOptions {
    pub transient: usize,
    pub p_max: usize,
    pub match_tol: f64,
    /// Number of consecutive comparisons `|z_{n+p} - z_n|` that must all pass.
    pub window: usize,
}

impl DetectOptions {
    /// `window = 3 p_max`, default tolerance, no transient.
    pub fn with_p_max(p_max: usize) -> Self {
        Self {
            transient: 0,
            p_max,
            match_tol: DEFAULT_MATCH_TOL,
            window: 3 * p_max,
        }
    }

    pub fn transient(mut self, transient: usize) -> Self {
        self.transient = transient;
        self
    }

    /// Orbit points the detector needs after the transient.
    pub fn required_tail(&self) -> usize {
        2 * self.p_max + self.window
    }
}

impl Default for DetectOptions {
    fn default() -> Self {
        Self::with_p_max(DEFAULT_P_MAX).transient(QUICK_TRANSIENT)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CycleClass {
    ExactlyPeriodic,
    ConvergingToCycle,
    NoCycleFound,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CycleReport {
    pub detected: bool,
    /// Minimal period, when detected.
    pub period: Option<usize>,
    /// The last `period` points of the orbit, in orbit order.
    pub representative_points: Vec<Complex64>,
    /// Detected: max `|z_{n+p} - z_n|` over the window. Otherwise the closest
    /// single return `min_p |z_last - z_{last-p}|`.
    pub residual: f64,
    /// Orbit index `n` of the first point compared in the window.
    pub window_start: isize,
    pub classification: CycleClass,
    /// Geometric-mean residual ratio per period across the tail (< 1 when the
    /// orbit is still contracting onto the cycle).
    pub contraction: Option<f64>,
}

fn window_residual(tail: &[Complex64], p: usize, window: usize, tol: f64) -> Option<f64> {
    let n = tail.len();
    let mut worst = 0.0f64;
    for k in n - window..n {
        let d = (tail[k] - tail[k - p]).norm();
        if !(d < tol) {
            return None;
        }
        worst = worst.max(d);
    }
    Some(worst)
}

/// Per-period residual trend over up to eight trailing blocks of length `p`.
fn contraction_ratio(tail: &[Complex64], p: usize) -> Option<f64> {
    let n = tail.len();
    let blocks = ((n - p) / p).min(8);
    if blocks < 2 {
        return None;
    }
    let block = |j: usize| {
        (n - (j + 1) * p..n - j * p)
            .map(|k| (tail[k] - tail[k - p]).norm())
            .fold(0.0f64, f64::max)
    };
    let newest = block(0);
    let oldest = block(blocks - 1);
    if oldest == 0.0 || newest == 0.0 {
        return None;
    }
    Some((newest / oldest).powf(1.0 / (blocks - 1) as f64))
}

/// Finds the smallest `p <= p_max` such that the last `window` comparisons
/// `|z_k - z_{k-p}|` after the transient all fall below `match_tol`.
pub fn detect_cycle(orbit: &Orbit, opts: &DetectOptions) -> Result<CycleReport> {
    if !orbit.status.is_completed() {
        return Err(Error::InvalidInput(format!(
            "cycle detection needs a completed orbit, got {}",
            orbit.status
        )));
    }
    if opts.p_max == 0 || opts.window == 0 || !(opts.match_tol > 0.0) {
        return Err(Error::InvalidInput(
            "p_max, window and match_tol must be positive".into(),
        ));
    }
    let needed = opts.transient + opts.required_tail();
    if orbit.points.len() < needed {
        return Err(Error::InsufficientData {
            needed,
            available: orbit.points.len(),
        });
    }

    let tail = orbit.tail(opts.transient);
    let n = tail.len();
    let window_start = (opts.transient + n - opts.window) as isize - 1;

    for p in 1..=opts.p_max {
        let Some(residual) = window_residual(tail, p, opts.window, opts.match_tol) else {
            continue;
        };
        let representative_points = tail[n - p..].to_vec();
        let scale = representative_points
            .iter()
            .map(|z| z.norm())
            .fold(1.0f64, f64::max);
        let exact = residual < 100.0 * f64::EPSILON * scale;
        return Ok(CycleReport {
            detected: true,
            period: Some(p),
            representative_points,
            residual,
            window_start,
            classification: if exact {
                CycleClass::ExactlyPeriodic
            } else {
                CycleClass::ConvergingToCycle
            },
            contraction: if exact { None } else { contraction_ratio(tail, p) },
        });
    }

    let last = tail[n - 1];
    let closest = (1..=opts.p_max)
        .map(|p| (last - tail[n - 1 - p]).norm())
        .fold(f64::INFINITY, f64::min);
    Ok(CycleReport {
        detected: false,
        period: None,
        representative_points: Vec::new(),
        residual: closest,
        window_start,
        classification: CycleClass::NoCycleFound,
        contraction: None,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RefineOptions {
    pub max_iterations: usize,
    /// Stop once `|T^p(x) - x| <= tol (1 + |x|)`.
    pub tol: f64,
    pub guard_epsilon: f64,
}

impl Default for RefineOptions {
    fn default() -> Self {
        Self {
            max_iterations: 60,
            tol: 1e-14,
            guard_epsilon: DEFAULT_GUARD_EPSILON,
        }
    }
}

/// A periodic point of the state map `(z_{n-1}, z_n)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RefinedCycle {
    pub z_prev: Complex64,
    pub z_curr: Complex64,
    pub period: usize,
    pub residual: f64,
    pub iterations: usize,
    /// Eigenvalue moduli of the monodromy matrix, larger first.
    pub multipliers: [f64; 2],
}

fn mat_mul(a: &Matrix2, b: &Matrix2) -> Matrix2 {
    [
        [
            a[0][0] * b[0][0] + a[0][1] * b[1][0],
            a[0][0] * b[0][1] + a[0][1] * b[1][1],
        ],
        [
            a[1][0] * b[0][0] + a[1][1] * b[1][0],
            a[1][0] * b[0][1] + a[1][1] * b[1][1],
        ],
    ]
}

/// `T^p(u, v)` together with its Jacobian (the monodromy matrix).
fn flow_with_jacobian(
    params: &MapParameters,
    u: Complex64,
    v: Complex64,
    period: usize,
    guard_epsilon: f64,
) -> Result<((Complex64, Complex64), Matrix2)> {
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    let mut m = [[one, zero], [zero, one]];
    let (mut u, mut v) = (u, v);
    for _ in 0..period {
        let j = crate::lyapunov::tangent_jacobian(params, v, u, guard_epsilon)?;
        let next = crate::map::iterate_step(params, v, u, guard_epsilon)?;
        m = mat_mul(&j, &m);
        u = v;
        v = next;
    }
    Ok(((u, v), m))
}

/// Newton iteration on `T^p(u, v) = (u, v)` in `C^2`. The map is holomorphic,
/// so the complex monodromy matrix is the exact derivative.
pub fn refine_cycle(
    params: &MapParameters,
    z_prev: Complex64,
    z_curr: Complex64,
    period: usize,
    opts: &RefineOptions,
) -> Result<RefinedCycle> {
    if period == 0 {
        return Err(Error::InvalidInput("period must be positive".into()));
    }
    let (mut u, mut v) = (z_prev, z_curr);
    let mut residual = f64::INFINITY;
    for iteration in 0..=opts.max_iterations {
        let ((tu, tv), m) = flow_with_jacobian(params, u, v, period, opts.guard_epsilon)?;
        let (fu, fv) = (tu - u, tv - v);
        residual = (fu.norm_sqr() + fv.norm_sqr()).sqrt();
        let scale = 1.0 + (u.norm_sqr() + v.norm_sqr()).sqrt();
        if residual <= opts.tol * scale {
            let eig = crate::stability::quadratic_roots(-(m[0][0] + m[1][1]), m[0][0] * m[1][1] - m[0][1] * m[1][0]);
            return Ok(RefinedCycle {
                z_prev: u,
                z_curr: v,
                period,
                residual,
                iterations: iteration,
                multipliers: [eig[0].norm(), eig[1].norm()],
            });
        }
        // (M - I) delta = -F
        let a = m[0][0] - 1.0;
        let d = m[1][1] - 1.0;
        let det = a * d - m[0][1] * m[1][0];
        if det.norm() == 0.0 || !det.is_finite() {
            return Err(Error::Degenerate("singular Newton system (multiplier 1)".into()));
        }
        let du = (-fu * d + m[0][1] * fv) / det;
        let dv = (-fv * a + m[1][0] * fu) / det;
        u += du;
        v += dv;
        if !(u.is_finite() && v.is_finite()) {
            break;
        }
    }
    Err(Error::NoConvergence {
        iterations: opts.max_iterations,
        residual,
    })
}

/// Iteration and tolerance budgets for [`classify_parameter_point`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Budgets {
    pub transient: usize,
    pub p_max: usize,
    pub window: usize,
    pub match_tol: f64,
    /// Steps of tangent propagation when no cycle is found.
    pub lyapunov_steps: usize,
    pub chaos_tol: f64,
    pub guard_epsilon: f64,
}

impl Default for Budgets {
    fn default() -> Self {
        Self {
            transient: HUNT_TRANSIENT,
            p_max: DEFAULT_P_MAX,
            window: 3 * DEFAULT_P_MAX,
            match_tol: DEFAULT_MATCH_TOL,
            lyapunov_steps: 100_000,
            chaos_tol: crate::lyapunov::DEFAULT_CHAOS_TOL,
            guard_epsilon: DEFAULT_GUARD_EPSILON,
        }
    }
}

impl Budgets {
    /// Small budgets for interactive use and coarse sweeps.
    pub fn quick() -> Self {
        Self {
            transient: QUICK_TRANSIENT,
            p_max: 64,
            window: 192,
            lyapunov_steps: 10_000,
            ..Self::default()
        }
    }

    fn detect_options(&self) -> DetectOptions {
        DetectOptions {
            transient: 0,
            p_max: self.p_max,
            match_tol: self.match_tol,
            window: self.window,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PointVerdict {
    ConvergentToEquilibrium,
    Periodic(usize),
    Chaotic,
    Unbounded,
    Undefined,
    Inconclusive,
}

impl PointVerdict {
    pub fn label(&self) -> &'static str {
        match self {
            PointVerdict::ConvergentToEquilibrium => "ConvergentToEquilibrium",
            PointVerdict::Periodic(_) => "Periodic",
            PointVerdict::Chaotic => "Chaotic",
            PointVerdict::Unbounded => "Unbounded",
            PointVerdict::Undefined => "Undefined",
            PointVerdict::Inconclusive => "Inconclusive",
        }
    }

    pub fn period(&self) -> Option<usize> {
        match self {
            PointVerdict::Periodic(p) => Some(*p),
            _ => None,
        }
    }

    /// Inverse of [`label`](Self::label) plus the period column.
    pub fn from_parts(label: &str, period: Option<usize>) -> Option<Self> {
        Some(match (label, period) {
            ("ConvergentToEquilibrium", None) => PointVerdict::ConvergentToEquilibrium,
            ("Periodic", Some(p)) if p > 0 => PointVerdict::Periodic(p),
            ("Chaotic", None) => PointVerdict::Chaotic,
            ("Unbounded", None) => PointVerdict::Unbounded,
            ("Undefined", None) => PointVerdict::Undefined,
            ("Inconclusive", None) => PointVerdict::Inconclusive,
            _ => return None,
        })
    }
}

impl fmt::Display for PointVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PointVerdict::Periodic(p) => write!(f, "Periodic({p})"),
            other => f.write_str(other.label()),
        }
    }
}

impl Serialize for PointVerdict {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl std::str::FromStr for PointVerdict {
    type Err = Error;

    /// Parses the [`Display`](fmt::Display) form, e.g. `Chaotic` or `Periodic(55)`.
    fn from_str(s: &str) -> Result<Self> {
        let parsed = match s.strip_prefix("Periodic(").and_then(|r| r.strip_suffix(')')) {
            Some(p) => p.parse().ok().filter(|&p| p > 0).map(PointVerdict::Periodic),
            None => PointVerdict::from_parts(s, None),
        };
        parsed.ok_or_else(|| Error::InvalidInput(format!("unknown verdict {s:?}")))
    }
}

impl<'de> Deserialize<'de> for PointVerdict {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeedOutcome {
    pub seed_index: u64,
    pub z_minus1: Complex64,
    pub z0: Complex64,
    pub verdict: PointVerdict,
    pub cycle_residual: Option<f64>,
    pub lambda_max: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointClassification {
    /// Majority verdict if at least [`AGREEMENT_THRESHOLD`] of seeds agree,
    /// otherwise `Inconclusive`.
    pub verdict: PointVerdict,
    /// Most common per-seed verdict (earliest seed wins ties).
    pub majority: PointVerdict,
    pub agree_fraction: f64,
    /// Mean exponent over seeds that share the majority verdict and computed one.
    pub lambda_max: Option<f64>,
    pub seeds: Vec<SeedOutcome>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassifyOptions {
    pub n_seeds: usize,
    pub rng_seed: u64,
    /// Stream index; sweeps pass the cell index here.
    pub cell: u64,
    pub budgets: Budgets,
}

impl ClassifyOptions {
    pub fn new(n_seeds: usize, rng_seed: u64, budgets: Budgets) -> Self {
        Self {
            n_seeds,
            rng_seed,
            cell: 0,
            budgets,
        }
    }
}

/// Classifies one orbit from `(z_{-1}, z_0)`.
pub fn classify_orbit(
    params: &MapParameters,
    z_minus1: Complex64,
    z0: Complex64,
    budgets: &Budgets,
) -> (PointVerdict, Option<f64>, Option<f64>) {
    let detect = budgets.detect_options();
    let tail_len = detect.required_tail();
    let spec = OrbitSpec::new(z_minus1, z0, budgets.transient + tail_len).with_guard(budgets.guard_epsilon);
    if spec.validate().is_err() {
        return (PointVerdict::Undefined, None, None);
    }

    let mut iter = OrbitIter::new(*params, &spec);
    let skipped = iter.by_ref().take(budgets.transient).count();
    let mut points = Vec::with_capacity(tail_len + 1);
    if skipped == budgets.transient {
        points.push(iter.state().1);
        points.extend(iter.by_ref().map(|(_, z)| z));
    }
    match iter.status() {
        OrbitStatus::Completed => {}
        OrbitStatus::UndefinedAtStep(_) => return (PointVerdict::Undefined, None, None),
        OrbitStatus::OverflowAtStep(_) => return (PointVerdict::Unbounded, None, None),
    }
    let (prev, curr) = iter.state();
    let orbit = Orbit {
        points,
        status: OrbitStatus::Completed,
    };
    let Ok(report) = detect_cycle(&orbit, &detect) else {
        return (PointVerdict::Inconclusive, None, None);
    };
    match report.period {
        Some(1) => return (PointVerdict::ConvergentToEquilibrium, Some(report.residual), None),
        Some(p) => return (PointVerdict::Periodic(p), Some(report.residual), None),
        None => {}
    }

    let lyap_opts = LyapunovOptions {
        chaos_tol: budgets.chaos_tol,
        ..LyapunovOptions::default()
    };
    match lyapunov_from_state(params, prev, curr, budgets.lyapunov_steps, budgets.guard_epsilon, &lyap_opts) {
        Ok(r) => {
            let verdict = match r.verdict {
                LyapunovVerdict::Chaotic => PointVerdict::Chaotic,
                _ => PointVerdict::Inconclusive,
            };
            (verdict, None, Some(r.lambda_max))
        }
        Err(Error::OrbitTerminated { status, .. }) if status.starts_with("Overflow") => {
            (PointVerdict::Unbounded, None, None)
        }
        Err(Error::OrbitTerminated { .. }) => (PointVerdict::Undefined, None, None),
        Err(_) => (PointVerdict::Inconclusive, None, None),
    }
}

/// Aggregates per-seed verdicts for `n_seeds` initial pairs drawn from the
/// unit disk. Seeds run in parallel; the reduction is in seed order.
pub fn classify_parameter_point(params: &MapParameters, opts: &ClassifyOptions) -> Result<PointClassification> {
    if opts.n_seeds == 0 {
        return Err(Error::InvalidInput("n_seeds must be at least 1".into()));
    }
    let seeds: Vec<SeedOutcome> = (0..opts.n_seeds as u64)
        .into_par_iter()
        .map(|k| {
            let (zm1, z0) = rng::initial_pair(opts.rng_seed, opts.cell, k);
            let (verdict, cycle_residual, lambda_max) = classify_orbit(params, zm1, z0, &opts.budgets);
            SeedOutcome {
                seed_index: k,
                z_minus1: zm1,
                z0,
                verdict,
                cycle_residual,
                lambda_max,
            }
        })
        .collect();
    Ok(aggregate(seeds))
}

fn aggregate(seeds: Vec<SeedOutcome>) -> PointClassification {
    let mut counts: HashMap<PointVerdict, usize> = HashMap::new();
    for s in &seeds {
        *counts.entry(s.verdict).or_default() += 1;
    }
    // First seed whose verdict has the top count.
    let top = counts.values().copied().max().unwrap_or(0);
    let majority = seeds
        .iter()
        .map(|s| s.verdict)
        .find(|v| counts[v] == top)
        .unwrap_or(PointVerdict::Inconclusive);
    let agree_fraction = top as f64 / seeds.len() as f64;
    let lambdas: Vec<f64> = seeds
        .iter()
        .filter(|s| s.verdict == majority)
        .filter_map(|s| s.lambda_max)
        .collect();
    let lambda_max = (!lambdas.is_empty()).then(|| lambdas.iter().sum::<f64>() / lambdas.len() as f64);
    PointClassification {
        verdict: if agree_fraction >= AGREEMENT_THRESHOLD {
            majority
        } else {
            PointVerdict::Inconclusive
        },
        majority,
        agree_fraction,
        lambda_max,
        seeds,
    }
}

/// Convenience: generate an orbit and run the detector on it.
pub fn detect_from(params: &MapParameters, spec: &OrbitSpec, opts: &DetectOptions) -> Result<CycleReport> {
    detect_cycle(&generate_orbit(params, spec)?, opts)
}
