//! The delay logistic map `z_{n+1} = alpha z_n / (1 + beta z_{n-1})` over the
//! complex numbers, orbit generation with a forbidden-set guard, equilibria and
//! the trap-ball radius.
//!
//! Only the single-delay recurrence is modelled. Arbitrary delays in numerator
//! and denominator would need a history buffer in [`OrbitIter`] instead of the
//! `(prev, curr)` pair.

use crate::error::{Error, Result};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

/// Default half-width of the band around a vanishing denominator treated as
/// the forbidden set.
pub const DEFAULT_GUARD_EPSILON: f64 = 1e-12;

/// Orbits whose modulus exceeds this are reported as overflowing.
pub const OVERFLOW_CEILING: f64 = 1e150;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MapParameters {
    pub alpha: Complex64,
    pub beta: Complex64,
}

impl MapParameters {
    pub fn new(alpha: Complex64, beta: Complex64) -> Self {
        Self { alpha, beta }
    }

    /// Unguarded evaluation of the right-hand side.
    #[inline]
    pub fn apply(&self, z_curr: Complex64, z_prev: Complex64) -> Complex64 {
        self.alpha * z_curr / (1.0 + self.beta * z_prev)
    }

    /// Complex conjugate of both parameters.
    pub fn conj(&self) -> Self {
        Self::new(self.alpha.conj(), self.beta.conj())
    }

    pub(crate) fn require_beta(&self) -> Result<()> {
        if self.beta == Complex64::new(0.0, 0.0) {
            return Err(Error::Degenerate("beta = 0".into()));
        }
        Ok(())
    }
}

/// One guarded step of the map.
#[inline]
pub fn iterate_step(
    params: &MapParameters,
    z_curr: Complex64,
    z_prev: Complex64,
    guard_epsilon: f64,
) -> Result<Complex64> {
    debug_assert!(guard_epsilon > 0.0);
    let denominator = 1.0 + params.beta * z_prev;
    let modulus = denominator.norm();
    // Written so that a NaN denominator lands in the undefined branch.
    if !(modulus > guard_epsilon) {
        return Err(Error::Undefined {
            denominator: modulus,
            guard_epsilon,
        });
    }
    let next = params.alpha * z_curr / denominator;
    let next_modulus = next.norm();
    if !(next_modulus <= OVERFLOW_CEILING) {
        return Err(Error::Overflow {
            modulus: next_modulus,
        });
    }
    Ok(next)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OrbitSpec {
    pub z_minus1: Complex64,
    pub z0: Complex64,
    /// Number of new points `z_1 ..= z_N` to produce.
    pub n_iterations: usize,
    /// Leading points excluded from analysis windows (never from exports).
    pub transient: usize,
    pub guard_epsilon: f64,
}

impl OrbitSpec {
    pub fn new(z_minus1: Complex64, z0: Complex64, n_iterations: usize) -> Self {
        Self {
            z_minus1,
            z0,
            n_iterations,
            transient: 0,
            guard_epsilon: DEFAULT_GUARD_EPSILON,
        }
    }

    pub fn with_transient(mut self, transient: usize) -> Self {
        self.transient = transient;
        self
    }

    pub fn with_guard(mut self, guard_epsilon: f64) -> Self {
        self.guard_epsilon = guard_epsilon;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_iterations == 0 {
            return Err(Error::InvalidInput("n_iterations must be positive".into()));
        }
        if self.transient >= self.n_iterations {
            return Err(Error::InvalidInput(format!(
                "transient {} must be below n_iterations {}",
                self.transient, self.n_iterations
            )));
        }
        if !(self.guard_epsilon > 0.0 && self.guard_epsilon.is_finite()) {
            return Err(Error::InvalidInput("guard_epsilon must be positive".into()));
        }
        if !(self.z_minus1.is_finite() && self.z0.is_finite()) {
            return Err(Error::InvalidInput("initial values must be finite".into()));
        }
        Ok(())
    }
}

/// Why an orbit stopped. `UndefinedAtStep(n)` / `OverflowAtStep(n)` mean that
/// `z_n` could not be produced; the orbit holds `z_{-1} ..= z_{n-1}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OrbitStatus {
    Completed,
    UndefinedAtStep(usize),
    OverflowAtStep(usize),
}

impl OrbitStatus {
    pub fn is_completed(&self) -> bool {
        matches!(self, OrbitStatus::Completed)
    }
}

impl fmt::Display for OrbitStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OrbitStatus::Completed => f.write_str("Completed"),
            OrbitStatus::UndefinedAtStep(n) => write!(f, "UndefinedAtStep({n})"),
            OrbitStatus::OverflowAtStep(n) => write!(f, "OverflowAtStep({n})"),
        }
    }
}

impl FromStr for OrbitStatus {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidInput(format!("unknown orbit status {s:?}"));
        if s == "Completed" {
            return Ok(OrbitStatus::Completed);
        }
        let (kind, rest) = s.split_once('(').ok_or_else(bad)?;
        let step: usize = rest
            .strip_suffix(')')
            .and_then(|n| n.parse().ok())
            .ok_or_else(bad)?;
        match kind {
            "UndefinedAtStep" => Ok(OrbitStatus::UndefinedAtStep(step)),
            "OverflowAtStep" => Ok(OrbitStatus::OverflowAtStep(step)),
            _ => Err(bad()),
        }
    }
}

impl Serialize for OrbitStatus {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for OrbitStatus {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A trajectory. `points[0]` is `z_{-1}`, `points[1]` is `z_0`, and so on.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Orbit {
    pub points: Vec<Complex64>,
    pub status: OrbitStatus,
}

impl Orbit {
    /// `z_n` for `n >= -1`.
    pub fn z(&self, n: isize) -> Option<Complex64> {
        usize::try_from(n + 1).ok().and_then(|k| self.points.get(k).copied())
    }

    /// Points after dropping the first `transient` entries.
    pub fn tail(&self, transient: usize) -> &[Complex64] {
        &self.points[transient.min(self.points.len())..]
    }

    pub fn max_modulus(&self) -> f64 {
        self.points.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

/// Streaming orbit generator. Yields `(u, v) = (z_{n-1}, z_n)` state pairs
/// *after* each step, so the first item is `(z_0, z_1)`.
#[derive(Debug, Clone)]
pub struct OrbitIter {
    params: MapParameters,
    prev: Complex64,
    curr: Complex64,
    guard_epsilon: f64,
    step: usize,
    remaining: usize,
    status: OrbitStatus,
}

impl OrbitIter {
    pub fn new(params: MapParameters, spec: &OrbitSpec) -> Self {
        Self::from_state(params, spec.z_minus1, spec.z0, spec.n_iterations, spec.guard_epsilon)
    }

    pub fn from_state(
        params: MapParameters,
        prev: Complex64,
        curr: Complex64,
        steps: usize,
        guard_epsilon: f64,
    ) -> Self {
        Self {
            params,
            prev,
            curr,
            guard_epsilon,
            step: 0,
            remaining: steps,
            status: OrbitStatus::Completed,
        }
    }

    /// Termination status; `Completed` while the iterator is still running.
    pub fn status(&self) -> OrbitStatus {
        self.status
    }

    /// Current `(z_{n-1}, z_n)`.
    pub fn state(&self) -> (Complex64, Complex64) {
        (self.prev, self.curr)
    }

    /// Number of points produced so far.
    pub fn steps_taken(&self) -> usize {
        self.step
    }
}

impl Iterator for OrbitIter {
    type Item = (Complex64, Complex64);

    fn next(&mut self) -> Option<Self::Item> {
        if self.remaining == 0 {
            return None;
        }
        let n = self.step + 1;
        match iterate_step(&self.params, self.curr, self.prev, self.guard_epsilon) {
            Ok(next) => {
                self.prev = self.curr;
                self.curr = next;
                self.step = n;
                self.remaining -= 1;
                Some((self.prev, self.curr))
            }
            Err(e) => {
                self.status = match e {
                    Error::Overflow { .. } => OrbitStatus::OverflowAtStep(n),
                    _ => OrbitStatus::UndefinedAtStep(n),
                };
                self.remaining = 0;
                None
            }
        }
    }
}

/// Iterates the map from `(z_{-1}, z_0)`. Termination on the forbidden set or
/// overflow is recorded in the status; the stored points are always finite.
pub fn generate_orbit(params: &MapParameters, spec: &OrbitSpec) -> Result<Orbit> {
    spec.validate()?;
    let mut points = Vec::with_capacity(spec.n_iterations + 2);
    points.push(spec.z_minus1);
    points.push(spec.z0);
    let mut iter = OrbitIter::new(*params, spec);
    points.extend(iter.by_ref().map(|(_, z)| z));
    Ok(Orbit {
        points,
        status: iter.status(),
    })
}

/// The two equilibria. `nonzero` is `None` when `beta = 0`, where only the
/// zero equilibrium exists (for `alpha != 1`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Equilibria {
    pub zero: Complex64,
    pub nonzero: Option<Complex64>,
}

/// `0` and `(alpha - 1) / beta`.
pub fn equilibria(params: &MapParameters) -> Result<Equilibria> {
    let zero = Complex64::new(0.0, 0.0);
    if params.require_beta().is_err() {
        return Ok(Equilibria {
            zero,
            nonzero: None,
        });
    }
    // 1 + beta * (alpha - 1) / beta == alpha
    if params.alpha.norm() <= DEFAULT_GUARD_EPSILON {
        return Err(Error::Degenerate(
            "alpha = 0 puts (alpha - 1)/beta on the forbidden set".into(),
        ));
    }
    Ok(Equilibria {
        zero,
        nonzero: Some((params.alpha - 1.0) / params.beta),
    })
}

/// Result of the trap-ball radius computation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TrapBall {
    /// Any `eps <= radius` gives an invariant disc `B(0, eps)`. The
    /// `hypothesis_holds` flag records whether `|alpha| < 1` and `|beta| < 1`
    /// as in the classical statement; the radius bound itself needs only
    /// `|alpha| < 1`.
    Radius { radius: f64, hypothesis_holds: bool },
    NotApplicable { alpha_modulus: f64, beta_modulus: f64 },
}

impl TrapBall {
    pub fn radius(&self) -> Option<f64> {
        match self {
            TrapBall::Radius { radius, .. } => Some(*radius),
            TrapBall::NotApplicable { .. } => None,
        }
    }
}

/// `(1 - |alpha|) / |beta|` when `|alpha| < 1` and `beta != 0`.
pub fn trap_ball_radius(params: &MapParameters) -> TrapBall {
    let a = params.alpha.norm();
    let b = params.beta.norm();
    if a < 1.0 && b > 0.0 {
        TrapBall::Radius {
            radius: (1.0 - a) / b,
            hypothesis_holds: b < 1.0,
        }
    } else {
        TrapBall::NotApplicable {
            alpha_modulus: a,
            beta_modulus: b,
        }
    }
}
