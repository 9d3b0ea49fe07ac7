//! Largest Lyapunov exponent by tangent-map propagation.
//!
//! A tangent vector `w` in `C^2` is pushed through the exact one-step
//! Jacobian
//!
//! ```text
//! J(u, v) = [[0, 1], [-alpha beta v / (1 + beta u)^2, alpha / (1 + beta u)]]
//! ```
//!
//! along the orbit and renormalised every `renorm_interval` steps; the mean of
//! the accumulated log-norms is the exponent in nats per iteration. Norms are
//! the Euclidean norm of the realified 4-vector, i.e. `sqrt(|w0|^2 + |w1|^2)`.

use crate::error::{Error, Result};
use crate::map::{MapParameters, OrbitIter, OrbitSpec, OVERFLOW_CEILING};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub type Matrix2 = [[Complex64; 2]; 2];

/// Post-transient steps required by [`largest_lyapunov`].
pub const MIN_LYAPUNOV_STEPS: usize = 10_000;
pub const DEFAULT_CHAOS_TOL: f64 = 1e-3;

/// Exact Jacobian of `(u, v) -> (v, alpha v / (1 + beta u))` with
/// `u = z_prev`, `v = z_curr`.
pub fn tangent_jacobian(
    params: &MapParameters,
    z_curr: Complex64,
    z_prev: Complex64,
    guard_epsilon: f64,
) -> Result<Matrix2> {
    let d = 1.0 + params.beta * z_prev;
    if !(d.norm() > guard_epsilon) {
        return Err(Error::Degenerate("tangent map evaluated on the forbidden set".into()));
    }
    let zero = Complex64::new(0.0, 0.0);
    let one = Complex64::new(1.0, 0.0);
    Ok([
        [zero, one],
        [-params.alpha * params.beta * z_curr / (d * d), params.alpha / d],
    ])
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LyapunovOptions {
    pub renorm_interval: usize,
    pub chaos_tol: f64,
    /// Starting tangent direction; only its direction matters.
    pub initial_tangent: [Complex64; 2],
}

impl Default for LyapunovOptions {
    fn default() -> Self {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        Self {
            renorm_interval: 1,
            chaos_tol: DEFAULT_CHAOS_TOL,
            initial_tangent: [Complex64::new(h, 0.0), Complex64::new(h, 0.0)],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum LyapunovVerdict {
    Chaotic,
    NonChaotic,
    Inconclusive,
}

impl LyapunovVerdict {
    pub fn from_exponent(lambda: f64, chaos_tol: f64) -> Self {
        if lambda > chaos_tol {
            LyapunovVerdict::Chaotic
        } else if lambda < -chaos_tol {
            LyapunovVerdict::NonChaotic
        } else {
            LyapunovVerdict::Inconclusive
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LyapunovReport {
    /// Nats per iteration.
    pub lambda_max: f64,
    pub n_used: usize,
    pub renorm_interval: usize,
    /// Estimate after each renormalisation; the last entry is `lambda_max`.
    pub running_estimates: Vec<f64>,
    pub verdict: LyapunovVerdict,
    /// Largest `|z_n|` seen while accumulating.
    pub max_modulus: f64,
}

fn tangent_norm(w: &[Complex64; 2]) -> f64 {
    (w[0].norm_sqr() + w[1].norm_sqr()).sqrt()
}

/// Accumulates the exponent over `steps` iterations starting from the state
/// `(z_prev, z_curr)`. Fails if the orbit leaves the good set or overflows.
pub fn lyapunov_from_state(
    params: &MapParameters,
    z_prev: Complex64,
    z_curr: Complex64,
    steps: usize,
    guard_epsilon: f64,
    opts: &LyapunovOptions,
) -> Result<LyapunovReport> {
    if steps == 0 || opts.renorm_interval == 0 {
        return Err(Error::InvalidInput(
            "steps and renorm_interval must be positive".into(),
        ));
    }
    let mut w = opts.initial_tangent;
    let w_norm = tangent_norm(&w);
    if !(w_norm > 0.0 && w_norm.is_finite()) {
        return Err(Error::InvalidInput("initial tangent must be a nonzero finite vector".into()));
    }
    w[0] /= w_norm;
    w[1] /= w_norm;

    let MapParameters { alpha, beta } = *params;
    let (mut u, mut v) = (z_prev, z_curr);
    let mut log_growth = 0.0;
    let mut max_modulus = v.norm();
    let mut running = Vec::with_capacity(steps / opts.renorm_interval + 1);
    let terminated = |status: String| Error::OrbitTerminated {
        status,
        needed: steps,
    };

    for n in 1..=steps {
        let d = 1.0 + beta * u;
        if !(d.norm() > guard_epsilon) {
            return Err(terminated(format!("UndefinedAtStep({n})")));
        }
        let g = alpha / d;
        let next = g * v;
        let modulus = next.norm();
        if !(modulus <= OVERFLOW_CEILING) {
            return Err(terminated(format!("OverflowAtStep({n})")));
        }
        let j10 = -g * beta * v / d;
        w = [w[1], j10 * w[0] + g * w[1]];
        u = v;
        v = next;
        max_modulus = max_modulus.max(modulus);

        // Long renormalisation intervals can push the tangent toward underflow
        // or overflow; an unscheduled rescale keeps it representable without
        // changing the accumulated growth.
        let sq = w[0].norm_sqr() + w[1].norm_sqr();
        if !(1e-200..=1e200).contains(&sq) && sq > 0.0 && sq.is_finite() {
            let norm = sq.sqrt();
            log_growth += norm.ln();
            w[0] /= norm;
            w[1] /= norm;
        }

        if n % opts.renorm_interval == 0 || n == steps {
            let norm = tangent_norm(&w);
            if !(norm > 0.0 && norm.is_finite()) {
                return Err(Error::TangentCollapsed { step: n });
            }
            log_growth += norm.ln();
            w[0] /= norm;
            w[1] /= norm;
            running.push(log_growth / n as f64);
        }
    }

    let lambda_max = log_growth / steps as f64;
    Ok(LyapunovReport {
        lambda_max,
        n_used: steps,
        renorm_interval: opts.renorm_interval,
        running_estimates: running,
        verdict: LyapunovVerdict::from_exponent(lambda_max, opts.chaos_tol),
        max_modulus,
    })
}

/// Runs `spec.transient` plain steps, then accumulates the exponent over the
/// remaining `spec.n_iterations - spec.transient` steps.
pub fn largest_lyapunov(
    params: &MapParameters,
    spec: &OrbitSpec,
    opts: &LyapunovOptions,
) -> Result<LyapunovReport> {
    spec.validate()?;
    let steps = spec.n_iterations - spec.transient;
    if steps < MIN_LYAPUNOV_STEPS {
        return Err(Error::InvalidInput(format!(
            "need at least {MIN_LYAPUNOV_STEPS} post-transient steps, got {steps}"
        )));
    }
    let mut iter = OrbitIter::new(*params, spec);
    let taken = iter.by_ref().take(spec.transient).count();
    if taken < spec.transient {
        return Err(Error::OrbitTerminated {
            status: iter.status().to_string(),
            needed: spec.n_iterations,
        });
    }
    let (prev, curr) = iter.state();
    lyapunov_from_state(params, prev, curr, steps, spec.guard_epsilon, opts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::map::DEFAULT_GUARD_EPSILON;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn jacobian_at_zero_equilibrium() {
        let p = MapParameters::new(c(0.3, -0.7), c(2.0, 3.0));
        let j = tangent_jacobian(&p, c(0.0, 0.0), c(0.0, 0.0), DEFAULT_GUARD_EPSILON).unwrap();
        assert_eq!(j, [[c(0.0, 0.0), c(1.0, 0.0)], [c(0.0, 0.0), p.alpha]]);
    }

    #[test]
    fn jacobian_is_linear_map_for_zero_beta() {
        let p = MapParameters::new(c(0.3, -0.7), c(0.0, 0.0));
        for z in [c(1.0, 2.0), c(-5.0, 0.1)] {
            let j = tangent_jacobian(&p, z, z * 0.5, DEFAULT_GUARD_EPSILON).unwrap();
            assert_eq!(j[1][0].norm(), 0.0);
            assert_eq!(j[1][1], p.alpha);
            assert_eq!(j[0], [c(0.0, 0.0), c(1.0, 0.0)]);
        }
    }

    #[test]
    fn jacobian_matches_central_differences() {
        let p = MapParameters::new(c(0.0, 1.0), c(2.0, 3.0));
        let zbar = (p.alpha - 1.0) / p.beta;
        let j = tangent_jacobian(&p, zbar, zbar, DEFAULT_GUARD_EPSILON).unwrap();
        let h = 1e-6;
        // Holomorphic in each argument, so a real-direction difference suffices.
        let d_prev = (p.apply(zbar, zbar + h) - p.apply(zbar, zbar - h)) / (2.0 * h);
        let d_curr = (p.apply(zbar + h, zbar) - p.apply(zbar - h, zbar)) / (2.0 * h);
        assert!((d_prev - j[1][0]).norm() < 1e-6 * j[1][0].norm());
        assert!((d_curr - j[1][1]).norm() < 1e-6 * j[1][1].norm());
    }

    #[test]
    fn forbidden_jacobian_is_degenerate() {
        let p = MapParameters::new(c(1.0, 0.0), c(1.0, 0.0));
        assert!(tangent_jacobian(&p, c(1.0, 0.0), c(-1.0, 0.0), DEFAULT_GUARD_EPSILON).is_err());
    }

    #[test]
    fn contracting_map_gives_log_alpha() {
        let p = MapParameters::new(c(0.5, 0.0), c(0.5, 0.0));
        let spec = OrbitSpec::new(c(0.1, 0.05), c(-0.2, 0.1), 20_000).with_transient(1000);
        let r = largest_lyapunov(&p, &spec, &LyapunovOptions::default()).unwrap();
        assert!((r.lambda_max - 0.5f64.ln()).abs() < 0.01, "{}", r.lambda_max);
        assert_eq!(r.verdict, LyapunovVerdict::NonChaotic);
        assert_eq!(*r.running_estimates.last().unwrap(), r.lambda_max);
        assert_eq!(r.n_used, 19_000);
    }

    #[test]
    fn too_few_steps_is_rejected() {
        let p = MapParameters::new(c(0.5, 0.0), c(0.5, 0.0));
        let spec = OrbitSpec::new(c(0.1, 0.0), c(0.1, 0.0), 5000);
        assert!(matches!(
            largest_lyapunov(&p, &spec, &LyapunovOptions::default()),
            Err(Error::InvalidInput(_))
        ));
    }

    #[test]
    fn terminating_orbit_is_reported() {
        let p = MapParameters::new(c(5.0, 0.0), c(0.0, 0.0));
        let spec = OrbitSpec::new(c(1.0, 0.0), c(1.0, 0.0), 20_000).with_transient(10);
        assert!(matches!(
            largest_lyapunov(&p, &spec, &LyapunovOptions::default()),
            Err(Error::OrbitTerminated { .. })
        ));
        let p = MapParameters::new(c(0.5, 0.0), c(1.0, 0.0));
        let spec = OrbitSpec::new(c(-1.0, 0.0), c(1.0, 0.0), 20_000);
        assert!(matches!(
            largest_lyapunov(&p, &spec, &LyapunovOptions::default()),
            Err(Error::OrbitTerminated { .. })
        ));
    }

    #[test]
    fn nilpotent_dynamics_collapse_the_tangent() {
        let p = MapParameters::new(c(0.0, 0.0), c(1.0, 0.0));
        let r = lyapunov_from_state(&p, c(0.1, 0.0), c(0.1, 0.0), 100, DEFAULT_GUARD_EPSILON, &LyapunovOptions::default());
        assert!(matches!(r, Err(Error::TangentCollapsed { .. })));
    }

    #[test]
    fn long_renormalisation_interval_survives_strong_contraction() {
        let p = MapParameters::new(c(0.5, 0.0), c(0.5, 0.0));
        let spec = OrbitSpec::new(c(0.02, 0.0), c(0.01, 0.0), 20_000);
        let opts = LyapunovOptions {
            renorm_interval: 5_000,
            ..LyapunovOptions::default()
        };
        let r = largest_lyapunov(&p, &spec, &opts).unwrap();
        assert!((r.lambda_max - 0.5f64.ln()).abs() < 1e-3, "{}", r.lambda_max);
        assert_eq!(r.running_estimates.len(), 4);
    }

    #[test]
    fn renormalisation_interval_and_tangent_scale_do_not_matter() {
        let p = MapParameters::new(c(8.0, 43.0), c(1.0, 0.0));
        let spec = OrbitSpec::new(c(0.3, 0.1), c(-0.2, 0.4), 21_000).with_transient(1000);
        let base = largest_lyapunov(&p, &spec, &LyapunovOptions::default()).unwrap();
        let every10 = LyapunovOptions { renorm_interval: 10, ..Default::default() };
        let r10 = largest_lyapunov(&p, &spec, &every10).unwrap();
        assert!((base.lambda_max - r10.lambda_max).abs() < 1e-6);
        assert_eq!(r10.running_estimates.len(), 2000);

        let d = LyapunovOptions::default().initial_tangent;
        let scaled = LyapunovOptions { initial_tangent: [d[0] * 10.0, d[1] * 10.0], ..Default::default() };
        let rs = largest_lyapunov(&p, &spec, &scaled).unwrap();
        assert!((base.lambda_max - rs.lambda_max).abs() < 1e-12);
    }
}
