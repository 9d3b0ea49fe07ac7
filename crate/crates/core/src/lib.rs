//! Numerical toolkit for the complex delay logistic map
//!
//! ```text
//! z_{n+1} = alpha z_n / (1 + beta z_{n-1}),   alpha, beta, z_{-1}, z_0 in C
//! ```
//!
//! * [`map`]: guarded iteration, orbits, equilibria, trap-ball radius.
//! * [`stability`]: characteristic polynomials and root classification.
//! * [`period_two`]: closed-form 2-cycles and the Jacobian of `T^2`.
//! * [`cycle`]: periodicity detection, Newton refinement, point classification.
//! * [`lyapunov`]: largest Lyapunov exponent by tangent propagation.
//! * [`sweep`], [`io`], [`recipes`]: parameter sweeps, file formats, and
//!   canned reproduction runs.

// `!(x > tol)` is used on purpose so that NaN fails the check.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cycle;
pub mod error;
pub mod io;
pub mod lyapunov;
pub mod map;
pub mod parse;
pub mod period_two;
pub mod recipes;
pub mod rng;
pub mod stability;
pub mod sweep;

pub use error::{Error, Result};
pub use map::{
    equilibria, generate_orbit, iterate_step, trap_ball_radius, MapParameters, Orbit, OrbitSpec,
    OrbitStatus,
};
pub use num_complex::Complex64;
pub use parse::{format_complex, parse_complex};
