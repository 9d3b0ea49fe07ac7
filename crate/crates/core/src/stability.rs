//! Linearised stability of the two equilibria.
//!
//! About an equilibrium the map linearises to `z' = a0 z_n + a1 z_{n-1}` with
//! characteristic polynomial `lambda^2 - a0 lambda - a1`. For the zero
//! equilibrium this is `lambda^2 - alpha lambda`; for `(alpha - 1)/beta` it is
//! `lambda^2 - lambda + (alpha - 1)/alpha`, independent of `beta`.
//!
//! Root moduli decide the classification. The textbook modulus bands on
//! `|alpha|` are carried alongside as a cross-check, since for the nonzero
//! equilibrium they do not agree with the roots in general.

use crate::error::{Error, Result};
use crate::map::{equilibria, MapParameters};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Default half-width of the band around `|root| = 1` treated as non-hyperbolic.
pub const DEFAULT_TOL_HYP: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Classification {
    LocallyAsymptoticallyStable,
    Unstable,
    NonHyperbolic,
}

/// Monic `lambda^2 + c1 lambda + c0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CharacteristicPoly {
    pub c1: Complex64,
    pub c0: Complex64,
}

impl CharacteristicPoly {
    pub fn new(c1: Complex64, c0: Complex64) -> Self {
        Self { c1, c0 }
    }

    pub fn eval(&self, x: Complex64) -> Complex64 {
        (x + self.c1) * x + self.c0
    }

    /// Roots, larger modulus first.
    pub fn roots(&self) -> [Complex64; 2] {
        quadratic_roots(self.c1, self.c0)
    }
}

/// Roots of `x^2 + c1 x + c0`, larger modulus first.
///
/// Uses `q = -(c1 + s sqrt(c1^2 - 4 c0)) / 2` with the sign `s` that avoids
/// cancellation, and recovers the companion root as `c0 / q`.
pub(crate) fn quadratic_roots(c1: Complex64, c0: Complex64) -> [Complex64; 2] {
    let sq = (c1 * c1 - 4.0 * c0).sqrt();
    let s = if (c1.conj() * sq).re >= 0.0 { 1.0 } else { -1.0 };
    let q = -(c1 + s * sq) / 2.0;
    if q == Complex64::new(0.0, 0.0) {
        // Only possible when c1 = 0 and c1^2 = 4 c0, i.e. a double root at 0.
        return [q, q];
    }
    [q, c0 / q]
}

/// `lambda^2 - alpha lambda` for the zero equilibrium.
pub fn char_poly_zero_eq(params: &MapParameters) -> CharacteristicPoly {
    CharacteristicPoly::new(-params.alpha, Complex64::new(0.0, 0.0))
}

/// `lambda^2 - lambda + (alpha - 1)/alpha` for the nonzero equilibrium.
pub fn char_poly_nonzero_eq(params: &MapParameters) -> Result<CharacteristicPoly> {
    if params.alpha == Complex64::new(0.0, 0.0) {
        return Err(Error::Degenerate(
            "alpha = 0: the nonzero equilibrium lies on the forbidden set".into(),
        ));
    }
    Ok(CharacteristicPoly::new(
        Complex64::new(-1.0, 0.0),
        (params.alpha - 1.0) / params.alpha,
    ))
}

/// Roots and the verdict they imply.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RootVerdict {
    pub roots: [Complex64; 2],
    pub root_moduli: [f64; 2],
    pub classification: Classification,
}

/// Classifies a set of moduli: unstable if any exceeds `1 + tol_hyp`,
/// non-hyperbolic if any lies within `tol_hyp` of 1, stable otherwise.
pub fn classify_moduli(moduli: &[f64], tol_hyp: f64) -> Classification {
    if moduli.iter().any(|&m| m > 1.0 + tol_hyp) {
        Classification::Unstable
    } else if moduli.iter().any(|&m| (m - 1.0).abs() <= tol_hyp) {
        Classification::NonHyperbolic
    } else {
        Classification::LocallyAsymptoticallyStable
    }
}

pub fn classify(poly: &CharacteristicPoly, tol_hyp: f64) -> RootVerdict {
    let roots = poly.roots();
    let root_moduli = [roots[0].norm(), roots[1].norm()];
    RootVerdict {
        roots,
        root_moduli,
        classification: classify_moduli(&root_moduli, tol_hyp),
    }
}

/// The `|alpha|` trichotomy for the zero equilibrium: stable below 1,
/// non-hyperbolic at 1, unstable above.
pub fn paper_criterion_z1(params: &MapParameters, tol_hyp: f64) -> Classification {
    classify_moduli(&[params.alpha.norm()], tol_hyp)
}

/// Modulus bands for the nonzero equilibrium: stable for
/// `1/3 <= |alpha| <= 4/3`, unstable for `0 < |alpha| < 1/3`, no verdict above
/// `4/3` or at `alpha = 0`.
pub fn paper_criterion_z2(params: &MapParameters) -> Option<Classification> {
    let a = params.alpha.norm();
    if a > 0.0 && a < 1.0 / 3.0 {
        Some(Classification::Unstable)
    } else if (1.0 / 3.0..=4.0 / 3.0).contains(&a) {
        Some(Classification::LocallyAsymptoticallyStable)
    } else {
        None
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Which {
    Zero,
    Nonzero,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilityReport {
    pub which: Which,
    pub equilibrium: Complex64,
    pub polynomial: CharacteristicPoly,
    pub roots: [Complex64; 2],
    pub root_moduli: [f64; 2],
    pub classification: Classification,
    pub paper_criterion_verdict: Option<Classification>,
    /// `true` when the modulus-band verdict exists and matches the roots.
    pub agreement_flag: bool,
}

impl StabilityReport {
    fn assemble(
        which: Which,
        equilibrium: Complex64,
        polynomial: CharacteristicPoly,
        paper: Option<Classification>,
        tol_hyp: f64,
    ) -> Self {
        let v = classify(&polynomial, tol_hyp);
        Self {
            which,
            equilibrium,
            polynomial,
            roots: v.roots,
            root_moduli: v.root_moduli,
            classification: v.classification,
            paper_criterion_verdict: paper,
            agreement_flag: paper == Some(v.classification),
        }
    }
}

pub fn zero_equilibrium_report(params: &MapParameters, tol_hyp: f64) -> StabilityReport {
    StabilityReport::assemble(
        Which::Zero,
        Complex64::new(0.0, 0.0),
        char_poly_zero_eq(params),
        Some(paper_criterion_z1(params, tol_hyp)),
        tol_hyp,
    )
}

pub fn nonzero_equilibrium_report(params: &MapParameters, tol_hyp: f64) -> Result<StabilityReport> {
    let eq = equilibria(params)?
        .nonzero
        .ok_or_else(|| Error::Degenerate("beta = 0: no nonzero equilibrium".into()))?;
    Ok(StabilityReport::assemble(
        Which::Nonzero,
        eq,
        char_poly_nonzero_eq(params)?,
        paper_criterion_z2(params),
        tol_hyp,
    ))
}

/// Reports for every equilibrium that exists.
pub fn stability_reports(params: &MapParameters, tol_hyp: f64) -> Result<Vec<StabilityReport>> {
    let mut out = vec![zero_equilibrium_report(params, tol_hyp)];
    if params.beta != Complex64::new(0.0, 0.0) {
        out.push(nonzero_equilibrium_report(params, tol_hyp)?);
    }
    Ok(out)
}
