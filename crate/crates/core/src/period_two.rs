//! Prime-period-2 cycles in closed form and their stability.
//!
//! Writing the map as `T(u, v) = (v, alpha v / (1 + beta u))` with
//! `u = z_{n-1}`, `v = z_n`, a 2-cycle `phi, psi, phi, ...` is a fixed point
//! `(phi, psi)` of `T^2(u, v) = (g(u, v), h(u, v))` where
//!
//! ```text
//! g(u, v) = alpha v / (1 + beta u)
//! h(u, v) = alpha^2 v / ((1 + beta u)(1 + beta v))
//! ```
//!
//! Eliminating one unknown gives
//! `phi, psi = ((-1/2 - alpha/2) beta -/+ sqrt((1 - 2 alpha - 3 alpha^2) beta^2) / 2) / beta^2`.

use crate::error::{Error, Result};
use crate::map::{MapParameters, DEFAULT_GUARD_EPSILON};
use crate::stability::{classify_moduli, quadratic_roots, Classification};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Relative tolerance for "this cycle point is really an equilibrium".
pub const EQUILIBRIUM_REJECT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Branch {
    /// `phi` takes the minus sign in front of the square root.
    MinusPlus,
    PlusMinus,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PeriodTwoCycle {
    pub phi: Complex64,
    pub psi: Complex64,
    pub branch: Branch,
}

impl PeriodTwoCycle {
    /// Largest defect of `phi = alpha psi/(1 + beta phi)` and
    /// `psi = alpha phi/(1 + beta psi)`.
    pub fn residual(&self, params: &MapParameters) -> f64 {
        let a = (params.apply(self.psi, self.phi) - self.phi).norm();
        let b = (params.apply(self.phi, self.psi) - self.psi).norm();
        a.max(b)
    }
}

/// Why no prime-period-2 cycle is reported.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoCycleReason {
    /// `1 - 2 alpha - 3 alpha^2 = 0`, so `phi = psi`.
    VanishingDiscriminant,
    CoincidesWithEquilibrium,
    OnForbiddenSet,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PeriodTwo {
    Cycles { cycles: [PeriodTwoCycle; 2] },
    NoneExists { reason: NoCycleReason },
}

impl PeriodTwo {
    pub fn cycles(&self) -> Option<&[PeriodTwoCycle; 2]> {
        match self {
            PeriodTwo::Cycles { cycles } => Some(cycles),
            PeriodTwo::NoneExists { .. } => None,
        }
    }
}

/// `1 + (-2 - 3 alpha) alpha`.
pub fn period_two_discriminant(alpha: Complex64) -> Complex64 {
    1.0 + (-2.0 - 3.0 * alpha) * alpha
}

fn close(a: Complex64, b: Complex64) -> bool {
    (a - b).norm() <= EQUILIBRIUM_REJECT_TOL * (1.0 + a.norm() + b.norm())
}

/// Both branches of the closed-form 2-cycle.
pub fn period_two_cycles(params: &MapParameters) -> Result<PeriodTwo> {
    params.require_beta()?;
    let MapParameters { alpha, beta } = *params;

    let disc = period_two_discriminant(alpha);
    if disc.norm() <= EQUILIBRIUM_REJECT_TOL * (1.0 + 2.0 * alpha.norm() + 3.0 * alpha.norm_sqr()) {
        return Ok(PeriodTwo::NoneExists {
            reason: NoCycleReason::VanishingDiscriminant,
        });
    }

    let b2 = beta * beta;
    let centre = (-0.5 - 0.5 * alpha) * beta;
    let half_root = 0.5 * (disc * b2).sqrt();
    let minus = (centre - half_root) / b2;
    let plus = (centre + half_root) / b2;

    let nonzero_eq = (alpha - 1.0) / beta;
    for z in [minus, plus] {
        if close(z, Complex64::new(0.0, 0.0)) || close(z, nonzero_eq) || close(minus, plus) {
            return Ok(PeriodTwo::NoneExists {
                reason: NoCycleReason::CoincidesWithEquilibrium,
            });
        }
        if (1.0 + beta * z).norm() <= DEFAULT_GUARD_EPSILON {
            return Ok(PeriodTwo::NoneExists {
                reason: NoCycleReason::OnForbiddenSet,
            });
        }
    }

    Ok(PeriodTwo::Cycles {
        cycles: [
            PeriodTwoCycle {
                phi: minus,
                psi: plus,
                branch: Branch::MinusPlus,
            },
            PeriodTwoCycle {
                phi: plus,
                psi: minus,
                branch: Branch::PlusMinus,
            },
        ],
    })
}

/// Jacobian of `T^2` at `(phi, psi)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JacobianT2 {
    pub g_u: Complex64,
    pub g_v: Complex64,
    pub h_u: Complex64,
    pub h_v: Complex64,
    /// Trace.
    pub chi: Complex64,
    /// Determinant.
    pub lambda_det: Complex64,
    /// Roots of `mu^2 - chi mu + lambda_det`, larger modulus first.
    pub eigenvalues: [Complex64; 2],
}

impl JacobianT2 {
    pub fn from_entries(g_u: Complex64, g_v: Complex64, h_u: Complex64, h_v: Complex64) -> Self {
        let chi = g_u + h_v;
        let lambda_det = g_u * h_v - g_v * h_u;
        Self {
            g_u,
            g_v,
            h_u,
            h_v,
            chi,
            lambda_det,
            eigenvalues: quadratic_roots(-chi, lambda_det),
        }
    }

    pub fn matrix(&self) -> [[Complex64; 2]; 2] {
        [[self.g_u, self.g_v], [self.h_u, self.h_v]]
    }
}

pub fn jacobian_t2(params: &MapParameters, cycle: &PeriodTwoCycle) -> Result<JacobianT2> {
    let MapParameters { alpha, beta } = *params;
    let (phi, psi) = (cycle.phi, cycle.psi);
    let dp = 1.0 + beta * phi;
    let ds = 1.0 + beta * psi;
    if dp.norm() <= DEFAULT_GUARD_EPSILON || ds.norm() <= DEFAULT_GUARD_EPSILON {
        return Err(Error::Degenerate("cycle point on the forbidden set".into()));
    }
    let a2 = alpha * alpha;
    let g_u = -alpha * beta * psi / (dp * dp);
    let g_v = alpha / dp;
    let h_u = -a2 * beta * psi / (dp * dp * ds);
    let h_v = -a2 * beta * psi / (dp * ds * ds) + a2 / (dp * ds);
    Ok(JacobianT2::from_entries(g_u, g_v, h_u, h_v))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PeriodTwoStability {
    pub chi_modulus: f64,
    pub lambda_det_modulus: f64,
    /// `|chi| < 1 + |lambda_det| < 2`: stable, otherwise unstable.
    pub paper_verdict: Classification,
    pub eigenvalue_moduli: [f64; 2],
    /// Authoritative verdict from the eigenvalue moduli.
    pub eigen_verdict: Classification,
    pub agreement_flag: bool,
}

pub fn period_two_stability(jac: &JacobianT2, tol_hyp: f64) -> PeriodTwoStability {
    let chi_modulus = jac.chi.norm();
    let lambda_det_modulus = jac.lambda_det.norm();
    let paper_verdict = if chi_modulus < 1.0 + lambda_det_modulus && 1.0 + lambda_det_modulus < 2.0 {
        Classification::LocallyAsymptoticallyStable
    } else {
        Classification::Unstable
    };
    let eigenvalue_moduli = [jac.eigenvalues[0].norm(), jac.eigenvalues[1].norm()];
    let eigen_verdict = classify_moduli(&eigenvalue_moduli, tol_hyp);
    PeriodTwoStability {
        chi_modulus,
        lambda_det_modulus,
        paper_verdict,
        eigenvalue_moduli,
        eigen_verdict,
        agreement_flag: paper_verdict == eigen_verdict,
    }
}

/// Everything the `period2` command reports for one cycle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PeriodTwoReport {
    pub cycle: PeriodTwoCycle,
    pub residual: f64,
    pub jacobian: JacobianT2,
    pub stability: PeriodTwoStability,
}

pub fn period_two_reports(params: &MapParameters, tol_hyp: f64) -> Result<Vec<PeriodTwoReport>> {
    let Some(cycles) = period_two_cycles(params)?.cycles().copied() else {
        return Ok(Vec::new());
    };
    cycles
        .iter()
        .map(|cycle| {
            let jacobian = jacobian_t2(params, cycle)?;
            Ok(PeriodTwoReport {
                cycle: *cycle,
                residual: cycle.residual(params),
                jacobian,
                stability: period_two_stability(&jacobian, tol_hyp),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stability::DEFAULT_TOL_HYP;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn cycles(alpha: Complex64, beta: Complex64) -> [PeriodTwoCycle; 2] {
        *period_two_cycles(&MapParameters::new(alpha, beta))
            .unwrap()
            .cycles()
            .expect("cycle exists")
    }

    #[test]
    fn closed_form_for_alpha_i() {
        let [a, b] = cycles(c(0.0, 1.0), c(2.0, 3.0));
        assert!((a.phi - c(-0.294567, 0.313317)).norm() < 1e-5);
        assert!((a.psi - c(-0.0900486, -0.236394)).norm() < 1e-5);
        assert_eq!((b.phi, b.psi), (a.psi, a.phi));
        assert_eq!((a.branch, b.branch), (Branch::MinusPlus, Branch::PlusMinus));
    }

    #[test]
    fn closed_form_for_alpha_one_plus_i() {
        let [a, _] = cycles(c(1.0, 1.0), c(2.0, 3.0));
        assert!((a.phi - c(-0.168166, 0.534411)).norm() < 1e-5);
        assert!((a.psi - c(-0.370295, -0.226718)).norm() < 1e-5);
    }

    #[test]
    fn vanishing_discriminant_has_no_prime_cycle() {
        // 3 alpha^2 + 2 alpha - 1 = (3 alpha - 1)(alpha + 1)
        for alpha in [c(1.0 / 3.0, 0.0), c(-1.0, 0.0)] {
            assert!(period_two_discriminant(alpha).norm() < 1e-15);
            let r = period_two_cycles(&MapParameters::new(alpha, c(2.0, 3.0))).unwrap();
            assert_eq!(
                r,
                PeriodTwo::NoneExists {
                    reason: NoCycleReason::VanishingDiscriminant
                }
            );
        }
    }

    #[test]
    fn zero_beta_is_degenerate() {
        assert!(matches!(
            period_two_cycles(&MapParameters::new(c(0.3, 0.0), c(0.0, 0.0))),
            Err(Error::Degenerate(_))
        ));
    }

    #[test]
    fn alpha_zero_cycle_hits_the_forbidden_set() {
        // alpha = 0: phi, psi = (-1 -/+ 1)/(2 beta) = {-1/beta, 0}.
        let r = period_two_cycles(&MapParameters::new(c(0.0, 0.0), c(2.0, 0.0))).unwrap();
        assert!(r.cycles().is_none());
    }

    #[test]
    fn jacobian_moduli_for_alpha_one_plus_i() {
        let p = MapParameters::new(c(1.0, 1.0), c(2.0, 3.0));
        let [cyc, _] = cycles(p.alpha, p.beta);
        let jac = jacobian_t2(&p, &cyc).unwrap();
        assert!((jac.chi.norm() - 1.5).abs() < 1e-4);
        assert!((jac.lambda_det.norm() - 1.58114).abs() < 1e-4);
        let st = period_two_stability(&jac, DEFAULT_TOL_HYP);
        assert_eq!(st.paper_verdict, Classification::Unstable);
        assert_eq!(st.eigen_verdict, Classification::Unstable);
    }

    #[test]
    fn jacobian_moduli_for_alpha_i() {
        // The entries give |chi| = sqrt(5), |det| = sqrt(2), eigenvalue moduli sqrt(2) and 1.
        let p = MapParameters::new(c(0.0, 1.0), c(2.0, 3.0));
        let [cyc, _] = cycles(p.alpha, p.beta);
        let jac = jacobian_t2(&p, &cyc).unwrap();
        assert!((jac.chi.norm() - 5f64.sqrt()).abs() < 1e-12);
        assert!((jac.lambda_det.norm() - 2f64.sqrt()).abs() < 1e-12);
        let st = period_two_stability(&jac, DEFAULT_TOL_HYP);
        assert!((st.eigenvalue_moduli[0] - 2f64.sqrt()).abs() < 1e-12);
        assert!((st.eigenvalue_moduli[1] - 1.0).abs() < 1e-12);
        assert_eq!(st.eigen_verdict, Classification::Unstable);
    }

    #[test]
    fn determinant_matches_product_form() {
        // det J_{T^2} = alpha^3 beta^2 psi^2 / ((1 + beta phi)^3 (1 + beta psi)^2)
        let p = MapParameters::new(c(0.7, -1.3), c(-0.4, 2.2));
        for cyc in cycles(p.alpha, p.beta) {
            let jac = jacobian_t2(&p, &cyc).unwrap();
            let dp = 1.0 + p.beta * cyc.phi;
            let ds = 1.0 + p.beta * cyc.psi;
            let closed = p.alpha.powu(3) * p.beta * p.beta * cyc.psi * cyc.psi / (dp.powu(3) * ds * ds);
            assert!((jac.lambda_det - closed).norm() < 1e-12 * (1.0 + closed.norm()));
        }
    }

    #[test]
    fn nilpotent_jacobian_is_stable() {
        let z = c(0.0, 0.0);
        let jac = JacobianT2::from_entries(z, c(1.0, 0.0), z, z);
        assert_eq!((jac.chi, jac.lambda_det), (z, z));
        let st = period_two_stability(&jac, DEFAULT_TOL_HYP);
        assert_eq!(st.paper_verdict, Classification::LocallyAsymptoticallyStable);
        assert_eq!(st.eigen_verdict, Classification::LocallyAsymptoticallyStable);
        assert!(st.agreement_flag);
    }

    #[test]
    fn real_negative_alpha_has_a_stable_cycle() {
        let p = MapParameters::new(c(-1.5, 0.0), c(1.0, 0.0));
        let reports = period_two_reports(&p, DEFAULT_TOL_HYP).unwrap();
        assert_eq!(reports.len(), 2);
        for r in reports {
            assert_eq!(r.stability.eigen_verdict, Classification::LocallyAsymptoticallyStable);
            assert!(r.residual < 1e-12);
        }
    }
}
