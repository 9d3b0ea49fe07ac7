// Independent reference computations used by the integration tests. Nothing here
// calls into the closed forms or the analytic Jacobians of the library.
#![allow(dead_code)]

use delaylog::{Complex64, MapParameters};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform point in the disk of the given radius.
pub fn disk(rng: &mut impl Rng, radius: f64) -> Complex64 {
    let r = radius * rng.random::<f64>().sqrt();
    let t = std::f64::consts::TAU * rng.random::<f64>();
    Complex64::from_polar(r, t)
}

/// Complex number with modulus in `[lo, hi)` and uniform argument.
pub fn annulus(rng: &mut impl Rng, lo: f64, hi: f64) -> Complex64 {
    let r = rng.random_range(lo..hi);
    Complex64::from_polar(r, std::f64::consts::TAU * rng.random::<f64>())
}

/// The map written out directly: `(u, v) -> (v, alpha v / (1 + beta u))`.
pub fn t(p: &MapParameters, u: Complex64, v: Complex64) -> (Complex64, Complex64) {
    (v, p.alpha * v / (1.0 + p.beta * u))
}

pub fn t2(p: &MapParameters, u: Complex64, v: Complex64) -> (Complex64, Complex64) {
    let (a, b) = t(p, u, v);
    t(p, a, b)
}

/// Central-difference Jacobian of `T^2` with respect to `(u, v)`, using a real
/// step (valid because `T^2` is holomorphic in each argument).
pub fn fd_jacobian_t2(p: &MapParameters, u: Complex64, v: Complex64, h: f64) -> [[Complex64; 2]; 2] {
    let (gu_p, hu_p) = t2(p, u + h, v);
    let (gu_m, hu_m) = t2(p, u - h, v);
    let (gv_p, hv_p) = t2(p, u, v + h);
    let (gv_m, hv_m) = t2(p, u, v - h);
    let d = 2.0 * h;
    [
        [(gu_p - gu_m) / d, (gv_p - gv_m) / d],
        [(hu_p - hu_m) / d, (hv_p - hv_m) / d],
    ]
}

/// Fixed points of `T^2` away from the forbidden set satisfy
/// `u (1 + beta u) = alpha v` and `v (1 + beta v) = alpha u`. The cleared form
/// has no poles, which keeps Newton's basins wide.
fn residual4(p: &MapParameters, x: &[f64; 4]) -> Option<[f64; 4]> {
    let (u, v) = (c(x[0], x[1]), c(x[2], x[3]));
    let a = u * (1.0 + p.beta * u) - p.alpha * v;
    let b = v * (1.0 + p.beta * v) - p.alpha * u;
    let r = [a.re, a.im, b.re, b.im];
    r.iter().all(|v| v.is_finite()).then_some(r)
}

fn solve4(mut a: [[f64; 4]; 4], mut b: [f64; 4]) -> Option<[f64; 4]> {
    for col in 0..4 {
        let piv = (col..4).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[piv][col].abs() < 1e-300 {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for row in col + 1..4 {
            let f = a[row][col] / a[col][col];
            let pivot = a[col];
            for (x, p) in a[row].iter_mut().zip(pivot).skip(col) {
                *x -= f * p;
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = [0.0; 4];
    for row in (0..4).rev() {
        let s: f64 = (row + 1..4).map(|k| a[row][k] * x[k]).sum();
        x[row] = (b[row] - s) / a[row][row];
    }
    Some(x)
}

fn norm4(v: &[f64; 4]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn deflated(p: &MapParameters, x: &[f64; 4], known: &[[f64; 4]]) -> Option<[f64; 4]> {
    let f = residual4(p, x)?;
    let m: f64 = known
        .iter()
        .map(|r| {
            let d: [f64; 4] = std::array::from_fn(|i| x[i] - r[i]);
            1.0 + 1.0 / norm4(&d).powi(2)
        })
        .product();
    m.is_finite().then(|| f.map(|v| v * m))
}

/// Newton's method on the realified fixed-point system of `T^2`, deflated at the
/// `known` roots, with a finite-difference Jacobian and backtracking. Returns
/// the root if the undeflated residual converges.
pub fn newton_t2(p: &MapParameters, start: [f64; 4], known: &[[f64; 4]]) -> Option<(Complex64, Complex64)> {
    let mut x = start;
    for _ in 0..60 {
        let f = residual4(p, &x)?;
        if norm4(&f) < 1e-14 * (1.0 + norm4(&x)) {
            return Some((c(x[0], x[1]), c(x[2], x[3])));
        }
        let g = deflated(p, &x, known)?;
        let mut jac = [[0.0; 4]; 4];
        for j in 0..4 {
            let h = 1e-7 * (1.0 + x[j].abs());
            let (mut xp, mut xm) = (x, x);
            xp[j] += h;
            xm[j] -= h;
            let (gp, gm) = (deflated(p, &xp, known)?, deflated(p, &xm, known)?);
            for i in 0..4 {
                jac[i][j] = (gp[i] - gm[i]) / (2.0 * h);
            }
        }
        let dx = solve4(jac, g.map(|v| -v))?;
        // backtrack until the deflated residual decreases
        let gnorm = norm4(&g);
        let mut step = 1.0;
        loop {
            let trial: [f64; 4] = std::array::from_fn(|i| x[i] + step * dx[i]);
            if deflated(p, &trial, known).is_some_and(|r| norm4(&r) < gnorm) || step < 1e-4 {
                x = trial;
                break;
            }
            step *= 0.5;
        }
        if norm4(&x) > 1e8 {
            return None;
        }
    }
    None
}

/// Distinct non-equilibrium fixed points of `T^2` found by deflated Newton
/// from `n_starts` random starts in a box of half-width `radius`.
pub fn brute_force_t2_cycles(
    p: &MapParameters,
    rng: &mut impl Rng,
    n_starts: usize,
    radius: f64,
) -> Vec<(Complex64, Complex64)> {
    // the equilibria solve z = alpha z / (1 + beta z)
    let zbar = (p.alpha - 1.0) / p.beta;
    let mut known = vec![[0.0; 4], [zbar.re, zbar.im, zbar.re, zbar.im]];
    let mut found: Vec<(Complex64, Complex64)> = Vec::new();
    for _ in 0..n_starts {
        // starts at several scales, down to a hundredth of `radius`
        let r = radius * 10f64.powf(-2.0 * rng.random::<f64>());
        let start = [(); 4].map(|_| rng.random_range(-r..r));
        let Some((u, v)) = newton_t2(p, start, &known) else { continue };
        let scale = 1.0 + u.norm().max(v.norm());
        let (a, b) = t2(p, u, v);
        if !((a - u).norm() < 1e-9 * scale && (b - v).norm() < 1e-9 * scale) {
            continue;
        }
        // fixed points of T itself have u == v and u == T-image
        let (_, tv) = t(p, u, v);
        if (u - v).norm() < 1e-6 * scale && (tv - v).norm() < 1e-6 * scale {
            continue;
        }
        if !found
            .iter()
            .any(|&(a, b)| (a - u).norm() < 1e-6 * scale && (b - v).norm() < 1e-6 * scale)
        {
            found.push((u, v));
            known.push([u.re, u.im, v.re, v.im]);
        }
        // the cleared system has at most four solutions, two of them equilibria
        if found.len() == 2 {
            break;
        }
    }
    found
}
