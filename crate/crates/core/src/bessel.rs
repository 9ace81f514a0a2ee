//! Integer-order Bessel functions and their generalisation `J̃_k`.
//!
//! Two conventions meet here. [`bessel_j`] and [`bessel_j_integral`] take the
//! classical argument: `J_k(x) = (1/2π) ∫₀^{2π} cos(k t - x sin t) dt`.
//! Everything used as a tongue-boundary prediction takes a positive `z`
//! (normally `z = b/μ`) and returns the value at `-z`:
//! [`bessel_j_at_neg`], [`gen_bessel`], [`bessel_asymptotic`],
//! [`gen_bessel_asymptotic`]. For `g = cos`,
//! `J̃_k(-z) = (1/2π) ∫ cos(k t + z sin t) dt = J_k(-z)`.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI, TAU};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::forcing::ForcingProfile;
use crate::quadrature::integrate_adaptive;

/// Absolute target of the quadrature routes.
pub const QUAD_TOL: f64 = 1e-12;
const MAX_PANELS: usize = 1 << 18;
/// Smallest argument accepted by the asymptotic forms.
pub const ASYMPTOTIC_MIN_Z: f64 = 5.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Route {
    Series,
    Recurrence,
    Integral,
    Asymptotic,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BesselEval {
    pub k: i64,
    pub z: f64,
    pub value: f64,
    pub route: Route,
    pub est_err: f64,
}

fn parity(n: i64) -> f64 {
    if n % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// `J_k(x)` for integer `k` (classical argument).
pub fn bessel_j(k: i64, x: f64) -> f64 {
    bessel_j_eval(k, x).value
}

/// `J_k(x)` with the route taken and a rough error estimate.
pub fn bessel_j_eval(k: i64, x: f64) -> BesselEval {
    let n = k.unsigned_abs();
    // J_{-n} = (-1)^n J_n and J_n(-x) = (-1)^n J_n(x)
    let mut sign = if k < 0 { parity(k) } else { 1.0 };
    if x < 0.0 {
        sign *= parity(n as i64);
    }
    let ax = x.abs();
    let (value, route, est_err) = if ax == 0.0 {
        (if n == 0 { 1.0 } else { 0.0 }, Route::Series, 0.0)
    } else if ax <= 4.0 || 0.25 * ax * ax < (n + 1) as f64 {
        let v = series(n, ax);
        (v, Route::Series, 1e-15 * (0.5 * ax).exp())
    } else {
        (miller(n, ax), Route::Recurrence, 1e-14)
    };
    BesselEval { k, z: x, value: sign * value, route, est_err }
}

/// `J_k(-z)`.
pub fn bessel_j_at_neg(k: i64, z: f64) -> f64 {
    bessel_j(k, -z)
}

/// Power series `Σ (-1)^m (x/2)^{2m+n} / (m! (m+n)!)`.
fn series(n: u64, x: f64) -> f64 {
    let half = 0.5 * x;
    // leading term (x/2)^n / n!, built in logs to dodge overflow for large n
    let log_lead = n as f64 * half.ln() - ln_factorial(n);
    if log_lead < -745.0 {
        return 0.0;
    }
    let mut term = log_lead.exp();
    let mut sum = term;
    let q = -half * half;
    let mut m = 1u64;
    loop {
        term *= q / (m as f64 * (m + n) as f64);
        sum += term;
        if term.abs() <= 1e-17 * sum.abs() || m > 500 {
            break;
        }
        m += 1;
    }
    sum
}

fn ln_factorial(n: u64) -> f64 {
    (1..=n).map(|i| (i as f64).ln()).sum()
}

/// Miller's backward recurrence normalised by `J₀ + 2 Σ J_{2m} = 1`.
fn miller(n: u64, x: f64) -> f64 {
    let top = (n as f64).max(x);
    let mut start = (top + 20.0 + (40.0 * top).sqrt()) as u64;
    start += start % 2;
    let mut j_next = 0.0; // J_{m+1}
    let mut j_cur = 1e-300; // J_m
    let mut norm = 0.0;
    let mut want = 0.0;
    let mut m = start;
    loop {
        if m == n {
            want = j_cur;
        }
        if m % 2 == 0 {
            norm += if m == 0 { j_cur } else { 2.0 * j_cur };
        }
        if m == 0 {
            break;
        }
        let j_prev = 2.0 * m as f64 / x * j_cur - j_next;
        j_next = j_cur;
        j_cur = j_prev;
        m -= 1;
        if j_cur.abs() > 1e250 {
            j_cur *= 1e-250;
            j_next *= 1e-250;
            norm *= 1e-250;
            want *= 1e-250;
        }
    }
    want / norm
}

/// `J_k(x)` by direct quadrature of `(1/2π) ∫₀^{2π} cos(k t - x sin t) dt`.
pub fn bessel_j_integral(k: i64, x: f64) -> Result<f64> {
    let kf = k as f64;
    let f = |t: f64| (kf * t - x * t.sin()).cos();
    let panels0 = (((k.unsigned_abs() as f64) + x.abs()) / PI).ceil() as usize + 1;
    Ok(integrate_adaptive(&f, 0.0, TAU, panels0, QUAD_TOL, MAX_PANELS)? / TAU)
}

/// `J̃_k(-z) = (1/2π) ∫₀^{2π} cos(k t + z G(t)) dt`, `G` the antiderivative of `g`.
pub fn gen_bessel(k: i64, z: f64, forcing: &ForcingProfile) -> Result<f64> {
    let kf = k as f64;
    let f = |t: f64| (kf * t + z * forcing.antiderivative(t)).cos();
    let spread = (k.unsigned_abs() as f64) + z.abs() * forcing.antiderivative_sup();
    let panels0 = (spread / PI).ceil() as usize + 1;
    Ok(integrate_adaptive(&f, 0.0, TAU, panels0, QUAD_TOL, MAX_PANELS)? / TAU)
}

/// Leading large-`z` term of `J_k(-z)`: `√(2/(πz)) cos(-z - kπ/2 + π/4)`.
pub fn bessel_asymptotic(k: i64, z: f64) -> Result<f64> {
    if !(z >= ASYMPTOTIC_MIN_Z) {
        return Err(Error::DomainTooSmall { z });
    }
    Ok((2.0 / (PI * z)).sqrt() * (-z - k as f64 * FRAC_PI_2 + FRAC_PI_4).cos())
}

/// Stationary-phase leading term of `J̃_k(-z)`:
/// `Σ_j (2πz|g'(t_j)|)^{-1/2} cos(z G(t_j) + k t_j + (π/4) sgn g'(t_j))`.
pub fn gen_bessel_asymptotic(k: i64, z: f64, forcing: &ForcingProfile) -> Result<f64> {
    let report = forcing.transversality_report()?;
    if !(z >= ASYMPTOTIC_MIN_Z) {
        return Err(Error::DomainTooSmall { z });
    }
    let kf = k as f64;
    Ok(report
        .zeros
        .iter()
        .map(|zero| {
            let phase = z * forcing.antiderivative(zero.t)
                + kf * zero.t
                + FRAC_PI_4 * zero.slope.signum();
            phase.cos() / (TAU * z * zero.slope.abs()).sqrt()
        })
        .sum())
}
