//! The circle-flow family `dx/dt = (γ cos x + a + b g(t)) / μ`.

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::forcing::ForcingProfile;
use crate::integrator::{integrate, IntegratorConfig};

/// Parameter triple `(a, b, μ)` and the weight `γ` of the autonomous term.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Params {
    pub a: f64,
    pub b: f64,
    pub mu: f64,
    #[serde(default = "unit_gamma")]
    pub gamma: f64,
}

fn unit_gamma() -> f64 {
    1.0
}

impl Params {
    /// Josephson parameters (`γ = 1`).
    pub fn new(a: f64, b: f64, mu: f64) -> Result<Self> {
        Self::with_gamma(a, b, mu, 1.0)
    }

    pub fn with_gamma(a: f64, b: f64, mu: f64, gamma: f64) -> Result<Self> {
        let p = Self { a, b, mu, gamma };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.a.is_finite() && self.b.is_finite()) {
            return Err(Error::InvalidParams("a and b must be finite".into()));
        }
        if !(self.mu > 0.0 && self.mu.is_finite()) {
            return Err(Error::InvalidParams(format!("mu must be positive, got {}", self.mu)));
        }
        if !(self.gamma.abs() <= 1.0) {
            return Err(Error::InvalidParams(format!(
                "|gamma| must not exceed 1, got {}",
                self.gamma
            )));
        }
        Ok(())
    }

    /// Step cap that keeps `x` from advancing more than about π/4 per step.
    pub fn step_cap(&self, forcing: &ForcingProfile) -> f64 {
        TAU * self.mu / (8.0 * (self.a.abs() + self.b.abs() * forcing.sup_norm() + 1.0))
    }
}

/// `dx/dt` at `(x, t)`.
#[inline]
pub fn rhs_eval(p: &Params, forcing: &ForcingProfile, x: f64, t: f64) -> f64 {
    (p.gamma * x.cos() + p.a + p.b * forcing.eval(t)) / p.mu
}

/// Rotation number of the autonomous (`b = 0`) equation.
pub fn autonomous_rho(a: f64, mu: f64) -> f64 {
    if a.abs() <= 1.0 {
        0.0
    } else {
        a.signum() * (a * a - 1.0).sqrt() / mu
    }
}

/// One integrated piece of trajectory on the real line.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolutionArc {
    pub t0: f64,
    pub t1: f64,
    /// Lifted phase, never reduced mod 2π.
    pub x0: f64,
    pub x1: f64,
    /// `∫_{t0}^{t1} cos x(τ) dτ`.
    pub osc: f64,
    pub steps: usize,
}

impl SolutionArc {
    /// Defect of `x1 - x0 = (a Δt + b ΔG + γ osc) / μ`.
    pub fn integral_identity_defect(&self, p: &Params, forcing: &ForcingProfile) -> f64 {
        let dg = forcing.antiderivative(self.t1) - forcing.antiderivative(self.t0);
        let rhs = (p.a * (self.t1 - self.t0) + p.b * dg + p.gamma * self.osc) / p.mu;
        (self.x1 - self.x0 - rhs).abs()
    }
}

/// Integrate the flow from `x(t0) = x0` to `t1`, accumulating `∫ cos x`.
pub fn integrate_flow(
    p: &Params,
    forcing: &ForcingProfile,
    x0: f64,
    t0: f64,
    t1: f64,
    cfg: &IntegratorConfig,
) -> Result<SolutionArc> {
    let (arc, _) = integrate_flow_with(p, forcing, x0, t0, t1, cfg, f64::cos)?;
    Ok(arc)
}

/// As [`integrate_flow`] but also accumulates `∫ ψ(x(τ)) dτ` for a test function `ψ`.
pub fn integrate_flow_with<F>(
    p: &Params,
    forcing: &ForcingProfile,
    x0: f64,
    t0: f64,
    t1: f64,
    cfg: &IntegratorConfig,
    psi: F,
) -> Result<(SolutionArc, f64)>
where
    F: Fn(f64) -> f64,
{
    p.validate()?;
    let cfg = cfg.capped(p.step_cap(forcing));
    // Only the small part of x is integrated: x = x0 + drift(t) + γ y with
    // y = osc / μ, so the error control never sees the large lifted phase.
    let g0 = forcing.antiderivative(t0);
    let drift = |t: f64| (p.a * (t - t0) + p.b * (forcing.antiderivative(t) - g0)) / p.mu;
    let phase = |t: f64, y: f64| x0 + drift(t) + p.gamma * y;
    let sys = |t: f64, y: &[f64; 2]| {
        let x = phase(t, y[0]);
        [x.cos() / p.mu, psi(x)]
    };
    let end = integrate(&sys, t0, [0.0, 0.0], t1, &cfg)?;
    let arc = SolutionArc {
        t0,
        t1,
        x0,
        x1: phase(t1, end.y[0]),
        osc: end.y[0] * p.mu,
        steps: end.accepted,
    };
    Ok((arc, end.y[1]))
}

/// Cumulative arcs from `times[0]` to every later node (stepping lands on each node).
pub fn integrate_flow_sampled(
    p: &Params,
    forcing: &ForcingProfile,
    x0: f64,
    times: &[f64],
    cfg: &IntegratorConfig,
) -> Result<Vec<SolutionArc>> {
    let Some(&start) = times.first() else {
        return Ok(Vec::new());
    };
    let mut out = Vec::with_capacity(times.len());
    let mut x = x0;
    let mut osc = 0.0;
    let mut steps = 0;
    let mut t = start;
    out.push(SolutionArc { t0: start, t1: start, x0, x1: x0, osc: 0.0, steps: 0 });
    for &t_next in &times[1..] {
        let piece = integrate_flow(p, forcing, x, t, t_next, cfg)?;
        x = piece.x1;
        osc += piece.osc;
        steps += piece.steps;
        t = t_next;
        out.push(SolutionArc { t0: start, t1: t, x0, x1: x, osc, steps });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, PI, SQRT_2};

    fn cfg() -> IntegratorConfig {
        IntegratorConfig::default()
    }

    #[test]
    fn rhs_examples() {
        let g = ForcingProfile::cosine();
        let p = Params::new(0.0, 0.0, 1.0).unwrap();
        assert!(rhs_eval(&p, &g, FRAC_PI_2, 0.0).abs() < 1e-16);
        let p = Params::with_gamma(2.0, 0.0, 0.5, 0.0).unwrap();
        assert_eq!(rhs_eval(&p, &g, 1.234, 5.0), 4.0);
        let p = Params::new(1.0, 1.0, 1.0).unwrap();
        assert_eq!(rhs_eval(&p, &g, 0.0, 0.0), 3.0);
    }

    #[test]
    fn params_validation() {
        assert!(Params::new(0.0, 1.0, 0.0).is_err());
        assert!(Params::new(0.0, 1.0, -1.0).is_err());
        assert!(Params::with_gamma(0.0, 1.0, 1.0, 1.5).is_err());
        assert!(Params::new(f64::NAN, 1.0, 1.0).is_err());
    }

    #[test]
    fn autonomous_rho_examples() {
        assert_eq!(autonomous_rho(0.3, 2.0), 0.0);
        assert!((autonomous_rho(SQRT_2, 1.0) - 1.0).abs() < 1e-15);
        let mu = 0.4;
        for k in [-3_i32, -1, 1, 2, 5] {
            let a = (k as f64).signum() * ((k * k) as f64 * mu * mu + 1.0).sqrt();
            assert!((autonomous_rho(a, mu) - k as f64).abs() < 1e-12);
        }
    }

    #[test]
    fn gamma_zero_closed_form() {
        let g = ForcingProfile::cosine();
        let p = Params::with_gamma(0.7, 0.0, 1.3, 0.0).unwrap();
        let arc = integrate_flow(&p, &g, 0.0, 0.0, TAU, &cfg()).unwrap();
        assert!((arc.x1 - TAU * 0.7 / 1.3).abs() < 1e-11);
    }

    #[test]
    fn traversal_time_matches_quadrature() {
        // a = √2, μ = 1: dt = dx / (cos x + √2) integrates to 2π over one turn,
        // so after t = 2π the phase has advanced by exactly 2π.
        let g = ForcingProfile::cosine();
        let p = Params::new(SQRT_2, 0.0, 1.0).unwrap();
        let arc = integrate_flow(&p, &g, 0.0, 0.0, TAU, &cfg()).unwrap();
        assert!((arc.x1 - TAU).abs() < 1e-9, "x1 = {}", arc.x1);
    }

    #[test]
    fn locked_autonomous_converges_to_stable_root() {
        // cos x = -1/2 at x = 2π/3 (stable: d/dx cos x < 0)
        let g = ForcingProfile::cosine();
        let p = Params::new(0.5, 0.0, 1.0).unwrap();
        let arc = integrate_flow(&p, &g, 0.0, 0.0, 200.0, &cfg()).unwrap();
        assert!((arc.x1 - 2.0 * PI / 3.0).abs() < 1e-10, "x1 = {}", arc.x1);
    }

    #[test]
    fn integral_identity_and_reversibility() {
        let g = ForcingProfile::cosine();
        // away from locking, so the backward run does not amplify the forward error
        let p = Params::new(1.3, 0.7, 0.9).unwrap();
        let c = cfg();
        let fwd = integrate_flow(&p, &g, 0.2, 0.0, TAU, &c).unwrap();
        let tol = 10.0 * c.rel_tol * (1.0 + (fwd.x1 - fwd.x0).abs());
        assert!(fwd.integral_identity_defect(&p, &g) <= tol);
        let back = integrate_flow(&p, &g, fwd.x1, TAU, 0.0, &c).unwrap();
        assert!((back.x1 - 0.2).abs() <= 1e2 * c.rel_tol, "{}", back.x1 - 0.2);
    }

    #[test]
    fn sampled_matches_single_run() {
        let g = ForcingProfile::cosine();
        let p = Params::new(1.2, 1.5, 0.6).unwrap();
        let times: Vec<f64> = (0..=16).map(|i| i as f64 * TAU / 16.0).collect();
        let arcs = integrate_flow_sampled(&p, &g, 0.0, &times, &cfg()).unwrap();
        let whole = integrate_flow(&p, &g, 0.0, 0.0, TAU, &cfg()).unwrap();
        let last = arcs.last().unwrap();
        assert!((last.x1 - whole.x1).abs() < 1e-10);
        assert!((last.osc - whole.osc).abs() < 1e-10);
    }
}
