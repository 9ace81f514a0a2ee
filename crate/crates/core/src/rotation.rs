//! Rotation numbers `ρ(a, b, μ)`.
//!
//! The Möbius route reads `ρ` off the monodromy: for an elliptic matrix with
//! trace `2 cos θ` the induced circle map is conjugate to a rotation by `2θ`,
//! so `ρ = winding ± θ/π`; non-elliptic maps have integer `ρ`. The iterated
//! route integrates many periods and is kept as an independent check.

use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use crate::equation::{integrate_flow, Params};
use crate::error::{Error, Result};
use crate::forcing::ForcingProfile;
use crate::integrator::IntegratorConfig;
use crate::moebius::{monodromy, MoebiusMap};

/// `|trace| ≥ 2 - LOCK_TOL` counts as phase locked.
pub const LOCK_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Moebius,
    Iterated,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RotationNumber {
    pub value: f64,
    pub locked: bool,
    /// Integer rotation number, present iff `locked`.
    pub k: Option<i64>,
    pub method: Method,
}

/// Rotation number via the monodromy (default integrator settings).
pub fn rotation_number(p: &Params, forcing: &ForcingProfile) -> Result<RotationNumber> {
    rotation_number_with(p, forcing, &IntegratorConfig::default())
}

pub fn rotation_number_with(
    p: &Params,
    forcing: &ForcingProfile,
    cfg: &IntegratorConfig,
) -> Result<RotationNumber> {
    let map = monodromy(p, forcing, cfg)?;
    Ok(rotation_of_map(&map))
}

/// Rotation number of the lifted circle map represented by `map`.
pub fn rotation_of_map(map: &MoebiusMap) -> RotationNumber {
    let tr = map.trace();
    // direction in which the ray (0, 1) turns; elliptic maps turn every ray the same way
    let turn = map.m[0][1].atan2(map.m[1][1]);
    let sign = if turn > 0.0 { 1 } else { -1 };
    let w = map.winding;
    if tr.abs() >= 2.0 - LOCK_TOL {
        // negative eigenvalues send every fixed line to the opposite ray: one extra half turn
        let k = if tr < 0.0 { w + sign } else { w };
        RotationNumber { value: k as f64, locked: true, k: Some(k), method: Method::Moebius }
    } else {
        let theta = (0.5 * tr).acos();
        RotationNumber {
            value: w as f64 + sign as f64 * theta / PI,
            locked: false,
            k: None,
            method: Method::Moebius,
        }
    }
}

/// `(x(2πn) - x(2πm)) / (2π(n - m))` with `m = ⌊n/2⌋` burn-in periods.
///
/// Works for any forcing and any `γ`; error at most `1/(n - m) ≤ 2/n`.
pub fn rotation_number_iterated(
    p: &Params,
    forcing: &ForcingProfile,
    n_periods: usize,
    cfg: &IntegratorConfig,
) -> Result<RotationNumber> {
    if n_periods == 0 {
        return Err(Error::InvalidParams("n_periods must be at least 1".into()));
    }
    let burn = n_periods / 2;
    let window = n_periods - burn;
    let x_burn = if burn > 0 {
        integrate_flow(p, forcing, 0.0, 0.0, TAU * burn as f64, cfg)?.x1
    } else {
        0.0
    };
    let arc = integrate_flow(
        p,
        forcing,
        x_burn,
        TAU * burn as f64,
        TAU * n_periods as f64,
        cfg,
    )?;
    Ok(RotationNumber {
        value: (arc.x1 - x_burn) / (TAU * window as f64),
        locked: false,
        k: None,
        method: Method::Iterated,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equation::autonomous_rho;
    use std::f64::consts::SQRT_2;

    #[test]
    fn autonomous_examples() {
        let g = ForcingProfile::cosine();
        let r = rotation_number(&Params::new(0.0, 0.0, 1.0).unwrap(), &g).unwrap();
        assert!(r.locked);
        assert_eq!(r.k, Some(0));
        assert_eq!(r.value, 0.0);

        let r = rotation_number(&Params::new(SQRT_2, 0.0, 1.0).unwrap(), &g).unwrap();
        assert!((r.value - autonomous_rho(SQRT_2, 1.0)).abs() < 1e-8, "{r:?}");
    }

    #[test]
    fn fractional_rotation_matches_closed_form() {
        let g = ForcingProfile::cosine();
        for &(a, mu) in &[(1.3, 2.0), (-2.7, 0.9), (4.1, 3.0), (1.05, 0.5)] {
            let r = rotation_number(&Params::new(a, 0.0, mu).unwrap(), &g).unwrap();
            assert!((r.value - autonomous_rho(a, mu)).abs() < 1e-8, "{a} {mu}: {r:?}");
        }
    }

    #[test]
    fn iterated_locked_converges_exactly() {
        let g = ForcingProfile::cosine();
        let p = Params::new(0.5, 0.0, 1.0).unwrap();
        let r = rotation_number_iterated(&p, &g, 100, &IntegratorConfig::default()).unwrap();
        assert!(r.value.abs() < 1e-12, "{}", r.value);
    }

    #[test]
    fn iterated_agrees_with_moebius() {
        let g = ForcingProfile::cosine();
        let cfg = IntegratorConfig::default();
        let n = 40;
        for &(a, b, mu) in &[(0.9, 1.3, 0.7), (2.1, 2.0, 0.4), (-1.4, 0.6, 1.5)] {
            let p = Params::new(a, b, mu).unwrap();
            let m = rotation_number_with(&p, &g, &cfg).unwrap();
            let it = rotation_number_iterated(&p, &g, n, &cfg).unwrap();
            assert!((m.value - it.value).abs() <= 2.0 / n as f64, "{a} {b} {mu}: {m:?} {it:?}");
        }
    }

    #[test]
    fn zero_periods_rejected() {
        let g = ForcingProfile::cosine();
        let p = Params::new(0.5, 0.0, 1.0).unwrap();
        assert!(rotation_number_iterated(&p, &g, 0, &IntegratorConfig::default()).is_err());
    }
}
