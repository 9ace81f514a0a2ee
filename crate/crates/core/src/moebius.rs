//! Exact Poincaré map of the Josephson equation as a Möbius transformation.
//!
//! With `u = tan(x/2)` the equation becomes the Riccati equation
//! `2μ u' = (1 + a + b g) + (a + b g - 1) u²`, which is the projectivisation
//! of the trace-free linear system
//!
//! ```text
//! v₁' = (a + b g + 1)/(2μ) · v₂,   v₂' = -(a + b g - 1)/(2μ) · v₁,   u = v₁/v₂.
//! ```
//!
//! The period map of that system is an `SL(2, R)` matrix `M`. A vector
//! `v = (sin α, cos α)` represents the circle point `x = 2α`, and the
//! continuous angle of `v(t)` follows `x(t)/2` exactly, so the lifted
//! Poincaré map is recovered from `M` plus one integer (the winding).

use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use crate::equation::Params;
use crate::error::{Error, Result};
use crate::forcing::ForcingProfile;
use crate::integrator::{integrate, IntegratorConfig};

/// Maximum tolerated `|det M - 1|` before renormalisation.
pub const MAX_DET_DRIFT: f64 = 1e-6;
/// Default `‖M ∓ I‖` band for the identity class.
pub const TOL_IDENTITY: f64 = 1e-8;
/// Default trace band around `±2` for the parabolic class.
pub const TOL_TRACE: f64 = 1e-8;

/// Unit-determinant monodromy plus the winding that fixes its lift.
///
/// The lifted map is `x ↦ x + 2δ(x/2) + 2π·winding`, where `δ(α)` is the
/// angle turned by `M` on the ray `(sin α, cos α)`, continued from its
/// principal value `atan2(m12, m22)` at `α = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MoebiusMap {
    pub m: [[f64; 2]; 2],
    pub winding: i64,
    pub det_drift: f64,
}

/// Trace classification of a monodromy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MapClass {
    Elliptic,
    Parabolic,
    Hyperbolic,
    Identity,
}

impl MapClass {
    /// Locked (integer rotation number) classes.
    pub fn is_locked(self) -> bool {
        !matches!(self, MapClass::Elliptic)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Stability {
    Attracting,
    Repelling,
    Neutral,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FixedPoint {
    /// Circle point in `[0, 2π)`.
    pub x: f64,
    pub stability: Stability,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum FixedPoints {
    None,
    One(FixedPoint),
    Two([FixedPoint; 2]),
    /// The map is the identity on the circle.
    All,
}

impl MoebiusMap {
    /// Wrap a unit-determinant matrix with a given winding.
    pub fn from_matrix(m: [[f64; 2]; 2], winding: i64) -> Self {
        Self { m, winding, det_drift: (det(&m) - 1.0).abs() }
    }

    pub fn identity() -> Self {
        Self::from_matrix([[1.0, 0.0], [0.0, 1.0]], 0)
    }

    pub fn trace(&self) -> f64 {
        self.m[0][0] + self.m[1][1]
    }

    pub fn det(&self) -> f64 {
        det(&self.m)
    }

    /// `min(‖M - I‖, ‖M + I‖)` in the max-entry norm.
    pub fn identity_defect(&self) -> f64 {
        let m = &self.m;
        let minus = (m[0][0] - 1.0)
            .abs()
            .max((m[1][1] - 1.0).abs())
            .max(m[0][1].abs())
            .max(m[1][0].abs());
        let plus = (m[0][0] + 1.0)
            .abs()
            .max((m[1][1] + 1.0).abs())
            .max(m[0][1].abs())
            .max(m[1][0].abs());
        minus.min(plus)
    }

    /// Principal angle turned by the ray `(0, 1)`, in `(-π, π]`.
    fn base_turn(&self) -> f64 {
        self.m[0][1].atan2(self.m[1][1])
    }

    /// Lifted map with the winding term left out.
    fn lift_unwound(&self, x: f64) -> f64 {
        let alpha = 0.5 * x;
        let (s, c) = alpha.sin_cos();
        let w1 = self.m[0][0] * s + self.m[0][1] * c;
        let w2 = self.m[1][0] * s + self.m[1][1] * c;
        let d0 = self.base_turn();
        let d = wrap_pi(w1.atan2(w2) - alpha - d0);
        x + 2.0 * (d0 + d)
    }

    /// Inverse map, lift included: `inverse().apply(apply(x)) = x`.
    pub fn inverse(&self) -> Self {
        let m = &self.m;
        let inv = Self {
            m: [[m[1][1], -m[0][1]], [-m[1][0], m[0][0]]],
            winding: 0,
            det_drift: self.det_drift,
        };
        let y = apply_lifted(self, 0.0);
        let back = inv.lift_unwound(y);
        Self { winding: (-back / TAU).round() as i64, ..inv }
    }

    /// `self ∘ other` (apply `other` first).
    pub fn compose(&self, other: &Self) -> Self {
        let (a, b) = (&self.m, &other.m);
        let m = [
            [
                a[0][0] * b[0][0] + a[0][1] * b[1][0],
                a[0][0] * b[0][1] + a[0][1] * b[1][1],
            ],
            [
                a[1][0] * b[0][0] + a[1][1] * b[1][0],
                a[1][0] * b[0][1] + a[1][1] * b[1][1],
            ],
        ];
        let target = apply_lifted(self, apply_lifted(other, 0.0));
        let unwound = Self { m, winding: 0, det_drift: 0.0 }.lift_unwound(0.0);
        Self {
            m,
            winding: ((target - unwound) / TAU).round() as i64,
            det_drift: (det(&m) - 1.0).abs(),
        }
    }
}

fn det(m: &[[f64; 2]; 2]) -> f64 {
    m[0][0] * m[1][1] - m[0][1] * m[1][0]
}

/// Reduce to `(-π, π]`.
pub(crate) fn wrap_pi(v: f64) -> f64 {
    let r = (v + PI).rem_euclid(TAU) - PI;
    if r == -PI {
        PI
    } else {
        r
    }
}

/// Monodromy over one forcing period `[0, 2π]`.
pub fn monodromy(p: &Params, forcing: &ForcingProfile, cfg: &IntegratorConfig) -> Result<MoebiusMap> {
    monodromy_span(p, forcing, 0.0, TAU, cfg)
}

/// Transfer map from `t0` to `t1` of the linearised system.
pub fn monodromy_span(
    p: &Params,
    forcing: &ForcingProfile,
    t0: f64,
    t1: f64,
    cfg: &IntegratorConfig,
) -> Result<MoebiusMap> {
    p.validate()?;
    if p.gamma != 1.0 {
        return Err(Error::NotMoebius { gamma: p.gamma });
    }
    let cfg = cfg.capped(p.step_cap(forcing));
    let inv2mu = 0.5 / p.mu;
    // columns (v11, v21), (v12, v22), then the reference phase x(t0) = 0
    let sys = |t: f64, y: &[f64; 5]| {
        let drive = p.a + p.b * forcing.eval(t);
        let up = (drive + 1.0) * inv2mu;
        let down = -(drive - 1.0) * inv2mu;
        [
            up * y[1],
            down * y[0],
            up * y[3],
            down * y[2],
            (y[4].cos() + drive) / p.mu,
        ]
    };
    let end = integrate(&sys, t0, [1.0, 0.0, 0.0, 1.0, 0.0], t1, &cfg)?;
    let y = end.y;
    let raw = [[y[0], y[2]], [y[1], y[3]]];
    let d = det(&raw);
    let drift = (d - 1.0).abs();
    if !(d > 0.0) || drift > MAX_DET_DRIFT {
        return Err(Error::DeterminantDrift { drift });
    }
    let s = d.sqrt();
    let m = [[raw[0][0] / s, raw[0][1] / s], [raw[1][0] / s, raw[1][1] / s]];
    let unwound = MoebiusMap { m, winding: 0, det_drift: drift }.lift_unwound(0.0);
    let winding = ((y[4] - unwound) / TAU).round() as i64;
    Ok(MoebiusMap { m, winding, det_drift: drift })
}

/// Lifted Poincaré map: continuous, increasing, `F(x + 2π) = F(x) + 2π`.
pub fn apply_lifted(map: &MoebiusMap, x: f64) -> f64 {
    map.lift_unwound(x) + TAU * map.winding as f64
}

/// Classify with the default tolerances.
pub fn classify(map: &MoebiusMap) -> MapClass {
    classify_with(map, TOL_IDENTITY, TOL_TRACE)
}

pub fn classify_with(map: &MoebiusMap, tol_id: f64, tol_tr: f64) -> MapClass {
    if map.identity_defect() <= tol_id {
        return MapClass::Identity;
    }
    let tr = map.trace().abs();
    if tr < 2.0 - tol_tr {
        MapClass::Elliptic
    } else if tr > 2.0 + tol_tr {
        MapClass::Hyperbolic
    } else {
        MapClass::Parabolic
    }
}

/// Fixed points of the circle map induced by `map`.
pub fn fixed_points(map: &MoebiusMap) -> FixedPoints {
    let m = &map.m;
    match classify(map) {
        MapClass::Identity => FixedPoints::All,
        MapClass::Elliptic => FixedPoints::None,
        MapClass::Parabolic => {
            // λ = tr/2 picks the midpoint of a split pair, stable under tiny perturbations
            let lambda = 0.5 * map.trace();
            FixedPoint {
                x: eigen_direction(m, lambda),
                stability: Stability::Neutral,
            }
            .into()
        }
        MapClass::Hyperbolic => {
            let tr = map.trace();
            let disc = (tr * tr - 4.0).max(0.0).sqrt();
            let big = 0.5 * (tr + tr.signum() * disc);
            let small = 1.0 / big;
            let mut pts = [
                FixedPoint { x: eigen_direction(m, big), stability: Stability::Attracting },
                FixedPoint { x: eigen_direction(m, small), stability: Stability::Repelling },
            ];
            pts.sort_by(|p, q| p.x.total_cmp(&q.x));
            FixedPoints::Two(pts)
        }
    }
}

impl From<FixedPoint> for FixedPoints {
    fn from(p: FixedPoint) -> Self {
        FixedPoints::One(p)
    }
}

/// Circle point `2·atan2(v₁, v₂)` of the eigenline for `lambda`.
fn eigen_direction(m: &[[f64; 2]; 2], lambda: f64) -> f64 {
    let r1 = (m[0][1], lambda - m[0][0]);
    let r2 = (lambda - m[1][1], m[1][0]);
    let (v1, v2) = if r1.0.hypot(r1.1) >= r2.0.hypot(r2.1) { r1 } else { r2 };
    (2.0 * v1.atan2(v2)).rem_euclid(TAU)
}

/// Distance on the circle `R / 2πZ`.
pub fn circle_distance(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(TAU);
    d.min(TAU - d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equation::integrate_flow;

    fn rot(phi: f64) -> MoebiusMap {
        // turns the ray (sin α, cos α) to angle α + φ
        let (s, c) = phi.sin_cos();
        MoebiusMap::from_matrix([[c, s], [-s, c]], 0)
    }

    #[test]
    fn classify_examples() {
        let e = MoebiusMap::from_matrix([[0.3_f64.cos(), 0.3_f64.sin()], [-0.3_f64.sin(), 0.3_f64.cos()]], 0);
        assert_eq!(classify(&e), MapClass::Elliptic);
        let h = MoebiusMap::from_matrix([[2.0, 0.0], [0.0, 0.5]], 0);
        assert_eq!(classify(&h), MapClass::Hyperbolic);
        let p = MoebiusMap::from_matrix([[1.0, 1.0], [0.0, 1.0]], 0);
        assert_eq!(classify(&p), MapClass::Parabolic);
        let minus = MoebiusMap::from_matrix([[-1.0, 0.0], [0.0, -1.0]], 0);
        assert_eq!(classify(&minus), MapClass::Identity);
    }

    #[test]
    fn identity_with_winding_translates() {
        for k in -3..=3 {
            let map = MoebiusMap { winding: k, ..MoebiusMap::identity() };
            for x in [-7.0, -0.3, 0.0, 1.0, 3.1, 40.0] {
                assert!((apply_lifted(&map, x) - x - TAU * k as f64).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn rotation_matrix_rotates_by_twice_the_angle() {
        let map = rot(0.4);
        for x in [-2.0, 0.0, 0.5, 5.0] {
            assert!((apply_lifted(&map, x) - x - 0.8).abs() < 1e-13);
        }
    }

    #[test]
    fn inverse_and_compose() {
        let map = MoebiusMap::from_matrix([[1.7, 0.4], [-0.9, 0.376_470_588_235_294_1]], 2);
        let s = map.det().sqrt();
        let map = MoebiusMap::from_matrix(
            [[map.m[0][0] / s, map.m[0][1] / s], [map.m[1][0] / s, map.m[1][1] / s]],
            2,
        );
        let inv = map.inverse();
        for x in [-3.0, 0.0, 0.7, 2.5, 9.0] {
            assert!((apply_lifted(&inv, apply_lifted(&map, x)) - x).abs() < 1e-12);
        }
        let sq = map.compose(&map);
        for x in [-1.0, 0.0, 4.0] {
            let two = apply_lifted(&map, apply_lifted(&map, x));
            assert!((apply_lifted(&sq, x) - two).abs() < 1e-12);
        }
    }

    #[test]
    fn autonomous_zero_drive_is_hyperbolic() {
        // a = b = 0: fixed points where cos x = 0, i.e. x = ±π/2
        let g = ForcingProfile::cosine();
        let p = Params::new(0.0, 0.0, 0.8).unwrap();
        let map = monodromy(&p, &g, &IntegratorConfig::default()).unwrap();
        assert_eq!(classify(&map), MapClass::Hyperbolic);
        assert_eq!(map.winding, 0);
        match fixed_points(&map) {
            FixedPoints::Two(pts) => {
                assert!(circle_distance(pts[0].x, PI / 2.0) < 1e-10);
                assert!(circle_distance(pts[1].x, 1.5 * PI) < 1e-10);
                // cos x decreasing at π/2: attracting
                assert_eq!(pts[0].stability, Stability::Attracting);
                assert_eq!(pts[1].stability, Stability::Repelling);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn hyperbolic_autonomous_fixed_points() {
        let g = ForcingProfile::cosine();
        let a = 0.35;
        let p = Params::new(a, 0.0, 1.1).unwrap();
        let map = monodromy(&p, &g, &IntegratorConfig::default()).unwrap();
        let xs = (-a).acos();
        match fixed_points(&map) {
            FixedPoints::Two(pts) => {
                let want = [xs, TAU - xs];
                for (pt, w) in pts.iter().zip(want) {
                    assert!(circle_distance(pt.x, w) < 1e-10, "{} vs {}", pt.x, w);
                }
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn lift_matches_direct_integration() {
        let g = ForcingProfile::cosine();
        let cfg = IntegratorConfig::default();
        for &(a, b, mu) in &[(0.3, 2.0, 0.4), (1.8, 0.5, 1.0), (-2.2, 4.0, 0.7), (0.0, 7.0, 2.0)] {
            let p = Params::new(a, b, mu).unwrap();
            let map = monodromy(&p, &g, &cfg).unwrap();
            assert!(map.det_drift < 1e-9);
            for x0 in [-4.0, -1.0, 0.0, 0.5, 2.0, 6.0] {
                let direct = integrate_flow(&p, &g, x0, 0.0, TAU, &cfg).unwrap().x1;
                let lifted = apply_lifted(&map, x0);
                assert!((direct - lifted).abs() < 1e-9, "{a} {b} {mu} {x0}: {direct} {lifted}");
            }
        }
    }

    #[test]
    fn gamma_other_than_one_rejected() {
        let g = ForcingProfile::cosine();
        let p = Params::with_gamma(0.0, 1.0, 1.0, 0.5).unwrap();
        assert!(matches!(
            monodromy(&p, &g, &IntegratorConfig::default()),
            Err(Error::NotMoebius { .. })
        ));
    }

    #[test]
    fn json_shape() {
        let map = MoebiusMap { m: [[1.0, 2.0], [0.0, 1.0]], winding: -1, det_drift: 0.0 };
        let s = serde_json::to_string(&map).unwrap();
        assert_eq!(s, r#"{"m":[[1.0,2.0],[0.0,1.0]],"winding":-1,"det_drift":0.0}"#);
    }
}
