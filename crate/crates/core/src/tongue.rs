//! Boundaries of the `k`-th Arnold tongue at fixed `μ`.
//!
//! For even forcing the ends of the locking interval `[a⁻, a⁺]` are the
//! parameters at which `0` resp. `π` is a fixed point of the Poincaré map:
//! `a₀` solves `P̃(0) = 2πk`, `a_π` solves `P̃(π) = π + 2πk`. Both sides are
//! strictly increasing in `a`, so each has a single bracketed root.

use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use crate::bessel::{bessel_j_at_neg, gen_bessel};
use crate::equation::{integrate_flow, Params};
use crate::error::{Error, Result};
use crate::forcing::ForcingProfile;
use crate::integrator::IntegratorConfig;
use crate::moebius::monodromy;
use crate::roots::brent;

/// Below this amplitude the boundary comes from the `b = 0` closed form.
pub const SMALL_B: f64 = 0.01;
const MAX_DOUBLINGS: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundaryPoint {
    pub k: i64,
    pub b: f64,
    pub mu: f64,
    /// End where `x = 0` is fixed.
    pub a0: f64,
    /// End where `x = π` is fixed.
    pub api: f64,
    pub a_minus: f64,
    pub a_plus: f64,
    pub width: f64,
    pub bessel_pred_0: f64,
    pub bessel_pred_pi: f64,
    pub residual_0: f64,
    pub residual_pi: f64,
    /// Taken from the `b = 0` closed form rather than root-found.
    pub closed_form: bool,
    /// Both boundary functions increased across five interior samples of their bracket.
    pub monotone_checked: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdjacencyPoint {
    pub k: i64,
    pub mu: f64,
    pub b_star: f64,
    pub a_star: f64,
    /// `|a₀ - a_π|` at `b_star`.
    pub gap: f64,
    /// `min ‖M ∓ I‖` at `(a_star, b_star)`.
    pub identity_defect: f64,
}

/// Root-finding settings shared by all tracer operations.
#[derive(Debug, Clone, PartialEq)]
pub struct TongueTracer {
    pub forcing: ForcingProfile,
    pub cfg: IntegratorConfig,
    /// Target bracket width for boundary roots.
    pub tol_a: f64,
    /// Sample five interior points per bracket to confirm monotonicity.
    pub check_monotone: bool,
}

impl Default for TongueTracer {
    fn default() -> Self {
        Self {
            forcing: ForcingProfile::cosine(),
            cfg: IntegratorConfig::default(),
            tol_a: 1e-12,
            check_monotone: true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum End {
    Zero,
    Pi,
}

impl End {
    fn start(self) -> f64 {
        match self {
            End::Zero => 0.0,
            End::Pi => PI,
        }
    }
}

impl TongueTracer {
    /// `P̃(x₀) - x₀ - 2πk` at drive offset `a`.
    fn boundary_fn(&self, end: End, k: i64, a: f64, b: f64, mu: f64) -> Result<f64> {
        let p = Params::new(a, b, mu)?;
        let x0 = end.start();
        let arc = integrate_flow(&p, &self.forcing, x0, 0.0, TAU, &self.cfg)?;
        Ok(arc.x1 - x0 - TAU * k as f64)
    }

    fn solve_end(
        &self,
        end: End,
        k: i64,
        b: f64,
        mu: f64,
        warm: Option<(f64, f64)>,
    ) -> Result<(f64, bool)> {
        let f = |a: f64| self.boundary_fn(end, k, a, b, mu);
        let bracket = warm
            .and_then(|(centre, half)| self.expand(&f, centre, half, 8).ok().flatten())
            .map(Ok)
            .unwrap_or_else(|| {
                let centre = k as f64 * mu;
                let half = 2.0 / (b * mu).sqrt() + 0.5;
                self.expand(&f, centre, half, MAX_DOUBLINGS)?
                    .ok_or(Error::BracketFailure { k, b, mu })
            })?;
        let (lo, hi, f_lo, f_hi) = bracket;
        let monotone = if self.check_monotone {
            let mut prev = f_lo;
            let mut ok = true;
            for i in 1..=5 {
                let v = f(lo + (hi - lo) * i as f64 / 6.0)?;
                ok &= v > prev;
                prev = v;
            }
            ok && f_hi > prev
        } else {
            false
        };
        let root = brent(f, lo, hi, f_lo, f_hi, self.tol_a)?;
        Ok((root, monotone))
    }

    /// Grow `[c - h, c + h]` until the increasing function changes sign.
    #[allow(clippy::type_complexity)]
    fn expand<F>(&self, f: &F, centre: f64, half: f64, doublings: usize) -> Result<Option<(f64, f64, f64, f64)>>
    where
        F: Fn(f64) -> Result<f64>,
    {
        let mut half = half;
        for _ in 0..=doublings {
            let (lo, hi) = (centre - half, centre + half);
            let (f_lo, f_hi) = (f(lo)?, f(hi)?);
            if f_lo <= 0.0 && f_hi >= 0.0 {
                return Ok(Some((lo, hi, f_lo, f_hi)));
            }
            half *= 2.0;
        }
        Ok(None)
    }

    /// Both boundary values of tongue `k` at amplitude `b`.
    pub fn boundary_at(&self, k: i64, b: f64, mu: f64) -> Result<BoundaryPoint> {
        self.boundary_near(k, b, mu, None)
    }

    /// As [`Self::boundary_at`], first trying brackets of half-width `half`
    /// around a previous `(a0, api)`.
    pub fn boundary_near(
        &self,
        k: i64,
        b: f64,
        mu: f64,
        warm: Option<((f64, f64), f64)>,
    ) -> Result<BoundaryPoint> {
        Params::new(0.0, b, mu)?;
        if b < 0.0 {
            return Err(Error::InvalidParams("boundary tracing uses b >= 0".into()));
        }
        if b < SMALL_B {
            let (a0, api) = closed_form_ends(k, mu);
            return Ok(self.assemble(k, b, mu, a0, api, true, false));
        }
        let (a0, m0) = self.solve_end(End::Zero, k, b, mu, warm.map(|((a0, _), h)| (a0, h)))?;
        let (api, mpi) = self.solve_end(End::Pi, k, b, mu, warm.map(|((_, api), h)| (api, h)))?;
        Ok(self.assemble(k, b, mu, a0, api, false, m0 && mpi))
    }

    #[allow(clippy::too_many_arguments)]
    fn assemble(&self, k: i64, b: f64, mu: f64, a0: f64, api: f64, closed_form: bool, monotone: bool) -> BoundaryPoint {
        let jk = self.bessel_term(k, b / mu);
        let kmu = k as f64 * mu;
        let bessel_pred_0 = kmu - jk;
        let bessel_pred_pi = kmu + jk;
        BoundaryPoint {
            k,
            b,
            mu,
            a0,
            api,
            a_minus: a0.min(api),
            a_plus: a0.max(api),
            width: (a0 - api).abs(),
            bessel_pred_0,
            bessel_pred_pi,
            residual_0: (a0 - bessel_pred_0).abs(),
            residual_pi: (api - bessel_pred_pi).abs(),
            closed_form,
            monotone_checked: monotone,
        }
    }

    /// `J̃_k(-z)`; the classical `J_k(-z)` for cosine forcing.
    pub fn bessel_term(&self, k: i64, z: f64) -> f64 {
        if self.forcing == ForcingProfile::cosine() {
            bessel_j_at_neg(k, z)
        } else {
            gen_bessel(k, z, &self.forcing).unwrap_or(f64::NAN)
        }
    }

    /// Continuation along an increasing `b` grid. Per-node failures are kept.
    pub fn trace_boundary(&self, k: i64, b_grid: &[f64], mu: f64) -> Vec<Result<BoundaryPoint>> {
        let mut out = Vec::with_capacity(b_grid.len());
        let mut prev: Option<(f64, f64, f64)> = None;
        for &b in b_grid {
            let warm = prev.map(|(pb, a0, api)| ((a0, api), warm_half_width(b - pb, b, mu)));
            let node = self.boundary_near(k, b, mu, warm);
            if let Ok(bp) = &node {
                if !bp.closed_form {
                    prev = Some((b, bp.a0, bp.api));
                }
            }
            out.push(node);
        }
        out
    }

    /// Zero-width sections of tongue `k` for `b` in `range`.
    pub fn find_adjacencies(&self, k: i64, range: (f64, f64), mu: f64) -> Result<Vec<AdjacencyPoint>> {
        let (lo, hi) = (range.0.max(SMALL_B), range.1);
        if !(hi > lo) {
            return Ok(Vec::new());
        }
        // sign changes of a₀ - a_π are ~πμ apart in b
        let h = PI * mu / 8.0;
        let n = ((hi - lo) / h).ceil().max(1.0) as usize;
        let grid: Vec<f64> = (0..=n).map(|i| lo + (hi - lo) * i as f64 / n as f64).collect();
        let nodes = self.trace_boundary(k, &grid, mu);

        let mut found = Vec::new();
        for pair in nodes.windows(2) {
            let (Ok(l), Ok(r)) = (&pair[0], &pair[1]) else { continue };
            let (dl, dr) = (l.a0 - l.api, r.a0 - r.api);
            if dl == 0.0 || dl * dr < 0.0 {
                found.push(self.polish_adjacency(k, mu, l, r)?);
            }
        }
        Ok(found)
    }

    fn polish_adjacency(&self, k: i64, mu: f64, l: &BoundaryPoint, r: &BoundaryPoint) -> Result<AdjacencyPoint> {
        let half = (l.width.max(r.width) + 1e-6) * 2.0;
        let centre = 0.5 * (l.a0 + l.api);
        let gap_at = |b: f64| -> Result<f64> {
            let bp = self.boundary_near(k, b, mu, Some(((centre, centre), half)))?;
            Ok(bp.a0 - bp.api)
        };
        let (fl, fr) = (l.a0 - l.api, r.a0 - r.api);
        let b_star = if fl == 0.0 {
            l.b
        } else {
            brent(gap_at, l.b, r.b, fl, fr, 1e-12 * r.b.max(1.0))?
        };
        let bp = self.boundary_near(k, b_star, mu, Some(((centre, centre), half)))?;
        let a_star = 0.5 * (bp.a0 + bp.api);
        let map = monodromy(&Params::new(a_star, b_star, mu)?, &self.forcing, &self.cfg)?;
        Ok(AdjacencyPoint {
            k,
            mu,
            b_star,
            a_star,
            gap: (bp.a0 - bp.api).abs(),
            identity_defect: map.identity_defect(),
        })
    }
}

/// `(a0, api)` of tongue `k` on the line `b = 0`.
pub fn closed_form_ends(k: i64, mu: f64) -> (f64, f64) {
    if k == 0 {
        // cos x + a vanishes at x = 0 for a = -1 and at x = π for a = 1
        (-1.0, 1.0)
    } else {
        let kf = k as f64;
        let a = kf.signum() * (kf * kf * mu * mu + 1.0).sqrt();
        (a, a)
    }
}

/// Bracket half-width for a continuation step of size `db`.
fn warm_half_width(db: f64, b: f64, mu: f64) -> f64 {
    let z = (b / mu).max(1.0);
    // the boundary slope is of order |J_k'(z)|/μ ~ √(2/(πz))/μ
    2.0 * db.abs() * (2.0 / (PI * z)).sqrt() / mu + 1e-4
}

pub fn boundary_at(k: i64, b: f64, mu: f64) -> Result<BoundaryPoint> {
    TongueTracer::default().boundary_at(k, b, mu)
}

pub fn trace_boundary(k: i64, b_grid: &[f64], mu: f64) -> Vec<Result<BoundaryPoint>> {
    TongueTracer::default().trace_boundary(k, b_grid, mu)
}

pub fn find_adjacencies(k: i64, range: (f64, f64), mu: f64) -> Result<Vec<AdjacencyPoint>> {
    TongueTracer::default().find_adjacencies(k, range, mu)
}

/// Column order of the boundary CSV.
pub const BOUNDARY_CSV_HEADER: &str =
    "k,b,mu,a0,api,a_minus,a_plus,width,bessel_pred_0,bessel_pred_pi,residual_0,residual_pi";

impl BoundaryPoint {
    /// One CSV row, floats with 17 significant digits.
    pub fn csv_row(&self) -> String {
        use crate::fmt17;
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            self.k,
            fmt17(self.b),
            fmt17(self.mu),
            fmt17(self.a0),
            fmt17(self.api),
            fmt17(self.a_minus),
            fmt17(self.a_plus),
            fmt17(self.width),
            fmt17(self.bessel_pred_0),
            fmt17(self.bessel_pred_pi),
            fmt17(self.residual_0),
            fmt17(self.residual_pi),
        )
    }
}
