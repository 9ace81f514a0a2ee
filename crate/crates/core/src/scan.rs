//! Rotation numbers on a rectangular grid of the `(a, b)` plane at fixed `μ`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::equation::Params;
use crate::error::{Error, Result};
use crate::fmt17;
use crate::forcing::ForcingProfile;
use crate::integrator::IntegratorConfig;
use crate::rotation::rotation_number_with;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanGrid {
    pub a_min: f64,
    pub a_max: f64,
    pub a_steps: usize,
    pub b_min: f64,
    pub b_max: f64,
    pub b_steps: usize,
    pub mu: f64,
    /// Tongues to label when rendering, inclusive.
    pub k_range: (i64, i64),
}

impl Default for ScanGrid {
    fn default() -> Self {
        Self {
            a_min: -3.0,
            a_max: 3.0,
            a_steps: 300,
            b_min: 0.0,
            b_max: 4.0,
            b_steps: 300,
            mu: 0.4,
            k_range: (-4, 4),
        }
    }
}

impl ScanGrid {
    pub fn validate(&self) -> Result<()> {
        if self.a_steps < 2 || self.b_steps < 2 {
            return Err(Error::InvalidParams("scan needs at least 2 steps per axis".into()));
        }
        if !(self.a_max > self.a_min) || !(self.b_max > self.b_min) {
            return Err(Error::InvalidParams("scan ranges must be non-degenerate".into()));
        }
        if self.b_min < 0.0 {
            return Err(Error::InvalidParams("scan uses b >= 0".into()));
        }
        if !(self.mu > 0.0) || !self.mu.is_finite() {
            return Err(Error::InvalidParams(format!("mu = {} must be positive", self.mu)));
        }
        if self.k_range.0 > self.k_range.1 {
            return Err(Error::InvalidParams("empty k_range".into()));
        }
        Ok(())
    }

    pub fn a_at(&self, i: usize) -> f64 {
        node(self.a_min, self.a_max, self.a_steps, i)
    }

    pub fn b_at(&self, j: usize) -> f64 {
        node(self.b_min, self.b_max, self.b_steps, j)
    }

    pub fn len(&self) -> usize {
        self.a_steps * self.b_steps
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

fn node(lo: f64, hi: f64, n: usize, i: usize) -> f64 {
    if i + 1 == n {
        hi
    } else {
        lo + (hi - lo) * i as f64 / (n - 1) as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanCell {
    pub a: f64,
    pub b: f64,
    /// `NaN` when the cell failed.
    pub rho: f64,
    pub locked: bool,
    pub k: Option<i64>,
}

impl ScanCell {
    pub fn failed(a: f64, b: f64) -> Self {
        Self { a, b, rho: f64::NAN, locked: false, k: None }
    }

    pub fn is_failed(&self) -> bool {
        self.rho.is_nan()
    }

    pub fn csv_row(&self, mu: f64) -> String {
        format!(
            "{},{},{},{},{},{}",
            fmt17(self.a),
            fmt17(self.b),
            fmt17(mu),
            if self.rho.is_nan() { "NaN".to_string() } else { fmt17(self.rho) },
            self.locked,
            self.k.map(|k| k.to_string()).unwrap_or_default()
        )
    }
}

pub const SCAN_CSV_HEADER: &str = "a,b,mu,rho,locked,k";

/// One rotation number per grid node, rows of constant `b` from `b_min` up,
/// `a` increasing within a row. Runs on the current rayon pool.
pub fn scan_plane(grid: &ScanGrid, forcing: &ForcingProfile, cfg: &IntegratorConfig) -> Result<Vec<ScanCell>> {
    grid.validate()?;
    Ok((0..grid.len())
        .into_par_iter()
        .map(|id| {
            let (a, b) = (grid.a_at(id % grid.a_steps), grid.b_at(id / grid.a_steps));
            Params::new(a, b, grid.mu)
                .and_then(|p| rotation_number_with(&p, forcing, cfg))
                .map(|r| ScanCell { a, b, rho: r.value, locked: r.locked, k: r.k })
                .unwrap_or_else(|_| ScanCell::failed(a, b))
        })
        .collect())
}
