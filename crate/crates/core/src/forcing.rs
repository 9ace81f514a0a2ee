//! Periodic forcing `g(t)` as a finite Fourier series with zero mean.

use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A simple zero of `g` on `[0, 2π)` together with `g'` there.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ForcingZero {
    pub t: f64,
    pub slope: f64,
}

/// `g(t) = Σ_n c_n cos(n t) + s_n sin(n t)`, `n ≥ 1`.
///
/// Index `i` of `cos_coeffs` / `sin_coeffs` holds harmonic `n = i + 1`, so
/// the constant term cannot be represented and `∫₀^{2π} g = 0` holds by
/// construction.
#[derive(Debug, Clone, PartialEq)]
pub struct ForcingProfile {
    cos_coeffs: Vec<f64>,
    sin_coeffs: Vec<f64>,
    lipschitz: f64,
    sup_norm: f64,
    antiderivative_sup: f64,
    zeros: Vec<ForcingZero>,
    degenerate: Option<ForcingZero>,
    is_even: bool,
}

/// Result of [`ForcingProfile::transversality_report`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TransversalityReport {
    pub zeros: Vec<ForcingZero>,
    /// `mes{|g| < δ} ≤ L₃ δ` holds for all small δ with this constant.
    pub l3_bound: f64,
    pub min_abs_slope: f64,
    pub is_even: bool,
}

/// Slopes below this count as a double zero.
pub const DEGENERATE_SLOPE: f64 = 1e-8;

const ZERO_GRID: usize = 4096;

impl ForcingProfile {
    /// Build from cosine and sine coefficients (harmonics 1, 2, ...).
    pub fn new(cos_coeffs: Vec<f64>, sin_coeffs: Vec<f64>) -> Result<Self> {
        if cos_coeffs.iter().chain(&sin_coeffs).any(|c| !c.is_finite()) {
            return Err(Error::InvalidForcing("non-finite coefficient".into()));
        }
        let mut cos_coeffs = cos_coeffs;
        let mut sin_coeffs = sin_coeffs;
        while cos_coeffs.last() == Some(&0.0) {
            cos_coeffs.pop();
        }
        while sin_coeffs.last() == Some(&0.0) {
            sin_coeffs.pop();
        }
        let mut lipschitz = 0.0;
        let mut sup_norm = 0.0;
        let mut antiderivative_sup = 0.0;
        let n = cos_coeffs.len().max(sin_coeffs.len());
        for i in 0..n {
            let c = cos_coeffs.get(i).copied().unwrap_or(0.0);
            let s = sin_coeffs.get(i).copied().unwrap_or(0.0);
            let amp = c.hypot(s);
            let h = (i + 1) as f64;
            sup_norm += amp;
            lipschitz += h * amp;
            antiderivative_sup += 2.0 * amp / h;
        }
        let is_even = sin_coeffs.is_empty();
        let mut profile = Self {
            cos_coeffs,
            sin_coeffs,
            lipschitz,
            sup_norm,
            antiderivative_sup,
            zeros: Vec::new(),
            degenerate: None,
            is_even,
        };
        profile.locate_zeros();
        Ok(profile)
    }

    /// Build from a series that may carry a constant term; the mean is dropped.
    pub fn with_mean_removed(_mean: f64, cos_coeffs: Vec<f64>, sin_coeffs: Vec<f64>) -> Result<Self> {
        Self::new(cos_coeffs, sin_coeffs)
    }

    /// `g(t) = cos t`, the Josephson drive.
    pub fn cosine() -> Self {
        Self::new(vec![1.0], Vec::new()).expect("cos t is a valid forcing")
    }

    /// `g ≡ 0`.
    pub fn zero() -> Self {
        Self::new(Vec::new(), Vec::new()).expect("zero forcing is valid")
    }

    pub fn cos_coeffs(&self) -> &[f64] {
        &self.cos_coeffs
    }

    pub fn sin_coeffs(&self) -> &[f64] {
        &self.sin_coeffs
    }

    /// Upper bound on `|g'|`.
    pub fn lipschitz(&self) -> f64 {
        self.lipschitz
    }

    /// Upper bound on `|g|`.
    pub fn sup_norm(&self) -> f64 {
        self.sup_norm
    }

    /// Upper bound on `|G|` where `G(t) = ∫₀ᵗ g`.
    pub fn antiderivative_sup(&self) -> f64 {
        self.antiderivative_sup
    }

    pub fn zeros(&self) -> &[ForcingZero] {
        &self.zeros
    }

    pub fn is_even(&self) -> bool {
        self.is_even
    }

    pub fn is_zero(&self) -> bool {
        self.cos_coeffs.is_empty() && self.sin_coeffs.is_empty()
    }

    fn harmonics(&self) -> usize {
        self.cos_coeffs.len().max(self.sin_coeffs.len())
    }

    pub fn eval(&self, t: f64) -> f64 {
        if self.harmonics() == 1 && self.sin_coeffs.is_empty() {
            return self.cos_coeffs[0] * t.cos();
        }
        let mut acc = 0.0;
        for (i, c) in self.cos_coeffs.iter().enumerate() {
            acc += c * ((i + 1) as f64 * t).cos();
        }
        for (i, s) in self.sin_coeffs.iter().enumerate() {
            acc += s * ((i + 1) as f64 * t).sin();
        }
        acc
    }

    pub fn derivative(&self, t: f64) -> f64 {
        let mut acc = 0.0;
        for (i, c) in self.cos_coeffs.iter().enumerate() {
            let n = (i + 1) as f64;
            acc -= n * c * (n * t).sin();
        }
        for (i, s) in self.sin_coeffs.iter().enumerate() {
            let n = (i + 1) as f64;
            acc += n * s * (n * t).cos();
        }
        acc
    }

    fn second_derivative(&self, t: f64) -> f64 {
        let mut acc = 0.0;
        for (i, c) in self.cos_coeffs.iter().enumerate() {
            let n = (i + 1) as f64;
            acc -= n * n * c * (n * t).cos();
        }
        for (i, s) in self.sin_coeffs.iter().enumerate() {
            let n = (i + 1) as f64;
            acc -= n * n * s * (n * t).sin();
        }
        acc
    }

    /// `G(t) = ∫₀ᵗ g`, termwise and exact. `G(0) = G(2π) = 0`.
    pub fn antiderivative(&self, t: f64) -> f64 {
        let mut acc = 0.0;
        for (i, c) in self.cos_coeffs.iter().enumerate() {
            let n = (i + 1) as f64;
            acc += c * (n * t).sin() / n;
        }
        for (i, s) in self.sin_coeffs.iter().enumerate() {
            let n = (i + 1) as f64;
            acc += s * (1.0 - (n * t).cos()) / n;
        }
        acc
    }

    /// Zeros of `g`, their slopes and the evenness flag.
    ///
    /// Fails with [`Error::DegenerateForcing`] when some zero is not simple.
    pub fn transversality_report(&self) -> Result<TransversalityReport> {
        if let Some(z) = self.degenerate {
            return Err(Error::DegenerateForcing { t: z.t, slope: z.slope });
        }
        if self.is_zero() {
            return Err(Error::DegenerateForcing { t: 0.0, slope: 0.0 });
        }
        let min_abs_slope = self
            .zeros
            .iter()
            .map(|z| z.slope.abs())
            .fold(f64::INFINITY, f64::min);
        // near a simple zero |g| < δ covers ≈ 2δ/|g'(t_j)|; double it for slack
        let l3_bound = self.zeros.iter().map(|z| 4.0 / z.slope.abs()).sum();
        Ok(TransversalityReport {
            zeros: self.zeros.clone(),
            l3_bound,
            min_abs_slope,
            is_even: self.is_even,
        })
    }

    fn locate_zeros(&mut self) {
        if self.is_zero() {
            return;
        }
        let h = TAU / ZERO_GRID as f64;
        let ts: Vec<f64> = (0..=ZERO_GRID).map(|i| i as f64 * h).collect();
        let gs: Vec<f64> = ts.iter().map(|&t| self.eval(t)).collect();
        let mut zeros = Vec::new();

        for i in 0..ZERO_GRID {
            let (g0, g1) = (gs[i], gs[i + 1]);
            if g0 == 0.0 {
                zeros.push(ts[i]);
            } else if g0 * g1 < 0.0 {
                zeros.push(self.polish_root(ts[i], ts[i + 1]));
            }
        }

        // touching zeros have no sign change: look for near-vanishing minima of |g|
        let scale = self.sup_norm.max(f64::MIN_POSITIVE);
        for i in 0..ZERO_GRID {
            let prev = gs[(i + ZERO_GRID - 1) % ZERO_GRID].abs();
            let cur = gs[i].abs();
            let next = gs[i + 1].abs();
            if cur > 0.0 && cur <= prev && cur <= next && cur < 1e-3 * scale {
                if let Some(tc) = self.polish_critical(ts[i] - h, ts[i] + h) {
                    if self.eval(tc).abs() <= 1e-10 * scale {
                        let tc = tc.rem_euclid(TAU);
                        if !zeros.iter().any(|z: &f64| circle_dist(*z, tc) < 1e-6) {
                            zeros.push(tc);
                        }
                    }
                }
            }
        }

        let mut out: Vec<ForcingZero> = zeros
            .into_iter()
            .map(|t| {
                let t = t.rem_euclid(TAU);
                ForcingZero { t, slope: self.derivative(t) }
            })
            .collect();
        out.sort_by(|a, b| a.t.total_cmp(&b.t));
        out.dedup_by(|a, b| circle_dist(a.t, b.t) < 1e-10);

        self.degenerate = out
            .iter()
            .copied()
            .find(|z| z.slope.abs() < DEGENERATE_SLOPE);
        self.zeros = out;
    }

    /// Bracketed Newton on `g` over `[lo, hi]` with a sign change.
    fn polish_root(&self, mut lo: f64, mut hi: f64) -> f64 {
        let mut glo = self.eval(lo);
        let mut t = 0.5 * (lo + hi);
        for _ in 0..200 {
            let g = self.eval(t);
            if g == 0.0 {
                return t;
            }
            if (g < 0.0) == (glo < 0.0) {
                lo = t;
                glo = g;
            } else {
                hi = t;
            }
            let d = self.derivative(t);
            let newton = t - g / d;
            t = if d != 0.0 && newton > lo && newton < hi {
                newton
            } else {
                0.5 * (lo + hi)
            };
            if hi - lo < 4.0 * f64::EPSILON * hi.abs().max(1.0) {
                break;
            }
        }
        // pick the better of the last iterate and the bracket ends
        [t, lo, hi]
            .into_iter()
            .min_by(|a, b| self.eval(*a).abs().total_cmp(&self.eval(*b).abs()))
            .unwrap_or(t)
    }

    /// Newton on `g'` near a local extremum of `g`.
    fn polish_critical(&self, lo: f64, hi: f64) -> Option<f64> {
        let mut t = 0.5 * (lo + hi);
        for _ in 0..100 {
            let d2 = self.second_derivative(t);
            if d2 == 0.0 {
                return None;
            }
            let step = self.derivative(t) / d2;
            t -= step;
            if !(lo - PI / 64.0..=hi + PI / 64.0).contains(&t) {
                return None;
            }
            if step.abs() < 1e-15 {
                break;
            }
        }
        Some(t)
    }
}

fn circle_dist(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(TAU);
    d.min(TAU - d)
}

/// JSON form `{"cos": [c1, c2, ...], "sin": [s1, ...]}`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ForcingSpec {
    #[serde(default)]
    pub cos: Vec<f64>,
    #[serde(default)]
    pub sin: Vec<f64>,
}

impl Serialize for ForcingProfile {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        ForcingSpec { cos: self.cos_coeffs.clone(), sin: self.sin_coeffs.clone() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for ForcingProfile {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let spec = ForcingSpec::deserialize(d)?;
        ForcingProfile::new(spec.cos, spec.sin).map_err(serde::de::Error::custom)
    }
}

impl Default for ForcingProfile {
    fn default() -> Self {
        Self::cosine()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_2;

    #[test]
    fn cosine_zeros_and_slopes() {
        let g = ForcingProfile::cosine();
        let rep = g.transversality_report().unwrap();
        assert_eq!(rep.zeros.len(), 2);
        assert!((rep.zeros[0].t - FRAC_PI_2).abs() < 1e-14);
        assert!((rep.zeros[1].t - 3.0 * FRAC_PI_2).abs() < 1e-14);
        assert!((rep.zeros[0].slope + 1.0).abs() < 1e-14);
        assert!((rep.zeros[1].slope - 1.0).abs() < 1e-14);
        assert!(rep.is_even);
    }

    #[test]
    fn antiderivative_values() {
        let g = ForcingProfile::cosine();
        assert!((g.antiderivative(FRAC_PI_2) - 1.0).abs() < 1e-15);
        let g2 = ForcingProfile::new(vec![0.0, 1.0], vec![]).unwrap();
        assert!((g2.antiderivative(PI / 4.0) - 0.5).abs() < 1e-15);
        let mixed = ForcingProfile::new(vec![0.3, -1.2, 0.5], vec![0.7, 0.1]).unwrap();
        assert!(mixed.antiderivative(TAU).abs() < 1e-14);
        assert_eq!(mixed.antiderivative(0.0), 0.0);
    }

    #[test]
    fn two_harmonic_zeros_match_closed_form() {
        // cos t + 0.1 cos 2t = 0  <=>  0.2 c^2 + c - 0.1 = 0 with c = cos t
        let g = ForcingProfile::new(vec![1.0, 0.1], vec![]).unwrap();
        let c = (-1.0 + (1.0_f64 + 0.08).sqrt()) / 0.4;
        let t0 = c.acos();
        let rep = g.transversality_report().unwrap();
        assert_eq!(rep.zeros.len(), 2);
        assert!((rep.zeros[0].t - t0).abs() < 1e-13);
        assert!((rep.zeros[1].t - (TAU - t0)).abs() < 1e-13);
        for z in &rep.zeros {
            assert!(g.eval(z.t).abs() <= 1e-12);
            assert!(z.slope.abs() > 0.5);
        }
        assert!(rep.is_even);
    }

    #[test]
    fn mean_is_dropped() {
        // 1 - cos t loses its constant and becomes -cos t
        let g = ForcingProfile::with_mean_removed(1.0, vec![-1.0], vec![]).unwrap();
        let rep = g.transversality_report().unwrap();
        assert_eq!(rep.zeros.len(), 2);
        assert!((rep.zeros[0].slope - 1.0).abs() < 1e-14);
        assert!((rep.zeros[1].slope + 1.0).abs() < 1e-14);
    }

    #[test]
    fn double_zero_is_degenerate() {
        // cos 2t - cos 4t touches zero at t = 0 and t = π
        let g = ForcingProfile::new(vec![0.0, 1.0, 0.0, -1.0], vec![]).unwrap();
        assert!(matches!(
            g.transversality_report(),
            Err(Error::DegenerateForcing { .. })
        ));
    }

    #[test]
    fn odd_forcing_not_even() {
        let g = ForcingProfile::new(vec![], vec![1.0]).unwrap();
        let rep = g.transversality_report().unwrap();
        assert!(!rep.is_even);
        assert_eq!(rep.zeros.len(), 2);
    }

    #[test]
    fn json_round_trip() {
        let g = ForcingProfile::new(vec![1.0, 0.2], vec![0.0, 0.3]).unwrap();
        let s = serde_json::to_string(&g).unwrap();
        assert_eq!(s, r#"{"cos":[1.0,0.2],"sin":[0.0,0.3]}"#);
        let back: ForcingProfile = serde_json::from_str(&s).unwrap();
        assert_eq!(back, g);
    }

    #[test]
    fn zero_forcing_is_degenerate() {
        assert!(ForcingProfile::zero().transversality_report().is_err());
    }
}
