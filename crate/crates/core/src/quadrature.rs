//! Composite Gauss–Legendre quadrature.

use std::sync::OnceLock;

use crate::error::{Error, Result};

const ORDER: usize = 16;

/// Nodes and weights of the `ORDER`-point rule on `[-1, 1]` (Newton on `P_n`).
fn rule() -> &'static ([f64; ORDER], [f64; ORDER]) {
    static RULE: OnceLock<([f64; ORDER], [f64; ORDER])> = OnceLock::new();
    RULE.get_or_init(|| {
        let n = ORDER;
        let mut x = [0.0; ORDER];
        let mut w = [0.0; ORDER];
        for i in 0..n.div_ceil(2) {
            let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0, z);
                for j in 2..=n {
                    let p2 = ((2 * j - 1) as f64 * z * p1 - (j - 1) as f64 * p0) / j as f64;
                    p0 = p1;
                    p1 = p2;
                }
                dp = n as f64 * (z * p1 - p0) / (z * z - 1.0);
                let dz = p1 / dp;
                z -= dz;
                if dz.abs() < 1e-16 {
                    break;
                }
            }
            x[i] = -z;
            x[n - 1 - i] = z;
            let wi = 2.0 / ((1.0 - z * z) * dp * dp);
            w[i] = wi;
            w[n - 1 - i] = wi;
        }
        (x, w)
    })
}

/// `∫_lo^hi f` with `panels` equal Gauss panels.
pub fn gauss_panels<F: Fn(f64) -> f64>(f: &F, lo: f64, hi: f64, panels: usize) -> f64 {
    let (x, w) = rule();
    let h = (hi - lo) / panels as f64;
    let mut total = 0.0;
    for p in 0..panels {
        let mid = lo + (p as f64 + 0.5) * h;
        let mut acc = 0.0;
        for i in 0..ORDER {
            acc += w[i] * f(mid + 0.5 * h * x[i]);
        }
        total += 0.5 * h * acc;
    }
    total
}

/// Doubling composite rule: starts at `panels0` and doubles the panel count
/// until two successive results differ by at most `abs_tol`.
pub fn integrate_adaptive<F: Fn(f64) -> f64>(
    f: &F,
    lo: f64,
    hi: f64,
    panels0: usize,
    abs_tol: f64,
    max_panels: usize,
) -> Result<f64> {
    let mut panels = panels0.max(1);
    let mut prev = gauss_panels(f, lo, hi, panels);
    loop {
        let next_panels = panels * 2;
        if next_panels > max_panels {
            return Err(Error::QuadratureStall { panels, estimate: f64::NAN });
        }
        let next = gauss_panels(f, lo, hi, next_panels);
        let est = (next - prev).abs();
        if est <= abs_tol {
            return Ok(next);
        }
        if next_panels * 2 > max_panels {
            return Err(Error::QuadratureStall { panels: next_panels, estimate: est });
        }
        prev = next;
        panels = next_panels;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights_sum_to_two() {
        let (_, w) = rule();
        assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-14);
    }

    #[test]
    fn polynomial_exactness() {
        // degree 31 is integrated exactly by a 16-point rule
        let f = |x: f64| x.powi(30) + x.powi(31);
        let v = gauss_panels(&f, -1.0, 1.0, 1);
        assert!((v - 2.0 / 31.0).abs() < 1e-14);
    }

    #[test]
    fn oscillatory_integral() {
        let f = |x: f64| (40.0 * x).cos();
        let v = integrate_adaptive(&f, 0.0, 3.0, 4, 1e-13, 1 << 12).unwrap();
        assert!((v - (120.0_f64).sin() / 40.0).abs() < 1e-13);
    }

    #[test]
    fn stall_reported() {
        let f = |x: f64| (1e6 * x * x).sin();
        let r = integrate_adaptive(&f, 0.0, 10.0, 1, 1e-14, 64);
        assert!(matches!(r, Err(Error::QuadratureStall { .. })));
    }
}
