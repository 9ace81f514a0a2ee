//! Small statistics used by the trend checks.

/// Median of a non-empty slice (NaNs sorted last).
pub fn median(xs: &[f64]) -> f64 {
    assert!(!xs.is_empty(), "median of empty slice");
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Least-squares slope of `ln y` against `ln x`, ignoring non-positive pairs.
pub fn loglog_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let pts: Vec<(f64, f64)> = xs
        .iter()
        .zip(ys)
        .filter(|(x, y)| **x > 0.0 && **y > 0.0)
        .map(|(x, y)| (x.ln(), y.ln()))
        .collect();
    linear_slope(&pts)
}

fn linear_slope(pts: &[(f64, f64)]) -> f64 {
    let n = pts.len() as f64;
    if pts.len() < 2 {
        return f64::NAN;
    }
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    sxy / sxx
}

/// `n` points spaced evenly in `ln` between `lo` and `hi` inclusive.
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    assert!(lo > 0.0 && hi > lo && n >= 2);
    let (l0, l1) = (lo.ln(), hi.ln());
    (0..n)
        .map(|i| {
            if i == 0 {
                lo
            } else if i == n - 1 {
                hi
            } else {
                (l0 + (l1 - l0) * i as f64 / (n - 1) as f64).exp()
            }
        })
        .collect()
}

/// Points per decade needed for `n` on `[lo, hi]` to reach `per_decade` density.
pub fn log_grid_len(lo: f64, hi: f64, per_decade: usize) -> usize {
    ((hi / lo).log10() * per_decade as f64 - 1e-9).ceil() as usize + 1
}

/// Medians of the lowest and highest decade of a log grid.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Trend {
    pub bottom_median: f64,
    pub top_median: f64,
    /// `top_median / bottom_median`.
    pub ratio: f64,
}

impl Trend {
    /// No increasing trend: the top median is at most `factor` times the bottom one.
    pub fn bounded(&self, factor: f64) -> bool {
        self.top_median <= factor * self.bottom_median
    }
}

/// Compare medians of `ys` over the first and last decade of `xs`.
///
/// When the range spans less than two decades the lower and upper thirds are used.
pub fn decade_trend(xs: &[f64], ys: &[f64]) -> Trend {
    assert_eq!(xs.len(), ys.len());
    assert!(!xs.is_empty());
    let (lo, hi) = (xs[0], xs[xs.len() - 1]);
    let (cut_lo, cut_hi) = if hi / lo >= 100.0 {
        (lo * 10.0, hi / 10.0)
    } else {
        let r = (hi / lo).powf(1.0 / 3.0);
        (lo * r, hi / r)
    };
    let bottom: Vec<f64> = xs.iter().zip(ys).filter(|(x, _)| **x <= cut_lo).map(|p| *p.1).collect();
    let top: Vec<f64> = xs.iter().zip(ys).filter(|(x, _)| **x >= cut_hi).map(|p| *p.1).collect();
    let bottom_median = median(&bottom);
    let top_median = median(&top);
    Trend { bottom_median, top_median, ratio: top_median / bottom_median }
}
