//! End-to-end acceptance run. One line per criterion; exits non-zero on any failure.
//!
//! `UPDATE_GOLDEN=1 cargo test -p tongue-core --test acceptance` rewrites the SVG golden file.

use std::f64::consts::{PI, TAU};
use std::path::PathBuf;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use tongue_core::bessel::{bessel_asymptotic, bessel_j, bessel_j_at_neg, bessel_j_integral, gen_bessel, gen_bessel_asymptotic};
use tongue_core::moebius::{circle_distance, FixedPoints};
use tongue_core::roots::bisect_predicate;
use tongue_core::scan::{scan_plane, ScanGrid};
use tongue_core::stats::{decade_trend, log_grid, log_grid_len, loglog_slope};
use tongue_core::svg::{render_svg, SvgStyle};
use tongue_core::tongue::TongueTracer;
use tongue_core::verify::{GridSpec, Regime, Verifier};
use tongue_core::*;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn verifier() -> Verifier {
    // c1 = 0.3 leaves nothing of b in [20, 100] for k = 1, 2 at μ = 0.4
    Verifier { regime: Regime { c1: 0.7, c2: 10.0 }, ..Verifier::default() }
}

fn c1_closed_form() -> Result<Outcome> {
    let g = ForcingProfile::cosine();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut worst = 0.0_f64;
    for _ in 0..50 {
        let a = rng.gen_range(1.0 + 1e-9..=5.0) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
        let mu = rng.gen_range(0.3..=3.0);
        let rho = rotation_number(&Params::new(a, 0.0, mu)?, &g)?;
        worst = worst.max((rho.value - autonomous_rho(a, mu)).abs());
    }
    Ok(outcome(worst <= 1e-8, format!("max |rho - closed form| = {worst:.2e} (tol 1e-8, 50 draws)")))
}

fn c2_moebius() -> Result<Outcome> {
    let g = ForcingProfile::cosine();
    let cfg = IntegratorConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let (mut err, mut drift) = (0.0_f64, 0.0_f64);
    for _ in 0..20 {
        let mu = rng.gen_range(0.05_f64.ln()..10.0_f64.ln()).exp();
        let b = if rng.gen_bool(0.1) { 0.0 } else { rng.gen_range(0.01_f64.ln()..1000.0_f64.ln()).exp() };
        let amax = 1.0 + b + 10.0 * mu;
        let a = rng.gen_range(-amax..amax);
        let p = Params::new(a, b, mu)?;
        let m = monodromy(&p, &g, &cfg)?;
        drift = drift.max(m.det_drift);
        for _ in 0..20 {
            let x0 = rng.gen_range(-10.0..10.0);
            let direct = integrate_flow(&p, &g, x0, 0.0, TAU, &cfg)?.x1;
            err = err.max((apply_lifted(&m, x0) - direct).abs());
        }
    }
    Ok(outcome(
        err <= 1e-8 && drift <= 1e-9,
        format!("max |lift - direct| = {err:.2e} (tol 1e-8), det drift = {drift:.2e} (tol 1e-9)"),
    ))
}

fn c3_fixed_points() -> Result<Outcome> {
    let g = ForcingProfile::cosine();
    let cfg = IntegratorConfig::default();
    let tracer = TongueTracer::default();
    let mu = 0.4;
    let mut worst = 0.0_f64;
    let mut bad = Vec::new();
    for k in 0..=2 {
        for b in [5.0, 20.0, 40.0] {
            let bp = tracer.boundary_at(k, b, mu)?;
            for (a, target) in [(bp.a0, 0.0), (bp.api, PI)] {
                let m = monodromy(&Params::new(a, b, mu)?, &g, &cfg)?;
                let d = match fixed_points(&m) {
                    FixedPoints::One(p) => circle_distance(p.x, target),
                    FixedPoints::All => 0.0,
                    FixedPoints::Two(ps) => {
                        bad.push(format!("k={k} b={b} hyperbolic"));
                        ps.iter().map(|p| circle_distance(p.x, target)).fold(f64::INFINITY, f64::min)
                    }
                    FixedPoints::None => {
                        bad.push(format!("k={k} b={b} elliptic"));
                        f64::INFINITY
                    }
                };
                worst = worst.max(d);
            }
        }
    }
    let mut detail = format!("max fixed-point distance = {worst:.2e} (tol 1e-6, 18 boundaries)");
    if !bad.is_empty() {
        detail.push_str(&format!("; not parabolic: {}", bad.join(", ")));
    }
    Ok(outcome(bad.is_empty() && worst <= 1e-6, detail))
}

fn c4_decay() -> Result<Outcome> {
    let v = verifier();
    let grid = GridSpec { b_min: 20.0, b_max: 100.0, per_decade: 12 };
    let mut pass = true;
    let mut parts = Vec::new();
    for k in 0..=2 {
        let (_, [s0, spi]) = v.thm2_series(k, 0.4, &grid, 16)?;
        let ok = (-1.3..=-0.7).contains(&s0.slope) && s0.trend.bounded(2.0);
        pass &= ok;
        parts.push(format!(
            "k={k}: slope {:.3} (pointwise {:.3}, a_pi {:.3}) trend {:.2}",
            s0.slope, s0.slope_pointwise, spi.slope, s0.trend.ratio
        ));
    }
    Ok(outcome(pass, format!("{} (window [-1.3, -0.7], trend <= 2; per-period maxima)", parts.join("; "))))
}

fn c5_spacing() -> Result<Outcome> {
    let (rec, b_stars) = verifier().eq7_spacing(1, 0.4, (20.0, 60.0))?;
    Ok(outcome(
        b_stars.len() >= 2 && rec.raw <= 0.05,
        format!("{} adjacencies, max |spacing/(pi mu) - 1| = {:.2e} (tol 0.05)", b_stars.len(), rec.raw),
    ))
}

fn c6_adjacency_line() -> Result<Outcome> {
    let tracer = TongueTracer::default();
    let mut pass = true;
    let mut parts = Vec::new();
    for k in 0..=1 {
        let adj = tracer.find_adjacencies(k, (5.0, 30.0), 1.0)?;
        let off = adj.iter().map(|p| (p.a_star - k as f64).abs()).fold(0.0, f64::max);
        let defect = adj.iter().map(|p| p.identity_defect).fold(0.0, f64::max);
        pass &= !adj.is_empty() && off <= 1e-6 && defect <= 1e-6;
        parts.push(format!("k={k}: {} points, |a*-k mu| <= {off:.1e}, defect <= {defect:.1e}", adj.len()));
    }
    Ok(outcome(pass, format!("{} (tol 1e-6)", parts.join("; "))))
}

fn c7_no_plateau() -> Result<Outcome> {
    let g = ForcingProfile::cosine();
    let (b, mu) = (2.0, 0.7);
    let rho = |a: f64| -> Result<f64> { Ok(rotation_number(&Params::new(a, b, mu)?, &g)?.value) };
    let (lo, hi) = (0.15, 0.20);
    if !(rho(lo)? < 0.5 && rho(hi)? > 0.5) {
        return Ok(outcome(false, "rho = 1/2 not bracketed on [0.15, 0.20]".into()));
    }
    let (_, ge) = bisect_predicate(|a| Ok(rho(a)? >= 0.5), lo, hi, 1e-14)?;
    let (_, gt) = bisect_predicate(|a| Ok(rho(a)? > 0.5), lo, hi, 1e-14)?;
    let width = gt - ge;
    let (below, above) = (rho(ge - 1e-6)?, rho(ge + 1e-6)?);
    Ok(outcome(
        below != 0.5 && above != 0.5 && width <= 1e-10,
        format!(
            "a(1/2) = {ge:.15}, rho(a -+ 1e-6) - 1/2 = {:.2e}, {:.2e}, plateau width = {width:.1e} (tol 1e-10)",
            below - 0.5,
            above - 0.5
        ),
    ))
}

fn c8_envelopes() -> Result<Outcome> {
    let v = verifier();
    let grid = GridSpec { b_min: 20.0, b_max: 2000.0, per_decade: 12 };
    let (_, t1) = v.thm1_series(1, 0.4, &grid)?;
    let (_, osc) = v.osc_series(1, 0.4, &grid)?;
    let max_raw = t1.raw.iter().fold(0.0_f64, |m, r| m.max(*r));
    Ok(outcome(
        t1.trend.bounded(2.0) && osc.trend.bounded(2.0),
        format!(
            "|k - rho| sqrt(b mu): medians {:.2e} -> {:.2e} (max raw {max_raw:.1e}); sup|int cos x| sqrt(b/mu): {:.3} -> {:.3} (trend <= 2)",
            t1.trend.bottom_median, t1.trend.top_median, osc.trend.bottom_median, osc.trend.top_median
        ),
    ))
}

fn c9_bessel() -> Result<Outcome> {
    let mut dual = 0.0_f64;
    for k in -4..=5 {
        for i in 0..10 {
            let z = -200.0 + 400.0 * i as f64 / 9.0 + 0.37;
            dual = dual.max((bessel_j(k, z) - bessel_j_integral(k, z)?).abs());
        }
    }
    let cos = ForcingProfile::cosine();
    let mut reduction = 0.0_f64;
    for k in -3..=3 {
        for z in [0.5, 3.0, 17.0, 60.0, 150.0] {
            reduction = reduction.max((gen_bessel(k, z, &cos)? - bessel_j_at_neg(k, z)).abs());
        }
    }
    let zs = log_grid(10.0, 500.0, log_grid_len(10.0, 500.0, 40));
    let mut asym_ratio = 0.0_f64;
    for k in 0..=3 {
        let scaled: Vec<f64> = zs
            .iter()
            .map(|&z| Ok((bessel_asymptotic(k, z)? - bessel_j_at_neg(k, z)).abs() * z.powf(1.5)))
            .collect::<Result<_>>()?;
        asym_ratio = asym_ratio.max(decade_trend(&zs, &scaled).ratio);
    }
    let g2 = ForcingProfile::new(vec![1.0, 0.2], vec![])?;
    let zs2 = log_grid(20.0, 200.0, log_grid_len(20.0, 200.0, 30));
    let mut sp_ratio = 0.0_f64;
    let mut sp_slope = f64::NEG_INFINITY;
    for k in 0..=3 {
        let err: Vec<f64> = zs2
            .iter()
            .map(|&z| Ok((gen_bessel_asymptotic(k, z, &g2)? - gen_bessel(k, z, &g2)?).abs()))
            .collect::<Result<_>>()?;
        sp_ratio = sp_ratio.max(decade_trend(&zs2, &err).ratio);
        sp_slope = sp_slope.max(loglog_slope(&zs2, &err));
    }
    Ok(outcome(
        dual <= 1e-10 && reduction <= 1e-10 && asym_ratio <= 2.0 && sp_ratio < 1.0,
        format!(
            "dual route {dual:.1e}, cos reduction {reduction:.1e} (tol 1e-10); asymptotic err z^1.5 trend {asym_ratio:.2} (<= 2); stationary phase err trend {sp_ratio:.2} (< 1), slope {sp_slope:.2}"
        ),
    ))
}

fn golden_path() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden/small_scan.svg")
}

fn small_svg() -> Result<String> {
    let grid = ScanGrid { a_steps: 20, b_steps: 20, k_range: (-2, 2), ..ScanGrid::default() };
    let cells = scan_plane(&grid, &ForcingProfile::cosine(), &IntegratorConfig::default())?;
    let b_grid: Vec<f64> = (0..=8).map(|i| 0.5 * i as f64).collect();
    let tracer = TongueTracer::default();
    let mut boundaries = Vec::new();
    for k in -2..=2 {
        boundaries.extend(tracer.trace_boundary(k, &b_grid, grid.mu).into_iter().filter_map(|r| r.ok()));
    }
    let style = SvgStyle { mu: Some(grid.mu), k_range: grid.k_range, ..SvgStyle::default() };
    render_svg(&cells, &boundaries, &style)
}

fn c10_figure() -> Result<Outcome> {
    let grid = ScanGrid::default();
    let start = Instant::now();
    let cells = scan_plane(&grid, &ForcingProfile::cosine(), &IntegratorConfig::default())?;
    let elapsed = start.elapsed();
    let failed = cells.iter().filter(|c| c.is_failed()).count();
    let missing: Vec<i64> = (-4..=4).filter(|k| !cells.iter().any(|c| c.k == Some(*k))).collect();
    let da = (grid.a_max - grid.a_min) / (grid.a_steps - 1) as f64;
    let row_bad = cells[..grid.a_steps]
        .iter()
        .filter(|c| {
            let zero = c.locked && c.k == Some(0);
            (c.a.abs() < 1.0 - da && !zero) || (c.a.abs() > 1.0 + da && zero)
        })
        .count();

    let svg = small_svg()?;
    let path = golden_path();
    let golden = if std::env::var_os("UPDATE_GOLDEN").is_some() {
        std::fs::create_dir_all(path.parent().unwrap_or(&path)).ok();
        std::fs::write(&path, &svg).is_ok()
    } else {
        std::fs::read_to_string(&path).map(|g| g == svg).unwrap_or(false)
    };
    let stable = small_svg()? == svg;

    Ok(outcome(
        elapsed <= Duration::from_secs(300) && failed == 0 && missing.is_empty() && row_bad == 0 && golden && stable,
        format!(
            "300x300 scan {:.1}s (limit 300s), {failed} failed cells, missing tongues {missing:?}, b=0 row misfits {row_bad}, golden svg {}",
            elapsed.as_secs_f64(),
            if golden && stable { "match" } else { "MISMATCH" }
        ),
    ))
}

type Criterion = (&'static str, Option<Duration>, fn() -> Result<Outcome>);

fn main() {
    let criteria: [Criterion; 10] = [
        ("1 b=0 closed form", Some(Duration::from_secs(10)), c1_closed_form),
        ("2 Moebius consistency", Some(Duration::from_secs(60)), c2_moebius),
        ("3 boundary fixed points", None, c3_fixed_points),
        ("4 boundary residual decay", Some(Duration::from_secs(300)), c4_decay),
        ("5 adjacency spacing", None, c5_spacing),
        ("6 adjacency line", None, c6_adjacency_line),
        ("7 no non-integer plateau", None, c7_no_plateau),
        ("8 rotation and oscillation envelopes", None, c8_envelopes),
        ("9 Bessel kit", None, c9_bessel),
        ("10 parameter-plane figure", None, c10_figure),
    ];
    let mut failures = 0;
    for (name, limit, run) in criteria {
        let start = Instant::now();
        let res = run();
        let elapsed = start.elapsed();
        let (pass, detail) = match res {
            Ok(o) => (o.pass, o.detail),
            Err(e) => (false, format!("error: {e}")),
        };
        let in_time = limit.is_none_or(|l| elapsed <= l);
        let pass = pass && in_time;
        if !pass {
            failures += 1;
        }
        let limit = limit.map(|l| format!(" / {}s", l.as_secs())).unwrap_or_default();
        println!(
            "[{}] {name}: {detail} [{:.1}s{limit}]",
            if pass { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64()
        );
    }
    println!("{} of 10 criteria passed", 10 - failures);
    if failures > 0 {
        std::process::exit(1);
    }
}
