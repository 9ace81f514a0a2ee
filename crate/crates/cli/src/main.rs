//! `tongues`: rotation numbers, tongue boundaries, scans and reports from the command line.

mod config;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::json;

use tongue_core::bessel::{bessel_asymptotic, bessel_j_at_neg, bessel_j_eval, bessel_j_integral, gen_bessel};
use tongue_core::scan::{scan_plane, ScanCell, ScanGrid, SCAN_CSV_HEADER};
use tongue_core::svg::{render_svg, SvgStyle};
use tongue_core::tongue::{BoundaryPoint, TongueTracer, BOUNDARY_CSV_HEADER, SMALL_B};
use tongue_core::verify::{run_plan, VerifyPlan};
use tongue_core::{fmt17, rotation_number_iterated, ForcingProfile, Params};

use config::FileConfig;

#[derive(Debug)]
pub enum CliError {
    /// Bad flags, files or parameters: exit 1.
    Usage(String),
    /// Numerical failure (regime, bracketing, stepping): exit 2.
    Numeric(String),
}

impl From<tongue_core::Error> for CliError {
    fn from(e: tongue_core::Error) -> Self {
        use tongue_core::Error as E;
        match e {
            E::InvalidParams(_) | E::InvalidForcing(_) => CliError::Usage(e.to_string()),
            _ => CliError::Numeric(e.to_string()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
enum Format {
    Csv,
    Json,
    Svg,
}

#[derive(Debug, Parser)]
#[command(name = "tongues", version, about = "Arnold tongues of dx/dt = (cos x + a + b g(t)) / mu")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
    #[arg(long, global = true, allow_hyphen_values = true)]
    a: Option<f64>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    b: Option<f64>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    mu: Option<f64>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    k: Option<i64>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    a_min: Option<f64>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    a_max: Option<f64>,
    #[arg(long, global = true)]
    a_steps: Option<usize>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    b_min: Option<f64>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    b_max: Option<f64>,
    #[arg(long, global = true)]
    b_steps: Option<usize>,
    /// Root tolerance in `a` for boundaries.
    #[arg(long, global = true, allow_hyphen_values = true)]
    tol_a: Option<f64>,
    /// JSON config file; flags override its fields.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output file (stdout when absent).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Worker threads.
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Forcing as inline JSON `{"cos":[..],"sin":[..]}` or a path to such a file.
    #[arg(long, global = true)]
    forcing: Option<String>,
}

#[derive(Debug, Subcommand)]
enum Cmd {
    /// Rotation number at one parameter point.
    Rho {
        /// Also estimate by integrating this many periods.
        #[arg(long)]
        periods: Option<usize>,
    },
    /// Trace both boundaries of tongue k over a linear b grid.
    Boundary,
    /// Rotation numbers on an (a, b) grid.
    Scan,
    /// Zero-width sections of tongue k.
    Adjacency,
    /// J_k(-z) by every available route.
    Bessel {
        /// Argument; defaults to b/mu.
        #[arg(long, allow_hyphen_values = true)]
        z: Option<f64>,
    },
    /// Residual report for the asymptotic estimates.
    Verify,
    /// Render scan and boundary CSV files as SVG.
    Render {
        #[arg(long)]
        scan: Option<PathBuf>,
        #[arg(long)]
        boundary: Vec<PathBuf>,
    },
}

/// Settings after merging flags, config file and defaults.
struct Ctx {
    cli: Cli,
    file: FileConfig,
    tracer: TongueTracer,
}

fn pick<T>(flag: Option<T>, file: Option<T>) -> Option<T> {
    flag.or(file)
}

fn require<T>(v: Option<T>, name: &str) -> Result<T, CliError> {
    v.ok_or_else(|| CliError::Usage(format!("missing --{name}")))
}

impl Ctx {
    fn new(cli: Cli) -> Result<Self, CliError> {
        let file = FileConfig::load(cli.config.as_deref())?;
        let forcing = match &cli.forcing {
            Some(s) => parse_forcing(s)?,
            None => file.forcing.clone().unwrap_or_default(),
        };
        let cfg = file.integrator.unwrap_or_default();
        cfg.validate()?;
        let tol_a = pick(cli.tol_a, file.tol_a).unwrap_or(1e-12);
        if !(tol_a > 0.0) {
            return Err(CliError::Usage("--tol-a must be positive".into()));
        }
        let tracer = TongueTracer { forcing, cfg, tol_a, check_monotone: true };
        Ok(Self { cli, file, tracer })
    }

    fn mu(&self) -> f64 {
        pick(self.cli.mu, self.file.mu).unwrap_or(0.4)
    }

    fn k(&self) -> i64 {
        pick(self.cli.k, self.file.k).unwrap_or(1)
    }

    fn format(&self, default: Format) -> Result<Format, CliError> {
        if let Some(f) = self.cli.format {
            return Ok(f);
        }
        match self.file.format.as_deref() {
            None => Ok(default),
            Some(s) => Format::from_str(s, true).map_err(|_| CliError::Usage(format!("unknown format {s}"))),
        }
    }

    fn style(&self) -> SvgStyle {
        self.file.style.clone().unwrap_or_default()
    }

    fn b_range(&self, lo: f64, hi: Option<f64>) -> Result<(f64, f64), CliError> {
        let b_min = pick(self.cli.b_min, self.file.b_min).unwrap_or(lo);
        let b_max = require(pick(self.cli.b_max, self.file.b_max).or(hi), "b-max")?;
        if !(b_max > b_min) || b_min < 0.0 {
            return Err(CliError::Usage(format!("need 0 <= b-min < b-max, got [{b_min}, {b_max}]")));
        }
        Ok((b_min, b_max))
    }
}

fn parse_forcing(s: &str) -> Result<ForcingProfile, CliError> {
    let text = if s.trim_start().starts_with('{') {
        s.to_string()
    } else {
        std::fs::read_to_string(s).map_err(|e| CliError::Usage(format!("cannot read forcing {s}: {e}")))?
    };
    serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("bad forcing: {e}")))
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| CliError::Usage(format!("cannot write {}: {e}", path.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .map_err(|e| CliError::Usage(format!("stdout: {e}")))
        }
    }
}

fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serialisable");
    s.push('\n');
    s
}

fn run(ctx: &Ctx) -> Result<(), CliError> {
    let out = ctx.cli.out.as_deref();
    match &ctx.cli.cmd {
        Cmd::Rho { periods } => {
            let a = require(pick(ctx.cli.a, ctx.file.a), "a")?;
            let b = require(pick(ctx.cli.b, ctx.file.b), "b")?;
            let p = Params::new(a, b, ctx.mu())?;
            let r = tongue_core::rotation::rotation_number_with(&p, &ctx.tracer.forcing, &ctx.tracer.cfg)?;
            match ctx.format(Format::Json)? {
                Format::Csv => {
                    let cell = ScanCell { a, b, rho: r.value, locked: r.locked, k: r.k };
                    emit(out, &format!("{SCAN_CSV_HEADER}\n{}\n", cell.csv_row(p.mu)))
                }
                Format::Json => {
                    let mut v = json!({"a": a, "b": b, "mu": p.mu, "rho": r.value, "locked": r.locked, "k": r.k});
                    if let Some(n) = pick(*periods, ctx.file.periods) {
                        let it = rotation_number_iterated(&p, &ctx.tracer.forcing, n, &ctx.tracer.cfg)?;
                        v["rho_iterated"] = json!(it.value);
                        v["periods"] = json!(n);
                    }
                    emit(out, &to_json(&v))
                }
                Format::Svg => Err(CliError::Usage("rho has no svg output".into())),
            }
        }
        Cmd::Boundary => {
            let (b_min, b_max) = ctx.b_range(0.0, None)?;
            let steps = pick(ctx.cli.b_steps, ctx.file.b_steps).unwrap_or(50);
            if steps < 2 {
                return Err(CliError::Usage("--b-steps must be at least 2".into()));
            }
            let grid: Vec<f64> = (0..steps)
                .map(|i| if i + 1 == steps { b_max } else { b_min + (b_max - b_min) * i as f64 / (steps - 1) as f64 })
                .collect();
            let nodes = ctx.tracer.trace_boundary(ctx.k(), &grid, ctx.mu());
            let mut points = Vec::new();
            let mut failures = Vec::new();
            for (b, node) in grid.iter().zip(nodes) {
                match node {
                    Ok(p) => points.push(p),
                    Err(e) => failures.push(json!({"b": b, "error": e.to_string()})),
                }
            }
            let text = match ctx.format(Format::Csv)? {
                Format::Csv => {
                    let mut s = format!("{BOUNDARY_CSV_HEADER}\n");
                    for p in &points {
                        s.push_str(&p.csv_row());
                        s.push('\n');
                    }
                    s
                }
                Format::Json => to_json(&json!({"points": points, "failures": failures})),
                Format::Svg => {
                    let style = SvgStyle { mu: Some(ctx.mu()), ..ctx.style() };
                    render_svg(&[], &points, &style)?
                }
            };
            emit(out, &text)?;
            if failures.is_empty() {
                Ok(())
            } else {
                Err(CliError::Numeric(format!("{} of {} nodes failed", failures.len(), grid.len())))
            }
        }
        Cmd::Scan => {
            let base = ctx.file.grid.unwrap_or_default();
            let grid = ScanGrid {
                a_min: pick(ctx.cli.a_min, ctx.file.a_min).unwrap_or(base.a_min),
                a_max: pick(ctx.cli.a_max, ctx.file.a_max).unwrap_or(base.a_max),
                a_steps: pick(ctx.cli.a_steps, ctx.file.a_steps).unwrap_or(base.a_steps),
                b_min: pick(ctx.cli.b_min, ctx.file.b_min).unwrap_or(base.b_min),
                b_max: pick(ctx.cli.b_max, ctx.file.b_max).unwrap_or(base.b_max),
                b_steps: pick(ctx.cli.b_steps, ctx.file.b_steps).unwrap_or(base.b_steps),
                mu: pick(ctx.cli.mu, ctx.file.mu).unwrap_or(base.mu),
                k_range: ctx.file.k_range.unwrap_or(base.k_range),
            };
            let cells = scan_plane(&grid, &ctx.tracer.forcing, &ctx.tracer.cfg)?;
            let text = match ctx.format(Format::Csv)? {
                Format::Csv => {
                    let mut s = format!("{SCAN_CSV_HEADER}\n");
                    for c in &cells {
                        s.push_str(&c.csv_row(grid.mu));
                        s.push('\n');
                    }
                    s
                }
                Format::Json => to_json(&json!({"grid": grid, "cells": cells})),
                Format::Svg => {
                    let style = SvgStyle { mu: Some(grid.mu), k_range: grid.k_range, ..ctx.style() };
                    render_svg(&cells, &[], &style)?
                }
            };
            emit(out, &text)?;
            let failed = cells.iter().filter(|c| c.is_failed()).count();
            if failed == 0 {
                Ok(())
            } else {
                Err(CliError::Numeric(format!("{failed} cells failed")))
            }
        }
        Cmd::Adjacency => {
            let range = ctx.b_range(0.0, None)?;
            let adj = ctx.tracer.find_adjacencies(ctx.k(), range, ctx.mu())?;
            let text = match ctx.format(Format::Csv)? {
                Format::Csv => {
                    let mut s = String::from("k,mu,b_star,a_star,gap,identity_defect\n");
                    for p in &adj {
                        s.push_str(&format!(
                            "{},{},{},{},{},{}\n",
                            p.k,
                            fmt17(p.mu),
                            fmt17(p.b_star),
                            fmt17(p.a_star),
                            fmt17(p.gap),
                            fmt17(p.identity_defect)
                        ));
                    }
                    s
                }
                Format::Json => to_json(&adj),
                Format::Svg => return Err(CliError::Usage("adjacency has no svg output".into())),
            };
            emit(out, &text)
        }
        Cmd::Bessel { z } => {
            let k = ctx.k();
            let z = match pick(*z, ctx.file.z) {
                Some(z) => z,
                None => require(pick(ctx.cli.b, ctx.file.b), "z or --b")? / ctx.mu(),
            };
            let eval = bessel_j_eval(k, -z);
            let mut v = json!({
                "k": k,
                "z": z,
                "value": bessel_j_at_neg(k, z),
                "route": eval.route,
                "integral": bessel_j_integral(k, -z)?,
                "asymptotic": bessel_asymptotic(k, z).ok(),
            });
            if ctx.tracer.forcing != ForcingProfile::cosine() {
                v["generalized"] = json!(gen_bessel(k, z, &ctx.tracer.forcing)?);
                v["generalized_asymptotic"] =
                    json!(tongue_core::bessel::gen_bessel_asymptotic(k, z, &ctx.tracer.forcing).ok());
            }
            match ctx.format(Format::Json)? {
                Format::Json => emit(out, &to_json(&v)),
                _ => Err(CliError::Usage("bessel writes json only".into())),
            }
        }
        Cmd::Verify => {
            let mut plan: VerifyPlan = ctx.file.plan.clone().unwrap_or_default();
            if let Some(mu) = ctx.cli.mu {
                plan.mu = mu;
            }
            if let Some(k) = ctx.cli.k {
                plan.ks = vec![k];
                plan.thm1_k = k;
                plan.spacing_k = k;
            }
            if let (Some(lo), Some(hi)) = (ctx.cli.b_min, ctx.cli.b_max) {
                plan.thm2_grid.b_min = lo;
                plan.thm2_grid.b_max = hi;
            }
            let report = run_plan(&plan, &ctx.tracer)?;
            match ctx.format(Format::Json)? {
                Format::Json => emit(out, &to_json(&report))?,
                _ => return Err(CliError::Usage("verify writes json only".into())),
            }
            if report.asserted_ok() {
                Ok(())
            } else {
                Err(CliError::Numeric("asserted checks failed; see report".into()))
            }
        }
        Cmd::Render { scan, boundary } => {
            let cells = match scan {
                Some(path) => read_scan(path)?,
                None => Vec::new(),
            };
            let mut points = Vec::new();
            for path in boundary {
                points.extend(read_boundary(path)?);
            }
            let mu = cells_mu(scan.as_deref())?.or(points.first().map(|p| p.mu)).or(ctx.cli.mu);
            let style = SvgStyle { mu: mu.or(ctx.style().mu), ..ctx.style() };
            match ctx.format(Format::Svg)? {
                Format::Svg => emit(out, &render_svg(&cells, &points, &style)?),
                _ => Err(CliError::Usage("render writes svg only".into())),
            }
        }
    }
}

#[derive(Deserialize)]
struct ScanRow {
    a: f64,
    b: f64,
    mu: f64,
    rho: f64,
    locked: bool,
    k: Option<i64>,
}

fn csv_reader(path: &Path) -> Result<csv::Reader<std::fs::File>, CliError> {
    csv::Reader::from_path(path).map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))
}

fn read_scan(path: &Path) -> Result<Vec<ScanCell>, CliError> {
    csv_reader(path)?
        .deserialize::<ScanRow>()
        .map(|r| {
            r.map(|r| ScanCell { a: r.a, b: r.b, rho: r.rho, locked: r.locked, k: r.k })
                .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
        })
        .collect()
}

fn cells_mu(path: Option<&Path>) -> Result<Option<f64>, CliError> {
    let Some(path) = path else { return Ok(None) };
    let mut rows = csv_reader(path)?.into_deserialize::<ScanRow>();
    Ok(rows.next().and_then(|r| r.ok()).map(|r| r.mu))
}

#[derive(Deserialize)]
struct BoundaryRow {
    k: i64,
    b: f64,
    mu: f64,
    a0: f64,
    api: f64,
    a_minus: f64,
    a_plus: f64,
    width: f64,
    bessel_pred_0: f64,
    bessel_pred_pi: f64,
    residual_0: f64,
    residual_pi: f64,
}

fn read_boundary(path: &Path) -> Result<Vec<BoundaryPoint>, CliError> {
    csv_reader(path)?
        .deserialize::<BoundaryRow>()
        .map(|r| {
            r.map(|r| BoundaryPoint {
                k: r.k,
                b: r.b,
                mu: r.mu,
                a0: r.a0,
                api: r.api,
                a_minus: r.a_minus,
                a_plus: r.a_plus,
                width: r.width,
                bessel_pred_0: r.bessel_pred_0,
                bessel_pred_pi: r.bessel_pred_pi,
                residual_0: r.residual_0,
                residual_pi: r.residual_pi,
                closed_form: r.b < SMALL_B,
                monotone_checked: false,
            })
            .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
        })
        .collect()
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let workers = cli.workers;
    let result = Ctx::new(cli).and_then(|ctx| {
        let workers = workers.or(ctx.file.workers);
        match workers {
            Some(0) => Err(CliError::Usage("--workers must be at least 1".into())),
            Some(n) => rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| CliError::Usage(e.to_string()))?
                .install(|| run(&ctx)),
            None => run(&ctx),
        }
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(CliError::Numeric(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
