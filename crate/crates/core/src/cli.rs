//! Command-line front end: validation, resonance curves, spectral
//! densities, decay amplitudes and tail constants as CSV or JSON.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use crate::decay::{
    decay_record, default_time_grid, exp_window, geometric_grid, spectral_density, tail_constants,
};
use crate::error::{Error, Result};
use crate::model::{validate_assumptions, ModelConfig, TwoBandModel};
use crate::resonance::{solve_pole, trace_points, DEFAULT_RESIDUAL_TOL};

/// Exit status for computation or assumption failures.
pub const EXIT_FAILURE: u8 = 1;
/// Exit status for usage errors, including unreadable configs.
pub const EXIT_USAGE: u8 = 2;

pub const RESONANCE_HEADER: &str = "x,re_zeta,im_zeta,re_A,im_A,residual,iters";
pub const DENSITY_HEADER: &str = "xi,W";
pub const DECAY_HEADER: &str = "t,re_u,im_u,abs_u,abs_exp,abs_tail,re_u_contour,im_u_contour";

#[derive(Debug, Parser)]
#[command(
    name = "interband",
    version,
    about = "Resonance poles and decay amplitudes of a two-band model coupled to a photon continuum"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub run: RunConfig,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    /// Check the model hypotheses and write a JSON report.
    Validate,
    /// Trace the resonance curve over the upper band.
    Resonance,
    /// Sample the spectral density W(x, xi).
    Density,
    /// Decay amplitude U(t, x) by both methods, with its approximants.
    Decay,
    /// Threshold tail constants and the exponential window.
    Tail,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct RunConfig {
    /// Model config file (`key = value` lines); the reference model when omitted.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Coupling constant.
    #[arg(
        long,
        global = true,
        default_value_t = 0.2,
        allow_negative_numbers = true
    )]
    pub kappa: f64,
    /// Single upper-band energy (defaults to the band center).
    #[arg(long, global = true, conflicts_with = "x_grid")]
    pub x: Option<f64>,
    /// Number of points of the clipped upper-band grid.
    #[arg(long = "x-grid", global = true)]
    pub x_grid: Option<usize>,
    /// First positive time of the decay grid (defaults to T1/4).
    #[arg(long = "t-min", global = true)]
    pub t_min: Option<f64>,
    /// Last time of the decay grid (defaults to 10 T2).
    #[arg(long = "t-max", global = true)]
    pub t_max: Option<f64>,
    /// Geometric time-grid density.
    #[arg(long = "t-per-decade", global = true, default_value_t = 40)]
    pub t_per_decade: usize,
    /// Quadrature tolerance.
    #[arg(long, global = true, default_value_t = 1e-10)]
    pub tol: f64,
    /// Constant of the exponential-window equation.
    #[arg(long, global = true, default_value_t = 1.0)]
    pub c6: f64,
    /// Number of spectral-density samples.
    #[arg(long = "xi-points", global = true, default_value_t = 4001)]
    pub xi_points: usize,
    /// Grid density of the hypothesis checks.
    #[arg(long = "grid-density", global = true, default_value_t = 32)]
    pub grid_density: usize,
    /// Output file; standard output when omitted. A `<out>.meta.json` sidecar records the run.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

/// Result of a subcommand: rendered output plus whether it succeeded.
struct Outcome {
    body: String,
    ok: bool,
}

fn num(v: f64) -> String {
    format!("{v:.16e}")
}

fn load_model(run: &RunConfig) -> std::result::Result<(ModelConfig, TwoBandModel), (u8, String)> {
    let cfg = match &run.config {
        Some(path) => ModelConfig::from_path(path).map_err(|e| (EXIT_USAGE, e.to_string()))?,
        None => ModelConfig::default(),
    };
    let model = cfg.build().map_err(|e| (EXIT_USAGE, e.to_string()))?;
    Ok((cfg, model))
}

fn check_run(run: &RunConfig) -> std::result::Result<(), String> {
    if !run.kappa.is_finite() {
        return Err(format!("--kappa must be finite, got {}", run.kappa));
    }
    if !(run.tol > 0.0 && run.tol.is_finite()) {
        return Err(format!("--tol must be positive, got {}", run.tol));
    }
    if let Some(x) = run.x {
        if !x.is_finite() {
            return Err(format!("--x must be finite, got {x}"));
        }
    }
    if run.x_grid == Some(0) || run.x_grid == Some(1) {
        return Err("--x-grid needs at least 2 points".into());
    }
    if let (Some(a), Some(b)) = (run.t_min, run.t_max) {
        if !(a > 0.0 && b >= a) {
            return Err(format!(
                "time grid needs 0 < t-min <= t-max, got [{a}, {b}]"
            ));
        }
    }
    Ok(())
}

fn point_x(run: &RunConfig, model: &TwoBandModel) -> f64 {
    run.x.unwrap_or_else(|| {
        let i1 = model.i1();
        0.5 * (i1.lo + i1.hi)
    })
}

fn to_json<T: Serialize>(value: &T) -> Result<String> {
    Ok(serde_json::to_string_pretty(value)? + "\n")
}

fn cmd_validate(run: &RunConfig, model: &TwoBandModel) -> Result<Outcome> {
    let report = validate_assumptions(model, run.grid_density);
    Ok(Outcome {
        body: to_json(&report)?,
        ok: report.all_pass(),
    })
}

fn cmd_resonance(run: &RunConfig, model: &TwoBandModel) -> Result<Outcome> {
    let (points, failed) = match run.x {
        Some(x) => match solve_pole(model, x, run.kappa, None, DEFAULT_RESIDUAL_TOL) {
            Ok(p) => (vec![p], Vec::new()),
            Err(e) => {
                eprintln!("x = {x}: {e}");
                (Vec::new(), vec![x])
            }
        },
        None => trace_points(
            model,
            run.kappa,
            run.x_grid.unwrap_or(101),
            DEFAULT_RESIDUAL_TOL,
        ),
    };
    if !failed.is_empty() {
        eprintln!(
            "{}",
            Error::PartialCurve {
                failed: failed.clone()
            }
        );
    }
    let body = match run.format {
        Format::Json => to_json(&points)?,
        Format::Csv => {
            let mut s = String::from(RESONANCE_HEADER);
            s.push('\n');
            for p in &points {
                let _ = writeln!(
                    s,
                    "{},{},{},{},{},{},{}",
                    num(p.x),
                    num(p.zeta.re),
                    num(p.zeta.im),
                    num(p.amplitude_a.re),
                    num(p.amplitude_a.im),
                    num(p.residual),
                    p.newton_iters
                );
            }
            s
        }
    };
    Ok(Outcome {
        body,
        ok: failed.is_empty(),
    })
}

fn cmd_density(run: &RunConfig, model: &TwoBandModel) -> Result<Outcome> {
    let x = point_x(run, model);
    let density = spectral_density(model, x, run.kappa, run.xi_points, run.tol)?;
    let body = match run.format {
        Format::Json => to_json(&density)?,
        Format::Csv => {
            let mut s = String::from(DENSITY_HEADER);
            s.push('\n');
            for (xi, w) in &density.samples {
                let _ = writeln!(s, "{},{}", num(*xi), num(*w));
            }
            s
        }
    };
    Ok(Outcome { body, ok: true })
}

fn cmd_decay(run: &RunConfig, model: &TwoBandModel) -> Result<Outcome> {
    let x = point_x(run, model);
    let pole = solve_pole(model, x, run.kappa, None, DEFAULT_RESIDUAL_TOL)?;
    let window = exp_window(&pole, run.c6).ok();
    let times = match (run.t_min, run.t_max, window) {
        (Some(a), Some(b), _) => geometric_grid(a, b, run.t_per_decade),
        (None, None, Some(w)) => default_time_grid(w, run.t_per_decade),
        (a, b, Some((t1, t2))) => geometric_grid(
            a.unwrap_or(0.25 * t1),
            b.unwrap_or(10.0 * t2),
            run.t_per_decade,
        ),
        (_, _, None) => {
            return Err(Error::Domain(
                "no exponential window to derive the time grid from; pass --t-min and --t-max"
                    .into(),
            ))
        }
    };
    let record = decay_record(model, &pole, &times, run.c6, run.tol)?;
    let body = match run.format {
        Format::Json => to_json(&record)?,
        Format::Csv => {
            let mut s = String::from(DECAY_HEADER);
            s.push('\n');
            for i in 0..record.times.len() {
                let u = record.u_direct[i];
                let c = record.u_contour[i];
                let _ = writeln!(
                    s,
                    "{},{},{},{},{},{},{},{}",
                    num(record.times[i]),
                    num(u.re),
                    num(u.im),
                    num(u.norm()),
                    num(record.u_exp[i].norm()),
                    num(record.u_tail[i].norm()),
                    num(c.re),
                    num(c.im)
                );
            }
            s
        }
    };
    Ok(Outcome { body, ok: true })
}

#[derive(Serialize)]
struct TailReport {
    x: f64,
    kappa: f64,
    p: f64,
    a_nu_x: f64,
    d_nu_x: f64,
    kappa_crit: f64,
    kappa_crit_sq: f64,
    w_nu_x: f64,
    t1: Option<f64>,
    t2: Option<f64>,
}

fn cmd_tail(run: &RunConfig, model: &TwoBandModel) -> Result<Outcome> {
    let x = point_x(run, model);
    let tail = tail_constants(model, x, run.kappa, run.tol)?;
    let pole = solve_pole(model, x, run.kappa, None, DEFAULT_RESIDUAL_TOL)?;
    let window = exp_window(&pole, run.c6);
    if let Err(e) = &window {
        eprintln!("{e}");
    }
    let window = window.ok();
    let report = TailReport {
        x,
        kappa: run.kappa,
        p: tail.p,
        a_nu_x: tail.a_nu_x,
        d_nu_x: tail.d_nu_x,
        kappa_crit: tail.kappa_crit,
        kappa_crit_sq: tail.kappa_crit_sq,
        w_nu_x: tail.w_nu_x,
        t1: window.map(|w| w.0),
        t2: window.map(|w| w.1),
    };
    let body = match run.format {
        Format::Json => to_json(&report)?,
        Format::Csv => {
            let opt = |v: Option<f64>| v.map(num).unwrap_or_default();
            format!(
                "x,kappa,p,A_nu_x,d_nu_x,kappa_crit,kappa_crit_sq,w_nu_x,T1,T2\n{},{},{},{},{},{},{},{},{},{}\n",
                num(report.x),
                num(report.kappa),
                num(report.p),
                num(report.a_nu_x),
                num(report.d_nu_x),
                num(report.kappa_crit),
                num(report.kappa_crit_sq),
                num(report.w_nu_x),
                opt(report.t1),
                opt(report.t2)
            )
        }
    };
    Ok(Outcome { body, ok: true })
}

fn meta_path(out: &Path) -> PathBuf {
    let mut name = out.as_os_str().to_owned();
    name.push(".meta.json");
    PathBuf::from(name)
}

fn write_outputs(cli: &Cli, cfg: &ModelConfig, body: &str) -> Result<()> {
    match &cli.run.out {
        Some(path) => {
            std::fs::write(path, body)?;
            let meta = json!({
                "subcommand": cli.command,
                "run": cli.run,
                "model": cfg,
                "version": env!("CARGO_PKG_VERSION"),
            });
            std::fs::write(meta_path(path), serde_json::to_string_pretty(&meta)? + "\n")?;
        }
        None => print!("{body}"),
    }
    Ok(())
}

/// Runs a parsed command line and returns the process exit status.
pub fn run(cli: &Cli) -> u8 {
    if let Err(msg) = check_run(&cli.run) {
        eprintln!("error: {msg}");
        return EXIT_USAGE;
    }
    let (cfg, model) = match load_model(&cli.run) {
        Ok(m) => m,
        Err((code, msg)) => {
            eprintln!("error: {msg}");
            return code;
        }
    };
    let outcome = match cli.command {
        Command::Validate => cmd_validate(&cli.run, &model),
        Command::Resonance => cmd_resonance(&cli.run, &model),
        Command::Density => cmd_density(&cli.run, &model),
        Command::Decay => cmd_decay(&cli.run, &model),
        Command::Tail => cmd_tail(&cli.run, &model),
    };
    match outcome {
        Ok(o) => {
            if let Err(e) = write_outputs(cli, &cfg, &o.body) {
                eprintln!("error: {e}");
                return EXIT_USAGE;
            }
            if o.ok {
                0
            } else {
                EXIT_FAILURE
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_FAILURE
        }
    }
}

/// Parses `std::env::args` and runs; clap usage errors exit with status 2.
pub fn main_entry() -> ExitCode {
    let cli = Cli::parse();
    ExitCode::from(run(&cli))
}
