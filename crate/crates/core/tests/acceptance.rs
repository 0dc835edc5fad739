//! Acceptance checks on the reference cosine-crystal model. Prints one
//! `criterion N: PASS|FAIL` line per check and exits non-zero on any failure.

mod common;

use std::f64::consts::PI;
use std::path::Path;
use std::process::{Command, ExitCode};
use std::time::Instant;

use common::{pv_excision, pv_linear_exp, slope, wrap_angle};
use interband::decay::{
    decay_amplitude_contour, decay_amplitude_direct, default_time_grid, density_norm, exp_window,
    geometric_grid, tail_constants,
};
use interband::model::{default_model, validate_assumptions, ModelConfig, TwoBandModel};
use interband::quad::principal_value;
use interband::resolvent::{g_continued, g_plain, ComplexEnergy};
use interband::resonance::{dzeta_dk2, solve_pole, trace_points, PolePoint, DEFAULT_RESIDUAL_TOL};
use interband::Result;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const TOL: f64 = 1e-10;
const SEED: u64 = 0x5eed_2b0d;

type Criterion<'a> = Box<dyn Fn() -> Result<Check> + 'a>;

struct Check {
    pass: bool,
    detail: String,
}

impl Check {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Check {
            pass,
            detail: detail.into(),
        }
    }
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Formfactor of the reference configuration, written out independently.
fn reference_v(y: f64, z: f64) -> f64 {
    let cfg = ModelConfig::default();
    cfg.g0 * cfg.g0 * (z - cfg.nu) * (-(z - cfg.nu) * (1.0 + cfg.eps * y)).exp()
}

/// `-ϱ(x)[I + iπv]` at `κ = 0` from the exponential-integral closed form
/// (reference model: `u(y) = 3 - y`, `ϱ ≡ 1`, `v = z e^{-z}`).
fn golden_oracle(x: f64) -> Complex64 {
    let s = x - (3.0 - x);
    -c(pv_linear_exp(s), PI * s * (-s).exp())
}

fn pole(model: &TwoBandModel, x: f64, kappa: f64) -> Result<PolePoint> {
    solve_pole(model, x, kappa, None, DEFAULT_RESIDUAL_TOL)
}

fn criterion_1(model: &TwoBandModel) -> Result<Check> {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let y = rng.random_range(0.01..0.99);
        let s = rng.random_range(0.02..6.0);
        let xi = y + s;
        let got = principal_value(|z| model.v_real(y, z), y, xi, model.nu(), TOL)?
            .value
            .re;
        let want = pv_excision(|z| reference_v(y, z), s, 0.0, 60.0, (0.01f64).min(0.25 * s));
        worst = worst.max((got - want).abs());
    }
    Ok(Check::new(
        worst < 1e-8,
        format!("max |PV - excision| = {worst:.2e} over 20 points"),
    ))
}

fn criterion_2(model: &TwoBandModel) -> Result<Check> {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 2);
    let mut worst: f64 = 0.0;
    for _ in 0..10 {
        let y = rng.random_range(0.01..0.99);
        let s: f64 = rng.random_range(0.05..6.0);
        let got = g_plain(model, y, c(y + s, 1e-6), TOL)?;
        let want = c(pv_linear_exp(s), PI * s * (-s).exp());
        worst = worst.max((got - want).norm());
    }
    Ok(Check::new(
        worst < 1e-5,
        format!("max |G(xi + 1e-6 i) - (I + i pi v)| = {worst:.2e}"),
    ))
}

fn criterion_3(model: &TwoBandModel) -> Result<Check> {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 3);
    let eta = 1e-3;
    let mut worst: f64 = 0.0;
    for _ in 0..10 {
        let y = rng.random_range(0.01..0.99);
        let xi = y + rng.random_range(0.05..5.0);
        let jump = |h: f64| -> Result<Complex64> {
            let below = g_continued(model, y, ComplexEnergy::below(c(xi, -h)), TOL)?.g_value;
            let above = g_plain(model, y, c(xi, h), TOL)?;
            Ok(below - above)
        };
        let extrapolated = 2.0 * jump(0.5 * eta)? - jump(eta)?;
        worst = worst.max(extrapolated.norm());
    }
    Ok(Check::new(
        worst < 1e-6,
        format!("max extrapolated jump = {worst:.2e}"),
    ))
}

fn criterion_4(model: &TwoBandModel) -> Result<Check> {
    let report = validate_assumptions(model, 32);
    let bound = report.c4;
    let mut worst: f64 = 0.0;
    let y = 0.5;
    for i in 0..50 {
        let xi = 6.0 * i as f64 / 49.0;
        for j in 0..50 {
            let eta = 10f64.powf(-6.0 + 6.0 * j as f64 / 49.0);
            for sign in [1.0, -1.0] {
                worst = worst.max(g_plain(model, y, c(xi, sign * eta), TOL)?.norm());
            }
        }
    }
    Ok(Check::new(
        worst <= bound,
        format!("max |G| = {worst:.4} against bound {bound:.4} on 50x50 grid, both half-planes"),
    ))
}

fn criterion_5(model: &TwoBandModel) -> Result<Check> {
    let kappas = [0.05, 0.1, 0.2];
    let mut curves = Vec::new();
    let mut messages = Vec::new();
    let mut pass = true;
    for &kappa in &kappas {
        let (points, failed) = trace_points(model, kappa, 101, DEFAULT_RESIDUAL_TOL);
        if !failed.is_empty() {
            pass = false;
            messages.push(format!("kappa={kappa}: {} failed points", failed.len()));
        }
        let max_res = points.iter().map(|p| p.residual).fold(0.0, f64::max);
        let max_im = points
            .iter()
            .map(|p| p.zeta.im)
            .fold(f64::NEG_INFINITY, f64::max);
        let interior_ok = points[1..points.len() - 1].iter().all(|p| p.zeta.im < 0.0);
        pass &= max_res < 1e-12 && max_im <= 1e-12 && interior_ok;
        messages.push(format!(
            "kappa={kappa}: max residual {max_res:.1e}, max Im {max_im:.2e}"
        ));
        curves.push(points);
    }
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for pair in [(2, 1), (1, 0)] {
        let (big, small) = (&curves[pair.0], &curves[pair.1]);
        for (pb, ps) in big.iter().zip(small) {
            let g = golden_oracle(pb.x);
            let err = |p: &PolePoint| (p.zeta - (p.x + p.kappa * p.kappa * g)).norm();
            let ratio = err(pb) / err(ps);
            lo = lo.min(ratio);
            hi = hi.max(ratio);
        }
    }
    pass &= lo >= 12.0 && hi <= 20.0;
    messages.push(format!("golden-rule error ratios in [{lo:.2}, {hi:.2}]"));
    Ok(Check::new(pass, messages.join("; ")))
}

fn criterion_6(model: &TwoBandModel) -> Result<Check> {
    let mut worst: f64 = 0.0;
    for x in [2.1, 2.3, 2.5, 2.7, 2.9] {
        let p = pole(model, x, 0.0)?;
        let got = dzeta_dk2(model, x, 0.0, &p, TOL)?;
        worst = worst.max((got - golden_oracle(x)).norm());
    }
    Ok(Check::new(
        worst < 1e-8,
        format!("max |dzeta/dk2 - golden rule| = {worst:.2e}"),
    ))
}

fn criterion_7(model: &TwoBandModel) -> Result<Check> {
    let mut worst_norm: f64 = 0.0;
    let mut worst_u0: f64 = 0.0;
    for kappa in [0.1, 0.2] {
        for x in [2.1, 2.3, 2.5, 2.7, 2.9] {
            worst_norm = worst_norm.max((density_norm(model, x, kappa, TOL)? - 1.0).abs());
            worst_u0 =
                worst_u0.max((decay_amplitude_direct(model, x, kappa, 0.0, TOL)? - 1.0).norm());
        }
    }
    Ok(Check::new(
        worst_norm < 1e-6 && worst_u0 < 1e-6,
        format!("max |int W - 1| = {worst_norm:.2e}, max |U(0) - 1| = {worst_u0:.2e}"),
    ))
}

fn criterion_8(model: &TwoBandModel) -> Result<Check> {
    let (x, kappa) = (2.5, 0.2);
    let p = pole(model, x, kappa)?;
    let t_end = 5.0 / p.width();
    let mut worst: f64 = 0.0;
    for i in 0..20 {
        let t = t_end * i as f64 / 19.0;
        let direct = decay_amplitude_direct(model, x, kappa, t, TOL)?;
        let contour = decay_amplitude_contour(model, x, kappa, t, &p, TOL)?;
        worst = worst.max((direct - contour).norm());
    }
    Ok(Check::new(
        worst < 1e-6,
        format!("max |direct - contour| = {worst:.2e} on [0, {t_end:.1}]"),
    ))
}

fn criterion_9(model: &TwoBandModel) -> Result<Check> {
    let (x, kappa) = (2.5, 0.2);
    let p = pole(model, x, kappa)?;
    let zeta2 = p.width();
    let (t1, t2) = exp_window(&p, 1.0)?;
    let (a, b) = (2.0 * t1, 0.5 * t2);

    let ts: Vec<f64> = (0..40).map(|i| a + (b - a) * i as f64 / 39.0).collect();
    let logs = ts
        .iter()
        .map(|&t| Ok(decay_amplitude_direct(model, x, kappa, t, TOL)?.norm().ln()))
        .collect::<Result<Vec<f64>>>()?;
    let fitted = slope(&ts, &logs);
    let rel = (fitted + zeta2).abs() / zeta2;

    let geo: Vec<f64> = geometric_grid(a, b, 10)
        .into_iter()
        .filter(|&t| t >= a)
        .collect();
    let scaled = geo
        .iter()
        .map(|&t| {
            let u = decay_amplitude_direct(model, x, kappa, t, TOL)?;
            let pole_part = p.amplitude_a * (-Complex64::i() * p.zeta * t).exp();
            Ok((u - pole_part).norm() * t / (kappa * kappa))
        })
        .collect::<Result<Vec<f64>>>()?;
    let half = scaled.len() / 2;
    let early = scaled[..half].iter().copied().fold(0.0, f64::max);
    let late = scaled[half..].iter().copied().fold(0.0, f64::max);
    let bounded = scaled.iter().all(|v| v.is_finite()) && late <= early;
    Ok(Check::new(
        rel < 0.05 && bounded,
        format!(
            "slope {fitted:.6} vs -zeta2 {:.6} (rel {rel:.2e}) on [{a:.3}, {b:.1}]; sup |U - A e^(-i zeta t)| t/k^2: early {early:.3e}, late {late:.3e}",
            -zeta2
        ),
    ))
}

fn criterion_10(model: &TwoBandModel) -> Result<Check> {
    let (x, kappa) = (2.5, 0.2);
    let cfg = ModelConfig::default();
    let y = 3.0 - x;
    let xi0 = cfg.nu + y;
    let k2 = kappa * kappa;
    // v ≈ g0² s near threshold, J = ∫ v/(z-ν) dz = g0² / (1 + εy), ϱ ≡ 1.
    let j = cfg.g0 * cfg.g0 / (1.0 + cfg.eps * y);
    let d = x - cfg.nu - y - k2 * j;
    let w = k2 * cfg.g0 * cfg.g0 / (d * d);

    let p = pole(model, x, kappa)?;
    let zeta2 = p.width();
    let window = exp_window(&p, 1.0)?;
    let grid = default_time_grid(window, 40);
    let Some(&t) = grid
        .iter()
        .rev()
        .find(|&&t| (-zeta2 * t).exp() < 1e-12 * w / (t * t))
    else {
        return Ok(Check::new(
            false,
            "no grid time satisfies the tail condition",
        ));
    };
    let u = decay_amplitude_contour(model, x, kappa, t, &p, TOL)?;
    let ratio = u.norm() * t * t / w;
    let phase_err = wrap_angle(u.arg() - (-PI - xi0 * t)).abs();
    Ok(Check::new(
        (0.98..=1.02).contains(&ratio) && phase_err < 0.05,
        format!("t = {t:.1}: |U| t^2 / |w| = {ratio:.6}, phase error {phase_err:.2e} rad"),
    ))
}

fn criterion_11(model: &TwoBandModel) -> Result<Check> {
    let tail = tail_constants(model, 2.5, 0.2, TOL)?;
    let dd = (tail.d_nu_x - 1.96).abs();
    let dk = (tail.kappa_crit_sq - 2.0).abs();
    Ok(Check::new(
        dd < 1e-9 && dk < 1e-9,
        format!(
            "d = {:.12}, kappa_crit^2 = {:.12}",
            tail.d_nu_x, tail.kappa_crit_sq
        ),
    ))
}

/// Runs the binary writing to `<dir>/<name>.out`; returns output and sidecar bytes.
fn run_cli(
    dir: &Path,
    name: &str,
    args: &[&str],
) -> std::result::Result<(Vec<u8>, Vec<u8>), String> {
    let out = dir.join(format!("{name}.out"));
    let status = Command::new(env!("CARGO_BIN_EXE_interband"))
        .args(args)
        .arg("--out")
        .arg(&out)
        .status()
        .map_err(|e| e.to_string())?;
    if !status.success() {
        return Err(format!("{args:?} exited with {status}"));
    }
    let body = std::fs::read(&out).map_err(|e| e.to_string())?;
    let mut meta_name = out.into_os_string();
    meta_name.push(".meta.json");
    let meta = std::fs::read(&meta_name).map_err(|e| e.to_string())?;
    Ok((body, meta))
}

fn criterion_12() -> Result<Check> {
    let dir = tempfile::tempdir()?;
    let runs: [(&str, &[&str], &str); 4] = [
        (
            "resonance",
            &["resonance", "--x-grid", "21"],
            "x,re_zeta,im_zeta,re_A,im_A,residual,iters",
        ),
        ("density", &["density", "--xi-points", "201"], "xi,W"),
        (
            "decay",
            &[
                "decay",
                "--t-min",
                "1",
                "--t-max",
                "40",
                "--t-per-decade",
                "4",
            ],
            "t,re_u,im_u,abs_u,abs_exp,abs_tail,re_u_contour,im_u_contour",
        ),
        ("tail", &["tail", "--format", "json"], ""),
    ];
    let mut problems = Vec::new();
    for (name, args, header) in runs {
        let first = run_cli(dir.path(), name, args);
        let second = run_cli(dir.path(), name, args);
        match (first, second) {
            (Ok(a), Ok(b)) => {
                if a.0 != b.0 {
                    problems.push(format!("{name}: output differs between runs"));
                }
                if a.1 != b.1 {
                    problems.push(format!("{name}: metadata differs between runs"));
                }
                if !header.is_empty() {
                    let text = String::from_utf8_lossy(&a.0);
                    if text.lines().next() != Some(header) {
                        problems.push(format!("{name}: header {:?}", text.lines().next()));
                    }
                }
            }
            (Err(e), _) | (_, Err(e)) => problems.push(format!("{name}: {e}")),
        }
    }
    let detail = if problems.is_empty() {
        "4 subcommands byte-identical across runs, headers exact".to_string()
    } else {
        problems.join("; ")
    };
    Ok(Check::new(problems.is_empty(), detail))
}

fn main() -> ExitCode {
    let model = default_model();
    let m = &model;
    let criteria: Vec<(u32, Criterion)> = vec![
        (1, Box::new(|| criterion_1(m))),
        (2, Box::new(|| criterion_2(m))),
        (3, Box::new(|| criterion_3(m))),
        (4, Box::new(|| criterion_4(m))),
        (5, Box::new(|| criterion_5(m))),
        (6, Box::new(|| criterion_6(m))),
        (7, Box::new(|| criterion_7(m))),
        (8, Box::new(|| criterion_8(m))),
        (9, Box::new(|| criterion_9(m))),
        (10, Box::new(|| criterion_10(m))),
        (11, Box::new(|| criterion_11(m))),
        (12, Box::new(criterion_12)),
    ];
    let mut failures = 0;
    for (n, check) in criteria {
        let start = Instant::now();
        let outcome = check().unwrap_or_else(|e| Check::new(false, format!("error: {e}")));
        let verdict = if outcome.pass { "PASS" } else { "FAIL" };
        if !outcome.pass {
            failures += 1;
        }
        println!(
            "criterion {n}: {verdict} {} ({:.1}s)",
            outcome.detail,
            start.elapsed().as_secs_f64()
        );
    }
    println!("acceptance: {} of 12 criteria passed", 12 - failures);
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
