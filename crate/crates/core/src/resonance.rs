//! Resonance poles `ζ(x,κ)`: zeros of `D₊(x,κ,·)` continued into the lower
//! half-plane, their residue amplitudes and the weak-coupling expansion.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{rho_of, TwoBandModel};
use crate::resolvent::{dg_continued_dzeta, g_continued, ComplexEnergy};

/// Residual target `|D₊| < DEFAULT_RESIDUAL_TOL` for pole searches.
pub const DEFAULT_RESIDUAL_TOL: f64 = 1e-12;
/// Newton iteration cap.
pub const MAX_NEWTON_ITERS: usize = 50;
/// Consecutive non-improving Newton steps before switching to secant.
const NEWTON_PATIENCE: usize = 3;
/// Largest admissible positive imaginary part of a converged pole.
pub const UPPER_HALF_PLANE_SLACK: f64 = 1e-10;
/// `|1 + κ²ϱ ∂G_Ω/∂ζ|` below this is treated as degenerate.
pub const DEGENERATE_DERIVATIVE: f64 = 1e-10;

/// One solved pole.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PolePoint {
    pub x: f64,
    pub kappa: f64,
    pub zeta: Complex64,
    /// `|D₊(x,κ,ζ)|` at the returned point.
    pub residual: f64,
    pub amplitude_a: Complex64,
    pub newton_iters: usize,
}

impl PolePoint {
    /// Decay rate `ζ₂ = -Im ζ`.
    pub fn width(&self) -> f64 {
        -self.zeta.im
    }
}

/// Poles along a clipped grid of the upper band.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResonanceCurve {
    pub kappa: f64,
    pub points: Vec<PolePoint>,
    pub grid_count: usize,
    pub edge_clip: f64,
}

/// Quadrature tolerance used while driving `|D₊|` below `residual_tol`.
fn quad_tol(residual_tol: f64) -> f64 {
    (0.1 * residual_tol).clamp(1e-14, 1e-10)
}

/// `∂ζ/∂(κ²)` at `κ = 0`: `-ϱ(x)[I(u⁻¹x, x) + iπ v(u⁻¹x, x - u⁻¹x)]`.
pub fn golden_rule_pole(model: &TwoBandModel, x: f64, tol: f64) -> Result<Complex64> {
    model.check_upper_interior(x)?;
    let rho = rho_of(model, x)?;
    let y = model.u_inv(x);
    let g = g_continued(model, y, ComplexEnergy::below(Complex64::new(x, 0.0)), tol)?;
    Ok(-rho * g.g_value)
}

struct PoleEquation<'a> {
    model: &'a TwoBandModel,
    x: f64,
    k2rho: f64,
    y: f64,
    qtol: f64,
}

impl PoleEquation<'_> {
    fn value(&self, zeta: Complex64) -> Result<Complex64> {
        let g = g_continued(self.model, self.y, ComplexEnergy::below(zeta), self.qtol)?;
        Ok(self.x - zeta - self.k2rho * g.g_value)
    }

    fn derivative(&self, zeta: Complex64) -> Result<Complex64> {
        let dg = dg_continued_dzeta(self.model, self.y, ComplexEnergy::below(zeta), self.qtol)?;
        Ok(-1.0 - self.k2rho * dg)
    }
}

/// Solves `x - ζ - κ²ϱ(x) G_Ω(u⁻¹x, ζ) = 0` by Newton's method with the
/// analytic derivative, falling back to secant steps when Newton stalls.
/// `tol` is the residual target; the default guess is `x + κ²·golden`.
pub fn solve_pole(
    model: &TwoBandModel,
    x: f64,
    kappa: f64,
    guess: Option<Complex64>,
    tol: f64,
) -> Result<PolePoint> {
    model.check_upper_interior(x)?;
    if kappa == 0.0 {
        return Ok(PolePoint {
            x,
            kappa,
            zeta: Complex64::new(x, 0.0),
            residual: 0.0,
            amplitude_a: Complex64::new(1.0, 0.0),
            newton_iters: 0,
        });
    }
    let qtol = quad_tol(tol);
    let rho = rho_of(model, x)?;
    let eq = PoleEquation {
        model,
        x,
        k2rho: kappa * kappa * rho,
        y: model.u_inv(x),
        qtol,
    };
    let start = match guess {
        Some(g) => g,
        None => x + kappa * kappa * golden_rule_pole(model, x, qtol)?,
    };
    let (zeta, residual, iters) = iterate(&eq, start, tol)?;
    if zeta.im > UPPER_HALF_PLANE_SLACK {
        return Err(Error::Consistency(format!(
            "pole {zeta} at x = {x} lies in the upper half-plane"
        )));
    }
    let radius = 0.5 * (x - model.threshold_energy(x));
    if (zeta - x).norm() > radius {
        return Err(Error::Consistency(format!(
            "root {zeta} at x = {x} is farther than {radius} from x; rejected as a different branch"
        )));
    }
    let d = eq.derivative(zeta)?;
    if d.norm() < DEGENERATE_DERIVATIVE {
        return Err(Error::DegenerateDerivative(d.norm()));
    }
    Ok(PolePoint {
        x,
        kappa,
        zeta,
        residual,
        amplitude_a: -1.0 / d,
        newton_iters: iters,
    })
}

fn iterate(eq: &PoleEquation<'_>, start: Complex64, tol: f64) -> Result<(Complex64, f64, usize)> {
    let mut zeta = start;
    let mut f = eq.value(zeta)?;
    let mut best = (zeta, f.norm());
    let mut stalls = 0usize;
    let mut secant: Option<(Complex64, Complex64)> = None;
    for iter in 1..=MAX_NEWTON_ITERS {
        if f.norm() < tol {
            return Ok((zeta, f.norm(), iter - 1));
        }
        let step = match secant {
            None => {
                let d = eq.derivative(zeta)?;
                if d.norm() < DEGENERATE_DERIVATIVE {
                    return Err(Error::DegenerateDerivative(d.norm()));
                }
                f / d
            }
            Some((z_prev, f_prev)) => {
                let slope = (f - f_prev) / (zeta - z_prev);
                if !(slope.norm() > 0.0) || !slope.re.is_finite() {
                    break;
                }
                f / slope
            }
        };
        let mut trial = zeta - step;
        let mut f_trial = eq.value(trial);
        // damp steps that leave the admissible region or increase the residual
        for _ in 0..8 {
            match &f_trial {
                Ok(ft) if ft.norm() < f.norm() || ft.norm() < tol => break,
                _ => {
                    let shrink = (trial - zeta) * 0.5;
                    trial = zeta + shrink;
                    f_trial = eq.value(trial);
                }
            }
        }
        let f_new = match f_trial {
            Ok(v) => v,
            Err(_) => break,
        };
        if f_new.norm() >= f.norm() {
            stalls += 1;
        } else {
            stalls = 0;
        }
        if stalls >= NEWTON_PATIENCE && secant.is_none() {
            // restart from the best point with a small perturbation, secant steps from now on
            let (zb, _) = best;
            let h = Complex64::new(1e-6, -1e-6) * (1.0 + zb.norm());
            let zp = zb + h;
            let fp = eq.value(zp)?;
            secant = Some((zp, fp));
            zeta = zb;
            f = eq.value(zb)?;
            stalls = 0;
            continue;
        }
        if secant.is_some() {
            secant = Some((zeta, f));
        }
        zeta = trial;
        f = f_new;
        if f.norm() < best.1 {
            best = (zeta, f.norm());
        }
    }
    if f.norm() < tol {
        return Ok((zeta, f.norm(), MAX_NEWTON_ITERS));
    }
    Err(Error::Convergence {
        last: best.0,
        residual: best.1,
        iterations: MAX_NEWTON_ITERS,
    })
}

fn continued_pair(
    model: &TwoBandModel,
    x: f64,
    pole: &PolePoint,
    tol: f64,
) -> Result<(f64, Complex64, Complex64)> {
    let rho = rho_of(model, x)?;
    let y = model.u_inv(x);
    let at = ComplexEnergy::below(pole.zeta);
    let g = g_continued(model, y, at, tol)?.g_value;
    let dg = dg_continued_dzeta(model, y, at, tol)?;
    Ok((rho, g, dg))
}

/// `∂ζ/∂(κ²) = -ϱ G_Ω / (1 + κ²ϱ ∂G_Ω/∂ζ)` at the pole.
pub fn dzeta_dk2(
    model: &TwoBandModel,
    x: f64,
    kappa: f64,
    pole: &PolePoint,
    tol: f64,
) -> Result<Complex64> {
    model.check_upper_interior(x)?;
    let (rho, g, dg) = continued_pair(model, x, pole, tol)?;
    let denom = 1.0 + kappa * kappa * rho * dg;
    if denom.norm() < DEGENERATE_DERIVATIVE {
        return Err(Error::DegenerateDerivative(denom.norm()));
    }
    Ok(-rho * g / denom)
}

/// Residue amplitude `A = [1 + κ²ϱ ∂G_Ω/∂ζ]⁻¹` at the pole.
pub fn residue_amplitude_a(
    model: &TwoBandModel,
    x: f64,
    kappa: f64,
    pole: &PolePoint,
    tol: f64,
) -> Result<Complex64> {
    model.check_upper_interior(x)?;
    if kappa == 0.0 {
        return Ok(Complex64::new(1.0, 0.0));
    }
    let (rho, _, dg) = continued_pair(model, x, pole, tol)?;
    let denom = 1.0 + kappa * kappa * rho * dg;
    if denom.norm() < DEGENERATE_DERIVATIVE {
        return Err(Error::DegenerateDerivative(denom.norm()));
    }
    Ok(1.0 / denom)
}

/// Traces poles across the clipped grid, returning solved points and the
/// `x` values that failed.
pub fn trace_points(
    model: &TwoBandModel,
    kappa: f64,
    n_points: usize,
    tol: f64,
) -> (Vec<PolePoint>, Vec<f64>) {
    let grid = model.upper_grid(n_points);
    let mut points = Vec::with_capacity(grid.len());
    let mut failed = Vec::new();
    let mut previous: Option<PolePoint> = None;
    for &x in &grid {
        let guess = previous.map(|p| p.zeta + (x - p.x));
        match solve_pole(model, x, kappa, guess, tol) {
            Ok(p) => {
                previous = Some(p);
                points.push(p);
            }
            Err(_) => {
                // retry from the weak-coupling guess before giving up
                match solve_pole(model, x, kappa, None, tol) {
                    Ok(p) => {
                        previous = Some(p);
                        points.push(p);
                    }
                    Err(_) => {
                        previous = None;
                        failed.push(x);
                    }
                }
            }
        }
    }
    (points, failed)
}

/// Poles on an `n_points` clipped grid of `I₁`, each seeded by its
/// predecessor.
pub fn trace_resonance_curve(
    model: &TwoBandModel,
    kappa: f64,
    n_points: usize,
    tol: f64,
) -> Result<ResonanceCurve> {
    if n_points < 2 {
        return Err(Error::Domain(format!(
            "need at least 2 grid points, got {n_points}"
        )));
    }
    let (points, failed) = trace_points(model, kappa, n_points, tol);
    if !failed.is_empty() {
        return Err(Error::PartialCurve { failed });
    }
    Ok(ResonanceCurve {
        kappa,
        points,
        grid_count: n_points,
        edge_clip: model.edge_clip(),
    })
}
