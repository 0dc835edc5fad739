//! Spectral density `W(x,ξ)`, the decay amplitude `U(t,x) = ∫ W e^{-iξt} dξ`
//! computed on the real axis and on a rotated contour, the intermediate
//! exponential window and the threshold power-law tail.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{fit_threshold, rho_of, threshold_behavior, TwoBandModel};
use crate::quad::{
    filon_fourier_with, integrate_partitioned, integrate_semi_infinite_with, QuadOptions,
};
use crate::resolvent::{i_pv, level_shift_pair};
use crate::resonance::{golden_rule_pole, PolePoint};

/// Largest rotation of the background contour.
pub const MAX_CONTOUR_ANGLE: f64 = PI / 16.0;
/// `|d_ν^x|` below this is treated as critical coupling.
pub const CRITICAL_COUPLING_TOL: f64 = 1e-10;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Samples of `W(x,·)` above the threshold.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralDensity {
    pub x: f64,
    pub kappa: f64,
    /// `ξ₀ = ν + u⁻¹(x)`.
    pub xi0: f64,
    /// `(ξ, W(x,ξ))`, increasing in `ξ`.
    pub samples: Vec<(f64, f64)>,
    /// Vanishing order of `W` at `ξ₀`.
    pub p_threshold: f64,
    /// `∫ W dξ` by adaptive quadrature.
    pub norm: f64,
}

/// Constants of the threshold tail `U ~ w e^{-iξ₀t} e^{-iπ(p+1)/2} Γ(p+1) t^{-(p+1)}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailConstants {
    /// Threshold exponent `p`.
    pub p: f64,
    /// Threshold coefficient `A_{ν,x}`: `v(u⁻¹x, ν+s) ≈ A s^p`.
    pub a_nu_x: f64,
    /// Exponent and coefficient recovered by a log-log fit, for cross-checking.
    pub p_fit: f64,
    pub a_fit: f64,
    /// `J = ∫_ν^∞ v(u⁻¹x, z)/(z-ν) dz`.
    pub j_integral: f64,
    /// `d_ν^x = x - ν - u⁻¹(x) - κ²ϱ(x) J`, the limit of `D±` at the threshold.
    pub d_nu_x: f64,
    /// `κ_{ν,x}` with `κ²_{ν,x} = (x - ν - u⁻¹(x))/(ϱ J)`, where `d_ν^x` vanishes.
    pub kappa_crit: f64,
    pub kappa_crit_sq: f64,
    /// `w_{ν,x} = κ²ϱ A_{ν,x} / (d_ν^x)²`.
    pub w_nu_x: f64,
    pub xi0: f64,
}

/// Amplitudes on a time grid from both methods, with their approximants.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayRecord {
    pub x: f64,
    pub kappa: f64,
    pub times: Vec<f64>,
    pub u_direct: Vec<Complex64>,
    pub u_contour: Vec<Complex64>,
    /// `A e^{-iζt}`.
    pub u_exp: Vec<Complex64>,
    /// Threshold asymptote; infinite at `t = 0`.
    pub u_tail: Vec<Complex64>,
    /// `(T₁, T₂)` when the window equation has two solutions.
    pub window: Option<(f64, f64)>,
    pub tail: TailConstants,
    pub pole: PolePoint,
}

fn check_coupling(kappa: f64) -> Result<()> {
    if kappa == 0.0 {
        Err(Error::DegenerateDensity)
    } else if !kappa.is_finite() {
        Err(Error::Domain(format!(
            "coupling must be finite, got {kappa}"
        )))
    } else {
        Ok(())
    }
}

/// `W(x,ξ) = κ²ϱv / ([x-ξ-κ²ϱI]² + π²κ⁴ϱ²v²)` above the threshold, `0` below.
pub fn spectral_density_w(
    model: &TwoBandModel,
    x: f64,
    kappa: f64,
    xi: f64,
    tol: f64,
) -> Result<f64> {
    check_coupling(kappa)?;
    model.check_upper_interior(x)?;
    let xi0 = model.threshold_energy(x);
    if xi <= xi0 {
        return Ok(0.0);
    }
    let rho = rho_of(model, x)?;
    let y = model.u_inv(x);
    let k2r = kappa * kappa * rho;
    let v = model.v_real(y, xi - y);
    if v == 0.0 {
        return Ok(0.0);
    }
    let pv = i_pv(model, y, xi, tol)?;
    let shift = x - xi - k2r * pv;
    Ok(k2r * v / (shift * shift + (PI * k2r * v).powi(2)))
}

/// Integration layout shared by all evaluations of `U(t,x)` on the axis.
#[derive(Debug, Clone, Copy)]
pub struct DirectPlan<'a> {
    model: &'a TwoBandModel,
    x: f64,
    kappa: f64,
    tol: f64,
    pub xi0: f64,
    /// Center and half-width of the resonance peak.
    pub peak: f64,
    pub peak_width: f64,
    /// Truncation point of the `ξ` integral.
    pub cutoff: f64,
}

impl<'a> DirectPlan<'a> {
    pub fn new(model: &'a TwoBandModel, x: f64, kappa: f64, tol: f64) -> Result<Self> {
        check_coupling(kappa)?;
        model.check_upper_interior(x)?;
        let xi0 = model.threshold_energy(x);
        let gr = golden_rule_pole(model, x, tol)?;
        let k2 = kappa * kappa;
        let peak = x + k2 * gr.re;
        let peak_width = (k2 * gr.im.abs()).max(1e-12);
        let cutoff = truncation_point(model, x, kappa, peak + 10.0 * peak_width + 1.0, 0.1 * tol)?;
        Ok(Self {
            model,
            x,
            kappa,
            tol,
            xi0,
            peak,
            peak_width,
            cutoff,
        })
    }

    fn w(&self, xi: f64) -> f64 {
        spectral_density_w(self.model, self.x, self.kappa, xi, 0.1 * self.tol).unwrap_or(f64::NAN)
    }

    /// Breakpoints of `[ξ₀ + h₀, cutoff]`.
    fn panels(&self, h0: f64) -> Vec<f64> {
        let start = self.xi0 + h0;
        let mut pts = vec![start];
        for k in [-10.0, -1.0, 0.0, 1.0, 10.0] {
            let p = self.peak + k * self.peak_width;
            if p > start && p < self.cutoff {
                pts.push(p);
            }
        }
        pts.push(self.cutoff);
        pts.sort_by(f64::total_cmp);
        pts.dedup();
        pts
    }

    /// `U(t,x)` for any real `t`.
    pub fn amplitude(&self, t: f64) -> Result<Complex64> {
        if t < 0.0 {
            return Ok(self.amplitude(-t)?.conj());
        }
        let opts = QuadOptions::new(self.tol * 1e-2, self.tol);
        let h0 = 1.0_f64
            .min(2.0 * PI / t.max(1.0))
            .min(0.5 * (self.peak - self.xi0));
        // threshold panel: ξ = ξ₀ + σ² regularizes the (ξ-ξ₀)^p onset
        let head = integrate_partitioned(
            |sigma| {
                let xi = self.xi0 + sigma * sigma;
                Complex64::from_polar(2.0 * sigma * self.w(xi), -xi * t)
            },
            &[0.0, h0.sqrt()],
            &opts,
        )?;
        let pts = self.panels(h0);
        let mut total = head.value;
        for pair in pts.windows(2) {
            let piece = filon_fourier_with(
                |xi| Complex64::new(self.w(xi), 0.0),
                pair[0],
                pair[1],
                t,
                &opts,
            )?;
            total += piece.value;
        }
        Ok(total)
    }
}

/// Smallest `R` (by doubling) beyond which
/// `κ²ϱ ∫_{R-y}^∞ v(y,z) dz / (R - x - κ²ϱ C₄(y))²` is below `bound`.
fn truncation_point(
    model: &TwoBandModel,
    x: f64,
    kappa: f64,
    start: f64,
    bound: f64,
) -> Result<f64> {
    let y = model.u_inv(x);
    let nu = model.nu();
    let k2r = kappa * kappa * rho_of(model, x)?;
    let zs: Vec<f64> = (0..=2000)
        .map(|j| nu + 60.0 * (j as f64 / 2000.0).powi(2))
        .collect();
    let c2 = zs
        .iter()
        .map(|&z| model.v_real(y, z).abs())
        .fold(0.0, f64::max);
    let c3 = zs
        .iter()
        .map(|&z| model.dv_dz(y, Complex64::new(z, 0.0)).norm())
        .fold(0.0, f64::max);
    let c = integrate_semi_infinite_with(
        |z| model.v(y, Complex64::new(z, 0.0)),
        nu,
        1.0,
        &[],
        &QuadOptions::tol(1e-10),
    )?
    .value
    .norm();
    let c4 = (16.0 * c * c3 + PI * PI * c2 * c2).sqrt();
    let mut r = start.max(x + 2.0 * k2r * c4 + 1.0);
    for _ in 0..60 {
        let lower = (r - y).max(nu);
        let tail = integrate_semi_infinite_with(
            |z| model.v(y, Complex64::new(z, 0.0)),
            lower,
            1.0,
            &[],
            &QuadOptions::new(1e-3 * bound, 1e-6),
        )?
        .value
        .norm();
        let gap = r - x - k2r * c4;
        if gap > 0.0 && k2r * tail / (gap * gap) < bound {
            return Ok(r);
        }
        r = x + 2.0 * (r - x);
    }
    Err(Error::Domain(format!(
        "no truncation point found for the spectral density at x = {x}"
    )))
}

/// `∫_{ξ₀}^∞ W(x,ξ) dξ`.
pub fn density_norm(model: &TwoBandModel, x: f64, kappa: f64, tol: f64) -> Result<f64> {
    Ok(DirectPlan::new(model, x, kappa, tol)?.amplitude(0.0)?.re)
}

/// Samples `W(x,·)` on `n_points` abscissae clustered at the resonance peak
/// (`ξ = peak + γ tan φ` with uniform `φ`), from `ξ₀` to the truncation point.
pub fn spectral_density(
    model: &TwoBandModel,
    x: f64,
    kappa: f64,
    n_points: usize,
    tol: f64,
) -> Result<SpectralDensity> {
    let plan = DirectPlan::new(model, x, kappa, tol)?;
    let n = n_points.max(2);
    let (c, g) = (plan.peak, plan.peak_width);
    let lo = ((plan.xi0 - c) / g).atan();
    let hi = ((plan.cutoff - c) / g).atan();
    let abscissae: Vec<f64> = (0..n)
        .map(|i| {
            if i == 0 {
                plan.xi0
            } else if i + 1 == n {
                plan.cutoff
            } else {
                c + g * (lo + (hi - lo) * i as f64 / (n - 1) as f64).tan()
            }
        })
        .collect();
    let values: Vec<f64> = abscissae
        .par_iter()
        .map(|&xi| spectral_density_w(model, x, kappa, xi, tol))
        .collect::<Result<_>>()?;
    let norm = plan.amplitude(0.0)?.re;
    let y = model.u_inv(x);
    let p_threshold = threshold_behavior(model, y)
        .map(|t| t.exponent)
        .unwrap_or(f64::NAN);
    Ok(SpectralDensity {
        x,
        kappa,
        xi0: plan.xi0,
        samples: abscissae.into_iter().zip(values).collect(),
        p_threshold,
        norm,
    })
}

/// `U(t,x) = ∫_{ξ₀}^∞ W(x,ξ) e^{-iξt} dξ` by quadrature on the real axis.
/// `κ = 0` gives the free evolution `e^{-ixt}`.
pub fn decay_amplitude_direct(
    model: &TwoBandModel,
    x: f64,
    kappa: f64,
    t: f64,
    tol: f64,
) -> Result<Complex64> {
    if kappa == 0.0 {
        model.check_upper_interior(x)?;
        return Ok(Complex64::from_polar(1.0, -x * t));
    }
    DirectPlan::new(model, x, kappa, tol)?.amplitude(t)
}

/// Rotation angle used for the background integral.
pub fn contour_angle(model: &TwoBandModel) -> f64 {
    model.sector_theta0().min(MAX_CONTOUR_ANGLE)
}

/// `W` continued to complex `ζ`: `κ²ϱ v(y, ζ-y) / (D₊ D₋)`.
fn continued_density(
    model: &TwoBandModel,
    x: f64,
    y: f64,
    k2r: f64,
    zeta: Complex64,
    tol: f64,
) -> Result<Complex64> {
    let s = zeta - y;
    let v = model.v(y, s);
    if v == Complex64::new(0.0, 0.0) {
        return Ok(v);
    }
    let (g_below, g_above) = level_shift_pair(model, y, zeta, tol)?;
    let d_plus = x - zeta - k2r * g_below;
    let d_minus = x - zeta - k2r * g_above;
    Ok(k2r * v / (d_plus * d_minus))
}

/// `U(t,x) = A e^{-iζt} + ∫_0^∞ W(ξ₀ + r e^{-iθ}) e^{-i(ξ₀ + r e^{-iθ})t} e^{-iθ} dr`,
/// with `θ = min(θ₀, π/16)` and the pole's residue separated off. Valid for `t ≥ 0`.
pub fn decay_amplitude_contour(
    model: &TwoBandModel,
    x: f64,
    kappa: f64,
    t: f64,
    pole: &PolePoint,
    tol: f64,
) -> Result<Complex64> {
    if !(t >= 0.0) {
        return Err(Error::Domain(format!(
            "contour evaluation needs t >= 0, got {t}"
        )));
    }
    model.check_upper_interior(x)?;
    if kappa == 0.0 {
        return Ok(Complex64::from_polar(1.0, -x * t));
    }
    let theta = contour_angle(model);
    let xi0 = model.threshold_energy(x);
    let rel = pole.zeta - xi0;
    if rel.arg() <= -theta {
        return Err(Error::RotationAngle {
            pole: pole.zeta,
            theta,
        });
    }
    let y = model.u_inv(x);
    let k2r = kappa * kappa * rho_of(model, x)?;
    let dir = Complex64::from_polar(1.0, -theta);
    let phase0 = Complex64::from_polar(1.0, -xi0 * t);
    let inner_tol = 1e-3 * tol;
    let background = integrate_semi_infinite_with(
        |r| {
            if r == 0.0 {
                return Complex64::new(0.0, 0.0);
            }
            let w = dir * r;
            let zeta = xi0 + w;
            match continued_density(model, x, y, k2r, zeta, inner_tol) {
                Ok(val) => val * (-I * w * t).exp() * dir,
                Err(_) => Complex64::new(f64::NAN, 0.0),
            }
        },
        0.0,
        1.0 / (1.0 + t * theta.sin()),
        &[],
        &QuadOptions::new(tol * 1e-3 / (1.0 + t * t), tol),
    )?
    .value
        * phase0;
    Ok(pole.amplitude_a * (-I * pole.zeta * t).exp() + background)
}

/// Times `T₁ < T₂` solving `ζ₂T e^{-ζ₂T} = C₆κ²ζ₂` (the window
/// `κ²η₂T e^{-κ²η₂T} = C₆κ⁴η₂` with `η₂ = ζ₂/κ²`).
pub fn exp_window(pole: &PolePoint, c6: f64) -> Result<(f64, f64)> {
    let zeta2 = pole.width();
    if !(zeta2 > 0.0) {
        return Err(Error::Domain(format!(
            "window needs a pole strictly below the axis, got {}",
            pole.zeta
        )));
    }
    if !(c6 > 0.0 && c6.is_finite()) {
        return Err(Error::Domain(format!("c6 must be positive, got {c6}")));
    }
    let c = c6 * pole.kappa * pole.kappa * zeta2;
    let inv_e = (-1.0f64).exp();
    if (c - inv_e).abs() <= 4.0 * f64::EPSILON * inv_e {
        return Ok((1.0 / zeta2, 1.0 / zeta2));
    }
    if c > inv_e {
        return Err(Error::NoWindow(c));
    }
    let (w1, w2) = lambert_branches(c);
    Ok((w1 / zeta2, w2 / zeta2))
}

/// Both real solutions `w₁ < 1 < w₂` of `w e^{-w} = c`, `0 < c < 1/e`.
pub fn lambert_branches(c: f64) -> (f64, f64) {
    // f(w) = ln w - w - ln c, increasing on (0,1), decreasing on (1,∞)
    let lc = c.ln();
    let f = |w: f64| w.ln() - w - lc;
    let solve = |mut lo: f64, mut hi: f64, mut w: f64| {
        let rising = f(lo) < 0.0;
        for _ in 0..200 {
            let fw = f(w);
            if fw == 0.0 {
                return w;
            }
            if (fw < 0.0) == rising {
                lo = w;
            } else {
                hi = w;
            }
            let newton = w - fw / (1.0 / w - 1.0);
            w = if newton > lo && newton < hi {
                newton
            } else {
                0.5 * (lo + hi)
            };
            if (hi - lo) <= 4.0 * f64::EPSILON * hi {
                break;
            }
        }
        w
    };
    let w1 = solve(c, 1.0, c);
    let mut hi = 2.0 - 2.0 * lc;
    while f(hi) > 0.0 {
        hi *= 2.0;
    }
    let w2 = solve(1.0, hi, -lc);
    (w1, w2)
}

/// Threshold constants of the tail law at `(x, κ)`.
pub fn tail_constants(model: &TwoBandModel, x: f64, kappa: f64, tol: f64) -> Result<TailConstants> {
    model.check_upper_interior(x)?;
    let y = model.u_inv(x);
    let nu = model.nu();
    let rho = rho_of(model, x)?;
    let declared = threshold_behavior(model, y)
        .ok_or_else(|| Error::Domain(format!("no power-law threshold for v at y = {y}")))?;
    let (fit, _) = fit_threshold(model, y)
        .ok_or_else(|| Error::Domain(format!("threshold fit failed at y = {y}")))?;
    let j = integrate_semi_infinite_with(
        |z| {
            let v = model.v(y, Complex64::new(z, 0.0));
            if v == Complex64::new(0.0, 0.0) {
                v
            } else {
                v / (z - nu)
            }
        },
        nu,
        1.0,
        &[],
        &QuadOptions::tol(tol),
    )?
    .value
    .re;
    let gap = x - nu - y;
    let d = gap - kappa * kappa * rho * j;
    let kappa_crit_sq = gap / (rho * j);
    if d.abs() < CRITICAL_COUPLING_TOL {
        return Err(Error::CriticalCoupling(d.abs()));
    }
    Ok(TailConstants {
        p: declared.exponent,
        a_nu_x: declared.coefficient,
        p_fit: fit.exponent,
        a_fit: fit.coefficient,
        j_integral: j,
        d_nu_x: d,
        kappa_crit: kappa_crit_sq.sqrt(),
        kappa_crit_sq,
        w_nu_x: kappa * kappa * rho * declared.coefficient / (d * d),
        xi0: nu + y,
    })
}

/// `w e^{-iξ₀t} e^{-iπ(p+1)/2} Γ(p+1) t^{-(p+1)}`.
pub fn tail_asymptote(tail: &TailConstants, t: f64) -> Complex64 {
    let q = tail.p + 1.0;
    let phase = Complex64::from_polar(1.0, -tail.xi0 * t - 0.5 * PI * q);
    phase * (tail.w_nu_x * libm::tgamma(q) * t.powf(-q))
}

/// Default record grid: `t = 0`, then geometric from `T₁/4` to `10 T₂`.
pub fn default_time_grid(window: (f64, f64), per_decade: usize) -> Vec<f64> {
    geometric_grid(0.25 * window.0, 10.0 * window.1, per_decade)
}

/// `t = 0` followed by a geometric grid from `t_min` to `t_max`.
pub fn geometric_grid(t_min: f64, t_max: f64, per_decade: usize) -> Vec<f64> {
    let mut out = vec![0.0];
    if !(t_min > 0.0 && t_max >= t_min) {
        return out;
    }
    let per = per_decade.max(1) as f64;
    let decades = (t_max / t_min).log10();
    let n = (decades * per).ceil() as usize;
    for i in 0..=n {
        let t = t_min * 10f64.powf(i as f64 / per);
        out.push(if i == n { t_max } else { t.min(t_max) });
    }
    out.dedup();
    out
}

/// Evaluates both methods and the approximants on `times`, in parallel.
pub fn decay_record(
    model: &TwoBandModel,
    pole: &PolePoint,
    times: &[f64],
    c6: f64,
    tol: f64,
) -> Result<DecayRecord> {
    let (x, kappa) = (pole.x, pole.kappa);
    let plan = DirectPlan::new(model, x, kappa, tol)?;
    let tail = tail_constants(model, x, kappa, tol)?;
    let window = exp_window(pole, c6).ok();
    let rows: Vec<(Complex64, Complex64)> = times
        .par_iter()
        .map(|&t| {
            let direct = plan.amplitude(t)?;
            let contour = decay_amplitude_contour(model, x, kappa, t, pole, tol)?;
            Ok((direct, contour))
        })
        .collect::<Result<_>>()?;
    let u_exp = times
        .iter()
        .map(|&t| pole.amplitude_a * (-I * pole.zeta * t).exp())
        .collect();
    let u_tail = times
        .iter()
        .map(|&t| {
            if t > 0.0 {
                tail_asymptote(&tail, t)
            } else {
                Complex64::new(f64::INFINITY, 0.0)
            }
        })
        .collect();
    Ok(DecayRecord {
        x,
        kappa,
        times: times.to_vec(),
        u_direct: rows.iter().map(|r| r.0).collect(),
        u_contour: rows.iter().map(|r| r.1).collect(),
        u_exp,
        u_tail,
        window,
        tail,
        pole: *pole,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::default_model;
    use crate::resolvent::d_plus;
    use crate::resonance::solve_pole;

    #[test]
    fn density_vanishes_below_threshold() {
        let m = default_model();
        assert_eq!(spectral_density_w(&m, 2.5, 0.2, 0.4, 1e-10).unwrap(), 0.0);
        assert_eq!(spectral_density_w(&m, 2.5, 0.2, 0.5, 1e-10).unwrap(), 0.0);
        assert!(matches!(
            spectral_density_w(&m, 2.5, 0.0, 2.5, 1e-10),
            Err(Error::DegenerateDensity)
        ));
    }

    #[test]
    fn density_is_imaginary_part_of_resolvent() {
        let m = default_model();
        let w = spectral_density_w(&m, 2.5, 0.2, 2.6, 1e-12).unwrap();
        let d = d_plus(&m, 2.5, 0.2, Complex64::new(2.6, 0.0), 1e-12).unwrap();
        assert!((w - (1.0 / d).im / PI).abs() < 1e-10);
    }

    #[test]
    fn free_evolution_at_zero_coupling() {
        let m = default_model();
        let u = decay_amplitude_direct(&m, 2.5, 0.0, 3.0, 1e-10).unwrap();
        assert_eq!(u, Complex64::from_polar(1.0, -7.5));
    }

    #[test]
    fn tail_constants_at_band_center() {
        let m = default_model();
        let tc = tail_constants(&m, 2.5, 0.2, 1e-12).unwrap();
        assert!((tc.d_nu_x - 1.96).abs() < 1e-9);
        assert!((tc.kappa_crit_sq - 2.0).abs() < 1e-9);
        assert_eq!(tc.p, 1.0);
        let free = tail_constants(&m, 2.5, 0.0, 1e-12).unwrap();
        assert!((free.d_nu_x - 2.0).abs() < 1e-15);
    }

    #[test]
    fn critical_coupling_is_rejected() {
        let m = default_model();
        let r = tail_constants(&m, 2.5, 2.0f64.sqrt(), 1e-12);
        assert!(matches!(r, Err(Error::CriticalCoupling(_))));
    }

    #[test]
    fn tail_phase_for_linear_threshold() {
        let tc = TailConstants {
            p: 1.0,
            a_nu_x: 1.0,
            p_fit: 1.0,
            a_fit: 1.0,
            j_integral: 1.0,
            d_nu_x: 1.0,
            kappa_crit: 1.0,
            kappa_crit_sq: 1.0,
            w_nu_x: 0.5,
            xi0: 0.0,
        };
        let u = tail_asymptote(&tc, 2.0);
        assert!((u - Complex64::new(-0.125, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn lambert_branches_solve_the_equation() {
        for c in [1e-6, 1e-3, 0.1, 0.3, 0.36] {
            let (w1, w2) = lambert_branches(c);
            assert!(w1 < 1.0 && w2 > 1.0);
            assert!((w1 * (-w1).exp() - c).abs() < 1e-14 * c.max(1e-3));
            assert!((w2 * (-w2).exp() - c).abs() < 1e-14 * c.max(1e-3));
        }
    }

    #[test]
    fn window_errors_and_tangency() {
        let pole = PolePoint {
            x: 2.5,
            kappa: 1.0,
            zeta: Complex64::new(2.5, -1.0),
            residual: 0.0,
            amplitude_a: Complex64::new(1.0, 0.0),
            newton_iters: 0,
        };
        assert!(matches!(exp_window(&pole, 1.0), Err(Error::NoWindow(_))));
        let (t1, t2) = exp_window(&pole, (-1.0f64).exp()).unwrap();
        assert_eq!((t1, t2), (1.0, 1.0));
    }

    #[test]
    fn threshold_limit_of_denominator() {
        let m = default_model();
        let tc = tail_constants(&m, 2.5, 0.2, 1e-12).unwrap();
        let zeta = tc.xi0 + Complex64::from_polar(1e-6, -0.5 * m.sector_theta0());
        let d = d_plus(&m, 2.5, 0.2, zeta, 1e-12).unwrap();
        assert!((d - tc.d_nu_x).norm() < 1e-3);
    }

    #[test]
    fn geometric_grid_shape() {
        let g = geometric_grid(1.0, 100.0, 10);
        assert_eq!(g[0], 0.0);
        assert_eq!(g[1], 1.0);
        assert_eq!(*g.last().unwrap(), 100.0);
        assert_eq!(g.len(), 22);
    }

    #[test]
    fn contour_rejects_negative_time() {
        let m = default_model();
        let pole = solve_pole(&m, 2.5, 0.2, None, 1e-12).unwrap();
        assert!(decay_amplitude_contour(&m, 2.5, 0.2, -1.0, &pole, 1e-10).is_err());
    }
}
