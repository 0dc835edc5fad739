//! Level-shift function `G(y,ζ) = ∫_ν^∞ v(y,z)/(y+z-ζ) dz`, its boundary
//! values on the real axis, its continuations across the cut, and the
//! reduced resolvent built from them.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{rho_of, TwoBandModel};
use crate::quad::{
    integrate_partitioned, integrate_semi_infinite_with, principal_value, QuadOptions,
};

/// Denominators smaller than this are treated as poles.
pub const NEAR_POLE: f64 = 1e-14;
/// Relative radius around `z = s` inside which subtracted integrands switch
/// to their Taylor expansion.
const TAYLOR_RADIUS: f64 = 1e-5;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Which determination of the level shift is meant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Sheet {
    /// `G` itself; on the axis the boundary value from above.
    Physical,
    /// `G_Ω`: `G` above the axis continued downward through the band.
    ContinuedBelow,
    /// `G^Ω`: `G` below the axis continued upward through the band.
    ContinuedAbove,
}

/// A point of the energy plane together with its sheet.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComplexEnergy {
    pub value: Complex64,
    pub sheet: Sheet,
}

impl ComplexEnergy {
    pub fn new(value: Complex64, sheet: Sheet) -> Self {
        Self { value, sheet }
    }

    pub fn physical(value: Complex64) -> Self {
        Self::new(value, Sheet::Physical)
    }

    pub fn below(value: Complex64) -> Self {
        Self::new(value, Sheet::ContinuedBelow)
    }

    pub fn above(value: Complex64) -> Self {
        Self::new(value, Sheet::ContinuedAbove)
    }
}

/// Value of the level shift at a point, with the pieces it was built from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LevelShift {
    pub g_value: Complex64,
    /// Principal value `I(y,ξ)` when the point lies on the axis above the threshold.
    pub i_value: Option<f64>,
    /// Term added to the plain integral (or to `I` on the axis).
    pub jump: Complex64,
}

/// How the axis is approached when `Im s = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Approach {
    Above,
    Below,
}

fn options(tol: f64) -> QuadOptions {
    QuadOptions::tol(tol)
}

/// `∫_ν^∞ v(y,z)/(z-s)^order dz` for `order ∈ {1, 2}`.
///
/// Off the axis this is the ordinary integral. When `s` is within the
/// window `k = min(Re s - ν, 1)/2` of the axis, `v(s)` (and `v'(s)` for the
/// second order) is subtracted on `[Re s - k, Re s + k]` and the subtracted
/// rational part is integrated in closed form, which keeps the quadrature
/// smooth however close `s` is to the axis. On the axis the logarithm
/// takes its boundary value from the requested side.
fn cauchy_transform(
    model: &TwoBandModel,
    y: f64,
    s: Complex64,
    order: u8,
    approach: Approach,
    tol: f64,
) -> Result<Complex64> {
    let nu = model.nu();
    let (sigma, tau) = (s.re, s.im);
    let opts = options(tol);
    let v = |z: f64| model.v(y, Complex64::new(z, 0.0));
    let power = |w: Complex64| if order == 1 { w } else { w * w };
    let kernel = |z: f64| {
        let val = v(z);
        if val == Complex64::new(0.0, 0.0) {
            val
        } else {
            val / power(Complex64::new(z, 0.0) - s)
        }
    };
    let room = sigma - nu;
    if room > 0.0 && tau.abs() < 0.5 * room.min(1.0) {
        let k = 0.5 * room.min(1.0);
        let (a, b) = (sigma - k, sigma + k);
        let vs = model.v(y, s);
        let d1 = model.dv_dz(y, s);
        let d2 = model.d2v_dz2(y, s);
        let guard = TAYLOR_RADIUS * k;
        let middle = integrate_partitioned(
            |z| {
                let w = Complex64::new(z, 0.0) - s;
                if w.norm() < guard {
                    if order == 1 {
                        d1 + d2 * w * 0.5
                    } else {
                        d2 * 0.5
                    }
                } else if order == 1 {
                    (v(z) - vs) / w
                } else {
                    (v(z) - vs - d1 * w) / (w * w)
                }
            },
            &[a, sigma, b],
            &opts,
        )?;
        let lower = integrate_partitioned(kernel, &[nu, a], &opts)?;
        let upper = integrate_semi_infinite_with(kernel, b, 1.0, &[], &opts)?;
        let log_term = if tau == 0.0 {
            match approach {
                Approach::Above => I * PI,
                Approach::Below => -I * PI,
            }
        } else {
            (Complex64::new(b, 0.0) - s).ln() - (Complex64::new(a, 0.0) - s).ln()
        };
        let closed = if order == 1 {
            vs * log_term
        } else {
            vs * (1.0 / (a - s) - 1.0 / (b - s)) + d1 * log_term
        };
        return Ok(lower.value + middle.value + upper.value + closed);
    }
    let spread = tau.abs();
    let breaks: Vec<f64> = [sigma - spread, sigma, sigma + spread]
        .into_iter()
        .filter(|&p| p > nu)
        .collect();
    let r = integrate_semi_infinite_with(kernel, nu, 1.0_f64.max(spread), &breaks, &opts)?;
    Ok(r.value)
}

fn on_cut(model: &TwoBandModel, y: f64, zeta: Complex64) -> bool {
    zeta.im == 0.0 && zeta.re <= y + model.nu()
}

fn check_point(model: &TwoBandModel, y: f64, zeta: Complex64) -> Result<()> {
    if !(zeta.re.is_finite() && zeta.im.is_finite() && y.is_finite()) {
        return Err(Error::Domain(format!(
            "non-finite argument y = {y}, zeta = {zeta}"
        )));
    }
    if on_cut(model, y, zeta) {
        return Err(Error::Domain(format!(
            "zeta = {zeta} lies on the cut (-inf, y + nu] = (-inf, {}]",
            y + model.nu()
        )));
    }
    Ok(())
}

fn check_sector(model: &TwoBandModel, s: Complex64) -> Result<()> {
    if model.in_sector(s) {
        Ok(())
    } else {
        Err(Error::Sector(format!(
            "photon energy {s} is outside the continuation sector Re z > {}, |arg z| <= {}",
            model.nu(),
            model.sector_theta0()
        )))
    }
}

/// `G(y,ζ)` off the real axis.
pub fn g_plain(model: &TwoBandModel, y: f64, zeta: Complex64, tol: f64) -> Result<Complex64> {
    if zeta.im == 0.0 {
        return Err(Error::Domain(format!(
            "g_plain needs Im zeta != 0 (got {zeta}); use i_pv or g_continued on the axis"
        )));
    }
    check_point(model, y, zeta)?;
    cauchy_transform(model, y, zeta - y, 1, Approach::Above, tol)
}

/// Principal value `I(y,ξ) = 𝒫∫_ν^∞ v(y,z)/(y+z-ξ) dz` for `ξ > y + ν`.
pub fn i_pv(model: &TwoBandModel, y: f64, xi: f64, tol: f64) -> Result<f64> {
    let r = principal_value(|z| model.v_real(y, z), y, xi, model.nu(), tol)?;
    Ok(r.value.re)
}

/// `G`, `G_Ω` or `G^Ω` at `ζ`, depending on the sheet.
pub fn g_continued(
    model: &TwoBandModel,
    y: f64,
    zeta: ComplexEnergy,
    tol: f64,
) -> Result<LevelShift> {
    let z = zeta.value;
    check_point(model, y, z)?;
    let s = z - y;
    if z.im == 0.0 {
        let pv = i_pv(model, y, z.re, tol)?;
        let half = I * PI * model.v(y, s);
        let jump = match zeta.sheet {
            Sheet::Physical | Sheet::ContinuedBelow => half,
            Sheet::ContinuedAbove => -half,
        };
        return Ok(LevelShift {
            g_value: pv + jump,
            i_value: Some(pv),
            jump,
        });
    }
    let jump = match (zeta.sheet, z.im < 0.0) {
        (Sheet::ContinuedBelow, true) => {
            check_sector(model, s)?;
            2.0 * PI * I * model.v(y, s)
        }
        (Sheet::ContinuedAbove, false) => {
            check_sector(model, s)?;
            -2.0 * PI * I * model.v(y, s)
        }
        _ => Complex64::new(0.0, 0.0),
    };
    let g = cauchy_transform(model, y, s, 1, Approach::Above, tol)?;
    Ok(LevelShift {
        g_value: g + jump,
        i_value: None,
        jump,
    })
}

/// `(G_Ω, G^Ω)` at one point from a single quadrature.
pub fn level_shift_pair(
    model: &TwoBandModel,
    y: f64,
    zeta: Complex64,
    tol: f64,
) -> Result<(Complex64, Complex64)> {
    check_point(model, y, zeta)?;
    let s = zeta - y;
    if zeta.im == 0.0 {
        let pv = i_pv(model, y, zeta.re, tol)?;
        let half = I * PI * model.v(y, s);
        return Ok((pv + half, pv - half));
    }
    check_sector(model, s)?;
    let g = cauchy_transform(model, y, s, 1, Approach::Above, tol)?;
    let jump = 2.0 * PI * I * model.v(y, s);
    if zeta.im < 0.0 {
        Ok((g + jump, g))
    } else {
        Ok((g, g - jump))
    }
}

/// `∂/∂ζ` of [`g_continued`] on the same sheet.
pub fn dg_continued_dzeta(
    model: &TwoBandModel,
    y: f64,
    zeta: ComplexEnergy,
    tol: f64,
) -> Result<Complex64> {
    let z = zeta.value;
    check_point(model, y, z)?;
    let s = z - y;
    if z.im == 0.0 {
        let approach = match zeta.sheet {
            Sheet::Physical | Sheet::ContinuedBelow => Approach::Above,
            Sheet::ContinuedAbove => Approach::Below,
        };
        return cauchy_transform(model, y, s, 2, approach, tol);
    }
    let jump = match (zeta.sheet, z.im < 0.0) {
        (Sheet::ContinuedBelow, true) => {
            check_sector(model, s)?;
            2.0 * PI * I * model.dv_dz(y, s)
        }
        (Sheet::ContinuedAbove, false) => {
            check_sector(model, s)?;
            -2.0 * PI * I * model.dv_dz(y, s)
        }
        _ => Complex64::new(0.0, 0.0),
    };
    Ok(cauchy_transform(model, y, s, 2, Approach::Above, tol)? + jump)
}

fn denominator(
    model: &TwoBandModel,
    x: f64,
    kappa: f64,
    zeta: Complex64,
    sheet: Sheet,
    tol: f64,
) -> Result<Complex64> {
    model.check_upper_interior(x)?;
    if kappa == 0.0 {
        return Ok(x - zeta);
    }
    let rho = rho_of(model, x)?;
    let y = model.u_inv(x);
    let g = g_continued(model, y, ComplexEnergy::new(zeta, sheet), tol)?;
    Ok(x - zeta - kappa * kappa * rho * g.g_value)
}

/// `D₊(x,κ,ζ) = x - ζ - κ²ϱ(x) G_Ω(u⁻¹(x), ζ)`.
pub fn d_plus(
    model: &TwoBandModel,
    x: f64,
    kappa: f64,
    zeta: Complex64,
    tol: f64,
) -> Result<Complex64> {
    denominator(model, x, kappa, zeta, Sheet::ContinuedBelow, tol)
}

/// `D₋(x,κ,ζ) = x - ζ - κ²ϱ(x) G^Ω(u⁻¹(x), ζ)`.
pub fn d_minus(
    model: &TwoBandModel,
    x: f64,
    kappa: f64,
    zeta: Complex64,
    tol: f64,
) -> Result<Complex64> {
    denominator(model, x, kappa, zeta, Sheet::ContinuedAbove, tol)
}

/// Reduced resolvent `r(x,ζ) = 1/(x - ζ - κ²ϱ(x) G(u⁻¹(x), ζ))`, `Im ζ ≠ 0`.
pub fn reduced_resolvent_r(
    model: &TwoBandModel,
    x: f64,
    kappa: f64,
    zeta: Complex64,
    tol: f64,
) -> Result<Complex64> {
    if zeta.im == 0.0 {
        return Err(Error::Domain(format!(
            "reduced resolvent needs Im zeta != 0, got {zeta}"
        )));
    }
    model.check_upper_interior(x)?;
    let d = if kappa == 0.0 {
        x - zeta
    } else {
        let rho = rho_of(model, x)?;
        x - zeta - kappa * kappa * rho * g_plain(model, model.u_inv(x), zeta, tol)?
    };
    if d.norm() < NEAR_POLE {
        return Err(Error::NearPole {
            zeta,
            magnitude: d.norm(),
        });
    }
    Ok(1.0 / d)
}

/// Coupling `λ(y,z) = √v(y,z)` for real `z ≥ ν`, with photon weight `ω ≡ 1`.
pub fn coupling(model: &TwoBandModel, y: f64, z: f64) -> f64 {
    model.v_real(y, z).max(0.0).sqrt()
}

/// `∫_K λ(y,z') g₁(y,z') / (y+z'-ζ) dz'`.
fn coupled_transform<G>(
    model: &TwoBandModel,
    y: f64,
    zeta: Complex64,
    g1: &G,
    tol: f64,
) -> Result<Complex64>
where
    G: Fn(f64, f64) -> Complex64,
{
    let nu = model.nu();
    let spread = zeta.im.abs();
    let breaks: Vec<f64> = [zeta.re - y - spread, zeta.re - y, zeta.re - y + spread]
        .into_iter()
        .filter(|&p| p > nu)
        .collect();
    let r = integrate_semi_infinite_with(
        |z| {
            let lam = coupling(model, y, z);
            if lam == 0.0 {
                Complex64::new(0.0, 0.0)
            } else {
                g1(y, z) * lam / (y + z - zeta)
            }
        },
        nu,
        1.0_f64.max(spread),
        &breaks,
        &options(tol),
    )?;
    Ok(r.value)
}

/// Components `(f(x), g(y,z))` of `(H-ζ)⁻¹(f₁, g₁)`, with coupling
/// `λ = √v` and photon weight `ω ≡ 1`. Uses two quadratures when
/// `y = u⁻¹(x)` and four otherwise.
#[allow(clippy::too_many_arguments)]
pub fn apply_resolvent<F, G>(
    model: &TwoBandModel,
    kappa: f64,
    zeta: Complex64,
    f1: &F,
    g1: &G,
    x: f64,
    y: f64,
    z: f64,
    tol: f64,
) -> Result<(Complex64, Complex64)>
where
    F: Fn(f64) -> Complex64,
    G: Fn(f64, f64) -> Complex64,
{
    if zeta.im == 0.0 {
        return Err(Error::Domain(format!(
            "resolvent needs Im zeta != 0, got {zeta}"
        )));
    }
    model.check_upper_interior(x)?;
    if !model.i0().contains_open(y) || !(z >= model.nu()) {
        return Err(Error::Domain(format!(
            "query point (y, z) = ({y}, {z}) is outside I0 x K"
        )));
    }
    let free_g = g1(y, z) / (y + z - zeta);
    if kappa == 0.0 {
        return Ok((f1(x) / (x - zeta), free_g));
    }
    let k2 = kappa * kappa;
    let yx = model.u_inv(x);
    let r_x = reduced_resolvent_r(model, x, kappa, zeta, tol)?;
    let t_x = coupled_transform(model, yx, zeta, g1, tol)?;
    let f = r_x * f1(x) - kappa * r_x * rho_of(model, x)? * t_x;
    let xy = model.u(y);
    let (r_y, t_y) = if xy == x {
        (r_x, t_x)
    } else {
        (
            reduced_resolvent_r(model, xy, kappa, zeta, tol)?,
            coupled_transform(model, y, zeta, g1, tol)?,
        )
    };
    let lam = coupling(model, y, z) / (y + z - zeta);
    let g = -kappa * lam * r_y * f1(xy) + free_g + k2 * lam * r_y * rho_of(model, xy)? * t_y;
    Ok((f, g))
}
