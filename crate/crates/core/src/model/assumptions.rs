//! Numerical checks of the model hypotheses on tensor grids.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{rho_of, Threshold, TwoBandModel};
use crate::quad::integrate_semi_infinite;

/// Photon energies are sampled on `[ν, ν + Z_SPAN]`.
const Z_SPAN: f64 = 60.0;
/// Threshold fits use `s ∈ [1e-4, 1e-2]`.
const FIT_POINTS: [f64; 5] = [
    1e-4,
    3.162_277_660_168_379e-4,
    1e-3,
    3.162_277_660_168_379e-3,
    1e-2,
];
/// Relative spread tolerated in threshold fits.
const FIT_SPREAD: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AssumptionStatus {
    Pass,
    Fail,
    NotChecked,
}

impl AssumptionStatus {
    fn from_bool(ok: bool) -> Self {
        if ok {
            Self::Pass
        } else {
            Self::Fail
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridMetadata {
    pub grid_density: usize,
    pub y_points: usize,
    pub x_points: usize,
    pub z_points: usize,
    pub z_max: f64,
    pub roundtrip_points: usize,
}

/// Outcome of [`validate_assumptions`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AssumptionReport {
    /// Keyed `a1` … `a13`.
    pub status: BTreeMap<String, AssumptionStatus>,
    /// `sup_y ∫ v(y,z) dz`.
    pub c: f64,
    /// `sup ϱ`.
    pub c1: f64,
    /// `sup |v|` on the real grid.
    pub c2: f64,
    /// `sup |∂v/∂z|` on the real grid.
    pub c3: f64,
    /// `√(16 C C₃ + π² C₂²)`, a bound for `|G|` near the axis.
    pub c4: f64,
    /// `sup |∂²v/∂z²|` on the real grid.
    pub c5: f64,
    /// `min (x - ν - u⁻¹(x))`; negative when the gap condition fails.
    pub d: f64,
    /// `sup (x - u⁻¹(x) - ν)`.
    pub d1: f64,
    pub grid: GridMetadata,
    pub notes: Vec<String>,
}

impl AssumptionReport {
    /// True when no checked hypothesis failed.
    pub fn all_pass(&self) -> bool {
        self.status.values().all(|s| *s != AssumptionStatus::Fail)
    }

    pub fn get(&self, key: &str) -> AssumptionStatus {
        self.status
            .get(key)
            .copied()
            .unwrap_or(AssumptionStatus::NotChecked)
    }

    pub fn failed(&self) -> Vec<String> {
        self.status
            .iter()
            .filter(|(_, s)| **s == AssumptionStatus::Fail)
            .map(|(k, _)| k.clone())
            .collect()
    }
}

fn finite_max(values: impl IntoIterator<Item = f64>) -> f64 {
    values.into_iter().fold(0.0, |acc: f64, v| {
        if v.is_finite() {
            acc.max(v)
        } else {
            f64::INFINITY
        }
    })
}

/// Least-squares fit of `log v(y, ν+s) = log A + p log s + b s` over
/// `s ∈ [1e-4, 1e-2]`; the linear term absorbs the smooth correction to the
/// power law. Returns `(A, p)` and the relative spread of `v/(s^p e^{bs})`.
pub fn fit_threshold(model: &TwoBandModel, y: f64) -> Option<(Threshold, f64)> {
    let nu = model.nu();
    let mut values = Vec::with_capacity(FIT_POINTS.len());
    for &s in &FIT_POINTS {
        let v = model.v_real(y, nu + s);
        if !(v > 0.0 && v.is_finite()) {
            return None;
        }
        values.push(v);
    }
    // normal equations for the basis (1, ln s, s)
    let mut ata = [[0.0f64; 3]; 3];
    let mut atb = [0.0f64; 3];
    for (&s, &v) in FIT_POINTS.iter().zip(&values) {
        let row = [1.0, s.ln(), s];
        for i in 0..3 {
            for j in 0..3 {
                ata[i][j] += row[i] * row[j];
            }
            atb[i] += row[i] * v.ln();
        }
    }
    let [log_a, exponent, b] = solve3(ata, atb)?;
    let coefficient = log_a.exp();
    let ratios: Vec<f64> = FIT_POINTS
        .iter()
        .zip(&values)
        .map(|(&s, &v)| v / (s.powf(exponent) * (b * s).exp()))
        .collect();
    let hi = ratios.iter().copied().fold(f64::MIN, f64::max);
    let lo = ratios.iter().copied().fold(f64::MAX, f64::min);
    Some((
        Threshold {
            exponent,
            coefficient,
        },
        (hi - lo) / coefficient.abs(),
    ))
}

/// Solves a 3×3 system by Cramer's rule.
fn solve3(a: [[f64; 3]; 3], b: [f64; 3]) -> Option<[f64; 3]> {
    let det = |m: &[[f64; 3]; 3]| {
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    };
    let d = det(&a);
    if !(d.abs() > 0.0 && d.is_finite()) {
        return None;
    }
    let mut out = [0.0; 3];
    for (k, slot) in out.iter_mut().enumerate() {
        let mut m = a;
        for i in 0..3 {
            m[i][k] = b[i];
        }
        *slot = det(&m) / d;
    }
    Some(out)
}

/// Threshold data for `y`: declared by the formfactor when available,
/// fitted otherwise.
pub fn threshold_behavior(model: &TwoBandModel, y: f64) -> Option<Threshold> {
    model
        .formfactor()
        .threshold(y)
        .or_else(|| fit_threshold(model, y).map(|(t, _)| t))
}

/// Checks each numerically checkable hypothesis. Failures are reported,
/// never raised. `grid_density` is clamped to at least 16.
pub fn validate_assumptions(model: &TwoBandModel, grid_density: usize) -> AssumptionReport {
    let n = grid_density.max(16);
    let nu = model.nu();
    let ys = model.lower_grid(n);
    let xs = model.upper_grid(n);
    let m = 8 * n;
    let zs: Vec<f64> = (0..=m)
        .map(|j| nu + Z_SPAN * (j as f64 / m as f64).powi(2))
        .collect();
    let mut status = BTreeMap::new();
    let mut notes = Vec::new();
    let mut put = |key: &str, s: AssumptionStatus| {
        status.insert(key.to_string(), s);
    };

    // (a1) band map: monotone, onto, round trip
    let roundtrip_points = 1000;
    let i0 = model.i0();
    let i1 = model.i1();
    let dense0 = i0.clipped_grid(roundtrip_points, 0.0);
    let images: Vec<f64> = dense0.iter().map(|&y| model.u(y)).collect();
    let increasing = images.windows(2).all(|w| w[1] > w[0]);
    let decreasing = images.windows(2).all(|w| w[1] < w[0]);
    let end_tol = 1e-9 * i1.width();
    let (first, last) = (images[0], images[images.len() - 1]);
    let onto = ((first - i1.lo).abs() < end_tol && (last - i1.hi).abs() < end_tol)
        || ((first - i1.hi).abs() < end_tol && (last - i1.lo).abs() < end_tol);
    let roundtrip = i1
        .clipped_grid(roundtrip_points, 0.0)
        .iter()
        .all(|&x| (model.u(model.u_inv(x)) - x).abs() < 1e-12 * x.abs().max(1.0));
    let nonsingular = dense0.iter().all(|&y| {
        let d = model.u_prime(y);
        d.is_finite() && d != 0.0
    });
    let a1 = (increasing || decreasing) && onto && roundtrip && nonsingular;
    if !a1 {
        notes.push("band map is not a monotone bijection of I0 onto I1 on the sampled grid".into());
    }
    put("a1", AssumptionStatus::from_bool(a1));

    // (a2) integrability of v and boundedness of rho
    let integrals: Vec<f64> = ys
        .iter()
        .map(|&y| {
            integrate_semi_infinite(|z| model.v(y, Complex64::new(z, 0.0)), nu, 1e-10)
                .map(|r| r.value.norm())
                .unwrap_or(f64::INFINITY)
        })
        .collect();
    let c = finite_max(integrals.iter().copied());
    let rhos: Vec<f64> = xs
        .iter()
        .map(|&x| rho_of(model, x).unwrap_or(f64::NAN))
        .collect();
    let rho_ok = rhos.iter().all(|r| r.is_finite() && *r > 0.0);
    let c1 = if rho_ok {
        finite_max(rhos.iter().copied())
    } else {
        f64::INFINITY
    };
    put("a2", AssumptionStatus::from_bool(c.is_finite() && rho_ok));

    // (a3), (a10) holomorphy on the declared sector
    let theta0 = model.sector_theta0();
    let sector_ok = theta0 > 0.0 && theta0 < PI / 4.0;
    put("a3", AssumptionStatus::from_bool(sector_ok));
    put("a10", AssumptionStatus::from_bool(sector_ok));
    notes.push(format!(
        "holomorphy is taken from the declared sector half-angle {theta0}"
    ));

    // (a4) joint continuity is assumed
    put("a4", AssumptionStatus::NotChecked);

    // (a5) gap between the bands and the photon threshold
    let gaps: Vec<f64> = xs.iter().map(|&x| x - nu - model.u_inv(x)).collect();
    let d = gaps.iter().copied().fold(f64::INFINITY, f64::min);
    let d1 = gaps.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    put("a5", AssumptionStatus::from_bool(d > 0.0));

    // (a6) boundedness of v and its derivative on the real grid
    let mut c2: f64 = 0.0;
    let mut c3: f64 = 0.0;
    let mut c5: f64 = 0.0;
    let mut positive = true;
    for &y in &ys {
        for &z in &zs {
            let zc = Complex64::new(z, 0.0);
            let v = model.v(y, zc);
            c2 = c2.max(if v.norm().is_finite() {
                v.norm()
            } else {
                f64::INFINITY
            });
            c3 = c3.max(finite_max([model.dv_dz(y, zc).norm()]));
            c5 = c5.max(finite_max([model.d2v_dz2(y, zc).norm()]));
            if z > nu && !(v.re > 0.0) {
                positive = false;
            }
        }
    }
    put(
        "a6",
        AssumptionStatus::from_bool(c2.is_finite() && c3.is_finite()),
    );

    // (a7) v vanishes at the threshold
    let a7 = ys
        .iter()
        .all(|&y| model.v(y, Complex64::new(nu, 0.0)).norm() <= 1e-14 * c2.max(1.0));
    put("a7", AssumptionStatus::from_bool(a7));

    // (a8) strict positivity on the energy-conserving window
    let window = 1.5 * d1.max(0.0);
    let a8 = window > 0.0
        && ys.iter().all(|&y| {
            (1..=m).all(|j| {
                let z = nu + window * j as f64 / m as f64;
                model.v_real(y, z) > 0.0
            })
        });
    put("a8", AssumptionStatus::from_bool(a8));

    // (a9) second derivative bound
    put("a9", AssumptionStatus::from_bool(c5.is_finite()));

    // (a11) positivity above the threshold
    put("a11", AssumptionStatus::from_bool(positive && c2 > 0.0));

    // (a12) decay along the sector rays
    let radii = [10.0, 100.0, 1000.0];
    let a12 = ys.iter().all(|&y| {
        [-1.0, -0.5, 0.0, 0.5, 1.0].iter().all(|&frac| {
            let dir = Complex64::from_polar(1.0, frac * theta0);
            let mags: Vec<f64> = radii
                .iter()
                .map(|&r| model.v(y, dir * r + nu).norm() * r)
                .collect();
            mags.iter().all(|m| m.is_finite())
                && mags.windows(2).all(|w| w[1] <= w[0])
                && mags[2] <= 1e-3 * mags[0].max(f64::MIN_POSITIVE)
        })
    });
    put("a12", AssumptionStatus::from_bool(a12));

    // (a13) power-law threshold with nonzero coefficient
    let a13 = ys.iter().all(|&y| match fit_threshold(model, y) {
        Some((fit, spread)) => {
            let declared_ok = match model.formfactor().threshold(y) {
                Some(t) => {
                    (fit.exponent - t.exponent).abs() <= FIT_SPREAD * t.exponent.abs()
                        && (fit.coefficient - t.coefficient).abs()
                            <= FIT_SPREAD * t.coefficient.abs()
                }
                None => true,
            };
            spread < FIT_SPREAD && fit.coefficient != 0.0 && declared_ok
        }
        None => false,
    });
    put("a13", AssumptionStatus::from_bool(a13));

    let c4 = (16.0 * c * c3 + PI * PI * c2 * c2).sqrt();
    AssumptionReport {
        status,
        c,
        c1,
        c2,
        c3,
        c4,
        c5,
        d,
        d1,
        grid: GridMetadata {
            grid_density: n,
            y_points: ys.len(),
            x_points: xs.len(),
            z_points: zs.len(),
            z_max: nu + Z_SPAN,
            roundtrip_points,
        },
        notes,
    }
}
