//! Two-band model data: energy bands, band map, density weights, photon
//! threshold and the coupling formfactor.

mod assumptions;
mod config;

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use assumptions::{
    fit_threshold, threshold_behavior, validate_assumptions, AssumptionReport, AssumptionStatus,
    GridMetadata,
};
pub use config::ModelConfig;

/// Step used for central differences of `∂v/∂z`.
pub const SECOND_DERIVATIVE_STEP: f64 = 1e-4;
/// Relative edge clip applied to band grids.
pub const DEFAULT_EDGE_CLIP: f64 = 1e-9;
/// Default half-angle of the continuation sector.
pub const DEFAULT_SECTOR_THETA0: f64 = PI / 8.0;

/// Closed energy interval `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite()) {
            return Err(Error::InvalidModel(format!(
                "interval [{lo}, {hi}] is not finite"
            )));
        }
        if !(lo < hi) {
            return Err(Error::InvalidModel(format!(
                "interval needs lo < hi, got [{lo}, {hi}]"
            )));
        }
        Ok(Self { lo, hi })
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn contains_open(&self, x: f64) -> bool {
        self.lo < x && x < self.hi
    }

    /// `n ≥ 2` equally spaced points from `lo + clip` to `hi - clip`, where
    /// `clip = rel_clip · width`.
    pub fn clipped_grid(&self, n: usize, rel_clip: f64) -> Vec<f64> {
        let clip = rel_clip * self.width();
        let (a, b) = (self.lo + clip, self.hi - clip);
        match n {
            0 => Vec::new(),
            1 => vec![0.5 * (a + b)],
            _ => (0..n)
                .map(|i| {
                    if i + 1 == n {
                        b
                    } else {
                        a + (b - a) * i as f64 / (n - 1) as f64
                    }
                })
                .collect(),
        }
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

/// Energy-conserving map `u: I₀ → I₁` between the bands.
pub trait BandMap: Send + Sync {
    fn map(&self, y: f64) -> f64;
    fn derivative(&self, y: f64) -> f64;
    fn inverse(&self, x: f64) -> f64;
}

/// `u(y) = intercept + slope·y`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AffineBandMap {
    pub slope: f64,
    pub intercept: f64,
}

impl AffineBandMap {
    /// Affine map sending `from.lo ↦ to.hi` and `from.hi ↦ to.lo`.
    pub fn decreasing(from: Interval, to: Interval) -> Self {
        let slope = -to.width() / from.width();
        Self {
            slope,
            intercept: to.hi - slope * from.lo,
        }
    }
}

impl BandMap for AffineBandMap {
    fn map(&self, y: f64) -> f64 {
        self.intercept + self.slope * y
    }

    fn derivative(&self, _y: f64) -> f64 {
        self.slope
    }

    fn inverse(&self, x: f64) -> f64 {
        (x - self.intercept) / self.slope
    }
}

/// Leading behavior `v(y, ν+s) ≈ coefficient · s^exponent` as `s → 0⁺`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Threshold {
    pub exponent: f64,
    pub coefficient: f64,
}

/// Coupling density `v(y, z)` for `y ∈ I₀` and complex photon energy `z`,
/// holomorphic in `z` on the model's sector.
pub trait Formfactor: Send + Sync {
    fn value(&self, y: f64, z: Complex64) -> Complex64;

    /// `∂v/∂z`.
    fn dz(&self, y: f64, z: Complex64) -> Complex64;

    /// `∂²v/∂z²`, by default a central difference of [`Formfactor::dz`].
    fn d2z(&self, y: f64, z: Complex64) -> Complex64 {
        let h = SECOND_DERIVATIVE_STEP;
        (self.dz(y, z + h) - self.dz(y, z - h)) / (2.0 * h)
    }

    /// Declared threshold behavior at `z = ν`, if known in closed form.
    fn threshold(&self, _y: f64) -> Option<Threshold> {
        None
    }
}

/// `v(y, z) = g0² (z-ν) e^{-(z-ν)(1 + eps·y)}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpFormfactor {
    pub g0: f64,
    pub eps: f64,
    pub nu: f64,
}

impl Formfactor for ExpFormfactor {
    fn value(&self, y: f64, z: Complex64) -> Complex64 {
        let s = z - self.nu;
        s * (-s * (1.0 + self.eps * y)).exp() * (self.g0 * self.g0)
    }

    fn dz(&self, y: f64, z: Complex64) -> Complex64 {
        let b = 1.0 + self.eps * y;
        let s = z - self.nu;
        (-s * b).exp() * (1.0 - s * b) * (self.g0 * self.g0)
    }

    fn d2z(&self, y: f64, z: Complex64) -> Complex64 {
        let b = 1.0 + self.eps * y;
        let s = z - self.nu;
        (-s * b).exp() * (s * b - 2.0) * (b * self.g0 * self.g0)
    }

    fn threshold(&self, _y: f64) -> Option<Threshold> {
        Some(Threshold {
            exponent: 1.0,
            coefficient: self.g0 * self.g0,
        })
    }
}

type ComplexFn = Arc<dyn Fn(f64, Complex64) -> Complex64 + Send + Sync>;

/// Formfactor assembled from closures.
#[derive(Clone)]
pub struct FnFormfactor {
    value: ComplexFn,
    dz: ComplexFn,
    threshold: Option<Threshold>,
}

impl FnFormfactor {
    pub fn new<V, D>(value: V, dz: D) -> Self
    where
        V: Fn(f64, Complex64) -> Complex64 + Send + Sync + 'static,
        D: Fn(f64, Complex64) -> Complex64 + Send + Sync + 'static,
    {
        Self {
            value: Arc::new(value),
            dz: Arc::new(dz),
            threshold: None,
        }
    }

    pub fn with_threshold(mut self, threshold: Threshold) -> Self {
        self.threshold = Some(threshold);
        self
    }

    /// `scale · v` for an existing formfactor.
    pub fn scaled(inner: Arc<dyn Formfactor>, scale: f64) -> Self {
        let a = Arc::clone(&inner);
        let b = Arc::clone(&inner);
        let threshold = inner.threshold(0.0).map(|t| Threshold {
            exponent: t.exponent,
            coefficient: t.coefficient * scale,
        });
        Self {
            value: Arc::new(move |y, z| a.value(y, z) * scale),
            dz: Arc::new(move |y, z| b.dz(y, z) * scale),
            threshold: if scale == 0.0 { None } else { threshold },
        }
    }
}

impl fmt::Debug for FnFormfactor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FnFormfactor")
            .field("threshold", &self.threshold)
            .finish_non_exhaustive()
    }
}

impl Formfactor for FnFormfactor {
    fn value(&self, y: f64, z: Complex64) -> Complex64 {
        (self.value)(y, z)
    }

    fn dz(&self, y: f64, z: Complex64) -> Complex64 {
        (self.dz)(y, z)
    }

    fn threshold(&self, _y: f64) -> Option<Threshold> {
        self.threshold
    }
}

type RealFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Immutable two-band model. Cheap to clone; all evaluations are pure.
#[derive(Clone)]
pub struct TwoBandModel {
    i0: Interval,
    i1: Interval,
    nu: f64,
    band_map: Arc<dyn BandMap>,
    weight0: RealFn,
    weight1: RealFn,
    rho_closed: Option<RealFn>,
    formfactor: Arc<dyn Formfactor>,
    sector_theta0: f64,
    params: BTreeMap<String, f64>,
    edge_clip: f64,
}

impl fmt::Debug for TwoBandModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TwoBandModel")
            .field("i0", &self.i0)
            .field("i1", &self.i1)
            .field("nu", &self.nu)
            .field("sector_theta0", &self.sector_theta0)
            .field("params", &self.params)
            .field("edge_clip", &self.edge_clip)
            .finish_non_exhaustive()
    }
}

/// Builder for models registered from evaluable functions.
pub struct TwoBandModelBuilder {
    i0: Interval,
    i1: Interval,
    nu: f64,
    band_map: Option<Arc<dyn BandMap>>,
    weight0: Option<RealFn>,
    weight1: Option<RealFn>,
    rho_closed: Option<RealFn>,
    formfactor: Option<Arc<dyn Formfactor>>,
    sector_theta0: f64,
    params: BTreeMap<String, f64>,
    edge_clip: f64,
}

impl TwoBandModelBuilder {
    pub fn nu(mut self, nu: f64) -> Self {
        self.nu = nu;
        self
    }

    pub fn band_map(mut self, map: impl BandMap + 'static) -> Self {
        self.band_map = Some(Arc::new(map));
        self
    }

    pub fn weights<W0, W1>(mut self, w0: W0, w1: W1) -> Self
    where
        W0: Fn(f64) -> f64 + Send + Sync + 'static,
        W1: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        self.weight0 = Some(Arc::new(w0));
        self.weight1 = Some(Arc::new(w1));
        self
    }

    /// Registers `ϱ` in closed form, bypassing the weight quotient.
    pub fn rho_closed_form<R>(mut self, rho: R) -> Self
    where
        R: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        self.rho_closed = Some(Arc::new(rho));
        self
    }

    pub fn formfactor(mut self, v: impl Formfactor + 'static) -> Self {
        self.formfactor = Some(Arc::new(v));
        self
    }

    pub fn formfactor_arc(mut self, v: Arc<dyn Formfactor>) -> Self {
        self.formfactor = Some(v);
        self
    }

    pub fn sector_theta0(mut self, theta0: f64) -> Self {
        self.sector_theta0 = theta0;
        self
    }

    pub fn param(mut self, name: &str, value: f64) -> Self {
        self.params.insert(name.to_string(), value);
        self
    }

    pub fn edge_clip(mut self, rel: f64) -> Self {
        self.edge_clip = rel;
        self
    }

    pub fn build(self) -> Result<TwoBandModel> {
        if !(self.i0.hi < self.i1.lo) {
            return Err(Error::InvalidModel(format!(
                "bands must be disjoint and ordered, got I0 = {} and I1 = {}",
                self.i0, self.i1
            )));
        }
        if !(self.nu >= 0.0 && self.nu.is_finite()) {
            return Err(Error::InvalidModel(format!(
                "photon threshold must be finite and >= 0, got {}",
                self.nu
            )));
        }
        if !(self.sector_theta0 > 0.0 && self.sector_theta0 < PI / 4.0) {
            return Err(Error::InvalidModel(format!(
                "sector half-angle must lie in (0, pi/4), got {}",
                self.sector_theta0
            )));
        }
        if !(self.edge_clip >= 0.0 && self.edge_clip < 0.5) {
            return Err(Error::InvalidModel(format!(
                "edge clip must lie in [0, 0.5), got {}",
                self.edge_clip
            )));
        }
        let band_map = self
            .band_map
            .ok_or_else(|| Error::InvalidModel("band map is required".into()))?;
        let formfactor = self
            .formfactor
            .ok_or_else(|| Error::InvalidModel("formfactor is required".into()))?;
        let (weight0, weight1) = match (self.weight0, self.weight1) {
            (Some(a), Some(b)) => (a, b),
            _ if self.rho_closed.is_some() => {
                let one: RealFn = Arc::new(|_| 1.0);
                (Arc::clone(&one), one)
            }
            _ => {
                return Err(Error::InvalidModel(
                    "weights or a closed-form rho are required".into(),
                ))
            }
        };
        Ok(TwoBandModel {
            i0: self.i0,
            i1: self.i1,
            nu: self.nu,
            band_map,
            weight0,
            weight1,
            rho_closed: self.rho_closed,
            formfactor,
            sector_theta0: self.sector_theta0,
            params: self.params,
            edge_clip: self.edge_clip,
        })
    }
}

impl TwoBandModel {
    pub fn builder(i0: Interval, i1: Interval) -> TwoBandModelBuilder {
        TwoBandModelBuilder {
            i0,
            i1,
            nu: 0.0,
            band_map: None,
            weight0: None,
            weight1: None,
            rho_closed: None,
            formfactor: None,
            sector_theta0: DEFAULT_SECTOR_THETA0,
            params: BTreeMap::new(),
            edge_clip: DEFAULT_EDGE_CLIP,
        }
    }

    /// Same bands, map, weights and sector with a different formfactor.
    pub fn with_formfactor(&self, v: Arc<dyn Formfactor>) -> TwoBandModel {
        let mut m = self.clone();
        m.formfactor = v;
        m
    }

    pub fn i0(&self) -> Interval {
        self.i0
    }

    pub fn i1(&self) -> Interval {
        self.i1
    }

    pub fn nu(&self) -> f64 {
        self.nu
    }

    pub fn sector_theta0(&self) -> f64 {
        self.sector_theta0
    }

    pub fn params(&self) -> &BTreeMap<String, f64> {
        &self.params
    }

    pub fn edge_clip(&self) -> f64 {
        self.edge_clip
    }

    pub fn formfactor(&self) -> &Arc<dyn Formfactor> {
        &self.formfactor
    }

    pub fn u(&self, y: f64) -> f64 {
        self.band_map.map(y)
    }

    pub fn u_prime(&self, y: f64) -> f64 {
        self.band_map.derivative(y)
    }

    pub fn u_inv(&self, x: f64) -> f64 {
        self.band_map.inverse(x)
    }

    pub fn weight0(&self, y: f64) -> f64 {
        (self.weight0)(y)
    }

    pub fn weight1(&self, x: f64) -> f64 {
        (self.weight1)(x)
    }

    pub fn v(&self, y: f64, z: Complex64) -> Complex64 {
        self.formfactor.value(y, z)
    }

    /// `v(y, z)` for real `z`.
    pub fn v_real(&self, y: f64, z: f64) -> f64 {
        self.formfactor.value(y, Complex64::new(z, 0.0)).re
    }

    pub fn dv_dz(&self, y: f64, z: Complex64) -> Complex64 {
        self.formfactor.dz(y, z)
    }

    pub fn d2v_dz2(&self, y: f64, z: Complex64) -> Complex64 {
        self.formfactor.d2z(y, z)
    }

    /// Photon-emission threshold `ξ₀(x) = ν + u⁻¹(x)`.
    pub fn threshold_energy(&self, x: f64) -> f64 {
        self.nu + self.u_inv(x)
    }

    /// Errors unless `x` lies in the open interior of `I₁`.
    pub fn check_upper_interior(&self, x: f64) -> Result<()> {
        if self.i1.contains_open(x) && x.is_finite() {
            Ok(())
        } else {
            Err(Error::Domain(format!(
                "x = {x} is not interior to I1 = {}",
                self.i1
            )))
        }
    }

    /// Clipped `n`-point grid of the upper band.
    pub fn upper_grid(&self, n: usize) -> Vec<f64> {
        self.i1.clipped_grid(n, self.edge_clip)
    }

    /// Clipped `n`-point grid of the lower band.
    pub fn lower_grid(&self, n: usize) -> Vec<f64> {
        self.i0.clipped_grid(n, self.edge_clip)
    }

    /// Whether `z` lies in the continuation sector `Re z > ν`, `|arg z| ≤ θ₀`.
    pub fn in_sector(&self, z: Complex64) -> bool {
        z.re > self.nu && z.arg().abs() <= self.sector_theta0 * (1.0 + 1e-12)
    }
}

/// `ϱ(x) = w₀(u⁻¹x) / (|u'(u⁻¹x)| w₁(x))`, or the registered closed form.
pub fn rho_of(model: &TwoBandModel, x: f64) -> Result<f64> {
    if let Some(rho) = &model.rho_closed {
        if !model.i1.contains(x) {
            return Err(Error::Domain(format!(
                "x = {x} lies outside I1 = {}",
                model.i1
            )));
        }
        return Ok(rho(x));
    }
    model.check_upper_interior(x)?;
    let y = model.u_inv(x);
    let value = model.weight0(y) / (model.u_prime(y).abs() * model.weight1(x));
    if value.is_finite() && value > 0.0 {
        Ok(value)
    } else {
        Err(Error::Domain(format!(
            "rho is singular or non-positive at x = {x}"
        )))
    }
}

/// Cosine-band crystal with `ν = 0` and `v(y,z) = g0² z e^{-z(1+eps·y)}`.
pub fn build_cosine_crystal(i0: Interval, i1: Interval, g0: f64, eps: f64) -> Result<TwoBandModel> {
    cosine_crystal(i0, i1, 0.0, g0, eps, DEFAULT_SECTOR_THETA0)
}

/// Cosine-band crystal with dispersions `E₀(θ) = a₀ + L₀(1-cos θ)/2` and
/// `E₁(θ) = b₁ - L₁(1-cos θ)/2`, photon threshold `nu` and formfactor
/// `g0² (z-ν) e^{-(z-ν)(1+eps·y)}`.
pub fn cosine_crystal(
    i0: Interval,
    i1: Interval,
    nu: f64,
    g0: f64,
    eps: f64,
    theta0: f64,
) -> Result<TwoBandModel> {
    if !(g0 > 0.0 && g0.is_finite()) {
        return Err(Error::InvalidModel(format!(
            "g0 must be positive, got {g0}"
        )));
    }
    if !(eps >= 0.0 && eps.is_finite()) {
        return Err(Error::InvalidModel(format!("eps must be >= 0, got {eps}")));
    }
    let (a0, b0, a1, b1) = (i0.lo, i0.hi, i1.lo, i1.hi);
    TwoBandModel::builder(i0, i1)
        .nu(nu)
        .band_map(AffineBandMap::decreasing(i0, i1))
        .weights(
            move |y| 1.0 / ((y - a0) * (b0 - y)).sqrt(),
            move |x| 1.0 / ((x - a1) * (b1 - x)).sqrt(),
        )
        .rho_closed_form(|_| 1.0)
        .formfactor(ExpFormfactor { g0, eps, nu })
        .sector_theta0(theta0)
        .param("g0", g0)
        .param("eps", eps)
        .build()
}

/// The reference model: `I₀ = [0,1]`, `I₁ = [2,3]`, `g0 = 1`, `eps = 0`.
pub fn default_model() -> TwoBandModel {
    build_cosine_crystal(
        Interval { lo: 0.0, hi: 1.0 },
        Interval { lo: 2.0, hi: 3.0 },
        1.0,
        0.0,
    )
    .expect("reference parameters are valid")
}
