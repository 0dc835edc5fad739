//! Quadrature engine.
//!
//! Globally adaptive Gauss-Kronrod (7/15) integration on finite and
//! semi-infinite intervals, Cauchy principal values through a symmetric
//! subtraction window, and a panelwise Filon rule for Fourier integrals
//! `∫ g(ξ) e^{-iξt} dξ`.
//!
//! All routines are pure functions of their inputs; results are
//! deterministic for fixed arguments.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::f64::consts::PI;
use std::sync::LazyLock;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Default absolute/relative tolerance.
pub const DEFAULT_TOL: f64 = 1e-10;
/// Default cap on interval bisections.
pub const MAX_SUBDIVISIONS: usize = 2000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: Complex64,
    pub abs_error_estimate: f64,
    pub evaluations: usize,
}

impl QuadResult {
    fn zero() -> Self {
        Self {
            value: Complex64::new(0.0, 0.0),
            abs_error_estimate: 0.0,
            evaluations: 0,
        }
    }

    /// Sum of two independent pieces.
    pub fn combine(self, other: QuadResult) -> QuadResult {
        QuadResult {
            value: self.value + other.value,
            abs_error_estimate: self.abs_error_estimate + other.abs_error_estimate,
            evaluations: self.evaluations + other.evaluations,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_subdivisions: usize,
}

impl QuadOptions {
    pub fn new(abs_tol: f64, rel_tol: f64) -> Self {
        Self {
            abs_tol,
            rel_tol,
            max_subdivisions: MAX_SUBDIVISIONS,
        }
    }

    /// Same tolerance used as absolute and relative bound.
    pub fn tol(tol: f64) -> Self {
        Self::new(tol, tol)
    }

    fn limit(&self, value: Complex64) -> f64 {
        self.abs_tol.max(self.rel_tol * value.norm())
    }
}

impl Default for QuadOptions {
    fn default() -> Self {
        Self::tol(DEFAULT_TOL)
    }
}

// 15-point Kronrod abscissae and weights; odd indices are the 7-point Gauss nodes.
#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

struct Segment {
    a: f64,
    b: f64,
    value: Complex64,
    error: f64,
    resabs: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error.total_cmp(&other.error) == Ordering::Equal
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error
            .total_cmp(&other.error)
            .then_with(|| other.a.total_cmp(&self.a))
    }
}

fn check_finite(v: Complex64, at: f64) -> Result<Complex64> {
    if v.re.is_finite() && v.im.is_finite() {
        Ok(v)
    } else {
        Err(Error::NonFinite { at })
    }
}

fn gauss_kronrod<F>(f: &F, a: f64, b: f64) -> Result<Segment>
where
    F: Fn(f64) -> Complex64,
{
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = check_finite(f(center), center)?;
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    let mut resabs = fc.norm() * WGK[7];
    let mut fv1 = [Complex64::new(0.0, 0.0); 7];
    let mut fv2 = [Complex64::new(0.0, 0.0); 7];
    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = check_finite(f(center - dx), center - dx)?;
        let f2 = check_finite(f(center + dx), center + dx)?;
        fv1[j] = f1;
        fv2[j] = f2;
        kronrod += (f1 + f2) * WGK[j];
        resabs += (f1.norm() + f2.norm()) * WGK[j];
        if j % 2 == 1 {
            gauss += (f1 + f2) * WG[j / 2];
        }
    }
    let mean = kronrod * 0.5;
    let mut resasc = WGK[7] * (fc - mean).norm();
    for j in 0..7 {
        resasc += WGK[j] * ((fv1[j] - mean).norm() + (fv2[j] - mean).norm());
    }
    let abs_half = half.abs();
    let resabs = resabs * abs_half;
    let resasc = resasc * abs_half;
    let mut err = ((kronrod - gauss) * half).norm();
    if resasc != 0.0 && err != 0.0 {
        err = resasc * (200.0 * err / resasc).powf(1.5).min(1.0);
    }
    if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * resabs);
    }
    Ok(Segment {
        a,
        b,
        value: kronrod * half,
        error: err,
        resabs,
    })
}

/// Globally adaptive integration over `[points[0], points[last]]`, with the
/// interior points used as initial breakpoints.
pub fn integrate_partitioned<F>(f: F, points: &[f64], opts: &QuadOptions) -> Result<QuadResult>
where
    F: Fn(f64) -> Complex64,
{
    if points.len() < 2 {
        return Err(Error::Domain("need at least two integration points".into()));
    }
    let mut heap = BinaryHeap::new();
    let mut frozen: Vec<Segment> = Vec::new();
    let mut evaluations = 0usize;
    for w in points.windows(2) {
        if !(w[0] < w[1]) {
            if w[0] == w[1] {
                continue;
            }
            return Err(Error::Domain(format!(
                "integration limits out of order: {} >= {}",
                w[0], w[1]
            )));
        }
        heap.push(gauss_kronrod(&f, w[0], w[1])?);
        evaluations += 15;
    }
    if heap.is_empty() {
        return Ok(QuadResult::zero());
    }
    let mut subdivisions = 0usize;
    loop {
        let (mut value, mut error, mut resabs) = (Complex64::new(0.0, 0.0), 0.0, 0.0);
        for s in heap.iter().chain(frozen.iter()) {
            value += s.value;
            error += s.error;
            resabs += s.resabs;
        }
        let done = error <= opts.limit(value) || error <= 100.0 * f64::EPSILON * resabs;
        if done {
            return Ok(QuadResult {
                value,
                abs_error_estimate: error,
                evaluations,
            });
        }
        if subdivisions >= opts.max_subdivisions || heap.is_empty() {
            return Err(Error::Accuracy {
                value,
                abs_error: error,
                tol: opts.limit(value),
            });
        }
        let worst = heap.pop().expect("heap checked non-empty");
        let mid = 0.5 * (worst.a + worst.b);
        let scale = worst.a.abs().max(worst.b.abs()).max(f64::MIN_POSITIVE);
        if (worst.b - worst.a) <= 64.0 * f64::EPSILON * scale || mid <= worst.a || mid >= worst.b {
            frozen.push(worst);
            continue;
        }
        heap.push(gauss_kronrod(&f, worst.a, mid)?);
        heap.push(gauss_kronrod(&f, mid, worst.b)?);
        evaluations += 30;
        subdivisions += 1;
    }
}

/// `∫_a^b f` with `tol` as both absolute and relative bound.
pub fn integrate_adaptive<F>(f: F, a: f64, b: f64, tol: f64) -> Result<QuadResult>
where
    F: Fn(f64) -> Complex64,
{
    if !(a < b) {
        return Err(Error::Domain(format!("need a < b, got [{a}, {b}]")));
    }
    integrate_partitioned(f, &[a, b], &QuadOptions::tol(tol))
}

/// `∫_a^∞ f` through `z = a + s/(1-s)`.
pub fn integrate_semi_infinite<F>(f: F, a: f64, tol: f64) -> Result<QuadResult>
where
    F: Fn(f64) -> Complex64,
{
    integrate_semi_infinite_with(f, a, 1.0, &[], &QuadOptions::tol(tol))
}

/// `∫_a^∞ f` through `z = a + L s/(1-s)` with length scale `L > 0` and
/// optional breakpoints given in the original variable.
pub fn integrate_semi_infinite_with<F>(
    f: F,
    a: f64,
    scale: f64,
    breakpoints: &[f64],
    opts: &QuadOptions,
) -> Result<QuadResult>
where
    F: Fn(f64) -> Complex64,
{
    if !(scale > 0.0) {
        return Err(Error::Domain(format!(
            "length scale must be positive, got {scale}"
        )));
    }
    let mut points = vec![0.0];
    for &z in breakpoints {
        if z > a && z.is_finite() {
            let d = z - a;
            points.push(d / (scale + d));
        }
    }
    points.push(1.0);
    points.sort_by(f64::total_cmp);
    points.dedup();
    integrate_partitioned(
        |s| {
            let one_minus = 1.0 - s;
            let z = a + scale * s / one_minus;
            let jac = scale / (one_minus * one_minus);
            let val = f(z);
            if val == Complex64::new(0.0, 0.0) {
                val
            } else {
                val * jac
            }
        },
        &points,
        opts,
    )
}

/// Symmetric window around the pole of a Cauchy principal value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PvSplit {
    /// Pole location in the integration variable, `ξ - y`.
    pub pole: f64,
    /// Half-width of the subtraction window.
    pub k: f64,
    /// `[ν, pole-k]`, `[pole-k, pole+k]`, `[pole+k, ∞)`.
    pub pieces: [(f64, f64); 3],
}

impl PvSplit {
    /// Default window `k = min(ξ - y - ν, 1)/2`.
    pub fn new(y: f64, xi: f64, nu: f64) -> Result<Self> {
        let room = xi - y - nu;
        if !(room > 0.0) {
            return Err(Error::Domain(format!(
                "principal value needs xi > y + nu (xi = {xi}, y = {y}, nu = {nu})"
            )));
        }
        Self::with_window(y, xi, nu, 0.5 * room.min(1.0))
    }

    pub fn with_window(y: f64, xi: f64, nu: f64, k: f64) -> Result<Self> {
        let pole = xi - y;
        if !(k > 0.0 && k < pole - nu) {
            return Err(Error::Domain(format!(
                "window half-width {k} must lie in (0, {})",
                pole - nu
            )));
        }
        Ok(Self {
            pole,
            k,
            pieces: [
                (nu, pole - k),
                (pole - k, pole + k),
                (pole + k, f64::INFINITY),
            ],
        })
    }
}

/// `𝒫∫_ν^∞ v(z)/(y + z - ξ) dz` with the default window.
pub fn principal_value<V>(v_slice: V, y: f64, xi: f64, nu: f64, tol: f64) -> Result<QuadResult>
where
    V: Fn(f64) -> f64,
{
    let split = PvSplit::new(y, xi, nu)?;
    principal_value_with(v_slice, &split, &QuadOptions::tol(tol))
}

/// Principal value over a prescribed window. The middle piece integrates the
/// regularized quotient `[v(z) - v(pole)]/(z - pole)`; the odd kernel over a
/// symmetric window contributes nothing.
pub fn principal_value_with<V>(
    v_slice: V,
    split: &PvSplit,
    opts: &QuadOptions,
) -> Result<QuadResult>
where
    V: Fn(f64) -> f64,
{
    let p = split.pole;
    let v_pole = v_slice(p);
    let [(lo_a, lo_b), (mid_a, mid_b), (hi_a, _)] = split.pieces;
    let kernel = |z: f64| Complex64::new(v_slice(z) / (z - p), 0.0);
    let lower = if lo_b > lo_a {
        integrate_partitioned(kernel, &[lo_a, lo_b], opts)?
    } else {
        QuadResult::zero()
    };
    let middle = integrate_partitioned(
        |z: f64| {
            let d = z - p;
            if d == 0.0 {
                Complex64::new(0.0, 0.0)
            } else {
                Complex64::new((v_slice(z) - v_pole) / d, 0.0)
            }
        },
        &[mid_a, p, mid_b],
        opts,
    )?;
    let upper = integrate_semi_infinite_with(kernel, hi_a, 1.0, &[], opts)?;
    Ok(lower.combine(middle).combine(upper))
}

// Filon panels: 9 Chebyshev-Lobatto nodes; the 5-node subset gives the error estimate.
const FILON_NODES: usize = 9;

struct FilonRule {
    nodes: [f64; FILON_NODES],
    inv9: Vec<Vec<f64>>,
    inv5: Vec<Vec<f64>>,
}

static FILON: LazyLock<FilonRule> = LazyLock::new(|| {
    let nodes: [f64; FILON_NODES] =
        std::array::from_fn(|j| -(PI * j as f64 / (FILON_NODES - 1) as f64).cos());
    let sub: Vec<f64> = nodes.iter().step_by(2).copied().collect();
    FilonRule {
        nodes,
        inv9: vandermonde_inverse(&nodes),
        inv5: vandermonde_inverse(&sub),
    }
});

/// Inverse of `V[k][j] = s_j^k` by Gauss-Jordan elimination with partial pivoting.
fn vandermonde_inverse(nodes: &[f64]) -> Vec<Vec<f64>> {
    let n = nodes.len();
    let mut a: Vec<Vec<f64>> = (0..n)
        .map(|k| (0..n).map(|j| nodes[j].powi(k as i32)).collect())
        .collect();
    let mut inv: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect();
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .expect("non-empty range");
        a.swap(col, piv);
        inv.swap(col, piv);
        let d = a[col][col];
        for j in 0..n {
            a[col][j] /= d;
            inv[col][j] /= d;
        }
        for i in 0..n {
            if i != col {
                let factor = a[i][col];
                if factor != 0.0 {
                    for j in 0..n {
                        a[i][j] -= factor * a[col][j];
                        inv[i][j] -= factor * inv[col][j];
                    }
                }
            }
        }
    }
    inv
}

/// Monomial moments `m_k = ∫_{-1}^{1} s^k e^{-iωs} ds`, `k < n`.
fn fourier_moments(omega: f64, n: usize) -> Vec<Complex64> {
    let mi = Complex64::new(0.0, -omega);
    if omega.abs() <= 4.0 {
        // Power series in ω; terms peak near e^{|ω|}, so this stays accurate here.
        (0..n)
            .map(|k| {
                let mut sum = Complex64::new(0.0, 0.0);
                let mut term = Complex64::new(1.0, 0.0);
                for j in 0..200 {
                    let m = k + j;
                    if m % 2 == 0 {
                        sum += term * (2.0 / (m + 1) as f64);
                    }
                    term = term * mi / (j + 1) as f64;
                    if term.norm() < 1e-18 * sum.norm().max(1e-300) && j > 2 * n {
                        break;
                    }
                }
                sum
            })
            .collect()
    } else {
        let ep = Complex64::from_polar(1.0, -omega);
        let em = Complex64::from_polar(1.0, omega);
        let mut m = Vec::with_capacity(n);
        m.push((ep - em) / mi);
        for k in 1..n {
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            let boundary = (ep - em * sign) / mi;
            let prev = m[k - 1];
            m.push(boundary - prev * (k as f64) / mi);
        }
        m
    }
}

fn filon_weights(inv: &[Vec<f64>], moments: &[Complex64]) -> Vec<Complex64> {
    // V w = m  =>  w = V^{-1} m
    inv.iter()
        .map(|row| {
            row.iter()
                .zip(moments)
                .map(|(&r, &m)| m * r)
                .sum::<Complex64>()
        })
        .collect()
}

struct Panel {
    a: f64,
    b: f64,
    value: Complex64,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error.total_cmp(&other.error) == Ordering::Equal
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error
            .total_cmp(&other.error)
            .then_with(|| other.a.total_cmp(&self.a))
    }
}

fn filon_panel<G>(g: &G, a: f64, b: f64, t: f64) -> Result<Panel>
where
    G: Fn(f64) -> Complex64,
{
    let rule = &*FILON;
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let moments = fourier_moments(h * t, FILON_NODES);
    let w9 = filon_weights(&rule.inv9, &moments);
    let w5 = filon_weights(&rule.inv5, &moments[..5]);
    let mut s9 = Complex64::new(0.0, 0.0);
    let mut s5 = Complex64::new(0.0, 0.0);
    for (j, &s) in rule.nodes.iter().enumerate() {
        let xi = c + h * s;
        let gv = check_finite(g(xi), xi)?;
        s9 += w9[j] * gv;
        if j % 2 == 0 {
            s5 += w5[j / 2] * gv;
        }
    }
    let phase = Complex64::from_polar(h, -c * t);
    Ok(Panel {
        a,
        b,
        value: phase * s9,
        error: (phase * (s9 - s5)).norm(),
    })
}

/// `∫_a^b g(ξ) e^{-iξt} dξ` by adaptive Filon panels: `g` is interpolated on
/// each panel and the trigonometric moments are exact. Panels start no wider
/// than `2π/max(|t|, 1)`. Falls back to Gauss-Kronrod when `|t|(b-a) < 1`.
pub fn filon_fourier<G>(g: G, a: f64, b: f64, t: f64, tol: f64) -> Result<QuadResult>
where
    G: Fn(f64) -> Complex64,
{
    filon_fourier_with(g, a, b, t, &QuadOptions::tol(tol))
}

pub fn filon_fourier_with<G>(g: G, a: f64, b: f64, t: f64, opts: &QuadOptions) -> Result<QuadResult>
where
    G: Fn(f64) -> Complex64,
{
    if !(a < b) {
        return Err(Error::Domain(format!("need a < b, got [{a}, {b}]")));
    }
    if t.abs() * (b - a) < 1.0 {
        return integrate_partitioned(|x| g(x) * Complex64::from_polar(1.0, -x * t), &[a, b], opts);
    }
    let width = (b - a).min(2.0 * PI / t.abs().max(1.0));
    let count = ((b - a) / width).ceil() as usize;
    let step = (b - a) / count as f64;
    let mut heap = BinaryHeap::with_capacity(2 * count);
    for i in 0..count {
        let lo = a + step * i as f64;
        let hi = if i + 1 == count {
            b
        } else {
            a + step * (i + 1) as f64
        };
        heap.push(filon_panel(&g, lo, hi, t)?);
    }
    let mut evaluations = FILON_NODES * count;
    let mut frozen: Vec<Panel> = Vec::new();
    let max_panels = count + opts.max_subdivisions;
    let mut splits = 0usize;
    loop {
        let (mut value, mut error) = (Complex64::new(0.0, 0.0), 0.0);
        for p in heap.iter().chain(frozen.iter()) {
            value += p.value;
            error += p.error;
        }
        if error <= opts.limit(value) {
            return Ok(QuadResult {
                value,
                abs_error_estimate: error,
                evaluations,
            });
        }
        if heap.is_empty() || count + splits >= max_panels {
            return Err(Error::Accuracy {
                value,
                abs_error: error,
                tol: opts.limit(value),
            });
        }
        let worst = heap.pop().expect("heap checked non-empty");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            frozen.push(worst);
            continue;
        }
        heap.push(filon_panel(&g, worst.a, mid, t)?);
        heap.push(filon_panel(&g, mid, worst.b, t)?);
        evaluations += 2 * FILON_NODES;
        splits += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn constant_on_unit_interval() {
        let r = integrate_adaptive(|_| c(1.0), 0.0, 1.0, 1e-12).unwrap();
        assert!((r.value - 1.0).norm() < 1e-14);
        assert!(r.evaluations >= 1);
        assert!(r.abs_error_estimate >= 0.0);
    }

    #[test]
    fn gamma_two_on_truncated_range() {
        let r = integrate_adaptive(|z| c(z * (-z).exp()), 0.0, 40.0, 1e-13).unwrap();
        assert!((r.value.re - 1.0).abs() < 1e-12, "{}", r.value);
    }

    #[test]
    fn arctan_identity() {
        let tol = 1e-10;
        let r = integrate_adaptive(|z| c(1.0 / (z * z + 1.0)), -1.0, 1.0, tol).unwrap();
        assert!((r.value.re - PI / 2.0).abs() < tol);
    }

    #[test]
    fn reversed_limits_are_rejected() {
        assert!(matches!(
            integrate_adaptive(|_| c(1.0), 1.0, 0.0, 1e-10),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn non_finite_integrand_is_reported() {
        let r = integrate_adaptive(|z| c(1.0 / (z - 0.5)), 0.0, 1.0, 1e-10);
        assert!(matches!(r, Err(Error::NonFinite { .. })));
    }

    #[test]
    fn exhausted_subdivisions_carry_best_estimate() {
        let opts = QuadOptions {
            abs_tol: 1e-14,
            rel_tol: 0.0,
            max_subdivisions: 3,
        };
        let r = integrate_partitioned(
            |z| c((50.0 * z).sin() / (z + 1e-3).sqrt()),
            &[0.0, 10.0],
            &opts,
        );
        match r {
            Err(Error::Accuracy { abs_error, .. }) => assert!(abs_error > 1e-14),
            other => panic!("expected accuracy error, got {other:?}"),
        }
    }

    #[test]
    fn semi_infinite_exponentials() {
        let r = integrate_semi_infinite(|z| c((-z).exp()), 0.0, 1e-12).unwrap();
        assert!((r.value.re - 1.0).abs() < 1e-11);
        let r = integrate_semi_infinite(|z| c(z * (-z).exp()), 0.0, 1e-12).unwrap();
        assert!((r.value.re - 1.0).abs() < 1e-11);
    }

    #[test]
    fn semi_infinite_shifted_pole_matches_brute_force() {
        // z e^{-z}/(z + 1): reference by a long composite Simpson sum.
        let f = |z: f64| z * (-z).exp() / (z + 1.0);
        let r = integrate_semi_infinite(|z| c(f(z)), 0.0, 1e-12).unwrap();
        let n = 400_000;
        let h = 60.0 / n as f64;
        let mut s = f(0.0) + f(60.0);
        for i in 1..n {
            s += f(i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
        }
        let reference = s * h / 3.0;
        assert!(r.value.re > 0.0 && r.value.re < 1.0);
        assert!(
            (r.value.re - reference).abs() < 1e-10,
            "{} vs {reference}",
            r.value.re
        );
    }

    #[test]
    fn semi_infinite_matches_truncated_plus_tail() {
        // Tail of z e^{-z} beyond R is (R+1)e^{-R}.
        for eps in [0.0, 0.5] {
            let f = |z: f64| c(z * (-z * (1.0 + eps)).exp());
            let full = integrate_semi_infinite(f, 0.0, 1e-12).unwrap().value.re;
            let r = 40.0;
            let head = integrate_adaptive(f, 0.0, r, 1e-12).unwrap().value.re;
            let b = 1.0 + eps;
            let tail = (r / b + 1.0 / (b * b)) * (-b * r).exp();
            assert!((full - head - tail).abs() < 1e-10);
        }
    }

    #[test]
    fn zero_formfactor_principal_value() {
        let r = principal_value(|_| 0.0, 1.0, 3.0, 0.0, 1e-10).unwrap();
        assert_eq!(r.value, c(0.0));
    }

    #[test]
    fn antisymmetric_middle_piece_vanishes() {
        // v(z) = z - 2 on the window around the pole at 2: regularized quotient is 1,
        // so the middle piece is exactly the window length 2k.
        let split = PvSplit::new(1.0, 3.0, 0.0).unwrap();
        let k = split.k;
        let middle = integrate_adaptive(|_| c(1.0), 2.0 - k, 2.0 + k, 1e-12).unwrap();
        assert!((middle.value.re - 2.0 * k).abs() < 1e-14);
        // a constant v has an odd kernel over the window: only boundary pieces survive
        let only_window = |z: f64| if (z - 2.0).abs() <= k { 1.0 } else { 0.0 };
        let r = principal_value_with(only_window, &split, &QuadOptions::tol(1e-12)).unwrap();
        assert!(r.value.norm() < 1e-12, "{}", r.value);
    }

    #[test]
    fn pv_rejects_pole_outside_range() {
        assert!(matches!(
            principal_value(|z| z, 1.0, 1.0, 0.0, 1e-10),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn filon_constant_closed_form() {
        for t in [3.0, 10.0, 77.0, 400.0] {
            let r = filon_fourier(|_| c(1.0), 0.0, 1.0, t, 1e-12).unwrap();
            let i = Complex64::new(0.0, 1.0);
            let exact = (c(1.0) - (-i * t).exp()) / (i * t);
            assert!((r.value - exact).norm() < 1e-12, "t={t}");
        }
    }

    #[test]
    fn filon_linear_closed_form() {
        // ∫_0^1 ξ e^{-iξt} dξ = e^{-it}(1/(-it)) + (e^{-it} - 1)/t^2
        let t = 10.0;
        let i = Complex64::new(0.0, 1.0);
        let e = (-i * t).exp();
        let exact = e / (-i * t) + (e - 1.0) / (t * t);
        let r = filon_fourier(c, 0.0, 1.0, t, 1e-12).unwrap();
        assert!((r.value - exact).norm() < 1e-10);
    }

    #[test]
    fn filon_at_zero_frequency_is_plain_integration() {
        let g = |x: f64| c((x * 3.0).cos() * (-x).exp());
        let a = filon_fourier(g, 0.0, 5.0, 0.0, 1e-12).unwrap();
        let b = integrate_adaptive(g, 0.0, 5.0, 1e-12).unwrap();
        assert!((a.value - b.value).norm() < 1e-12);
    }

    #[test]
    fn filon_large_omega_moments_match_series() {
        // both branches agree around the switch-over
        for omega in [3.9, 4.1] {
            let series: Vec<Complex64> = {
                let mi = Complex64::new(0.0, -omega);
                (0..9)
                    .map(|k| {
                        let mut sum = Complex64::new(0.0, 0.0);
                        let mut term = c(1.0);
                        for j in 0..120 {
                            if (k + j) % 2 == 0 {
                                sum += term * (2.0 / (k + j + 1) as f64);
                            }
                            term = term * mi / (j + 1) as f64;
                        }
                        sum
                    })
                    .collect()
            };
            let m = fourier_moments(omega, 9);
            for k in 0..9 {
                assert!((m[k] - series[k]).norm() < 1e-11, "omega={omega} k={k}");
            }
        }
    }
}
