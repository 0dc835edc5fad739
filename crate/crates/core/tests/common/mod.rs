//! Independent reference values for the integration and acceptance tests.
//! Nothing here calls into the library's quadrature or resolvent code.

#![allow(dead_code)]

use num_complex::Complex64;

pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Exponential integral `E₁(z)` on the principal branch, by its power series.
/// Accurate to about 1e-12 for `|z| ≤ 8`.
pub fn e1(z: Complex64) -> Complex64 {
    assert!(z.norm() <= 8.0, "series oracle used outside its range: {z}");
    let mut sum = Complex64::new(0.0, 0.0);
    let mut term = Complex64::new(1.0, 0.0);
    for k in 1..200 {
        term *= -z / k as f64;
        let add = term / k as f64;
        sum += add;
        if add.norm() < 1e-18 * sum.norm().max(1e-300) {
            break;
        }
    }
    -EULER_GAMMA - z.ln() - sum
}

/// Exponential integral `Ei(x)` for real `0 < x ≤ 8`.
pub fn ei(x: f64) -> f64 {
    assert!(x > 0.0 && x <= 8.0);
    let mut sum = 0.0;
    let mut term = 1.0;
    for k in 1..200 {
        term *= x / k as f64;
        let add = term / k as f64;
        sum += add;
        if add < 1e-18 * sum {
            break;
        }
    }
    EULER_GAMMA + x.ln() + sum
}

/// `∫₀^∞ z e^{-z} / (z - s) dz = 1 + s e^{-s} E₁(-s)` for `s` off the half-line.
pub fn cauchy_linear_exp(s: Complex64) -> Complex64 {
    1.0 + s * (-s).exp() * e1(-s)
}

/// `PV ∫₀^∞ z e^{-z} / (z - s) dz = 1 - s e^{-s} Ei(s)` for real `s > 0`.
pub fn pv_linear_exp(s: f64) -> f64 {
    1.0 - s * (-s).exp() * ei(s)
}

/// Gauss-Legendre nodes and weights on `[-1, 1]` by Newton iteration on `P_n`.
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    (1..=n)
        .map(|i| {
            let mut x = (std::f64::consts::PI * (i as f64 - 0.25) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0, x);
                for k in 2..=n {
                    let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                    p0 = p1;
                    p1 = p2;
                }
                dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
                let dx = p1 / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            (x, 2.0 / ((1.0 - x * x) * dp * dp))
        })
        .collect()
}

/// Composite 20-point Gauss-Legendre sum over consecutive breakpoints.
pub fn gauss_panels<F: Fn(f64) -> f64>(f: F, breaks: &[f64]) -> f64 {
    let rule = gauss_legendre(20);
    breaks
        .windows(2)
        .map(|w| {
            let (c, h) = (0.5 * (w[0] + w[1]), 0.5 * (w[1] - w[0]));
            h * rule.iter().map(|(x, wt)| wt * f(c + h * x)).sum::<f64>()
        })
        .sum()
}

/// Breakpoints of `[a, b]` refined geometrically toward `target`, which must be an endpoint.
pub fn graded(a: f64, b: f64, target: f64, first: f64) -> Vec<f64> {
    let mut dists = vec![0.0];
    let mut d = first;
    let len = b - a;
    while d < len {
        dists.push(d);
        d *= 2.0;
    }
    let mut far = *dists.last().unwrap();
    while far + 1.0 < len {
        far += 1.0;
        dists.push(far);
    }
    dists.push(len);
    let mut pts: Vec<f64> = if target == a {
        dists.iter().map(|d| a + d).collect()
    } else {
        dists.iter().map(|d| b - d).collect()
    };
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    pts
}

/// Principal value of `∫_lo^hi v(z)/(z-s) dz` by symmetric excision of
/// `(s-ε, s+ε)` and two rounds of Richardson extrapolation in `ε`.
pub fn pv_excision<V: Fn(f64) -> f64>(v: V, s: f64, lo: f64, hi: f64, eps: f64) -> f64 {
    let excised = |e: f64| {
        let f = |z: f64| v(z) / (z - s);
        gauss_panels(f, &graded(lo, s - e, s - e, e))
            + gauss_panels(f, &graded(s + e, hi, s + e, e))
    };
    let (a, b, c) = (excised(eps), excised(0.5 * eps), excised(0.25 * eps));
    // The excision error is odd in ε: c₁ε + c₃ε³ + ...
    let r1 = 2.0 * b - a;
    let r2 = 2.0 * c - b;
    (8.0 * r2 - r1) / 7.0
}

/// Wraps an angle into `(-π, π]`.
pub fn wrap_angle(a: f64) -> f64 {
    let two_pi = 2.0 * std::f64::consts::PI;
    let r = a.rem_euclid(two_pi);
    if r > std::f64::consts::PI {
        r - two_pi
    } else {
        r
    }
}

/// Least-squares slope of `ys` against `xs`.
pub fn slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}
