//! Independent oracles shared by the integration tests. Area integrals are
//! computed directly over the domain, never through boundary integrals.
#![allow(dead_code)]

use std::f64::consts::PI;

use num_complex::Complex64;
use vpatch::contours::EllipseSpec;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Gauss–Legendre nodes and weights on `[0, 1]`.
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
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
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        out.push((0.5 * (x + 1.0), 0.5 * w));
    }
    out
}

/// `∫_E f dA` over an ellipse in elliptic polar coordinates
/// `z = z₀ + e^{iθ}(a r cos t + i b r sin t)`, `dA = ab r dr dt`:
/// Gauss–Legendre in `r`, periodic trapezoid in `t`.
pub fn ellipse_area_integral(e: &EllipseSpec, nr: usize, nt: usize, f: impl Fn(Complex64) -> Complex64) -> Complex64 {
    let rot = Complex64::from_polar(1.0, e.tilt);
    let mut acc = Complex64::new(0.0, 0.0);
    for (r, w) in gauss_legendre(nr) {
        for k in 0..nt {
            let t = 2.0 * PI * k as f64 / nt as f64;
            let z = e.center + rot * c(e.a * r * t.cos(), e.b * r * t.sin());
            acc += f(z) * (w * r);
        }
    }
    acc * (e.a * e.b * 2.0 * PI / nt as f64)
}

/// Cauchy transform `(1/π)∫_E dA(ξ)/(z − ξ)` at a point well outside `E`.
pub fn cauchy_transform_exterior(e: &EllipseSpec, z: Complex64) -> Complex64 {
    ellipse_area_integral(e, 96, 512, |xi| 1.0 / (z - xi)) / PI
}

/// `Ψ(z) = (1/2π)∫_D ln|z − ξ| dA` for a disc of radius `r` centred at
/// the origin. The mean of `ln|z − ρe^{it}|` over a circle is
/// `ln max(|z|, ρ)`, so `Ψ = ∫₀^r ρ ln max(|z|, ρ) dρ`, integrated exactly.
pub fn disc_potential(r: f64, z: Complex64) -> f64 {
    let m = z.norm();
    if m >= r {
        0.5 * r * r * m.ln()
    } else {
        0.5 * r * r * r.ln() - 0.25 * r * r + 0.25 * m * m
    }
}

pub fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0f64, |m, x| m.max(x.abs()))
}

/// Admissible `(Q₂, α)` grid: `Q₂` equispaced in `[0.2, 0.8]`, `α` at the
/// interior fractions `(j + 1)/(n + 1)` of `(Q₂²/(Q₂² − 1), 0)`.
pub fn admissible_grid(n: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(n * n);
    for i in 0..n {
        let q2 = 0.2 + 0.6 * i as f64 / (n - 1) as f64;
        let lower = vpatch::rotation::admissible_alpha_lower(q2);
        for j in 0..n {
            out.push((q2, lower * (j + 1) as f64 / (n + 1) as f64));
        }
    }
    out
}

/// Inner ellipse with `(a − b)/(a + b) = q2` and `b = 1`.
pub fn inner_with_q(q2: f64) -> EllipseSpec {
    EllipseSpec::centered((1.0 + q2) / (1.0 - q2), 1.0).unwrap()
}
