//! Recovering domains from Cauchy data, and the Laurent-series identities of
//! the concentricity argument.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::cauchy::CauchyEvaluator;
use crate::contours::{classify, Contour, EllipseSpec, Side};
use crate::error::{Error, Result};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Interior `γ⁺(z) = q(z − z₀) + z̄₀`, with `q = Q e^{−2iθ}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AffineGammaPlus {
    pub q: Complex64,
    pub anchor: Complex64,
}

impl AffineGammaPlus {
    /// Rejects `|q| ≥ 1`, for which no Jordan domain has this `γ⁺`.
    pub fn new(q: Complex64, anchor: Complex64) -> Result<Self> {
        if !(q.norm() < 1.0) {
            return Err(Error::InvalidArgument(format!(
                "|q| = {} must be below 1 for a bounded domain to exist",
                q.norm()
            )));
        }
        Ok(Self { q, anchor })
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.q * (z - self.anchor) + self.anchor.conj()
    }
}

/// Least-squares affine fit `γ⁺(z) ≈ q z + r` to the nodal values of `γ⁺`,
/// returned as `(fit, sup misfit)`.
pub fn fit_affine_gamma_plus(c: &Contour) -> Result<(AffineGammaPlus, f64)> {
    let ev = CauchyEvaluator::new(c);
    let z = ev.contour().samples();
    let g = ev.node_gamma_plus();
    let n = z.len() as f64;
    let zm: Complex64 = z.iter().sum::<Complex64>() / n;
    let gm: Complex64 = g.iter().sum::<Complex64>() / n;
    let num: Complex64 = z.iter().zip(g).map(|(z, g)| (z - zm).conj() * (g - gm)).sum();
    let den: f64 = z.iter().map(|z| (z - zm).norm_sqr()).sum();
    let q = num / den;
    let r = gm - q * zm;
    // r = z̄₀ − q z₀  ⇒  z₀ = (r̄ + q̄ r)/(1 − |q|²)
    let anchor = (r.conj() + q.conj() * r) / (1.0 - q.norm_sqr());
    let misfit = z.iter().zip(g).map(|(z, g)| (g - q * z - r).norm()).fold(0.0, f64::max);
    Ok((AffineGammaPlus::new(q, anchor)?, misfit))
}

/// The ellipse with the given affine `γ⁺` and area: `Q = |q|`,
/// `θ = −arg(q)/2`, `a/b = (1 + Q)/(1 − Q)`, `πab = area`.
pub fn ellipse_from_affine(g: &AffineGammaPlus, domain_area: f64) -> Result<EllipseSpec> {
    let g = AffineGammaPlus::new(g.q, g.anchor)?;
    if !(domain_area > 0.0 && domain_area.is_finite()) {
        return Err(Error::InvalidArgument(format!("area must be positive, got {domain_area}")));
    }
    let q = g.q.norm();
    let tilt = if q == 0.0 { 0.0 } else { -0.5 * g.q.arg() };
    let ab = domain_area / PI;
    let ratio = (1.0 + q) / (1.0 - q);
    EllipseSpec::new(g.anchor, (ab * ratio).sqrt(), (ab / ratio).sqrt(), tilt)
}

/// Level set `|w|⁴ + a|w|² + 2b Re w = c`, `w = z − z₁`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuarticCurve {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub center: Complex64,
}

impl QuarticCurve {
    /// `|w|⁴ + a|w|² + 2b Re w − c`.
    pub fn form(&self, z: Complex64) -> f64 {
        let w = z - self.center;
        let r2 = w.norm_sqr();
        r2 * r2 + self.a * r2 + 2.0 * self.b * w.re - self.c
    }

    /// Positive radii `ρ` with `ρ⁴ + aρ² + 2bρ cos φ = c`, ascending.
    pub fn radii(&self, phi: f64) -> Vec<f64> {
        let p = |r: f64| r.powi(4) + self.a * r * r + 2.0 * self.b * r * phi.cos() - self.c;
        let dp = |r: f64| 4.0 * r.powi(3) + 2.0 * self.a * r + 2.0 * self.b * phi.cos();
        // Cauchy bound on the roots of the monic quartic
        let bound = 1.0 + self.a.abs().max(2.0 * self.b.abs()).max(self.c.abs());
        let m = 4000;
        let mut roots = Vec::new();
        let mut lo = bound * 1e-12;
        let mut plo = p(lo);
        for k in 1..=m {
            let hi = bound * k as f64 / m as f64;
            let phi_ = p(hi);
            if plo == 0.0 {
                roots.push(lo);
            } else if plo * phi_ < 0.0 {
                let (mut x0, mut x1) = (lo, hi);
                for _ in 0..200 {
                    let mid = 0.5 * (x0 + x1);
                    if p(x0) * p(mid) <= 0.0 {
                        x1 = mid;
                    } else {
                        x0 = mid;
                    }
                    if x1 - x0 <= 4.0 * f64::EPSILON * x1 {
                        break;
                    }
                }
                let mut r = 0.5 * (x0 + x1);
                for _ in 0..3 {
                    let d = dp(r);
                    if d != 0.0 {
                        let next = r - p(r) / d;
                        if next > x0 && next < x1 {
                            r = next;
                        }
                    }
                }
                roots.push(r);
            }
            lo = hi;
            plo = phi_;
        }
        roots
    }

    /// Traces the level set along `n` rays from the centre. Each returned
    /// curve collects the `j`-th smallest root of every ray; more than one
    /// curve means the level set has several components (or is not
    /// star-shaped about the centre).
    pub fn trace(&self, n: usize) -> Result<Vec<Vec<Complex64>>> {
        let mut curves: Vec<Vec<Complex64>> = Vec::new();
        for k in 0..n {
            let phi = 2.0 * PI * k as f64 / n as f64;
            let radii = self.radii(phi);
            if k == 0 {
                if radii.is_empty() {
                    return Err(Error::Degenerate("quartic level set is empty or a single point".into()));
                }
                curves = vec![Vec::with_capacity(n); radii.len()];
            }
            if radii.len() != curves.len() {
                return Err(Error::Degenerate(format!(
                    "number of level-set crossings changes with angle ({} vs {})",
                    curves.len(),
                    radii.len()
                )));
            }
            for (curve, r) in curves.iter_mut().zip(radii) {
                curve.push(self.center + Complex64::from_polar(r, phi));
            }
        }
        Ok(curves)
    }
}

/// The quartic level set through `calibration_point` associated with
/// `γ⁻(z) = a/(z − z₁) + b/(z − z₁)²`.
pub fn quartic_from_rational(a: f64, b: f64, z1: Complex64, calibration_point: Complex64) -> Result<QuarticCurve> {
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::InvalidArgument("non-finite coefficients".into()));
    }
    let mut curve = QuarticCurve { a, b, c: 0.0, center: z1 };
    curve.c = curve.form(calibration_point);
    // `c` is only known to rounding relative to its terms; a rounding
    // residue would split off a spurious tiny component around `z₁`
    let w = (calibration_point - z1).norm();
    let size = w.powi(4) + a.abs() * w * w + 2.0 * b.abs() * w;
    if curve.c.abs() <= 8.0 * f64::EPSILON * size {
        curve.c = 0.0;
    }
    curve.trace(64)?;
    Ok(curve)
}

/// Coefficients `a_n = −(1/2πi)∮ (ξ − z₁)ⁿ ξ̄ dξ`, `n = 0..=n_max`, of
/// `γ⁻(z) = Σ a_n/(z − z₁)^{n+1}`. In particular `a₀ = −|D|/π` and
/// `a₁ = −(centroid − z₁)|D|/π`.
pub fn laurent_moments(c: &Contour, z1: Complex64, n_max: usize) -> Result<Vec<Complex64>> {
    if classify(z1, c) != Side::Inside {
        return Err(Error::OutsideDomain(z1));
    }
    let sign = match c.orientation() {
        crate::contours::Orientation::CounterClockwise => 1.0,
        crate::contours::Orientation::Clockwise => -1.0,
    };
    let h = c.step();
    let scale = -sign * h / (2.0 * PI * I);
    let mut out = vec![Complex64::new(0.0, 0.0); n_max + 1];
    for (z, d) in c.samples().iter().zip(c.derivs()) {
        let w = z - z1;
        let base = w.conj() * d;
        let mut p = Complex64::new(1.0, 0.0);
        for a in out.iter_mut() {
            *a += p * base;
            p *= w;
        }
    }
    Ok(out.into_iter().map(|a| a * scale).collect())
}

/// Truncated series `Σ a_n/(z − z₁)^{n+1}`.
pub fn laurent_eval(coeffs: &[Complex64], z1: Complex64, z: Complex64) -> Complex64 {
    let inv = 1.0 / (z - z1);
    coeffs.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, a| (acc + a) * inv)
}

/// Parameters of the series identity: `c₁²`, `c₂²` (squared half focal
/// distances of the two ellipses) and the centre offset `d = z₁ − z₂`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesCheck {
    pub c1sq: f64,
    pub c2sq: f64,
    pub d: f64,
}

impl SeriesCheck {
    pub fn new(c1sq: f64, c2sq: f64, d: f64) -> Self {
        Self { c1sq, c2sq, d }
    }

    /// `q = c₁²/c₂²`, the variable of `q² − 12q + 11 = 0`.
    pub fn q(&self) -> Option<f64> {
        (self.c2sq != 0.0).then(|| self.c1sq / self.c2sq)
    }

    /// Radius enclosing every branch cut of `S`: `|d| + max(|c₁|, |c₂|)`.
    pub fn singular_radius(&self) -> f64 {
        self.d.abs() + self.c1sq.abs().sqrt().max(self.c2sq.abs().sqrt())
    }

    /// `S(w) = 2d F₁(w) + (F₂(w + d) + F₂(d − w))(w − c₁² F₁(w))` with
    /// `F_j(u) = 1/(u(1 + √(1 − c_j²/u²)))`, rearranged so that the large
    /// cancelling terms at `|w| ≫ |d|, |c_j|` are combined analytically.
    pub fn eval(&self, w: Complex64) -> Complex64 {
        let (c1, c2, d) = (self.c1sq, self.c2sq, self.d);
        let s1 = branch_root(w, c1);
        let sp = branch_root(w + d, c2);
        let sm = branch_root(d - w, c2);
        let f1 = 1.0 / (w * (1.0 + s1));
        let p = |u: Complex64, s: Complex64| (3.0 + s) / (u.powu(5) * (1.0 + s).powu(3));
        let dw = d * d - w * w;
        let t = (2.0 * d.powi(3) + 6.0 * d * w * w) / (4.0 * dw.powu(3)) + c2 / 4.0 * (p(w + d, sp) + p(d - w, sm));
        let g = d / dw + c2 / 2.0 * t;
        d * c1 / (w.powu(3) * (1.0 + s1).powu(2)) + (d.powi(3) / (w * dw) + w * c2 / 2.0 * t) - c1 * g * f1
    }
}

/// `√(1 − c²/u²)` as `√(1 − c/u)·√(1 + c/u)` with principal roots.
fn branch_root(u: Complex64, csq: f64) -> Complex64 {
    let c = Complex64::new(csq, 0.0).sqrt();
    (1.0 - c / u).sqrt() * (1.0 + c / u).sqrt()
}

/// Closed-form coefficients of `w⁻³`, `w⁻⁵`, `w⁻⁷` in the expansion of `S`.
pub fn series_coefficients(s: &SeriesCheck) -> (f64, f64, f64) {
    let (a, b, d) = (s.c1sq, s.c2sq, s.d);
    let d2 = d * d;
    let c3 = d * (0.75 * a - 0.75 * b - d2);
    let c5 = d / 8.0 * (2.0 * a * a - 20.0 * b * d2 - 5.0 * b * b - 8.0 * d2 * d2 + 4.0 * a * d2 + 3.0 * a * b);
    let c7 = d / 64.0
        * (9.0 * a.powi(3) + 6.0 * a * a * b + 8.0 * a * a * d2 + 20.0 * a * b * b + 80.0 * a * b * d2
            + 32.0 * a * d2 * d2
            - 35.0 * b.powi(3)
            - 280.0 * b * b * d2
            - 336.0 * b * d2 * d2
            - 64.0 * d2.powi(3));
    (c3, c5, c7)
}

/// Laurent coefficients of `S` extracted by the trapezoid rule on a circle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LaurentExtraction {
    pub c3: f64,
    pub c5: f64,
    pub c7: f64,
    /// Largest of `|coef_k| / max(1, scale^k)` over `k ∈ {1, 2, 4, 6, 8}`,
    /// the coefficients that must vanish.
    pub spurious: f64,
    /// Largest imaginary part among `c3`, `c5`, `c7`.
    pub imaginary: f64,
}

impl LaurentExtraction {
    pub fn triple(&self) -> (f64, f64, f64) {
        (self.c3, self.c5, self.c7)
    }
}

/// Number of quadrature points on the extraction circle.
pub const SERIES_POINTS: usize = 256;

pub fn series_coefficients_numeric(s: &SeriesCheck, radius: f64) -> Result<LaurentExtraction> {
    let scale = s.singular_radius();
    if !(radius > scale && radius.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "radius {radius} must exceed |d| + max|c_j| = {scale}"
        )));
    }
    let m = SERIES_POINTS;
    let mut coef = [Complex64::new(0.0, 0.0); 9];
    for j in 0..m {
        let w = Complex64::from_polar(radius, 2.0 * PI * (j as f64 + 0.5) / m as f64);
        let sw = s.eval(w);
        let mut p = sw;
        for c in coef.iter_mut().skip(1) {
            p *= w;
            *c += p;
        }
    }
    for c in coef.iter_mut() {
        *c /= m as f64;
    }
    let spurious = [1usize, 2, 4, 6, 8]
        .iter()
        .map(|&k| coef[k].norm() / scale.powi(k as i32).max(1.0))
        .fold(0.0, f64::max);
    let imaginary = [3usize, 5, 7].iter().map(|&k| coef[k].im.abs()).fold(0.0, f64::max);
    Ok(LaurentExtraction { c3: coef[3].re, c5: coef[5].re, c7: coef[7].re, spurious, imaginary })
}
