//! Cauchy transforms `C(χ_D)(z) = (1/π)∫_D dA(ξ)/(z − ξ)` and the one-sided
//! boundary Cauchy integrals `γ±(z) = (1/2πi)∮ ξ̄/(ξ − z) dξ`.
//!
//! Conventions: `C(χ_D) = z̄ − γ⁺` on the closed domain and `C(χ_D) = −γ⁻`
//! outside it. On the boundary `γ⁺ − γ⁻ = z̄`.
//!
//! For a sampled contour the boundary values are computed from the bounded
//! integrand `(ξ̄ − z̄)/(ξ − z)`, whose diagonal limit at a node is
//! `conj(ξ′)/ξ′`. Off the nodes, `γ⁺` (resp. `γ⁻`) is holomorphic inside
//! (resp. outside) and is reconstructed from its nodal values with the
//! barycentric Cauchy formula, which stays accurate arbitrarily close to the
//! curve.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::contours::{classify, Contour, EllipseSpec, Orientation, Side};
use crate::error::{Error, Result};
use crate::scalar::CScalar;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Distance below which a point is treated as lying on the focal segment.
pub const FOCAL_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    ClosedForm,
    Quadrature,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransformValue {
    pub value: Complex64,
    pub side: Side,
    pub method: Method,
}

// ---------------------------------------------------------------------------
// Generic kernels. `z` are nodes and `dz` parameter derivatives of a
// counterclockwise curve sampled at N equispaced parameter values.

/// Desingularized integrals `I_k = (1/2πi)∮ (ξ̄ − z̄_k)/(ξ − z_k) dξ` at every
/// node. Then `γ⁺(z_k) = I_k + z̄_k`, `γ⁻(z_k) = I_k` and `C(χ_D)(z_k) = −I_k`.
pub fn node_integrals<T: CScalar>(z: &[T], dz: &[T]) -> Vec<T> {
    let n = z.len();
    let h = 2.0 * PI / n as f64;
    let factor = T::constant(Complex64::new(0.0, -h / (2.0 * PI)));
    (0..n)
        .map(|k| {
            let zk = z[k];
            let zkc = zk.conj();
            let mut acc = dz[k].conj();
            for m in 0..n {
                if m != k {
                    acc = acc + (z[m].conj() - zkc) / (z[m] - zk) * dz[m];
                }
            }
            acc * factor
        })
        .collect()
}

/// Boundary values of `γ⁺` at the nodes.
pub fn node_gamma_plus<T: CScalar>(z: &[T], dz: &[T]) -> Vec<T> {
    node_integrals(z, dz).into_iter().zip(z).map(|(i, z)| i + z.conj()).collect()
}

/// Barycentric evaluation at an interior target `t` of the function
/// holomorphic inside the curve with nodal boundary values `v`.
pub fn barycentric_interior<T: CScalar>(z: &[T], dz: &[T], v: &[T], t: T) -> T {
    let mut num = T::real(0.0);
    let mut den = T::real(0.0);
    for m in 0..z.len() {
        let diff = z[m] - t;
        if diff.value() == Complex64::new(0.0, 0.0) {
            return v[m];
        }
        let w = dz[m] / diff;
        num = num + v[m] * w;
        den = den + w;
    }
    num / den
}

/// Barycentric evaluation at an exterior target `t` of the function
/// holomorphic outside the curve, vanishing at infinity, with nodal values `v`.
pub fn barycentric_exterior<T: CScalar>(z: &[T], dz: &[T], v: &[T], t: T) -> T {
    let h = 2.0 * PI / z.len() as f64;
    let mut num = T::real(0.0);
    let mut den = T::real(0.0);
    for m in 0..z.len() {
        let diff = z[m] - t;
        if diff.value() == Complex64::new(0.0, 0.0) {
            return v[m];
        }
        let w = dz[m] / diff;
        num = num + v[m] * w;
        den = den + w;
    }
    // both sums carry the common factor h, which cancels against 2πi/h
    num / (den - T::constant(Complex64::new(0.0, 2.0 * PI / h)))
}

// ---------------------------------------------------------------------------

/// Precomputed boundary data of a contour for repeated transform evaluation.
#[derive(Debug, Clone)]
pub struct CauchyEvaluator {
    contour: Contour,
    integrals: Vec<Complex64>,
    plus: Vec<Complex64>,
}

impl CauchyEvaluator {
    pub fn new(c: &Contour) -> Self {
        let contour = match c.orientation() {
            Orientation::CounterClockwise => c.clone(),
            Orientation::Clockwise => c.reversed(),
        };
        let integrals = node_integrals(contour.samples(), contour.derivs());
        let plus =
            integrals.iter().zip(contour.samples()).map(|(i, z)| i + z.conj()).collect();
        Self { contour, integrals, plus }
    }

    pub fn contour(&self) -> &Contour {
        &self.contour
    }

    /// `γ⁺` at every node.
    pub fn node_gamma_plus(&self) -> &[Complex64] {
        &self.plus
    }

    /// `γ⁻` at every node.
    pub fn node_gamma_minus(&self) -> &[Complex64] {
        &self.integrals
    }

    fn node_index(&self, z: Complex64) -> Option<usize> {
        let tol = 1e-14 * self.contour.diameter().max(1.0);
        self.contour.samples().iter().position(|s| (s - z).norm() <= tol)
    }

    fn interior(&self, z: Complex64) -> Complex64 {
        let c = &self.contour;
        barycentric_interior(c.samples(), c.derivs(), &self.plus, z)
    }

    fn exterior(&self, z: Complex64) -> Complex64 {
        let c = &self.contour;
        barycentric_exterior(c.samples(), c.derivs(), &self.integrals, z)
    }

    /// `γ⁺(z)` for `z` inside or on the curve.
    pub fn gamma_plus(&self, z: Complex64) -> Result<Complex64> {
        if let Some(k) = self.node_index(z) {
            return Ok(self.plus[k]);
        }
        match classify(z, &self.contour) {
            Side::Outside => Err(Error::OutsideDomain(z)),
            _ => Ok(self.interior(z)),
        }
    }

    /// `γ⁻(z)` for `z` outside or on the curve.
    pub fn gamma_minus(&self, z: Complex64) -> Result<Complex64> {
        if let Some(k) = self.node_index(z) {
            return Ok(self.integrals[k]);
        }
        match classify(z, &self.contour) {
            Side::Inside => Err(Error::InsideDomain(z)),
            _ => Ok(self.exterior(z)),
        }
    }

    /// `C(χ_D)(z)` anywhere in the plane.
    pub fn transform(&self, z: Complex64) -> TransformValue {
        if let Some(k) = self.node_index(z) {
            return TransformValue {
                value: -self.integrals[k],
                side: Side::Boundary,
                method: Method::Quadrature,
            };
        }
        let side = classify(z, &self.contour);
        let value = match side {
            Side::Outside => -self.exterior(z),
            _ => z.conj() - self.interior(z),
        };
        TransformValue { value, side, method: Method::Quadrature }
    }

    /// `C(χ_D)(z)` when the side of `z` is already known, skipping
    /// classification. Boundary points must be nodes.
    pub(crate) fn transform_on_side(&self, z: Complex64, inside: bool) -> Complex64 {
        if inside {
            z.conj() - self.interior(z)
        } else {
            -self.exterior(z)
        }
    }
}

/// `γ⁺(z)` for `z` inside `c` or on its nodes.
pub fn gamma_plus(c: &Contour, z: Complex64) -> Result<Complex64> {
    CauchyEvaluator::new(c).gamma_plus(z)
}

/// `γ⁻(z)` for `z` outside `c` or on its nodes.
pub fn gamma_minus(c: &Contour, z: Complex64) -> Result<Complex64> {
    CauchyEvaluator::new(c).gamma_minus(z)
}

/// `sup_k |γ⁺(z_k) − γ⁻(z_k) − z̄_k|`, with `γ⁺` from the desingularized
/// integral and `γ⁻` from an independent principal-value rule (alternating
/// trapezoid nodes plus the Plemelj half-residue).
pub fn jump_residual(c: &Contour) -> f64 {
    let ev = CauchyEvaluator::new(c);
    let c = ev.contour();
    let (z, dz) = (c.samples(), c.derivs());
    let n = z.len();
    let h = c.step();
    (0..n)
        .map(|k| {
            let mut pv = Complex64::new(0.0, 0.0);
            for m in ((k + 1)..n).chain(0..k).filter(|m| (m + n - k) % 2 == 1) {
                pv += z[m].conj() * dz[m] / (z[m] - z[k]);
            }
            let pv = pv * (2.0 * h) / (2.0 * PI * I);
            let minus = pv - 0.5 * z[k].conj();
            (ev.node_gamma_plus()[k] - minus - z[k].conj()).norm()
        })
        .fold(0.0, f64::max)
}

// ---------------------------------------------------------------------------
// Closed forms.

/// Cauchy transform of the disc `|z − z₀| ≤ r`.
pub fn cauchy_disc(center: Complex64, r: f64, z: Complex64) -> Result<TransformValue> {
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::InvalidArgument(format!("disc radius must be positive, got {r}")));
    }
    let w = z - center;
    let d = w.norm();
    let side = if (d - r).abs() <= 1e-12 * r {
        Side::Boundary
    } else if d < r {
        Side::Inside
    } else {
        Side::Outside
    };
    let value = match side {
        Side::Outside => r * r / w,
        _ => w.conj(),
    };
    Ok(TransformValue { value, side, method: Method::ClosedForm })
}

/// Principal square root, also for jets.
pub trait SqrtExt {
    fn sqrt_principal(self) -> Self;
}

impl SqrtExt for Complex64 {
    fn sqrt_principal(self) -> Self {
        self.sqrt()
    }
}

impl SqrtExt for crate::scalar::Jet {
    fn sqrt_principal(self) -> Self {
        let s = self.v.sqrt();
        crate::scalar::Jet::new(s, self.d / (2.0 * s))
    }
}

/// `F(w) = 2ab / (w(1 + √(1 − c²/w²)))` in the frame of a centred,
/// axis-aligned ellipse, with the root taken as `√(1 − c/w)·√(1 + c/w)`
/// (principal branches), continuous off the focal segment and → 1 at ∞.
pub fn ellipse_exterior_local<T: CScalar + SqrtExt>(a: f64, b: f64, c: Complex64, w: T) -> T {
    let one = T::real(1.0);
    let cw = T::constant(c) / w;
    let root = (one - cw).sqrt_principal() * (one + cw).sqrt_principal();
    T::real(2.0 * a * b) / (w * (one + root))
}

/// `F` of a general ellipse in the plane: `C(χ_D)(z)` for `z` outside.
pub fn ellipse_exterior(spec: &EllipseSpec, z: Complex64) -> Complex64 {
    let w = spec.to_local(z);
    spec.rotation().conj() * ellipse_exterior_local(spec.a, spec.b, spec.focal_half_length(), w)
}

/// Interior `γ⁺(z) = e^{−2iθ} Q (z − z₀) + z̄₀`, affine in `z`.
pub fn ellipse_gamma_plus(spec: &EllipseSpec, z: Complex64) -> Complex64 {
    let r = spec.rotation().conj();
    r * r * spec.q() * (z - spec.center) + spec.center.conj()
}

/// Exterior `γ⁻(z) = −F(z)`.
pub fn ellipse_gamma_minus(spec: &EllipseSpec, z: Complex64) -> Complex64 {
    -ellipse_exterior(spec, z)
}

fn check_focal(spec: &EllipseSpec, z: Complex64) -> Result<()> {
    if !spec.is_circle() && spec.distance_to_focal_segment(z) < FOCAL_TOLERANCE {
        return Err(Error::BranchCut { z, tol: FOCAL_TOLERANCE });
    }
    Ok(())
}

fn ellipse_side(spec: &EllipseSpec, z: Complex64) -> Side {
    let l = spec.level(z);
    if (l - 1.0).abs() <= 1e-12 {
        Side::Boundary
    } else if l < 1.0 {
        Side::Inside
    } else {
        Side::Outside
    }
}

/// Closed-form Cauchy transform of an ellipse. Points within
/// [`FOCAL_TOLERANCE`] of the focal segment are rejected.
pub fn cauchy_ellipse(spec: &EllipseSpec, z: Complex64) -> Result<TransformValue> {
    check_focal(spec, z)?;
    let side = ellipse_side(spec, z);
    let value = match side {
        Side::Outside => ellipse_exterior(spec, z),
        _ => z.conj() - ellipse_gamma_plus(spec, z),
    };
    Ok(TransformValue { value, side, method: Method::ClosedForm })
}

/// `c² G² + 4ab w G + 4a²b²` with `G = −F(w)` the exterior γ⁻ of the ellipse,
/// evaluated in the ellipse frame `w = e^{−iθ}(z − z₀)`.
pub fn schwarz_quadratic_residual(spec: &EllipseSpec, z: Complex64) -> Result<Complex64> {
    check_focal(spec, z)?;
    if ellipse_side(spec, z) == Side::Inside {
        return Err(Error::InsideDomain(z));
    }
    let w = spec.to_local(z);
    let (a, b) = (spec.a, spec.b);
    let g = -ellipse_exterior_local(a, b, spec.focal_half_length(), w);
    Ok(spec.c_squared() * g * g + 4.0 * a * b * w * g + 4.0 * a * a * b * b)
}
