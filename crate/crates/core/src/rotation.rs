//! Rigid-rotation residuals on the interfaces of a layered patch, and the
//! confocal-ellipse (Flierl–Polvani) family of rotating solutions.
//!
//! A pair rotating rigidly with angular velocity `Ω` about the origin
//! satisfies on each interface `2Re{∂_zΨ z′} = Ω Re{z̄ z′}`. In terms of the
//! one-sided integrals, with `λ = 1 − 2Ω`:
//!
//! * outer: `Re{(λz̄ + (1 − α)γ₂⁻ − γ₁⁺) z′} = 0`
//! * inner: `Re{((α − 2Ω)z̄ + (1 − α)γ₂⁺ − γ₁⁺) z′} = 0`

use log::warn;
use num_complex::Complex64;

use crate::contours::{Contour, EllipseSpec};
use crate::error::{Error, Result};
use crate::field::{NodeTransforms, PatchPair};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RotationCandidate {
    pub omega: f64,
    pub lambda: f64,
    pub center: Complex64,
}

impl RotationCandidate {
    pub fn new(omega: f64) -> Self {
        Self::about(omega, Complex64::new(0.0, 0.0))
    }

    pub fn about(omega: f64, center: Complex64) -> Self {
        Self { omega, lambda: 1.0 - 2.0 * omega, center }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Normalization {
    Raw,
    #[default]
    PerArcLength,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InterfaceKind {
    Outer,
    Inner,
}

impl InterfaceKind {
    pub fn label(self) -> &'static str {
        match self {
            InterfaceKind::Outer => "outer",
            InterfaceKind::Inner => "inner",
        }
    }
}

/// Per-node residual values. `l2_norm` is the root mean square over nodes,
/// i.e. the discrete `L²` norm on the parameter circle divided by `√(2π)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ResidualReport {
    pub values: Vec<f64>,
    pub interfaces: Vec<InterfaceKind>,
    pub sup_norm: f64,
    pub l2_norm: f64,
    pub normalization: Normalization,
}

impl ResidualReport {
    pub fn new(values: Vec<f64>, kind: InterfaceKind, normalization: Normalization) -> Self {
        let interfaces = vec![kind; values.len()];
        Self::from_parts(values, interfaces, normalization)
    }

    fn from_parts(values: Vec<f64>, interfaces: Vec<InterfaceKind>, normalization: Normalization) -> Self {
        let sup_norm = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let l2_norm = if values.is_empty() {
            0.0
        } else {
            (values.iter().map(|v| v * v).sum::<f64>() / values.len() as f64).sqrt()
        };
        Self { values, interfaces, sup_norm, l2_norm, normalization }
    }

    /// Concatenation of two reports with the same normalization.
    pub fn join(&self, other: &ResidualReport) -> ResidualReport {
        let mut values = self.values.clone();
        values.extend_from_slice(&other.values);
        let mut interfaces = self.interfaces.clone();
        interfaces.extend_from_slice(&other.interfaces);
        Self::from_parts(values, interfaces, self.normalization)
    }
}

/// Cached transforms of a pair for evaluating residuals at many `Ω`.
#[derive(Debug, Clone)]
pub struct ResidualEvaluator {
    alpha: f64,
    center: Complex64,
    outer: Contour,
    inner: Option<Contour>,
    t: NodeTransforms,
    normalization: Normalization,
}

impl ResidualEvaluator {
    pub fn new(p: &PatchPair, center: Complex64, normalization: Normalization) -> Self {
        if let Ok(x) = p.vorticity_centroid() {
            let tol = 1e-8 * p.outer().diameter();
            if (x - center).norm() > tol {
                warn!("rotation center {center} differs from the vorticity centroid {x}");
            }
        }
        Self {
            alpha: p.alpha(),
            center,
            outer: p.outer().clone(),
            inner: p.inner().cloned(),
            t: p.node_transforms(),
            normalization,
        }
    }

    fn finish(&self, c: &Contour, raw: impl Iterator<Item = (usize, f64)>) -> Vec<f64> {
        raw.map(|(k, r)| match self.normalization {
            Normalization::Raw => r,
            Normalization::PerArcLength => r / c.derivs()[k].norm(),
        })
        .collect()
    }

    /// Outer-interface residual `Re{(λζ̄ + (1 − α)γ₂⁻ − γ₁⁺) z′}` with
    /// `ζ = z − center`.
    pub fn outer(&self, omega: f64) -> ResidualReport {
        let lambda = 1.0 - 2.0 * omega;
        let c = &self.outer;
        let raw = c.samples().iter().zip(c.derivs()).enumerate().map(|(k, (z, d))| {
            let zb = (z - self.center).conj();
            let g1p = zb - self.t.outer_c1[k];
            let g2m = self.t.outer_c2.get(k).map_or(Complex64::new(0.0, 0.0), |c2| -c2);
            (k, ((lambda * zb + (1.0 - self.alpha) * g2m - g1p) * d).re)
        });
        ResidualReport::new(self.finish(c, raw), InterfaceKind::Outer, self.normalization)
    }

    /// Inner-interface residual `Re{((α − 2Ω)ζ̄ + (1 − α)γ₂⁺ − γ₁⁺) z′}`.
    pub fn inner(&self, omega: f64) -> Result<ResidualReport> {
        let c = self
            .inner
            .as_ref()
            .ok_or_else(|| Error::InvalidArgument("pair has no inner interface".into()))?;
        let raw = c.samples().iter().zip(c.derivs()).enumerate().map(|(k, (z, d))| {
            let zb = (z - self.center).conj();
            let g1p = zb - self.t.inner_c1[k];
            let g2p = zb - self.t.inner_c2[k];
            (k, (((self.alpha - 2.0 * omega) * zb + (1.0 - self.alpha) * g2p - g1p) * d).re)
        });
        Ok(ResidualReport::new(self.finish(c, raw), InterfaceKind::Inner, self.normalization))
    }

    /// Outer report followed by the inner one (when present).
    pub fn joint(&self, omega: f64) -> ResidualReport {
        let o = self.outer(omega);
        match self.inner(omega) {
            Ok(i) => o.join(&i),
            Err(_) => o,
        }
    }

    /// Stream-function form `2Re(∂_zΨ z′) − Ω Re(ζ̄ z′)` on one interface.
    pub fn single(&self, kind: InterfaceKind, omega: f64) -> Result<ResidualReport> {
        let w = self.alpha - 1.0;
        let (c, c1, c2) = match kind {
            InterfaceKind::Outer => (&self.outer, &self.t.outer_c1, &self.t.outer_c2),
            InterfaceKind::Inner => (
                self.inner
                    .as_ref()
                    .ok_or_else(|| Error::InvalidArgument("pair has no inner interface".into()))?,
                &self.t.inner_c1,
                &self.t.inner_c2,
            ),
        };
        let raw = c.samples().iter().zip(c.derivs()).enumerate().map(|(k, (z, d))| {
            let dpsi = 0.25 * (c1[k] + c2.get(k).map_or(Complex64::new(0.0, 0.0), |v| w * v));
            let zb = (z - self.center).conj();
            (k, 2.0 * (dpsi * d).re - omega * (zb * d).re)
        });
        Ok(ResidualReport::new(self.finish(c, raw), kind, self.normalization))
    }
}

fn interface_of(c: &Contour, p: &PatchPair) -> Result<InterfaceKind> {
    if c.samples() == p.outer().samples() {
        Ok(InterfaceKind::Outer)
    } else if p.inner().is_some_and(|i| i.samples() == c.samples()) {
        Ok(InterfaceKind::Inner)
    } else {
        Err(Error::InvalidArgument("contour is not an interface of the pair".into()))
    }
}

/// `2Re{∂_zΨ z′} − Ω Re{ζ̄ z′}` at the nodes of `c`, an interface of `p`.
pub fn residual_single(c: &Contour, omega: &RotationCandidate, p: &PatchPair) -> Result<ResidualReport> {
    residual_single_with(c, omega, p, Normalization::default())
}

pub fn residual_single_with(
    c: &Contour,
    omega: &RotationCandidate,
    p: &PatchPair,
    normalization: Normalization,
) -> Result<ResidualReport> {
    let kind = interface_of(c, p)?;
    ResidualEvaluator::new(p, omega.center, normalization).single(kind, omega.omega)
}

pub fn residual_outer(p: &PatchPair, omega: &RotationCandidate) -> ResidualReport {
    residual_outer_with(p, omega, Normalization::default())
}

pub fn residual_outer_with(p: &PatchPair, omega: &RotationCandidate, normalization: Normalization) -> ResidualReport {
    ResidualEvaluator::new(p, omega.center, normalization).outer(omega.omega)
}

pub fn residual_inner(p: &PatchPair, omega: &RotationCandidate) -> Result<ResidualReport> {
    residual_inner_with(p, omega, Normalization::default())
}

pub fn residual_inner_with(
    p: &PatchPair,
    omega: &RotationCandidate,
    normalization: Normalization,
) -> Result<ResidualReport> {
    ResidualEvaluator::new(p, omega.center, normalization).inner(omega.omega)
}

/// Smallest joint sup residual over a set of angular velocities, with the
/// minimizing `Ω`.
pub fn min_joint_residual(p: &PatchPair, center: Complex64, omegas: &[f64]) -> (f64, f64) {
    let ev = ResidualEvaluator::new(p, center, Normalization::default());
    omegas
        .iter()
        .map(|&w| (w, ev.joint(w).sup_norm))
        .fold((f64::NAN, f64::INFINITY), |best, x| if x.1 < best.1 { x } else { best })
}

// ---------------------------------------------------------------------------

/// `Ω = ab/(a + b)²`, the angular velocity of a uniform elliptical patch.
pub fn kirchhoff_omega(a: f64, b: f64) -> Result<f64> {
    if !(a > 0.0 && b > 0.0 && a.is_finite() && b.is_finite()) {
        return Err(Error::InvalidArgument(format!("semi-axes must be positive (a = {a}, b = {b})")));
    }
    Ok(a * b / ((a + b) * (a + b)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    /// `Ω₋ = α(Q₂² − 1)/(4Q₂²)`, the genuine confocal solution.
    Minus,
    /// `Ω₊ = α(1 − Q₂²)/4`, which forces `Q₁ = Q₂` (outer = inner).
    Plus,
}

/// Parameters of the confocal rotating pair for given inner `Q₂` and `α`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlierlPolvaniParams {
    pub q2: f64,
    pub alpha: f64,
    pub omega_minus: f64,
    pub omega_plus: f64,
    /// `Q₁` on the `Ω₋` branch.
    pub q1: f64,
    /// `Q₁` on the `Ω₊` branch (always `Q₂`).
    pub q1_plus: f64,
    pub rho: f64,
    /// `λB₁ + Q₁A₁` on the `Ω₋` branch.
    pub m: f64,
    /// Lower end of the admissible interval for `α`.
    pub alpha_lower: f64,
}

impl FlierlPolvaniParams {
    pub fn omega(&self, branch: Branch) -> f64 {
        match branch {
            Branch::Minus => self.omega_minus,
            Branch::Plus => self.omega_plus,
        }
    }

    pub fn q1_on(&self, branch: Branch) -> f64 {
        match branch {
            Branch::Minus => self.q1,
            Branch::Plus => self.q1_plus,
        }
    }

    /// `[(α − 1)Q₂ + Q₁](1 + Q₂²) − 2(α − 2Ω)Q₂` on the given branch.
    pub fn eq3_residual(&self, branch: Branch) -> f64 {
        let (q1, q2, a) = (self.q1_on(branch), self.q2, self.alpha);
        ((a - 1.0) * q2 + q1) * (1.0 + q2 * q2) - 2.0 * (a - 2.0 * self.omega(branch)) * q2
    }
}

/// Lower end `−Q₂²/(1 − Q₂²)` of the admissible `α` interval.
pub fn admissible_alpha_lower(q2: f64) -> f64 {
    -q2 * q2 / (1.0 - q2 * q2)
}

pub fn flierl_polvani(q2: f64, alpha: f64) -> Result<FlierlPolvaniParams> {
    if !q2.is_finite() || !alpha.is_finite() {
        return Err(Error::InvalidArgument("non-finite parameters".into()));
    }
    if q2 == 0.0 {
        return Err(Error::CircularInner);
    }
    if !(0.0 < q2 && q2 < 1.0) {
        return Err(Error::InvalidArgument(format!("Q2 must lie in (0, 1), got {q2}")));
    }
    if alpha == 0.0 {
        return Err(Error::NoRotation);
    }
    let lower = admissible_alpha_lower(q2);
    if !(lower < alpha && alpha < 0.0) {
        return Err(Error::Inadmissible { alpha, lower });
    }
    let s = q2 * q2;
    let omega_minus = alpha * (s - 1.0) / (4.0 * s);
    let omega_plus = alpha * (1.0 - s) / 4.0;
    let q1 = q2 * (alpha / s + 1.0 - alpha);
    let (a1, b1) = tangent_ab(q1);
    let lambda = 1.0 - 2.0 * omega_minus;
    Ok(FlierlPolvaniParams {
        q2,
        alpha,
        omega_minus,
        omega_plus,
        q1,
        q1_plus: q2,
        rho: 4.0 * s / ((1.0 + s) * (1.0 + s)),
        m: lambda * b1 + q1 * a1,
        alpha_lower: lower,
    })
}

/// `(A, B) = ((1 + Q²)/(1 − Q²), −2Q/(1 − Q²))`.
fn tangent_ab(q: f64) -> (f64, f64) {
    let d = 1.0 - q * q;
    ((1.0 + q * q) / d, -2.0 * q / d)
}

/// Ellipse confocal with `inner` whose parameter is `Q₁ = q1`.
pub fn confocal_outer(inner: &EllipseSpec, q1: f64) -> Result<EllipseSpec> {
    if inner.is_circle() {
        return Err(Error::CircularInner);
    }
    let q2 = inner.q();
    if !(q1.is_finite() && q1 * q2 > 0.0 && q1.abs() < q2.abs()) {
        return Err(Error::InvalidArgument(format!(
            "Q1 = {q1} must lie strictly between 0 and Q2 = {q2}"
        )));
    }
    let s = (inner.c_squared() / q1).sqrt();
    let outer = EllipseSpec::new(inner.center, 0.5 * s * (1.0 + q1), 0.5 * s * (1.0 - q1), inner.tilt)?;
    let n = 256;
    for k in 0..n {
        let z = inner.point(2.0 * std::f64::consts::PI * k as f64 / n as f64);
        if outer.level(z) >= 1.0 {
            return Err(Error::Containment(format!("inner point {z} is not inside the outer ellipse")));
        }
    }
    Ok(outer)
}

/// `Q₁ = (2Ω − α)·2A/B + (1 − α)Q₂` with `A = ¼(1/a² − 1/b²)` and
/// `B = ½(1/a² + 1/b²)` from the inner ellipse.
pub fn q1_via_dirichlet(inner: &EllipseSpec, alpha: f64, omega: f64) -> Result<f64> {
    if inner.is_circle() {
        return Err(Error::CircularInner);
    }
    let (ia, ib) = (1.0 / (inner.a * inner.a), 1.0 / (inner.b * inner.b));
    let a = 0.25 * (ia - ib);
    let b = 0.5 * (ia + ib);
    Ok((2.0 * omega - alpha) * 2.0 * a / b + (1.0 - alpha) * inner.q())
}

/// Residuals of the two coefficient equations
/// `(1 + Q₂²)(Q₁ + (α − 1)Q₂) = 2(λ + α − 1)Q₂` and
/// `((1 − α) + Q₁Q₂)(Q₁ + (α − 1)Q₂) = (2λ − 1 − (1 − α)²)Q₂`
/// on the `Ω₋` branch.
pub fn ss12_residuals(params: &FlierlPolvaniParams) -> (f64, f64) {
    ss12_residuals_at(params.q2, params.alpha, params.q1, params.omega_minus)
}

pub fn ss12_residuals_at(q2: f64, alpha: f64, q1: f64, omega: f64) -> (f64, f64) {
    let lambda = 1.0 - 2.0 * omega;
    let common = q1 + (alpha - 1.0) * q2;
    let r1 = (1.0 + q2 * q2) * common - 2.0 * (lambda + alpha - 1.0) * q2;
    let r2 = ((1.0 - alpha) + q1 * q2) * common - (2.0 * lambda - 1.0 - (1.0 - alpha).powi(2)) * q2;
    (r1, r2)
}

/// The confocal pair for inner ellipse `inner` and level `α`, sampled with
/// `n` nodes per interface, with its `Ω₋`.
pub fn flierl_polvani_pair(inner: &EllipseSpec, alpha: f64, n: usize) -> Result<(PatchPair, FlierlPolvaniParams)> {
    let params = flierl_polvani(inner.q(), alpha)?;
    let outer = confocal_outer(inner, params.q1)?;
    Ok((PatchPair::ellipses(&outer, inner, alpha, n)?, params))
}
