//! Stream-function derivative, velocity and stream value of a layered patch
//! `ω = χ_{D₁} + (α − 1)χ_{D₂}`.
//!
//! `∂_zΨ = ¼[C(χ_{D₁}) + (α − 1)C(χ_{D₂})]` and the velocity is
//! `v = 2i·conj(∂_zΨ)`, so that `Im(v z̄′) = 2Re(∂_zΨ z′)` along a curve.

use std::f64::consts::PI;
use std::sync::OnceLock;

use num_complex::Complex64;

use crate::cauchy::{ellipse_exterior, ellipse_gamma_plus, CauchyEvaluator};
use crate::contours::{
    area, centroid, classify, closest_point, sample_ellipse, Contour, EllipseSpec, Side,
};
use crate::error::{Error, Result};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Relative gap (in units of the outer diameter) required between interfaces.
pub const MIN_GAP: f64 = 1e-6;

#[derive(Debug, Clone)]
struct Interface {
    contour: Contour,
    ellipse: Option<EllipseSpec>,
    evaluator: OnceLock<CauchyEvaluator>,
}

impl Interface {
    fn new(contour: Contour, ellipse: Option<EllipseSpec>) -> Self {
        Self { contour, ellipse, evaluator: OnceLock::new() }
    }

    fn evaluator(&self) -> &CauchyEvaluator {
        self.evaluator.get_or_init(|| CauchyEvaluator::new(&self.contour))
    }

    /// `C(χ_D)(z)` by closed form when tagged, by quadrature otherwise.
    fn transform(&self, z: Complex64) -> Complex64 {
        match &self.ellipse {
            Some(e) => ellipse_transform(e, z, e.level(z) <= 1.0),
            None => self.evaluator().transform(z).value,
        }
    }

    /// `C(χ_D)` at the nodes of this interface.
    fn transform_at_own_nodes(&self) -> Vec<Complex64> {
        match &self.ellipse {
            Some(e) => self.contour.samples().iter().map(|&z| ellipse_transform(e, z, true)).collect(),
            None => self.evaluator().node_gamma_minus().iter().map(|g| -g).collect(),
        }
    }

    /// `C(χ_D)` at points known to lie strictly on one side.
    fn transform_on_side(&self, pts: &[Complex64], inside: bool) -> Vec<Complex64> {
        match &self.ellipse {
            Some(e) => pts.iter().map(|&z| ellipse_transform(e, z, inside)).collect(),
            None => {
                let ev = self.evaluator();
                pts.iter().map(|&z| ev.transform_on_side(z, inside)).collect()
            }
        }
    }
}

fn ellipse_transform(e: &EllipseSpec, z: Complex64, inside: bool) -> Complex64 {
    if inside {
        z.conj() - ellipse_gamma_plus(e, z)
    } else {
        ellipse_exterior(e, z)
    }
}

/// Outer domain `D₁`, optional inner domain `D₂ ⊂ D₁` and inner vorticity
/// level `α`. Without an inner domain the patch is a single uniform patch
/// (`α = 1`).
#[derive(Debug, Clone)]
pub struct PatchPair {
    outer: Interface,
    inner: Option<Interface>,
    alpha: f64,
}

/// `C(χ_{D₁})` and `C(χ_{D₂})` at the nodes of both interfaces.
#[derive(Debug, Clone)]
pub struct NodeTransforms {
    pub outer_c1: Vec<Complex64>,
    pub outer_c2: Vec<Complex64>,
    pub inner_c1: Vec<Complex64>,
    pub inner_c2: Vec<Complex64>,
}

impl PatchPair {
    pub fn single(outer: Contour) -> Self {
        Self { outer: Interface::new(outer, None), inner: None, alpha: 1.0 }
    }

    pub fn single_ellipse(spec: &EllipseSpec, n: usize) -> Result<Self> {
        let c = sample_ellipse(spec, n)?;
        Ok(Self { outer: Interface::new(c, Some(*spec)), inner: None, alpha: 1.0 })
    }

    /// Two-interface patch; checks `α ≠ 1` and strict containment.
    pub fn new(outer: Contour, inner: Contour, alpha: f64) -> Result<Self> {
        let p = Self::new_unchecked(outer, inner, alpha);
        p.validate()?;
        Ok(p)
    }

    /// Two sampled ellipses, tagged for the closed-form transforms.
    pub fn ellipses(outer: &EllipseSpec, inner: &EllipseSpec, alpha: f64, n: usize) -> Result<Self> {
        let mut p = Self::new(sample_ellipse(outer, n)?, sample_ellipse(inner, n)?, alpha)?;
        p.outer.ellipse = Some(*outer);
        if let Some(i) = p.inner.as_mut() {
            i.ellipse = Some(*inner);
        }
        Ok(p)
    }

    pub(crate) fn new_unchecked(outer: Contour, inner: Contour, alpha: f64) -> Self {
        Self {
            outer: Interface::new(outer, None),
            inner: Some(Interface::new(inner, None)),
            alpha,
        }
    }

    pub(crate) fn with_contours(&self, outer: Contour, inner: Option<Contour>) -> Self {
        Self {
            outer: Interface::new(outer, None),
            inner: inner.map(|c| Interface::new(c, None)),
            alpha: self.alpha,
        }
    }

    /// Checks the level and containment invariants.
    pub fn validate(&self) -> Result<()> {
        let Some(inner) = &self.inner else {
            return Ok(());
        };
        if !self.alpha.is_finite() || self.alpha == 1.0 {
            return Err(Error::InvalidArgument(format!(
                "inner vorticity level must be finite and differ from 1, got {}",
                self.alpha
            )));
        }
        let outer = &self.outer.contour;
        let inner = &inner.contour;
        let gap = MIN_GAP * outer.diameter();
        let interp = outer.interpolant();
        for (k, &z) in inner.samples().iter().enumerate() {
            if classify(z, outer) != Side::Inside {
                return Err(Error::Containment(format!("inner node {k} is not inside the outer curve")));
            }
            let near = outer.samples().iter().map(|s| (s - z).norm()).fold(f64::INFINITY, f64::min);
            if near <= gap
                || (near < outer.step() * outer.diameter()
                    && closest_point(outer, &interp, z).2 <= gap)
            {
                return Err(Error::Containment(format!("inner node {k} is within {gap:e} of the outer curve")));
            }
        }
        for (k, &z) in outer.samples().iter().enumerate() {
            if classify(z, inner) != Side::Outside {
                return Err(Error::Containment(format!("outer node {k} is not outside the inner curve")));
            }
        }
        Ok(())
    }

    pub fn outer(&self) -> &Contour {
        &self.outer.contour
    }

    pub fn inner(&self) -> Option<&Contour> {
        self.inner.as_ref().map(|i| &i.contour)
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn outer_ellipse(&self) -> Option<&EllipseSpec> {
        self.outer.ellipse.as_ref()
    }

    pub fn inner_ellipse(&self) -> Option<&EllipseSpec> {
        self.inner.as_ref().and_then(|i| i.ellipse.as_ref())
    }

    pub fn has_closed_forms(&self) -> bool {
        self.outer.ellipse.is_some() && self.inner.as_ref().is_none_or(|i| i.ellipse.is_some())
    }

    /// Same geometry with the ellipse tags dropped, forcing quadrature.
    pub fn without_closed_forms(&self) -> Self {
        self.with_contours(self.outer.contour.clone(), self.inner().cloned())
    }

    pub fn translated(&self, shift: Complex64) -> Self {
        let tr = |i: &Interface| {
            Interface::new(i.contour.translated(shift), i.ellipse.map(|e| e.translated(shift)))
        };
        Self { outer: tr(&self.outer), inner: self.inner.as_ref().map(tr), alpha: self.alpha }
    }

    /// Image under `z ↦ k z` for real `k > 0`.
    pub fn scaled(&self, k: f64) -> Self {
        let sc = |i: &Interface| {
            Interface::new(i.contour.scaled(Complex64::new(k, 0.0)), i.ellipse.map(|e| e.scaled(k)))
        };
        Self { outer: sc(&self.outer), inner: self.inner.as_ref().map(sc), alpha: self.alpha }
    }

    /// `∫ ω dA = |D₁| + (α − 1)|D₂|`.
    pub fn total_vorticity(&self) -> f64 {
        area(self.outer()) + self.inner().map_or(0.0, |c| (self.alpha - 1.0) * area(c))
    }

    /// `∫ z ω dA`.
    pub fn vorticity_moment(&self) -> Result<Complex64> {
        let o = self.outer();
        let mut m = centroid(o)? * area(o);
        if let Some(c) = self.inner() {
            m += (self.alpha - 1.0) * centroid(c)? * area(c);
        }
        Ok(m)
    }

    /// Centre of vorticity `∫ z ω dA / ∫ ω dA`.
    pub fn vorticity_centroid(&self) -> Result<Complex64> {
        let g = self.total_vorticity();
        if g.abs() <= 1e-12 * area(self.outer()) {
            return Err(Error::Degenerate("zero total vorticity".into()));
        }
        Ok(self.vorticity_moment()? / g)
    }

    /// `∂_zΨ(z)` anywhere in the plane.
    pub fn dz_stream(&self, z: Complex64) -> Complex64 {
        let mut s = self.outer.transform(z);
        if let Some(inner) = &self.inner {
            s += (self.alpha - 1.0) * inner.transform(z);
        }
        0.25 * s
    }

    /// Complex velocity `u₁ + i u₂ = 2i·conj(∂_zΨ)`.
    pub fn velocity(&self, z: Complex64) -> Complex64 {
        2.0 * I * self.dz_stream(z).conj()
    }

    /// Transforms of both domains at the nodes of both interfaces.
    pub fn node_transforms(&self) -> NodeTransforms {
        let outer_c1 = self.outer.transform_at_own_nodes();
        match &self.inner {
            None => NodeTransforms { outer_c1, outer_c2: vec![], inner_c1: vec![], inner_c2: vec![] },
            Some(inner) => NodeTransforms {
                outer_c1,
                outer_c2: inner.transform_on_side(self.outer.contour.samples(), false),
                inner_c1: self.outer.transform_on_side(inner.contour.samples(), true),
                inner_c2: inner.transform_at_own_nodes(),
            },
        }
    }

    /// `∂_zΨ` at the outer and inner nodes.
    pub fn node_dz_stream(&self) -> (Vec<Complex64>, Vec<Complex64>) {
        let t = self.node_transforms();
        let w = self.alpha - 1.0;
        let outer = if t.outer_c2.is_empty() {
            t.outer_c1.iter().map(|c| 0.25 * c).collect()
        } else {
            t.outer_c1.iter().zip(&t.outer_c2).map(|(a, b)| 0.25 * (a + w * b)).collect()
        };
        let inner = t.inner_c1.iter().zip(&t.inner_c2).map(|(a, b)| 0.25 * (a + w * b)).collect();
        (outer, inner)
    }

    /// Velocity at the outer and inner nodes.
    pub fn node_velocities(&self) -> (Vec<Complex64>, Vec<Complex64>) {
        let (o, i) = self.node_dz_stream();
        let v = |d: Vec<Complex64>| d.into_iter().map(|d| 2.0 * I * d.conj()).collect();
        (v(o), v(i))
    }

    /// `Ψ(z) = (1/2π)∫ ω(ξ) log|z − ξ| dA(ξ)`.
    pub fn stream_value(&self, z: Complex64) -> f64 {
        let mut psi = log_potential(self.outer(), z);
        if let Some(c) = self.inner() {
            psi += (self.alpha - 1.0) * log_potential(c, z);
        }
        psi
    }
}

/// `(1/2π)∫_D log|ξ − z| dA(ξ)` by the divergence theorem applied to
/// `∇_ξ[¼|ξ − z|²(log|ξ − z| − 1)] = ¼(2 log|ξ − z| − 1)(ξ − z)`.
fn log_potential(c: &Contour, z: Complex64) -> f64 {
    let h = c.step();
    let s: f64 = c
        .samples()
        .iter()
        .zip(c.derivs())
        .map(|(xi, d)| {
            let r = xi - z;
            let r2 = r.norm_sqr();
            if r2 == 0.0 {
                return 0.0;
            }
            0.25 * (r2.ln() - 1.0) * (r.conj() * d).im
        })
        .sum();
    s * h / (2.0 * PI)
}
