//! Gauss–Newton solver for the outer interface of a rotating pair whose
//! inner interface is a given ellipse.
//!
//! The outer curve is sought in polar form about the inner centre, in the
//! inner ellipse's frame:
//! `z(φ) = z₀ + e^{iθ} r(φ) e^{iφ}`, `r(φ) = r₀(1 + Σ_{k=1}^{K} β_k cos 2kφ)`,
//! which is symmetric under `φ ↦ −φ` and `φ ↦ φ + π`. The unknowns are
//! `β₁..β_K`, `r₀` and `Ω`; the equations are both interface residuals at
//! `N` collocation nodes each, plus the mean of the inner residual.

use std::f64::consts::PI;

use log::debug;
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::cauchy::{barycentric_interior, ellipse_exterior_local, node_integrals, SqrtExt};
use crate::contours::{Contour, EllipseSpec};
use crate::error::{Error, Result};
use crate::rotation::{InterfaceKind, Normalization, ResidualReport};
use crate::scalar::{CScalar, Jet};

/// Collocation nodes per interface.
pub const DEFAULT_NODES: usize = 256;

/// Outer-curve unknowns: polar mean radius, cosine coefficients of the
/// relative radius perturbation, and the angular velocity.
#[derive(Debug, Clone, PartialEq)]
pub struct OuterAnsatz {
    pub r0: f64,
    pub betas: Vec<f64>,
    pub omega: f64,
}

impl OuterAnsatz {
    /// Polar radius `r(φ)` in the inner frame.
    pub fn radius(&self, phi: f64) -> f64 {
        self.r0
            * (1.0
                + self
                    .betas
                    .iter()
                    .enumerate()
                    .map(|(j, b)| b * (2.0 * (j + 1) as f64 * phi).cos())
                    .sum::<f64>())
    }

    /// Projection of an ellipse centred at the inner centre onto the ansatz,
    /// from the discrete Fourier transform of its polar radius.
    pub fn from_ellipse(inner: &EllipseSpec, outer: &EllipseSpec, k_max: usize, omega: f64) -> Result<Self> {
        if (outer.center - inner.center).norm() > 1e-12 * (1.0 + inner.center.norm()) {
            return Err(Error::InvalidArgument("outer ellipse must share the inner centre".into()));
        }
        let dtilt = outer.tilt - inner.tilt;
        Ok(Self::from_radius(|phi| {
            let t = phi - dtilt;
            1.0 / ((t.cos() / outer.a).powi(2) + (t.sin() / outer.b).powi(2)).sqrt()
        }, k_max, omega))
    }

    /// Projection of a polar radius function onto the ansatz.
    pub fn from_radius(r: impl Fn(f64) -> f64, k_max: usize, omega: f64) -> Self {
        let m = (8 * k_max).max(64).next_power_of_two();
        let mut buf: Vec<Complex64> =
            (0..m).map(|j| Complex64::new(r(2.0 * PI * j as f64 / m as f64), 0.0)).collect();
        FftPlanner::<f64>::new().plan_fft_forward(m).process(&mut buf);
        let r0 = buf[0].re / m as f64;
        let betas = (1..=k_max).map(|k| 2.0 * buf[2 * k].re / m as f64 / r0).collect();
        Self { r0, betas, omega }
    }

    /// The outer curve sampled at `n` nodes.
    pub fn contour(&self, inner: &EllipseSpec, n: usize) -> Result<Contour> {
        let (z, dz) = outer_nodes::<Complex64>(&self.to_vector_c(), self.betas.len(), inner.tilt, n);
        Contour::new(z.into_iter().map(|z| z + inner.center).collect(), dz)
    }

    /// Semi-axes `(r(0), r(π/2))` along the inner frame axes.
    pub fn axes(&self) -> (f64, f64) {
        (self.radius(0.0), self.radius(0.5 * PI))
    }

    fn to_vector(&self) -> Vec<f64> {
        let mut x = self.betas.clone();
        x.push(self.r0);
        x.push(self.omega);
        x
    }

    fn to_vector_c(&self) -> Vec<Complex64> {
        self.to_vector().into_iter().map(|v| Complex64::new(v, 0.0)).collect()
    }

    fn from_vector(x: &[f64]) -> Self {
        let k = x.len() - 2;
        Self { betas: x[..k].to_vec(), r0: x[k], omega: x[k + 1] }
    }

    fn resized(&self, k_max: usize) -> Self {
        let mut betas = self.betas.clone();
        betas.resize(k_max, 0.0);
        Self { betas, ..self.clone() }
    }
}

/// Nodes and derivatives of the outer curve (centred at the origin) for the
/// unknown vector `x = [β₁..β_K, r₀, Ω]`.
fn outer_nodes<T: CScalar>(x: &[T], k_max: usize, tilt: f64, n: usize) -> (Vec<T>, Vec<T>) {
    let r0 = x[k_max];
    let rot = Complex64::from_polar(1.0, tilt);
    let mut z = Vec::with_capacity(n);
    let mut dz = Vec::with_capacity(n);
    for k in 0..n {
        let phi = 2.0 * PI * k as f64 / n as f64;
        let mut rel = T::real(1.0);
        let mut drel = T::real(0.0);
        for (j, b) in x[..k_max].iter().enumerate() {
            let m = 2.0 * (j + 1) as f64;
            rel = rel + b.scale((m * phi).cos());
            drel = drel + b.scale(-m * (m * phi).sin());
        }
        let r = r0 * rel;
        let dr = r0 * drel;
        let e = T::constant(rot * Complex64::from_polar(1.0, phi));
        z.push(r * e);
        dz.push((dr + r * T::constant(Complex64::new(0.0, 1.0))) * e);
    }
    (z, dz)
}

/// Fixed data of one solve.
#[derive(Debug, Clone)]
struct Problem {
    inner: EllipseSpec,
    alpha: f64,
    k_max: usize,
    n: usize,
    /// Inner nodes and derivatives relative to the centre.
    zi: Vec<Complex64>,
    dzi: Vec<Complex64>,
    /// `γ₂⁺` at the inner nodes (relative to the centre).
    g2p: Vec<Complex64>,
}

impl Problem {
    fn new(inner: &EllipseSpec, alpha: f64, k_max: usize, n: usize) -> Result<Self> {
        let local = EllipseSpec { center: Complex64::new(0.0, 0.0), ..*inner };
        let h = 2.0 * PI / n as f64;
        let zi: Vec<Complex64> = (0..n).map(|k| local.point(h * k as f64)).collect();
        let dzi = (0..n).map(|k| local.derivative(h * k as f64)).collect();
        let r = local.rotation().conj();
        let g2p = zi.iter().map(|z| r * r * local.q() * z).collect();
        Ok(Self { inner: local, alpha, k_max, n, zi, dzi, g2p })
    }

    /// Outer residuals, inner residuals, then the inner mean.
    fn residual<T: CScalar + SqrtExt>(&self, x: &[T]) -> Vec<T> {
        let k_max = self.k_max;
        let omega = x[k_max + 1];
        let lambda = T::real(1.0) - omega.scale(2.0);
        let one_minus_alpha = 1.0 - self.alpha;
        let (z, dz) = outer_nodes(x, k_max, self.inner.tilt, self.n);
        let g1p: Vec<T> =
            node_integrals(&z, &dz).into_iter().zip(&z).map(|(i, z)| i + z.conj()).collect();
        let rot = self.inner.rotation();
        let c = self.inner.focal_half_length();
        let mut out = Vec::with_capacity(2 * self.n + 1);
        for k in 0..self.n {
            let w = z[k] * T::constant(rot.conj());
            let g2m = -(ellipse_exterior_local(self.inner.a, self.inner.b, c, w) * T::constant(rot.conj()));
            let e = lambda * z[k].conj() + g2m.scale(one_minus_alpha) - g1p[k];
            out.push((e * dz[k]).re() / dz[k].abs());
        }
        let coeff = T::real(self.alpha) - omega.scale(2.0);
        let mut mean = T::real(0.0);
        for k in 0..self.n {
            let zk = T::constant(self.zi[k]);
            let g1 = barycentric_interior(&z, &dz, &g1p, zk);
            let e = coeff * zk.conj() + T::constant(self.g2p[k] * one_minus_alpha) - g1;
            let v = (e * T::constant(self.dzi[k])).re().scale(1.0 / self.dzi[k].norm());
            mean = mean + v;
            out.push(v);
        }
        out.push(mean.scale(1.0 / self.n as f64));
        out
    }

    fn residual_f64(&self, x: &[f64]) -> Vec<f64> {
        let xc: Vec<Complex64> = x.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        self.residual(&xc).into_iter().map(|v| v.re).collect()
    }

    fn jacobian(&self, x: &[f64]) -> DMatrix<f64> {
        let m = 2 * self.n + 1;
        let mut j = DMatrix::zeros(m, x.len());
        for col in 0..x.len() {
            let xj: Vec<Jet> = x
                .iter()
                .enumerate()
                .map(|(i, &v)| Jet::new(Complex64::new(v, 0.0), Complex64::new(if i == col { 1.0 } else { 0.0 }, 0.0)))
                .collect();
            for (row, v) in self.residual(&xj).into_iter().enumerate() {
                j[(row, col)] = v.d.re;
            }
        }
        j
    }

    /// Outer curve is a positive polar graph enclosing the inner ellipse.
    fn admissible(&self, x: &[f64]) -> bool {
        let a = OuterAnsatz::from_vector(x);
        let (ia, ib) = (self.inner.a, self.inner.b);
        let m = 4 * self.n;
        (0..m).all(|k| {
            let phi = 2.0 * PI * k as f64 / m as f64;
            let inner_r = 1.0 / ((phi.cos() / ia).powi(2) + (phi.sin() / ib).powi(2)).sqrt();
            let r = a.radius(phi);
            r.is_finite() && r > inner_r * (1.0 + 1e-6)
        })
    }

    fn report(&self, x: &[f64]) -> ResidualReport {
        let r = self.residual_f64(x);
        let n = self.n;
        let outer = ResidualReport::new(r[..n].to_vec(), InterfaceKind::Outer, Normalization::PerArcLength);
        let inner = ResidualReport::new(r[n..2 * n].to_vec(), InterfaceKind::Inner, Normalization::PerArcLength);
        outer.join(&inner)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    pub nodes: usize,
    pub max_iterations: usize,
    pub residual_tol: f64,
    pub step_tol: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self { nodes: DEFAULT_NODES, max_iterations: 40, residual_tol: 1e-10, step_tol: 1e-12 }
    }
}

#[derive(Debug, Clone)]
pub struct Solution {
    pub ansatz: OuterAnsatz,
    pub report: ResidualReport,
    pub converged: bool,
    pub iterations: usize,
    /// Levenberg parameter in effect at the last accepted step.
    pub damping: f64,
    /// Largest component of the last Gauss–Newton step.
    pub last_step: f64,
}

/// Solves for the outer interface with the default options.
pub fn solve_outer(inner: &EllipseSpec, alpha: f64, init: &OuterAnsatz, k_max: usize) -> Result<Solution> {
    solve_outer_with(inner, alpha, init, k_max, &SolverOptions::default())
}

pub fn solve_outer_with(
    inner: &EllipseSpec,
    alpha: f64,
    init: &OuterAnsatz,
    k_max: usize,
    opts: &SolverOptions,
) -> Result<Solution> {
    if !alpha.is_finite() {
        return Err(Error::InvalidArgument("alpha must be finite".into()));
    }
    if k_max == 0 || 4 * k_max > opts.nodes {
        return Err(Error::InvalidArgument(format!(
            "k_max = {k_max} must lie in 1..={}",
            opts.nodes / 4
        )));
    }
    let prob = Problem::new(inner, alpha, k_max, opts.nodes)?;
    let mut x = init.resized(k_max).to_vector();
    if !prob.admissible(&x) {
        return Err(Error::Containment("initial outer curve does not enclose the inner ellipse".into()));
    }
    let norm2 = |r: &[f64]| r.iter().map(|v| v * v).sum::<f64>();
    let sup = |r: &[f64]| r.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let mut r = prob.residual_f64(&x);
    let mut mu = 0.0f64;
    let mut last_step = f64::INFINITY;
    let mut iterations = 0;
    let mut converged = false;
    while iterations < opts.max_iterations {
        iterations += 1;
        let jac = prob.jacobian(&x);
        let svd = jac.svd(true, true);
        let (u, vt, sv) = (svd.u.unwrap(), svd.v_t.unwrap(), svd.singular_values);
        let utr = u.transpose() * DVector::from_column_slice(&r);
        let smax = sv.max();
        let step_for = |mu: f64| -> DVector<f64> {
            let mut c = DVector::zeros(sv.len());
            for i in 0..sv.len() {
                let s = sv[i];
                if s > 1e-14 * smax {
                    c[i] = -utr[i] * s / (s * s + mu);
                }
            }
            vt.transpose() * c
        };
        let base = norm2(&r);
        let mut accepted = None;
        for _ in 0..30 {
            let mut delta = step_for(mu);
            let mut trial: Vec<f64> = x.iter().zip(delta.iter()).map(|(a, b)| a + b).collect();
            let mut halvings: u32 = 0;
            while !prob.admissible(&trial) && halvings < 40 {
                delta /= 2.0;
                trial = x.iter().zip(delta.iter()).map(|(a, b)| a + b).collect();
                halvings += 1;
            }
            if halvings == 40 {
                break;
            }
            let mut rt = prob.residual_f64(&trial);
            let mut dmax = delta.amax();
            if norm2(&rt) <= base || dmax < opts.step_tol {
                // At a root where the Jacobian loses rank (the dilation mode
                // of the confocal solution) Gauss–Newton only halves the
                // error each step; a doubled step removes that component.
                let doubled: Vec<f64> = x.iter().zip(delta.iter()).map(|(a, b)| a + 2.0 * b).collect();
                if mu == 0.0 && prob.admissible(&doubled) {
                    let rd = prob.residual_f64(&doubled);
                    if norm2(&rd) < norm2(&rt) {
                        trial = doubled;
                        rt = rd;
                        dmax *= 2.0;
                    }
                }
                accepted = Some((trial, rt, dmax));
                mu = if mu > 0.0 { mu / 10.0 } else { 0.0 };
                if mu < 1e-12 * smax * smax {
                    mu = 0.0;
                }
                break;
            }
            mu = (mu * 10.0).max(1e-6 * smax * smax);
        }
        let Some((xn, rn, dmax)) = accepted else {
            debug!("no decreasing step at iteration {iterations}");
            break;
        };
        x = xn;
        r = rn;
        last_step = dmax;
        debug!("iteration {iterations}: sup residual {:e}, step {:e}, mu {:e}", sup(&r), dmax, mu);
        if sup(&r) < opts.residual_tol && last_step < opts.step_tol {
            converged = true;
            break;
        }
    }
    Ok(Solution {
        ansatz: OuterAnsatz::from_vector(&x),
        report: prob.report(&x),
        converged,
        iterations,
        damping: mu,
        last_step,
    })
}

/// Residual vector and forward-mode Jacobian at `x` (for verification).
pub fn residual_and_jacobian(
    inner: &EllipseSpec,
    alpha: f64,
    x: &OuterAnsatz,
    nodes: usize,
) -> Result<(Vec<f64>, DMatrix<f64>)> {
    let prob = Problem::new(inner, alpha, x.betas.len(), nodes)?;
    let v = x.to_vector();
    Ok((prob.residual_f64(&v), prob.jacobian(&v)))
}

/// Residual vector at `x`.
pub fn residual_vector(inner: &EllipseSpec, alpha: f64, x: &OuterAnsatz, nodes: usize) -> Result<Vec<f64>> {
    let prob = Problem::new(inner, alpha, x.betas.len(), nodes)?;
    Ok(prob.residual_f64(&x.to_vector()))
}

/// Result of a warm-started sweep in `α`.
#[derive(Debug, Clone)]
pub struct Continuation {
    pub alphas: Vec<f64>,
    pub solutions: Vec<Solution>,
    /// `α` at which the sweep stopped, with the reason.
    pub aborted: Option<(f64, String)>,
}

/// Starting guess: the outer ellipse predicted by the confocal family,
/// dilated by 5%, or a 20% dilation of the inner ellipse when `α` lies
/// outside the admissible interval.
pub fn initial_guess(inner: &EllipseSpec, alpha: f64, k_max: usize) -> Result<OuterAnsatz> {
    match crate::rotation::flierl_polvani(inner.q(), alpha) {
        Ok(fp) => {
            let outer = crate::rotation::confocal_outer(inner, fp.q1)?;
            let dilated = EllipseSpec { a: outer.a * WARM_START_DILATION, b: outer.b * WARM_START_DILATION, ..outer };
            OuterAnsatz::from_ellipse(inner, &dilated, k_max, fp.omega_minus)
        }
        Err(_) => {
            let dilated = EllipseSpec { a: inner.a * 1.2, b: inner.b * 1.2, ..*inner };
            OuterAnsatz::from_ellipse(inner, &dilated, k_max, alpha / 4.0)
        }
    }
}

/// Radial dilation applied to continuation warm starts.
pub const WARM_START_DILATION: f64 = 1.05;

/// Continuation halves a failed step at most this many times.
pub const MAX_STEP_HALVINGS: usize = 4;

/// Solves along `alphas`, each solve warm-started from a secant prediction
/// through the previous two solutions. A failed step is retried through
/// intermediate values of `α`; a step that still fails ends the sweep.
pub fn continuation(inner: &EllipseSpec, alphas: &[f64]) -> Result<Continuation> {
    continuation_with(inner, alphas, 40, &SolverOptions::default())
}

fn predict(history: &[(f64, OuterAnsatz)], alpha: f64, prob: &Problem) -> OuterAnsatz {
    match history {
        [] => unreachable!("prediction needs a previous solution"),
        [(_, prev)] => prev.clone(),
        [.., (a0, xa), (a1, xb)] => {
            let t = (alpha - a1) / (a1 - a0);
            let (va, vb) = (xa.to_vector(), xb.to_vector());
            let x: Vec<f64> = va.iter().zip(&vb).map(|(p, q)| q + t * (q - p)).collect();
            if prob.admissible(&x) {
                OuterAnsatz::from_vector(&x)
            } else {
                xb.clone()
            }
        }
    }
}

pub fn continuation_with(
    inner: &EllipseSpec,
    alphas: &[f64],
    k_max: usize,
    opts: &SolverOptions,
) -> Result<Continuation> {
    let mut out = Continuation { alphas: Vec::new(), solutions: Vec::new(), aborted: None };
    // converged points, including intermediate ones, for the predictor
    let mut history: Vec<(f64, OuterAnsatz)> = Vec::new();
    'targets: for &target in alphas {
        let mut halvings: u32 = 0;
        loop {
            let from = history.last().map(|(a, _)| *a);
            let alpha = match from {
                Some(a) if halvings > 0 => a + (target - a) / (1u32 << halvings) as f64,
                _ => target,
            };
            let init = if history.is_empty() {
                initial_guess(inner, alpha, k_max)?
            } else {
                // The Jacobian is singular in r₀ at every solution, so start
                // from the dilated side as the cold guess does.
                let mut p = predict(&history, alpha, &Problem::new(inner, alpha, k_max, opts.nodes)?);
                p.r0 *= WARM_START_DILATION;
                p
            };
            let failure = match solve_outer_with(inner, alpha, &init, k_max, opts) {
                Ok(sol) if sol.converged => {
                    history.push((alpha, sol.ansatz.clone()));
                    if alpha == target {
                        out.alphas.push(alpha);
                        out.solutions.push(sol);
                        continue 'targets;
                    }
                    halvings = halvings.saturating_sub(1);
                    continue;
                }
                Ok(sol) => format!(
                    "no convergence after {} iterations (sup residual {:e})",
                    sol.iterations, sol.report.sup_norm
                ),
                Err(e) => e.to_string(),
            };
            if from.is_none() || halvings as usize == MAX_STEP_HALVINGS {
                out.aborted = Some((target, failure));
                break 'targets;
            }
            debug!("continuation step to alpha = {alpha} failed ({failure}); halving");
            halvings += 1;
        }
    }
    Ok(out)
}
