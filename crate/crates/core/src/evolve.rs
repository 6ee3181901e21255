//! Time integration of the patch boundaries and rigid-rotation diagnostics.
//!
//! Boundary nodes are advected with the full fluid velocity by classical
//! fourth-order Runge–Kutta. The kinematic condition only constrains the
//! normal velocity, so this only changes the parameterization.

use num_complex::Complex64;

use crate::contours::{area, classify, second_central_moment, Contour, Side};
use crate::error::{Error, Result};
use crate::field::PatchPair;

/// Largest admissible ratio between consecutive node spacings.
pub const MAX_SPACING_RATIO: f64 = 10.0;

#[derive(Debug, Clone)]
pub struct SimulationState {
    pub time: f64,
    pub pair: PatchPair,
}

impl SimulationState {
    pub fn new(pair: PatchPair) -> Self {
        Self { time: 0.0, pair }
    }
}

fn nodes_of(p: &PatchPair) -> Vec<Complex64> {
    let mut z = p.outer().samples().to_vec();
    if let Some(i) = p.inner() {
        z.extend_from_slice(i.samples());
    }
    z
}

fn pair_from_nodes(template: &PatchPair, z: &[Complex64]) -> PatchPair {
    let n = template.outer().len();
    let outer = Contour::from_samples_unchecked(z[..n].to_vec());
    let inner = template.inner().map(|_| Contour::from_samples_unchecked(z[n..].to_vec()));
    template.with_contours(outer, inner)
}

fn velocities(p: &PatchPair) -> Vec<Complex64> {
    let (mut o, i) = p.node_velocities();
    o.extend(i);
    o
}

fn check_state(p: &PatchPair, time: f64) -> Result<()> {
    let abort = |reason: String| Error::IntegrationAborted { time, reason };
    let mut curves = vec![("outer", p.outer())];
    if let Some(i) = p.inner() {
        curves.push(("inner", i));
    }
    for (name, c) in &curves {
        if c.samples().iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(abort(format!("non-finite node on the {name} interface")));
        }
        let ratio = c.spacing_ratio();
        if ratio > MAX_SPACING_RATIO {
            return Err(abort(format!(
                "node spacing ratio {ratio:.2} on the {name} interface exceeds {MAX_SPACING_RATIO}"
            )));
        }
        if c.polygon_self_intersects() {
            return Err(abort(format!("the {name} interface self-intersects")));
        }
        if area(c) <= 0.0 {
            return Err(abort(format!("the {name} interface lost its orientation")));
        }
    }
    if let Some(inner) = p.inner() {
        if let Some(k) = inner.samples().iter().position(|&z| classify(z, p.outer()) != Side::Inside) {
            return Err(abort(format!("inner node {k} left the outer domain")));
        }
        if let Some(k) = p.outer().samples().iter().position(|&z| classify(z, inner) != Side::Outside) {
            return Err(abort(format!("outer node {k} entered the inner domain")));
        }
    }
    Ok(())
}

/// One classical Runge–Kutta step of size `dt`.
pub fn step(s: &SimulationState, dt: f64) -> Result<SimulationState> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::InvalidArgument(format!("time step must be positive, got {dt}")));
    }
    let z0 = nodes_of(&s.pair);
    let shifted = |k: &[Complex64], f: f64| -> Vec<Complex64> {
        z0.iter().zip(k).map(|(z, v)| z + v * (f * dt)).collect()
    };
    let k1 = velocities(&s.pair);
    let k2 = velocities(&pair_from_nodes(&s.pair, &shifted(&k1, 0.5)));
    let k3 = velocities(&pair_from_nodes(&s.pair, &shifted(&k2, 0.5)));
    let k4 = velocities(&pair_from_nodes(&s.pair, &shifted(&k3, 1.0)));
    let z1: Vec<Complex64> = (0..z0.len())
        .map(|j| z0[j] + (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]) * (dt / 6.0))
        .collect();
    let pair = pair_from_nodes(&s.pair, &z1);
    let time = s.time + dt;
    check_state(&pair, time)?;
    Ok(SimulationState { time, pair })
}

/// Saved states of a run, and the error that stopped it early, if any.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub states: Vec<SimulationState>,
    pub error: Option<Error>,
}

/// Integrates to `t_end` with steps of `dt`, saving every `stride` steps
/// (and always the initial and final states). `t_end` must be an integer
/// multiple of `dt` up to rounding.
pub fn run(initial: &SimulationState, dt: f64, t_end: f64, stride: usize) -> Result<Trajectory> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::InvalidArgument(format!("time step must be positive, got {dt}")));
    }
    if !(t_end >= 0.0 && t_end.is_finite()) {
        return Err(Error::InvalidArgument(format!("end time must be nonnegative, got {t_end}")));
    }
    let steps = (t_end / dt).round();
    if (steps * dt - t_end).abs() > 1e-9 * t_end.max(dt) {
        return Err(Error::InvalidArgument(format!("dt = {dt} does not divide t_end = {t_end}")));
    }
    let steps = steps as usize;
    let h = if steps == 0 { dt } else { t_end / steps as f64 };
    let stride = stride.max(1);
    let mut states = vec![initial.clone()];
    let mut cur = initial.clone();
    for k in 1..=steps {
        match step(&cur, h) {
            Ok(mut next) => {
                next.time = initial.time + k as f64 * h;
                cur = next;
                if k % stride == 0 || k == steps {
                    states.push(cur.clone());
                }
            }
            Err(e) => {
                if states.last().map(|s| s.time) != Some(cur.time) {
                    states.push(cur);
                }
                return Ok(Trajectory { states, error: Some(e) });
            }
        }
    }
    Ok(Trajectory { states, error: None })
}

/// Like [`run`], saving every step and failing on an aborted integration.
pub fn simulate(initial: &SimulationState, dt: f64, t_end: f64) -> Result<Vec<SimulationState>> {
    let t = run(initial, dt, t_end, 1)?;
    match t.error {
        Some(e) => Err(e),
        None => Ok(t.states),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Diagnostics {
    pub times: Vec<f64>,
    /// Per state: outer area, then inner area when present.
    pub areas: Vec<Vec<f64>>,
    /// Per state: centre of vorticity (first vorticity moment when the total
    /// vorticity vanishes).
    pub centroids: Vec<Complex64>,
    /// Unwrapped principal-axis angle of the outer interface.
    pub angles: Vec<f64>,
    /// Least-squares slope of `angles` against `times`.
    pub measured_omega: f64,
    /// Intercept of the angle fit.
    pub fitted_angle: f64,
    /// Largest deviation of `angles` from the fitted line.
    pub angle_residual: f64,
}

fn vorticity_center(p: &PatchPair) -> Result<Complex64> {
    p.vorticity_centroid().or_else(|_| p.vorticity_moment())
}

/// Fits a uniform rotation to the principal axis of the outer interface.
pub fn measure_rotation(states: &[SimulationState]) -> Result<Diagnostics> {
    if states.len() < 3 {
        return Err(Error::InvalidArgument(format!("need at least 3 states, got {}", states.len())));
    }
    let mut times = Vec::with_capacity(states.len());
    let mut areas = Vec::with_capacity(states.len());
    let mut centroids = Vec::with_capacity(states.len());
    let mut angles: Vec<f64> = Vec::with_capacity(states.len());
    for s in states {
        let o = s.pair.outer();
        let a = area(o);
        let m = second_central_moment(o)?;
        if m.norm() <= 1e-10 * a * a {
            return Err(Error::Degenerate("outer interface is circular; rotation angle undefined".into()));
        }
        let mut theta = 0.5 * m.arg();
        if let Some(&prev) = angles.last() {
            theta += std::f64::consts::PI * ((prev - theta) / std::f64::consts::PI).round();
        }
        angles.push(theta);
        times.push(s.time);
        let mut row = vec![a];
        if let Some(i) = s.pair.inner() {
            row.push(area(i));
        }
        areas.push(row);
        centroids.push(vorticity_center(&s.pair)?);
    }
    let n = times.len() as f64;
    let tm = times.iter().sum::<f64>() / n;
    let am = angles.iter().sum::<f64>() / n;
    let sxy: f64 = times.iter().zip(&angles).map(|(t, a)| (t - tm) * (a - am)).sum();
    let sxx: f64 = times.iter().map(|t| (t - tm) * (t - tm)).sum();
    let slope = sxy / sxx;
    let intercept = am - slope * tm;
    let angle_residual = times
        .iter()
        .zip(&angles)
        .map(|(t, a)| (a - intercept - slope * t).abs())
        .fold(0.0, f64::max);
    Ok(Diagnostics {
        times,
        areas,
        centroids,
        angles,
        measured_omega: slope,
        fitted_angle: intercept,
        angle_residual,
    })
}

/// Largest drifts of the conserved quantities over a trajectory.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Conservation {
    /// `max_t |A_j(t) − A_j(0)| / A_j(0)` over interfaces.
    pub area_drift: f64,
    /// `max_t |X(t) − X(0)|` divided by the initial outer diameter.
    pub centroid_drift: f64,
}

pub fn conservation(states: &[SimulationState]) -> Result<Conservation> {
    let first = states
        .first()
        .ok_or_else(|| Error::InvalidArgument("empty trajectory".into()))?;
    let a0: Vec<f64> = std::iter::once(area(first.pair.outer()))
        .chain(first.pair.inner().map(area))
        .collect();
    let x0 = vorticity_center(&first.pair)?;
    let diam = first.pair.outer().diameter();
    let mut out = Conservation { area_drift: 0.0, centroid_drift: 0.0 };
    for s in states {
        let a: Vec<f64> =
            std::iter::once(area(s.pair.outer())).chain(s.pair.inner().map(area)).collect();
        for (x, y) in a.iter().zip(&a0) {
            out.area_drift = out.area_drift.max((x - y).abs() / y);
        }
        out.centroid_drift = out.centroid_drift.max((vorticity_center(&s.pair)? - x0).norm() / diam);
    }
    Ok(out)
}
