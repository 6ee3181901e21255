//! Command drivers. Each returns a [`Status`] or a [`CliError`] carrying the
//! exit code; files go to the scenario's output directory.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use log::info;
use serde::Serialize;
use vpatch::cauchy::{cauchy_disc, cauchy_ellipse, CauchyEvaluator, Method, TransformValue};
use vpatch::contours::{area, sample_ellipse};
use vpatch::evolve::{conservation, measure_rotation, run, SimulationState};
use vpatch::field::PatchPair;
use vpatch::rotation::{
    confocal_outer, flierl_polvani, kirchhoff_omega, residual_inner, residual_outer, residual_single,
    ResidualReport, RotationCandidate,
};
use vpatch::solver::{initial_guess, solve_outer_with, OuterAnsatz, SolverOptions};
use vpatch::{Complex64, EllipseSpec, Side};

use crate::output::{num, points, residual_csv, write_json, Viewport};
use crate::scenario::{Format, Geometry, Numerics, Omega, Outputs, Scenario};
use crate::{classify, CliError, Status};

fn prepare_dir(s: &Scenario) -> Result<&Path, CliError> {
    let dir = s.outputs.dir.as_path();
    fs::create_dir_all(dir)?;
    fs::write(dir.join("scenario.json"), s.to_json() + "\n")?;
    Ok(dir)
}

/// Centre of vorticity, or the outer centroid when the total vorticity
/// vanishes.
fn rotation_center(p: &PatchPair) -> Result<Complex64, CliError> {
    p.vorticity_centroid()
        .or_else(|_| vpatch::contours::centroid(p.outer()))
        .map_err(classify)
}

/// The prescribed `Ω`, or the closed-form one for `"auto"`: Kirchhoff's for a
/// lone ellipse, the confocal family's `Ω₋` for an ellipse pair, and `0` for
/// concentric circles (which rotate at any `Ω`).
pub fn resolve_omega(s: &Scenario) -> Result<f64, CliError> {
    if let Omega::Value(w) = s.omega {
        return Ok(w);
    }
    let ellipse = |g: &Option<Geometry>| g.as_ref().map(|g| g.ellipse()).transpose().map(Option::flatten);
    let auto = |m: String| CliError::Input(format!("omega = \"auto\": {m}"));
    let outer = ellipse(&s.outer)?.ok_or_else(|| auto("needs an elliptical outer interface".into()))?;
    match (&s.inner, ellipse(&s.inner)?) {
        (None, _) => kirchhoff_omega(outer.a, outer.b).map_err(classify),
        (Some(_), None) => Err(auto("needs an elliptical inner interface".into())),
        (Some(_), Some(inner)) if inner.is_circle() && outer.is_circle() => Ok(0.0),
        (Some(_), Some(inner)) => flierl_polvani(inner.q(), s.alpha).map(|fp| fp.omega_minus).map_err(|e| auto(e.to_string())),
    }
}

/// Residuals of the scenario's patch under rigid rotation.
pub struct Evaluation {
    pub pair: PatchPair,
    pub omega: f64,
    pub center: Complex64,
    pub report: ResidualReport,
}

impl Evaluation {
    pub fn passes(&self, tol: f64) -> bool {
        self.report.sup_norm < tol
    }
}

pub fn evaluate(s: &Scenario) -> Result<Evaluation, CliError> {
    let pair = s.pair()?;
    let omega = resolve_omega(s)?;
    let center = rotation_center(&pair)?;
    let cand = RotationCandidate::about(omega, center);
    let report = match pair.inner() {
        Some(_) => residual_outer(&pair, &cand).join(&residual_inner(&pair, &cand).map_err(classify)?),
        None => residual_single(pair.outer(), &cand, &pair).map_err(classify)?,
    };
    if !report.sup_norm.is_finite() {
        return Err(CliError::Numerical("non-finite residual".into()));
    }
    Ok(Evaluation { pair, omega, center, report })
}

#[derive(Serialize)]
struct VerifyReport {
    omega: f64,
    omega_source: &'static str,
    center: [f64; 2],
    sup_norm: f64,
    l2_norm: f64,
    tol: f64,
    pass: bool,
}

pub fn verify(s: &Scenario) -> Result<Status, CliError> {
    let ev = evaluate(s)?;
    let dir = prepare_dir(s)?;
    let pass = ev.passes(s.numerics.tol);
    let contours: Vec<_> = std::iter::once(ev.pair.outer()).chain(ev.pair.inner()).collect();
    if s.outputs.wants(Format::Csv) {
        fs::write(dir.join("residuals.csv"), residual_csv(&ev.report, &contours))?;
    }
    if s.outputs.wants(Format::Json) {
        let r = VerifyReport {
            omega: ev.omega,
            omega_source: if matches!(s.omega, Omega::Value(_)) { "given" } else { "auto" },
            center: [ev.center.re, ev.center.im],
            sup_norm: ev.report.sup_norm,
            l2_norm: ev.report.l2_norm,
            tol: s.numerics.tol,
            pass,
        };
        write_json(&dir.join("report.json"), &r)?;
    }
    if s.outputs.wants(Format::Svg) {
        fs::write(dir.join("geometry.svg"), Viewport::around(&contours).svg(&contours, 0.0))?;
    }
    println!(
        "omega = {}  sup residual = {:.3e}  rms = {:.3e}  tol = {:.1e}  {}",
        num(ev.omega),
        ev.report.sup_norm,
        ev.report.l2_norm,
        s.numerics.tol,
        if pass { "PASS" } else { "FAIL" }
    );
    Ok(if pass { Status::Ok } else { Status::Failed })
}

#[derive(Serialize)]
struct Snapshot {
    time: f64,
    outer: Vec<[f64; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    inner: Option<Vec<[f64; 2]>>,
}

#[derive(Serialize)]
struct SimulationSummary {
    saved_states: usize,
    final_time: f64,
    measured_omega: Option<f64>,
    angle_residual: Option<f64>,
    area_drift: f64,
    centroid_drift: f64,
    aborted: Option<String>,
}

pub fn simulate(s: &Scenario) -> Result<Status, CliError> {
    let dt = s.numerics.dt.ok_or_else(|| CliError::Input("numerics.dt is required".into()))?;
    let t_end = s.numerics.t_end.ok_or_else(|| CliError::Input("numerics.t_end is required".into()))?;
    let pair = s.pair()?;
    let traj = run(&SimulationState::new(pair), dt, t_end, s.outputs.stride).map_err(classify)?;
    let states = &traj.states;
    info!("saved {} states", states.len());
    let dir = prepare_dir(s)?;

    // The angle fit needs a non-circular outer interface.
    let rotation = measure_rotation(states).ok();
    let cons = conservation(states).map_err(classify)?;
    if s.outputs.wants(Format::Csv) {
        let mut csv = String::from("time,outer_area,inner_area,centroid_re,centroid_im,angle,measured_omega\n");
        let omega = rotation.as_ref().map_or(f64::NAN, |d| d.measured_omega);
        for (k, st) in states.iter().enumerate() {
            let p = &st.pair;
            let c = p.vorticity_centroid().or_else(|_| p.vorticity_moment()).map_err(classify)?;
            let angle = rotation.as_ref().map_or(f64::NAN, |d| d.angles[k]);
            let _ = writeln!(
                csv,
                "{},{},{},{},{},{},{}",
                num(st.time),
                num(area(p.outer())),
                p.inner().map(|i| num(area(i))).unwrap_or_default(),
                num(c.re),
                num(c.im),
                num(angle),
                num(omega)
            );
        }
        fs::write(dir.join("diagnostics.csv"), csv)?;
    }
    if s.outputs.wants(Format::Json) {
        let snaps: Vec<Snapshot> = states
            .iter()
            .map(|st| Snapshot { time: st.time, outer: points(st.pair.outer()), inner: st.pair.inner().map(points) })
            .collect();
        write_json(&dir.join("snapshots.json"), &snaps)?;
        let summary = SimulationSummary {
            saved_states: states.len(),
            final_time: states.last().map_or(0.0, |st| st.time),
            measured_omega: rotation.as_ref().map(|d| d.measured_omega),
            angle_residual: rotation.as_ref().map(|d| d.angle_residual),
            area_drift: cons.area_drift,
            centroid_drift: cons.centroid_drift,
            aborted: traj.error.as_ref().map(|e| e.to_string()),
        };
        write_json(&dir.join("summary.json"), &summary)?;
    }
    if s.outputs.wants(Format::Svg) {
        let frames = dir.join("frames");
        fs::create_dir_all(&frames)?;
        let first = &states[0].pair;
        let view = Viewport::around(&std::iter::once(first.outer()).chain(first.inner()).collect::<Vec<_>>());
        for (k, st) in states.iter().enumerate() {
            let cs: Vec<_> = std::iter::once(st.pair.outer()).chain(st.pair.inner()).collect();
            fs::write(frames.join(format!("frame_{k:05}.svg")), view.svg(&cs, st.time))?;
        }
    }
    if let Some(e) = traj.error {
        return Err(classify(e));
    }
    match &rotation {
        Some(d) => println!("measured omega = {}  area drift = {:.3e}", num(d.measured_omega), cons.area_drift),
        None => println!("no rotation measured (circular outer)  area drift = {:.3e}", cons.area_drift),
    }
    Ok(Status::Ok)
}

#[derive(Serialize)]
struct SolveReport {
    converged: bool,
    iterations: usize,
    omega: f64,
    r0: f64,
    betas: Vec<f64>,
    axes: [f64; 2],
    sup_norm: f64,
    l2_norm: f64,
    /// `Ω₋` of the confocal family, when `α` is admissible.
    reference_omega: Option<f64>,
    outer: Vec<[f64; 2]>,
}

pub fn solve(s: &Scenario) -> Result<Status, CliError> {
    let inner = match &s.inner {
        None => return Err(CliError::Input("inner geometry is required".into())),
        Some(g) => g.ellipse()?.ok_or_else(|| CliError::Input("solve needs an elliptical inner interface".into()))?,
    };
    let k = s.numerics.k_max;
    let guess = initial_guess(&inner, s.alpha, k).map_err(classify)?;
    let mut init = match &s.outer {
        None => guess.clone(),
        Some(g) => {
            let o = g.ellipse()?.ok_or_else(|| CliError::Input("solve takes an elliptical outer guess".into()))?;
            OuterAnsatz::from_ellipse(&inner, &o, k, guess.omega).map_err(classify)?
        }
    };
    if let Omega::Value(w) = s.omega {
        init.omega = w;
    }
    let opts = SolverOptions { nodes: s.numerics.n, ..SolverOptions::default() };
    let sol = solve_outer_with(&inner, s.alpha, &init, k, &opts).map_err(classify)?;
    let dir = prepare_dir(s)?;
    let outer = sol.ansatz.contour(&inner, opts.nodes).map_err(classify)?;
    let inner_c = sample_ellipse(&inner, opts.nodes).map_err(classify)?;
    let reference = flierl_polvani(inner.q(), s.alpha).ok().map(|fp| fp.omega_minus);
    if s.outputs.wants(Format::Csv) {
        fs::write(dir.join("residuals.csv"), residual_csv(&sol.report, &[&outer, &inner_c]))?;
    }
    if s.outputs.wants(Format::Json) {
        let (a, b) = sol.ansatz.axes();
        let r = SolveReport {
            converged: sol.converged,
            iterations: sol.iterations,
            omega: sol.ansatz.omega,
            r0: sol.ansatz.r0,
            betas: sol.ansatz.betas.clone(),
            axes: [a, b],
            sup_norm: sol.report.sup_norm,
            l2_norm: sol.report.l2_norm,
            reference_omega: reference,
            outer: points(&outer),
        };
        write_json(&dir.join("solution.json"), &r)?;
    }
    if s.outputs.wants(Format::Svg) {
        let cs = [&outer, &inner_c];
        fs::write(dir.join("solution.svg"), Viewport::around(&cs).svg(&cs, 0.0))?;
    }
    println!(
        "converged = {}  iterations = {}  omega = {}  sup residual = {:.3e}",
        sol.converged,
        sol.iterations,
        num(sol.ansatz.omega),
        sol.report.sup_norm
    );
    if let Some(w) = reference {
        println!("confocal-family omega = {}  difference = {:.3e}", num(w), (sol.ansatz.omega - w).abs());
    }
    if !sol.converged {
        return Err(CliError::NotConverged(format!(
            "{} iterations, sup residual {:.3e}",
            sol.iterations, sol.report.sup_norm
        )));
    }
    Ok(Status::Ok)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Shape {
    Ellipse(EllipseSpec),
    Disc { center: Complex64, r: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct TransformRequest {
    pub shape: Shape,
    pub at: Vec<Complex64>,
    /// Sample the boundary and use quadrature instead of the closed form.
    pub quadrature: bool,
    pub n: usize,
}

fn side_label(s: Side) -> &'static str {
    match s {
        Side::Inside => "inside",
        Side::Outside => "outside",
        Side::Boundary => "boundary",
    }
}

/// CSV of `C(χ_D)` at the requested points.
pub fn transform(req: &TransformRequest) -> Result<String, CliError> {
    let spec = match req.shape {
        Shape::Ellipse(e) => e,
        Shape::Disc { center, r } => EllipseSpec::new(center, r, r, 0.0).map_err(classify)?,
    };
    let evaluator = if req.quadrature {
        Some(CauchyEvaluator::new(&sample_ellipse(&spec, req.n).map_err(classify)?))
    } else {
        None
    };
    let mut out = String::from("re_z,im_z,re_value,im_value,side,method\n");
    for &z in &req.at {
        let v: TransformValue = match (&evaluator, req.shape) {
            (Some(ev), _) => ev.transform(z),
            (None, Shape::Disc { center, r }) => cauchy_disc(center, r, z).map_err(classify)?,
            (None, Shape::Ellipse(e)) => cauchy_ellipse(&e, z).map_err(classify)?,
        };
        let method = match v.method {
            Method::ClosedForm => "closed_form",
            Method::Quadrature => "quadrature",
        };
        let _ = writeln!(
            out,
            "{},{},{},{},{},{method}",
            num(z.re),
            num(z.im),
            num(v.value.re),
            num(v.value.im),
            side_label(v.side)
        );
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRequest {
    pub q_points: usize,
    pub alpha_points: usize,
    pub numerics: Numerics,
}

/// Verifies the confocal pair at each point of an admissible `(Q₂, α)` grid:
/// `Q₂` evenly spaced in `[0.2, 0.8]`, `α` at interior fractions of the
/// admissible interval.
pub fn sweep(req: &SweepRequest) -> Result<(Status, String), CliError> {
    if req.q_points < 2 || req.alpha_points < 1 {
        return Err(CliError::Input("sweep needs at least 2 Q2 values and 1 alpha value".into()));
    }
    let mut csv = String::from("q2,alpha,omega,q1,sup_residual,pass\n");
    let mut failures = 0;
    for i in 0..req.q_points {
        let q2 = 0.2 + 0.6 * i as f64 / (req.q_points - 1) as f64;
        let inner = EllipseSpec::centered((1.0 + q2) / (1.0 - q2), 1.0).map_err(classify)?;
        let lower = vpatch::rotation::admissible_alpha_lower(q2);
        for j in 0..req.alpha_points {
            let alpha = lower * (j + 1) as f64 / (req.alpha_points + 1) as f64;
            let fp = flierl_polvani(q2, alpha).map_err(classify)?;
            let outer = confocal_outer(&inner, fp.q1).map_err(classify)?;
            let geometry = |e: &EllipseSpec| Geometry::Ellipse { a: e.a, b: e.b, center: [0.0, 0.0], tilt: e.tilt };
            let s = Scenario {
                inner: Some(geometry(&inner)),
                outer: Some(geometry(&outer)),
                alpha,
                omega: Omega::default(),
                numerics: req.numerics.clone(),
                outputs: Outputs::default(),
            };
            s.validate()?;
            let ev = evaluate(&s)?;
            let pass = ev.passes(req.numerics.tol);
            failures += usize::from(!pass);
            let _ = writeln!(csv, "{},{},{},{},{},{pass}", num(q2), num(alpha), num(ev.omega), num(fp.q1), num(ev.report.sup_norm));
        }
    }
    info!("sweep: {failures} failures");
    Ok((if failures == 0 { Status::Ok } else { Status::Failed }, csv))
}
