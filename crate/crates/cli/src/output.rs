//! CSV, JSON and SVG writers. Floats are written with 17 significant digits.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::Serialize;
use vpatch::rotation::ResidualReport;
use vpatch::{Complex64, Contour};

use crate::CliError;

/// `{:.16e}`: 17 significant digits, enough to round-trip any double.
pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn residual_csv(report: &ResidualReport, contours: &[&Contour]) -> String {
    let mut out = String::from("interface,node_index,s,re_z,im_z,residual\n");
    let mut offset = 0;
    for c in contours {
        for k in 0..c.len() {
            let z = c.samples()[k];
            let _ = writeln!(
                out,
                "{},{k},{},{},{},{}",
                report.interfaces[offset + k].label(),
                num(c.parameter(k)),
                num(z.re),
                num(z.im),
                num(report.values[offset + k])
            );
        }
        offset += c.len();
    }
    out
}

pub fn points(c: &Contour) -> Vec<[f64; 2]> {
    c.samples().iter().map(|z| [z.re, z.im]).collect()
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(value).map_err(|e| CliError::Numerical(e.to_string()))?;
    fs::write(path, text + "\n")?;
    Ok(())
}

/// A fixed square viewport around a set of contours, with a 10% margin.
#[derive(Debug, Clone, Copy)]
pub struct Viewport {
    min: Complex64,
    size: f64,
}

impl Viewport {
    pub fn around(contours: &[&Contour]) -> Self {
        let (mut lo, mut hi) = (Complex64::new(f64::INFINITY, f64::INFINITY), -Complex64::new(f64::INFINITY, f64::INFINITY));
        for z in contours.iter().flat_map(|c| c.samples()) {
            lo = Complex64::new(lo.re.min(z.re), lo.im.min(z.im));
            hi = Complex64::new(hi.re.max(z.re), hi.im.max(z.im));
        }
        let size = 1.2 * (hi.re - lo.re).max(hi.im - lo.im);
        let mid = 0.5 * (lo + hi);
        Self { min: mid - Complex64::new(0.5 * size, 0.5 * size), size }
    }

    /// One polyline per interface; the y axis points up.
    pub fn svg(&self, contours: &[&Contour], time: f64) -> String {
        const PX: f64 = 600.0;
        let map = |z: Complex64| ((z.re - self.min.re) / self.size * PX, (1.0 - (z.im - self.min.im) / self.size) * PX);
        let mut out = format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{PX}\" height=\"{PX}\" viewBox=\"0 0 {PX} {PX}\">\n\
             <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n\
             <text x=\"10\" y=\"20\" font-family=\"monospace\" font-size=\"14\">t = {time:.6}</text>\n"
        );
        for (c, colour) in contours.iter().zip(["black", "crimson"]) {
            let pts: Vec<String> = c
                .samples()
                .iter()
                .chain(c.samples().first())
                .map(|&z| {
                    let (x, y) = map(z);
                    format!("{x:.3},{y:.3}")
                })
                .collect();
            let _ = writeln!(
                out,
                "<polyline fill=\"none\" stroke=\"{colour}\" stroke-width=\"1.5\" points=\"{}\"/>",
                pts.join(" ")
            );
        }
        out.push_str("</svg>\n");
        out
    }
}
