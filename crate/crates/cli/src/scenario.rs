//! Scenario documents: parsing, defaults and validation.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use vpatch::contours::{sample_ellipse, MIN_NODES};
use vpatch::field::PatchPair;
use vpatch::{Complex64, Contour, EllipseSpec};

use crate::CliError;

/// Geometry of one interface.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
pub enum Geometry {
    Ellipse {
        a: f64,
        b: f64,
        #[serde(default)]
        center: [f64; 2],
        #[serde(default)]
        tilt: f64,
    },
    Samples { points: Vec<[f64; 2]> },
}

impl Geometry {
    pub fn ellipse(&self) -> Result<Option<EllipseSpec>, CliError> {
        match *self {
            Geometry::Ellipse { a, b, center, tilt } => EllipseSpec::new(Complex64::new(center[0], center[1]), a, b, tilt)
                .map(Some)
                .map_err(|e| CliError::Input(e.to_string())),
            Geometry::Samples { .. } => Ok(None),
        }
    }

    pub fn contour(&self, n: usize) -> Result<Contour, CliError> {
        let c = match self {
            Geometry::Ellipse { .. } => sample_ellipse(&self.ellipse()?.unwrap(), n),
            Geometry::Samples { points } => {
                Contour::from_samples(points.iter().map(|p| Complex64::new(p[0], p[1])).collect())
            }
        };
        c.map_err(|e| CliError::Input(e.to_string()))
    }
}

/// A prescribed angular velocity, or `"auto"` for the known closed forms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Omega {
    Value(f64),
    Keyword(AutoKeyword),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AutoKeyword {
    Auto,
}

impl Default for Omega {
    fn default() -> Self {
        Omega::Keyword(AutoKeyword::Auto)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Numerics {
    #[serde(default = "default_n")]
    pub n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_end: Option<f64>,
    #[serde(default = "default_tol")]
    pub tol: f64,
    /// Number of Fourier modes in the solver's outer ansatz.
    #[serde(default = "default_k_max")]
    pub k_max: usize,
    /// Use boundary quadrature even where ellipse closed forms exist.
    #[serde(default)]
    pub quadrature: bool,
}

fn default_n() -> usize {
    128
}

fn default_tol() -> f64 {
    1e-9
}

fn default_k_max() -> usize {
    24
}

impl Default for Numerics {
    fn default() -> Self {
        Self { n: default_n(), dt: None, t_end: None, tol: default_tol(), k_max: default_k_max(), quadrature: false }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Svg,
    Json,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Outputs {
    #[serde(default = "default_dir")]
    pub dir: PathBuf,
    #[serde(default = "default_formats")]
    pub formats: Vec<Format>,
    #[serde(default = "default_stride")]
    pub stride: usize,
}

fn default_dir() -> PathBuf {
    PathBuf::from("out")
}

fn default_formats() -> Vec<Format> {
    vec![Format::Csv, Format::Json]
}

fn default_stride() -> usize {
    1
}

impl Default for Outputs {
    fn default() -> Self {
        Self { dir: default_dir(), formats: default_formats(), stride: default_stride() }
    }
}

impl Outputs {
    pub fn wants(&self, f: Format) -> bool {
        self.formats.contains(&f)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub inner: Option<Geometry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub outer: Option<Geometry>,
    #[serde(default)]
    pub alpha: f64,
    #[serde(default)]
    pub omega: Omega,
    #[serde(default)]
    pub numerics: Numerics,
    #[serde(default)]
    pub outputs: Outputs,
}

impl Scenario {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let value: serde_json::Value =
            serde_json::from_str(text).map_err(|e| CliError::Input(format!("scenario: {e}")))?;
        // serde would otherwise accept a positional array for the struct
        if !value.is_object() {
            return Err(CliError::Input("scenario must be a JSON object".into()));
        }
        let s: Scenario = serde_json::from_value(value).map_err(|e| CliError::Input(format!("scenario: {e}")))?;
        s.validate()?;
        Ok(s)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    /// The effective scenario with every default filled in. Doubles are
    /// written in shortest round-trip form, so re-reading is bit exact.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scenario serializes")
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |m: String| Err(CliError::Input(m));
        for (name, g) in [("inner", &self.inner), ("outer", &self.outer)] {
            match g {
                Some(Geometry::Ellipse { a, b, center, tilt }) => {
                    if ![*a, *b, center[0], center[1], *tilt].iter().all(|v| v.is_finite()) || *a <= 0.0 || *b <= 0.0 {
                        return bad(format!("{name}: ellipse needs finite positive semi-axes"));
                    }
                }
                Some(Geometry::Samples { points }) => {
                    if points.len() < MIN_NODES {
                        return bad(format!("{name}: need at least {MIN_NODES} points, got {}", points.len()));
                    }
                    if !points.iter().flatten().all(|v| v.is_finite()) {
                        return bad(format!("{name}: non-finite sample"));
                    }
                }
                None => {}
            }
        }
        if !self.alpha.is_finite() {
            return bad("alpha must be finite".into());
        }
        if let Omega::Value(w) = self.omega {
            if !w.is_finite() {
                return bad("omega must be finite".into());
            }
        }
        let n = &self.numerics;
        if n.n < MIN_NODES {
            return bad(format!("numerics.n must be at least {MIN_NODES}, got {}", n.n));
        }
        if let Some(dt) = n.dt {
            if !(dt > 0.0 && dt.is_finite()) {
                return bad(format!("numerics.dt must be positive, got {dt}"));
            }
        }
        if let Some(t) = n.t_end {
            if !(t >= 0.0 && t.is_finite()) {
                return bad(format!("numerics.t_end must be nonnegative, got {t}"));
            }
        }
        if !(n.tol > 0.0 && n.tol.is_finite()) {
            return bad(format!("numerics.tol must be positive, got {}", n.tol));
        }
        if n.k_max == 0 {
            return bad("numerics.k_max must be positive".into());
        }
        if self.outputs.stride == 0 {
            return bad("outputs.stride must be positive".into());
        }
        Ok(())
    }

    /// The patch described by the geometry. Ellipses keep their closed forms
    /// when both interfaces are ellipses (or the outer one stands alone).
    pub fn pair(&self) -> Result<PatchPair, CliError> {
        let outer = self.outer.as_ref().ok_or_else(|| CliError::Input("outer geometry is required".into()))?;
        let n = self.numerics.n;
        let pair = match &self.inner {
            None => match outer.ellipse()? {
                Some(e) => PatchPair::single_ellipse(&e, n),
                None => Ok(PatchPair::single(outer.contour(n)?)),
            },
            Some(inner) => match (outer.ellipse()?, inner.ellipse()?) {
                (Some(o), Some(i)) => PatchPair::ellipses(&o, &i, self.alpha, n),
                _ => PatchPair::new(outer.contour(n)?, inner.contour(n)?, self.alpha),
            },
        };
        let pair = pair.map_err(|e| CliError::Input(e.to_string()))?;
        Ok(if self.numerics.quadrature { pair.without_closed_forms() } else { pair })
    }
}
