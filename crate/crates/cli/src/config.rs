//! Experiment configuration: a single versioned TOML document.
//!
//! ```toml
//! version = 1
//!
//! [surfaces.M1]
//! kind = "paraboloid"
//! height = 2.0
//! coefficient = 0.2
//!
//! [surfaces.M3]
//! kind = "paraboloid"
//! height = 4.0
//! coefficient = 0.5
//!
//! [flow]
//! source = "M1"
//! target = "M3"
//! correspondence = { kind = "vertical" }
//!
//! [[outputs]]
//! what = "scan"
//! format = "csv"
//! path = "scan.csv"
//! ```

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::CliError;

/// Schema version understood by this build.
pub const CONFIG_VERSION: u32 = 1;

pub const DEFAULT_GRID: usize = 41;
pub const DEFAULT_T_SAMPLES: usize = 21;
pub const DEFAULT_U_RANGE: (f64, f64) = (-2.0, 2.0);

/// A built-in surface and its parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SurfaceDef {
    /// `z = height − coefficient · (x² + y²)`.
    Paraboloid { height: f64, coefficient: f64 },
    Sphere {
        radius: f64,
        #[serde(default)]
        center: [f64; 3],
    },
    Ellipsoid {
        axes: [f64; 3],
        #[serde(default)]
        center: [f64; 3],
    },
    Plane { normal: [f64; 3], offset: f64 },
    /// `z = Σ a x^i y^j` from `[i, j, a]` triples.
    Graph { coefficients: Vec<(u32, u32, f64)> },
    Circle {
        radius: f64,
        #[serde(default)]
        center: [f64; 2],
    },
}

impl SurfaceDef {
    pub fn dim(&self) -> usize {
        match self {
            SurfaceDef::Circle { .. } => 2,
            _ => 3,
        }
    }
}

/// How source and target points correspond.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum CorrespondenceDef {
    SharedParameter,
    /// Same `(x, y)` on two graphs; identical to a shared parameter there.
    Vertical,
    /// `x ↦ scale · rotation · x + translation`; the target is the image of
    /// the source.
    Poincare {
        scale: f64,
        translation: Vec<f64>,
        /// Row-major; identity when omitted.
        #[serde(default)]
        rotation: Option<Vec<Vec<f64>>>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum ModeDef {
    #[default]
    FiniteDifference,
    Analytic,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FlowDef {
    pub source: String,
    pub target: String,
    pub correspondence: CorrespondenceDef,
    #[serde(default)]
    pub derivative_mode: ModeDef,
}

/// Parameter and time grids.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridDef {
    #[serde(default)]
    pub u_min: Option<Vec<f64>>,
    #[serde(default)]
    pub u_max: Option<Vec<f64>>,
    #[serde(default)]
    pub counts: Option<Vec<usize>>,
    #[serde(default = "default_t_samples")]
    pub t_samples: usize,
    #[serde(default)]
    pub t_min: f64,
    #[serde(default = "one")]
    pub t_max: f64,
    /// Rotationally symmetric experiments: sample `u = (r, 0)` with `r ≥ 0`
    /// and emit `(r, z, t)` columns.
    #[serde(default)]
    pub slice: bool,
}

fn default_t_samples() -> usize {
    DEFAULT_T_SAMPLES
}

fn one() -> f64 {
    1.0
}

impl Default for GridDef {
    fn default() -> Self {
        Self {
            u_min: None,
            u_max: None,
            counts: None,
            t_samples: DEFAULT_T_SAMPLES,
            t_min: 0.0,
            t_max: 1.0,
            slice: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlaneDef {
    pub normal: Vec<f64>,
    pub offset: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeodesicDef {
    pub z0: PlaneDef,
    pub z1: PlaneDef,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum RampDef {
    #[default]
    Linear,
    Smoothstep,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FramesDef {
    pub z0: PlaneDef,
    pub z1: PlaneDef,
    /// Orthonormal vectors in the first plane; a default basis when omitted.
    #[serde(default)]
    pub initial_frame: Option<Vec<Vec<f64>>>,
    /// End frame to twist toward; plain parallel transport when omitted.
    #[serde(default)]
    pub target_frame: Option<Vec<Vec<f64>>>,
    #[serde(default)]
    pub ramp: RampDef,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnvelopeDef {
    /// Surface whose tangent-plane family is enveloped.
    pub surface: String,
    #[serde(default)]
    pub derivative_mode: ModeDef,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputKind {
    Geodesic,
    Level,
    Curves,
    Scan,
    Frames,
    Envelope,
}

impl OutputKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            OutputKind::Geodesic => "geodesic",
            OutputKind::Level => "level",
            OutputKind::Curves => "curves",
            OutputKind::Scan => "scan",
            OutputKind::Frames => "frames",
            OutputKind::Envelope => "envelope",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Csv,
    Json,
    Obj,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputDef {
    pub what: OutputKind,
    pub format: Format,
    pub path: String,
    /// Flow time of a `level` output.
    #[serde(default)]
    pub t: Option<f64>,
}

/// A validated experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub version: u32,
    #[serde(default)]
    pub surfaces: BTreeMap<String, SurfaceDef>,
    #[serde(default)]
    pub flow: Option<FlowDef>,
    #[serde(default, alias = "grids")]
    pub grid: GridDef,
    #[serde(default)]
    pub geodesic: Option<GeodesicDef>,
    #[serde(default)]
    pub frames: Option<FramesDef>,
    #[serde(default)]
    pub envelope: Option<EnvelopeDef>,
    #[serde(default)]
    pub outputs: Vec<OutputDef>,
}

fn invalid(location: impl Into<String>, message: impl Into<String>) -> CliError {
    CliError::Config {
        location: location.into(),
        message: message.into(),
    }
}

impl ExperimentConfig {
    /// Dimension `d` of the flow or envelope surfaces (3 when neither is set).
    pub fn surface_dim(&self) -> usize {
        let name = self
            .flow
            .as_ref()
            .map(|f| &f.source)
            .or(self.envelope.as_ref().map(|e| &e.surface));
        name.and_then(|n| self.surfaces.get(n)).map_or(3, SurfaceDef::dim)
    }

    /// Parameter ranges and counts with defaults filled in.
    pub fn u_axes(&self) -> Vec<(f64, f64, usize)> {
        let k = self.surface_dim() - 1;
        let lo = self.grid.u_min.clone().unwrap_or_else(|| vec![DEFAULT_U_RANGE.0; k]);
        let hi = self.grid.u_max.clone().unwrap_or_else(|| vec![DEFAULT_U_RANGE.1; k]);
        let n = self.grid.counts.clone().unwrap_or_else(|| vec![DEFAULT_GRID; k]);
        (0..k).map(|i| (lo[i], hi[i], n[i])).collect()
    }

    /// Checks references, grid sizes, time ranges and output paths.
    pub fn validate(&self) -> Result<(), CliError> {
        if self.version != CONFIG_VERSION {
            return Err(invalid(
                "version",
                format!("unsupported version {} (expected {CONFIG_VERSION})", self.version),
            ));
        }
        let resolve = |loc: &str, name: &str| -> Result<&SurfaceDef, CliError> {
            self.surfaces
                .get(name)
                .ok_or_else(|| invalid(loc, format!("surface `{name}` is not defined under [surfaces]")))
        };
        if let Some(flow) = &self.flow {
            let s = resolve("flow.source", &flow.source)?;
            let t = resolve("flow.target", &flow.target)?;
            if s.dim() != t.dim() {
                return Err(invalid("flow.target", "source and target live in different dimensions"));
            }
            if let CorrespondenceDef::Poincare { scale, translation, rotation } = &flow.correspondence {
                if *scale == 0.0 {
                    return Err(invalid("flow.correspondence.scale", "scale must be nonzero"));
                }
                if translation.len() != s.dim() {
                    return Err(invalid(
                        "flow.correspondence.translation",
                        format!("expected {} components, got {}", s.dim(), translation.len()),
                    ));
                }
                if let Some(rows) = rotation {
                    if rows.len() != s.dim() || rows.iter().any(|r| r.len() != s.dim()) {
                        return Err(invalid("flow.correspondence.rotation", "rotation must be a d×d matrix"));
                    }
                }
            }
        }
        if let Some(env) = &self.envelope {
            resolve("envelope.surface", &env.surface)?;
        }
        let k = self.surface_dim() - 1;
        for (name, v) in [("grid.u_min", &self.grid.u_min), ("grid.u_max", &self.grid.u_max)] {
            if let Some(v) = v {
                if v.len() != k {
                    return Err(invalid(name, format!("expected {k} entries, got {}", v.len())));
                }
            }
        }
        if let Some(c) = &self.grid.counts {
            if c.len() != k {
                return Err(invalid("grid.counts", format!("expected {k} entries, got {}", c.len())));
            }
            if let Some(bad) = c.iter().find(|&&n| n < 2) {
                return Err(invalid("grid.counts", format!("grid counts must be at least 2, got {bad}")));
            }
        }
        if self.grid.t_samples < 2 {
            return Err(invalid("grid.t_samples", "need at least 2 time samples"));
        }
        let (t0, t1) = (self.grid.t_min, self.grid.t_max);
        if !(0.0..=1.0).contains(&t0) || !(0.0..=1.0).contains(&t1) || t0 >= t1 {
            return Err(invalid("grid.t_min", format!("time range [{t0}, {t1}] must lie within [0, 1]")));
        }
        let mut seen: BTreeMap<&str, usize> = BTreeMap::new();
        for (i, out) in self.outputs.iter().enumerate() {
            let loc = format!("outputs[{i}]");
            if let Some(j) = seen.insert(out.path.as_str(), i) {
                return Err(invalid(format!("{loc}.path"), format!("`{}` collides with outputs[{j}]", out.path)));
            }
            let needs = match out.what {
                OutputKind::Geodesic => self.geodesic.is_some(),
                OutputKind::Level | OutputKind::Curves | OutputKind::Scan => self.flow.is_some(),
                OutputKind::Frames => self.frames.is_some(),
                OutputKind::Envelope => self.envelope.is_some(),
            };
            if !needs {
                return Err(invalid(
                    format!("{loc}.what"),
                    format!("`{}` output requires a [{}] section", out.what.as_str(), section_for(out.what)),
                ));
            }
            if out.format == Format::Obj && !matches!(out.what, OutputKind::Level | OutputKind::Envelope) {
                return Err(invalid(format!("{loc}.format"), "obj output is only available for level and envelope"));
            }
            if let Some(t) = out.t {
                if !(0.0..=1.0).contains(&t) {
                    return Err(invalid(format!("{loc}.t"), format!("level time {t} outside [0, 1]")));
                }
            }
        }
        Ok(())
    }
}

fn section_for(kind: OutputKind) -> &'static str {
    match kind {
        OutputKind::Geodesic => "geodesic",
        OutputKind::Level | OutputKind::Curves | OutputKind::Scan => "flow",
        OutputKind::Frames => "frames",
        OutputKind::Envelope => "envelope",
    }
}

/// Parses and validates a configuration document.
pub fn parse_config(text: &str) -> Result<ExperimentConfig, CliError> {
    let config: ExperimentConfig = toml::from_str(text).map_err(|e| CliError::Parse(e.to_string()))?;
    config.validate()?;
    Ok(config)
}

/// Example configuration: vertical flow between two paraboloids.
pub const EXAMPLE_M1_M3: &str = r#"
version = 1

[surfaces.M1]
kind = "paraboloid"
height = 2.0
coefficient = 0.2

[surfaces.M3]
kind = "paraboloid"
height = 4.0
coefficient = 0.5

[flow]
source = "M1"
target = "M3"
correspondence = { kind = "vertical" }
"#;
