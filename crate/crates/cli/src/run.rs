//! Executes a validated configuration and writes its outputs.

use std::path::Path;
use std::time::Instant;

use lorentz_flow::catalog::{circle, ellipsoid, paraboloid, plane, polynomial_graph, sphere, Polynomial2};
use lorentz_flow::envelope::{envelope_grid, linspace, DerivativeMode, EnvelopeSample, ParamGrid, Smoothness};
use lorentz_flow::flow::{Correspondence, FlowProblem, ScanField, ScanFlag, SurfacePatch};
use lorentz_flow::frames::{frame_interpolate, parallel_check, parallel_transport_frame, FrameFamily, Ramp};
use lorentz_flow::{GeodesicSegment, HyperplanePoint, PoincareElement};
use nalgebra::{DMatrix, DVector};
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::config::{
    CorrespondenceDef, ExperimentConfig, Format, FramesDef, ModeDef, OutputDef, OutputKind, PlaneDef, RampDef,
    SurfaceDef,
};
use crate::error::CliError;
use crate::output::{indexed, param_columns, write_csv, write_json, write_obj, Cell, MeshVertex, Metadata, Table};

/// Version string recorded in every output.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Outcome of one requested output.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OutputStatus {
    pub what: String,
    pub path: String,
    pub ok: bool,
    pub error: Option<String>,
    pub rows: usize,
    pub seconds: f64,
    pub singular: usize,
    pub undetermined: usize,
    /// Scan verdict, or the parallel check for frames.
    pub verdict: Option<String>,
    /// Free-form diagnostics such as minimum determinants.
    pub notes: Vec<String>,
}

/// Summary of a run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunReport {
    pub version: String,
    pub config_hash: String,
    pub outputs: Vec<OutputStatus>,
}

impl RunReport {
    /// True when every output was produced.
    pub fn success(&self) -> bool {
        self.outputs.iter().all(|o| o.ok)
    }
}

/// SHA-256 of the canonical JSON form of `config`, as lowercase hex.
pub fn config_hash(config: &ExperimentConfig) -> String {
    let canonical = serde_json::to_string(config).expect("config serializes");
    Sha256::digest(canonical.as_bytes())
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

fn geom(context: &str) -> impl Fn(lorentz_flow::GeomError) -> CliError + '_ {
    move |e| CliError::geometry(context, e)
}

/// Builds a catalog surface.
pub fn build_surface(def: &SurfaceDef) -> Result<SurfacePatch, CliError> {
    let ctx = "surface";
    Ok(match def {
        SurfaceDef::Paraboloid { height, coefficient } => paraboloid(*height, *coefficient),
        SurfaceDef::Sphere { radius, center } => sphere(*radius, *center).map_err(geom(ctx))?,
        SurfaceDef::Ellipsoid { axes, center } => ellipsoid(*axes, *center).map_err(geom(ctx))?,
        SurfaceDef::Plane { normal, offset } => plane(*normal, *offset).map_err(geom(ctx))?,
        SurfaceDef::Graph { coefficients } => polynomial_graph(Polynomial2::new(coefficients.clone())),
        SurfaceDef::Circle { radius, center } => circle(*radius, *center).map_err(geom(ctx))?,
    })
}

fn mode(m: ModeDef) -> DerivativeMode {
    match m {
        ModeDef::FiniteDifference => DerivativeMode::FiniteDifference,
        ModeDef::Analytic => DerivativeMode::Analytic,
    }
}

/// Builds the flow problem of the `[flow]` section.
pub fn build_flow(config: &ExperimentConfig) -> Result<FlowProblem, CliError> {
    let flow = config.flow.as_ref().ok_or_else(|| CliError::Config {
        location: "flow".into(),
        message: "missing [flow] section".into(),
    })?;
    let source = build_surface(&config.surfaces[&flow.source])?;
    let target = build_surface(&config.surfaces[&flow.target])?;
    let chi = match &flow.correspondence {
        CorrespondenceDef::SharedParameter | CorrespondenceDef::Vertical => Correspondence::SharedParameter,
        CorrespondenceDef::Poincare {
            scale,
            translation,
            rotation,
        } => {
            let d = source.dim();
            let a = match rotation {
                Some(rows) => DMatrix::from_fn(d, d, |i, j| rows[i][j]),
                None => DMatrix::identity(d, d),
            };
            let g = PoincareElement::new(a, *scale, DVector::from_column_slice(translation))
                .map_err(geom("flow.correspondence"))?;
            Correspondence::Poincare(g)
        }
    };
    Ok(FlowProblem::new(source, target, chi)
        .map_err(geom("flow"))?
        .with_mode(mode(flow.derivative_mode)))
}

/// The parameter grid; in slice mode `u = (r, 0)` with `r ≥ 0`.
pub fn build_grid(config: &ExperimentConfig) -> Result<ParamGrid, CliError> {
    let axes = config.u_axes();
    if config.grid.slice {
        if axes.len() != 2 {
            return Err(CliError::Config {
                location: "grid.slice".into(),
                message: "slice mode needs a two-parameter surface".into(),
            });
        }
        let (lo, hi, n) = axes[0];
        return Ok(ParamGrid::new(vec![linspace(lo.max(0.0), hi, n), vec![0.0]]));
    }
    let ranges: Vec<(f64, f64)> = axes.iter().map(|a| (a.0, a.1)).collect();
    let counts: Vec<usize> = axes.iter().map(|a| a.2).collect();
    ParamGrid::uniform(&ranges, &counts).map_err(geom("grid"))
}

/// The time samples of `[grid]`.
pub fn build_times(config: &ExperimentConfig) -> Vec<f64> {
    linspace(config.grid.t_min, config.grid.t_max, config.grid.t_samples)
}

fn hyperplane(def: &PlaneDef, loc: &str) -> Result<HyperplanePoint, CliError> {
    HyperplanePoint::from_slice(&def.normal, def.offset).map_err(geom(loc))
}

/// Runs every output of `config`, writing files below `out_dir`.
pub fn run(config: &ExperimentConfig, out_dir: &Path) -> RunReport {
    let hash = config_hash(config);
    let outputs = config
        .outputs
        .iter()
        .map(|out| {
            let start = Instant::now();
            let meta = Metadata {
                version: VERSION.into(),
                config_hash: hash.clone(),
                what: out.what.as_str().into(),
            };
            let mut status = OutputStatus {
                what: out.what.as_str().into(),
                path: out.path.clone(),
                ok: true,
                error: None,
                rows: 0,
                seconds: 0.0,
                singular: 0,
                undetermined: 0,
                verdict: None,
                notes: Vec::new(),
            };
            if let Err(e) = run_output(config, out, &meta, out_dir, &mut status) {
                status.ok = false;
                status.error = Some(e.to_string());
            }
            status.seconds = start.elapsed().as_secs_f64();
            status
        })
        .collect();
    RunReport {
        version: VERSION.into(),
        config_hash: hash,
        outputs,
    }
}

fn run_output(
    config: &ExperimentConfig,
    out: &OutputDef,
    meta: &Metadata,
    out_dir: &Path,
    status: &mut OutputStatus,
) -> Result<(), CliError> {
    let path = out_dir.join(&out.path);
    match out.what {
        OutputKind::Geodesic => emit(geodesic_table(config)?, out.format, meta, &path, status),
        OutputKind::Curves => emit(curves_table(config)?, out.format, meta, &path, status),
        OutputKind::Scan => emit(scan_table(config, status)?, out.format, meta, &path, status),
        OutputKind::Frames => emit(frames_table(config, status)?, out.format, meta, &path, status),
        OutputKind::Level | OutputKind::Envelope => {
            let grid = build_grid(config)?;
            let t = out.t.unwrap_or(0.5);
            let samples = if out.what == OutputKind::Level {
                build_flow(config)?.level_surface(t, &grid).map_err(geom("level"))?
            } else {
                let env = config.envelope.as_ref().expect("validated");
                let surface = build_surface(&config.surfaces[&env.surface])?;
                envelope_grid(&surface.tangent_family(mode(env.derivative_mode)), &grid).map_err(geom("envelope"))?
            };
            status.singular = samples.iter().filter(|s| s.smooth == Smoothness::Singular).count();
            status.undetermined = samples.iter().filter(|s| s.smooth == Smoothness::Undetermined).count();
            if out.format == Format::Obj {
                let verts: Vec<MeshVertex> = samples
                    .iter()
                    .map(|s| MeshVertex {
                        point: s.point.as_ref().map(|p| p.iter().copied().collect()),
                        smooth: s.smooth == Smoothness::Smooth,
                    })
                    .collect();
                let header = if out.what == OutputKind::Level { format!("t = {t}") } else { String::new() };
                let stats = write_obj(&grid.shape(), &verts, meta, &header, &path)?;
                status.rows = stats.vertices;
                status.notes.push(format!("faces {} lines {}", stats.faces, stats.lines));
                Ok(())
            } else {
                let table = if out.what == OutputKind::Level {
                    level_table(config, &samples, t)
                } else {
                    envelope_table(config, &samples)
                };
                emit(table, out.format, meta, &path, status)
            }
        }
    }
}

fn emit(table: Table, format: Format, meta: &Metadata, path: &Path, status: &mut OutputStatus) -> Result<(), CliError> {
    status.rows = table.rows.len();
    match format {
        Format::Csv => write_csv(&table, path),
        Format::Json => write_json(&table, meta, path),
        Format::Obj => unreachable!("validated"),
    }
}

fn opt_point(point: &Option<DVector<f64>>, d: usize) -> Vec<Cell> {
    match point {
        Some(p) => p.iter().map(|&x| Cell::Num(x)).collect(),
        None => vec![Cell::Missing; d],
    }
}

/// `(r, z)` of a point in slice mode.
fn slice_cells(point: &Option<DVector<f64>>) -> Vec<Cell> {
    match point {
        Some(p) => vec![Cell::Num(p[0].hypot(p[1])), Cell::Num(p[2])],
        None => vec![Cell::Missing; 2],
    }
}

fn smooth_cell(s: Smoothness) -> Cell {
    Cell::Text(s.as_str())
}

fn opt_num(x: Option<f64>) -> Cell {
    x.map_or(Cell::Missing, Cell::Num)
}

/// `t, n_1..n_d, c` along the configured segment.
pub fn geodesic_table(config: &ExperimentConfig) -> Result<Table, CliError> {
    let def = config.geodesic.as_ref().expect("validated");
    let seg = GeodesicSegment::new(hyperplane(&def.z0, "geodesic.z0")?, hyperplane(&def.z1, "geodesic.z1")?)
        .map_err(geom("geodesic"))?;
    let d = seg.dim();
    let mut cols = vec!["t".to_string()];
    cols.extend(indexed("n", d));
    cols.push("c".into());
    let mut table = Table::new(cols);
    for t in build_times(config) {
        let z = seg.point(t);
        let mut row = vec![Cell::Num(t)];
        row.extend(z.normal().iter().map(|&x| Cell::Num(x)));
        row.push(Cell::Num(z.offset()));
        table.push(row);
    }
    Ok(table)
}

/// `u…, x…, detNprime, smooth` of a level surface, or `r, z, t, …` in slice mode.
pub fn level_table(config: &ExperimentConfig, samples: &[EnvelopeSample], t: f64) -> Table {
    let d = config.surface_dim();
    let slice = config.grid.slice;
    let mut cols = if slice {
        vec!["r".into(), "z".into(), "t".into()]
    } else {
        let mut c = param_columns(d - 1);
        c.extend(indexed("x", d));
        c
    };
    cols.push("detNprime".into());
    cols.push("smooth".into());
    let mut table = Table::new(cols);
    for s in samples {
        let mut row = if slice {
            let mut r = slice_cells(&s.point);
            r.push(Cell::Num(t));
            r
        } else {
            let mut r: Vec<Cell> = s.u.iter().map(|&x| Cell::Num(x)).collect();
            r.extend(opt_point(&s.point, d));
            r
        };
        row.push(opt_num(s.det_nprime));
        row.push(smooth_cell(s.smooth));
        table.push(row);
    }
    table
}

/// `u…, x…, detN, smooth, hessian` of a standalone envelope.
pub fn envelope_table(config: &ExperimentConfig, samples: &[EnvelopeSample]) -> Table {
    let d = config.surface_dim();
    let mut cols = param_columns(d - 1);
    cols.extend(indexed("x", d));
    cols.extend(["detN".into(), "smooth".into(), "hessian".into()]);
    let mut table = Table::new(cols);
    for s in samples {
        let mut row: Vec<Cell> = s.u.iter().map(|&x| Cell::Num(x)).collect();
        row.extend(opt_point(&s.point, d));
        row.push(Cell::Num(s.det_n));
        row.push(smooth_cell(s.smooth));
        row.push(opt_num(s.hessian_det));
        table.push(row);
    }
    table
}

/// `u…, t, x…` per grid point and time, or `r, z, t` in slice mode.
pub fn curves_table(config: &ExperimentConfig) -> Result<Table, CliError> {
    let problem = build_flow(config)?;
    let grid = build_grid(config)?;
    let times = build_times(config);
    let d = problem.dim();
    let slice = config.grid.slice;
    let cols = if slice {
        vec!["r".into(), "z".into(), "t".into()]
    } else {
        let mut c = param_columns(d - 1);
        c.push("t".into());
        c.extend(indexed("x", d));
        c
    };
    let mut table = Table::new(cols);
    for u in grid.points() {
        for s in problem.flow_curve(&u, &times) {
            let row = if slice {
                let mut r = slice_cells(&s.point);
                r.push(Cell::Num(s.t));
                r
            } else {
                let mut r: Vec<Cell> = u.iter().map(|&x| Cell::Num(x)).collect();
                r.push(Cell::Num(s.t));
                r.extend(opt_point(&s.point, d));
                r
            };
            table.push(row);
        }
    }
    Ok(table)
}

/// `u…, t, detNprime, flag, hessian` over the `(u, t)` grid.
///
/// `flag` is `sign_change` where either field changes sign before the next
/// time sample, and the scan classification otherwise. In slice mode the
/// parameter columns are replaced by `r`.
pub fn scan_table(config: &ExperimentConfig, status: &mut OutputStatus) -> Result<Table, CliError> {
    let problem = build_flow(config)?;
    let grid = build_grid(config)?;
    let times = build_times(config);
    let report = problem.singularity_scan(&grid, &times).map_err(geom("scan"))?;
    status.verdict = Some(report.verdict.as_str().into());
    status.singular = report.count(ScanFlag::Singular);
    status.undetermined = report.count(ScanFlag::Undetermined);
    status.notes.push(format!("min |detNprime| {}", report.min_abs_det));
    status.notes.push(format!("min |hessian| {}", report.min_abs_hessian));
    status.notes.push(format!(
        "sign changes: detNprime {} hessian {}",
        report.sign_change_count(ScanField::NPrime),
        report.sign_change_count(ScanField::Hessian)
    ));
    let mut changed = vec![false; report.flags.len()];
    for s in &report.sign_changes {
        changed[report.index(s.u_index, s.t_index)] = true;
    }
    let mut cols = if config.grid.slice {
        vec!["r".to_string()]
    } else {
        param_columns(problem.dim() - 1)
    };
    cols.extend(["t".into(), "detNprime".into(), "flag".into(), "hessian".into()]);
    let mut table = Table::new(cols);
    for (iu, u) in report.u_points.iter().enumerate() {
        for (it, &t) in report.t_values.iter().enumerate() {
            let k = report.index(iu, it);
            let mut row: Vec<Cell> = if config.grid.slice {
                vec![Cell::Num(u[0])]
            } else {
                u.iter().map(|&x| Cell::Num(x)).collect()
            };
            let flag = if changed[k] { "sign_change" } else { report.flags[k].as_str() };
            row.extend([
                Cell::Num(t),
                Cell::Num(report.det_field[k]),
                Cell::Text(flag),
                Cell::Num(report.hessian_field[k]),
            ]);
            table.push(row);
        }
    }
    Ok(table)
}

/// An orthonormal basis of `n^⊥` with `det(n, e_1, …) > 0`.
pub fn default_frame(n: &DVector<f64>) -> Vec<DVector<f64>> {
    let d = n.len();
    let mut basis: Vec<DVector<f64>> = Vec::with_capacity(d - 1);
    for k in 0..d {
        let mut v = DVector::from_fn(d, |i, _| if i == k { 1.0 } else { 0.0 });
        v -= n * n.dot(&v);
        for b in &basis {
            v -= b * b.dot(&v);
        }
        if v.norm() > 1e-6 && basis.len() < d - 1 {
            basis.push(v.normalize());
        }
    }
    let mut cols = vec![n.clone()];
    cols.extend(basis.iter().cloned());
    if DMatrix::from_columns(&cols).determinant() < 0.0 {
        let last = basis.last_mut().expect("d ≥ 2");
        *last = -&*last;
    }
    basis
}

fn frame_from_rows(rows: &[Vec<f64>]) -> Vec<DVector<f64>> {
    rows.iter().map(|r| DVector::from_column_slice(r)).collect()
}

/// Transported or interpolated frames along the `[frames]` segment.
pub fn frame_family(def: &FramesDef, times: &[f64]) -> Result<(GeodesicSegment, FrameFamily), CliError> {
    let seg = GeodesicSegment::new(hyperplane(&def.z0, "frames.z0")?, hyperplane(&def.z1, "frames.z1")?)
        .map_err(geom("frames"))?;
    let initial = match &def.initial_frame {
        Some(rows) => frame_from_rows(rows),
        None => default_frame(seg.start().normal()),
    };
    let parallel = parallel_transport_frame(&seg, &initial, times).map_err(geom("frames.initial_frame"))?;
    let family = match &def.target_frame {
        Some(rows) => {
            let ramp = match def.ramp {
                RampDef::Linear => Ramp::Linear,
                RampDef::Smoothstep => Ramp::Smoothstep,
            };
            frame_interpolate(&parallel, &frame_from_rows(rows), ramp).map_err(geom("frames.target_frame"))?
        }
        None => parallel,
    };
    Ok((seg, family))
}

/// `t, frame, e_1..e_d, beta`: one row per sample time and frame vector.
pub fn frames_table(config: &ExperimentConfig, status: &mut OutputStatus) -> Result<Table, CliError> {
    let def = config.frames.as_ref().expect("validated");
    let times = build_times(config);
    let (seg, family) = frame_family(def, &times)?;
    let d = seg.dim();
    let k = family.frames.first().map_or(0, Vec::len);
    let mut parallel = true;
    for i in 0..k {
        let rep = parallel_check(&seg, &family.section(i)).map_err(geom("frames"))?;
        parallel &= rep.is_parallel;
        status.notes.push(format!("frame {} parallel residual {}", i + 1, rep.residual));
    }
    status.verdict = Some(if parallel { "parallel" } else { "not_parallel" }.into());
    let mut cols = vec!["t".to_string(), "frame".into()];
    cols.extend(indexed("e", d));
    cols.push("beta".into());
    let mut table = Table::new(cols);
    for (j, &t) in family.times.iter().enumerate() {
        for i in 0..k {
            let mut row = vec![Cell::Num(t), Cell::Int(i + 1)];
            row.extend(family.frames[j][i].iter().map(|&x| Cell::Num(x)));
            row.push(Cell::Num(family.offsets[j][i]));
            table.push(row);
        }
    }
    Ok(table)
}
