//! Command-line entry point.
//!
//! Each subcommand runs the outputs of its kind from `--config`, or a
//! built-in default experiment when no config is given, and prints the run
//! report as JSON.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use lorentz_flow_cli::config::{
    parse_config, EnvelopeDef, ExperimentConfig, Format, FramesDef, GeodesicDef,
    ModeDef, OutputDef, OutputKind, PlaneDef, RampDef, SurfaceDef, CONFIG_VERSION, EXAMPLE_M1_M3,
};
use lorentz_flow_cli::{run, CliError};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

#[derive(Parser, Debug)]
#[command(name = "lorentz-flow", version, about = "Lorentzian geodesic flows between hypersurfaces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug, Clone, PartialEq, Eq)]
enum Command {
    /// Sample the geodesic between two hyperplanes.
    Geodesic(Common),
    /// Level surfaces and flow curves.
    Flow(Common),
    /// Singularity report of a flow.
    Scan(Common),
    /// Parallel or interpolated frames along a segment.
    Frames(Common),
    /// Envelope of a surface's tangent-plane family.
    Envelope(Common),
    /// Every output listed in the config.
    Run(Common),
}

#[derive(clap::Args, Debug, Clone, PartialEq, Eq)]
struct Common {
    /// Experiment configuration (TOML).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Grid points per parameter axis.
    #[arg(long)]
    grid: Option<usize>,
    /// Number of time samples.
    #[arg(long)]
    tsamples: Option<usize>,
    /// Seed for the randomized geodesic demo.
    #[arg(long)]
    seed: Option<u64>,
    /// Emit planar `(r, z, t)` slices of rotationally symmetric flows.
    #[arg(long)]
    slice: bool,
    /// Format of default outputs.
    #[arg(long, value_enum, default_value_t = FormatArg::Csv)]
    format: FormatArg,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum FormatArg {
    Csv,
    Json,
    Obj,
}

impl Command {
    fn common(&self) -> &Common {
        match self {
            Command::Geodesic(c)
            | Command::Flow(c)
            | Command::Scan(c)
            | Command::Frames(c)
            | Command::Envelope(c)
            | Command::Run(c) => c,
        }
    }

    fn kinds(&self) -> &'static [OutputKind] {
        match self {
            Command::Geodesic(_) => &[OutputKind::Geodesic],
            Command::Flow(_) => &[OutputKind::Level, OutputKind::Curves],
            Command::Scan(_) => &[OutputKind::Scan],
            Command::Frames(_) => &[OutputKind::Frames],
            Command::Envelope(_) => &[OutputKind::Envelope],
            Command::Run(_) => &[
                OutputKind::Geodesic,
                OutputKind::Level,
                OutputKind::Curves,
                OutputKind::Scan,
                OutputKind::Frames,
                OutputKind::Envelope,
            ],
        }
    }
}

fn random_plane(rng: &mut StdRng, d: usize) -> PlaneDef {
    PlaneDef {
        normal: (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect(),
        offset: rng.gen_range(-2.0..2.0),
    }
}

fn default_planes(seed: Option<u64>) -> (PlaneDef, PlaneDef) {
    match seed {
        Some(s) => {
            let mut rng = StdRng::seed_from_u64(s);
            (random_plane(&mut rng, 3), random_plane(&mut rng, 3))
        }
        None => (
            PlaneDef {
                normal: vec![0.0, 0.0, 1.0],
                offset: 1.0,
            },
            PlaneDef {
                normal: vec![1.0, 0.0, 1.0],
                offset: 2.0,
            },
        ),
    }
}

/// Fills in whatever the subcommand needs but the config lacks.
fn complete(cmd: &Command, mut config: ExperimentConfig) -> ExperimentConfig {
    let common = cmd.common();
    let (z0, z1) = default_planes(common.seed);
    match cmd {
        Command::Geodesic(_) if config.geodesic.is_none() || common.seed.is_some() => {
            config.geodesic = Some(GeodesicDef { z0, z1 });
        }
        Command::Flow(_) | Command::Scan(_) if config.flow.is_none() => {
            let example = parse_config(EXAMPLE_M1_M3).expect("built-in example is valid");
            config.surfaces.extend(example.surfaces);
            config.flow = example.flow;
        }
        Command::Frames(_) if config.frames.is_none() => {
            config.frames = Some(FramesDef {
                z0,
                z1,
                initial_frame: None,
                target_frame: None,
                ramp: RampDef::Linear,
            });
        }
        Command::Envelope(_) if config.envelope.is_none() => {
            config.surfaces.insert(
                "sphere".into(),
                SurfaceDef::Sphere {
                    radius: 1.0,
                    center: [0.0; 3],
                },
            );
            config.envelope = Some(EnvelopeDef {
                surface: "sphere".into(),
                derivative_mode: ModeDef::FiniteDifference,
            });
            config.grid.u_min = Some(vec![0.1, 0.0]);
            config.grid.u_max = Some(vec![std::f64::consts::PI - 0.1, 2.0 * std::f64::consts::PI]);
        }
        _ => {}
    }
    let d = config.surface_dim();
    if let Some(n) = common.grid {
        config.grid.counts = Some(vec![n; d - 1]);
    }
    if let Some(n) = common.tsamples {
        config.grid.t_samples = n;
    }
    config.grid.slice |= common.slice;

    let kinds = cmd.kinds();
    config.outputs.retain(|o| kinds.contains(&o.what));
    if config.outputs.is_empty() && !matches!(cmd, Command::Run(_)) {
        let format = match common.format {
            FormatArg::Csv => Format::Csv,
            FormatArg::Json => Format::Json,
            FormatArg::Obj => Format::Obj,
        };
        for &what in kinds {
            let format = if format == Format::Obj && !matches!(what, OutputKind::Level | OutputKind::Envelope) {
                Format::Csv
            } else {
                format
            };
            let ext = match format {
                Format::Csv => "csv",
                Format::Json => "json",
                Format::Obj => "obj",
            };
            config.outputs.push(OutputDef {
                what,
                format,
                path: format!("{}.{ext}", what.as_str()),
                t: None,
            });
        }
    }
    config
}

fn load(cmd: &Command) -> Result<ExperimentConfig, CliError> {
    let base = match &cmd.common().config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
                path: path.display().to_string(),
                source,
            })?;
            parse_config(&text)?
        }
        None => parse_config(&format!("version = {CONFIG_VERSION}\n"))?,
    };
    let completed = complete(cmd, base);
    // command-line overrides are checked like config values
    completed.validate()?;
    Ok(completed)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let config = match load(&cli.command) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let out = cli.command.common().out.clone();
    let report = run(&config, &out);
    println!("{}", serde_json::to_string_pretty(&report).expect("report serializes"));
    for o in report.outputs.iter().filter(|o| !o.ok) {
        eprintln!("error: {} -> {}: {}", o.what, o.path, o.error.as_deref().unwrap_or(""));
    }
    if report.success() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
