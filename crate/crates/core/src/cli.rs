//! Command-line front end: every experiment is a single flags-only invocation
//! writing CSV (header row, `.` decimal point, 17 significant digits).
//!
//! Exit codes: 0 on success, 2 on argument errors, 1 on internal consistency
//! or I/O failures.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::bell::{chsh, maximize_chsh, ChshResult, ChshSettings};
use crate::correlations::{decompose, tensor_closed_form_about, CorrelationTensor};
use crate::ensembles::{
    average_analytic, average_monte_carlo, averaged_density, AxisDistribution, RNG_ALGORITHM,
};
use crate::error::Error;
use crate::events::{estimate_correlation, generate_events, write_event_log, SourceModel};
use crate::format::fmt_g17;
use crate::geometry::{mat3_scale, DetectorSetting, Plane, UnitVec3};
use crate::states::QuantizationAxis;

const ANGLE_HELP: &str = "\
All angles are in degrees and converted to radians once, on input.

Directions (--a, --b, --axis, --normal) accept:
  x, y, z, -x, -y, -z     coordinate axes
  X,Y,Z                   components of a unit vector (|v| within 1e-6 of 1)
  @THETA,PHI              polar and azimuthal angle in degrees";

#[derive(Debug, Parser)]
#[command(name = "spincorr", version, about = "Two-spin correlation experiments", after_help = ANGLE_HELP)]
pub struct Cli {
    /// Master seed of the random streams (ChaCha8, one stream per chunk).
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    /// Write CSV here instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// Worker threads for Monte Carlo paths; results do not depend on it.
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Correlation E(a, b) and its classical/quantum split: `E,classical,quantum`.
    Correlate {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, value_parser = parse_direction, allow_hyphen_values = true)]
        a: UnitVec3,
        #[arg(long, value_parser = parse_direction, allow_hyphen_values = true)]
        b: UnitVec3,
    },
    /// E against the detector angle in a coordinate plane: `theta_ab_deg,E`.
    Sweep {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, default_value = "xy")]
        plane: Plane,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        from: f64,
        #[arg(long, default_value_t = 180.0, allow_hyphen_values = true)]
        to: f64,
        #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
        step: f64,
    },
    /// CHSH value for an explicit in-plane tetrad, or the maximizing tetrad.
    Chsh {
        #[command(flatten)]
        model: ModelArgs,
        /// a,a',b,b' in degrees within --plane; omit to run the maximizer.
        #[arg(long, value_parser = parse_tetrad, allow_hyphen_values = true)]
        tetrad: Option<[f64; 4]>,
        #[arg(long, default_value = "xy")]
        plane: Plane,
    },
    /// Count-based estimate from simulated coincidences: `e_hat,n,std_error,seed`.
    Events {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, value_parser = parse_direction, allow_hyphen_values = true)]
        a: UnitVec3,
        #[arg(long, value_parser = parse_direction, allow_hyphen_values = true)]
        b: UnitVec3,
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        n: u64,
        /// Also write every event as `ax,ay,az,bx,by,bz,r,s`.
        #[arg(long)]
        log: Option<PathBuf>,
    },
    /// Ensemble average of -PP over quantization axes.
    Ensemble {
        #[arg(long, value_enum, default_value_t = DistKind::Sphere)]
        dist: DistKind,
        #[arg(long, value_parser = parse_direction, default_value = "z", allow_hyphen_values = true)]
        normal: UnitVec3,
        /// Axis for `--dist fixed`.
        #[arg(long, value_parser = parse_direction, default_value = "z", allow_hyphen_values = true)]
        axis: UnitVec3,
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..), default_value_t = 1_000_000)]
        n: u64,
        /// Exact average instead of Monte Carlo (sphere and plane only).
        #[arg(long, conflicts_with = "density")]
        analytic: bool,
        /// Print the averaged density matrix instead of the tensor.
        #[arg(long)]
        density: bool,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModelKind {
    Entangled,
    Mismatched,
    Disentangled,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DistKind {
    Sphere,
    Plane,
    Fixed,
}

#[derive(Debug, Clone, Args)]
pub struct ModelArgs {
    #[arg(long, value_enum, default_value_t = ModelKind::Entangled)]
    pub model: ModelKind,
    /// Quantization axis of the pair (mismatched model, decomposition, fixed distribution).
    #[arg(long, value_parser = parse_direction, default_value = "z", allow_hyphen_values = true)]
    pub axis: UnitVec3,
    /// Phase mismatch in degrees.
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub delta: f64,
    /// Axis distribution of the disentangled model.
    #[arg(long, value_enum, default_value_t = DistKind::Sphere)]
    pub dist: DistKind,
    /// Plane normal for `--dist plane`.
    #[arg(long, value_parser = parse_direction, default_value = "z", allow_hyphen_values = true)]
    pub normal: UnitVec3,
}

impl ModelArgs {
    fn quantization_axis(&self) -> QuantizationAxis {
        QuantizationAxis::from_direction(&self.axis)
    }

    fn distribution(&self) -> AxisDistribution {
        distribution(self.dist, self.normal, self.axis)
    }

    fn delta_rad(&self) -> f64 {
        self.delta.to_radians()
    }

    fn source(&self) -> SourceModel {
        match self.model {
            ModelKind::Entangled => SourceModel::Entangled,
            ModelKind::Mismatched => SourceModel::Mismatched {
                axis: self.quantization_axis(),
                delta: self.delta_rad(),
            },
            ModelKind::Disentangled => SourceModel::Disentangled(self.distribution()),
        }
    }

    /// Closed-form tensor of the model. Disentangled ensembles use `−⟨P̂P̂⟩`
    /// with vanishing single-spin terms.
    fn tensor(&self) -> Result<CorrelationTensor, Error> {
        Ok(match self.model {
            ModelKind::Entangled => CorrelationTensor::singlet(),
            ModelKind::Mismatched => tensor_closed_form_about(self.quantization_axis(), self.delta_rad()),
            ModelKind::Disentangled => {
                let m = match self.distribution() {
                    AxisDistribution::Fixed(p) => crate::geometry::outer(p.as_array(), p.as_array()),
                    dist => average_analytic(&dist)?,
                };
                CorrelationTensor::from_correlations(mat3_scale(&m, -1.0))
            }
        })
    }
}

fn distribution(kind: DistKind, normal: UnitVec3, axis: UnitVec3) -> AxisDistribution {
    match kind {
        DistKind::Sphere => AxisDistribution::UniformSphere,
        DistKind::Plane => AxisDistribution::UniformPlane { normal },
        DistKind::Fixed => AxisDistribution::Fixed(axis),
    }
}

/// Parses a direction: a coordinate axis name, unit components, or `@theta,phi` in degrees.
pub fn parse_direction(s: &str) -> Result<UnitVec3, String> {
    let s = s.trim();
    let named = match s.to_ascii_lowercase().as_str() {
        "x" | "+x" => Some(UnitVec3::X),
        "y" | "+y" => Some(UnitVec3::Y),
        "z" | "+z" => Some(UnitVec3::Z),
        "-x" => Some(UnitVec3::X.neg()),
        "-y" => Some(UnitVec3::Y.neg()),
        "-z" => Some(UnitVec3::Z.neg()),
        _ => None,
    };
    if let Some(v) = named {
        return Ok(v);
    }
    let parse_list = |t: &str| -> Result<Vec<f64>, String> {
        t.split(',')
            .map(|x| {
                x.trim()
                    .parse::<f64>()
                    .map_err(|_| format!("'{x}' is not a number"))
                    .and_then(|v| if v.is_finite() { Ok(v) } else { Err(format!("'{x}' is not finite")) })
            })
            .collect()
    };
    if let Some(angles) = s.strip_prefix('@') {
        let v = parse_list(angles)?;
        if v.len() != 2 {
            return Err("expected @THETA,PHI".into());
        }
        return Ok(UnitVec3::from_spherical_deg(v[0], v[1]));
    }
    let v = parse_list(s)?;
    if v.len() != 3 {
        return Err(format!("expected three components, got {}", v.len()));
    }
    let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    if (n - 1.0).abs() > 1e-6 {
        return Err(format!("not a unit vector (norm {n})"));
    }
    UnitVec3::normalize([v[0], v[1], v[2]]).map_err(|e| e.to_string())
}

fn parse_tetrad(s: &str) -> Result<[f64; 4], String> {
    let v: Vec<f64> = s
        .split(',')
        .map(|x| x.trim().parse::<f64>().map_err(|_| format!("'{x}' is not a number")))
        .collect::<Result<_, _>>()?;
    v.try_into().map_err(|v: Vec<f64>| format!("expected 4 angles, got {}", v.len()))
}

/// Failure of a command, mapped to an exit code.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Internal(_) => 1,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        if e.is_consistency() {
            CliError::Internal(e.to_string())
        } else {
            CliError::Usage(e.to_string())
        }
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Internal(e.to_string())
    }
}

fn row(fields: &[f64]) -> String {
    fields.iter().map(|x| fmt_g17(*x)).collect::<Vec<_>>().join(",")
}

fn write_chsh(out: &mut dyn Write, r: &ChshResult) -> io::Result<()> {
    writeln!(out, "ax,ay,az,a2x,a2y,a2z,bx,by,bz,b2x,b2y,b2z,S,classification")?;
    let coords: Vec<f64> = r
        .settings
        .as_array()
        .iter()
        .flat_map(|v| *v.as_array())
        .collect();
    writeln!(out, "{},{},{}", row(&coords), fmt_g17(r.s_value), r.classification)
}

fn sweep_angles(from: f64, to: f64, step: f64) -> Result<Vec<f64>, CliError> {
    if !(step.is_finite() && step > 0.0) {
        return Err(CliError::Usage(format!("--step must be positive, got {step}")));
    }
    if !(from.is_finite() && to.is_finite()) || to < from {
        return Err(CliError::Usage(format!("invalid sweep range {from}..{to}")));
    }
    let count = ((to - from) / step + 1e-9).floor() as u64 + 1;
    Ok((0..count).map(|k| from + k as f64 * step).collect())
}

/// Runs one parsed command, writing CSV to `out`.
pub fn execute(cli: &Cli, out: &mut dyn Write) -> Result<(), CliError> {
    match &cli.command {
        Command::Correlate { model, a, b } => {
            let tensor = model.tensor()?;
            let e = tensor.correlate(a, b);
            let (classical, quantum) = match model.model {
                ModelKind::Disentangled => (e, 0.0),
                ModelKind::Entangled => {
                    let d = decompose(a, b, model.quantization_axis(), 0.0);
                    (d.classical, d.quantum)
                }
                ModelKind::Mismatched => {
                    let d = decompose(a, b, model.quantization_axis(), model.delta_rad());
                    (d.classical, d.quantum)
                }
            };
            writeln!(out, "E,classical,quantum")?;
            writeln!(out, "{}", row(&[e, classical, quantum]))?;
        }
        Command::Sweep {
            model,
            plane,
            from,
            to,
            step,
        } => {
            let tensor = model.tensor()?;
            let angles = sweep_angles(*from, *to, *step)?;
            let a = plane.direction_deg(0.0);
            writeln!(out, "theta_ab_deg,E")?;
            for theta in angles {
                let b: DetectorSetting = plane.direction_deg(theta);
                writeln!(out, "{}", row(&[theta, tensor.correlate(&a, &b)]))?;
            }
        }
        Command::Chsh {
            model,
            tetrad,
            plane,
        } => {
            let tensor = model.tensor()?;
            let result = match tetrad {
                Some([a, a2, b, b2]) => {
                    chsh(&tensor, &ChshSettings::in_plane_deg(*plane, *a, *a2, *b, *b2))
                }
                None => maximize_chsh(&tensor),
            };
            write_chsh(out, &result)?;
        }
        Command::Events {
            model,
            a,
            b,
            n,
            log,
        } => {
            let source = model.source();
            let est = estimate_correlation(&source, a, b, *n, cli.seed)?;
            if let Some(path) = log {
                let events = generate_events(&source, a, b, *n, cli.seed)?;
                write_event_log(BufWriter::new(File::create(path)?), &events)?;
            }
            writeln!(out, "e_hat,n,std_error,seed")?;
            writeln!(
                out,
                "{},{},{},{}",
                fmt_g17(est.e_hat),
                est.n,
                fmt_g17(est.std_error),
                est.seed
            )?;
        }
        Command::Ensemble {
            dist,
            normal,
            axis,
            n,
            analytic,
            density,
        } => {
            let dist = distribution(*dist, *normal, *axis);
            if *analytic {
                let m = average_analytic(&dist)?;
                writeln!(out, "i,j,correlation")?;
                for (i, r) in m.iter().enumerate() {
                    for (j, x) in r.iter().enumerate() {
                        writeln!(out, "{i},{j},{}", fmt_g17(-x))?;
                    }
                }
            } else if *density {
                let rho = averaged_density(&dist, *n, cli.seed)?;
                writeln!(out, "row,col,re,im,n,seed,rng")?;
                for (i, r) in rho.matrix().0.iter().enumerate() {
                    for (j, z) in r.iter().enumerate() {
                        writeln!(out, "{i},{j},{},{},{n},{},{RNG_ALGORITHM}", fmt_g17(z.re), fmt_g17(z.im), cli.seed)?;
                    }
                }
            } else {
                let avg = average_monte_carlo(&dist, *n, cli.seed)?;
                writeln!(out, "i,j,correlation,std_error,n,seed,rng")?;
                for i in 0..3 {
                    for j in 0..3 {
                        writeln!(
                            out,
                            "{i},{j},{},{},{},{},{RNG_ALGORITHM}",
                            fmt_g17(avg.correlation[i][j]),
                            fmt_g17(avg.std_error[i][j]),
                            avg.n_samples,
                            avg.seed
                        )?;
                    }
                }
            }
        }
    }
    Ok(())
}

/// Usage line of the subcommand named in `args`, or of the whole program.
fn usage(args: &[std::ffi::OsString]) -> String {
    let mut cmd = <Cli as clap::CommandFactory>::command();
    let name = args
        .iter()
        .skip(1)
        .filter_map(|a| a.to_str())
        .find(|a| cmd.find_subcommand(a).is_some())
        .map(str::to_owned);
    match name.and_then(|n| cmd.find_subcommand_mut(n)) {
        Some(sub) => sub.render_usage().to_string().replace("Usage: ", "Usage: spincorr "),
        None => cmd.render_usage().to_string(),
    }
}

/// Parses `args`, runs the command and returns the process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let args: Vec<std::ffi::OsString> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(cli) => cli,
        Err(e) if e.use_stderr() => {
            let text = e.render().to_string();
            let _ = write!(stderr, "{text}");
            if !text.contains("Usage:") {
                let _ = writeln!(stderr, "\n{}", usage(&args));
            }
            return 2;
        }
        Err(e) => {
            let _ = write!(stdout, "{}", e.render());
            return 0;
        }
    };

    let mut buf = Vec::new();
    let result = match cli.threads {
        Some(threads) => match rayon::ThreadPoolBuilder::new().num_threads(threads).build() {
            Ok(pool) => pool.install(|| execute(&cli, &mut buf)),
            Err(e) => Err(CliError::Internal(e.to_string())),
        },
        None => execute(&cli, &mut buf),
    };
    let result = result.and_then(|()| {
        match &cli.out {
            Some(path) => File::create(path)?.write_all(&buf)?,
            None => stdout.write_all(&buf)?,
        }
        Ok(())
    });
    match result {
        Ok(()) => 0,
        Err(e) => {
            let (CliError::Usage(msg) | CliError::Internal(msg)) = &e;
            let _ = writeln!(stderr, "error: {msg}");
            if let CliError::Usage(_) = e {
                let _ = writeln!(stderr, "\n{}", usage(&args));
            }
            e.exit_code()
        }
    }
}
