use std::path::PathBuf;

use chatter_core::metrics::CROSSOVER_TOL;
use chatter_core::sim::DEFAULT_DIVERGENCE_THRESHOLD;
use chatter_core::{ControllerSpec, PowerMode};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

/// Chattering prediction and simulation for sliding-mode loops with fast actuators.
#[derive(Debug, Parser)]
#[command(name = "chatter", version)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Harmonic-balance prediction for one controller and actuator time constant.
    Predict(PredictArgs),
    /// Predictions over a grid of actuator time constants.
    Sweep(SweepArgs),
    /// Fixed-step closed-loop simulation written as CSV.
    Simulate(SimulateArgs),
    /// Chattering parameters of a simulated or recorded trajectory.
    Measure(MeasureArgs),
    /// Time constants at which LSV-LCSMC and super-twisting chatter alike.
    CriticalMu(CriticalMuArgs),
    /// Nyquist locus of the loop and -1/N loci of the controller.
    Nyquist(NyquistArgs),
    /// Re-run a command from its manifest.
    Replay(ReplayArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ControllerKind {
    Lsv,
    Tsv,
    Stc,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn as_str(&self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PowerModeArg {
    Paper,
    Integral,
}

impl From<PowerModeArg> for PowerMode {
    fn from(m: PowerModeArg) -> Self {
        match m {
            PowerModeArg::Paper => PowerMode::Paper,
            PowerModeArg::Integral => PowerMode::Integral,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Hb,
    Simulation,
}

/// Gains shared by every controller family. Defaults: `delta = 5`,
/// `k = k2 = 1.1 delta`, `k1 = 2 sqrt(delta)`, `b = 3`.
#[derive(Debug, Clone, Args, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct GainArgs {
    #[arg(long, default_value_t = 5.5, allow_negative_numbers = true)]
    pub k: f64,
    #[arg(long, default_value_t = 3.0, allow_negative_numbers = true)]
    pub b: f64,
    #[arg(long, default_value_t = 2.0 * 5f64.sqrt(), allow_negative_numbers = true)]
    pub k1: f64,
    #[arg(long, default_value_t = 5.5, allow_negative_numbers = true)]
    pub k2: f64,
    #[arg(long, default_value_t = 5.0, allow_negative_numbers = true)]
    pub delta: f64,
}

impl GainArgs {
    pub fn spec(&self, kind: ControllerKind) -> ControllerSpec {
        let spec = match kind {
            ControllerKind::Lsv => ControllerSpec::lsv(self.k, self.b),
            ControllerKind::Tsv => ControllerSpec::tsv(self.k, self.b),
            ControllerKind::Stc => ControllerSpec::stc(self.k1, self.k2),
        };
        spec.with_delta(self.delta)
    }
}

#[derive(Debug, Clone, Args, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct ControllerArgs {
    #[arg(long, value_enum, default_value_t = ControllerKind::Lsv)]
    pub controller: ControllerKind,
    #[command(flatten)]
    #[serde(flatten)]
    pub gains: GainArgs,
}

impl ControllerArgs {
    pub fn spec(&self) -> ControllerSpec {
        self.gains.spec(self.controller)
    }
}

#[derive(Debug, Clone, Args, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct OutputArgs {
    /// Output file; standard output when absent.
    #[arg(long)]
    #[serde(skip)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct SimArgs {
    /// Actuator time constant.
    #[arg(long, default_value_t = 0.05)]
    pub mu: f64,
    /// Integration step.
    #[arg(long, default_value_t = 1e-4)]
    pub tau: f64,
    /// Simulated time.
    #[arg(long, default_value_t = 20.0)]
    pub horizon: f64,
    /// Initial plant output.
    #[arg(long = "x1-0", default_value_t = 1.0, allow_negative_numbers = true)]
    #[serde(rename = "x1-0")]
    pub x1_0: f64,
    /// `|x1|` above which a run counts as divergent.
    #[arg(long, default_value_t = DEFAULT_DIVERGENCE_THRESHOLD)]
    pub divergence_threshold: f64,
}

#[derive(Debug, Clone, Args, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct PredictArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub controller: ControllerArgs,
    #[arg(long, default_value_t = 0.05)]
    pub mu: f64,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    #[command(flatten)]
    #[serde(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct SweepArgs {
    /// Comma-separated controller list.
    #[arg(long, value_enum, value_delimiter = ',', default_values_t = [ControllerKind::Lsv, ControllerKind::Tsv, ControllerKind::Stc])]
    pub controllers: Vec<ControllerKind>,
    #[command(flatten)]
    #[serde(flatten)]
    pub gains: GainArgs,
    #[arg(long, default_value_t = 0.01)]
    pub mu_start: f64,
    #[arg(long, default_value_t = 0.16)]
    pub mu_stop: f64,
    #[arg(long, default_value_t = 0.01)]
    pub mu_step: f64,
    #[command(flatten)]
    #[serde(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct SimulateArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub controller: ControllerArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub sim: SimArgs,
    /// Keep every n-th sample in the output file.
    #[arg(long, default_value_t = 1)]
    pub every: usize,
    #[command(flatten)]
    #[serde(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct MeasureArgs {
    /// Trajectory CSV (`t,x1,x1dot,u,sigma`); simulated inline when absent.
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[command(flatten)]
    #[serde(flatten)]
    pub controller: ControllerArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub sim: SimArgs,
    /// Leading share of the run discarded as transient.
    #[arg(long, default_value_t = 0.5)]
    pub transient_fraction: f64,
    #[arg(long, value_enum, default_value_t = PowerModeArg::Paper)]
    pub power_mode: PowerModeArg,
    #[command(flatten)]
    #[serde(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct CriticalMuArgs {
    #[arg(long, value_enum, default_value_t = Method::Hb)]
    pub method: Method,
    #[command(flatten)]
    #[serde(flatten)]
    pub gains: GainArgs,
    /// `lo,hi` bisection bracket for the amplitude crossover.
    #[arg(long, value_delimiter = ',', default_values_t = [0.08, 0.16])]
    pub amplitude_bracket: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_values_t = [0.05, 0.12])]
    pub frequency_bracket: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_values_t = [0.08, 0.16])]
    pub power_bracket: Vec<f64>,
    #[arg(long, default_value_t = 1e-4)]
    pub tau: f64,
    #[arg(long, default_value_t = 150.0)]
    pub horizon: f64,
    #[arg(long = "x1-0", default_value_t = 1.0, allow_negative_numbers = true)]
    #[serde(rename = "x1-0")]
    pub x1_0: f64,
    #[arg(long, default_value_t = 1e3)]
    pub divergence_threshold: f64,
    #[arg(long, default_value_t = 0.5)]
    pub transient_fraction: f64,
    /// Bisection tolerance on `mu`.
    #[arg(long, default_value_t = CROSSOVER_TOL)]
    pub tol: f64,
    #[command(flatten)]
    #[serde(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct NyquistArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub controller: ControllerArgs,
    #[arg(long, default_value_t = 0.05)]
    pub mu: f64,
    #[arg(long, default_value_t = 1.0)]
    pub omega_min: f64,
    #[arg(long, default_value_t = 1e4)]
    pub omega_max: f64,
    /// Log-spaced points of the loop locus.
    #[arg(long, default_value_t = 500)]
    pub points: usize,
    #[arg(long, default_value_t = 1e-4)]
    pub amplitude_min: f64,
    #[arg(long, default_value_t = 1.0)]
    pub amplitude_max: f64,
    /// Log-spaced amplitudes of each -1/N curve.
    #[arg(long, default_value_t = 500)]
    pub amplitude_points: usize,
    /// Frequencies at which -1/N is traced over amplitude; defaults to the
    /// predicted chattering frequency.
    #[arg(long, value_delimiter = ',')]
    pub df_omegas: Vec<f64>,
    #[command(flatten)]
    #[serde(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct ReplayArgs {
    /// Manifest written by an earlier run.
    pub manifest: PathBuf,
    /// Output file; the manifest's output path when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}
