use std::path::PathBuf;
use std::str::FromStr;

use blowup::ClosedForms;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

/// Comma-separated coordinates, e.g. `0.3,0,0,0,0,0`.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct Point(pub Vec<f64>);

impl FromStr for Point {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let coords = s
            .split(',')
            .map(|c| c.trim().parse::<f64>().map_err(|e| format!("bad coordinate {c:?}: {e}")))
            .collect::<Result<Vec<_>, _>>()?;
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(format!("non-finite coordinate in {s:?}"));
        }
        Ok(Point(coords))
    }
}

#[derive(Debug, Parser, Serialize)]
#[command(name = "blowup", version, about = "Green functions, reduced energy and blow-up predictions")]
pub struct Cli {
    /// DomainSpec JSON file.
    #[arg(long, global = true)]
    pub domain: Option<PathBuf>,

    /// Seed for every random draw (multistart and Monte Carlo).
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    /// Write the JSON report here instead of stdout.
    #[arg(long, global = true)]
    #[serde(skip)]
    pub output: Option<PathBuf>,

    /// Exit with status 3 when a search finds nothing.
    #[arg(long, global = true)]
    pub expect: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case", tag = "name")]
pub enum Command {
    /// Green function, regular part and Robin function at given points.
    GreenEval(GreenEvalArgs),
    /// Robin function along the first axis through the domain center.
    RobinMap(RobinMapArgs),
    /// Reduced energy, its derivatives and the interaction matrix at one configuration.
    PsiEval(PsiEvalArgs),
    /// Critical points of the reduced energy with k peaks.
    FindCritical(FindCriticalArgs),
    /// Predicted number of blow-up solutions for k = 1..k_max.
    Count(CountArgs),
    /// Surface identities on small spheres around the given poles.
    PohozaevVerify(PohozaevArgs),
    /// Concentration rates and heights for each accepted critical point.
    Predict(PredictArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::GreenEval(_) => "green-eval",
            Command::RobinMap(_) => "robin-map",
            Command::PsiEval(_) => "psi-eval",
            Command::FindCritical(_) => "find-critical",
            Command::Count(_) => "count",
            Command::PohozaevVerify(_) => "pohozaev-verify",
            Command::Predict(_) => "predict",
        }
    }
}

#[derive(Debug, Args, Serialize)]
pub struct GreenEvalArgs {
    /// Pole.
    #[arg(long, allow_hyphen_values = true)]
    pub x: Point,
    /// Evaluation point; without it only the Robin function at `x` is reported.
    #[arg(long, allow_hyphen_values = true)]
    pub y: Option<Point>,
}

#[derive(Debug, Args, Serialize)]
pub struct RobinMapArgs {
    /// Number of grid points.
    #[arg(long, default_value_t = 17, value_parser = clap::value_parser!(u32).range(2..=100_000))]
    pub grid: u32,
    /// Fraction of the center's boundary distance covered on each side.
    #[arg(long, default_value_t = 0.9)]
    pub extent: f64,
    /// Also write the samples as CSV.
    #[arg(long)]
    #[serde(skip)]
    pub csv: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct SearchArgs {
    /// Multistart count.
    #[arg(long, default_value_t = 200)]
    pub starts: usize,
    /// Bound on the dimensionless gradient norm.
    #[arg(long)]
    pub grad_tol: Option<f64>,
}

#[derive(Debug, Args, Serialize)]
pub struct PsiEvalArgs {
    /// Peak location; repeat once per peak.
    #[arg(long = "point", required = true, allow_hyphen_values = true)]
    pub points: Vec<Point>,
    /// Peak scales, one per peak.
    #[arg(long, value_delimiter = ',', required = true, allow_hyphen_values = true)]
    pub scales: Vec<f64>,
}

#[derive(Debug, Args, Serialize)]
pub struct FindCriticalArgs {
    /// Number of peaks.
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..=16))]
    pub k: u32,
    #[command(flatten)]
    pub search: SearchArgs,
}

#[derive(Debug, Args, Serialize)]
pub struct CountArgs {
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..=16))]
    pub k_max: u32,
    #[command(flatten)]
    pub search: SearchArgs,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FormsArg {
    Published,
    Rederived,
}

impl From<FormsArg> for ClosedForms {
    fn from(f: FormsArg) -> Self {
        match f {
            FormsArg::Published => ClosedForms::Published,
            FormsArg::Rederived => ClosedForms::Rederived,
        }
    }
}

#[derive(Debug, Args, Serialize)]
pub struct PohozaevArgs {
    /// Pole; repeat for several poles.
    #[arg(long = "pole", required = true, allow_hyphen_values = true)]
    pub poles: Vec<Point>,
    /// Monte Carlo samples per sphere.
    #[arg(long, default_value_t = 100_000)]
    pub samples: usize,
    /// Use the deterministic product rule with this resolution instead of Monte Carlo.
    #[arg(long, conflicts_with = "samples")]
    pub product: Option<usize>,
    /// Sphere radius.
    #[arg(long)]
    pub theta: Option<f64>,
    #[arg(long, value_enum, default_value_t = FormsArg::Published)]
    pub closed_forms: FormsArg,
}

#[derive(Debug, Args, Serialize)]
pub struct PredictArgs {
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..=16))]
    pub k: u32,
    #[arg(long)]
    pub epsilon: f64,
    #[command(flatten)]
    pub search: SearchArgs,
    /// Write the approximate solution along the first axis as CSV, with a JSON sidecar.
    #[arg(long)]
    #[serde(skip)]
    pub field_csv: Option<PathBuf>,
    #[arg(long, default_value_t = 65)]
    pub field_grid: u32,
}
