use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use tileupb::verify::tol;
use tileupb::{SeesawConfig, Variant};

use crate::error::{CliError, CliResult};

#[derive(Debug, Parser)]
#[command(name = "tileupb", version, about = "Construct and verify tiles UPBs in C^d ⊗ C^d")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write the UPB, COPB, density matrices and entangled basis as JSON.
    Construct(CommonArgs),
    /// Run a verification suite and write report.json.
    Verify(VerifyArgs),
    /// Write an SVG of the tile layout.
    Diagram(CommonArgs),
    /// Summarize report files as a markdown table.
    Report(ReportArgs),
}

#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    /// Local dimension (odd, at least 3).
    #[arg(long)]
    pub d: usize,
    #[arg(long, default_value = "dft", value_parser = parse_variant)]
    pub variant: Variant,
    /// Output directory.
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    All,
    Orthogonality,
    Unextendible,
    Ppt,
    Decomposition,
    Edge,
    Extreme,
    Discrimination,
}

impl Suite {
    pub fn name(self) -> &'static str {
        match self {
            Suite::All => "all",
            Suite::Orthogonality => "orthogonality",
            Suite::Unextendible => "unextendible",
            Suite::Ppt => "ppt",
            Suite::Decomposition => "decomposition",
            Suite::Edge => "edge",
            Suite::Extreme => "extreme",
            Suite::Discrimination => "discrimination",
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[arg(long, value_enum, default_value_t = Suite::All)]
    pub suite: Suite,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Seesaw restarts per search.
    #[arg(long, default_value_t = 200)]
    pub restarts: usize,
    #[arg(long, default_value_t = 500)]
    pub max_iters: usize,
    /// Node budget for the exhaustive unextendibility search.
    #[arg(long, default_value_t = 1_000_000_000)]
    pub budget: u64,
    #[arg(long, default_value_t = tol::FOUND)]
    pub tol_found: f64,
    #[arg(long, default_value_t = tol::ABSENT)]
    pub tol_absent: f64,
    #[arg(long, default_value_t = 1e-12)]
    pub tol_converge: f64,
    #[arg(long, default_value_t = tol::SPECTRAL)]
    pub tol_ppt: f64,
    /// Record wall time on each certificate (makes reports non-reproducible).
    #[arg(long)]
    pub timings: bool,
    /// Add an unequal four-term mixture at d = 3 as an expected NPT entry.
    #[arg(
        long,
        value_name = "P1,P2,P3,P4",
        num_args = 0..=1,
        default_missing_value = "0.5,0.16666666666666666,0.16666666666666666,0.16666666666666666"
    )]
    pub inject_unequal: Option<String>,
}

#[derive(Debug, Clone, Args)]
pub struct ReportArgs {
    /// Report files or directories containing them.
    #[arg(required = true)]
    pub inputs: Vec<PathBuf>,
    /// Also write the table to this file.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn parse_variant(s: &str) -> Result<Variant, String> {
    s.parse().map_err(|e: tileupb::Error| e.to_string())
}

/// Everything a verification run depends on.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub d: usize,
    pub variant: Variant,
    pub seed: u64,
    pub budget: u64,
    pub seesaw: SeesawConfig,
    pub tol_ppt: f64,
    pub out: PathBuf,
    pub timings: bool,
    pub inject_unequal: Option<[f64; 4]>,
}

impl RunConfig {
    pub fn from_args(a: &VerifyArgs) -> CliResult<Self> {
        tileupb::tiles::check_dimension(a.common.d)?;
        let seesaw = SeesawConfig {
            restarts: a.restarts,
            max_iters: a.max_iters,
            seed: a.seed,
            tol_converge: a.tol_converge,
            tol_found: a.tol_found,
            tol_absent: a.tol_absent,
        };
        seesaw.validate()?;
        if a.tol_ppt.is_nan() || a.tol_ppt < 0.0 {
            return Err(CliError::Usage("--tol-ppt must be non-negative".into()));
        }
        let inject_unequal = match &a.inject_unequal {
            None => None,
            Some(s) => {
                if a.common.d != 3 {
                    return Err(CliError::Usage("--inject-unequal needs --d 3".into()));
                }
                Some(parse_weights(s)?)
            }
        };
        Ok(RunConfig {
            d: a.common.d,
            variant: a.common.variant,
            seed: a.seed,
            budget: a.budget,
            seesaw,
            tol_ppt: a.tol_ppt,
            out: a.common.out.clone(),
            timings: a.timings,
            inject_unequal,
        })
    }
}

fn parse_weights(s: &str) -> CliResult<[f64; 4]> {
    let parsed: Vec<f64> = s
        .split(',')
        .map(|x| x.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|e| CliError::Usage(format!("bad --inject-unequal value {s:?}: {e}")))?;
    parsed
        .try_into()
        .map_err(|v: Vec<f64>| CliError::Usage(format!("--inject-unequal takes 4 weights, got {}", v.len())))
}
