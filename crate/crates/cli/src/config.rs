use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use zeta_moments::verify::Suite;
use zeta_moments::zeta_line::{Guards, Method};
use zeta_moments::QuadSpec;

#[derive(Debug, Parser)]
#[command(
    name = "zeta-moments",
    version,
    about = "Weighted moments of ζ on the critical line and numerical checks of their exact formulas",
    after_help = "Default quadrature policy: --abs-tol 1e-10 --rel-tol 1e-9 --max-depth 32 (series tolerance 1e-12).\n\
                  Every suite runs under this policy; nested quadratures tighten it internally where they need headroom.\n\
                  Exit codes: 0 ok, 1 identity failed, 2 configuration or guard error, 3 tolerance not met.\n\
                  ZM_SIEVE_LIMIT caps the divisor sieve (default 10^7)."
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run an identity suite and report every comparison.
    Verify {
        #[arg(long, value_enum)]
        suite: SuiteArg,
        /// Replace the default δ grid of the moment suites with a single value.
        #[arg(long)]
        delta: Option<f64>,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Evaluate one moment M_{2k}(δ) by the chosen route.
    Moment {
        #[arg(long)]
        k: u32,
        #[arg(long)]
        delta: f64,
        #[arg(long, value_enum, default_value_t = MethodArg::Direct)]
        method: MethodArg,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Evaluate the formula route for k over a δ grid.
    Scan {
        #[arg(long)]
        k: u32,
        /// Comma-separated, strictly monotone.
        #[arg(long, value_delimiter = ',', required = true)]
        delta_grid: Vec<f64>,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Both sides of the polynomial-moment closed form for N = 0..=n-max,
    /// with the integer coefficients T_{2N,j}.
    Table {
        #[arg(long, default_value_t = 4)]
        n_max: u32,
        #[command(flatten)]
        common: CommonArgs,
    },
}

#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    #[arg(long)]
    pub abs_tol: Option<f64>,
    #[arg(long)]
    pub rel_tol: Option<f64>,
    #[arg(long)]
    pub max_depth: Option<u32>,
    #[arg(long, value_enum, default_value_t = OutputFormat::Json)]
    pub format: OutputFormat,
    /// Write the report here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Allow δ below the desk-scale floors.
    #[arg(long)]
    pub override_guards: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Json,
    Csv,
    Text,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SuiteArg {
    Transforms,
    FunctionalEquations,
    BettinConrey,
    Convolution,
    TheoremK1,
    TheoremK2,
    TheoremK3,
    ClosedForm,
    All,
}

impl From<SuiteArg> for Suite {
    fn from(s: SuiteArg) -> Self {
        match s {
            SuiteArg::Transforms => Suite::Transforms,
            SuiteArg::FunctionalEquations => Suite::FunctionalEquations,
            SuiteArg::BettinConrey => Suite::BettinConrey,
            SuiteArg::Convolution => Suite::Convolution,
            SuiteArg::TheoremK1 => Suite::TheoremK1,
            SuiteArg::TheoremK2 => Suite::TheoremK2,
            SuiteArg::TheoremK3 => Suite::TheoremK3,
            SuiteArg::ClosedForm => Suite::ClosedForm,
            SuiteArg::All => Suite::All,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
#[value(rename_all = "snake_case")]
pub enum MethodArg {
    Direct,
    FormulaK1,
    FormulaK2,
    FormulaK3,
    MultiIntegral,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Direct => Method::Direct,
            MethodArg::FormulaK1 => Method::FormulaK1,
            MethodArg::FormulaK2 => Method::FormulaK2,
            MethodArg::FormulaK3 => Method::FormulaK3,
            MethodArg::MultiIntegral => Method::MultiIntegral,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CommandKind {
    Verify(Suite),
    Moment,
    Scan,
    Table,
}

/// Everything a run depends on, after flag parsing and overrides.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub command: CommandKind,
    pub k: u32,
    pub deltas: Vec<f64>,
    pub method: Method,
    pub n_max: u32,
    pub spec: QuadSpec,
    pub format: OutputFormat,
    pub out: Option<PathBuf>,
    pub guards: Guards,
}

impl RunConfig {
    pub fn from_cli(cli: Cli) -> Self {
        let base = |command, common: CommonArgs| {
            let defaults = QuadSpec::default();
            RunConfig {
                command,
                k: 0,
                deltas: Vec::new(),
                method: Method::Direct,
                n_max: 0,
                spec: QuadSpec {
                    abs_tol: common.abs_tol.unwrap_or(defaults.abs_tol),
                    rel_tol: common.rel_tol.unwrap_or(defaults.rel_tol),
                    max_depth: common.max_depth.unwrap_or(defaults.max_depth),
                    ..defaults
                },
                format: common.format,
                out: common.out,
                guards: if common.override_guards {
                    Guards::Override
                } else {
                    Guards::Enforce
                },
            }
        };
        match cli.command {
            Command::Verify {
                suite,
                delta,
                common,
            } => RunConfig {
                deltas: delta.into_iter().collect(),
                ..base(CommandKind::Verify(suite.into()), common)
            },
            Command::Moment {
                k,
                delta,
                method,
                common,
            } => RunConfig {
                k,
                deltas: vec![delta],
                method: method.into(),
                ..base(CommandKind::Moment, common)
            },
            Command::Scan {
                k,
                delta_grid,
                common,
            } => RunConfig {
                k,
                deltas: delta_grid,
                ..base(CommandKind::Scan, common)
            },
            Command::Table { n_max, common } => RunConfig {
                n_max,
                ..base(CommandKind::Table, common)
            },
        }
    }
}
