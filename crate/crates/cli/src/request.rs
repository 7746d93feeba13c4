//! Command-line grammar and the validated [`RunRequest`].

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use qpair_core::{Algorithm, BoolFn, DecodeTable, NoiseModel, PromisePair};
use serde::{Deserialize, Serialize};

use crate::error::CliError;
use crate::serde_str;

/// Environment variable consulted for `--seed` when the flag is absent.
pub const SEED_ENV: &str = "QPAIR_SEED";

#[derive(Parser, Debug)]
#[command(
    name = "qpair",
    version,
    about = "Simulate and verify the entangled two-query paired Deutsch algorithm",
    after_help = "Outcome bitstrings read qubit 0 first: \"100\" means A=1, a1=0, a2=0."
)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Args, Debug)]
struct Common {
    /// Seed for shot sampling and bootstrap resampling.
    #[arg(long, env = SEED_ENV, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = OutputFormat::Json)]
    output: OutputFormat,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Run one algorithm on one pair of oracles.
    Run {
        /// deutsch, entangled or product.
        #[arg(long, default_value = "entangled")]
        algorithm: Algorithm,
        /// B1, B2, C1, C2 or a truth table such as "0:0,1:1".
        #[arg(long)]
        f: BoolFn,
        #[arg(long)]
        g: Option<BoolFn>,
        /// "exact" for analytic probabilities or a positive shot count.
        #[arg(long, default_value = "exact")]
        shots: Shots,
        /// off, table2 or a path to a key=value noise config.
        #[arg(long, default_value = "off")]
        noise: NoiseSpec,
        #[command(flatten)]
        common: Common,
    },
    /// Check every promise pair for correctness, query counts and separability.
    Verify {
        /// Four bits: answers for A=0, A=1, ancilla parity 0, parity 1.
        #[arg(long, default_value = "0101")]
        decode_table: DecodeTable,
        #[command(flatten)]
        common: Common,
    },
    /// Audit the product-state impossibility argument numerically.
    AuditTheorem {
        /// Random product inputs for the CNOT product criterion.
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        /// Grid points per free parameter in each family.
        #[arg(long, default_value_t = 50)]
        grid: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Statistical fidelity of measured counts against a simulated distribution.
    Fidelity {
        /// JSON object or CSV file (`bitstring,count` columns) with raw counts.
        #[arg(long)]
        counts: PathBuf,
        /// e.g. "entangled:B1,B1" or "deutsch:C2".
        #[arg(long)]
        theory: TheorySpec,
        /// Noise applied to the theoretical distribution.
        #[arg(long, default_value = "off")]
        noise: NoiseSpec,
        #[command(flatten)]
        common: Common,
    },
    /// Fidelity against the ideal run as all noise rates are scaled.
    SweepNoise {
        #[arg(long, default_value = "entangled")]
        algorithm: Algorithm,
        #[arg(long)]
        f: BoolFn,
        #[arg(long)]
        g: Option<BoolFn>,
        #[arg(long, default_value = "table2")]
        noise: NoiseSpec,
        #[arg(long, value_delimiter = ',', default_value = "0,0.5,1,2")]
        scales: Vec<f64>,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Run,
    Verify,
    AuditTheorem,
    Fidelity,
    SweepNoise,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Shots {
    Exact,
    Count(u64),
}

impl fmt::Display for Shots {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Shots::Exact => f.write_str("exact"),
            Shots::Count(n) => write!(f, "{n}"),
        }
    }
}

impl FromStr for Shots {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.trim() {
            "exact" => Ok(Shots::Exact),
            other => match other.parse::<u64>() {
                Ok(n) if n > 0 => Ok(Shots::Count(n)),
                _ => Err(format!(
                    "`{other}` is neither \"exact\" nor a positive integer"
                )),
            },
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum NoiseSpec {
    Off,
    Table2,
    Config(PathBuf),
}

impl NoiseSpec {
    /// Loads the model; `None` means noiseless.
    pub fn resolve(&self) -> Result<Option<NoiseModel>, CliError> {
        match self {
            NoiseSpec::Off => Ok(None),
            NoiseSpec::Table2 => Ok(Some(NoiseModel::table2())),
            NoiseSpec::Config(path) => {
                let text = std::fs::read_to_string(path).map_err(|e| {
                    CliError::Input(format!("cannot read noise config {}: {e}", path.display()))
                })?;
                Ok(Some(NoiseModel::from_config(&text).map_err(|e| {
                    CliError::Input(format!("{}: {e}", path.display()))
                })?))
            }
        }
    }
}

impl fmt::Display for NoiseSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NoiseSpec::Off => f.write_str("off"),
            NoiseSpec::Table2 => f.write_str("table2"),
            NoiseSpec::Config(p) => write!(f, "{}", p.display()),
        }
    }
}

impl FromStr for NoiseSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.trim() {
            "" => Err("empty noise specification".into()),
            "off" | "none" => Ok(NoiseSpec::Off),
            "table2" => Ok(NoiseSpec::Table2),
            path => Ok(NoiseSpec::Config(PathBuf::from(path))),
        }
    }
}

/// Which simulated distribution counts are compared against.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TheorySpec {
    pub algorithm: Algorithm,
    pub f: BoolFn,
    pub g: Option<BoolFn>,
}

impl fmt::Display for TheorySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.algorithm, self.f)?;
        if let Some(g) = self.g {
            write!(f, ",{g}")?;
        }
        Ok(())
    }
}

impl FromStr for TheorySpec {
    type Err = String;

    /// `algorithm:f,g`; use `;` between `f` and `g` when they are truth tables.
    fn from_str(s: &str) -> Result<Self, String> {
        let (algorithm, functions) = s
            .split_once(':')
            .ok_or_else(|| format!("`{s}` is not of the form algorithm:f[,g]"))?;
        let algorithm: Algorithm = algorithm.parse().map_err(|e| format!("{e}"))?;
        let parts: Vec<&str> = if functions.contains(';') {
            functions.split(';').collect()
        } else {
            functions.split(',').collect()
        };
        let parse = |t: &str| t.parse::<BoolFn>().map_err(|e| format!("{e}"));
        let (f, g) = match parts.as_slice() {
            [f] => (parse(f)?, None),
            [f, g] => (parse(f)?, Some(parse(g)?)),
            _ => return Err(format!("`{functions}` must name one or two functions")),
        };
        check_functions(algorithm, f, g).map_err(|e| e.to_string())?;
        Ok(Self { algorithm, f, g })
    }
}

fn check_functions(algorithm: Algorithm, f: BoolFn, g: Option<BoolFn>) -> Result<(), CliError> {
    match (algorithm.uses_g(), g) {
        (true, Some(g)) => PromisePair::new(f, g)
            .map(|_| ())
            .map_err(|e| CliError::Usage(e.to_string())),
        (true, None) => Err(CliError::Usage(format!("--g is required for {algorithm}"))),
        (false, Some(_)) => Err(CliError::Usage("--g is not used by deutsch".into())),
        (false, None) => Ok(()),
    }
}

/// A validated invocation. Also echoed back in every result envelope.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunRequest {
    pub command: Command,
    #[serde(
        default,
        skip_serializing_if = "Option::is_none",
        with = "serde_str::opt"
    )]
    pub algorithm: Option<Algorithm>,
    #[serde(
        default,
        skip_serializing_if = "Option::is_none",
        with = "serde_str::opt"
    )]
    pub f: Option<BoolFn>,
    #[serde(
        default,
        skip_serializing_if = "Option::is_none",
        with = "serde_str::opt"
    )]
    pub g: Option<BoolFn>,
    #[serde(with = "serde_str")]
    pub shots: Shots,
    #[serde(with = "serde_str")]
    pub noise: NoiseSpec,
    pub seed: u64,
    pub output: OutputFormat,
    #[serde(
        default,
        skip_serializing_if = "Option::is_none",
        with = "serde_str::opt"
    )]
    pub decode_table: Option<DecodeTable>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub counts: Option<PathBuf>,
    #[serde(
        default,
        skip_serializing_if = "Option::is_none",
        with = "serde_str::opt"
    )]
    pub theory: Option<TheorySpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scales: Option<Vec<f64>>,
}

impl RunRequest {
    fn new(command: Command, common: Common) -> Self {
        Self {
            command,
            algorithm: None,
            f: None,
            g: None,
            shots: Shots::Exact,
            noise: NoiseSpec::Off,
            seed: common.seed,
            output: common.output,
            decode_table: None,
            samples: None,
            grid: None,
            counts: None,
            theory: None,
            scales: None,
        }
    }
}

/// What the command line asked for.
#[derive(Debug)]
pub enum Parsed {
    Request(RunRequest),
    /// `--help` or `--version` text; print it and exit 0.
    Info(String),
}

/// Parses `argv` (including the program name) into a validated request.
pub fn parse_request<I, T>(argv: I) -> Result<Parsed, CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp
                | ErrorKind::DisplayVersion
                | ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand => {
                    Ok(Parsed::Info(e.render().to_string()))
                }
                _ => Err(CliError::Usage(clap_message(&e))),
            };
        }
    };

    let request = match cli.command {
        Cmd::Run {
            algorithm,
            f,
            g,
            shots,
            noise,
            common,
        } => {
            check_functions(algorithm, f, g)?;
            RunRequest {
                algorithm: Some(algorithm),
                f: Some(f),
                g,
                shots,
                noise,
                ..RunRequest::new(Command::Run, common)
            }
        }
        Cmd::Verify {
            decode_table,
            common,
        } => RunRequest {
            decode_table: Some(decode_table),
            ..RunRequest::new(Command::Verify, common)
        },
        Cmd::AuditTheorem {
            samples,
            grid,
            common,
        } => {
            if grid < 2 {
                return Err(CliError::Usage("--grid needs at least 2 points".into()));
            }
            RunRequest {
                samples: Some(samples),
                grid: Some(grid),
                ..RunRequest::new(Command::AuditTheorem, common)
            }
        }
        Cmd::Fidelity {
            counts,
            theory,
            noise,
            common,
        } => RunRequest {
            counts: Some(counts),
            theory: Some(theory),
            noise,
            ..RunRequest::new(Command::Fidelity, common)
        },
        Cmd::SweepNoise {
            algorithm,
            f,
            g,
            noise,
            scales,
            common,
        } => {
            check_functions(algorithm, f, g)?;
            if let Some(bad) = scales.iter().find(|s| !(s.is_finite() && **s >= 0.0)) {
                return Err(CliError::Usage(format!(
                    "--scales entries must be non-negative, got {bad}"
                )));
            }
            RunRequest {
                algorithm: Some(algorithm),
                f: Some(f),
                g,
                noise,
                scales: Some(scales),
                ..RunRequest::new(Command::SweepNoise, common)
            }
        }
    };
    Ok(Parsed::Request(request))
}

/// First meaningful line of a clap error, without its `error:` prefix.
fn clap_message(e: &clap::Error) -> String {
    let rendered = e.render().to_string();
    rendered
        .lines()
        .map(str::trim)
        .find(|l| !l.is_empty())
        .unwrap_or("invalid command line")
        .trim_start_matches("error:")
        .trim()
        .to_owned()
}
