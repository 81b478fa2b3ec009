use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use serde::{Deserialize, Serialize};

use ridgepath::npsmooth::DEFAULT_K;
use ridgepath::report::DEFAULT_STEPS;

pub const DEFAULT_OUT: &str = "ridgepath-out";

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Linear,
    Np,
    Both,
}

impl Mode {
    pub fn linear(self) -> bool {
        matches!(self, Mode::Linear | Mode::Both)
    }

    pub fn np(self) -> bool {
        matches!(self, Mode::Np | Mode::Both)
    }
}

/// Flags shared by the data subcommands. Anything left unset falls back to
/// the config file, then to the defaults.
#[derive(Debug, Clone, Default, Args)]
pub struct RunArgs {
    /// Input CSV with a header row
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Outcome column
    #[arg(long)]
    pub y: Option<String>,
    /// Predictor columns, comma separated, in model order
    #[arg(long, value_delimiter = ',')]
    pub x: Option<Vec<String>>,
    /// Basis functions per smooth (>= 4)
    #[arg(long)]
    pub k: Option<usize>,
    /// Uniform trace grid points on [0, p], knot added (>= 2)
    #[arg(long)]
    pub steps: Option<usize>,
    /// Which models to fit
    #[arg(long, value_enum)]
    pub mode: Option<Mode>,
    /// Output directory
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// JSON config file; flags override its values
    #[arg(long)]
    pub config: Option<PathBuf>,
}

/// Predictor list in a config file: an array or one comma separated string.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum ColumnList {
    List(Vec<String>),
    Joined(String),
}

impl ColumnList {
    fn into_vec(self) -> Vec<String> {
        match self {
            ColumnList::List(v) => v,
            ColumnList::Joined(s) => split_list(&s),
        }
    }
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    input: Option<PathBuf>,
    y: Option<String>,
    x: Option<ColumnList>,
    k: Option<usize>,
    steps: Option<usize>,
    mode: Option<Mode>,
    out: Option<PathBuf>,
    seed: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub input: PathBuf,
    pub y_column: String,
    pub x_columns: Vec<String>,
    pub k: usize,
    pub steps: usize,
    pub out_dir: PathBuf,
    pub mode: Mode,
    pub seed: Option<u64>,
}

/// Bad flags, config or input data. Reported with exit code 2.
#[derive(Debug)]
pub struct UsageError(pub String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

fn split_list(s: &str) -> Vec<String> {
    s.split(',').map(|c| c.trim().to_string()).collect()
}

fn read_config(path: &Path) -> anyhow::Result<ConfigFile> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| usage(format!("cannot read config {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| usage(format!("invalid config {}: {e}", path.display())))
}

impl RunConfig {
    /// Flags over config file over defaults, then validated.
    pub fn resolve(args: &RunArgs) -> anyhow::Result<Self> {
        let file = match &args.config {
            Some(p) => read_config(p)?,
            None => ConfigFile::default(),
        };
        let input = args
            .input
            .clone()
            .or(file.input)
            .ok_or_else(|| usage("no input file given (--input)"))?;
        let y_column = args
            .y
            .clone()
            .or(file.y)
            .ok_or_else(|| usage("no outcome column given (--y)"))?;
        let x_columns = args
            .x
            .clone()
            .map(|v| v.iter().flat_map(|s| split_list(s)).collect())
            .or(file.x.map(ColumnList::into_vec))
            .ok_or_else(|| usage("no predictor columns given (--x)"))?;
        let cfg = RunConfig {
            input,
            y_column,
            x_columns,
            k: args.k.or(file.k).unwrap_or(DEFAULT_K),
            steps: args.steps.or(file.steps).unwrap_or(DEFAULT_STEPS),
            out_dir: args
                .out
                .clone()
                .or(file.out)
                .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT)),
            mode: args.mode.or(file.mode).unwrap_or(Mode::Both),
            seed: file.seed,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> anyhow::Result<()> {
        if self.x_columns.is_empty() || self.x_columns.iter().any(String::is_empty) {
            return Err(usage("predictor list is empty or has an empty name"));
        }
        for (i, a) in self.x_columns.iter().enumerate() {
            if self.x_columns[..i].contains(a) {
                return Err(usage(format!("predictor `{a}` listed twice")));
            }
        }
        if self.x_columns.contains(&self.y_column) {
            return Err(usage(format!(
                "outcome `{}` is also listed as a predictor",
                self.y_column
            )));
        }
        if self.k < 4 {
            return Err(usage(format!("k must be >= 4, got {}", self.k)));
        }
        if self.steps < 2 {
            return Err(usage(format!("steps must be >= 2, got {}", self.steps)));
        }
        Ok(())
    }

    pub fn x_refs(&self) -> Vec<&str> {
        self.x_columns.iter().map(String::as_str).collect()
    }
}
