use std::io::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use tracelab_cli::config::{
    Command, Example, Format, Horizons, RunConfig, Source, SymbolKind, TraceClass, TransformOp, DEFAULT_SEED,
};
use tracelab_cli::{init_threads, run};

/// Numerical diagnostics for singular traces on weak-l1 sequences.
#[derive(Debug, Parser)]
#[command(name = "tracelab", version)]
struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value = "json")]
    format: Format,
    /// Verdict tolerance, in (0, 1).
    #[arg(long, global = true, default_value_t = 0.02)]
    tol: f64,
    /// Seed of randomized checks.
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Debug, Args)]
struct SourceArgs {
    /// Built-in example.
    #[arg(long, value_enum, conflicts_with = "input", required_unless_present = "input")]
    example: Option<Example>,
    /// CSV file of `index,value` or `index,re,im` rows.
    #[arg(long)]
    input: Option<PathBuf>,
    /// `n` for `a-n`, dimension for `q-example`.
    #[arg(long, default_value_t = 1)]
    param: u64,
}

impl SourceArgs {
    fn source(&self) -> Source {
        match (&self.example, &self.input) {
            (Some(e), _) => Source::Example {
                example: *e,
                param: self.param,
            },
            (None, Some(p)) => Source::Csv { path: p.clone() },
            (None, None) => unreachable!("clap requires one of --example, --input"),
        }
    }
}

#[derive(Debug, Args)]
struct HorizonArgs {
    /// Number of dyadic blocks.
    #[arg(long)]
    blocks: Option<usize>,
    /// Pointwise length for `transform`.
    #[arg(long)]
    len: Option<usize>,
    /// Longest Sucheston window.
    #[arg(long)]
    k_max: Option<usize>,
    /// Deepest Cesaro iterate.
    #[arg(long)]
    m_max: Option<usize>,
}

impl HorizonArgs {
    fn horizons(&self) -> Horizons {
        Horizons {
            len: self.len,
            n_blocks: self.blocks,
            k_max: self.k_max,
            m_max: self.m_max,
        }
    }
}

#[derive(Debug, Subcommand)]
enum Cmd {
    /// Measurability verdicts and trace interval of a diagonal operator.
    Classify {
        #[command(flatten)]
        source: SourceArgs,
        #[command(flatten)]
        horizons: HorizonArgs,
        /// Classes whose Undecided verdict makes the exit code 2.
        #[arg(long, value_enum, value_delimiter = ',')]
        critical: Vec<TraceClass>,
    },
    /// Banach-limit interval of the block sums.
    Bounds {
        #[command(flatten)]
        source: SourceArgs,
        #[command(flatten)]
        horizons: HorizonArgs,
    },
    /// Applies one sequence operator.
    Transform {
        #[command(flatten)]
        source: SourceArgs,
        #[command(flatten)]
        horizons: HorizonArgs,
        #[arg(long, value_enum)]
        op: TransformOp,
        /// Iterate count for `cesaro-iter`.
        #[arg(long, default_value_t = 1)]
        m: usize,
    },
    /// Residue diagnostics of a radial symbol.
    Residue {
        #[arg(long, value_enum, default_value = "q-example")]
        symbol: SymbolKind,
        #[arg(long, default_value_t = 1)]
        dim: u32,
        /// Exponent of `inverse-power`.
        #[arg(long)]
        power: Option<f64>,
        /// CSV of `r,q` knots for `csv-profile`.
        #[arg(long)]
        profile: Option<PathBuf>,
        #[arg(long, default_value_t = 1e6)]
        n_max: f64,
        #[arg(long, value_delimiter = ',', default_value = "3,4")]
        anchors: Vec<u32>,
        /// Also write `n,I_n,Res_2^(n+1)` rows here.
        #[arg(long)]
        dump: Option<PathBuf>,
        #[command(flatten)]
        horizons: HorizonArgs,
    },
    /// Runs the acceptance suite.
    Verify {
        /// Criterion ids or names.
        #[arg(long, value_delimiter = ',')]
        only: Vec<String>,
    },
}

fn config(cli: Cli) -> Result<RunConfig> {
    let (command, horizons) = match cli.command {
        Cmd::Classify { source, horizons, critical } => (
            Command::Classify {
                source: source.source(),
                critical,
            },
            horizons.horizons(),
        ),
        Cmd::Bounds { source, horizons } => (Command::Bounds { source: source.source() }, horizons.horizons()),
        Cmd::Transform { source, horizons, op, m } => (
            Command::Transform {
                source: source.source(),
                op,
                m,
            },
            horizons.horizons(),
        ),
        Cmd::Residue {
            symbol,
            dim,
            power,
            profile,
            n_max,
            anchors,
            dump,
            horizons,
        } => {
            if symbol == SymbolKind::InversePower && power.is_none() {
                bail!("--symbol inverse-power needs --power");
            }
            if symbol == SymbolKind::CsvProfile && profile.is_none() {
                bail!("--symbol csv-profile needs --profile");
            }
            (
                Command::Residue {
                    symbol,
                    dim,
                    power,
                    profile,
                    n_max,
                    anchors,
                    dump,
                },
                horizons.horizons(),
            )
        }
        Cmd::Verify { only } => (Command::Verify { only }, Horizons::default()),
    };
    let cfg = RunConfig {
        command,
        horizons,
        tol: cli.tol,
        format: cli.format,
        seed: cli.seed,
        out: cli.out,
    };
    cfg.validate()?;
    Ok(cfg)
}

fn main_inner() -> Result<i32> {
    let cfg = config(Cli::parse())?;
    init_threads()?;
    let (output, outcome) = run(&cfg)?;
    let text = output.render(cfg.format);
    match &cfg.out {
        Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display()))?,
        None => std::io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(outcome.code())
}

fn main() -> ExitCode {
    match main_inner() {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
