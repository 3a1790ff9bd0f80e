//! Validated run settings shared by every subcommand.

use std::path::PathBuf;

use anyhow::{bail, Result};
use serde::Serialize;
use tracelab::measurability::Tolerances;

/// Default block horizon of `classify` and `bounds`.
pub const DEFAULT_BLOCKS: usize = 1 << 20;
/// Default pointwise length of `transform`.
pub const DEFAULT_LEN: usize = 1 << 16;
/// Default seed of randomized checks.
pub const DEFAULT_SEED: u64 = 0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    Json,
    Csv,
    PlotData,
}

/// Built-in inputs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Example {
    Harmonic,
    #[value(name = "a-n")]
    #[serde(rename = "a-n")]
    ANSeq,
    YDif1,
    YDif2,
    XAltDyadic,
    QExample,
}

impl Example {
    pub fn name(self) -> &'static str {
        match self {
            Example::Harmonic => "harmonic",
            Example::ANSeq => "a-n",
            Example::YDif1 => "y-dif1",
            Example::YDif2 => "y-dif2",
            Example::XAltDyadic => "x-alt-dyadic",
            Example::QExample => "q-example",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Source {
    /// `param` is `n` for `a-n` and the dimension for `q-example`.
    Example { example: Example, param: u64 },
    Csv { path: PathBuf },
}

impl Source {
    pub fn label(&self) -> String {
        match self {
            Source::Example { example: Example::ANSeq, param } => format!("a-n({param})"),
            Source::Example { example: Example::QExample, param } => format!("q-example(d={param})"),
            Source::Example { example, .. } => example.name().to_string(),
            Source::Csv { path } => path.display().to_string(),
        }
    }
}

/// Horizons; `None` selects the command default.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Default)]
pub struct Horizons {
    pub len: Option<usize>,
    pub n_blocks: Option<usize>,
    pub k_max: Option<usize>,
    pub m_max: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum TransformOp {
    Cesaro,
    CesaroIter,
    Phi,
    D,
    ShiftRight,
    ShiftLeft,
    Dilate2,
    Rearrange,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum SymbolKind {
    QExample,
    InversePower,
    CsvProfile,
}

/// Class names accepted by `--critical`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum TraceClass {
    Pt,
    Dixmier,
    ConnesDixmier,
    Dm,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum Command {
    Classify {
        source: Source,
        critical: Vec<TraceClass>,
    },
    Bounds {
        source: Source,
    },
    Transform {
        source: Source,
        op: TransformOp,
        m: usize,
    },
    Residue {
        symbol: SymbolKind,
        dim: u32,
        power: Option<f64>,
        profile: Option<PathBuf>,
        n_max: f64,
        anchors: Vec<u32>,
        dump: Option<PathBuf>,
    },
    Verify {
        only: Vec<String>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub command: Command,
    pub horizons: Horizons,
    pub tol: f64,
    pub format: Format,
    pub seed: u64,
    pub out: Option<PathBuf>,
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0 && self.tol < 1.0) {
            bail!("tolerance must lie in (0, 1), got {}", self.tol);
        }
        let h = self.horizons;
        for (name, v) in [("len", h.len), ("blocks", h.n_blocks), ("k-max", h.k_max), ("m-max", h.m_max)] {
            if v == Some(0) {
                bail!("--{name} must be positive");
            }
        }
        match &self.command {
            Command::Residue { dim, n_max, .. } => {
                if *dim == 0 {
                    bail!("--dim must be positive");
                }
                if !(*n_max > 10.0) {
                    bail!("--n-max must exceed 10");
                }
            }
            Command::Classify { source, .. } | Command::Bounds { source } | Command::Transform { source, .. } => {
                if let Source::Example { example: Example::ANSeq | Example::QExample, param: 0 } = source {
                    bail!("--param must be positive");
                }
            }
            Command::Verify { .. } => {}
        }
        Ok(())
    }

    pub fn tolerances(&self) -> Tolerances {
        let d = Tolerances::default();
        Tolerances {
            verdict: self.tol,
            m_max: self.horizons.m_max.unwrap_or(d.m_max),
            k_max: self.horizons.k_max,
            ..d
        }
    }
}
