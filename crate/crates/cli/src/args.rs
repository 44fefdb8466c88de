use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Plain,
    Csv,
    Structured,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ConventionArg {
    /// `k(0, r) = log((1+r)/(1-r))`; hyperbolic rates come out as `log(lambda)`.
    Doubled,
    /// Halves every reported distance, metric and rate.
    Arctanh,
}

/// Backward-orbit dynamics of holomorphic self-maps: Kobayashi geometry,
/// step sequences, divergence rates, type classification, stable-set
/// partitions and pre-model verification.
#[derive(Debug, Parser)]
#[command(name = "orbitlab", version, max_term_width = 100)]
pub struct Cli {
    #[command(subcommand)]
    pub cmd: Cmd,

    /// Map in the grammar `<kind> <q> : (<exprs>) [inverse (<exprs>)]`
    #[arg(long, global = true)]
    pub map: Option<String>,

    /// Config file (TOML keyed like the flags, or a bare map-grammar file)
    #[arg(long = "map-file", global = true)]
    pub map_file: Option<PathBuf>,

    /// Built-in catalog entry
    #[arg(long, global = true)]
    pub catalog: Option<String>,

    /// Catalog parameters, e.g. `lambda=3,theta=0.5`
    #[arg(long, global = true)]
    pub params: Option<String>,

    /// Output format
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,

    /// Write the report to a file instead of stdout
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// Depth of backward/forward sequences
    #[arg(long = "n-max", global = true)]
    pub n_max: Option<usize>,

    /// Horizon in the step size m
    #[arg(long = "m-max", global = true)]
    pub m_max: Option<usize>,

    /// Exit with status 1 when any verdict is inconclusive
    #[arg(long, global = true)]
    pub strict: bool,

    /// Distance normalization of reported values
    #[arg(long, global = true, value_enum)]
    pub convention: Option<ConventionArg>,
}

#[derive(Debug, Subcommand)]
pub enum Cmd {
    /// Forward or backward orbit of a point
    Orbit {
        #[arg(long)]
        point: Option<String>,
        /// Number of steps
        #[arg(long, default_value_t = 20)]
        n: usize,
        /// Iterate the inverse instead of the map
        #[arg(long)]
        backward: bool,
    },
    /// Backward (or forward) m-step sequence and its limit
    Steps {
        #[arg(long)]
        point: Option<String>,
        /// Step size m
        #[arg(long, default_value_t = 1)]
        m: usize,
        /// Forward steps instead of backward
        #[arg(long)]
        forward: bool,
    },
    /// Divergence-rate upper bound `min_j k(x, f^j x)/j`
    Rate {
        #[arg(long)]
        point: Option<String>,
    },
    /// Elliptic / parabolic / hyperbolic classification
    Classify {
        #[arg(long)]
        point: Option<String>,
    },
    /// Denjoy-Wolff point from one or more starts
    Dw {
        /// Start point; repeat for multiple starts
        #[arg(long = "start")]
        starts: Vec<String>,
        /// Forward iterations per start
        #[arg(long)]
        n: Option<usize>,
    },
    /// Dilation estimate at a boundary point of the ball model
    Dilation {
        /// Boundary point: a unit vector like `(-1, 0)` or `inf`
        #[arg(long)]
        zeta: Option<String>,
        /// Approach along the backward orbit of this point (default: radial)
        #[arg(long)]
        point: Option<String>,
        /// Approach sequence length
        #[arg(long, default_value_t = 30)]
        len: usize,
    },
    /// Partition samples into canonical submanifolds
    StablePartition {
        /// Semicolon-separated points, e.g. `(2i, 0); (3i, 0.3i)`
        #[arg(long)]
        samples: Option<String>,
    },
    /// Boundedness of a tangent direction along the backward orbit
    Tangent {
        #[arg(long)]
        point: Option<String>,
        /// Direction vector, e.g. `(1, 0)`
        #[arg(long)]
        dir: Option<String>,
    },
    /// Verify a pre-model (intertwining, step identity, injectivity)
    VerifyPremodel {
        /// Use the built-in shear pre-model family at this leaf parameter
        #[arg(long = "premodel-r")]
        premodel_r: Option<f64>,
    },
    /// Closed-form backward m-step of a special restricted orbit
    SigmaFormula {
        #[arg(long, allow_hyphen_values = true)]
        theta: Option<f64>,
        #[arg(long)]
        lambda: Option<f64>,
        /// Single step size (default: a table up to --m-max)
        #[arg(long)]
        m: Option<usize>,
    },
    /// List or show the built-in example maps
    Catalog {
        #[command(subcommand)]
        which: CatalogCmd,
    },
}

#[derive(Debug, Subcommand)]
pub enum CatalogCmd {
    /// All entry names with a one-line summary
    List,
    /// Full record of one entry
    Show { name: String },
}
