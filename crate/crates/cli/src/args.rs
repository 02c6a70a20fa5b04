use std::path::PathBuf;

use clap::{Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(name = "hdk", version, about = "Horizon-depth layout tools")]
pub struct Cli {
    /// Seed recorded in every manifest; overrides the fit config's seed.
    #[arg(long, global = true)]
    pub seed: Option<u64>,

    /// Suppress summaries on stdout.
    #[arg(long, global = true)]
    pub quiet: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Ground-truth horizon depth of an annotated room.
    GenGt {
        annotation: PathBuf,
        #[arg(long, default_value_t = 256)]
        m: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Floor and ceiling depth of a boundary-pair file.
    Render {
        boundary: PathBuf,
        #[arg(long, default_value_t = 256)]
        m: usize,
        #[arg(long)]
        out: PathBuf,
        /// Floor plan and depth curves as SVG.
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Fit boundaries to a depth map and snap them to a Manhattan room.
    Fit {
        /// Depth JSON (`m`, `values`) or one value per line in a `.csv`.
        depth: PathBuf,
        /// JSON with optional `fit` and `snap` sections.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// IoU of predicted against ground-truth annotations, paired by file name.
    Eval {
        pred_dir: PathBuf,
        gt_dir: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Approximation error of coarse ray fans against a dense reference.
    AblateM {
        annotation_dir: PathBuf,
        #[arg(long, value_delimiter = ',', default_value = "16,64,256,1024")]
        m_list: Vec<usize>,
        #[arg(long, default_value_t = 4096)]
        reference_m: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Write the built-in fixture rooms as annotation files.
    Fixtures {
        #[arg(long)]
        out_dir: PathBuf,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::GenGt { .. } => "gen-gt",
            Command::Render { .. } => "render",
            Command::Fit { .. } => "fit",
            Command::Eval { .. } => "eval",
            Command::AblateM { .. } => "ablate-m",
            Command::Fixtures { .. } => "fixtures",
        }
    }
}
