use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use crossing_core::data::{Split, DEFAULT_MIN_HEIGHT};
use crossing_core::features::VariableSet;
use crossing_core::RnnType;

#[derive(Debug, Parser)]
#[command(
    name = "crossing",
    version,
    about = "Pedestrian crossing-intention prediction with recurrent networks"
)]
pub struct Cli {
    /// Increase log verbosity (-v info, -vv debug).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    pub verbose: u8,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Train a model and write a checkpoint, history log and run manifest.
    Train(TrainArgs),
    /// Score a checkpoint on a track split.
    Evaluate(EvaluateArgs),
    /// Crossing probabilities at the eight horizons for one pedestrian and frame.
    Predict(PredictArgs),
    /// Turn a history log or prediction CSV into gnuplot data (and optionally SVG).
    Plot(PlotArgs),
    /// Write a small synthetic dataset for trying the other commands.
    Synth(SynthArgs),
}

#[derive(Debug, Clone, Default, Args)]
pub struct TrainArgs {
    /// TOML or JSON file supplying any option below; flags take precedence.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Training tracks (JSON lines).
    #[arg(long)]
    pub train: Option<PathBuf>,
    /// Validation tracks (JSON lines).
    #[arg(long)]
    pub val: Option<PathBuf>,
    /// Feature store covering both splits.
    #[arg(long)]
    pub features: Option<PathBuf>,
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
    /// lstm, gru, bdlstm or bdgru.
    #[arg(long)]
    pub rnn: Option<RnnType>,
    /// all, none, or a list of looking,orientation,movement,center.
    #[arg(long)]
    pub vars: Option<VariableSet>,
    /// Divide image features by each batch's maximum.
    #[arg(long)]
    pub rescale: bool,
    /// Divide image features by the training-set maximum.
    #[arg(long, conflicts_with = "rescale")]
    pub rescale_global: bool,
    #[arg(long)]
    pub hidden: Option<usize>,
    #[arg(long)]
    pub dropout: Option<f64>,
    #[arg(long)]
    pub lr: Option<f64>,
    #[arg(long)]
    pub patience: Option<usize>,
    #[arg(long)]
    pub batch: Option<usize>,
    /// Upper bound on training epochs.
    #[arg(long)]
    pub epochs: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Past frames N before the current one.
    #[arg(long)]
    pub n_past: Option<usize>,
    /// Horizon M in frames.
    #[arg(long)]
    pub horizon: Option<usize>,
    /// Predict at eight equispaced horizons up to M.
    #[arg(long)]
    pub multi_horizon: bool,
    /// Minimum box height kept in the training split.
    #[arg(long)]
    pub min_height: Option<f64>,
    /// Clip the global gradient norm.
    #[arg(long)]
    pub clip_norm: Option<f64>,
    /// Weight of positive labels in the loss.
    #[arg(long)]
    pub pos_weight: Option<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct EvaluateArgs {
    #[arg(long)]
    pub checkpoint: PathBuf,
    #[arg(long)]
    pub tracks: PathBuf,
    #[arg(long)]
    pub features: PathBuf,
    /// Preprocessing applied to the tracks.
    #[arg(long, default_value = "test")]
    pub split: Split,
    #[arg(long, default_value_t = 0.5)]
    pub threshold: f64,
    #[arg(long, default_value_t = 64)]
    pub batch: usize,
    #[arg(long, default_value_t = DEFAULT_MIN_HEIGHT)]
    pub min_height: f64,
    /// Print JSON instead of the table.
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Clone, Args)]
pub struct PredictArgs {
    #[arg(long)]
    pub checkpoint: PathBuf,
    #[arg(long)]
    pub tracks: PathBuf,
    #[arg(long)]
    pub features: PathBuf,
    #[arg(long)]
    pub video: String,
    #[arg(long)]
    pub pedestrian: String,
    /// Position of the current frame within the preprocessed track.
    #[arg(long)]
    pub t: usize,
    #[arg(long, default_value = "test")]
    pub split: Split,
    #[arg(long, default_value_t = DEFAULT_MIN_HEIGHT)]
    pub min_height: f64,
    /// Write the CSV here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct PlotArgs {
    /// History log (JSON lines) or prediction CSV.
    pub input: PathBuf,
    /// Gnuplot data file to write.
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub svg: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct SynthArgs {
    #[arg(long)]
    pub out_dir: PathBuf,
    #[arg(long, default_value_t = 6)]
    pub videos: usize,
    #[arg(long, default_value_t = 3)]
    pub pedestrians: usize,
    #[arg(long, default_value_t = 90)]
    pub frames: usize,
    #[arg(long, default_value_t = 512)]
    pub feature_dim: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}
