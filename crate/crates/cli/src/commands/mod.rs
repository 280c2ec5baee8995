mod evaluate;
mod plot;
mod predict;
mod synth;
mod train;

pub use evaluate::{cmd_evaluate, EvalReport};
pub use plot::{cmd_plot, render_svg, PlotKind};
pub use predict::{cmd_predict, prediction_csv};
pub use synth::cmd_synth;
pub use train::{
    cmd_train, HistoryLine, TrainOutcome, CHECKPOINT_FILE, HISTORY_FILE, MANIFEST_FILE,
};
