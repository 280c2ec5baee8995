//! Track annotations, preprocessing and windowing.

mod prep;
mod sample;
mod track;
mod window;

pub use prep::{
    downsample_track, filter_training_track, normalize_center, prepare_tracks, square_bbox, Split,
    SquareBox, DEFAULT_MIN_HEIGHT,
};
pub use sample::{FrameInput, Sample, SampleSource};
pub use track::{
    parse_tracks, read_tracks, save_tracks, write_tracks, BBox, FrameRecord, ImageSize, Movement,
    Occlusion, Orientation, PedestrianTrack,
};
pub use window::{
    make_windows, window_at, Window, WindowSpec, DEFAULT_HORIZON, DEFAULT_N_PAST,
    MULTI_HORIZON_STEPS,
};
