//! Seeded synthetic tracks and features for demos, tests and benchmarks.
//!
//! Pedestrians that will cross show a rising "approach" signal in the first
//! few feature channels during the second before they step onto the road;
//! the remaining channels are noise. Categorical attributes are loosely
//! correlated with the crossing state.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::data::{
    BBox, FrameInput, FrameRecord, ImageSize, Movement, Occlusion, Orientation, PedestrianTrack,
    Sample, SampleSource,
};
use crate::features::{FeatureKey, FeatureStore, Layout};

#[derive(Debug, Clone, PartialEq)]
pub struct SynthConfig {
    pub videos: usize,
    pub pedestrians_per_video: usize,
    pub frames: usize,
    pub feature_dim: usize,
    /// Fraction of pedestrians that eventually cross.
    pub crossing_rate: f64,
    pub frame_rate: u32,
    pub seed: u64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        Self {
            videos: 4,
            pedestrians_per_video: 3,
            frames: 90,
            feature_dim: 512,
            crossing_rate: 0.6,
            frame_rate: 30,
            seed: 0,
        }
    }
}

const SIGNAL_CHANNELS: usize = 4;
const IMAGE: ImageSize = ImageSize {
    width: 1920,
    height: 1080,
};

fn approach(frame: f64, start: Option<f64>) -> f64 {
    match start {
        Some(s) => 1.0 / (1.0 + (-(frame - s + 20.0) / 6.0).exp()),
        None => 0.0,
    }
}

/// Tracks plus a pooled feature store covering every frame.
pub fn synthetic_dataset(cfg: &SynthConfig) -> (Vec<PedestrianTrack>, FeatureStore) {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut store =
        FeatureStore::new(Layout::Pooled, cfg.feature_dim).expect("positive feature dim");
    let mut tracks = Vec::new();
    for v in 0..cfg.videos {
        let video_id = format!("video_{:04}", v + 1);
        for p in 0..cfg.pedestrians_per_video {
            let pedestrian_id = format!("{v}_{p}_b");
            let start = (rng.random::<f64>() < cfg.crossing_rate)
                .then(|| rng.random_range(cfg.frames as f64 * 0.3..cfg.frames as f64 * 0.9));
            let (mut x, y): (f64, f64) = (
                rng.random_range(200.0..1600.0),
                rng.random_range(300.0..600.0),
            );
            let height: f64 = rng.random_range(60.0..260.0);
            let mut frames = Vec::with_capacity(cfg.frames);
            for i in 0..cfg.frames {
                let fi = i as f64;
                let crossing = start.is_some_and(|s| fi >= s);
                let signal = approach(fi, start);
                x = (x + rng.random_range(-3.0..3.0) + if crossing { 4.0 } else { 0.0 })
                    .clamp(0.0, 1800.0);
                let bbox = BBox::new(x, y, x + height * 0.4, y + height);
                let record = FrameRecord {
                    frame_index: i as u32,
                    bbox,
                    occlusion: if rng.random::<f64>() < 0.05 {
                        Occlusion::Partial
                    } else {
                        Occlusion::None
                    },
                    looking: rng.random::<f64>() < 0.2 + 0.5 * signal,
                    orientation: match rng.random_range(0..4) {
                        0 => Orientation::Front,
                        1 => Orientation::Back,
                        2 => Orientation::Left,
                        _ => Orientation::Right,
                    },
                    movement: if rng.random::<f64>() < 0.3 + 0.6 * signal {
                        Movement::Moving
                    } else {
                        Movement::Standing
                    },
                    crossing,
                    image_size: IMAGE,
                };
                let row: Vec<f32> = (0..cfg.feature_dim)
                    .map(|c| {
                        let noise = rng.random_range(0.0..1.0f64);
                        let value = if c < SIGNAL_CHANNELS {
                            3.0 * signal + 0.5 * noise
                        } else {
                            2.0 * noise
                        };
                        value as f32
                    })
                    .collect();
                store
                    .insert(FeatureKey::new(&video_id, &pedestrian_id, i as u32), &row)
                    .expect("unique keys");
                frames.push(record);
            }
            tracks.push(PedestrianTrack {
                video_id: video_id.clone(),
                pedestrian_id,
                frame_rate: cfg.frame_rate,
                frames,
            });
        }
    }
    (tracks, store)
}

/// Twenty image-only sequences of width `dim` whose class is decided by
/// which half of the channels is bright. Labels alternate 1, 0, 1, ...
pub fn separable_fixture(sequences: usize, dim: usize, seq_len: usize, seed: u64) -> Vec<Sample> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..sequences)
        .map(|k| {
            let label = (k % 2 == 0) as u8;
            let inputs = (0..seq_len)
                .map(|_| {
                    let image: Vec<f64> = (0..dim)
                        .map(|c| {
                            let bright = (c < dim / 2) == (label == 1);
                            if bright {
                                rng.random_range(0.6..1.0)
                            } else {
                                rng.random_range(0.0..0.4)
                            }
                        })
                        .collect();
                    FrameInput::image_only(image)
                })
                .collect();
            Sample {
                inputs,
                labels: vec![label],
                source: SampleSource {
                    video_id: "separable".into(),
                    pedestrian_id: format!("s{k}"),
                    t: seq_len - 1,
                },
            }
        })
        .collect()
}
