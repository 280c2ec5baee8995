#![allow(dead_code)]

use crossing_core::data::{FrameInput, Sample, SampleSource};
use crossing_core::features::VariableSet;
use crossing_core::rnn::HorizonMode;
use crossing_core::{ModelConfig, RnnType};
use rand::Rng;

pub fn random_sample<R: Rng>(
    rng: &mut R,
    len: usize,
    dim: usize,
    vars: bool,
    outputs: usize,
) -> Sample {
    let inputs = (0..len)
        .map(|_| {
            let image: Vec<f64> = (0..dim).map(|_| rng.random_range(0.0..1.0)).collect();
            if vars {
                FrameInput {
                    image: image.into(),
                    looking: Some(rng.random_range(0..2)),
                    orientation: Some(rng.random_range(0..4)),
                    movement: Some(rng.random_range(0..2)),
                    center: Some((rng.random(), rng.random())),
                }
            } else {
                FrameInput::image_only(image)
            }
        })
        .collect();
    Sample {
        inputs,
        labels: (0..outputs).map(|_| rng.random_range(0..2)).collect(),
        source: SampleSource {
            video_id: "rand".into(),
            pedestrian_id: "p".into(),
            t: len.saturating_sub(1),
        },
    }
}

pub fn config(rnn_type: RnnType, dim: usize, vars: bool, horizon: HorizonMode) -> ModelConfig {
    ModelConfig {
        rnn_type,
        image_dim: dim,
        vars: if vars {
            VariableSet::ALL
        } else {
            VariableSet::NONE
        },
        horizon,
        ..Default::default()
    }
}
