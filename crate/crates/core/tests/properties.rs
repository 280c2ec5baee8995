mod common;

use common::random_sample;
use crossing_core::data::{FrameInput, WindowSpec};
use crossing_core::dataset::{build_samples, sample_at};
use crossing_core::features::{assemble_input, embed_dim, Embeddings, VariableSet};
use crossing_core::metrics::{evaluate, EvalOptions};
use crossing_core::optim::{bce_loss, sample_loss};
use crossing_core::rnn::HorizonMode;
use crossing_core::synth::{synthetic_dataset, SynthConfig};
use crossing_core::{Error, Model, ModelConfig, RnnType};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn all_positive_predictor_signature() {
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    // 188 of 300 positive
    let samples: Vec<_> = (0..300)
        .map(|k| {
            let mut s = random_sample(&mut rng, 3, 4, false, 1);
            s.labels = vec![(k < 188) as u8];
            s
        })
        .collect();
    // a zero model outputs exactly 0.5, which the >= threshold calls positive
    let model = Model::zeros(ModelConfig {
        image_dim: 4,
        vars: VariableSet::NONE,
        ..Default::default()
    })
    .unwrap();
    let m = evaluate(&model, &samples, &EvalOptions::default()).unwrap();
    assert!((m.accuracy - 62.67).abs() < 0.01);
    assert!((m.precision - 62.67).abs() < 0.01);
    assert_eq!(m.recall, 100.0);
    let row = m.to_string();
    assert!(row.contains("62.67") && row.contains("100.00"), "{row}");
}

#[test]
fn positive_rate_predictor_loss_is_label_entropy() {
    let q: f64 = 188.0 / 300.0;
    let entropy = -(q * q.ln() + (1.0 - q) * (1.0 - q).ln());
    let mean = (188.0 * bce_loss(q, 1) + 112.0 * bce_loss(q, 0)) / 300.0;
    assert!((mean - entropy).abs() < 1e-12);
    assert!((sample_loss(&[0.5], &[1], 1.0) - 2f64.ln()).abs() < 1e-12);
}

#[test]
fn embedding_widths_and_input_size() {
    assert_eq!(embed_dim(2).unwrap(), 2);
    assert_eq!(embed_dim(4).unwrap(), 3);
    assert_eq!(embed_dim(120).unwrap(), 50);
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let emb = Embeddings::new(&VariableSet::ALL, &mut rng);
    let frame = FrameInput {
        image: vec![0.0; 512].into(),
        looking: Some(1),
        orientation: Some(2),
        movement: Some(0),
        center: Some((0.5, 0.5)),
    };
    assert_eq!(
        assemble_input(&frame, &emb, &VariableSet::ALL, 512)
            .unwrap()
            .len(),
        521
    );
    assert_eq!(VariableSet::ALL.extra_dim(), 9);
    assert_eq!(
        ModelConfig {
            vars: VariableSet::ALL,
            ..Default::default()
        }
        .input_dim(),
        521
    );
}

#[test]
fn multi_horizon_prediction_from_tracks() {
    let (tracks, store) = synthetic_dataset(&SynthConfig {
        videos: 1,
        pedestrians_per_video: 2,
        frames: 60,
        feature_dim: 16,
        ..Default::default()
    });
    let spec = WindowSpec::multi(15, 30, 8).unwrap();
    assert_eq!(spec.offsets, vec![4, 8, 11, 15, 19, 23, 26, 30]);
    let samples = build_samples(&tracks, &store, &spec).unwrap();
    assert_eq!(samples.len(), 2 * (60 - 15 - 30));
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for rnn in RnnType::ALL {
        let model = Model::new(
            ModelConfig {
                rnn_type: rnn,
                image_dim: 16,
                vars: VariableSet::ALL,
                horizon: HorizonMode::Multi,
                ..Default::default()
            },
            &mut rng,
        )
        .unwrap();
        for t in [15, 29] {
            let probs = model
                .predict(&sample_at(&tracks[0], &store, &spec, t).unwrap())
                .unwrap();
            assert_eq!(probs.len(), 8);
            assert!(probs.iter().all(|&p| p > 0.0 && p < 1.0));
        }
    }
    for t in [0, 14, 30, 59] {
        assert!(matches!(
            sample_at(&tracks[0], &store, &spec, t),
            Err(Error::WindowBounds { .. })
        ));
    }
}
