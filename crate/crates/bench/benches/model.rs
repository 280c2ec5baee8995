use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use crossing_core::data::{FrameInput, Sample, SampleSource};
use crossing_core::features::VariableSet;
use crossing_core::optim::backward;
use crossing_core::{Model, ModelConfig, RnnType};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn batch(rng: &mut ChaCha8Rng, size: usize, len: usize, dim: usize) -> Vec<Sample> {
    (0..size)
        .map(|k| Sample {
            inputs: (0..len)
                .map(|_| FrameInput {
                    image: (0..dim).map(|_| rng.random::<f64>()).collect(),
                    looking: Some(rng.random_range(0..2)),
                    orientation: Some(rng.random_range(0..4)),
                    movement: Some(rng.random_range(0..2)),
                    center: Some((rng.random(), rng.random())),
                })
                .collect(),
            labels: vec![(k % 2) as u8],
            source: SampleSource {
                video_id: "bench".into(),
                pedestrian_id: k.to_string(),
                t: len - 1,
            },
        })
        .collect()
}

fn model(rnn: RnnType, rng: &mut ChaCha8Rng) -> Model {
    Model::new(
        ModelConfig {
            rnn_type: rnn,
            vars: VariableSet::ALL,
            ..Default::default()
        },
        rng,
    )
    .unwrap()
}

fn forward(c: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let samples = batch(&mut rng, 64, 16, 512);
    let mut group = c.benchmark_group("forward_batch64_len16");
    for rnn in RnnType::ALL {
        let m = model(rnn, &mut rng);
        group.bench_with_input(BenchmarkId::from_parameter(rnn), &samples, |b, s| {
            b.iter(|| {
                for sample in s {
                    black_box(m.predict(sample).unwrap());
                }
            })
        });
    }
    group.finish();
}

fn train_step(c: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let samples = batch(&mut rng, 64, 16, 512);
    let mut group = c.benchmark_group("backward_batch64_len16");
    for rnn in RnnType::ALL {
        let m = model(rnn, &mut rng);
        let masks: Vec<_> = samples.iter().map(|_| m.sample_mask(&mut rng)).collect();
        group.bench_with_input(BenchmarkId::from_parameter(rnn), &samples, |b, s| {
            b.iter(|| black_box(backward(&m, s, &masks, 1.0).unwrap()))
        });
    }
    group.finish();
}

criterion_group!(benches, forward, train_step);
criterion_main!(benches);
