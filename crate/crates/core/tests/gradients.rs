mod common;

use std::time::Instant;

use common::{config, random_sample};
use crossing_core::optim::{backward, compare_gradients, grad_check};
use crossing_core::rnn::HorizonMode;
use crossing_core::{Model, RnnType};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const EPS: f64 = 1e-5;
const TOL: f64 = 1e-4;
const INSTANCES: usize = 20;
const DIM: usize = 8;

fn worst_over_instances(rnn: RnnType, vars: bool, horizon: HorizonMode, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..INSTANCES {
        let model = Model::new(config(rnn, DIM, vars, horizon), &mut rng).unwrap();
        let len = rng.random_range(1..=6);
        let sample = random_sample(&mut rng, len, DIM, vars, horizon.outputs());
        let mask = model.sample_mask(&mut rng);
        let report = grad_check(&model, &sample, EPS, mask.as_deref()).unwrap();
        assert!(report.checked == model.params.num_params());
        if report.max_rel_error >= TOL {
            eprintln!("{rnn} vars={vars}: {report:?}");
        }
        worst = worst.max(report.max_rel_error);
    }
    worst
}

#[test]
fn all_cells_with_and_without_variables() {
    let start = Instant::now();
    for (k, rnn) in RnnType::ALL.into_iter().enumerate() {
        for vars in [false, true] {
            let worst = worst_over_instances(
                rnn,
                vars,
                HorizonMode::Single,
                100 + 2 * k as u64 + vars as u64,
            );
            assert!(
                worst < TOL,
                "{rnn} vars={vars}: max relative error {worst:e}"
            );
        }
    }
    assert!(start.elapsed().as_secs_f64() < 60.0);
}

#[test]
fn multi_horizon_head() {
    for rnn in RnnType::ALL {
        let worst = worst_over_instances(rnn, true, HorizonMode::Multi, 7);
        assert!(worst < TOL, "{rnn}: {worst:e}");
    }
}

#[test]
fn minibatch_gradient() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let model = Model::new(
        config(RnnType::Bdgru, DIM, true, HorizonMode::Single),
        &mut rng,
    )
    .unwrap();
    let batch: Vec<_> = (1..=5)
        .map(|len| random_sample(&mut rng, len, DIM, true, 1))
        .collect();
    let masks: Vec<_> = batch.iter().map(|_| model.sample_mask(&mut rng)).collect();
    let (_, grads) = backward(&model, &batch, &masks, 1.0).unwrap();
    let report = compare_gradients(&model, &batch, &masks, EPS, &grads).unwrap();
    assert!(report.max_rel_error < TOL, "{report:?}");
}

#[test]
fn corrupted_gradient_is_detected() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let model = Model::new(
        config(RnnType::Lstm, DIM, false, HorizonMode::Single),
        &mut rng,
    )
    .unwrap();
    let sample = random_sample(&mut rng, 4, DIM, false, 1);
    let batch = std::slice::from_ref(&sample);
    let masks = [None];
    let (_, mut grads) = backward(&model, batch, &masks, 1.0).unwrap();
    // pick the largest recurrent-input weight gradient so the error is not floored
    let (idx, _) = {
        let t = &grads.tensors()[0];
        assert_eq!(t.0, "fwd.w_ih");
        t.1.iter()
            .enumerate()
            .max_by(|a, b| a.1.abs().total_cmp(&b.1.abs()))
            .map(|(i, v)| (i, *v))
            .unwrap()
    };
    grads.tensors_mut()[0].1[idx] *= 2.0;
    let report = compare_gradients(&model, batch, &masks, EPS, &grads).unwrap();
    assert_eq!(report.worst_param, "fwd.w_ih");
    assert_eq!(report.worst_index, idx);
    assert!((report.max_rel_error - 1.0).abs() < 1e-3, "{report:?}");
}
