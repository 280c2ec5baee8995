//! Binary cross-entropy on sigmoid outputs.

/// Probabilities are clamped to `[PROB_CLAMP, 1 - PROB_CLAMP]` before the log.
pub const PROB_CLAMP: f64 = 1e-7;

/// `-[w·y·ln p + (1-y)·ln(1-p)]` with `w = pos_weight`.
pub fn weighted_bce(p: f64, y: u8, pos_weight: f64) -> f64 {
    let p = p.clamp(PROB_CLAMP, 1.0 - PROB_CLAMP);
    if y != 0 {
        -pos_weight * p.ln()
    } else {
        -(1.0 - p).ln()
    }
}

/// `-[y·ln p + (1-y)·ln(1-p)]`.
pub fn bce_loss(p: f64, y: u8) -> f64 {
    weighted_bce(p, y, 1.0)
}

/// Mean BCE over horizons.
pub fn sample_loss(probs: &[f64], labels: &[u8], pos_weight: f64) -> f64 {
    let k = probs.len() as f64;
    probs
        .iter()
        .zip(labels)
        .map(|(&p, &y)| weighted_bce(p, y, pos_weight))
        .sum::<f64>()
        / k
}

/// Derivative of [`weighted_bce`] with respect to the pre-sigmoid logit.
/// Zero where the clamp is active.
pub fn bce_logit_grad(p: f64, y: u8, pos_weight: f64) -> f64 {
    if !(PROB_CLAMP..=1.0 - PROB_CLAMP).contains(&p) {
        return 0.0;
    }
    if y != 0 {
        pos_weight * (p - 1.0)
    } else {
        p
    }
}
