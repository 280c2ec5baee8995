//! Cutting tracks into fixed-length observation windows with future labels.

use serde::{Deserialize, Serialize};

use super::track::PedestrianTrack;
use crate::error::{Error, Result};

/// Default number of past frames N (0.5 s at 30 fps).
pub const DEFAULT_N_PAST: usize = 15;
/// Default prediction horizon M in frames (1 s at 30 fps).
pub const DEFAULT_HORIZON: usize = 30;
/// Number of equispaced horizons in multi-horizon mode.
pub const MULTI_HORIZON_STEPS: usize = 8;

/// Observation length and label offsets of a window.
///
/// A window ending at frame `t` observes frames `t-N ..= t` and is labelled
/// with the crossing flag at `t + offset` for every offset. The largest
/// offset is the horizon M.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WindowSpec {
    pub n_past: usize,
    pub offsets: Vec<usize>,
}

impl WindowSpec {
    pub fn single(n_past: usize, horizon: usize) -> Result<Self> {
        if horizon == 0 {
            return Err(Error::InvalidArgument(
                "horizon must be at least 1 frame".into(),
            ));
        }
        Ok(Self {
            n_past,
            offsets: vec![horizon],
        })
    }

    /// `steps` offsets equispaced over `(0, horizon]`, rounded to the
    /// nearest frame and never below 1.
    pub fn multi(n_past: usize, horizon: usize, steps: usize) -> Result<Self> {
        if horizon == 0 || steps == 0 {
            return Err(Error::InvalidArgument(
                "horizon and steps must be positive".into(),
            ));
        }
        let offsets = (1..=steps)
            .map(|h| ((horizon * h) as f64 / steps as f64).round().max(1.0) as usize)
            .collect();
        Ok(Self { n_past, offsets })
    }

    pub fn horizon(&self) -> usize {
        self.offsets.iter().copied().max().unwrap_or(0)
    }

    /// Sequence length N + 1.
    pub fn seq_len(&self) -> usize {
        self.n_past + 1
    }

    /// Number of windows in a track of length `p`: `max(0, P - N - M)`.
    pub fn count(&self, p: usize) -> usize {
        p.saturating_sub(self.n_past + self.horizon())
    }

    /// Legal window end frames, `[N, P - M - 1]`.
    pub fn t_range(&self, p: usize) -> std::ops::Range<usize> {
        self.n_past..self.n_past + self.count(p)
    }

    pub fn check_t(&self, p: usize, t: usize) -> Result<()> {
        if self.t_range(p).contains(&t) {
            Ok(())
        } else {
            Err(Error::WindowBounds {
                t,
                lo: self.n_past,
                hi: p as i64 - self.horizon() as i64 - 1,
            })
        }
    }
}

/// Positions (into the track's frame list) used by one window.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Window {
    pub t: usize,
    pub inputs: std::ops::RangeInclusive<usize>,
    pub label_positions: Vec<usize>,
    pub labels: Vec<u8>,
}

pub fn window_at(track: &PedestrianTrack, spec: &WindowSpec, t: usize) -> Result<Window> {
    spec.check_t(track.len(), t)?;
    let label_positions: Vec<usize> = spec.offsets.iter().map(|o| t + o).collect();
    let labels = label_positions
        .iter()
        .map(|&i| track.frames[i].crossing as u8)
        .collect();
    Ok(Window {
        t,
        inputs: t - spec.n_past..=t,
        label_positions,
        labels,
    })
}

/// All windows of a track, in increasing `t`.
pub fn make_windows(track: &PedestrianTrack, spec: &WindowSpec) -> Vec<Window> {
    spec.t_range(track.len())
        .map(|t| window_at(track, spec, t).expect("t within range"))
        .collect()
}
