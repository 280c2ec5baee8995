use crate::error::{Error, Result};

/// Spatial extent of the raw feature maps (7 × 7).
pub const POOL_CELLS: usize = 49;

/// Averages each channel of a `channels × 7 × 7` map (channel-major) down to
/// one value, giving a flat vector of length `channels`.
pub fn avg_pool(map: &[f32], channels: usize) -> Result<Vec<f64>> {
    if channels == 0 || map.len() != channels * POOL_CELLS {
        return Err(Error::Shape(format!(
            "expected {channels}x7x7 = {} values, got {}",
            channels * POOL_CELLS,
            map.len()
        )));
    }
    Ok(map
        .chunks_exact(POOL_CELLS)
        .map(|cells| cells.iter().map(|&v| v as f64).sum::<f64>() / POOL_CELLS as f64)
        .collect())
}
