//! Learned embeddings for categorical pedestrian attributes.

use rand::Rng;

use crate::error::{Error, Result};
use crate::linalg::Matrix;

/// Upper bound on any embedding width.
pub const MAX_EMBED_DIM: usize = 50;
/// Half-width of the uniform range used to initialize embedding rows.
pub const EMBED_INIT_BOUND: f64 = 0.05;

/// Embedding width for a variable with `cardinality` categories:
/// `min(cardinality / 2 + 1, 50)`.
pub fn embed_dim(cardinality: usize) -> Result<usize> {
    if cardinality < 2 {
        return Err(Error::InvalidArgument(format!(
            "embedding cardinality must be at least 2, got {cardinality}"
        )));
    }
    Ok((cardinality / 2 + 1).min(MAX_EMBED_DIM))
}

/// `cardinality × dim` lookup table.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingTable {
    pub weights: Matrix,
}

impl EmbeddingTable {
    pub fn new<R: Rng + ?Sized>(cardinality: usize, rng: &mut R) -> Result<Self> {
        let dim = embed_dim(cardinality)?;
        Ok(Self {
            weights: Matrix::uniform(cardinality, dim, EMBED_INIT_BOUND, rng),
        })
    }

    pub fn zeros(cardinality: usize) -> Result<Self> {
        Ok(Self {
            weights: Matrix::zeros(cardinality, embed_dim(cardinality)?),
        })
    }

    pub fn from_matrix(weights: Matrix) -> Self {
        Self { weights }
    }

    pub fn zeros_like(&self) -> Self {
        Self {
            weights: Matrix::zeros(self.weights.rows, self.weights.cols),
        }
    }

    pub fn cardinality(&self) -> usize {
        self.weights.rows
    }

    pub fn dim(&self) -> usize {
        self.weights.cols
    }

    fn check(&self, code: usize) -> Result<()> {
        if code < self.cardinality() {
            Ok(())
        } else {
            Err(Error::CodeOutOfRange {
                code,
                cardinality: self.cardinality(),
            })
        }
    }

    /// Row `code` of the table.
    pub fn embed(&self, code: usize) -> Result<&[f64]> {
        self.check(code)?;
        Ok(self.weights.row(code))
    }

    /// Adds `grad` into row `code`; every other row is untouched.
    pub fn accumulate(&mut self, code: usize, grad: &[f64]) -> Result<()> {
        self.check(code)?;
        for (w, g) in self.weights.row_mut(code).iter_mut().zip(grad) {
            *w += g;
        }
        Ok(())
    }
}
