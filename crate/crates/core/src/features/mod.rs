//! Image features, categorical embeddings and input assembly.

mod embedding;
mod input;
mod pool;
mod rescale;
mod store;

pub use embedding::{embed_dim, EmbeddingTable, EMBED_INIT_BOUND, MAX_EMBED_DIM};
pub use input::{
    assemble_input, Embeddings, VariableSet, LOOKING_CATEGORIES, MOVEMENT_CATEGORIES,
    ORIENTATION_CATEGORIES,
};
pub use pool::{avg_pool, POOL_CELLS};
pub use rescale::{batch_max, rescale_batch, scale_images, Rescale};
pub use store::{index_path, FeatureKey, FeatureStore, Layout, STORE_MAGIC};

/// Width of the pooled image features produced by the reference extractors.
pub const IMAGE_FEATURE_DIM: usize = 512;
