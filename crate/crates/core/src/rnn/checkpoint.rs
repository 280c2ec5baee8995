//! Model checkpoint file.
//!
//! ```text
//! magic       8 bytes  "PCIMODL1"
//! header_len  u32 LE
//! header      header_len bytes of UTF-8 JSON (format version, model config,
//!             window spec, rescaling, seed, manifest id, tensor table)
//! payload     every tensor of `Params::tensors()` in order, f32 LE
//! ```
//!
//! Tensor order: `embed.looking`, `embed.orientation`, `embed.movement` (when
//! enabled), `fwd.w_ih`, `fwd.w_hh`, `fwd.b_ih`, `fwd.b_hh`, the same four
//! for `bwd` on bidirectional models, then `head.w`, `head.b`. Matrices are
//! row-major.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::config::ModelConfig;
use super::model::{Model, Params};
use crate::data::WindowSpec;
use crate::error::{Error, Result};
use crate::features::Rescale;

pub const CHECKPOINT_MAGIC: &[u8; 8] = b"PCIMODL1";
pub const CHECKPOINT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckpointMeta {
    pub window: WindowSpec,
    pub rescale: Rescale,
    pub seed: u64,
    /// Identifier of the run manifest that produced the checkpoint.
    pub manifest_id: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Checkpoint {
    pub model: Model,
    pub meta: CheckpointMeta,
}

#[derive(Serialize, Deserialize)]
struct TensorEntry {
    name: String,
    len: usize,
}

#[derive(Serialize, Deserialize)]
struct Header {
    format_version: u32,
    model: ModelConfig,
    #[serde(flatten)]
    meta: CheckpointMeta,
    tensors: Vec<TensorEntry>,
}

impl Checkpoint {
    pub fn to_bytes(&self) -> Result<Vec<u8>> {
        let tensors = self.model.params.tensors();
        let header = Header {
            format_version: CHECKPOINT_VERSION,
            model: self.model.config.clone(),
            meta: self.meta.clone(),
            tensors: tensors
                .iter()
                .map(|(n, t)| TensorEntry {
                    name: n.clone(),
                    len: t.len(),
                })
                .collect(),
        };
        let json = serde_json::to_vec(&header)?;
        let mut out = Vec::with_capacity(12 + json.len() + 4 * self.model.params.num_params());
        out.extend_from_slice(CHECKPOINT_MAGIC);
        out.extend_from_slice(&(json.len() as u32).to_le_bytes());
        out.extend_from_slice(&json);
        for (_, t) in tensors {
            for &v in t {
                out.extend_from_slice(&(v as f32).to_le_bytes());
            }
        }
        Ok(out)
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let bad = |m: &str| Error::Checkpoint(m.to_string());
        if bytes.len() < 12 || &bytes[..8] != CHECKPOINT_MAGIC {
            return Err(bad("bad magic (expected PCIMODL1)"));
        }
        let hlen = u32::from_le_bytes(bytes[8..12].try_into().unwrap()) as usize;
        let json = bytes
            .get(12..12 + hlen)
            .ok_or_else(|| bad("truncated header"))?;
        let header: Header = serde_json::from_slice(json)?;
        if header.format_version != CHECKPOINT_VERSION {
            return Err(Error::Checkpoint(format!(
                "unsupported format version {}",
                header.format_version
            )));
        }
        let mut model = Model::zeros(header.model)?;
        let mut payload = &bytes[12 + hlen..];
        {
            let mut slots = model.params.tensors_mut();
            if slots.len() != header.tensors.len() {
                return Err(bad("tensor table does not match model config"));
            }
            for ((name, dst), entry) in slots.iter_mut().zip(&header.tensors) {
                if *name != entry.name || dst.len() != entry.len {
                    return Err(Error::Checkpoint(format!(
                        "tensor `{}` [{}] does not match expected `{name}` [{}]",
                        entry.name,
                        entry.len,
                        dst.len()
                    )));
                }
                let n = 4 * dst.len();
                if payload.len() < n {
                    return Err(bad("truncated payload"));
                }
                for (d, c) in dst.iter_mut().zip(payload[..n].chunks_exact(4)) {
                    *d = f32::from_le_bytes(c.try_into().unwrap()) as f64;
                }
                payload = &payload[n..];
            }
        }
        if !payload.is_empty() {
            return Err(bad("trailing bytes after payload"));
        }
        Ok(Self {
            model,
            meta: header.meta,
        })
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        fs::write(path, self.to_bytes()?).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
        Self::from_bytes(&bytes)
    }
}

/// True when every parameter survives an `f32` round trip unchanged.
pub fn is_f32_exact(params: &Params) -> bool {
    params
        .tensors()
        .iter()
        .flat_map(|(_, t)| t.iter())
        .all(|&v| (v as f32) as f64 == v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{FrameInput, Sample, SampleSource};
    use crate::features::VariableSet;
    use crate::rnn::config::{HorizonMode, RnnType};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn checkpoint(rnn: RnnType) -> Checkpoint {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let cfg = ModelConfig {
            rnn_type: rnn,
            image_dim: 6,
            vars: VariableSet::ALL,
            horizon: HorizonMode::Multi,
            ..Default::default()
        };
        let mut model = Model::new(cfg, &mut rng).unwrap();
        model.params.round_to_f32();
        Checkpoint {
            model,
            meta: CheckpointMeta {
                window: WindowSpec::multi(15, 30, 8).unwrap(),
                rescale: Rescale::Global { max: 3.5 },
                seed: 42,
                manifest_id: Some("abc".into()),
            },
        }
    }

    #[test]
    fn round_trip_is_bit_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let sample = Sample {
            inputs: (0..4)
                .map(|_| FrameInput {
                    image: (0..6).map(|_| rng.random()).collect(),
                    looking: Some(0),
                    orientation: Some(3),
                    movement: Some(1),
                    center: Some((0.4, 0.6)),
                })
                .collect(),
            labels: vec![0; 8],
            source: SampleSource {
                video_id: "v".into(),
                pedestrian_id: "p".into(),
                t: 0,
            },
        };
        for rnn in RnnType::ALL {
            let ck = checkpoint(rnn);
            assert!(is_f32_exact(&ck.model.params));
            let dir = tempfile::tempdir().unwrap();
            let path = dir.path().join("m.ckpt");
            ck.save(&path).unwrap();
            let back = Checkpoint::load(&path).unwrap();
            assert_eq!(back, ck);
            let a = ck.model.predict(&sample).unwrap();
            let b = back.model.predict(&sample).unwrap();
            assert_eq!(
                a.iter().map(|v| v.to_bits()).collect::<Vec<_>>(),
                b.iter().map(|v| v.to_bits()).collect::<Vec<_>>()
            );
            assert_eq!(back.meta.seed, 42);
            assert_eq!(fs::read(&path).unwrap(), back.to_bytes().unwrap());
        }
    }

    #[test]
    fn corrupt_files_rejected() {
        let bytes = checkpoint(RnnType::Gru).to_bytes().unwrap();
        assert!(Checkpoint::from_bytes(&bytes[..bytes.len() - 1]).is_err());
        let mut extra = bytes.clone();
        extra.push(0);
        assert!(Checkpoint::from_bytes(&extra).is_err());
        let mut magic = bytes.clone();
        magic[0] = b'Q';
        assert!(Checkpoint::from_bytes(&magic).is_err());
        assert!(Checkpoint::load("/nonexistent/m.ckpt").unwrap_err().is_io());
    }
}
