//! Persisted per-frame image features.
//!
//! Binary file:
//!
//! ```text
//! magic     8 bytes  "PCIFEAT1"
//! row_count u32 LE
//! row_len   u32 LE   512 (pooled) or 512*49 = 25088 (raw 7x7 maps)
//! layout    u8       0 = pooled, 1 = raw
//! payload   row_count * row_len f32 LE
//! ```
//!
//! A sidecar JSON file (`<store>.index.json`) maps
//! `(video_id, pedestrian_id, frame)` to a row number.

use std::collections::HashMap;
use std::fs;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::pool::{avg_pool, POOL_CELLS};
use crate::error::{Error, Result};

pub const STORE_MAGIC: &[u8; 8] = b"PCIFEAT1";
const HEADER_LEN: usize = 8 + 4 + 4 + 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Layout {
    Pooled = 0,
    Raw = 1,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FeatureKey {
    pub video_id: String,
    pub pedestrian_id: String,
    pub frame: u32,
}

impl FeatureKey {
    pub fn new(video_id: impl Into<String>, pedestrian_id: impl Into<String>, frame: u32) -> Self {
        Self {
            video_id: video_id.into(),
            pedestrian_id: pedestrian_id.into(),
            frame,
        }
    }
}

impl std::fmt::Display for FeatureKey {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}/{}#{}", self.video_id, self.pedestrian_id, self.frame)
    }
}

#[derive(Serialize, Deserialize)]
struct IndexEntry {
    video_id: String,
    pedestrian_id: String,
    frame: u32,
    row: usize,
}

#[derive(Serialize, Deserialize)]
struct IndexFile {
    rows: Vec<IndexEntry>,
}

/// Read-mostly table of feature rows keyed by frame.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureStore {
    layout: Layout,
    row_len: usize,
    data: Vec<f32>,
    keys: Vec<FeatureKey>,
    index: HashMap<FeatureKey, usize>,
}

/// Path of the sidecar index for a store file.
pub fn index_path(store: &Path) -> PathBuf {
    let mut name = store.as_os_str().to_owned();
    name.push(".index.json");
    PathBuf::from(name)
}

impl FeatureStore {
    pub fn new(layout: Layout, row_len: usize) -> Result<Self> {
        if row_len == 0 || (layout == Layout::Raw && !row_len.is_multiple_of(POOL_CELLS)) {
            return Err(Error::Store(format!(
                "invalid row length {row_len} for {layout:?} layout"
            )));
        }
        Ok(Self {
            layout,
            row_len,
            data: Vec::new(),
            keys: Vec::new(),
            index: HashMap::new(),
        })
    }

    pub fn layout(&self) -> Layout {
        self.layout
    }

    pub fn row_len(&self) -> usize {
        self.row_len
    }

    pub fn len(&self) -> usize {
        self.keys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.keys.is_empty()
    }

    /// Length of the vectors returned by [`FeatureStore::feature`].
    pub fn feature_dim(&self) -> usize {
        match self.layout {
            Layout::Pooled => self.row_len,
            Layout::Raw => self.row_len / POOL_CELLS,
        }
    }

    pub fn insert(&mut self, key: FeatureKey, row: &[f32]) -> Result<usize> {
        if row.len() != self.row_len {
            return Err(Error::Store(format!(
                "row for {key} has {} values, store rows have {}",
                row.len(),
                self.row_len
            )));
        }
        if self.index.contains_key(&key) {
            return Err(Error::Store(format!("duplicate row for {key}")));
        }
        let n = self.keys.len();
        self.data.extend_from_slice(row);
        self.index.insert(key.clone(), n);
        self.keys.push(key);
        Ok(n)
    }

    pub fn contains(&self, key: &FeatureKey) -> bool {
        self.index.contains_key(key)
    }

    /// Stored row exactly as persisted.
    pub fn raw_row(&self, key: &FeatureKey) -> Option<&[f32]> {
        self.index
            .get(key)
            .map(|&r| &self.data[r * self.row_len..(r + 1) * self.row_len])
    }

    /// Pooled feature vector for `key`; raw rows are average-pooled on the way
    /// out.
    pub fn feature(&self, key: &FeatureKey) -> Result<Vec<f64>> {
        let row = self.raw_row(key).ok_or_else(|| Error::MissingFeatures {
            count: 1,
            first: vec![key.to_string()],
        })?;
        match self.layout {
            Layout::Pooled => Ok(row.iter().map(|&v| v as f64).collect()),
            Layout::Raw => avg_pool(row, self.feature_dim()),
        }
    }

    pub fn keys(&self) -> &[FeatureKey] {
        &self.keys
    }

    pub fn write_to<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        w.write_all(STORE_MAGIC)?;
        w.write_all(&(self.keys.len() as u32).to_le_bytes())?;
        w.write_all(&(self.row_len as u32).to_le_bytes())?;
        w.write_all(&[self.layout as u8])?;
        for v in &self.data {
            w.write_all(&v.to_le_bytes())?;
        }
        Ok(())
    }

    /// Writes the binary store and its sidecar index.
    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
        let mut w = BufWriter::new(file);
        self.write_to(&mut w)
            .and_then(|_| w.flush())
            .map_err(|e| Error::io(path, e))?;

        let index = IndexFile {
            rows: self
                .keys
                .iter()
                .enumerate()
                .map(|(row, k)| IndexEntry {
                    video_id: k.video_id.clone(),
                    pedestrian_id: k.pedestrian_id.clone(),
                    frame: k.frame,
                    row,
                })
                .collect(),
        };
        let ipath = index_path(path);
        let json = serde_json::to_vec_pretty(&index)?;
        fs::write(&ipath, json).map_err(|e| Error::io(&ipath, e))
    }

    /// Parses the binary part. Keys are attached separately.
    fn read_payload<R: Read>(mut r: R) -> Result<(Layout, usize, Vec<f32>)> {
        let mut header = [0u8; HEADER_LEN];
        r.read_exact(&mut header)
            .map_err(|_| Error::Store("truncated header".into()))?;
        if &header[..8] != STORE_MAGIC {
            return Err(Error::Store("bad magic (expected PCIFEAT1)".into()));
        }
        let rows = u32::from_le_bytes(header[8..12].try_into().unwrap()) as usize;
        let row_len = u32::from_le_bytes(header[12..16].try_into().unwrap()) as usize;
        let layout = match header[16] {
            0 => Layout::Pooled,
            1 => Layout::Raw,
            other => return Err(Error::Store(format!("unknown layout flag {other}"))),
        };
        let mut bytes = Vec::new();
        r.read_to_end(&mut bytes)
            .map_err(|e| Error::Store(e.to_string()))?;
        let expected = rows * row_len * 4;
        if bytes.len() != expected {
            return Err(Error::Store(format!(
                "payload is {} bytes, header implies {expected}",
                bytes.len()
            )));
        }
        let data = bytes
            .chunks_exact(4)
            .map(|c| f32::from_le_bytes(c.try_into().unwrap()))
            .collect();
        Ok((layout, row_len, data))
    }

    pub fn open(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let file = fs::File::open(path).map_err(|e| Error::io(path, e))?;
        let (layout, row_len, data) = Self::read_payload(BufReader::new(file))?;
        let mut store = Self::new(layout, row_len)?;
        let rows = data.len() / row_len;

        let ipath = index_path(path);
        let text = fs::read(&ipath).map_err(|e| Error::io(&ipath, e))?;
        let index: IndexFile = serde_json::from_slice(&text)?;
        if index.rows.len() != rows {
            return Err(Error::Store(format!(
                "index lists {} rows, store holds {rows}",
                index.rows.len()
            )));
        }
        let mut keys: Vec<Option<FeatureKey>> = vec![None; rows];
        for e in index.rows {
            let slot = keys
                .get_mut(e.row)
                .ok_or_else(|| Error::Store(format!("index row {} out of range", e.row)))?;
            if slot.is_some() {
                return Err(Error::Store(format!("row {} indexed twice", e.row)));
            }
            *slot = Some(FeatureKey::new(e.video_id, e.pedestrian_id, e.frame));
        }
        for (row, key) in keys.into_iter().enumerate() {
            let key = key.expect("every row indexed");
            store.insert(key, &data[row * row_len..(row + 1) * row_len])?;
        }
        Ok(store)
    }
}
