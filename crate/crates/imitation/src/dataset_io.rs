use std::fs;
use std::io::Read;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use encoding::{FixedFeatures, NodeBipartiteGraph};

use crate::sample::{NodeRepr, Provenance, Sample, SampleDataset, SampleMeta, SplitTag};

const MAGIC: &[u8; 8] = b"NSDATA01";
const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum DatasetIoError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("not a dataset file (bad magic)")]
    BadMagic,
    #[error("unsupported dataset version {got}, expected {expected}")]
    VersionMismatch { got: u32, expected: u32 },
    #[error("content hash mismatch: file is corrupt or was edited")]
    HashMismatch,
    #[error("malformed dataset: {0}")]
    Malformed(String),
    #[error("manifest error: {0}")]
    Manifest(#[from] serde_json::Error),
}

#[derive(Debug, Serialize, Deserialize)]
struct Manifest {
    version: u32,
    split: SplitTag,
    count: u64,
    content_hash: String,
    provenance: Provenance,
}

/// File layout: magic, manifest length + JSON manifest, then `count` binary
/// records. The manifest stores a SHA-256 over the record bytes, verified on
/// load.
pub fn save_dataset(ds: &SampleDataset, path: impl AsRef<Path>) -> Result<(), DatasetIoError> {
    let mut records: Vec<u8> = Vec::new();
    for s in &ds.samples {
        write_sample(&mut records, s)?;
    }
    let digest = Sha256::digest(&records);
    let manifest = Manifest {
        version: FORMAT_VERSION,
        split: ds.split,
        count: ds.samples.len() as u64,
        content_hash: hex_string(&digest),
        provenance: ds.provenance.clone(),
    };
    let manifest_bytes = serde_json::to_vec(&manifest)?;

    let mut out: Vec<u8> = Vec::new();
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&(manifest_bytes.len() as u64).to_le_bytes());
    out.extend_from_slice(&manifest_bytes);
    out.extend_from_slice(&records);
    fs::write(path, out)?;
    Ok(())
}

pub fn load_dataset(path: impl AsRef<Path>) -> Result<SampleDataset, DatasetIoError> {
    let bytes = fs::read(path)?;
    let mut r = bytes.as_slice();
    let mut magic = [0u8; 8];
    take(&mut r, &mut magic)?;
    if &magic != MAGIC {
        return Err(DatasetIoError::BadMagic);
    }
    let manifest_len = read_u64(&mut r)? as usize;
    if manifest_len > r.len() {
        return Err(DatasetIoError::Malformed("manifest length".into()));
    }
    let manifest: Manifest = serde_json::from_slice(&r[..manifest_len])?;
    r = &r[manifest_len..];
    if manifest.version != FORMAT_VERSION {
        return Err(DatasetIoError::VersionMismatch {
            got: manifest.version,
            expected: FORMAT_VERSION,
        });
    }
    let digest = Sha256::digest(r);
    if hex_string(&digest) != manifest.content_hash {
        return Err(DatasetIoError::HashMismatch);
    }
    let mut samples = Vec::with_capacity(manifest.count as usize);
    for _ in 0..manifest.count {
        samples.push(read_sample(&mut r)?);
    }
    if !r.is_empty() {
        return Err(DatasetIoError::Malformed("trailing bytes".into()));
    }
    Ok(SampleDataset {
        samples,
        split: manifest.split,
        provenance: manifest.provenance,
    })
}

/// SHA-256 of the record stream, as stored in the manifest.
pub fn dataset_content_hash(ds: &SampleDataset) -> Result<String, DatasetIoError> {
    let mut records: Vec<u8> = Vec::new();
    for s in &ds.samples {
        write_sample(&mut records, s)?;
    }
    Ok(hex_string(&Sha256::digest(&records)))
}

fn write_sample(out: &mut Vec<u8>, s: &Sample) -> Result<(), DatasetIoError> {
    let id = s.meta.instance_id.as_bytes();
    out.extend_from_slice(&(id.len() as u64).to_le_bytes());
    out.extend_from_slice(id);
    out.extend_from_slice(&s.meta.ordinal.to_le_bytes());
    out.extend_from_slice(&s.meta.depth_first.to_le_bytes());
    out.extend_from_slice(&s.meta.depth_second.to_le_bytes());
    out.push(s.label);
    out.extend_from_slice(&s.weight.to_le_bytes());
    s.first.graph.write_to(out)?;
    s.first.fixed.write_to(out)?;
    s.second.graph.write_to(out)?;
    s.second.fixed.write_to(out)?;
    Ok(())
}

fn read_sample(r: &mut &[u8]) -> Result<Sample, DatasetIoError> {
    let id_len = read_u64(r)? as usize;
    if id_len > r.len() {
        return Err(DatasetIoError::Malformed("instance id length".into()));
    }
    let instance_id = String::from_utf8(r[..id_len].to_vec())
        .map_err(|_| DatasetIoError::Malformed("instance id is not utf-8".into()))?;
    *r = &r[id_len..];
    let ordinal = read_u64(r)?;
    let depth_first = read_u32(r)?;
    let depth_second = read_u32(r)?;
    let mut label = [0u8; 1];
    take(r, &mut label)?;
    let mut wbuf = [0u8; 8];
    take(r, &mut wbuf)?;
    let weight = f64::from_le_bytes(wbuf);

    let decode = |r: &mut &[u8]| -> Result<NodeRepr, DatasetIoError> {
        let graph = NodeBipartiteGraph::read_from(r)
            .map_err(|e| DatasetIoError::Malformed(e.to_string()))?;
        let fixed = FixedFeatures::read_from(r)
            .map_err(|e| DatasetIoError::Malformed(e.to_string()))?;
        Ok(NodeRepr { graph, fixed })
    };
    let first = decode(r)?;
    let second = decode(r)?;
    Ok(Sample {
        first,
        second,
        label: label[0],
        weight,
        meta: SampleMeta {
            instance_id,
            depth_first,
            depth_second,
            ordinal,
        },
    })
}

fn take(r: &mut &[u8], buf: &mut [u8]) -> Result<(), DatasetIoError> {
    if r.len() < buf.len() {
        return Err(DatasetIoError::Malformed("truncated file".into()));
    }
    r.read_exact(buf)?;
    Ok(())
}

fn read_u64(r: &mut &[u8]) -> Result<u64, DatasetIoError> {
    let mut buf = [0u8; 8];
    take(r, &mut buf)?;
    Ok(u64::from_le_bytes(buf))
}

fn read_u32(r: &mut &[u8]) -> Result<u32, DatasetIoError> {
    let mut buf = [0u8; 4];
    take(r, &mut buf)?;
    Ok(u32::from_le_bytes(buf))
}

fn hex_string(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}
