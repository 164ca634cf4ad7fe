use std::fs;
use std::io::Read;
use std::path::Path;

use thiserror::Error;

use crate::tensor::Tensor;

const MAGIC: &[u8; 8] = b"NNCKPT01";

#[derive(Debug, Error)]
pub enum CheckpointError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("not a checkpoint file (bad magic)")]
    BadMagic,
    #[error("malformed checkpoint: {0}")]
    Malformed(String),
    #[error("manifest is not valid JSON: {0}")]
    Manifest(#[from] serde_json::Error),
}

/// Writes a checkpoint: a JSON manifest followed by a binary blob of named
/// parameter tensors (name, dims, little-endian f64 data). Byte output is a
/// pure function of the inputs.
pub fn save_checkpoint(
    path: impl AsRef<Path>,
    manifest: &serde_json::Value,
    params: &[(String, Tensor)],
) -> Result<(), CheckpointError> {
    let mut out: Vec<u8> = Vec::new();
    out.extend_from_slice(MAGIC);
    let manifest_bytes = serde_json::to_vec(manifest)?;
    out.extend_from_slice(&(manifest_bytes.len() as u64).to_le_bytes());
    out.extend_from_slice(&manifest_bytes);
    out.extend_from_slice(&(params.len() as u64).to_le_bytes());
    for (name, tensor) in params {
        let name_bytes = name.as_bytes();
        out.extend_from_slice(&(name_bytes.len() as u64).to_le_bytes());
        out.extend_from_slice(name_bytes);
        out.extend_from_slice(&(tensor.rows as u64).to_le_bytes());
        out.extend_from_slice(&(tensor.cols as u64).to_le_bytes());
        for &v in &tensor.data {
            out.extend_from_slice(&v.to_le_bytes());
        }
    }
    fs::write(path, out)?;
    Ok(())
}

pub fn load_checkpoint(
    path: impl AsRef<Path>,
) -> Result<(serde_json::Value, Vec<(String, Tensor)>), CheckpointError> {
    let bytes = fs::read(path)?;
    let mut r = bytes.as_slice();
    let mut magic = [0u8; 8];
    read_exact(&mut r, &mut magic)?;
    if &magic != MAGIC {
        return Err(CheckpointError::BadMagic);
    }
    let manifest_len = read_u64(&mut r)? as usize;
    if manifest_len > r.len() {
        return Err(CheckpointError::Malformed("manifest length".into()));
    }
    let manifest: serde_json::Value = serde_json::from_slice(&r[..manifest_len])?;
    r = &r[manifest_len..];
    let count = read_u64(&mut r)? as usize;
    let mut params = Vec::with_capacity(count.min(1 << 20));
    for _ in 0..count {
        let name_len = read_u64(&mut r)? as usize;
        if name_len > r.len() {
            return Err(CheckpointError::Malformed("name length".into()));
        }
        let name = String::from_utf8(r[..name_len].to_vec())
            .map_err(|_| CheckpointError::Malformed("name is not utf-8".into()))?;
        r = &r[name_len..];
        let rows = read_u64(&mut r)? as usize;
        let cols = read_u64(&mut r)? as usize;
        let numel = rows
            .checked_mul(cols)
            .ok_or_else(|| CheckpointError::Malformed("tensor too large".into()))?;
        let mut data = Vec::with_capacity(numel);
        for _ in 0..numel {
            data.push(f64::from_bits(read_u64(&mut r)?));
        }
        params.push((name, Tensor::from_vec(rows, cols, data)));
    }
    Ok((manifest, params))
}

fn read_exact(r: &mut &[u8], buf: &mut [u8]) -> Result<(), CheckpointError> {
    if r.len() < buf.len() {
        return Err(CheckpointError::Malformed("truncated file".into()));
    }
    r.read_exact(buf)?;
    Ok(())
}

fn read_u64(r: &mut &[u8]) -> Result<u64, CheckpointError> {
    let mut buf = [0u8; 8];
    read_exact(r, &mut buf)?;
    Ok(u64::from_le_bytes(buf))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_and_byte_determinism() {
        let dir = tempfile::tempdir().unwrap();
        let manifest = serde_json::json!({"kind": "test", "seed": 7});
        let params = vec![
            ("a.w".to_string(), Tensor::from_vec(2, 2, vec![1.0, 2.0, 3.0, 4.0])),
            ("a.b".to_string(), Tensor::row(&[0.5, -0.5])),
        ];
        let p1 = dir.path().join("one.ckpt");
        let p2 = dir.path().join("two.ckpt");
        save_checkpoint(&p1, &manifest, &params).unwrap();
        save_checkpoint(&p2, &manifest, &params).unwrap();
        assert_eq!(fs::read(&p1).unwrap(), fs::read(&p2).unwrap());

        let (m, back) = load_checkpoint(&p1).unwrap();
        assert_eq!(m, manifest);
        assert_eq!(back, params);
    }

    #[test]
    fn truncated_file_errors() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("trunc.ckpt");
        let manifest = serde_json::json!({});
        let params = vec![("w".to_string(), Tensor::row(&[1.0, 2.0, 3.0]))];
        save_checkpoint(&path, &manifest, &params).unwrap();
        let bytes = fs::read(&path).unwrap();
        fs::write(&path, &bytes[..bytes.len() - 4]).unwrap();
        assert!(load_checkpoint(&path).is_err());
    }

    #[test]
    fn wrong_magic_errors() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.ckpt");
        fs::write(&path, b"NOTACKPTxxxxxxxx").unwrap();
        assert!(matches!(
            load_checkpoint(&path),
            Err(CheckpointError::BadMagic)
        ));
    }
}
