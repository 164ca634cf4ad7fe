use std::fs;
use std::path::{Path, PathBuf};

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use milp_core::{write_instance_string, MilpInstance};

use crate::config::{Family, GenConfig};
use crate::fcmcnf::gen_fcmcnf;
use crate::gisp::gen_gisp;
use crate::graph::derive_seed;
use crate::maxsat::gen_maxsat;

#[derive(Debug, Error)]
pub enum SuiteError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Fcmcnf(#[from] crate::fcmcnf::FcmcnfError),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct InstanceRecord {
    pub file: String,
    pub name: String,
    pub n: usize,
    pub seed: u64,
    pub sha256: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SuiteManifest {
    pub config: GenConfig,
    pub instances: Vec<InstanceRecord>,
}

/// Generates a single instance of the configured family.
pub fn gen_instance(config: &GenConfig, n: usize, seed: u64) -> Result<MilpInstance, SuiteError> {
    Ok(match config.family {
        Family::Fcmcnf => gen_fcmcnf(n, seed, config.edge_prob(), &config.fcmcnf)?,
        Family::Maxsat => gen_maxsat(n, seed, config.edge_prob()),
        Family::Gisp => gen_gisp(n, seed, config.edge_prob(), &config.gisp),
    })
}

/// Writes `config.count` instances plus a `manifest.json` into `out_dir`.
/// Per-instance seeds and node counts derive deterministically from the
/// master seed, so the same config reproduces identical files.
pub fn gen_suite(config: &GenConfig, out_dir: impl AsRef<Path>) -> Result<SuiteManifest, SuiteError> {
    let out_dir = out_dir.as_ref();
    fs::create_dir_all(out_dir)?;
    let mut instances = Vec::with_capacity(config.count);
    for idx in 0..config.count {
        let seed = derive_seed(config.seed, idx as u64);
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, 0));
        let n = rng.random_range(config.n_min..=config.n_max);
        let inst = gen_instance(config, n, seed)?;
        let name = format!(
            "{}_{}_{:04}",
            config.family.label(),
            config.size_class.label(),
            idx
        );
        let file = format!("{name}.milp");
        let text = write_instance_string(&inst);
        let digest = Sha256::digest(text.as_bytes());
        fs::write(out_dir.join(&file), &text)?;
        instances.push(InstanceRecord {
            file,
            name: inst.name.clone(),
            n,
            seed,
            sha256: hex_string(&digest),
        });
    }
    let manifest = SuiteManifest {
        config: config.clone(),
        instances,
    };
    let json = serde_json::to_string_pretty(&manifest)?;
    fs::write(out_dir.join("manifest.json"), json)?;
    Ok(manifest)
}

/// Paths of the instance files listed by a suite directory's manifest.
pub fn manifest_files(dir: impl AsRef<Path>) -> Result<Vec<PathBuf>, SuiteError> {
    let dir = dir.as_ref();
    let manifest: SuiteManifest =
        serde_json::from_str(&fs::read_to_string(dir.join("manifest.json"))?)?;
    Ok(manifest
        .instances
        .iter()
        .map(|r| dir.join(&r.file))
        .collect())
}

fn hex_string(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::SizeClass;

    #[test]
    fn empty_suite_writes_empty_manifest() {
        let dir = tempfile::tempdir().unwrap();
        let config = GenConfig::new(Family::Gisp, 4, 6, 1, 0);
        let manifest = gen_suite(&config, dir.path()).unwrap();
        assert!(manifest.instances.is_empty());
        assert!(dir.path().join("manifest.json").exists());
        assert_eq!(manifest_files(dir.path()).unwrap().len(), 0);
    }

    #[test]
    fn same_master_seed_reproduces_files() {
        let d1 = tempfile::tempdir().unwrap();
        let d2 = tempfile::tempdir().unwrap();
        let config = GenConfig::new(Family::Maxsat, 5, 7, 42, 3);
        let m1 = gen_suite(&config, d1.path()).unwrap();
        let m2 = gen_suite(&config, d2.path()).unwrap();
        for (a, b) in m1.instances.iter().zip(m2.instances.iter()) {
            assert_eq!(a.sha256, b.sha256);
        }
    }

    #[test]
    fn transfer_sizes_exceed_train_test_sizes() {
        let dir = tempfile::tempdir().unwrap();
        let mut small = GenConfig::new(Family::Gisp, 4, 6, 7, 4);
        small.size_class = SizeClass::TrainTest;
        let mut large = GenConfig::new(Family::Gisp, 7, 9, 7, 4);
        large.size_class = SizeClass::Transfer;
        let m_small = gen_suite(&small, dir.path().join("s")).unwrap();
        let m_large = gen_suite(&large, dir.path().join("l")).unwrap();
        let max_small = m_small.instances.iter().map(|r| r.n).max().unwrap();
        let min_large = m_large.instances.iter().map(|r| r.n).min().unwrap();
        assert!(min_large > max_small);
    }
}
