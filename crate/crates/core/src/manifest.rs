//! Run provenance and the solution document.

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::ingest::serialize_instance;
use crate::instance::ProblemInstance;
use crate::milp::ModelOptions;
use crate::schedule::Schedule;
use crate::splitter::SplitRounding;

/// Git-style object hash: SHA-256 over `blob <len>\0` followed by the bytes.
pub fn content_hash(bytes: &[u8]) -> String {
    let mut h = Sha256::new();
    h.update(format!("blob {}\0", bytes.len()).as_bytes());
    h.update(bytes);
    hex::encode(h.finalize())
}

/// Hash of the canonical serialization, so formatting differences in the
/// source file do not matter.
pub fn instance_hash(instance: &ProblemInstance) -> String {
    content_hash(&serialize_instance(instance))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool_version: String,
    pub instance_label: String,
    /// Hash of the canonical instance serialization.
    pub instance_hash: String,
    pub config: serde_json::Value,
    pub backend: String,
    pub seed: Option<u64>,
    pub started_at: DateTime<Utc>,
    pub finished_at: DateTime<Utc>,
}

impl RunManifest {
    /// Manifest for a run on `instance` that finishes now.
    pub fn new(
        instance: &ProblemInstance,
        config: serde_json::Value,
        backend: String,
        seed: Option<u64>,
        started_at: DateTime<Utc>,
    ) -> Self {
        RunManifest {
            tool_version: env!("CARGO_PKG_VERSION").into(),
            instance_label: instance.label.clone(),
            instance_hash: instance_hash(instance),
            config,
            backend,
            seed,
            started_at,
            finished_at: Utc::now(),
        }
    }

    /// Hash of everything except the timestamps, so reruns with the same
    /// inputs carry the same hash.
    pub fn hash(&self) -> String {
        let mut v = serde_json::to_value(self).expect("manifests always serialize");
        if let Some(map) = v.as_object_mut() {
            map.remove("started_at");
            map.remove("finished_at");
        }
        content_hash(&serde_json::to_vec(&v).expect("values always serialize"))
    }
}

/// What `schedule` writes and `validate`, `metrics` and `report` read.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolutionDoc {
    pub manifest: RunManifest,
    pub manifest_hash: String,
    pub split_rounding: SplitRounding,
    pub options: ModelOptions,
    pub objective: f64,
    pub schedule: Schedule,
}

impl SolutionDoc {
    pub fn new(
        manifest: RunManifest,
        split_rounding: SplitRounding,
        options: ModelOptions,
        objective: f64,
        schedule: Schedule,
    ) -> Self {
        SolutionDoc {
            manifest_hash: manifest.hash(),
            manifest,
            split_rounding,
            options,
            objective,
            schedule,
        }
    }

    pub fn parse(bytes: &[u8]) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_slice(bytes);
        serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            Error::parse(path, e.into_inner().to_string())
        })
    }

    /// Refuses a solution produced for a different instance.
    pub fn check_instance(&self, instance_hash: &str) -> Result<()> {
        if self.manifest.instance_hash != instance_hash {
            return Err(Error::Integrity(vec![format!(
                "solution was produced for instance {} but this instance hashes to {}",
                self.manifest.instance_hash, instance_hash
            )]));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_blob_matches_git_sha256() {
        // `git hash-object --object-format=sha256 /dev/null`
        assert_eq!(
            content_hash(b""),
            "473a0f4c3be8a93681a267e3b1e9a7dcda1185436fe141f7749120a303721813"
        );
    }
}
