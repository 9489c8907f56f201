//! JSON run manifests written next to every CSV file.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use rmt_tails::potentials::PotentialSpec;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OutputDigest {
    pub path: String,
    pub sha256: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    /// Arguments after the program name.
    pub command_line: Vec<String>,
    pub potential: Option<PotentialSpec>,
    pub t: Option<f64>,
    #[serde(rename = "N")]
    pub n: Option<usize>,
    pub z_grid: Option<String>,
    pub precision: u32,
    pub seed: Option<u64>,
    pub rng: Option<String>,
    pub tool_version: String,
    pub timestamp_utc: String,
    pub outputs: Vec<OutputDigest>,
}

pub fn sha256_file(path: &Path) -> io::Result<String> {
    let bytes = fs::read(path)?;
    Ok(format!("{:x}", Sha256::digest(&bytes)))
}

/// `<csv>.manifest.json`.
pub fn manifest_path(csv: &Path) -> PathBuf {
    let mut s = csv.as_os_str().to_owned();
    s.push(".manifest.json");
    PathBuf::from(s)
}

impl RunManifest {
    pub fn new(command_line: Vec<String>, precision: u32) -> Self {
        RunManifest {
            command_line,
            potential: None,
            t: None,
            n: None,
            z_grid: None,
            precision,
            seed: None,
            rng: None,
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            timestamp_utc: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
            outputs: Vec::new(),
        }
    }

    /// Records the digest of `csv` and writes the manifest beside it.
    pub fn write_for(mut self, csv: &Path) -> io::Result<PathBuf> {
        self.outputs = vec![OutputDigest { path: csv.display().to_string(), sha256: sha256_file(csv)? }];
        let path = manifest_path(csv);
        let json = serde_json::to_string_pretty(&self).map_err(io::Error::other)?;
        fs::write(&path, json + "\n")?;
        Ok(path)
    }

    pub fn read(path: &Path) -> io::Result<Self> {
        let text = fs::read_to_string(path)?;
        serde_json::from_str(&text).map_err(|e| io::Error::new(io::ErrorKind::InvalidData, e))
    }
}
