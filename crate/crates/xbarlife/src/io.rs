//! Figure-ready output formats: CSV matrices, JSON sidecars, atomic writes.
//!
//! Matrix CSVs carry no header; row 0 is the top wordline. Scalar values use
//! a fixed scientific format so reruns are byte-identical.

use std::path::Path;

use ndarray::Array2;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::Result;

/// N x N float matrix as headerless CSV in scientific notation.
pub fn matrix_csv(values: &Array2<f64>) -> String {
    let mut out = String::with_capacity(values.len() * 18);
    for row in values.rows() {
        let mut first = true;
        for v in row {
            if !first {
                out.push(',');
            }
            out.push_str(&format!("{v:.9e}"));
            first = false;
        }
        out.push('\n');
    }
    out
}

/// N x N integer matrix as headerless CSV.
pub fn matrix_csv_u64(values: &Array2<u64>) -> String {
    let mut out = String::with_capacity(values.len() * 8);
    for row in values.rows() {
        let cells: Vec<String> = row.iter().map(|v| v.to_string()).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

/// Pretty JSON with a trailing newline.
pub fn json_string<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("sidecar serialization cannot fail");
    s.push('\n');
    s
}

/// SHA-256 of a byte string, hex-encoded. Used to fingerprint resolved
/// parameter sets in sidecars and run manifests.
pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Writes through a temporary sibling file and renames into place, so readers
/// never observe a partially written file and failed runs leave no output.
pub fn write_atomic(path: impl AsRef<Path>, bytes: &[u8]) -> Result<()> {
    let path = path.as_ref();
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)?;
        }
    }
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = std::path::PathBuf::from(tmp);
    std::fs::write(&tmp, bytes)?;
    std::fs::rename(&tmp, path)?;
    Ok(())
}

/// Metadata sidecar for a current map.
#[derive(Debug, Clone, Serialize)]
pub struct CurrentMapSidecar {
    pub n: usize,
    pub node_nm: f64,
    pub state: String,
    pub v_spike: f64,
    pub residual: f64,
}

/// Metadata sidecar for an endurance map.
#[derive(Debug, Clone, Serialize)]
pub struct EnduranceMapSidecar {
    pub n: usize,
    pub node_nm: f64,
    pub state: String,
    pub v_spike: f64,
    pub pulse_width_s: f64,
    pub params_sha256: String,
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn float_matrix_layout() {
        let m = array![[1.0, 2.5e-5], [0.0, -3.0]];
        let csv = matrix_csv(&m);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines.len(), 2);
        assert_eq!(lines[0], "1.000000000e0,2.500000000e-5");
        assert_eq!(lines[1], "0.000000000e0,-3.000000000e0");
    }

    #[test]
    fn integer_matrix_layout() {
        let m = array![[1u64, 22], [333, 4]];
        assert_eq!(matrix_csv_u64(&m), "1,22\n333,4\n");
    }

    #[test]
    fn atomic_write_replaces_content() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("data.csv");
        write_atomic(&path, b"one").unwrap();
        write_atomic(&path, b"two").unwrap();
        assert_eq!(std::fs::read(&path).unwrap(), b"two");
        assert!(!path.with_extension("csv.tmp").exists());
    }

    #[test]
    fn sha256_is_stable() {
        assert_eq!(
            sha256_hex(b"abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
    }
}
