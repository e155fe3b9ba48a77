//! Reading bitstring files produced here or elsewhere.
//!
//! Format: UTF-8 text, one shot per line, each line exactly `N` characters
//! from `{0,1}` with qubit 0 leftmost. Lines starting with `#` are comments;
//! `# basis=<tag>` and `# seed=<n>` are picked up when present. Registers of
//! up to 64 qubits are accepted, beyond the dense simulator cap.

use serde::{Deserialize, Serialize};
use std::path::Path;

use crate::error::{Error, Result};
use crate::sampler::BitstringArray;

pub const MAX_INGEST_QUBITS: usize = 64;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IngestedDataset {
    pub n_qubits: usize,
    pub n_shots: usize,
    /// Row-major bits, `n_shots * n_qubits` entries of 0 or 1.
    pub bits: Vec<u8>,
    pub basis_tag: String,
    pub seed: Option<u64>,
    pub source: String,
}

impl IngestedDataset {
    pub fn row(&self, i: usize) -> &[u8] {
        &self.bits[i * self.n_qubits..(i + 1) * self.n_qubits]
    }

    pub fn to_bitstring_array(&self) -> BitstringArray {
        BitstringArray {
            n_qubits: self.n_qubits,
            n_shots: self.n_shots,
            values: self.bits.iter().map(|&b| if b == 1 { 1 } else { -1 }).collect(),
            basis_tag: self.basis_tag.clone(),
            config: None,
            seed: self.seed,
        }
    }
}

pub fn ingest_bitstrings(path: &Path) -> Result<IngestedDataset> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| std::io::Error::new(e.kind(), format!("{}: {e}", path.display())))?;
    parse_bitstrings(&text, &path.display().to_string())
}

/// Parse the wire format; `source` annotates the result.
pub fn parse_bitstrings(text: &str, source: &str) -> Result<IngestedDataset> {
    let mut n_qubits = 0;
    let mut bits = Vec::new();
    let mut n_shots = 0;
    let mut basis_tag = None;
    let mut seed = None;
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim_end_matches('\r');
        if let Some(comment) = line.strip_prefix('#') {
            for field in comment.split_whitespace() {
                if let Some(tag) = field.strip_prefix("basis=") {
                    basis_tag = Some(tag.to_string());
                } else if let Some(s) = field.strip_prefix("seed=") {
                    seed = s.parse().ok();
                }
            }
            continue;
        }
        let err = |message: String| Error::Parse { line: line_no, message };
        if line.is_empty() {
            return Err(err("empty shot line".into()));
        }
        if let Some((col, ch)) = line.chars().enumerate().find(|(_, c)| *c != '0' && *c != '1') {
            return Err(err(format!("illegal character {ch:?} at column {}", col + 1)));
        }
        if n_shots == 0 {
            if line.len() > MAX_INGEST_QUBITS {
                return Err(err(format!("{} bits per shot exceeds the limit of {MAX_INGEST_QUBITS}", line.len())));
            }
            n_qubits = line.len();
        } else if line.len() != n_qubits {
            return Err(err(format!("shot has {} bits, expected {n_qubits}", line.len())));
        }
        bits.extend(line.bytes().map(|b| b - b'0'));
        n_shots += 1;
    }
    if n_shots == 0 {
        return Err(Error::Format(format!("{source}: no shots found")));
    }
    Ok(IngestedDataset {
        n_qubits,
        n_shots,
        bits,
        basis_tag: basis_tag.unwrap_or_else(|| "unspecified".into()),
        seed,
        source: source.to_string(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn three_line_file() {
        let d = parse_bitstrings("01\n10\n11", "mem").unwrap();
        assert_eq!((d.n_qubits, d.n_shots), (2, 3));
        assert_eq!(d.to_bitstring_array().values, vec![-1, 1, 1, -1, 1, 1]);
    }

    #[test]
    fn errors_point_at_lines() {
        let e = parse_bitstrings("01\n# c\n012\n", "mem").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 3, .. }), "{e}");
        let e = parse_bitstrings("01\n101\n", "mem").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 2, .. }));
        assert!(matches!(parse_bitstrings("# only comments\n", "mem"), Err(Error::Format(_))));
        assert!(matches!(parse_bitstrings("", "mem"), Err(Error::Format(_))));
        assert!(parse_bitstrings(&"1".repeat(65), "mem").is_err());
    }

    #[test]
    fn header_fields() {
        let d = parse_bitstrings("# basis=random\n# seed=17\n0101\n", "mem").unwrap();
        assert_eq!(d.basis_tag, "random");
        assert_eq!(d.seed, Some(17));
        let wide = "1".repeat(53);
        assert_eq!(parse_bitstrings(&wide, "mem").unwrap().n_qubits, 53);
    }
}
