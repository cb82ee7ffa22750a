//! Statevector dump: a raw file of little-endian `f64` pairs (re, im) for
//! each amplitude in index order, plus a JSON header.

use std::fs;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::StateVector;
use crate::error::{Error, Result};

pub const DUMP_CONVENTION: &str = "little-endian-q0-lsb";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DumpHeader {
    pub n: usize,
    pub convention: String,
}

fn io_err(path: &Path, e: std::io::Error) -> Error {
    Error::InvalidArgument(format!("{}: {e}", path.display()))
}

/// Writes `data` (amplitudes) and `header` (JSON) files.
pub fn write_dump(state: &StateVector, data: &Path, header: &Path) -> Result<()> {
    let mut bytes = Vec::with_capacity(state.amplitudes().len() * 16);
    for a in state.amplitudes() {
        bytes.extend_from_slice(&a.re.to_le_bytes());
        bytes.extend_from_slice(&a.im.to_le_bytes());
    }
    fs::write(data, bytes).map_err(|e| io_err(data, e))?;
    let h = DumpHeader {
        n: state.n(),
        convention: DUMP_CONVENTION.to_string(),
    };
    let text = serde_json::to_string_pretty(&h).expect("header serializes");
    fs::write(header, text).map_err(|e| io_err(header, e))
}

pub fn read_dump(data: &Path, header: &Path) -> Result<StateVector> {
    let text = fs::read_to_string(header).map_err(|e| io_err(header, e))?;
    let h: DumpHeader = serde_json::from_str(&text).map_err(|e| Error::Parse(e.to_string()))?;
    if h.convention != DUMP_CONVENTION {
        return Err(Error::Parse(format!("unknown convention {:?}", h.convention)));
    }
    let bytes = fs::read(data).map_err(|e| io_err(data, e))?;
    if h.n >= usize::BITS as usize || bytes.len() != (1usize << h.n) * 16 {
        return Err(Error::DimensionMismatch(format!(
            "{} bytes for {} qubits",
            bytes.len(),
            h.n
        )));
    }
    let word = |c: &[u8]| f64::from_le_bytes(c.try_into().expect("8 bytes"));
    let amp = bytes
        .chunks_exact(16)
        .map(|c| Complex64::new(word(&c[..8]), word(&c[8..])))
        .collect();
    StateVector::from_amplitudes(amp)
}
