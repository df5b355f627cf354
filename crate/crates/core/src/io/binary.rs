//! Binary layouts (all integers and floats little-endian):
//!
//! | file | header | payload |
//! |------|--------|---------|
//! | ensemble | `PRSE`, u16 version, u16 reserved, u64 M, u64 N | M·N `(f64 re, f64 im)` row-major |
//! | real vector | `PRSV`, u16 version, u16 reserved, u64 len | len `f64` |
//! | complex vector | `PRSC`, u16 version, u16 reserved, u64 len | len `(f64 re, f64 im)` |

use std::fs;
use std::path::Path;

use thiserror::Error;

use crate::lifted::{MeasurementEnsemble, ModelError};
use crate::numerics::C64;

pub const FORMAT_VERSION: u16 = 1;

const ENSEMBLE_MAGIC: &[u8; 4] = b"PRSE";
const REAL_MAGIC: &[u8; 4] = b"PRSV";
const COMPLEX_MAGIC: &[u8; 4] = b"PRSC";
const PREAMBLE: usize = 8;

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
    #[error("bad magic: expected {expected:?}, found {found:?}")]
    BadMagic { expected: String, found: String },
    #[error("unsupported format version {0}")]
    VersionUnsupported(u16),
    #[error("truncated file: expected {expected} bytes, found {actual}")]
    Truncated { expected: usize, actual: usize },
    #[error("trailing data: expected {expected} bytes, found {actual}")]
    TrailingData { expected: usize, actual: usize },
    #[error("row {0} of the ensemble has zero norm")]
    ZeroNormRow(usize),
    #[error("invalid contents: {0}")]
    Invalid(String),
}

impl From<ModelError> for FormatError {
    fn from(e: ModelError) -> Self {
        match e {
            ModelError::ZeroNormRow(i) => FormatError::ZeroNormRow(i),
            other => FormatError::Invalid(other.to_string()),
        }
    }
}

fn header(magic: &[u8; 4], dims: &[u64], payload: usize) -> Vec<u8> {
    let mut out = Vec::with_capacity(PREAMBLE + 8 * dims.len() + payload);
    out.extend_from_slice(magic);
    out.extend_from_slice(&FORMAT_VERSION.to_le_bytes());
    out.extend_from_slice(&0u16.to_le_bytes());
    for d in dims {
        out.extend_from_slice(&d.to_le_bytes());
    }
    out
}

fn push_complex(out: &mut Vec<u8>, values: &[C64]) {
    for z in values {
        out.extend_from_slice(&z.re.to_le_bytes());
        out.extend_from_slice(&z.im.to_le_bytes());
    }
}

fn f64_at(bytes: &[u8], offset: usize) -> f64 {
    f64::from_le_bytes(bytes[offset..offset + 8].try_into().expect("8-byte slice"))
}

fn u64_at(bytes: &[u8], offset: usize) -> u64 {
    u64::from_le_bytes(bytes[offset..offset + 8].try_into().expect("8-byte slice"))
}

/// Validates magic and version and returns the `count` u64 dimensions after the preamble.
fn read_header(bytes: &[u8], magic: &[u8; 4], count: usize) -> Result<Vec<u64>, FormatError> {
    let head = PREAMBLE + 8 * count;
    if bytes.len() < 4 || &bytes[..4] != magic {
        let found = String::from_utf8_lossy(&bytes[..bytes.len().min(4)]).into_owned();
        return Err(FormatError::BadMagic { expected: String::from_utf8_lossy(magic).into_owned(), found });
    }
    if bytes.len() < head {
        return Err(FormatError::Truncated { expected: head, actual: bytes.len() });
    }
    let version = u16::from_le_bytes([bytes[4], bytes[5]]);
    if version != FORMAT_VERSION {
        return Err(FormatError::VersionUnsupported(version));
    }
    Ok((0..count).map(|i| u64_at(bytes, PREAMBLE + 8 * i)).collect())
}

fn check_length(bytes: &[u8], expected: Option<usize>) -> Result<usize, FormatError> {
    let expected = expected.ok_or_else(|| FormatError::Invalid("dimensions overflow".into()))?;
    match bytes.len().cmp(&expected) {
        std::cmp::Ordering::Less => Err(FormatError::Truncated { expected, actual: bytes.len() }),
        std::cmp::Ordering::Greater => Err(FormatError::TrailingData { expected, actual: bytes.len() }),
        std::cmp::Ordering::Equal => Ok(expected),
    }
}

fn read_complex(bytes: &[u8], start: usize, len: usize) -> Vec<C64> {
    (0..len).map(|i| C64::new(f64_at(bytes, start + 16 * i), f64_at(bytes, start + 16 * i + 8))).collect()
}

pub fn encode_ensemble(ens: &MeasurementEnsemble) -> Vec<u8> {
    let mut out = header(ENSEMBLE_MAGIC, &[ens.m() as u64, ens.n() as u64], 16 * ens.as_slice().len());
    push_complex(&mut out, ens.as_slice());
    out
}

pub fn decode_ensemble(bytes: &[u8]) -> Result<MeasurementEnsemble, FormatError> {
    let dims = read_header(bytes, ENSEMBLE_MAGIC, 2)?;
    let (m, n) = (dims[0] as usize, dims[1] as usize);
    let start = PREAMBLE + 16;
    check_length(bytes, m.checked_mul(n).and_then(|mn| mn.checked_mul(16)).and_then(|p| p.checked_add(start)))?;
    Ok(MeasurementEnsemble::new(m, n, read_complex(bytes, start, m * n))?)
}

pub fn encode_real_vector(values: &[f64]) -> Vec<u8> {
    let mut out = header(REAL_MAGIC, &[values.len() as u64], 8 * values.len());
    for v in values {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out
}

pub fn decode_real_vector(bytes: &[u8]) -> Result<Vec<f64>, FormatError> {
    let len = read_header(bytes, REAL_MAGIC, 1)?[0] as usize;
    let start = PREAMBLE + 8;
    check_length(bytes, len.checked_mul(8).and_then(|p| p.checked_add(start)))?;
    Ok((0..len).map(|i| f64_at(bytes, start + 8 * i)).collect())
}

pub fn encode_complex_vector(values: &[C64]) -> Vec<u8> {
    let mut out = header(COMPLEX_MAGIC, &[values.len() as u64], 16 * values.len());
    push_complex(&mut out, values);
    out
}

/// Decodes a `PRSC` vector, or a `PRSV` vector promoted to complex.
pub fn decode_complex_vector(bytes: &[u8]) -> Result<Vec<C64>, FormatError> {
    if bytes.starts_with(REAL_MAGIC) {
        return Ok(decode_real_vector(bytes)?.into_iter().map(|v| C64::new(v, 0.0)).collect());
    }
    let len = read_header(bytes, COMPLEX_MAGIC, 1)?[0] as usize;
    let start = PREAMBLE + 8;
    check_length(bytes, len.checked_mul(16).and_then(|p| p.checked_add(start)))?;
    Ok(read_complex(bytes, start, len))
}

pub fn save_ensemble(ens: &MeasurementEnsemble, path: impl AsRef<Path>) -> Result<(), FormatError> {
    Ok(fs::write(path, encode_ensemble(ens))?)
}

pub fn load_ensemble(path: impl AsRef<Path>) -> Result<MeasurementEnsemble, FormatError> {
    decode_ensemble(&fs::read(path)?)
}

pub fn save_real_vector(values: &[f64], path: impl AsRef<Path>) -> Result<(), FormatError> {
    Ok(fs::write(path, encode_real_vector(values))?)
}

/// Loads a `PRSV` file, or a text file of numbers separated by commas or whitespace.
pub fn load_real_vector(path: impl AsRef<Path>) -> Result<Vec<f64>, FormatError> {
    let bytes = fs::read(path)?;
    if bytes.starts_with(REAL_MAGIC) {
        return decode_real_vector(&bytes);
    }
    let text = std::str::from_utf8(&bytes).map_err(|_| FormatError::BadMagic {
        expected: "PRSV".into(),
        found: String::from_utf8_lossy(&bytes[..bytes.len().min(4)]).into_owned(),
    })?;
    let mut values = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("");
        for field in line.split(|c: char| c == ',' || c.is_whitespace()).filter(|f| !f.is_empty()) {
            let v = field.parse::<f64>().map_err(|_| FormatError::Invalid(format!("line {}: `{field}`", i + 1)))?;
            values.push(v);
        }
    }
    Ok(values)
}

pub fn save_complex_vector(values: &[C64], path: impl AsRef<Path>) -> Result<(), FormatError> {
    Ok(fs::write(path, encode_complex_vector(values))?)
}

pub fn load_complex_vector(path: impl AsRef<Path>) -> Result<Vec<C64>, FormatError> {
    decode_complex_vector(&fs::read(path)?)
}
