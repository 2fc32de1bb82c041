//! Tensor files.
//!
//! * JSON: `{"dims":[n1,n2,n3],"data":[...]}` with `data` in slice-major order.
//! * Binary (`.t3b`): three little-endian `u32` dims, then `n1*n2*n3`
//!   little-endian `f64` values in slice-major order.
//!
//! The format is chosen by extension; anything other than `.t3b` is JSON.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Result, TensorError};
use crate::tensor::{Dims, Tensor3};

pub const BINARY_EXTENSION: &str = "t3b";
const HEADER_LEN: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Binary,
}

impl Format {
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case(BINARY_EXTENSION) => Format::Binary,
            _ => Format::Json,
        }
    }
}

#[derive(Serialize, Deserialize)]
struct JsonTensor {
    dims: [usize; 3],
    data: Vec<f64>,
}

pub fn to_json(t: &Tensor3) -> String {
    let d = t.dims();
    serde_json::to_string(&JsonTensor { dims: [d.n1, d.n2, d.n3], data: t.data().to_vec() }).expect("finite data serializes")
}

pub fn from_json(s: &str) -> Result<Tensor3> {
    let j: JsonTensor = serde_json::from_str(s).map_err(|e| TensorError::Parse(e.to_string()))?;
    let dims = Dims::new(j.dims[0], j.dims[1], j.dims[2]);
    if j.data.len() != dims.len() {
        return Err(TensorError::Parse(format!("dims {dims} need {} values, got {}", dims.len(), j.data.len())));
    }
    Tensor3::new(dims, j.data).map_err(|e| TensorError::Parse(e.to_string()))
}

pub fn to_bytes(t: &Tensor3) -> Vec<u8> {
    let d = t.dims();
    let mut out = Vec::with_capacity(HEADER_LEN + 8 * d.len());
    for n in [d.n1, d.n2, d.n3] {
        let n = u32::try_from(n).expect("dimension fits in u32");
        out.extend_from_slice(&n.to_le_bytes());
    }
    for x in t.data() {
        out.extend_from_slice(&x.to_le_bytes());
    }
    out
}

pub fn from_bytes(bytes: &[u8]) -> Result<Tensor3> {
    if bytes.len() < HEADER_LEN {
        return Err(TensorError::Parse(format!("binary tensor shorter than its {HEADER_LEN}-byte header")));
    }
    let dim = |i: usize| u32::from_le_bytes(bytes[4 * i..4 * i + 4].try_into().expect("4 bytes")) as usize;
    let dims = Dims::new(dim(0), dim(1), dim(2));
    let payload = &bytes[HEADER_LEN..];
    let expected = dims
        .n1
        .checked_mul(dims.n2)
        .and_then(|x| x.checked_mul(dims.n3))
        .and_then(|x| x.checked_mul(8)).ok_or_else(|| TensorError::Parse(format!("dims {dims} overflow")))?;
    if payload.len() != expected {
        return Err(TensorError::Parse(format!("dims {dims} need {expected} payload bytes, got {}", payload.len())));
    }
    let data = payload.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes"))).collect();
    Tensor3::new(dims, data).map_err(|e| TensorError::Parse(e.to_string()))
}

pub fn read_tensor(path: impl AsRef<Path>) -> Result<Tensor3> {
    let path = path.as_ref();
    match Format::from_path(path) {
        Format::Binary => from_bytes(&fs::read(path)?),
        Format::Json => from_json(&fs::read_to_string(path)?),
    }
}

pub fn write_tensor(path: impl AsRef<Path>, t: &Tensor3) -> Result<()> {
    let path = path.as_ref();
    match Format::from_path(path) {
        Format::Binary => fs::write(path, to_bytes(t))?,
        Format::Json => fs::write(path, to_json(t))?,
    }
    Ok(())
}
