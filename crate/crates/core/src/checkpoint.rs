//! Flat binary checkpoints.
//!
//! Layout (all integers little-endian):
//!
//! ```text
//! b"GFXCKPT1"
//! u32 tag length, tag bytes (UTF-8, identifies the model kind and config)
//! u32 tensor count
//! per tensor: u32 rows, u32 cols, rows * cols f64 in row-major order
//! ```
//!
//! Values are stored bit-exactly, so a save/load round trip reproduces the
//! model exactly.

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::linalg::Mat;

const MAGIC: &[u8; 8] = b"GFXCKPT1";

pub fn encode(tag: &str, tensors: &[&Mat]) -> Vec<u8> {
    let payload: usize = tensors.iter().map(|t| 8 + 8 * t.data().len()).sum();
    let mut out = Vec::with_capacity(16 + tag.len() + payload);
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&(tag.len() as u32).to_le_bytes());
    out.extend_from_slice(tag.as_bytes());
    out.extend_from_slice(&(tensors.len() as u32).to_le_bytes());
    for t in tensors {
        out.extend_from_slice(&(t.rows() as u32).to_le_bytes());
        out.extend_from_slice(&(t.cols() as u32).to_le_bytes());
        for x in t.data() {
            out.extend_from_slice(&x.to_le_bytes());
        }
    }
    out
}

struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl Reader<'_> {
    fn take(&mut self, n: usize, what: &str) -> Result<&[u8]> {
        let end = self.pos.checked_add(n).filter(|&e| e <= self.buf.len());
        match end {
            Some(end) => {
                let s = &self.buf[self.pos..end];
                self.pos = end;
                Ok(s)
            }
            None => Err(Error::Checkpoint(format!(
                "truncated while reading {what} at byte {}",
                self.pos
            ))),
        }
    }

    fn u32(&mut self, what: &str) -> Result<usize> {
        let b = self.take(4, what)?;
        Ok(u32::from_le_bytes(b.try_into().unwrap()) as usize)
    }
}

pub fn decode(bytes: &[u8]) -> Result<(String, Vec<Mat>)> {
    let mut r = Reader { buf: bytes, pos: 0 };
    if r.take(8, "magic")? != MAGIC {
        return Err(Error::Checkpoint("bad magic bytes".into()));
    }
    let tag_len = r.u32("tag length")?;
    let tag = String::from_utf8(r.take(tag_len, "tag")?.to_vec())
        .map_err(|_| Error::Checkpoint("tag is not UTF-8".into()))?;
    let count = r.u32("tensor count")?;
    let mut tensors = Vec::with_capacity(count.min(1024));
    for i in 0..count {
        let rows = r.u32("tensor rows")?;
        let cols = r.u32("tensor cols")?;
        let len = rows
            .checked_mul(cols)
            .and_then(|n| n.checked_mul(8))
            .ok_or_else(|| Error::Checkpoint(format!("tensor {i} is too large")))?;
        let raw = r.take(len, "tensor data")?;
        let data = raw
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
            .collect();
        tensors.push(Mat::from_vec(rows, cols, data));
    }
    if r.pos != bytes.len() {
        return Err(Error::Checkpoint(format!(
            "{} trailing bytes",
            bytes.len() - r.pos
        )));
    }
    Ok((tag, tensors))
}

pub fn save(path: impl AsRef<Path>, tag: &str, tensors: &[&Mat]) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, encode(tag, tensors)).map_err(|e| Error::io(path, e))
}

pub fn load(path: impl AsRef<Path>) -> Result<(String, Vec<Mat>)> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    decode(&bytes)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_bit_exact() {
        let a = Mat::from_vec(2, 2, vec![0.1, -0.0, f64::MIN_POSITIVE, 1e300]);
        let b = Mat::zeros(0, 3);
        let bytes = encode("gnn node 20", &[&a, &b]);
        let (tag, ts) = decode(&bytes).unwrap();
        assert_eq!(tag, "gnn node 20");
        assert_eq!(
            ts[0].data().iter().map(|x| x.to_bits()).collect::<Vec<_>>(),
            a.data().iter().map(|x| x.to_bits()).collect::<Vec<_>>()
        );
        assert_eq!(ts[1].shape(), (0, 3));
        assert_eq!(encode(&tag, &[&ts[0], &ts[1]]), bytes);
    }

    #[test]
    fn truncated_input_is_rejected() {
        let a = Mat::zeros(3, 3);
        let bytes = encode("x", &[&a]);
        assert!(decode(&bytes[..bytes.len() - 1]).is_err());
        assert!(decode(b"nope").is_err());
    }
}
