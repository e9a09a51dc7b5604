//! "FBO2" binary field snapshots, all little-endian:
//! magic, version u32, nx u32, ny u32, lx f64, ly f64, t f64, alpha f64,
//! then `nx * ny` f64 samples in `iy * nx + ix` order.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use super::field::RealField;
use super::grid::GridSpec;
use crate::error::{Error, Result};

pub const MAGIC: &[u8; 4] = b"FBO2";
pub const VERSION: u32 = 1;
const HEADER_LEN: usize = 4 + 3 * 4 + 4 * 8;

#[derive(Clone, Debug, PartialEq)]
pub struct Snapshot {
    pub field: RealField,
    pub t: f64,
    pub alpha: f64,
}

pub fn encode_snapshot(field: &RealField, t: f64, alpha: f64) -> Vec<u8> {
    let g = field.grid;
    let mut out = Vec::with_capacity(HEADER_LEN + 8 * g.len());
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    out.extend_from_slice(&(g.nx as u32).to_le_bytes());
    out.extend_from_slice(&(g.ny as u32).to_le_bytes());
    for v in [g.lx, g.ly, t, alpha] {
        out.extend_from_slice(&v.to_le_bytes());
    }
    for v in &field.samples {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out
}

pub fn decode_snapshot(bytes: &[u8]) -> Result<Snapshot> {
    if bytes.len() < HEADER_LEN {
        return Err(Error::Snapshot(format!(
            "{} bytes is shorter than the {HEADER_LEN}-byte header",
            bytes.len()
        )));
    }
    if &bytes[..4] != MAGIC {
        return Err(Error::Snapshot("bad magic".into()));
    }
    let u32_at = |o: usize| u32::from_le_bytes(bytes[o..o + 4].try_into().unwrap());
    let f64_at = |o: usize| f64::from_le_bytes(bytes[o..o + 8].try_into().unwrap());
    let version = u32_at(4);
    if version != VERSION {
        return Err(Error::Snapshot(format!("unsupported version {version}")));
    }
    let (nx, ny) = (u32_at(8) as usize, u32_at(12) as usize);
    let (lx, ly, t, alpha) = (f64_at(16), f64_at(24), f64_at(32), f64_at(40));
    let grid = GridSpec::new(nx, ny, lx, ly)?;
    let body = &bytes[HEADER_LEN..];
    if body.len() != 8 * grid.len() {
        return Err(Error::Snapshot(format!(
            "expected {} sample bytes, found {}",
            8 * grid.len(),
            body.len()
        )));
    }
    let samples = body
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect();
    Ok(Snapshot {
        field: RealField { grid, samples },
        t,
        alpha,
    })
}

pub fn write_snapshot(path: impl AsRef<Path>, field: &RealField, t: f64, alpha: f64) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    w.write_all(&encode_snapshot(field, t, alpha))?;
    w.flush()?;
    Ok(())
}

pub fn read_snapshot(path: impl AsRef<Path>) -> Result<Snapshot> {
    let mut bytes = Vec::new();
    BufReader::new(File::open(path)?).read_to_end(&mut bytes)?;
    decode_snapshot(&bytes)
}
