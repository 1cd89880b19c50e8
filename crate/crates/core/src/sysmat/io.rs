//! Matrix files: a text line `rows cols nnz hash`, a text line with the grid
//! (`nx ny nz sx sy sz ox oy oz`) and row blocks (`count rows:coil:rate ...`,
//! rate 0 for non-uniform), then `nnz` little-endian `(u64 row, u64 col,
//! f64 value)` triplets in row-major order.

use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use super::matrix::{RowBlock, SystemMatrix};
use crate::error::{Error, Result};
use crate::phantom::GridSpec;
use crate::scalar::Real;

pub fn write_system_matrix<T: Real, W: Write>(s: &SystemMatrix<T>, mut w: W) -> Result<()> {
    writeln!(w, "{} {} {} {:016x}", s.rows(), s.cols(), s.nnz(), s.hash)?;
    let g = &s.grid;
    write!(
        w,
        "{} {} {} {} {} {} {} {} {} {}",
        g.dims[0], g.dims[1], g.dims[2], g.spacing[0], g.spacing[1], g.spacing[2], g.origin[0], g.origin[1], g.origin[2],
        s.blocks.len()
    )?;
    for b in &s.blocks {
        write!(w, " {}:{}:{}", b.rows, b.coil, b.sample_rate.unwrap_or(T::zero()))?;
    }
    writeln!(w)?;
    let mut buf = Vec::with_capacity(s.nnz() * 24);
    for (r, c, v) in s.triplets() {
        buf.extend_from_slice(&(r as u64).to_le_bytes());
        buf.extend_from_slice(&(c as u64).to_le_bytes());
        buf.extend_from_slice(&v.f64().to_le_bytes());
    }
    w.write_all(&buf)?;
    Ok(())
}

/// Reads a matrix; with `expected_hash` set, a different stored hash is an
/// error.
pub fn read_system_matrix<T: Real, R: Read>(r: R, expected_hash: Option<u64>) -> Result<SystemMatrix<T>> {
    let mut r = BufReader::new(r);
    let mut line = String::new();
    r.read_line(&mut line)?;
    let bad = |l: usize, m: &str| Error::Parse { line: l, msg: m.to_string() };
    let toks: Vec<&str> = line.split_whitespace().collect();
    if toks.len() != 4 {
        return Err(bad(1, "matrix header needs rows cols nnz hash"));
    }
    let rows: usize = toks[0].parse().map_err(|_| bad(1, "bad row count"))?;
    let cols: usize = toks[1].parse().map_err(|_| bad(1, "bad column count"))?;
    let nnz: usize = toks[2].parse().map_err(|_| bad(1, "bad nnz"))?;
    let hash = u64::from_str_radix(toks[3], 16).map_err(|_| bad(1, "bad hash"))?;
    if let Some(e) = expected_hash {
        if e != hash {
            return Err(Error::HashMismatch { expected: e, found: hash });
        }
    }
    line.clear();
    r.read_line(&mut line)?;
    let toks: Vec<&str> = line.split_whitespace().collect();
    if toks.len() < 10 {
        return Err(bad(2, "grid line too short"));
    }
    let num = |i: usize| toks[i].parse::<f64>().map(T::of).map_err(|_| bad(2, "bad grid number"));
    let dim = |i: usize| toks[i].parse::<usize>().map_err(|_| bad(2, "bad grid dimension"));
    let grid = GridSpec::new([dim(0)?, dim(1)?, dim(2)?], [num(3)?, num(4)?, num(5)?], [num(6)?, num(7)?, num(8)?])?;
    let nblocks = dim(9)?;
    if toks.len() != 10 + nblocks || grid.len() != cols {
        return Err(bad(2, "grid line inconsistent with header"));
    }
    let mut blocks = Vec::with_capacity(nblocks);
    for tok in &toks[10..] {
        let parts: Vec<&str> = tok.split(':').collect();
        if parts.len() != 3 {
            return Err(bad(2, "bad row block"));
        }
        let rate: f64 = parts[2].parse().map_err(|_| bad(2, "bad block rate"))?;
        blocks.push(RowBlock {
            rows: parts[0].parse().map_err(|_| bad(2, "bad block rows"))?,
            coil: parts[1].parse().map_err(|_| bad(2, "bad block coil"))?,
            sample_rate: (rate > 0.0).then(|| T::of(rate)),
        });
    }
    let mut bytes = vec![0u8; nnz * 24];
    r.read_exact(&mut bytes)?;
    let mut row_lists: Vec<Vec<(u32, T)>> = vec![Vec::new(); rows];
    for ch in bytes.chunks_exact(24) {
        let row = u64::from_le_bytes(ch[0..8].try_into().unwrap()) as usize;
        let col = u64::from_le_bytes(ch[8..16].try_into().unwrap());
        let v = f64::from_le_bytes(ch[16..24].try_into().unwrap());
        if row >= rows {
            return Err(Error::Domain(format!("row {row} out of range")));
        }
        row_lists[row].push((col as u32, T::of(v)));
    }
    SystemMatrix::from_rows(row_lists, grid, hash, blocks)
}

pub fn save_system_matrix<T: Real>(s: &SystemMatrix<T>, path: impl AsRef<Path>) -> Result<()> {
    write_system_matrix(s, std::io::BufWriter::new(std::fs::File::create(path)?))
}

pub fn load_system_matrix<T: Real>(path: impl AsRef<Path>, expected_hash: Option<u64>) -> Result<SystemMatrix<T>> {
    read_system_matrix(std::fs::File::open(path)?, expected_hash)
}
