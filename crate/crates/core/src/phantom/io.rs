//! Grid binary (`nx ny nz sx sy sz ox oy oz` text line + little-endian f64
//! values, x-fastest), 16-bit PGM images and profile CSV.

use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use super::grid::{ConcentrationGrid, GridSpec};
use crate::error::{Error, Result};
use crate::scalar::Real;

pub fn write_grid<T: Real, W: Write>(grid: &ConcentrationGrid<T>, mut w: W) -> Result<()> {
    let s = &grid.spec;
    writeln!(
        w,
        "{} {} {} {} {} {} {} {} {}",
        s.dims[0], s.dims[1], s.dims[2], s.spacing[0], s.spacing[1], s.spacing[2], s.origin[0], s.origin[1], s.origin[2]
    )?;
    let mut buf = Vec::with_capacity(grid.len() * 8);
    for v in &grid.values {
        buf.extend_from_slice(&v.f64().to_le_bytes());
    }
    w.write_all(&buf)?;
    Ok(())
}

pub fn read_grid<T: Real, R: Read>(r: R) -> Result<ConcentrationGrid<T>> {
    let mut r = BufReader::new(r);
    let mut header = String::new();
    r.read_line(&mut header)?;
    let toks: Vec<&str> = header.split_whitespace().collect();
    if toks.len() != 9 {
        return Err(Error::Parse { line: 1, msg: format!("grid header needs 9 fields, found {}", toks.len()) });
    }
    let dim = |i: usize| -> Result<usize> {
        toks[i].parse().map_err(|_| Error::Parse { line: 1, msg: format!("bad dimension '{}'", toks[i]) })
    };
    let num = |i: usize| -> Result<T> {
        toks[i]
            .parse::<f64>()
            .map(T::of)
            .map_err(|_| Error::Parse { line: 1, msg: format!("bad number '{}'", toks[i]) })
    };
    let spec = GridSpec::new([dim(0)?, dim(1)?, dim(2)?], [num(3)?, num(4)?, num(5)?], [num(6)?, num(7)?, num(8)?])?;
    let mut bytes = vec![0u8; spec.len() * 8];
    r.read_exact(&mut bytes)?;
    let values = bytes.chunks_exact(8).map(|c| T::of(f64::from_le_bytes(c.try_into().unwrap()))).collect();
    ConcentrationGrid::from_values(spec, values)
}

pub fn save_grid<T: Real>(grid: &ConcentrationGrid<T>, path: impl AsRef<Path>) -> Result<()> {
    write_grid(grid, std::io::BufWriter::new(std::fs::File::create(path)?))
}

pub fn load_grid<T: Real>(path: impl AsRef<Path>) -> Result<ConcentrationGrid<T>> {
    read_grid(std::fs::File::open(path)?)
}

/// Binary 16-bit PGM of the center layer, y increasing upwards. Negative
/// values are clipped to zero and the maximum maps to 65535.
pub fn write_pgm<T: Real, W: Write>(grid: &ConcentrationGrid<T>, mut w: W) -> Result<()> {
    let (nx, ny) = (grid.spec.dims[0], grid.spec.dims[1]);
    let (_, layer) = grid.center_layer();
    let max = layer.iter().fold(T::zero(), |m, &v| m.max(v));
    write!(w, "P5\n{nx} {ny}\n65535\n")?;
    let mut buf = Vec::with_capacity(nx * ny * 2);
    for j in (0..ny).rev() {
        for i in 0..nx {
            let v = layer[i + nx * j].max(T::zero());
            let q = if max > T::zero() { (v / max * T::of(65535.0)).round().f64() as u16 } else { 0 };
            buf.extend_from_slice(&q.to_be_bytes());
        }
    }
    w.write_all(&buf)?;
    Ok(())
}

pub fn save_pgm<T: Real>(grid: &ConcentrationGrid<T>, path: impl AsRef<Path>) -> Result<()> {
    write_pgm(grid, std::io::BufWriter::new(std::fs::File::create(path)?))
}

/// Two-column CSV with a header line and 17 significant digits.
pub fn write_profile_csv<T: Real, W: Write>(header: [&str; 2], x: &[T], y: &[T], mut w: W) -> Result<()> {
    writeln!(w, "{},{}", header[0], header[1])?;
    for (a, b) in x.iter().zip(y) {
        writeln!(w, "{:.16e},{:.16e}", a.f64(), b.f64())?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_round_trip() {
        let spec = GridSpec::centered([3, 2, 2], [1e-3f64, 2e-3, 1.3e-3]).unwrap();
        let g = ConcentrationGrid::from_values(spec, (0..12).map(|i| i as f64 * 0.1 - 0.3).collect()).unwrap();
        let mut buf = Vec::new();
        write_grid(&g, &mut buf).unwrap();
        let back: ConcentrationGrid<f64> = read_grid(buf.as_slice()).unwrap();
        assert_eq!(back, g);
    }

    #[test]
    fn pgm_clips_negatives() {
        let spec = GridSpec::centered([2, 1, 1], [1.0f64; 3]).unwrap();
        let g = ConcentrationGrid::from_values(spec, vec![-1.0, 2.0]).unwrap();
        let mut buf = Vec::new();
        write_pgm(&g, &mut buf).unwrap();
        let head = b"P5\n2 1\n65535\n";
        assert_eq!(&buf[..head.len()], head);
        assert_eq!(&buf[head.len()..], &[0, 0, 255, 255]);
    }
}
