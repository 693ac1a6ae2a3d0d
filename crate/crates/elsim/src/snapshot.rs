//! Binary field snapshots.
//!
//! Layout, little endian: the magic `ARCFLD01`; `u32` dimension and modes
//! per axis; `f64` box length; `u32` rank tag (0 scalar, 1 vector, 2 tensor)
//! and two `u32` sizes; then every component's coefficients in grid order
//! as `(re, im)` pairs of `f64`.

use std::path::Path;

use elsim_core::{make_grid, Field, Rank};
use num_complex::Complex64;

use crate::error::AppError;

pub const MAGIC: &[u8; 8] = b"ARCFLD01";

pub fn encode(f: &Field) -> Vec<u8> {
    let g = f.grid();
    let (tag, a, b) = match f.rank() {
        Rank::Scalar => (0u32, 0u32, 0u32),
        Rank::Vector(n) => (1, n as u32, 0),
        Rank::Tensor(r, c) => (2, r as u32, c as u32),
    };
    let mut out = Vec::with_capacity(36 + 16 * g.len() * f.rank().components());
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&(g.dim() as u32).to_le_bytes());
    out.extend_from_slice(&(g.modes() as u32).to_le_bytes());
    out.extend_from_slice(&g.box_length().to_le_bytes());
    for x in [tag, a, b] {
        out.extend_from_slice(&x.to_le_bytes());
    }
    for c in f.components() {
        for z in c {
            out.extend_from_slice(&z.re.to_le_bytes());
            out.extend_from_slice(&z.im.to_le_bytes());
        }
    }
    out
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl Reader<'_> {
    fn take<const N: usize>(&mut self) -> Option<[u8; N]> {
        let s = self.bytes.get(self.pos..self.pos + N)?;
        self.pos += N;
        s.try_into().ok()
    }

    fn u32(&mut self) -> Option<u32> {
        self.take::<4>().map(u32::from_le_bytes)
    }

    fn f64(&mut self) -> Option<f64> {
        self.take::<8>().map(f64::from_le_bytes)
    }
}

pub fn decode(bytes: &[u8], path: &Path) -> Result<Field, AppError> {
    let bad = |msg: &str| AppError::Snapshot { path: path.to_path_buf(), msg: msg.to_string() };
    let mut r = Reader { bytes, pos: 0 };
    if r.take::<8>().as_ref() != Some(MAGIC) {
        return Err(bad("missing magic"));
    }
    let header = (|| Some((r.u32()?, r.u32()?, r.f64()?, r.u32()?, r.u32()?, r.u32()?)))();
    let (dim, modes, length, tag, a, b) = header.ok_or_else(|| bad("truncated header"))?;
    let grid = make_grid(dim as usize, modes as usize, length).map_err(|e| bad(&e.to_string()))?;
    let rank = match tag {
        0 => Rank::Scalar,
        1 => Rank::Vector(a as usize),
        2 => Rank::Tensor(a as usize, b as usize),
        _ => return Err(bad("unknown rank tag")),
    };
    let n = rank.components();
    if bytes.len() != r.pos + 16 * n * grid.len() {
        return Err(bad("payload length does not match the header"));
    }
    let mut comps = Vec::with_capacity(n);
    for _ in 0..n {
        let mut c = Vec::with_capacity(grid.len());
        for _ in 0..grid.len() {
            let (re, im) = (r.f64(), r.f64());
            c.push(Complex64::new(re.unwrap_or(0.0), im.unwrap_or(0.0)));
        }
        comps.push(c);
    }
    Field::from_coeffs(grid, rank, comps).map_err(|e| bad(&e.to_string()))
}

pub fn read(path: &Path) -> Result<Field, AppError> {
    let bytes = std::fs::read(path).map_err(AppError::io(path))?;
    decode(&bytes, path)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn round_trip_is_bit_exact() {
        let g = make_grid(3, 8, 2.0 * PI).unwrap();
        let f = Field::from_fn(g, Rank::Vector(3), |x| vec![x[0].sin(), (x[1] + x[2]).cos() / 3.0, 0.1]);
        let bytes = encode(&f);
        assert_eq!(&bytes[..8], MAGIC);
        let back = decode(&bytes, Path::new("mem")).unwrap();
        assert_eq!(back, f);
    }

    #[test]
    fn rejects_damage() {
        let g = make_grid(2, 4, 1.0).unwrap();
        let bytes = encode(&Field::zeros(g, Rank::Scalar));
        assert!(decode(&bytes[..bytes.len() - 1], Path::new("x")).is_err());
        let mut bad = bytes.clone();
        bad[0] = b'X';
        assert!(decode(&bad, Path::new("x")).is_err());
    }
}
