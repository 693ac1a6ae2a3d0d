//! Periodic box discretization.
//!
//! Spectral arrays are stored flat with axis 0 slowest. Along each axis the
//! storage slot `j` carries the integer mode `j` for `j <= M/2` and `j - M`
//! otherwise, so the represented modes are `-M/2+1 ..= M/2`. The `+M/2` slot
//! is the Nyquist mode and is kept at zero on every field.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpectralGrid {
    dim: usize,
    modes: usize,
    length: f64,
}

/// Builds a grid, rejecting unsupported dimensions, odd or tiny resolutions
/// and non-positive box lengths.
pub fn make_grid(dim: usize, modes_per_axis: usize, box_length: f64) -> Result<SpectralGrid> {
    SpectralGrid::new(dim, modes_per_axis, box_length)
}

impl SpectralGrid {
    pub fn new(dim: usize, modes: usize, length: f64) -> Result<Self> {
        if !(dim == 2 || dim == 3) {
            return Err(Error::InvalidGrid(format!("dimension {dim} not in {{2, 3}}")));
        }
        if modes % 2 != 0 {
            return Err(Error::InvalidGrid(format!("odd resolution {modes}")));
        }
        if modes < 4 {
            return Err(Error::InvalidGrid(format!("resolution {modes} below 4")));
        }
        if !(length.is_finite() && length > 0.0) {
            return Err(Error::InvalidGrid(format!("box length {length} not positive")));
        }
        Ok(Self { dim, modes, length })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn box_length(&self) -> f64 {
        self.length
    }

    /// Number of lattice points (equivalently, of stored coefficients).
    pub fn len(&self) -> usize {
        self.modes.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn spacing(&self) -> f64 {
        self.length / self.modes as f64
    }

    /// Smallest nonzero wavenumber `2π/L`.
    pub fn fundamental(&self) -> f64 {
        2.0 * PI / self.length
    }

    /// `L^N`, the factor converting coefficient sums into integrals.
    pub fn volume(&self) -> f64 {
        self.length.powi(self.dim as i32)
    }

    pub fn cell_volume(&self) -> f64 {
        self.spacing().powi(self.dim as i32)
    }

    /// Signed integer mode stored at slot `j` of one axis.
    pub fn mode_number(&self, j: usize) -> i64 {
        let m = self.modes as i64;
        let j = j as i64;
        if j <= m / 2 {
            j
        } else {
            j - m
        }
    }

    /// Per-axis wavenumbers in storage order; the Nyquist slot is included.
    pub fn axis_wavenumbers(&self) -> Vec<f64> {
        let k0 = self.fundamental();
        (0..self.modes).map(|j| k0 * self.mode_number(j) as f64).collect()
    }

    pub fn axis_slots(&self, flat: usize) -> [usize; 3] {
        let m = self.modes;
        match self.dim {
            2 => [flat / m, flat % m, 0],
            _ => [flat / (m * m), (flat / m) % m, flat % m],
        }
    }

    pub fn flat_index(&self, slots: [usize; 3]) -> usize {
        let m = self.modes;
        match self.dim {
            2 => slots[0] * m + slots[1],
            _ => (slots[0] * m + slots[1]) * m + slots[2],
        }
    }

    pub fn mode_indices(&self, flat: usize) -> [i64; 3] {
        let s = self.axis_slots(flat);
        let mut out = [0i64; 3];
        for a in 0..self.dim {
            out[a] = self.mode_number(s[a]);
        }
        out
    }

    pub fn wavevector(&self, flat: usize) -> [f64; 3] {
        let m = self.mode_indices(flat);
        let k0 = self.fundamental();
        [k0 * m[0] as f64, k0 * m[1] as f64, k0 * m[2] as f64]
    }

    pub fn is_nyquist(&self, flat: usize) -> bool {
        let s = self.axis_slots(flat);
        s[..self.dim].iter().any(|&j| j == self.modes / 2)
    }

    /// Slot holding the mode `-k` for the mode stored at `flat`.
    pub fn mirror(&self, flat: usize) -> usize {
        let m = self.modes;
        let s = self.axis_slots(flat);
        let mut t = [0usize; 3];
        for a in 0..self.dim {
            t[a] = (m - s[a]) % m;
        }
        self.flat_index(t)
    }

    /// Largest mode kept by the 2/3 rule: the biggest `K` with `3K < M`.
    pub fn two_thirds_cutoff(&self) -> i64 {
        ((self.modes as i64) - 1) / 3
    }

    /// Same box, `factor` times the resolution per axis.
    pub fn refined(&self, factor: usize) -> Self {
        Self {
            dim: self.dim,
            modes: self.modes * factor,
            length: self.length,
        }
    }

    pub fn with_modes(&self, modes: usize) -> Result<Self> {
        Self::new(self.dim, modes, self.length)
    }

    /// Physical coordinates of lattice point `flat`, `x_j = j L / M`.
    pub fn point(&self, flat: usize) -> [f64; 3] {
        let s = self.axis_slots(flat);
        let h = self.spacing();
        let mut x = [0.0; 3];
        for a in 0..self.dim {
            x[a] = s[a] as f64 * h;
        }
        x
    }

    /// Cached wavevectors for every slot, in storage order.
    pub fn wavevectors(&self) -> Arc<Vec<[f64; 3]>> {
        static CACHE: OnceLock<Mutex<HashMap<(usize, usize, u64), Arc<Vec<[f64; 3]>>>>> =
            OnceLock::new();
        let key = (self.dim, self.modes, self.length.to_bits());
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        let mut guard = cache.lock().unwrap_or_else(|e| e.into_inner());
        guard
            .entry(key)
            .or_insert_with(|| Arc::new((0..self.len()).map(|i| self.wavevector(i)).collect()))
            .clone()
    }
}

pub fn norm_sq(k: &[f64; 3]) -> f64 {
    k[0] * k[0] + k[1] * k[1] + k[2] * k[2]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn smallest_wavenumber() {
        let g = make_grid(3, 64, 20.0 * PI).unwrap();
        assert!((g.fundamental() - 0.1).abs() < 1e-15);
    }

    #[test]
    fn small_lattice_with_nyquist() {
        let g = make_grid(2, 4, 2.0 * PI).unwrap();
        let ks = g.axis_wavenumbers();
        let mut sorted = ks.clone();
        sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert_eq!(sorted, vec![-1.0, 0.0, 1.0, 2.0]);
        assert_eq!(ks[2], 2.0);
        assert!(g.is_nyquist(g.flat_index([2, 0, 0])));
        assert!(!g.is_nyquist(g.flat_index([1, 3, 0])));
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(matches!(make_grid(3, 63, 2.0 * PI), Err(Error::InvalidGrid(_))));
        assert!(make_grid(3, 2, 2.0 * PI).is_err());
        assert!(make_grid(3, 8, 0.0).is_err());
        assert!(make_grid(3, 8, -1.0).is_err());
        assert!(make_grid(4, 8, 1.0).is_err());
    }

    #[test]
    fn mirror_negates_modes() {
        let g = make_grid(3, 6, 1.0).unwrap();
        for i in 0..g.len() {
            if g.is_nyquist(i) {
                continue;
            }
            let m = g.mode_indices(i);
            let n = g.mode_indices(g.mirror(i));
            assert_eq!([-m[0], -m[1], -m[2]], n);
        }
    }

    #[test]
    fn two_thirds_cutoff_values() {
        assert_eq!(make_grid(3, 64, 1.0).unwrap().two_thirds_cutoff(), 21);
        assert_eq!(make_grid(3, 6, 1.0).unwrap().two_thirds_cutoff(), 1);
        assert_eq!(make_grid(3, 32, 1.0).unwrap().two_thirds_cutoff(), 10);
    }
}
