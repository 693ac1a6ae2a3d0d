//! Band-limited real fields held as spectral coefficients.

use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fft;
use crate::grid::SpectralGrid;

/// Shape of the values a field takes at each point.
///
/// Vector lengths and tensor shapes are not tied to the spatial dimension:
/// a director in the ambient `R^3` over a 2-D box is `Vector(3)`, and its
/// Jacobian is `Tensor(3, 2)` (row = component, column = derivative axis).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Rank {
    Scalar,
    Vector(usize),
    Tensor(usize, usize),
}

impl Rank {
    pub fn components(&self) -> usize {
        match *self {
            Rank::Scalar => 1,
            Rank::Vector(n) => n,
            Rank::Tensor(r, c) => r * c,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Field {
    grid: SpectralGrid,
    rank: Rank,
    comps: Vec<Vec<Complex64>>,
}

impl Field {
    pub fn zeros(grid: SpectralGrid, rank: Rank) -> Self {
        let comps = vec![vec![Complex64::new(0.0, 0.0); grid.len()]; rank.components()];
        Self { grid, rank, comps }
    }

    pub fn from_coeffs(grid: SpectralGrid, rank: Rank, comps: Vec<Vec<Complex64>>) -> Result<Self> {
        if comps.len() != rank.components() || comps.iter().any(|c| c.len() != grid.len()) {
            return Err(Error::InvalidArgument(format!(
                "coefficient arrays do not match rank {rank:?} on {} points",
                grid.len()
            )));
        }
        let mut f = Self { grid, rank, comps };
        f.zero_nyquist();
        Ok(f)
    }

    /// Forward transform of samples taken at the lattice points of `grid`.
    pub fn from_physical(grid: SpectralGrid, rank: Rank, values: &[Vec<f64>]) -> Result<Self> {
        if values.len() != rank.components() || values.iter().any(|v| v.len() != grid.len()) {
            return Err(Error::InvalidArgument(format!(
                "physical arrays do not match rank {rank:?} on {} points",
                grid.len()
            )));
        }
        let refs: Vec<&[f64]> = values.iter().map(|v| v.as_slice()).collect();
        let comps = fft::from_physical(&refs, grid.modes(), grid.modes(), grid.dim());
        Ok(Self { grid, rank, comps })
    }

    /// Forward transform of samples taken on the same box with `points`
    /// lattice points per axis; modes the grid cannot hold are dropped.
    pub fn from_physical_on(grid: SpectralGrid, rank: Rank, values: &[Vec<f64>], points: usize) -> Result<Self> {
        if points < grid.modes() {
            return Err(Error::InvalidArgument(format!("{points} points cannot carry {} modes", grid.modes())));
        }
        let len = points.pow(grid.dim() as u32);
        if values.len() != rank.components() || values.iter().any(|v| v.len() != len) {
            return Err(Error::InvalidArgument(format!(
                "physical arrays do not match rank {rank:?} on {len} points"
            )));
        }
        let refs: Vec<&[f64]> = values.iter().map(|v| v.as_slice()).collect();
        let comps = fft::from_physical(&refs, points, grid.modes(), grid.dim());
        Ok(Self { grid, rank, comps })
    }

    /// Samples `f` at the lattice points and transforms.
    pub fn from_fn(grid: SpectralGrid, rank: Rank, f: impl Fn([f64; 3]) -> Vec<f64>) -> Self {
        let n = rank.components();
        let mut values = vec![vec![0.0; grid.len()]; n];
        for i in 0..grid.len() {
            let v = f(grid.point(i));
            for c in 0..n {
                values[c][i] = v[c];
            }
        }
        Self::from_physical(grid, rank, &values).expect("shapes agree by construction")
    }

    pub fn scalar_from_fn(grid: SpectralGrid, f: impl Fn([f64; 3]) -> f64) -> Self {
        Self::from_fn(grid, Rank::Scalar, |x| vec![f(x)])
    }

    pub fn grid(&self) -> &SpectralGrid {
        &self.grid
    }

    pub fn rank(&self) -> Rank {
        self.rank
    }

    pub fn components(&self) -> &[Vec<Complex64>] {
        &self.comps
    }

    pub fn components_mut(&mut self) -> &mut [Vec<Complex64>] {
        &mut self.comps
    }

    pub fn component(&self, c: usize) -> &[Complex64] {
        &self.comps[c]
    }

    /// Extracts component `c` as a scalar field.
    pub fn component_field(&self, c: usize) -> Field {
        Field {
            grid: self.grid,
            rank: Rank::Scalar,
            comps: vec![self.comps[c].clone()],
        }
    }

    /// Stacks scalar fields into a vector field.
    pub fn stack(parts: &[Field]) -> Result<Field> {
        let first = parts.first().ok_or_else(|| Error::InvalidArgument("nothing to stack".into()))?;
        let mut comps = Vec::with_capacity(parts.len());
        for p in parts {
            if p.grid != first.grid {
                return Err(Error::GridMismatch);
            }
            comps.extend(p.comps.iter().cloned());
        }
        let rank = Rank::Vector(comps.len());
        Ok(Field { grid: first.grid, rank, comps })
    }

    pub fn into_components(self) -> Vec<Vec<Complex64>> {
        self.comps
    }

    pub(crate) fn from_parts(grid: SpectralGrid, rank: Rank, comps: Vec<Vec<Complex64>>) -> Self {
        debug_assert_eq!(comps.len(), rank.components());
        Self { grid, rank, comps }
    }

    /// Reinterprets the component list under another rank with the same
    /// component count.
    pub fn reshaped(mut self, rank: Rank) -> Result<Field> {
        if rank.components() != self.comps.len() {
            return Err(Error::InvalidArgument(format!("cannot view {:?} as {rank:?}", self.rank)));
        }
        self.rank = rank;
        Ok(self)
    }

    /// Mean value of each component (the `k = 0` coefficient).
    pub fn mean(&self) -> Vec<f64> {
        self.comps.iter().map(|c| c[0].re).collect()
    }

    pub fn without_mean(&self) -> Field {
        let mut out = self.clone();
        for c in out.comps.iter_mut() {
            c[0] = Complex64::new(0.0, 0.0);
        }
        out
    }

    pub fn zero_nyquist(&mut self) {
        let n = self.grid.modes();
        let dim = self.grid.dim();
        let h = n / 2;
        for c in self.comps.iter_mut() {
            for (i, v) in c.iter_mut().enumerate() {
                let hit = match dim {
                    2 => i / n == h || i % n == h,
                    _ => i / (n * n) == h || (i / n) % n == h || i % n == h,
                };
                if hit {
                    *v = Complex64::new(0.0, 0.0);
                }
            }
        }
    }

    /// Zeroes every mode with some axis index above the 2/3 cutoff.
    pub fn truncate_two_thirds(&mut self) {
        let cut = self.grid.two_thirds_cutoff();
        self.truncate_to(cut);
    }

    /// Zeroes every mode with some `|m_i| > cutoff`.
    pub fn truncate_to(&mut self, cutoff: i64) {
        let g = self.grid;
        let keep: Vec<bool> = (0..g.modes()).map(|j| g.mode_number(j).abs() <= cutoff && j != g.modes() / 2).collect();
        let n = g.modes();
        for c in self.comps.iter_mut() {
            for (i, v) in c.iter_mut().enumerate() {
                let ok = match g.dim() {
                    2 => keep[i / n] && keep[i % n],
                    _ => keep[i / (n * n)] && keep[(i / n) % n] && keep[i % n],
                };
                if !ok {
                    *v = Complex64::new(0.0, 0.0);
                }
            }
        }
    }

    /// Largest `max_i |m_i|` over modes with nonzero coefficient.
    pub fn bandwidth(&self) -> i64 {
        let mut best = 0;
        for c in &self.comps {
            for (i, v) in c.iter().enumerate() {
                if v.norm_sqr() > 0.0 {
                    let m = self.grid.mode_indices(i);
                    best = best.max(m[0].abs()).max(m[1].abs()).max(m[2].abs());
                }
            }
        }
        best
    }

    /// Physical values at the lattice points of this field's grid.
    pub fn to_physical(&self) -> Vec<Vec<f64>> {
        self.to_physical_on(self.grid.modes())
    }

    /// Physical values on the same box sampled with `modes` points per axis
    /// (exact band-limited interpolation when `modes` exceeds the grid's).
    pub fn to_physical_on(&self, modes: usize) -> Vec<Vec<f64>> {
        let refs: Vec<&[Complex64]> = self.comps.iter().map(|c| c.as_slice()).collect();
        fft::to_physical(&refs, self.grid.modes(), modes, self.grid.dim())
    }

    /// Physical values on the 2x padded grid used for sup-norms and cubic terms.
    pub fn to_physical_padded(&self) -> Vec<Vec<f64>> {
        self.to_physical_on(2 * self.grid.modes())
    }

    /// Same field expressed on a grid of `modes` points per axis over the
    /// same box; refinement is exact, coarsening truncates.
    pub fn resampled(&self, modes: usize) -> Result<Field> {
        let g = self.grid.with_modes(modes)?;
        let comps = self
            .comps
            .iter()
            .map(|c| fft::resample(c, self.grid.modes(), modes, self.grid.dim()))
            .collect();
        Ok(Field { grid: g, rank: self.rank, comps })
    }

    /// Evaluates the field at an arbitrary point by direct summation of its
    /// Fourier series.
    pub fn evaluate_at(&self, x: [f64; 3]) -> Vec<f64> {
        let g = &self.grid;
        let n = g.modes();
        let k = g.axis_wavenumbers();
        let phases: Vec<Vec<Complex64>> = (0..g.dim())
            .map(|a| k.iter().map(|&kk| Complex64::from_polar(1.0, kk * x[a])).collect())
            .collect();
        self.comps
            .iter()
            .map(|c| {
                let mut acc = Complex64::new(0.0, 0.0);
                match g.dim() {
                    2 => {
                        for a in 0..n {
                            let pa = phases[0][a];
                            let row = &c[a * n..(a + 1) * n];
                            let mut s = Complex64::new(0.0, 0.0);
                            for (b, v) in row.iter().enumerate() {
                                s += v * phases[1][b];
                            }
                            acc += pa * s;
                        }
                    }
                    _ => {
                        for a in 0..n {
                            let mut sa = Complex64::new(0.0, 0.0);
                            for b in 0..n {
                                let row = &c[(a * n + b) * n..(a * n + b + 1) * n];
                                let mut s = Complex64::new(0.0, 0.0);
                                for (cc, v) in row.iter().enumerate() {
                                    s += v * phases[2][cc];
                                }
                                sa += phases[1][b] * s;
                            }
                            acc += phases[0][a] * sa;
                        }
                    }
                }
                acc.re
            })
            .collect()
    }

    pub fn scale(&self, a: f64) -> Field {
        let mut out = self.clone();
        out.scale_mut(a);
        out
    }

    pub fn scale_mut(&mut self, a: f64) {
        for c in self.comps.iter_mut() {
            for v in c.iter_mut() {
                *v *= a;
            }
        }
    }

    /// `self += a * other`.
    pub fn axpy(&mut self, a: f64, other: &Field) -> Result<()> {
        self.check_compatible(other)?;
        for (x, y) in self.comps.iter_mut().zip(other.comps.iter()) {
            for (u, v) in x.iter_mut().zip(y.iter()) {
                *u += v * a;
            }
        }
        Ok(())
    }

    pub fn check_compatible(&self, other: &Field) -> Result<()> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        if self.rank != other.rank {
            return Err(Error::RankMismatch {
                op: "combine",
                got: other.rank,
                expected: "matching ranks",
            });
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Field) -> Result<Field> {
        let mut out = self.clone();
        out.axpy(1.0, other)?;
        Ok(out)
    }

    pub fn try_sub(&self, other: &Field) -> Result<Field> {
        let mut out = self.clone();
        out.axpy(-1.0, other)?;
        Ok(out)
    }

    /// Largest coefficient modulus; a cheap scale indicator.
    pub fn max_coeff(&self) -> f64 {
        self.comps
            .iter()
            .flat_map(|c| c.iter())
            .fold(0.0f64, |m, v| m.max(v.norm()))
    }

    pub fn is_zero(&self) -> bool {
        self.comps.iter().all(|c| c.iter().all(|v| v.norm_sqr() == 0.0))
    }

    /// `max_k |f̂(k) - conj(f̂(-k))|`, zero for real fields.
    pub fn hermitian_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for c in &self.comps {
            for i in 0..c.len() {
                worst = worst.max((c[i] - c[self.grid.mirror(i)].conj()).norm());
            }
        }
        worst
    }
}

impl Add for &Field {
    type Output = Field;
    fn add(self, rhs: &Field) -> Field {
        self.try_add(rhs).expect("incompatible fields in addition")
    }
}

impl Sub for &Field {
    type Output = Field;
    fn sub(self, rhs: &Field) -> Field {
        self.try_sub(rhs).expect("incompatible fields in subtraction")
    }
}

impl Mul<f64> for &Field {
    type Output = Field;
    fn mul(self, rhs: f64) -> Field {
        self.scale(rhs)
    }
}

impl Neg for &Field {
    type Output = Field;
    fn neg(self) -> Field {
        self.scale(-1.0)
    }
}
