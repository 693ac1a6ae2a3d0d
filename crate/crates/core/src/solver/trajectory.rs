use crate::error::{Error, Result};
use crate::field::{Field, Rank};
use crate::grid::SpectralGrid;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SystemKind {
    /// `(u, p, d)` with a scalar phase.
    Reduced,
    /// `(u, p, v)` with a vector director.
    Full,
}

impl SystemKind {
    pub fn name(&self) -> &'static str {
        match self {
            SystemKind::Reduced => "reduced",
            SystemKind::Full => "full",
        }
    }
}

/// Time samples of velocity, director (phase `d` or vector `v`) and
/// pressure gradient on one grid.
#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    grid: SpectralGrid,
    system: SystemKind,
    times: Vec<f64>,
    u: Vec<Field>,
    director: Vec<Field>,
    grad_p: Vec<Field>,
    complete: bool,
}

impl Trajectory {
    pub fn new(grid: SpectralGrid, system: SystemKind) -> Self {
        Self {
            grid,
            system,
            times: Vec::new(),
            u: Vec::new(),
            director: Vec::new(),
            grad_p: Vec::new(),
            complete: false,
        }
    }

    pub fn push(&mut self, t: f64, u: Field, director: Field, grad_p: Field) -> Result<()> {
        if let Some(&last) = self.times.last() {
            if !(t > last) {
                return Err(Error::InvalidArgument(format!("sample time {t} does not exceed {last}")));
            }
        } else if !(t >= 0.0) {
            return Err(Error::InvalidArgument(format!("sample time {t} is negative")));
        }
        let dim = self.grid.dim();
        for f in [&u, &director, &grad_p] {
            if f.grid() != &self.grid {
                return Err(Error::GridMismatch);
            }
        }
        if u.rank() != Rank::Vector(dim) || grad_p.rank() != Rank::Vector(dim) {
            return Err(Error::RankMismatch {
                op: "trajectory sample",
                got: u.rank(),
                expected: "velocity and pressure gradient with N components",
            });
        }
        let ok = match self.system {
            SystemKind::Reduced => director.rank() == Rank::Scalar,
            SystemKind::Full => matches!(director.rank(), Rank::Vector(_)),
        };
        if !ok {
            return Err(Error::RankMismatch {
                op: "trajectory sample",
                got: director.rank(),
                expected: "scalar phase (reduced) or vector director (full)",
            });
        }
        self.times.push(t);
        self.u.push(u);
        self.director.push(director);
        self.grad_p.push(grad_p);
        Ok(())
    }

    pub fn mark_complete(&mut self) {
        self.complete = true;
    }

    /// False for partial trajectories returned with a blow-up.
    pub fn is_complete(&self) -> bool {
        self.complete
    }

    pub fn grid(&self) -> &SpectralGrid {
        &self.grid
    }

    pub fn system(&self) -> SystemKind {
        self.system
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn u_samples(&self) -> &[Field] {
        &self.u
    }

    /// Phase samples of a reduced run, or director samples of a full run.
    pub fn director_samples(&self) -> &[Field] {
        &self.director
    }

    pub fn d_samples(&self) -> Option<&[Field]> {
        (self.system == SystemKind::Reduced).then_some(self.director.as_slice())
    }

    pub fn v_samples(&self) -> Option<&[Field]> {
        (self.system == SystemKind::Full).then_some(self.director.as_slice())
    }

    pub fn grad_p_samples(&self) -> &[Field] {
        &self.grad_p
    }

    pub fn last_time(&self) -> Option<f64> {
        self.times.last().copied()
    }

    /// Index of the sample at time `t` (within `1e-9` relative).
    pub fn index_of(&self, t: f64) -> Option<usize> {
        self.times.iter().position(|&s| (s - t).abs() <= 1e-9 * t.abs().max(1.0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::make_grid;

    #[test]
    fn push_checks_order_and_ranks() {
        let g = make_grid(2, 8, 1.0).unwrap();
        let mut tr = Trajectory::new(g, SystemKind::Reduced);
        let u = Field::zeros(g, Rank::Vector(2));
        let d = Field::zeros(g, Rank::Scalar);
        tr.push(0.0, u.clone(), d.clone(), u.clone()).unwrap();
        assert!(tr.push(0.0, u.clone(), d.clone(), u.clone()).is_err());
        assert!(tr.push(1.0, u.clone(), u.clone(), u.clone()).is_err());
        tr.push(0.5, u.clone(), d, u).unwrap();
        assert_eq!(tr.len(), 2);
        assert!(tr.v_samples().is_none());
        assert_eq!(tr.index_of(0.5), Some(1));
    }
}
