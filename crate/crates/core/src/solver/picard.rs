//! Picard iteration of the reduced system's mild formulation on whole
//! discrete trajectories.

use super::config::SolverConfig;
use super::march::check_initial;
use super::norms::{grad_hs_sq, hess_hs_sq, sup_plus_l2};
use super::rhs::reduced_rhs;
use super::trajectory::{SystemKind, Trajectory};
use crate::error::{Error, Result};
use crate::field::Field;
use crate::norms::{sobolev, sup_norm};
use crate::semigroup::{semigroup_evolve, DuhamelPropagator, SemigroupKind};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub enum PicardSeed {
    /// Free evolution of the initial data.
    #[default]
    LinearEvolution,
    Zero,
}

#[derive(Clone, Debug, PartialEq, Default)]
pub struct PicardDiagnostics {
    pub iterations: usize,
    /// `Y_T` distance between consecutive iterates.
    pub differences: Vec<f64>,
    /// `differences[i] / differences[i−1]`.
    pub ratios: Vec<f64>,
    /// `Y_T` norm of each new iterate.
    pub iterate_norms: Vec<f64>,
    pub converged: bool,
}

impl PicardDiagnostics {
    pub fn max_ratio(&self) -> f64 {
        self.ratios.iter().fold(0.0f64, |m, &r| m.max(r))
    }
}

/// `X^s_T(u) + Θ^s_T(d)` for sampled trajectories.
pub fn y_norm(times: &[f64], u: &[Field], d: &[Field], s: f64) -> f64 {
    let a: Vec<f64> = u.iter().map(|f| sobolev(f, s)).collect();
    let b: Vec<f64> = u.iter().map(|f| grad_hs_sq(f, s)).collect();
    let x = sup_plus_l2(times, &a, &b);
    let sup = d.iter().map(sup_norm).fold(0.0f64, |m, x| if x.is_nan() { f64::NAN } else { m.max(x) });
    let a: Vec<f64> = d.iter().map(|f| grad_hs_sq(f, s).sqrt()).collect();
    let b: Vec<f64> = d.iter().map(|f| hess_hs_sq(f, s)).collect();
    x + sup + sup_plus_l2(times, &a, &b)
}

struct Iterate {
    u: Vec<Field>,
    d: Vec<Field>,
}

fn diff_norm(times: &[f64], a: &Iterate, b: &Iterate, s: f64) -> f64 {
    let du: Vec<Field> = a.u.iter().zip(&b.u).map(|(x, y)| x - y).collect();
    let dd: Vec<Field> = a.d.iter().zip(&b.d).map(|(x, y)| x - y).collect();
    y_norm(times, &du, &dd, s)
}

pub fn picard_solve(u0: &Field, d0: &Field, cfg: &SolverConfig) -> Result<(Trajectory, PicardDiagnostics)> {
    picard_solve_seeded(u0, d0, cfg, PicardSeed::LinearEvolution)
}

/// Iterates `(w, θ) ↦ φ(w, θ)` until consecutive iterates are within
/// `picard_tol` in the discrete `Y_T` norm. Fails with the diagnostics after
/// three consecutive non-decreasing differences, or a non-finite one.
pub fn picard_solve_seeded(
    u0: &Field,
    d0: &Field,
    cfg: &SolverConfig,
    seed: PicardSeed,
) -> Result<(Trajectory, PicardDiagnostics)> {
    check_initial(u0, d0, cfg, SystemKind::Reduced)?;
    let grid = *u0.grid();
    let steps = cfg.steps();
    let times: Vec<f64> = (0..=steps).map(|n| cfg.time(n)).collect();
    let stokes = DuhamelPropagator::new(grid, cfg.dt, SemigroupKind::Stokes)?;
    let heat = DuhamelPropagator::new(grid, cfg.dt, SemigroupKind::Heat)?;

    let mut cur = match seed {
        PicardSeed::LinearEvolution => Iterate {
            u: times.iter().map(|&t| semigroup_evolve(u0, t, SemigroupKind::Stokes)).collect::<Result<_>>()?,
            d: times.iter().map(|&t| semigroup_evolve(d0, t, SemigroupKind::Heat)).collect::<Result<_>>()?,
        },
        PicardSeed::Zero => Iterate {
            u: vec![Field::zeros(grid, u0.rank()); steps + 1],
            d: vec![Field::zeros(grid, d0.rank()); steps + 1],
        },
    };
    let mut diag = PicardDiagnostics::default();
    let mut streak = 0;
    for _ in 0..cfg.picard_max_iter {
        let mut pf = Vec::with_capacity(steps + 1);
        let mut g = Vec::with_capacity(steps + 1);
        for (w, th) in cur.u.iter().zip(&cur.d) {
            let r = reduced_rhs(w, th, cfg)?;
            pf.push(r.projected);
            g.push(r.director);
        }
        let mut next = Iterate { u: Vec::with_capacity(steps + 1), d: Vec::with_capacity(steps + 1) };
        next.u.push(semigroup_evolve(u0, 0.0, SemigroupKind::Stokes)?);
        next.d.push(d0.clone());
        for n in 0..steps {
            let u = stokes.step(&next.u[n], Some(&pf[n]), Some(&pf[n + 1]))?;
            let d = heat.step(&next.d[n], Some(&g[n]), Some(&g[n + 1]))?;
            next.u.push(u);
            next.d.push(d);
        }
        let diff = diff_norm(&times, &next, &cur, cfg.s);
        diag.iterations += 1;
        diag.iterate_norms.push(y_norm(&times, &next.u, &next.d, cfg.s));
        if !diff.is_finite() {
            return Err(Error::NonContraction(Box::new(diag)));
        }
        if let Some(&prev) = diag.differences.last() {
            let ratio = diff / prev;
            diag.ratios.push(ratio);
            if !(ratio < 1.0) {
                streak += 1;
            } else {
                streak = 0;
            }
        }
        diag.differences.push(diff);
        cur = next;
        if diff < cfg.picard_tol {
            diag.converged = true;
            return Ok((assemble(&cur, &times, cfg)?, diag));
        }
        if streak >= 3 {
            return Err(Error::NonContraction(Box::new(diag)));
        }
    }
    Err(Error::NotConverged(Box::new(diag)))
}

fn assemble(it: &Iterate, times: &[f64], cfg: &SolverConfig) -> Result<Trajectory> {
    let grid = *it.u[0].grid();
    let mut traj = Trajectory::new(grid, SystemKind::Reduced);
    let last = times.len() - 1;
    for n in 0..=last {
        if n % cfg.sample_interval == 0 || n == last {
            let r = reduced_rhs(&it.u[n], &it.d[n], cfg)?;
            traj.push(times[n], it.u[n].clone(), it.d[n].clone(), r.pressure_gradient())?;
        }
    }
    traj.mark_complete();
    Ok(traj)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Rank;
    use crate::grid::make_grid;
    use std::f64::consts::PI;

    #[test]
    fn fixed_point_in_one_iteration() {
        let g = make_grid(3, 8, 2.0 * PI).unwrap();
        let u0 = Field::zeros(g, Rank::Vector(3));
        let d0 = Field::scalar_from_fn(g, |_| 0.7);
        let cfg = SolverConfig { horizon: 0.5, dt: 0.1, ..Default::default() };
        let (tr, diag) = picard_solve(&u0, &d0, &cfg).unwrap();
        assert_eq!(diag.iterations, 1);
        assert!(diag.converged);
        assert_eq!(diag.differences, vec![0.0]);
        assert!(tr.u_samples().iter().all(|u| u.is_zero()));
        assert!(tr.d_samples().unwrap().iter().all(|d| d == &d0));
    }

    #[test]
    fn small_data_contracts_and_seeds_agree() {
        let g = make_grid(3, 8, 2.0 * PI).unwrap();
        let eps = 0.01;
        let u0 = Field::from_fn(g, Rank::Vector(3), |x| vec![eps * x[1].sin(), eps * x[2].sin(), eps * x[0].sin()]);
        let d0 = Field::scalar_from_fn(g, |x| eps * (x[0].cos() + x[1].sin() * x[2].cos()));
        let cfg = SolverConfig { horizon: 1.0, dt: 0.05, ..Default::default() };
        let (a, da) = picard_solve(&u0, &d0, &cfg).unwrap();
        assert!(da.max_ratio() < 0.5 && da.iterations <= 15, "{da:?}");
        let (b, db) = picard_solve_seeded(&u0, &d0, &cfg, PicardSeed::Zero).unwrap();
        assert!(db.iterations >= da.iterations);
        for (x, y) in a.u_samples().iter().zip(b.u_samples()) {
            assert!((x - y).max_coeff() < 1e-11);
        }
    }
}
