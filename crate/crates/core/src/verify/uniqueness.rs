//! Two solution procedures from the same data, compared sample by sample.

use crate::calculus::gradient;
use crate::error::{Error, Result};
use crate::field::Field;
use crate::norms::{sobolev, sup_norm};
use crate::solver::{picard_solve_seeded, PicardDiagnostics, PicardSeed, SolverConfig, Trajectory};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Perturbation {
    /// Zero seed against the linear-evolution seed.
    IterateSeed,
    /// `dt` against `dt/2` (and `dt/4` for the refinement ratio).
    DtHalving,
    /// `M` against `2M` modes per axis.
    ResolutionBump,
}

#[derive(Clone, Debug, PartialEq)]
pub struct UniquenessReport {
    pub perturbation: Perturbation,
    /// `max_t (‖u₁ − u₂‖_{H^s} + ‖∇(d₁ − d₂)‖_{H^s})` over shared sample times.
    pub hs_distance: f64,
    /// `max_t (‖u₁ − u₂‖_∞ + ‖d₁ − d₂‖_∞)`.
    pub sup_distance: f64,
    /// Distance budget the perturbation is held to.
    pub residual_bound: f64,
    /// `d(dt, dt/2) / d(dt/2, dt/4)` for [`Perturbation::DtHalving`].
    pub refinement_ratio: Option<f64>,
    pub compared_samples: usize,
    pub pass: bool,
}

/// Bound on the distance from the last iterate to the fixed point,
/// `diff · q/(1 − q)` with `q` the largest observed contraction ratio.
fn fixed_point_residual(d: &PicardDiagnostics) -> f64 {
    let last = d.differences.last().copied().unwrap_or(0.0);
    let q = d.max_ratio().min(0.99);
    if d.ratios.is_empty() {
        last
    } else {
        last * q.max(1e-3) / (1.0 - q)
    }
}

fn solve(u0: &Field, d0: &Field, cfg: &SolverConfig, seed: PicardSeed) -> Result<(Trajectory, PicardDiagnostics)> {
    let (traj, diag) = picard_solve_seeded(u0, d0, cfg, seed)?;
    if !diag.converged {
        return Err(Error::NotConverged(Box::new(diag)));
    }
    Ok((traj, diag))
}

/// Distances at the sample times of `a` that `b` also holds; `b` may live on
/// a finer grid, in which case it is truncated onto `a`'s.
fn distances(a: &Trajectory, b: &Trajectory, s: f64) -> Result<(f64, f64, usize)> {
    let (mut hs, mut sup, mut n) = (0.0f64, 0.0f64, 0);
    let modes = a.grid().modes();
    for (i, &t) in a.times().iter().enumerate() {
        let Some(j) = b.index_of(t) else { continue };
        let bu = b.u_samples()[j].resampled(modes)?;
        let bd = b.director_samples()[j].resampled(modes)?;
        let du = &a.u_samples()[i] - &bu;
        let dd = &a.director_samples()[i] - &bd;
        hs = hs.max(sobolev(&du, s) + sobolev(&gradient(&dd)?, s));
        sup = sup.max(sup_norm(&du) + sup_norm(&dd));
        n += 1;
    }
    if n == 0 {
        return Err(Error::InvalidArgument("runs share no sample times".into()));
    }
    Ok((hs, sup, n))
}

/// Energy of the fine run outside the coarse grid's dealiased band, in the
/// same norm as the distance.
fn truncation_tail(fine: &Trajectory, coarse_modes: usize, s: f64) -> Result<f64> {
    let cut = fine.grid().with_modes(coarse_modes)?.two_thirds_cutoff();
    let mut worst = 0.0f64;
    for (u, d) in fine.u_samples().iter().zip(fine.director_samples()) {
        let (mut lu, mut ld) = (u.clone(), d.clone());
        lu.truncate_to(cut);
        ld.truncate_to(cut);
        let tu = u - &lu;
        let td = d - &ld;
        worst = worst.max(sobolev(&tu, s) + sobolev(&gradient(&td)?, s));
    }
    Ok(worst)
}

pub fn uniqueness_probe(u0: &Field, d0: &Field, cfg: &SolverConfig, perturbation: Perturbation) -> Result<UniquenessReport> {
    let (base, diag) = solve(u0, d0, cfg, PicardSeed::LinearEvolution)?;
    let s = cfg.s;
    let report = |hs: f64, sup: f64, n: usize, bound: f64, ratio: Option<f64>, pass: bool| UniquenessReport {
        perturbation,
        hs_distance: hs,
        sup_distance: sup,
        residual_bound: bound,
        refinement_ratio: ratio,
        compared_samples: n,
        pass,
    };
    match perturbation {
        Perturbation::IterateSeed => {
            let (other, d2) = solve(u0, d0, cfg, PicardSeed::Zero)?;
            let (hs, sup, n) = distances(&base, &other, s)?;
            let bound = 10.0 * (fixed_point_residual(&diag) + fixed_point_residual(&d2));
            let pass = hs.max(sup) <= bound.max(f64::EPSILON * 10.0);
            Ok(report(hs, sup, n, bound, None, pass))
        }
        Perturbation::DtHalving => {
            let half = SolverConfig { dt: cfg.dt / 2.0, sample_interval: cfg.sample_interval * 2, ..cfg.clone() };
            let quarter = SolverConfig { dt: cfg.dt / 4.0, sample_interval: cfg.sample_interval * 4, ..cfg.clone() };
            let (h, dh) = solve(u0, d0, &half, PicardSeed::LinearEvolution)?;
            let (q, dq) = solve(u0, d0, &quarter, PicardSeed::LinearEvolution)?;
            let (hs, sup, n) = distances(&base, &h, s)?;
            let (hs2, _, _) = distances(&h, &q, s)?;
            let ratio = hs / hs2;
            // a second-order pair distance is about 4x the finer pair's
            let bound = 10.0 * (fixed_point_residual(&diag) + fixed_point_residual(&dh) + fixed_point_residual(&dq))
                + 5.0 * hs2;
            let pass = (3.0..=5.0).contains(&ratio) && hs <= bound;
            Ok(report(hs, sup, n, bound, Some(ratio), pass))
        }
        Perturbation::ResolutionBump => {
            let m = u0.grid().modes();
            let (fine, df) = solve(&u0.resampled(2 * m)?, &d0.resampled(2 * m)?, cfg, PicardSeed::LinearEvolution)?;
            let (hs, sup, n) = distances(&base, &fine, s)?;
            let bound = 10.0 * (fixed_point_residual(&diag) + fixed_point_residual(&df) + truncation_tail(&fine, m, s)?);
            let pass = hs <= bound.max(f64::EPSILON * 10.0);
            Ok(report(hs, sup, n, bound, None, pass))
        }
    }
}

fn same_bits(a: &Field, b: &Field) -> bool {
    a.grid() == b.grid()
        && a.rank() == b.rank()
        && a.components().iter().zip(b.components()).all(|(x, y)| {
            x.iter()
                .zip(y)
                .all(|(p, q)| p.re.to_bits() == q.re.to_bits() && p.im.to_bits() == q.im.to_bits())
        })
}

/// Solves twice from identical inputs and compares every stored value bit
/// for bit.
pub fn determinism_check(u0: &Field, d0: &Field, cfg: &SolverConfig) -> Result<bool> {
    let (a, da) = solve(u0, d0, cfg, PicardSeed::LinearEvolution)?;
    let (b, db) = solve(u0, d0, cfg, PicardSeed::LinearEvolution)?;
    let bits = |x: &[f64], y: &[f64]| x.len() == y.len() && x.iter().zip(y).all(|(p, q)| p.to_bits() == q.to_bits());
    Ok(bits(a.times(), b.times())
        && bits(&da.differences, &db.differences)
        && a.u_samples().iter().zip(b.u_samples()).all(|(x, y)| same_bits(x, y))
        && a.director_samples().iter().zip(b.director_samples()).all(|(x, y)| same_bits(x, y))
        && a.grad_p_samples().iter().zip(b.grad_p_samples()).all(|(x, y)| same_bits(x, y)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calculus::leray_project;
    use crate::field::Rank;
    use crate::grid::make_grid;
    use std::f64::consts::PI;

    fn data(eps: f64) -> (Field, Field) {
        let g = make_grid(3, 8, 2.0 * PI).unwrap();
        let raw = Field::from_fn(g, Rank::Vector(3), |x| {
            vec![x[1].sin() + (x[2] - x[0]).cos(), x[2].cos(), (x[0] + x[1]).sin()]
        });
        let u0 = leray_project(&raw).unwrap().without_mean().scale(eps);
        let d0 = Field::scalar_from_fn(g, |x| eps * (x[0].sin() * x[1].cos() + 0.5 * (x[2]).sin()));
        (u0, d0)
    }

    fn cfg() -> SolverConfig {
        SolverConfig { horizon: 1.0, dt: 0.05, ..Default::default() }
    }

    #[test]
    fn seeds_agree() {
        let (u0, d0) = data(0.05);
        let r = uniqueness_probe(&u0, &d0, &cfg(), Perturbation::IterateSeed).unwrap();
        assert!(r.hs_distance <= 1e-8 && r.sup_distance <= 1e-8, "{r:?}");
        assert!(r.pass);
        assert_eq!(r.compared_samples, 21);
    }

    #[test]
    fn identical_configs_are_bitwise_identical() {
        let (u0, d0) = data(0.05);
        assert!(determinism_check(&u0, &d0, &cfg()).unwrap());
    }

    #[test]
    fn dt_halving_is_second_order() {
        let (u0, d0) = data(0.3);
        let c = SolverConfig { dt: 0.1, ..cfg() };
        let r = uniqueness_probe(&u0, &d0, &c, Perturbation::DtHalving).unwrap();
        let ratio = r.refinement_ratio.unwrap();
        assert!((3.0..=5.0).contains(&ratio), "{r:?}");
        assert!(r.pass);
    }

    #[test]
    fn resolution_bump_within_tail() {
        let (u0, d0) = data(0.05);
        let r = uniqueness_probe(&u0, &d0, &cfg(), Perturbation::ResolutionBump).unwrap();
        assert!(r.pass, "{r:?}");
    }
}
