//! Two-stage exponential time marching of the reduced and full systems.

use super::config::SolverConfig;
use super::rhs::{divergence_defect, full_rhs, reduced_rhs};
use super::trajectory::{SystemKind, Trajectory};
use crate::calculus::gradient_part;
use crate::error::{Error, Result};
use crate::field::{Field, Rank};
use crate::norms::l2;
use crate::semigroup::{DuhamelPropagator, SemigroupKind};

/// Extra forcing `(s_u, s_director)` as a function of time; the velocity
/// part is split into its divergence-free and pressure parts.
pub type Source<'a> = dyn Fn(f64) -> Result<(Field, Field)> + 'a;

/// State handed to a march observer at each sample time.
#[derive(Debug)]
pub struct MarchSample<'a> {
    pub step: usize,
    pub t: f64,
    pub u: &'a Field,
    pub director: &'a Field,
    pub grad_p: &'a Field,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MarchSummary {
    pub steps: usize,
    pub final_time: f64,
    pub samples: usize,
    pub u: Field,
    pub director: Field,
}

struct Stage {
    u: Field,
    director: Field,
    grad_p: Field,
}

struct Engine<'a> {
    cfg: &'a SolverConfig,
    system: SystemKind,
    source: Option<&'a Source<'a>>,
    stokes: DuhamelPropagator,
    heat: DuhamelPropagator,
}

impl Engine<'_> {
    /// `(P f, g, ∇p)` at time `t`.
    fn forcing(&self, u: &Field, director: &Field, t: f64) -> Result<Stage> {
        let r = match self.system {
            SystemKind::Reduced => reduced_rhs(u, director, self.cfg)?,
            SystemKind::Full => full_rhs(u, director, self.cfg)?,
        };
        let mut f = r.f;
        let mut g = r.director;
        if let Some(src) = self.source {
            let (su, sd) = src(t)?;
            f.axpy(1.0, &su)?;
            g.axpy(1.0, &sd)?;
        }
        let grad_p = gradient_part(&f, "velocity forcing")?;
        let pf = &f - &grad_p;
        Ok(Stage { u: pf, director: g, grad_p })
    }

    fn advance(&self, u: &Field, d: &Field, h0: &Stage, t1: f64) -> Result<(Field, Field)> {
        let ua = self.stokes.step(u, Some(&h0.u), None)?;
        let da = self.heat.step(d, Some(&h0.director), None)?;
        let h1 = self.forcing(&ua, &da, t1)?;
        let un = self.stokes.step(u, Some(&h0.u), Some(&h1.u))?;
        let dn = self.heat.step(d, Some(&h0.director), Some(&h1.director))?;
        Ok((un, dn))
    }
}

pub(super) fn check_initial(u0: &Field, init: &Field, cfg: &SolverConfig, system: SystemKind) -> Result<()> {
    let grid = u0.grid();
    cfg.validate(grid.dim())?;
    if init.grid() != grid {
        return Err(Error::GridMismatch);
    }
    if u0.rank() != Rank::Vector(grid.dim()) {
        return Err(Error::RankMismatch {
            op: "initial velocity",
            got: u0.rank(),
            expected: "vector with one component per spatial axis",
        });
    }
    let ok = match system {
        SystemKind::Reduced => init.rank() == Rank::Scalar,
        SystemKind::Full => matches!(init.rank(), Rank::Vector(_)),
    };
    if !ok {
        return Err(Error::RankMismatch {
            op: "initial director",
            got: init.rank(),
            expected: "scalar phase (reduced) or vector director (full)",
        });
    }
    let defect = divergence_defect(u0);
    if !(defect <= cfg.divergence_tol) {
        return Err(Error::ConstraintViolation {
            what: "relative divergence of the initial velocity",
            value: defect,
            tol: cfg.divergence_tol,
        });
    }
    let mean = u0.mean().iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let scale = u0.max_coeff();
    if mean > 1e-12 * scale {
        return Err(Error::InvalidArgument(format!("initial velocity has nonzero mean {mean:e}")));
    }
    Ok(())
}

fn state_norm(u: &Field, d: &Field) -> f64 {
    l2(u).hypot(l2(d))
}

/// Marches from `(u0, init)` and hands every `sample_interval`-th state (and
/// the final one) to `observer`. Stored state is only the current step.
pub fn march_observe(
    u0: &Field,
    init: &Field,
    cfg: &SolverConfig,
    system: SystemKind,
    source: Option<&Source>,
    observer: &mut dyn FnMut(&MarchSample) -> Result<()>,
) -> Result<MarchSummary> {
    check_initial(u0, init, cfg, system)?;
    let grid = *u0.grid();
    let engine = Engine {
        cfg,
        system,
        source,
        stokes: DuhamelPropagator::new(grid, cfg.dt, SemigroupKind::Stokes)?,
        heat: DuhamelPropagator::new(grid, cfg.dt, SemigroupKind::Heat)?,
    };
    let steps = cfg.steps();
    let reference = state_norm(u0, init);
    let mut u = u0.clone();
    let mut d = init.clone();
    let mut samples = 0;
    let mut h = engine.forcing(&u, &d, 0.0)?;
    for n in 0..=steps {
        let t = cfg.time(n);
        if n % cfg.sample_interval == 0 || n == steps {
            observer(&MarchSample { step: n, t, u: &u, director: &d, grad_p: &h.grad_p })?;
            samples += 1;
        }
        if n == steps {
            break;
        }
        let (un, dn) = engine.advance(&u, &d, &h, cfg.time(n + 1))?;
        let size = state_norm(&un, &dn);
        if !size.is_finite() || (reference > 0.0 && size > 1e6 * reference) {
            return Err(Error::BlowUp {
                time: cfg.time(n + 1),
                norm: size,
                partial: Box::new(Trajectory::new(grid, system)),
            });
        }
        u = un;
        d = dn;
        h = engine.forcing(&u, &d, cfg.time(n + 1))?;
    }
    Ok(MarchSummary { steps, final_time: cfg.time(steps), samples, u, director: d })
}

/// Stored-trajectory march; a blow-up error carries the samples taken so far.
pub fn march_solve(u0: &Field, init: &Field, cfg: &SolverConfig, system: SystemKind) -> Result<Trajectory> {
    march_solve_forced(u0, init, cfg, system, None)
}

pub fn march_solve_forced(
    u0: &Field,
    init: &Field,
    cfg: &SolverConfig,
    system: SystemKind,
    source: Option<&Source>,
) -> Result<Trajectory> {
    let mut traj = Trajectory::new(*u0.grid(), system);
    let result = march_observe(u0, init, cfg, system, source, &mut |s| {
        traj.push(s.t, s.u.clone(), s.director.clone(), s.grad_p.clone())
    });
    match result {
        Ok(_) => {
            traj.mark_complete();
            Ok(traj)
        }
        Err(Error::BlowUp { time, norm, .. }) => Err(Error::BlowUp { time, norm, partial: Box::new(traj) }),
        Err(e) => Err(e),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{make_grid, SpectralGrid};
    use crate::semigroup::semigroup_evolve;
    use std::f64::consts::PI;

    fn grid(m: usize) -> SpectralGrid {
        make_grid(3, m, 2.0 * PI).unwrap()
    }

    #[test]
    fn heat_only_trajectory() {
        let g = grid(16);
        let u0 = Field::zeros(g, Rank::Vector(3));
        let d0 = Field::scalar_from_fn(g, |x| x[0].sin());
        let cfg = SolverConfig { horizon: 1.0, dt: 0.05, sample_interval: 5, ..Default::default() };
        let tr = march_solve(&u0, &d0, &cfg, SystemKind::Reduced).unwrap();
        assert_eq!(tr.len(), 5);
        assert!(tr.is_complete());
        for (t, d) in tr.times().iter().zip(tr.d_samples().unwrap()) {
            let want = semigroup_evolve(&d0, *t, SemigroupKind::Heat).unwrap();
            assert!((d - &want).max_coeff() < 1e-12, "t = {t}");
        }
    }

    /// `u = A cos t (sin x₂, 0, 0)`, `d = cos t cos x₁` with the matching
    /// source. (Profiles `e^{−t}·eigenfunction` are reproduced exactly by the
    /// scheme and cannot show an order.)
    fn manufactured(dt: f64) -> f64 {
        let g = grid(16);
        let amp = 0.8;
        let u_exact = |t: f64| Field::from_fn(g, Rank::Vector(3), |x| vec![amp * t.cos() * x[1].sin(), 0.0, 0.0]);
        let d_exact = |t: f64| Field::scalar_from_fn(g, |x| t.cos() * x[0].cos());
        // u·∇d = −A cos²t sin x₂ sin x₁; the stress divergence is a gradient
        let source = |t: f64| -> Result<(Field, Field)> {
            let su = Field::from_fn(g, Rank::Vector(3), |x| vec![amp * (t.cos() - t.sin()) * x[1].sin(), 0.0, 0.0]);
            let sd = Field::scalar_from_fn(g, |x| {
                (t.cos() - t.sin()) * x[0].cos() - amp * t.cos().powi(2) * x[0].sin() * x[1].sin()
            });
            Ok((su, sd))
        };
        let cfg = SolverConfig { horizon: 1.0, dt, sample_interval: 1000, ..Default::default() };
        let tr = march_solve_forced(&u_exact(0.0), &d_exact(0.0), &cfg, SystemKind::Reduced, Some(&source)).unwrap();
        let n = tr.len() - 1;
        let t = tr.times()[n];
        let eu = (&tr.u_samples()[n] - &u_exact(t)).max_coeff();
        let ed = (&tr.d_samples().unwrap()[n] - &d_exact(t)).max_coeff();
        eu.max(ed)
    }

    #[test]
    fn manufactured_solution_is_second_order() {
        let e1 = manufactured(0.05);
        let e2 = manufactured(0.025);
        let e3 = manufactured(0.0125);
        let (r1, r2) = (e1 / e2, e2 / e3);
        assert!(e1 > 1e-10, "error too small to measure: {e1}");
        assert!((3.5..4.5).contains(&r1) && (3.5..4.5).contains(&r2), "ratios {r1} {r2}");
    }

    #[test]
    fn velocity_stays_divergence_free_with_zero_mean() {
        let g = grid(16);
        let u0 = Field::from_fn(g, Rank::Vector(3), |x| vec![x[1].sin() + 0.3 * x[2].cos(), x[2].sin(), x[0].cos()]);
        let d0 = Field::scalar_from_fn(g, |x| 0.5 * (x[0] + x[1]).sin());
        let cfg = SolverConfig { horizon: 0.2, dt: 0.02, ..Default::default() };
        let tr = march_solve(&u0, &d0, &cfg, SystemKind::Reduced).unwrap();
        for u in tr.u_samples() {
            assert!(divergence_defect(u) < 1e-12);
            assert!(u.mean().iter().all(|m| m.abs() < 1e-14));
        }
        // energy is non-increasing
        let energy: Vec<f64> = tr
            .u_samples()
            .iter()
            .zip(tr.d_samples().unwrap())
            .map(|(u, d)| 0.5 * l2(u).powi(2) + 0.5 * l2(&crate::calculus::gradient(d).unwrap()).powi(2))
            .collect();
        assert!(energy.windows(2).all(|w| w[1] <= w[0] + 1e-9));
    }

    #[test]
    fn rejects_bad_initial_data() {
        let g = grid(8);
        let cfg = SolverConfig::default();
        let d0 = Field::zeros(g, Rank::Scalar);
        let u0 = Field::from_fn(g, Rank::Vector(3), |x| vec![x[0].sin(), 0.0, 0.0]);
        assert!(matches!(
            march_solve(&u0, &d0, &cfg, SystemKind::Reduced),
            Err(Error::ConstraintViolation { .. })
        ));
        let u0 = Field::from_fn(g, Rank::Vector(3), |_| vec![1.0, 0.0, 0.0]);
        assert!(march_solve(&u0, &d0, &cfg, SystemKind::Reduced).is_err());
        let u0 = Field::zeros(g, Rank::Vector(3));
        assert!(march_solve(&u0, &d0, &cfg, SystemKind::Full).is_err());
    }

    #[test]
    fn blow_up_returns_partial_trajectory() {
        let g = grid(8);
        let u0 = Field::zeros(g, Rank::Vector(3));
        let d0 = Field::scalar_from_fn(g, |x| x[0].cos());
        let source = |t: f64| -> Result<(Field, Field)> {
            Ok((Field::zeros(g, Rank::Vector(3)), Field::scalar_from_fn(g, |_| (40.0 * t).exp())))
        };
        let cfg = SolverConfig { horizon: 1.0, dt: 0.01, sample_interval: 10, ..Default::default() };
        match march_solve_forced(&u0, &d0, &cfg, SystemKind::Reduced, Some(&source)) {
            Err(Error::BlowUp { time, partial, .. }) => {
                assert!(time < 1.0);
                assert!(!partial.is_complete());
                assert!(!partial.is_empty());
            }
            other => panic!("expected blow-up, got {other:?}"),
        }
    }
}
