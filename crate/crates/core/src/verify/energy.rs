//! Energy identity of the forced heat equation along a discrete run.

use super::inner;
use crate::error::{Error, Result};
use crate::field::Field;
use crate::norms::l2;
use crate::quadrature::cumulative_simpson;
use crate::semigroup::{DuhamelPropagator, SemigroupKind};
use crate::solver::grad_hs_sq;

/// Samples of `(∂_t − Δ)w = h` with the forcing stored alongside.
#[derive(Clone, Debug)]
pub struct HeatRun {
    pub times: Vec<f64>,
    pub w: Vec<Field>,
    pub h: Vec<Field>,
}

/// Runs `steps` exponential-trapezoid steps of size `dt` from `w0` with the
/// forcing sampled at every step.
pub fn forced_heat_run(w0: &Field, h: &dyn Fn(f64) -> Field, dt: f64, steps: usize) -> Result<HeatRun> {
    let prop = DuhamelPropagator::new(*w0.grid(), dt, SemigroupKind::Heat)?;
    let times: Vec<f64> = (0..=steps).map(|n| n as f64 * dt).collect();
    let hs: Vec<Field> = times.iter().map(|&t| h(t)).collect();
    for f in &hs {
        w0.check_compatible(f)?;
    }
    let mut w = Vec::with_capacity(steps + 1);
    w.push(w0.clone());
    for n in 0..steps {
        let next = prop.step(&w[n], Some(&hs[n]), Some(&hs[n + 1]))?;
        w.push(next);
    }
    Ok(HeatRun { times, w, h: hs })
}

/// Max over samples of
/// `|½‖w(t)‖² + ∫‖∇w‖² − ½‖w₀‖² − ∫⟨h, w⟩|`, time integrals by composite
/// Simpson.
pub fn energy_identity_check(run: &HeatRun) -> Result<f64> {
    let n = run.times.len();
    if run.w.len() != n || run.h.len() != n {
        return Err(Error::InvalidArgument(format!(
            "run has {n} times, {} states and {} forcing samples",
            run.w.len(),
            run.h.len()
        )));
    }
    if n == 0 {
        return Err(Error::InvalidArgument("empty run".into()));
    }
    let dissipation: Vec<f64> = run.w.iter().map(|w| grad_hs_sq(w, 0.0)).collect();
    let work: Vec<f64> = run.h.iter().zip(&run.w).map(|(h, w)| inner(h, w)).collect::<Result<_>>()?;
    let d = cumulative_simpson(&run.times, &dissipation);
    let p = cumulative_simpson(&run.times, &work);
    let e0 = 0.5 * l2(&run.w[0]).powi(2);
    Ok(run
        .w
        .iter()
        .enumerate()
        .map(|(i, w)| (0.5 * l2(w).powi(2) + d[i] - e0 - p[i]).abs())
        .fold(0.0, f64::max))
}
