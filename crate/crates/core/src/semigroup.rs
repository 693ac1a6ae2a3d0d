//! Heat and Stokes semigroups, exponential-trapezoid Duhamel steps, pressure
//! recovery and the decay-weight exponent.

use crate::calculus::{gradient_part, leray_project, scale_modes};
use crate::error::{Error, Result};
use crate::field::{Field, Rank};
use crate::grid::{norm_sq, SpectralGrid};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SemigroupKind {
    Heat,
    /// Leray projection followed by the heat multiplier; vectors only.
    Stokes,
}

fn check_kind(f: &Field, kind: SemigroupKind) -> Result<()> {
    if kind == SemigroupKind::Stokes && f.rank() != Rank::Vector(f.grid().dim()) {
        return Err(Error::RankMismatch {
            op: "stokes semigroup",
            got: f.rank(),
            expected: "vector with one component per spatial axis",
        });
    }
    Ok(())
}

/// `e^{tΔ} f` (heat) or `e^{tΔ} P f` (Stokes).
pub fn semigroup_evolve(f: &Field, t: f64, kind: SemigroupKind) -> Result<Field> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::InvalidArgument(format!("evolution time {t} is negative")));
    }
    check_kind(f, kind)?;
    let ks = f.grid().wavevectors();
    let factors: Vec<f64> = ks.iter().map(|k| (-norm_sq(k) * t).exp()).collect();
    let out = scale_modes(f, &factors);
    match kind {
        SemigroupKind::Heat => Ok(out),
        SemigroupKind::Stokes => leray_project(&out),
    }
}

/// `φ₁(z) = (e^z − 1)/z`.
pub fn phi1(z: f64) -> f64 {
    if z == 0.0 {
        1.0
    } else {
        z.exp_m1() / z
    }
}

/// `φ₂(z) = (e^z − 1 − z)/z²`.
pub fn phi2(z: f64) -> f64 {
    if z.abs() < 0.1 {
        // Σ z^n/(n+2)!
        let mut term = 0.5;
        let mut sum = 0.5;
        for n in 1..12 {
            term *= z / (n + 2) as f64;
            sum += term;
        }
        sum
    } else {
        (z.exp_m1() - z) / (z * z)
    }
}

/// Per-mode factors of one exponential-trapezoid step of length `dt`:
///
/// `u₊ = e^{λdt} u + dt φ₁(λdt) h₀ + dt φ₂(λdt) (h₁ − h₀)`, `λ = −|k|²`,
///
/// which integrates `e^{λ(dt−τ)} h(τ)` exactly for `h` linear in time.
#[derive(Clone, Debug)]
pub struct DuhamelPropagator {
    grid: SpectralGrid,
    dt: f64,
    kind: SemigroupKind,
    decay: Vec<f64>,
    w0: Vec<f64>,
    w1: Vec<f64>,
}

impl DuhamelPropagator {
    pub fn new(grid: SpectralGrid, dt: f64, kind: SemigroupKind) -> Result<Self> {
        if !(dt > 0.0) || !dt.is_finite() {
            return Err(Error::InvalidArgument(format!("step {dt} must be positive")));
        }
        let ks = grid.wavevectors();
        let n = ks.len();
        let (mut decay, mut w0, mut w1) = (Vec::with_capacity(n), Vec::with_capacity(n), Vec::with_capacity(n));
        for k in ks.iter() {
            let z = -norm_sq(k) * dt;
            let p1 = phi1(z);
            let p2 = phi2(z);
            decay.push(z.exp());
            // weights on h0 and h1
            w0.push(dt * (p1 - p2));
            w1.push(dt * p2);
        }
        Ok(Self { grid, dt, kind, decay, w0, w1 })
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn kind(&self) -> SemigroupKind {
        self.kind
    }

    pub fn grid(&self) -> &SpectralGrid {
        &self.grid
    }

    /// Free evolution over one step.
    pub fn evolve(&self, f: &Field) -> Result<Field> {
        self.step(f, None, None)
    }

    /// One step with forcing samples at the start and end of the step; a
    /// missing `h1` means constant forcing, missing `h0` means none.
    pub fn step(&self, state: &Field, h0: Option<&Field>, h1: Option<&Field>) -> Result<Field> {
        if state.grid() != &self.grid {
            return Err(Error::GridMismatch);
        }
        check_kind(state, self.kind)?;
        for h in [h0, h1].into_iter().flatten() {
            state.check_compatible(h)?;
        }
        let base = match self.kind {
            SemigroupKind::Heat => state.clone(),
            SemigroupKind::Stokes => leray_project(state)?,
        };
        let mut out = base;
        for (c, comp) in out.components_mut().iter_mut().enumerate() {
            let a = h0.map(|h| h.component(c));
            let b = h1.map(|h| h.component(c));
            for i in 0..comp.len() {
                let mut v = comp[i] * self.decay[i];
                match (a, b) {
                    (Some(a), Some(b)) => v += a[i] * self.w0[i] + b[i] * self.w1[i],
                    (Some(a), None) => v += a[i] * (self.w0[i] + self.w1[i]),
                    (None, Some(b)) => v += b[i] * self.w1[i],
                    (None, None) => {}
                }
                comp[i] = v;
            }
        }
        Ok(out)
    }
}

pub fn duhamel_step(
    state: &Field,
    forcing_at_0: &Field,
    forcing_at_dt: &Field,
    dt: f64,
    kind: SemigroupKind,
) -> Result<Field> {
    DuhamelPropagator::new(*state.grid(), dt, kind)?.step(state, Some(forcing_at_0), Some(forcing_at_dt))
}

/// `∇p` with `Δp = div f` in the zero-mean gauge; `f − ∇p` is divergence-free.
pub fn pressure_gradient(f: &Field) -> Result<Field> {
    gradient_part(f, "pressure gradient")
}

/// Parameters of the decay-weight exponent `α(s, N, δ)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AlphaSpec {
    pub s: f64,
    pub dim: usize,
    pub delta: f64,
}

/// `N/4 − s/2` below the critical index, `δ` at `s = N/2`, `0` above.
pub fn alpha_value(spec: AlphaSpec) -> Result<f64> {
    let AlphaSpec { s, dim, delta } = spec;
    if !(s >= 0.0) || dim < 2 {
        return Err(Error::InvalidArgument(format!("need s ≥ 0 and N ≥ 2, got s = {s}, N = {dim}")));
    }
    let n = dim as f64;
    let crit = n / 2.0;
    if (s - crit).abs() <= 1e-12 {
        if !(delta > 0.0 && delta < n / 4.0) {
            return Err(Error::InvalidArgument(format!(
                "δ = {delta} outside (0, {}) at the critical index",
                n / 4.0
            )));
        }
        Ok(delta)
    } else if s < crit {
        Ok(n / 4.0 - s / 2.0)
    } else {
        Ok(0.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::make_grid;
    use std::f64::consts::PI;

    fn g3() -> SpectralGrid {
        make_grid(3, 16, 2.0 * PI).unwrap()
    }

    #[test]
    fn evolve_examples() {
        let g = g3();
        let f = Field::scalar_from_fn(g, |x| x[0].sin());
        assert_eq!(semigroup_evolve(&f, 0.0, SemigroupKind::Heat).unwrap(), f);
        let e = semigroup_evolve(&f, 1.0, SemigroupKind::Heat).unwrap();
        assert!((&e - &f.scale((-1f64).exp())).max_coeff() < 1e-16);
        assert!(semigroup_evolve(&f, -1.0, SemigroupKind::Heat).is_err());
        assert!(semigroup_evolve(&f, 1.0, SemigroupKind::Stokes).is_err());
    }

    #[test]
    fn phi_functions_match_definitions() {
        for z in [-50.0, -3.0, -0.5, -0.11, -0.09, -1e-3, 0.0, 1e-6] {
            let p1 = if z == 0.0 { 1.0 } else { (z as f64).exp_m1() / z };
            assert!((phi1(z) - p1).abs() < 1e-15);
        }
        assert!((phi2(0.0) - 0.5).abs() < 1e-16);
        // continuity across the series switch
        assert!((phi2(-0.1 + 1e-12) - phi2(-0.1 - 1e-12)).abs() < 1e-12);
        assert!((phi2(-2.0) - ((-2f64).exp() - 1.0 + 2.0) / 4.0).abs() < 1e-15);
    }

    #[test]
    fn constant_forcing_is_exact() {
        let g = g3();
        let f0 = Field::scalar_from_fn(g, |x| 0.7 * x[0].sin());
        let h = Field::scalar_from_fn(g, |x| -1.3 * x[0].sin() + 0.4);
        let dt = 0.37;
        let out = duhamel_step(&f0, &h, &h, dt, SemigroupKind::Heat).unwrap();
        let want = Field::scalar_from_fn(g, |x| {
            (-dt).exp() * 0.7 * x[0].sin() - (1.0 - (-dt).exp()) * 1.3 * x[0].sin() + 0.4 * dt
        });
        assert!((&out - &want).max_coeff() < 1e-15);
    }

    #[test]
    fn pressure_examples() {
        let g = g3();
        let phi = Field::scalar_from_fn(g, |x| x[0].sin());
        let f = crate::calculus::gradient(&phi).unwrap();
        assert!((&pressure_gradient(&f).unwrap() - &f).max_coeff() < 1e-16);
        let f = Field::from_fn(g, Rank::Vector(3), |x| vec![x[0].cos(), x[0].cos(), 0.0]);
        let p = pressure_gradient(&f).unwrap();
        let want = Field::from_fn(g, Rank::Vector(3), |x| vec![x[0].cos(), 0.0, 0.0]);
        assert!((&p - &want).max_coeff() < 1e-15);
    }

    #[test]
    fn alpha_table() {
        let a = |s, dim, delta| alpha_value(AlphaSpec { s, dim, delta });
        assert_eq!(a(1.0, 3, 0.1).unwrap(), 0.25);
        assert_eq!(a(1.5, 3, 0.05).unwrap(), 0.05);
        assert_eq!(a(3.0, 4, 0.1).unwrap(), 0.0);
        assert!(a(1.5, 3, 0.8).is_err());
        assert!(a(1.5, 3, 0.0).is_err());
    }
}
