use crate::error::{Error, Result};

/// How nonlinear products are dealiased.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub enum DealiasPolicy {
    /// 2/3 rule for quadratic terms, 2x padded grid for the cubic term.
    #[default]
    Standard,
    /// Products taken on the grid itself (aliased; for comparisons only).
    Off,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolverConfig {
    /// Regularity index of the trajectory norms.
    pub s: f64,
    pub horizon: f64,
    pub dt: f64,
    pub picard_tol: f64,
    pub picard_max_iter: usize,
    /// Exponent of the decay weight `t^α + t^{N/4}`.
    pub alpha: f64,
    /// Derivative count of the tracked `W^{k,∞}` norms.
    pub k_decay: u32,
    pub dealias: DealiasPolicy,
    /// Steps between stored samples.
    pub sample_interval: usize,
    /// Largest tolerated `‖|v| − 1‖_∞` for director inputs.
    pub constraint_tol: f64,
    /// Largest tolerated `‖div w‖_∞` relative to `‖w‖_∞`.
    pub divergence_tol: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            s: 1.0,
            horizon: 1.0,
            dt: 1e-2,
            picard_tol: 1e-10,
            picard_max_iter: 50,
            alpha: 0.25,
            k_decay: 0,
            dealias: DealiasPolicy::Standard,
            sample_interval: 1,
            constraint_tol: 1e-6,
            divergence_tol: 1e-8,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self, dim: usize) -> Result<()> {
        let crit = dim as f64 / 2.0 - 1.0;
        if !(self.s > crit) {
            return Err(Error::InvalidConfig(format!("s = {} must exceed N/2 − 1 = {crit}", self.s)));
        }
        if !(self.alpha < 0.5) || self.alpha < 0.0 {
            return Err(Error::InvalidConfig(format!("alpha = {} must lie in [0, 1/2)", self.alpha)));
        }
        if self.k_decay > 0 && !(self.s - self.k_decay as f64 > crit) {
            return Err(Error::InvalidConfig(format!(
                "s − k = {} must exceed N/2 − 1 = {crit}",
                self.s - self.k_decay as f64
            )));
        }
        if !(self.horizon > 0.0 && self.horizon.is_finite()) {
            return Err(Error::InvalidConfig(format!("horizon {} must be positive", self.horizon)));
        }
        if !(self.dt > 0.0 && self.dt <= self.horizon) {
            return Err(Error::InvalidConfig(format!("step {} must lie in (0, horizon]", self.dt)));
        }
        let steps = self.horizon / self.dt;
        if (steps - steps.round()).abs() > 1e-9 * steps.max(1.0) {
            return Err(Error::InvalidConfig(format!(
                "horizon {} is not a whole number of steps {}",
                self.horizon, self.dt
            )));
        }
        if self.sample_interval == 0 {
            return Err(Error::InvalidConfig("sample interval must be at least 1".into()));
        }
        if !(self.picard_tol > 0.0) || self.picard_max_iter == 0 {
            return Err(Error::InvalidConfig("picard tolerance and iteration cap must be positive".into()));
        }
        if !(self.constraint_tol > 0.0) || !(self.divergence_tol > 0.0) {
            return Err(Error::InvalidConfig("constraint tolerances must be positive".into()));
        }
        Ok(())
    }

    pub fn steps(&self) -> usize {
        (self.horizon / self.dt).round() as usize
    }

    /// Time of step `n`, computed without accumulation.
    pub fn time(&self, n: usize) -> f64 {
        n as f64 * self.dt
    }
}
