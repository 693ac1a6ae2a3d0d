//! Trajectory norms `X^s_T`, `Θ^s_T` and the weighted decay quantity.

use super::config::SolverConfig;
use super::trajectory::Trajectory;
use crate::calculus::gradient;
use crate::error::{Error, Result};
use crate::field::Field;
use crate::norms::{norm, sobolev, sup_norm, weighted_l2_sq, NormRequest};
use crate::quadrature::trapezoid;

/// `‖∇f‖²_{H^s}`.
pub fn grad_hs_sq(f: &Field, s: f64) -> f64 {
    weighted_l2_sq(f, |k2| (1.0 + k2).powf(s) * k2)
}

/// `‖∇∇f‖²_{H^s}`.
pub fn hess_hs_sq(f: &Field, s: f64) -> f64 {
    weighted_l2_sq(f, |k2| (1.0 + k2).powf(s) * k2 * k2)
}

/// `sup_n a_n + (∫ b² dt)^{1/2}` from per-sample values `a_n` and squares `b²_n`.
pub fn sup_plus_l2(times: &[f64], sup_part: &[f64], l2_part_sq: &[f64]) -> f64 {
    let sup = sup_part.iter().fold(0.0f64, |m, &x| if x.is_nan() { f64::NAN } else { m.max(x) });
    let int = if times.len() > 1 { trapezoid(times, l2_part_sq) } else { 0.0 };
    sup + int.max(0.0).sqrt()
}

/// `X^s_T(u)` over samples.
pub fn x_norm(times: &[f64], u: &[Field], s: f64) -> f64 {
    let a: Vec<f64> = u.iter().map(|f| sobolev(f, s)).collect();
    let b: Vec<f64> = u.iter().map(|f| grad_hs_sq(f, s)).collect();
    sup_plus_l2(times, &a, &b)
}

/// `Θ^s_T(θ) = sup ‖θ‖_∞ + X^s_T(∇θ)` over samples.
pub fn theta_norm(times: &[f64], theta: &[Field], s: f64) -> f64 {
    let sup = theta.iter().map(sup_norm).fold(0.0f64, f64::max);
    let a: Vec<f64> = theta.iter().map(|f| grad_hs_sq(f, s).sqrt()).collect();
    let b: Vec<f64> = theta.iter().map(|f| hess_hs_sq(f, s)).collect();
    sup + sup_plus_l2(times, &a, &b)
}

/// Per-sample norm series, in the fixed column order of [`NormSeries::COLUMNS`].
#[derive(Clone, Debug, PartialEq, Default)]
pub struct NormSeries {
    pub times: Vec<f64>,
    pub u_hs: Vec<f64>,
    pub grad_u_hs: Vec<f64>,
    pub d_sup: Vec<f64>,
    pub grad_d_hs: Vec<f64>,
    pub hess_d_hs: Vec<f64>,
    pub u_wk: Vec<f64>,
    pub grad_d_wk: Vec<f64>,
    /// `(t^α + t^{N/4})(‖u‖_{W^{k,∞}} + ‖∇d‖_{W^{k,∞}})`.
    pub weighted: Vec<f64>,
}

impl NormSeries {
    pub const COLUMNS: [&'static str; 9] = [
        "t",
        "u_hs",
        "grad_u_hs",
        "d_sup",
        "grad_d_hs",
        "hess_d_hs",
        "u_wk_inf",
        "grad_d_wk_inf",
        "weighted_decay",
    ];

    pub fn row(&self, i: usize) -> [f64; 9] {
        [
            self.times[i],
            self.u_hs[i],
            self.grad_u_hs[i],
            self.d_sup[i],
            self.grad_d_hs[i],
            self.hess_d_hs[i],
            self.u_wk[i],
            self.grad_d_wk[i],
            self.weighted[i],
        ]
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Appends the norms of one `(u, d)` sample at time `t`.
    pub fn push(&mut self, t: f64, u: &Field, d: &Field, cfg: &SolverConfig, dim: usize) -> Result<()> {
        let (s, k) = (cfg.s, cfg.k_decay);
        let gd = gradient(d)?;
        let uw = norm(u, NormRequest::WkInfty(k))?;
        let gw = norm(&gd, NormRequest::WkInfty(k))?;
        self.times.push(t);
        self.u_hs.push(sobolev(u, s));
        self.grad_u_hs.push(grad_hs_sq(u, s).sqrt());
        self.d_sup.push(sup_norm(d));
        self.grad_d_hs.push(grad_hs_sq(d, s).sqrt());
        self.hess_d_hs.push(hess_hs_sq(d, s).sqrt());
        self.u_wk.push(uw);
        self.grad_d_wk.push(gw);
        self.weighted.push(decay_weight(t, cfg.alpha, dim) * (uw + gw));
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct NormReport {
    pub series: NormSeries,
    pub s: f64,
    pub k: u32,
    pub alpha: f64,
    /// `X^s_T` of the velocity.
    pub x_norm_u: f64,
    /// `Θ^s_T` of the director.
    pub theta_norm_d: f64,
    /// Sup over samples with `t > 0` of the weighted decay quantity.
    pub weighted_sup: f64,
}

pub fn decay_weight(t: f64, alpha: f64, dim: usize) -> f64 {
    t.powf(alpha) + t.powf(dim as f64 / 4.0)
}

pub fn trajectory_norms(traj: &Trajectory, cfg: &SolverConfig) -> Result<NormReport> {
    if traj.is_empty() {
        return Err(Error::InvalidArgument("trajectory has no samples".into()));
    }
    let dim = traj.grid().dim();
    if cfg.k_decay > 0 && !(cfg.s - cfg.k_decay as f64 > dim as f64 / 2.0 - 1.0) {
        return Err(Error::InvalidConfig(format!(
            "s = {} is incompatible with k = {} (need s − k > N/2 − 1)",
            cfg.s, cfg.k_decay
        )));
    }
    let mut ser = NormSeries::default();
    for ((&t, u), d) in traj.times().iter().zip(traj.u_samples()).zip(traj.director_samples()) {
        ser.push(t, u, d, cfg, dim)?;
    }
    let (s, k) = (cfg.s, cfg.k_decay);
    let times = &ser.times;
    let u_sq: Vec<f64> = ser.grad_u_hs.iter().map(|x| x * x).collect();
    let x_norm_u = sup_plus_l2(times, &ser.u_hs, &u_sq);
    let d_sq: Vec<f64> = ser.hess_d_hs.iter().map(|x| x * x).collect();
    let theta_norm_d = ser.d_sup.iter().fold(0.0f64, |m, &x| m.max(x)) + sup_plus_l2(times, &ser.grad_d_hs, &d_sq);
    let weighted_sup = times
        .iter()
        .zip(&ser.weighted)
        .filter(|(t, _)| **t > 0.0)
        .fold(0.0f64, |m, (_, &w)| m.max(w));
    Ok(NormReport { series: ser, s, k, alpha: cfg.alpha, x_norm_u, theta_norm_d, weighted_sup })
}
