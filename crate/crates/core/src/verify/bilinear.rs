//! Bilinear and trilinear estimates along sampled trajectories.

use super::{exact_product, lattice_sup};
use crate::calculus::gradient;
use crate::error::{Error, Result};
use crate::field::Field;
use crate::norms::weighted_l2_sq;
use crate::quadrature::trapezoid;
use crate::report::{digest, EstimateReport};
use crate::semigroup::{DuhamelPropagator, SemigroupKind};
use crate::solver::{theta_norm, x_norm};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BilinearVariant {
    /// `‖zw‖_{L²_T H^s} ≲ T^γ ‖z‖_X ‖w‖_X`.
    BilE1,
    /// `‖∫ e^{Δ(t−τ)} zw‖_{L^∞_T L^∞} ≲ T^γ ‖z‖_X ‖w‖_X`.
    BilE2,
    /// `‖zw‖_{L²(R₊; H^s)} ≲ ‖z‖_X ‖w‖_X`, no power of `T`.
    BilE3,
    /// `‖∇z ∇w θ‖_{L²_T H^s} ≲ T^γ ‖θ‖_Θ ‖∇z‖_X ‖∇w‖_X`, integer `s`.
    StabEs1,
    /// The `L^∞_T L^∞` Duhamel form of the trilinear term.
    StabEs2,
    /// The trilinear estimate for `s ∈ (1/2, 1)`, `N = 3`.
    StabEs3,
}

impl BilinearVariant {
    pub fn id(&self) -> &'static str {
        match self {
            BilinearVariant::BilE1 => "bil.e.1",
            BilinearVariant::BilE2 => "bil.e.2",
            BilinearVariant::BilE3 => "bil.e.3",
            BilinearVariant::StabEs1 => "stab.es.1",
            BilinearVariant::StabEs2 => "stab.es.2",
            BilinearVariant::StabEs3 => "stab.es.3",
        }
    }

    fn trilinear(&self) -> bool {
        matches!(self, BilinearVariant::StabEs1 | BilinearVariant::StabEs2 | BilinearVariant::StabEs3)
    }

    fn sup_form(&self) -> bool {
        matches!(self, BilinearVariant::BilE2 | BilinearVariant::StabEs2)
    }
}

/// Exponent of `T` on the right-hand side. With `θ = s − N/2 + 1`: the
/// `L²`-in-time forms gain `θ/2` from Hölder in time, the sup forms `θ`;
/// at or above `s = N/2` both use `1/2`. `bil.e.3` carries no power.
pub fn gamma_table(dim: usize, s: f64, variant: BilinearVariant) -> f64 {
    if variant == BilinearVariant::BilE3 {
        return 0.0;
    }
    let n = dim as f64;
    if s >= n / 2.0 {
        return 0.5;
    }
    let theta = s - n / 2.0 + 1.0;
    if variant.sup_form() {
        theta
    } else {
        theta / 2.0
    }
}

/// Trajectories sharing one grid and one time grid starting at 0.
#[derive(Clone, Copy, Debug)]
pub struct BilinearInputs<'a> {
    pub times: &'a [f64],
    pub z: &'a [Field],
    pub w: &'a [Field],
    /// Third factor of the trilinear variants.
    pub theta: Option<&'a [Field]>,
}

fn validate(inp: &BilinearInputs, s: f64, variant: BilinearVariant) -> Result<()> {
    let n = inp.times.len();
    if n < 2 || inp.z.len() != n || inp.w.len() != n || inp.theta.is_some_and(|t| t.len() != n) {
        return Err(Error::InvalidArgument("trajectories need at least two samples on a shared time set".into()));
    }
    if inp.times[0] != 0.0 || inp.times.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidArgument("times must start at 0 and increase".into()));
    }
    let g = *inp.z[0].grid();
    let all = inp.z.iter().chain(inp.w).chain(inp.theta.into_iter().flatten());
    if all.into_iter().any(|f| f.grid() != &g) {
        return Err(Error::GridMismatch);
    }
    let dim = g.dim() as f64;
    let crit = dim / 2.0 - 1.0;
    let ok = match variant {
        BilinearVariant::BilE3 => s >= crit,
        BilinearVariant::StabEs3 => g.dim() == 3 && s > 0.5 && s < 1.0,
        BilinearVariant::StabEs1 => g.dim() >= 3 && s > crit && s.fract() == 0.0,
        BilinearVariant::BilE2 | BilinearVariant::StabEs2 => g.dim() >= 3 && s > crit,
        BilinearVariant::BilE1 => s > crit,
    };
    if !ok {
        return Err(Error::InvalidArgument(format!(
            "s = {s} outside the range of {} in dimension {}",
            variant.id(),
            g.dim()
        )));
    }
    if variant.trilinear() && inp.theta.is_none() {
        return Err(Error::InvalidArgument(format!("{} needs a third factor", variant.id())));
    }
    Ok(())
}

/// Per-sample left-hand quantities: `‖product‖²_{H^s}` for the `L²` forms,
/// `‖Duhamel integral‖_∞` for the sup forms.
fn lhs_samples(inp: &BilinearInputs, s: f64, variant: BilinearVariant) -> Result<Vec<f64>> {
    let product = |i: usize| -> Result<Field> {
        if variant.trilinear() {
            let gz = gradient(&inp.z[i])?;
            let gw = gradient(&inp.w[i])?;
            exact_product(&[&gz, &gw, &inp.theta.expect("validated")[i]])
        } else {
            exact_product(&[&inp.z[i], &inp.w[i]])
        }
    };
    if !variant.sup_form() {
        return (0..inp.times.len())
            .map(|i| Ok(weighted_l2_sq(&product(i)?, |k2| (1.0 + k2).powf(s))))
            .collect();
    }
    let mut prev = product(0)?;
    let g = *prev.grid();
    let mut d = Field::zeros(g, prev.rank());
    let mut out = vec![0.0];
    for n in 0..inp.times.len() - 1 {
        let next = product(n + 1)?;
        let prop = DuhamelPropagator::new(g, inp.times[n + 1] - inp.times[n], SemigroupKind::Heat)?;
        d = prop.step(&d, Some(&prev), Some(&next))?;
        out.push(lattice_sup(&d));
        prev = next;
    }
    Ok(out)
}

/// `(lhs, norm product)` on the prefix ending at sample `k`.
fn sides(inp: &BilinearInputs, s: f64, variant: BilinearVariant, samples: &[f64], k: usize) -> Result<(f64, f64)> {
    let t = &inp.times[..=k];
    let lhs = if variant.sup_form() {
        samples[..=k].iter().copied().fold(0.0, f64::max)
    } else {
        trapezoid(t, &samples[..=k]).max(0.0).sqrt()
    };
    let norms = if variant.trilinear() {
        let gz: Vec<Field> = inp.z[..=k].iter().map(gradient).collect::<Result<_>>()?;
        let gw: Vec<Field> = inp.w[..=k].iter().map(gradient).collect::<Result<_>>()?;
        theta_norm(t, &inp.theta.expect("validated")[..=k], s) * x_norm(t, &gz, s) * x_norm(t, &gw, s)
    } else {
        x_norm(t, &inp.z[..=k], s) * x_norm(t, &inp.w[..=k], s)
    };
    Ok((lhs, norms))
}

/// One report over the whole time span `T`, with `γ` from [`gamma_table`].
pub fn check_bilinear_estimates(inp: &BilinearInputs, s: f64, variant: BilinearVariant) -> Result<EstimateReport> {
    validate(inp, s, variant)?;
    let samples = lhs_samples(inp, s, variant)?;
    let k = inp.times.len() - 1;
    let (lhs, norms) = sides(inp, s, variant, &samples, k)?;
    let g = inp.z[0].grid();
    let horizon = inp.times[k];
    let gamma = gamma_table(g.dim(), s, variant);
    Ok(EstimateReport::new(
        variant.id(),
        lhs,
        horizon.powf(gamma) * norms,
        digest(&[
            ("N", g.dim().to_string()),
            ("M", g.modes().to_string()),
            ("s", s.to_string()),
            ("T", horizon.to_string()),
            ("gamma", gamma.to_string()),
            ("samples", inp.times.len().to_string()),
        ]),
    ))
}

/// Best-fit `γ` from the prefix windows `[0, t_k]` with `t_k ≥ t_min`: the
/// least-squares slope of `ln(lhs / norm product)` against `ln t_k`.
pub fn fit_gamma(inp: &BilinearInputs, s: f64, variant: BilinearVariant, t_min: f64) -> Result<f64> {
    validate(inp, s, variant)?;
    let samples = lhs_samples(inp, s, variant)?;
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for k in 1..inp.times.len() {
        if inp.times[k] < t_min {
            continue;
        }
        let (lhs, norms) = sides(inp, s, variant, &samples, k)?;
        if lhs > 0.0 && norms > 0.0 {
            xs.push(inp.times[k].ln());
            ys.push((lhs / norms).ln());
        }
    }
    if xs.len() < 3 {
        return Err(Error::InvalidArgument("fewer than three usable prefix windows".into()));
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    Ok(sxy / sxx)
}
