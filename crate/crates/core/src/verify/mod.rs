//! Empirical checks of the estimates, identities and decay laws, each
//! producing [`EstimateReport`](crate::report::EstimateReport)s or fit results.

pub mod bilinear;
pub mod decay;
pub mod energy;
pub mod functional;
pub mod heat_decay;
pub mod integrals;
pub mod smoothing;
pub mod uniqueness;

pub use bilinear::{check_bilinear_estimates, fit_gamma, gamma_table, BilinearInputs, BilinearVariant};
pub use decay::{decay_analysis, transient_horizon, Boundedness, DecayAnalysis, DecayFitResult, DecayLaw};
pub use energy::{energy_identity_check, forced_heat_run, HeatRun};
pub use functional::{check_functional_inequalities, FunctionalVariant};
pub use heat_decay::{check_heat_decay, check_linear_decay, gaussian_sobolev_norm};
pub use integrals::{quad_integral_lemmas, sweep_integral_lemmas, IntegralSweep};
pub use smoothing::{check_smoothing_estimates, ForcingRecord};
pub use uniqueness::{determinism_check, uniqueness_probe, Perturbation, UniquenessReport};

use crate::error::{Error, Result};
use crate::field::{Field, Rank};

/// Pointwise product of all factors, exact: each factor is resampled onto a
/// grid `q` times finer (`q` factors), where the product's band fits without
/// aliasing. Components form the tensor product, first factor major.
pub fn exact_product(factors: &[&Field]) -> Result<Field> {
    let first = factors
        .first()
        .ok_or_else(|| Error::InvalidArgument("product of no factors".into()))?;
    let g = *first.grid();
    if factors.iter().any(|f| f.grid() != &g) {
        return Err(Error::GridMismatch);
    }
    let q = factors.len();
    let fine = g.modes() * q;
    let mut acc: Vec<Vec<f64>> = vec![vec![1.0; fine.pow(g.dim() as u32)]];
    for f in factors {
        let vals = f.to_physical_on(fine);
        let mut next = Vec::with_capacity(acc.len() * vals.len());
        for a in &acc {
            for v in &vals {
                next.push(a.iter().zip(v).map(|(x, y)| x * y).collect());
            }
        }
        acc = next;
    }
    let rank = if acc.len() == 1 { Rank::Scalar } else { Rank::Vector(acc.len()) };
    Field::from_physical(g.with_modes(fine)?, rank, &acc)
}

/// `⟨a, b⟩_{L²}` summed over components.
pub fn inner(a: &Field, b: &Field) -> Result<f64> {
    a.check_compatible(b)?;
    let vol = a.grid().volume();
    let mut s = 0.0;
    for (x, y) in a.components().iter().zip(b.components()) {
        for (p, q) in x.iter().zip(y) {
            s += (p * q.conj()).re;
        }
    }
    Ok(s * vol)
}

/// `‖f‖_{L^p}` by the lattice rule on `points` samples per axis.
pub fn lattice_lebesgue(f: &Field, p: f64, points: usize) -> f64 {
    let vals = f.to_physical_on(points);
    let mag = crate::norms::magnitude(&vals);
    if p.is_infinite() {
        return mag.into_iter().fold(0.0, f64::max);
    }
    let cell = f.grid().volume() / mag.len() as f64;
    (mag.iter().map(|m| m.powf(p)).sum::<f64>() * cell).powf(1.0 / p)
}

/// Largest pointwise magnitude over the field's own lattice.
pub fn lattice_sup(f: &Field) -> f64 {
    lattice_lebesgue(f, f64::INFINITY, f.grid().modes())
}
