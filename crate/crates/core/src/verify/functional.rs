//! Fractional Leibniz rule and the integer-order product lemmas.

use super::{exact_product, lattice_lebesgue};
use crate::calculus::{apply_multiplier, differentiate, Derivative};
use crate::error::{Error, Result};
use crate::field::{Field, Rank};
use crate::grid::norm_sq;
use crate::norms::sobolev;
use crate::report::{digest, EstimateReport};
use crate::solver::grad_hs_sq;

#[derive(Clone, Debug, PartialEq)]
pub enum FunctionalVariant {
    /// `‖fg‖_{H^s_r} ≤ ‖f‖_{H^s_{p1}}‖g‖_{L^{p2}} + ‖f‖_{L^{q1}}‖g‖_{H^s_{q2}}`.
    FractionalLeibniz { r: f64, p1: f64, p2: f64, q1: f64, q2: f64 },
    /// `‖Π ∇^{s_j} v_j‖_{L²} ≲ Π ‖v_j‖_{H^s}` for `Σ s_j ≤ s − (ℓ − 1)`.
    RegProduct { orders: Vec<u32> },
    /// `‖Π ∇^{s_j} w‖_{L²} ≲ ‖∇w‖_{H^s} ‖w‖^{ℓ−1}_{H^s}` for `Σ s_j ≤ s − (ℓ − 2)`.
    RegGradientProduct { orders: Vec<u32> },
}

impl FunctionalVariant {
    pub fn id(&self) -> &'static str {
        match self {
            FunctionalVariant::FractionalLeibniz { .. } => "fr.L.",
            FunctionalVariant::RegProduct { .. } => "l.reg.a.",
            FunctionalVariant::RegGradientProduct { .. } => "l.reg.2",
        }
    }
}

/// `J^s f = (1 − Δ)^{s/2} f`.
fn bessel_potential(f: &Field, s: f64) -> Result<Field> {
    apply_multiplier(f, |k| (1.0 + norm_sq(&k)).powf(s / 2.0), None)
}

/// Every partial derivative of order `n`, one component per ordered index
/// tuple, so that the pointwise magnitude is `|∇^n f|`.
fn derivative_tensor(f: &Field, n: u32) -> Result<Field> {
    if n == 0 {
        return Ok(f.clone());
    }
    let dim = f.grid().dim();
    let mut comps = Vec::new();
    let total = dim.pow(n);
    for idx in 0..total {
        let mut orders = [0u32; 3];
        let mut rest = idx;
        for _ in 0..n {
            orders[rest % dim] += 1;
            rest /= dim;
        }
        comps.extend(differentiate(f, Derivative::Partial(orders))?.into_components());
    }
    let n = comps.len();
    Field::from_coeffs(*f.grid(), Rank::Vector(n), comps)
}

/// `‖Π_j |∇^{s_j} v_j|‖_{L²}`. The square of the integrand is a product of
/// `2ℓ` band-limited factors, so the lattice rule on the `ℓ`-fold grid is
/// exact.
fn product_of_magnitudes(fields: &[&Field], orders: &[u32]) -> Result<f64> {
    let g = *fields[0].grid();
    let pts = g.modes() * fields.len();
    let mut acc = vec![1.0; pts.pow(g.dim() as u32)];
    for (f, &o) in fields.iter().zip(orders) {
        let d = derivative_tensor(f, o)?;
        let vals = d.to_physical_on(pts);
        let mut mag2 = vec![0.0; acc.len()];
        for c in &vals {
            for (m, v) in mag2.iter_mut().zip(c) {
                *m += v * v;
            }
        }
        for (a, m) in acc.iter_mut().zip(&mag2) {
            *a *= m;
        }
    }
    let cell = g.volume() / acc.len() as f64;
    Ok((acc.iter().sum::<f64>() * cell).sqrt())
}

fn bookkeeping(variant: &FunctionalVariant, s: f64, dim: usize, count: usize) -> Result<()> {
    let reject = |msg: String| Err(Error::InvalidArgument(msg));
    match variant {
        FunctionalVariant::FractionalLeibniz { r, p1, p2, q1, q2 } => {
            if count != 2 {
                return reject(format!("fr.L. takes two factors, got {count}"));
            }
            if !(s > 0.0) {
                return reject(format!("fr.L. needs s > 0, got {s}"));
            }
            let open = |x: f64| x > 1.0 && x.is_finite();
            let half_open = |x: f64| x > 1.0;
            if !(open(*r) && open(*p1) && open(*q2) && half_open(*p2) && half_open(*q1)) {
                return reject(format!(
                    "exponents violate r, p1, q2 ∈ (1, ∞), p2, q1 ∈ (1, ∞]: r={r} p1={p1} p2={p2} q1={q1} q2={q2}"
                ));
            }
            let (a, b, c) = (1.0 / r, 1.0 / p1 + 1.0 / p2, 1.0 / q1 + 1.0 / q2);
            if (a - b).abs() > 1e-12 || (a - c).abs() > 1e-12 {
                return reject(format!("1/r = {a} but 1/p1 + 1/p2 = {b} and 1/q1 + 1/q2 = {c}"));
            }
        }
        FunctionalVariant::RegProduct { orders } | FunctionalVariant::RegGradientProduct { orders } => {
            let grad = matches!(variant, FunctionalVariant::RegGradientProduct { .. });
            let l = orders.len();
            if dim < 3 {
                return reject(format!("product lemmas need N ≥ 3, got {dim}"));
            }
            if s.fract() != 0.0 || s < 0.0 || s < dim as f64 / 2.0 - 1.0 {
                return reject(format!("need integer s ≥ N/2 − 1, got s = {s}"));
            }
            let min_l = if grad { 2 } else { 1 };
            if l < min_l {
                return reject(format!("need ℓ ≥ {min_l} factors, got {l}"));
            }
            let want = if grad { 1 } else { l };
            if count != want {
                return reject(format!("{} takes {want} field(s), got {count}", variant.id()));
            }
            let sum: u32 = orders.iter().sum();
            let budget = s - (l as f64 - if grad { 2.0 } else { 1.0 });
            if sum as f64 > budget {
                let shift = if grad { "ℓ − 2" } else { "ℓ − 1" };
                return reject(format!("s_1 + … + s_ℓ = {sum} exceeds s − ({shift}) = {budget}"));
            }
        }
    }
    Ok(())
}

/// One report per call; exponent bookkeeping is checked before any norm is
/// evaluated. `H^s_p` norms use the lattice rule at twice the grid
/// resolution of the input fields.
pub fn check_functional_inequalities(
    inputs: &[Field],
    s: f64,
    variant: &FunctionalVariant,
) -> Result<EstimateReport> {
    let first = inputs
        .first()
        .ok_or_else(|| Error::InvalidArgument("no input fields".into()))?;
    let g = *first.grid();
    if inputs.iter().any(|f| f.grid() != &g) {
        return Err(Error::GridMismatch);
    }
    bookkeeping(variant, s, g.dim(), inputs.len())?;
    let mut tag = vec![
        ("N", g.dim().to_string()),
        ("M", g.modes().to_string()),
        ("s", s.to_string()),
    ];
    let (lhs, rhs) = match variant {
        FunctionalVariant::FractionalLeibniz { r, p1, p2, q1, q2 } => {
            let (f, h) = (&inputs[0], &inputs[1]);
            let pts = 2 * g.modes();
            let fg = exact_product(&[f, h])?;
            let lhs = lattice_lebesgue(&bessel_potential(&fg, s)?, *r, pts);
            let jf = bessel_potential(f, s)?;
            let jh = bessel_potential(h, s)?;
            let rhs = lattice_lebesgue(&jf, *p1, pts) * lattice_lebesgue(h, *p2, pts)
                + lattice_lebesgue(f, *q1, pts) * lattice_lebesgue(&jh, *q2, pts);
            tag.push(("exponents", format!("{r}/{p1}/{p2}/{q1}/{q2}")));
            (lhs, rhs)
        }
        FunctionalVariant::RegProduct { orders } => {
            let refs: Vec<&Field> = inputs.iter().collect();
            let lhs = product_of_magnitudes(&refs, orders)?;
            let rhs = inputs.iter().map(|v| sobolev(v, s)).product();
            tag.push(("orders", format!("{orders:?}")));
            (lhs, rhs)
        }
        FunctionalVariant::RegGradientProduct { orders } => {
            let w = &inputs[0];
            let refs = vec![w; orders.len()];
            let lhs = product_of_magnitudes(&refs, orders)?;
            let rhs = grad_hs_sq(w, s).sqrt() * sobolev(w, s).powi(orders.len() as i32 - 1);
            tag.push(("orders", format!("{orders:?}")));
            (lhs, rhs)
        }
    };
    Ok(EstimateReport::new(variant.id(), lhs, rhs, digest(&tag)))
}
