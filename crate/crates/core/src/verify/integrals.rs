//! The two convolution-type time integrals behind the decay argument.

use crate::error::{Error, Result};
use crate::quadrature::adaptive_gk15;
use crate::report::{digest, EstimateReport};

/// `∫₀^b g(σ) σ^{−α} dσ` through `u = σ^{1−α}`, which turns the weight into
/// `du/(1 − α)` and leaves `g` evaluated at `σ = u^{1/(1−α)}`.
fn singular_piece(g: &dyn Fn(f64) -> f64, alpha: f64, b: f64) -> f64 {
    let e = 1.0 - alpha;
    let top = b.powf(e);
    let (v, _) = adaptive_gk15(|u| g(u.powf(1.0 / e)), 0.0, top, 1e-300, 1e-13);
    v / e
}

/// `∫₀ᵗ f(t − τ)(t − τ)^{−α₁} · h(τ) τ^{−α₂} dτ`, split at `t/2` with each
/// endpoint singularity removed by its own substitution.
fn two_sided(f: &dyn Fn(f64) -> f64, a1: f64, h: &dyn Fn(f64) -> f64, a2: f64, t: f64) -> f64 {
    let half = 0.5 * t;
    let left = singular_piece(&|tau| h(tau) * f(t - tau) * (t - tau).powf(-a1), a2, half);
    let right = singular_piece(&|sig| f(sig) * h(t - sig) * (t - sig).powf(-a2), a1, half);
    left + right
}

fn check_alpha(a: f64) -> Result<()> {
    if !(0.0..1.0).contains(&a) {
        return Err(Error::InvalidArgument(format!("α = {a} outside [0, 1)")));
    }
    Ok(())
}

/// Reports "tec.int.1" and "tec.int.2":
///
/// `∫₀ᵗ (t−τ)^{−α₁} τ^{−α₂} dτ` against `t^{−max α} T^{1−min α}`, and
/// `∫₀ᵗ [(t−τ)^{α₁} + (t−τ)^{β₁}]^{−1} [τ^{α₂} + τ^{β₂}]^{−1} dτ` against
/// `(t^{max α} + t^{min β})^{−1}`.
pub fn quad_integral_lemmas(
    alpha1: f64,
    alpha2: f64,
    beta1: f64,
    beta2: f64,
    t: f64,
    horizon: f64,
) -> Result<(EstimateReport, EstimateReport)> {
    check_alpha(alpha1)?;
    check_alpha(alpha2)?;
    if !(beta1 > 1.0 && beta2 > 1.0) {
        return Err(Error::InvalidArgument(format!("β = ({beta1}, {beta2}) must exceed 1")));
    }
    if !(t > 0.0 && t <= horizon && horizon.is_finite()) {
        return Err(Error::InvalidArgument(format!("need 0 < t ≤ T, got t = {t}, T = {horizon}")));
    }
    let (amax, amin) = (alpha1.max(alpha2), alpha1.min(alpha2));
    let tag = digest(&[
        ("a1", alpha1.to_string()),
        ("a2", alpha2.to_string()),
        ("b1", beta1.to_string()),
        ("b2", beta2.to_string()),
        ("t", t.to_string()),
        ("T", horizon.to_string()),
    ]);

    let one = |_: f64| 1.0;
    let i1 = two_sided(&one, alpha1, &one, alpha2, t);
    let r1 = EstimateReport::new("tec.int.1", i1, t.powf(-amax) * horizon.powf(1.0 - amin), tag.clone());

    // x^{−α}/(1 + x^{β−α}) = 1/(x^α + x^β)
    let f = |x: f64| 1.0 / (1.0 + x.powf(beta1 - alpha1));
    let h = |x: f64| 1.0 / (1.0 + x.powf(beta2 - alpha2));
    let i2 = two_sided(&f, alpha1, &h, alpha2, t);
    let r2 = EstimateReport::new("tec.int.2", i2, 1.0 / (t.powf(amax) + t.powf(beta1.min(beta2))), tag);
    Ok((r1, r2))
}

/// Largest ratios of both lemmas over a parameter grid.
#[derive(Clone, Debug, PartialEq)]
pub struct IntegralSweep {
    pub max_ratio_1: f64,
    pub max_ratio_2: f64,
    pub cases: usize,
}

/// Every combination of `alphas × alphas × betas × betas × times`, with
/// `T` the largest time.
pub fn sweep_integral_lemmas(alphas: &[f64], betas: &[f64], times: &[f64]) -> Result<IntegralSweep> {
    let horizon = times.iter().copied().fold(f64::NAN, f64::max);
    let mut out = IntegralSweep { max_ratio_1: 0.0, max_ratio_2: 0.0, cases: 0 };
    for &a1 in alphas {
        for &a2 in alphas {
            for &b1 in betas {
                for &b2 in betas {
                    for &t in times {
                        let (r1, r2) = quad_integral_lemmas(a1, a2, b1, b2, t, horizon)?;
                        out.max_ratio_1 = out.max_ratio_1.max(r1.ratio);
                        out.max_ratio_2 = out.max_ratio_2.max(r2.ratio);
                        out.cases += 1;
                    }
                }
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn beta_function_oracle() {
        for t in [1e-3, 0.1, 1.0, 7.0] {
            let (r1, _) = quad_integral_lemmas(0.5, 0.5, 2.0, 2.0, t, 10.0).unwrap();
            assert!((r1.lhs - PI).abs() < 1e-10, "{}", r1.lhs);
            assert!((r1.ratio - PI * (t / 10.0f64).sqrt()).abs() < 1e-10);
        }
        // B(1 − a, 1 − b) t^{1−a−b} with a = 0.3, b = 0.8: Γ(0.7)Γ(0.2)/Γ(0.9)
        let beta = 1.298_055_332_647_557_8 * 4.590_843_711_998_803 / 1.068_628_702_119_319_4;
        let (r1, _) = quad_integral_lemmas(0.3, 0.8, 2.0, 2.0, 2.0, 2.0).unwrap();
        assert!((r1.lhs - beta * 2f64.powf(-0.1)).abs() < 1e-9, "{} {}", r1.lhs, beta);
    }

    #[test]
    fn trivial_exponents() {
        let (r1, _) = quad_integral_lemmas(0.0, 0.0, 2.0, 2.0, 0.3, 1.0).unwrap();
        assert!((r1.lhs - 0.3).abs() < 1e-14);
        assert!((r1.ratio - 0.3).abs() < 1e-14);
    }

    #[test]
    fn second_lemma_bounded_over_times() {
        let mut worst: f64 = 0.0;
        for i in 0..=12 {
            let t = 10f64.powf(-3.0 + 0.5 * i as f64);
            let (_, r2) = quad_integral_lemmas(0.25, 0.25, 2.0, 2.0, t, 1e3).unwrap();
            worst = worst.max(r2.ratio);
        }
        assert!(worst.is_finite() && worst < 10.0, "{worst}");
    }

    #[test]
    fn near_one_alpha_stays_accurate() {
        // ∫₀¹ τ^{−0.99} dτ = 100
        let (r1, _) = quad_integral_lemmas(0.0, 0.99, 2.0, 2.0, 1.0, 1.0).unwrap();
        assert!((r1.lhs - 100.0).abs() < 1e-8, "{}", r1.lhs);
    }

    #[test]
    fn rejects_out_of_range() {
        assert!(quad_integral_lemmas(1.0, 0.0, 2.0, 2.0, 1.0, 1.0).is_err());
        assert!(quad_integral_lemmas(0.1, 0.0, 1.0, 2.0, 1.0, 1.0).is_err());
        assert!(quad_integral_lemmas(0.1, 0.0, 2.0, 2.0, 2.0, 1.0).is_err());
    }

    #[test]
    fn sweep_counts() {
        let s = sweep_integral_lemmas(&[0.0, 0.5], &[1.5], &[0.1, 1.0]).unwrap();
        assert_eq!(s.cases, 8);
        assert!((s.max_ratio_1 - PI).abs() < 1e-10);
    }
}
