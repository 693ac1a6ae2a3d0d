//! Great-circle directors `v = cos d·η + sin d·ω` and their phases.

use std::f64::consts::PI;

use crate::calculus::{differentiate, gradient, Derivative};
use crate::error::{Error, Result};
use crate::field::{Field, Rank};
use crate::norms::l2;
use crate::report::{digest, EstimateReport};
use crate::solver::{grad_hs_sq, hess_hs_sq};

/// Orthonormal pair spanning the arc's plane in the ambient `R^M`.
#[derive(Clone, Debug, PartialEq)]
pub struct ArcFrame {
    eta: Vec<f64>,
    omega: Vec<f64>,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

impl ArcFrame {
    pub fn new(eta: Vec<f64>, omega: Vec<f64>) -> Result<Self> {
        if eta.len() != omega.len() || eta.len() < 2 {
            return Err(Error::InvalidArgument(format!(
                "frame vectors need a common length ≥ 2, got {} and {}",
                eta.len(),
                omega.len()
            )));
        }
        let tol = 1e-14;
        if (dot(&eta, &eta) - 1.0).abs() > tol || (dot(&omega, &omega) - 1.0).abs() > tol {
            return Err(Error::InvalidArgument("frame vectors must have unit length".into()));
        }
        if dot(&eta, &omega).abs() > tol {
            return Err(Error::InvalidArgument("frame vectors must be orthogonal".into()));
        }
        Ok(Self { eta, omega })
    }

    /// `η = e₁`, `ω = e₂` in `R^m`.
    pub fn standard(m: usize) -> Result<Self> {
        if m < 2 {
            return Err(Error::InvalidArgument(format!("ambient dimension {m} below 2")));
        }
        let mut eta = vec![0.0; m];
        let mut omega = vec![0.0; m];
        eta[0] = 1.0;
        omega[1] = 1.0;
        Self::new(eta, omega)
    }

    pub fn ambient(&self) -> usize {
        self.eta.len()
    }

    pub fn eta(&self) -> &[f64] {
        &self.eta
    }

    pub fn omega(&self) -> &[f64] {
        &self.omega
    }

    fn check_director(&self, v: &Field) -> Result<()> {
        if v.rank() != Rank::Vector(self.ambient()) {
            return Err(Error::RankMismatch {
                op: "arc director",
                got: v.rank(),
                expected: "vector in the frame's ambient dimension",
            });
        }
        Ok(())
    }
}

impl Default for ArcFrame {
    fn default() -> Self {
        Self::standard(3).expect("standard frame")
    }
}

fn check_phase(d: &Field) -> Result<()> {
    if d.rank() != Rank::Scalar {
        return Err(Error::RankMismatch {
            op: "arc phase",
            got: d.rank(),
            expected: "scalar",
        });
    }
    Ok(())
}

fn embed_samples(phase: &[f64], frame: &ArcFrame) -> Vec<Vec<f64>> {
    (0..frame.ambient())
        .map(|c| {
            let (e, o) = (frame.eta[c], frame.omega[c]);
            phase.iter().map(|&d| d.cos() * e + d.sin() * o).collect()
        })
        .collect()
}

/// `cos d·η + sin d·ω`, evaluated on the padded grid and truncated.
pub fn arc_embed(d: &Field, frame: &ArcFrame) -> Result<Field> {
    check_phase(d)?;
    let p = 2 * d.grid().modes();
    let phase = d.to_physical_on(p);
    Field::from_physical_on(*d.grid(), Rank::Vector(frame.ambient()), &embed_samples(&phase[0], frame), p)
}

/// [`arc_embed`] plus the `L²` norm of the discarded coefficients.
pub fn arc_embed_with_tail(d: &Field, frame: &ArcFrame) -> Result<(Field, f64)> {
    check_phase(d)?;
    let fine = d.grid().with_modes(2 * d.grid().modes())?;
    let phase = d.to_physical_on(fine.modes());
    let full = Field::from_physical(fine, Rank::Vector(frame.ambient()), &embed_samples(&phase[0], frame))?;
    let v = full.resampled(d.grid().modes())?;
    let tail = (l2(&full).powi(2) - l2(&v).powi(2)).max(0.0).sqrt();
    Ok((v, tail))
}

fn residuals_from_samples(values: &[Vec<f64>], frame: &ArcFrame) -> (f64, f64) {
    let len = values[0].len();
    let (mut unit, mut plane) = (0.0f64, 0.0f64);
    for i in 0..len {
        let (mut m2, mut a, mut b) = (0.0, 0.0, 0.0);
        for (c, vals) in values.iter().enumerate() {
            let x = vals[i];
            m2 += x * x;
            a += x * frame.eta[c];
            b += x * frame.omega[c];
        }
        unit = unit.max((m2 - 1.0).abs());
        let mut off = 0.0;
        for (c, vals) in values.iter().enumerate() {
            let r = vals[i] - a * frame.eta[c] - b * frame.omega[c];
            off += r * r;
        }
        plane = plane.max(off.sqrt());
    }
    (unit, plane)
}

/// `(max ||v|² − 1|, max |v − ⟨v,η⟩η − ⟨v,ω⟩ω|)` over the padded grid.
pub fn constraint_residuals(v: &Field, frame: &ArcFrame) -> Result<(f64, f64)> {
    frame.check_director(v)?;
    Ok(residuals_from_samples(&v.to_physical_padded(), frame))
}

/// Largest phase magnitude accepted by [`arc_reconstruct`].
pub const BRANCH_MARGIN: f64 = PI - 0.1;

/// Principal phase `atan2(⟨v,ω⟩, ⟨v,η⟩)`, computed on the padded grid.
pub fn arc_reconstruct(v: &Field, frame: &ArcFrame, tol: f64) -> Result<Field> {
    frame.check_director(v)?;
    let values = v.to_physical_padded();
    let (unit, plane) = residuals_from_samples(&values, frame);
    if !(unit <= tol) {
        return Err(Error::ConstraintViolation { what: "unit residual", value: unit, tol });
    }
    if !(plane <= tol) {
        return Err(Error::ConstraintViolation { what: "plane residual", value: plane, tol });
    }
    let len = values[0].len();
    let mut phase = vec![0.0; len];
    let mut worst = 0.0f64;
    for (i, d) in phase.iter_mut().enumerate() {
        let (mut a, mut b) = (0.0, 0.0);
        for (c, vals) in values.iter().enumerate() {
            a += vals[i] * frame.eta[c];
            b += vals[i] * frame.omega[c];
        }
        *d = b.atan2(a);
        worst = worst.max(d.abs());
    }
    if worst > BRANCH_MARGIN {
        return Err(Error::ConstraintViolation {
            what: "phase distance to the branch cut",
            value: worst,
            tol: BRANCH_MARGIN,
        });
    }
    Field::from_physical_on(*v.grid(), Rank::Scalar, &[phase], 2 * v.grid().modes())
}

/// Largest pointwise defects of the arc identities, each side evaluated
/// independently on the padded grid.
#[derive(Clone, Debug, PartialEq)]
pub struct ArcIdentityReport {
    /// `∇v = ∇d (−sin d·η + cos d·ω)`.
    pub gradient: f64,
    /// `|∇v|² = |∇d|²`.
    pub energy_density: f64,
    /// `Δv = (Δd cos d − |∇d|² sin d)ω − (Δd sin d + |∇d|² cos d)η`.
    pub laplacian: f64,
    /// Coefficient tail discarded by the embedding.
    pub tail: f64,
}

impl ArcIdentityReport {
    pub fn max_defect(&self) -> f64 {
        self.gradient.max(self.energy_density).max(self.laplacian)
    }
}

pub fn arc_identity_check(d: &Field, frame: &ArcFrame) -> Result<ArcIdentityReport> {
    let (v, tail) = arc_embed_with_tail(d, frame)?;
    let dim = d.grid().dim();
    let m = frame.ambient();
    // spectral route from v
    let jv = gradient(&v)?.to_physical_padded();
    let lv = differentiate(&v, Derivative::Laplacian)?.to_physical_padded();
    // pointwise route from d
    let pd = d.to_physical_padded();
    let gd = gradient(d)?.to_physical_padded();
    let ld = differentiate(d, Derivative::Laplacian)?.to_physical_padded();
    let len = pd[0].len();
    let (mut eg, mut ee, mut el) = (0.0f64, 0.0f64, 0.0f64);
    for i in 0..len {
        let (s, c) = pd[0][i].sin_cos();
        let g2: f64 = (0..dim).map(|j| gd[j][i] * gd[j][i]).sum();
        let mut jv2 = 0.0;
        for comp in 0..m {
            let tangent = -s * frame.eta[comp] + c * frame.omega[comp];
            let radial = c * frame.eta[comp] + s * frame.omega[comp];
            for j in 0..dim {
                let a = jv[comp * dim + j][i];
                jv2 += a * a;
                eg = eg.max((a - gd[j][i] * tangent).abs());
            }
            let want = ld[0][i] * tangent - g2 * radial;
            el = el.max((lv[comp][i] - want).abs());
        }
        ee = ee.max((jv2 - g2).abs());
    }
    Ok(ArcIdentityReport { gradient: eg, energy_density: ee, laplacian: el, tail })
}

fn is_natural(s: f64) -> bool {
    s >= 0.0 && s.fract() == 0.0
}

/// Ratios of the arc norm-equivalence inequalities for `v = arc_embed(d)`.
///
/// Integer `s > N/2 − 1`: both directions and the second-derivative bound
/// (`l.Hk.eq.1..3`). `s ∈ (1/2, 1)`, `N = 3`: the forward bounds
/// (`l.Hs.es.2.1`, `l.Hs.es.2.2`) and the small-data reconstruction bound
/// (`l.Hs.IC.`). Reports carry ratios with unit constants.
pub fn norm_equivalence_report(d: &Field, frame: &ArcFrame, s: f64) -> Result<Vec<EstimateReport>> {
    check_phase(d)?;
    let dim = d.grid().dim();
    let integer = is_natural(s) && s > dim as f64 / 2.0 - 1.0;
    let fractional = dim == 3 && s > 0.5 && s < 1.0;
    if !integer && !fractional {
        return Err(Error::InvalidArgument(format!(
            "s = {s} outside the supported ranges (integer s > N/2 − 1, or s in (1/2, 1) with N = 3)"
        )));
    }
    let v = arc_embed(d, frame)?;
    let gd = grad_hs_sq(d, s).sqrt();
    let gv = grad_hs_sq(&v, s).sqrt();
    let hd = hess_hs_sq(d, s).sqrt();
    let hv = hess_hs_sq(&v, s).sqrt();
    let tag = digest(&[
        ("N", dim.to_string()),
        ("M", d.grid().modes().to_string()),
        ("L", format!("{}", d.grid().box_length())),
        ("s", format!("{s}")),
    ]);
    let mut out = Vec::new();
    if integer {
        out.push(EstimateReport::new("l.Hk.eq.1", gv, gd * (1.0 + gd.powf(s)), tag.clone()));
        out.push(EstimateReport::new("l.Hk.eq.2", gd, gv * (1.0 + gv.powf(s)), tag.clone()));
        out.push(EstimateReport::new("l.Hk.eq.3", hv, hd * (1.0 + gd.powf(s + 1.0)), tag));
    } else {
        out.push(EstimateReport::new("l.Hs.es.2.1", gv, gd * (1.0 + gd), tag.clone()));
        out.push(EstimateReport::new("l.Hs.es.2.2", hv, hd * (1.0 + gd * gd), tag.clone()));
        // ε = ‖v − η‖_∞ + ‖∇v‖_{H^s}
        let pv = v.to_physical_padded();
        let mut dev = 0.0f64;
        for i in 0..pv[0].len() {
            let e: f64 = (0..frame.ambient()).map(|c| (pv[c][i] - frame.eta[c]).powi(2)).sum();
            dev = dev.max(e.sqrt());
        }
        let eps = dev + gv;
        let lhs = if eps == 0.0 {
            0.0
        } else {
            let d0 = arc_reconstruct(&v, frame, 1e-6)?;
            crate::norms::sup_norm(&d0).powi(2) + grad_hs_sq(&d0, s).sqrt()
        };
        out.push(EstimateReport::new("l.Hs.IC.", lhs, eps, tag));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{make_grid, SpectralGrid};

    fn grid(m: usize) -> SpectralGrid {
        make_grid(3, m, 2.0 * PI).unwrap()
    }

    fn smooth_phase(g: SpectralGrid, a: f64) -> Field {
        Field::scalar_from_fn(g, |x| a * (x[0].sin() + 0.5 * (x[1] + x[2]).cos() - 0.3 * (2.0 * x[2]).sin()))
    }

    #[test]
    fn frame_validation() {
        assert!(ArcFrame::new(vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0]).is_ok());
        assert!(ArcFrame::new(vec![1.0, 0.0, 0.0], vec![0.6, 0.8, 0.0]).is_err());
        assert!(ArcFrame::new(vec![1.0, 0.1, 0.0], vec![0.0, 1.0, 0.0]).is_err());
        let r = std::f64::consts::FRAC_1_SQRT_2;
        assert!(ArcFrame::new(vec![r, r, 0.0], vec![-r, r, 0.0]).is_ok());
    }

    #[test]
    fn embed_constants() {
        let g = grid(8);
        let f = ArcFrame::default();
        let v = arc_embed(&Field::zeros(g, Rank::Scalar), &f).unwrap();
        assert!((&v - &Field::from_fn(g, Rank::Vector(3), |_| vec![1.0, 0.0, 0.0])).max_coeff() < 1e-15);
        let v = arc_embed(&Field::scalar_from_fn(g, |_| PI / 2.0), &f).unwrap();
        assert!((&v - &Field::from_fn(g, Rank::Vector(3), |_| vec![0.0, 1.0, 0.0])).max_coeff() < 1e-15);
    }

    #[test]
    fn round_trip_and_branch_safety() {
        let g = grid(32);
        let f = ArcFrame::default();
        let d = smooth_phase(g, 1.4);
        let v = arc_embed(&d, &f).unwrap();
        let back = arc_reconstruct(&v, &f, 1e-6).unwrap();
        assert!((&back - &d).max_coeff() < 1e-9);
        let big = smooth_phase(g, 1.9);
        assert!(matches!(
            arc_reconstruct(&arc_embed(&big, &f).unwrap(), &f, 1e-6),
            Err(Error::ConstraintViolation { what: "phase distance to the branch cut", .. })
        ));
    }

    #[test]
    fn out_of_plane_director_is_rejected() {
        let g = grid(8);
        let f = ArcFrame::default();
        let eps: f64 = 1e-2;
        let n = (1.0 - eps * eps).sqrt();
        let v = Field::from_fn(g, Rank::Vector(3), |_| vec![n, 0.0, eps]);
        let (unit, plane) = constraint_residuals(&v, &f).unwrap();
        assert!(unit < 1e-15);
        assert!((plane - eps).abs() < 1e-15);
        match arc_reconstruct(&v, &f, 1e-4) {
            Err(Error::ConstraintViolation { what, .. }) => assert_eq!(what, "plane residual"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn identities_hold_on_single_mode() {
        let g = grid(16);
        let d = Field::scalar_from_fn(g, |x| 1e-2 * x[0].sin());
        let r = arc_identity_check(&d, &ArcFrame::default()).unwrap();
        assert!(r.max_defect() < 1e-8, "{r:?}");
        let r = arc_identity_check(&Field::scalar_from_fn(g, |_| 0.4), &ArcFrame::default()).unwrap();
        assert!(r.max_defect() < 1e-15);
    }

    #[test]
    fn identity_defect_falls_with_resolution() {
        let f = ArcFrame::default();
        let a = arc_identity_check(&smooth_phase(grid(8), 0.8), &f).unwrap();
        let b = arc_identity_check(&smooth_phase(grid(32), 0.8), &f).unwrap();
        assert!(b.max_defect() * 1e2 <= a.max_defect(), "{a:?} {b:?}");
    }

    #[test]
    fn equivalence_small_amplitude_limit() {
        let g = grid(16);
        let f = ArcFrame::default();
        for s in [1.0, 0.75] {
            let mut last = f64::INFINITY;
            for a in [1e-1, 1e-2, 1e-3] {
                let d = smooth_phase(g, a);
                let v = arc_embed(&d, &f).unwrap();
                let q = (grad_hs_sq(&v, s) / grad_hs_sq(&d, s)).sqrt();
                assert!((q - 1.0).abs() < last);
                last = (q - 1.0).abs();
            }
            assert!(last < 1e-5);
        }
        let zero = norm_equivalence_report(&Field::zeros(g, Rank::Scalar), &f, 1.0).unwrap();
        assert!(zero.iter().all(|r| r.degenerate));
        let zero = norm_equivalence_report(&Field::zeros(g, Rank::Scalar), &f, 0.75).unwrap();
        assert!(zero.iter().all(|r| r.degenerate));
        assert!(norm_equivalence_report(&Field::zeros(g, Rank::Scalar), &f, 0.3).is_err());
        assert!(norm_equivalence_report(&Field::zeros(g, Rank::Scalar), &f, 1.5).is_err());
    }
}
