//! The four parabolic smoothing estimates, heat or Stokes, in spectral norms.

use crate::calculus::leray_project;
use crate::error::{Error, Result};
use crate::field::{Field, Rank};
use crate::norms::weighted_l2_sq;
use crate::quadrature::simpson;
use crate::report::{digest, EstimateReport};
use crate::semigroup::{DuhamelPropagator, SemigroupKind};

/// Forcing samples on an increasing time grid starting at 0.
#[derive(Clone, Debug)]
pub struct ForcingRecord {
    pub times: Vec<f64>,
    pub samples: Vec<Field>,
}

impl ForcingRecord {
    fn validate(&self, w0: &Field) -> Result<()> {
        if self.times.len() != self.samples.len() || self.times.len() < 2 {
            return Err(Error::InvalidArgument("forcing record needs matching times and at least two samples".into()));
        }
        if self.times[0] != 0.0 || self.times.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidArgument("forcing times must start at 0 and increase".into()));
        }
        for h in &self.samples {
            w0.check_compatible(h)?;
        }
        Ok(())
    }
}

/// `‖(−Δ)^{m/2} f‖²_{H^s}`.
fn seminorm_sq(f: &Field, m: f64, s: f64) -> f64 {
    weighted_l2_sq(f, |k2| if k2 == 0.0 && m == 0.0 { 1.0 } else { (1.0 + k2).powf(s) * k2.powf(m) })
}

fn project(f: &Field, kind: SemigroupKind) -> Result<Field> {
    match kind {
        SemigroupKind::Heat => Ok(f.clone()),
        SemigroupKind::Stokes => leray_project(f),
    }
}

/// Reports "sm.es.1" through "sm.es.4" for `w0`, forcing `h` (absent means
/// zero), and horizon `T` (`None` for `T = ∞`; the Duhamel terms always use
/// the span of the forcing record). The mean of `h` is removed before use,
/// since `(−Δ)^{−1/2}` is not defined on it.
pub fn check_smoothing_estimates(
    w0: &Field,
    h: Option<&ForcingRecord>,
    m: f64,
    s: f64,
    kind: SemigroupKind,
    horizon: Option<f64>,
) -> Result<Vec<EstimateReport>> {
    if !(m >= 0.0 && s >= 0.0) {
        return Err(Error::InvalidArgument(format!("need m, s ≥ 0, got m = {m}, s = {s}")));
    }
    if kind == SemigroupKind::Stokes && w0.rank() != Rank::Vector(w0.grid().dim()) {
        return Err(Error::RankMismatch {
            op: "stokes smoothing estimates",
            got: w0.rank(),
            expected: "vector with one component per spatial axis",
        });
    }
    if let Some(t) = horizon {
        if !(t > 0.0) {
            return Err(Error::InvalidArgument(format!("horizon {t} must be positive")));
        }
    }
    let j = if kind == SemigroupKind::Stokes { 1 } else { 0 };
    let base = [
        ("m", m.to_string()),
        ("s", s.to_string()),
        ("j", j.to_string()),
        ("T", horizon.map_or("inf".to_string(), |t| t.to_string())),
    ];
    let tag = |extra: &[(&str, String)]| {
        let mut parts: Vec<(&str, String)> = base.to_vec();
        parts.extend_from_slice(extra);
        digest(&parts)
    };

    // free evolution, mode by mode
    let pw = project(w0, kind)?;
    let rhs0 = seminorm_sq(w0, m, s).sqrt();
    let lhs1 = seminorm_sq(&pw, m, s).sqrt();
    let lhs3 = weighted_l2_sq(&pw, |k2| {
        if k2 == 0.0 {
            return 0.0;
        }
        let span = match horizon {
            Some(t) => -(-2.0 * k2 * t).exp_m1(),
            None => 1.0,
        };
        (1.0 + k2).powf(s) * k2.powf(m) * span / 2.0
    })
    .sqrt();
    let mut out = vec![
        EstimateReport::new("sm.es.1", lhs1, rhs0, tag(&[])),
        EstimateReport::new("sm.es.3", lhs3, rhs0, tag(&[])),
    ];

    let (lhs2, lhs4, rhs_h, t_h) = match h {
        None => (0.0, 0.0, 0.0, 0.0),
        Some(rec) => {
            rec.validate(w0)?;
            duhamel_terms(rec, m, s, kind)?
        }
    };
    let extra = [("T_h", t_h.to_string())];
    out.insert(1, EstimateReport::new("sm.es.2", lhs2, rhs_h, tag(&extra)));
    out.push(EstimateReport::new("sm.es.4", lhs4, rhs_h, tag(&extra)));
    Ok(out)
}

/// Sup and time-L² of the Duhamel integral, and the forcing's time-L² norm.
/// The integral is exact for forcing linear between samples; the time
/// integrals of `h` use that same interpolant exactly.
fn duhamel_terms(rec: &ForcingRecord, m: f64, s: f64, kind: SemigroupKind) -> Result<(f64, f64, f64, f64)> {
    let hs: Vec<Field> = rec
        .samples
        .iter()
        .map(|h| project(&h.without_mean(), kind))
        .collect::<Result<_>>()?;
    let g = *hs[0].grid();
    let mut w = Field::zeros(g, hs[0].rank());
    let mut sup: f64 = 0.0;
    let mut grad_sq = vec![0.0];
    for n in 0..hs.len() - 1 {
        let dt = rec.times[n + 1] - rec.times[n];
        // Heat kind: the samples are already projected when needed
        let prop = DuhamelPropagator::new(g, dt, SemigroupKind::Heat)?;
        w = prop.step(&w, Some(&hs[n]), Some(&hs[n + 1]))?;
        sup = sup.max(seminorm_sq(&w, m, s).sqrt());
        grad_sq.push(seminorm_sq(&w, m + 1.0, s));
    }
    let lhs4 = simpson(&rec.times, &grad_sq).max(0.0).sqrt();

    // ∫ |a(1−σ) + bσ|² over each interval, per mode
    let weight = |k2: f64| if k2 == 0.0 { 0.0 } else { (1.0 + k2).powf(s) * k2.powf(m - 1.0) };
    let mut total = 0.0;
    for n in 0..hs.len() - 1 {
        let dt = rec.times[n + 1] - rec.times[n];
        let a = weighted_l2_sq(&hs[n], weight);
        let b = weighted_l2_sq(&hs[n + 1], weight);
        let sum = &hs[n] + &hs[n + 1];
        let ab = 0.5 * (weighted_l2_sq(&sum, weight) - a - b);
        total += dt * (a + ab + b) / 3.0;
    }
    Ok((sup, lhs4, total.max(0.0).sqrt(), *rec.times.last().unwrap()))
}
