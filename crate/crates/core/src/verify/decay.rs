//! Log-log decay fits and weighted boundedness of norm series.

use crate::error::{Error, Result};
use crate::grid::SpectralGrid;
use crate::solver::decay_weight;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum DecayLaw {
    /// `value ~ t^p`.
    PurePower(f64),
    /// `(t^α + t^{N/4})·value` bounded.
    Weighted { alpha: f64, dim: usize },
}

impl DecayLaw {
    fn weight(&self, t: f64) -> f64 {
        match *self {
            DecayLaw::PurePower(p) => t.powf(-p),
            DecayLaw::Weighted { alpha, dim } => decay_weight(t, alpha, dim),
        }
    }

    /// Exponent the fit is compared against.
    pub fn expected_exponent(&self) -> f64 {
        match *self {
            DecayLaw::PurePower(p) => p,
            DecayLaw::Weighted { dim, .. } => -(dim as f64) / 4.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DecayFitResult {
    pub exponent: f64,
    pub intercept: f64,
    pub window: (f64, f64),
    /// Largest deviation from the fitted line in log-log coordinates.
    pub residual: f64,
    pub sample_count: usize,
}

/// Sup of the weighted series over the window and over each half of it.
#[derive(Clone, Debug, PartialEq)]
pub struct Boundedness {
    pub weighted_sup: f64,
    pub first_half_max: f64,
    pub second_half_max: f64,
    /// The running max does not grow over the second half.
    pub non_increasing: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DecayAnalysis {
    pub fit: DecayFitResult,
    pub boundedness: Boundedness,
    pub law: DecayLaw,
}

impl DecayAnalysis {
    pub fn exponent_error(&self) -> f64 {
        self.fit.exponent - self.law.expected_exponent()
    }
}

/// Periodic-box horizon `L²/40` before the spectral gap dominates.
pub fn transient_horizon(grid: &SpectralGrid) -> f64 {
    grid.box_length().powi(2) / 40.0
}

pub fn decay_analysis(times: &[f64], values: &[f64], window: (f64, f64), law: DecayLaw) -> Result<DecayAnalysis> {
    if times.len() != values.len() {
        return Err(Error::InvalidArgument(format!(
            "{} times against {} values",
            times.len(),
            values.len()
        )));
    }
    let (lo, hi) = window;
    if !(lo > 0.0 && hi > lo && hi.is_finite()) {
        return Err(Error::InvalidArgument(format!("window ({lo}, {hi}) is not a positive interval")));
    }
    let picked: Vec<(f64, f64)> = times
        .iter()
        .zip(values)
        .filter(|(t, _)| **t >= lo && **t <= hi)
        .map(|(t, v)| (*t, *v))
        .collect();
    if picked.len() < 8 {
        return Err(Error::InvalidArgument(format!(
            "{} samples in window ({lo}, {hi}), need at least 8",
            picked.len()
        )));
    }
    if let Some((t, v)) = picked.iter().find(|(_, v)| !(*v > 0.0)) {
        return Err(Error::InvalidArgument(format!("nonpositive value {v} at t = {t}")));
    }

    let n = picked.len() as f64;
    let xs: Vec<f64> = picked.iter().map(|(t, _)| t.ln()).collect();
    let ys: Vec<f64> = picked.iter().map(|(_, v)| v.ln()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let residual = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - intercept - slope * x).abs())
        .fold(0.0, f64::max);

    let mid = 0.5 * (lo + hi);
    let (mut first, mut second) = (0.0f64, 0.0f64);
    for (t, v) in &picked {
        let w = law.weight(*t) * v;
        if *t <= mid {
            first = first.max(w);
        } else {
            second = second.max(w);
        }
    }
    let boundedness = Boundedness {
        weighted_sup: first.max(second),
        first_half_max: first,
        second_half_max: second,
        non_increasing: second <= first * (1.0 + 1e-12),
    };
    Ok(DecayAnalysis {
        fit: DecayFitResult { exponent: slope, intercept, window, residual, sample_count: picked.len() },
        boundedness,
        law,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::make_grid;
    use crate::rn_kernel::{rn_kernel_evolve, RadialProfile};

    fn log_times(lo: f64, hi: f64, n: usize) -> Vec<f64> {
        (0..n).map(|i| lo * (hi / lo).powf(i as f64 / (n - 1) as f64)).collect()
    }

    #[test]
    fn exact_power_law() {
        let t = log_times(1.0, 100.0, 30);
        let v: Vec<f64> = t.iter().map(|t| 2.5 * t.powf(-0.75)).collect();
        let a = decay_analysis(&t, &v, (1.0, 100.0), DecayLaw::PurePower(-0.75)).unwrap();
        assert!((a.fit.exponent + 0.75).abs() < 1e-10);
        assert!((a.fit.intercept - 2.5f64.ln()).abs() < 1e-10);
        assert!(a.fit.residual < 1e-12);
        assert_eq!(a.fit.sample_count, 30);
        assert!((a.boundedness.weighted_sup - 2.5).abs() < 1e-12);
    }

    #[test]
    fn gaussian_sup_matches_least_squares_oracle() {
        // sup of the evolved Gaussian is (1 + t)^{-3/2}, so the fitted slope
        // is the textbook least-squares slope of −1.5 ln(1 + t) against ln t
        let p = RadialProfile::Gaussian { dim: 3, amplitude: 1.0, width: 1.0 };
        let t = log_times(10.0, 1000.0, 60);
        let v: Vec<f64> = t
            .iter()
            .map(|&t| rn_kernel_evolve(&p, t).unwrap().lebesgue(f64::INFINITY, 0).unwrap())
            .collect();
        let a = decay_analysis(&t, &v, (10.0, 1000.0), DecayLaw::PurePower(-1.5)).unwrap();
        let oracle = ls_slope(&t, &t.iter().map(|t| -1.5 * (1.0 + t).ln()).collect::<Vec<_>>());
        assert!((a.fit.exponent - oracle).abs() < 1e-12);
        assert!((a.exponent_error()).abs() < 0.03);
        // t^{3/2}(1 + t)^{−3/2} creeps up to 1 from below
        assert!(a.boundedness.weighted_sup < 1.0);
        assert!(!a.boundedness.non_increasing);
    }

    // straight textbook formula, kept separate from the implementation
    fn ls_slope(t: &[f64], y: &[f64]) -> f64 {
        let n = t.len() as f64;
        let x: Vec<f64> = t.iter().map(|t| t.ln()).collect();
        let sx: f64 = x.iter().sum();
        let sy: f64 = y.iter().sum();
        let sxy: f64 = x.iter().zip(y).map(|(a, b)| a * b).sum();
        let sxx: f64 = x.iter().map(|a| a * a).sum();
        (n * sxy - sx * sy) / (n * sxx - sx * sx)
    }

    #[test]
    fn weighted_law_boundedness() {
        let t = log_times(0.5, 10.0, 20);
        let v: Vec<f64> = t.iter().map(|t| 1.0 / (t.powf(0.45) + t.powf(0.75))).collect();
        let a = decay_analysis(&t, &v, (0.5, 10.0), DecayLaw::Weighted { alpha: 0.45, dim: 3 }).unwrap();
        assert!((a.boundedness.weighted_sup - 1.0).abs() < 1e-12);
        assert!(a.boundedness.non_increasing);
        // growing series fails the second-half test
        let v: Vec<f64> = t.iter().map(|t| t.powf(0.1)).collect();
        let a = decay_analysis(&t, &v, (0.5, 10.0), DecayLaw::Weighted { alpha: 0.45, dim: 3 }).unwrap();
        assert!(!a.boundedness.non_increasing);
    }

    #[test]
    fn rejects_bad_input() {
        let t = log_times(1.0, 10.0, 10);
        let mut v = vec![1.0; 10];
        assert!(decay_analysis(&t, &v, (1.0, 10.0), DecayLaw::PurePower(0.0)).is_ok());
        assert!(decay_analysis(&t, &v, (5.0, 10.0), DecayLaw::PurePower(0.0)).is_err());
        v[3] = 0.0;
        assert!(decay_analysis(&t, &v, (1.0, 10.0), DecayLaw::PurePower(0.0)).is_err());
        assert!(decay_analysis(&t, &v, (10.0, 1.0), DecayLaw::PurePower(0.0)).is_err());
    }

    #[test]
    fn horizon() {
        let g = make_grid(3, 8, 8.0 * std::f64::consts::PI).unwrap();
        assert!((transient_horizon(&g) - 64.0 * std::f64::consts::PI.powi(2) / 40.0).abs() < 1e-12);
    }
}
