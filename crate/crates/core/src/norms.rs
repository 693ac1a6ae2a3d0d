//! Norms of band-limited fields.
//!
//! Component fields are measured with the pointwise Euclidean (Frobenius)
//! norm. Sobolev norms use the multiplier `(1+|k|²)^{s/2}`; sup-norms and
//! non-quadratic Lebesgue norms are read off the 2x padded physical grid.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::calculus::gradient;
use crate::error::{Error, Result};
use crate::field::{Field, Rank};
use crate::grid::norm_sq;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum NormRequest {
    /// Inhomogeneous `H^s`.
    Sobolev(f64),
    /// `L^p`, `p ∈ [1, ∞]`.
    Lebesgue(f64),
    /// `Σ_{j ≤ k} ‖∇^j f‖_∞`.
    WkInfty(u32),
    /// Homogeneous seminorm `(Σ |k|^{2s} |f̂|² L^N)^{1/2}`, the multiplier
    /// form of the Gagliardo seminorm (see [`gagliardo_seminorm_oracle`]).
    Gagliardo(f64),
}

impl NormRequest {
    pub fn validate(&self) -> Result<()> {
        match *self {
            NormRequest::Sobolev(s) | NormRequest::Gagliardo(s) if !s.is_finite() || s < 0.0 => {
                Err(Error::InvalidNorm(format!("order {s} must be finite and nonnegative")))
            }
            NormRequest::Lebesgue(p) if p.is_nan() || p < 1.0 => {
                Err(Error::InvalidNorm(format!("exponent p = {p} below 1")))
            }
            _ => Ok(()),
        }
    }
}

pub fn norm(f: &Field, req: NormRequest) -> Result<f64> {
    req.validate()?;
    Ok(match req {
        NormRequest::Sobolev(s) => weighted_l2(f, |k2| (1.0 + k2).powf(s)),
        NormRequest::Gagliardo(s) => homogeneous_seminorm(f, s),
        NormRequest::Lebesgue(p) if p == 2.0 => weighted_l2(f, |_| 1.0),
        NormRequest::Lebesgue(p) if p.is_infinite() => sup_norm(f),
        NormRequest::Lebesgue(p) => lebesgue_padded(f, p),
        NormRequest::WkInfty(k) => wk_infty(f, k)?,
    })
}

pub fn sobolev(f: &Field, s: f64) -> f64 {
    weighted_l2(f, |k2| (1.0 + k2).powf(s))
}

pub fn l2(f: &Field) -> f64 {
    weighted_l2(f, |_| 1.0)
}

pub fn homogeneous_seminorm(f: &Field, s: f64) -> f64 {
    weighted_l2(f, |k2| if k2 == 0.0 { 0.0 } else { k2.powf(s) })
}

/// `(L^N Σ_k weight(|k|²) |f̂(k)|²)^{1/2}` summed over components.
pub fn weighted_l2(f: &Field, weight: impl Fn(f64) -> f64) -> f64 {
    weighted_l2_sq(f, weight).sqrt()
}

pub fn weighted_l2_sq(f: &Field, weight: impl Fn(f64) -> f64) -> f64 {
    let g = f.grid();
    let ks = g.wavevectors();
    let w: Vec<f64> = ks.iter().map(|k| weight(norm_sq(k))).collect();
    let mut total = 0.0;
    for c in f.components() {
        let mut acc = 0.0;
        for (v, wk) in c.iter().zip(&w) {
            acc += wk * v.norm_sqr();
        }
        total += acc;
    }
    total * g.volume()
}

/// Pointwise Euclidean magnitude on the 2x padded grid.
pub fn padded_magnitude(f: &Field) -> Vec<f64> {
    magnitude(&f.to_physical_padded())
}

pub(crate) fn magnitude(values: &[Vec<f64>]) -> Vec<f64> {
    let len = values[0].len();
    let mut out = vec![0.0; len];
    for c in values {
        for (o, v) in out.iter_mut().zip(c) {
            *o += v * v;
        }
    }
    out.iter_mut().for_each(|v| *v = v.sqrt());
    out
}

pub fn sup_norm(f: &Field) -> f64 {
    if f.is_zero() {
        return 0.0;
    }
    padded_magnitude(f).into_iter().fold(0.0, f64::max)
}

fn lebesgue_padded(f: &Field, p: f64) -> f64 {
    if f.is_zero() {
        return 0.0;
    }
    let mag = padded_magnitude(f);
    let cell = f.grid().volume() / mag.len() as f64;
    let sum: f64 = mag.iter().map(|m| m.powf(p)).sum();
    (sum * cell).powf(1.0 / p)
}

fn wk_infty(f: &Field, k: u32) -> Result<f64> {
    let mut total = sup_norm(f);
    let mut cur = f.clone();
    for _ in 0..k {
        cur = higher_gradient(&cur)?;
        total += sup_norm(&cur);
    }
    Ok(total)
}

/// Gradient that keeps stacking derivative axes: rank is flattened into a
/// vector of components so repeated application yields `∇^j f`.
fn higher_gradient(f: &Field) -> Result<Field> {
    let n = f.rank().components();
    let flat = if n == 1 {
        f.clone().reshaped(Rank::Scalar)?
    } else {
        f.clone().reshaped(Rank::Vector(n))?
    };
    gradient(&flat)
}

/// Monte-Carlo estimate of the Gagliardo seminorm
/// `(∫_T ∫_B |f(x+h) − f(x)|² / |h|^{N+2s} dh dx)^{1/2}` with `B` the centred
/// periodic box (periodic distance). The `x` integral is exact (Parseval on
/// the translated field); `h` is drawn with radial density `∝ r^{1−2s}`.
#[derive(Clone, Debug, PartialEq)]
pub struct GagliardoEstimate {
    pub value: f64,
    pub std_error: f64,
    pub samples: usize,
    /// Relative standard error exceeded the requested target.
    pub underresolved: bool,
}

pub fn gagliardo_seminorm_oracle(
    f: &Field,
    s: f64,
    samples: usize,
    seed: u64,
    target_rel_error: f64,
) -> Result<GagliardoEstimate> {
    if !(s > 0.0 && s < 1.0) {
        return Err(Error::InvalidArgument(format!("oracle order s = {s} outside (0, 1)")));
    }
    if matches!(f.rank(), Rank::Tensor(..)) {
        return Err(Error::RankMismatch {
            op: "gagliardo oracle",
            got: f.rank(),
            expected: "scalar or vector",
        });
    }
    if samples < 2 {
        return Err(Error::InvalidArgument("oracle needs at least two samples".into()));
    }
    if f.is_zero() {
        return Ok(GagliardoEstimate { value: 0.0, std_error: 0.0, samples, underresolved: false });
    }
    let g = *f.grid();
    let dim = g.dim();
    let half = g.box_length() / 2.0;
    let radius = half * (dim as f64).sqrt();
    let sphere = if dim == 2 { 2.0 * std::f64::consts::PI } else { 4.0 * std::f64::consts::PI };
    let ks = g.wavevectors();
    // nonzero modes with their power, summed over components
    let modes: Vec<([f64; 3], f64)> = (1..g.len())
        .filter_map(|i| {
            let p: f64 = f.components().iter().map(|c| c[i].norm_sqr()).sum();
            (p > 0.0).then_some((ks[i], p))
        })
        .collect();
    let e = 2.0 - 2.0 * s;
    let scale = sphere * radius.powf(e) / e;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut sum, mut sum_sq) = (0.0, 0.0);
    for _ in 0..samples {
        let u: f64 = rng.gen();
        let r = radius * u.powf(1.0 / e);
        let dir = random_direction(&mut rng, dim);
        let h = [r * dir[0], r * dir[1], r * dir[2]];
        let w = if h[..dim].iter().all(|x| x.abs() < half) {
            // ∫ |f(x+h) − f(x)|² dx = L^N Σ |f̂|² |e^{ik·h} − 1|²
            let mut acc = 0.0;
            for (k, p) in &modes {
                let phase = k[0] * h[0] + k[1] * h[1] + k[2] * h[2];
                acc += p * 2.0 * (1.0 - phase.cos());
            }
            acc * g.volume() / (r * r) * scale
        } else {
            0.0
        };
        sum += w;
        sum_sq += w * w;
    }
    let n = samples as f64;
    let mean = sum / n;
    let var = ((sum_sq / n - mean * mean) * n / (n - 1.0)).max(0.0);
    let se_sq = (var / n).sqrt();
    let value = mean.sqrt();
    let std_error = if value > 0.0 { se_sq / (2.0 * value) } else { 0.0 };
    Ok(GagliardoEstimate {
        value,
        std_error,
        samples,
        underresolved: std_error > target_rel_error * value,
    })
}

fn random_direction(rng: &mut ChaCha8Rng, dim: usize) -> [f64; 3] {
    loop {
        let mut v = [0.0; 3];
        for x in v.iter_mut().take(dim) {
            *x = rng.gen_range(-1.0..1.0);
        }
        let n2 = norm_sq(&v);
        if n2 > 1e-12 && n2 <= 1.0 {
            let n = n2.sqrt();
            return [v[0] / n, v[1] / n, v[2] / n];
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::make_grid;
    use std::f64::consts::PI;

    #[test]
    fn sine_norms() {
        let g = make_grid(3, 16, 2.0 * PI).unwrap();
        let f = Field::scalar_from_fn(g, |x| x[0].sin());
        let l2v = norm(&f, NormRequest::Lebesgue(2.0)).unwrap();
        assert!((l2v - 2.0 * PI.powf(1.5)).abs() < 1e-12 * l2v);
        let h1 = norm(&f, NormRequest::Sobolev(1.0)).unwrap();
        assert!((h1 - 2.0 * PI.powf(1.5) * 2f64.sqrt()).abs() < 1e-12 * h1);
        assert!((norm(&f, NormRequest::Lebesgue(f64::INFINITY)).unwrap() - 1.0).abs() < 1e-12);
        // sup of cos plus sup of sin
        assert!((norm(&f, NormRequest::WkInfty(2)).unwrap() - 3.0).abs() < 1e-12);
    }

    #[test]
    fn zero_field_everywhere_zero() {
        let g = make_grid(2, 8, 1.0).unwrap();
        let f = Field::zeros(g, Rank::Vector(2));
        for req in [
            NormRequest::Sobolev(1.5),
            NormRequest::Lebesgue(3.0),
            NormRequest::Lebesgue(f64::INFINITY),
            NormRequest::WkInfty(2),
            NormRequest::Gagliardo(0.5),
        ] {
            assert_eq!(norm(&f, req).unwrap(), 0.0);
        }
        assert_eq!(gagliardo_seminorm_oracle(&f, 0.5, 10, 1, 0.05).unwrap().value, 0.0);
    }

    #[test]
    fn rejects_bad_requests() {
        let g = make_grid(2, 8, 1.0).unwrap();
        let f = Field::zeros(g, Rank::Scalar);
        assert!(norm(&f, NormRequest::Lebesgue(0.5)).is_err());
        assert!(norm(&f, NormRequest::Sobolev(f64::NAN)).is_err());
        assert!(gagliardo_seminorm_oracle(&f, 1.0, 10, 1, 0.05).is_err());
    }

    #[test]
    fn quartic_norm_of_cosine() {
        // ∫ cos⁴ over [0, 2π)² is 3/8 · (2π)²
        let g = make_grid(2, 8, 2.0 * PI).unwrap();
        let f = Field::scalar_from_fn(g, |x| x[0].cos());
        let v = norm(&f, NormRequest::Lebesgue(4.0)).unwrap();
        assert!((v.powi(4) - 3.0 / 8.0 * 4.0 * PI * PI).abs() < 1e-12);
    }

    #[test]
    fn padded_sup_beats_grid_sup() {
        // peak at x = π/4 (off-lattice for 4 points)
        let g = make_grid(2, 4, 2.0 * PI).unwrap();
        let f = Field::scalar_from_fn(g, |x| x[0].sin() + x[0].cos());
        let grid_max = f.to_physical()[0].iter().cloned().fold(f64::MIN, f64::max);
        let padded = sup_norm(&f);
        assert!(grid_max < padded);
        assert!((padded - 2f64.sqrt()).abs() < 1e-12);
    }
}
