//! Radial profiles on the whole space and their exact heat evolution.
//!
//! Gaussians stay Gaussian; tabulated compactly supported profiles are
//! evolved by radial quadrature against the heat kernel with the angular
//! integral done in closed form.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::quadrature::{gauss_legendre, gauss_panels};

#[derive(Clone, Debug, PartialEq)]
pub enum RadialProfile {
    /// `A e^{−|x|²/(4a)}` on `R^dim`.
    Gaussian { dim: usize, amplitude: f64, width: f64 },
    /// Piecewise linear in `|x|` through `(radii[i], values[i])`, zero past
    /// the last radius. `radii` start at 0 and increase.
    Tabulated { dim: usize, radii: Vec<f64>, values: Vec<f64> },
    /// A tabulated profile after heat evolution for `time`.
    HeatEvolved { base: Box<RadialProfile>, time: f64 },
}

/// Smooth bump `A exp(1 − 1/(1 − (r/R)²))` sampled at `nodes` radii.
pub fn bump_profile(dim: usize, amplitude: f64, radius: f64, nodes: usize) -> RadialProfile {
    let radii: Vec<f64> = (0..nodes).map(|i| radius * i as f64 / (nodes - 1) as f64).collect();
    let values = radii
        .iter()
        .map(|&r| {
            let x = r / radius;
            if x < 1.0 {
                amplitude * (1.0 - 1.0 / (1.0 - x * x)).exp()
            } else {
                0.0
            }
        })
        .collect();
    RadialProfile::Tabulated { dim, radii, values }
}

pub fn rn_kernel_evolve(profile: &RadialProfile, t: f64) -> Result<RadialProfile> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::InvalidArgument(format!("evolution time {t} is negative")));
    }
    profile.validate()?;
    Ok(match profile {
        RadialProfile::Gaussian { dim, amplitude, width } => RadialProfile::Gaussian {
            dim: *dim,
            amplitude: amplitude * (width / (width + t)).powf(*dim as f64 / 2.0),
            width: width + t,
        },
        RadialProfile::Tabulated { .. } if t == 0.0 => profile.clone(),
        RadialProfile::Tabulated { .. } => RadialProfile::HeatEvolved { base: Box::new(profile.clone()), time: t },
        RadialProfile::HeatEvolved { base, time } => RadialProfile::HeatEvolved { base: base.clone(), time: time + t },
    })
}

/// Area of the unit sphere in `R^dim`.
pub fn sphere_area(dim: usize) -> f64 {
    match dim {
        1 => 2.0,
        2 => 2.0 * PI,
        3 => 4.0 * PI,
        _ => 2.0 * PI.powf(dim as f64 / 2.0) / gamma_half_integer(dim),
    }
}

/// `Γ(n/2)` for positive integer `n`.
fn gamma_half_integer(n: usize) -> f64 {
    let mut g = if n % 2 == 0 { 1.0 } else { PI.sqrt() };
    let mut k = if n % 2 == 0 { 2 } else { 1 };
    while k + 2 <= n {
        g *= k as f64 / 2.0;
        k += 2;
    }
    g
}

/// `e^{−z} I₀(z)`.
pub fn scaled_bessel_i0(z: f64) -> f64 {
    if z < 20.0 {
        let q = 0.25 * z * z;
        let mut term = 1.0;
        let mut sum = 1.0;
        for k in 1..200 {
            term *= q / (k * k) as f64;
            sum += term;
            if term < 1e-17 * sum {
                break;
            }
        }
        sum * (-z).exp()
    } else {
        let mut term = 1.0;
        let mut sum = 1.0;
        for k in 1..30 {
            let c = (2 * k - 1) as f64;
            let next = term * c * c / (k as f64 * 8.0 * z);
            if next > term {
                break;
            }
            term = next;
            sum += term;
            if term < 1e-17 {
                break;
            }
        }
        sum / (2.0 * PI * z).sqrt()
    }
}

/// `e^{−z} ∫_{S^{N−1}} e^{z cos θ} dσ`.
fn scaled_angular(dim: usize, z: f64) -> Result<f64> {
    match dim {
        2 => Ok(2.0 * PI * scaled_bessel_i0(z)),
        3 => Ok(if z < 1e-8 { 4.0 * PI * (1.0 - z) } else { 4.0 * PI * -(-2.0 * z).exp_m1() / (2.0 * z) }),
        _ => Err(Error::Unsupported(format!("tabulated profiles in dimension {dim}"))),
    }
}

impl RadialProfile {
    pub fn dim(&self) -> usize {
        match self {
            RadialProfile::Gaussian { dim, .. } | RadialProfile::Tabulated { dim, .. } => *dim,
            RadialProfile::HeatEvolved { base, .. } => base.dim(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            RadialProfile::Gaussian { dim, width, amplitude } => {
                if *dim == 0 || !(width > &0.0) || !amplitude.is_finite() {
                    return Err(Error::InvalidArgument("gaussian needs dim ≥ 1 and positive width".into()));
                }
            }
            RadialProfile::Tabulated { dim, radii, values } => {
                if !(*dim == 2 || *dim == 3) {
                    return Err(Error::Unsupported(format!("tabulated profiles in dimension {dim}")));
                }
                if radii.len() < 2 || radii.len() != values.len() || radii[0] != 0.0 {
                    return Err(Error::InvalidArgument("tabulation needs matching radii from 0".into()));
                }
                if radii.windows(2).any(|w| !(w[1] > w[0])) {
                    return Err(Error::InvalidArgument("tabulation radii must increase".into()));
                }
            }
            RadialProfile::HeatEvolved { base, time } => {
                if !matches!(**base, RadialProfile::Tabulated { .. }) || !(time >= &0.0) {
                    return Err(Error::Unsupported("heat evolution of this profile".into()));
                }
                base.validate()?;
            }
        }
        Ok(())
    }

    /// Value at radius `r`.
    pub fn value(&self, r: f64) -> f64 {
        match self {
            RadialProfile::Gaussian { amplitude, width, .. } => amplitude * (-r * r / (4.0 * width)).exp(),
            RadialProfile::Tabulated { radii, values, .. } => interpolate(radii, values, r),
            RadialProfile::HeatEvolved { base, time } => evolved_value(base, *time, r),
        }
    }

    /// Radial derivative at `r`.
    pub fn derivative(&self, r: f64) -> f64 {
        match self {
            RadialProfile::Gaussian { amplitude, width, .. } => {
                -amplitude * r / (2.0 * width) * (-r * r / (4.0 * width)).exp()
            }
            RadialProfile::Tabulated { radii, values, .. } => {
                let i = segment(radii, r);
                match i {
                    Some(i) => (values[i + 1] - values[i]) / (radii[i + 1] - radii[i]),
                    None => 0.0,
                }
            }
            RadialProfile::HeatEvolved { time, .. } => {
                // fourth-order central difference, reflected through r = 0
                let h = 1e-3 * time.sqrt().min(self.extent());
                let v = |x: f64| self.value(x.abs());
                (v(r - 2.0 * h) - 8.0 * v(r - h) + 8.0 * v(r + h) - v(r + 2.0 * h)) / (12.0 * h)
            }
        }
    }

    /// `|∇^k f|` at radius `r`, `k ∈ {0, 1}`.
    pub fn magnitude(&self, r: f64, k: u32) -> f64 {
        if k == 0 {
            self.value(r).abs()
        } else {
            self.derivative(r).abs()
        }
    }

    /// Radius beyond which the profile is negligible (below ~1e-20 relative).
    pub fn extent(&self) -> f64 {
        match self {
            RadialProfile::Gaussian { width, .. } => 14.0 * width.sqrt(),
            RadialProfile::Tabulated { radii, .. } => *radii.last().unwrap(),
            RadialProfile::HeatEvolved { base, time } => base.extent() + 14.0 * time.sqrt(),
        }
    }

    /// `∫ f dx`.
    pub fn mass(&self) -> f64 {
        match self {
            RadialProfile::Gaussian { dim, amplitude, width } => {
                amplitude * (4.0 * PI * width).powf(*dim as f64 / 2.0)
            }
            RadialProfile::HeatEvolved { base, .. } => base.mass(),
            RadialProfile::Tabulated { .. } => self.radial_integral(|r| self.value(r)),
        }
    }

    fn radial_integral(&self, f: impl Fn(f64) -> f64) -> f64 {
        let dim = self.dim();
        let s = sphere_area(dim);
        let g = |r: f64| f(r) * s * r.powi(dim as i32 - 1);
        match self {
            RadialProfile::Tabulated { radii, .. } => radii
                .windows(2)
                .map(|w| gauss_panels(&g, w[0], w[1], 1, 8))
                .sum(),
            _ => gauss_panels(&g, 0.0, self.extent(), 400, 8),
        }
    }

    /// `‖∇^k f‖_{L^q}` for `q ∈ [1, ∞]`, `k ∈ {0, 1}`.
    pub fn lebesgue(&self, q: f64, k: u32) -> Result<f64> {
        if q.is_nan() || q < 1.0 {
            return Err(Error::InvalidNorm(format!("exponent q = {q} below 1")));
        }
        if k > 1 {
            return Err(Error::Unsupported(format!("derivative order {k} on radial profiles")));
        }
        if q.is_infinite() {
            return Ok(self.sup(k));
        }
        if let (RadialProfile::Gaussian { dim, amplitude, width }, 0) = (self, k) {
            return Ok(amplitude.abs() * (4.0 * PI * width / q).powf(*dim as f64 / (2.0 * q)));
        }
        Ok(self.radial_integral(|r| self.magnitude(r, k).powf(q)).powf(1.0 / q))
    }

    fn sup(&self, k: u32) -> f64 {
        match (self, k) {
            (RadialProfile::Gaussian { amplitude, .. }, 0) => amplitude.abs(),
            (RadialProfile::Gaussian { amplitude, width, .. }, _) => {
                amplitude.abs() * (-0.5f64).exp() / (2.0 * width).sqrt()
            }
            _ => {
                let ext = self.extent();
                let n = 400;
                let h = ext / n as f64;
                let mut best = (0, -1.0);
                for i in 0..=n {
                    let v = self.magnitude(i as f64 * h, k);
                    if v > best.1 {
                        best = (i, v);
                    }
                }
                // golden-section refinement around the sampled maximum
                let (mut a, mut b) = ((best.0 as f64 - 1.0).max(0.0) * h, (best.0 as f64 + 1.0) * h);
                let phi = 0.5 * (5f64.sqrt() - 1.0);
                for _ in 0..60 {
                    let c = b - phi * (b - a);
                    let d = a + phi * (b - a);
                    if self.magnitude(c, k) > self.magnitude(d, k) {
                        b = d;
                    } else {
                        a = c;
                    }
                }
                best.1.max(self.magnitude(0.5 * (a + b), k))
            }
        }
    }
}

fn segment(radii: &[f64], r: f64) -> Option<usize> {
    if r < 0.0 || r >= *radii.last().unwrap() {
        return None;
    }
    let i = radii.partition_point(|&x| x <= r);
    Some(i - 1)
}

fn interpolate(radii: &[f64], values: &[f64], r: f64) -> f64 {
    match segment(radii, r) {
        Some(i) => {
            let w = (r - radii[i]) / (radii[i + 1] - radii[i]);
            values[i] * (1.0 - w) + values[i + 1] * w
        }
        None => 0.0,
    }
}

fn evolved_value(base: &RadialProfile, t: f64, rho: f64) -> f64 {
    let RadialProfile::Tabulated { dim, radii, values } = base else {
        unreachable!("validated on construction")
    };
    if t == 0.0 {
        return interpolate(radii, values, rho);
    }
    let dim = *dim;
    let sqrt_t = t.sqrt();
    let lo = (rho - 14.0 * sqrt_t).max(0.0);
    let hi = (rho + 14.0 * sqrt_t).min(*radii.last().unwrap());
    if lo >= hi {
        return 0.0;
    }
    let (x, w) = gauss_legendre(10);
    let pref = (4.0 * PI * t).powf(-(dim as f64) / 2.0);
    let kernel = |r: f64| {
        let z = rho * r / (2.0 * t);
        let ang = scaled_angular(dim, z).expect("dimension validated");
        (-(rho - r) * (rho - r) / (4.0 * t)).exp() * ang * r.powi(dim as i32 - 1)
    };
    // break points: tabulation nodes inside the window
    let mut cuts = vec![lo];
    cuts.extend(radii.iter().copied().filter(|&r| r > lo && r < hi));
    cuts.push(hi);
    let mut total = 0.0;
    for seg in cuts.windows(2) {
        let (a, b) = (seg[0], seg[1]);
        let panels = ((b - a) / (0.5 * sqrt_t)).ceil().clamp(1.0, 2000.0) as usize;
        let hp = (b - a) / panels as f64;
        for p in 0..panels {
            let mid = a + (p as f64 + 0.5) * hp;
            for (xi, wi) in x.iter().zip(&w) {
                let r = mid + 0.5 * hp * xi;
                total += 0.5 * hp * wi * interpolate(radii, values, r) * kernel(r);
            }
        }
    }
    pref * total
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gaussian_closure() {
        let g = RadialProfile::Gaussian { dim: 3, amplitude: 1.0, width: 1.0 };
        let e = rn_kernel_evolve(&g, 3.0).unwrap();
        assert_eq!(e, RadialProfile::Gaussian { dim: 3, amplitude: 0.125, width: 4.0 });
        assert!((e.value(2.0) - 0.125 * (-0.25f64).exp()).abs() < 1e-16);
        assert!(rn_kernel_evolve(&g, -1.0).is_err());
    }

    #[test]
    fn gaussian_norms_by_quadrature_and_closed_form() {
        let g = RadialProfile::Gaussian { dim: 3, amplitude: 2.0, width: 0.7 };
        let closed = g.lebesgue(1.0, 0).unwrap();
        let quad = g.radial_integral(|r| g.value(r));
        assert!((closed - quad).abs() < 1e-12 * closed);
        assert!((g.mass() - closed).abs() < 1e-12 * closed);
        // gradient sup at r = √(2a)
        let s = g.lebesgue(f64::INFINITY, 1).unwrap();
        assert!((s - g.derivative((2.0f64 * 0.7).sqrt()).abs()).abs() < 1e-14);
    }

    #[test]
    fn scaled_bessel_is_continuous() {
        // reference values of e^{-z} I0(z) either side of the branch switch
        let a = scaled_bessel_i0(19.999999999);
        let b = scaled_bessel_i0(20.000000001);
        assert!((a - 0.089_780_311_887_100_11).abs() < 1e-14 * a);
        assert!((b - 0.089_780_311_882_551_93).abs() < 1e-14 * b);
        assert!((scaled_bessel_i0(0.0) - 1.0).abs() < 1e-16);
        // I0(1) = 1.2660658777520082
        assert!((scaled_bessel_i0(1.0) * 1f64.exp() - 1.266_065_877_752_008_2).abs() < 1e-15);
    }

    #[test]
    fn evolved_tabulation_matches_gaussian() {
        // a finely tabulated Gaussian evolves like the exact one
        for dim in [2usize, 3] {
            let exact = RadialProfile::Gaussian { dim, amplitude: 1.0, width: 0.5 };
            let radii: Vec<f64> = (0..=2000).map(|i| i as f64 * 0.005).collect();
            let values = radii.iter().map(|&r| exact.value(r)).collect();
            let tab = RadialProfile::Tabulated { dim, radii, values };
            let t = 0.8;
            let ev = rn_kernel_evolve(&tab, t).unwrap();
            let ex = rn_kernel_evolve(&exact, t).unwrap();
            for r in [0.0, 0.3, 1.0, 2.5] {
                assert!((ev.value(r) - ex.value(r)).abs() < 1e-5, "dim {dim} r {r}");
            }
            assert!((ev.mass() - ex.mass()).abs() < 1e-4 * ex.mass());
        }
    }

    #[test]
    fn sphere_areas() {
        assert!((sphere_area(4) - 2.0 * PI * PI).abs() < 1e-12);
        assert!((sphere_area(5) - 8.0 * PI * PI / 3.0).abs() < 1e-12);
    }
}
