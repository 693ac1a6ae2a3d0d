//! Seeded initial data with prescribed norms.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use elsim_core::calculus::{gradient, leray_project};
use elsim_core::grid::norm_sq;
use elsim_core::norms::{sobolev, sup_norm};
use elsim_core::solver::grad_hs_sq;
use elsim_core::{Error, Field, Rank, Result, SpectralGrid};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum RecipeKind {
    /// Gaussian coefficients with algebraic decay inside a mode band.
    BandlimitedRandom,
    /// Gaussian bump at the box centre; the velocity is a rotated gradient
    /// of the same profile.
    GaussianBump,
    /// `d₀ = a sin(k x₁)`, `u₀ = b sin(k x₁) e₂`.
    SingleMode,
}

impl RecipeKind {
    pub fn name(&self) -> &'static str {
        match self {
            RecipeKind::BandlimitedRandom => "bandlimited_random",
            RecipeKind::GaussianBump => "gaussian_bump",
            RecipeKind::SingleMode => "single_mode",
        }
    }
}

impl fmt::Display for RecipeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for RecipeKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "bandlimited_random" => Ok(RecipeKind::BandlimitedRandom),
            "gaussian_bump" => Ok(RecipeKind::GaussianBump),
            "single_mode" => Ok(RecipeKind::SingleMode),
            other => Err(format!("unknown recipe {other:?}")),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DataRecipe {
    pub kind: RecipeKind,
    /// Target `‖u₀‖_{H^s}`.
    pub u_hs: f64,
    /// Target `‖∇d₀‖_{H^s}`.
    pub grad_d_hs: Option<f64>,
    /// Target `‖d₀‖_∞`. With both director targets set, the profile must
    /// already have the requested ratio.
    pub d_sup: Option<f64>,
    /// Coefficient envelope `(1 + |k|²)^{−rate/2}` of random data.
    pub decay_rate: f64,
    /// Largest mode number per axis of random data.
    pub band: i64,
    /// Bump radius; the Gaussian width is a third of it.
    pub support_radius: f64,
    /// Mode number of single-mode data.
    pub mode: i64,
}

impl Default for DataRecipe {
    fn default() -> Self {
        Self {
            kind: RecipeKind::BandlimitedRandom,
            u_hs: 1e-2,
            grad_d_hs: Some(1e-2),
            d_sup: None,
            decay_rate: 2.0,
            band: 4,
            support_radius: 1.5,
            mode: 1,
        }
    }
}

/// Relative agreement demanded of jointly prescribed director targets.
const JOINT_TOL: f64 = 0.01;

impl DataRecipe {
    pub fn validate(&self, grid: &SpectralGrid) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidArgument(m));
        if !(self.u_hs >= 0.0 && self.u_hs.is_finite()) {
            return bad(format!("velocity target {} must be finite and nonnegative", self.u_hs));
        }
        for t in [self.grad_d_hs, self.d_sup].into_iter().flatten() {
            if !(t >= 0.0 && t.is_finite()) {
                return bad(format!("director target {t} must be finite and nonnegative"));
            }
        }
        if self.grad_d_hs.is_none() && self.d_sup.is_none() {
            return bad("recipe needs a director target (grad_d_hs or d_sup)".into());
        }
        match self.kind {
            RecipeKind::BandlimitedRandom => {
                if self.band < 1 || self.band > grid.two_thirds_cutoff() {
                    return bad(format!(
                        "band {} outside 1..={} for {} modes",
                        self.band,
                        grid.two_thirds_cutoff(),
                        grid.modes()
                    ));
                }
                if !self.decay_rate.is_finite() {
                    return bad("decay rate must be finite".into());
                }
            }
            RecipeKind::GaussianBump => {
                let l = grid.box_length();
                if !(self.support_radius > 0.0 && self.support_radius < l / 4.0) {
                    return bad(format!("bump radius {} must lie in (0, L/4 = {})", self.support_radius, l / 4.0));
                }
                if self.support_radius / 3.0 < grid.spacing() {
                    return bad(format!(
                        "bump radius {} is under-resolved at spacing {}",
                        self.support_radius,
                        grid.spacing()
                    ));
                }
            }
            RecipeKind::SingleMode => {
                if self.mode < 1 || self.mode > grid.two_thirds_cutoff() {
                    return bad(format!("mode {} outside 1..={}", self.mode, grid.two_thirds_cutoff()));
                }
            }
        }
        Ok(())
    }
}

/// Random coefficients on `0 < max|mᵢ| ≤ band`, Hermitian by construction.
fn random_field(grid: SpectralGrid, rank: Rank, band: i64, rate: f64, rng: &mut ChaCha8Rng) -> Result<Field> {
    let ks = grid.wavevectors();
    let mut comps = Vec::with_capacity(rank.components());
    for _ in 0..rank.components() {
        let mut c = vec![Complex64::new(0.0, 0.0); grid.len()];
        for i in 0..grid.len() {
            let m = grid.mode_indices(i);
            let top = m.iter().map(|x| x.abs()).max().unwrap_or(0);
            if top == 0 || top > band || grid.is_nyquist(i) {
                continue;
            }
            let j = grid.mirror(i);
            if j < i {
                continue;
            }
            let env = (1.0 + norm_sq(&ks[i])).powf(-rate / 2.0);
            let re: f64 = StandardNormal.sample(rng);
            let im: f64 = StandardNormal.sample(rng);
            let z = Complex64::new(re, if j == i { 0.0 } else { im }) * env;
            c[i] = z;
            c[j] = z.conj();
        }
        comps.push(c);
    }
    Field::from_coeffs(grid, rank, comps)
}

fn gaussian(grid: SpectralGrid, width: f64) -> Field {
    let c = grid.box_length() / 2.0;
    let dim = grid.dim();
    Field::scalar_from_fn(grid, |x| {
        let r2: f64 = x[..dim].iter().map(|v| (v - c) * (v - c)).sum();
        (-r2 / (2.0 * width * width)).exp()
    })
}

/// `(∂₂ψ, −∂₁ψ, 0)`: divergence-free with zero mean.
fn rotated_gradient(psi: &Field) -> Result<Field> {
    let grad = gradient(psi)?.into_components();
    let dim = psi.grid().dim();
    let zero = vec![Complex64::new(0.0, 0.0); psi.grid().len()];
    let mut comps = vec![grad[1].clone(), grad[0].iter().map(|z| -z).collect()];
    if dim == 3 {
        comps.push(zero);
    }
    Field::from_coeffs(*psi.grid(), Rank::Vector(dim), comps)
}

fn rescale(f: &Field, current: f64, target: f64) -> Result<Field> {
    if target == 0.0 {
        return Ok(Field::zeros(*f.grid(), f.rank()));
    }
    if !(current > 0.0) {
        return Err(Error::InvalidArgument("profile has zero norm; target unreachable".into()));
    }
    Ok(f.scale(target / current))
}

/// Scale factor for the director profile given its `‖∇·‖_{H^s}` and sup.
fn director_factor(recipe: &DataRecipe, grad: f64, sup: f64) -> Result<f64> {
    let unreachable = |what: String| Err(Error::InvalidArgument(format!("unreachable director targets: {what}")));
    match (recipe.grad_d_hs, recipe.d_sup) {
        (Some(0.0), Some(b)) | (Some(b), Some(0.0)) if b != 0.0 => {
            unreachable("one target is zero and the other is not".into())
        }
        (Some(g), sup_target) => {
            if g == 0.0 {
                return Ok(0.0);
            }
            if !(grad > 0.0) {
                return unreachable("profile has no gradient".into());
            }
            let a = g / grad;
            if let Some(t) = sup_target {
                let got = a * sup;
                if (got - t).abs() > JOINT_TOL * t {
                    return unreachable(format!("‖∇d₀‖_{{H^s}} = {g} forces ‖d₀‖_∞ = {got:e}, requested {t:e}"));
                }
            }
            Ok(a)
        }
        (None, Some(t)) => {
            if t == 0.0 {
                return Ok(0.0);
            }
            if !(sup > 0.0) {
                return unreachable("profile vanishes".into());
            }
            Ok(t / sup)
        }
        (None, None) => unreachable("no target given".into()),
    }
}

/// `(u₀, d₀)` on `grid`, with `s` the regularity index of the targets.
pub fn generate_initial_data(recipe: &DataRecipe, grid: SpectralGrid, s: f64, seed: u64) -> Result<(Field, Field)> {
    recipe.validate(&grid)?;
    let dim = grid.dim();
    match recipe.kind {
        RecipeKind::BandlimitedRandom => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let raw = random_field(grid, Rank::Vector(dim), recipe.band, recipe.decay_rate, &mut rng)?;
            let w = leray_project(&raw)?.without_mean();
            let u0 = rescale(&w, sobolev(&w, s), recipe.u_hs)?;
            let d = random_field(grid, Rank::Scalar, recipe.band, recipe.decay_rate, &mut rng)?;
            let a = director_factor(recipe, grad_hs_sq(&d, s).sqrt(), sup_norm(&d))?;
            Ok((u0, d.scale(a)))
        }
        RecipeKind::GaussianBump => {
            let psi = gaussian(grid, recipe.support_radius / 3.0);
            let w = rotated_gradient(&psi)?;
            let u0 = rescale(&w, sobolev(&w, s), recipe.u_hs)?;
            let a = director_factor(recipe, grad_hs_sq(&psi, s).sqrt(), sup_norm(&psi))?;
            Ok((u0, psi.scale(a)))
        }
        RecipeKind::SingleMode => {
            let k = 2.0 * PI * recipe.mode as f64 / grid.box_length();
            let base = (grid.volume() / 2.0).sqrt();
            let lift = (1.0 + k * k).powf(s / 2.0);
            let a = director_factor(recipe, k * lift * base, 1.0)?;
            let b = recipe.u_hs / (lift * base);
            let d0 = Field::scalar_from_fn(grid, |x| a * (k * x[0]).sin());
            let u0 = Field::from_fn(grid, Rank::Vector(dim), |x| {
                let mut v = vec![0.0; dim];
                v[1] = b * (k * x[0]).sin();
                v
            });
            Ok((u0, d0))
        }
    }
}
