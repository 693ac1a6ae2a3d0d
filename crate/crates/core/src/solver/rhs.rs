//! Nonlinear right-hand sides of the reduced `(u, d)` and full `(u, v)`
//! systems, built from pointwise products of physical samples.

use num_complex::Complex64;

use super::config::{DealiasPolicy, SolverConfig};
use crate::calculus::{gradient, gradient_part, tensor_divergence};
use crate::error::{Error, Result};
use crate::field::{Field, Rank};
use crate::grid::{norm_sq, SpectralGrid};

/// Velocity forcing `f`, its divergence-free part `P f`, and the director
/// forcing (`g` for the phase, `g_v` for the vector director).
#[derive(Clone, Debug, PartialEq)]
pub struct Forcing {
    pub f: Field,
    pub projected: Field,
    pub director: Field,
}

impl Forcing {
    /// `∇p = f − P f`.
    pub fn pressure_gradient(&self) -> Field {
        &self.f - &self.projected
    }
}

fn samples(f: &Field, policy: DealiasPolicy) -> Vec<Vec<f64>> {
    match policy {
        DealiasPolicy::Standard => {
            let mut t = f.clone();
            t.truncate_two_thirds();
            t.to_physical()
        }
        DealiasPolicy::Off => f.to_physical(),
    }
}

fn coefficients(grid: SpectralGrid, rank: Rank, values: &[Vec<f64>], points: usize, policy: DealiasPolicy) -> Result<Field> {
    let mut out = Field::from_physical_on(grid, rank, values, points)?;
    if policy == DealiasPolicy::Standard {
        out.truncate_two_thirds();
    }
    Ok(out)
}

/// Points per axis of the grid carrying the cubic term: with inputs in the
/// 2/3 band, `3M/2` samples resolve the product without aliasing into the
/// retained band.
pub fn cubic_points(grid: &SpectralGrid, policy: DealiasPolicy) -> usize {
    match policy {
        DealiasPolicy::Standard => 3 * grid.modes() / 2,
        DealiasPolicy::Off => grid.modes(),
    }
}

/// `‖div w‖_{L²} / ‖∇w‖_{L²}`, or 0 for constant `w`.
pub fn divergence_defect(w: &Field) -> f64 {
    let ks = w.grid().wavevectors();
    let dim = w.grid().dim();
    let (mut num, mut den) = (0.0, 0.0);
    for (i, k) in ks.iter().enumerate() {
        let mut d = Complex64::new(0.0, 0.0);
        for j in 0..dim {
            let c = w.component(j)[i];
            d += c * k[j];
            den += c.norm_sqr() * norm_sq(k);
        }
        num += d.norm_sqr();
    }
    if den == 0.0 {
        0.0
    } else {
        (num / den).sqrt()
    }
}

fn check_velocity(w: &Field, cfg: &SolverConfig) -> Result<()> {
    let dim = w.grid().dim();
    if w.rank() != Rank::Vector(dim) {
        return Err(Error::RankMismatch {
            op: "velocity",
            got: w.rank(),
            expected: "vector with one component per spatial axis",
        });
    }
    let defect = divergence_defect(w);
    if !(defect <= cfg.divergence_tol) {
        return Err(Error::ConstraintViolation {
            what: "relative divergence of the velocity",
            value: defect,
            tol: cfg.divergence_tol,
        });
    }
    Ok(())
}

/// Symmetric stress from physical samples: `Σ_c a[c][j]·a[c][k]` over the
/// listed factor groups, stored as a full `N×N` tensor.
fn symmetric_stress(dim: usize, len: usize, groups: &[(&[Vec<f64>], usize)]) -> Vec<Vec<f64>> {
    let mut entries = vec![Vec::new(); dim * dim];
    for j in 0..dim {
        for k in j..dim {
            let mut acc = vec![0.0; len];
            for &(vals, depth) in groups {
                for c in 0..depth {
                    let (x, y) = (&vals[c * dim + j], &vals[c * dim + k]);
                    for ((s, a), b) in acc.iter_mut().zip(x).zip(y) {
                        *s += a * b;
                    }
                }
            }
            entries[j * dim + k] = acc;
        }
    }
    for j in 0..dim {
        for k in 0..j {
            entries[j * dim + k] = entries[k * dim + j].clone();
        }
    }
    entries
}

fn velocity_forcing(grid: SpectralGrid, stress: &[Vec<f64>], policy: DealiasPolicy) -> Result<(Field, Field)> {
    let dim = grid.dim();
    let s = coefficients(grid, Rank::Tensor(dim, dim), stress, grid.modes(), policy)?;
    let f = -&tensor_divergence(&s)?;
    let grad = gradient_part(&f, "velocity forcing")?;
    let projected = &f - &grad;
    Ok((f, projected))
}

/// `f = −Div(w⊙w + ∇θ⊗∇θ)` and `g = −w·∇θ`.
pub fn reduced_rhs(w: &Field, theta: &Field, cfg: &SolverConfig) -> Result<Forcing> {
    check_velocity(w, cfg)?;
    if theta.rank() != Rank::Scalar {
        return Err(Error::RankMismatch {
            op: "reduced right-hand side",
            got: theta.rank(),
            expected: "scalar phase",
        });
    }
    if theta.grid() != w.grid() {
        return Err(Error::GridMismatch);
    }
    let grid = *w.grid();
    let (dim, len) = (grid.dim(), grid.len());
    let pw = samples(w, cfg.dealias);
    let pg = samples(&gradient(theta)?, cfg.dealias);
    let stress = symmetric_stress(dim, len, &[(&pw, 1), (&pg, 1)]);
    let (f, projected) = velocity_forcing(grid, &stress, cfg.dealias)?;
    let mut g = vec![0.0; len];
    for j in 0..dim {
        for ((s, a), b) in g.iter_mut().zip(&pw[j]).zip(&pg[j]) {
            *s -= a * b;
        }
    }
    let director = coefficients(grid, Rank::Scalar, &[g], grid.modes(), cfg.dealias)?;
    Ok(Forcing { f, projected, director })
}

/// Largest `||v| − 1|` over the samples.
pub fn unit_defect(values: &[Vec<f64>]) -> f64 {
    let len = values[0].len();
    let mut worst: f64 = 0.0;
    for i in 0..len {
        let m2: f64 = values.iter().map(|c| c[i] * c[i]).sum();
        worst = worst.max((m2.sqrt() - 1.0).abs());
    }
    worst
}

/// `f = −Div(u⊙u + ∇v⊙∇v)` and `g_v = −u·∇v + |∇v|² v`, the cubic term
/// formed on the padded grid.
pub fn full_rhs(u: &Field, v: &Field, cfg: &SolverConfig) -> Result<Forcing> {
    check_velocity(u, cfg)?;
    if u.grid() != v.grid() {
        return Err(Error::GridMismatch);
    }
    let grid = *u.grid();
    let (dim, len) = (grid.dim(), grid.len());
    let Rank::Vector(m) = v.rank() else {
        return Err(Error::RankMismatch {
            op: "full right-hand side",
            got: v.rank(),
            expected: "vector director",
        });
    };
    let p = cubic_points(&grid, cfg.dealias);
    let defect = unit_defect(&v.to_physical_on(p.max(grid.modes())));
    if !(defect <= cfg.constraint_tol) {
        return Err(Error::ConstraintViolation {
            what: "unit length of the director",
            value: defect,
            tol: cfg.constraint_tol,
        });
    }
    let jac = gradient(v)?;
    let pu = samples(u, cfg.dealias);
    let pj = samples(&jac, cfg.dealias);
    let stress = symmetric_stress(dim, len, &[(&pu, 1), (&pj, m)]);
    let (f, projected) = velocity_forcing(grid, &stress, cfg.dealias)?;

    // transport part on the base grid
    let mut transport = Vec::with_capacity(m);
    for c in 0..m {
        let mut acc = vec![0.0; len];
        for j in 0..dim {
            for ((s, a), b) in acc.iter_mut().zip(&pu[j]).zip(&pj[c * dim + j]) {
                *s -= a * b;
            }
        }
        transport.push(acc);
    }
    let mut director = coefficients(grid, Rank::Vector(m), &transport, grid.modes(), cfg.dealias)?;

    // cubic part on the padded grid
    let (jv, vv) = match cfg.dealias {
        DealiasPolicy::Standard => {
            let (mut a, mut b) = (jac.clone(), v.clone());
            a.truncate_two_thirds();
            b.truncate_two_thirds();
            (a.to_physical_on(p), b.to_physical_on(p))
        }
        DealiasPolicy::Off => (jac.to_physical(), v.to_physical()),
    };
    let plen = jv[0].len();
    let mut e = vec![0.0; plen];
    for c in &jv {
        for (s, x) in e.iter_mut().zip(c) {
            *s += x * x;
        }
    }
    let cubic: Vec<Vec<f64>> = vv.iter().map(|c| c.iter().zip(&e).map(|(a, b)| a * b).collect()).collect();
    let cubic = coefficients(grid, Rank::Vector(m), &cubic, p, cfg.dealias)?;
    director.axpy(1.0, &cubic)?;
    Ok(Forcing { f, projected, director })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::make_grid;
    use std::f64::consts::PI;

    fn grid() -> SpectralGrid {
        make_grid(3, 16, 2.0 * PI).unwrap()
    }

    #[test]
    fn reduced_examples() {
        let g = grid();
        let cfg = SolverConfig::default();
        let w = Field::zeros(g, Rank::Vector(3));
        let theta = Field::scalar_from_fn(g, |x| x[0].sin());
        let r = reduced_rhs(&w, &theta, &cfg).unwrap();
        let want = Field::from_fn(g, Rank::Vector(3), |x| vec![(2.0 * x[0]).sin(), 0.0, 0.0]);
        assert!((&r.f - &want).max_coeff() < 1e-14);
        assert!(r.director.max_coeff() < 1e-15);
        // sin(2x₁) e₁ is a gradient: all of it is pressure
        assert!(r.projected.max_coeff() < 1e-14);

        let zero = Field::zeros(g, Rank::Scalar);
        let r = reduced_rhs(&w, &zero, &cfg).unwrap();
        assert!(r.f.is_zero() && r.director.is_zero());
    }

    #[test]
    fn reduced_matches_direct_formula() {
        let g = grid();
        let cfg = SolverConfig::default();
        // shear flow advecting a phase
        let w = Field::from_fn(g, Rank::Vector(3), |x| vec![x[1].sin(), 0.0, 0.0]);
        let theta = Field::scalar_from_fn(g, |x| x[0].cos() + 0.5 * x[1].sin());
        let r = reduced_rhs(&w, &theta, &cfg).unwrap();
        let want_g = Field::scalar_from_fn(g, |x| x[1].sin() * x[0].sin());
        assert!((&r.director - &want_g).max_coeff() < 1e-14);
        // Div(w⊙w) = 0; Div(∇θ⊗∇θ)_1 = ∂_1(θ_1²) + ∂_2(θ_1 θ_2)
        let want_f = Field::from_fn(g, Rank::Vector(3), |x| {
            let (s1, c1, s2, c2) = (x[0].sin(), x[0].cos(), x[1].sin(), x[1].cos());
            let t1 = -s1;
            let t2 = 0.5 * c2;
            let d1t1 = -c1;
            let d2t2 = -0.5 * s2;
            vec![-(2.0 * t1 * d1t1 + t1 * d2t2), -(d1t1 * t2 + 2.0 * t2 * d2t2), 0.0]
        });
        assert!((&r.f - &want_f).max_coeff() < 1e-14);
        // Δθ = −θ here, so Div(∇θ⊗∇θ) = ∇(|∇θ|²/2 − θ²/2) is all pressure
        assert!(r.projected.max_coeff() < 1e-14);
    }

    #[test]
    fn reduced_rejects_compressible_velocity() {
        let g = grid();
        let w = Field::from_fn(g, Rank::Vector(3), |x| vec![x[0].sin(), 0.0, 0.0]);
        let theta = Field::zeros(g, Rank::Scalar);
        assert!(matches!(
            reduced_rhs(&w, &theta, &SolverConfig::default()),
            Err(Error::ConstraintViolation { .. })
        ));
    }

    #[test]
    fn constant_director_gives_navier_stokes() {
        let g = grid();
        let cfg = SolverConfig::default();
        let u = Field::from_fn(g, Rank::Vector(3), |x| vec![x[1].sin(), x[2].cos(), 0.0]);
        let v = Field::from_fn(g, Rank::Vector(3), |_| vec![0.0, 0.0, 1.0]);
        let r = full_rhs(&u, &v, &cfg).unwrap();
        assert!(r.director.max_coeff() < 1e-15);
        let zero = Field::zeros(g, Rank::Scalar);
        let r2 = reduced_rhs(&u, &zero, &cfg).unwrap();
        assert!((&r.f - &r2.f).max_coeff() < 1e-15);
    }

    #[test]
    fn full_rejects_non_unit_director() {
        let g = grid();
        let u = Field::zeros(g, Rank::Vector(3));
        let v = Field::from_fn(g, Rank::Vector(3), |_| vec![0.0, 0.0, 1.1]);
        let err = full_rhs(&u, &v, &SolverConfig::default()).unwrap_err();
        assert!(matches!(err, Error::ConstraintViolation { what, .. } if what.contains("unit")));
    }

    #[test]
    fn cubic_term_of_arc_director() {
        // v = (cos d, sin d, 0), d = 0.3 sin x1: |∇v|² v = d'² v
        let g = make_grid(3, 32, 2.0 * PI).unwrap();
        let cfg = SolverConfig { constraint_tol: 1e-3, ..Default::default() };
        let d = |x: [f64; 3]| 0.3 * x[0].sin();
        let v = Field::from_fn(g, Rank::Vector(3), |x| vec![d(x).cos(), d(x).sin(), 0.0]);
        let u = Field::zeros(g, Rank::Vector(3));
        let r = full_rhs(&u, &v, &cfg).unwrap();
        for x in [[0.3, 1.0, 2.0], [2.5, 0.1, 0.0]] {
            let dp = 0.3 * f64::cos(x[0]);
            let got = r.director.evaluate_at(x);
            assert!((got[0] - dp * dp * d(x).cos()).abs() < 1e-8);
            assert!((got[1] - dp * dp * d(x).sin()).abs() < 1e-8);
        }
    }
}
