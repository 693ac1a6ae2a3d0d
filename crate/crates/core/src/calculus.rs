//! Spectral differentiation, Fourier multipliers, Leray projection and the
//! dealiased quadratic products that build stress tensors.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::field::{Field, Rank};
use crate::grid::{norm_sq, SpectralGrid};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Derivative {
    Gradient,
    Divergence,
    Laplacian,
    /// Mixed partial `∂^α` with one order per axis.
    Partial([u32; 3]),
}

/// Multiplies each coefficient by `symbol(k)`. A symbol that is not finite at
/// `k = 0` needs `zero_override`; non-finite values elsewhere are errors.
pub fn apply_multiplier(
    f: &Field,
    symbol: impl Fn([f64; 3]) -> f64,
    zero_override: Option<f64>,
) -> Result<Field> {
    let g = *f.grid();
    let ks = g.wavevectors();
    let mut factors = Vec::with_capacity(g.len());
    for (i, k) in ks.iter().enumerate() {
        let v = if i == 0 {
            match zero_override {
                Some(v) => v,
                None => symbol(*k),
            }
        } else {
            symbol(*k)
        };
        if !v.is_finite() {
            if g.is_nyquist(i) {
                factors.push(0.0);
                continue;
            }
            let hint = if i == 0 { " (supply a value for k = 0)" } else { "" };
            return Err(Error::SingularSymbol { at: *k, hint });
        }
        factors.push(v);
    }
    Ok(scale_modes(f, &factors))
}

pub(crate) fn scale_modes(f: &Field, factors: &[f64]) -> Field {
    let mut out = f.clone();
    for c in out.components_mut() {
        for (v, &a) in c.iter_mut().zip(factors) {
            *v *= a;
        }
    }
    out
}

/// `∂_axis` of every component.
pub fn partial(f: &Field, axis: usize) -> Field {
    let g = *f.grid();
    let ks = g.wavevectors();
    let mut out = f.clone();
    for c in out.components_mut() {
        for (i, v) in c.iter_mut().enumerate() {
            *v *= Complex64::new(0.0, ks[i][axis]);
        }
    }
    out
}

pub fn differentiate(f: &Field, mode: Derivative) -> Result<Field> {
    let g = *f.grid();
    let dim = g.dim();
    match mode {
        Derivative::Gradient => gradient(f),
        Derivative::Divergence => match f.rank() {
            Rank::Vector(n) if n == dim => {
                let mut acc = partial(&f.component_field(0), 0);
                for j in 1..dim {
                    acc.axpy(1.0, &partial(&f.component_field(j), j))?;
                }
                Ok(acc)
            }
            Rank::Tensor(r, _) if r == dim => tensor_divergence(f),
            got => Err(Error::RankMismatch {
                op: "divergence",
                got,
                expected: "vector or tensor with leading size equal to the dimension",
            }),
        },
        Derivative::Laplacian => apply_multiplier(f, |k| -norm_sq(&k), None),
        Derivative::Partial(alpha) => {
            if alpha[dim..].iter().any(|&a| a > 0) {
                return Err(Error::InvalidArgument(format!(
                    "multi-index {alpha:?} differentiates an axis beyond dimension {dim}"
                )));
            }
            let ks = g.wavevectors();
            let mut out = f.clone();
            for c in out.components_mut() {
                for (i, v) in c.iter_mut().enumerate() {
                    let mut m = Complex64::new(1.0, 0.0);
                    for a in 0..dim {
                        m *= Complex64::new(0.0, ks[i][a]).powu(alpha[a]);
                    }
                    *v *= m;
                }
            }
            Ok(out)
        }
    }
}

/// Scalar `f` gives the vector `∇f`; a vector with `n` components gives the
/// `n × N` Jacobian with entry `(c, j) = ∂_j f_c`.
pub fn gradient(f: &Field) -> Result<Field> {
    let g = *f.grid();
    let dim = g.dim();
    let ks = g.wavevectors();
    let (rank, n) = match f.rank() {
        Rank::Scalar => (Rank::Vector(dim), 1),
        Rank::Vector(n) => (Rank::Tensor(n, dim), n),
        got => {
            return Err(Error::RankMismatch {
                op: "gradient",
                got,
                expected: "scalar or vector",
            })
        }
    };
    let mut comps = Vec::with_capacity(n * dim);
    for c in 0..n {
        let src = f.component(c);
        for j in 0..dim {
            comps.push(
                src.iter()
                    .zip(ks.iter())
                    .map(|(v, k)| v * Complex64::new(0.0, k[j]))
                    .collect(),
            );
        }
    }
    Ok(Field::from_parts(g, rank, comps))
}

/// `(Div A)_k = Σ_j ∂_j A_{jk}` for a tensor with `N` rows.
pub fn tensor_divergence(a: &Field) -> Result<Field> {
    let g = *a.grid();
    let dim = g.dim();
    let Rank::Tensor(rows, cols) = a.rank() else {
        return Err(Error::RankMismatch {
            op: "tensor divergence",
            got: a.rank(),
            expected: "tensor",
        });
    };
    if rows != dim {
        return Err(Error::RankMismatch {
            op: "tensor divergence",
            got: a.rank(),
            expected: "tensor with one row per spatial axis",
        });
    }
    let ks = g.wavevectors();
    let mut comps = vec![vec![Complex64::new(0.0, 0.0); g.len()]; cols];
    for (k, out) in comps.iter_mut().enumerate() {
        for j in 0..dim {
            let src = a.component(j * cols + k);
            for (i, v) in out.iter_mut().enumerate() {
                *v += src[i] * Complex64::new(0.0, ks[i][j]);
            }
        }
    }
    Ok(Field::from_parts(g, Rank::Vector(cols), comps))
}

/// `û(k) ↦ û(k) − (k·û(k)) k / |k|²`, mean mode unchanged.
pub fn leray_project(f: &Field) -> Result<Field> {
    let grad = gradient_part(f, "leray projection")?;
    f.try_sub(&grad)
}

/// Gradient part `k (k·f̂)/|k|²` of a vector field, zero on the mean mode.
pub(crate) fn gradient_part(f: &Field, op: &'static str) -> Result<Field> {
    let g = *f.grid();
    let dim = g.dim();
    if f.rank() != Rank::Vector(dim) {
        return Err(Error::RankMismatch {
            op,
            got: f.rank(),
            expected: "vector with one component per spatial axis",
        });
    }
    let ks = g.wavevectors();
    let mut comps = vec![vec![Complex64::new(0.0, 0.0); g.len()]; dim];
    for i in 1..g.len() {
        let k = ks[i];
        let k2 = norm_sq(&k);
        let mut dot = Complex64::new(0.0, 0.0);
        for j in 0..dim {
            dot += f.component(j)[i] * k[j];
        }
        let dot = dot / k2;
        for j in 0..dim {
            comps[j][i] = dot * k[j];
        }
    }
    Ok(Field::from_parts(g, f.rank(), comps))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StressKind {
    /// `(∇a ⊗ ∇b)_{jk} = ∂_j a ∂_k b` for scalars.
    GradientOuter,
    /// `(∇a ⊙ ∇b)_{jk} = ∂_j a · ∂_k b` for vectors (sum over components).
    JacobianDot,
    /// `(a ⊙ b)_{jk} = a_j b_k` for vectors with `N` components.
    Outer,
}

/// Products of physical samples are formed on the grid itself after
/// truncating inputs and output to the 2/3 band.
pub fn stress_tensor(a: &Field, b: &Field, kind: StressKind) -> Result<Field> {
    if a.grid() != b.grid() {
        return Err(Error::GridMismatch);
    }
    let g = *a.grid();
    let dim = g.dim();
    // rows: list of dim "vectors" each with `depth` entries, summed over depth
    let (ga, gb, depth) = match kind {
        StressKind::GradientOuter => {
            expect_rank(a, Rank::Scalar, "gradient outer product", "scalar")?;
            expect_rank(b, Rank::Scalar, "gradient outer product", "scalar")?;
            (gradient(a)?, gradient(b)?, 1)
        }
        StressKind::JacobianDot => {
            let (Rank::Vector(n), Rank::Vector(m)) = (a.rank(), b.rank()) else {
                return Err(Error::RankMismatch {
                    op: "jacobian product",
                    got: if matches!(a.rank(), Rank::Vector(_)) { b.rank() } else { a.rank() },
                    expected: "vector",
                });
            };
            if n != m {
                return Err(Error::RankMismatch {
                    op: "jacobian product",
                    got: b.rank(),
                    expected: "vector of matching length",
                });
            }
            (gradient(a)?, gradient(b)?, n)
        }
        StressKind::Outer => {
            expect_rank(a, Rank::Vector(dim), "outer product", "vector with N components")?;
            expect_rank(b, Rank::Vector(dim), "outer product", "vector with N components")?;
            (a.clone(), b.clone(), 1)
        }
    };
    // entry (c, j) of the factor arrays: component c, axis j
    let index = |c: usize, j: usize| match kind {
        StressKind::Outer => j,
        _ => c * dim + j,
    };
    let same = a == b;
    let pa = physical_two_thirds(&ga);
    let pb = if same { None } else { Some(physical_two_thirds(&gb)) };
    let pb_ref = pb.as_ref().unwrap_or(&pa);
    let len = g.len();
    let mut entries = vec![Vec::new(); dim * dim];
    for j in 0..dim {
        for k in 0..dim {
            if same && k < j {
                continue;
            }
            let mut acc = vec![0.0; len];
            for c in 0..depth {
                let x = &pa[index(c, j)];
                let y = &pb_ref[index(c, k)];
                for ((s, u), v) in acc.iter_mut().zip(x).zip(y) {
                    *s += u * v;
                }
            }
            entries[j * dim + k] = acc;
        }
    }
    if same {
        for j in 0..dim {
            for k in 0..j {
                entries[j * dim + k] = entries[k * dim + j].clone();
            }
        }
    }
    forward_two_thirds(g, Rank::Tensor(dim, dim), &entries)
}

fn expect_rank(f: &Field, rank: Rank, op: &'static str, expected: &'static str) -> Result<()> {
    if f.rank() != rank {
        return Err(Error::RankMismatch {
            op,
            got: f.rank(),
            expected,
        });
    }
    Ok(())
}

/// `(w·∇) f` for scalar or vector `f`, dealiased by the 2/3 rule.
pub fn transport(w: &Field, f: &Field) -> Result<Field> {
    if w.grid() != f.grid() {
        return Err(Error::GridMismatch);
    }
    let g = *w.grid();
    let dim = g.dim();
    expect_rank(w, Rank::Vector(dim), "transport", "vector with N components")?;
    let n = match f.rank() {
        Rank::Scalar => 1,
        Rank::Vector(n) => n,
        got => {
            return Err(Error::RankMismatch {
                op: "transport",
                got,
                expected: "scalar or vector",
            })
        }
    };
    let pw = physical_two_thirds(w);
    let pg = physical_two_thirds(&gradient(f)?);
    let mut out = Vec::with_capacity(n);
    for c in 0..n {
        let mut acc = vec![0.0; g.len()];
        for j in 0..dim {
            for ((s, a), b) in acc.iter_mut().zip(&pw[j]).zip(&pg[c * dim + j]) {
                *s += a * b;
            }
        }
        out.push(acc);
    }
    forward_two_thirds(g, f.rank(), &out)
}

/// Pointwise product of two fields, at least one of them scalar.
pub fn product(a: &Field, b: &Field) -> Result<Field> {
    if a.grid() != b.grid() {
        return Err(Error::GridMismatch);
    }
    let (s, v) = match (a.rank(), b.rank()) {
        (Rank::Scalar, _) => (a, b),
        (_, Rank::Scalar) => (b, a),
        _ => {
            return Err(Error::RankMismatch {
                op: "product",
                got: b.rank(),
                expected: "one scalar factor",
            })
        }
    };
    let ps = physical_two_thirds(s);
    let pv = physical_two_thirds(v);
    let out: Vec<Vec<f64>> = pv
        .iter()
        .map(|c| c.iter().zip(&ps[0]).map(|(x, y)| x * y).collect())
        .collect();
    forward_two_thirds(*a.grid(), v.rank(), &out)
}

/// Physical samples after truncation to the 2/3 band.
pub(crate) fn physical_two_thirds(f: &Field) -> Vec<Vec<f64>> {
    let mut t = f.clone();
    t.truncate_two_thirds();
    t.to_physical()
}

pub(crate) fn forward_two_thirds(grid: SpectralGrid, rank: Rank, values: &[Vec<f64>]) -> Result<Field> {
    let mut f = Field::from_physical(grid, rank, values)?;
    f.truncate_two_thirds();
    Ok(f)
}
