//! N-dimensional transforms between coefficient arrays and physical samples.
//!
//! Two real fields are always transformed together through one complex FFT
//! (`a + i b`), which halves the transform count for the component-heavy
//! nonlinear terms. Forward transforms are normalized so that the stored
//! coefficients are Fourier-series coefficients: `f(x) = Σ f̂(k) e^{ik·x}`.

use std::cell::RefCell;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftDirection, FftPlanner};

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
    static WORK: RefCell<Vec<Complex64>> = const { RefCell::new(Vec::new()) };
}

/// Runs `f` on a zeroed per-thread buffer of length `len`; large fresh
/// allocations are dominated by page faults otherwise.
fn with_work<R>(len: usize, f: impl FnOnce(&mut [Complex64]) -> R) -> R {
    let mut buf = WORK.with(|w| std::mem::take(&mut *w.borrow_mut()));
    buf.clear();
    buf.resize(len, Complex64::new(0.0, 0.0));
    let r = f(&mut buf);
    WORK.with(|w| {
        let mut slot = w.borrow_mut();
        if slot.capacity() < buf.capacity() {
            *slot = buf;
        }
    });
    r
}

fn plan(n: usize, direction: FftDirection) -> Arc<dyn Fft<f64>> {
    PLANNER.with(|p| p.borrow_mut().plan_fft(n, direction))
}


const BATCH: usize = 16;

fn digits_in(mut idx: usize, count: usize, n: usize, mask: &[bool]) -> bool {
    for _ in 0..count {
        if !mask[idx % n] {
            return false;
        }
        idx /= n;
    }
    true
}

/// Transform with line pruning. For an inverse transform `mask` marks the
/// slots that may be nonzero on input (zero padding), so lines whose
/// untransformed indices fall outside it are skipped. For a forward
/// transform it marks the slots that will be read on output (truncation),
/// so lines whose already transformed indices fall outside it are skipped.
/// Axes are always processed last to first.
pub(crate) fn fft_nd_masked(
    data: &mut [Complex64],
    n: usize,
    dim: usize,
    direction: FftDirection,
    mask: Option<&[bool]>,
) {
    debug_assert_eq!(data.len(), n.pow(dim as u32));
    let fft = plan(n, direction);
    let mut scratch = vec![Complex64::new(0.0, 0.0); fft.get_inplace_scratch_len()];
    let mut buf = vec![Complex64::new(0.0, 0.0); BATCH * n];
    let mut cols: Vec<usize> = Vec::with_capacity(n.pow(dim as u32 - 1));
    for axis in (0..dim).rev() {
        let stride = n.pow((dim - 1 - axis) as u32);
        let block = n * stride;
        let inverse = direction == FftDirection::Inverse;
        // columns of a block index the axes after `axis`
        cols.clear();
        for i in 0..stride {
            let keep = match (mask, inverse) {
                (Some(m), false) => digits_in(i, dim - 1 - axis, n, m),
                _ => true,
            };
            if keep {
                cols.push(i);
            }
        }
        for (o, chunk) in data.chunks_mut(block).enumerate() {
            if let (Some(m), true) = (mask, inverse) {
                if !digits_in(o, axis, n, m) {
                    continue;
                }
            }
            if stride == 1 {
                fft.process_with_scratch(chunk, &mut scratch);
                continue;
            }
            for batch in cols.chunks(BATCH) {
                let b = batch.len();
                for j in 0..n {
                    let row = &chunk[j * stride..(j + 1) * stride];
                    for (c, &i) in batch.iter().enumerate() {
                        buf[c * n + j] = row[i];
                    }
                }
                fft.process_with_scratch(&mut buf[..b * n], &mut scratch);
                for j in 0..n {
                    let row = &mut chunk[j * stride..(j + 1) * stride];
                    for (c, &i) in batch.iter().enumerate() {
                        row[i] = buf[c * n + j];
                    }
                }
            }
        }
    }
}

fn embed_mask(n: usize, p: usize) -> Vec<bool> {
    let mut m = vec![false; p];
    for s in axis_map(n, p).into_iter().flatten() {
        m[s] = true;
    }
    m
}

/// Maps each coarse slot of one axis to its slot on a grid with `p` points,
/// dropping the coarse Nyquist slot.
fn axis_map(n: usize, p: usize) -> Vec<Option<usize>> {
    (0..n)
        .map(|j| {
            if j == n / 2 {
                None
            } else if j < n / 2 {
                Some(j)
            } else {
                Some(p - (n - j))
            }
        })
        .collect()
}

/// Visits every retained slot as (coarse flat index, fine flat index, fine
/// flat index of the mirrored mode).
fn for_each_embedded(n: usize, p: usize, dim: usize, mut f: impl FnMut(usize, usize, usize)) {
    let map: Vec<(usize, usize, usize)> = axis_map(n, p)
        .into_iter()
        .enumerate()
        .filter_map(|(j, m)| m.map(|s| (j, s, (p - s) % p)))
        .collect();
    match dim {
        2 => {
            for &(a, fa, ma) in &map {
                for &(b, fb, mb) in &map {
                    f(a * n + b, fa * p + fb, ma * p + mb);
                }
            }
        }
        3 => {
            for &(a, fa, ma) in &map {
                for &(b, fb, mb) in &map {
                    let c0 = (a * n + b) * n;
                    let f0 = (fa * p + fb) * p;
                    let m0 = (ma * p + mb) * p;
                    for &(c, fc, mc) in &map {
                        f(c0 + c, f0 + fc, m0 + mc);
                    }
                }
            }
        }
        _ => unreachable!("grids are 2-D or 3-D"),
    }
}

/// Evaluates real fields given by coefficients on an `n`-grid at the points
/// of a `p`-grid (`p >= n`, zero padding when larger).
pub(crate) fn to_physical(coeffs: &[&[Complex64]], n: usize, p: usize, dim: usize) -> Vec<Vec<f64>> {
    let len = p.pow(dim as u32);
    let mask = (p > n).then(|| embed_mask(n, p));
    let mut out = Vec::with_capacity(coeffs.len());
    with_work(len, |z| {
        for pair in coeffs.chunks(2) {
            z.iter_mut().for_each(|v| *v = Complex64::new(0.0, 0.0));
            let a = pair[0];
            let b = pair.get(1).copied();
            for_each_embedded(n, p, dim, |c, f, _| {
                let mut v = a[c];
                if let Some(b) = b {
                    v += Complex64::new(-b[c].im, b[c].re);
                }
                z[f] = v;
            });
            fft_nd_masked(z, p, dim, FftDirection::Inverse, mask.as_deref());
            out.push(z.iter().map(|v| v.re).collect());
            if b.is_some() {
                out.push(z.iter().map(|v| v.im).collect());
            }
        }
    });
    out
}

/// Coefficients on an `n`-grid of real fields sampled on a `p`-grid. Modes
/// outside the `n`-grid and the `n`-grid Nyquist slots are discarded.
pub(crate) fn from_physical(values: &[&[f64]], p: usize, n: usize, dim: usize) -> Vec<Vec<Complex64>> {
    let len = p.pow(dim as u32);
    let coarse = n.pow(dim as u32);
    let scale = 1.0 / len as f64;
    let mask = (p > n).then(|| embed_mask(n, p));
    let mut out = Vec::with_capacity(values.len());
    with_work(len, |z| {
        for pair in values.chunks(2) {
            let a = pair[0];
            match pair.get(1) {
                Some(b) => {
                    for ((zv, &x), &y) in z.iter_mut().zip(a.iter()).zip(b.iter()) {
                        *zv = Complex64::new(x, y);
                    }
                }
                None => {
                    for (zv, &x) in z.iter_mut().zip(a.iter()) {
                        *zv = Complex64::new(x, 0.0);
                    }
                }
            }
            fft_nd_masked(z, p, dim, FftDirection::Forward, mask.as_deref());
            let mut ca = vec![Complex64::new(0.0, 0.0); coarse];
            if pair.len() == 2 {
                let mut cb = vec![Complex64::new(0.0, 0.0); coarse];
                for_each_embedded(n, p, dim, |c, f, m| {
                    let zk = z[f];
                    let zm = z[m].conj();
                    ca[c] = (zk + zm) * (0.5 * scale);
                    let d = (zk - zm) * (0.5 * scale);
                    cb[c] = Complex64::new(d.im, -d.re);
                });
                out.push(ca);
                out.push(cb);
            } else {
                for_each_embedded(n, p, dim, |c, f, m| {
                    let zk = z[f];
                    let zm = z[m].conj();
                    ca[c] = (zk + zm) * (0.5 * scale);
                });
                out.push(ca);
            }
        }
    });
    out
}

/// Copies coefficients between grids of different resolution over the same
/// box: zero padding when refining, truncation when coarsening. Nyquist
/// slots of both grids are left at zero.
pub(crate) fn resample(coeffs: &[Complex64], n: usize, p: usize, dim: usize) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); p.pow(dim as u32)];
    if p >= n {
        for_each_embedded(n, p, dim, |c, f, _| out[f] = coeffs[c]);
    } else {
        for_each_embedded(p, n, dim, |c, f, _| out[c] = coeffs[f]);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn sample(n: usize, dim: usize, f: impl Fn([f64; 3]) -> f64) -> Vec<f64> {
        let len = n.pow(dim as u32);
        let h = 2.0 * PI / n as f64;
        (0..len)
            .map(|i| {
                let (a, b, c) = if dim == 2 {
                    (i / n, i % n, 0)
                } else {
                    (i / (n * n), (i / n) % n, i % n)
                };
                f([a as f64 * h, b as f64 * h, c as f64 * h])
            })
            .collect()
    }

    #[test]
    fn sine_has_expected_coefficients() {
        let n = 8;
        let s = sample(n, 3, |x| x[0].sin());
        let c = from_physical(&[&s], n, n, 3);
        // mode +1 on axis 0 sits at slot (1,0,0) = 64
        assert!((c[0][64] - Complex64::new(0.0, -0.5)).norm() < 1e-15);
        assert!((c[0][7 * 64] - Complex64::new(0.0, 0.5)).norm() < 1e-15);
        let total: f64 = c[0].iter().map(|v| v.norm_sqr()).sum();
        assert!((total - 0.5).abs() < 1e-14);
    }

    #[test]
    fn pairs_round_trip_through_padding() {
        let n = 8;
        let a = sample(n, 3, |x| (x[0] + 2.0 * x[1]).cos() + 0.3 * x[2].sin());
        let b = sample(n, 3, |x| (x[1] - x[2]).sin() * x[0].cos());
        let c = sample(n, 3, |x| 1.5 + (3.0 * x[2]).cos());
        let coeffs = from_physical(&[&a, &b, &c], n, n, 3);
        let refs: Vec<&[Complex64]> = coeffs.iter().map(|v| v.as_slice()).collect();
        let fine = to_physical(&refs, n, 16, 3);
        let back = from_physical(&[&fine[0], &fine[1], &fine[2]], 16, n, 3);
        for (x, y) in coeffs.iter().zip(back.iter()) {
            for (u, v) in x.iter().zip(y.iter()) {
                assert!((u - v).norm() < 1e-14);
            }
        }
        let same = to_physical(&refs, n, n, 3);
        for (x, y) in same[1].iter().zip(b.iter()) {
            assert!((x - y).abs() < 1e-13);
        }
    }

    #[test]
    fn two_dimensional_transform() {
        let n = 6;
        let a = sample(n, 2, |x| (x[0] - x[1]).sin());
        let c = from_physical(&[&a], n, n, 2);
        let refs: Vec<&[Complex64]> = c.iter().map(|v| v.as_slice()).collect();
        let back = to_physical(&refs, n, n, 2);
        for (x, y) in back[0].iter().zip(a.iter()) {
            assert!((x - y).abs() < 1e-14);
        }
    }
}
