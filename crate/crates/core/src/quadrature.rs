//! One-dimensional quadrature: Gauss rules for smooth integrands, adaptive
//! Gauss-Kronrod for endpoint-singular ones, and composite rules for sampled
//! time series.

use std::f64::consts::PI;

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let p = if n == 0 { 1.0 } else if n == 1 { z } else { p1 };
            let pm = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (z * p - pm) / (z * z - 1.0);
            let dz = p / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    (x, w)
}

/// Fixed-order Gauss-Legendre on `[a, b]` split into `panels` pieces.
pub fn gauss_panels(f: impl Fn(f64) -> f64, a: f64, b: f64, panels: usize, order: usize) -> f64 {
    let (x, w) = gauss_legendre(order);
    let h = (b - a) / panels as f64;
    let mut total = 0.0;
    for p in 0..panels {
        let lo = a + p as f64 * h;
        let mid = lo + 0.5 * h;
        let mut acc = 0.0;
        for (xi, wi) in x.iter().zip(&w) {
            acc += wi * f(mid + 0.5 * h * xi);
        }
        total += 0.5 * h * acc;
    }
    total
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gk15(f: &dyn Fn(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for j in 0..7 {
        let dx = h * XGK[j];
        let s = f(c - dx) + f(c + dx);
        kronrod += WGK[j] * s;
        if j % 2 == 1 {
            gauss += WG[j / 2] * s;
        }
    }
    (kronrod * h, ((kronrod - gauss) * h).abs())
}

/// Adaptive Gauss-Kronrod (7/15) with a global error target; returns the
/// integral and the accumulated error estimate.
pub fn adaptive_gk15(f: impl Fn(f64) -> f64, a: f64, b: f64, abs_tol: f64, rel_tol: f64) -> (f64, f64) {
    let f: &dyn Fn(f64) -> f64 = &f;
    let (v, e) = gk15(f, a, b);
    let mut intervals = vec![(a, b, v, e)];
    for _ in 0..2000 {
        let total: f64 = intervals.iter().map(|iv| iv.2).sum();
        let err: f64 = intervals.iter().map(|iv| iv.3).sum();
        if err <= abs_tol.max(rel_tol * total.abs()) {
            break;
        }
        let (idx, _) = intervals
            .iter()
            .enumerate()
            .fold((0, -1.0), |best, (i, iv)| if iv.3 > best.1 { (i, iv.3) } else { best });
        let (lo, hi, _, _) = intervals.swap_remove(idx);
        let mid = 0.5 * (lo + hi);
        let (v1, e1) = gk15(f, lo, mid);
        let (v2, e2) = gk15(f, mid, hi);
        intervals.push((lo, mid, v1, e1));
        intervals.push((mid, hi, v2, e2));
    }
    // fixed summation order for reproducibility
    intervals.sort_by(|x, y| x.0.total_cmp(&y.0));
    (
        intervals.iter().map(|iv| iv.2).sum(),
        intervals.iter().map(|iv| iv.3).sum(),
    )
}

/// Composite trapezoid over possibly non-uniform samples.
pub fn trapezoid(t: &[f64], y: &[f64]) -> f64 {
    t.windows(2)
        .zip(y.windows(2))
        .map(|(tw, yw)| 0.5 * (tw[1] - tw[0]) * (yw[0] + yw[1]))
        .sum()
}

/// Running trapezoid integral, `out[n] = ∫_{t_0}^{t_n}`.
pub fn cumulative_trapezoid(t: &[f64], y: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(t.len());
    let mut acc = 0.0;
    out.push(0.0);
    for i in 1..t.len() {
        acc += 0.5 * (t[i] - t[i - 1]) * (y[i] + y[i - 1]);
        out.push(acc);
    }
    out
}

/// Integral over `[t_i, t_{i+1}]` of the parabola through the three samples
/// at `t0 < t1 < t2`, for the interval starting at `t[from]`.
fn parabola_piece(t: [f64; 3], y: [f64; 3], from: usize) -> f64 {
    let (a, b) = (t[from], t[from + 1]);
    // Lagrange basis integrated exactly via 3-point Gauss (degree 5 exact)
    let (x, w) = ([-0.774_596_669_241_483_4, 0.0, 0.774_596_669_241_483_4], [5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0]);
    let mut acc = 0.0;
    for (xi, wi) in x.iter().zip(w) {
        let s = 0.5 * (a + b) + 0.5 * (b - a) * xi;
        let l0 = (s - t[1]) * (s - t[2]) / ((t[0] - t[1]) * (t[0] - t[2]));
        let l1 = (s - t[0]) * (s - t[2]) / ((t[1] - t[0]) * (t[1] - t[2]));
        let l2 = (s - t[0]) * (s - t[1]) / ((t[2] - t[0]) * (t[2] - t[1]));
        acc += wi * (y[0] * l0 + y[1] * l1 + y[2] * l2);
    }
    0.5 * (b - a) * acc
}

/// Running Simpson integral. Even-indexed entries sum Simpson panels; an
/// odd entry adds one interval integrated on the parabola through that
/// interval and its right neighbour (left neighbour at the end).
pub fn cumulative_simpson(t: &[f64], y: &[f64]) -> Vec<f64> {
    let n = t.len();
    if n < 3 {
        return cumulative_trapezoid(t, y);
    }
    let tri = |i: usize| ([t[i], t[i + 1], t[i + 2]], [y[i], y[i + 1], y[i + 2]]);
    let mut out = vec![0.0; n];
    let mut i = 0;
    while i + 2 < n {
        let (tt, yy) = tri(i);
        out[i + 1] = out[i] + parabola_piece(tt, yy, 0);
        out[i + 2] = out[i + 1] + parabola_piece(tt, yy, 1);
        i += 2;
    }
    if i + 1 < n {
        let (tt, yy) = tri(i - 1);
        out[i + 1] = out[i] + parabola_piece(tt, yy, 1);
    }
    out
}

pub fn simpson(t: &[f64], y: &[f64]) -> f64 {
    *cumulative_simpson(t, y).last().unwrap_or(&0.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_rules_are_exact_on_polynomials() {
        for n in 1..12 {
            let (x, w) = gauss_legendre(n);
            for deg in 0..(2 * n) {
                let q: f64 = x.iter().zip(&w).map(|(xi, wi)| wi * xi.powi(deg as i32)).sum();
                let exact = if deg % 2 == 1 { 0.0 } else { 2.0 / (deg as f64 + 1.0) };
                assert!((q - exact).abs() < 1e-14, "n={n} deg={deg}");
            }
        }
    }

    #[test]
    fn kronrod_handles_smooth_and_singular() {
        let (v, _) = adaptive_gk15(|x| x.exp(), 0.0, 1.0, 1e-14, 1e-14);
        assert!((v - (1f64.exp() - 1.0)).abs() < 1e-14);
        let (v, _) = adaptive_gk15(|x| 1.0 / x.sqrt(), 0.0, 1.0, 1e-10, 1e-10);
        assert!((v - 2.0).abs() < 1e-8);
    }

    #[test]
    fn simpson_is_exact_on_cubics() {
        let t: Vec<f64> = (0..8).map(|i| (i as f64 * 0.3).powf(1.2)).collect();
        let y: Vec<f64> = t.iter().map(|x| x * x - 2.0 * x + 1.0).collect();
        let exact = |x: f64| x * x * x / 3.0 - x * x + x;
        let c = cumulative_simpson(&t, &y);
        for (i, ci) in c.iter().enumerate() {
            assert!((ci - exact(t[i]) + exact(t[0])).abs() < 1e-12);
        }
        // uniform cubic on even panels
        let t: Vec<f64> = (0..9).map(|i| i as f64 * 0.25).collect();
        let y: Vec<f64> = t.iter().map(|x| x * x * x).collect();
        assert!((simpson(&t, &y) - 2f64.powi(4) / 4.0).abs() < 1e-13);
    }

    #[test]
    fn trapezoid_linear() {
        let t = [0.0, 0.5, 2.0];
        let y = [1.0, 2.0, 5.0];
        assert!((trapezoid(&t, &y) - 6.0).abs() < 1e-15);
        assert_eq!(cumulative_trapezoid(&t, &y), vec![0.0, 0.75, 6.0]);
    }
}
