use elsim_core::arc::{arc_embed, arc_reconstruct, constraint_residuals, ArcFrame};
use elsim_core::calculus::{apply_multiplier, differentiate, leray_project, partial, Derivative};
use elsim_core::grid::norm_sq;
use elsim_core::norms::{gagliardo_seminorm_oracle, homogeneous_seminorm, l2};
use elsim_core::semigroup::{pressure_gradient, semigroup_evolve, SemigroupKind};
use elsim_core::verify::{
    check_bilinear_estimates, check_functional_inequalities, decay_analysis, BilinearInputs, BilinearVariant,
    quad_integral_lemmas, DecayLaw, FunctionalVariant,
};
use elsim_core::{make_grid, Field, Rank, SpectralGrid};
use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

/// Sum of a few random plane waves with wavenumbers in `[-band, band]`.
fn random_field(g: SpectralGrid, rank: Rank, band: i64, seed: u64) -> Field {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dim = g.dim();
    let n = rank.components();
    let waves: Vec<([f64; 3], f64, f64, usize)> = (0..6)
        .map(|_| {
            let mut k = [0.0; 3];
            for x in k.iter_mut().take(dim) {
                *x = rng.gen_range(-band..=band) as f64;
            }
            (k, rng.gen_range(-1.0..1.0), rng.gen_range(0.0..2.0 * PI), rng.gen_range(0..n))
        })
        .collect();
    Field::from_fn(g, rank, |x| {
        let mut out = vec![0.0; n];
        for (k, a, phi, c) in &waves {
            out[*c] += a * (k[0] * x[0] + k[1] * x[1] + k[2] * x[2] + phi).cos();
        }
        out
    })
}

fn max_diff(a: &Field, b: &Field) -> f64 {
    (a - b).max_coeff()
}

fn grid3() -> SpectralGrid {
    make_grid(3, 8, 2.0 * PI).unwrap()
}

fn fast() -> ProptestConfig {
    ProptestConfig::with_cases(24)
}

proptest! {
    #![proptest_config(fast())]

    #[test]
    fn leray_is_idempotent_and_solenoidal(seed in any::<u64>()) {
        let f = random_field(grid3(), Rank::Vector(3), 2, seed);
        let p = leray_project(&f).unwrap();
        let pp = leray_project(&p).unwrap();
        prop_assert!(max_diff(&p, &pp) <= 1e-12 * f.max_coeff().max(1e-300));
        let div = differentiate(&p, Derivative::Divergence).unwrap();
        prop_assert!(div.max_coeff() <= 1e-12);
    }

    #[test]
    fn semigroup_law(seed in any::<u64>(), t in 0.0f64..2.0, s in 0.0f64..2.0, stokes in any::<bool>()) {
        let f = random_field(grid3(), Rank::Vector(3), 2, seed);
        let kind = if stokes { SemigroupKind::Stokes } else { SemigroupKind::Heat };
        let once = semigroup_evolve(&f, t + s, kind).unwrap();
        let twice = semigroup_evolve(&semigroup_evolve(&f, s, kind).unwrap(), t, kind).unwrap();
        prop_assert!(max_diff(&once, &twice) <= 1e-13);
        let zero = semigroup_evolve(&f, 0.0, SemigroupKind::Heat).unwrap();
        prop_assert_eq!(zero, f);
    }

    #[test]
    fn parseval(seed in any::<u64>(), n in 1usize..4) {
        let g = grid3();
        let f = random_field(g, Rank::Vector(n), 3, seed);
        let phys = f.to_physical();
        let sum: f64 = phys.iter().flat_map(|c| c.iter()).map(|v| v * v).sum();
        let lattice = (sum * g.cell_volume()).sqrt();
        prop_assert!((l2(&f) - lattice).abs() <= 1e-12 * lattice.max(1.0));
    }

    #[test]
    fn derivatives_commute_with_multipliers(seed in any::<u64>()) {
        let f = random_field(grid3(), Rank::Scalar, 2, seed);
        let xy = partial(&partial(&f, 0), 1);
        let yx = partial(&partial(&f, 1), 0);
        prop_assert!(max_diff(&xy, &yx) <= 1e-13);
        let mixed = differentiate(&f, Derivative::Partial([1, 1, 0])).unwrap();
        prop_assert!(max_diff(&xy, &mixed) <= 1e-13);
        let lap = differentiate(&f, Derivative::Laplacian).unwrap();
        let sym = apply_multiplier(&f, |k| -norm_sq(&k), None).unwrap();
        prop_assert!(max_diff(&lap, &sym) <= 1e-13);
        let smooth_then_dx = partial(&apply_multiplier(&f, |k| 1.0 / (1.0 + norm_sq(&k)), None).unwrap(), 2);
        let dx_then_smooth = apply_multiplier(&partial(&f, 2), |k| 1.0 / (1.0 + norm_sq(&k)), None).unwrap();
        prop_assert!(max_diff(&smooth_then_dx, &dx_then_smooth) <= 1e-13);
    }

    #[test]
    fn heat_maximum_principle(seed in any::<u64>(), t in 0.01f64..3.0) {
        let g = make_grid(2, 8, 2.0 * PI).unwrap();
        let f = random_field(g, Rank::Scalar, 2, seed);
        let fine = |h: &Field| h.to_physical_on(256)[0].iter().fold(f64::NEG_INFINITY, |m, &v| m.max(v));
        let evolved = semigroup_evolve(&f, t, SemigroupKind::Heat).unwrap();
        let (before, after) = (fine(&f), fine(&evolved));
        let spread = f.max_coeff().max(1e-12);
        prop_assert!(after <= before + 1e-2 * spread, "{} > {}", after, before);
        let low = |h: &Field| h.to_physical_on(256)[0].iter().fold(f64::INFINITY, |m, &v| m.min(v));
        prop_assert!(low(&evolved) >= low(&f) - 1e-2 * spread);
    }

    #[test]
    fn pressure_gradient_is_curl_free(seed in any::<u64>()) {
        let f = random_field(grid3(), Rank::Vector(3), 2, seed);
        let gp = pressure_gradient(&f).unwrap();
        for i in 0..3 {
            for j in 0..i {
                let a = partial(&gp.component_field(j), i);
                let b = partial(&gp.component_field(i), j);
                prop_assert!(max_diff(&a, &b) <= 1e-12);
            }
        }
        let rest = &f - &gp;
        prop_assert!(differentiate(&rest, Derivative::Divergence).unwrap().max_coeff() <= 1e-12);
    }

    #[test]
    fn arc_round_trip(seed in any::<u64>(), amp in 0.01f64..0.5) {
        let g = make_grid(3, 16, 2.0 * PI).unwrap();
        let raw = random_field(g, Rank::Scalar, 1, seed);
        let d = raw.scale(amp / 6.0);
        let frame = ArcFrame::standard(3).unwrap();
        let v = arc_embed(&d, &frame).unwrap();
        let back = arc_reconstruct(&v, &frame, 1e-8).unwrap();
        prop_assert!(max_diff(&back, &d) <= 1e-9, "{}", max_diff(&back, &d));
    }

    #[test]
    fn residuals_invariant_under_rotation(seed in any::<u64>(), a in 0.0f64..PI, b in 0.0f64..PI, c in 0.0f64..PI) {
        let g = grid3();
        let v = random_field(g, Rank::Vector(3), 2, seed);
        let frame = ArcFrame::standard(3).unwrap();
        let q = rotation(a, b, c);
        let rot = |x: &[f64]| -> Vec<f64> { (0..3).map(|i| (0..3).map(|j| q[i][j] * x[j]).sum()).collect() };
        let rframe = ArcFrame::new(rot(frame.eta()), rot(frame.omega())).unwrap();
        let comps: Vec<Vec<Complex64>> = (0..3)
            .map(|i| {
                (0..g.len())
                    .map(|m| (0..3).map(|j| v.component(j)[m] * q[i][j]).sum())
                    .collect()
            })
            .collect();
        let rv = Field::from_coeffs(g, Rank::Vector(3), comps).unwrap();
        let (u1, p1) = constraint_residuals(&v, &frame).unwrap();
        let (u2, p2) = constraint_residuals(&rv, &rframe).unwrap();
        prop_assert!((u1 - u2).abs() <= 1e-12 * u1.max(1.0));
        prop_assert!((p1 - p2).abs() <= 1e-12 * p1.max(1.0));
    }

    #[test]
    fn gagliardo_is_absolutely_homogeneous(seed in any::<u64>(), a in -20.0f64..20.0) {
        prop_assume!(a.abs() > 1e-3);
        let f = random_field(grid3(), Rank::Scalar, 2, seed);
        let base = gagliardo_seminorm_oracle(&f, 0.5, 400, seed, 1.0).unwrap();
        let scaled = gagliardo_seminorm_oracle(&f.scale(a), 0.5, 400, seed, 1.0).unwrap();
        prop_assert!((scaled.value - a.abs() * base.value).abs() <= 1e-12 * scaled.value.max(1e-300));
    }

    #[test]
    fn decay_fit_recovers_power_law(p in -3.0f64..-0.05, c in 0.01f64..100.0) {
        let times: Vec<f64> = (0..40).map(|i| 1.0 + 0.5 * i as f64).collect();
        let values: Vec<f64> = times.iter().map(|t| c * t.powf(p)).collect();
        let r = decay_analysis(&times, &values, (1.0, 20.5), DecayLaw::PurePower(p)).unwrap();
        prop_assert!((r.fit.exponent - p).abs() <= 1e-10);
    }

    #[test]
    fn leibniz_ratio_is_scale_invariant(seed in any::<u64>(), a in 0.05f64..20.0, b in 0.05f64..20.0) {
        let g = grid3();
        let f = random_field(g, Rank::Scalar, 2, seed);
        let h = random_field(g, Rank::Scalar, 2, seed ^ 0x9e37);
        prop_assume!(!f.is_zero() && !h.is_zero());
        let v = FunctionalVariant::FractionalLeibniz { r: 2.0, p1: 4.0, p2: 4.0, q1: 4.0, q2: 4.0 };
        let base = check_functional_inequalities(&[f.clone(), h.clone()], 1.0, &v).unwrap();
        let r = check_functional_inequalities(&[f.scale(a), h.scale(b)], 1.0, &v).unwrap();
        prop_assert!((r.ratio - base.ratio).abs() <= 1e-10 * base.ratio);
    }

    #[test]
    fn reg_product_ratio_is_scale_invariant(seed in any::<u64>(), o1 in 0u32..2, o2 in 0u32..2, a in 0.05f64..20.0) {
        let g = grid3();
        let f = random_field(g, Rank::Scalar, 2, seed);
        let h = random_field(g, Rank::Scalar, 2, seed.wrapping_add(7));
        prop_assume!(!f.is_zero() && !h.is_zero());
        let v = FunctionalVariant::RegProduct { orders: vec![o1, o2] };
        let base = check_functional_inequalities(&[f.clone(), h.clone()], 3.0, &v).unwrap();
        let r = check_functional_inequalities(&[f.scale(a), h.clone()], 3.0, &v).unwrap();
        prop_assert!((r.ratio - base.ratio).abs() <= 1e-10 * base.ratio.max(1e-300));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn bilinear_ratios_are_scale_invariant(seed in any::<u64>(), a in 0.05f64..20.0, b in 0.05f64..20.0) {
        let g = grid3();
        let times: Vec<f64> = (0..=4).map(|i| i as f64 * 0.25).collect();
        let z0 = random_field(g, Rank::Scalar, 2, seed);
        let w0 = random_field(g, Rank::Scalar, 2, seed ^ 1);
        prop_assume!(!z0.is_zero() && !w0.is_zero());
        let z: Vec<Field> = times.iter().map(|&t| semigroup_evolve(&z0, t, SemigroupKind::Heat).unwrap()).collect();
        let w: Vec<Field> = times.iter().map(|&t| semigroup_evolve(&w0, t, SemigroupKind::Heat).unwrap()).collect();
        let zs: Vec<Field> = z.iter().map(|f| f.scale(a)).collect();
        let ws: Vec<Field> = w.iter().map(|f| f.scale(b)).collect();
        for v in [BilinearVariant::BilE1, BilinearVariant::BilE3] {
            let base = check_bilinear_estimates(&BilinearInputs { times: &times, z: &z, w: &w, theta: None }, 1.0, v).unwrap();
            let r = check_bilinear_estimates(&BilinearInputs { times: &times, z: &zs, w: &ws, theta: None }, 1.0, v).unwrap();
            prop_assert!((r.ratio - base.ratio).abs() <= 1e-10 * base.ratio, "{:?}", v);
        }
        // the Θ norm is 1-homogeneous, so scaling the third factor leaves the ratio fixed
        let th: Vec<Field> = w.iter().map(|f| f.scale(b)).collect();
        let base = check_bilinear_estimates(&BilinearInputs { times: &times, z: &z, w: &w, theta: Some(&w) }, 1.0, BilinearVariant::StabEs1).unwrap();
        let r = check_bilinear_estimates(&BilinearInputs { times: &times, z: &z, w: &w, theta: Some(&th) }, 1.0, BilinearVariant::StabEs1).unwrap();
        prop_assert!((r.ratio - base.ratio).abs() <= 1e-10 * base.ratio);
    }
}

fn rotation(a: f64, b: f64, c: f64) -> [[f64; 3]; 3] {
    let rz = |t: f64| [[t.cos(), -t.sin(), 0.0], [t.sin(), t.cos(), 0.0], [0.0, 0.0, 1.0]];
    let rx = |t: f64| [[1.0, 0.0, 0.0], [0.0, t.cos(), -t.sin()], [0.0, t.sin(), t.cos()]];
    let mul = |p: [[f64; 3]; 3], q: [[f64; 3]; 3]| {
        let mut o = [[0.0; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                o[i][j] = (0..3).map(|k| p[i][k] * q[k][j]).sum();
            }
        }
        o
    };
    mul(mul(rz(a), rx(b)), rz(c))
}

/// Single modes `sin(k x₁)` on `[−π, π]³` with `s = 1/2`: the truncated-box
/// oracle over the full-space multiplier seminorm is `sqrt(I(k)/k)` with
/// `I(k) = ∫_box 2(1 − cos k h₁)/|h|⁴ dh`, tabulated by adaptive cubature.
#[test]
fn gagliardo_single_mode_band() {
    let g = grid3();
    let frozen = [(1.0, 3.599533444218722), (2.0, 4.059449532770665), (3.0, 4.18353560190272)];
    for (k, expect) in frozen {
        let f = Field::scalar_from_fn(g, |x| (k * x[0]).sin());
        let est = gagliardo_seminorm_oracle(&f, 0.5, 400_000, 11, 0.01).unwrap();
        let m = homogeneous_seminorm(&f, 0.5);
        let ratio = est.value / m;
        let tol = 4.0 * est.std_error / m + 1e-3 * expect;
        assert!((ratio - expect).abs() <= tol, "k = {k}: {ratio} vs {expect} ± {tol}");
        assert!(!est.underresolved);
        // the full-space limit is sqrt(2) π
        assert!(ratio < 2f64.sqrt() * PI);
    }
}

proptest! {
    #![proptest_config(fast())]

    #[test]
    fn first_time_integral_is_a_beta_function(a1 in 0.0f64..0.95, a2 in 0.0f64..0.95, t in 1e-3f64..1e3) {
        let (r1, _) = quad_integral_lemmas(a1, a2, 2.0, 2.0, t, 1e3).unwrap();
        let want = statrs::function::beta::beta(1.0 - a1, 1.0 - a2) * t.powf(1.0 - a1 - a2);
        prop_assert!((r1.lhs - want).abs() <= 1e-8 * want, "{} {}", r1.lhs, want);
    }
}
