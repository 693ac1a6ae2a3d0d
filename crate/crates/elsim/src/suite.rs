//! Seeded estimate ensemble and the appendix integral sweep.

use elsim_core::arc::{norm_equivalence_report, ArcFrame};
use elsim_core::report::EstimateReport;
use elsim_core::semigroup::{semigroup_evolve, SemigroupKind};
use elsim_core::verify::{
    check_bilinear_estimates, check_functional_inequalities, check_smoothing_estimates, quad_integral_lemmas,
    BilinearInputs, BilinearVariant, ForcingRecord, FunctionalVariant,
};
use elsim_core::{Field, Result, SpectralGrid};

use crate::recipe::{generate_initial_data, DataRecipe};

/// Every id the ensemble reports, in output order.
pub const ESTIMATE_IDS: [&str; 20] = [
    "sm.es.1",
    "sm.es.2",
    "sm.es.3",
    "sm.es.4",
    "bil.e.1",
    "bil.e.2",
    "bil.e.3",
    "stab.es.1",
    "stab.es.3",
    "fr.L.",
    "l.reg.a.",
    "l.reg.2",
    "l.Hk.eq.1",
    "l.Hk.eq.2",
    "l.Hk.eq.3",
    "l.Hs.es.2.1",
    "l.Hs.es.2.2",
    "l.Hs.IC.",
    "tec.int.1",
    "tec.int.2",
];

/// Regression caps, frozen from a calibration of the default ensemble
/// (16³ and 32³ boxes of side 2π, 50 samples, default recipe) at roughly
/// twice the largest observed ratio.
pub fn frozen_cap(id: &str) -> f64 {
    match id {
        "sm.es.1" | "sm.es.3" => 1.0 + 1e-9,
        "sm.es.2" | "sm.es.4" => 1.0 + 1e-6,
        "bil.e.1" => 6e-3,
        "bil.e.2" => 2e-4,
        "bil.e.3" => 5e-3,
        "stab.es.1" => 1.2e-5,
        "stab.es.3" => 2.2e-5,
        "fr.L." => 0.85,
        "l.reg.a." => 3.6e-3,
        "l.reg.2" => 1.2e-5,
        "l.Hk.eq.1" | "l.Hk.eq.2" | "l.Hk.eq.3" | "l.Hs.es.2.1" | "l.Hs.es.2.2" | "l.Hs.IC." => 2.0,
        _ => f64::INFINITY,
    }
}

/// Length of the heat-evolved trajectories fed to the bilinear checks.
pub const SUITE_HORIZON: f64 = 0.5;
const TIME_SAMPLES: usize = 4;
const LEIBNIZ: FunctionalVariant = FunctionalVariant::FractionalLeibniz { r: 2.0, p1: 4.0, p2: 4.0, q1: 4.0, q2: 4.0 };

fn heat_path(f: &Field, times: &[f64]) -> Result<Vec<Field>> {
    times.iter().map(|&t| semigroup_evolve(f, t, SemigroupKind::Heat)).collect()
}

/// Inputs of one ensemble member.
struct Member {
    u0: Field,
    d0: Field,
    d1: Field,
    forcing: ForcingRecord,
    times: Vec<f64>,
}

fn member(recipe: &DataRecipe, grid: SpectralGrid, seed: u64) -> Result<Member> {
    let (u0, d0) = generate_initial_data(recipe, grid, 1.0, seed)?;
    let (f1, d1) = generate_initial_data(recipe, grid, 1.0, seed ^ 0x5eed_0001)?;
    let (f2, _) = generate_initial_data(recipe, grid, 1.0, seed ^ 0x5eed_0002)?;
    let ft: Vec<f64> = (0..=8).map(|i| SUITE_HORIZON * i as f64 / 8.0).collect();
    let samples = ft.iter().map(|&t| &f1.scale((3.0 * t).cos()) + &f2.scale((2.0 * t).sin())).collect();
    let times = (0..TIME_SAMPLES).map(|i| SUITE_HORIZON * i as f64 / (TIME_SAMPLES - 1) as f64).collect();
    Ok(Member { u0, d0, d1, forcing: ForcingRecord { times: ft, samples }, times })
}

fn member_reports(m: &Member, frame: &ArcFrame) -> Result<Vec<EstimateReport>> {
    let mut out = check_smoothing_estimates(&m.u0, Some(&m.forcing), 1.0, 1.0, SemigroupKind::Stokes, Some(SUITE_HORIZON))?;
    let z = heat_path(&m.u0, &m.times)?;
    let w = heat_path(&m.d1, &m.times)?;
    let theta = heat_path(&m.d0, &m.times)?;
    let pair = BilinearInputs { times: &m.times, z: &z, w: &w, theta: None };
    for v in [BilinearVariant::BilE1, BilinearVariant::BilE2, BilinearVariant::BilE3] {
        out.push(check_bilinear_estimates(&pair, 1.0, v)?);
    }
    let triple = BilinearInputs { times: &m.times, z: &theta, w: &w, theta: Some(&theta) };
    out.push(check_bilinear_estimates(&triple, 1.0, BilinearVariant::StabEs1)?);
    out.push(check_bilinear_estimates(&triple, 0.75, BilinearVariant::StabEs3)?);
    let scalars = [m.d0.clone(), m.d1.clone()];
    out.push(check_functional_inequalities(&scalars, 1.0, &LEIBNIZ)?);
    out.push(check_functional_inequalities(&scalars, 2.0, &FunctionalVariant::RegProduct { orders: vec![1, 0] })?);
    out.push(check_functional_inequalities(
        &scalars[..1],
        2.0,
        &FunctionalVariant::RegGradientProduct { orders: vec![1, 0, 0] },
    )?);
    out.extend(norm_equivalence_report(&m.d0, frame, 1.0)?);
    out.extend(norm_equivalence_report(&m.d0, frame, 0.75)?);
    Ok(out)
}

/// `samples` members seeded `seed, seed + 1, …`; every report carries its
/// frozen cap.
pub fn estimate_ensemble(recipe: &DataRecipe, grid: SpectralGrid, samples: usize, seed: u64) -> Result<Vec<EstimateReport>> {
    let frame = ArcFrame::standard(3)?;
    let mut out = Vec::new();
    for i in 0..samples {
        let m = member(recipe, grid, seed.wrapping_add(i as u64))?;
        for r in member_reports(&m, &frame)? {
            let cap = frozen_cap(&r.estimate_id);
            out.push(r.with_cap(cap));
        }
    }
    Ok(out)
}

/// Largest relative ratio change when the inputs of the homogeneous checks
/// are rescaled (`θ` alone for the trilinear one).
pub fn scale_invariance_defect(recipe: &DataRecipe, grid: SpectralGrid, seed: u64) -> Result<f64> {
    let m = member(recipe, grid, seed)?;
    let (a, b) = (37.0, 0.013);
    let z = heat_path(&m.u0, &m.times)?;
    let w = heat_path(&m.d1, &m.times)?;
    let theta = heat_path(&m.d0, &m.times)?;
    let scaled = |v: &[Field], c: f64| v.iter().map(|f| f.scale(c)).collect::<Vec<_>>();
    let (zs, ws, ts) = (scaled(&z, a), scaled(&w, b), scaled(&theta, a));
    let mut pairs = Vec::new();
    for v in [BilinearVariant::BilE1, BilinearVariant::BilE3] {
        let base = check_bilinear_estimates(&BilinearInputs { times: &m.times, z: &z, w: &w, theta: None }, 1.0, v)?;
        let r = check_bilinear_estimates(&BilinearInputs { times: &m.times, z: &zs, w: &ws, theta: None }, 1.0, v)?;
        pairs.push((base.ratio, r.ratio));
    }
    let base = BilinearInputs { times: &m.times, z: &theta, w: &w, theta: Some(&theta) };
    let moved = BilinearInputs { times: &m.times, z: &theta, w: &w, theta: Some(&ts) };
    pairs.push((
        check_bilinear_estimates(&base, 1.0, BilinearVariant::StabEs1)?.ratio,
        check_bilinear_estimates(&moved, 1.0, BilinearVariant::StabEs1)?.ratio,
    ));
    let f = [m.d0.clone(), m.d1.clone()];
    let fs = [m.d0.scale(a), m.d1.scale(b)];
    for v in [LEIBNIZ, FunctionalVariant::RegProduct { orders: vec![1, 0] }] {
        let s = if v == LEIBNIZ { 1.0 } else { 2.0 };
        pairs.push((
            check_functional_inequalities(&f, s, &v)?.ratio,
            check_functional_inequalities(&fs, s, &v)?.ratio,
        ));
    }
    let v = FunctionalVariant::RegGradientProduct { orders: vec![1, 0, 0] };
    pairs.push((
        check_functional_inequalities(&f[..1], 2.0, &v)?.ratio,
        check_functional_inequalities(&fs[..1], 2.0, &v)?.ratio,
    ));
    Ok(pairs
        .iter()
        .map(|(x, y)| if *x == 0.0 && *y == 0.0 { 0.0 } else { (x - y).abs() / x.abs() })
        .fold(0.0, f64::max))
}

/// Parameter grid of the appendix sweep.
pub const SWEEP_ALPHAS: [f64; 5] = [0.0, 0.25, 0.5, 0.75, 0.9];
pub const SWEEP_BETAS: [f64; 3] = [1.5, 2.0, 3.0];

pub fn sweep_times() -> Vec<f64> {
    (0..=12).map(|i| 10f64.powf(-3.0 + 0.5 * i as f64)).collect()
}

/// Sweep caps. The first lemma's ratio is at most
/// `B(1 − α₁, 1 − α₂)·(t/T)^{1−min α}`, which peaks at `B(0.1, 0.1) ≈ 19.71`;
/// the second peaked at 22.6 in calibration.
pub const APPENDIX_CAP_1: f64 = 20.0;
pub const APPENDIX_CAP_2: f64 = 30.0;

/// Every sweep case (both lemmas), capped.
pub fn appendix_reports() -> Result<Vec<EstimateReport>> {
    let times = sweep_times();
    let horizon = times.iter().copied().fold(0.0, f64::max);
    let mut out = Vec::new();
    for &a1 in &SWEEP_ALPHAS {
        for &a2 in &SWEEP_ALPHAS {
            for &b1 in &SWEEP_BETAS {
                for &b2 in &SWEEP_BETAS {
                    for &t in &times {
                        let (r1, r2) = quad_integral_lemmas(a1, a2, b1, b2, t, horizon)?;
                        out.push(r1.with_cap(APPENDIX_CAP_1));
                        out.push(r2.with_cap(APPENDIX_CAP_2));
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Largest `|ratio − π (t/T)^{1/2}|` of the first lemma at `α₁ = α₂ = 1/2`.
pub fn beta_oracle_defect(horizon: f64) -> Result<f64> {
    let mut worst = 0.0f64;
    for t in sweep_times().into_iter().filter(|&t| t <= horizon) {
        let (r1, _) = quad_integral_lemmas(0.5, 0.5, 2.0, 2.0, t, horizon)?;
        worst = worst.max((r1.ratio - std::f64::consts::PI * (t / horizon).sqrt()).abs());
    }
    Ok(worst)
}
