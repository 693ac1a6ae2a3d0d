//! Experiment pipelines: generate, solve, monitor, verify, fit.

use elsim_core::arc::{arc_embed, arc_identity_check, constraint_residuals, ArcFrame};
use elsim_core::norms::sup_norm;
use elsim_core::solver::{
    march_observe, march_solve, picard_solve, trajectory_norms, NormSeries, SolverConfig, SystemKind,
};
use elsim_core::verify::{decay_analysis, DecayAnalysis, DecayLaw};
use elsim_core::{Error, Field};

use crate::config::{ExperimentKind, RunConfig};
use crate::error::{stage, AppError};
use crate::output::{num, Artifacts, Check, Table};
use crate::recipe::generate_initial_data;
use crate::suite::{
    appendix_reports, beta_oracle_defect, estimate_ensemble, scale_invariance_defect, ESTIMATE_IDS,
};

fn norm_table(series: &NormSeries) -> Table {
    Table::numeric("norms", &NormSeries::COLUMNS, (0..series.len()).map(|i| series.row(i).to_vec()))
}

fn push_summary(a: &mut Artifacts, key: &str, value: impl ToString) {
    a.summary.push((key.to_string(), value.to_string()));
}

pub fn run_experiment(cfg: &RunConfig) -> Result<Artifacts, AppError> {
    let mut a = Artifacts::default();
    execute(cfg, &mut a)?;
    Ok(a)
}

/// Like [`run_experiment`], but whatever was produced before a failing
/// stage stays in `a`. Nothing is computed for an invalid configuration.
pub fn execute(cfg: &RunConfig, a: &mut Artifacts) -> Result<(), AppError> {
    cfg.validate()?;
    a.config = cfg.to_text();
    push_summary(a, "experiment", cfg.experiment);
    push_summary(a, "seed", cfg.seed);
    match cfg.experiment {
        ExperimentKind::LocalExistence => local_existence(cfg, a),
        ExperimentKind::GlobalDecay => global_decay(cfg, a),
        ExperimentKind::FullVsReduced => full_vs_reduced(cfg, a),
        ExperimentKind::EstimateSuite => estimate_suite(cfg, a),
        ExperimentKind::AppendixSuite => appendix_suite(cfg, a),
    }
}

fn initial_data(cfg: &RunConfig) -> Result<(Field, Field), AppError> {
    generate_initial_data(&cfg.recipe, cfg.grid()?, cfg.solver.s, cfg.seed).map_err(stage("initial data"))
}

fn local_existence(cfg: &RunConfig, a: &mut Artifacts) -> Result<(), AppError> {
    let (u0, d0) = initial_data(cfg)?;
    let (traj, diag) = picard_solve(&u0, &d0, &cfg.solver).map_err(stage("picard iteration"))?;
    let norms = trajectory_norms(&traj, &cfg.solver).map_err(stage("norms"))?;
    a.tables.push(norm_table(&norms.series));
    a.tables.push(Table::numeric(
        "picard",
        &["iteration", "difference", "ratio", "iterate_norm"],
        diag.differences.iter().enumerate().map(|(i, &d)| {
            let ratio = if i == 0 { f64::NAN } else { diag.ratios[i - 1] };
            vec![(i + 1) as f64, d, ratio, diag.iterate_norms[i]]
        }),
    ));
    push_summary(a, "picard_iterations", diag.iterations);
    push_summary(a, "picard_max_ratio", num(diag.max_ratio()));
    push_summary(a, "x_norm_u", num(norms.x_norm_u));
    push_summary(a, "theta_norm_d", num(norms.theta_norm_d));
    a.checks.push(Check::new("picard_converged", diag.converged, format!("{} iterations", diag.iterations)));
    a.checks.push(Check::new(
        "picard_contraction",
        diag.max_ratio() < 0.5,
        format!("largest ratio {}", num(diag.max_ratio())),
    ));
    if let Some(last) = traj.u_samples().len().checked_sub(1) {
        a.snapshots.push(("u_final".into(), traj.u_samples()[last].clone()));
        a.snapshots.push(("d_final".into(), traj.director_samples()[last].clone()));
    }
    Ok(())
}

/// Norm series of a reduced-system march, recorded without storing the
/// trajectory.
pub fn decay_run(u0: &Field, d0: &Field, cfg: &SolverConfig) -> Result<(NormSeries, Field, Field), Error> {
    let dim = u0.grid().dim();
    let mut series = NormSeries::default();
    let summary = march_observe(u0, d0, cfg, SystemKind::Reduced, None, &mut |s| {
        series.push(s.t, s.u, s.director, cfg, dim)
    })?;
    Ok((series, summary.u, summary.director))
}

/// Decay fit and weighted boundedness of `‖u‖_{W^{k,∞}} + ‖∇d‖_{W^{k,∞}}`.
pub fn decay_verdict(series: &NormSeries, window: (f64, f64), alpha: f64, dim: usize) -> Result<DecayAnalysis, Error> {
    let raw: Vec<f64> = series.u_wk.iter().zip(&series.grad_d_wk).map(|(x, y)| x + y).collect();
    decay_analysis(&series.times, &raw, window, DecayLaw::Weighted { alpha, dim })
}

fn global_decay(cfg: &RunConfig, a: &mut Artifacts) -> Result<(), AppError> {
    let (u0, d0) = initial_data(cfg)?;
    let (series, u, d) = decay_run(&u0, &d0, &cfg.solver).map_err(stage("march"))?;
    let fit = decay_verdict(&series, (cfg.fit_start, cfg.solver.horizon), cfg.solver.alpha, cfg.dim)
        .map_err(stage("decay fit"))?;
    a.tables.push(norm_table(&series));
    let b = &fit.boundedness;
    push_summary(a, "fit_exponent", num(fit.fit.exponent));
    push_summary(a, "fit_expected_exponent", num(fit.law.expected_exponent()));
    push_summary(a, "fit_residual", num(fit.fit.residual));
    push_summary(a, "fit_samples", fit.fit.sample_count);
    push_summary(a, "weighted_sup", num(b.weighted_sup));
    push_summary(a, "first_half_max", num(b.first_half_max));
    push_summary(a, "second_half_max", num(b.second_half_max));
    let cap = cfg.decay_cap.unwrap_or(f64::INFINITY);
    a.checks.push(Check::new(
        "weighted_bounded",
        b.weighted_sup.is_finite() && b.weighted_sup <= cap,
        format!("sup {} against cap {}", num(b.weighted_sup), num(cap)),
    ));
    a.checks.push(Check::new(
        "running_max_non_increasing",
        b.non_increasing,
        format!("halves {} / {}", num(b.first_half_max), num(b.second_half_max)),
    ));
    a.snapshots.push(("u_final".into(), u));
    a.snapshots.push(("d_final".into(), d));
    Ok(())
}

/// Full and reduced runs from the same arc data, compared at every sample.
#[derive(Clone, Debug, PartialEq)]
pub struct ArcComparison {
    pub times: Vec<f64>,
    pub unit_residual: Vec<f64>,
    pub plane_residual: Vec<f64>,
    /// `‖v_full − arc_embed(d_reduced)‖_∞`.
    pub distance: Vec<f64>,
    /// `max ||∇v|² − |∇d|²|` for `v = arc_embed(d_reduced)`.
    pub identity_defect: Vec<f64>,
}

impl ArcComparison {
    fn max(v: &[f64]) -> f64 {
        v.iter().copied().fold(0.0, f64::max)
    }

    pub fn max_unit(&self) -> f64 {
        Self::max(&self.unit_residual)
    }

    pub fn max_plane(&self) -> f64 {
        Self::max(&self.plane_residual)
    }

    pub fn max_distance(&self) -> f64 {
        Self::max(&self.distance)
    }

    pub fn max_identity(&self) -> f64 {
        Self::max(&self.identity_defect)
    }
}

pub fn arc_comparison(u0: &Field, d0: &Field, frame: &ArcFrame, cfg: &SolverConfig) -> Result<ArcComparison, Error> {
    let reduced = march_solve(u0, d0, cfg, SystemKind::Reduced)?;
    let v0 = arc_embed(d0, frame)?;
    let mut out = ArcComparison {
        times: Vec::new(),
        unit_residual: Vec::new(),
        plane_residual: Vec::new(),
        distance: Vec::new(),
        identity_defect: Vec::new(),
    };
    let phases = reduced.director_samples();
    march_observe(u0, &v0, cfg, SystemKind::Full, None, &mut |s| {
        let i = out.times.len();
        let d = phases.get(i).filter(|_| reduced.times()[i] == s.t).ok_or_else(|| {
            Error::InvalidArgument(format!("reduced run has no sample at t = {}", s.t))
        })?;
        let (unit, plane) = constraint_residuals(s.director, frame)?;
        let embedded = arc_embed(d, frame)?;
        out.times.push(s.t);
        out.unit_residual.push(unit);
        out.plane_residual.push(plane);
        out.distance.push(sup_norm(&(s.director - &embedded)));
        out.identity_defect.push(arc_identity_check(d, frame)?.energy_density);
        Ok(())
    })?;
    Ok(out)
}

fn full_vs_reduced(cfg: &RunConfig, a: &mut Artifacts) -> Result<(), AppError> {
    let (u0, d0) = initial_data(cfg)?;
    let frame = ArcFrame::standard(3).map_err(stage("frame"))?;
    let cmp = arc_comparison(&u0, &d0, &frame, &cfg.solver).map_err(stage("full and reduced runs"))?;
    a.tables.push(Table::numeric(
        "arc",
        &["t", "unit_residual", "plane_residual", "distance_sup", "identity_defect"],
        (0..cmp.times.len()).map(|i| {
            vec![cmp.times[i], cmp.unit_residual[i], cmp.plane_residual[i], cmp.distance[i], cmp.identity_defect[i]]
        }),
    ));
    let tol = cfg.solver.constraint_tol;
    push_summary(a, "max_unit_residual", num(cmp.max_unit()));
    push_summary(a, "max_plane_residual", num(cmp.max_plane()));
    push_summary(a, "max_distance", num(cmp.max_distance()));
    push_summary(a, "max_identity_defect", num(cmp.max_identity()));
    a.checks.push(Check::new("unit_residual", cmp.max_unit() <= tol, num(cmp.max_unit())));
    a.checks.push(Check::new("plane_residual", cmp.max_plane() <= tol, num(cmp.max_plane())));
    a.checks.push(Check::new("arc_distance", cmp.max_distance() <= cfg.arc_tol, num(cmp.max_distance())));
    Ok(())
}

fn estimate_suite(cfg: &RunConfig, a: &mut Artifacts) -> Result<(), AppError> {
    let grid = cfg.grid()?;
    let reports = estimate_ensemble(&cfg.recipe, grid, cfg.samples, cfg.seed).map_err(stage("estimate ensemble"))?;
    let defect = scale_invariance_defect(&cfg.recipe, grid, cfg.seed).map_err(stage("scale invariance"))?;
    a.tables.push(Table::reports("reports", &reports));
    let mut ids = Vec::new();
    for id in &ESTIMATE_IDS[..18] {
        let mine: Vec<_> = reports.iter().filter(|r| r.estimate_id == *id).collect();
        let worst = mine.iter().map(|r| r.empirical_constant).fold(0.0, f64::max);
        push_summary(a, &format!("max_constant.{id}"), num(worst));
        ids.push(vec![
            id.to_string(),
            mine.len().to_string(),
            num(worst),
            num(mine.first().map_or(f64::NAN, |r| r.cap)),
            mine.iter().all(|r| r.pass).to_string(),
        ]);
    }
    a.tables.push(Table {
        name: "constants".into(),
        header: ["estimate_id", "samples", "max_constant", "cap", "pass"].map(String::from).to_vec(),
        rows: ids,
    });
    push_summary(a, "scale_invariance_defect", num(defect));
    let finite = reports.iter().all(|r| r.empirical_constant.is_finite());
    a.checks.push(Check::new("constants_finite", finite, format!("{} reports", reports.len())));
    let failing: Vec<&str> = reports.iter().filter(|r| !r.pass).map(|r| r.estimate_id.as_str()).collect();
    a.checks.push(Check::new("within_caps", failing.is_empty(), failing.join(" ")));
    a.checks.push(Check::new("scale_invariance", defect <= 1e-10, num(defect)));
    Ok(())
}

fn appendix_suite(cfg: &RunConfig, a: &mut Artifacts) -> Result<(), AppError> {
    let _ = cfg;
    let reports = appendix_reports().map_err(stage("appendix sweep"))?;
    let defect = beta_oracle_defect(1e3).map_err(stage("beta oracle"))?;
    a.tables.push(Table::reports("reports", &reports));
    for id in ["tec.int.1", "tec.int.2"] {
        let worst = reports.iter().filter(|r| r.estimate_id == id).map(|r| r.ratio).fold(0.0, f64::max);
        push_summary(a, &format!("max_ratio.{id}"), num(worst));
    }
    push_summary(a, "beta_oracle_defect", num(defect));
    a.checks.push(Check::new("beta_oracle", defect <= 1e-6, num(defect)));
    let failing = reports.iter().filter(|r| !r.pass).count();
    a.checks.push(Check::new("within_caps", failing == 0, format!("{failing} over cap")));
    Ok(())
}
