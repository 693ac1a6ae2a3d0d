//! Flat `key = value` run configuration.
//!
//! Blank lines and `#` comments are ignored. Unknown keys are errors. Real
//! values may carry a `pi` suffix (`8pi`, `0.5pi`).

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use elsim_core::solver::{DealiasPolicy, SolverConfig};
use elsim_core::verify::transient_horizon;
use elsim_core::{make_grid, SpectralGrid};

use crate::error::AppError;
use crate::recipe::{DataRecipe, RecipeKind};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ExperimentKind {
    LocalExistence,
    GlobalDecay,
    FullVsReduced,
    EstimateSuite,
    AppendixSuite,
}

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 5] = [
        ExperimentKind::LocalExistence,
        ExperimentKind::GlobalDecay,
        ExperimentKind::FullVsReduced,
        ExperimentKind::EstimateSuite,
        ExperimentKind::AppendixSuite,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            ExperimentKind::LocalExistence => "local_existence",
            ExperimentKind::GlobalDecay => "global_decay",
            ExperimentKind::FullVsReduced => "full_vs_reduced",
            ExperimentKind::EstimateSuite => "estimate_suite",
            ExperimentKind::AppendixSuite => "appendix_suite",
        }
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ExperimentKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| format!("unknown experiment {s:?}"))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub experiment: ExperimentKind,
    pub dim: usize,
    pub modes: usize,
    pub box_length: f64,
    pub solver: SolverConfig,
    pub recipe: DataRecipe,
    pub seed: u64,
    pub output: PathBuf,
    /// Ensemble size of the estimate suite.
    pub samples: usize,
    /// Largest accepted `‖v_full − arc_embed(d_reduced)‖_∞`.
    pub arc_tol: f64,
    /// Frozen cap on the weighted decay quantity; unset means report only.
    pub decay_cap: Option<f64>,
    /// Start of the decay-fit window.
    pub fit_start: f64,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            experiment: ExperimentKind::LocalExistence,
            dim: 3,
            modes: 16,
            box_length: 2.0 * std::f64::consts::PI,
            solver: SolverConfig::default(),
            recipe: DataRecipe::default(),
            seed: 0,
            output: PathBuf::from("elsim-out"),
            samples: 50,
            arc_tol: 1e-5,
            decay_cap: None,
            fit_start: 0.5,
        }
    }
}

fn parse_real(v: &str) -> Result<f64, String> {
    let (num, factor) = match v.strip_suffix("pi") {
        Some("") => ("1", std::f64::consts::PI),
        Some(n) => (n, std::f64::consts::PI),
        None => (v, 1.0),
    };
    num.parse::<f64>().map(|x| x * factor).map_err(|e| format!("{v:?}: {e}"))
}

fn parse<T: FromStr>(v: &str) -> Result<T, String>
where
    T::Err: fmt::Display,
{
    v.parse::<T>().map_err(|e| format!("{v:?}: {e}"))
}

fn parse_optional(v: &str) -> Result<Option<f64>, String> {
    if v == "none" {
        Ok(None)
    } else {
        parse_real(v).map(Some)
    }
}

fn optional(v: Option<f64>) -> String {
    v.map_or_else(|| "none".to_string(), |x| x.to_string())
}

impl RunConfig {
    /// Keys accepted by [`RunConfig::set`], in the order of [`RunConfig::to_text`].
    pub const KEYS: [&'static str; 29] = [
        "experiment",
        "dim",
        "modes",
        "box_length",
        "s",
        "horizon",
        "dt",
        "picard_tol",
        "picard_max_iter",
        "alpha",
        "k_decay",
        "dealias",
        "sample_interval",
        "constraint_tol",
        "divergence_tol",
        "recipe",
        "u_hs",
        "grad_d_hs",
        "d_sup",
        "decay_rate",
        "band",
        "support_radius",
        "mode",
        "seed",
        "output",
        "samples",
        "arc_tol",
        "decay_cap",
        "fit_start",
    ];

    pub fn set(&mut self, key: &str, value: &str) -> Result<(), String> {
        let sv = &mut self.solver;
        let r = &mut self.recipe;
        match key {
            "experiment" => self.experiment = parse(value)?,
            "dim" => self.dim = parse(value)?,
            "modes" => self.modes = parse(value)?,
            "box_length" => self.box_length = parse_real(value)?,
            "s" => sv.s = parse_real(value)?,
            "horizon" => sv.horizon = parse_real(value)?,
            "dt" => sv.dt = parse_real(value)?,
            "picard_tol" => sv.picard_tol = parse_real(value)?,
            "picard_max_iter" => sv.picard_max_iter = parse(value)?,
            "alpha" => sv.alpha = parse_real(value)?,
            "k_decay" => sv.k_decay = parse(value)?,
            "dealias" => {
                sv.dealias = match value {
                    "standard" => DealiasPolicy::Standard,
                    "off" => DealiasPolicy::Off,
                    other => return Err(format!("unknown dealias policy {other:?}")),
                }
            }
            "sample_interval" => sv.sample_interval = parse(value)?,
            "constraint_tol" => sv.constraint_tol = parse_real(value)?,
            "divergence_tol" => sv.divergence_tol = parse_real(value)?,
            "recipe" => r.kind = parse::<RecipeKind>(value)?,
            "u_hs" => r.u_hs = parse_real(value)?,
            "grad_d_hs" => r.grad_d_hs = parse_optional(value)?,
            "d_sup" => r.d_sup = parse_optional(value)?,
            "decay_rate" => r.decay_rate = parse_real(value)?,
            "band" => r.band = parse(value)?,
            "support_radius" => r.support_radius = parse_real(value)?,
            "mode" => r.mode = parse(value)?,
            "seed" => self.seed = parse(value)?,
            "output" => self.output = PathBuf::from(value),
            "samples" => self.samples = parse(value)?,
            "arc_tol" => self.arc_tol = parse_real(value)?,
            "decay_cap" => self.decay_cap = parse_optional(value)?,
            "fit_start" => self.fit_start = parse_real(value)?,
            other => return Err(format!("unknown key {other:?}")),
        }
        Ok(())
    }

    /// Applies `text` on top of the defaults.
    pub fn parse(text: &str) -> Result<Self, AppError> {
        let mut cfg = Self::default();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |msg: String| AppError::Config { line: n + 1, msg };
            let (k, v) = line.split_once('=').ok_or_else(|| err(format!("expected key = value, got {line:?}")))?;
            cfg.set(k.trim(), v.trim()).map_err(err)?;
        }
        Ok(cfg)
    }

    pub fn value(&self, key: &str) -> String {
        let sv = &self.solver;
        let r = &self.recipe;
        match key {
            "experiment" => self.experiment.to_string(),
            "dim" => self.dim.to_string(),
            "modes" => self.modes.to_string(),
            "box_length" => self.box_length.to_string(),
            "s" => sv.s.to_string(),
            "horizon" => sv.horizon.to_string(),
            "dt" => sv.dt.to_string(),
            "picard_tol" => sv.picard_tol.to_string(),
            "picard_max_iter" => sv.picard_max_iter.to_string(),
            "alpha" => sv.alpha.to_string(),
            "k_decay" => sv.k_decay.to_string(),
            "dealias" => match sv.dealias {
                DealiasPolicy::Standard => "standard".into(),
                DealiasPolicy::Off => "off".into(),
            },
            "sample_interval" => sv.sample_interval.to_string(),
            "constraint_tol" => sv.constraint_tol.to_string(),
            "divergence_tol" => sv.divergence_tol.to_string(),
            "recipe" => r.kind.to_string(),
            "u_hs" => r.u_hs.to_string(),
            "grad_d_hs" => optional(r.grad_d_hs),
            "d_sup" => optional(r.d_sup),
            "decay_rate" => r.decay_rate.to_string(),
            "band" => r.band.to_string(),
            "support_radius" => r.support_radius.to_string(),
            "mode" => r.mode.to_string(),
            "seed" => self.seed.to_string(),
            "output" => self.output.display().to_string(),
            "samples" => self.samples.to_string(),
            "arc_tol" => self.arc_tol.to_string(),
            "decay_cap" => optional(self.decay_cap),
            "fit_start" => self.fit_start.to_string(),
            _ => String::new(),
        }
    }

    /// Every key with its value; parses back to the same configuration.
    pub fn to_text(&self) -> String {
        Self::KEYS.iter().map(|k| format!("{k} = {}\n", self.value(k))).collect()
    }

    pub fn grid(&self) -> Result<SpectralGrid, AppError> {
        make_grid(self.dim, self.modes, self.box_length).map_err(|e| AppError::Invalid(e.to_string()))
    }

    /// Everything that can be checked without computing.
    pub fn validate(&self) -> Result<(), AppError> {
        let invalid = |e: elsim_core::Error| AppError::Invalid(e.to_string());
        let grid = self.grid()?;
        self.solver.validate(self.dim).map_err(invalid)?;
        self.recipe.validate(&grid).map_err(invalid)?;
        match self.experiment {
            ExperimentKind::GlobalDecay => {
                let cap = transient_horizon(&grid);
                if self.solver.horizon > cap * (1.0 + 1e-12) {
                    return Err(AppError::Invalid(format!(
                        "horizon {} exceeds the transient window L²/40 = {cap}",
                        self.solver.horizon
                    )));
                }
                if !(self.fit_start > 0.0 && self.fit_start < self.solver.horizon) {
                    return Err(AppError::Invalid(format!("fit start {} outside (0, horizon)", self.fit_start)));
                }
            }
            ExperimentKind::FullVsReduced if self.dim != 3 => {
                return Err(AppError::Invalid("full_vs_reduced needs dim = 3".into()));
            }
            ExperimentKind::EstimateSuite => {
                if self.dim != 3 {
                    return Err(AppError::Invalid("estimate_suite needs dim = 3".into()));
                }
                if self.samples == 0 {
                    return Err(AppError::Invalid("estimate_suite needs at least one sample".into()));
                }
            }
            _ => {}
        }
        if !(self.arc_tol > 0.0) {
            return Err(AppError::Invalid(format!("arc_tol {} must be positive", self.arc_tol)));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_through_text() {
        let mut cfg = RunConfig::default();
        cfg.experiment = ExperimentKind::GlobalDecay;
        cfg.box_length = 8.0 * std::f64::consts::PI;
        cfg.recipe.d_sup = Some(0.25);
        cfg.decay_cap = Some(3.5);
        cfg.solver.dt = 1.0 / 3.0;
        let back = RunConfig::parse(&cfg.to_text()).unwrap();
        assert_eq!(back, cfg);
    }

    #[test]
    fn comments_pi_suffix_and_errors() {
        let cfg = RunConfig::parse("# test\n box_length = 8pi  # box\n\nseed=7\n").unwrap();
        assert_eq!(cfg.box_length, 8.0 * std::f64::consts::PI);
        assert_eq!(cfg.seed, 7);
        assert!(matches!(RunConfig::parse("nope = 1"), Err(AppError::Config { line: 1, .. })));
        assert!(matches!(RunConfig::parse("\nseed"), Err(AppError::Config { line: 2, .. })));
        assert!(RunConfig::parse("dt = fast").is_err());
    }

    #[test]
    fn subcritical_regularity_rejected() {
        let cfg = RunConfig::parse("s = 0.4\ndim = 3").unwrap();
        assert!(matches!(cfg.validate(), Err(AppError::Invalid(_))));
        assert!(RunConfig::default().validate().is_ok());
    }

    #[test]
    fn decay_horizon_limited_by_transient_window() {
        let cfg = RunConfig::parse("experiment = global_decay\nhorizon = 2\ndt = 0.01").unwrap();
        // L²/40 ≈ 0.987 on the default 2π box
        assert!(cfg.validate().is_err());
    }
}
