//! Mild solutions of the reduced and full systems: right-hand sides, Picard
//! iteration, exponential time marching and trajectory norms.

mod config;
mod march;
mod norms;
mod picard;
mod rhs;
mod trajectory;

pub use config::{DealiasPolicy, SolverConfig};
pub use march::{march_observe, march_solve, march_solve_forced, MarchSample, MarchSummary, Source};
pub use norms::{
    decay_weight, grad_hs_sq, hess_hs_sq, sup_plus_l2, theta_norm, trajectory_norms, x_norm, NormReport, NormSeries,
};
pub use picard::{picard_solve, picard_solve_seeded, y_norm, PicardDiagnostics, PicardSeed};
pub use rhs::{cubic_points, divergence_defect, full_rhs, reduced_rhs, unit_defect, Forcing};
pub use trajectory::{SystemKind, Trajectory};
