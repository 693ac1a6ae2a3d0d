use thiserror::Error;

use crate::field::Rank;
use crate::solver::{PicardDiagnostics, Trajectory};

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("rank mismatch in {op}: got {got:?}, expected {expected}")]
    RankMismatch {
        op: &'static str,
        got: Rank,
        expected: &'static str,
    },

    #[error("fields live on different grids")]
    GridMismatch,

    #[error("symbol is not finite at wavevector {at:?}{hint}")]
    SingularSymbol { at: [f64; 3], hint: &'static str },

    #[error("invalid norm request: {0}")]
    InvalidNorm(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid solver configuration: {0}")]
    InvalidConfig(String),

    #[error("constraint violated: {what} = {value:e} exceeds tolerance {tol:e}")]
    ConstraintViolation {
        what: &'static str,
        value: f64,
        tol: f64,
    },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("picard iteration is not contracting after {} iterations", .0.iterations)]
    NonContraction(Box<PicardDiagnostics>),

    #[error("picard iteration did not reach tolerance in {} iterations", .0.iterations)]
    NotConverged(Box<PicardDiagnostics>),

    #[error("blow-up at t = {time}: tracked norm {norm:e}")]
    BlowUp {
        time: f64,
        norm: f64,
        partial: Box<Trajectory>,
    },
}
