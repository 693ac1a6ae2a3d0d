pub mod arc;
pub mod calculus;
pub mod error;
mod fft;
pub mod field;
pub mod grid;
pub mod norms;
pub mod quadrature;
pub mod report;
pub mod rn_kernel;
pub mod semigroup;
pub mod solver;
pub mod verify;

pub use error::{Error, Result};
pub use field::{Field, Rank};
pub use grid::{make_grid, SpectralGrid};
