//! Grids, sampled fields, quadrature and differential operations.

pub mod fft;
mod field;
mod grid;
pub mod io;
pub mod spectral;
pub mod stencil;

pub use field::{Field, SpinorField, WeightKind};
pub use grid::{CartesianGrid, Grid, QuadratureParts, RadialGrid};
pub use spectral::{alpha_grad, radial_derivative, sigma_grad};
