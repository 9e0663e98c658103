//! Numerical toolkit for Dirac operators with Coulomb-type matrix potentials:
//! free resolvents, Neumann-series solves of `(H ± i)ψ = f`, and weighted
//! Hardy–Dirac inequalities with their extremal families.

pub mod algebra;
pub mod discretization;
pub mod error;
pub mod fields;
pub mod keyvalue;
pub mod operators;
pub mod potentials;
pub mod solver;
pub mod verification;

pub use algebra::{Mat2, Mat4, Vec3, C64};
pub use discretization::{CartesianGrid, Field, Grid, RadialGrid, SpinorField, WeightKind};
pub use error::{Error, Result};
pub use potentials::{MatrixPotential, RadialScalarPotential};
