//! Davies distance weights, Hardy–Sobolev–Maz'ya forms and eigenvalue-counting
//! bounds for Schrödinger operators with a Hardy term, on domains in ℝᴺ for N ≤ 3.

pub mod constants;
pub mod error;
pub mod forms;
pub mod geometry;
pub mod grid;
pub mod io;
pub mod linalg;
pub mod oned;
pub mod special;
pub mod spectral;
pub mod sphere;

pub use error::{Error, Result};
pub use geometry::{Direction, Domain};
pub use forms::{FormParams, GridFunction, HardyWeight};
pub use grid::Grid;
pub use spectral::{Potential, SchrodingerOperator};
pub use sphere::{SphereQuadrature, WeightField, WeightKind};
