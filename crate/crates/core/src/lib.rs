//! Lie-algebraic machinery for cyclic Higgs bundles and a numerical solver
//! for the real affine Toda field equations.
//!
//! * [`rootdata`]: exact root systems, exponents, affine Cartan data.
//! * [`chevalley`]: Chevalley basis, principal sl2, Coxeter element,
//!   involutions and cyclic elements.
//! * [`connection`]: grids, the Toda/Higgs flat connection and its curvature.
//! * [`todasolver`]: the constant solution and a Newton solver.
//! * [`restriction`]: reduction by a diagram automorphism and affine diagram
//!   classification.
//! * [`cli`]: the `cyclic-toda` command line.

pub mod chevalley;
pub mod cli;
pub mod connection;
pub mod error;
pub mod rational;
pub mod restriction;
pub mod rootdata;
pub mod todasolver;

pub use error::{Result, TodaError};
