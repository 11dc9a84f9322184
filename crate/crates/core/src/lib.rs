//! Immersed boundary finite element method for the stationary Stokes problem.
//!
//! The pipeline is: build a uniform triangulation ([`mesh`]), spread a
//! Lagrangian force density through a regularized delta function
//! ([`kernel`], [`lagrangian`]), assemble and solve the MINI-element saddle
//! point system ([`stokes`], [`solver`]), then measure errors and convergence
//! rates ([`analysis`]). [`study`] wires these into the convergence ladder run
//! by the `ibfem` binary.

#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod config;
pub mod error;
pub mod geometry;
pub mod kernel;
pub mod lagrangian;
pub mod mesh;
pub mod quadrature;
pub mod report;
pub mod solver;
pub mod stokes;
pub mod study;

pub use error::{Error, Result};
pub use geometry::{AxisBox, Point2, Vec2};
