//! Replicator dynamics of two-strategy bimatrix games under switching
//! environments: closed-form switching times for the symmetric reduction,
//! saddle linearization and trapping regions in the plane, a fixed-step
//! integrator for switched systems, and controllers that keep the state
//! inside a target region.

// negated float comparisons reject NaN along with out-of-range values
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analytic1d;
pub mod controller;
pub mod dynamics;
pub mod error;
pub mod game;
pub mod geometry;
pub mod io;
pub mod linear2d;

pub use analytic1d::{Phase, Schedule, StartSide, TrapWindow1D};
pub use dynamics::{Coordinate, IntegratorConfig, Trajectory};
pub use error::{Error, Result};
pub use game::{BimatrixGame, Env, Reduced1D, State2D, SwitchedSystem};
pub use geometry::Point;
