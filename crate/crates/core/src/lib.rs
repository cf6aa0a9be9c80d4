//! Numerical lab for ancient solutions of the rescaled Yamabe flow in
//! cylindrical gauge: soliton profiles, barrier certification, evolution
//! between barriers and curvature diagnostics.

// `!(x > 0.0)` is the NaN-rejecting guard used throughout
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod barriers;
pub mod cli;
pub mod error;
pub mod evolution;
pub mod geometry;
pub mod io;
pub mod model;
pub mod ode;
pub mod profiles;
pub mod tridiag;

pub use error::{Error, Result};
pub use model::ModelParams;
