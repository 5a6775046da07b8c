//! Generalized Loewner evolution in the unit disk with a rotating or
//! Brownian attracting boundary point.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod deterministic;
pub mod error;
pub mod geometry;
pub mod herglotz;
pub mod ode;
pub mod quadrature;
pub mod rational;
pub mod stochastic;
pub mod trajectory;

pub use error::{LoewnerError, Result};
pub use herglotz::{BerksonPortaData, HerglotzSpec, TaylorSeries};
pub use trajectory::{Frame, Method, Trajectory};
