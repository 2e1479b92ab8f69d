//! Invariants, structure equations and normal forms of Finsler surfaces of
//! constant flag curvature with a Killing field.
//!
//! - [`jetcalc`]: Taylor jets in two variables and numeric exterior calculus.
//! - [`spherical`]: spherically symmetric metrics, their Killing data, and
//!   extraction of the profile functions `u(a)`, `v(a)`.
//! - [`sigma_chart`]: the Berwald coframe on the unit tangent bundle and
//!   numeric checks of the structure equations.
//! - [`normalform`]: the normal-form coframes for `K = 1, 0, -1`.
//! - [`cli`]: expression language and command-line driver.

pub mod cli;
pub mod error;
pub mod jetcalc;
pub mod normalform;
pub mod sigma_chart;
pub mod spherical;

pub use error::{Error, Result};
