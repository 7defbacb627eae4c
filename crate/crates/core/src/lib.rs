//! Exact revenue-optimal selling mechanisms for a single item when the buyer
//! holds a private valuation and a private hard budget.
//!
//! Everything is computed in exact rational arithmetic. The crate covers
//! constraint checking for five mechanism classes, an exact simplex with
//! branch-and-bound over endogenous affordability constraints, class-specific
//! revenue solvers, parameterized instance families, and the analyses built
//! on top of them (extension to off-support types, payment monotonicity,
//! revenue-gap sweeps and non-monotonicity gaps).

pub mod analysis;
pub mod constructions;
pub mod error;
pub mod feasibility;
pub mod lp;
pub mod model;
pub mod solvers;

pub use error::{Error, Result};
