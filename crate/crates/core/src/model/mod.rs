//! Domain types: exact rationals, buyer distributions, lotteries and mechanisms.

mod distribution;
pub mod io;
mod mechanism;
mod rational;

pub use distribution::{
    min_rv, validate_distribution, BuyerDistribution, DistributionIssue, ScalarDistribution,
    TypeKey, TypePoint, ValidationReport,
};
pub use mechanism::{menu_of, revenue, ClassSpec, Lottery, Mechanism};
pub use rational::{harmonic, rat, Rational};
