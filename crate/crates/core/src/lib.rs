//! Numerical verification of convexity-type inequalities with infinite convex
//! combinations `f(Σ λᵢ xᵢ) ≤ Σ μᵢ f(xᵢ)`.
//!
//! The crate provides certified evaluation of the weighted series on both sides,
//! sampling checkers for pointwise and discrete-Jensen convexity, greedy rational
//! expansions `t = Σ λᵢ qᵢ`, and a counterexample search for `λ ≠ μ`.

// comparisons are negated so that NaN fails them
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod checkers;
pub mod cli;
pub mod distribution;
pub mod domain;
pub mod error;
pub mod expansion;
pub mod funcparse;
mod json_util;
pub mod point;
pub mod search;
pub mod sequence;
pub mod series;
pub mod sum;
pub mod weights;

pub use distribution::DiscreteDistribution;
pub use domain::ConvexDomain;
pub use error::{Error, Result};
pub use expansion::RationalExpansion;
pub use funcparse::{ConvexityTag, ScalarFunction};
pub use point::{convex_combination, positive_part, ConvexityParams, Point};

pub use checkers::{BracketReport, Status, Verdict, Witness};
pub use search::CounterexampleWitness;
pub use sequence::BoundedSequence;
pub use series::{Classification, SeriesEstimate};
pub use weights::WeightSequence;
