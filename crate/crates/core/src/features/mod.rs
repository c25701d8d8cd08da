//! Institutional features of 2x2 games and the hypercube of games that
//! realizes every combination of them.
//!
//! A game is *stable* when it has exactly one pure Nash equilibrium, *fair*
//! when both players' payoffs summed over the four outcomes are equal, and
//! *efficient* when its total payoff is the space's base total scaled by the
//! efficiency multiplier. [`generate_space`] finds one game per vertex of
//! the cube by deterministic constrained search.

mod predicates;
mod space;
mod vector;

pub use predicates::{
    classify, is_efficient, is_fair, is_safe, is_stable, is_strict_equilibrium,
    pure_nash_equilibria, Profile,
};
pub use space::{
    comparison_pairs, generate_space, pairs_for_width, verify_space, ComparisonPair, GameSpace, Multiplier,
    SearchOrder, SpaceConfig, UnstableShape, VerificationReport, VertexCheck,
};
pub use vector::{layer, Feature, FeatureVector, FEATURE_NAMES};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FeatureError {
    #[error("game total {total} matches neither the base total {base} nor the efficient total {efficient}")]
    NotInSpace { total: u32, base: u32, efficient: u32 },
    #[error("no game within the payoff bound satisfies vertex {vertex}")]
    UnsatisfiableConfig { vertex: FeatureVector },
    #[error("invalid space configuration: {0}")]
    InvalidConfig(String),
    #[error("{low} and {high} are not a comparison pair: {reason}")]
    InvalidPair { low: FeatureVector, high: FeatureVector, reason: &'static str },
    #[error("vertex {0} is not in the space")]
    MissingVertex(FeatureVector),
}
