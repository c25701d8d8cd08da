//! Simulated participants: within-game policies, between-game preference
//! models, walks over the hypercube, and session and cohort simulation.

mod policy;
mod preference;
mod session;
mod walk;

pub use policy::{equilibrium_action, self_play, AgentPolicy, Beliefs, PolicyKind, TieBreak};
pub use preference::{prefer, Experience, PreferenceModel};
pub use session::{
    balanced_assignment, conditions_with, simulate_cohort, simulate_session, SessionRecord, SimulationConfig,
};
pub use walk::{run_walk, Acceptance, WalkResult};

use crate::features::{ComparisonPair, FeatureError, FeatureVector};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AgentError {
    #[error("no experience of game {0}")]
    MissingExperience(FeatureVector),
    #[error("no preference estimate for pair {0}")]
    MissingPair(ComparisonPair),
    #[error("invalid policy: {0}")]
    InvalidPolicy(String),
    #[error("invalid preference model: {0}")]
    InvalidModel(String),
    #[error("invalid simulation: {0}")]
    InvalidConfig(String),
    #[error("no conditions to assign participants to")]
    NoConditions,
    #[error(transparent)]
    Feature(#[from] FeatureError),
}
