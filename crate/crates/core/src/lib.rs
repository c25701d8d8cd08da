//! Second-order cooperation laboratory.
//!
//! `instlab` builds hypercubes of 2x2 games whose stability, efficiency and
//! fairness vary independently, plays them with simulated agents or human
//! participants under an asynchronous table protocol, and computes
//! within-game cooperation and between-game preference statistics.
//!
//! Modules, bottom up:
//!
//! - [`game`]: bimatrix games, the eight presentation symmetries, payoffs.
//! - [`features`]: feature predicates, equilibrium enumeration, space generation.
//! - [`agents`]: within-game policies, preference models, hypercube walks,
//!   session and cohort simulation.
//! - [`matchmaking`]: rooms, tables, seating and the Player-1 bonus estimate.
//! - [`analysis`]: seed filtering, cooperation and preference estimates,
//!   bootstrap intervals, layer and path reports.
//! - [`platform`]: the staged session service, event log, exports and HTTP API.
//!
//! The `examples/` directory has one runnable program per capability.

pub mod agents;
pub mod analysis;
pub mod features;
pub mod fixtures;
pub mod game;
pub mod matchmaking;
pub mod platform;
pub mod protocol;
pub mod rng;

pub use features::{ComparisonPair, FeatureVector, GameSpace, SpaceConfig};
pub use game::{Action, BimatrixGame, PayoffPair, Role, Transformation};
