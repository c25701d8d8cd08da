//! The staged session service.
//!
//! Participants move through tutorial, quiz, two play stages, a choice
//! between the two games, a final play stage with the chosen game and a
//! survey. Every change is an [`Event`] appended to a JSONL log; the
//! in-memory [`State`] is the fold of that log, so a restarted service
//! replays it and carries on. [`http`] exposes the service to browsers and
//! [`driver`] runs simulated agents through it.

mod config;
pub mod driver;
mod events;
pub mod http;
mod service;
mod state;

pub use config::{PlatformConfig, ENV_PREFIX};
pub use events::{read_events, Event, EventBody, EventLog};
pub use service::{
    ActionOutcome, ActionRequest, BoardView, ChoiceOption, ClientView, Clock, ExportKind, PreferenceRequest, Service,
    SessionDescriptor, Summary, GAME_COLORS, TUTORIAL_REF,
};
pub use state::{room_id, RoundResult, Session, State, BONUS_RESOLUTION};

use crate::features::FeatureError;
use crate::matchmaking::MatchError;
use crate::protocol::Stage;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PlatformError {
    #[error("unknown session {0}")]
    UnknownSession(String),
    #[error("session {0} is closed")]
    SessionClosed(String),
    #[error("session is at {stage}, expected {expected}")]
    WrongStage { stage: Stage, expected: &'static str },
    #[error("round {got} submitted, the open round is {expected}")]
    DuplicateSubmission { expected: u32, got: u32 },
    #[error("invalid choice: {0}")]
    InvalidChoice(String),
    #[error("no open round")]
    NoOpenRound,
    #[error("room {0} is at its table limit")]
    RoomFull(String),
    #[error("service not ready")]
    ServiceNotReady,
    #[error("configuration: {0}")]
    Config(String),
    #[error("event log: {0}")]
    Log(String),
    #[error("inconsistent state: {0}")]
    Corrupt(String),
    #[error("simulated client: {0}")]
    Agent(String),
    #[error("io: {0}")]
    Io(String),
    #[error(transparent)]
    Match(#[from] MatchError),
    #[error(transparent)]
    Feature(#[from] FeatureError),
}

impl From<std::io::Error> for PlatformError {
    fn from(e: std::io::Error) -> Self {
        PlatformError::Io(e.to_string())
    }
}

impl From<crate::agents::AgentError> for PlatformError {
    fn from(e: crate::agents::AgentError) -> Self {
        PlatformError::Agent(e.to_string())
    }
}
