//! The asynchronous table protocol. A room holds tables of one game at one
//! presentation; some start with a seeded Player-1 move. Arrivals join a
//! table awaiting Player 2 when one exists and open a new table as Player 1
//! otherwise, so nobody waits for a partner.
//!
//! Rooms change only through [`RoomEvent`]s, which callers persist; a room
//! is always the replay of its events.

mod bonus;
mod room;

pub use bonus::{action_counts, bonus_from_counts, estimate_bonus_p1, smoothed_from_counts, smoothed_p2};
pub use room::{MoveOutcome, PendingMove, Resolution, Room, RoomEvent, Seat, Table, TableStatus};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MatchError {
    #[error("room {0} has no seatable table")]
    RoomFull(String),
    #[error("session {0} already holds a seat")]
    AlreadySeated(String),
    #[error("seat {0:?} is no longer live")]
    StaleSeat(Seat),
    #[error("seat {0:?} already moved")]
    DuplicateMove(Seat),
    #[error("no table {0}")]
    UnknownTable(u32),
    #[error("a room needs at least one table and no more seeds than tables (got {n_tables} tables, {seed_policy} seeds)")]
    InvalidRoom { n_tables: u32, seed_policy: u32 },
    #[error("inconsistent room history: {0}")]
    Corrupt(String),
}
