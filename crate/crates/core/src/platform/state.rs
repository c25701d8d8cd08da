use super::events::{Event, EventBody};
use super::PlatformError;
use crate::analysis::{PreferenceRecord, Trial};
use crate::features::{FeatureVector, GameSpace};
use crate::game::{Action, Role, Transformation};
use crate::matchmaking::{bonus_from_counts, Resolution, Room, RoomEvent, Seat};
use crate::protocol::{Condition, Stage};
use num_rational::Ratio;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// What a participant learns when one of their rounds ends.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum RoundResult {
    /// Player 1: the move is committed and the estimated bonus credited.
    Committed { round: u32, own_move: Action, estimated_bonus: String },
    /// Player 2: the whole round is revealed. Moves are displayed actions
    /// along each player's own axis.
    Revealed { round: u32, own_move: Action, other_move: Action, own_payoff: u32, other_payoff: u32 },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Session {
    pub session_id: String,
    pub condition: Condition,
    pub stage: Stage,
    /// Rounds finished in the current play stage.
    pub rounds_done: u32,
    /// Rounds finished over the whole session.
    pub rounds_total: u32,
    /// Points so far; estimated Player-1 bonuses are rounded to
    /// [`BONUS_RESOLUTION`] before they are added.
    pub bonus: Ratio<u64>,
    pub chosen: Option<FeatureVector>,
    pub seat: Option<(String, Seat)>,
    pub last_result: Option<RoundResult>,
    pub created_at: u64,
    pub last_active: u64,
    pub abandoned: bool,
    pub dropped: bool,
    pub survey: Option<serde_json::Value>,
}

/// Session totals are kept in millionths of a point so that sums of
/// estimates with unrelated denominators stay small.
pub const BONUS_RESOLUTION: u64 = 1_000_000;

fn to_resolution(points: Ratio<u64>) -> Ratio<u64> {
    Ratio::new((points * Ratio::from_integer(BONUS_RESOLUTION)).round().to_integer(), BONUS_RESOLUTION)
}

impl Session {
    pub fn bonus_points(&self) -> f64 {
        *self.bonus.numer() as f64 / *self.bonus.denom() as f64
    }

    pub fn is_open(&self) -> bool {
        !self.abandoned && !self.dropped && self.stage != Stage::Done
    }
}

/// Everything the service knows, folded from the event log.
#[derive(Clone, Debug, PartialEq)]
pub struct State {
    pub space: GameSpace,
    pub conditions: Vec<Condition>,
    pub rounds_per_stage: u32,
    pub pool_presentations: bool,
    pub sessions: BTreeMap<String, Session>,
    /// Sessions in creation order.
    pub order: Vec<String>,
    pub rooms: BTreeMap<String, Room>,
    pub trials: Vec<Trial>,
    pub preferences: Vec<PreferenceRecord>,
    pub assignments: Vec<u32>,
    /// Canonical Player-2 action counts per game and per room.
    pub p2_by_label: BTreeMap<FeatureVector, [u64; 2]>,
    pub p2_by_room: BTreeMap<String, [u64; 2]>,
    pub next_seq: u64,
}

pub fn room_id(label: FeatureVector, t: Transformation) -> String {
    format!("{label}/{t}")
}

impl State {
    pub fn new(space: GameSpace, conditions: Vec<Condition>, rounds_per_stage: u32, pool_presentations: bool) -> Self {
        let n = conditions.len();
        State {
            space,
            conditions,
            rounds_per_stage,
            pool_presentations,
            sessions: BTreeMap::new(),
            order: Vec::new(),
            rooms: BTreeMap::new(),
            trials: Vec::new(),
            preferences: Vec::new(),
            assignments: vec![0; n],
            p2_by_label: BTreeMap::new(),
            p2_by_room: BTreeMap::new(),
            next_seq: 0,
        }
    }

    pub fn session(&self, id: &str) -> Result<&Session, PlatformError> {
        self.sessions.get(id).ok_or_else(|| PlatformError::UnknownSession(id.to_string()))
    }

    fn session_mut(&mut self, id: &str) -> Result<&mut Session, PlatformError> {
        self.sessions.get_mut(id).ok_or_else(|| PlatformError::UnknownSession(id.to_string()))
    }

    fn room_mut(&mut self, id: &str) -> Result<&mut Room, PlatformError> {
        self.rooms.get_mut(id).ok_or_else(|| PlatformError::Corrupt(format!("unknown room {id}")))
    }

    /// Player-2 action counts that inform a Player-1 bonus in `room`.
    pub fn p2_counts(&self, room: &Room) -> [u64; 2] {
        let counts = if self.pool_presentations {
            self.p2_by_label.get(&room.label)
        } else {
            self.p2_by_room.get(&room.room_id)
        };
        counts.copied().unwrap_or_default()
    }

    /// Folds one event into the state. Events must arrive in sequence.
    pub fn apply(&mut self, event: &Event) -> Result<(), PlatformError> {
        if event.seq != self.next_seq {
            return Err(PlatformError::Corrupt(format!("event {} applied at {}", event.seq, self.next_seq)));
        }
        let ts = event.ts;
        match &event.body {
            EventBody::SessionCreated { session_id, condition_id } => {
                let condition = *self
                    .conditions
                    .get(*condition_id as usize)
                    .ok_or_else(|| PlatformError::Corrupt(format!("unknown condition {condition_id}")))?;
                if self.sessions.contains_key(session_id) {
                    return Err(PlatformError::Corrupt(format!("session {session_id} created twice")));
                }
                self.assignments[*condition_id as usize] += 1;
                self.order.push(session_id.clone());
                self.sessions.insert(
                    session_id.clone(),
                    Session {
                        session_id: session_id.clone(),
                        condition,
                        stage: Stage::Tutorial,
                        rounds_done: 0,
                        rounds_total: 0,
                        bonus: Ratio::from_integer(0),
                        chosen: None,
                        seat: None,
                        last_result: None,
                        created_at: ts,
                        last_active: ts,
                        abandoned: false,
                        dropped: false,
                        survey: None,
                    },
                );
            }
            EventBody::RoomOpened { room_id, events } => {
                let room = Room::replay(events)?;
                if room.room_id != *room_id || self.rooms.contains_key(room_id) {
                    return Err(PlatformError::Corrupt(format!("room {room_id} opened inconsistently")));
                }
                self.rooms.insert(room_id.clone(), room);
            }
            EventBody::TablesAdded { room_id, count } => {
                self.room_mut(room_id)?.add_tables(*count);
            }
            EventBody::Seated { room_id, seat } => {
                self.room_mut(room_id)?.apply(RoomEvent::Seated { seat: seat.clone() })?;
                let s = self.session_mut(&seat.session_id)?;
                s.seat = Some((room_id.clone(), seat.clone()));
            }
            EventBody::MoveSubmitted { room_id, table_id, session_id, action, source } => {
                let seat = Seat { session_id: session_id.clone(), table_id: *table_id, role: Role::Player1 };
                let room = self.rooms.get(room_id).ok_or_else(|| PlatformError::Corrupt(format!("unknown room {room_id}")))?;
                let bonus = bonus_from_counts(room.game(), *action, self.p2_counts(room));
                let transformation = room.transformation;
                let game = room.game().clone();
                let room = self.room_mut(room_id)?;
                room.apply(RoomEvent::MoveSubmitted {
                    table_id: *table_id,
                    session_id: session_id.clone(),
                    action: *action,
                    source: *source,
                })?;
                room.apply(RoomEvent::SeatReleased { seat })?;
                let s = self.session_mut(session_id)?;
                let view = crate::game::viewer_presentation(&game, Role::Player1, transformation);
                s.bonus += to_resolution(bonus);
                s.seat = None;
                s.rounds_done += 1;
                s.rounds_total += 1;
                s.last_active = ts;
                s.last_result = Some(RoundResult::Committed {
                    round: s.rounds_done,
                    own_move: view.to_displayed(*action),
                    estimated_bonus: bonus.to_string(),
                });
            }
            EventBody::TrialResolved { room_id, resolution } => {
                let r: &Resolution = resolution;
                let seat = Seat { session_id: r.p2_session.clone(), table_id: r.table_id, role: Role::Player2 };
                let room = self.room_mut(room_id)?;
                room.apply(RoomEvent::TrialResolved { resolution: r.clone() })?;
                room.apply(RoomEvent::SeatReleased { seat })?;
                let (label, transformation) = (room.label, room.transformation);
                let i = r.a2.index();
                self.p2_by_label.entry(label).or_default()[i] += 1;
                self.p2_by_room.entry(room_id.clone()).or_default()[i] += 1;
                let room = &self.rooms[room_id];
                let view = crate::game::viewer_presentation(room.game(), Role::Player2, transformation);
                let s = self.session_mut(&r.p2_session)?;
                s.bonus += Ratio::from_integer(u64::from(r.payoffs.u2));
                s.seat = None;
                s.rounds_done += 1;
                s.rounds_total += 1;
                s.last_active = ts;
                s.last_result = Some(RoundResult::Revealed {
                    round: s.rounds_done,
                    own_move: view.to_displayed(r.a2),
                    other_move: view.opponent_to_displayed(r.a1),
                    own_payoff: r.payoffs.u2,
                    other_payoff: r.payoffs.u1,
                });
                let trial = Trial {
                    trial_id: format!("{}-{:02}", r.p2_session, s.rounds_total),
                    session_id: r.p2_session.clone(),
                    condition_id: s.condition.condition_id,
                    game_label: label,
                    transformation,
                    role_of_session: Role::Player2,
                    a1: r.a1,
                    a2: r.a2,
                    u1: r.payoffs.u1,
                    u2: r.payoffs.u2,
                    p1_source: r.p1_source,
                    p2_source: r.p2_source,
                    stage: s.stage,
                    timestamp: ts,
                };
                self.trials.push(trial);
            }
            EventBody::PreferenceChosen { record } => {
                let s = self.session_mut(&record.session_id)?;
                s.chosen = Some(record.chosen);
                s.last_active = ts;
                self.preferences.push(record.clone());
            }
            EventBody::StageAdvanced { session_id, to } => {
                let s = self.session_mut(session_id)?;
                if s.stage.next() != Some(*to) {
                    return Err(PlatformError::Corrupt(format!("{session_id}: {} cannot advance to {to}", s.stage)));
                }
                s.stage = *to;
                s.rounds_done = 0;
                s.last_active = ts;
            }
            EventBody::SurveySubmitted { session_id, answers } => {
                let s = self.session_mut(session_id)?;
                s.survey = Some(answers.clone());
                s.last_active = ts;
            }
            EventBody::SessionAbandoned { session_id } | EventBody::SessionDropped { session_id } => {
                let dropped = matches!(event.body, EventBody::SessionDropped { .. });
                let seat = self.session(session_id)?.seat.clone();
                if let Some((room_id, seat)) = seat {
                    self.room_mut(&room_id)?.apply(RoomEvent::SeatReleased { seat })?;
                }
                let s = self.session_mut(session_id)?;
                s.seat = None;
                if dropped {
                    s.dropped = true;
                } else {
                    s.abandoned = true;
                }
            }
        }
        self.next_seq += 1;
        Ok(())
    }
}
