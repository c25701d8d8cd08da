use super::MatchError;
use crate::analysis::Source;
use crate::features::FeatureVector;
use crate::game::{Action, BimatrixGame, PayoffPair, Role, Transformation};
use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TableStatus {
    Empty,
    AwaitingPlayer2,
    Resolved,
}

/// A committed Player-1 move waiting for its Player 2. Actions are
/// canonical.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PendingMove {
    pub action: Action,
    pub source: Source,
    /// `None` for seeds.
    pub session_id: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Table {
    pub table_id: u32,
    pub status: TableStatus,
    pub pending: Option<PendingMove>,
    /// Live seats, by role.
    pub player1: Option<String>,
    pub player2: Option<String>,
}

impl Table {
    fn empty(table_id: u32) -> Self {
        Table { table_id, status: TableStatus::Empty, pending: None, player1: None, player2: None }
    }

    fn seat_of(&self, role: Role) -> &Option<String> {
        match role {
            Role::Player1 => &self.player1,
            Role::Player2 => &self.player2,
        }
    }

    fn seat_of_mut(&mut self, role: Role) -> &mut Option<String> {
        match role {
            Role::Player1 => &mut self.player1,
            Role::Player2 => &mut self.player2,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Seat {
    pub session_id: String,
    pub table_id: u32,
    pub role: Role,
}

/// A resolved table: both canonical moves and where they came from.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Resolution {
    pub table_id: u32,
    pub a1: Action,
    pub a2: Action,
    pub payoffs: PayoffPair,
    pub p1_source: Source,
    pub p2_source: Source,
    pub p1_session: Option<String>,
    pub p2_session: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MoveOutcome {
    /// A Player-1 move is waiting for a Player 2.
    Pending,
    Resolved(Resolution),
}

/// Every state change of a room. Rooms change only by applying these, so a
/// room equals the replay of its own history.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum RoomEvent {
    Opened { room_id: String, label: FeatureVector, transformation: Transformation, game: BimatrixGame },
    TableOpened { table_id: u32 },
    SeedPlaced { table_id: u32, action: Action },
    Seated { seat: Seat },
    MoveSubmitted { table_id: u32, session_id: String, action: Action, source: Source },
    TrialResolved { resolution: Resolution },
    SeatReleased { seat: Seat },
}

/// A virtual room: tables of one game at one presentation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Room {
    pub room_id: String,
    pub label: FeatureVector,
    pub transformation: Transformation,
    game: BimatrixGame,
    tables: Vec<Table>,
    /// Canonical Player-2 moves, in resolution order.
    p2_history: Vec<Action>,
    history: Vec<RoomEvent>,
    seats: BTreeMap<String, Seat>,
    /// Tables a Player 2 could join, and tables a Player 1 could open.
    awaiting: BTreeSet<u32>,
    empty: BTreeSet<u32>,
}

impl Room {
    /// Opens `n_tables` empty tables and seeds `seed_policy` of them with a
    /// uniform Player-1 move.
    pub fn open<R: Rng + ?Sized>(
        room_id: impl Into<String>,
        label: FeatureVector,
        game: BimatrixGame,
        transformation: Transformation,
        n_tables: u32,
        seed_policy: u32,
        rng: &mut R,
    ) -> Result<(Room, Vec<RoomEvent>), MatchError> {
        if n_tables == 0 || seed_policy > n_tables {
            return Err(MatchError::InvalidRoom { n_tables, seed_policy });
        }
        let mut events = vec![RoomEvent::Opened { room_id: room_id.into(), label, transformation, game }];
        events.extend((0..n_tables).map(|table_id| RoomEvent::TableOpened { table_id }));
        let mut ids: Vec<u32> = (0..n_tables).collect();
        ids.shuffle(rng);
        let mut seeded: Vec<u32> = ids.into_iter().take(seed_policy as usize).collect();
        seeded.sort_unstable();
        for table_id in seeded {
            let action = if rng.gen_bool(0.5) { Action::Second } else { Action::First };
            events.push(RoomEvent::SeedPlaced { table_id, action });
        }
        let room = Room::replay(&events)?;
        Ok((room, events))
    }

    /// Rebuilds a room from its history.
    pub fn replay(events: &[RoomEvent]) -> Result<Room, MatchError> {
        let Some(RoomEvent::Opened { room_id, label, transformation, game }) = events.first() else {
            return Err(MatchError::Corrupt("room history must start with Opened".into()));
        };
        let mut room = Room {
            room_id: room_id.clone(),
            label: *label,
            transformation: *transformation,
            game: game.clone(),
            tables: Vec::new(),
            p2_history: Vec::new(),
            history: vec![events[0].clone()],
            seats: BTreeMap::new(),
            awaiting: BTreeSet::new(),
            empty: BTreeSet::new(),
        };
        for e in &events[1..] {
            room.apply(e.clone())?;
        }
        Ok(room)
    }

    /// Applies one event, checking it against the current state.
    pub fn apply(&mut self, event: RoomEvent) -> Result<(), MatchError> {
        let corrupt = |what: &str| MatchError::Corrupt(format!("room {}: {what}", self.room_id));
        match &event {
            RoomEvent::Opened { .. } => return Err(corrupt("opened twice")),
            RoomEvent::TableOpened { table_id } => {
                if *table_id as usize != self.tables.len() {
                    return Err(corrupt("table ids must be dense"));
                }
                self.tables.push(Table::empty(*table_id));
                self.empty.insert(*table_id);
            }
            RoomEvent::SeedPlaced { table_id, action } => {
                let t = self.tables.get_mut(*table_id as usize).ok_or_else(|| corrupt("unknown table"))?;
                if t.status != TableStatus::Empty || t.player1.is_some() {
                    return Err(corrupt("seed on an occupied table"));
                }
                t.pending = Some(PendingMove { action: *action, source: Source::Seed, session_id: None });
                t.status = TableStatus::AwaitingPlayer2;
                self.empty.remove(table_id);
                self.awaiting.insert(*table_id);
            }
            RoomEvent::Seated { seat } => {
                if self.seats.contains_key(&seat.session_id) {
                    return Err(corrupt("session seated twice"));
                }
                let t = self.tables.get_mut(seat.table_id as usize).ok_or_else(|| corrupt("unknown table"))?;
                let eligible = match seat.role {
                    Role::Player1 => t.status == TableStatus::Empty,
                    Role::Player2 => t.status == TableStatus::AwaitingPlayer2,
                };
                if !eligible || t.seat_of(seat.role).is_some() {
                    return Err(corrupt("seat not available"));
                }
                *t.seat_of_mut(seat.role) = Some(seat.session_id.clone());
                match seat.role {
                    Role::Player1 => self.empty.remove(&seat.table_id),
                    Role::Player2 => self.awaiting.remove(&seat.table_id),
                };
                self.seats.insert(seat.session_id.clone(), seat.clone());
            }
            RoomEvent::MoveSubmitted { table_id, session_id, action, source } => {
                let t = self.tables.get_mut(*table_id as usize).ok_or_else(|| corrupt("unknown table"))?;
                if t.status != TableStatus::Empty || t.player1.as_ref() != Some(session_id) {
                    return Err(corrupt("Player-1 move without the seat"));
                }
                t.pending = Some(PendingMove { action: *action, source: *source, session_id: Some(session_id.clone()) });
                t.status = TableStatus::AwaitingPlayer2;
                if t.player2.is_none() {
                    self.awaiting.insert(*table_id);
                }
            }
            RoomEvent::TrialResolved { resolution: r } => {
                let t = self.tables.get_mut(r.table_id as usize).ok_or_else(|| corrupt("unknown table"))?;
                if t.status != TableStatus::AwaitingPlayer2 || t.player2.as_ref() != Some(&r.p2_session) {
                    return Err(corrupt("resolution without a pending move and a Player 2"));
                }
                t.status = TableStatus::Resolved;
                self.p2_history.push(r.a2);
            }
            RoomEvent::SeatReleased { seat } => {
                let t = self.tables.get_mut(seat.table_id as usize).ok_or_else(|| corrupt("unknown table"))?;
                if t.seat_of(seat.role).as_ref() != Some(&seat.session_id) {
                    return Err(corrupt("releasing a seat that is not held"));
                }
                *t.seat_of_mut(seat.role) = None;
                match (seat.role, t.status) {
                    (Role::Player1, TableStatus::Empty) => self.empty.insert(seat.table_id),
                    (Role::Player2, TableStatus::AwaitingPlayer2) => self.awaiting.insert(seat.table_id),
                    _ => false,
                };
                self.seats.remove(&seat.session_id);
            }
        }
        self.history.push(event);
        Ok(())
    }

    fn commit(&mut self, events: Vec<RoomEvent>) -> Vec<RoomEvent> {
        for e in &events {
            self.apply(e.clone()).expect("operations emit valid events");
        }
        events
    }

    pub fn game(&self) -> &BimatrixGame {
        &self.game
    }

    pub fn tables(&self) -> &[Table] {
        &self.tables
    }

    pub fn table(&self, table_id: u32) -> Option<&Table> {
        self.tables.get(table_id as usize)
    }

    pub fn history(&self) -> &[RoomEvent] {
        &self.history
    }

    /// Canonical Player-2 moves resolved in this room.
    pub fn p2_history(&self) -> &[Action] {
        &self.p2_history
    }

    pub fn live_seat(&self, session_id: &str) -> Option<Seat> {
        self.seats.get(session_id).cloned()
    }

    pub fn live_seats(&self) -> Vec<Seat> {
        self.tables
            .iter()
            .flat_map(|t| {
                Role::ALL.into_iter().filter_map(move |role| {
                    t.seat_of(role).as_ref().map(|s| Seat { session_id: s.clone(), table_id: t.table_id, role })
                })
            })
            .collect()
    }

    /// Checks the seat and eligibility indexes against the tables and the
    /// one-seat-per-session rule.
    pub fn audit(&self) -> Result<(), String> {
        let seats: BTreeMap<String, Seat> = self.live_seats().into_iter().map(|s| (s.session_id.clone(), s)).collect();
        if seats.len() != self.live_seats().len() {
            return Err(format!("room {}: a session holds two seats", self.room_id));
        }
        if seats != self.seats {
            return Err(format!("room {}: seat index out of date", self.room_id));
        }
        let awaiting: BTreeSet<u32> = self
            .tables
            .iter()
            .filter(|t| t.status == TableStatus::AwaitingPlayer2 && t.player2.is_none())
            .map(|t| t.table_id)
            .collect();
        let empty: BTreeSet<u32> =
            self.tables.iter().filter(|t| t.status == TableStatus::Empty && t.player1.is_none()).map(|t| t.table_id).collect();
        if awaiting != self.awaiting || empty != self.empty {
            return Err(format!("room {}: eligibility index out of date", self.room_id));
        }
        for t in &self.tables {
            if (t.status == TableStatus::AwaitingPlayer2) != t.pending.is_some() && t.status != TableStatus::Resolved {
                return Err(format!("room {} table {}: pending move and status disagree", self.room_id, t.table_id));
            }
        }
        Ok(())
    }

    /// Chooses a seat for `session_id` without changing the room: Player 2
    /// at a table awaiting one (never against its own move) if any, else
    /// Player 1 at an empty table. Picks uniformly among eligible tables.
    pub fn plan_seat<R: Rng + ?Sized>(&self, session_id: &str, rng: &mut R) -> Result<Seat, MatchError> {
        if self.live_seat(session_id).is_some() {
            return Err(MatchError::AlreadySeated(session_id.to_string()));
        }
        let own = |id: &u32| {
            self.tables[*id as usize].pending.as_ref().and_then(|p| p.session_id.as_deref()) == Some(session_id)
        };
        let awaiting: Vec<u32> = self.awaiting.iter().copied().filter(|id| !own(id)).collect();
        let (pool, role) = if awaiting.is_empty() {
            (self.empty.iter().copied().collect(), Role::Player1)
        } else {
            (awaiting, Role::Player2)
        };
        let table_id = *pool.choose(rng).ok_or_else(|| MatchError::RoomFull(self.room_id.clone()))?;
        Ok(Seat { session_id: session_id.to_string(), table_id, role })
    }

    /// [`Room::plan_seat`], applied.
    pub fn seat<R: Rng + ?Sized>(&mut self, session_id: &str, rng: &mut R) -> Result<(Seat, Vec<RoomEvent>), MatchError> {
        let seat = self.plan_seat(session_id, rng)?;
        let events = self.commit(vec![RoomEvent::Seated { seat: seat.clone() }]);
        Ok((seat, events))
    }

    /// Seating for a session whose previous seat has been released.
    pub fn reseat<R: Rng + ?Sized>(&mut self, session_id: &str, rng: &mut R) -> Result<(Seat, Vec<RoomEvent>), MatchError> {
        self.seat(session_id, rng)
    }

    /// Opens `n` more empty tables.
    pub fn add_tables(&mut self, n: u32) -> Vec<RoomEvent> {
        let start = self.tables.len() as u32;
        self.commit((start..start + n).map(|table_id| RoomEvent::TableOpened { table_id }).collect())
    }

    /// The outcome and events of submitting a canonical move for a live
    /// seat, without changing the room. A Player-1 move leaves the table
    /// awaiting Player 2; a Player-2 move resolves it. Either way the mover's
    /// seat is released.
    pub fn plan_move(
        &self,
        seat: &Seat,
        action: Action,
        source: Source,
    ) -> Result<(MoveOutcome, Vec<RoomEvent>), MatchError> {
        let table = self.tables.get(seat.table_id as usize).ok_or(MatchError::UnknownTable(seat.table_id))?;
        if table.seat_of(seat.role).as_deref() != Some(seat.session_id.as_str()) {
            return Err(MatchError::StaleSeat(seat.clone()));
        }
        let release = RoomEvent::SeatReleased { seat: seat.clone() };
        match seat.role {
            Role::Player1 => {
                if table.pending.is_some() {
                    return Err(MatchError::DuplicateMove(seat.clone()));
                }
                let submitted = RoomEvent::MoveSubmitted {
                    table_id: seat.table_id,
                    session_id: seat.session_id.clone(),
                    action,
                    source,
                };
                Ok((MoveOutcome::Pending, vec![submitted, release]))
            }
            Role::Player2 => {
                if table.status == TableStatus::Resolved {
                    return Err(MatchError::DuplicateMove(seat.clone()));
                }
                let pending = table.pending.clone().expect("awaiting tables hold a move");
                let resolution = Resolution {
                    table_id: seat.table_id,
                    a1: pending.action,
                    a2: action,
                    payoffs: self.game.payoff(pending.action, action),
                    p1_source: pending.source,
                    p2_source: source,
                    p1_session: pending.session_id,
                    p2_session: seat.session_id.clone(),
                };
                let resolved = RoomEvent::TrialResolved { resolution: resolution.clone() };
                Ok((MoveOutcome::Resolved(resolution), vec![resolved, release]))
            }
        }
    }

    /// [`Room::plan_move`], applied.
    pub fn submit_move(
        &mut self,
        seat: &Seat,
        action: Action,
        source: Source,
    ) -> Result<(MoveOutcome, Vec<RoomEvent>), MatchError> {
        let (outcome, events) = self.plan_move(seat, action, source)?;
        Ok((outcome, self.commit(events)))
    }

    /// Releases `session_id`'s live seat, if any. A released Player-1 seat
    /// with no move frees the table; a pending move stays for a future
    /// Player 2.
    pub fn release(&mut self, session_id: &str) -> Vec<RoomEvent> {
        match self.live_seat(session_id) {
            Some(seat) => self.commit(vec![RoomEvent::SeatReleased { seat }]),
            None => Vec::new(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::viewer_presentation;
    use crate::rng::stream;

    fn game() -> BimatrixGame {
        BimatrixGame::from_tuples("g", [[(0, 0), (1, 7)], [(1, 7), (0, 0)]])
    }

    fn room(n: u32, seeds: u32, seed: u64) -> Room {
        Room::open("r", "000".parse().unwrap(), game(), Transformation::Identity, n, seeds, &mut stream(seed, 0)).unwrap().0
    }

    #[test]
    fn seed_policy_extremes() {
        assert!(room(5, 0, 1).tables().iter().all(|t| t.status == TableStatus::Empty));
        let full = room(5, 5, 1);
        assert!(full.tables().iter().all(|t| t.status == TableStatus::AwaitingPlayer2
            && t.pending.as_ref().unwrap().source == Source::Seed));
        assert!(Room::open("r", "000".parse().unwrap(), game(), Transformation::Identity, 2, 3, &mut stream(0, 0)).is_err());
    }

    #[test]
    fn seed_moves_are_uniform() {
        let mut seconds = 0;
        for i in 0..10_000 {
            let r = room(1, 1, i);
            if r.tables()[0].pending.as_ref().unwrap().action == Action::Second {
                seconds += 1;
            }
        }
        let f = f64::from(seconds) / 10_000.0;
        assert!((f - 0.5).abs() <= 0.01, "{f}");
    }

    #[test]
    fn arrivals_prefer_ongoing_games() {
        let mut rng = stream(3, 3);
        let mut r = room(1, 1, 0);
        let (seat, _) = r.seat("a", &mut rng).unwrap();
        assert_eq!((seat.table_id, seat.role), (0, Role::Player2));
        assert!(matches!(r.seat("b", &mut rng), Err(MatchError::RoomFull(_))));

        let mut r = room(3, 0, 0);
        let (seat, _) = r.seat("a", &mut rng).unwrap();
        assert_eq!(seat.role, Role::Player1);
        assert!(matches!(r.seat("a", &mut rng), Err(MatchError::AlreadySeated(_))));
    }

    #[test]
    fn seeded_table_resolves_with_a_seed_source() {
        let mut rng = stream(0, 0);
        let mut r = room(1, 1, 0);
        let (seat, _) = r.seat("h", &mut rng).unwrap();
        let (outcome, _) = r.submit_move(&seat, Action::First, Source::Human).unwrap();
        let MoveOutcome::Resolved(res) = outcome else { panic!("expected resolution") };
        assert_eq!(res.p1_source, Source::Seed);
        assert_eq!(res.payoffs, game().payoff(res.a1, Action::First));
        assert_eq!(r.table(0).unwrap().status, TableStatus::Resolved);
        assert!(matches!(r.submit_move(&seat, Action::First, Source::Human), Err(MatchError::StaleSeat(_))));
        assert!(r.live_seats().is_empty());
    }

    #[test]
    fn never_paired_with_itself() {
        let mut rng = stream(8, 0);
        let mut r = room(6, 0, 0);
        for round in 0..6 {
            let (seat, _) = r.reseat("solo", &mut rng).unwrap();
            assert_eq!(seat.role, Role::Player1, "round {round}");
            let (o, _) = r.submit_move(&seat, Action::First, Source::Human).unwrap();
            assert_eq!(o, MoveOutcome::Pending);
        }
        assert!(matches!(r.seat("solo", &mut rng), Err(MatchError::RoomFull(_))));
        let (seat, _) = r.seat("other", &mut rng).unwrap();
        assert_eq!(seat.role, Role::Player2);
    }

    #[test]
    fn resolved_payoffs_are_presentation_invariant() {
        let g = BimatrixGame::from_tuples("g", [[(1, 2), (3, 4)], [(5, 6), (7, 8)]]);
        for t in Transformation::ALL {
            for d1 in Action::ALL {
                for d2 in Action::ALL {
                    let (mut r, _) = Room::open("r", "000".parse().unwrap(), g.clone(), t, 1, 0, &mut stream(0, 0)).unwrap();
                    let p1 = viewer_presentation(&g, Role::Player1, t);
                    let p2 = viewer_presentation(&g, Role::Player2, t);
                    let mut rng = stream(0, 1);
                    let (s1, _) = r.seat("a", &mut rng).unwrap();
                    r.submit_move(&s1, p1.to_canonical(d1), Source::Human).unwrap();
                    let (s2, _) = r.seat("b", &mut rng).unwrap();
                    let (o, _) = r.submit_move(&s2, p2.to_canonical(d2), Source::Human).unwrap();
                    let MoveOutcome::Resolved(res) = o else { panic!() };
                    let own = p2.displayed_cell(d2, d1);
                    assert_eq!(res.payoffs, g.payoff(p1.to_canonical(d1), p2.to_canonical(d2)));
                    assert_eq!(p2.own_payoff(own), res.payoffs.u2);
                }
            }
        }
    }

    #[test]
    fn history_replays_to_the_same_room() {
        let mut rng = stream(4, 4);
        let mut r = room(4, 2, 9);
        for s in ["a", "b", "c", "d"] {
            let (seat, _) = r.seat(s, &mut rng).unwrap();
            r.submit_move(&seat, Action::Second, Source::Agent).unwrap();
        }
        r.add_tables(2);
        let (_, _) = r.seat("e", &mut rng).unwrap();
        r.release("e");
        assert_eq!(Room::replay(r.history()).unwrap(), r);
        r.audit().unwrap();
    }
}
