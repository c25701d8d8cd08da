use super::config::PlatformConfig;
use super::events::{Event, EventBody, EventLog};
use super::state::{room_id, RoundResult, Session, State};
use super::PlatformError;
use crate::analysis::{report, to_jsonl, BootstrapConfig, Dataset, PreferenceRecord, Report, ReportConfig, Source, Trial};
use crate::features::{verify_space, FeatureVector, GameSpace};
use crate::game::{viewer_presentation, Action, Axis, Presentation, Role, Transformation};
use crate::matchmaking::{MatchError, MoveOutcome, Room};
use crate::protocol::{all_conditions, Stage};
use crate::rng;
use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;
use std::time::{SystemTime, UNIX_EPOCH};

/// Placeholder reference for the tutorial and quiz screens.
pub const TUTORIAL_REF: &str = "tutorial/v1";

/// Colors of the first and second game of a condition.
pub const GAME_COLORS: [&str; 2] = ["blue", "orange"];

/// Source of event timestamps, in milliseconds.
#[derive(Clone, Debug)]
pub enum Clock {
    System,
    Manual(Arc<AtomicU64>),
}

impl Clock {
    pub fn manual() -> (Clock, Arc<AtomicU64>) {
        let t = Arc::new(AtomicU64::new(0));
        (Clock::Manual(t.clone()), t)
    }

    pub fn now_ms(&self) -> u64 {
        match self {
            Clock::System => SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_millis() as u64),
            Clock::Manual(t) => t.load(Ordering::SeqCst),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SessionDescriptor {
    pub session_id: String,
    pub condition_id: u32,
    pub stage: Stage,
    pub tutorial: String,
}

/// The board as one participant sees it. Cells are displayed row-major,
/// each `[row chooser's points, column chooser's points]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoardView {
    pub cells: [[[u32; 2]; 2]; 2],
    pub chooses: Axis,
    pub role: Role,
    pub color: String,
}

impl BoardView {
    fn of(p: &Presentation, color: &str) -> Self {
        let d = &p.displayed;
        let cell = |r, c| {
            let x = d.cell(Action::ALL[r], Action::ALL[c]);
            [x.u1, x.u2]
        };
        BoardView {
            cells: [[cell(0, 0), cell(0, 1)], [cell(1, 0), cell(1, 1)]],
            chooses: p.chooses,
            role: p.role,
            color: color.to_string(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChoiceOption {
    pub option: usize,
    pub board: BoardView,
}

/// Everything a client needs to render the current screen.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClientView {
    pub session_id: String,
    pub stage: Stage,
    /// 1-based round within the current play stage.
    pub round: Option<u32>,
    pub rounds_per_stage: u32,
    pub board: Option<BoardView>,
    pub choice: Option<Vec<ChoiceOption>>,
    pub bonus: String,
    pub bonus_points: f64,
    pub last_result: Option<RoundResult>,
    pub tutorial: Option<String>,
    pub closed: bool,
}

/// The body of an action request.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ActionRequest {
    /// Leave the tutorial or quiz screen.
    Continue,
    /// A displayed action; `round` guards against replayed submissions.
    Move { action: Action, round: Option<u32> },
}

/// The body of a preference request: an option index from the choice
/// screen or a game label.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PreferenceRequest {
    pub option: Option<usize>,
    pub chosen: Option<FeatureVector>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ActionOutcome {
    pub stage: Stage,
    pub result: Option<RoundResult>,
    /// The trial this move resolved, if it was a Player-2 move.
    pub trial: Option<Trial>,
    pub bonus: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub sessions: usize,
    pub by_stage: BTreeMap<Stage, usize>,
    pub abandoned: usize,
    pub dropped: usize,
    pub events: usize,
    pub report: Option<Report>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExportKind {
    Trials,
    Preferences,
    Summary,
}

impl std::str::FromStr for ExportKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "trials" => Ok(ExportKind::Trials),
            "preferences" => Ok(ExportKind::Preferences),
            "summary" => Ok(ExportKind::Summary),
            _ => Err(format!("unknown export `{s}`")),
        }
    }
}

/// The session service. All mutation goes through [`Service::emit`], which
/// folds an event into the state and appends it to the log, so the state
/// always equals the replay of the log.
#[derive(Debug)]
pub struct Service {
    config: PlatformConfig,
    state: State,
    log: EventLog,
    clock: Clock,
    ready: bool,
    poisoned: bool,
}

impl Service {
    /// Builds the service over `log`, replaying it and then finishing any
    /// command the log was cut off in the middle of.
    pub fn new(space: GameSpace, config: PlatformConfig, log: EventLog, clock: Clock) -> Result<Self, PlatformError> {
        config.validate()?;
        let ready = verify_space(&space).passed() && space.width() == config.features;
        let mut state = State::new(space.clone(), all_conditions(space.width()), config.rounds_per_stage, config.pool_presentations);
        for e in log.events() {
            state.apply(e)?;
        }
        let mut service = Service { config, state, log, clock, ready, poisoned: false };
        service.heal()?;
        Ok(service)
    }

    /// An in-memory service on a manual clock.
    pub fn in_memory(space: GameSpace, config: PlatformConfig) -> Result<(Self, Arc<AtomicU64>), PlatformError> {
        let (clock, handle) = Clock::manual();
        Ok((Service::new(space, config, EventLog::in_memory(), clock)?, handle))
    }

    /// A service persisted under `config.data_dir`, on the system clock.
    pub fn open(space: GameSpace, config: PlatformConfig) -> Result<Self, PlatformError> {
        let log = EventLog::open(&config.log_path())?;
        Service::new(space, config, log, Clock::System)
    }

    pub fn config(&self) -> &PlatformConfig {
        &self.config
    }

    pub fn state(&self) -> &State {
        &self.state
    }

    pub fn events(&self) -> &[Event] {
        self.log.events()
    }

    pub fn is_ready(&self) -> bool {
        self.ready && !self.poisoned
    }

    /// The state rebuilt from the log alone.
    pub fn replayed_state(&self) -> Result<State, PlatformError> {
        let s = &self.state;
        let mut fresh = State::new(s.space.clone(), s.conditions.clone(), s.rounds_per_stage, s.pool_presentations);
        for e in self.log.events() {
            fresh.apply(e)?;
        }
        Ok(fresh)
    }

    fn emit(&mut self, body: EventBody) -> Result<(), PlatformError> {
        if self.poisoned {
            return Err(PlatformError::ServiceNotReady);
        }
        let event = Event { seq: self.log.len() as u64, ts: self.clock.now_ms(), body };
        self.state.apply(&event)?;
        if let Err(e) = self.log.append(event) {
            self.poisoned = true;
            return Err(e);
        }
        Ok(())
    }

    fn command_rng(&self) -> rng::Rng {
        rng::stream(self.config.seed, self.log.len() as u64)
    }

    fn open_session(&self, id: &str) -> Result<&Session, PlatformError> {
        let s = self.state.session(id)?;
        if !s.is_open() {
            return Err(PlatformError::SessionClosed(id.to_string()));
        }
        Ok(s)
    }

    /// Registers a participant in the least-populated condition.
    pub fn create_session(&mut self) -> Result<SessionDescriptor, PlatformError> {
        if !self.is_ready() {
            return Err(PlatformError::ServiceNotReady);
        }
        let mut rng = self.command_rng();
        let min = *self.state.assignments.iter().min().ok_or(PlatformError::ServiceNotReady)?;
        let candidates: Vec<u32> =
            (0..self.state.assignments.len() as u32).filter(|&c| self.state.assignments[c as usize] == min).collect();
        let condition_id = *candidates.choose(&mut rng).expect("non-empty");
        let session_id = format!("s{:05}-{:08x}", self.state.order.len(), rng.gen::<u32>());
        self.emit(EventBody::SessionCreated { session_id: session_id.clone(), condition_id })?;
        Ok(SessionDescriptor { session_id, condition_id, stage: Stage::Tutorial, tutorial: TUTORIAL_REF.to_string() })
    }

    /// The current screen; never changes state.
    pub fn get_state(&self, id: &str) -> Result<ClientView, PlatformError> {
        let s = self.state.session(id)?;
        let rounds_per_stage = self.state.rounds_per_stage;
        let board = match &s.seat {
            Some((rid, seat)) if s.is_open() => {
                let room = &self.state.rooms[rid];
                let p = viewer_presentation(room.game(), seat.role, room.transformation);
                Some(BoardView::of(&p, self.color_of(s, room.label)))
            }
            _ => None,
        };
        let choice = (s.stage == Stage::Choice && s.is_open()).then(|| self.choice_options(s));
        Ok(ClientView {
            session_id: s.session_id.clone(),
            stage: s.stage,
            round: (s.stage.is_play() && s.is_open()).then_some(s.rounds_done + 1),
            rounds_per_stage,
            board,
            choice,
            bonus: format!("{:.2}", s.bonus_points()),
            bonus_points: s.bonus_points(),
            last_result: s.last_result.clone(),
            tutorial: matches!(s.stage, Stage::Tutorial | Stage::Quiz).then(|| TUTORIAL_REF.to_string()),
            closed: !s.is_open(),
        })
    }

    fn color_of(&self, s: &Session, label: FeatureVector) -> &'static str {
        if label == s.condition.first_game() {
            GAME_COLORS[0]
        } else {
            GAME_COLORS[1]
        }
    }

    /// Both games at the condition's presentation, left/right order fixed
    /// per session.
    fn choice_order(s: &Session) -> [FeatureVector; 2] {
        let pair = s.condition.pair;
        if rng::stable_hash(s.session_id.as_bytes()) & 1 == 0 {
            [pair.low, pair.high]
        } else {
            [pair.high, pair.low]
        }
    }

    fn choice_options(&self, s: &Session) -> Vec<ChoiceOption> {
        Service::choice_order(s)
            .iter()
            .enumerate()
            .map(|(option, &label)| {
                let game = self.state.space.game(label).expect("condition games are in the space");
                let p = viewer_presentation(game, Role::Player1, s.condition.transformation);
                ChoiceOption { option, board: BoardView::of(&p, self.color_of(s, label)) }
            })
            .collect()
    }

    /// The open round's game and presentation, for simulated clients.
    pub fn presentation(&self, id: &str) -> Result<(FeatureVector, Presentation), PlatformError> {
        let s = self.open_session(id)?;
        let (rid, seat) = s.seat.as_ref().ok_or(PlatformError::NoOpenRound)?;
        let room = &self.state.rooms[rid];
        Ok((room.label, viewer_presentation(room.game(), seat.role, room.transformation)))
    }

    pub fn submit_action(&mut self, id: &str, request: ActionRequest) -> Result<ActionOutcome, PlatformError> {
        self.submit_action_as(id, request, Source::Human)
    }

    /// [`Service::submit_action`] with an explicit move source.
    pub fn submit_action_as(
        &mut self,
        id: &str,
        request: ActionRequest,
        source: Source,
    ) -> Result<ActionOutcome, PlatformError> {
        let s = self.open_session(id)?;
        match request {
            ActionRequest::Continue => {
                if !matches!(s.stage, Stage::Tutorial | Stage::Quiz) {
                    return Err(PlatformError::WrongStage { stage: s.stage, expected: "tutorial or quiz" });
                }
                self.advance(id)?;
                Ok(self.outcome(id, None))
            }
            ActionRequest::Move { action, round } => {
                if !s.stage.is_play() {
                    return Err(PlatformError::WrongStage { stage: s.stage, expected: "a play stage" });
                }
                let expected = s.rounds_done + 1;
                if let Some(r) = round.filter(|&r| r != expected) {
                    return Err(PlatformError::DuplicateSubmission { expected, got: r });
                }
                let (rid, seat) = s.seat.clone().ok_or(PlatformError::NoOpenRound)?;
                let room = &self.state.rooms[&rid];
                let canonical = viewer_presentation(room.game(), seat.role, room.transformation).to_canonical(action);
                let (outcome, _) = room.plan_move(&seat, canonical, source).map_err(PlatformError::from)?;
                let trial = match outcome {
                    MoveOutcome::Pending => {
                        self.emit(EventBody::MoveSubmitted {
                            room_id: rid,
                            table_id: seat.table_id,
                            session_id: id.to_string(),
                            action: canonical,
                            source,
                        })?;
                        None
                    }
                    MoveOutcome::Resolved(resolution) => {
                        self.emit(EventBody::TrialResolved { room_id: rid, resolution })?;
                        self.state.trials.last().cloned()
                    }
                };
                let s = self.state.session(id)?;
                if s.rounds_done >= self.state.rounds_per_stage {
                    self.advance(id)?;
                } else {
                    self.seat_next(id)?;
                }
                Ok(self.outcome(id, trial))
            }
        }
    }

    fn outcome(&self, id: &str, trial: Option<Trial>) -> ActionOutcome {
        let s = &self.state.sessions[id];
        ActionOutcome { stage: s.stage, result: s.last_result.clone(), trial, bonus: format!("{:.2}", s.bonus_points()) }
    }

    /// Moves to the next stage and opens its first round if it is a play
    /// stage.
    fn advance(&mut self, id: &str) -> Result<(), PlatformError> {
        let stage = self.state.session(id)?.stage;
        let to = stage.next().ok_or(PlatformError::WrongStage { stage, expected: "an unfinished stage" })?;
        self.emit(EventBody::StageAdvanced { session_id: id.to_string(), to })?;
        if to.is_play() {
            self.seat_next(id)?;
        }
        Ok(())
    }

    /// Seats the session for its next round at a uniformly drawn
    /// presentation, opening or growing the room as needed.
    fn seat_next(&mut self, id: &str) -> Result<(), PlatformError> {
        let mut rng = self.command_rng();
        let s = self.state.session(id)?;
        let label = s.condition.game_for(s.stage, s.chosen).ok_or(PlatformError::NoOpenRound)?;
        let t = *Transformation::ALL.choose(&mut rng).expect("eight kinds");
        let rid = room_id(label, t);
        if !self.state.rooms.contains_key(&rid) {
            let game = self.state.space.game(label)?.clone();
            let (_, events) =
                Room::open(rid.clone(), label, game, t, self.config.tables_per_room, self.config.seed_policy, &mut rng)?;
            self.emit(EventBody::RoomOpened { room_id: rid.clone(), events })?;
        }
        let seat = match self.state.rooms[&rid].plan_seat(id, &mut rng) {
            Err(MatchError::RoomFull(_)) => {
                let have = self.state.rooms[&rid].tables().len() as u32;
                let count = self.config.tables_per_room.min(self.config.max_tables_per_room.saturating_sub(have));
                if count == 0 {
                    return Err(PlatformError::RoomFull(rid));
                }
                self.emit(EventBody::TablesAdded { room_id: rid.clone(), count })?;
                self.state.rooms[&rid].plan_seat(id, &mut rng)?
            }
            other => other?,
        };
        self.emit(EventBody::Seated { room_id: rid, seat })
    }

    pub fn submit_preference(&mut self, id: &str, request: PreferenceRequest) -> Result<(), PlatformError> {
        let s = self.open_session(id)?;
        if s.stage != Stage::Choice {
            return Err(PlatformError::WrongStage { stage: s.stage, expected: "choice" });
        }
        let chosen = match (request.option, request.chosen) {
            (Some(i), None) => *Service::choice_order(s)
                .get(i)
                .ok_or_else(|| PlatformError::InvalidChoice(format!("no option {i}")))?,
            (None, Some(label)) => label,
            _ => return Err(PlatformError::InvalidChoice("give exactly one of `option` and `chosen`".into())),
        };
        let pair = s.condition.pair;
        if !pair.contains(chosen) {
            return Err(PlatformError::InvalidChoice(format!("{chosen} is not one of {pair}")));
        }
        let record = PreferenceRecord {
            session_id: id.to_string(),
            condition_id: s.condition.condition_id,
            low: pair.low,
            high: pair.high,
            chosen,
        };
        self.emit(EventBody::PreferenceChosen { record })?;
        self.advance(id)
    }

    pub fn submit_survey(&mut self, id: &str, answers: serde_json::Value) -> Result<(), PlatformError> {
        let s = self.open_session(id)?;
        if s.stage != Stage::Survey {
            return Err(PlatformError::WrongStage { stage: s.stage, expected: "survey" });
        }
        self.emit(EventBody::SurveySubmitted { session_id: id.to_string(), answers })?;
        self.advance(id)
    }

    /// Abandons every open session idle for longer than the timeout,
    /// releasing its seat. Returns the abandoned ids.
    pub fn sweep(&mut self) -> Result<Vec<String>, PlatformError> {
        let now = self.clock.now_ms();
        let limit = self.config.timeout_secs.saturating_mul(1000);
        let idle: Vec<String> = self
            .state
            .order
            .iter()
            .filter(|id| {
                let s = &self.state.sessions[*id];
                s.is_open() && now.saturating_sub(s.last_active) > limit
            })
            .cloned()
            .collect();
        for id in &idle {
            self.emit(EventBody::SessionAbandoned { session_id: id.clone() })?;
        }
        Ok(idle)
    }

    /// Removes a session after a technical error. Only sessions that have
    /// not reached the choice can be dropped; their trials are kept.
    pub fn drop_session(&mut self, id: &str) -> Result<(), PlatformError> {
        let s = self.open_session(id)?;
        if s.stage >= Stage::Choice {
            return Err(PlatformError::WrongStage { stage: s.stage, expected: "a stage before the choice" });
        }
        self.emit(EventBody::SessionDropped { session_id: id.to_string() })
    }

    /// Finishes commands cut short by a crash: completes stage changes and
    /// reopens rounds.
    fn heal(&mut self) -> Result<(), PlatformError> {
        let ids: Vec<String> = self.state.order.clone();
        for id in ids {
            loop {
                let s = &self.state.sessions[&id];
                if !s.is_open() {
                    break;
                }
                let finished_stage = (s.stage.is_play() && s.rounds_done >= self.state.rounds_per_stage)
                    || (s.stage == Stage::Choice && s.chosen.is_some())
                    || (s.stage == Stage::Survey && s.survey.is_some());
                if finished_stage {
                    self.advance(&id)?;
                } else if s.stage.is_play() && s.seat.is_none() {
                    self.seat_next(&id)?;
                } else {
                    break;
                }
            }
        }
        Ok(())
    }

    pub fn dataset(&self) -> Dataset {
        Dataset { trials: self.state.trials.clone(), preferences: self.exported_preferences() }
    }

    fn exported_preferences(&self) -> Vec<PreferenceRecord> {
        self.state
            .preferences
            .iter()
            .filter(|p| !self.state.sessions[&p.session_id].dropped)
            .cloned()
            .collect()
    }

    pub fn summary(&self) -> Summary {
        let mut by_stage = BTreeMap::new();
        for s in self.state.sessions.values() {
            *by_stage.entry(s.stage).or_insert(0) += 1;
        }
        let config = ReportConfig {
            bootstrap: BootstrapConfig { resamples: self.config.bootstrap_resamples, seed: self.config.seed, ..Default::default() },
            ..Default::default()
        };
        Summary {
            sessions: self.state.sessions.len(),
            by_stage,
            abandoned: self.state.sessions.values().filter(|s| s.abandoned).count(),
            dropped: self.state.sessions.values().filter(|s| s.dropped).count(),
            events: self.log.len(),
            report: report(&self.dataset(), &self.state.space, &config).ok(),
        }
    }

    pub fn export(&self, kind: ExportKind) -> Vec<u8> {
        match kind {
            ExportKind::Trials => to_jsonl(&self.state.trials),
            ExportKind::Preferences => to_jsonl(&self.exported_preferences()),
            ExportKind::Summary => {
                let mut s = serde_json::to_vec_pretty(&self.summary()).expect("summary serializes");
                s.push(b'\n');
                s
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::features::{generate_space, SpaceConfig};

    fn service() -> Service {
        let space = generate_space(&SpaceConfig::default()).unwrap();
        Service::in_memory(space, PlatformConfig::default()).unwrap().0
    }

    fn play_through(svc: &mut Service, id: &str) {
        loop {
            let v = svc.get_state(id).unwrap();
            match v.stage {
                Stage::Tutorial | Stage::Quiz => drop(svc.submit_action(id, ActionRequest::Continue).unwrap()),
                Stage::Choice => svc.submit_preference(id, PreferenceRequest { option: Some(1), chosen: None }).unwrap(),
                Stage::Survey => svc.submit_survey(id, serde_json::json!({"age": 30})).unwrap(),
                Stage::Done => break,
                _ => {
                    let req = ActionRequest::Move { action: Action::First, round: v.round };
                    svc.submit_action(id, req).unwrap();
                }
            }
        }
    }

    #[test]
    fn a_session_runs_to_the_end() {
        let mut svc = service();
        let d = svc.create_session().unwrap();
        play_through(&mut svc, &d.session_id);
        let s = svc.state().session(&d.session_id).unwrap();
        assert_eq!(s.stage, Stage::Done);
        assert_eq!(s.rounds_total, 18);
        assert!(s.chosen.is_some());
        assert_eq!(svc.replayed_state().unwrap(), *svc.state());
    }

    #[test]
    fn stage_guards() {
        let mut svc = service();
        let id = svc.create_session().unwrap().session_id;
        let mv = ActionRequest::Move { action: Action::First, round: None };
        assert!(matches!(svc.submit_action(&id, mv), Err(PlatformError::WrongStage { .. })));
        svc.submit_action(&id, ActionRequest::Continue).unwrap();
        svc.submit_action(&id, ActionRequest::Continue).unwrap();
        assert_eq!(svc.get_state(&id).unwrap().round, Some(1));
        svc.submit_action(&id, ActionRequest::Move { action: Action::First, round: Some(1) }).unwrap();
        let again = ActionRequest::Move { action: Action::First, round: Some(1) };
        assert_eq!(svc.submit_action(&id, again), Err(PlatformError::DuplicateSubmission { expected: 2, got: 1 }));
        assert!(matches!(svc.get_state("nope"), Err(PlatformError::UnknownSession(_))));
    }

    #[test]
    fn reads_do_not_change_state() {
        let mut svc = service();
        let id = svc.create_session().unwrap().session_id;
        let before = svc.events().len();
        for _ in 0..3 {
            svc.get_state(&id).unwrap();
        }
        assert_eq!(svc.events().len(), before);
    }

    #[test]
    fn idle_sessions_are_abandoned() {
        let space = generate_space(&SpaceConfig::default()).unwrap();
        let (mut svc, clock) = Service::in_memory(space, PlatformConfig::default()).unwrap();
        let id = svc.create_session().unwrap().session_id;
        clock.store(600_001, Ordering::SeqCst);
        assert_eq!(svc.sweep().unwrap(), vec![id.clone()]);
        assert!(matches!(svc.submit_action(&id, ActionRequest::Continue), Err(PlatformError::SessionClosed(_))));
    }
}
