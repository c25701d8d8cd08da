//! Published estimates and synthetic datasets shaped like the original
//! study, for tests, examples and the CLI.

use crate::analysis::{Dataset, Estimate, PreferenceRecord, Source, Trial};
use crate::features::{ComparisonPair, FeatureVector, GameSpace};
use crate::game::{Action, Role, Transformation};
use crate::protocol::{all_conditions, Stage};
use crate::rng;
use rand::Rng;
use std::collections::BTreeMap;

/// Reported probabilities of choosing the high game of each pair. The
/// study does not report `110-111` or `101-111`.
pub fn paper_preference_table() -> BTreeMap<ComparisonPair, Estimate> {
    [
        ("000-100", 0.43, 0.22, 0.65),
        ("000-010", 0.86, 0.73, 1.0),
        ("000-001", 0.55, 0.38, 0.72),
        ("100-110", 0.81, 0.64, 0.95),
        ("010-110", 0.50, 0.29, 0.71),
        ("001-011", 0.88, 0.76, 1.0),
        ("010-011", 0.72, 0.55, 0.86),
        ("011-111", 0.63, 0.45, 0.82),
        ("100-101", 0.65, 0.43, 0.83),
        ("001-101", 0.67, 0.52, 0.84),
    ]
    .into_iter()
    .map(|(p, v, lo, hi)| (p.parse().expect("valid pair"), Estimate::reported(v, lo, hi)))
    .collect()
}

/// Reported within-game cooperation rates.
pub fn paper_cooperation_table() -> BTreeMap<FeatureVector, Estimate> {
    [
        ("000", 0.49, 0.43, 0.56),
        ("100", 0.94, 0.90, 0.97),
        ("010", 0.56, 0.49, 0.62),
        ("001", 0.48, 0.41, 0.54),
        ("110", 0.89, 0.84, 0.93),
        ("101", 0.93, 0.90, 0.96),
        ("011", 0.49, 0.43, 0.56),
        ("111", 0.95, 0.92, 0.97),
    ]
    .into_iter()
    .map(|(l, v, lo, hi)| (l.parse().expect("valid label"), Estimate::reported(v, lo, hi)))
    .collect()
}

/// Shape of a synthetic study.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct StudyShape {
    pub participants: usize,
    /// Participants who never reached the choice.
    pub dropped: usize,
    pub trials: usize,
    pub seed_trials: usize,
}

impl StudyShape {
    /// 310 participants, 9 dropped before the choice, 3,951 trials of which
    /// 409 were played against initializing seeds.
    pub const PAPER: StudyShape = StudyShape { participants: 310, dropped: 9, trials: 3_951, seed_trials: 409 };
}

/// A dataset with exactly the given accounting, played in `space` (3
/// features). Trials are spread as evenly as possible over participants,
/// dropped participants last and never past Stage 2; seed trials are spread
/// evenly over all trials; choices follow the reported table (one half
/// where none is reported); moves are uniform.
pub fn synthetic_study(space: &GameSpace, shape: StudyShape, seed: u64) -> Dataset {
    let conditions = all_conditions(space.width());
    let table = paper_preference_table();
    let base = shape.trials / shape.participants;
    let extra = shape.trials % shape.participants;
    assert!(shape.dropped <= shape.participants - extra, "dropped participants must take the short share");
    let mut rng = rng::keyed(seed, "fixture/study");
    let mut data = Dataset::default();
    let mut trial_index = 0usize;

    for p in 0..shape.participants {
        let condition = conditions[p % conditions.len()];
        let session_id = format!("p{p:04}");
        let dropped = p >= shape.participants - shape.dropped;
        let count = base + usize::from(p < extra);
        let chosen = (!dropped).then(|| {
            let prob = table.get(&condition.pair).map_or(0.5, |e| e.value);
            if rng.gen_bool(prob) {
                condition.pair.high
            } else {
                condition.pair.low
            }
        });
        let per_stage = count.div_ceil(3).max(1);
        for k in 0..count {
            let stage = match (k / per_stage, dropped) {
                (0, _) => Stage::Stage1,
                (1, _) | (_, true) => Stage::Stage2,
                _ => Stage::Stage4,
            };
            let label = condition.game_for(stage, chosen).expect("play stage");
            let game = space.game(label).expect("label in space");
            let a1 = if rng.gen_bool(0.5) { Action::Second } else { Action::First };
            let a2 = if rng.gen_bool(0.5) { Action::Second } else { Action::First };
            let u = game.payoff(a1, a2);
            let is_seed = (trial_index + 1) * shape.seed_trials / shape.trials
                > trial_index * shape.seed_trials / shape.trials;
            let t = Transformation::ALL[rng.gen_range(0..8)];
            data.trials.push(Trial {
                trial_id: format!("{session_id}-{:02}", k + 1),
                session_id: session_id.clone(),
                condition_id: condition.condition_id,
                game_label: label,
                transformation: t,
                role_of_session: Role::Player2,
                a1,
                a2,
                u1: u.u1,
                u2: u.u2,
                p1_source: if is_seed { Source::Seed } else { Source::Human },
                p2_source: Source::Human,
                stage,
                timestamp: trial_index as u64,
            });
            trial_index += 1;
        }
        if let Some(chosen) = chosen {
            data.preferences.push(PreferenceRecord {
                session_id,
                condition_id: condition.condition_id,
                low: condition.pair.low,
                high: condition.pair.high,
                chosen,
            });
        }
    }
    data
}

/// [`synthetic_study`] with the original study's accounting.
pub fn paper_shaped_dataset(space: &GameSpace, seed: u64) -> Dataset {
    synthetic_study(space, StudyShape::PAPER, seed)
}
