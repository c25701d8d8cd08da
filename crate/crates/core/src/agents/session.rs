use super::policy::{AgentPolicy, Beliefs};
use super::preference::{prefer, Experience, PreferenceModel};
use super::AgentError;
use crate::analysis::{Dataset, PreferenceRecord, Source, Trial};
use crate::features::{FeatureVector, GameSpace};
use crate::game::{viewer_presentation, Role, Transformation};
use crate::protocol::{Condition, Stage, DEFAULT_ROUNDS_PER_STAGE};
use crate::rng;
use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;

#[derive(Clone, Debug, PartialEq)]
pub struct SimulationConfig {
    pub policy: AgentPolicy,
    pub model: PreferenceModel,
    pub rounds_per_stage: u32,
}

impl Default for SimulationConfig {
    fn default() -> Self {
        SimulationConfig {
            policy: AgentPolicy::default(),
            model: PreferenceModel::binmore(),
            rounds_per_stage: DEFAULT_ROUNDS_PER_STAGE,
        }
    }
}

impl SimulationConfig {
    pub fn validate(&self, width: usize) -> Result<(), AgentError> {
        if self.rounds_per_stage == 0 {
            return Err(AgentError::InvalidConfig("rounds_per_stage must be at least 1".into()));
        }
        self.policy.validate()?;
        self.model.validate(width)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SessionRecord {
    pub trials: Vec<Trial>,
    pub preference: PreferenceRecord,
}

/// Plays one participant through both play stages, the choice and the
/// chosen game. Every round draws a role and a presentation uniformly; the
/// counterpart is a fresh agent with the same policy and no history.
pub fn simulate_session<R: Rng + ?Sized>(
    space: &GameSpace,
    condition: &Condition,
    config: &SimulationConfig,
    session_id: &str,
    rng: &mut R,
) -> Result<SessionRecord, AgentError> {
    let mut beliefs = Beliefs::default();
    let mut experience = Experience::default();
    let mut trials = Vec::with_capacity(3 * config.rounds_per_stage as usize);
    let mut chosen = None;
    let mut preference = None;

    for stage in [Stage::Stage1, Stage::Stage2, Stage::Choice, Stage::Stage4] {
        if stage == Stage::Choice {
            let c = prefer(&config.model, condition.pair, space, &experience, rng)?;
            chosen = Some(c);
            preference = Some(PreferenceRecord {
                session_id: session_id.to_string(),
                condition_id: condition.condition_id,
                low: condition.pair.low,
                high: condition.pair.high,
                chosen: c,
            });
            continue;
        }
        let label = condition.game_for(stage, chosen).expect("play stage has a game");
        let game = space.game(label)?;
        for _ in 0..config.rounds_per_stage {
            let role = *Role::ALL.choose(rng).expect("two roles");
            let t = *Transformation::ALL.choose(rng).expect("eight kinds");
            let mine = viewer_presentation(game, role, t);
            let theirs = viewer_presentation(game, role.opponent(), t);
            let own = mine.to_canonical(config.policy.act(&mine, label, &beliefs, rng));
            let other = theirs.to_canonical(config.policy.act(&theirs, label, &Beliefs::default(), rng));
            let (a1, a2) = if role == Role::Player1 { (own, other) } else { (other, own) };
            let payoffs = game.payoff(a1, a2);
            beliefs.observe(label, role, other);
            experience.record(label, payoffs.of(role));
            trials.push(Trial {
                trial_id: format!("{session_id}-{:02}", trials.len() + 1),
                session_id: session_id.to_string(),
                condition_id: condition.condition_id,
                game_label: label,
                transformation: t,
                role_of_session: role,
                a1,
                a2,
                u1: payoffs.u1,
                u2: payoffs.u2,
                p1_source: Source::Agent,
                p2_source: Source::Agent,
                stage,
                timestamp: trials.len() as u64,
            });
        }
    }

    Ok(SessionRecord { trials, preference: preference.expect("choice stage ran") })
}

/// Condition index for each participant: blocks of `conditions.len()`
/// participants each cover every condition once, in seeded order.
pub fn balanced_assignment(n_conditions: usize, n_participants: usize, seed: u64) -> Vec<usize> {
    let mut out = Vec::with_capacity(n_participants);
    let mut block = 0u64;
    while out.len() < n_participants {
        let mut perm: Vec<usize> = (0..n_conditions).collect();
        perm.shuffle(&mut rng::keyed(seed, &format!("assignment/{block}")));
        out.extend(perm.into_iter().take(n_participants - out.len()));
        block += 1;
    }
    out
}

/// Simulates `n_participants` sessions in parallel. Participant `i` is
/// `sim-{i:05}` and draws from stream `i` of `seed`, so the dataset does not
/// depend on scheduling.
pub fn simulate_cohort(
    space: &GameSpace,
    conditions: &[Condition],
    n_participants: usize,
    config: &SimulationConfig,
    seed: u64,
) -> Result<Dataset, AgentError> {
    if conditions.is_empty() {
        return Err(AgentError::NoConditions);
    }
    config.validate(space.width())?;
    let assignment = balanced_assignment(conditions.len(), n_participants, seed);
    let sessions = assignment
        .par_iter()
        .enumerate()
        .map(|(i, &c)| {
            let mut rng = rng::stream(seed, i as u64);
            simulate_session(space, &conditions[c], config, &format!("sim-{i:05}"), &mut rng)
        })
        .collect::<Result<Vec<_>, _>>()?;
    let mut data = Dataset::default();
    for s in sessions {
        data.trials.extend(s.trials);
        data.preferences.push(s.preference);
    }
    Ok(data)
}

/// Every condition whose pair contains `label`.
pub fn conditions_with(conditions: &[Condition], label: FeatureVector) -> Vec<Condition> {
    conditions.iter().filter(|c| c.pair.contains(label)).copied().collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::to_jsonl;
    use crate::features::{generate_space, SpaceConfig};
    use crate::protocol::all_conditions;
    use std::collections::BTreeMap;

    #[test]
    fn eighteen_tagged_trials_per_session() {
        let space = generate_space(&SpaceConfig::default()).unwrap();
        let cond = all_conditions(3)[5];
        let s = simulate_session(&space, &cond, &SimulationConfig::default(), "p", &mut rng::stream(1, 0)).unwrap();
        assert_eq!(s.trials.len(), 18);
        assert!(s.trials.iter().all(|t| t.condition_id == cond.condition_id && t.stage.is_play()));
        assert!(s.trials[..6].iter().all(|t| t.game_label == cond.pair.low));
        assert!(s.trials[6..12].iter().all(|t| t.game_label == cond.pair.high));
        assert!(s.trials[12..].iter().all(|t| t.game_label == s.preference.chosen));
        for t in &s.trials {
            assert_eq!(space.game(t.game_label).unwrap().payoff(t.a1, t.a2), t.payoffs());
        }
    }

    #[test]
    fn longer_sessions() {
        let space = generate_space(&SpaceConfig::default()).unwrap();
        let config = SimulationConfig { rounds_per_stage: 20, ..SimulationConfig::default() };
        let s = simulate_session(&space, &all_conditions(3)[0], &config, "p", &mut rng::stream(1, 0)).unwrap();
        assert_eq!(s.trials.len(), 60);
        let zero = SimulationConfig { rounds_per_stage: 0, ..SimulationConfig::default() };
        assert!(simulate_cohort(&space, &all_conditions(3), 1, &zero, 0).is_err());
    }

    #[test]
    fn one_participant_per_condition() {
        let a = balanced_assignment(96, 96, 7);
        let mut sorted = a.clone();
        sorted.sort_unstable();
        assert_eq!(sorted, (0..96).collect::<Vec<_>>());
        let b = balanced_assignment(96, 200, 7);
        let mut counts = BTreeMap::new();
        for c in b {
            *counts.entry(c).or_insert(0) += 1;
        }
        assert!(counts.values().all(|&n| n == 2 || n == 3));
    }

    #[test]
    fn cohort_is_deterministic_and_sized() {
        let space = generate_space(&SpaceConfig::default()).unwrap();
        let conds = vec![all_conditions(3)[0]];
        let a = simulate_cohort(&space, &conds, 300, &SimulationConfig::default(), 9).unwrap();
        assert_eq!(a.trials.len(), 5_400);
        let b = simulate_cohort(&space, &conds, 300, &SimulationConfig::default(), 9).unwrap();
        assert_eq!(to_jsonl(&a.trials), to_jsonl(&b.trials));
        assert_eq!(to_jsonl(&a.preferences), to_jsonl(&b.preferences));
    }

    #[test]
    fn role_and_presentation_draws_are_uniform() {
        let space = generate_space(&SpaceConfig::default()).unwrap();
        let conds = all_conditions(3);
        let data = simulate_cohort(&space, &conds, 600, &SimulationConfig::default(), 4).unwrap();
        let trials = &data.trials[..10_000];
        let mut counts: BTreeMap<(Role, Transformation), usize> = BTreeMap::new();
        for t in trials {
            *counts.entry((t.role_of_session, t.transformation)).or_default() += 1;
        }
        assert_eq!(counts.len(), 16);
        for (k, n) in counts {
            let f = n as f64 / trials.len() as f64;
            assert!((f - 1.0 / 16.0).abs() <= 0.01, "{k:?}: {f}");
        }
    }
}
