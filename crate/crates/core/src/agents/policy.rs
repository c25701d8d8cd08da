use super::AgentError;
use crate::features::{is_stable, pure_nash_equilibria, FeatureVector};
use crate::game::{Action, BimatrixGame, Presentation, Role};
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PolicyKind {
    UniformRandom,
    /// Best response to the opponent's last `memory` moves.
    MyopicBestResponse,
    /// Best response to every opponent move seen so far.
    FictitiousPlay,
    /// The unique equilibrium in stable games, fictitious play otherwise.
    EquilibriumSeeker,
}

impl FromStr for PolicyKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().replace(['-', '_'], "").as_str() {
            "uniform" | "uniformrandom" | "random" => Ok(PolicyKind::UniformRandom),
            "myopic" | "myopicbestresponse" | "bestresponse" => Ok(PolicyKind::MyopicBestResponse),
            "fictitious" | "fictitiousplay" | "fp" => Ok(PolicyKind::FictitiousPlay),
            "equilibrium" | "equilibriumseeker" | "seeker" => Ok(PolicyKind::EquilibriumSeeker),
            _ => Err(format!("unknown policy `{s}`")),
        }
    }
}

impl fmt::Display for PolicyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(match self {
            PolicyKind::UniformRandom => "uniform_random",
            PolicyKind::MyopicBestResponse => "myopic_best_response",
            PolicyKind::FictitiousPlay => "fictitious_play",
            PolicyKind::EquilibriumSeeker => "equilibrium_seeker",
        })
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TieBreak {
    #[default]
    Uniform,
    First,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AgentPolicy {
    pub kind: PolicyKind,
    /// Laplace pseudo-count added to each opponent action.
    pub pseudo_count: f64,
    /// Probability of replacing the chosen action with a uniform one.
    pub epsilon: f64,
    pub tie_break: TieBreak,
    /// Window of the myopic best response.
    pub memory: usize,
}

impl AgentPolicy {
    pub fn new(kind: PolicyKind) -> Self {
        AgentPolicy { kind, pseudo_count: 1.0, epsilon: 0.0, tie_break: TieBreak::Uniform, memory: 3 }
    }

    pub fn validate(&self) -> Result<(), AgentError> {
        if !(0.0..=1.0).contains(&self.epsilon) {
            return Err(AgentError::InvalidPolicy(format!("epsilon {} outside [0, 1]", self.epsilon)));
        }
        if self.pseudo_count.is_nan() || self.pseudo_count < 0.0 {
            return Err(AgentError::InvalidPolicy(format!("negative pseudo-count {}", self.pseudo_count)));
        }
        Ok(())
    }

    /// Chooses a displayed action for the viewer of `view`.
    pub fn act<R: Rng + ?Sized>(
        &self,
        view: &Presentation,
        label: FeatureVector,
        beliefs: &Beliefs,
        rng: &mut R,
    ) -> Action {
        if self.epsilon > 0.0 && rng.gen_bool(self.epsilon) {
            return uniform(rng);
        }
        let game = view.transformation.inverse().apply(&view.displayed);
        let canonical = match self.kind {
            PolicyKind::UniformRandom => return uniform(rng),
            PolicyKind::MyopicBestResponse => {
                let counts = beliefs.counts(label, view.role, Some(self.memory));
                self.best_response(&game, view.role, counts, rng)
            }
            PolicyKind::FictitiousPlay => {
                let counts = beliefs.counts(label, view.role, None);
                self.best_response(&game, view.role, counts, rng)
            }
            PolicyKind::EquilibriumSeeker => match equilibrium_action(&game, view.role) {
                Some(a) => a,
                None => self.best_response(&game, view.role, beliefs.counts(label, view.role, None), rng),
            },
        };
        view.to_displayed(canonical)
    }

    /// Canonical best response of `role` to smoothed opponent counts.
    pub fn best_response<R: Rng + ?Sized>(
        &self,
        game: &BimatrixGame,
        role: Role,
        counts: [usize; 2],
        rng: &mut R,
    ) -> Action {
        let weights = counts.map(|c| c as f64 + self.pseudo_count);
        let value = |own: Action| -> f64 {
            Action::ALL
                .iter()
                .map(|&other| {
                    let cell = match role {
                        Role::Player1 => game.payoff(own, other),
                        Role::Player2 => game.payoff(other, own),
                    };
                    weights[other.index()] * f64::from(cell.of(role))
                })
                .sum()
        };
        let (v0, v1) = (value(Action::First), value(Action::Second));
        let scale = weights[0] + weights[1];
        if (v0 - v1).abs() <= 1e-9 * scale.max(1.0) {
            match self.tie_break {
                TieBreak::Uniform => uniform(rng),
                TieBreak::First => Action::First,
            }
        } else if v0 > v1 {
            Action::First
        } else {
            Action::Second
        }
    }
}

impl Default for AgentPolicy {
    fn default() -> Self {
        AgentPolicy::new(PolicyKind::EquilibriumSeeker)
    }
}

fn uniform<R: Rng + ?Sized>(rng: &mut R) -> Action {
    if rng.gen_bool(0.5) {
        Action::Second
    } else {
        Action::First
    }
}

/// `role`'s component of the unique equilibrium, if the game is stable.
pub fn equilibrium_action(game: &BimatrixGame, role: Role) -> Option<Action> {
    if !is_stable(game) {
        return None;
    }
    let (a1, a2) = pure_nash_equilibria(game)[0];
    Some(match role {
        Role::Player1 => a1,
        Role::Player2 => a2,
    })
}

/// Opponent moves observed per game and own role, in canonical orientation.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Beliefs {
    observed: BTreeMap<(FeatureVector, Role), Vec<Action>>,
}

impl Beliefs {
    pub fn observe(&mut self, label: FeatureVector, own_role: Role, opponent: Action) {
        self.observed.entry((label, own_role)).or_default().push(opponent);
    }

    /// Opponent action counts, optionally over the most recent `window`.
    pub fn counts(&self, label: FeatureVector, own_role: Role, window: Option<usize>) -> [usize; 2] {
        let seen = self.observed.get(&(label, own_role)).map_or(&[][..], Vec::as_slice);
        let start = window.map_or(0, |w| seen.len().saturating_sub(w));
        let mut counts = [0, 0];
        for a in &seen[start..] {
            counts[a.index()] += 1;
        }
        counts
    }

    pub fn len(&self) -> usize {
        self.observed.values().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Two agents with persistent beliefs playing `game` in canonical
/// orientation for `rounds` rounds.
pub fn self_play<R: Rng + ?Sized>(
    game: &BimatrixGame,
    label: FeatureVector,
    policy: &AgentPolicy,
    rounds: usize,
    rng: &mut R,
) -> Vec<(Action, Action)> {
    let views = Role::ALL.map(|r| crate::game::viewer_presentation(game, r, crate::game::Transformation::Identity));
    let mut beliefs = [Beliefs::default(), Beliefs::default()];
    (0..rounds)
        .map(|_| {
            let a1 = policy.act(&views[0], label, &beliefs[0], rng);
            let a2 = policy.act(&views[1], label, &beliefs[1], rng);
            beliefs[0].observe(label, Role::Player1, a2);
            beliefs[1].observe(label, Role::Player2, a1);
            (a1, a2)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::features::{generate_space, SpaceConfig};
    use crate::game::{viewer_presentation, Transformation};
    use crate::rng::stream;

    fn fv(s: &str) -> FeatureVector {
        s.parse().unwrap()
    }

    #[test]
    fn uniform_is_balanced() {
        let game = BimatrixGame::from_tuples("g", [[(3, 1), (0, 0)], [(0, 0), (1, 3)]]);
        let view = viewer_presentation(&game, Role::Player1, Transformation::Identity);
        let policy = AgentPolicy::new(PolicyKind::UniformRandom);
        let mut rng = stream(11, 0);
        let firsts = (0..10_000)
            .filter(|_| policy.act(&view, fv("000"), &Beliefs::default(), &mut rng) == Action::First)
            .count();
        let freq = firsts as f64 / 10_000.0;
        assert!((0.49..=0.51).contains(&freq), "{freq}");
    }

    #[test]
    fn myopic_best_response_to_a_left_belief() {
        let game = BimatrixGame::from_tuples("g", [[(3, 1), (0, 0)], [(0, 0), (1, 3)]]);
        let policy = AgentPolicy { pseudo_count: 0.0, ..AgentPolicy::new(PolicyKind::MyopicBestResponse) };
        let mut beliefs = Beliefs::default();
        for _ in 0..3 {
            beliefs.observe(fv("000"), Role::Player1, Action::LEFT);
        }
        let mut rng = stream(1, 1);
        for t in Transformation::ALL {
            let view = viewer_presentation(&game, Role::Player1, t);
            let displayed = policy.act(&view, fv("000"), &beliefs, &mut rng);
            assert_eq!(view.to_canonical(displayed), Action::TOP, "{t}");
        }
    }

    #[test]
    fn myopic_window_forgets() {
        let mut b = Beliefs::default();
        for a in [Action::First, Action::First, Action::Second] {
            b.observe(fv("000"), Role::Player2, a);
        }
        assert_eq!(b.counts(fv("000"), Role::Player2, Some(1)), [0, 1]);
        assert_eq!(b.counts(fv("000"), Role::Player2, None), [2, 1]);
        assert_eq!(b.counts(fv("000"), Role::Player1, None), [0, 0]);
    }

    #[test]
    fn seeker_plays_the_unique_equilibrium_under_every_presentation() {
        let space = generate_space(&SpaceConfig::default()).unwrap();
        let policy = AgentPolicy::default();
        let mut rng = stream(2, 2);
        for (label, game) in space.games.iter().filter(|(l, _)| l.stability()) {
            let eq = pure_nash_equilibria(game)[0];
            for t in Transformation::ALL {
                for role in Role::ALL {
                    let view = viewer_presentation(game, role, t);
                    for _ in 0..10 {
                        let a = view.to_canonical(policy.act(&view, *label, &Beliefs::default(), &mut rng));
                        assert_eq!(a, if role == Role::Player1 { eq.0 } else { eq.1 });
                    }
                }
            }
        }
    }

    #[test]
    fn fictitious_self_play_converges_in_stable_games() {
        let space = generate_space(&SpaceConfig::default()).unwrap();
        let policy = AgentPolicy::new(PolicyKind::FictitiousPlay);
        for (label, game) in space.games.iter().filter(|(l, _)| l.stability()) {
            let eq = pure_nash_equilibria(game)[0];
            let play = self_play(game, *label, &policy, 100, &mut stream(5, u64::from(label.raw())));
            assert!(play[80..].iter().all(|&p| p == eq), "{label}");
        }
    }

    #[test]
    fn invalid_parameters() {
        let bad = AgentPolicy { epsilon: 1.5, ..AgentPolicy::default() };
        assert!(bad.validate().is_err());
        let bad = AgentPolicy { pseudo_count: -1.0, ..AgentPolicy::default() };
        assert!(bad.validate().is_err());
        assert!(AgentPolicy::default().validate().is_ok());
    }
}
