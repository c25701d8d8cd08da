use super::preference::{prefer, Experience, PreferenceModel};
use super::AgentError;
use crate::features::{ComparisonPair, FeatureVector, GameSpace};
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

/// When a walk under a table or experienced-payoff model moves to a
/// neighbor. Lexicographic models always move to a preferred neighbor.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Acceptance {
    /// Move iff a Bernoulli draw chooses the neighbor; experienced-payoff
    /// ties are a coin flip.
    #[default]
    Draw,
    /// Move iff the point probability exceeds one half, or the neighbor's
    /// mean experienced payoff is strictly higher.
    Majority,
    /// Move iff the whole interval lies above one half.
    SignificantMajority,
}

impl FromStr for Acceptance {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().replace(['-', '_'], "").as_str() {
            "draw" => Ok(Acceptance::Draw),
            "majority" => Ok(Acceptance::Majority),
            "significant" | "significantmajority" => Ok(Acceptance::SignificantMajority),
            _ => Err(format!("unknown acceptance rule `{s}`")),
        }
    }
}

impl fmt::Display for Acceptance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(match self {
            Acceptance::Draw => "draw",
            Acceptance::Majority => "majority",
            Acceptance::SignificantMajority => "significant_majority",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WalkResult {
    pub start: FeatureVector,
    /// Visited vertices, starting with `start`.
    pub trajectory: Vec<FeatureVector>,
    pub attractor: FeatureVector,
    pub steps: usize,
    /// The walk stopped because no neighbor was accepted, not because it
    /// ran out of steps.
    pub absorbed: bool,
    /// Edges a table model had no estimate for; never taken.
    pub unknown_edges: Vec<ComparisonPair>,
}

impl WalkResult {
    pub fn path_string(&self) -> String {
        self.trajectory.iter().map(|l| l.to_string()).collect::<Vec<_>>().join(">")
    }
}

/// Walks the hypercube from `start`, moving to the first accepted neighbor
/// each step. Lexicographic models scan neighbors by feature priority;
/// other models scan them left to right.
pub fn run_walk<R: Rng + ?Sized>(
    space: &GameSpace,
    start: FeatureVector,
    model: &PreferenceModel,
    acceptance: Acceptance,
    max_steps: usize,
    experience: &Experience,
    rng: &mut R,
) -> Result<WalkResult, AgentError> {
    space.game(start)?;
    model.validate(space.width())?;
    let order: Vec<usize> = model.priority().unwrap_or_else(|| (0..space.width()).collect());
    let mut current = start;
    let mut trajectory = vec![start];
    let mut unknown_edges = Vec::new();
    let mut absorbed = false;

    while trajectory.len() <= max_steps {
        let mut next = None;
        for &p in &order {
            let neighbor = current.flip(p);
            if accepts(model, acceptance, space, current, neighbor, experience, &mut unknown_edges, rng)? {
                next = Some(neighbor);
                break;
            }
        }
        match next {
            Some(n) => {
                current = n;
                trajectory.push(n);
            }
            None => {
                absorbed = true;
                break;
            }
        }
    }

    unknown_edges.sort();
    unknown_edges.dedup();
    Ok(WalkResult { start, steps: trajectory.len() - 1, attractor: current, trajectory, absorbed, unknown_edges })
}

#[allow(clippy::too_many_arguments)]
fn accepts<R: Rng + ?Sized>(
    model: &PreferenceModel,
    acceptance: Acceptance,
    space: &GameSpace,
    from: FeatureVector,
    to: FeatureVector,
    experience: &Experience,
    unknown: &mut Vec<ComparisonPair>,
    rng: &mut R,
) -> Result<bool, AgentError> {
    match model {
        PreferenceModel::Lexicographic(order) => Ok(PreferenceModel::lexicographic_prefers(order, to, from)),
        PreferenceModel::ExperiencedPayoff => match acceptance {
            Acceptance::Draw => Ok(prefer(model, ComparisonPair::between(from, to)?, space, experience, rng)? == to),
            // ties hold the walk in place
            _ => {
                let mean = |l| experience.mean(l).ok_or(AgentError::MissingExperience(l));
                Ok(mean(to)? > mean(from)?)
            }
        },
        PreferenceModel::EmpiricalTable(_) => {
            let Some(e) = model.table_estimate(from, to)? else {
                unknown.push(ComparisonPair::between(from, to)?);
                return Ok(false);
            };
            Ok(match acceptance {
                Acceptance::Draw => rng.gen_bool(e.value.clamp(0.0, 1.0)),
                Acceptance::Majority => e.value > 0.5,
                Acceptance::SignificantMajority => e.ci_low > 0.5,
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::features::{generate_space, SpaceConfig};
    use crate::fixtures::paper_preference_table;
    use crate::rng::stream;

    fn fv(s: &str) -> FeatureVector {
        s.parse().unwrap()
    }

    fn labels(w: &WalkResult) -> Vec<String> {
        w.trajectory.iter().map(|l| l.to_string()).collect()
    }

    #[test]
    fn lexicographic_walks_climb_to_the_top() {
        let space = generate_space(&SpaceConfig::default()).unwrap();
        let mut rng = stream(0, 0);
        let w = run_walk(&space, fv("000"), &PreferenceModel::binmore(), Acceptance::Draw, 10, &Experience::default(), &mut rng)
            .unwrap();
        assert_eq!(labels(&w), ["000", "100", "110", "111"]);
        assert!(w.absorbed);
        for start in FeatureVector::all(3) {
            let w = run_walk(&space, start, &PreferenceModel::binmore(), Acceptance::Draw, 10, &Experience::default(), &mut rng)
                .unwrap();
            assert_eq!(w.attractor, fv("111"));
            assert_eq!(w.steps, 3 - start.popcount() as usize);
        }
    }

    #[test]
    fn step_budget_stops_without_absorbing() {
        let space = generate_space(&SpaceConfig::default()).unwrap();
        let w = run_walk(&space, fv("000"), &PreferenceModel::binmore(), Acceptance::Draw, 1, &Experience::default(), &mut stream(0, 0))
            .unwrap();
        assert_eq!(labels(&w), ["000", "100"]);
        assert!(!w.absorbed);
    }

    #[test]
    fn table_walks_under_each_threshold() {
        let space = generate_space(&SpaceConfig::default()).unwrap();
        let model = PreferenceModel::EmpiricalTable(paper_preference_table());
        let walk = |acceptance| {
            run_walk(&space, fv("000"), &model, acceptance, 10, &Experience::default(), &mut stream(0, 0)).unwrap()
        };
        let significant = walk(Acceptance::SignificantMajority);
        assert_eq!(labels(&significant), ["000", "010", "011"]);
        assert!(significant.absorbed);

        let majority = walk(Acceptance::Majority);
        assert_eq!(labels(&majority), ["000", "010", "011", "111"]);
        assert!(!majority.trajectory.contains(&fv("110")));
        assert!(majority.unknown_edges.contains(&"110-111".parse().unwrap()));
    }
}
