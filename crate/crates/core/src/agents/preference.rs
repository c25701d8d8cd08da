use super::AgentError;
use crate::analysis::{step_estimate, Estimate};
use crate::features::{ComparisonPair, Feature, FeatureVector, GameSpace};
use rand::Rng;
use std::collections::BTreeMap;

/// Points a participant has earned, per game.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Experience {
    payoffs: BTreeMap<FeatureVector, Vec<f64>>,
}

impl Experience {
    pub fn record(&mut self, label: FeatureVector, points: impl Into<f64>) {
        self.payoffs.entry(label).or_default().push(points.into());
    }

    pub fn mean(&self, label: FeatureVector) -> Option<f64> {
        let xs = self.payoffs.get(&label).filter(|xs| !xs.is_empty())?;
        Some(xs.iter().sum::<f64>() / xs.len() as f64)
    }

    pub fn rounds(&self, label: FeatureVector) -> usize {
        self.payoffs.get(&label).map_or(0, Vec::len)
    }
}

impl FromIterator<(FeatureVector, u32)> for Experience {
    fn from_iter<I: IntoIterator<Item = (FeatureVector, u32)>>(iter: I) -> Self {
        let mut e = Experience::default();
        for (l, u) in iter {
            e.record(l, u);
        }
        e
    }
}

/// How a participant chooses between two games.
#[derive(Clone, Debug, PartialEq)]
pub enum PreferenceModel {
    /// Prefers the game with the first differing feature in `order`.
    Lexicographic(Vec<Feature>),
    /// Prefers the game with the higher mean own payoff; ties are uniform.
    ExperiencedPayoff,
    /// Chooses `pair.high` with the stored probability.
    EmpiricalTable(BTreeMap<ComparisonPair, Estimate>),
}

impl PreferenceModel {
    /// Stability, then efficiency, then fairness.
    pub fn binmore() -> Self {
        PreferenceModel::Lexicographic(vec![Feature::Stability, Feature::Efficiency, Feature::Fairness])
    }

    pub fn validate(&self, width: usize) -> Result<(), AgentError> {
        match self {
            PreferenceModel::Lexicographic(order) => {
                let mut positions: Vec<usize> = order.iter().map(|f| f.position()).collect();
                positions.sort_unstable();
                if positions != (0..width).collect::<Vec<_>>() {
                    return Err(AgentError::InvalidModel(format!(
                        "lexicographic order must rank each of the {width} features once"
                    )));
                }
            }
            PreferenceModel::EmpiricalTable(table) => {
                if let Some((pair, _)) = table.iter().find(|(_, e)| !(0.0..=1.0).contains(&e.value)) {
                    return Err(AgentError::InvalidModel(format!("probability for {pair} outside [0, 1]")));
                }
            }
            PreferenceModel::ExperiencedPayoff => {}
        }
        Ok(())
    }

    /// Feature positions in priority order, if the model ranks features.
    pub fn priority(&self) -> Option<Vec<usize>> {
        match self {
            PreferenceModel::Lexicographic(order) => Some(order.iter().map(|f| f.position()).collect()),
            _ => None,
        }
    }

    /// Probability of choosing `to` over `from` under a table model.
    pub fn table_estimate(&self, from: FeatureVector, to: FeatureVector) -> Result<Option<Estimate>, AgentError> {
        match self {
            PreferenceModel::EmpiricalTable(table) => {
                let pair = ComparisonPair::between(from, to)?;
                step_estimate(table, from, to).map_err(|_| AgentError::MissingPair(pair))
            }
            _ => Ok(None),
        }
    }

    /// Whether `a` is strictly preferred to `b` under a lexicographic model.
    pub fn lexicographic_prefers(order: &[Feature], a: FeatureVector, b: FeatureVector) -> bool {
        order
            .iter()
            .map(|f| f.position())
            .find(|&p| a.bit(p) != b.bit(p))
            .is_some_and(|p| a.bit(p))
    }
}

/// The game `model` picks from `pair`.
pub fn prefer<R: Rng + ?Sized>(
    model: &PreferenceModel,
    pair: ComparisonPair,
    space: &GameSpace,
    experience: &Experience,
    rng: &mut R,
) -> Result<FeatureVector, AgentError> {
    space.game(pair.low)?;
    space.game(pair.high)?;
    Ok(match model {
        PreferenceModel::Lexicographic(order) => {
            if PreferenceModel::lexicographic_prefers(order, pair.low, pair.high) {
                pair.low
            } else {
                pair.high
            }
        }
        PreferenceModel::ExperiencedPayoff => {
            let mean = |l| experience.mean(l).ok_or(AgentError::MissingExperience(l));
            let (lo, hi) = (mean(pair.low)?, mean(pair.high)?);
            if hi > lo || (hi == lo && rng.gen_bool(0.5)) {
                pair.high
            } else {
                pair.low
            }
        }
        PreferenceModel::EmpiricalTable(table) => {
            let e = table.get(&pair).ok_or(AgentError::MissingPair(pair))?;
            if rng.gen_bool(e.value.clamp(0.0, 1.0)) {
                pair.high
            } else {
                pair.low
            }
        }
    })
}
