//! Session stages and experiment conditions shared by the simulator and the
//! live platform.

use crate::features::{pairs_for_width, ComparisonPair, FeatureVector};
use crate::game::Transformation;
use serde::{Deserialize, Serialize};
use std::fmt;

/// Rounds in each play stage unless configured otherwise.
pub const DEFAULT_ROUNDS_PER_STAGE: u32 = 6;

/// Where a participant is in the protocol. Transitions only move forward.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stage {
    Tutorial,
    Quiz,
    Stage1,
    Stage2,
    Choice,
    Stage4,
    Survey,
    Done,
}

impl Stage {
    pub fn next(self) -> Option<Stage> {
        use Stage::*;
        Some(match self {
            Tutorial => Quiz,
            Quiz => Stage1,
            Stage1 => Stage2,
            Stage2 => Choice,
            Choice => Stage4,
            Stage4 => Survey,
            Survey => Done,
            Done => return None,
        })
    }

    pub fn is_play(self) -> bool {
        matches!(self, Stage::Stage1 | Stage::Stage2 | Stage::Stage4)
    }

    pub fn name(self) -> &'static str {
        use Stage::*;
        match self {
            Tutorial => "tutorial",
            Quiz => "quiz",
            Stage1 => "stage1",
            Stage2 => "stage2",
            Choice => "choice",
            Stage4 => "stage4",
            Survey => "survey",
            Done => "done",
        }
    }
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.name())
    }
}

/// One experimental condition: a comparison pair at one of its eight
/// presentations. Stage 1 plays `pair.low`, Stage 2 plays `pair.high`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Condition {
    pub condition_id: u32,
    pub pair: ComparisonPair,
    /// Presentation of the choice screen.
    pub transformation: Transformation,
}

impl Condition {
    pub fn first_game(&self) -> FeatureVector {
        self.pair.low
    }

    pub fn second_game(&self) -> FeatureVector {
        self.pair.high
    }

    /// Game played in a play stage, given the Stage-3 choice.
    pub fn game_for(&self, stage: Stage, chosen: Option<FeatureVector>) -> Option<FeatureVector> {
        match stage {
            Stage::Stage1 => Some(self.first_game()),
            Stage::Stage2 => Some(self.second_game()),
            Stage::Stage4 => chosen,
            _ => None,
        }
    }
}

/// Every pair at every presentation: `pairs x 8` conditions, ids ascending.
pub fn all_conditions(width: usize) -> Vec<Condition> {
    pairs_for_width(width)
        .into_iter()
        .flat_map(|pair| Transformation::ALL.into_iter().map(move |t| (pair, t)))
        .enumerate()
        .map(|(i, (pair, transformation))| Condition { condition_id: i as u32, pair, transformation })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ninety_six_conditions() {
        let c = all_conditions(3);
        assert_eq!(c.len(), 96);
        let distinct: std::collections::HashSet<_> = c.iter().map(|c| (c.pair, c.transformation)).collect();
        assert_eq!(distinct.len(), 96);
        assert_eq!(all_conditions(4).len(), 256);
    }

    #[test]
    fn stages_only_move_forward() {
        let mut s = Stage::Tutorial;
        let mut seen = vec![s];
        while let Some(n) = s.next() {
            assert!(n > s);
            s = n;
            seen.push(s);
        }
        assert_eq!(seen.len(), 8);
        assert_eq!(seen.iter().filter(|s| s.is_play()).count(), 3);
    }
}
