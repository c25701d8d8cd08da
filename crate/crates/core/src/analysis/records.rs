use crate::features::{ComparisonPair, FeatureVector};
use crate::game::{Action, PayoffPair, Role, Transformation};
use crate::protocol::Stage;
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use std::io::{self, BufRead, Write};

/// Who produced a move.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Source {
    Human,
    Agent,
    Seed,
}

/// One resolved round, in canonical orientation. Field order is the export
/// column order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Trial {
    pub trial_id: String,
    /// Session that resolved the round.
    pub session_id: String,
    pub condition_id: u32,
    pub game_label: FeatureVector,
    pub transformation: Transformation,
    pub role_of_session: Role,
    pub a1: Action,
    pub a2: Action,
    pub u1: u32,
    pub u2: u32,
    pub p1_source: Source,
    pub p2_source: Source,
    pub stage: Stage,
    pub timestamp: u64,
}

impl Trial {
    pub fn payoffs(&self) -> PayoffPair {
        PayoffPair::new(self.u1, self.u2)
    }

    pub fn involves_seed(&self) -> bool {
        self.p1_source == Source::Seed || self.p2_source == Source::Seed
    }
}

/// A participant's Stage-3 choice.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PreferenceRecord {
    pub session_id: String,
    pub condition_id: u32,
    pub low: FeatureVector,
    pub high: FeatureVector,
    pub chosen: FeatureVector,
}

impl PreferenceRecord {
    pub fn pair(&self) -> ComparisonPair {
        ComparisonPair { low: self.low, high: self.high }
    }

    pub fn chose_high(&self) -> bool {
        self.chosen == self.high
    }
}

/// Trials plus preference records: the unit every analysis consumes.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Dataset {
    pub trials: Vec<Trial>,
    pub preferences: Vec<PreferenceRecord>,
}

impl Dataset {
    pub fn is_empty(&self) -> bool {
        self.trials.is_empty() && self.preferences.is_empty()
    }

    /// Distinct sessions appearing anywhere in the dataset.
    pub fn participants(&self) -> BTreeSet<&str> {
        self.trials
            .iter()
            .map(|t| t.session_id.as_str())
            .chain(self.preferences.iter().map(|p| p.session_id.as_str()))
            .collect()
    }

    pub fn choosers(&self) -> BTreeSet<&str> {
        self.preferences.iter().map(|p| p.session_id.as_str()).collect()
    }

    pub fn extend(&mut self, other: Dataset) {
        self.trials.extend(other.trials);
        self.preferences.extend(other.preferences);
    }
}

/// Writes one JSON record per line.
pub fn write_jsonl<T: Serialize, W: Write>(records: &[T], mut out: W) -> io::Result<()> {
    for r in records {
        serde_json::to_writer(&mut out, r)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

pub fn to_jsonl<T: Serialize>(records: &[T]) -> Vec<u8> {
    let mut buf = Vec::new();
    write_jsonl(records, &mut buf).expect("writing to memory");
    buf
}

/// Reads line-delimited records, skipping blank lines.
pub fn read_jsonl<T: for<'de> Deserialize<'de>, R: BufRead>(input: R) -> io::Result<Vec<T>> {
    let mut out = Vec::new();
    for (n, line) in input.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let rec = serde_json::from_str(&line)
            .map_err(|e| io::Error::new(io::ErrorKind::InvalidData, format!("line {}: {e}", n + 1)))?;
        out.push(rec);
    }
    Ok(out)
}
