use super::bootstrap::BootstrapConfig;
use super::records::Dataset;
use super::stats::{
    canonical_paths, cooperation_rate, filter_seed_trials, layer_summary, path_gradient_partial,
    preference_proportion, CooperationMode, Estimate, GradientReport, LayerSummary,
};
use super::AnalysisError;
use crate::features::{comparison_pairs, ComparisonPair, FeatureVector, GameSpace};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::io::Write;

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ReportConfig {
    pub bootstrap: BootstrapConfig,
    pub cooperation: CooperationMode,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counts {
    pub participants: usize,
    /// Participants who reached the choice.
    pub choosers: usize,
    /// Participants with trials but no choice.
    pub dropped: usize,
    pub trials: usize,
    pub seed_trials: usize,
    pub analyzed_trials: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairEstimate {
    pub pair: ComparisonPair,
    pub estimate: Estimate,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub counts: Counts,
    pub cooperation: BTreeMap<FeatureVector, Estimate>,
    pub preferences: Vec<PairEstimate>,
    /// Present when every label has analyzed trials.
    pub cooperation_layers: Option<LayerSummary>,
    pub paths: Vec<GradientReport>,
}

/// Analyzes `dataset` against the space it was played in. Labels or pairs
/// without data are omitted; path steps without data are flagged missing.
pub fn report(dataset: &Dataset, space: &GameSpace, config: &ReportConfig) -> Result<Report, AnalysisError> {
    if dataset.is_empty() {
        return Err(AnalysisError::EmptyDataset);
    }
    for t in &dataset.trials {
        let game = space.game(t.game_label).map_err(|e| AnalysisError::InconsistentTrial {
            trial_id: t.trial_id.clone(),
            reason: e.to_string(),
        })?;
        if game.payoff(t.a1, t.a2) != t.payoffs() {
            return Err(AnalysisError::InconsistentTrial {
                trial_id: t.trial_id.clone(),
                reason: format!("payoffs {} do not match game {}", t.payoffs(), t.game_label),
            });
        }
    }

    let analyzed = filter_seed_trials(&dataset.trials);
    let participants = dataset.participants().len();
    let choosers = dataset.choosers().len();
    let counts = Counts {
        participants,
        choosers,
        dropped: participants - choosers,
        trials: dataset.trials.len(),
        seed_trials: dataset.trials.len() - analyzed.len(),
        analyzed_trials: analyzed.len(),
    };

    let labels: Vec<FeatureVector> = space.labels().collect();
    let cooperation = labels
        .par_iter()
        .filter_map(|&label| match cooperation_rate(&analyzed, label, config.cooperation, &config.bootstrap) {
            Ok(e) => Some(Ok((label, e))),
            Err(AnalysisError::EmptyCell(_)) => None,
            Err(e) => Some(Err(e)),
        })
        .collect::<Result<BTreeMap<_, _>, _>>()?;

    let preferences = comparison_pairs(space)
        .par_iter()
        .filter_map(|&pair| match preference_proportion(&dataset.preferences, pair, &config.bootstrap) {
            Ok(estimate) => Some(Ok(PairEstimate { pair, estimate })),
            Err(AnalysisError::EmptyCell(_)) => None,
            Err(e) => Some(Err(e)),
        })
        .collect::<Result<Vec<_>, _>>()?;

    let cooperation_layers = layer_summary(&cooperation, space.width()).ok();
    let table: BTreeMap<ComparisonPair, Estimate> = preferences.iter().map(|p| (p.pair, p.estimate)).collect();
    let paths = canonical_paths(space.width())
        .iter()
        .map(|p| path_gradient_partial(&table, p))
        .collect::<Result<Vec<_>, _>>()?;

    Ok(Report { counts, cooperation, preferences, cooperation_layers, paths })
}

impl Report {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    /// Columns: label, layer, value, ci_low, ci_high, n.
    pub fn write_cooperation_csv<W: Write>(&self, out: W) -> Result<(), AnalysisError> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["label", "layer", "value", "ci_low", "ci_high", "n"])?;
        for (label, e) in &self.cooperation {
            w.write_record([
                label.to_string(),
                label.layer().to_string(),
                fmt6(e.value),
                fmt6(e.ci_low),
                fmt6(e.ci_high),
                e.n.to_string(),
            ])?;
        }
        w.flush().map_err(|e| AnalysisError::Csv(e.to_string()))
    }

    /// Columns: pair, low, high, value, ci_low, ci_high, n.
    pub fn write_preferences_csv<W: Write>(&self, out: W) -> Result<(), AnalysisError> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["pair", "low", "high", "value", "ci_low", "ci_high", "n"])?;
        for p in &self.preferences {
            let e = p.estimate;
            w.write_record([
                p.pair.to_string(),
                p.pair.low.to_string(),
                p.pair.high.to_string(),
                fmt6(e.value),
                fmt6(e.ci_low),
                fmt6(e.ci_high),
                e.n.to_string(),
            ])?;
        }
        w.flush().map_err(|e| AnalysisError::Csv(e.to_string()))
    }

    /// Columns: path, step, from, to, value, ci_low, ci_high, flag,
    /// lock_in_prone. Missing steps leave the numeric columns empty.
    pub fn write_paths_csv<W: Write>(&self, out: W) -> Result<(), AnalysisError> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["path", "step", "from", "to", "value", "ci_low", "ci_high", "flag", "lock_in_prone"])?;
        for g in &self.paths {
            let path = g.path_string();
            for (i, s) in g.steps.iter().enumerate() {
                let (v, lo, hi) = s
                    .estimate
                    .map(|e| (fmt6(e.value), fmt6(e.ci_low), fmt6(e.ci_high)))
                    .unwrap_or_default();
                let flag = serde_json::to_value(s.flag).expect("flag serializes");
                w.write_record([
                    path.clone(),
                    (i + 1).to_string(),
                    s.from.to_string(),
                    s.to.to_string(),
                    v,
                    lo,
                    hi,
                    flag.as_str().unwrap_or_default().to_string(),
                    g.lock_in_prone.to_string(),
                ])?;
            }
        }
        w.flush().map_err(|e| AnalysisError::Csv(e.to_string()))
    }
}

fn fmt6(x: f64) -> String {
    format!("{x:.6}")
}
