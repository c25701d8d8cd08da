use super::bootstrap::{bootstrap_ci, BootstrapConfig};
use super::records::{PreferenceRecord, Trial};
use super::AnalysisError;
use crate::features::{ComparisonPair, FeatureVector};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;

/// A proportion with its confidence bounds. `n == 0` marks a value copied
/// from a published table that does not report its sample size.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub n: usize,
}

impl Estimate {
    /// Builds an estimate, widening the bounds to contain `value` and
    /// clipping them to `[0, 1]`.
    pub fn new(value: f64, ci_low: f64, ci_high: f64, n: usize) -> Self {
        Estimate {
            value,
            ci_low: ci_low.min(value).max(0.0),
            ci_high: ci_high.max(value).min(1.0),
            n,
        }
    }

    /// A published value with its interval.
    pub const fn reported(value: f64, ci_low: f64, ci_high: f64) -> Self {
        Estimate { value, ci_low, ci_high, n: 0 }
    }

    /// Proportion of `true` outcomes with a percentile-bootstrap interval
    /// drawn from the stream named `key`.
    pub fn from_outcomes(outcomes: &[bool], config: &BootstrapConfig, key: &str) -> Result<Self, AnalysisError> {
        let n = outcomes.len();
        if n == 0 {
            return Err(AnalysisError::EmptySample);
        }
        let hits = outcomes.iter().filter(|&&b| b).count();
        let value = hits as f64 / n as f64;
        let samples: Vec<f64> = outcomes.iter().map(|&b| f64::from(u8::from(b))).collect();
        let (lo, hi) = bootstrap_ci(&samples, config.resamples, config.alpha, &mut config.rng_for(key))?;
        Ok(Estimate::new(value, lo, hi, n))
    }

    /// The estimate for the opposite outcome.
    pub fn complement(self) -> Self {
        Estimate { value: 1.0 - self.value, ci_low: 1.0 - self.ci_high, ci_high: 1.0 - self.ci_low, n: self.n }
    }

    pub fn contains(self, x: f64) -> bool {
        self.ci_low <= x && x <= self.ci_high
    }
}

impl fmt::Display for Estimate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:.2} [{:.2}, {:.2}]", self.value, self.ci_low, self.ci_high)?;
        if self.n > 0 {
            write!(f, " n={}", self.n)?;
        }
        Ok(())
    }
}

/// Drops every trial in which either move came from an initializing seed.
pub fn filter_seed_trials(trials: &[Trial]) -> Vec<Trial> {
    trials.iter().filter(|t| !t.involves_seed()).cloned().collect()
}

/// How a realized outcome counts as cooperation.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CooperationMode {
    /// Anything other than `(0, 0)`.
    #[default]
    AnyNonzero,
    /// Both players earned something.
    BothNonzero,
}

pub fn is_cooperative(trial: &Trial, mode: CooperationMode) -> bool {
    match mode {
        CooperationMode::AnyNonzero => trial.u1 != 0 || trial.u2 != 0,
        CooperationMode::BothNonzero => trial.u1 != 0 && trial.u2 != 0,
    }
}

/// Cooperation rate among `trials` of one game. Expects seed trials to be
/// filtered out already.
pub fn cooperation_rate(
    trials: &[Trial],
    label: FeatureVector,
    mode: CooperationMode,
    config: &BootstrapConfig,
) -> Result<Estimate, AnalysisError> {
    let outcomes: Vec<bool> =
        trials.iter().filter(|t| t.game_label == label).map(|t| is_cooperative(t, mode)).collect();
    if outcomes.is_empty() {
        return Err(AnalysisError::EmptyCell(format!("no trials for game {label}")));
    }
    Estimate::from_outcomes(&outcomes, config, &format!("cooperation/{label}"))
}

/// Share of the pair's choosers who picked `pair.high`.
pub fn preference_proportion(
    preferences: &[PreferenceRecord],
    pair: ComparisonPair,
    config: &BootstrapConfig,
) -> Result<Estimate, AnalysisError> {
    let outcomes: Vec<bool> =
        preferences.iter().filter(|p| p.pair() == pair).map(PreferenceRecord::chose_high).collect();
    if outcomes.is_empty() {
        return Err(AnalysisError::EmptyCell(format!("no choices for pair {pair}")));
    }
    Estimate::from_outcomes(&outcomes, config, &format!("preference/{pair}"))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LayerSummary {
    /// Mean estimate per layer, layers ascending.
    pub layer_means: BTreeMap<u32, f64>,
    pub table: BTreeMap<FeatureVector, Estimate>,
}

impl LayerSummary {
    /// Whether each layer's mean is at least the previous layer's.
    pub fn is_monotone(&self) -> bool {
        let means: Vec<f64> = self.layer_means.values().copied().collect();
        means.windows(2).all(|w| w[0] <= w[1])
    }
}

/// Groups per-label estimates by layer. Every label of the `width`-cube
/// must be present.
pub fn layer_summary(estimates: &BTreeMap<FeatureVector, Estimate>, width: usize) -> Result<LayerSummary, AnalysisError> {
    let mut sums: BTreeMap<u32, (f64, usize)> = BTreeMap::new();
    for label in FeatureVector::all(width) {
        let e = estimates.get(&label).ok_or(AnalysisError::MissingLabel(label))?;
        let slot = sums.entry(label.layer()).or_default();
        slot.0 += e.value;
        slot.1 += 1;
    }
    Ok(LayerSummary {
        layer_means: sums.into_iter().map(|(l, (s, k))| (l, s / k as f64)).collect(),
        table: estimates.iter().filter(|(l, _)| l.width() == width).map(|(l, e)| (*l, *e)).collect(),
    })
}

/// How a step along a path relates to indifference.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum StepFlag {
    /// The whole interval lies above one half.
    Advance,
    /// The interval contains one half.
    Neutral,
    /// The whole interval lies below one half.
    Resist,
    /// No estimate for this step.
    Missing,
}

impl StepFlag {
    pub fn of(e: Estimate) -> StepFlag {
        if e.ci_low > 0.5 {
            StepFlag::Advance
        } else if e.ci_high < 0.5 {
            StepFlag::Resist
        } else {
            StepFlag::Neutral
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PathStep {
    pub from: FeatureVector,
    pub to: FeatureVector,
    /// Probability of choosing `to` over `from`.
    pub estimate: Option<Estimate>,
    pub flag: StepFlag,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GradientReport {
    pub path: Vec<FeatureVector>,
    pub steps: Vec<PathStep>,
    /// Some step after the first fails to advance.
    pub lock_in_prone: bool,
}

impl GradientReport {
    pub fn flags(&self) -> Vec<StepFlag> {
        self.steps.iter().map(|s| s.flag).collect()
    }

    pub fn path_string(&self) -> String {
        self.path.iter().map(|l| l.to_string()).collect::<Vec<_>>().join(">")
    }
}

/// Probability of moving `from -> to` according to a pair table.
pub fn step_estimate(
    preferences: &BTreeMap<ComparisonPair, Estimate>,
    from: FeatureVector,
    to: FeatureVector,
) -> Result<Option<Estimate>, AnalysisError> {
    let pair = ComparisonPair::between(from, to)
        .map_err(|_| AnalysisError::InvalidPath(format!("{from} and {to} are not adjacent")))?;
    Ok(preferences.get(&pair).map(|&e| if pair.high == to { e } else { e.complement() }))
}

/// Flags every step of `path`, marking steps without an estimate as
/// [`StepFlag::Missing`].
pub fn path_gradient_partial(
    preferences: &BTreeMap<ComparisonPair, Estimate>,
    path: &[FeatureVector],
) -> Result<GradientReport, AnalysisError> {
    let steps = path
        .windows(2)
        .map(|w| {
            let estimate = step_estimate(preferences, w[0], w[1])?;
            let flag = estimate.map_or(StepFlag::Missing, StepFlag::of);
            Ok(PathStep { from: w[0], to: w[1], estimate, flag })
        })
        .collect::<Result<Vec<_>, AnalysisError>>()?;
    let lock_in_prone = steps.iter().skip(1).any(|s| matches!(s.flag, StepFlag::Neutral | StepFlag::Resist));
    Ok(GradientReport { path: path.to_vec(), steps, lock_in_prone })
}

/// Like [`path_gradient_partial`], but every step must have an estimate.
pub fn path_gradient(
    preferences: &BTreeMap<ComparisonPair, Estimate>,
    path: &[FeatureVector],
) -> Result<GradientReport, AnalysisError> {
    let report = path_gradient_partial(preferences, path)?;
    if let Some(s) = report.steps.iter().find(|s| s.flag == StepFlag::Missing) {
        return Err(AnalysisError::MissingPair(ComparisonPair::between(s.from, s.to).expect("validated")));
    }
    Ok(report)
}

/// The `width!` monotone paths from the bottom to the top vertex, adding
/// features in every order.
pub fn canonical_paths(width: usize) -> Vec<Vec<FeatureVector>> {
    fn permutations(items: Vec<usize>) -> Vec<Vec<usize>> {
        if items.len() <= 1 {
            return vec![items];
        }
        let mut out = Vec::new();
        for i in 0..items.len() {
            let mut rest = items.clone();
            let head = rest.remove(i);
            for mut tail in permutations(rest) {
                tail.insert(0, head);
                out.push(tail);
            }
        }
        out
    }
    permutations((0..width).collect())
        .into_iter()
        .map(|order| {
            let mut v = FeatureVector::bottom(width);
            let mut path = vec![v];
            for p in order {
                v = v.with_bit(p, true);
                path.push(v);
            }
            path
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::records::Source;
    use crate::game::{Action, Role, Transformation};
    use crate::protocol::Stage;

    fn fv(s: &str) -> FeatureVector {
        s.parse().unwrap()
    }

    fn trial(label: &str, u: (u32, u32), seed: bool) -> Trial {
        Trial {
            trial_id: "t".into(),
            session_id: "s".into(),
            condition_id: 0,
            game_label: fv(label),
            transformation: Transformation::Identity,
            role_of_session: Role::Player2,
            a1: Action::First,
            a2: Action::First,
            u1: u.0,
            u2: u.1,
            p1_source: if seed { Source::Seed } else { Source::Human },
            p2_source: Source::Human,
            stage: Stage::Stage1,
            timestamp: 0,
        }
    }

    #[test]
    fn cooperation_modes() {
        let zero = trial("000", (0, 0), false);
        let one_sided = trial("000", (4, 0), false);
        assert!(!is_cooperative(&zero, CooperationMode::AnyNonzero));
        assert!(is_cooperative(&one_sided, CooperationMode::AnyNonzero));
        assert!(!is_cooperative(&one_sided, CooperationMode::BothNonzero));
    }

    #[test]
    fn seed_filter_is_idempotent_and_order_preserving() {
        let ts = vec![trial("000", (1, 1), false), trial("000", (0, 0), true), trial("001", (0, 0), false)];
        let once = filter_seed_trials(&ts);
        assert_eq!(once, vec![ts[0].clone(), ts[2].clone()]);
        assert_eq!(filter_seed_trials(&once), once);
        let clean = vec![ts[0].clone()];
        assert_eq!(filter_seed_trials(&clean), clean);
    }

    #[test]
    fn all_cooperative_is_degenerate() {
        let ts: Vec<_> = (0..100).map(|_| trial("100", (8, 7), false)).collect();
        let e = cooperation_rate(&ts, fv("100"), CooperationMode::AnyNonzero, &BootstrapConfig::default()).unwrap();
        assert_eq!((e.value, e.ci_low, e.ci_high, e.n), (1.0, 1.0, 1.0, 100));
        assert!(matches!(
            cooperation_rate(&ts, fv("000"), CooperationMode::AnyNonzero, &BootstrapConfig::default()),
            Err(AnalysisError::EmptyCell(_))
        ));
    }

    #[test]
    fn layer_means_of_reported_cooperation() {
        let table: BTreeMap<FeatureVector, Estimate> = [
            ("000", 0.49),
            ("100", 0.94),
            ("010", 0.56),
            ("001", 0.48),
            ("110", 0.89),
            ("101", 0.93),
            ("011", 0.49),
            ("111", 0.95),
        ]
        .into_iter()
        .map(|(l, v)| (fv(l), Estimate::reported(v, v, v)))
        .collect();
        let s = layer_summary(&table, 3).unwrap();
        let rounded: Vec<f64> = s.layer_means.values().map(|m| (m * 100.0).round() / 100.0).collect();
        assert_eq!(rounded, vec![0.49, 0.66, 0.77, 0.95]);
        assert!(s.is_monotone());

        let mut partial = table.clone();
        partial.remove(&fv("011"));
        assert_eq!(layer_summary(&partial, 3), Err(AnalysisError::MissingLabel(fv("011"))));
    }

    #[test]
    fn flags_follow_interval_position() {
        assert_eq!(StepFlag::of(Estimate::reported(0.86, 0.73, 1.0)), StepFlag::Advance);
        assert_eq!(StepFlag::of(Estimate::reported(0.5, 0.29, 0.71)), StepFlag::Neutral);
        assert_eq!(StepFlag::of(Estimate::reported(0.2, 0.1, 0.4)), StepFlag::Resist);
    }

    #[test]
    fn downhill_steps_use_the_complement() {
        let table: BTreeMap<_, _> =
            [(ComparisonPair::new(fv("000"), fv("010")).unwrap(), Estimate::reported(0.86, 0.73, 1.0))].into();
        let down = step_estimate(&table, fv("010"), fv("000")).unwrap().unwrap();
        assert!((down.value - 0.14).abs() < 1e-12);
        assert!((down.ci_high - 0.27).abs() < 1e-12);
        assert_eq!(StepFlag::of(down), StepFlag::Resist);
        assert!(step_estimate(&table, fv("000"), fv("011")).is_err());
    }

    #[test]
    fn six_paths_on_the_cube() {
        let paths = canonical_paths(3);
        assert_eq!(paths.len(), 6);
        for p in &paths {
            assert_eq!(p.first(), Some(&fv("000")));
            assert_eq!(p.last(), Some(&fv("111")));
            assert!(p.windows(2).all(|w| w[0].hamming(w[1]) == 1));
        }
    }
}
