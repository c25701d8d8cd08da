use super::predicates::{is_fair, is_safe, is_strict_equilibrium, pure_nash_equilibria};
use super::{FeatureError, FeatureVector};
use crate::game::BimatrixGame;
use num_rational::Ratio;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

/// Rational payoff multiplier that turns a base game into an efficient one.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Multiplier(pub Ratio<u32>);

impl Multiplier {
    pub fn integer(n: u32) -> Self {
        Multiplier(Ratio::from_integer(n))
    }

    pub fn as_integer(self) -> Option<u32> {
        self.0.is_integer().then(|| self.0.to_integer())
    }

    /// `round(self * x)`, halves away from zero.
    pub fn scale(self, x: u32) -> u32 {
        (self.0 * Ratio::from_integer(x)).round().to_integer()
    }

    pub fn to_f64(self) -> f64 {
        f64::from(*self.0.numer()) / f64::from(*self.0.denom())
    }
}

impl fmt::Display for Multiplier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl FromStr for Multiplier {
    type Err = String;

    /// Accepts `"2"`, `"3/2"` or a terminating decimal such as `"1.5"`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let bad = || format!("`{s}` is not a positive rational multiplier");
        let ratio = if let Some((n, d)) = s.split_once('/') {
            let n: u32 = n.trim().parse().map_err(|_| bad())?;
            let d: u32 = d.trim().parse().map_err(|_| bad())?;
            if d == 0 {
                return Err(bad());
            }
            Ratio::new(n, d)
        } else if let Some((whole, frac)) = s.split_once('.') {
            let digits = frac.len() as u32;
            if digits > 6 {
                return Err(bad());
            }
            let denom = 10u32.pow(digits);
            let whole: u32 = if whole.is_empty() { 0 } else { whole.parse().map_err(|_| bad())? };
            let frac: u32 = if frac.is_empty() { 0 } else { frac.parse().map_err(|_| bad())? };
            Ratio::new(whole * denom + frac, denom)
        } else {
            Ratio::from_integer(s.parse().map_err(|_| bad())?)
        };
        Ok(Multiplier(ratio))
    }
}

impl Serialize for Multiplier {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Multiplier {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

/// Order in which candidate matrices are enumerated.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SearchOrder {
    /// Row-major entries, each ascending from zero.
    Lexicographic,
    /// Row-major entries, each visiting values in an order shuffled by
    /// `rng_seed`.
    Seeded,
}

/// Shape imposed on games without the stability feature.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UnstableShape {
    /// Two strict equilibria, each player indifferent between them, and
    /// both miscoordination cells paying `(0, 0)`.
    PureCoordination,
    /// Any game with exactly two pure equilibria.
    TwoEquilibria,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpaceConfig {
    pub feature_count: usize,
    pub efficiency_multiplier: Multiplier,
    /// Largest entry allowed in a non-efficient game.
    pub payoff_bound: u32,
    /// Sum of all eight entries of a non-efficient game.
    pub base_total: u32,
    pub rng_seed: u64,
    pub search_order: SearchOrder,
    pub unstable_shape: UnstableShape,
    /// Build efficient games by scaling their base counterpart when the
    /// multiplier is a whole number.
    pub integral_scaling: bool,
}

impl Default for SpaceConfig {
    fn default() -> Self {
        SpaceConfig {
            feature_count: 3,
            efficiency_multiplier: Multiplier::integer(2),
            payoff_bound: 8,
            base_total: 16,
            rng_seed: 0,
            search_order: SearchOrder::Lexicographic,
            unstable_shape: UnstableShape::PureCoordination,
            integral_scaling: true,
        }
    }
}

impl SpaceConfig {
    /// Defaults for a space with `feature_count` features. The safety axis
    /// of the 16-game space needs room beyond pure coordination.
    pub fn with_features(feature_count: usize) -> Self {
        let unstable_shape = if feature_count >= 4 {
            UnstableShape::TwoEquilibria
        } else {
            UnstableShape::PureCoordination
        };
        SpaceConfig { feature_count, unstable_shape, ..SpaceConfig::default() }
    }

    pub fn efficient_total(&self) -> u32 {
        self.efficiency_multiplier.scale(self.base_total)
    }

    pub fn target_total(&self, vertex: FeatureVector) -> u32 {
        if vertex.efficiency() {
            self.efficient_total()
        } else {
            self.base_total
        }
    }

    pub fn validate(&self) -> Result<(), FeatureError> {
        let bad = |m: String| Err(FeatureError::InvalidConfig(m));
        if !(3..=4).contains(&self.feature_count) {
            return bad(format!("feature_count must be 3 or 4, got {}", self.feature_count));
        }
        if self.efficiency_multiplier.0 <= Ratio::from_integer(1) {
            return bad(format!("efficiency multiplier must exceed 1, got {}", self.efficiency_multiplier));
        }
        if self.payoff_bound < 4 {
            return bad(format!("payoff_bound must be at least 4, got {}", self.payoff_bound));
        }
        if self.base_total == 0 || self.base_total > 8 * self.payoff_bound {
            return bad(format!(
                "base_total {} cannot be reached with entries in 0..={}",
                self.base_total, self.payoff_bound
            ));
        }
        Ok(())
    }

    fn bound_for(&self, vertex: FeatureVector) -> u32 {
        if vertex.efficiency() {
            (self.efficiency_multiplier.0 * Ratio::from_integer(self.payoff_bound)).ceil().to_integer()
        } else {
            self.payoff_bound
        }
    }
}

/// One game per vertex of the feature hypercube.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GameSpace {
    pub config: SpaceConfig,
    pub games: BTreeMap<FeatureVector, BimatrixGame>,
}

impl GameSpace {
    pub fn game(&self, label: FeatureVector) -> Result<&BimatrixGame, FeatureError> {
        self.games.get(&label).ok_or(FeatureError::MissingVertex(label))
    }

    pub fn labels(&self) -> impl Iterator<Item = FeatureVector> + '_ {
        self.games.keys().copied()
    }

    pub fn width(&self) -> usize {
        self.config.feature_count
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("space serializes");
        s.push('\n');
        s
    }

    pub fn from_json(s: &str) -> serde_json::Result<Self> {
        serde_json::from_str(s)
    }
}

/// Whether `game` meets every generator constraint for `vertex`.
fn satisfies(game: &BimatrixGame, vertex: FeatureVector, config: &SpaceConfig, strict: bool) -> bool {
    if !game.has_zero_cell() || is_fair(game) != vertex.fairness() {
        return false;
    }
    if config.feature_count >= 4 && is_safe(game) != vertex.bit(3) {
        return false;
    }
    let eq = pure_nash_equilibria(game);
    let strict_ok = !strict || eq.iter().all(|&p| is_strict_equilibrium(game, p));
    if vertex.stability() {
        return eq.len() == 1 && strict_ok && !game.cell(eq[0].0, eq[0].1).is_zero();
    }
    if eq.len() != 2 || !strict_ok {
        return false;
    }
    match config.unstable_shape {
        UnstableShape::TwoEquilibria => true,
        UnstableShape::PureCoordination => {
            let (a, b) = (game.cell(eq[0].0, eq[0].1), game.cell(eq[1].0, eq[1].1));
            let off_zero = game
                .iter()
                .filter(|&(r, c, _)| !eq.contains(&(r, c)))
                .all(|(_, _, p)| p.is_zero());
            a == b && off_zero
        }
    }
}

fn value_orders(config: &SpaceConfig, bound: u32) -> Vec<Vec<u32>> {
    let ascending: Vec<u32> = (0..=bound).collect();
    match config.search_order {
        SearchOrder::Lexicographic => vec![ascending; 8],
        SearchOrder::Seeded => {
            let mut rng = ChaCha8Rng::seed_from_u64(config.rng_seed);
            (0..8)
                .map(|_| {
                    let mut v = ascending.clone();
                    v.shuffle(&mut rng);
                    v
                })
                .collect()
        }
    }
}

/// Depth-first enumeration of 8-entry matrices with a fixed sum.
fn search(
    orders: &[Vec<u32>],
    bound: u32,
    total: u32,
    accept: &mut dyn FnMut(&[u32; 8]) -> bool,
) -> Option<[u32; 8]> {
    fn go(
        pos: usize,
        left: u32,
        e: &mut [u32; 8],
        orders: &[Vec<u32>],
        bound: u32,
        accept: &mut dyn FnMut(&[u32; 8]) -> bool,
    ) -> bool {
        if pos == 8 {
            return left == 0 && accept(e);
        }
        let slots_after = (7 - pos) as u32;
        for &v in &orders[pos] {
            if v > left || left - v > bound * slots_after {
                continue;
            }
            e[pos] = v;
            if go(pos + 1, left - v, e, orders, bound, accept) {
                return true;
            }
        }
        false
    }
    let mut e = [0u32; 8];
    go(0, total, &mut e, orders, bound, accept).then_some(e)
}

fn find_game(config: &SpaceConfig, vertex: FeatureVector) -> Option<BimatrixGame> {
    let bound = config.bound_for(vertex);
    let total = config.target_total(vertex);
    let orders = value_orders(config, bound);
    let id = format!("game-{vertex}");
    // strict equilibria first; weak ones only when nothing strict exists
    [true, false].into_iter().find_map(|strict| {
        search(&orders, bound, total, &mut |e| {
            satisfies(&BimatrixGame::from_flat("", *e), vertex, config, strict)
        })
        .map(|e| BimatrixGame::from_flat(id.clone(), e))
    })
}

/// Generates one game per vertex of the `feature_count`-cube.
///
/// Each vertex gets the first matrix in the configured enumeration order
/// that has exactly the vertex's features, contains a `(0,0)` outcome, and
/// (when stable) puts its equilibrium on a non-zero outcome. Unstable games
/// have exactly two pure equilibria shaped by [`UnstableShape`].
pub fn generate_space(config: &SpaceConfig) -> Result<GameSpace, FeatureError> {
    config.validate()?;
    let mut games = BTreeMap::new();
    for vertex in FeatureVector::all(config.feature_count) {
        let scaled = match (vertex.efficiency(), config.integral_scaling, config.efficiency_multiplier.as_integer()) {
            (true, true, Some(m)) => {
                let base = vertex.with_bit(1, false);
                let base_game = match games.get(&base) {
                    Some(g) => g,
                    None => return Err(FeatureError::UnsatisfiableConfig { vertex: base }),
                };
                let g = BimatrixGame::scaled(base_game, format!("game-{vertex}"), m);
                satisfies(&g, vertex, config, false).then_some(g)
            }
            _ => None,
        };
        let game = match scaled.or_else(|| find_game(config, vertex)) {
            Some(g) => g,
            None => return Err(FeatureError::UnsatisfiableConfig { vertex }),
        };
        games.insert(vertex, game);
    }
    Ok(GameSpace { config: config.clone(), games })
}

/// Per-vertex re-check of every predicate. `true` means the check passed.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VertexCheck {
    pub label: FeatureVector,
    pub stability: bool,
    pub efficiency: bool,
    pub fairness: bool,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub safety: Option<bool>,
    pub zero_cell: bool,
    pub equilibrium_nonzero: bool,
}

impl VertexCheck {
    pub fn failures(&self) -> Vec<&'static str> {
        let mut out = Vec::new();
        let checks = [
            ("stability", self.stability),
            ("efficiency", self.efficiency),
            ("fairness", self.fairness),
            ("safety", self.safety.unwrap_or(true)),
            ("zero_cell", self.zero_cell),
            ("equilibrium_nonzero", self.equilibrium_nonzero),
        ];
        for (name, ok) in checks {
            if !ok {
                out.push(name);
            }
        }
        out
    }

    pub fn passed(&self) -> bool {
        self.failures().is_empty()
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub vertices: Vec<VertexCheck>,
}

impl VerificationReport {
    pub fn failure_count(&self) -> usize {
        self.vertices.iter().map(|v| v.failures().len()).sum()
    }

    pub fn passed(&self) -> bool {
        self.failure_count() == 0
    }
}

impl fmt::Display for VerificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for v in &self.vertices {
            let fails = v.failures();
            if fails.is_empty() {
                writeln!(f, "{}  ok", v.label)?;
            } else {
                writeln!(f, "{}  FAIL {}", v.label, fails.join(","))?;
            }
        }
        write!(f, "{} vertices, {} failures", self.vertices.len(), self.failure_count())
    }
}

/// Re-evaluates all predicates for every vertex of `space`.
pub fn verify_space(space: &GameSpace) -> VerificationReport {
    let config = &space.config;
    let vertices = space
        .games
        .iter()
        .map(|(&label, game)| {
            let eq = pure_nash_equilibria(game);
            let stable = eq.len() == 1;
            let stability = if label.stability() { stable } else { eq.len() == 2 };
            let efficiency = match super::is_efficient(game, config) {
                Ok(e) => e == label.efficiency(),
                Err(_) => false,
            };
            VertexCheck {
                label,
                stability,
                efficiency,
                fairness: is_fair(game) == label.fairness(),
                safety: (label.width() >= 4).then(|| is_safe(game) == label.bit(3)),
                zero_cell: game.has_zero_cell(),
                equilibrium_nonzero: !stable || !game.cell(eq[0].0, eq[0].1).is_zero(),
            }
        })
        .collect();
    VerificationReport { vertices }
}

/// Two games joined by an edge of the hypercube; `high` has the extra bit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ComparisonPair {
    pub low: FeatureVector,
    pub high: FeatureVector,
}

impl ComparisonPair {
    pub fn new(low: FeatureVector, high: FeatureVector) -> Result<Self, FeatureError> {
        let invalid = |reason| FeatureError::InvalidPair { low, high, reason };
        let bit = low.differing_bit(high).ok_or_else(|| invalid("labels must differ in exactly one bit"))?;
        if !high.bit(bit) {
            return Err(invalid("the high label must carry the differing bit"));
        }
        Ok(ComparisonPair { low, high })
    }

    /// Orders two adjacent labels into a pair.
    pub fn between(a: FeatureVector, b: FeatureVector) -> Result<Self, FeatureError> {
        if a.popcount() < b.popcount() {
            ComparisonPair::new(a, b)
        } else {
            ComparisonPair::new(b, a)
        }
    }

    /// Position of the feature the high game adds.
    pub fn feature_bit(self) -> usize {
        self.low.differing_bit(self.high).expect("pair invariant")
    }

    pub fn contains(self, label: FeatureVector) -> bool {
        self.low == label || self.high == label
    }

    pub fn other(self, label: FeatureVector) -> Option<FeatureVector> {
        if label == self.low {
            Some(self.high)
        } else if label == self.high {
            Some(self.low)
        } else {
            None
        }
    }
}

impl fmt::Display for ComparisonPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-{}", self.low, self.high)
    }
}

impl FromStr for ComparisonPair {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (a, b) = s.split_once('-').ok_or_else(|| format!("`{s}` is not LOW-HIGH"))?;
        ComparisonPair::new(a.parse()?, b.parse()?).map_err(|e| e.to_string())
    }
}

/// Every hypercube edge of a `width`-feature space: low labels ascending,
/// then the added bit from left to right.
pub fn pairs_for_width(width: usize) -> Vec<ComparisonPair> {
    FeatureVector::all(width)
        .flat_map(|low| {
            (0..width)
                .filter(move |&p| !low.bit(p))
                .map(move |p| ComparisonPair { low, high: low.flip(p) })
        })
        .collect()
}

pub fn comparison_pairs(space: &GameSpace) -> Vec<ComparisonPair> {
    pairs_for_width(space.width())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::features::classify;
    use crate::game::Transformation;

    fn fv(s: &str) -> FeatureVector {
        s.parse().unwrap()
    }

    #[test]
    fn pure_coordination_needs_even_totals() {
        let c = SpaceConfig { base_total: 15, ..SpaceConfig::default() };
        assert_eq!(generate_space(&c), Err(FeatureError::UnsatisfiableConfig { vertex: fv("000") }));
    }

    #[test]
    fn default_space_verifies() {
        let space = generate_space(&SpaceConfig::default()).unwrap();
        assert_eq!(space.games.len(), 8);
        let report = verify_space(&space);
        assert!(report.passed(), "{report}");
        for (label, game) in &space.games {
            assert_eq!(classify(game, &space.config).unwrap(), *label);
        }
    }

    #[test]
    fn generation_is_deterministic() {
        let config = SpaceConfig::default();
        assert_eq!(generate_space(&config).unwrap().to_json(), generate_space(&config).unwrap().to_json());
        let seeded = SpaceConfig { search_order: SearchOrder::Seeded, rng_seed: 42, ..config };
        assert_eq!(generate_space(&seeded).unwrap(), generate_space(&seeded).unwrap());
        assert!(verify_space(&generate_space(&seeded).unwrap()).passed());
    }

    #[test]
    fn efficient_games_are_doubled_base_games() {
        let space = generate_space(&SpaceConfig::default()).unwrap();
        for label in space.labels().filter(|l| l.efficiency()) {
            let base = space.game(label.with_bit(1, false)).unwrap();
            let doubled: Vec<u32> = base.flat().iter().map(|x| 2 * x).collect();
            assert_eq!(space.game(label).unwrap().flat().to_vec(), doubled, "{label}");
        }
    }

    #[test]
    fn three_halves_multiplier_searches_directly() {
        let config = SpaceConfig { efficiency_multiplier: "3/2".parse().unwrap(), ..SpaceConfig::default() };
        let space = generate_space(&config).unwrap();
        assert!(verify_space(&space).passed());
        assert_eq!(space.game(fv("010")).unwrap().total(), 24);
    }

    #[test]
    fn sixteen_game_space() {
        let space = generate_space(&SpaceConfig::with_features(4)).unwrap();
        assert_eq!(space.games.len(), 16);
        let report = verify_space(&space);
        assert!(report.passed(), "{report}");
    }

    #[test]
    fn stable_equilibria_are_nonzero_and_unique() {
        let space = generate_space(&SpaceConfig::default()).unwrap();
        for (label, game) in &space.games {
            let eq = pure_nash_equilibria(game);
            if label.stability() {
                assert_eq!(eq.len(), 1);
                assert!(!game.cell(eq[0].0, eq[0].1).is_zero());
            } else {
                assert_eq!(eq.len(), 2);
            }
            assert!(eq.iter().all(|&p| is_strict_equilibrium(game, p)), "{label} {game}");
        }
    }

    #[test]
    fn predicates_invariant_under_presentation() {
        let space = generate_space(&SpaceConfig::default()).unwrap();
        for (label, game) in &space.games {
            for t in Transformation::ALL {
                let shown = t.apply(game);
                assert_eq!(classify(&shown, &space.config).unwrap(), *label, "{label} {t}");
                assert_eq!(pure_nash_equilibria(&shown).len(), pure_nash_equilibria(game).len());
            }
        }
    }

    #[test]
    fn corrupted_payoff_fails_only_affected_predicates() {
        let mut space = generate_space(&SpaceConfig::default()).unwrap();
        let label = fv("001");
        let game = space.games.get_mut(&label).unwrap();
        // move one point from Player 2 to Player 1 in a non-zero cell:
        // total is kept, fairness breaks
        let (r, c) = game
            .iter()
            .find(|(_, _, p)| p.u2 > 0)
            .map(|(r, c, _)| (r, c))
            .unwrap();
        let cell = game.cell_mut(r, c);
        cell.u2 -= 1;
        cell.u1 += 1;
        let mutated = game.clone();
        let report = verify_space(&space);
        let row = report.vertices.iter().find(|v| v.label == label).unwrap();
        // independent expectation from the raw matrix
        let eq_count = pure_nash_equilibria(&mutated).len();
        let mut expected = Vec::new();
        if eq_count != 2 {
            expected.push("stability");
        }
        expected.push("fairness");
        assert_eq!(row.failures(), expected);
        assert_eq!(report.failure_count(), expected.len());
    }

    #[test]
    fn empty_space_reports_nothing() {
        let space = GameSpace { config: SpaceConfig::default(), games: BTreeMap::new() };
        assert!(verify_space(&space).vertices.is_empty());
    }

    #[test]
    fn pair_counts() {
        let three = pairs_for_width(3);
        assert_eq!(three.len(), 12);
        assert_eq!(pairs_for_width(4).len(), 32);
        for p in three.iter().chain(pairs_for_width(4).iter()) {
            assert_eq!(p.low.hamming(p.high), 1);
            assert!(p.high.bit(p.feature_bit()));
        }
        assert_eq!(three[0], ComparisonPair { low: fv("000"), high: fv("100") });
    }

    #[test]
    fn pair_validation() {
        assert!(ComparisonPair::new(fv("000"), fv("110")).is_err());
        assert!(ComparisonPair::new(fv("100"), fv("000")).is_err());
        assert_eq!(ComparisonPair::between(fv("110"), fv("010")).unwrap().high, fv("110"));
        assert_eq!("000-010".parse::<ComparisonPair>().unwrap().feature_bit(), 1);
    }

    #[test]
    fn invalid_configs() {
        let c = SpaceConfig { payoff_bound: 3, ..SpaceConfig::default() };
        assert!(matches!(generate_space(&c), Err(FeatureError::InvalidConfig(_))));
        let c = SpaceConfig { efficiency_multiplier: Multiplier::integer(1), ..SpaceConfig::default() };
        assert!(generate_space(&c).is_err());
        // an odd total can never be split fairly
        let c = SpaceConfig {
            base_total: 15,
            unstable_shape: UnstableShape::TwoEquilibria,
            ..SpaceConfig::default()
        };
        match generate_space(&c) {
            Err(FeatureError::UnsatisfiableConfig { vertex }) => assert!(vertex.fairness()),
            other => panic!("expected unsatisfiable, got {other:?}"),
        }
    }

    #[test]
    fn multiplier_parsing() {
        assert_eq!("1.5".parse::<Multiplier>().unwrap(), "3/2".parse().unwrap());
        assert_eq!("2".parse::<Multiplier>().unwrap().as_integer(), Some(2));
        assert!("x".parse::<Multiplier>().is_err());
        assert_eq!(serde_json::to_string(&"3/2".parse::<Multiplier>().unwrap()).unwrap(), "\"3/2\"");
    }

    #[test]
    fn space_file_round_trips_with_binary_keys() {
        let space = generate_space(&SpaceConfig::default()).unwrap();
        let json = space.to_json();
        let keys: Vec<usize> = ["\"000\"", "\"001\"", "\"010\"", "\"111\""].iter().map(|k| json.find(k).unwrap()).collect();
        assert!(keys.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(GameSpace::from_json(&json).unwrap(), space);
    }
}
