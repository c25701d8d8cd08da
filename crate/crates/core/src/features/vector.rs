use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::fmt;
use std::str::FromStr;

/// Names of the feature bits, in label order.
pub const FEATURE_NAMES: [&str; 4] = ["stability", "efficiency", "fairness", "safety"];

/// Position of a feature bit within a label.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Feature {
    Stability,
    Efficiency,
    Fairness,
    /// The fourth axis of the 16-game space: exactly one outcome pays
    /// nothing to both players.
    Safety,
}

impl Feature {
    pub const ALL: [Feature; 4] =
        [Feature::Stability, Feature::Efficiency, Feature::Fairness, Feature::Safety];

    pub const fn position(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        FEATURE_NAMES[self.position()]
    }
}

impl FromStr for Feature {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let lower = s.to_ascii_lowercase();
        Feature::ALL
            .into_iter()
            .find(|f| f.name() == lower || f.name().starts_with(&lower) && !lower.is_empty())
            .ok_or_else(|| format!("unknown feature `{s}`"))
    }
}

/// A vertex of the game hypercube, rendered most-significant-first as
/// `(stability, efficiency, fairness[, safety])`, e.g. `"110"`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FeatureVector {
    width: u8,
    bits: u8,
}

impl FeatureVector {
    pub fn new(width: usize, bits: u8) -> Self {
        assert!((1..=4).contains(&width), "feature width must be 1..=4");
        assert!(u32::from(bits) < 1u32 << width, "bits out of range for width");
        FeatureVector { width: width as u8, bits }
    }

    pub fn from_bools(bools: &[bool]) -> Self {
        let bits = bools.iter().fold(0u8, |acc, &b| acc << 1 | b as u8);
        FeatureVector::new(bools.len(), bits)
    }

    /// All `2^width` vertices in binary ascending order.
    pub fn all(width: usize) -> impl Iterator<Item = FeatureVector> {
        (0..1u8 << width).map(move |b| FeatureVector::new(width, b))
    }

    pub fn width(self) -> usize {
        self.width as usize
    }

    pub fn raw(self) -> u8 {
        self.bits
    }

    fn mask(self, position: usize) -> u8 {
        1 << (self.width as usize - 1 - position)
    }

    /// Bit at `position` counted from the left of the label.
    pub fn bit(self, position: usize) -> bool {
        position < self.width() && self.bits & self.mask(position) != 0
    }

    pub fn has(self, feature: Feature) -> bool {
        self.bit(feature.position())
    }

    pub fn stability(self) -> bool {
        self.has(Feature::Stability)
    }

    pub fn efficiency(self) -> bool {
        self.has(Feature::Efficiency)
    }

    pub fn fairness(self) -> bool {
        self.has(Feature::Fairness)
    }

    /// Bits beyond the first three.
    pub fn extra(self) -> Vec<bool> {
        (3..self.width()).map(|p| self.bit(p)).collect()
    }

    pub fn with_bit(self, position: usize, value: bool) -> Self {
        let m = self.mask(position);
        FeatureVector { bits: if value { self.bits | m } else { self.bits & !m }, ..self }
    }

    pub fn flip(self, position: usize) -> Self {
        FeatureVector { bits: self.bits ^ self.mask(position), ..self }
    }

    pub fn popcount(self) -> u32 {
        self.bits.count_ones()
    }

    /// `popcount + 1`: the all-zero game is layer 1.
    pub fn layer(self) -> u32 {
        self.popcount() + 1
    }

    pub fn hamming(self, other: FeatureVector) -> u32 {
        (self.bits ^ other.bits).count_ones()
    }

    /// Position of the single differing bit, if the two are adjacent.
    pub fn differing_bit(self, other: FeatureVector) -> Option<usize> {
        if self.width != other.width || self.hamming(other) != 1 {
            return None;
        }
        (0..self.width()).find(|&p| self.bit(p) != other.bit(p))
    }

    /// Hamming-1 neighbours, flipping bits left to right.
    pub fn neighbors(self) -> impl Iterator<Item = FeatureVector> {
        (0..self.width()).map(move |p| self.flip(p))
    }

    pub fn is_top(self) -> bool {
        self.popcount() as usize == self.width()
    }

    pub fn top(width: usize) -> Self {
        FeatureVector::new(width, ((1u16 << width) - 1) as u8)
    }

    pub fn bottom(width: usize) -> Self {
        FeatureVector::new(width, 0)
    }
}

/// Free-function form of [`FeatureVector::layer`].
pub fn layer(fv: FeatureVector) -> u32 {
    fv.layer()
}

impl fmt::Display for FeatureVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for p in 0..self.width() {
            f.write_str(if self.bit(p) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for FeatureVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FeatureVector({self})")
    }
}

impl FromStr for FeatureVector {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.is_empty() || s.len() > 4 || !s.bytes().all(|b| b == b'0' || b == b'1') {
            return Err(format!("`{s}` is not a label of 1 to 4 binary digits"));
        }
        let bools: Vec<bool> = s.bytes().map(|b| b == b'1').collect();
        Ok(FeatureVector::from_bools(&bools))
    }
}

impl Serialize for FeatureVector {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for FeatureVector {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fv(s: &str) -> FeatureVector {
        s.parse().unwrap()
    }

    #[test]
    fn layers() {
        assert_eq!(layer(fv("000")), 1);
        assert_eq!(layer(fv("110")), 3);
        assert_eq!(layer(fv("101")), 3);
        assert_eq!(layer(fv("011")), 3);
        assert_eq!(layer(fv("111")), 4);
        for v in FeatureVector::all(3) {
            assert_eq!(v.layer(), v.to_string().matches('1').count() as u32 + 1);
        }
    }

    #[test]
    fn rendering_order() {
        let v = FeatureVector::from_bools(&[true, true, false]);
        assert_eq!(v.to_string(), "110");
        assert!(v.stability() && v.efficiency() && !v.fairness());
        assert!(v.extra().is_empty());
        let w = fv("0101");
        assert_eq!(w.extra(), vec![true]);
        assert!(w.efficiency());
    }

    #[test]
    fn ascending_order_is_binary() {
        let labels: Vec<String> = FeatureVector::all(3).map(|v| v.to_string()).collect();
        assert_eq!(labels, ["000", "001", "010", "011", "100", "101", "110", "111"]);
    }

    #[test]
    fn parse_rejects_garbage() {
        assert!("012".parse::<FeatureVector>().is_err());
        assert!("".parse::<FeatureVector>().is_err());
        assert!("00000".parse::<FeatureVector>().is_err());
    }

    #[test]
    fn neighbors_flip_left_to_right() {
        let n: Vec<String> = fv("000").neighbors().map(|v| v.to_string()).collect();
        assert_eq!(n, ["100", "010", "001"]);
        assert_eq!(fv("010").differing_bit(fv("110")), Some(0));
        assert_eq!(fv("010").differing_bit(fv("111")), None);
    }
}
