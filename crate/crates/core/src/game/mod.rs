//! Two-player 2x2 bimatrix games.
//!
//! A [`BimatrixGame`] is always stored in canonical orientation: Player 1
//! chooses the row, Player 2 chooses the column, and every cell holds
//! `(u1, u2)` in that order. The eight [`Transformation`]s only change how a
//! game is *displayed*; see [`viewer_presentation`].

mod presentation;
mod transform;

pub use presentation::{viewer_presentation, Axis, Presentation};
pub use transform::{compose, Transformation};

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::fmt;

/// Points awarded to each player in one outcome cell.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PayoffPair {
    pub u1: u32,
    pub u2: u32,
}

impl PayoffPair {
    pub const ZERO: PayoffPair = PayoffPair { u1: 0, u2: 0 };

    pub const fn new(u1: u32, u2: u32) -> Self {
        PayoffPair { u1, u2 }
    }

    /// The same pair seen from the other player's seat.
    pub const fn swapped(self) -> Self {
        PayoffPair { u1: self.u2, u2: self.u1 }
    }

    pub const fn total(self) -> u32 {
        self.u1 + self.u2
    }

    pub const fn is_zero(self) -> bool {
        self.u1 == 0 && self.u2 == 0
    }

    /// Payoff of the given role.
    pub const fn of(self, role: Role) -> u32 {
        match role {
            Role::Player1 => self.u1,
            Role::Player2 => self.u2,
        }
    }
}

impl From<(u32, u32)> for PayoffPair {
    fn from((u1, u2): (u32, u32)) -> Self {
        PayoffPair { u1, u2 }
    }
}

impl fmt::Display for PayoffPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.u1, self.u2)
    }
}

/// A binary choice. For the row chooser `First` is Top and `Second` is
/// Bottom; for the column chooser `First` is Left and `Second` is Right.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Action {
    First,
    Second,
}

impl Action {
    pub const TOP: Action = Action::First;
    pub const BOTTOM: Action = Action::Second;
    pub const LEFT: Action = Action::First;
    pub const RIGHT: Action = Action::Second;
    pub const ALL: [Action; 2] = [Action::First, Action::Second];

    pub const fn index(self) -> usize {
        match self {
            Action::First => 0,
            Action::Second => 1,
        }
    }

    pub fn from_index(index: usize) -> Option<Action> {
        match index {
            0 => Some(Action::First),
            1 => Some(Action::Second),
            _ => None,
        }
    }

    pub const fn other(self) -> Action {
        match self {
            Action::First => Action::Second,
            Action::Second => Action::First,
        }
    }

    /// Flips the action when `flip` is set.
    pub const fn flip_if(self, flip: bool) -> Action {
        if flip {
            self.other()
        } else {
            self
        }
    }
}

impl Serialize for Action {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_u8(self.index() as u8)
    }
}

impl<'de> Deserialize<'de> for Action {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let raw = u8::deserialize(d)?;
        Action::from_index(raw as usize)
            .ok_or_else(|| serde::de::Error::custom(format!("action must be 0 or 1, got {raw}")))
    }
}

/// Which seat a participant occupies at a table.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Role {
    Player1,
    Player2,
}

impl Role {
    pub const ALL: [Role; 2] = [Role::Player1, Role::Player2];

    pub const fn opponent(self) -> Role {
        match self {
            Role::Player1 => Role::Player2,
            Role::Player2 => Role::Player1,
        }
    }
}

/// A 2x2 game in canonical orientation.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BimatrixGame {
    pub game_id: String,
    cells: [[PayoffPair; 2]; 2],
}

impl BimatrixGame {
    pub fn new(game_id: impl Into<String>, cells: [[PayoffPair; 2]; 2]) -> Self {
        BimatrixGame { game_id: game_id.into(), cells }
    }

    /// Builds a game from `[[(u1,u2); 2]; 2]` tuples, row-major.
    pub fn from_tuples(game_id: impl Into<String>, cells: [[(u32, u32); 2]; 2]) -> Self {
        let map = |row: [(u32, u32); 2]| [PayoffPair::from(row[0]), PayoffPair::from(row[1])];
        BimatrixGame::new(game_id, [map(cells[0]), map(cells[1])])
    }

    /// Builds a game from eight entries in row-major order
    /// `TL.u1, TL.u2, TR.u1, TR.u2, BL.u1, BL.u2, BR.u1, BR.u2`.
    pub fn from_flat(game_id: impl Into<String>, e: [u32; 8]) -> Self {
        BimatrixGame::from_tuples(game_id, [[(e[0], e[1]), (e[2], e[3])], [(e[4], e[5]), (e[6], e[7])]])
    }

    pub fn flat(&self) -> [u32; 8] {
        let c = &self.cells;
        [
            c[0][0].u1, c[0][0].u2, c[0][1].u1, c[0][1].u2, c[1][0].u1, c[1][0].u2, c[1][1].u1,
            c[1][1].u2,
        ]
    }

    pub fn cells(&self) -> &[[PayoffPair; 2]; 2] {
        &self.cells
    }

    pub fn cell(&self, row: Action, col: Action) -> PayoffPair {
        self.cells[row.index()][col.index()]
    }

    pub fn cell_mut(&mut self, row: Action, col: Action) -> &mut PayoffPair {
        &mut self.cells[row.index()][col.index()]
    }

    /// The outcome when Player 1 plays `a1` and Player 2 plays `a2`.
    pub fn payoff(&self, a1: Action, a2: Action) -> PayoffPair {
        self.cell(a1, a2)
    }

    /// Iterates `(row, col, payoff)` in row-major order.
    pub fn iter(&self) -> impl Iterator<Item = (Action, Action, PayoffPair)> + '_ {
        Action::ALL
            .into_iter()
            .flat_map(move |r| Action::ALL.into_iter().map(move |c| (r, c, self.cell(r, c))))
    }

    pub fn sum_u1(&self) -> u32 {
        self.iter().map(|(_, _, p)| p.u1).sum()
    }

    pub fn sum_u2(&self) -> u32 {
        self.iter().map(|(_, _, p)| p.u2).sum()
    }

    pub fn total(&self) -> u32 {
        self.sum_u1() + self.sum_u2()
    }

    pub fn max_payoff(&self) -> u32 {
        self.flat().into_iter().max().unwrap_or(0)
    }

    pub fn has_zero_cell(&self) -> bool {
        self.iter().any(|(_, _, p)| p.is_zero())
    }

    /// Multiplies every entry by `factor`.
    pub fn scaled(&self, game_id: impl Into<String>, factor: u32) -> BimatrixGame {
        let mut e = self.flat();
        e.iter_mut().for_each(|x| *x *= factor);
        BimatrixGame::from_flat(game_id, e)
    }

    pub fn with_id(mut self, game_id: impl Into<String>) -> Self {
        self.game_id = game_id.into();
        self
    }

    pub fn apply(&self, t: Transformation) -> BimatrixGame {
        t.apply(self)
    }
}

impl fmt::Display for BimatrixGame {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = &self.cells;
        write!(f, "[[{} {}] [{} {}]]", c[0][0], c[0][1], c[1][0], c[1][1])
    }
}

#[derive(Serialize, Deserialize)]
struct GameRecord {
    game_id: String,
    cells: [[u32; 2]; 4],
}

impl Serialize for BimatrixGame {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let e = self.flat();
        GameRecord {
            game_id: self.game_id.clone(),
            cells: [[e[0], e[1]], [e[2], e[3]], [e[4], e[5]], [e[6], e[7]]],
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for BimatrixGame {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let r = GameRecord::deserialize(d)?;
        let c = r.cells;
        Ok(BimatrixGame::from_flat(
            r.game_id,
            [c[0][0], c[0][1], c[1][0], c[1][1], c[2][0], c[2][1], c[3][0], c[3][1]],
        ))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_game_payoff() {
        let g = BimatrixGame::from_flat("z", [0; 8]);
        for a1 in Action::ALL {
            for a2 in Action::ALL {
                assert_eq!(g.payoff(a1, a2), PayoffPair::ZERO);
            }
        }
    }

    #[test]
    fn direct_lookup() {
        let g = BimatrixGame::from_tuples("g", [[(3, 1), (0, 0)], [(0, 0), (1, 3)]]);
        assert_eq!(g.payoff(Action::TOP, Action::LEFT), PayoffPair::new(3, 1));
        assert_eq!(g.payoff(Action::BOTTOM, Action::RIGHT), PayoffPair::new(1, 3));
    }

    #[test]
    fn payoff_matches_cell_scan() {
        // every entry distinct so a wrong index cannot collide
        let g = BimatrixGame::from_flat("g", [1, 2, 3, 4, 5, 6, 7, 8]);
        let flat = g.flat();
        for (i, a1) in Action::ALL.into_iter().enumerate() {
            for (j, a2) in Action::ALL.into_iter().enumerate() {
                let scanned = (0..4)
                    .find(|k| k / 2 == i && k % 2 == j)
                    .map(|k| PayoffPair::new(flat[2 * k], flat[2 * k + 1]))
                    .unwrap();
                assert_eq!(g.payoff(a1, a2), scanned);
            }
        }
    }

    #[test]
    fn serialization_is_row_major_pairs() {
        let g = BimatrixGame::from_tuples("pd", [[(3, 3), (0, 5)], [(5, 0), (1, 1)]]);
        let json = serde_json::to_string(&g).unwrap();
        assert_eq!(json, r#"{"game_id":"pd","cells":[[3,3],[0,5],[5,0],[1,1]]}"#);
        let back: BimatrixGame = serde_json::from_str(&json).unwrap();
        assert_eq!(back, g);
    }

    #[test]
    fn action_rejects_out_of_range() {
        assert!(serde_json::from_str::<Action>("2").is_err());
        assert_eq!(serde_json::from_str::<Action>("1").unwrap(), Action::Second);
    }
}
