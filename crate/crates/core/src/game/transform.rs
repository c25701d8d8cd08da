use super::{BimatrixGame, PayoffPair};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

/// One of the eight presentation symmetries of a 2x2 board.
///
/// Composite kinds transpose first, then swap rows and/or columns of the
/// transposed board. Transposing also swaps `(u1, u2)` inside every cell, so
/// the first entry of a displayed cell always belongs to the row chooser.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Transformation {
    Identity,
    SwapRows,
    SwapCols,
    SwapBoth,
    Transpose,
    TransposeSwapRows,
    TransposeSwapCols,
    TransposeSwapBoth,
}

impl Transformation {
    pub const ALL: [Transformation; 8] = [
        Transformation::Identity,
        Transformation::SwapRows,
        Transformation::SwapCols,
        Transformation::SwapBoth,
        Transformation::Transpose,
        Transformation::TransposeSwapRows,
        Transformation::TransposeSwapCols,
        Transformation::TransposeSwapBoth,
    ];

    /// `(transpose, swap_rows, swap_cols)`.
    pub const fn parts(self) -> (bool, bool, bool) {
        use Transformation::*;
        match self {
            Identity => (false, false, false),
            SwapRows => (false, true, false),
            SwapCols => (false, false, true),
            SwapBoth => (false, true, true),
            Transpose => (true, false, false),
            TransposeSwapRows => (true, true, false),
            TransposeSwapCols => (true, false, true),
            TransposeSwapBoth => (true, true, true),
        }
    }

    pub const fn from_parts(transpose: bool, swap_rows: bool, swap_cols: bool) -> Self {
        use Transformation::*;
        match (transpose, swap_rows, swap_cols) {
            (false, false, false) => Identity,
            (false, true, false) => SwapRows,
            (false, false, true) => SwapCols,
            (false, true, true) => SwapBoth,
            (true, false, false) => Transpose,
            (true, true, false) => TransposeSwapRows,
            (true, false, true) => TransposeSwapCols,
            (true, true, true) => TransposeSwapBoth,
        }
    }

    pub const fn transposes(self) -> bool {
        self.parts().0
    }

    pub const fn index(self) -> usize {
        let (t, r, c) = self.parts();
        (t as usize) << 2 | (c as usize) << 1 | r as usize
    }

    pub fn name(self) -> &'static str {
        use Transformation::*;
        match self {
            Identity => "Identity",
            SwapRows => "SwapRows",
            SwapCols => "SwapCols",
            SwapBoth => "SwapBoth",
            Transpose => "Transpose",
            TransposeSwapRows => "TransposeSwapRows",
            TransposeSwapCols => "TransposeSwapCols",
            TransposeSwapBoth => "TransposeSwapBoth",
        }
    }

    /// The displayed board. Displayed cell `(i, j)` is canonical cell
    /// `(i^r, j^c)`, or for transposing kinds the swapped canonical cell
    /// `(j^c, i^r)`.
    pub fn apply(self, game: &BimatrixGame) -> BimatrixGame {
        let (t, r, c) = self.parts();
        let src = game.cells();
        let mut cells = [[PayoffPair::ZERO; 2]; 2];
        for (i, row) in cells.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                let (si, sj) = (i ^ r as usize, j ^ c as usize);
                *cell = if t { src[sj][si].swapped() } else { src[si][sj] };
            }
        }
        BimatrixGame::new(game.game_id.clone(), cells)
    }

    /// `self ∘ first`: applying the result equals applying `first`, then `self`.
    pub const fn compose(self, first: Transformation) -> Transformation {
        let (t1, r1, c1) = self.parts();
        let (t2, r2, c2) = first.parts();
        if t1 {
            Transformation::from_parts(!t2, r1 ^ c2, c1 ^ r2)
        } else {
            Transformation::from_parts(t2, r1 ^ r2, c1 ^ c2)
        }
    }

    pub const fn inverse(self) -> Transformation {
        let (t, r, c) = self.parts();
        if t {
            Transformation::from_parts(true, c, r)
        } else {
            self
        }
    }
}

/// Free-function form of [`Transformation::compose`].
pub fn compose(t1: Transformation, t2: Transformation) -> Transformation {
    t1.compose(t2)
}

impl fmt::Display for Transformation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.name())
    }
}

impl FromStr for Transformation {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Transformation::ALL
            .into_iter()
            .find(|t| t.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown transformation `{s}`"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    fn generic() -> BimatrixGame {
        BimatrixGame::from_flat("g", [1, 2, 3, 4, 5, 6, 7, 8])
    }

    /// Finds the kind whose image of the generic game matches `target`.
    fn identify(target: &BimatrixGame) -> Transformation {
        let g = generic();
        let hits: Vec<_> = Transformation::ALL.into_iter().filter(|t| t.apply(&g) == *target).collect();
        assert_eq!(hits.len(), 1);
        hits[0]
    }

    #[test]
    fn identity_and_transpose_involution() {
        let g = generic();
        assert_eq!(Transformation::Identity.apply(&g), g);
        let t = Transformation::Transpose;
        assert_eq!(t.apply(&t.apply(&g)), g);
    }

    #[test]
    fn transpose_mirrors_and_swaps() {
        let g = BimatrixGame::from_tuples("g", [[(1, 2), (3, 4)], [(5, 6), (7, 8)]]);
        let t = Transformation::Transpose.apply(&g);
        assert_eq!(t, BimatrixGame::from_tuples("g", [[(2, 1), (6, 5)], [(4, 3), (8, 7)]]));
        let rows = Transformation::SwapRows.apply(&g);
        assert_eq!(rows, BimatrixGame::from_tuples("g", [[(5, 6), (7, 8)], [(1, 2), (3, 4)]]));
        let cols = Transformation::SwapCols.apply(&g);
        assert_eq!(cols, BimatrixGame::from_tuples("g", [[(3, 4), (1, 2)], [(7, 8), (5, 6)]]));
    }

    #[test]
    fn composite_is_transpose_then_swap() {
        let g = generic();
        let by_hand = Transformation::SwapRows.apply(&Transformation::Transpose.apply(&g));
        assert_eq!(Transformation::TransposeSwapRows.apply(&g), by_hand);
    }

    #[test]
    fn eight_distinct_presentations() {
        let g = generic();
        let images: HashSet<_> = Transformation::ALL.iter().map(|t| t.apply(&g)).collect();
        assert_eq!(images.len(), 8);
    }

    #[test]
    fn composition_table_matches_action() {
        let g = generic();
        for t1 in Transformation::ALL {
            for t2 in Transformation::ALL {
                let by_action = identify(&t1.apply(&t2.apply(&g)));
                assert_eq!(compose(t1, t2), by_action, "{t1} ∘ {t2}");
            }
        }
    }

    #[test]
    fn identity_law_and_inverses() {
        for t in Transformation::ALL {
            assert_eq!(compose(Transformation::Identity, t), t);
            assert_eq!(compose(t, Transformation::Identity), t);
            assert_eq!(compose(t, t.inverse()), Transformation::Identity);
            assert_eq!(compose(t.inverse(), t), Transformation::Identity);
        }
        assert_eq!(compose(Transformation::SwapRows, Transformation::SwapRows), Transformation::Identity);
    }

    #[test]
    fn names_round_trip() {
        for t in Transformation::ALL {
            assert_eq!(t.name().parse::<Transformation>().unwrap(), t);
            assert_eq!(serde_json::to_string(&t).unwrap(), format!("\"{}\"", t.name()));
            assert_eq!(Transformation::ALL[t.index()], t);
        }
    }
}
