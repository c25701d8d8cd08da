use super::{Action, BimatrixGame, PayoffPair, Role, Transformation};
use serde::{Deserialize, Serialize};

/// Which axis of the displayed board a participant selects on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Axis {
    Rows,
    Columns,
}

/// What one participant sees in one round: the displayed board, the axis
/// they choose along, and the mapping back to canonical actions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Presentation {
    pub displayed: BimatrixGame,
    pub chooses: Axis,
    pub role: Role,
    pub transformation: Transformation,
}

/// Renders `game` for `role` under `t`.
pub fn viewer_presentation(game: &BimatrixGame, role: Role, t: Transformation) -> Presentation {
    let rows = matches!(role, Role::Player1) != t.transposes();
    Presentation {
        displayed: t.apply(game),
        chooses: if rows { Axis::Rows } else { Axis::Columns },
        role,
        transformation: t,
    }
}

impl Presentation {
    /// Maps a displayed choice of `role` (along `self.chooses`) to its
    /// canonical action.
    pub fn to_canonical(&self, displayed: Action) -> Action {
        canonical_of(self.transformation, self.role, displayed)
    }

    /// Maps a canonical action of this viewer to its displayed position.
    pub fn to_displayed(&self, canonical: Action) -> Action {
        // every coordinate map is an xor, so it is its own inverse
        canonical_of(self.transformation, self.role, canonical)
    }

    /// Maps a canonical action of the *opponent* to its displayed position.
    pub fn opponent_to_displayed(&self, canonical: Action) -> Action {
        canonical_of(self.transformation, self.role.opponent(), canonical)
    }

    /// The viewer's own payoff in a displayed cell.
    pub fn own_payoff(&self, cell: PayoffPair) -> u32 {
        match self.chooses {
            Axis::Rows => cell.u1,
            Axis::Columns => cell.u2,
        }
    }

    /// The displayed cell reached when the viewer picks `own` and the
    /// opponent picks `other`, both as displayed actions.
    pub fn displayed_cell(&self, own: Action, other: Action) -> PayoffPair {
        match self.chooses {
            Axis::Rows => self.displayed.cell(own, other),
            Axis::Columns => self.displayed.cell(other, own),
        }
    }
}

/// Displayed board coordinates relate to canonical ones by
/// `(i, j) -> (i^r, j^c)`, or `(i, j) -> (j^c, i^r)` when transposed.
fn canonical_of(t: Transformation, role: Role, a: Action) -> Action {
    let (transposed, r, c) = t.parts();
    match (role, transposed) {
        // P1 picks displayed rows: canonical row = i ^ r
        (Role::Player1, false) => a.flip_if(r),
        // P2 picks displayed columns: canonical column = j ^ c
        (Role::Player2, false) => a.flip_if(c),
        // P1 picks displayed columns: canonical row = j ^ c
        (Role::Player1, true) => a.flip_if(c),
        // P2 picks displayed rows: canonical column = i ^ r
        (Role::Player2, true) => a.flip_if(r),
    }
}
