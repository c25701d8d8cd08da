use super::{FeatureError, FeatureVector, SpaceConfig};
use crate::game::{Action, BimatrixGame};

/// A pure action profile `(Player 1 action, Player 2 action)`.
pub type Profile = (Action, Action);

/// Every cell where neither player has a strictly better unilateral
/// deviation, in row-major order.
pub fn pure_nash_equilibria(game: &BimatrixGame) -> Vec<Profile> {
    game.iter()
        .filter(|&(r, c, p)| {
            p.u1 >= game.cell(r.other(), c).u1 && p.u2 >= game.cell(r, c.other()).u2
        })
        .map(|(r, c, _)| (r, c))
        .collect()
}

/// True when the equilibrium at `profile` is strict for both players.
pub fn is_strict_equilibrium(game: &BimatrixGame, (r, c): Profile) -> bool {
    let p = game.cell(r, c);
    p.u1 > game.cell(r.other(), c).u1 && p.u2 > game.cell(r, c.other()).u2
}

/// Exactly one pure equilibrium.
pub fn is_stable(game: &BimatrixGame) -> bool {
    pure_nash_equilibria(game).len() == 1
}

/// Both players' payoffs summed over all four outcomes are equal.
pub fn is_fair(game: &BimatrixGame) -> bool {
    game.sum_u1() == game.sum_u2()
}

/// Whether the game's total sits at the efficient target of `config`.
/// Totals matching neither target mean the game is not from this space.
pub fn is_efficient(game: &BimatrixGame, config: &SpaceConfig) -> Result<bool, FeatureError> {
    let total = game.total();
    if total == config.efficient_total() {
        Ok(true)
    } else if total == config.base_total {
        Ok(false)
    } else {
        Err(FeatureError::NotInSpace {
            total,
            base: config.base_total,
            efficient: config.efficient_total(),
        })
    }
}

/// Exactly one outcome pays nothing to both players.
pub fn is_safe(game: &BimatrixGame) -> bool {
    game.iter().filter(|(_, _, p)| p.is_zero()).count() == 1
}

/// The label a game earns under the predicates of `config`.
pub fn classify(game: &BimatrixGame, config: &SpaceConfig) -> Result<FeatureVector, FeatureError> {
    let mut bits = vec![is_stable(game), is_efficient(game, config)?, is_fair(game)];
    if config.feature_count >= 4 {
        bits.push(is_safe(game));
    }
    Ok(FeatureVector::from_bools(&bits))
}
