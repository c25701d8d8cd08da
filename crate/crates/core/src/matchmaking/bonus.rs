use crate::game::{Action, BimatrixGame};
use num_rational::Ratio;

/// Counts of each canonical Player-2 action.
pub fn action_counts(history: &[Action]) -> [u64; 2] {
    let firsts = history.iter().filter(|&&a| a == Action::First).count() as u64;
    [firsts, history.len() as u64 - firsts]
}

/// Laplace-smoothed probability of each Player-2 action:
/// `(count + 1) / (n + 2)`.
pub fn smoothed_p2(history: &[Action]) -> [Ratio<u64>; 2] {
    smoothed_from_counts(action_counts(history))
}

pub fn smoothed_from_counts(counts: [u64; 2]) -> [Ratio<u64>; 2] {
    let n = counts[0] + counts[1];
    counts.map(|c| Ratio::new(c + 1, n + 2))
}

/// Expected Player-1 points for canonical move `a1`, against Player-2
/// behavior estimated from `history` (canonical moves in this game).
pub fn estimate_bonus_p1(game: &BimatrixGame, a1: Action, history: &[Action]) -> Ratio<u64> {
    bonus_from_counts(game, a1, action_counts(history))
}

/// [`estimate_bonus_p1`] from Player-2 action counts.
pub fn bonus_from_counts(game: &BimatrixGame, a1: Action, counts: [u64; 2]) -> Ratio<u64> {
    let p = smoothed_from_counts(counts);
    Action::ALL
        .iter()
        .map(|&a2| p[a2.index()] * Ratio::from_integer(u64::from(game.payoff(a1, a2).u1)))
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_prior_without_history() {
        let g = BimatrixGame::from_tuples("g", [[(4, 0), (0, 0)], [(0, 0), (1, 3)]]);
        assert_eq!(estimate_bonus_p1(&g, Action::TOP, &[]), Ratio::from_integer(2));
    }

    #[test]
    fn laplace_smoothing() {
        let h = [Action::LEFT, Action::LEFT, Action::LEFT, Action::RIGHT];
        assert_eq!(smoothed_p2(&h), [Ratio::new(4, 6), Ratio::new(2, 6)]);
    }
}
