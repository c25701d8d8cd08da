use instlab::analysis::{BootstrapConfig, Estimate, Source};
use instlab::features::{classify, pure_nash_equilibria, SpaceConfig};
use instlab::game::viewer_presentation;
use instlab::matchmaking::{MatchError, Room};
use instlab::{rng, Action, BimatrixGame, FeatureVector, Role, Transformation};
use proptest::prelude::*;

fn game() -> impl Strategy<Value = BimatrixGame> {
    prop::array::uniform8(0u32..20).prop_map(|e| BimatrixGame::from_flat("g", e))
}

fn kind() -> impl Strategy<Value = Transformation> {
    (0usize..8).prop_map(|i| Transformation::ALL[i])
}

proptest! {
    #![proptest_config(ProptestConfig { failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn presentation_preserves_features_and_payoffs(g in game(), t in kind(), own in 0usize..2, other in 0usize..2) {
        let cfg = SpaceConfig::default();
        let shown = t.apply(&g);
        prop_assert_eq!(classify(&shown, &cfg), classify(&g, &cfg));
        prop_assert_eq!(pure_nash_equilibria(&shown).len(), pure_nash_equilibria(&g).len());
        // whatever a viewer clicks, the canonical outcome pays what the board shows
        for role in Role::ALL {
            let view = viewer_presentation(&g, role, t);
            let (own, other) = (Action::ALL[own], Action::ALL[other]);
            let mine = view.to_canonical(own);
            let theirs = view.opponent_to_displayed(other);
            let (a1, a2) = if role == Role::Player1 { (mine, theirs) } else { (theirs, mine) };
            let cell = view.displayed_cell(own, other);
            let truth = g.payoff(a1, a2);
            prop_assert_eq!(view.own_payoff(cell), truth.of(role));
            // boards list the row chooser's points first
            let expected = if t.transposes() { (truth.u2, truth.u1) } else { (truth.u1, truth.u2) };
            prop_assert_eq!((cell.u1, cell.u2), expected);
        }
    }

    #[test]
    fn estimates_are_ordered_and_bounded(outcomes in prop::collection::vec(any::<bool>(), 1..200), seed in any::<u64>()) {
        let cfg = BootstrapConfig { resamples: 300, seed, ..Default::default() };
        let e = Estimate::from_outcomes(&outcomes, &cfg, "p").unwrap();
        prop_assert!(0.0 <= e.ci_low && e.ci_low <= e.value && e.value <= e.ci_high && e.ci_high <= 1.0);
        let c = e.complement();
        prop_assert!((c.value + e.value - 1.0).abs() < 1e-12 && c.contains(1.0 - e.value));
    }

    #[test]
    fn neighbors_differ_in_one_feature(bits in 0u8..16) {
        let v = FeatureVector::new(4, bits);
        for n in v.neighbors() {
            prop_assert_eq!(v.hamming(n), 1);
            prop_assert_eq!(n.flip(v.differing_bit(n).unwrap()), v);
            prop_assert_eq!(n.layer().abs_diff(v.layer()), 1);
        }
    }

    #[test]
    fn rooms_stay_consistent_under_any_arrival_order(ops in prop::collection::vec((0u8..12, 0u8..3, any::<bool>()), 1..120), seed in any::<u64>()) {
        let g = BimatrixGame::from_flat("g", [0, 0, 0, 0, 1, 0, 8, 7]);
        let mut r = rng::keyed(seed, "room");
        let (mut room, _) = Room::open("r", FeatureVector::new(3, 0b100), g, Transformation::SwapCols, 3, 1, &mut r).unwrap();
        for (who, what, first) in ops {
            let id = format!("s{who}");
            match what {
                0 => match room.seat(&id, &mut r) {
                    Ok(_) | Err(MatchError::AlreadySeated(_)) => {}
                    Err(MatchError::RoomFull(_)) => drop(room.add_tables(2)),
                    Err(e) => prop_assert!(false, "{e}"),
                },
                1 => {
                    if let Some(seat) = room.live_seat(&id) {
                        let a = if first { Action::First } else { Action::Second };
                        room.submit_move(&seat, a, Source::Human).unwrap();
                        prop_assert!(room.submit_move(&seat, a, Source::Human).is_err());
                    }
                }
                _ => drop(room.release(&id)),
            }
            prop_assert_eq!(room.audit(), Ok(()));
        }
        prop_assert_eq!(Room::replay(room.history()).unwrap(), room);
    }
}
