//! Arrivals at one room: seeded tables, Player-2 joins, Player-1 bonuses.
//!
//! ```bash
//! cargo run -p instlab --example matchmaking_room
//! ```

use instlab::analysis::Source;
use instlab::features::{generate_space, SpaceConfig};
use instlab::matchmaking::{estimate_bonus_p1, MatchError, MoveOutcome, Room};
use instlab::{rng, Action, FeatureVector, Role, Transformation};
use rand::Rng;

fn main() {
    let space = generate_space(&SpaceConfig::default()).expect("default space");
    let label: FeatureVector = "110".parse().unwrap();
    let game = space.game(label).unwrap().clone();
    let mut r = rng::keyed(3, "room");
    let (mut room, events) = Room::open("110/I", label, game.clone(), Transformation::Identity, 4, 2, &mut r).unwrap();
    println!("opened with {} events", events.len());
    for i in 0..10 {
        let id = format!("p{i}");
        let seat = match room.seat(&id, &mut r) {
            Ok((seat, _)) => seat,
            Err(MatchError::RoomFull(_)) => {
                println!("all tables busy or resolved; adding 4");
                room.add_tables(4);
                room.seat(&id, &mut r).unwrap().0
            }
            Err(e) => panic!("{e}"),
        };
        let action = if r.gen_bool(0.8) { Action::Second } else { Action::First };
        let bonus = (seat.role == Role::Player1).then(|| estimate_bonus_p1(&game, action, room.p2_history()));
        match room.submit_move(&seat, action, Source::Agent).unwrap().0 {
            MoveOutcome::Pending => println!("{id} opens table {} as P1, estimated bonus {}", seat.table_id, bonus.unwrap()),
            MoveOutcome::Resolved(res) => println!(
                "{id} joins table {} as P2 against {:?}: ({}, {}) -> {}",
                res.table_id,
                res.p1_session.as_deref().unwrap_or("seed"),
                res.a1.index(),
                res.a2.index(),
                res.payoffs
            ),
        }
    }
    room.audit().expect("indexes agree with tables");
    assert_eq!(Room::replay(room.history()).unwrap(), room);
}
