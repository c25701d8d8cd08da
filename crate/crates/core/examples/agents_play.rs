//! Each agent policy in self-play on every game of the default space.
//!
//! ```bash
//! cargo run -p instlab --example agents_play
//! ```

use instlab::agents::{self_play, AgentPolicy, PolicyKind};
use instlab::features::{generate_space, SpaceConfig};
use instlab::rng;

fn main() {
    let space = generate_space(&SpaceConfig::default()).expect("default space");
    let kinds = [PolicyKind::UniformRandom, PolicyKind::MyopicBestResponse, PolicyKind::FictitiousPlay, PolicyKind::EquilibriumSeeker];
    print!("{:<6}", "game");
    for k in kinds {
        print!("{:>22}", k.to_string());
    }
    println!("   (share of rounds with some payoff)");
    for (label, game) in &space.games {
        print!("{label:<6}");
        for k in kinds {
            let mut r = rng::keyed(7, &format!("{label}/{k}"));
            let play = self_play(game, *label, &AgentPolicy::new(k), 2_000, &mut r);
            let coop = play.iter().filter(|&&(a1, a2)| game.payoff(a1, a2).u1 + game.payoff(a1, a2).u2 > 0).count();
            print!("{:>22.3}", coop as f64 / play.len() as f64);
        }
        println!();
    }
}
