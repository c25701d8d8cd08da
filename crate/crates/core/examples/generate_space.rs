//! Generate the default 8-game space (or the 16-game space with `4` as the
//! first argument) and print every game with its equilibria.
//!
//! ```bash
//! cargo run -p instlab --example generate_space
//! cargo run -p instlab --example generate_space -- 4
//! ```

use instlab::features::{generate_space, pure_nash_equilibria, verify_space, SpaceConfig};

fn main() {
    let features = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(3);
    let space = generate_space(&SpaceConfig::with_features(features)).expect("default config is satisfiable");
    for (label, game) in &space.games {
        let eq: Vec<String> = pure_nash_equilibria(game)
            .into_iter()
            .map(|(r, c)| format!("({},{})", r.index(), c.index()))
            .collect();
        println!("{label} layer {}  {game}  total {:>2}  equilibria {}", label.layer(), game.total(), eq.join(" "));
    }
    println!("{}", verify_space(&space));
}
