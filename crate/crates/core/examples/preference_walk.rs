//! Hypercube walks from the bottom vertex under the three preference models
//! and the three acceptance rules.
//!
//! ```bash
//! cargo run -p instlab --example preference_walk
//! ```

use instlab::agents::{run_walk, Acceptance, Experience, PreferenceModel};
use instlab::features::{generate_space, SpaceConfig};
use instlab::{fixtures, rng, FeatureVector};

fn main() {
    let space = generate_space(&SpaceConfig::default()).expect("default space");
    let start = FeatureVector::bottom(3);
    let experience: Experience = space.games.iter().map(|(l, g)| (*l, g.max_payoff())).collect();
    let models = [
        ("binmore", PreferenceModel::binmore()),
        ("experienced", PreferenceModel::ExperiencedPayoff),
        ("table", PreferenceModel::EmpiricalTable(fixtures::paper_preference_table())),
    ];
    for (name, model) in &models {
        for acceptance in [Acceptance::Draw, Acceptance::Majority, Acceptance::SignificantMajority] {
            let mut r = rng::keyed(1, name);
            let w = run_walk(&space, start, model, acceptance, 10, &experience, &mut r).expect("valid walk");
            let path: Vec<String> = w.trajectory.iter().map(|v| v.to_string()).collect();
            println!("{name:<12} {acceptance:<22} {:<20} attractor {}", path.join(">"), w.attractor);
        }
    }
}
