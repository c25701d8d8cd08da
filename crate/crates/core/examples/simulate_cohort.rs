//! A simulated cohort of 301 participants and its cooperation by layer.
//!
//! ```bash
//! cargo run -p instlab --release --example simulate_cohort
//! ```

use instlab::agents::{simulate_cohort, SimulationConfig};
use instlab::analysis::{report, ReportConfig};
use instlab::features::{generate_space, SpaceConfig};
use instlab::protocol::all_conditions;

fn main() {
    let space = generate_space(&SpaceConfig::default()).expect("default space");
    let data = simulate_cohort(&space, &all_conditions(3), 301, &SimulationConfig::default(), 42).expect("valid config");
    println!("{} trials, {} choices", data.trials.len(), data.preferences.len());
    let r = report(&data, &space, &ReportConfig::default()).expect("non-empty");
    for (label, e) in &r.cooperation {
        println!("{label}  {e}");
    }
    if let Some(layers) = r.cooperation_layers {
        println!("layer means {:?}, monotone {}", layers.layer_means, layers.is_monotone());
    }
}
