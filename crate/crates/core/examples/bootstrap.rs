//! Percentile bootstrap intervals for a proportion, and their coverage.
//!
//! ```bash
//! cargo run -p instlab --release --example bootstrap
//! ```

use instlab::analysis::{BootstrapConfig, Estimate};
use instlab::rng;
use rand::Rng;

fn main() {
    let cfg = BootstrapConfig::default();
    let outcomes: Vec<bool> = (0..300).map(|i| i % 2 == 0).collect();
    println!("300 trials at 0.5: {}", Estimate::from_outcomes(&outcomes, &cfg, "demo").unwrap());

    let (p, n, reps) = (0.3, 200, 200);
    let quick = BootstrapConfig { resamples: 2_000, ..cfg };
    let mut r = rng::keyed(9, "coverage");
    let covered = (0..reps)
        .filter(|i| {
            let sample: Vec<bool> = (0..n).map(|_| r.gen_bool(p)).collect();
            Estimate::from_outcomes(&sample, &quick, &format!("rep/{i}")).unwrap().contains(p)
        })
        .count();
    println!("coverage of p={p} at n={n}: {:.3} over {reps} replicates", covered as f64 / reps as f64);
}
