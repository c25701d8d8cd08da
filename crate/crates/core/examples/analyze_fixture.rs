//! The full analysis pipeline on a synthetic dataset with the reference
//! study's shape, writing report.json and CSV tables.
//!
//! ```bash
//! cargo run -p instlab --release --example analyze_fixture -- /tmp/report
//! ```

use instlab::analysis::{report, ReportConfig};
use instlab::features::{generate_space, SpaceConfig};
use instlab::fixtures::paper_shaped_dataset;
use std::fs::{self, File};
use std::path::PathBuf;

fn main() {
    let out = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "report".into()));
    let space = generate_space(&SpaceConfig::default()).expect("default space");
    let data = paper_shaped_dataset(&space, 0);
    let r = report(&data, &space, &ReportConfig::default()).expect("fixture is consistent");
    println!("{:?}", r.counts);
    for p in &r.preferences {
        println!("{}  {}", p.pair, p.estimate);
    }
    fs::create_dir_all(&out).unwrap();
    fs::write(out.join("report.json"), r.to_json()).unwrap();
    r.write_cooperation_csv(File::create(out.join("cooperation.csv")).unwrap()).unwrap();
    r.write_preferences_csv(File::create(out.join("preferences.csv")).unwrap()).unwrap();
    r.write_paths_csv(File::create(out.join("paths.csv")).unwrap()).unwrap();
    println!("written to {}", out.display());
}
