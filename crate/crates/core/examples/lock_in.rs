//! Step flags along every bottom-to-top path of the reported preference
//! table; a neutral or resisting step after the first marks lock-in.
//!
//! ```bash
//! cargo run -p instlab --example lock_in
//! ```

use instlab::analysis::{canonical_paths, path_gradient_partial};
use instlab::fixtures::paper_preference_table;

fn main() {
    let table = paper_preference_table();
    for path in canonical_paths(3) {
        let g = path_gradient_partial(&table, &path).expect("paths are adjacent");
        let flags: Vec<String> = g.flags().iter().map(|f| format!("{f:?}")).collect();
        println!("{:<16} {:<30} lock-in prone: {}", g.path_string(), flags.join(" "), g.lock_in_prone);
    }
}
