//! Prints the bundled demo activity script to stdout.
//!
//! The demo covers two independent three-agent groups sharing one timeline,
//! so a single simulated dataset supports leave-one-group-out evaluation.
//! Regenerate the checked-in file with:
//!
//! ```text
//! cargo run -p bodyfield-core --example demo_script > demo/script.toml
//! ```

use bodyfield_core::sim::{group_day_script, ActivityScript};

fn main() {
    let g1 = group_day_script(1, 1, &["P1", "P2", "P3"], 150.0, 11).unwrap();
    let g2 = group_day_script(2, 1, &["Q1", "Q2", "Q3"], 150.0, 12).unwrap();
    let merged = ActivityScript {
        agents: g1.agents.into_iter().chain(g2.agents).collect(),
        segments: g1.segments.into_iter().chain(g2.segments).collect(),
    };
    merged.validate().unwrap();
    print!("{}", toml::to_string_pretty(&merged).unwrap());
}
