//! Prints the invariant package of each knot given on the command line.
//!
//! cargo run --release -p hfb-core --example invariants -- "pretzel(2,-3,-7)"

use hfb_core::config::RunConfig;
use hfb_core::knots::{invariants, KnotSpec};

fn main() {
    let cfg = RunConfig { verify: true, ..Default::default() };
    for arg in std::env::args().skip(1) {
        match arg.parse::<KnotSpec>().and_then(|k| invariants(&k, &cfg)) {
            Ok(p) => println!("{p}\n"),
            Err(e) => eprintln!("{arg}: {e}"),
        }
    }
}
