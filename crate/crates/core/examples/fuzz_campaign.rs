//! Run a seeded random campaign comparing the search with the oracles.
//!
//! cargo run --release --example fuzz_campaign -- [seed] [cases]

use mmlk::fuzz::{run_fuzz, Bounds, CheckOptions, FuzzConfig};

fn main() {
    let mut args = std::env::args().skip(1);
    let seed = args.next().map_or(7, |s| s.parse().expect("seed is an integer"));
    let cases = args.next().map_or(500, |s| s.parse().expect("cases is an integer"));

    let config = FuzzConfig {
        seed,
        cases,
        bounds: Bounds { max_states: 8, max_formula_size: 10, ..Bounds::default() },
        options: CheckOptions { enumeration_bound: Some(12), ..CheckOptions::default() },
    };
    let report = run_fuzz(&config);
    print!("{report}");
    if report.failure.is_some() {
        std::process::exit(1);
    }
}
