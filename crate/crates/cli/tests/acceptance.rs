//! The acceptance suite: one line per criterion, failing the run if any fails.

use posetahedra::harness::{criteria, run_criterion};
use posetahedra_core::geometry::RealizeOptions;

fn main() {
    let opts = RealizeOptions::default();
    let mut failed = Vec::new();
    for c in criteria() {
        let o = run_criterion(&c, &opts);
        println!("{}", o.line());
        if !o.passed {
            failed.push(o.id);
        }
    }
    let total = criteria().len();
    println!("acceptance: {}/{} criteria passed", total - failed.len(), total);
    if !failed.is_empty() {
        eprintln!("failed criteria: {:?}", failed);
        std::process::exit(1);
    }
}
