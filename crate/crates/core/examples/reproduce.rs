//! Golden checks against the published values.
//!
//! Usage: `cargo run --release --example reproduce -- [--full]`

use burau4::reproduce::run_golden;

fn main() {
    let full = std::env::args().any(|a| a == "--full");
    let checks = run_golden(full);
    for c in &checks {
        let mark = if c.passed { "PASS" } else { "FAIL" };
        if c.detail.is_empty() {
            println!("{mark} {}", c.name);
        } else {
            println!("{mark} {}  ({})", c.name, c.detail);
        }
    }
    if !checks.iter().all(|c| c.passed) {
        std::process::exit(3);
    }
}
