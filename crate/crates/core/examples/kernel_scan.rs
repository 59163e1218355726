//! Filtered search for exact-zero pairings, with a resumable checkpoint.
//!
//! Usage: `cargo run --release --example kernel_scan -- [k_max]`

use burau4::search::{default_filters, Checkpoint, Scan, ScanParams, DEFAULT_SEED};

fn main() {
    let k_max: u32 = std::env::args().nth(1).map_or(40, |s| s.parse().unwrap());
    let params = ScanParams::kernel(4, k_max, default_filters(DEFAULT_SEED));
    let dir = std::env::temp_dir().join("burau4-kernel-scan-example.json");

    let state = match Checkpoint::load(&dir, &params) {
        Ok(cp) => {
            println!("resuming at k = {}", cp.cursor.k);
            cp
        }
        Err(_) => Checkpoint::fresh(params),
    };
    let mut scan = Scan::resume(state).unwrap();
    while !scan.is_done() {
        for h in scan.advance(50_000) {
            println!("{}", serde_json::to_string(&h).unwrap());
        }
        scan.state().save(&dir).unwrap();
    }
    let c = &scan.state().counters;
    println!(
        "k <= {k_max}: {} tuples, {} valid, {} filter events, {} exact kernel hits",
        c.enumerated, c.valid, c.filter_hits, c.kernel_hits
    );
    let _ = std::fs::remove_file(&dir);
}
