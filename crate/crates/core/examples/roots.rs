//! Collect pairings with a reciprocal pair of rational roots, the candidates
//! for unfaithfulness at a rational point.
//!
//! Usage: `cargo run --release --example roots -- [k_max]`

use std::collections::BTreeMap;

use burau4::search::{root_collect, HitKind, ScanParams};

fn main() {
    let k_max: u32 = std::env::args().nth(1).map_or(60, |s| s.parse().unwrap());
    let state = root_collect(ScanParams::collect_roots(4, k_max)).unwrap();
    let mut by_root: BTreeMap<String, Vec<String>> = BTreeMap::new();
    for h in &state.hits {
        if let HitKind::RationalRootCandidate { roots } = &h.kind {
            for r in roots {
                by_root.entry(r.clone()).or_default().push(format!("{} (k={})", h.spec, h.k));
            }
        }
    }
    for (r, specs) in &by_root {
        println!("q0 = {r}: {} specs, first {}", specs.len(), specs[0]);
    }
    println!(
        "{} valid specs up to k = {k_max}, {} candidates",
        state.counters.valid, state.counters.root_candidates
    );
}
