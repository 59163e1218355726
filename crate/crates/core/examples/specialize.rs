//! Search for pairings vanishing at both q0 and 1/q0.
//!
//! Usage: `cargo run --release --example specialize -- [q0] [k_max]`

use burau4::search::{default_filters, parse_rational, specialize_scan, HitKind, ScanParams, DEFAULT_SEED};

fn main() {
    let mut args = std::env::args().skip(1);
    let q0 = parse_rational(&args.next().unwrap_or_else(|| "2".into())).unwrap();
    let k_max: u32 = args.next().map_or(108, |s| s.parse().unwrap());
    let t = std::time::Instant::now();
    let state = specialize_scan(ScanParams::specialize(4, k_max, &q0, default_filters(DEFAULT_SEED))).unwrap();
    for h in &state.hits {
        if let HitKind::Specialization { .. } = h.kind {
            println!("k = {:>3}  {}  {}", h.k, h.spec, h.poly.as_ref().unwrap());
        }
    }
    println!(
        "{} specs in {:?}, {} hits",
        state.counters.valid,
        t.elapsed(),
        state.counters.specialization_hits
    );
}
