//! Noodle-fork pairings from standard-form counts.
//!
//! Usage: `cargo run --example pairing -- "n=4;c=24,18,11,0;ends=1,3"`

use burau4::forkpair::{build_diagram, pairing_mod, pairing_poly, ForkSpec};
use burau4::search::{default_filters, DEFAULT_SEED};

fn main() {
    let text = std::env::args()
        .nth(1)
        .unwrap_or_else(|| "n=4;c=24,18,11,0;ends=1,3".into());
    let spec: ForkSpec = text.parse().expect("spec like n=4;c=1,2,3,0;ends=1,3");
    let d = build_diagram(&spec).expect("valid standard form");
    let p = pairing_poly(&spec).unwrap();
    println!("spec      {spec}");
    println!("k         {}", d.k);
    println!("<N,F>     {p}");
    println!("P(-1)     {}", p.value_at_minus_one());
    if let Some(m) = spec.mirror() {
        println!("mirror    {m}: {}", pairing_poly(&m).unwrap());
    }
    let filters = default_filters(DEFAULT_SEED);
    for e in pairing_mod(&spec, &filters).unwrap().residues().unwrap() {
        println!("residue   {e}");
    }
    let first: Vec<String> = d
        .traversal
        .iter()
        .take(8)
        .map(|v| format!("{}q^{}", if v.sign > 0 { "+" } else { "-" }, v.exponent))
        .collect();
    println!("first terms along the edge: {} ...", first.join(" "));
}
