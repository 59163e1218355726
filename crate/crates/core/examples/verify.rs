//! Verify the published kernel element at q = 2 and a word of your own.
//!
//! Usage: `cargo run --example verify -- ["word"] [q0,...]`

use burau4::braid::{parse_word, q2_kernel_braid};
use burau4::garside::left_normal_form;
use burau4::kernelgen::manual_candidate;
use burau4::search::parse_rational;

fn main() {
    let beta = q2_kernel_braid();
    let two = parse_rational("2").unwrap();
    let c = manual_candidate(beta.clone(), "published q = 2 example", &[two.clone()]).unwrap();
    println!("beta has {} letters", beta.len());
    println!("kernel at q = 2: {}", c.checks.kernel_at(&two));
    println!("generic Burau identity: {}", c.checks.generic);
    let nf = left_normal_form(&beta);
    println!("left normal form: Δ^{} and {} simple factors", nf.delta_power, nf.canonical_length());

    let mut args = std::env::args().skip(1);
    if let Some(text) = args.next() {
        let w = parse_word(&text, 4).expect("braid word on 4 strands");
        let targets: Vec<_> = args
            .next()
            .unwrap_or_else(|| "2".into())
            .split(',')
            .map(|s| parse_rational(s).unwrap())
            .collect();
        let c = manual_candidate(w, "command line", &targets).unwrap();
        println!("{}", serde_json::to_string_pretty(&c).unwrap());
    }
}
