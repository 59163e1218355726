//! From a specialization hit to an explicit kernel element.
//!
//! Usage: `cargo run --release --example synthesize -- [spec] [q0]`

use burau4::forkpair::ForkSpec;
use burau4::kernelgen::{arc_of_spec, build_candidate, coords_action, synthesize_conjugator, ArcCoords, CandidateMode};
use burau4::search::parse_rational;

fn main() {
    let mut args = std::env::args().skip(1);
    let spec: ForkSpec = args
        .next()
        .unwrap_or_else(|| "n=4;c=24,18,11,0;ends=1,3".into())
        .parse()
        .unwrap();
    let q0 = parse_rational(&args.next().unwrap_or_else(|| "2".into())).unwrap();

    let arc = arc_of_spec(&spec).unwrap();
    println!("tine edge {spec}: boundary word of length {}", arc.complexity());
    let s = synthesize_conjugator(&spec).unwrap();
    println!("w = {}  carries p{}p{} onto it ({} moves)", s.word, s.standard, s.standard + 1, s.moves);
    assert_eq!(coords_action(&s.word, &ArcCoords::standard(4, s.standard)), arc);

    match build_candidate(&spec, &CandidateMode::Specialization(q0.clone())) {
        Ok(c) => {
            println!("candidate with {} letters: {}", c.word.len(), c.word);
            println!("kernel at q = {q0}: {}", c.checks.kernel_at(&q0));
            println!("{}", serde_json::to_string_pretty(&c.checks).unwrap());
        }
        Err(e) => println!("no candidate: {e}"),
    }
}
