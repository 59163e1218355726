//! Laurent polynomial arithmetic, normalization and root finding.

use burau4::laurent::LaurentPoly;
use burau4::modular::{ModPoint, MERSENNE_61};
use num_rational::BigRational;

fn main() {
    let p = LaurentPoly::from_i64s(-2, &[2, -9, 18, -25, 25, -18, 9, -2]);
    println!("p            = {p}");
    println!("normalized   = {}", p.normalize());
    println!("mirror       = {}", p.mirror());
    println!("p(-1)        = {}", p.value_at_minus_one());

    let half = BigRational::new(1.into(), 2.into());
    println!("p(1/2)       = {}", p.evaluate(&half).unwrap());

    let roots = p.rational_roots().unwrap();
    let show: Vec<String> = roots.roots.iter().map(|r| r.to_string()).collect();
    println!("rational roots {}", show.join(", "));
    let pairs: Vec<String> = roots.reciprocal_pairs.iter().map(|r| r.to_string()).collect();
    println!("closed under q -> 1/q, excluding ±1: {}", pairs.join(", "));

    let pt = ModPoint::new(123_456_789, MERSENNE_61).unwrap();
    println!("p mod 2^61-1 at q0 = 123456789: {}", p.eval_mod(&pt));
}
