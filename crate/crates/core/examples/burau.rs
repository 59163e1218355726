//! Burau matrices: generic, at a rational point and modulo a prime.

use burau4::braid::parse_word;
use burau4::burau::{burau_generic, burau_mod, burau_rational, determinant, scalar_value, Generic};
use burau4::modular::{ModPoint, MERSENNE_61};
use num_rational::BigRational;

fn show<T: std::fmt::Display + Clone>(m: &burau4::burau::Matrix<T>) {
    for row in m.rows() {
        let cells: Vec<String> = row.iter().map(|c| format!("{c:>12}")).collect();
        println!("  [{}]", cells.join(" "));
    }
}

fn main() {
    for g in ["a", "b", "c"] {
        println!("{g}:");
        show(&burau_generic(&parse_word(g, 4).unwrap()));
    }

    let twist = parse_word("(abc)^4", 4).unwrap();
    let m = burau_generic(&twist);
    println!("full twist on 4 strands is scalar {}", scalar_value(&Generic, &m).unwrap());

    let w = parse_word("a b^-1 c a", 4).unwrap();
    println!("det of {w} = {}", determinant(&Generic, &burau_generic(&w)));
    println!("{w} at q = 3/2:");
    show(&burau_rational(&w, &BigRational::new(3.into(), 2.into())).unwrap());
    println!("{w} mod 2^61-1 at q0 = 7:");
    show(&burau_mod(&w, ModPoint::new(7, MERSENNE_61).unwrap()));
}
