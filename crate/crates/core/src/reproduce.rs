//! Golden checks against the published values.

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::Serialize;

use crate::braid::{q2_kernel_braid, BraidWord};
use crate::burau::{burau_generic, burau_rational, generator_matrix, is_identity, scalar_value, Generic, RationalAt};
use crate::forkpair::{pairing_poly, ForkSpec};
use crate::garside::is_trivial_braid;
use crate::laurent::LaurentPoly;
use crate::search::{default_filters, specialize_scan, HitKind, ScanParams, DEFAULT_SEED};

pub const FIGURE_FOUR_SPEC: &str = "n=4;c=24,18,11,0;ends=1,3";

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GoldenCheck {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn check(name: &'static str, passed: bool, detail: impl Into<String>) -> GoldenCheck {
    GoldenCheck {
        name,
        passed,
        detail: detail.into(),
    }
}

fn p(min_deg: i64, c: &[i64]) -> LaurentPoly {
    LaurentPoly::from_i64s(min_deg, c)
}

/// `-(q-1)(q-2)(2q-1)(q^2-q+1)(q^2+1)`, multiplied out.
pub fn figure_four_polynomial() -> LaurentPoly {
    let factors = [
        p(0, &[-1, 1]),
        p(0, &[-2, 1]),
        p(0, &[-1, 2]),
        p(0, &[1, -1, 1]),
        p(0, &[1, 0, 1]),
    ];
    let prod = factors.iter().fold(LaurentPoly::one(), |acc, f| &acc * f);
    &LaurentPoly::monomial(-1, 0) * &prod
}

/// Printed 3x3 image of σᵢ, row-major over `Z[q]` as `(coeff of 1, coeff of q)`.
fn printed_generator(i: usize) -> [[(i64, i64); 3]; 3] {
    let (z, one, mq, q) = ((0, 0), (1, 0), (0, -1), (0, 1));
    match i {
        1 => [[mq, q, z], [z, one, z], [z, z, one]],
        2 => [[one, z, z], [one, mq, q], [z, z, one]],
        _ => [[one, z, z], [z, one, z], [z, one, mq]],
    }
}

fn generator_checks() -> Vec<GoldenCheck> {
    let names = ["sigma1 matrix", "sigma2 matrix", "sigma3 matrix"];
    (1..=3)
        .map(|i| {
            let m = generator_matrix(&Generic, 4, i, false);
            let printed = printed_generator(i);
            let ok = (0..3).all(|r| {
                (0..3).all(|c| {
                    let (a, b) = printed[r][c];
                    *m.get(r, c) == p(0, &[a, b])
                })
            });
            let rows: Vec<String> = m
                .rows()
                .iter()
                .map(|r| r.iter().map(|e| e.to_string()).collect::<Vec<_>>().join(", "))
                .collect();
            check(names[i - 1], ok, format!("[{}]", rows.join("; ")))
        })
        .collect()
}

fn full_twist_check() -> GoldenCheck {
    let w = BraidWord::new(3, [1, 2].repeat(3)).expect("valid word");
    let m = burau_generic(&w);
    let s = scalar_value(&Generic, &m);
    let ok = s.as_ref() == Some(&LaurentPoly::monomial(1, 3));
    check(
        "B3 full twist is q^3 I",
        ok,
        match s {
            Some(v) => format!("scalar {v}"),
            None => "not scalar".into(),
        },
    )
}

fn pairing_checks() -> Vec<GoldenCheck> {
    let spec: ForkSpec = FIGURE_FOUR_SPEC.parse().expect("valid spec");
    let got = match pairing_poly(&spec) {
        Ok(v) => v,
        Err(e) => return vec![check("figure 4 pairing", false, e.to_string())],
    };
    let want = figure_four_polynomial();
    let assoc = got.normalize_with_mirror() == want.normalize_with_mirror()
        || got.normalize_with_mirror() == (&LaurentPoly::monomial(-1, 0) * &want).normalize_with_mirror();
    let at_minus_one = got.value_at_minus_one();
    let two = BigRational::from_integer(2.into());
    let half = BigRational::new(1.into(), 2.into());
    vec![
        check("figure 4 pairing matches Corollary polynomial", assoc, format!("{got}")),
        check(
            "figure 4 pairing |P(-1)| = 108",
            at_minus_one == BigInt::from(108) || at_minus_one == BigInt::from(-108),
            format!("P(-1) = {at_minus_one}"),
        ),
        check(
            "2 and 1/2 are roots",
            got.is_root(&two) && got.is_root(&half),
            "",
        ),
    ]
}

fn braid_checks() -> Vec<GoldenCheck> {
    let beta = q2_kernel_braid();
    let two = BigRational::from_integer(2.into());
    let at2 = burau_rational(&beta, &two).map(|m| is_identity(&RationalAt::integer(2).expect("unit"), &m));
    let generic = burau_generic(&beta);
    vec![
        check(
            "beta is in the kernel at q = 2",
            at2 == Ok(true),
            format!("{} letters", beta.len()),
        ),
        check("beta generic image is not the identity", !is_identity(&Generic, &generic), ""),
        check("beta is a non-trivial braid", !is_trivial_braid(&beta), "left normal form"),
    ]
}

fn scan_check() -> GoldenCheck {
    let two = BigRational::from_integer(2.into());
    let params = ScanParams::specialize(4, 108, &two, default_filters(DEFAULT_SEED));
    match specialize_scan(params) {
        Err(e) => check("specialize scan at q = 2 first hits figure 4", false, e.to_string()),
        Ok(state) => {
            let hits: Vec<_> = state
                .hits
                .iter()
                .filter(|h| matches!(h.kind, HitKind::Specialization { .. }))
                .collect();
            let first = hits.iter().map(|h| h.k).min();
            let has_fig4 = hits
                .iter()
                .any(|h| h.spec.to_string() == FIGURE_FOUR_SPEC);
            check(
                "specialize scan at q = 2 first hits figure 4",
                first == Some(108) && has_fig4,
                format!("{} hits, smallest k {:?}", hits.len(), first),
            )
        }
    }
}

/// Run the golden suite. `with_scan` adds the q = 2 specialization scan up to
/// k = 108, which dominates the runtime.
pub fn run_golden(with_scan: bool) -> Vec<GoldenCheck> {
    let mut out = generator_checks();
    out.push(full_twist_check());
    out.extend(pairing_checks());
    out.extend(braid_checks());
    if with_scan {
        out.push(scan_check());
    }
    out
}
