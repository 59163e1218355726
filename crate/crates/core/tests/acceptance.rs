//! Acceptance run: one PASS/FAIL line per criterion, non-zero exit on any
//! failure.

mod common;

use std::collections::BTreeSet;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use burau4::braid::{q2_kernel_braid, BraidWord};
use burau4::burau::{burau_generic, burau_rational, generator_matrix, is_identity, scalar_value, Generic, RationalAt};
use burau4::error::KernelError;
use burau4::forkpair::{build_diagram, pairing_exact, pairing_mod, ForkSpec};
use burau4::garside::is_trivial_braid;
use burau4::kernelgen::{coords_action, synthesize_from_coords, ArcCoords, DEFAULT_PLATEAU_BUDGET};
use burau4::laurent::LaurentPoly;
use burau4::modular::{ModPoint, MERSENNE_61};
use burau4::reproduce::{figure_four_polynomial, FIGURE_FOUR_SPEC};
use burau4::search::{
    default_filters, enumerate, kernel_scan, Checkpoint, HitKind, Scan, ScanParams, DEFAULT_SEED,
};

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(limit: Duration, t: Duration) -> Result<(), String> {
    ensure(t <= limit, || format!("took {t:?}, limit {limit:?}"))
}

fn p(c: &[i64]) -> LaurentPoly {
    LaurentPoly::from_i64s(0, c)
}

fn two() -> BigRational {
    BigRational::from_integer(2.into())
}

fn criterion_1() -> Outcome {
    let t = Instant::now();
    let (o, one, mq, q) = (p(&[]), p(&[1]), p(&[0, -1]), p(&[0, 1]));
    let printed = [
        vec![vec![mq.clone(), q.clone(), o.clone()], vec![o.clone(), one.clone(), o.clone()], vec![o.clone(), o.clone(), one.clone()]],
        vec![vec![one.clone(), o.clone(), o.clone()], vec![one.clone(), mq.clone(), q.clone()], vec![o.clone(), o.clone(), one.clone()]],
        vec![vec![one.clone(), o.clone(), o.clone()], vec![o.clone(), one.clone(), o.clone()], vec![o.clone(), one.clone(), mq.clone()]],
    ];
    for (i, want) in printed.iter().enumerate() {
        let got = generator_matrix(&Generic, 4, i + 1, false).rows();
        ensure(&got == want, || format!("sigma{} differs: {got:?}", i + 1))?;
    }
    let twist = BraidWord::new(3, [1, 2].repeat(3)).unwrap();
    let s = scalar_value(&Generic, &burau_generic(&twist));
    ensure(s == Some(LaurentPoly::monomial(1, 3)), || format!("B3 full twist gives {s:?}"))?;
    let elapsed = t.elapsed();
    within(Duration::from_millis(1), elapsed)?;
    Ok(format!("3 generator matrices verbatim, (ab)^3 -> q^3 I, {elapsed:?}"))
}

fn criterion_2() -> Outcome {
    let spec: ForkSpec = FIGURE_FOUR_SPEC.parse().unwrap();
    let t = Instant::now();
    let got = pairing_exact(&spec).map_err(|e| e.to_string())?;
    let k = build_diagram(&spec).unwrap().k;
    let elapsed = t.elapsed();
    let got = got.exact().unwrap().clone();
    let want = figure_four_polynomial();
    let neg = &LaurentPoly::monomial(-1, 0) * &want;
    let same = [want, neg]
        .iter()
        .any(|w| w.normalize_with_mirror() == got.normalize_with_mirror());
    ensure(same, || format!("pairing {got} is not associated to the Corollary polynomial"))?;
    let v = got.value_at_minus_one();
    ensure(k == 108 && (v == BigInt::from(108) || v == BigInt::from(-108)), || {
        format!("k = {k}, P(-1) = {v}")
    })?;
    within(Duration::from_millis(10), elapsed)?;
    Ok(format!("P = {got}, k = {k}, P(-1) = {v}, {elapsed:?}"))
}

fn criterion_3() -> Outcome {
    let beta = q2_kernel_braid();
    let t = Instant::now();
    let at2 = burau_rational(&beta, &two()).map_err(|e| e.to_string())?;
    let kernel = is_identity(&RationalAt::integer(2).unwrap(), &at2);
    let generic_identity = is_identity(&Generic, &burau_generic(&beta));
    let trivial = is_trivial_braid(&beta);
    let elapsed = t.elapsed();
    ensure(kernel, || "Burau image at q = 2 is not the identity".into())?;
    ensure(!generic_identity, || "generic Burau image is the identity".into())?;
    ensure(!trivial, || "Artin oracle says the braid is trivial".into())?;
    within(Duration::from_millis(50), elapsed)?;
    Ok(format!("{} letters, identity at q = 2, generic non-identity, non-trivial, {elapsed:?}", beta.len()))
}

/// Single-threaded q = 2 specialization scan to k = 108, shared with criterion 8.
fn specialize_108() -> (Checkpoint, Duration) {
    let params = ScanParams::specialize(4, 108, &two(), default_filters(DEFAULT_SEED));
    let t = Instant::now();
    let mut s = Scan::new(params).unwrap().with_threads(1).unwrap();
    s.run();
    (s.into_state(), t.elapsed())
}

fn criterion_4(state: &Checkpoint, elapsed: Duration) -> Outcome {
    let hits: Vec<_> = state
        .hits
        .iter()
        .filter(|h| matches!(h.kind, HitKind::Specialization { .. }))
        .collect();
    let early: Vec<_> = hits.iter().filter(|h| h.k <= 107).collect();
    ensure(early.is_empty(), || format!("hits below k = 108: {early:?}"))?;
    ensure(hits.iter().any(|h| h.k == 108 && h.spec.to_string() == FIGURE_FOUR_SPEC), || {
        "figure 4 spec not found at k = 108".into()
    })?;
    within(Duration::from_secs(300), elapsed)?;
    let all: Vec<String> = hits.iter().map(|h| h.spec.to_string()).collect();
    Ok(format!(
        "{} specs scanned, first hits at k = 108: {}, {elapsed:?}",
        state.counters.enumerated,
        all.join(" | ")
    ))
}

fn extreme_coeffs_are_units(p: &LaurentPoly) -> bool {
    let one = BigInt::from(1);
    let lo = p.coeff(p.min_deg());
    let hi = p.coeff(p.max_deg());
    (lo == one || lo == -one.clone()) && (hi == one || hi == -one)
}

fn criterion_5() -> Outcome {
    let t = Instant::now();
    let mut count = 0usize;
    for spec in enumerate(3, 40) {
        let k = build_diagram(&spec).unwrap().k;
        let poly = pairing_exact(&spec).unwrap().exact().unwrap().clone();
        ensure(!poly.is_zero(), || format!("{spec}: zero pairing with k = {k}"))?;
        let v = poly.value_at_minus_one();
        ensure(v == BigInt::from(k) || v == -BigInt::from(k), || format!("{spec}: P(-1) = {v}, k = {k}"))?;
        ensure(extreme_coeffs_are_units(&poly), || format!("{spec}: extreme coefficients of {poly}"))?;
        count += 1;
    }
    let elapsed = t.elapsed();
    within(Duration::from_secs(60), elapsed)?;
    Ok(format!("{count} specs, 0 violations, {elapsed:?}"))
}

fn criterion_6() -> Outcome {
    let t = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(DEFAULT_SEED);
    let (mut count, mut mirrored) = (0usize, 0usize);
    for spec in enumerate(4, 24) {
        let d = build_diagram(&spec).unwrap();
        let k = d.k as i64;
        let raw = d.raw_pairing();
        let poly = pairing_exact(&spec).unwrap().exact().unwrap().clone();
        let v = poly.value_at_minus_one();
        ensure((&v - BigInt::from(k)) % 2 == BigInt::from(0), || format!("{spec}: P(-1) = {v}, k = {k}"))?;
        let c12 = spec.counts()[3];
        if c12 == 0 {
            ensure(v == BigInt::from(k) || v == BigInt::from(-k), || format!("{spec}: |P(-1)| != {k}"))?;
            if let Some(m) = spec.mirror() {
                let pm = pairing_exact(&m).unwrap().exact().unwrap().clone();
                ensure(pm == poly.mirror().normalize(), || format!("{spec}: mirror pairing {pm} vs {poly}"))?;
                mirrored += 1;
            }
        }
        let filters: Vec<ModPoint> = (0..3)
            .map(|_| ModPoint::new(rng.gen_range(2..MERSENNE_61 - 1), MERSENNE_61).unwrap())
            .collect();
        let residues = pairing_mod(&spec, &filters).unwrap().residues().unwrap();
        for (pt, r) in filters.iter().zip(residues) {
            ensure(r == raw.eval_mod(pt), || format!("{spec}: residue mismatch at {pt:?}"))?;
            // raw = ±q^s * normalized
            let s = raw.min_deg() - poly.min_deg();
            let scaled = mul_mod(poly.eval_mod(pt), pt.power(s), MERSENNE_61);
            let neg = (MERSENNE_61 - scaled) % MERSENNE_61;
            ensure(r == scaled || r == neg, || format!("{spec}: residue not a unit multiple at {pt:?}"))?;
        }
        count += 1;
    }
    let elapsed = t.elapsed();
    Ok(format!("{count} specs ({mirrored} mirror pairs), 0 violations, {elapsed:?}"))
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    (a as u128 * b as u128 % m as u128) as u64
}

fn criterion_7() -> Outcome {
    let t = Instant::now();
    let state = kernel_scan(ScanParams::kernel(4, 60, default_filters(DEFAULT_SEED))).map_err(|e| e.to_string())?;
    let c = &state.counters;
    ensure(c.kernel_hits == 0, || format!("{} kernel hits", c.kernel_hits))?;
    ensure(c.filter_hits == c.kernel_hits + c.false_alarms, || format!("unclassified filter events: {c:?}"))?;
    let elapsed = t.elapsed();
    within(Duration::from_secs(600), elapsed)?;

    // a weak filter forces many zero events; each must be classified exactly
    let weak = vec![ModPoint::new(2, 5).unwrap()];
    let w = kernel_scan(ScanParams::kernel(4, 30, weak.clone())).map_err(|e| e.to_string())?;
    ensure(w.counters.filter_hits > 0, || "weak filter produced no events".into())?;
    ensure(w.counters.filter_hits == w.counters.false_alarms + w.counters.kernel_hits, || {
        format!("weak filter: {:?}", w.counters)
    })?;
    let mut alarms = 0u64;
    for h in &w.hits {
        if let HitKind::FalseAlarm { .. } = h.kind {
            let exact = pairing_exact(&h.spec).unwrap().exact().unwrap().clone();
            ensure(!exact.is_zero(), || format!("{}: false alarm with zero pairing", h.spec))?;
            let r = pairing_mod(&h.spec, &weak).unwrap();
            ensure(r.vanishes(), || format!("{}: recorded alarm does not vanish mod 5", h.spec))?;
            alarms += 1;
        }
    }
    ensure(alarms == w.counters.false_alarms, || "false alarm records missing".into())?;
    Ok(format!(
        "{} valid specs, 0 kernel hits, {} filter events; weak-filter control {} events all classified, {elapsed:?}",
        c.valid, c.filter_hits, alarms
    ))
}

fn criterion_8(single: &Checkpoint) -> Outcome {
    let t = Instant::now();
    for n in [3, 4] {
        let fast: BTreeSet<String> = enumerate(n, 10).map(|s| s.to_string()).collect();
        let naive = common::naive_specs(n, 10);
        ensure(fast == naive, || format!("n = {n}: enumeration differs from brute force"))?;
    }

    // checkpoint save/resume through a file at uneven cut points
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let path = dir.path().join("cp.json");
    let params = single.params.clone();
    let mut s = Scan::new(params.clone()).unwrap();
    let mut cuts = 0;
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    while !s.is_done() {
        s.advance(rng.gen_range(1..200_000));
        s.state().save(&path).map_err(|e| e.to_string())?;
        s = Scan::resume(Checkpoint::load(&path, &params).map_err(|e| e.to_string())?).unwrap();
        cuts += 1;
    }
    let resumed = s.into_state();
    ensure(resumed.hits == single.hits && resumed.counters == single.counters, || {
        "resumed scan differs from single-shot".into()
    })?;

    // four workers, one of which dies holding a lease; the lease lapses after
    // ~10 s of idle polling
    let run = common::distributed(params, 250_000, 2_000, &[None, Some(2), None, None]);
    ensure(run.crashed == 1, || "crash was not injected".into())?;
    ensure(run.entries_per_unit.iter().all(|&c| c == 1), || "a unit has other than one entry".into())?;
    ensure(run.hits == single.hits, || "distributed hits differ".into())?;
    ensure(run.counters == single.counters, || "distributed counters differ".into())?;
    let a = serde_json::to_string(&run.hits).unwrap();
    let b = serde_json::to_string(&single.hits).unwrap();
    ensure(a == b, || "hit ledgers not byte-identical".into())?;
    Ok(format!(
        "enumeration = brute force (k <= 10); {cuts} checkpoint resumes and 4 workers with 1 crash ({} units) match single-shot q = 2 scan to k = 108, {:?}",
        run.entries_per_unit.len(),
        t.elapsed()
    ))
}

fn random_word(rng: &mut ChaCha8Rng, strands: usize, max_len: usize) -> BraidWord {
    let len = rng.gen_range(0..=max_len);
    let g = strands as i32 - 1;
    let letters = (0..len)
        .map(|_| {
            let i = rng.gen_range(1..=g);
            if rng.gen() { i } else { -i }
        })
        .collect();
    BraidWord::new(strands, letters).unwrap()
}

fn criterion_9() -> Outcome {
    let t = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(DEFAULT_SEED);
    let (mut ok, mut unreachable) = (0usize, 0usize);
    for _ in 0..200 {
        let v = random_word(&mut rng, 4, 12);
        let i = rng.gen_range(1..=3);
        let target = coords_action(&v, &ArcCoords::standard(4, i));
        match synthesize_from_coords(&target, DEFAULT_PLATEAU_BUDGET) {
            Ok(s) => {
                let back = coords_action(&s.word, &ArcCoords::standard(4, s.standard));
                ensure(back == target, || format!("{v}: synthesized word misses the target"))?;
                ok += 1;
            }
            Err(KernelError::Unreachable { .. }) => unreachable += 1,
            Err(e) => return Err(format!("{v}: {e}")),
        }
    }
    Ok(format!(
        "{ok}/200 synthesized, {unreachable} unreachable within budget {DEFAULT_PLATEAU_BUDGET} ({:.1}%), {:?}",
        100.0 * unreachable as f64 / 200.0,
        t.elapsed()
    ))
}

fn run(n: usize, f: impl FnOnce() -> Outcome) -> bool {
    let r = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
        let msg = e
            .downcast_ref::<String>()
            .cloned()
            .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
            .unwrap_or_default();
        Err(format!("panicked: {msg}"))
    });
    match r {
        Ok(detail) => {
            println!("criterion {n}: PASS  {detail}");
            true
        }
        Err(why) => {
            println!("criterion {n}: FAIL  {why}");
            false
        }
    }
}

fn main() -> ExitCode {
    let mut ok = true;
    ok &= run(1, criterion_1);
    ok &= run(2, criterion_2);
    ok &= run(3, criterion_3);
    let (single, elapsed) = specialize_108();
    ok &= run(4, || criterion_4(&single, elapsed));
    ok &= run(5, criterion_5);
    ok &= run(6, criterion_6);
    ok &= run(7, criterion_7);
    ok &= run(8, || criterion_8(&single));
    ok &= run(9, criterion_9);
    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
