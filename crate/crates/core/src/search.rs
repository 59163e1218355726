//! Exhaustive enumeration of standard-form forks, stratified by crossing
//! count, with a modular filter in front of exact verification.
//!
//! Within a stratum `k` the tuples are ordered lexicographically by
//! `(c12, c1, c2, c3, ends)` (`(c1, c2, ends)` for `n = 3`), so a
//! [`Cursor`] `(k, index)` names a position without enumerating its
//! predecessors.

use std::fs::{self, File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_with::{serde_as, DisplayFromStr};
use sha2::{Digest, Sha256};

use crate::error::{ForkError, SearchError};
use crate::forkpair::{build_diagram, CurveDiagram, ForkSpec};
use crate::laurent::LaurentPoly;
use crate::modular::{ModPoint, MERSENNE_61};

pub const DEFAULT_SEED: u64 = 0x5eed_b4;
pub const DEFAULT_K_MAX: u32 = 120;
const CHUNK: u64 = 2048;

/// Two filter points modulo `2^61 - 1` with `q0` drawn from a seeded stream.
pub fn default_filters(seed: u64) -> Vec<ModPoint> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..2)
        .map(|_| ModPoint::new(rng.gen_range(2..MERSENNE_61 - 1), MERSENNE_61).unwrap())
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScanMode {
    Kernel,
    /// Exact rational target, in `r` or `r/s` form.
    Specialize { q0: String },
    CollectRoots,
}

#[serde_as]
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScanParams {
    #[serde_as(as = "DisplayFromStr")]
    pub n: usize,
    #[serde_as(as = "DisplayFromStr")]
    pub k_max: u32,
    pub filters: Vec<ModPoint>,
    pub mode: ScanMode,
}

impl ScanParams {
    pub fn kernel(n: usize, k_max: u32, filters: Vec<ModPoint>) -> Self {
        ScanParams {
            n,
            k_max,
            filters,
            mode: ScanMode::Kernel,
        }
    }

    pub fn specialize(n: usize, k_max: u32, q0: &BigRational, filters: Vec<ModPoint>) -> Self {
        ScanParams {
            n,
            k_max,
            filters,
            mode: ScanMode::Specialize {
                q0: q0.to_string(),
            },
        }
    }

    pub fn collect_roots(n: usize, k_max: u32) -> Self {
        ScanParams {
            n,
            k_max,
            filters: Vec::new(),
            mode: ScanMode::CollectRoots,
        }
    }

    pub fn validate(&self) -> Result<(), SearchError> {
        if self.n != 3 && self.n != 4 {
            return Err(SearchError::BadParams(format!("n must be 3 or 4, got {}", self.n)));
        }
        if self.k_max < 1 {
            return Err(SearchError::BadParams("k_max must be at least 1".into()));
        }
        match &self.mode {
            ScanMode::Kernel if self.filters.is_empty() => {
                Err(SearchError::BadParams("kernel mode needs a filter".into()))
            }
            ScanMode::Specialize { .. } => {
                if self.filters.is_empty() {
                    return Err(SearchError::BadParams("specialize mode needs a modulus".into()));
                }
                self.specialization_points().map(|_| ())
            }
            _ => Ok(()),
        }
    }

    /// The exact specialization target.
    pub fn target(&self) -> Result<Option<BigRational>, SearchError> {
        match &self.mode {
            ScanMode::Specialize { q0 } => {
                let x = parse_rational(q0)?;
                if x.is_zero() || x.abs().is_one() {
                    return Err(SearchError::BadPoint(format!("{q0} is zero or a root of unity")));
                }
                Ok(Some(x))
            }
            _ => Ok(None),
        }
    }

    /// Images of `q0` and `1/q0` modulo each filter modulus.
    fn specialization_points(&self) -> Result<Vec<ModPoint>, SearchError> {
        let Some(x) = self.target()? else {
            return Ok(Vec::new());
        };
        let mut out = Vec::new();
        for f in &self.filters {
            let m = f.modulus();
            let r = reduce_big(x.numer(), m);
            let s = reduce_big(x.denom(), m);
            let bad = || SearchError::BadPoint(format!("{x} is not a unit modulo {m}"));
            let s_inv = ModPoint::new(s, m).map_err(|_| bad())?.q0_inv();
            let p = ModPoint::new(crate::modular::mul_mod(r, s_inv, m), m).map_err(|_| bad())?;
            out.push(p);
            out.push(p.reciprocal());
        }
        Ok(out)
    }

    /// Hex SHA-256 of the canonical JSON form.
    pub fn hash(&self) -> String {
        let json = serde_json::to_vec(self).expect("params serialize");
        hex::encode(Sha256::digest(json))
    }
}

fn reduce_big(v: &BigInt, m: u64) -> u64 {
    let r = v % BigInt::from(m);
    let r = if r.is_negative() { r + BigInt::from(m) } else { r };
    r.to_u64().unwrap()
}

/// Parse `r` or `r/s`.
pub fn parse_rational(s: &str) -> Result<BigRational, SearchError> {
    let bad = || SearchError::BadPoint(format!("cannot parse {s:?} as a rational"));
    let s = s.trim();
    match s.split_once('/') {
        Some((a, b)) => {
            let a = BigInt::from_str(a.trim()).map_err(|_| bad())?;
            let b = BigInt::from_str(b.trim()).map_err(|_| bad())?;
            if b.is_zero() {
                return Err(bad());
            }
            Ok(BigRational::new(a, b))
        }
        None => Ok(BigRational::from_integer(
            BigInt::from_str(s).map_err(|_| bad())?,
        )),
    }
}

/// Position in the enumeration: stratum `k` and index within it.
#[serde_as]
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Cursor {
    #[serde_as(as = "DisplayFromStr")]
    pub k: u32,
    #[serde_as(as = "DisplayFromStr")]
    pub index: u64,
}

impl Cursor {
    pub const START: Cursor = Cursor { k: 1, index: 0 };
}

fn binom(n: u64, r: u64) -> u64 {
    if r > n {
        return 0;
    }
    let r = r.min(n - r);
    (0..r).fold(1u64, |acc, i| acc * (n - i) / (i + 1))
}

/// Compositions of `s` into `m` non-negative parts.
fn compositions(s: u64, m: u64) -> u64 {
    binom(s + m - 1, m - 1)
}

/// The `idx`-th composition of `s` into `m` parts, lexicographically.
fn unrank_composition(mut idx: u64, mut s: u64, m: usize) -> Vec<u64> {
    let mut out = Vec::with_capacity(m);
    for left in (1..m as u64).rev() {
        let mut a = 0;
        loop {
            let cnt = compositions(s - a, left);
            if idx < cnt {
                break;
            }
            idx -= cnt;
            a += 1;
        }
        out.push(a);
        s -= a;
    }
    out.push(s);
    out
}

fn end_pairs(n: usize, k: u32) -> &'static [(usize, usize)] {
    match (n, k % 2) {
        (4, 0) => &[(1, 2), (1, 3), (2, 3)],
        (4, _) => &[(1, 4), (2, 4), (3, 4)],
        (_, 0) => &[(1, 2)],
        _ => &[(1, 3), (2, 3)],
    }
}

fn arc_total(k: u32) -> u64 {
    if k % 2 == 0 {
        (k as u64 - 2) / 2
    } else {
        (k as u64 - 1) / 2
    }
}

/// Number of tuples with crossing count `k`.
pub fn stratum_size(n: usize, k: u32) -> u64 {
    // k = 2 would be the all-zero spec with both ends above N, which is k = 0
    if k == 0 || k == 2 {
        return 0;
    }
    let parts = if n == 4 { 4 } else { 2 };
    compositions(arc_total(k), parts) * end_pairs(n, k).len() as u64
}

/// The tuple at `(k, index)`; it may still fail the connectivity check.
pub fn spec_at(n: usize, k: u32, index: u64) -> ForkSpec {
    let pairs = end_pairs(n, k);
    let np = pairs.len() as u64;
    let parts = if n == 4 { 4 } else { 2 };
    let c = unrank_composition(index / np, arc_total(k), parts);
    let ends = pairs[(index % np) as usize];
    let spec = if n == 4 {
        // cursor order is (c12, c1, c2, c3)
        ForkSpec::d4(c[1], c[2], c[3], c[0], ends)
    } else {
        ForkSpec::d3(c[0], c[1], ends)
    };
    spec.expect("enumerated tuples are well formed")
}

/// Valid specs with `1 <= k <= k_max`, in cursor order.
pub fn enumerate(n: usize, k_max: u32) -> impl Iterator<Item = ForkSpec> {
    (1..=k_max)
        .flat_map(move |k| (0..stratum_size(n, k)).map(move |i| spec_at(n, k, i)))
        .filter(|s| build_diagram(s).is_ok())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum HitKind {
    Kernel,
    Specialization { q0: String },
    FalseAlarm { filters: Vec<ModPoint> },
    RationalRootCandidate { roots: Vec<String> },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HitRecord {
    pub spec: ForkSpec,
    pub k: usize,
    #[serde(flatten)]
    pub kind: HitKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub poly: Option<LaurentPoly>,
}

impl HitRecord {
    /// A verified kernel or specialization hit, as opposed to a filter
    /// false alarm or a root candidate.
    pub fn is_verified_hit(&self) -> bool {
        matches!(self.kind, HitKind::Kernel | HitKind::Specialization { .. })
    }
}

#[serde_as]
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counters {
    /// Tuples examined, valid or not.
    #[serde_as(as = "DisplayFromStr")]
    pub enumerated: u64,
    #[serde_as(as = "DisplayFromStr")]
    pub valid: u64,
    #[serde_as(as = "DisplayFromStr")]
    pub invalid_parity: u64,
    #[serde_as(as = "DisplayFromStr")]
    pub invalid_connectivity: u64,
    #[serde_as(as = "DisplayFromStr")]
    pub filter_hits: u64,
    #[serde_as(as = "DisplayFromStr")]
    pub false_alarms: u64,
    #[serde_as(as = "DisplayFromStr")]
    pub kernel_hits: u64,
    #[serde_as(as = "DisplayFromStr")]
    pub specialization_hits: u64,
    #[serde_as(as = "DisplayFromStr")]
    pub root_candidates: u64,
    /// Root extraction skipped because a coefficient was too large.
    #[serde_as(as = "DisplayFromStr")]
    pub roots_skipped: u64,
}

impl Counters {
    pub fn merge(&mut self, o: &Counters) {
        self.enumerated += o.enumerated;
        self.valid += o.valid;
        self.invalid_parity += o.invalid_parity;
        self.invalid_connectivity += o.invalid_connectivity;
        self.filter_hits += o.filter_hits;
        self.false_alarms += o.false_alarms;
        self.kernel_hits += o.kernel_hits;
        self.specialization_hits += o.specialization_hits;
        self.root_candidates += o.root_candidates;
        self.roots_skipped += o.roots_skipped;
    }
}

/// Per-run constants derived from the parameters.
struct Prepared {
    n: usize,
    mode: ScanMode,
    filters: Vec<ModPoint>,
    target: Option<BigRational>,
}

impl Prepared {
    fn new(params: &ScanParams) -> Result<Self, SearchError> {
        params.validate()?;
        let filters = match params.mode {
            ScanMode::Specialize { .. } => params.specialization_points()?,
            _ => params.filters.clone(),
        };
        Ok(Prepared {
            n: params.n,
            mode: params.mode.clone(),
            filters,
            target: params.target()?,
        })
    }

    fn visit(&self, spec: ForkSpec, hits: &mut Vec<HitRecord>, c: &mut Counters) {
        c.enumerated += 1;
        let d = match build_diagram(&spec) {
            Ok(d) => d,
            Err(ForkError::Disconnected { .. }) => {
                c.invalid_connectivity += 1;
                return;
            }
            Err(_) => {
                c.invalid_parity += 1;
                return;
            }
        };
        c.valid += 1;
        match &self.mode {
            ScanMode::CollectRoots => self.collect_roots(spec, &d, hits, c),
            _ => self.filtered(spec, &d, hits, c),
        }
    }

    fn filtered(&self, spec: ForkSpec, d: &CurveDiagram, hits: &mut Vec<HitRecord>, c: &mut Counters) {
        if !self.filters.iter().all(|p| d.pairing_residue(p) == 0) {
            return;
        }
        c.filter_hits += 1;
        let poly = d.raw_pairing().normalize();
        let kind = match &self.target {
            None if poly.is_zero() => {
                c.kernel_hits += 1;
                HitKind::Kernel
            }
            Some(x) if poly.is_root(x) && poly.is_root(&x.recip()) => {
                c.specialization_hits += 1;
                HitKind::Specialization { q0: x.to_string() }
            }
            _ => {
                c.false_alarms += 1;
                HitKind::FalseAlarm {
                    filters: self.filters.clone(),
                }
            }
        };
        hits.push(HitRecord {
            spec,
            k: d.k,
            kind,
            poly: Some(poly),
        });
    }

    fn collect_roots(&self, spec: ForkSpec, d: &CurveDiagram, hits: &mut Vec<HitRecord>, c: &mut Counters) {
        let poly = d.raw_pairing().normalize();
        if poly.is_zero() {
            c.kernel_hits += 1;
            hits.push(HitRecord {
                spec,
                k: d.k,
                kind: HitKind::Kernel,
                poly: Some(poly),
            });
            return;
        }
        match poly.rational_roots() {
            Ok(r) if !r.reciprocal_pairs.is_empty() => {
                c.root_candidates += 1;
                hits.push(HitRecord {
                    spec,
                    k: d.k,
                    kind: HitKind::RationalRootCandidate {
                        roots: r.reciprocal_pairs.iter().map(|x| x.to_string()).collect(),
                    },
                    poly: Some(poly),
                });
            }
            Ok(_) => {}
            Err(_) => c.roots_skipped += 1,
        }
    }
}

/// Advance `cursor` by at most `budget` tuples without leaving its stratum;
/// empty strata are skipped. Returns the cursor unchanged past `k_max`.
pub fn step_cursor(n: usize, k_max: u32, cursor: Cursor, budget: u64) -> Cursor {
    let mut c = normalize_cursor(n, k_max, cursor);
    if c.k > k_max {
        return c;
    }
    c.index = c.index.saturating_add(budget).min(stratum_size(n, c.k));
    normalize_cursor(n, k_max, c)
}

/// Move a cursor sitting at the end of its stratum to the next non-empty one.
pub fn normalize_cursor(n: usize, k_max: u32, mut c: Cursor) -> Cursor {
    while c.k <= k_max && c.index >= stratum_size(n, c.k) {
        c = Cursor {
            k: c.k + 1,
            index: 0,
        };
    }
    c
}

/// Total tuples in `[start, end)`.
pub fn range_len(n: usize, start: Cursor, end: Cursor) -> u64 {
    if end <= start {
        return 0;
    }
    if start.k == end.k {
        return end.index - start.index;
    }
    let mut total = stratum_size(n, start.k).saturating_sub(start.index);
    for k in start.k + 1..end.k {
        total += stratum_size(n, k);
    }
    total + end.index.min(stratum_size(n, end.k))
}

/// Scan the tuples in `[start, end)`. Pure and deterministic; hits come out
/// in cursor order.
pub fn scan_range(
    params: &ScanParams,
    start: Cursor,
    end: Cursor,
) -> Result<(Vec<HitRecord>, Counters), SearchError> {
    let prep = Prepared::new(params)?;
    Ok(scan_prepared(&prep, start, end))
}

fn scan_prepared(prep: &Prepared, start: Cursor, end: Cursor) -> (Vec<HitRecord>, Counters) {
    let n = prep.n;
    let mut chunks = Vec::new();
    let mut k = start.k;
    while k <= end.k {
        let size = stratum_size(n, k);
        let lo = if k == start.k { start.index } else { 0 };
        let hi = if k == end.k { end.index.min(size) } else { size };
        let mut i = lo;
        while i < hi {
            chunks.push((k, i, (i + CHUNK).min(hi)));
            i += CHUNK;
        }
        k += 1;
    }
    let parts: Vec<(Vec<HitRecord>, Counters)> = chunks
        .par_iter()
        .map(|&(k, lo, hi)| {
            let mut hits = Vec::new();
            let mut c = Counters::default();
            for i in lo..hi {
                prep.visit(spec_at(n, k, i), &mut hits, &mut c);
            }
            (hits, c)
        })
        .collect();
    let mut hits = Vec::new();
    let mut counters = Counters::default();
    for (h, c) in parts {
        hits.extend(h);
        counters.merge(&c);
    }
    (hits, counters)
}

/// Resumable scan state, written to disk as a single JSON document.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub params: ScanParams,
    pub params_hash: String,
    pub cursor: Cursor,
    pub done: bool,
    pub counters: Counters,
    pub hits: Vec<HitRecord>,
}

impl Checkpoint {
    pub fn fresh(params: ScanParams) -> Self {
        let cursor = normalize_cursor(params.n, params.k_max, Cursor::START);
        Checkpoint {
            params_hash: params.hash(),
            done: cursor.k > params.k_max,
            params,
            cursor,
            counters: Counters::default(),
            hits: Vec::new(),
        }
    }

    /// Atomic save: write a sibling temp file, then rename.
    pub fn save(&self, path: &Path) -> Result<(), SearchError> {
        let tmp = tmp_path(path);
        {
            let mut f = File::create(&tmp)?;
            serde_json::to_writer_pretty(&mut f, self)
                .map_err(|e| SearchError::CorruptCheckpoint(e.to_string()))?;
            f.write_all(b"\n")?;
            f.sync_all()?;
        }
        fs::rename(&tmp, path)?;
        Ok(())
    }

    /// Load a checkpoint, requiring it to match `params`.
    pub fn load(path: &Path, params: &ScanParams) -> Result<Self, SearchError> {
        let cp = Self::load_any(path)?;
        let expected = params.hash();
        if cp.params_hash != expected {
            return Err(SearchError::ParamsMismatch {
                expected,
                found: cp.params_hash,
            });
        }
        Ok(cp)
    }

    /// Load a checkpoint and check it against its own embedded parameters.
    pub fn load_any(path: &Path) -> Result<Self, SearchError> {
        let text = fs::read_to_string(path)?;
        let cp: Checkpoint = serde_json::from_str(&text)
            .map_err(|e| SearchError::CorruptCheckpoint(e.to_string()))?;
        if cp.params.hash() != cp.params_hash {
            return Err(SearchError::CorruptCheckpoint(
                "parameter hash does not match embedded parameters".into(),
            ));
        }
        Ok(cp)
    }
}

fn tmp_path(path: &Path) -> PathBuf {
    let mut name = path.file_name().unwrap_or_default().to_os_string();
    name.push(".tmp");
    path.with_file_name(name)
}

pub struct Scan {
    state: Checkpoint,
    prep: Prepared,
    pool: Option<rayon::ThreadPool>,
}

impl Scan {
    pub fn new(params: ScanParams) -> Result<Self, SearchError> {
        Self::resume(Checkpoint::fresh(params))
    }

    pub fn resume(state: Checkpoint) -> Result<Self, SearchError> {
        Ok(Scan {
            prep: Prepared::new(&state.params)?,
            state,
            pool: None,
        })
    }

    /// Use a dedicated pool of `threads` workers instead of the global one.
    pub fn with_threads(mut self, threads: usize) -> Result<Self, SearchError> {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .map_err(|e| SearchError::BadParams(e.to_string()))?;
        self.pool = Some(pool);
        Ok(self)
    }

    pub fn state(&self) -> &Checkpoint {
        &self.state
    }

    pub fn into_state(self) -> Checkpoint {
        self.state
    }

    pub fn is_done(&self) -> bool {
        self.state.done
    }

    /// Process up to `budget` tuples within the current stratum; returns the
    /// hits found in this step.
    pub fn advance(&mut self, budget: u64) -> Vec<HitRecord> {
        let p = &self.state.params;
        let start = self.state.cursor;
        if self.state.done {
            return Vec::new();
        }
        let stop = Cursor {
            k: start.k,
            index: start.index.saturating_add(budget.max(1)).min(stratum_size(p.n, start.k)),
        };
        let prep = &self.prep;
        let (hits, counters) = match &self.pool {
            Some(pool) => pool.install(|| scan_prepared(prep, start, stop)),
            None => scan_prepared(prep, start, stop),
        };
        self.state.cursor = normalize_cursor(p.n, p.k_max, stop);
        self.state.done = self.state.cursor.k > p.k_max;
        self.state.counters.merge(&counters);
        self.state.hits.extend(hits.iter().cloned());
        hits
    }

    /// Run to completion.
    pub fn run(&mut self) -> &Checkpoint {
        while !self.state.done {
            self.advance(u64::MAX);
        }
        &self.state
    }
}

fn run_mode(params: ScanParams) -> Result<Checkpoint, SearchError> {
    let mut s = Scan::new(params)?;
    s.run();
    Ok(s.into_state())
}

/// Filtered search for exact-zero pairings.
pub fn kernel_scan(params: ScanParams) -> Result<Checkpoint, SearchError> {
    if params.mode != ScanMode::Kernel {
        return Err(SearchError::BadParams("kernel_scan needs kernel mode".into()));
    }
    run_mode(params)
}

/// Search for pairings vanishing at both `q0` and `1/q0`.
pub fn specialize_scan(params: ScanParams) -> Result<Checkpoint, SearchError> {
    if !matches!(params.mode, ScanMode::Specialize { .. }) {
        return Err(SearchError::BadParams("specialize_scan needs a target".into()));
    }
    run_mode(params)
}

/// Exact pairings with a reciprocal pair of rational roots other than `±1`.
pub fn root_collect(params: ScanParams) -> Result<Checkpoint, SearchError> {
    if params.mode != ScanMode::CollectRoots {
        return Err(SearchError::BadParams("root_collect needs collect-roots mode".into()));
    }
    run_mode(params)
}

/// Append-only JSONL hit ledger.
pub struct HitLedger {
    file: File,
}

impl HitLedger {
    pub fn open(path: &Path) -> Result<Self, SearchError> {
        Ok(HitLedger {
            file: OpenOptions::new().create(true).append(true).open(path)?,
        })
    }

    pub fn append(&mut self, hit: &HitRecord) -> Result<(), SearchError> {
        let mut line = serde_json::to_string(hit).expect("hit serializes");
        line.push('\n');
        self.file.write_all(line.as_bytes())?;
        self.file.flush()?;
        Ok(())
    }

    pub fn read(path: &Path) -> Result<Vec<HitRecord>, SearchError> {
        let f = File::open(path)?;
        BufReader::new(f)
            .lines()
            .filter(|l| l.as_ref().map_or(true, |l| !l.trim().is_empty()))
            .map(|l| {
                let l = l?;
                serde_json::from_str(&l).map_err(|e| SearchError::CorruptCheckpoint(e.to_string()))
            })
            .collect()
    }
}
