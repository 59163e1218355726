//! Work-unit leasing for splitting a scan across machines.
//!
//! [`Coordinator`] is a pure state machine driven by an explicit clock
//! (seconds); transports wrap it. Leasing is at-least-once and submission is
//! idempotent, so a crashed worker only costs a lease timeout.

use std::collections::HashMap;
use std::fs::{self, File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::thread;
use std::time::Duration;

use serde::{Deserialize, Serialize};
use serde_with::{serde_as, DisplayFromStr};
use thiserror::Error;

use crate::error::SearchError;
use crate::search::{
    normalize_cursor, scan_range, step_cursor, Counters, Cursor, HitRecord, ScanParams,
};

pub const DEFAULT_UNIT_SIZE: u64 = 1_000_000;
pub const DEFAULT_LEASE_SECS: u64 = 600;

#[derive(Debug, Error, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "error", content = "detail", rename_all = "snake_case")]
pub enum DistribError {
    #[error("unit {0} is leased to another live worker")]
    Conflict(String),
    #[error("parameter hash mismatch: expected {expected}, got {found}")]
    ParamsMismatch { expected: String, found: String },
    #[error("unknown unit {0}")]
    UnknownUnit(String),
    #[error("submitted results for {unit_id} do not verify: {reason}")]
    Rejected { unit_id: String, reason: String },
    #[error("transport: {0}")]
    Transport(String),
    #[error("ledger: {0}")]
    Ledger(String),
    #[error("search: {0}")]
    Search(String),
}

impl From<SearchError> for DistribError {
    fn from(e: SearchError) -> Self {
        DistribError::Search(e.to_string())
    }
}

impl From<std::io::Error> for DistribError {
    fn from(e: std::io::Error) -> Self {
        DistribError::Ledger(e.to_string())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UnitStatus {
    Pending,
    Leased,
    Done,
}

#[serde_as]
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Lease {
    pub worker_id: String,
    #[serde_as(as = "DisplayFromStr")]
    pub deadline: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WorkUnit {
    pub unit_id: String,
    pub params_hash: String,
    pub from: Cursor,
    pub to: Cursor,
    pub status: UnitStatus,
    pub lease: Option<Lease>,
}

#[serde_as]
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LedgerEntry {
    pub unit_id: String,
    pub params_hash: String,
    pub worker_id: String,
    pub counters: Counters,
    pub hits: Vec<HitRecord>,
    #[serde_as(as = "DisplayFromStr")]
    pub submitted_at: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LeaseRequest {
    pub worker_id: String,
}

#[serde_as]
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum LeaseResponse {
    Unit {
        unit_id: String,
        from: Cursor,
        to: Cursor,
        params: ScanParams,
        params_hash: String,
    },
    Drained {
        drained: bool,
    },
    /// Everything left is leased to live workers.
    Wait {
        #[serde_as(as = "DisplayFromStr")]
        retry_after: u64,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Submission {
    pub unit_id: String,
    pub worker_id: String,
    pub params_hash: String,
    pub counters: Counters,
    pub hits: Vec<HitRecord>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SubmitOutcome {
    Accepted,
    Duplicate,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubmitResponse {
    pub outcome: SubmitOutcome,
}

#[serde_as]
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Status {
    #[serde_as(as = "DisplayFromStr")]
    pub units_total: usize,
    #[serde_as(as = "DisplayFromStr")]
    pub units_done: usize,
    #[serde_as(as = "DisplayFromStr")]
    pub units_leased: usize,
    #[serde_as(as = "DisplayFromStr")]
    pub units_pending: usize,
    pub drained: bool,
    pub params_hash: String,
    pub counters: Counters,
    #[serde_as(as = "DisplayFromStr")]
    pub verified_hits: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoordinatorConfig {
    pub params: ScanParams,
    pub unit_size: u64,
    pub lease_secs: u64,
    /// Re-run each submitted unit before accepting it.
    pub reverify: bool,
}

impl CoordinatorConfig {
    pub fn new(params: ScanParams) -> Self {
        CoordinatorConfig {
            params,
            unit_size: DEFAULT_UNIT_SIZE,
            lease_secs: DEFAULT_LEASE_SECS,
            reverify: false,
        }
    }
}

/// Split `[START, end of k_max]` into units of at most `unit_size` tuples,
/// never crossing a stratum boundary.
pub fn partition(params: &ScanParams, unit_size: u64) -> Vec<(Cursor, Cursor)> {
    let (n, k_max) = (params.n, params.k_max);
    let mut out = Vec::new();
    let mut c = normalize_cursor(n, k_max, Cursor::START);
    while c.k <= k_max {
        let stop = Cursor {
            k: c.k,
            index: c.index.saturating_add(unit_size.max(1)).min(crate::search::stratum_size(n, c.k)),
        };
        out.push((c, stop));
        c = step_cursor(n, k_max, c, unit_size.max(1));
    }
    out
}

pub struct Coordinator {
    config: CoordinatorConfig,
    params_hash: String,
    units: Vec<WorkUnit>,
    by_id: HashMap<String, usize>,
    ledger: Vec<LedgerEntry>,
    sink: Option<File>,
}

impl Coordinator {
    pub fn new(config: CoordinatorConfig) -> Result<Self, DistribError> {
        config.params.validate()?;
        let params_hash = config.params.hash();
        let units: Vec<WorkUnit> = partition(&config.params, config.unit_size)
            .into_iter()
            .enumerate()
            .map(|(i, (from, to))| WorkUnit {
                unit_id: format!("u{i:06}"),
                params_hash: params_hash.clone(),
                from,
                to,
                status: UnitStatus::Pending,
                lease: None,
            })
            .collect();
        let by_id = units
            .iter()
            .enumerate()
            .map(|(i, u)| (u.unit_id.clone(), i))
            .collect();
        Ok(Coordinator {
            config,
            params_hash,
            units,
            by_id,
            ledger: Vec::new(),
            sink: None,
        })
    }

    /// Persist accepted entries to `path`, first replaying any entries it
    /// already holds for these parameters.
    pub fn with_ledger(mut self, path: &Path) -> Result<Self, DistribError> {
        if path.exists() {
            for e in read_ledger(path)? {
                if e.params_hash != self.params_hash {
                    continue;
                }
                if let Some(&i) = self.by_id.get(&e.unit_id) {
                    if self.units[i].status != UnitStatus::Done {
                        self.units[i].status = UnitStatus::Done;
                        self.units[i].lease = None;
                        self.ledger.push(e);
                    }
                }
            }
        }
        self.sink = Some(OpenOptions::new().create(true).append(true).open(path)?);
        Ok(self)
    }

    pub fn params(&self) -> &ScanParams {
        &self.config.params
    }

    pub fn params_hash(&self) -> &str {
        &self.params_hash
    }

    pub fn units(&self) -> &[WorkUnit] {
        &self.units
    }

    pub fn ledger(&self) -> &[LedgerEntry] {
        &self.ledger
    }

    fn live(&self, u: &WorkUnit, now: u64) -> bool {
        u.status == UnitStatus::Leased && u.lease.as_ref().is_some_and(|l| l.deadline > now)
    }

    pub fn lease(&mut self, worker_id: &str, now: u64) -> LeaseResponse {
        let free = self
            .units
            .iter()
            .position(|u| u.status == UnitStatus::Pending || (u.status == UnitStatus::Leased && !self.live(u, now)));
        let Some(i) = free else {
            if self.is_drained() {
                return LeaseResponse::Drained { drained: true };
            }
            let next = self
                .units
                .iter()
                .filter_map(|u| u.lease.as_ref().map(|l| l.deadline))
                .min()
                .unwrap_or(now);
            return LeaseResponse::Wait {
                retry_after: next.saturating_sub(now).max(1),
            };
        };
        let deadline = now + self.config.lease_secs;
        let u = &mut self.units[i];
        u.status = UnitStatus::Leased;
        u.lease = Some(Lease {
            worker_id: worker_id.to_string(),
            deadline,
        });
        LeaseResponse::Unit {
            unit_id: u.unit_id.clone(),
            from: u.from,
            to: u.to,
            params: self.config.params.clone(),
            params_hash: self.params_hash.clone(),
        }
    }

    pub fn submit(&mut self, s: Submission, now: u64) -> Result<SubmitOutcome, DistribError> {
        if s.params_hash != self.params_hash {
            return Err(DistribError::ParamsMismatch {
                expected: self.params_hash.clone(),
                found: s.params_hash,
            });
        }
        let i = *self
            .by_id
            .get(&s.unit_id)
            .ok_or_else(|| DistribError::UnknownUnit(s.unit_id.clone()))?;
        let u = &self.units[i];
        if u.status == UnitStatus::Done {
            return Ok(SubmitOutcome::Duplicate);
        }
        if self.live(u, now) && u.lease.as_ref().is_some_and(|l| l.worker_id != s.worker_id) {
            return Err(DistribError::Conflict(s.unit_id));
        }
        if self.config.reverify {
            let (hits, counters) = scan_range(&self.config.params, u.from, u.to)?;
            if hits != s.hits || counters != s.counters {
                return Err(DistribError::Rejected {
                    unit_id: s.unit_id,
                    reason: "results differ from a local rerun".into(),
                });
            }
        }
        let entry = LedgerEntry {
            unit_id: s.unit_id,
            params_hash: s.params_hash,
            worker_id: s.worker_id,
            counters: s.counters,
            hits: s.hits,
            submitted_at: now,
        };
        if let Some(f) = self.sink.as_mut() {
            let mut line = serde_json::to_string(&entry).expect("entry serializes");
            line.push('\n');
            f.write_all(line.as_bytes())?;
            f.flush()?;
        }
        self.ledger.push(entry);
        let u = &mut self.units[i];
        u.status = UnitStatus::Done;
        u.lease = None;
        Ok(SubmitOutcome::Accepted)
    }

    pub fn is_drained(&self) -> bool {
        self.units.iter().all(|u| u.status == UnitStatus::Done)
    }

    pub fn status(&self, now: u64) -> Status {
        let mut counters = Counters::default();
        for e in &self.ledger {
            counters.merge(&e.counters);
        }
        let leased = self.units.iter().filter(|u| self.live(u, now)).count();
        let done = self.units.iter().filter(|u| u.status == UnitStatus::Done).count();
        Status {
            units_total: self.units.len(),
            units_done: done,
            units_leased: leased,
            units_pending: self.units.len() - done - leased,
            drained: self.is_drained(),
            params_hash: self.params_hash.clone(),
            counters,
            verified_hits: self.hits().iter().filter(|h| h.is_verified_hit()).count(),
        }
    }

    /// All hit records in cursor order.
    pub fn hits(&self) -> Vec<HitRecord> {
        merged_hits(&self.ledger, &self.units)
    }
}

/// Hits from accepted entries, ordered by unit position.
pub fn merged_hits(ledger: &[LedgerEntry], units: &[WorkUnit]) -> Vec<HitRecord> {
    let order: HashMap<&str, usize> = units
        .iter()
        .enumerate()
        .map(|(i, u)| (u.unit_id.as_str(), i))
        .collect();
    let mut entries: Vec<&LedgerEntry> = ledger.iter().collect();
    entries.sort_by_key(|e| order.get(e.unit_id.as_str()).copied().unwrap_or(usize::MAX));
    entries.into_iter().flat_map(|e| e.hits.iter().cloned()).collect()
}

pub fn read_ledger(path: &Path) -> Result<Vec<LedgerEntry>, DistribError> {
    let f = File::open(path)?;
    let mut out = Vec::new();
    for (no, line) in BufReader::new(f).lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        out.push(
            serde_json::from_str(&line)
                .map_err(|e| DistribError::Ledger(format!("line {}: {e}", no + 1)))?,
        );
    }
    Ok(out)
}

/// Rewrite a ledger keeping the first entry per `(params_hash, unit_id)`,
/// sorted by unit id. Returns the number of entries dropped.
pub fn compact_ledger(path: &Path) -> Result<usize, DistribError> {
    let entries = read_ledger(path)?;
    let before = entries.len();
    let mut seen = std::collections::HashSet::new();
    let mut kept: Vec<LedgerEntry> = entries
        .into_iter()
        .filter(|e| seen.insert((e.params_hash.clone(), e.unit_id.clone())))
        .collect();
    kept.sort_by(|a, b| (&a.params_hash, &a.unit_id).cmp(&(&b.params_hash, &b.unit_id)));
    let mut tmp: PathBuf = path.to_path_buf();
    tmp.set_extension("compact.tmp");
    {
        let mut f = File::create(&tmp)?;
        for e in &kept {
            writeln!(f, "{}", serde_json::to_string(e).expect("entry serializes"))?;
        }
        f.sync_all()?;
    }
    fs::rename(&tmp, path)?;
    Ok(before - kept.len())
}

/// How a worker reaches its coordinator.
pub trait Transport {
    fn lease(&mut self, req: &LeaseRequest) -> Result<LeaseResponse, DistribError>;
    fn submit(&mut self, s: &Submission) -> Result<SubmitResponse, DistribError>;
}

#[derive(Clone, Debug)]
pub struct WorkerOptions {
    pub worker_id: String,
    /// Give up after this many consecutive transport failures.
    pub max_retries: u32,
    pub backoff: Duration,
    /// Stop after leasing this many units, without submitting the last one.
    /// Used to simulate a worker dying mid-unit.
    pub crash_after: Option<usize>,
}

impl WorkerOptions {
    pub fn new(worker_id: impl Into<String>) -> Self {
        WorkerOptions {
            worker_id: worker_id.into(),
            max_retries: 8,
            backoff: Duration::from_millis(200),
            crash_after: None,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct WorkerSummary {
    pub units_done: usize,
    pub duplicates: usize,
    pub crashed: bool,
}

/// Lease, scan, submit until the coordinator reports drained.
pub fn worker_loop<T: Transport>(t: &mut T, opts: &WorkerOptions) -> Result<WorkerSummary, DistribError> {
    let mut summary = WorkerSummary::default();
    let mut leased = 0usize;
    let mut failures = 0u32;
    let req = LeaseRequest {
        worker_id: opts.worker_id.clone(),
    };
    let retry = |e: DistribError, failures: &mut u32| -> Result<(), DistribError> {
        *failures += 1;
        if *failures > opts.max_retries {
            return Err(e);
        }
        thread::sleep(opts.backoff * (*failures).min(6));
        Ok(())
    };
    loop {
        let resp = match t.lease(&req) {
            Ok(r) => r,
            Err(e @ DistribError::Transport(_)) => {
                retry(e, &mut failures)?;
                continue;
            }
            Err(e) => return Err(e),
        };
        failures = 0;
        let (unit_id, from, to, params, params_hash) = match resp {
            LeaseResponse::Drained { .. } => return Ok(summary),
            LeaseResponse::Wait { .. } => {
                thread::sleep(opts.backoff);
                continue;
            }
            LeaseResponse::Unit {
                unit_id,
                from,
                to,
                params,
                params_hash,
            } => (unit_id, from, to, params, params_hash),
        };
        if params.hash() != params_hash {
            return Err(DistribError::ParamsMismatch {
                expected: params_hash,
                found: params.hash(),
            });
        }
        leased += 1;
        if opts.crash_after.is_some_and(|c| leased >= c) {
            summary.crashed = true;
            return Ok(summary);
        }
        let (hits, counters) = scan_range(&params, from, to)?;
        let sub = Submission {
            unit_id,
            worker_id: opts.worker_id.clone(),
            params_hash,
            counters,
            hits,
        };
        loop {
            match t.submit(&sub) {
                Ok(r) => {
                    match r.outcome {
                        SubmitOutcome::Accepted => summary.units_done += 1,
                        SubmitOutcome::Duplicate => summary.duplicates += 1,
                    }
                    break;
                }
                Err(e @ DistribError::Transport(_)) => retry(e, &mut failures)?,
                // lease lost to a live worker: drop the unit and move on
                Err(DistribError::Conflict(_)) => break,
                Err(e) => return Err(e),
            }
        }
    }
}

/// A clock the coordinator can be driven by.
pub trait Clock: Send + Sync {
    fn now(&self) -> u64;
}

pub struct SystemClock;

impl Clock for SystemClock {
    fn now(&self) -> u64 {
        std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0)
    }
}

/// Manual clock; each reading advances it by `tick` seconds.
pub struct SimClock {
    now: std::sync::atomic::AtomicU64,
    tick: u64,
}

impl SimClock {
    pub fn new(start: u64, tick: u64) -> Self {
        SimClock {
            now: start.into(),
            tick,
        }
    }

    pub fn advance(&self, secs: u64) {
        self.now.fetch_add(secs, std::sync::atomic::Ordering::SeqCst);
    }
}

impl Clock for SimClock {
    fn now(&self) -> u64 {
        self.now
            .fetch_add(self.tick, std::sync::atomic::Ordering::SeqCst)
    }
}

/// Direct in-process transport to a shared coordinator.
#[derive(Clone)]
pub struct InProcess {
    pub coordinator: std::sync::Arc<std::sync::Mutex<Coordinator>>,
    pub clock: std::sync::Arc<dyn Clock>,
}

impl Transport for InProcess {
    fn lease(&mut self, req: &LeaseRequest) -> Result<LeaseResponse, DistribError> {
        let now = self.clock.now();
        Ok(self.coordinator.lock().unwrap().lease(&req.worker_id, now))
    }

    fn submit(&mut self, s: &Submission) -> Result<SubmitResponse, DistribError> {
        let now = self.clock.now();
        let outcome = self.coordinator.lock().unwrap().submit(s.clone(), now)?;
        Ok(SubmitResponse { outcome })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::search::{default_filters, DEFAULT_SEED};

    fn params() -> ScanParams {
        ScanParams::kernel(4, 12, default_filters(DEFAULT_SEED))
    }

    fn coordinator(unit: u64, lease: u64) -> Coordinator {
        let mut cfg = CoordinatorConfig::new(params());
        cfg.unit_size = unit;
        cfg.lease_secs = lease;
        Coordinator::new(cfg).unwrap()
    }

    fn run_unit(c: &mut Coordinator, worker: &str, now: u64) -> Submission {
        let LeaseResponse::Unit { unit_id, from, to, params, params_hash } = c.lease(worker, now) else {
            panic!("expected a unit");
        };
        let (hits, counters) = scan_range(&params, from, to).unwrap();
        Submission {
            unit_id,
            worker_id: worker.into(),
            params_hash,
            counters,
            hits,
        }
    }

    #[test]
    fn partition_covers_range_exactly() {
        let p = params();
        let parts = partition(&p, 7);
        let total: u64 = parts
            .iter()
            .map(|(a, b)| crate::search::range_len(p.n, *a, *b))
            .sum();
        assert_eq!(total, crate::search::range_len(p.n, Cursor::START, Cursor { k: 13, index: 0 }));
        for w in parts.windows(2) {
            assert_eq!(normalize_cursor(p.n, p.k_max, w[0].1), w[1].0);
        }
    }

    #[test]
    fn happy_path_and_duplicates() {
        let mut c = coordinator(1_000_000, 60);
        let s = run_unit(&mut c, "w1", 0);
        assert_eq!(c.submit(s.clone(), 1).unwrap(), SubmitOutcome::Accepted);
        assert_eq!(c.status(2).units_done, 1);
        let before = c.ledger().len();
        assert_eq!(c.submit(s, 3).unwrap(), SubmitOutcome::Duplicate);
        assert_eq!(c.ledger().len(), before);
    }

    #[test]
    fn expired_lease_is_reissued_and_accepted_once() {
        let mut c = coordinator(1_000_000, 10);
        let units = c.units().len();
        let held: Vec<Submission> = (0..units).map(|_| run_unit(&mut c, "w1", 0)).collect();
        // w1 holds every unit on a live lease
        assert!(matches!(c.lease("w2", 5), LeaseResponse::Wait { .. }));
        for s in &held[1..] {
            assert_eq!(c.submit(s.clone(), 6).unwrap(), SubmitOutcome::Accepted);
        }
        let a = held[0].clone();
        let b = run_unit(&mut c, "w2", 11);
        assert_eq!(a.unit_id, b.unit_id);
        assert_eq!(c.submit(a.clone(), 12), Err(DistribError::Conflict(a.unit_id.clone())));
        assert_eq!(c.submit(b, 13).unwrap(), SubmitOutcome::Accepted);
        assert_eq!(c.submit(a, 14).unwrap(), SubmitOutcome::Duplicate);
        assert_eq!(c.ledger().len(), units);
        assert!(c.is_drained());
        assert_eq!(c.lease("w3", 15), LeaseResponse::Drained { drained: true });
    }

    #[test]
    fn params_mismatch_is_rejected() {
        let mut c = coordinator(1_000_000, 10);
        let mut s = run_unit(&mut c, "w1", 0);
        s.params_hash = "00".into();
        assert!(matches!(c.submit(s, 1), Err(DistribError::ParamsMismatch { .. })));
    }

    #[test]
    fn wire_numbers_are_strings() {
        let c = coordinator(5, 10);
        let j = serde_json::to_value(c.status(0)).unwrap();
        assert!(j["units_total"].is_string());
        assert!(j["counters"]["enumerated"].is_string());
    }
}
