#![allow(dead_code)]

use std::collections::BTreeSet;
use std::sync::{Arc, Mutex};
use std::thread;
use std::time::Duration;

use burau4::distrib::{
    worker_loop, Coordinator, CoordinatorConfig, InProcess, SimClock, WorkerOptions,
};
use burau4::forkpair::{build_diagram, ForkSpec};
use burau4::search::{Counters, HitRecord, ScanParams};

/// Crossing count straight from the layout: each upper puncture sits under
/// `c_i` loops on either side, plus one crossing if it is an end; the `c12`
/// loops cross `N` twice more. With no loops and both ends above `N` the edge
/// never reaches `N`.
pub fn naive_k(spec: &ForkSpec) -> u64 {
    let c = spec.counts();
    let uppers = spec.n() - 1;
    let (a, b) = spec.ends();
    if c.iter().all(|&x| x == 0) && b <= uppers && a <= uppers {
        return 0;
    }
    let mut k: u64 = (1..=uppers).map(|i| 2 * c[i - 1] + spec.has_end(i) as u64).sum();
    if spec.n() == 4 {
        k += 2 * c[3];
    }
    k
}

/// Every valid spec with `1 <= k <= k_max`, by brute force over all tuples.
pub fn naive_specs(n: usize, k_max: u64) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    let b = k_max / 2;
    let pairs: Vec<(usize, usize)> = (1..=n).flat_map(|a| (a + 1..=n).map(move |b| (a, b))).collect();
    let mut push = |s: ForkSpec| {
        let k = naive_k(&s);
        if (1..=k_max).contains(&k) && build_diagram(&s).is_ok() {
            out.insert(s.to_string());
        }
    };
    for &e in &pairs {
        if n == 4 {
            for c1 in 0..=b {
                for c2 in 0..=b {
                    for c3 in 0..=b {
                        for c12 in 0..=b {
                            push(ForkSpec::d4(c1, c2, c3, c12, e).unwrap());
                        }
                    }
                }
            }
        } else {
            for c1 in 0..=b {
                for c2 in 0..=b {
                    push(ForkSpec::d3(c1, c2, e).unwrap());
                }
            }
        }
    }
    out
}

/// Result of a distributed run: merged counters and hits in cursor order,
/// plus the number of accepted entries per unit.
pub struct DistRun {
    pub counters: Counters,
    pub hits: Vec<HitRecord>,
    pub entries_per_unit: Vec<usize>,
    pub crashed: usize,
}

/// Drain `params` with in-process workers on a simulated clock that ticks
/// once per coordinator call; idle workers poll every 5 ms. Worker `i` dies
/// after leasing `crash_after[i]` units, when set. `lease_secs` should
/// outlast a unit, or live leases get stolen and work is repeated.
pub fn distributed(
    params: ScanParams,
    unit_size: u64,
    lease_secs: u64,
    crash_after: &[Option<usize>],
) -> DistRun {
    let mut cfg = CoordinatorConfig::new(params);
    cfg.unit_size = unit_size;
    cfg.lease_secs = lease_secs;
    let coord = Arc::new(Mutex::new(Coordinator::new(cfg).unwrap()));
    let clock = Arc::new(SimClock::new(0, 1));
    let handles: Vec<_> = crash_after
        .iter()
        .enumerate()
        .map(|(i, &crash)| {
            let mut t = InProcess {
                coordinator: coord.clone(),
                clock: clock.clone(),
            };
            thread::spawn(move || {
                let mut o = WorkerOptions::new(format!("w{i}"));
                o.backoff = Duration::from_millis(5);
                o.crash_after = crash;
                worker_loop(&mut t, &o).unwrap()
            })
        })
        .collect();
    let crashed = handles
        .into_iter()
        .map(|h| h.join().unwrap().crashed as usize)
        .sum();
    let c = coord.lock().unwrap();
    assert!(c.is_drained(), "coordinator not drained");
    let entries_per_unit = c
        .units()
        .iter()
        .map(|u| c.ledger().iter().filter(|e| e.unit_id == u.unit_id).count())
        .collect();
    DistRun {
        counters: c.status(0).counters,
        hits: c.hits(),
        entries_per_unit,
        crashed,
    }
}
