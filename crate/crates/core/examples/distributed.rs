//! Split a scan into leased work units and drain it with in-process workers,
//! one of which dies mid-unit.

use std::sync::{Arc, Mutex};
use std::thread;
use std::time::Duration;

use burau4::distrib::{worker_loop, Coordinator, CoordinatorConfig, InProcess, SimClock, WorkerOptions};
use burau4::search::{default_filters, kernel_scan, ScanParams, DEFAULT_SEED};

fn main() {
    let params = ScanParams::kernel(4, 40, default_filters(DEFAULT_SEED));
    let mut cfg = CoordinatorConfig::new(params.clone());
    cfg.unit_size = 5_000;
    cfg.lease_secs = 20;
    let coordinator = Arc::new(Mutex::new(Coordinator::new(cfg).unwrap()));
    let clock = Arc::new(SimClock::new(0, 1));
    println!("{} work units", coordinator.lock().unwrap().units().len());

    let workers: Vec<_> = (0..4)
        .map(|i| {
            let mut t = InProcess {
                coordinator: coordinator.clone(),
                clock: clock.clone(),
            };
            thread::spawn(move || {
                let mut o = WorkerOptions::new(format!("worker-{i}"));
                o.backoff = Duration::from_millis(1);
                if i == 1 {
                    o.crash_after = Some(3);
                }
                worker_loop(&mut t, &o).unwrap()
            })
        })
        .collect();
    for (i, w) in workers.into_iter().enumerate() {
        let s = w.join().unwrap();
        println!("worker-{i}: {} units{}", s.units_done, if s.crashed { ", crashed" } else { "" });
    }

    let c = coordinator.lock().unwrap();
    let status = c.status(0);
    println!("{}", serde_json::to_string_pretty(&status).unwrap());
    let single = kernel_scan(params).unwrap();
    println!("matches single-machine run: {}", status.counters == single.counters && c.hits() == single.hits);
}
