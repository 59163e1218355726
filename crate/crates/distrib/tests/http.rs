use std::thread;

use burau4::distrib::{
    worker_loop, CoordinatorConfig, DistribError, LeaseRequest, LeaseResponse, Submission, Transport,
    WorkerOptions,
};
use burau4::search::{default_filters, kernel_scan, scan_range, ScanParams, DEFAULT_SEED};
use burau4_distrib::{HttpTransport, ServeConfig, Server};

fn params() -> ScanParams {
    ScanParams::kernel(4, 20, default_filters(DEFAULT_SEED))
}

fn start(token: Option<&str>, exit_when_drained: bool) -> (String, thread::JoinHandle<()>) {
    let mut coordinator = CoordinatorConfig::new(params());
    coordinator.unit_size = 500;
    coordinator.lease_secs = 600;
    coordinator.reverify = true;
    let cfg = ServeConfig {
        bind: "127.0.0.1:0".parse().unwrap(),
        coordinator,
        ledger: None,
        token: token.map(str::to_string),
        exit_when_drained,
    };
    let (tx, rx) = std::sync::mpsc::channel();
    let h = thread::spawn(move || {
        let rt = tokio::runtime::Runtime::new().unwrap();
        rt.block_on(async move {
            let server = Server::bind(cfg).await.unwrap();
            tx.send(server.local_addr()).unwrap();
            server.run().await.unwrap();
        });
    });
    let addr = rx.recv().unwrap();
    (format!("http://{addr}"), h)
}

#[test]
fn two_http_workers_match_one_shot_scan() {
    let (base, server) = start(None, true);
    let workers: Vec<_> = (0..2)
        .map(|i| {
            let base = base.clone();
            thread::spawn(move || {
                let mut t = HttpTransport::new(&base, None);
                worker_loop(&mut t, &WorkerOptions::new(format!("w{i}"))).unwrap()
            })
        })
        .collect();
    let done: usize = workers.into_iter().map(|w| w.join().unwrap().units_done).sum();
    let t = HttpTransport::new(&base, None);
    let status = t.status().unwrap();
    assert_eq!(status["drained"], true);
    assert_eq!(status["units_done"].as_str().unwrap().parse::<usize>().unwrap(), done);
    let reference = kernel_scan(params()).unwrap();
    assert_eq!(
        status["counters"],
        serde_json::to_value(&reference.counters).unwrap()
    );
    let verified: Vec<_> = reference.hits.into_iter().filter(|h| h.is_verified_hit()).collect();
    assert_eq!(t.hits().unwrap(), verified);
    server.join().unwrap();
}

#[test]
fn error_codes_round_trip() {
    let (base, _server) = start(None, false);
    let mut a = HttpTransport::new(&base, None);
    let LeaseResponse::Unit { unit_id, from, to, params, params_hash } = a
        .lease(&LeaseRequest { worker_id: "a".into() })
        .unwrap()
    else {
        panic!("expected a unit");
    };
    let (hits, counters) = scan_range(&params, from, to).unwrap();
    let sub = Submission {
        unit_id: unit_id.clone(),
        worker_id: "b".into(),
        params_hash: params_hash.clone(),
        counters,
        hits,
    };
    // leased to a live worker "a"
    assert_eq!(a.submit(&sub), Err(DistribError::Conflict(unit_id.clone())));
    let bad = Submission {
        params_hash: "ff".into(),
        ..sub.clone()
    };
    assert!(matches!(a.submit(&bad), Err(DistribError::ParamsMismatch { .. })));
    let mut tampered = Submission {
        worker_id: "a".into(),
        ..sub
    };
    tampered.counters.enumerated += 1;
    assert!(matches!(a.submit(&tampered), Err(DistribError::Rejected { .. })));
}

#[test]
fn token_is_enforced() {
    let (base, _server) = start(Some("s3cret"), false);
    let mut anon = HttpTransport::new(&base, None);
    assert!(matches!(
        anon.lease(&LeaseRequest { worker_id: "x".into() }),
        Err(DistribError::Transport(_))
    ));
    let mut ok = HttpTransport::new(&base, Some("s3cret".into()));
    assert!(ok.lease(&LeaseRequest { worker_id: "x".into() }).is_ok());
}
