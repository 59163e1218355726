//! `burau4` command-line tool.
//!
//! Exit codes: 0 success, 1 usage or runtime error, 2 verified hit found by a
//! scan, 3 reproduction failure.

use std::collections::HashMap;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use num_rational::BigRational;

use burau4::braid::{parse_expr, parse_word, BraidWord, PSI};
use burau4::distrib::{worker_loop, CoordinatorConfig, WorkerOptions, DEFAULT_LEASE_SECS, DEFAULT_UNIT_SIZE};
use burau4::forkpair::{build_diagram, filter_points, pairing_poly, ForkSpec};
use burau4::kernelgen::{build_candidate, manual_candidate, synthesize_conjugator, CandidateMode};
use burau4::modular::ModPoint;
use burau4::reproduce::run_golden;
use burau4::search::{
    default_filters, parse_rational, Checkpoint, HitLedger, Scan, ScanParams, DEFAULT_K_MAX, DEFAULT_SEED,
};
use burau4_distrib::{serve_blocking, token_from_env, HttpTransport, ServeConfig};

const EXIT_USAGE: u8 = 1;
const EXIT_HIT: u8 = 2;
const EXIT_REPRODUCE: u8 = 3;

#[derive(Parser)]
#[command(name = "burau4", version, about = "Burau kernel search toolkit for B4")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Print the pairing polynomial for a fork spec.
    Pair {
        #[arg(long)]
        spec: String,
        #[arg(long)]
        json: bool,
    },
    /// Filtered search for exact-zero pairings.
    Scan(ScanArgs),
    /// Search for pairings vanishing at q0 and 1/q0.
    Specialize {
        /// Target q0, an integer or a fraction r/s.
        #[arg(long)]
        at: String,
        #[command(flatten)]
        scan: ScanArgs,
    },
    /// Collect pairings with a reciprocal pair of rational roots.
    Roots(ScanArgs),
    /// Check a braid word against the Burau representation and the Artin action.
    Verify {
        #[arg(long, default_value_t = 4)]
        n: usize,
        #[arg(long)]
        word: String,
        /// Named sub-word, `name=word`; repeatable. `psi` is predefined.
        #[arg(long)]
        define: Vec<String>,
        /// Comma-separated q0 values.
        #[arg(long, value_delimiter = ',')]
        at: Vec<String>,
        #[arg(long)]
        json: bool,
    },
    /// Build a kernel candidate for a hit spec.
    Synth {
        #[arg(long)]
        spec: String,
        /// q0 for a specialization candidate; omit for the generic case.
        #[arg(long)]
        at: Option<String>,
        #[arg(long)]
        json: bool,
    },
    /// Run the golden checks against the published values.
    Reproduce {
        /// Also run the q = 2 specialization scan up to k = 108.
        #[arg(long)]
        full: bool,
        #[arg(long)]
        json: bool,
    },
    /// Run a work-unit coordinator over HTTP.
    Serve {
        #[arg(long, default_value = "127.0.0.1:8650")]
        bind: std::net::SocketAddr,
        #[arg(long, default_value_t = 4)]
        n: usize,
        #[arg(long, default_value_t = DEFAULT_K_MAX)]
        kmax: u32,
        /// Specialization target; omit for a kernel scan.
        #[arg(long)]
        at: Option<String>,
        #[arg(long)]
        filters: Option<String>,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_UNIT_SIZE)]
        unit_size: u64,
        #[arg(long, default_value_t = DEFAULT_LEASE_SECS)]
        lease_secs: u64,
        #[arg(long)]
        ledger: Option<PathBuf>,
        /// Rerun every submitted unit before accepting it.
        #[arg(long)]
        reverify: bool,
        #[arg(long)]
        exit_when_drained: bool,
    },
    /// Lease and scan work units from a coordinator until it drains.
    Work {
        #[arg(long, default_value = "http://127.0.0.1:8650")]
        coordinator: String,
        #[arg(long)]
        worker_id: Option<String>,
    },
}

#[derive(Args)]
struct ScanArgs {
    #[arg(long, default_value_t = 4)]
    n: usize,
    #[arg(long, default_value_t = DEFAULT_K_MAX)]
    kmax: u32,
    /// Filter points `q0:M,...`; defaults to random points from --seed.
    #[arg(long)]
    filters: Option<String>,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Resume from and periodically save to this file.
    #[arg(long)]
    checkpoint: Option<PathBuf>,
    /// Append hit records as JSON lines.
    #[arg(long)]
    ledger: Option<PathBuf>,
    #[arg(long)]
    threads: Option<usize>,
    #[arg(long)]
    json: bool,
}

type Res<T> = Result<T, String>;

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn parse_filters(text: Option<&str>, seed: u64) -> Res<Vec<ModPoint>> {
    let Some(text) = text else {
        return Ok(default_filters(seed));
    };
    let pairs = text
        .split(',')
        .map(|p| {
            let (a, m) = p.trim().split_once(':').ok_or(format!("bad filter {p:?}, want q0:M"))?;
            Ok((a.parse().map_err(err)?, m.parse().map_err(err)?))
        })
        .collect::<Res<Vec<(u64, u64)>>>()?;
    filter_points(&pairs).map_err(err)
}

fn print_json<T: serde::Serialize>(v: &T) {
    println!("{}", serde_json::to_string_pretty(v).expect("serializable"));
}

fn pair(spec: &str, json: bool) -> Res<u8> {
    let spec: ForkSpec = spec.parse().map_err(err)?;
    let d = build_diagram(&spec).map_err(err)?;
    let p = pairing_poly(&spec).map_err(err)?;
    if json {
        print_json(&serde_json::json!({
            "spec": spec,
            "k": d.k.to_string(),
            "poly": p,
            "value_at_minus_one": p.value_at_minus_one().to_string(),
        }));
    } else {
        println!("{p}");
    }
    Ok(0)
}

fn scan(params: ScanParams, args: &ScanArgs) -> Res<u8> {
    params.validate().map_err(err)?;
    eprintln!("params hash {} (seed {})", params.hash(), args.seed);
    let state = match &args.checkpoint {
        Some(p) if p.exists() => Checkpoint::load(p, &params).map_err(err)?,
        _ => Checkpoint::fresh(params),
    };
    let mut s = Scan::resume(state).map_err(err)?;
    if let Some(t) = args.threads {
        s = s.with_threads(t).map_err(err)?;
    }
    let mut ledger = match &args.ledger {
        Some(p) => Some(HitLedger::open(p).map_err(err)?),
        None => None,
    };
    while !s.is_done() {
        let hits = s.advance(1 << 22);
        if let Some(l) = ledger.as_mut() {
            for h in &hits {
                l.append(h).map_err(err)?;
            }
        }
        if let Some(p) = &args.checkpoint {
            s.state().save(p).map_err(err)?;
        }
        if !args.json {
            for h in hits.iter().filter(|h| h.is_verified_hit()) {
                println!("hit k={} {}", h.k, h.spec);
            }
        }
    }
    let state = s.into_state();
    let verified = state.hits.iter().filter(|h| h.is_verified_hit()).count();
    if args.json {
        print_json(&state);
    } else {
        println!("{}", serde_json::to_string(&state.counters).map_err(err)?);
        println!("{verified} verified hits");
    }
    Ok(if verified > 0 { EXIT_HIT } else { 0 })
}

fn verify(n: usize, word: &str, define: &[String], at: &[String], json: bool) -> Res<u8> {
    let mut defs: HashMap<String, BraidWord> = HashMap::new();
    if n == 4 {
        defs.insert("psi".into(), parse_word(PSI, 4).map_err(err)?);
    }
    for d in define {
        let (name, w) = d.split_once('=').ok_or(format!("bad --define {d:?}, want name=word"))?;
        let w = parse_expr(w, n, &defs).map_err(err)?;
        defs.insert(name.trim().to_string(), w);
    }
    let w = parse_expr(word, n, &defs).map_err(err)?;
    let targets: Vec<BigRational> = at.iter().map(|s| parse_rational(s)).collect::<Result<_, _>>().map_err(err)?;
    let c = manual_candidate(w, "command line", &targets).map_err(err)?;
    if json {
        print_json(&c);
        return Ok(0);
    }
    let nontrivial = if c.checks.artin.trivial { "braid trivial" } else { "braid non-trivial" };
    for q0 in &targets {
        let verdict = if c.checks.kernel_at(q0) {
            "kernel element"
        } else if c.checks.per_q0[&q0.to_string()] {
            "Burau identity"
        } else {
            "not in kernel"
        };
        println!("{verdict} at q={q0}; {nontrivial}");
    }
    let generic = if c.checks.generic { "identity" } else { "not identity" };
    println!("generic Burau image {generic}; exponent sum {}", c.checks.exponent_sum);
    Ok(0)
}

fn synth(spec: &str, at: Option<&str>, json: bool) -> Res<u8> {
    let spec: ForkSpec = spec.parse().map_err(err)?;
    let mode = match at {
        Some(q) => CandidateMode::Specialization(parse_rational(q).map_err(err)?),
        None => CandidateMode::Generic,
    };
    let syn = synthesize_conjugator(&spec).map_err(err)?;
    if !json {
        println!("conjugator {} (standard arc p{}p{})", syn.word, syn.standard, syn.standard + 1);
    }
    match build_candidate(&spec, &mode) {
        Ok(c) => {
            if json {
                print_json(&c);
            } else {
                println!("candidate ({} letters) {}", c.word.len(), c.word);
                println!("checks {}", serde_json::to_string(&c.checks).map_err(err)?);
            }
            Ok(0)
        }
        Err(e) => Err(e.to_string()),
    }
}

fn reproduce(full: bool, json: bool) -> Res<u8> {
    let checks = run_golden(full);
    if json {
        print_json(&checks);
    } else {
        for c in &checks {
            let mark = if c.passed { "PASS" } else { "FAIL" };
            if c.detail.is_empty() {
                println!("{mark} {}", c.name);
            } else {
                println!("{mark} {} ({})", c.name, c.detail);
            }
        }
    }
    Ok(if checks.iter().all(|c| c.passed) { 0 } else { EXIT_REPRODUCE })
}

fn run(cli: Cli) -> Res<u8> {
    match cli.cmd {
        Cmd::Pair { spec, json } => pair(&spec, json),
        Cmd::Scan(a) => {
            let f = parse_filters(a.filters.as_deref(), a.seed)?;
            scan(ScanParams::kernel(a.n, a.kmax, f), &a)
        }
        Cmd::Specialize { at, scan: a } => {
            let q0 = parse_rational(&at).map_err(err)?;
            let f = parse_filters(a.filters.as_deref(), a.seed)?;
            scan(ScanParams::specialize(a.n, a.kmax, &q0, f), &a)
        }
        Cmd::Roots(a) => scan(ScanParams::collect_roots(a.n, a.kmax), &a),
        Cmd::Verify { n, word, define, at, json } => verify(n, &word, &define, &at, json),
        Cmd::Synth { spec, at, json } => synth(&spec, at.as_deref(), json),
        Cmd::Reproduce { full, json } => reproduce(full, json),
        Cmd::Serve {
            bind,
            n,
            kmax,
            at,
            filters,
            seed,
            unit_size,
            lease_secs,
            ledger,
            reverify,
            exit_when_drained,
        } => {
            let f = parse_filters(filters.as_deref(), seed)?;
            let params = match at {
                Some(q) => ScanParams::specialize(n, kmax, &parse_rational(&q).map_err(err)?, f),
                None => ScanParams::kernel(n, kmax, f),
            };
            let mut coordinator = CoordinatorConfig::new(params);
            coordinator.unit_size = unit_size;
            coordinator.lease_secs = lease_secs;
            coordinator.reverify = reverify;
            eprintln!("serving on {bind} (seed {seed})");
            serve_blocking(ServeConfig {
                bind,
                coordinator,
                ledger,
                token: token_from_env(),
                exit_when_drained,
            })
            .map_err(err)?;
            Ok(0)
        }
        Cmd::Work { coordinator, worker_id } => {
            let id = worker_id.unwrap_or_else(|| format!("worker-{}", std::process::id()));
            let mut t = HttpTransport::new(&coordinator, token_from_env());
            let s = worker_loop(&mut t, &WorkerOptions::new(id)).map_err(err)?;
            eprintln!("{} units done, {} duplicates", s.units_done, s.duplicates);
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_USAGE)
        }
    }
}
