//! Command-line surface: validate, run, multi-run, decide, phi-set, fvs,
//! gen, bench, verify.
//!
//! Exit codes: 0 decided/ok, 1 invalid input (parse, validation,
//! non-terminating, refusal, bad certificate), 2 internal certificate
//! failure or decider disagreement.

use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Parser, Subcommand};
use num_bigint::BigUint;
use serde_json::json;

use arrival::bench::{bench_corpus, write_bench_csv};
use arrival::decompose::{compute_phi_set, feedback_vertex_set, Ratio};
use arrival::flows::{check_candidate_flow, check_switching_flow, CandidateVerdict, FlowVerdict};
use arrival::format::{
    parse_instance, read_flow_csv, serialize_instance, write_flow_csv, write_trace_csv,
};
use arrival::generate::{generate, Family, GeneratorSpec};
use arrival::instance::{ArrivalInstance, SwitchGraph};
use arrival::simulate::{multi_run_traced, run_procedure_traced, Scheduler, SimError, TraceEvent};
use arrival::solver::{
    decide_all, decide_by_simulation, decide_fvs, decide_subexponential, Decision, Method,
    SolveError,
};
use arrival::tarski::{recursive_binary_eval_bound, FixedPointMethod, TarskiError};

#[derive(Parser)]
#[command(name = "arrival", about = "Switch-graph train-run workbench", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse an instance and check its invariants, including termination.
    Validate {
        /// Instance file ('-' for stdin).
        file: PathBuf,
    },
    /// Simulate the run procedure.
    Run {
        file: PathBuf,
        /// Abort after this many proper-edge traversals (defaults to
        /// n * 2^n + 1 for non-terminating inputs).
        #[arg(long)]
        step_cap: Option<u64>,
        /// Write the traversal profile as CSV.
        #[arg(long)]
        profile_out: Option<PathBuf>,
        /// Write the step trace as CSV.
        #[arg(long)]
        trace_out: Option<PathBuf>,
        #[arg(long)]
        json: bool,
    },
    /// Run the multi-train procedure for a set S and weights w.
    MultiRun {
        file: PathBuf,
        /// Comma-separated vertex indices of S.
        #[arg(long, default_value = "")]
        set: String,
        /// Comma-separated train counts, one per set vertex.
        #[arg(long, default_value = "")]
        weights: String,
        /// greedy, round-robin, topological, single-step, or random:SEED.
        #[arg(long, default_value = "greedy")]
        scheduler: Scheduler,
        #[arg(long)]
        profile_out: Option<PathBuf>,
        #[arg(long)]
        trace_out: Option<PathBuf>,
        #[arg(long)]
        json: bool,
    },
    /// Decide the instance and emit a verified certificate.
    Decide {
        file: PathBuf,
        /// sim, subexp, fvs, or all.
        #[arg(long, default_value = "all")]
        method: String,
        /// φ for the subexponential route (defaults to roughly sqrt(3/2n)).
        #[arg(long)]
        phi: Option<Ratio>,
        /// Feedback-vertex-set size limit for the fvs route.
        #[arg(long, default_value_t = 6)]
        kmax: usize,
        /// recursive-binary, kleene, or exhaustive.
        #[arg(long, default_value = "recursive-binary")]
        tarski_method: FixedPointMethod,
        /// Write the switching-flow certificate as CSV.
        #[arg(long)]
        certificate_out: Option<PathBuf>,
        #[arg(long)]
        json: bool,
    },
    /// Compute a φ-set and report its certificates.
    PhiSet {
        file: PathBuf,
        #[arg(long)]
        phi: Option<Ratio>,
        #[arg(long)]
        json: bool,
    },
    /// Compute a minimum feedback vertex set (within --kmax).
    Fvs {
        file: PathBuf,
        #[arg(long, default_value_t = 6)]
        kmax: usize,
        #[arg(long)]
        json: bool,
    },
    /// Generate an instance.
    Gen {
        /// random-terminating, layered-chain, long-run-counter, two-cycle-grid.
        #[arg(long)]
        family: Family,
        #[arg(long)]
        n: u32,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output path (stdout if omitted).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Benchmark instances across methods, writing one CSV row per
    /// (instance, method).
    Bench {
        /// Output CSV path ('-' for stdout).
        #[arg(long)]
        out: PathBuf,
        /// Comma-separated subset of sim,subexp,fvs.
        #[arg(long, default_value = "sim,subexp,fvs")]
        methods: String,
        #[arg(long, default_value_t = 6)]
        kmax: usize,
        files: Vec<PathBuf>,
    },
    /// Check a switching-flow (or candidate-flow) certificate against an
    /// instance.
    Verify {
        file: PathBuf,
        /// Certificate CSV (tail,slot,head,count).
        #[arg(long)]
        certificate: PathBuf,
        /// Check as a candidate flow for this set instead.
        #[arg(long, default_value = "")]
        set: String,
        #[arg(long, default_value = "")]
        weights: String,
        #[arg(long)]
        json: bool,
    },
}

/// Input problems exit 1, internal failures (broken certificates,
/// disagreement) exit 2.
enum AppError {
    Input(anyhow::Error),
    Internal(anyhow::Error),
}

impl AppError {
    fn input(e: impl Into<anyhow::Error>) -> AppError {
        AppError::Input(e.into())
    }
}

impl From<SolveError> for AppError {
    fn from(e: SolveError) -> AppError {
        match &e {
            SolveError::CertificateFailure { .. } | SolveError::Disagreement { .. } => {
                AppError::Internal(e.into())
            }
            SolveError::Tarski(t) => match t {
                TarskiError::Sim(_) | TarskiError::LatticeTooLarge { .. } => {
                    AppError::Input(e.into())
                }
                _ => AppError::Internal(e.into()),
            },
            _ => AppError::Input(e.into()),
        }
    }
}

impl From<anyhow::Error> for AppError {
    fn from(e: anyhow::Error) -> AppError {
        AppError::Input(e)
    }
}

fn main() -> ExitCode {
    match dispatch(Cli::parse().command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(AppError::Input(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
        Err(AppError::Internal(e)) => {
            eprintln!("internal error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn read_input(path: &Path) -> Result<Vec<u8>, AppError> {
    if path == Path::new("-") {
        let mut buf = Vec::new();
        io::stdin()
            .read_to_end(&mut buf)
            .context("reading stdin")
            .map_err(AppError::Input)?;
        Ok(buf)
    } else {
        fs::read(path)
            .with_context(|| format!("reading {}", path.display()))
            .map_err(AppError::Input)
    }
}

fn load_instance(path: &Path) -> Result<ArrivalInstance, AppError> {
    let bytes = read_input(path)?;
    parse_instance(&bytes).map_err(|e| AppError::input(anyhow!("{}: {e}", path.display())))
}

fn parse_u32_list(s: &str) -> Result<Vec<u32>, AppError> {
    if s.trim().is_empty() {
        return Ok(Vec::new());
    }
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<u32>()
                .map_err(|_| AppError::input(anyhow!("invalid vertex index {t:?}")))
        })
        .collect()
}

fn parse_weight_list(s: &str) -> Result<Vec<BigUint>, AppError> {
    if s.trim().is_empty() {
        return Ok(Vec::new());
    }
    s.split(',')
        .map(|t| {
            let t = t.trim();
            if t.is_empty() || !t.bytes().all(|b| b.is_ascii_digit()) {
                return Err(AppError::input(anyhow!("invalid weight {t:?}")));
            }
            BigUint::parse_bytes(t.as_bytes(), 10)
                .ok_or_else(|| AppError::input(anyhow!("invalid weight {t:?}")))
        })
        .collect()
}

fn write_output(path: &Path, bytes: &[u8]) -> Result<(), AppError> {
    if path == Path::new("-") {
        io::stdout()
            .write_all(bytes)
            .context("writing stdout")
            .map_err(AppError::Input)
    } else {
        fs::write(path, bytes)
            .with_context(|| format!("writing {}", path.display()))
            .map_err(AppError::Input)
    }
}

fn write_profile(
    path: &Path,
    graph: &SwitchGraph,
    flow: &arrival::EdgeFlow,
) -> Result<(), AppError> {
    let mut bytes = Vec::new();
    write_flow_csv(&mut bytes, graph, flow).context("formatting profile")?;
    write_output(path, &bytes)
}

fn write_trace(path: &Path, trace: &[TraceEvent]) -> Result<(), AppError> {
    let mut bytes = Vec::new();
    write_trace_csv(&mut bytes, trace).context("formatting trace")?;
    write_output(path, &bytes)
}

fn decision_json(d: &Decision) -> serde_json::Value {
    let cap = BigUint::from(1u32) << d.stats.n;
    let eval_bound = recursive_binary_eval_bound(&cap, d.stats.set.len());
    let traversal_bound = arrival::simulate::traversal_bound(d.stats.n, d.stats.ell);
    json!({
        "method": d.method.name(),
        "destination": d.destination.token(),
        "n": d.stats.n,
        "ell": d.stats.ell,
        "ell_set": d.stats.ell_set,
        "set": d.stats.set,
        "phi": d.stats.phi.map(|p| p.to_string()),
        "proper_traversals": d.stats.proper_traversals.to_string(),
        "iterations": d.stats.iterations,
        "d_evaluations": d.stats.d_evaluations,
        "max_iterations_per_eval": d.stats.max_iterations_per_eval,
        "eval_bound": eval_bound.to_string(),
        "eval_bound_ok": BigUint::from(d.stats.d_evaluations) <= eval_bound,
        "traversal_bound": traversal_bound.to_string(),
        "traversal_bound_ok": d.method != Method::Simulation
            || d.stats.proper_traversals <= traversal_bound,
        "certificate_total": d.certificate.total().to_string(),
        "wall_ms": d.stats.wall.as_secs_f64() * 1e3,
    })
}

fn print_decision(d: &Decision, json: bool) {
    if json {
        println!("{}", decision_json(d));
    } else {
        let set = if d.stats.set.is_empty() {
            "{}".to_string()
        } else {
            format!("{:?}", d.stats.set)
        };
        println!(
            "{}: destination {} (n={}, ell={}, |S|={}, S={}, traversals={}, iterations={}, D-evals={}, {:.3} ms)",
            d.method.name(),
            d.destination,
            d.stats.n,
            d.stats.ell,
            d.stats.set.len(),
            set,
            d.stats.proper_traversals,
            d.stats.iterations,
            d.stats.d_evaluations,
            d.stats.wall.as_secs_f64() * 1e3,
        );
    }
}

fn dispatch(command: Command) -> Result<(), AppError> {
    match command {
        Command::Validate { file } => {
            let inst = load_instance(&file)?;
            if !inst.is_terminating() {
                return Err(AppError::input(anyhow!(
                    "instance is well-formed but not terminating"
                )));
            }
            println!(
                "ok: n={}, o={}, terminating, {} edge slots",
                inst.n(),
                inst.origin(),
                2 * inst.n() + 1
            );
            Ok(())
        }

        Command::Run {
            file,
            step_cap,
            profile_out,
            trace_out,
            json,
        } => {
            let inst = load_instance(&file)?;
            let graph = SwitchGraph::new(&inst);
            let (out, trace) = run_procedure_traced(&inst, step_cap).map_err(AppError::input)?;
            if json {
                println!(
                    "{}",
                    json!({
                        "destination": out.destination.token(),
                        "steps": out.steps,
                        "proper_traversals": out.profile.proper_total().to_string(),
                        "max_visits": out.visits.iter().max().copied().unwrap_or(0),
                    })
                );
            } else {
                println!(
                    "destination {} after {} proper-edge traversals",
                    out.destination, out.steps
                );
            }
            if let Some(path) = profile_out {
                write_profile(&path, &graph, &out.profile)?;
            }
            if let Some(path) = trace_out {
                write_trace(&path, &trace)?;
            }
            Ok(())
        }

        Command::MultiRun {
            file,
            set,
            weights,
            scheduler,
            profile_out,
            trace_out,
            json,
        } => {
            let inst = load_instance(&file)?;
            let graph = SwitchGraph::new(&inst);
            let set = parse_u32_list(&set)?;
            let weights = parse_weight_list(&weights)?;
            let (out, trace) =
                multi_run_traced(&inst, &set, &weights, &scheduler).map_err(AppError::input)?;
            if json {
                println!(
                    "{}",
                    json!({
                        "arrivals_d": out.arrivals_d.to_string(),
                        "arrivals_dbar": out.arrivals_dbar.to_string(),
                        "inflows": out.inflows.iter().map(|x| x.to_string()).collect::<Vec<_>>(),
                        "iterations": out.iterations,
                        "loop_traversals": out.loop_traversals.to_string(),
                        "scheduler": scheduler.name(),
                    })
                );
            } else {
                println!(
                    "arrivals: {} at D0, {} at D1; inflows {:?}; {} iterations",
                    out.arrivals_d,
                    out.arrivals_dbar,
                    out.inflows
                        .iter()
                        .map(|x| x.to_string())
                        .collect::<Vec<_>>(),
                    out.iterations
                );
            }
            if let Some(path) = profile_out {
                write_profile(&path, &graph, &out.profile)?;
            }
            if let Some(path) = trace_out {
                write_trace(&path, &trace)?;
            }
            Ok(())
        }

        Command::Decide {
            file,
            method,
            phi,
            kmax,
            tarski_method,
            certificate_out,
            json,
        } => {
            let inst = load_instance(&file)?;
            let graph = SwitchGraph::new(&inst);
            let decisions: Vec<Decision> = match method.as_str() {
                "all" => {
                    let report = decide_all(&inst, kmax)?;
                    let refused = report.fvs.is_none();
                    let ds: Vec<Decision> = report.decisions().cloned().collect();
                    for d in &ds {
                        print_decision(d, json);
                    }
                    if refused {
                        if json {
                            println!(
                                "{}",
                                json!({"method": "fvs", "refused": true, "kmax": kmax})
                            );
                        } else {
                            println!("fvs: refused (no feedback vertex set of size <= {kmax})");
                        }
                    }
                    if json {
                        println!(
                            "{}",
                            json!({
                                "agreement": true,
                                "destination": report.destination.token(),
                            })
                        );
                    }
                    ds
                }
                m => {
                    let method: Method =
                        m.parse().map_err(|e: String| AppError::input(anyhow!(e)))?;
                    let d = match method {
                        Method::Simulation => decide_by_simulation(&inst)?,
                        Method::Subexponential => decide_subexponential(&inst, phi, tarski_method)?,
                        Method::FeedbackVertexSet => decide_fvs(&inst, kmax, tarski_method)?,
                    };
                    print_decision(&d, json);
                    vec![d]
                }
            };
            if let Some(path) = certificate_out {
                write_profile(&path, &graph, &decisions[0].certificate)?;
            }
            Ok(())
        }

        Command::PhiSet { file, phi, json } => {
            let inst = load_instance(&file)?;
            let phi = phi.unwrap_or_else(|| arrival::solver::default_phi(inst.n()));
            let ps = compute_phi_set(&inst, phi).map_err(AppError::input)?;
            if json {
                println!(
                    "{}",
                    json!({
                        "phi": phi.to_string(),
                        "set": ps.set,
                        "size": ps.set.len(),
                        "size_bound_ok": ps.size_within_bound(inst.n()),
                        "certified_radius": ps.certified_radius,
                        "radius_bound_ok": ps.radius_within_bound(inst.n()),
                    })
                );
            } else {
                println!(
                    "phi-set for phi={phi}: S={:?} (|S|={}, size bound ok: {}); certified radius {} (bound ok: {})",
                    ps.set,
                    ps.set.len(),
                    ps.size_within_bound(inst.n()),
                    ps.certified_radius,
                    ps.radius_within_bound(inst.n()),
                );
            }
            Ok(())
        }

        Command::Fvs { file, kmax, json } => {
            let inst = load_instance(&file)?;
            let graph = SwitchGraph::new(&inst);
            match feedback_vertex_set(&inst, kmax) {
                Some(set) => {
                    let mut mask = vec![false; inst.n() as usize];
                    for &v in &set {
                        mask[v as usize] = true;
                    }
                    let witness = graph
                        .induced_topological_order(&mask)
                        .expect("verified acyclic");
                    if json {
                        println!(
                            "{}",
                            json!({
                                "set": set,
                                "size": set.len(),
                                "acyclic_witness": witness,
                            })
                        );
                    } else {
                        println!(
                            "feedback vertex set {:?} (size {}); topological witness {:?}",
                            set,
                            set.len(),
                            witness
                        );
                    }
                    Ok(())
                }
                None => Err(AppError::input(anyhow!(
                    "no feedback vertex set of size <= {kmax}"
                ))),
            }
        }

        Command::Gen {
            family,
            n,
            seed,
            out,
        } => {
            if n == 0 {
                return Err(AppError::input(anyhow!("generators require n >= 1")));
            }
            let inst = generate(&GeneratorSpec { family, n, seed });
            let text = serialize_instance(&inst);
            match out {
                Some(path) => write_output(&path, text.as_bytes()),
                None => {
                    print!("{text}");
                    Ok(())
                }
            }
        }

        Command::Bench {
            out,
            methods,
            kmax,
            files,
        } => {
            let methods: Vec<Method> = methods
                .split(',')
                .filter(|s| !s.trim().is_empty())
                .map(|s| {
                    s.trim()
                        .parse()
                        .map_err(|e: String| AppError::input(anyhow!(e)))
                })
                .collect::<Result<_, _>>()?;
            let mut corpus = Vec::new();
            for path in &files {
                corpus.push((path.display().to_string(), load_instance(path)?));
            }
            let rows = bench_corpus(&corpus, &methods, kmax)?;
            let mut bytes = Vec::new();
            write_bench_csv(&mut bytes, &rows).context("formatting bench CSV")?;
            write_output(&out, &bytes)?;
            if rows.iter().any(|r| r.agree == "false") {
                return Err(AppError::Internal(anyhow!(
                    "bench found disagreeing methods; see {}",
                    out.display()
                )));
            }
            Ok(())
        }

        Command::Verify {
            file,
            certificate,
            set,
            weights,
            json,
        } => {
            let inst = load_instance(&file)?;
            let graph = SwitchGraph::new(&inst);
            let bytes = read_input(&certificate)?;
            let flow = read_flow_csv(&bytes, &inst)
                .map_err(|e| AppError::input(anyhow!("{}: {e}", certificate.display())))?;
            let set = parse_u32_list(&set)?;
            let weights = parse_weight_list(&weights)?;
            if set.is_empty() && weights.is_empty() {
                match check_switching_flow(&graph, &flow) {
                    FlowVerdict::ValidTo(dest) => {
                        if json {
                            println!("{}", json!({"valid": true, "destination": dest.token()}));
                        } else {
                            println!("valid switching flow to {dest}");
                        }
                        Ok(())
                    }
                    FlowVerdict::Invalid(violation) => {
                        Err(AppError::input(anyhow!("invalid certificate: {violation}")))
                    }
                }
            } else {
                match check_candidate_flow(&graph, &set, &weights, &flow)
                    .map_err(SimError::from)
                    .map_err(AppError::input)?
                {
                    CandidateVerdict::Valid => {
                        if json {
                            println!("{}", json!({"valid": true}));
                        } else {
                            println!("valid candidate switching flow for S={set:?}");
                        }
                        Ok(())
                    }
                    CandidateVerdict::Invalid(violation) => {
                        Err(AppError::input(anyhow!("invalid certificate: {violation}")))
                    }
                }
            }
        }
    }
}
