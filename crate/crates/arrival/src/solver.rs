//! Top-level deciders: plain simulation, the φ-set + fixed-point route, and
//! the feedback-vertex-set route, plus a cross-checking harness.
//!
//! Every decider emits a switching-flow certificate and re-verifies it before
//! returning; the harness additionally insists all routes name the same
//! destination.

use std::time::{Duration, Instant};

use num_bigint::BigUint;
use thiserror::Error;

use crate::decompose::{
    compute_phi_set, ell_to_set, feedback_vertex_set, layer_decomposition_on, DecomposeError, Ratio,
};
use crate::flows::{check_switching_flow, EdgeFlow, FlowVerdict};
use crate::instance::{ArrivalInstance, Destination, SwitchGraph};
use crate::simulate::{run_procedure, Scheduler, SimError};
use crate::tarski::{
    build_capped_function, find_fixed_point, fixed_point_to_switching_flow, EvalRecord,
    FixedPointMethod, TarskiError,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Simulation,
    Subexponential,
    FeedbackVertexSet,
}

impl Method {
    pub fn name(&self) -> &'static str {
        match self {
            Method::Simulation => "sim",
            Method::Subexponential => "subexp",
            Method::FeedbackVertexSet => "fvs",
        }
    }
}

impl std::str::FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> Result<Method, String> {
        match s {
            "sim" => Ok(Method::Simulation),
            "subexp" => Ok(Method::Subexponential),
            "fvs" => Ok(Method::FeedbackVertexSet),
            _ => Err(format!("unknown method {s:?} (sim, subexp, fvs)")),
        }
    }
}

#[derive(Debug, Error)]
pub enum SolveError {
    #[error("instance is not terminating")]
    NotTerminating,
    #[error("no feedback vertex set of size <= {k_max}: the FVS decider refuses this instance")]
    FvsRefused { k_max: usize },
    #[error("certificate failure in {method}: {msg}")]
    CertificateFailure { method: &'static str, msg: String },
    #[error("deciders disagree: {} says {}, {} says {}",
            first.method.name(), first.destination, second.method.name(), second.destination)]
    Disagreement {
        first: Box<Decision>,
        second: Box<Decision>,
    },
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error(transparent)]
    Tarski(#[from] TarskiError),
    #[error(transparent)]
    Decompose(#[from] DecomposeError),
}

/// Cost accounting for a decision.
#[derive(Debug, Clone)]
pub struct DecisionStats {
    pub n: u32,
    /// Max shortest distance from a vertex to a destination.
    pub ell: u32,
    /// Max shortest distance from a vertex to `S ∪ {d, d̄}`.
    pub ell_set: u32,
    pub set: Vec<u32>,
    pub phi: Option<Ratio>,
    /// Proper-edge traversals across all simulation work of this decision.
    pub proper_traversals: BigUint,
    /// Dispatch loop iterations across all simulation work.
    pub iterations: u64,
    pub d_evaluations: u64,
    /// Largest dispatch count any single evaluation used.
    pub max_iterations_per_eval: u64,
    /// Per-evaluation `(W, iterations)` pairs, for bound checking.
    pub eval_records: Vec<EvalRecord>,
    pub wall: Duration,
}

/// A decided instance: destination, method, certificate, and cost accounting.
/// The certificate always passes the switching-flow check with a matching
/// destination.
#[derive(Debug, Clone)]
pub struct Decision {
    pub method: Method,
    pub destination: Destination,
    pub certificate: EdgeFlow,
    pub stats: DecisionStats,
}

/// The default φ, a fixed-denominator rational just under `sqrt(3 / 2n)`.
pub fn default_phi(n: u32) -> Ratio {
    let x = (3.0 / (2.0 * n as f64)).sqrt();
    let num = ((x * 1000.0).floor() as u64).clamp(1, 999);
    Ratio::new(num, 1000).expect("fixed denominator is valid")
}

fn verify_certificate(
    graph: &SwitchGraph,
    method: Method,
    destination: Destination,
    certificate: &EdgeFlow,
) -> Result<(), SolveError> {
    match check_switching_flow(graph, certificate) {
        FlowVerdict::ValidTo(d) if d == destination => Ok(()),
        FlowVerdict::ValidTo(d) => Err(SolveError::CertificateFailure {
            method: method.name(),
            msg: format!("certificate decides {d}, decider reported {destination}"),
        }),
        FlowVerdict::Invalid(violation) => Err(SolveError::CertificateFailure {
            method: method.name(),
            msg: violation.to_string(),
        }),
    }
}

/// Decides by running the train; the certificate is the run profile.
pub fn decide_by_simulation(instance: &ArrivalInstance) -> Result<Decision, SolveError> {
    let start = Instant::now();
    let graph = SwitchGraph::new(instance);
    if !graph.is_terminating() {
        return Err(SolveError::NotTerminating);
    }
    let ell = layer_decomposition_on(&graph)?.ell();
    let run = run_procedure(instance, None)?;
    verify_certificate(&graph, Method::Simulation, run.destination, &run.profile)?;
    Ok(Decision {
        method: Method::Simulation,
        destination: run.destination,
        certificate: run.profile.clone(),
        stats: DecisionStats {
            n: graph.n(),
            ell,
            ell_set: ell,
            set: Vec::new(),
            phi: None,
            proper_traversals: run.profile.proper_total(),
            iterations: run.steps,
            d_evaluations: 0,
            max_iterations_per_eval: run.steps,
            eval_records: Vec::new(),
            wall: start.elapsed(),
        },
    })
}

/// Decides via a φ-set: fixed-point search over the capped inflow map, with
/// greedy multi-run evaluations.
pub fn decide_subexponential(
    instance: &ArrivalInstance,
    phi: Option<Ratio>,
    fp_method: FixedPointMethod,
) -> Result<Decision, SolveError> {
    let start = Instant::now();
    let graph = SwitchGraph::new(instance);
    if !graph.is_terminating() {
        return Err(SolveError::NotTerminating);
    }
    let phi = phi.unwrap_or_else(|| default_phi(graph.n()));
    let phi_set = compute_phi_set(instance, phi)?;
    decide_with_set(
        instance,
        &graph,
        Method::Subexponential,
        phi_set.set,
        Some(phi),
        Scheduler::Greedy,
        fp_method,
        start,
    )
}

/// Decides via a minimum feedback vertex set, evaluating the inflow map with
/// one topological sweep per evaluation. Refuses when no set of size at most
/// `k_max` exists; callers fall back to another route.
pub fn decide_fvs(
    instance: &ArrivalInstance,
    k_max: usize,
    fp_method: FixedPointMethod,
) -> Result<Decision, SolveError> {
    let start = Instant::now();
    let graph = SwitchGraph::new(instance);
    if !graph.is_terminating() {
        return Err(SolveError::NotTerminating);
    }
    let set = feedback_vertex_set(instance, k_max).ok_or(SolveError::FvsRefused { k_max })?;
    decide_with_set(
        instance,
        &graph,
        Method::FeedbackVertexSet,
        set,
        None,
        Scheduler::Topological,
        fp_method,
        start,
    )
}

#[allow(clippy::too_many_arguments)]
fn decide_with_set(
    instance: &ArrivalInstance,
    graph: &SwitchGraph,
    method: Method,
    set: Vec<u32>,
    phi: Option<Ratio>,
    scheduler: Scheduler,
    fp_method: FixedPointMethod,
    start: Instant,
) -> Result<Decision, SolveError> {
    let ell = layer_decomposition_on(graph)?.ell();
    let ell_set = ell_to_set(graph, &set)?;
    let mut problem = build_capped_function(instance, &set, scheduler)?;
    let w_hat = find_fixed_point(&mut problem, fp_method)?;
    let (certificate, destination) =
        fixed_point_to_switching_flow(instance, &set, &w_hat, &scheduler)?;
    verify_certificate(graph, method, destination, &certificate)?;
    Ok(Decision {
        method,
        destination,
        certificate,
        stats: DecisionStats {
            n: graph.n(),
            ell,
            ell_set,
            set,
            phi,
            proper_traversals: problem.total_proper_traversals().clone(),
            iterations: problem.total_iterations(),
            d_evaluations: problem.eval_count(),
            max_iterations_per_eval: problem.max_iterations_per_eval(),
            eval_records: problem.records().to_vec(),
            wall: start.elapsed(),
        },
    })
}

/// Consolidated result of running every applicable decider.
#[derive(Debug)]
pub struct AllReport {
    pub simulation: Decision,
    pub subexponential: Decision,
    /// `None` when the FVS route refused (no small feedback vertex set).
    pub fvs: Option<Decision>,
    pub destination: Destination,
}

impl AllReport {
    pub fn decisions(&self) -> impl Iterator<Item = &Decision> {
        [Some(&self.simulation), Some(&self.subexponential)]
            .into_iter()
            .flatten()
            .chain(self.fvs.as_ref())
    }
}

/// Runs all deciders and insists on agreement; a disagreement is a hard
/// failure carrying both certificates. FVS refusal counts as not applicable.
pub fn decide_all(instance: &ArrivalInstance, k_max: usize) -> Result<AllReport, SolveError> {
    let simulation = decide_by_simulation(instance)?;
    let subexponential = decide_subexponential(instance, None, FixedPointMethod::RecursiveBinary)?;
    let fvs = match decide_fvs(instance, k_max, FixedPointMethod::RecursiveBinary) {
        Ok(d) => Some(d),
        Err(SolveError::FvsRefused { .. }) => None,
        Err(e) => return Err(e),
    };

    let destination = simulation.destination;
    for other in [Some(&subexponential), fvs.as_ref()].into_iter().flatten() {
        if other.destination != destination {
            return Err(SolveError::Disagreement {
                first: Box::new(simulation),
                second: Box::new(other.clone()),
            });
        }
    }
    Ok(AllReport {
        simulation,
        subexponential,
        fvs,
        destination,
    })
}
