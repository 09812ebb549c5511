//! The run procedure and its multi-train generalization.
//!
//! The run procedure moves a single token from the origin along the current
//! successor of each vertex it visits, swapping current and next successor
//! after every traversal, until a destination absorbs it.
//!
//! The multi-run procedure starts one train from the yard and `w[i]` trains
//! from each vertex of a set `S`, and repeatedly dispatches batches of
//! waiting trains from vertices outside `S` until none are waiting. Trains
//! reaching `S` or a destination stop there. The traversal profile is
//! independent of the dispatch order; the scheduling strategies below only
//! change how fast the loop converges.

use num_bigint::BigUint;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::flows::{validate_set, EdgeFlow, FlowError};
use crate::instance::{ArrivalInstance, Destination, Slot, SwitchGraph, VertexId};
use crate::rng::SplitMix64;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SimError {
    #[error("instance is not terminating")]
    NotTerminating,
    #[error("run exceeded the step cap of {cap} proper-edge traversals")]
    StepCapExceeded { cap: u64 },
    #[error(transparent)]
    Set(#[from] FlowError),
    #[error("vertex {vertex} is in S and cannot be dispatched")]
    DispatchInSet { vertex: u32 },
    #[error("dispatch of {tau} trains at vertex {vertex}, but only {waiting} wait there")]
    DispatchTooMany {
        vertex: u32,
        waiting: BigUint,
        tau: BigUint,
    },
    #[error("dispatch requires tau >= 1")]
    DispatchZero,
    #[error("the topological scheduler requires V \\ S to be acyclic")]
    SetNotAcyclic,
}

/// Dispatch strategy for the multi-run loop. Every strategy picks a vertex
/// with waiting trains and a batch size `tau` in `1..=t[v]`; ties always go
/// to the lowest vertex index.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheduler {
    /// Pick the vertex with the most waiting trains and move all of them.
    Greedy,
    /// Cycle through `V \ S` in index order, moving all waiting trains.
    RoundRobin,
    /// One pass over a topological order of `V \ S`, moving all waiting
    /// trains; valid only when that subgraph is acyclic.
    Topological,
    /// Move a single train at a time, following it until it stops; the slow
    /// reference strategy.
    SingleStep,
    /// Seeded random choice of vertex and batch size.
    Random { seed: u64 },
}

impl Scheduler {
    pub fn name(&self) -> String {
        match self {
            Scheduler::Greedy => "greedy".into(),
            Scheduler::RoundRobin => "round-robin".into(),
            Scheduler::Topological => "topological".into(),
            Scheduler::SingleStep => "single-step".into(),
            Scheduler::Random { seed } => format!("random:{seed}"),
        }
    }
}

impl std::str::FromStr for Scheduler {
    type Err = String;

    fn from_str(s: &str) -> Result<Scheduler, String> {
        match s {
            "greedy" => Ok(Scheduler::Greedy),
            "round-robin" => Ok(Scheduler::RoundRobin),
            "topological" => Ok(Scheduler::Topological),
            "single-step" => Ok(Scheduler::SingleStep),
            _ => match s.strip_prefix("random:") {
                Some(seed) => seed
                    .parse()
                    .map(|seed| Scheduler::Random { seed })
                    .map_err(|_| format!("invalid scheduler seed in {s:?}")),
                None => Err(format!(
                    "unknown scheduler {s:?} (greedy, round-robin, topological, single-step, random:SEED)"
                )),
            },
        }
    }
}

/// One batch of traversals sharing an edge, for trace export.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceEvent {
    pub step: u64,
    pub vertex: VertexId,
    pub tau: BigUint,
    pub slot: Slot,
    pub head: VertexId,
}

/// Result of the run procedure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunOutcome {
    pub destination: Destination,
    /// Traversal counts for every edge slot, including the yard edge.
    pub profile: EdgeFlow,
    /// Times the loop head saw each proper vertex.
    pub visits: Vec<u64>,
    /// Proper-edge traversals, equal to the number of loop iterations.
    pub steps: u64,
}

/// Result of the multi-run procedure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultiRunOutcome {
    pub arrivals_d: BigUint,
    pub arrivals_dbar: BigUint,
    /// Trains absorbed at each set vertex, in set order.
    pub inflows: Vec<BigUint>,
    pub profile: EdgeFlow,
    /// Loop iterations (dispatches), excluding the start phase.
    pub iterations: u64,
    /// Proper-edge traversals made by the loop, excluding the start phase.
    pub loop_traversals: BigUint,
    /// Trains waiting immediately after the start phase.
    pub initial_waiting: BigUint,
}

fn default_step_cap(n: u32) -> u64 {
    // n * 2^n + 1, saturating; the run procedure on a terminating instance
    // stays strictly below this.
    if n >= 58 {
        return u64::MAX;
    }
    (n as u64).saturating_mul(1u64 << n).saturating_add(1)
}

/// Simulates the run procedure. Terminating instances need no cap; for
/// anything else the cap (given or defaulted to `n * 2^n + 1`) bounds the
/// number of proper-edge traversals and exceeding it is reported as an error.
pub fn run_procedure(
    instance: &ArrivalInstance,
    step_cap: Option<u64>,
) -> Result<RunOutcome, SimError> {
    run_impl(instance, step_cap, None)
}

/// Like [`run_procedure`], also returning the traversal trace.
pub fn run_procedure_traced(
    instance: &ArrivalInstance,
    step_cap: Option<u64>,
) -> Result<(RunOutcome, Vec<TraceEvent>), SimError> {
    let mut trace = Vec::new();
    let outcome = run_impl(instance, step_cap, Some(&mut trace))?;
    Ok((outcome, trace))
}

fn run_impl(
    instance: &ArrivalInstance,
    step_cap: Option<u64>,
    mut trace: Option<&mut Vec<TraceEvent>>,
) -> Result<RunOutcome, SimError> {
    let graph = SwitchGraph::new(instance);
    let n = graph.n();
    let cap = match step_cap {
        Some(c) => Some(c),
        None if graph.is_terminating() => None,
        None => Some(default_step_cap(n)),
    };

    let mut profile = EdgeFlow::zeros(n);
    let mut visits = vec![0u64; n as usize];
    let mut swapped = vec![false; n as usize];
    let mut steps = 0u64;

    profile.add(graph.yard_edge(), &BigUint::one());
    if let Some(t) = trace.as_deref_mut() {
        t.push(TraceEvent {
            step: 0,
            vertex: VertexId::Yard,
            tau: BigUint::one(),
            slot: Slot::Yard,
            head: VertexId::Proper(graph.origin()),
        });
    }

    let mut at = graph.origin();
    loop {
        visits[at as usize] += 1;
        if let Some(c) = cap {
            if steps >= c {
                return Err(SimError::StepCapExceeded { cap: c });
            }
        }
        let edge = if swapped[at as usize] {
            graph.odd_edge(at)
        } else {
            graph.even_edge(at)
        };
        let head = graph.edge_head(edge);
        profile.add(edge, &BigUint::one());
        swapped[at as usize] = !swapped[at as usize];
        steps += 1;
        if let Some(t) = trace.as_deref_mut() {
            t.push(TraceEvent {
                step: steps,
                vertex: VertexId::Proper(at),
                tau: BigUint::one(),
                slot: graph.edge_slot(edge),
                head,
            });
        }
        match head {
            VertexId::Proper(v) => at = v,
            VertexId::Dest(d) => {
                return Ok(RunOutcome {
                    destination: d,
                    profile,
                    visits,
                    steps,
                })
            }
            VertexId::Yard => unreachable!("the yard is never a successor"),
        }
    }
}

/// Mutable state of one multi-run: waiting-train counts, per-vertex
/// current/next successor parity, and the traversal accumulator.
///
/// `start` performs the start phase; `dispatch` applies one loop iteration.
/// The drivers in [`multi_run`] call these; tests can step the state manually
/// to observe invariants mid-run.
pub struct MultiRunState<'g> {
    graph: &'g SwitchGraph,
    set: Vec<u32>,
    in_set: Vec<bool>,
    /// Waiting trains per proper vertex, then arrivals at d and d̄.
    t: Vec<BigUint>,
    /// True when the odd successor is the current one.
    swapped: Vec<bool>,
    traversals: EdgeFlow,
    waiting_total: BigUint,
    loop_traversals: BigUint,
    iterations: u64,
    trace: Option<Vec<TraceEvent>>,
}

impl<'g> MultiRunState<'g> {
    /// Runs the start phase: one train along the yard edge, and `w[i]` trains
    /// out of each set vertex, the even slot taking the extra one when `w[i]`
    /// is odd.
    pub fn start(
        graph: &'g SwitchGraph,
        set: &[u32],
        weights: &[BigUint],
        with_trace: bool,
    ) -> Result<MultiRunState<'g>, SimError> {
        if !graph.is_terminating() {
            return Err(SimError::NotTerminating);
        }
        validate_set(graph.n(), set, weights.len())?;

        let n = graph.n();
        let mut in_set = vec![false; n as usize];
        for &v in set {
            in_set[v as usize] = true;
        }
        let mut state = MultiRunState {
            graph,
            set: set.to_vec(),
            in_set,
            t: vec![BigUint::zero(); n as usize + 2],
            swapped: vec![false; n as usize],
            traversals: EdgeFlow::zeros(n),
            waiting_total: BigUint::zero(),
            loop_traversals: BigUint::zero(),
            iterations: 0,
            trace: with_trace.then(Vec::new),
        };

        state.emit(graph.yard_edge(), &BigUint::one(), VertexId::Yard);
        for (i, &v) in set.iter().enumerate() {
            let even_share = (&weights[i] + 1u32) >> 1;
            let odd_share = &weights[i] >> 1;
            state.emit(graph.even_edge(v), &even_share, VertexId::Proper(v));
            state.emit(graph.odd_edge(v), &odd_share, VertexId::Proper(v));
        }
        Ok(state)
    }

    fn emit(&mut self, edge: u32, count: &BigUint, from: VertexId) {
        if count.is_zero() {
            return;
        }
        let head = self.graph.edge_head(edge);
        self.traversals.add(edge, count);
        self.arrive(head, count);
        if let Some(trace) = self.trace.as_mut() {
            trace.push(TraceEvent {
                step: self.iterations,
                vertex: from,
                tau: count.clone(),
                slot: self.graph.edge_slot(edge),
                head,
            });
        }
    }

    fn arrive(&mut self, head: VertexId, count: &BigUint) {
        let n = self.graph.n() as usize;
        match head {
            VertexId::Proper(v) => {
                self.t[v as usize] += count;
                if !self.in_set[v as usize] {
                    self.waiting_total += count;
                }
            }
            VertexId::Dest(Destination::D) => self.t[n] += count,
            VertexId::Dest(Destination::Dbar) => self.t[n + 1] += count,
            VertexId::Yard => unreachable!("the yard is never a successor"),
        }
    }

    pub fn graph(&self) -> &SwitchGraph {
        self.graph
    }

    pub fn set(&self) -> &[u32] {
        &self.set
    }

    pub fn in_set(&self, v: u32) -> bool {
        self.in_set[v as usize]
    }

    /// Waiting trains at a proper vertex (arrival count, for set vertices).
    pub fn trains(&self, v: u32) -> &BigUint {
        &self.t[v as usize]
    }

    pub fn arrivals(&self, d: Destination) -> &BigUint {
        let n = self.graph.n() as usize;
        match d {
            Destination::D => &self.t[n],
            Destination::Dbar => &self.t[n + 1],
        }
    }

    pub fn traversals(&self) -> &EdgeFlow {
        &self.traversals
    }

    pub fn iterations(&self) -> u64 {
        self.iterations
    }

    /// Total trains currently waiting on `V \ S`.
    pub fn waiting_total(&self) -> &BigUint {
        &self.waiting_total
    }

    pub fn is_done(&self) -> bool {
        self.waiting_total.is_zero()
    }

    /// The head the next dispatched train from `v` would move to.
    pub fn current_successor(&self, v: u32) -> VertexId {
        let edge = if self.swapped[v as usize] {
            self.graph.odd_edge(v)
        } else {
            self.graph.even_edge(v)
        };
        self.graph.edge_head(edge)
    }

    /// Moves `tau` waiting trains out of `v`: the larger half along the
    /// current successor, the rest along the next, swapping the two when
    /// `tau` is odd.
    pub fn dispatch(&mut self, v: u32, tau: &BigUint) -> Result<(), SimError> {
        if v >= self.graph.n() {
            return Err(SimError::Set(FlowError::SetVertexOutOfRange {
                vertex: v,
                n: self.graph.n(),
            }));
        }
        if self.in_set[v as usize] {
            return Err(SimError::DispatchInSet { vertex: v });
        }
        if tau.is_zero() {
            return Err(SimError::DispatchZero);
        }
        if tau > &self.t[v as usize] {
            return Err(SimError::DispatchTooMany {
                vertex: v,
                waiting: self.t[v as usize].clone(),
                tau: tau.clone(),
            });
        }

        self.t[v as usize] -= tau;
        self.waiting_total -= tau;
        self.loop_traversals += tau;
        self.iterations += 1;

        let (curr, next) = if self.swapped[v as usize] {
            (self.graph.odd_edge(v), self.graph.even_edge(v))
        } else {
            (self.graph.even_edge(v), self.graph.odd_edge(v))
        };
        let curr_share = (tau + 1u32) >> 1;
        let next_share = tau >> 1;
        self.emit(curr, &curr_share, VertexId::Proper(v));
        self.emit(next, &next_share, VertexId::Proper(v));
        if tau.bit(0) {
            self.swapped[v as usize] = !self.swapped[v as usize];
        }
        Ok(())
    }

    fn lowest_waiting(&self) -> Option<u32> {
        (0..self.graph.n()).find(|&v| !self.in_set[v as usize] && !self.t[v as usize].is_zero())
    }

    fn into_outcome(self, initial_waiting: BigUint) -> MultiRunOutcome {
        let n = self.graph.n() as usize;
        MultiRunOutcome {
            arrivals_d: self.t[n].clone(),
            arrivals_dbar: self.t[n + 1].clone(),
            inflows: self
                .set
                .iter()
                .map(|&v| self.t[v as usize].clone())
                .collect(),
            profile: self.traversals,
            iterations: self.iterations,
            loop_traversals: self.loop_traversals,
            initial_waiting,
        }
    }
}

/// Runs the multi-run procedure to completion under the given scheduler.
pub fn multi_run(
    instance: &ArrivalInstance,
    set: &[u32],
    weights: &[BigUint],
    scheduler: &Scheduler,
) -> Result<MultiRunOutcome, SimError> {
    let graph = SwitchGraph::new(instance);
    multi_run_on(&graph, set, weights, scheduler)
}

/// Like [`multi_run`], also returning the traversal trace (start phase rows
/// carry step 0).
pub fn multi_run_traced(
    instance: &ArrivalInstance,
    set: &[u32],
    weights: &[BigUint],
    scheduler: &Scheduler,
) -> Result<(MultiRunOutcome, Vec<TraceEvent>), SimError> {
    let graph = SwitchGraph::new(instance);
    let mut state = MultiRunState::start(&graph, set, weights, true)?;
    let initial_waiting = state.waiting_total().clone();
    drive(&mut state, scheduler)?;
    let trace = state.trace.take().unwrap_or_default();
    Ok((state.into_outcome(initial_waiting), trace))
}

/// Multi-run over a prebuilt switch graph; the hot path for fixed-point
/// searches, which evaluate many runs on one graph.
pub fn multi_run_on(
    graph: &SwitchGraph,
    set: &[u32],
    weights: &[BigUint],
    scheduler: &Scheduler,
) -> Result<MultiRunOutcome, SimError> {
    let mut state = MultiRunState::start(graph, set, weights, false)?;
    let initial_waiting = state.waiting_total().clone();
    drive(&mut state, scheduler)?;
    Ok(state.into_outcome(initial_waiting))
}

fn drive(state: &mut MultiRunState, scheduler: &Scheduler) -> Result<(), SimError> {
    match scheduler {
        Scheduler::Greedy => {
            while !state.is_done() {
                let mut best: Option<u32> = None;
                for v in 0..state.graph.n() {
                    if state.in_set[v as usize] || state.t[v as usize].is_zero() {
                        continue;
                    }
                    match best {
                        None => best = Some(v),
                        Some(b) if state.t[v as usize] > state.t[b as usize] => best = Some(v),
                        _ => {}
                    }
                }
                let v = best.expect("waiting_total > 0 implies a waiting vertex");
                let tau = state.t[v as usize].clone();
                state.dispatch(v, &tau)?;
            }
        }
        Scheduler::RoundRobin => {
            let n = state.graph.n();
            let mut cursor = 0u32;
            while !state.is_done() {
                let mut picked = None;
                for offset in 0..n {
                    let v = (cursor + offset) % n;
                    if !state.in_set[v as usize] && !state.t[v as usize].is_zero() {
                        picked = Some(v);
                        break;
                    }
                }
                let v = picked.expect("waiting_total > 0 implies a waiting vertex");
                let tau = state.t[v as usize].clone();
                state.dispatch(v, &tau)?;
                cursor = (v + 1) % n;
            }
        }
        Scheduler::Topological => {
            let order = state
                .graph
                .induced_topological_order(&state.in_set)
                .ok_or(SimError::SetNotAcyclic)?;
            for v in order {
                if !state.t[v as usize].is_zero() {
                    let tau = state.t[v as usize].clone();
                    state.dispatch(v, &tau)?;
                }
            }
            assert!(
                state.is_done(),
                "one topological pass must drain all waiting trains"
            );
        }
        Scheduler::SingleStep => {
            let mut current: Option<u32> = None;
            while !state.is_done() {
                let v = match current {
                    Some(v) if !state.t[v as usize].is_zero() => v,
                    _ => state
                        .lowest_waiting()
                        .expect("waiting_total > 0 implies a waiting vertex"),
                };
                let head = state.current_successor(v);
                state.dispatch(v, &BigUint::one())?;
                current = match head {
                    VertexId::Proper(h) if !state.in_set[h as usize] => Some(h),
                    _ => None,
                };
            }
        }
        Scheduler::Random { seed } => {
            let mut rng = SplitMix64::new(*seed);
            let mut waiting = Vec::new();
            while !state.is_done() {
                waiting.clear();
                waiting.extend(
                    (0..state.graph.n())
                        .filter(|&v| !state.in_set[v as usize] && !state.t[v as usize].is_zero()),
                );
                let v = waiting[rng.next_below(waiting.len() as u64) as usize];
                let tau = BigUint::one() + rng.next_biguint_below(&state.t[v as usize]);
                state.dispatch(v, &tau)?;
            }
        }
    }
    Ok(())
}

/// `(n - ell + 2) * 2^ell - 2`: the worst-case proper-edge traversal count of
/// a run on a terminating instance whose farthest vertex sits at distance
/// `ell` from a destination.
pub fn traversal_bound(n: u32, ell: u32) -> BigUint {
    assert!(ell <= n, "ell is a distance over n vertices");
    let weight = BigUint::from(n - ell + 2u32);
    (weight << ell) - 2u32
}

/// Iteration bound for greedy multi-run scheduling:
/// `(ceil(ln W) + n) * (n - k) * ((n - ell + 2) * 2^ell - 2)`,
/// with `ell` measured to `S` and the destinations, `W` the total train
/// count, and the logarithm natural.
pub fn greedy_iteration_bound(n: u32, k: u32, ell: u32, total_weight: &BigUint) -> BigUint {
    assert!(k <= n);
    let log_term = ceil_ln(total_weight) + n as u64;
    BigUint::from(log_term) * (n - k) * traversal_bound(n, ell)
}

fn ceil_ln(w: &BigUint) -> u64 {
    use num_traits::ToPrimitive;
    if w <= &BigUint::one() {
        return 0;
    }
    match w.to_f64() {
        Some(f) if f.is_finite() => f.ln().ceil() as u64,
        // Values beyond f64 range: bound ln by bits * ln 2, rounded up.
        _ => ((w.bits() as f64) * std::f64::consts::LN_2).ceil() as u64,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testkit::{big, instance_i2, tiny};

    #[test]
    fn one_step_run() {
        let inst = tiny(&[(Destination::D, Destination::Dbar)]);
        let out = run_procedure(&inst, None).unwrap();
        assert_eq!(out.destination, Destination::D);
        assert_eq!(*out.profile.yard(), big(1));
        assert_eq!(*out.profile.even(0), big(1));
        assert_eq!(*out.profile.odd(0), big(0));
        assert_eq!(out.visits, vec![1]);
        assert_eq!(out.steps, 1);
    }

    #[test]
    fn i2_run_matches_hand_trace() {
        let out = run_procedure(&instance_i2(), None).unwrap();
        assert_eq!(out.destination, Destination::Dbar);
        assert_eq!(*out.profile.yard(), big(1));
        assert_eq!(*out.profile.even(0), big(1)); // (a, b)
        assert_eq!(*out.profile.odd(0), big(1)); // (a, d̄)
        assert_eq!(*out.profile.even(1), big(1)); // (b, a)
        assert_eq!(*out.profile.odd(1), big(0)); // (b, d)
        assert_eq!(out.visits, vec![2, 1]);
    }

    #[test]
    fn non_terminating_instance_hits_default_cap() {
        let inst = ArrivalInstance::new(1, 0, vec![VertexId::Proper(0)], vec![VertexId::Proper(0)])
            .unwrap();
        assert_eq!(
            run_procedure(&inst, None),
            Err(SimError::StepCapExceeded { cap: 3 })
        );
        assert_eq!(
            run_procedure(&inst, Some(10)),
            Err(SimError::StepCapExceeded { cap: 10 })
        );
    }

    #[test]
    fn multi_run_with_empty_set_equals_run_procedure() {
        let inst = instance_i2();
        let run = run_procedure(&inst, None).unwrap();
        let multi = multi_run(&inst, &[], &[], &Scheduler::Greedy).unwrap();
        assert_eq!(multi.profile, run.profile);
        assert_eq!(multi.arrivals_d, big(0));
        assert_eq!(multi.arrivals_dbar, big(1));
        assert!(multi.inflows.is_empty());
    }

    #[test]
    fn i2_multi_run_with_one_train_at_b() {
        let inst = instance_i2();
        let out = multi_run(&inst, &[1], &[big(1)], &Scheduler::Greedy).unwrap();
        assert_eq!(out.arrivals_d, big(0));
        assert_eq!(out.arrivals_dbar, big(1));
        assert_eq!(out.inflows, vec![big(1)]);
        assert_eq!(*out.profile.yard(), big(1));
        assert_eq!(*out.profile.even(0), big(1)); // (a, b)
        assert_eq!(*out.profile.odd(0), big(1)); // (a, d̄)
        assert_eq!(*out.profile.even(1), big(1)); // (b, a)
        assert_eq!(*out.profile.odd(1), big(0)); // (b, d)
        assert_eq!(out.iterations, 1); // single greedy dispatch at a with tau = 2
    }

    #[test]
    fn i2_multi_run_with_zero_weight() {
        let inst = instance_i2();
        let out = multi_run(&inst, &[1], &[big(0)], &Scheduler::Greedy).unwrap();
        assert_eq!(out.inflows, vec![big(1)]); // the yard train walks a -> b
        assert_eq!(out.arrivals_d + out.arrivals_dbar, big(0));
    }

    #[test]
    fn set_validation_errors() {
        let inst = instance_i2();
        assert!(matches!(
            multi_run(&inst, &[1], &[], &Scheduler::Greedy),
            Err(SimError::Set(FlowError::DimensionMismatch { .. }))
        ));
        assert!(matches!(
            multi_run(&inst, &[7], &[big(1)], &Scheduler::Greedy),
            Err(SimError::Set(FlowError::SetVertexOutOfRange { .. }))
        ));
        assert!(matches!(
            multi_run(&inst, &[0, 0], &[big(1), big(1)], &Scheduler::Greedy),
            Err(SimError::Set(FlowError::DuplicateSetVertex { .. }))
        ));
    }

    #[test]
    fn topological_scheduler_rejects_cycles_off_s() {
        let inst = instance_i2(); // a <-> b is a cycle
        assert_eq!(
            multi_run(&inst, &[], &[], &Scheduler::Topological),
            Err(SimError::SetNotAcyclic)
        );
        // Removing one cycle vertex makes it fine.
        assert!(multi_run(&inst, &[0], &[big(3)], &Scheduler::Topological).is_ok());
    }

    #[test]
    fn schedulers_agree_on_i2() {
        let inst = instance_i2();
        let reference = multi_run(&inst, &[1], &[big(5)], &Scheduler::Greedy).unwrap();
        for scheduler in [
            Scheduler::RoundRobin,
            Scheduler::SingleStep,
            Scheduler::Random { seed: 11 },
            Scheduler::Random { seed: 99 },
        ] {
            let out = multi_run(&inst, &[1], &[big(5)], &scheduler).unwrap();
            assert_eq!(out.profile, reference.profile, "{scheduler:?}");
            assert_eq!(out.arrivals_d, reference.arrivals_d);
            assert_eq!(out.arrivals_dbar, reference.arrivals_dbar);
            assert_eq!(out.inflows, reference.inflows);
        }
    }

    #[test]
    fn conservation_accounting_holds() {
        let inst = instance_i2();
        let w = [big(5)];
        let out = multi_run(&inst, &[1], &w, &Scheduler::RoundRobin).unwrap();
        let total = out.arrivals_d.clone()
            + out.arrivals_dbar.clone()
            + out.inflows.iter().sum::<BigUint>();
        assert_eq!(total, big(6)); // 1 + sum w
    }

    #[test]
    fn greedy_handles_astronomical_weights_in_one_dispatch() {
        // 2^100 trains at b: the start phase splits them, and the single
        // greedy dispatch at a moves everything at once.
        let inst = instance_i2();
        let w: BigUint = BigUint::one() << 100;
        let out = multi_run(&inst, &[1], &[w.clone()], &Scheduler::Greedy).unwrap();
        assert_eq!(out.iterations, 1);
        let total = out.arrivals_d.clone()
            + out.arrivals_dbar.clone()
            + out.inflows.iter().sum::<BigUint>();
        assert_eq!(total, w + 1u32);
    }

    #[test]
    fn greedy_bound_examples() {
        assert_eq!(greedy_iteration_bound(2, 1, 1, &big(2)), big(12));
        // ln 1 = 0.
        assert_eq!(
            greedy_iteration_bound(3, 0, 2, &big(1)),
            BigUint::from(3u32) * 3u32 * traversal_bound(3, 2)
        );
        assert_eq!(traversal_bound(3, 3), big(14));
    }

    #[test]
    fn visit_counts_respect_distance_bound_on_i2() {
        let out = run_procedure(&instance_i2(), None).unwrap();
        // dist(a) = 1, dist(b) = 1.
        assert!(out.visits[0] <= 2);
        assert!(out.visits[1] <= 2);
    }
}
