//! Monotone fixed-point search on the capped lattice `{0..N}^k`.
//!
//! The capped function `D(w) = min(N, F(w))` built from multi-run inflows is
//! monotone, so it has a fixed point; any fixed point of `D` is also a fixed
//! point of the uncapped `F`, and the multi-run profile at it is a switching
//! flow deciding the instance.

use std::collections::HashMap;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use thiserror::Error;

use crate::flows::{check_switching_flow, EdgeFlow, FlowVerdict, FlowViolation};
use crate::instance::{ArrivalInstance, Destination, SwitchGraph};
use crate::simulate::{multi_run_on, Scheduler, SimError};

/// How many evaluations the opportunistic pairwise monotonicity check keeps;
/// past this, violations are still caught by the search's box invariants and
/// the final fixed-point re-check.
const MONO_LOG_LIMIT: usize = 512;

/// Point budget for exhaustive lattice enumeration.
pub const EXHAUSTIVE_LIMIT: u64 = 1_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TarskiError {
    #[error("point has dimension {got}, lattice has dimension {expected}")]
    Dimension { expected: usize, got: usize },
    #[error("coordinate {coord} of {point:?} lies outside the lattice cap")]
    OutsideLattice { point: Vec<BigUint>, coord: usize },
    #[error("monotone evaluation violated: D({w1:?}) = {d1:?} but D({w2:?}) = {d2:?}")]
    MonotonicityViolation {
        w1: Vec<BigUint>,
        d1: Vec<BigUint>,
        w2: Vec<BigUint>,
        d2: Vec<BigUint>,
    },
    #[error("search box collapsed at D({w:?}) = {d:?}; evaluation is not monotone")]
    BoxInvariantViolated { w: Vec<BigUint>, d: Vec<BigUint> },
    #[error("flow ledger violated at w = {w:?}: inflows sum to {sum_f}, emitted only {allowed}")]
    LedgerViolation {
        w: Vec<BigUint>,
        sum_f: BigUint,
        allowed: BigUint,
    },
    #[error("exhaustive search needs (N+1)^k <= {EXHAUSTIVE_LIMIT}, lattice has {size} points")]
    LatticeTooLarge { size: BigUint },
    #[error(
        "fixed point of the capped map is not fixed under the uncapped inflows: F({w:?}) = {f:?}"
    )]
    NotUncappedFixedPoint { w: Vec<BigUint>, f: Vec<BigUint> },
    #[error("multi-run profile at the fixed point is not a switching flow: {violation}")]
    CertificateInvalid { violation: FlowViolation },
    #[error("search returned a non-fixed point; evaluation is inconsistent")]
    SearchInconsistent,
    #[error(transparent)]
    Sim(#[from] SimError),
}

/// One raw evaluation of the underlying function, with simulation cost data.
#[derive(Debug, Clone)]
pub struct EvalOutput {
    pub values: Vec<BigUint>,
    pub iterations: u64,
    pub proper_traversals: BigUint,
}

/// Per-evaluation record kept for bound checking: the total train count
/// `W = 1 + sum(w)` and the loop iterations the evaluation used.
#[derive(Debug, Clone)]
pub struct EvalRecord {
    pub total_weight: BigUint,
    pub iterations: u64,
}

pub type RawEval<'a> = Box<dyn FnMut(&[BigUint]) -> Result<EvalOutput, TarskiError> + 'a>;

/// A monotone function handle on `{0..N}^k` with memoization, an evaluation
/// counter, and opportunistic monotonicity checking. Values returned by the
/// raw function are capped at `N`; the uncapped values stay queryable.
pub struct TarskiProblem<'a> {
    k: usize,
    cap: BigUint,
    raw: RawEval<'a>,
    memo: HashMap<Vec<BigUint>, (Vec<BigUint>, Vec<BigUint>)>,
    evaluations: u64,
    records: Vec<EvalRecord>,
    mono_log: Vec<(Vec<BigUint>, Vec<BigUint>)>,
    total_iterations: u64,
    max_iterations_per_eval: u64,
    total_proper_traversals: BigUint,
}

impl<'a> TarskiProblem<'a> {
    pub fn new(k: usize, cap: BigUint, raw: RawEval<'a>) -> TarskiProblem<'a> {
        TarskiProblem {
            k,
            cap,
            raw,
            memo: HashMap::new(),
            evaluations: 0,
            records: Vec::new(),
            mono_log: Vec::new(),
            total_iterations: 0,
            max_iterations_per_eval: 0,
            total_proper_traversals: BigUint::zero(),
        }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn cap(&self) -> &BigUint {
        &self.cap
    }

    /// Raw evaluations performed so far; memoized repeats are free.
    pub fn eval_count(&self) -> u64 {
        self.evaluations
    }

    pub fn records(&self) -> &[EvalRecord] {
        &self.records
    }

    pub fn total_iterations(&self) -> u64 {
        self.total_iterations
    }

    pub fn max_iterations_per_eval(&self) -> u64 {
        self.max_iterations_per_eval
    }

    pub fn total_proper_traversals(&self) -> &BigUint {
        &self.total_proper_traversals
    }

    fn validate_point(&self, w: &[BigUint]) -> Result<(), TarskiError> {
        if w.len() != self.k {
            return Err(TarskiError::Dimension {
                expected: self.k,
                got: w.len(),
            });
        }
        for (i, c) in w.iter().enumerate() {
            if c > &self.cap {
                return Err(TarskiError::OutsideLattice {
                    point: w.to_vec(),
                    coord: i,
                });
            }
        }
        Ok(())
    }

    /// The capped value `D(w) = min(N, F(w))`.
    pub fn evaluate(&mut self, w: &[BigUint]) -> Result<Vec<BigUint>, TarskiError> {
        self.validate_point(w)?;
        if let Some((_, capped)) = self.memo.get(w) {
            return Ok(capped.clone());
        }
        let out = (self.raw)(w)?;
        if out.values.len() != self.k {
            return Err(TarskiError::Dimension {
                expected: self.k,
                got: out.values.len(),
            });
        }
        let capped: Vec<BigUint> = out
            .values
            .iter()
            .map(|v| {
                if v > &self.cap {
                    self.cap.clone()
                } else {
                    v.clone()
                }
            })
            .collect();

        for (w2, d2) in &self.mono_log {
            if vec_leq(w, w2) && !vec_leq(&capped, d2) {
                return Err(TarskiError::MonotonicityViolation {
                    w1: w.to_vec(),
                    d1: capped,
                    w2: w2.clone(),
                    d2: d2.clone(),
                });
            }
            if vec_leq(w2, w) && !vec_leq(d2, &capped) {
                return Err(TarskiError::MonotonicityViolation {
                    w1: w2.clone(),
                    d1: d2.clone(),
                    w2: w.to_vec(),
                    d2: capped,
                });
            }
        }
        if self.mono_log.len() < MONO_LOG_LIMIT {
            self.mono_log.push((w.to_vec(), capped.clone()));
        }

        self.evaluations += 1;
        let total_weight = BigUint::one() + w.iter().sum::<BigUint>();
        self.records.push(EvalRecord {
            total_weight,
            iterations: out.iterations,
        });
        self.total_iterations += out.iterations;
        self.max_iterations_per_eval = self.max_iterations_per_eval.max(out.iterations);
        self.total_proper_traversals += &out.proper_traversals;
        self.memo.insert(w.to_vec(), (out.values, capped.clone()));
        Ok(capped)
    }

    /// The uncapped value `F(w)`.
    pub fn evaluate_uncapped(&mut self, w: &[BigUint]) -> Result<Vec<BigUint>, TarskiError> {
        self.evaluate(w)?;
        Ok(self.memo.get(w).expect("just evaluated").0.clone())
    }

    /// Number of lattice points if that fits the exhaustive budget.
    fn lattice_points(&self) -> Result<u64, TarskiError> {
        let size = (self.cap.clone() + 1u32).pow(self.k as u32);
        match size.to_u64() {
            Some(s) if s <= EXHAUSTIVE_LIMIT => Ok(s),
            _ => Err(TarskiError::LatticeTooLarge { size }),
        }
    }
}

pub fn vec_leq(a: &[BigUint], b: &[BigUint]) -> bool {
    a.iter().zip(b.iter()).all(|(x, y)| x <= y)
}

fn ceil_log2(m: &BigUint) -> u64 {
    if m <= &BigUint::one() {
        return 0;
    }
    let bits = m.bits();
    if (BigUint::one() << (bits - 1)) == *m {
        bits - 1
    } else {
        bits
    }
}

/// Evaluation budget of the recursive binary search:
/// `4 * (ceil(log2(N + 1)) + 1)^k`. The search stays under it with room to
/// spare; tests assert it.
pub fn recursive_binary_eval_bound(cap: &BigUint, k: usize) -> BigUint {
    let per_level = ceil_log2(&(cap + 1u32)) + 1;
    BigUint::from(4u32) * BigUint::from(per_level).pow(k as u32)
}

/// Fixed-point search strategy.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FixedPointMethod {
    /// Nested binary search, one dimension per level; finds a fixed point in
    /// at most about `(log2(N+1) + 1)^k` evaluations.
    RecursiveBinary,
    /// Iterate `w <- D(w)` from the bottom; finds the least fixed point but
    /// may need on the order of `k * N` evaluations.
    Kleene,
    /// Scan the whole lattice in lexicographic order; only for tiny lattices.
    Exhaustive,
}

impl FixedPointMethod {
    pub fn name(&self) -> &'static str {
        match self {
            FixedPointMethod::RecursiveBinary => "recursive-binary",
            FixedPointMethod::Kleene => "kleene",
            FixedPointMethod::Exhaustive => "exhaustive",
        }
    }
}

impl std::str::FromStr for FixedPointMethod {
    type Err = String;

    fn from_str(s: &str) -> Result<FixedPointMethod, String> {
        match s {
            "recursive-binary" => Ok(FixedPointMethod::RecursiveBinary),
            "kleene" => Ok(FixedPointMethod::Kleene),
            "exhaustive" => Ok(FixedPointMethod::Exhaustive),
            _ => Err(format!(
                "unknown fixed-point method {s:?} (recursive-binary, kleene, exhaustive)"
            )),
        }
    }
}

/// Finds some `w` with `D(w) = w`, re-verified exactly before returning.
pub fn find_fixed_point(
    problem: &mut TarskiProblem,
    method: FixedPointMethod,
) -> Result<Vec<BigUint>, TarskiError> {
    let w = match method {
        FixedPointMethod::RecursiveBinary => {
            let lo = vec![BigUint::zero(); problem.k()];
            let hi = vec![problem.cap().clone(); problem.k()];
            solve_box(problem, lo, hi, &[])?
        }
        FixedPointMethod::Kleene => kleene(problem)?,
        FixedPointMethod::Exhaustive => exhaustive_fixed_points(problem, true)?
            .into_iter()
            .next()
            .ok_or(TarskiError::SearchInconsistent)?,
    };
    let d = problem.evaluate(&w)?;
    if d != w {
        return Err(TarskiError::SearchInconsistent);
    }
    Ok(w)
}

/// Binary search on the last free coordinate; each probe fixes it and solves
/// the one-smaller slice, which is again a monotone self-map of its box.
fn solve_box(
    problem: &mut TarskiProblem,
    mut lo: Vec<BigUint>,
    mut hi: Vec<BigUint>,
    tail: &[BigUint],
) -> Result<Vec<BigUint>, TarskiError> {
    let d = lo.len();
    if d == 0 {
        return Ok(Vec::new());
    }
    loop {
        let z: BigUint = (&lo[d - 1] + &hi[d - 1]) >> 1;
        let mut tail2 = Vec::with_capacity(tail.len() + 1);
        tail2.push(z.clone());
        tail2.extend_from_slice(tail);
        let y = solve_box(problem, lo[..d - 1].to_vec(), hi[..d - 1].to_vec(), &tail2)?;

        let mut point = y.clone();
        point.push(z.clone());
        point.extend_from_slice(tail);
        let dw = problem.evaluate(&point)?;
        let c = &dw[d - 1];

        match c.cmp(&z) {
            std::cmp::Ordering::Equal => {
                let mut result = y;
                result.push(z);
                return Ok(result);
            }
            std::cmp::Ordering::Greater => {
                lo[..d - 1].clone_from_slice(&y);
                lo[d - 1] = z + 1u32;
            }
            std::cmp::Ordering::Less => {
                hi[..d - 1].clone_from_slice(&y);
                hi[d - 1] = z - 1u32; // c < z implies z >= 1
            }
        }
        if lo[d - 1] > hi[d - 1] {
            return Err(TarskiError::BoxInvariantViolated { w: point, d: dw });
        }
    }
}

fn kleene(problem: &mut TarskiProblem) -> Result<Vec<BigUint>, TarskiError> {
    let mut w = vec![BigUint::zero(); problem.k()];
    loop {
        let d = problem.evaluate(&w)?;
        if d == w {
            return Ok(w);
        }
        if !vec_leq(&w, &d) {
            // The ascent w <= D(w) is forced by monotonicity from 0 <= D(0).
            return Err(TarskiError::BoxInvariantViolated { w, d });
        }
        w = d;
    }
}

/// All fixed points of `D` in lexicographic order (or just the first), on
/// lattices within the exhaustive budget.
pub fn exhaustive_fixed_points(
    problem: &mut TarskiProblem,
    first_only: bool,
) -> Result<Vec<Vec<BigUint>>, TarskiError> {
    problem.lattice_points()?;
    let k = problem.k();
    let mut found = Vec::new();
    let mut w = vec![BigUint::zero(); k];
    loop {
        if problem.evaluate(&w)? == w {
            found.push(w.clone());
            if first_only {
                return Ok(found);
            }
        }
        // Odometer increment in lexicographic order (last coordinate fastest).
        let mut i = k;
        loop {
            if i == 0 {
                return Ok(found);
            }
            i -= 1;
            if w[i] < *problem.cap() {
                w[i] += 1u32;
                for c in w.iter_mut().skip(i + 1) {
                    *c = BigUint::zero();
                }
                break;
            }
        }
    }
}

/// Builds `D` for an instance and set: each evaluation runs the multi-run
/// procedure and returns the inflows at the set, capped at `N = 2^n`. Every
/// evaluation checks the flow ledger `sum F(w) <= 1 + sum w`.
pub fn build_capped_function(
    instance: &ArrivalInstance,
    set: &[u32],
    scheduler: Scheduler,
) -> Result<TarskiProblem<'static>, TarskiError> {
    let graph = SwitchGraph::new(instance);
    if !graph.is_terminating() {
        return Err(SimError::NotTerminating.into());
    }
    crate::flows::validate_set(graph.n(), set, set.len()).map_err(SimError::from)?;

    let cap = BigUint::one() << graph.n();
    let set_owned: Vec<u32> = set.to_vec();
    let raw = move |w: &[BigUint]| -> Result<EvalOutput, TarskiError> {
        let out = multi_run_on(&graph, &set_owned, w, &scheduler)?;
        let sum_f: BigUint = out.inflows.iter().sum();
        let allowed = BigUint::one() + w.iter().sum::<BigUint>();
        if sum_f > allowed {
            return Err(TarskiError::LedgerViolation {
                w: w.to_vec(),
                sum_f,
                allowed,
            });
        }
        Ok(EvalOutput {
            values: out.inflows,
            iterations: out.iterations,
            proper_traversals: out.profile.proper_total(),
        })
    };
    Ok(TarskiProblem::new(set.len(), cap, Box::new(raw)))
}

/// Reruns the multi-run procedure at a fixed point and extracts the switching
/// flow it certifies: the inflows must reproduce `w` exactly (the cap never
/// binds at a fixed point) and the profile must pass the switching-flow
/// check, naming the destination that absorbed the yard train.
pub fn fixed_point_to_switching_flow(
    instance: &ArrivalInstance,
    set: &[u32],
    w_hat: &[BigUint],
    scheduler: &Scheduler,
) -> Result<(EdgeFlow, Destination), TarskiError> {
    let graph = SwitchGraph::new(instance);
    let out = multi_run_on(&graph, set, w_hat, scheduler)?;
    if out.inflows.as_slice() != w_hat {
        return Err(TarskiError::NotUncappedFixedPoint {
            w: w_hat.to_vec(),
            f: out.inflows,
        });
    }
    match check_switching_flow(&graph, &out.profile) {
        FlowVerdict::ValidTo(dest) => {
            debug_assert!(
                out.arrivals_d + out.arrivals_dbar == BigUint::one(),
                "conservation must deliver exactly the yard train to a destination"
            );
            Ok((out.profile, dest))
        }
        FlowVerdict::Invalid(violation) => Err(TarskiError::CertificateInvalid { violation }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testkit::{big, bigs, instance_i2};

    fn synthetic<F>(k: usize, cap: u64, f: F) -> TarskiProblem<'static>
    where
        F: Fn(&[BigUint]) -> Vec<BigUint> + 'static,
    {
        TarskiProblem::new(
            k,
            big(cap),
            Box::new(move |w| {
                Ok(EvalOutput {
                    values: f(w),
                    iterations: 0,
                    proper_traversals: BigUint::zero(),
                })
            }),
        )
    }

    #[test]
    fn constant_map_fixed_point() {
        let mut problem = synthetic(2, 100, |_| bigs(&[37, 5]));
        let w = find_fixed_point(&mut problem, FixedPointMethod::RecursiveBinary).unwrap();
        assert_eq!(w, bigs(&[37, 5]));
        // About (log2 101 + 1)^2 evaluations at most.
        assert!(problem.eval_count() <= 4 * 8 * 8);
    }

    #[test]
    fn identity_map() {
        let mut problem = synthetic(1, 50, |w| w.to_vec());
        let w = find_fixed_point(&mut problem, FixedPointMethod::RecursiveBinary).unwrap();
        assert_eq!(problem.evaluate(&w).unwrap(), w);

        let mut problem = synthetic(1, 50, |w| w.to_vec());
        let w = find_fixed_point(&mut problem, FixedPointMethod::Kleene).unwrap();
        assert_eq!(w, bigs(&[0])); // least fixed point
    }

    #[test]
    fn i2_capped_function_and_fixed_point() {
        let inst = instance_i2();
        let mut problem = build_capped_function(&inst, &[1], Scheduler::Greedy).unwrap();
        assert_eq!(*problem.cap(), big(4)); // N = 2^2
        assert_eq!(problem.evaluate(&bigs(&[0])).unwrap(), bigs(&[1]));
        assert_eq!(problem.evaluate(&bigs(&[1])).unwrap(), bigs(&[1]));

        let w = find_fixed_point(&mut problem, FixedPointMethod::RecursiveBinary).unwrap();
        assert_eq!(w, bigs(&[1]));

        let (flow, dest) =
            fixed_point_to_switching_flow(&inst, &[1], &w, &Scheduler::Greedy).unwrap();
        assert_eq!(dest, Destination::Dbar);
        assert_eq!(*flow.even(1), big(1));
    }

    #[test]
    fn empty_set_has_trivial_fixed_point() {
        let inst = instance_i2();
        let mut problem = build_capped_function(&inst, &[], Scheduler::Greedy).unwrap();
        let w = find_fixed_point(&mut problem, FixedPointMethod::RecursiveBinary).unwrap();
        assert!(w.is_empty());
        let (flow, dest) =
            fixed_point_to_switching_flow(&inst, &[], &w, &Scheduler::Greedy).unwrap();
        assert_eq!(dest, Destination::Dbar);
        let run = crate::simulate::run_procedure(&inst, None).unwrap();
        assert_eq!(flow, run.profile);
    }

    #[test]
    fn exhaustive_is_gated() {
        let mut problem = synthetic(3, 1 << 20, |w| w.to_vec());
        assert!(matches!(
            find_fixed_point(&mut problem, FixedPointMethod::Exhaustive),
            Err(TarskiError::LatticeTooLarge { .. })
        ));
    }

    #[test]
    fn non_monotone_map_is_detected() {
        // f(0) = N, f(w > 0) = 0: not monotone.
        let mut problem = synthetic(1, 4, |w| {
            if w[0].is_zero() {
                bigs(&[4])
            } else {
                bigs(&[0])
            }
        });
        let err = find_fixed_point(&mut problem, FixedPointMethod::RecursiveBinary).unwrap_err();
        assert!(matches!(
            err,
            TarskiError::MonotonicityViolation { .. } | TarskiError::BoxInvariantViolated { .. }
        ));
    }

    #[test]
    fn capping_applies_and_uncapped_values_remain() {
        let mut problem = synthetic(1, 10, |_| bigs(&[25]));
        assert_eq!(problem.evaluate(&bigs(&[3])).unwrap(), bigs(&[10]));
        assert_eq!(problem.evaluate_uncapped(&bigs(&[3])).unwrap(), bigs(&[25]));
    }

    #[test]
    fn exhaustive_enumerates_all_fixed_points() {
        // f swaps the two coordinates: fixed points are the diagonal.
        let mut problem = synthetic(2, 3, |w| vec![w[1].clone(), w[0].clone()]);
        let all = exhaustive_fixed_points(&mut problem, false).unwrap();
        assert_eq!(all.len(), 4);
        for w in &all {
            assert_eq!(w[0], w[1]);
        }
    }

    #[test]
    fn ledger_violation_is_impossible_on_instances() {
        let inst = instance_i2();
        let mut problem = build_capped_function(&inst, &[0, 1], Scheduler::Greedy).unwrap();
        for a in 0..=4u64 {
            for b in 0..=4u64 {
                problem.evaluate(&bigs(&[a, b])).unwrap();
            }
        }
    }
}
