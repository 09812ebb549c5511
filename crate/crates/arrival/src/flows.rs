//! Switching-flow and candidate-switching-flow certificate verification.
//!
//! All arithmetic is exact; there are no tolerance parameters anywhere.

use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::instance::{Destination, Slot, SwitchGraph, VertexId};

/// Non-negative integer counts per edge slot, stored densely in edge-index
/// order (yard, then even/odd per vertex). Houses run profiles, multi-run
/// profiles, and certificates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeFlow {
    n: u32,
    values: Vec<BigUint>,
}

impl EdgeFlow {
    pub fn zeros(n: u32) -> EdgeFlow {
        EdgeFlow {
            n,
            values: vec![BigUint::zero(); 2 * n as usize + 1],
        }
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn slot_count(&self) -> usize {
        self.values.len()
    }

    pub fn get(&self, edge: u32) -> &BigUint {
        &self.values[edge as usize]
    }

    pub fn set(&mut self, edge: u32, value: BigUint) {
        self.values[edge as usize] = value;
    }

    pub fn add(&mut self, edge: u32, amount: &BigUint) {
        self.values[edge as usize] += amount;
    }

    pub fn yard(&self) -> &BigUint {
        &self.values[0]
    }

    pub fn even(&self, v: u32) -> &BigUint {
        &self.values[1 + 2 * v as usize]
    }

    pub fn odd(&self, v: u32) -> &BigUint {
        &self.values[2 + 2 * v as usize]
    }

    /// Sum over the outgoing edge slots of `v`.
    pub fn outflow(&self, v: VertexId) -> BigUint {
        match v {
            VertexId::Yard => self.yard().clone(),
            VertexId::Proper(i) => self.even(i) + self.odd(i),
            VertexId::Dest(_) => BigUint::zero(),
        }
    }

    /// Sum over the incoming edge slots of `v`, read off the reverse adjacency.
    pub fn inflow(&self, graph: &SwitchGraph, v: VertexId) -> BigUint {
        graph.incoming(v).iter().map(|&e| self.get(e)).sum()
    }

    /// Sum of all slot values.
    pub fn total(&self) -> BigUint {
        self.values.iter().sum()
    }

    /// Total over proper edges only (everything except the yard edge).
    pub fn proper_total(&self) -> BigUint {
        self.values[1..].iter().sum()
    }

    /// Componentwise partial order.
    pub fn leq(&self, other: &EdgeFlow) -> bool {
        assert_eq!(
            self.slot_count(),
            other.slot_count(),
            "flows must share a slot set"
        );
        self.values
            .iter()
            .zip(other.values.iter())
            .all(|(a, b)| a <= b)
    }
}

/// First violated constraint found while checking a flow, with the vertex
/// it was found at.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FlowViolation {
    #[error("flow has {actual} slots, instance has {expected}")]
    SlotCount { expected: usize, actual: usize },
    #[error("yard outflow is {actual}, must be 1")]
    YardOutflow { actual: BigUint },
    #[error("conservation violated at vertex {vertex}: outflow {outflow} != inflow {inflow}")]
    Conservation {
        vertex: u32,
        outflow: BigUint,
        inflow: BigUint,
    },
    #[error("prescribed outflow violated at vertex {vertex}: got {actual}, want {expected}")]
    PrescribedOutflow {
        vertex: u32,
        expected: BigUint,
        actual: BigUint,
    },
    #[error("switching behavior violated at vertex {vertex}: even {even}, odd {odd}")]
    Switching {
        vertex: u32,
        even: BigUint,
        odd: BigUint,
    },
}

/// Verdict of [`check_switching_flow`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FlowVerdict {
    ValidTo(Destination),
    Invalid(FlowViolation),
}

impl FlowVerdict {
    pub fn destination(&self) -> Option<Destination> {
        match self {
            FlowVerdict::ValidTo(d) => Some(*d),
            FlowVerdict::Invalid(_) => None,
        }
    }
}

impl fmt::Display for FlowVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FlowVerdict::ValidTo(d) => write!(f, "valid switching flow to {d}"),
            FlowVerdict::Invalid(v) => write!(f, "invalid: {v}"),
        }
    }
}

/// Verdict of [`check_candidate_flow`]. Candidate flows carry no destination
/// label; conservation is simply dropped on `S`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CandidateVerdict {
    Valid,
    Invalid(FlowViolation),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FlowError {
    #[error("set has {set} vertices but {weights} weights were given")]
    DimensionMismatch { set: usize, weights: usize },
    #[error("set vertex {vertex} is not a proper vertex (n = {n})")]
    SetVertexOutOfRange { vertex: u32, n: u32 },
    #[error("set vertex {vertex} appears twice")]
    DuplicateSetVertex { vertex: u32 },
}

/// Validates a multi-run vertex set: proper vertices only, no duplicates,
/// one weight per vertex.
pub fn validate_set(n: u32, set: &[u32], weights_len: usize) -> Result<(), FlowError> {
    if set.len() != weights_len {
        return Err(FlowError::DimensionMismatch {
            set: set.len(),
            weights: weights_len,
        });
    }
    let mut seen = vec![false; n as usize];
    for &v in set {
        if v >= n {
            return Err(FlowError::SetVertexOutOfRange { vertex: v, n });
        }
        if seen[v as usize] {
            return Err(FlowError::DuplicateSetVertex { vertex: v });
        }
        seen[v as usize] = true;
    }
    Ok(())
}

/// Checks the switching-flow conditions: unit yard outflow, conservation at
/// every proper vertex, and even/odd difference in `{0, 1}`. When valid, the
/// destination is the one absorbing the flow unit; conservation guarantees
/// exactly one does.
pub fn check_switching_flow(graph: &SwitchGraph, x: &EdgeFlow) -> FlowVerdict {
    if x.slot_count() != graph.edge_count() {
        return FlowVerdict::Invalid(FlowViolation::SlotCount {
            expected: graph.edge_count(),
            actual: x.slot_count(),
        });
    }
    if !x.yard().is_one() {
        return FlowVerdict::Invalid(FlowViolation::YardOutflow {
            actual: x.yard().clone(),
        });
    }
    for v in 0..graph.n() {
        let outflow = x.outflow(VertexId::Proper(v));
        let inflow = x.inflow(graph, VertexId::Proper(v));
        if outflow != inflow {
            return FlowVerdict::Invalid(FlowViolation::Conservation {
                vertex: v,
                outflow,
                inflow,
            });
        }
    }
    if let Some(violation) = first_switching_violation(graph.n(), x) {
        return FlowVerdict::Invalid(violation);
    }
    let to_d = x.inflow(graph, VertexId::Dest(Destination::D));
    debug_assert!(
        (to_d.is_one()) != (x.inflow(graph, VertexId::Dest(Destination::Dbar)).is_one()),
        "conservation must route the flow unit to exactly one destination"
    );
    if to_d.is_one() {
        FlowVerdict::ValidTo(Destination::D)
    } else {
        FlowVerdict::ValidTo(Destination::Dbar)
    }
}

/// Checks the candidate-switching-flow conditions for `(S, w)`: unit yard
/// outflow, conservation off `S`, prescribed outflows on `S`, switching
/// behavior everywhere.
pub fn check_candidate_flow(
    graph: &SwitchGraph,
    set: &[u32],
    weights: &[BigUint],
    x: &EdgeFlow,
) -> Result<CandidateVerdict, FlowError> {
    if set.len() != weights.len() {
        return Err(FlowError::DimensionMismatch {
            set: set.len(),
            weights: weights.len(),
        });
    }
    let mut in_set = vec![None; graph.n() as usize];
    for (i, &v) in set.iter().enumerate() {
        if v >= graph.n() {
            return Err(FlowError::SetVertexOutOfRange {
                vertex: v,
                n: graph.n(),
            });
        }
        if in_set[v as usize].is_some() {
            return Err(FlowError::DuplicateSetVertex { vertex: v });
        }
        in_set[v as usize] = Some(i);
    }

    if x.slot_count() != graph.edge_count() {
        return Ok(CandidateVerdict::Invalid(FlowViolation::SlotCount {
            expected: graph.edge_count(),
            actual: x.slot_count(),
        }));
    }
    if !x.yard().is_one() {
        return Ok(CandidateVerdict::Invalid(FlowViolation::YardOutflow {
            actual: x.yard().clone(),
        }));
    }
    for v in 0..graph.n() {
        if in_set[v as usize].is_some() {
            continue;
        }
        let outflow = x.outflow(VertexId::Proper(v));
        let inflow = x.inflow(graph, VertexId::Proper(v));
        if outflow != inflow {
            return Ok(CandidateVerdict::Invalid(FlowViolation::Conservation {
                vertex: v,
                outflow,
                inflow,
            }));
        }
    }
    for (i, &v) in set.iter().enumerate() {
        let outflow = x.outflow(VertexId::Proper(v));
        if outflow != weights[i] {
            return Ok(CandidateVerdict::Invalid(
                FlowViolation::PrescribedOutflow {
                    vertex: v,
                    expected: weights[i].clone(),
                    actual: outflow,
                },
            ));
        }
    }
    if let Some(violation) = first_switching_violation(graph.n(), x) {
        return Ok(CandidateVerdict::Invalid(violation));
    }
    Ok(CandidateVerdict::Valid)
}

fn first_switching_violation(n: u32, x: &EdgeFlow) -> Option<FlowViolation> {
    for v in 0..n {
        let even = x.even(v);
        let odd = x.odd(v);
        let ok = even >= odd && (even - odd) <= BigUint::one();
        if !ok {
            return Some(FlowViolation::Switching {
                vertex: v,
                even: even.clone(),
                odd: odd.clone(),
            });
        }
    }
    None
}

/// Componentwise `x <= x'`.
pub fn flow_leq(x: &EdgeFlow, y: &EdgeFlow) -> bool {
    x.leq(y)
}

/// Total flow: the sum of all slot values.
pub fn flow_total(x: &EdgeFlow) -> BigUint {
    x.total()
}

/// Marks the slot kind for display/export purposes.
pub fn slot_of(graph: &SwitchGraph, e: u32) -> Slot {
    graph.edge_slot(e)
}
