//! A workbench for the switch-graph train-run decision problem: given a
//! directed graph where every vertex alternates between two successors, does
//! the deterministic run from the origin end at destination `D0` or `D1`?
//!
//! The crate provides:
//!
//! - the instance model and switch graph ([`instance`]), with a line-oriented
//!   file format and CSV flow/trace formats ([`mod@format`]);
//! - the run procedure and the multi-train generalization with pluggable
//!   dispatch strategies ([`simulate`]);
//! - switching-flow certificates and their exact verification ([`flows`]);
//! - distance layering, φ-sets, and feedback vertex sets ([`decompose`]);
//! - monotone fixed-point search on the capped inflow lattice ([`tarski`]);
//! - the three deciders and a cross-checking harness ([`solver`]);
//! - deterministic instance generators ([`generate`]) and a corpus
//!   benchmarking harness ([`mod@bench`]).
//!
//! All train counts and flow values are arbitrary-precision integers, since
//! visit counts can reach `2^n`. Verification is exact; nothing in the crate
//! has a tolerance parameter.

pub mod bench;
pub mod decompose;
pub mod flows;
pub mod format;
pub mod generate;
pub mod instance;
pub mod oracle;
pub mod rng;
pub mod simulate;
pub mod solver;
pub mod tarski;

#[cfg(test)]
pub(crate) mod testkit;

pub use decompose::{LayerDecomposition, PhiSet, Ratio};
pub use flows::{EdgeFlow, FlowVerdict};
pub use instance::{ArrivalInstance, Destination, Slot, SwitchGraph, VertexId};
pub use simulate::{MultiRunOutcome, RunOutcome, Scheduler};
pub use solver::{Decision, Method};
pub use tarski::{FixedPointMethod, TarskiProblem};
