//! Instance generators. Every family is deterministic in `(family, n, seed)`
//! and only emits terminating instances.

use std::fmt;
use std::str::FromStr;

use crate::instance::{ArrivalInstance, Destination, VertexId};
use crate::rng::SplitMix64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    /// Uniform successor draws, resampled until terminating.
    RandomTerminating,
    /// Single-vertex layers at every distance; the run revisits the top
    /// vertex so often that the traversal bound is met with equality.
    LayeredChain,
    /// Chained two-vertex stages halving the train flow per stage; run
    /// length grows exponentially in `n` (measured, not proven).
    LongRunCounter,
    /// Disjoint planted 2-cycles, one per vertex pair; minimum feedback
    /// vertex set size is exactly the number of cycles.
    TwoCycleGrid,
}

impl Family {
    pub fn name(&self) -> &'static str {
        match self {
            Family::RandomTerminating => "random-terminating",
            Family::LayeredChain => "layered-chain",
            Family::LongRunCounter => "long-run-counter",
            Family::TwoCycleGrid => "two-cycle-grid",
        }
    }

    pub const ALL: [Family; 4] = [
        Family::RandomTerminating,
        Family::LayeredChain,
        Family::LongRunCounter,
        Family::TwoCycleGrid,
    ];
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = String;

    fn from_str(s: &str) -> Result<Family, String> {
        Family::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| format!("unknown family {s:?}"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GeneratorSpec {
    pub family: Family,
    pub n: u32,
    pub seed: u64,
}

/// Generates an instance; deterministic in the spec. The seed only matters
/// for `RandomTerminating`; the constructed families ignore it.
pub fn generate(spec: &GeneratorSpec) -> ArrivalInstance {
    assert!(spec.n >= 1, "generators require n >= 1");
    match spec.family {
        Family::RandomTerminating => random_terminating(spec.n, spec.seed),
        Family::LayeredChain => layered_chain(spec.n),
        Family::LongRunCounter => long_run_counter(spec.n),
        Family::TwoCycleGrid => two_cycle_grid(spec.n),
    }
}

fn random_vertex(rng: &mut SplitMix64, n: u32) -> VertexId {
    match rng.next_below(n as u64 + 2) {
        x if x < n as u64 => VertexId::Proper(x as u32),
        x if x == n as u64 => VertexId::Dest(Destination::D),
        _ => VertexId::Dest(Destination::Dbar),
    }
}

fn random_terminating(n: u32, seed: u64) -> ArrivalInstance {
    let mut rng = SplitMix64::new(seed);
    loop {
        let origin = rng.next_below(n as u64) as u32;
        let succ_even = (0..n).map(|_| random_vertex(&mut rng, n)).collect();
        let succ_odd = (0..n).map(|_| random_vertex(&mut rng, n)).collect();
        let inst = ArrivalInstance::new(n, origin, succ_even, succ_odd)
            .expect("generated successors are in range");
        if inst.is_terminating() {
            return inst;
        }
    }
}

/// Vertex `i` sits at distance `i + 1`. The top vertex loops on its even
/// slot and feeds the next vertex down on its odd slot; everything below
/// points back up at the top on its even slot. Started at the top, vertex
/// `i` is visited exactly `2^(i+1)` times and the total proper traversal
/// count meets `(n - l + 2) * 2^l - 2` exactly.
fn layered_chain(n: u32) -> ArrivalInstance {
    let top = n - 1;
    let mut succ_even = Vec::with_capacity(n as usize);
    let mut succ_odd = Vec::with_capacity(n as usize);
    for v in 0..n {
        // Even slot points at the top (a self-loop there); odd slot steps down.
        succ_even.push(VertexId::Proper(top));
        succ_odd.push(if v == 0 {
            VertexId::Dest(Destination::D)
        } else {
            VertexId::Proper(v - 1)
        });
    }
    ArrivalInstance::new(n, top, succ_even, succ_odd).expect("chain construction is valid")
}

/// Stages of two vertices `(u_i, w_i)`: `u_i` alternates between churning
/// into `w_i` and forwarding to the next stage; `w_i` returns everything to
/// the entry vertex. Each stage roughly halves the number of forwarded
/// passes, so the run makes on the order of `2^(n/2)` traversals.
fn long_run_counter(n: u32) -> ArrivalInstance {
    if n == 1 {
        return layered_chain(1);
    }
    let stages = n / 2;
    let head = (n % 2 == 1).then_some(n - 1);
    let entry = 0u32; // u_0
    let mut succ_even = vec![VertexId::Dest(Destination::D); n as usize];
    let mut succ_odd = vec![VertexId::Dest(Destination::D); n as usize];
    for i in 0..stages {
        let u = 2 * i;
        let w = 2 * i + 1;
        let forward = if i + 1 < stages {
            VertexId::Proper(2 * (i + 1))
        } else {
            VertexId::Dest(Destination::D)
        };
        succ_even[u as usize] = VertexId::Proper(w);
        succ_odd[u as usize] = forward;
        succ_even[w as usize] = VertexId::Proper(entry);
        succ_odd[w as usize] = VertexId::Proper(entry);
    }
    if let Some(h) = head {
        succ_even[h as usize] = VertexId::Proper(entry);
        succ_odd[h as usize] = VertexId::Proper(entry);
    }
    let origin = head.unwrap_or(entry);
    ArrivalInstance::new(n, origin, succ_even, succ_odd).expect("counter construction is valid")
}

/// `floor(n/2)` disjoint 2-cycles `(2i, 2i+1)`; odd slots exit forward to
/// the next pair or to a destination, so the only cycles are the planted
/// ones. An odd trailing vertex goes straight to the destinations.
fn two_cycle_grid(n: u32) -> ArrivalInstance {
    let pairs = n / 2;
    let mut succ_even = vec![VertexId::Dest(Destination::D); n as usize];
    let mut succ_odd = vec![VertexId::Dest(Destination::Dbar); n as usize];
    for i in 0..pairs {
        let a = 2 * i;
        let b = 2 * i + 1;
        succ_even[a as usize] = VertexId::Proper(b);
        succ_even[b as usize] = VertexId::Proper(a);
        succ_odd[a as usize] = if i + 1 < pairs {
            VertexId::Proper(2 * (i + 1))
        } else {
            VertexId::Dest(Destination::D)
        };
        succ_odd[b as usize] = VertexId::Dest(Destination::Dbar);
    }
    ArrivalInstance::new(n, 0, succ_even, succ_odd).expect("grid construction is valid")
}
