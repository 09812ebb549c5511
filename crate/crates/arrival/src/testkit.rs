//! Shared fixtures for unit tests.

use num_bigint::BigUint;

use crate::instance::{ArrivalInstance, Destination, VertexId};

pub fn big(x: u64) -> BigUint {
    BigUint::from(x)
}

pub fn bigs(xs: &[u64]) -> Vec<BigUint> {
    xs.iter().map(|&x| big(x)).collect()
}

/// The two-vertex instance used throughout: `a = 0` is the origin with
/// even successor `b = 1` and odd successor d̄; `b` has even successor `a`
/// and odd successor d. The run goes a, b, a, d̄.
pub fn instance_i2() -> ArrivalInstance {
    ArrivalInstance::new(
        2,
        0,
        vec![VertexId::Proper(1), VertexId::Proper(0)],
        vec![
            VertexId::Dest(Destination::Dbar),
            VertexId::Dest(Destination::D),
        ],
    )
    .unwrap()
}

/// One vertex per entry, each pointing straight at the given destinations.
pub fn tiny(succs: &[(Destination, Destination)]) -> ArrivalInstance {
    let n = succs.len() as u32;
    ArrivalInstance::new(
        n,
        0,
        succs.iter().map(|(e, _)| VertexId::Dest(*e)).collect(),
        succs.iter().map(|(_, o)| VertexId::Dest(*o)).collect(),
    )
    .unwrap()
}

/// A path: both slots of vertex `i` point at `i - 1`, vertex 0 at d; the
/// origin is the far end.
pub fn chain_down(n: u32) -> ArrivalInstance {
    let succ: Vec<VertexId> = (0..n)
        .map(|v| {
            if v == 0 {
                VertexId::Dest(Destination::D)
            } else {
                VertexId::Proper(v - 1)
            }
        })
        .collect();
    ArrivalInstance::new(n, n - 1, succ.clone(), succ).unwrap()
}
