//! Instance data model and switch-graph construction.
//!
//! An instance consists of `n` proper vertices (indices `0..n`), an origin,
//! and two total successor maps. The two destinations and the yard are
//! sentinels, never indices, so successor arrays cannot alias them.

use std::fmt;

use thiserror::Error;

/// One of the two absorbing destinations. `D` serializes as `D0`, `Dbar` as `D1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Destination {
    D,
    Dbar,
}

impl Destination {
    pub fn other(self) -> Destination {
        match self {
            Destination::D => Destination::Dbar,
            Destination::Dbar => Destination::D,
        }
    }

    pub fn token(self) -> &'static str {
        match self {
            Destination::D => "D0",
            Destination::Dbar => "D1",
        }
    }
}

impl fmt::Display for Destination {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

/// A vertex of the switch graph: a proper vertex, a destination, or the yard.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum VertexId {
    Proper(u32),
    Dest(Destination),
    Yard,
}

impl VertexId {
    pub fn is_proper(self) -> bool {
        matches!(self, VertexId::Proper(_))
    }

    pub fn as_proper(self) -> Option<u32> {
        match self {
            VertexId::Proper(v) => Some(v),
            _ => None,
        }
    }
}

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VertexId::Proper(v) => write!(f, "{v}"),
            VertexId::Dest(d) => f.write_str(d.token()),
            VertexId::Yard => f.write_str("Y"),
        }
    }
}

/// Which of a vertex's outgoing edge slots an edge occupies.
///
/// The even and odd slots are distinct edges even when their heads coincide;
/// flows assign them separate counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Slot {
    Yard,
    Even,
    Odd,
}

impl Slot {
    pub fn token(self) -> &'static str {
        match self {
            Slot::Yard => "yard",
            Slot::Even => "even",
            Slot::Odd => "odd",
        }
    }
}

impl fmt::Display for Slot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum InstanceError {
    #[error("instance must have at least one vertex")]
    Empty,
    #[error("origin {origin} is not a proper vertex (n = {n})")]
    OriginOutOfRange { origin: u32, n: u32 },
    #[error("successor table has {got} entries, expected n = {n}")]
    BadArity { got: usize, n: u32 },
    #[error("vertex {vertex}: successor {target} out of range (n = {n})")]
    SuccessorOutOfRange { vertex: u32, target: u32, n: u32 },
    #[error("vertex {vertex}: the yard cannot be a successor")]
    YardSuccessor { vertex: u32 },
}

/// A validated instance: vertex count, origin, and the two successor maps.
///
/// Construction enforces every type invariant, so downstream code never
/// re-checks ranges.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArrivalInstance {
    n: u32,
    origin: u32,
    succ_even: Vec<VertexId>,
    succ_odd: Vec<VertexId>,
}

impl ArrivalInstance {
    pub fn new(
        n: u32,
        origin: u32,
        succ_even: Vec<VertexId>,
        succ_odd: Vec<VertexId>,
    ) -> Result<ArrivalInstance, InstanceError> {
        if n == 0 {
            return Err(InstanceError::Empty);
        }
        if origin >= n {
            return Err(InstanceError::OriginOutOfRange { origin, n });
        }
        for table in [&succ_even, &succ_odd] {
            if table.len() != n as usize {
                return Err(InstanceError::BadArity {
                    got: table.len(),
                    n,
                });
            }
            for (v, succ) in table.iter().enumerate() {
                match succ {
                    VertexId::Proper(t) if *t >= n => {
                        return Err(InstanceError::SuccessorOutOfRange {
                            vertex: v as u32,
                            target: *t,
                            n,
                        })
                    }
                    VertexId::Yard => {
                        return Err(InstanceError::YardSuccessor { vertex: v as u32 })
                    }
                    _ => {}
                }
            }
        }
        Ok(ArrivalInstance {
            n,
            origin,
            succ_even,
            succ_odd,
        })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn origin(&self) -> u32 {
        self.origin
    }

    pub fn succ_even(&self, v: u32) -> VertexId {
        self.succ_even[v as usize]
    }

    pub fn succ_odd(&self, v: u32) -> VertexId {
        self.succ_odd[v as usize]
    }

    pub fn vertices(&self) -> impl Iterator<Item = u32> {
        0..self.n
    }

    /// True iff every vertex can reach a destination along directed edges,
    /// so the run procedure is guaranteed to stop. One backward reachability
    /// pass from `{d, d̄}`.
    pub fn is_terminating(&self) -> bool {
        SwitchGraph::new(self).is_terminating()
    }
}

/// The switch graph `G(A)`: the yard edge plus the even and odd slot of every
/// proper vertex, with reverse adjacency.
///
/// Edges are identified by `(tail, slot)` and stored densely: index 0 is the
/// yard edge, `1 + 2v` the even slot of `v`, `2 + 2v` the odd slot.
#[derive(Debug, Clone)]
pub struct SwitchGraph {
    n: u32,
    origin: u32,
    heads: Vec<VertexId>,
    incoming: Vec<Vec<u32>>,
    terminating: bool,
}

impl SwitchGraph {
    pub fn new(instance: &ArrivalInstance) -> SwitchGraph {
        let n = instance.n();
        let edge_count = 2 * n as usize + 1;
        let mut heads = Vec::with_capacity(edge_count);
        heads.push(VertexId::Proper(instance.origin()));
        for v in instance.vertices() {
            heads.push(instance.succ_even(v));
            heads.push(instance.succ_odd(v));
        }

        let mut incoming = vec![Vec::new(); n as usize + 3];
        for (e, head) in heads.iter().enumerate() {
            incoming[vertex_index(n, *head)].push(e as u32);
        }

        let mut graph = SwitchGraph {
            n,
            origin: instance.origin(),
            heads,
            incoming,
            terminating: false,
        };
        graph.terminating = graph.compute_terminating();
        graph
    }

    fn compute_terminating(&self) -> bool {
        let mut reached = vec![false; self.n as usize + 3];
        let mut queue = Vec::new();
        for d in [
            VertexId::Dest(Destination::D),
            VertexId::Dest(Destination::Dbar),
        ] {
            reached[self.vertex_index(d)] = true;
            queue.push(d);
        }
        while let Some(v) = queue.pop() {
            for &e in &self.incoming[self.vertex_index(v)] {
                let tail = self.edge_tail(e);
                let ti = self.vertex_index(tail);
                if !reached[ti] {
                    reached[ti] = true;
                    queue.push(tail);
                }
            }
        }
        (0..self.n).all(|v| reached[v as usize])
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn origin(&self) -> u32 {
        self.origin
    }

    /// Number of edge slots, always `2n + 1`.
    pub fn edge_count(&self) -> usize {
        self.heads.len()
    }

    pub fn is_terminating(&self) -> bool {
        self.terminating
    }

    pub fn yard_edge(&self) -> u32 {
        0
    }

    pub fn even_edge(&self, v: u32) -> u32 {
        1 + 2 * v
    }

    pub fn odd_edge(&self, v: u32) -> u32 {
        2 + 2 * v
    }

    pub fn edge_head(&self, e: u32) -> VertexId {
        self.heads[e as usize]
    }

    pub fn edge_tail(&self, e: u32) -> VertexId {
        if e == 0 {
            VertexId::Yard
        } else {
            VertexId::Proper((e - 1) / 2)
        }
    }

    pub fn edge_slot(&self, e: u32) -> Slot {
        if e == 0 {
            Slot::Yard
        } else if (e - 1).is_multiple_of(2) {
            Slot::Even
        } else {
            Slot::Odd
        }
    }

    pub fn edges(&self) -> impl Iterator<Item = u32> {
        0..self.edge_count() as u32
    }

    /// Incoming edge slots of `v`.
    pub fn incoming(&self, v: VertexId) -> &[u32] {
        &self.incoming[self.vertex_index(v)]
    }

    pub fn vertex_index(&self, v: VertexId) -> usize {
        vertex_index(self.n, v)
    }

    /// All vertices of `G(A)`: proper, destinations, yard.
    pub fn all_vertices(&self) -> impl Iterator<Item = VertexId> {
        let n = self.n;
        (0..n).map(VertexId::Proper).chain([
            VertexId::Dest(Destination::D),
            VertexId::Dest(Destination::Dbar),
            VertexId::Yard,
        ])
    }

    /// Topological order of the subgraph induced on the proper vertices not
    /// in `excluded`, or `None` if that subgraph has a directed cycle.
    /// Kahn's algorithm with lowest-index tie-breaking, so the order is
    /// deterministic.
    pub fn induced_topological_order(&self, excluded: &[bool]) -> Option<Vec<u32>> {
        use std::cmp::Reverse;
        use std::collections::BinaryHeap;

        let n = self.n as usize;
        assert_eq!(excluded.len(), n);
        let mut indegree = vec![0u32; n];
        let mut live = 0usize;
        for v in 0..self.n {
            if excluded[v as usize] {
                continue;
            }
            live += 1;
            for e in [self.even_edge(v), self.odd_edge(v)] {
                if let VertexId::Proper(h) = self.edge_head(e) {
                    if !excluded[h as usize] {
                        indegree[h as usize] += 1;
                    }
                }
            }
        }
        let mut ready: BinaryHeap<Reverse<u32>> = (0..self.n)
            .filter(|&v| !excluded[v as usize] && indegree[v as usize] == 0)
            .map(Reverse)
            .collect();
        let mut order = Vec::with_capacity(live);
        while let Some(Reverse(v)) = ready.pop() {
            order.push(v);
            for e in [self.even_edge(v), self.odd_edge(v)] {
                if let VertexId::Proper(h) = self.edge_head(e) {
                    if !excluded[h as usize] {
                        indegree[h as usize] -= 1;
                        if indegree[h as usize] == 0 {
                            ready.push(Reverse(h));
                        }
                    }
                }
            }
        }
        (order.len() == live).then_some(order)
    }
}

fn vertex_index(n: u32, v: VertexId) -> usize {
    match v {
        VertexId::Proper(i) => i as usize,
        VertexId::Dest(Destination::D) => n as usize,
        VertexId::Dest(Destination::Dbar) => n as usize + 1,
        VertexId::Yard => n as usize + 2,
    }
}

/// Builds the switch graph of a validated instance.
pub fn build_switch_graph(instance: &ArrivalInstance) -> SwitchGraph {
    SwitchGraph::new(instance)
}
