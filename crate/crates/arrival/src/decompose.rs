//! Distance layering, φ-set construction, and feedback vertex sets.

use std::collections::VecDeque;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::One;
use thiserror::Error;

use crate::instance::{ArrivalInstance, Destination, SwitchGraph, VertexId};

/// An exact rational in lowest terms. φ comparisons are done by integer
/// cross-multiplication so the layer-accumulator reset has no floating-point
/// boundary cases.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Ratio {
    num: u64,
    den: u64,
}

/// Numerator/denominator limit for parsed ratios; keeps the exact radius
/// certificate comparison cheap.
const RATIO_LIMIT: u64 = 1_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RatioError {
    #[error("cannot parse {0:?} as a ratio (use p/q or a decimal)")]
    Invalid(String),
    #[error("ratio denominator must be positive")]
    ZeroDenominator,
    #[error("ratio numerator and denominator must be at most {RATIO_LIMIT}")]
    TooLarge,
}

impl Ratio {
    pub fn new(num: u64, den: u64) -> Result<Ratio, RatioError> {
        if den == 0 {
            return Err(RatioError::ZeroDenominator);
        }
        let (num, den) = if num == 0 {
            (0, 1)
        } else {
            let g = gcd(num, den);
            (num / g, den / g)
        };
        if num > RATIO_LIMIT || den > RATIO_LIMIT {
            return Err(RatioError::TooLarge);
        }
        Ok(Ratio { num, den })
    }

    pub fn num(&self) -> u64 {
        self.num
    }

    pub fn den(&self) -> u64 {
        self.den
    }

    pub fn is_proper_fraction(&self) -> bool {
        self.num > 0 && self.num < self.den
    }

    /// Exact test for `a < self * b`.
    pub fn gt_scaled(&self, a: u64, b: u64) -> bool {
        (a as u128) * (self.den as u128) < (self.num as u128) * (b as u128)
    }

    /// Exact test for `a <= self * b`.
    pub fn ge_scaled(&self, a: u64, b: u64) -> bool {
        (a as u128) * (self.den as u128) <= (self.num as u128) * (b as u128)
    }

    pub fn to_f64(&self) -> f64 {
        self.num as f64 / self.den as f64
    }
}

impl fmt::Display for Ratio {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == 1 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

impl FromStr for Ratio {
    type Err = RatioError;

    fn from_str(s: &str) -> Result<Ratio, RatioError> {
        let s = s.trim();
        if let Some((p, q)) = s.split_once('/') {
            let num = p
                .trim()
                .parse::<u64>()
                .map_err(|_| RatioError::Invalid(s.into()))?;
            let den = q
                .trim()
                .parse::<u64>()
                .map_err(|_| RatioError::Invalid(s.into()))?;
            return Ratio::new(num, den);
        }
        if let Some((int, frac)) = s.split_once('.') {
            if frac.is_empty() || frac.len() > 6 || !frac.bytes().all(|b| b.is_ascii_digit()) {
                return Err(RatioError::Invalid(s.into()));
            }
            let int: u64 = if int.is_empty() {
                0
            } else {
                int.parse().map_err(|_| RatioError::Invalid(s.into()))?
            };
            let den = 10u64.pow(frac.len() as u32);
            let frac: u64 = frac.parse().map_err(|_| RatioError::Invalid(s.into()))?;
            let num = int
                .checked_mul(den)
                .and_then(|v| v.checked_add(frac))
                .ok_or(RatioError::TooLarge)?;
            return Ratio::new(num, den);
        }
        let num = s
            .parse::<u64>()
            .map_err(|_| RatioError::Invalid(s.into()))?;
        Ratio::new(num, 1)
    }
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DecomposeError {
    #[error("instance is not terminating: vertex {vertex} cannot reach a destination")]
    NotTerminating { vertex: u32 },
    #[error("phi must satisfy 0 < phi < 1, got {phi}")]
    PhiOutOfRange { phi: Ratio },
}

/// Distance-to-destination layers of the switch graph. `L_0` holds the two
/// destinations, `L_i` the vertices at shortest directed distance `i` from
/// them; for terminating instances the layers partition `V ∪ {d, d̄}`.
#[derive(Debug, Clone)]
pub struct LayerDecomposition {
    layers: Vec<Vec<VertexId>>,
    dist: Vec<u32>,
}

impl LayerDecomposition {
    /// Shortest directed distance from a proper vertex to a destination.
    pub fn dist(&self, v: u32) -> u32 {
        self.dist[v as usize]
    }

    pub fn layers(&self) -> &[Vec<VertexId>] {
        &self.layers
    }

    /// The maximum distance over proper vertices.
    pub fn ell(&self) -> u32 {
        self.layers.len() as u32 - 1
    }
}

/// BFS over reverse edges from `{d, d̄}`.
pub fn layer_decomposition(
    instance: &ArrivalInstance,
) -> Result<LayerDecomposition, DecomposeError> {
    let graph = SwitchGraph::new(instance);
    layer_decomposition_on(&graph)
}

pub fn layer_decomposition_on(graph: &SwitchGraph) -> Result<LayerDecomposition, DecomposeError> {
    let dist = distances_to_set(graph, &[])?;
    let ell = dist.iter().copied().max().unwrap_or(0);
    let mut layers = vec![Vec::new(); ell as usize + 1];
    layers[0] = vec![
        VertexId::Dest(Destination::D),
        VertexId::Dest(Destination::Dbar),
    ];
    for v in 0..graph.n() {
        layers[dist[v as usize] as usize].push(VertexId::Proper(v));
    }
    Ok(LayerDecomposition { layers, dist })
}

/// Multi-source BFS over reverse edges from `set ∪ {d, d̄}`: the shortest
/// directed distance from each proper vertex to that set (0 on the set
/// itself). Errors if some vertex cannot reach it, which for an empty set
/// means the instance is not terminating.
pub fn distances_to_set(graph: &SwitchGraph, set: &[u32]) -> Result<Vec<u32>, DecomposeError> {
    let n = graph.n();
    let mut dist = vec![u32::MAX; n as usize + 2];
    let mut queue = VecDeque::new();
    let didx = graph.vertex_index(VertexId::Dest(Destination::D));
    let dbaridx = graph.vertex_index(VertexId::Dest(Destination::Dbar));
    dist[didx] = 0;
    dist[dbaridx] = 0;
    queue.push_back(VertexId::Dest(Destination::D));
    queue.push_back(VertexId::Dest(Destination::Dbar));
    for &v in set {
        if dist[v as usize] == u32::MAX {
            dist[v as usize] = 0;
            queue.push_back(VertexId::Proper(v));
        }
    }
    while let Some(v) = queue.pop_front() {
        let d = dist[graph.vertex_index(v)];
        for &e in graph.incoming(v) {
            if let VertexId::Proper(tail) = graph.edge_tail(e) {
                if dist[tail as usize] == u32::MAX {
                    dist[tail as usize] = d + 1;
                    queue.push_back(VertexId::Proper(tail));
                }
            }
        }
    }
    for v in 0..n {
        if dist[v as usize] == u32::MAX {
            return Err(DecomposeError::NotTerminating { vertex: v });
        }
    }
    dist.truncate(n as usize);
    Ok(dist)
}

/// The maximum distance from a vertex of `V \ S` to `S ∪ {d, d̄}`, the `ell`
/// of the multi-run traversal and iteration bounds.
pub fn ell_to_set(graph: &SwitchGraph, set: &[u32]) -> Result<u32, DecomposeError> {
    let dist = distances_to_set(graph, set)?;
    Ok(dist.iter().copied().max().unwrap_or(0))
}

/// A vertex set `S` with `|S| <= phi * (n + 2)` such that every vertex has a
/// short directed path to `S ∪ {d, d̄}`. The radius is recomputed from the
/// finished set by multi-source BFS rather than trusted from the loop.
#[derive(Debug, Clone)]
pub struct PhiSet {
    pub set: Vec<u32>,
    pub phi: Ratio,
    pub certified_radius: u32,
}

impl PhiSet {
    /// Exact check of `|S| <= phi * (n + 2)`.
    pub fn size_within_bound(&self, n: u32) -> bool {
        self.phi.ge_scaled(self.set.len() as u64, n as u64 + 2)
    }

    /// Exact check of `certified_radius <= log2(n + 2) / phi`.
    pub fn radius_within_bound(&self, n: u32) -> bool {
        radius_within_bound(self.certified_radius, n, &self.phi)
    }
}

/// Exact test for `r <= log2(n + 2) / phi`, i.e. `2^(r * num) <= (n + 2)^den`.
/// Integer log bounds settle all but a narrow band, which falls back to
/// explicit big-integer powers.
pub fn radius_within_bound(radius: u32, n: u32, phi: &Ratio) -> bool {
    let base = n as u64 + 2;
    let x = radius as u128 * phi.num() as u128;
    let y = phi.den() as u128;
    let floor_log = 63 - base.leading_zeros() as u128;
    if x <= y * floor_log {
        return true;
    }
    if base.is_power_of_two() {
        // log2 is exact; x > y * floor_log decides it.
        return false;
    }
    if x >= y * (floor_log + 1) {
        return false;
    }
    // y * floor_log < x < y * (floor_log + 1): both sides stay modest.
    let lhs = BigUint::one() << usize::try_from(x).expect("x < y * 64 fits usize");
    let rhs = BigUint::from(base).pow(phi.den() as u32);
    lhs <= rhs
}

/// Computes a φ-set by scanning the layers: a layer smaller than φ times the
/// accumulated mass since the last reset joins `S` and resets the
/// accumulator.
pub fn compute_phi_set(instance: &ArrivalInstance, phi: Ratio) -> Result<PhiSet, DecomposeError> {
    if !phi.is_proper_fraction() {
        return Err(DecomposeError::PhiOutOfRange { phi });
    }
    let graph = SwitchGraph::new(instance);
    let layers = layer_decomposition_on(&graph)?;

    let mut set: Vec<u32> = Vec::new();
    let mut accumulated = layers.layers()[0].len() as u64;
    for layer in &layers.layers()[1..] {
        if phi.gt_scaled(layer.len() as u64, accumulated) {
            set.extend(layer.iter().filter_map(|v| v.as_proper()));
            accumulated = 0;
        }
        accumulated += layer.len() as u64;
    }
    set.sort_unstable();

    let dist = distances_to_set(&graph, &set)?;
    let certified_radius = dist.iter().copied().max().unwrap_or(0);
    Ok(PhiSet {
        set,
        phi,
        certified_radius,
    })
}

/// Minimum feedback vertex set of the subgraph induced on the proper
/// vertices, if one of size at most `k_max` exists. Exact branch and bound on
/// shortest cycles; the result is re-verified acyclic by topological sort.
pub fn feedback_vertex_set(instance: &ArrivalInstance, k_max: usize) -> Option<Vec<u32>> {
    let graph = SwitchGraph::new(instance);
    feedback_vertex_set_on(&graph, k_max)
}

pub fn feedback_vertex_set_on(graph: &SwitchGraph, k_max: usize) -> Option<Vec<u32>> {
    let n = graph.n() as usize;
    let mut deleted = vec![false; n];
    let mut chosen = Vec::new();
    let mut best: Option<Vec<u32>> = None;
    branch(graph, &mut deleted, &mut chosen, &mut best, k_max);
    if let Some(set) = &best {
        let mut mask = vec![false; n];
        for &v in set {
            mask[v as usize] = true;
        }
        assert!(
            graph.induced_topological_order(&mask).is_some(),
            "feedback vertex set must leave an acyclic subgraph"
        );
    }
    best
}

fn branch(
    graph: &SwitchGraph,
    deleted: &mut [bool],
    chosen: &mut Vec<u32>,
    best: &mut Option<Vec<u32>>,
    k_max: usize,
) {
    let Some(cycle) = shortest_cycle(graph, deleted) else {
        let candidate_better = best.as_ref().is_none_or(|b| chosen.len() < b.len());
        if candidate_better {
            let mut set = chosen.clone();
            set.sort_unstable();
            *best = Some(set);
        }
        return;
    };
    let allowed = best.as_ref().map_or(k_max, |b| b.len().saturating_sub(1));
    if chosen.len() >= allowed {
        return;
    }
    for v in cycle {
        deleted[v as usize] = true;
        chosen.push(v);
        branch(graph, deleted, chosen, best, k_max);
        chosen.pop();
        deleted[v as usize] = false;
    }
}

/// Shortest directed cycle among non-deleted proper vertices, as an
/// ascending vertex list; ties break toward the lowest starting vertex.
fn shortest_cycle(graph: &SwitchGraph, deleted: &[bool]) -> Option<Vec<u32>> {
    let n = graph.n();
    let mut best: Option<Vec<u32>> = None;
    for start in 0..n {
        if deleted[start as usize] {
            continue;
        }
        // BFS from start over proper edges; find the shortest path back.
        let mut parent = vec![u32::MAX; n as usize];
        let mut depth = vec![u32::MAX; n as usize];
        let mut queue = VecDeque::new();
        depth[start as usize] = 0;
        queue.push_back(start);
        let mut closed = None;
        'bfs: while let Some(v) = queue.pop_front() {
            for e in [graph.even_edge(v), graph.odd_edge(v)] {
                if let VertexId::Proper(h) = graph.edge_head(e) {
                    if deleted[h as usize] {
                        continue;
                    }
                    if h == start {
                        closed = Some(v);
                        break 'bfs;
                    }
                    if depth[h as usize] == u32::MAX {
                        depth[h as usize] = depth[v as usize] + 1;
                        parent[h as usize] = v;
                        queue.push_back(h);
                    }
                }
            }
        }
        if let Some(mut v) = closed {
            let mut cycle = vec![start];
            while v != start {
                cycle.push(v);
                v = parent[v as usize];
            }
            cycle.sort_unstable();
            let better = best.as_ref().is_none_or(|b| cycle.len() < b.len());
            if better {
                let single = cycle.len() == 1;
                best = Some(cycle);
                if single {
                    break; // cannot beat a self-loop
                }
            }
        }
    }
    best
}
