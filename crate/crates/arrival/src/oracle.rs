//! Brute-force oracles for tests. These re-derive results by enumeration,
//! with their own constraint logic, so they stay independent of the solver
//! and checker paths they judge. They are test utilities, not solvers.

use num_bigint::BigUint;

use crate::flows::EdgeFlow;
use crate::instance::{ArrivalInstance, Destination, VertexId};

/// Enumerates every switching flow whose slot values are at most `bound`,
/// as `(flow, destination)` pairs.
///
/// Candidates are generated per vertex as `(even, odd)` value pairs already
/// obeying switching behavior and with the yard slot pinned to 1 (flows
/// breaking either are never switching flows); conservation is then checked
/// against inflows accumulated from the successor maps directly.
pub fn enumerate_switching_flows(
    instance: &ArrivalInstance,
    bound: u64,
) -> Vec<(EdgeFlow, Destination)> {
    enumerate_flows(instance, &[], &[], bound)
        .into_iter()
        .map(|(flow, at_d, at_dbar)| {
            debug_assert_eq!(at_d + at_dbar, 1, "conservation must route the yard unit");
            let dest = if at_d == 1 {
                Destination::D
            } else {
                Destination::Dbar
            };
            (flow, dest)
        })
        .collect()
}

/// Enumerates every candidate switching flow for `(S, w)`: conservation is
/// dropped on `S` and the outflow there prescribed by `w`. The box `bound`
/// applies to the free slots; on `S` the split is forced by `w` anyway.
pub fn enumerate_candidate_flows(
    instance: &ArrivalInstance,
    set: &[u32],
    weights: &[u64],
    bound: u64,
) -> Vec<EdgeFlow> {
    enumerate_flows(instance, set, weights, bound)
        .into_iter()
        .map(|(flow, _, _)| flow)
        .collect()
}

/// Shared enumeration core: per-vertex `(even, odd)` pairs with switching
/// behavior built in; vertices of `S` are forced to the unique pair summing
/// to their prescribed outflow. Returns each flow with its destination
/// inflows.
fn enumerate_flows(
    instance: &ArrivalInstance,
    set: &[u32],
    weights: &[u64],
    bound: u64,
) -> Vec<(EdgeFlow, u64, u64)> {
    let n = instance.n() as usize;
    assert!(n <= 16, "exhaustive flow enumeration is for tiny instances");
    assert_eq!(set.len(), weights.len());

    let mut free_pairs: Vec<(u64, u64)> = Vec::new();
    for e in 0..=bound {
        free_pairs.push((e, e));
        if e > 0 {
            free_pairs.push((e, e - 1));
        }
    }
    // Switching behavior and a prescribed outflow sum leave exactly one
    // split: the even slot takes the larger half.
    let mut options: Vec<Vec<(u64, u64)>> = vec![free_pairs; n];
    let mut conserved = vec![true; n];
    for (i, &v) in set.iter().enumerate() {
        let w = weights[i];
        options[v as usize] = vec![(w.div_ceil(2), w / 2)];
        conserved[v as usize] = false;
    }

    // Index of the last vertex feeding v; conservation at v is checkable
    // once every vertex up to that index has an assigned pair.
    let mut ready_at: Vec<usize> = (0..n).collect();
    for u in 0..n as u32 {
        for succ in [instance.succ_even(u), instance.succ_odd(u)] {
            if let VertexId::Proper(v) = succ {
                ready_at[v as usize] = ready_at[v as usize].max(u as usize);
            }
        }
    }
    let mut check_after: Vec<Vec<usize>> = vec![Vec::new(); n];
    for v in 0..n {
        if conserved[v] {
            check_after[ready_at[v]].push(v);
        }
    }

    let mut search = Search {
        instance,
        options: &options,
        check_after: &check_after,
        inflow: vec![0u64; n + 2],
        chosen: vec![0usize; n],
        found: Vec::new(),
    };
    search.inflow[instance.origin() as usize] += 1; // the yard edge
    search.dfs(0);
    search.found
}

struct Search<'a> {
    instance: &'a ArrivalInstance,
    options: &'a [Vec<(u64, u64)>],
    check_after: &'a [Vec<usize>],
    inflow: Vec<u64>,
    chosen: Vec<usize>,
    found: Vec<(EdgeFlow, u64, u64)>,
}

impl Search<'_> {
    fn dfs(&mut self, depth: usize) {
        let n = self.instance.n() as usize;
        if depth == n {
            let mut flow = EdgeFlow::zeros(self.instance.n());
            flow.set(0, BigUint::from(1u32));
            for (v, &p) in self.chosen.iter().enumerate() {
                let (e, o) = self.options[v][p];
                flow.set(1 + 2 * v as u32, BigUint::from(e));
                flow.set(2 + 2 * v as u32, BigUint::from(o));
            }
            self.found.push((flow, self.inflow[n], self.inflow[n + 1]));
            return;
        }

        let even_to = self.slot_index(self.instance.succ_even(depth as u32));
        let odd_to = self.slot_index(self.instance.succ_odd(depth as u32));
        'pairs: for p in 0..self.options[depth].len() {
            let (e, o) = self.options[depth][p];
            self.chosen[depth] = p;
            self.inflow[even_to] += e;
            self.inflow[odd_to] += o;
            for &v in &self.check_after[depth] {
                let (ve, vo) = self.options[v][self.chosen[v]];
                if self.inflow[v] != ve + vo {
                    self.inflow[even_to] -= e;
                    self.inflow[odd_to] -= o;
                    continue 'pairs;
                }
            }
            self.dfs(depth + 1);
            self.inflow[even_to] -= e;
            self.inflow[odd_to] -= o;
        }
    }

    fn slot_index(&self, succ: VertexId) -> usize {
        let n = self.instance.n() as usize;
        match succ {
            VertexId::Proper(v) => v as usize,
            VertexId::Dest(Destination::D) => n,
            VertexId::Dest(Destination::Dbar) => n + 1,
            VertexId::Yard => unreachable!("the yard is never a successor"),
        }
    }
}

/// Minimum feedback vertex set by subset enumeration, smallest subsets
/// first, with an independent DFS cycle check.
pub fn min_fvs_brute_force(instance: &ArrivalInstance) -> Vec<u32> {
    let n = instance.n();
    assert!(n <= 16, "subset enumeration is for tiny instances");
    let mut masks: Vec<u32> = (0..1u32 << n).collect();
    masks.sort_by_key(|m| (m.count_ones(), *m));
    for mask in masks {
        let subset: Vec<u32> = (0..n).filter(|v| mask & (1 << v) != 0).collect();
        if is_acyclic_without(instance, &subset) {
            return subset;
        }
    }
    unreachable!("removing all vertices always leaves an acyclic graph");
}

fn is_acyclic_without(instance: &ArrivalInstance, deleted: &[u32]) -> bool {
    let n = instance.n() as usize;
    let mut removed = vec![false; n];
    for &v in deleted {
        removed[v as usize] = true;
    }
    // Three-color DFS over the induced subgraph.
    let mut color = vec![0u8; n]; // 0 white, 1 gray, 2 black
    for start in 0..n {
        if removed[start] || color[start] != 0 {
            continue;
        }
        let mut stack: Vec<(u32, u8)> = vec![(start as u32, 0)];
        while let Some((v, stage)) = stack.pop() {
            if stage == 0 {
                if color[v as usize] != 0 {
                    continue;
                }
                color[v as usize] = 1;
                stack.push((v, 1));
                for succ in [instance.succ_even(v), instance.succ_odd(v)] {
                    if let VertexId::Proper(h) = succ {
                        if removed[h as usize] {
                            continue;
                        }
                        match color[h as usize] {
                            0 => stack.push((h, 0)),
                            1 => return false, // back edge
                            _ => {}
                        }
                    }
                }
            } else {
                color[v as usize] = 2;
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flows::flow_leq;
    use crate::simulate::{multi_run, run_procedure, Scheduler};
    use crate::testkit::{big, instance_i2};

    #[test]
    fn i2_flows_within_box_four_all_go_to_dbar() {
        let inst = instance_i2();
        let flows = enumerate_switching_flows(&inst, 4);
        assert!(!flows.is_empty());
        for (_, dest) in &flows {
            assert_eq!(*dest, Destination::Dbar);
        }
    }

    #[test]
    fn i2_run_profile_is_minimal_among_enumerated_flows() {
        let inst = instance_i2();
        let run = run_procedure(&inst, None).unwrap();
        for (flow, _) in enumerate_switching_flows(&inst, 4) {
            assert!(flow_leq(&run.profile, &flow));
        }
    }

    #[test]
    fn i2_multi_run_profile_is_minimal_among_candidate_flows() {
        let inst = instance_i2();
        let out = multi_run(&inst, &[1], &[big(1)], &Scheduler::Greedy).unwrap();
        let candidates = enumerate_candidate_flows(&inst, &[1], &[1], 4);
        assert!(candidates.contains(&out.profile));
        for candidate in &candidates {
            assert!(flow_leq(&out.profile, candidate));
        }
    }

    #[test]
    fn brute_force_fvs_matches_known_cases() {
        assert_eq!(min_fvs_brute_force(&instance_i2()), vec![0]);
        let acyclic = crate::testkit::chain_down(4);
        assert_eq!(min_fvs_brute_force(&acyclic), Vec::<u32>::new());
    }
}
