//! Acceptance suite: one test per criterion, each asserting its property
//! exactly (integer arithmetic throughout, no tolerances) and printing a
//! summary line. Run with `cargo test -p arrival --test acceptance`.

use num_bigint::BigUint;
use num_traits::{One, Zero};

use arrival::decompose::{compute_phi_set, ell_to_set, layer_decomposition, Ratio};
use arrival::flows::{check_switching_flow, flow_leq, flow_total, FlowVerdict};
use arrival::generate::{generate, Family, GeneratorSpec};
use arrival::instance::{ArrivalInstance, Destination, SwitchGraph, VertexId};
use arrival::oracle::{enumerate_switching_flows, min_fvs_brute_force};
use arrival::rng::SplitMix64;
use arrival::simulate::{
    greedy_iteration_bound, multi_run, run_procedure, traversal_bound, Scheduler,
};
use arrival::solver::{decide_all, decide_fvs, decide_subexponential, SolveError};
use arrival::tarski::{
    build_capped_function, exhaustive_fixed_points, find_fixed_point,
    fixed_point_to_switching_flow, recursive_binary_eval_bound, vec_leq, FixedPointMethod,
};

const K_MAX: usize = 6;

fn big(x: u64) -> BigUint {
    BigUint::from(x)
}

/// 1000 seeded random instances with n cycling through 1..=12.
fn random_corpus() -> Vec<(String, ArrivalInstance)> {
    (0..1000)
        .map(|i| {
            let spec = GeneratorSpec {
                family: Family::RandomTerminating,
                n: (i % 12) + 1,
                seed: 1000 + i as u64,
            };
            (
                format!("random-n{}-s{}", spec.n, spec.seed),
                generate(&spec),
            )
        })
        .collect()
}

/// Every generator family at every n in 1..=12.
fn family_corpus() -> Vec<(String, ArrivalInstance)> {
    let mut corpus = Vec::new();
    for family in Family::ALL {
        for n in 1..=12 {
            let spec = GeneratorSpec { family, n, seed: 0 };
            corpus.push((format!("{family}-n{n}"), generate(&spec)));
        }
    }
    corpus
}

fn full_corpus() -> Vec<(String, ArrivalInstance)> {
    let mut corpus = random_corpus();
    corpus.extend(family_corpus());
    corpus
}

/// Criterion 1: simulation, the φ-set route, and the FVS route (k_max = 6,
/// refusals skipped) agree on every corpus instance, and every certificate
/// re-verifies independently.
#[test]
fn criterion_1_tri_method_agreement() {
    let corpus = full_corpus();
    let mut fvs_refusals = 0usize;
    for (name, inst) in &corpus {
        let report =
            decide_all(inst, K_MAX).unwrap_or_else(|e| panic!("{name}: decide_all failed: {e}"));
        let graph = SwitchGraph::new(inst);
        for decision in report.decisions() {
            assert_eq!(
                decision.destination,
                report.destination,
                "{name}: {} disagrees",
                decision.method.name()
            );
            match check_switching_flow(&graph, &decision.certificate) {
                FlowVerdict::ValidTo(d) => assert_eq!(
                    d,
                    decision.destination,
                    "{name}: certificate of {} names the wrong destination",
                    decision.method.name()
                ),
                FlowVerdict::Invalid(v) => {
                    panic!(
                        "{name}: certificate of {} invalid: {v}",
                        decision.method.name()
                    )
                }
            }
        }
        if report.fvs.is_none() {
            fvs_refusals += 1;
        }
    }
    println!(
        "criterion 1 (tri-method agreement): PASS — {} instances, zero disagreements, {} FVS refusals",
        corpus.len(),
        fvs_refusals
    );
}

/// Deterministic (instance, S, w) triples for criteria 2 and 4.
fn schedule_triples() -> Vec<(ArrivalInstance, Vec<u32>, Vec<BigUint>)> {
    let mut rng = SplitMix64::new(0x5EED);
    let mut triples = Vec::new();
    for i in 0..200u64 {
        let n = (rng.next_below(10) + 1) as u32;
        let inst = generate(&GeneratorSpec {
            family: Family::RandomTerminating,
            n,
            seed: 37 + i,
        });
        let mut set = Vec::new();
        for v in 0..n {
            if rng.next_below(3) == 0 {
                set.push(v);
            }
        }
        let weights: Vec<BigUint> = set.iter().map(|_| big(rng.next_below(9))).collect();
        triples.push((inst, set, weights));
    }
    triples
}

/// Criterion 2: the multi-run profile and arrival counts are bit-identical
/// across greedy, round-robin, single-step, topological (where V \ S is
/// acyclic), and 100 seeded random schedules.
#[test]
fn criterion_2_schedule_independence() {
    let triples = schedule_triples();
    let mut topological_runs = 0usize;
    for (idx, (inst, set, weights)) in triples.iter().enumerate() {
        let reference = multi_run(inst, set, weights, &Scheduler::Greedy).unwrap();
        let mut schedulers = vec![Scheduler::RoundRobin, Scheduler::SingleStep];
        let graph = SwitchGraph::new(inst);
        let in_set: Vec<bool> = {
            let mut mask = vec![false; inst.n() as usize];
            for &v in set {
                mask[v as usize] = true;
            }
            mask
        };
        if graph.induced_topological_order(&in_set).is_some() {
            schedulers.push(Scheduler::Topological);
            topological_runs += 1;
        }
        for seed in 0..100 {
            schedulers.push(Scheduler::Random { seed });
        }
        for scheduler in schedulers {
            let out = multi_run(inst, set, weights, &scheduler).unwrap();
            assert_eq!(
                out.profile,
                reference.profile,
                "triple {idx}: profile differs under {}",
                scheduler.name()
            );
            assert_eq!(out.arrivals_d, reference.arrivals_d, "triple {idx}");
            assert_eq!(out.arrivals_dbar, reference.arrivals_dbar, "triple {idx}");
            assert_eq!(out.inflows, reference.inflows, "triple {idx}");
        }
        // Conservation accounting while we are here.
        let total = reference.arrivals_d.clone()
            + reference.arrivals_dbar.clone()
            + reference.inflows.iter().sum::<BigUint>();
        let expected = BigUint::one() + weights.iter().sum::<BigUint>();
        assert_eq!(total, expected, "triple {idx}: train conservation");
    }
    println!(
        "criterion 2 (schedule independence): PASS — 200 triples x 103 schedules ({topological_runs} with a topological pass)"
    );
}

/// Criterion 3: per-vertex visit counts stay within 2^dist, total proper
/// traversals stay within the traversal bound, and the layered chains meet
/// the bound with equality.
#[test]
fn criterion_3_visit_and_traversal_bounds() {
    let corpus = full_corpus();
    let mut equality_witnesses = 0usize;
    for (name, inst) in &corpus {
        let layers = layer_decomposition(inst).unwrap();
        let out = run_procedure(inst, None).unwrap();
        for v in 0..inst.n() {
            let bound = big(1) << layers.dist(v);
            assert!(
                big(out.visits[v as usize]) <= bound,
                "{name}: vertex {v} visited {} times, dist {}",
                out.visits[v as usize],
                layers.dist(v)
            );
        }
        let bound = traversal_bound(inst.n(), layers.ell());
        let total = out.profile.proper_total();
        assert!(
            total <= bound,
            "{name}: {total} proper traversals exceed bound {bound}"
        );
        if total == bound {
            equality_witnesses += 1;
        }
    }
    // The chain construction is built to achieve equality at every n.
    for n in 1..=12u32 {
        let inst = generate(&GeneratorSpec {
            family: Family::LayeredChain,
            n,
            seed: 0,
        });
        let out = run_procedure(&inst, None).unwrap();
        assert_eq!(
            out.profile.proper_total(),
            traversal_bound(n, n),
            "layered-chain n={n} must meet the bound exactly"
        );
    }
    assert!(equality_witnesses >= 12);
    println!(
        "criterion 3 (visit/traversal bounds): PASS — {} instances, {} met the bound exactly",
        corpus.len(),
        equality_witnesses
    );
}

/// Criterion 4: every greedy multi-run stays within the greedy iteration
/// bound, both across the φ-set searches of criterion 1 and the triples of
/// criterion 2.
#[test]
fn criterion_4_greedy_iteration_bound() {
    let mut checked = 0u64;
    for (name, inst) in &full_corpus() {
        let decision = decide_subexponential(inst, None, FixedPointMethod::RecursiveBinary)
            .unwrap_or_else(|e| panic!("{name}: {e}"));
        let n = decision.stats.n;
        let k = decision.stats.set.len() as u32;
        let ell_set = decision.stats.ell_set;
        for record in &decision.stats.eval_records {
            let bound = greedy_iteration_bound(n, k, ell_set, &record.total_weight);
            assert!(
                big(record.iterations) <= bound,
                "{name}: greedy evaluation used {} iterations, bound {bound}",
                record.iterations
            );
            checked += 1;
        }
    }
    for (inst, set, weights) in &schedule_triples() {
        let graph = SwitchGraph::new(inst);
        let out = multi_run(inst, set, weights, &Scheduler::Greedy).unwrap();
        let ell_set = ell_to_set(&graph, set).unwrap();
        let w_total = BigUint::one() + weights.iter().sum::<BigUint>();
        let bound = greedy_iteration_bound(inst.n(), set.len() as u32, ell_set, &w_total);
        assert!(big(out.iterations) <= bound);
        checked += 1;
    }
    println!("criterion 4 (greedy iteration bound): PASS — {checked} greedy runs within bound");
}

/// Criterion 5: monotonicity of the inflow map on 500 sampled comparable
/// pairs per instance over 50 instances, plus the flow ledger at every
/// evaluation (enforced inside every evaluation; a violation would error).
#[test]
fn criterion_5_monotonicity_and_flow_ledger() {
    let mut rng = SplitMix64::new(0xFEED);
    let mut evaluations = 0u64;
    for i in 0..50u64 {
        let n = (rng.next_below(8) + 1) as u32;
        let inst = generate(&GeneratorSpec {
            family: Family::RandomTerminating,
            n,
            seed: 500 + i,
        });
        let k = (rng.next_below(n.min(3) as u64) + 1) as usize;
        let mut set: Vec<u32> = Vec::new();
        while set.len() < k {
            let v = rng.next_below(n as u64) as u32;
            if !set.contains(&v) {
                set.push(v);
            }
        }
        set.sort_unstable();
        let cap = BigUint::one() << n;
        let mut problem = build_capped_function(&inst, &set, Scheduler::Greedy).unwrap();
        for _ in 0..500 {
            let w: Vec<BigUint> = (0..k)
                .map(|_| rng.next_biguint_below(&(cap.clone() + 1u32)))
                .collect();
            let w_up: Vec<BigUint> = w
                .iter()
                .map(|c| {
                    let room = &cap - c;
                    if room.is_zero() {
                        c.clone()
                    } else {
                        c + rng.next_biguint_below(&(room + 1u32))
                    }
                })
                .collect();
            let f_lo = problem.evaluate_uncapped(&w).unwrap();
            let f_hi = problem.evaluate_uncapped(&w_up).unwrap();
            assert!(
                vec_leq(&f_lo, &f_hi),
                "instance {i}: F({w:?}) = {f_lo:?} exceeds F({w_up:?}) = {f_hi:?}"
            );
        }
        evaluations += problem.eval_count();
    }
    println!(
        "criterion 5 (monotonicity + flow ledger): PASS — 50 instances x 500 pairs, ledger checked at {evaluations} evaluations"
    );
}

/// Criterion 6: φ-set size and radius invariants hold exactly for five φ
/// values over the whole corpus, and construction handles a large chain.
#[test]
fn criterion_6_phi_set_guarantees() {
    let phis = [
        Ratio::new(1, 10).unwrap(),
        Ratio::new(1, 4).unwrap(),
        Ratio::new(1, 2).unwrap(),
        Ratio::new(3, 4).unwrap(),
        Ratio::new(9, 10).unwrap(),
    ];
    let corpus = full_corpus();
    let mut checked = 0usize;
    for (name, inst) in &corpus {
        for phi in phis {
            let ps = compute_phi_set(inst, phi).unwrap();
            assert!(
                ps.size_within_bound(inst.n()),
                "{name} phi={phi}: |S| = {} exceeds phi * (n + 2)",
                ps.set.len()
            );
            assert!(
                ps.radius_within_bound(inst.n()),
                "{name} phi={phi}: radius {} exceeds log2(n + 2) / phi",
                ps.certified_radius
            );
            checked += 1;
        }
    }
    // Linear-time sanity: a large chain decomposes without trouble.
    let big_chain = generate(&GeneratorSpec {
        family: Family::LayeredChain,
        n: 20_000,
        seed: 0,
    });
    let ps = compute_phi_set(&big_chain, Ratio::new(1, 2).unwrap()).unwrap();
    assert!(ps.size_within_bound(20_000));
    assert!(ps.radius_within_bound(20_000));
    println!("criterion 6 (phi-set guarantees): PASS — {checked} (instance, phi) checks");
}

/// Criterion 7: on lattices within the exhaustive budget, recursive-binary
/// and Kleene fixed points are genuine, appear in the exhaustively computed
/// fixed-point set, satisfy the uncapped map, stay within the evaluation
/// budget, and certify the same destination.
#[test]
fn criterion_7_tarski_correctness() {
    let mut rng = SplitMix64::new(0xABCD);
    let mut problems = 0usize;
    for i in 0..46u64 {
        // Mostly tiny lattices, a few larger ones (n up to 7 keeps the
        // exhaustive scan around 100k multi-runs each).
        let n = if i < 40 {
            (rng.next_below(4) + 1) as u32
        } else {
            (rng.next_below(3) + 5) as u32
        };
        let inst = generate(&GeneratorSpec {
            family: Family::RandomTerminating,
            n,
            seed: 900 + i,
        });
        // Keep (N + 1)^k within the exhaustive budget of 10^6 points.
        let max_k = match n {
            1..=2 => n as usize,
            3..=6 => 3,
            _ => 2,
        };
        let k = (rng.next_below(max_k as u64) + 1) as usize;
        let mut set: Vec<u32> = Vec::new();
        while set.len() < k {
            let v = rng.next_below(n as u64) as u32;
            if !set.contains(&v) {
                set.push(v);
            }
        }
        set.sort_unstable();

        let mut exhaustive = build_capped_function(&inst, &set, Scheduler::Greedy).unwrap();
        let fixed_points = exhaustive_fixed_points(&mut exhaustive, false).unwrap();
        assert!(!fixed_points.is_empty(), "a monotone map has a fixed point");

        let mut destinations = Vec::new();
        for method in [FixedPointMethod::RecursiveBinary, FixedPointMethod::Kleene] {
            let mut problem = build_capped_function(&inst, &set, Scheduler::Greedy).unwrap();
            let w = find_fixed_point(&mut problem, method).unwrap();
            assert_eq!(problem.evaluate(&w).unwrap(), w);
            assert!(
                fixed_points.contains(&w),
                "{method:?} returned a point the exhaustive scan did not find"
            );
            // Fixed points of D are fixed points of the uncapped F.
            assert_eq!(problem.evaluate_uncapped(&w).unwrap(), w);
            if method == FixedPointMethod::RecursiveBinary {
                let bound = recursive_binary_eval_bound(problem.cap(), k);
                assert!(
                    big(problem.eval_count()) <= bound,
                    "recursive binary used {} evaluations, bound {bound}",
                    problem.eval_count()
                );
            }
            if method == FixedPointMethod::Kleene {
                // Kleene iteration from the bottom reaches the least fixed point.
                for other in &fixed_points {
                    assert!(vec_leq(&w, other));
                }
            }
            let (_, dest) =
                fixed_point_to_switching_flow(&inst, &set, &w, &Scheduler::Greedy).unwrap();
            destinations.push(dest);
        }
        // Every fixed point certifies the same destination as the run.
        let run_dest = run_procedure(&inst, None).unwrap().destination;
        for dest in destinations {
            assert_eq!(dest, run_dest);
        }
        problems += 1;
    }
    println!("criterion 7 (tarski correctness): PASS — {problems} lattices cross-validated");
}

/// Criterion 8: exhaustive flow enumeration (slot values <= 4) on small
/// instances finds no switching flow to the opposite destination, none below
/// the run profile, and none other of equal total flow.
#[test]
fn criterion_8_oracle_minimality() {
    let mut corpus: Vec<(String, ArrivalInstance)> = Vec::new();
    for family in Family::ALL {
        for n in 1..=6 {
            let spec = GeneratorSpec { family, n, seed: 0 };
            corpus.push((format!("{family}-n{n}"), generate(&spec)));
        }
    }
    for i in 0..30u64 {
        let n = (i % 6 + 1) as u32;
        let spec = GeneratorSpec {
            family: Family::RandomTerminating,
            n,
            seed: 4200 + i,
        };
        corpus.push((format!("random-n{n}-s{}", spec.seed), generate(&spec)));
    }

    let mut flows_checked = 0usize;
    for (name, inst) in &corpus {
        let run = run_procedure(inst, None).unwrap();
        let run_total = flow_total(&run.profile);
        let profile_in_box = (0..2 * inst.n() + 1).all(|e| *run.profile.get(e) <= big(4));
        let mut found_profile = false;
        for (flow, dest) in enumerate_switching_flows(inst, 4) {
            assert_eq!(
                dest, run.destination,
                "{name}: found a switching flow to the opposite destination"
            );
            assert!(
                flow_leq(&run.profile, &flow),
                "{name}: an enumerated flow is not above the run profile"
            );
            if flow_total(&flow) == run_total {
                assert_eq!(
                    flow, run.profile,
                    "{name}: another flow matches the minimum total"
                );
                found_profile = true;
            }
            flows_checked += 1;
        }
        assert_eq!(
            found_profile, profile_in_box,
            "{name}: the run profile must be enumerated exactly when it fits the box"
        );
    }
    println!(
        "criterion 8 (oracle minimality): PASS — {} instances, {flows_checked} enumerated flows",
        corpus.len()
    );
}

/// Criterion 9: planted-cycle instances have the planted FVS size (matching
/// brute force), and the FVS decider's per-evaluation dispatch count stays
/// within n - k.
#[test]
fn criterion_9_fvs_route() {
    // Planted cycles via the grid family (odd n adds an acyclic tail vertex),
    // plus chains of cycles with longer acyclic padding.
    let mut cases: Vec<(String, ArrivalInstance, usize)> = Vec::new();
    for n in 2..=7u32 {
        let inst = generate(&GeneratorSpec {
            family: Family::TwoCycleGrid,
            n,
            seed: 0,
        });
        cases.push((format!("two-cycle-grid-n{n}"), inst, (n / 2) as usize));
    }
    for c in 1..=3u32 {
        let inst = padded_cycles(c, 12);
        cases.push((format!("padded-cycles-c{c}"), inst, c as usize));
    }

    for (name, inst, planted) in &cases {
        let brute = min_fvs_brute_force(inst);
        assert_eq!(brute.len(), *planted, "{name}: brute force disagrees");
        let decision = decide_fvs(inst, K_MAX, FixedPointMethod::RecursiveBinary)
            .unwrap_or_else(|e| panic!("{name}: {e}"));
        assert_eq!(decision.stats.set.len(), *planted, "{name}: FVS size");
        let n = inst.n() as u64;
        let k = decision.stats.set.len() as u64;
        assert!(
            decision.stats.max_iterations_per_eval <= n - k,
            "{name}: an evaluation used {} dispatches, limit {}",
            decision.stats.max_iterations_per_eval,
            n - k
        );
        let sim_dest = run_procedure(inst, None).unwrap().destination;
        assert_eq!(decision.destination, sim_dest, "{name}: destination");
    }

    // Refusal path: I2 has a cycle, so k_max = 0 must refuse.
    let i2 = ArrivalInstance::new(
        2,
        0,
        vec![VertexId::Proper(1), VertexId::Proper(0)],
        vec![
            VertexId::Dest(Destination::Dbar),
            VertexId::Dest(Destination::D),
        ],
    )
    .unwrap();
    assert!(matches!(
        decide_fvs(&i2, 0, FixedPointMethod::RecursiveBinary),
        Err(SolveError::FvsRefused { .. })
    ));
    println!(
        "criterion 9 (FVS route): PASS — {} planted-cycle cases plus the refusal path",
        cases.len()
    );
}

/// Companion artifact check: benchmarking the family corpus never reports an
/// exceeded bound or a disagreement.
#[test]
fn bench_bound_columns_hold_over_the_family_corpus() {
    use arrival::bench::bench_corpus;
    use arrival::solver::Method;
    let corpus = family_corpus();
    let rows = bench_corpus(
        &corpus,
        &[
            Method::Simulation,
            Method::Subexponential,
            Method::FeedbackVertexSet,
        ],
        K_MAX,
    )
    .unwrap();
    assert_eq!(rows.len(), 3 * corpus.len());
    for row in &rows {
        assert_ne!(
            row.bound_ok, "false",
            "{}: {} bound exceeded",
            row.instance, row.method
        );
        assert_ne!(
            row.agree, "false",
            "{}: {} disagrees",
            row.instance, row.method
        );
    }
    println!(
        "bench artifact: PASS — {} rows, no exceeded bounds, no disagreements",
        rows.len()
    );
}

/// `c` disjoint 2-cycles followed by an acyclic chain filling up to `n`
/// vertices.
fn padded_cycles(c: u32, n: u32) -> ArrivalInstance {
    assert!(2 * c <= n);
    let mut succ_even = Vec::new();
    let mut succ_odd = Vec::new();
    for i in 0..c {
        succ_even.push(VertexId::Proper(2 * i + 1)); // a -> b
        succ_odd.push(VertexId::Proper((2 * i + 2).min(n - 1)));
        succ_even.push(VertexId::Proper(2 * i)); // b -> a
        succ_odd.push(VertexId::Dest(Destination::Dbar));
    }
    for v in 2 * c..n {
        // Chain tail: v -> v + 1, last to d.
        let next = if v + 1 < n {
            VertexId::Proper(v + 1)
        } else {
            VertexId::Dest(Destination::D)
        };
        succ_even.push(next);
        succ_odd.push(VertexId::Dest(Destination::D));
    }
    ArrivalInstance::new(n, 0, succ_even, succ_odd).unwrap()
}
