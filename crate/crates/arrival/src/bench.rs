//! Corpus benchmarking: one CSV row per (instance, method) with the measured
//! costs, the relevant bound, and cross-method agreement.

use std::io::{self, Write};

use num_bigint::BigUint;

use crate::instance::ArrivalInstance;
use crate::simulate::traversal_bound;
use crate::solver::{
    decide_by_simulation, decide_fvs, decide_subexponential, Decision, Method, SolveError,
};
use crate::tarski::{recursive_binary_eval_bound, FixedPointMethod};

pub const BENCH_HEADER: &str =
    "instance,method,n,ell,set_size,destination,proper_traversals,iterations,d_evals,bound,bound_ok,agree";

/// One output row. `bound` is the method-relevant bound: the traversal bound
/// for simulation, the fixed-point evaluation bound for the search routes.
#[derive(Debug, Clone)]
pub struct BenchRow {
    pub instance: String,
    pub method: &'static str,
    pub n: u32,
    pub ell: u32,
    pub set_size: usize,
    pub destination: String,
    pub proper_traversals: String,
    pub iterations: u64,
    pub d_evals: u64,
    pub bound: String,
    pub bound_ok: String,
    pub agree: String,
}

impl BenchRow {
    fn from_decision(name: &str, decision: &Decision, agree: bool) -> BenchRow {
        let stats = &decision.stats;
        let (bound, bound_ok) = match decision.method {
            Method::Simulation => {
                let bound = traversal_bound(stats.n, stats.ell);
                let ok = stats.proper_traversals <= bound;
                (bound, ok)
            }
            Method::Subexponential | Method::FeedbackVertexSet => {
                let cap = BigUint::from(1u32) << stats.n;
                let bound = recursive_binary_eval_bound(&cap, stats.set.len());
                let ok = BigUint::from(stats.d_evaluations) <= bound;
                (bound, ok)
            }
        };
        BenchRow {
            instance: name.to_string(),
            method: decision.method.name(),
            n: stats.n,
            ell: stats.ell,
            set_size: stats.set.len(),
            destination: decision.destination.token().to_string(),
            proper_traversals: stats.proper_traversals.to_string(),
            iterations: stats.iterations,
            d_evals: stats.d_evaluations,
            bound: bound.to_string(),
            bound_ok: bound_ok.to_string(),
            agree: agree.to_string(),
        }
    }

    fn refused(name: &str, n: u32) -> BenchRow {
        BenchRow {
            instance: name.to_string(),
            method: Method::FeedbackVertexSet.name(),
            n,
            ell: 0,
            set_size: 0,
            destination: "refused".to_string(),
            proper_traversals: "0".to_string(),
            iterations: 0,
            d_evals: 0,
            bound: "0".to_string(),
            bound_ok: "na".to_string(),
            agree: "na".to_string(),
        }
    }
}

/// Runs the requested methods over one instance. Agreement is judged against
/// the simulation destination, computed even when `sim` is not requested.
pub fn bench_instance(
    name: &str,
    instance: &ArrivalInstance,
    methods: &[Method],
    k_max: usize,
) -> Result<Vec<BenchRow>, SolveError> {
    let reference = decide_by_simulation(instance)?;
    let mut rows = Vec::new();
    for method in methods {
        match method {
            Method::Simulation => {
                rows.push(BenchRow::from_decision(name, &reference, true));
            }
            Method::Subexponential => {
                let d = decide_subexponential(instance, None, FixedPointMethod::RecursiveBinary)?;
                let agree = d.destination == reference.destination;
                rows.push(BenchRow::from_decision(name, &d, agree));
            }
            Method::FeedbackVertexSet => {
                match decide_fvs(instance, k_max, FixedPointMethod::RecursiveBinary) {
                    Ok(d) => {
                        let agree = d.destination == reference.destination;
                        rows.push(BenchRow::from_decision(name, &d, agree));
                    }
                    Err(SolveError::FvsRefused { .. }) => {
                        rows.push(BenchRow::refused(name, instance.n()));
                    }
                    Err(e) => return Err(e),
                }
            }
        }
    }
    Ok(rows)
}

/// Benchmarks a whole corpus; rows are ordered by input order, then method
/// order.
pub fn bench_corpus(
    corpus: &[(String, ArrivalInstance)],
    methods: &[Method],
    k_max: usize,
) -> Result<Vec<BenchRow>, SolveError> {
    let mut rows = Vec::new();
    for (name, instance) in corpus {
        rows.extend(bench_instance(name, instance, methods, k_max)?);
    }
    Ok(rows)
}

pub fn write_bench_csv<W: Write>(w: &mut W, rows: &[BenchRow]) -> io::Result<()> {
    writeln!(w, "{BENCH_HEADER}")?;
    for r in rows {
        writeln!(
            w,
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            r.instance,
            r.method,
            r.n,
            r.ell,
            r.set_size,
            r.destination,
            r.proper_traversals,
            r.iterations,
            r.d_evals,
            r.bound,
            r.bound_ok,
            r.agree
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testkit::instance_i2;

    #[test]
    fn i2_corpus_produces_three_agreeing_rows() {
        let corpus = vec![("i2".to_string(), instance_i2())];
        let methods = [
            Method::Simulation,
            Method::Subexponential,
            Method::FeedbackVertexSet,
        ];
        let rows = bench_corpus(&corpus, &methods, 6).unwrap();
        assert_eq!(rows.len(), 3);
        for row in &rows {
            assert_eq!(row.destination, "D1");
            assert_eq!(row.agree, "true");
            assert_eq!(row.bound_ok, "true");
        }
    }

    #[test]
    fn empty_corpus_gives_header_only_csv() {
        let rows = bench_corpus(&[], &[Method::Simulation], 6).unwrap();
        let mut bytes = Vec::new();
        write_bench_csv(&mut bytes, &rows).unwrap();
        assert_eq!(
            String::from_utf8(bytes).unwrap(),
            format!("{BENCH_HEADER}\n")
        );
    }

    #[test]
    fn fvs_refusal_is_marked_not_applicable() {
        let corpus = vec![("i2".to_string(), instance_i2())];
        let rows = bench_corpus(&corpus, &[Method::FeedbackVertexSet], 0).unwrap();
        assert_eq!(rows.len(), 1);
        assert_eq!(rows[0].destination, "refused");
        assert_eq!(rows[0].agree, "na");
        assert_eq!(rows[0].bound_ok, "na");
    }
}
