//! Random instance generators for tests and benchmarks.

use rand::seq::index::sample;
use rand::Rng;

use super::circuit::{Gate, GateOp, MonotoneCircuit};
use super::formula::{CnfFormula, DnfFormula, Lit};
use super::graph::Graph;

/// Erdős–Rényi graph with edge probability `p`.
pub fn random_graph<R: Rng + ?Sized>(rng: &mut R, n: usize, p: f64) -> Graph {
    let mut edges = Vec::new();
    for u in 1..=n {
        for v in u + 1..=n {
            if rng.random_bool(p) {
                edges.push((u, v));
            }
        }
    }
    Graph::new(n, edges).expect("generated edges are in range")
}

/// `count` sets of `width` distinct variables with random signs.
fn random_lit_sets<R: Rng + ?Sized>(
    rng: &mut R,
    n: usize,
    count: usize,
    width: std::ops::RangeInclusive<usize>,
) -> Vec<Vec<Lit>> {
    (0..count)
        .map(|_| {
            let w = rng.random_range(width.clone()).min(n);
            sample(rng, n, w)
                .into_iter()
                .map(|v| Lit {
                    var: v + 1,
                    positive: rng.random(),
                })
                .collect()
        })
        .collect()
}

pub fn random_dnf<R: Rng + ?Sized>(
    rng: &mut R,
    n: usize,
    terms: usize,
    width: std::ops::RangeInclusive<usize>,
) -> DnfFormula {
    DnfFormula::new(n, random_lit_sets(rng, n, terms, width)).expect("distinct variables")
}

pub fn random_cnf<R: Rng + ?Sized>(
    rng: &mut R,
    n: usize,
    clauses: usize,
    width: std::ops::RangeInclusive<usize>,
) -> CnfFormula {
    CnfFormula::new(n, random_lit_sets(rng, n, clauses, width)).expect("distinct variables")
}

/// A random AND/OR circuit with `gates` gates over `n >= 1` inputs; the last
/// gate is the output.
pub fn random_monotone<R: Rng + ?Sized>(rng: &mut R, n: usize, gates: usize) -> MonotoneCircuit {
    assert!(n >= 1, "a circuit needs at least one input");
    let list: Vec<Gate> = (0..gates)
        .map(|j| {
            let wires = n + j;
            Gate {
                op: if rng.random() { GateOp::And } else { GateOp::Or },
                a: rng.random_range(0..wires),
                b: rng.random_range(0..wires),
            }
        })
        .collect();
    let output = if gates == 0 { 0 } else { n + gates - 1 };
    MonotoneCircuit::new(n, list, output).expect("gates read earlier wires")
}
