//! Exact reference computations by exhaustive enumeration. All of them
//! refuse inputs beyond a size guard instead of approximating.

use std::collections::HashMap;
use std::hash::Hash;
use std::ops::ControlFlow;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde::Serialize;

use crate::capp::CappInput;
use crate::error::{Error, Result};
use crate::machine::{SelfReducible, StepOutcome};
use crate::problems::Graph;
use crate::tree::{for_each_node, BranchingTree, ExplicitTree, NodePath};

/// Largest variable count the enumerators accept.
pub const MAX_ENUM_VARS: usize = 25;
/// Largest tree [`materialize_tree`] builds.
pub const MAX_MATERIALIZED: usize = 1_000_000;
/// Largest tree [`exact_conductance`] enumerates subsets of.
pub const MAX_CONDUCTANCE_NODES: usize = 18;

fn enum_guard(n: usize) -> Result<()> {
    if n > MAX_ENUM_VARS {
        return Err(Error::Guard(format!(
            "enumeration over {n} variables exceeds the limit of {MAX_ENUM_VARS}"
        )));
    }
    Ok(())
}

/// Number of nonempty independent sets, by subset enumeration.
pub fn count_independent_sets(g: &Graph) -> Result<u64> {
    let n = g.num_vertices();
    enum_guard(n)?;
    let nbr: Vec<u32> = (0..n)
        .map(|v| g.neighbours(v).iter().fold(0u32, |m, &u| m | 1 << u))
        .collect();
    let mut count = 0;
    for set in 1u32..1 << n {
        let independent = (0..n).all(|v| set >> v & 1 == 0 || nbr[v] & set == 0);
        count += u64::from(independent);
    }
    Ok(count)
}

/// Number of assignments of `n` variables accepted by `pred`.
pub fn count_assignments(n: usize, pred: impl Fn(&[bool]) -> bool) -> Result<u64> {
    enum_guard(n)?;
    let mut a = vec![false; n];
    let mut count = 0;
    for m in 0u32..1 << n {
        for (i, x) in a.iter_mut().enumerate() {
            *x = m >> i & 1 == 1;
        }
        count += u64::from(pred(&a));
    }
    Ok(count)
}

/// Number of satisfying assignments, by full enumeration.
pub fn count_sat(input: &CappInput) -> Result<u64> {
    let n = input.num_vars();
    match input {
        CappInput::Dnf(f) => count_assignments(n, |a| f.eval(a)),
        CappInput::Cnf(f) => count_assignments(n, |a| f.eval(a)),
        CappInput::Monotone(c) => count_assignments(n, |a| c.eval(a)),
        CappInput::Circuit(c) => count_assignments(n, |a| c.eval(a)),
    }
}

/// The tree as an explicit node set, by exhaustive walk.
pub fn materialize_tree<T: BranchingTree>(tree: &T) -> Result<ExplicitTree> {
    let mut nodes = Vec::new();
    let mut over = false;
    for_each_node(tree, |p| {
        if nodes.len() == MAX_MATERIALIZED {
            over = true;
            return ControlFlow::Break(());
        }
        nodes.push(p.clone());
        ControlFlow::Continue(())
    })?;
    if over {
        return Err(Error::Guard(format!(
            "tree has more than {MAX_MATERIALIZED} nodes"
        )));
    }
    ExplicitTree::from_paths(tree.height(), nodes)
}

/// Counts the computation paths of the machine with the closing branching,
/// by direct simulation of every path.
///
/// Kept separate from the branching-tree construction so the two can be
/// checked against each other.
pub fn count_computation_paths<P: SelfReducible>(problem: &P) -> Result<u64> {
    let start = problem.initial();
    if !problem.decide(&start) {
        return Ok(1);
    }
    let mut paths = 0u64;
    // (state, only ever chose One, steps so far)
    let mut stack = vec![(start, true, 0usize)];
    while let Some((state, rightmost, steps)) = stack.pop() {
        if steps >= problem.step_budget() {
            return Err(Error::MalformedInstance("a path exceeded its step budget".into()));
        }
        match problem.step(&state) {
            StepOutcome::Halt => paths += if rightmost { 2 } else { 1 },
            StepOutcome::Deterministic(next) => stack.push((next, rightmost, steps + 1)),
            StepOutcome::Branch(zero, one) => {
                stack.push((zero, false, steps + 1));
                stack.push((one, rightmost, steps + 1));
            }
        }
        if paths > MAX_MATERIALIZED as u64 {
            return Err(Error::Guard(format!(
                "more than {MAX_MATERIALIZED} computation paths"
            )));
        }
    }
    Ok(paths)
}

/// Half the L1 distance between two distributions over the same universe.
/// Keys missing from either side count as probability 0.
pub fn tv_distance<K: Eq + Hash>(empirical: &HashMap<K, f64>, exact: &HashMap<K, BigRational>) -> f64 {
    let mut total = 0.0;
    for (k, q) in exact {
        let q = q.to_f64().unwrap_or(0.0);
        total += (empirical.get(k).copied().unwrap_or(0.0) - q).abs();
    }
    for (k, e) in empirical {
        if !exact.contains_key(k) {
            total += e.abs();
        }
    }
    total / 2.0
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConductanceReport {
    /// `Φ` of the lazy chain, as `numerator/denominator`.
    #[serde(serialize_with = "ratio_as_string")]
    pub phi: BigRational,
    /// A minimizing set.
    pub subset: Vec<String>,
    /// `1/(4(n+1))`.
    #[serde(serialize_with = "ratio_as_string")]
    pub bound: BigRational,
    pub bound_holds: bool,
}

fn ratio_as_string<S: serde::Serializer>(r: &BigRational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&r.to_string())
}

/// The exact conductance of the lazy chain on `tree`: the minimum over node
/// sets `Y` with `0 < π(Y) ≤ 1/2` of the flow out of `Y` over `π(Y)`.
pub fn exact_conductance(tree: &ExplicitTree) -> Result<ConductanceReport> {
    let m = tree.len();
    if m > MAX_CONDUCTANCE_NODES {
        return Err(Error::Guard(format!(
            "conductance enumeration is limited to {MAX_CONDUCTANCE_NODES} nodes, tree has {m}"
        )));
    }
    if m < 2 {
        return Err(Error::param("conductance needs a tree with at least two nodes"));
    }
    let n = tree.height();
    // π ∝ w_i = 2^(n - d_i); flow across a tree edge is π_child/4 = α w_child/4
    let w: Vec<u128> = (0..m).map(|i| 1u128 << (n - tree.depth_of(i))).collect();
    let total: u128 = w.iter().sum();
    let parent: Vec<Option<usize>> = (0..m).map(|i| tree.parent_index(i)).collect();

    // best ratio cut / (4 · mass), compared by cross-multiplication
    let mut best: Option<(u128, u128, u32)> = None;
    for set in 1u32..1 << m {
        let mass: u128 = (0..m).filter(|&i| set >> i & 1 == 1).map(|i| w[i]).sum();
        if 2 * mass > total {
            continue;
        }
        let cut: u128 = (0..m)
            .filter_map(|i| parent[i].map(|p| (i, p)))
            .filter(|&(i, p)| (set >> i & 1) != (set >> p & 1))
            .map(|(i, _)| w[i])
            .sum();
        let den = 4 * mass;
        if best.is_none_or(|(bc, bd, _)| cut * bd < bc * den) {
            best = Some((cut, den, set));
        }
    }
    let (cut, den, set) = best.expect("a leaf alone never holds more than half the mass");
    let phi = BigRational::new(BigInt::from(cut), BigInt::from(den));
    let bound = BigRational::new(1.into(), BigInt::from(4 * (n as u64 + 1)));
    let subset = (0..m)
        .filter(|&i| set >> i & 1 == 1)
        .map(|i| tree.nodes()[i].to_string())
        .collect();
    Ok(ConductanceReport {
        bound_holds: phi >= bound,
        phi,
        subset,
        bound,
    })
}

/// The exact distribution as a map keyed by node.
pub fn exact_distribution(tree: &ExplicitTree) -> Result<HashMap<NodePath, BigRational>> {
    let st = crate::chain::stationary_exact(tree)?;
    Ok(tree.nodes().iter().cloned().zip(st.pi).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tree::Bit;

    fn ratio(a: i64, b: i64) -> BigRational {
        BigRational::new(a.into(), b.into())
    }

    #[test]
    fn conductance_hand_values() {
        let pair = ExplicitTree::from_paths(1, [NodePath::root(), NodePath::root().child(Bit::Zero)]).unwrap();
        let r = exact_conductance(&pair).unwrap();
        assert_eq!(r.phi, ratio(1, 4));
        assert_eq!(r.subset, vec!["0".to_string()]);

        let full = exact_conductance(&ExplicitTree::full_binary(2)).unwrap();
        assert_eq!(full.phi, ratio(1, 8));
        assert_eq!(full.bound, ratio(1, 12));
        assert!(full.bound_holds);
    }

    #[test]
    fn conductance_guards() {
        assert!(exact_conductance(&ExplicitTree::full_binary(4)).unwrap_err().is_guard());
        let single = ExplicitTree::from_paths(2, [NodePath::root()]).unwrap();
        assert!(matches!(exact_conductance(&single), Err(Error::Parameter(_))));
    }

    #[test]
    fn tv_of_point_mass() {
        let tree = ExplicitTree::full_binary(2);
        let exact = exact_distribution(&tree).unwrap();
        let root_only: HashMap<NodePath, f64> = [(NodePath::root(), 1.0)].into();
        assert!((tv_distance(&root_only, &exact) - 2.0 / 3.0).abs() < 1e-12);
        let same: HashMap<NodePath, f64> = exact.iter().map(|(k, v)| (k.clone(), v.to_f64().unwrap())).collect();
        assert!(tv_distance(&same, &exact) < 1e-15);
        // mass off the support counts fully
        let stray: HashMap<NodePath, f64> = [(NodePath::root().child(Bit::One).child(Bit::One).child(Bit::One), 1.0)].into();
        assert!((tv_distance(&stray, &exact) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn enumeration_guards() {
        assert!(count_assignments(26, |_| true).unwrap_err().is_guard());
        assert_eq!(count_assignments(3, |a| a[0] || a[2]).unwrap(), 6);
        assert!(materialize_tree(&crate::tree::FullBinaryTree { height: 20 }).unwrap_err().is_guard());
        assert_eq!(count_independent_sets(&Graph::new(2, [(1, 2)]).unwrap()).unwrap(), 2);
    }
}
