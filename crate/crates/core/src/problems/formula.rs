use std::fmt;

use crate::error::{Error, Result};
use crate::machine::SelfReducible;

/// A signed variable, `var` counted from 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Lit {
    pub var: usize,
    pub positive: bool,
}

impl Lit {
    pub fn pos(var: usize) -> Self {
        Self { var, positive: true }
    }

    pub fn neg(var: usize) -> Self {
        Self {
            var,
            positive: false,
        }
    }

    /// From a nonzero DIMACS integer.
    pub fn from_dimacs(x: i64) -> Option<Self> {
        (x != 0).then(|| Self {
            var: x.unsigned_abs() as usize,
            positive: x > 0,
        })
    }

    pub fn to_dimacs(self) -> i64 {
        if self.positive {
            self.var as i64
        } else {
            -(self.var as i64)
        }
    }

    pub fn negated(self) -> Self {
        Self {
            var: self.var,
            positive: !self.positive,
        }
    }

    /// Value under `assignment`, where `assignment[i]` is variable `i + 1`.
    #[inline]
    pub fn eval(self, assignment: &[bool]) -> bool {
        assignment[self.var - 1] == self.positive
    }
}

impl fmt::Display for Lit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_dimacs())
    }
}

/// Sorts, deduplicates, and range-checks a conjunction or disjunction.
/// Rejects sets holding a literal and its negation.
fn normalize(num_vars: usize, lits: Vec<Lit>, what: &str) -> Result<Vec<Lit>> {
    let mut lits = lits;
    lits.sort();
    lits.dedup();
    for l in &lits {
        if l.var == 0 || l.var > num_vars {
            return Err(Error::MalformedInstance(format!(
                "{what} uses variable {} outside 1..={num_vars}",
                l.var
            )));
        }
    }
    if lits.windows(2).any(|w| w[0].var == w[1].var) {
        return Err(Error::MalformedInstance(format!(
            "{what} contains a variable and its negation"
        )));
    }
    Ok(lits)
}

/// Disjunction of conjunctive terms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DnfFormula {
    num_vars: usize,
    terms: Vec<Vec<Lit>>,
}

impl DnfFormula {
    pub fn new(num_vars: usize, terms: Vec<Vec<Lit>>) -> Result<Self> {
        let terms = terms
            .into_iter()
            .map(|t| normalize(num_vars, t, "term"))
            .collect::<Result<_>>()?;
        Ok(Self { num_vars, terms })
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn terms(&self) -> &[Vec<Lit>] {
        &self.terms
    }

    pub fn eval(&self, assignment: &[bool]) -> bool {
        self.terms
            .iter()
            .any(|t| t.iter().all(|l| l.eval(assignment)))
    }

    pub fn to_dimacs(&self) -> String {
        let mut s = format!("p dnf {} {}\n", self.num_vars, self.terms.len());
        for t in &self.terms {
            for l in t {
                s.push_str(&format!("{l} "));
            }
            s.push_str("0\n");
        }
        s
    }
}

/// Conjunction of disjunctive clauses.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CnfFormula {
    num_vars: usize,
    clauses: Vec<Vec<Lit>>,
}

impl CnfFormula {
    pub fn new(num_vars: usize, clauses: Vec<Vec<Lit>>) -> Result<Self> {
        let clauses = clauses
            .into_iter()
            .map(|c| normalize(num_vars, c, "clause"))
            .collect::<Result<_>>()?;
        Ok(Self { num_vars, clauses })
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn clauses(&self) -> &[Vec<Lit>] {
        &self.clauses
    }

    pub fn eval(&self, assignment: &[bool]) -> bool {
        self.clauses
            .iter()
            .all(|c| c.iter().any(|l| l.eval(assignment)))
    }

    pub fn to_dimacs(&self) -> String {
        let mut s = format!("p cnf {} {}\n", self.num_vars, self.clauses.len());
        for c in &self.clauses {
            for l in c {
                s.push_str(&format!("{l} "));
            }
            s.push_str("0\n");
        }
        s
    }
}

/// The negation of `cnf` as a DNF over the same variables (De Morgan): each
/// clause becomes a term of the negated literals.
pub fn cnf_complement(cnf: &CnfFormula) -> DnfFormula {
    DnfFormula {
        num_vars: cnf.num_vars,
        terms: cnf
            .clauses
            .iter()
            .map(|c| c.iter().map(|l| l.negated()).collect())
            .collect(),
    }
}

/// Counting satisfying assignments of a DNF, splitting on variables in index
/// order. The state tracks which terms are still consistent with the partial
/// assignment; the instance is satisfiable iff any is.
#[derive(Debug, Clone)]
pub struct DnfCount {
    num_vars: usize,
    num_terms: usize,
    // signs[var * num_terms + term]: 0 absent, 1 positive, 2 negative
    signs: Vec<u8>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DnfState {
    next_var: usize,
    alive: Vec<u32>,
}

pub fn dnf_instance(phi: &DnfFormula) -> DnfCount {
    let num_terms = phi.terms.len();
    let mut signs = vec![0u8; phi.num_vars * num_terms];
    for (t, term) in phi.terms.iter().enumerate() {
        for l in term {
            signs[(l.var - 1) * num_terms + t] = if l.positive { 1 } else { 2 };
        }
    }
    DnfCount {
        num_vars: phi.num_vars,
        num_terms,
        signs,
    }
}

impl SelfReducible for DnfCount {
    type State = DnfState;

    fn initial(&self) -> DnfState {
        DnfState {
            next_var: 0,
            alive: (0..self.num_terms as u32).collect(),
        }
    }

    fn decide(&self, s: &DnfState) -> bool {
        !s.alive.is_empty()
    }

    fn split(&self, s: &DnfState) -> Option<(DnfState, DnfState)> {
        if s.next_var == self.num_vars {
            return None;
        }
        let row = &self.signs[s.next_var * self.num_terms..][..self.num_terms];
        let keep = |forbidden: u8| DnfState {
            next_var: s.next_var + 1,
            alive: s
                .alive
                .iter()
                .copied()
                .filter(|&t| row[t as usize] != forbidden)
                .collect(),
        };
        // setting the variable false kills terms that need it true
        Some((keep(1), keep(2)))
    }

    fn num_vars(&self) -> usize {
        self.num_vars
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::capp::CappInput;
    use crate::machine::build_branching_tree;
    use crate::oracle::{count_computation_paths, count_sat, materialize_tree};
    use crate::problems::random::{random_cnf, random_dnf};
    use crate::tree::{BranchingTree, NodePath};
    use rand::{Rng, SeedableRng};

    fn dnf(n: usize, terms: &[&[i64]]) -> DnfFormula {
        let terms = terms
            .iter()
            .map(|t| t.iter().map(|&x| Lit::from_dimacs(x).unwrap()).collect())
            .collect();
        DnfFormula::new(n, terms).unwrap()
    }

    fn cnf(n: usize, clauses: &[&[i64]]) -> CnfFormula {
        let clauses = clauses
            .iter()
            .map(|t| t.iter().map(|&x| Lit::from_dimacs(x).unwrap()).collect())
            .collect();
        CnfFormula::new(n, clauses).unwrap()
    }

    fn tree_size(phi: &DnfFormula) -> usize {
        materialize_tree(&build_branching_tree(dnf_instance(phi)).unwrap()).unwrap().len()
    }

    #[test]
    fn small_dnfs() {
        let x1 = dnf(2, &[&[1]]);
        let x1x2 = dnf(2, &[&[1, 2]]);
        assert_eq!(count_sat(&CappInput::Dnf(x1.clone())).unwrap(), 2);
        assert_eq!(count_sat(&CappInput::Dnf(x1x2.clone())).unwrap(), 1);
        assert_eq!(tree_size(&x1), 2);
        assert_eq!(tree_size(&x1x2), 1);
        let t = build_branching_tree(dnf_instance(&x1x2)).unwrap();
        assert_eq!(t.children(&NodePath::root()).unwrap().count(), 0);
        assert_eq!(t.height(), 3);
    }

    #[test]
    fn dnf_without_terms_is_empty() {
        let phi = dnf(2, &[]);
        assert!(build_branching_tree(dnf_instance(&phi)).unwrap().is_empty());
        assert_eq!(count_computation_paths(&dnf_instance(&phi)).unwrap(), 1);
    }

    #[test]
    fn zero_variable_formulas() {
        assert_eq!(tree_size(&dnf(0, &[&[]])), 1);
        assert_eq!(tree_size(&dnf(0, &[])), 0);
    }

    #[test]
    fn complement_examples() {
        let phi = cnf(2, &[&[1, 2]]);
        let psi = cnf_complement(&phi);
        assert_eq!(psi, dnf(2, &[&[-1, -2]]));
        assert_eq!(count_sat(&CappInput::Cnf(phi)).unwrap(), 3);
        assert_eq!(count_sat(&CappInput::Dnf(psi)).unwrap(), 1);

        let none = cnf(3, &[]);
        assert_eq!(cnf_complement(&none).terms().len(), 0);
        assert_eq!(count_sat(&CappInput::Cnf(none)).unwrap(), 8);

        let contradiction = cnf(2, &[&[1], &[-1]]);
        let psi = cnf_complement(&contradiction);
        assert_eq!(psi, dnf(2, &[&[-1], &[1]]));
        assert_eq!(count_sat(&CappInput::Dnf(psi)).unwrap(), 4);
    }

    #[test]
    fn rejects_bad_literal_sets() {
        assert!(DnfFormula::new(2, vec![vec![Lit::pos(1), Lit::neg(1)]]).is_err());
        assert!(CnfFormula::new(2, vec![vec![Lit::pos(2), Lit::neg(2)]]).is_err());
        assert!(DnfFormula::new(2, vec![vec![Lit::pos(3)]]).is_err());
    }

    #[test]
    fn random_dnfs_match_enumeration() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for _ in 0..100 {
            let n = rng.random_range(1..=10);
            let m = rng.random_range(0..=8);
            let phi = random_dnf(&mut rng, n, m, 1..=4);
            let f = count_sat(&CappInput::Dnf(phi.clone())).unwrap();
            assert_eq!(tree_size(&phi) as u64, f);
            assert_eq!(count_computation_paths(&dnf_instance(&phi)).unwrap(), f + 1);
        }
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn complement_counts_add_up(seed in any::<u64>(), n in 1usize..=10, m in 0usize..12) {
                let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
                let phi = random_cnf(&mut rng, n, m, 1..=3);
                let psi = cnf_complement(&phi);
                prop_assert_eq!(psi.num_vars(), n);
                let a = count_sat(&CappInput::Cnf(phi)).unwrap();
                let b = count_sat(&CappInput::Dnf(psi)).unwrap();
                prop_assert_eq!(a + b, 1u64 << n);
            }
        }
    }
}
