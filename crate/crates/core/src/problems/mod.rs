//! Self-reducible counting problems in the two-way split form.

mod circuit;
mod formula;
mod graph;
pub mod parse;
pub mod random;

pub use circuit::{
    monotone_instance, Circuit, Gate, GateOp, MonotoneCircuit, MonotoneCount, MonotoneState,
};
pub use formula::{cnf_complement, dnf_instance, CnfFormula, DnfCount, DnfFormula, DnfState, Lit};
pub use graph::{is_instance, Graph, IndependentSets, IsState};
pub use parse::{parse_circuit, parse_cnf, parse_dnf, parse_graph, parse_monotone};
