use std::path::Path;

use clap::ValueEnum;
use serde::{Deserialize, Serialize};
use totp_core::problems::{parse_circuit, parse_cnf, parse_dnf, parse_graph, Circuit, CnfFormula, DnfFormula, Graph, MonotoneCircuit};
use totp_core::{CappInput, Error, ExplicitTree, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProblemKind {
    /// Nonempty independent sets of a graph (`p graph N M`).
    Is,
    /// Satisfying assignments of a DNF (`p dnf N M`).
    Dnf,
    /// Satisfying assignments of a monotone circuit.
    Mono,
    /// An explicit tree, one node per line.
    Tree,
    /// Satisfying assignments of a DIMACS CNF (acceptance probability only).
    Cnf,
    /// A general circuit (acceptance probability only; must be monotone).
    Circuit,
}

impl ProblemKind {
    pub fn name(self) -> &'static str {
        match self {
            ProblemKind::Is => "is",
            ProblemKind::Dnf => "dnf",
            ProblemKind::Mono => "mono",
            ProblemKind::Tree => "tree",
            ProblemKind::Cnf => "cnf",
            ProblemKind::Circuit => "circuit",
        }
    }
}

#[derive(Debug, Clone)]
pub enum Instance {
    Is(Graph),
    Dnf(DnfFormula),
    Mono(MonotoneCircuit),
    Tree(ExplicitTree),
    Cnf(CnfFormula),
    Circuit(Circuit),
}

impl Instance {
    pub fn parse(kind: ProblemKind, text: &str) -> Result<Self> {
        Ok(match kind {
            ProblemKind::Is => Instance::Is(parse_graph(text)?),
            ProblemKind::Dnf => Instance::Dnf(parse_dnf(text)?),
            // NOT gates are an unsupported family here, not a syntax error
            ProblemKind::Mono => Instance::Mono(MonotoneCircuit::from_circuit(parse_circuit(text)?)?),
            ProblemKind::Tree => Instance::Tree(ExplicitTree::parse(text)?),
            ProblemKind::Cnf => Instance::Cnf(parse_cnf(text)?),
            ProblemKind::Circuit => Instance::Circuit(parse_circuit(text)?),
        })
    }

    pub fn load(kind: ProblemKind, path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::parse(kind, &text)
    }

    /// The instance as input to the acceptance-probability solvers.
    pub fn capp_input(self) -> Result<CappInput> {
        match self {
            Instance::Dnf(f) => Ok(CappInput::Dnf(f)),
            Instance::Cnf(f) => Ok(CappInput::Cnf(f)),
            Instance::Mono(c) => Ok(CappInput::Monotone(c)),
            Instance::Circuit(c) => Ok(CappInput::Circuit(c)),
            Instance::Is(_) | Instance::Tree(_) => Err(Error::UnsupportedFamily(
                "acceptance probability needs a dnf, cnf, mono or circuit input".into(),
            )),
        }
    }
}

/// Runs `$body` with `$t` bound to the branching tree of `$inst`.
macro_rules! with_tree {
    ($inst:expr, |$t:ident| $body:expr) => {{
        use totp_core::problems::{dnf_instance, is_instance, monotone_instance};
        use $crate::instance::Instance;
        match $inst {
            Instance::Is(g) => {
                let $t = &totp_core::build_branching_tree(is_instance(g))?;
                $body
            }
            Instance::Dnf(f) => {
                let $t = &totp_core::build_branching_tree(dnf_instance(f))?;
                $body
            }
            Instance::Mono(c) => {
                let $t = &totp_core::build_branching_tree(monotone_instance(c))?;
                $body
            }
            Instance::Tree(tree) => {
                let $t = tree;
                $body
            }
            Instance::Cnf(_) | Instance::Circuit(_) => Err(totp_core::Error::UnsupportedFamily(
                "cnf and circuit inputs are only accepted by capp and gapcsat".into(),
            )),
        }
    }};
}
pub(crate) use with_tree;
