//! Approximate counting for self-reducible problems by a random walk on the
//! tree of their nondeterministic branchings.
//!
//! A counting problem with an easy decision version is turned into a binary
//! machine whose branching tree has exactly `f(x)` nodes
//! ([`machine::build_branching_tree`]). The size of that tree is then
//! estimated from the stationary behaviour of a lazy walk on its truncations
//! ([`estimator::estimate_size`]).

pub mod capp;
pub mod chain;
pub mod error;
pub mod estimator;
pub mod machine;
pub mod oracle;
pub mod problems;
pub mod rng;
pub mod tree;

pub use capp::{capp, gap_csat, CappInput, CappResult, GapVerdict, Route, Verdict};
pub use chain::{
    burn_in_steps, estimate_alpha, lazy_step, sample_stationary, stationary_exact, AlphaEstimate, ChainParams,
    Stationary, Walker,
};
pub use error::{Error, Result};
pub use estimator::{
    absolute_error_estimate, count_up_to, estimate_fraction, estimate_size, ras, CountOutcome, EstimateReport,
    EstimatorConfig, RasReport, Schedule,
};
pub use machine::{build_branching_tree, children_in_s, MachineTree, SelfReducible, StepOutcome};
pub use tree::{exact_size, truncate, Bit, BranchingTree, Children, ExplicitTree, FullBinaryTree, NodePath, Truncated};
