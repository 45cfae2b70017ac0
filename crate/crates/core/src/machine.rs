//! The binary nondeterministic machine of a self-reducible counting problem,
//! and the tree of its branchings.
//!
//! A problem supplies an initial state, an exact decision procedure ("does
//! this sub-instance have a solution") and a binary split. The machine walks
//! the split tree, branching only where both sub-instances are nonempty and
//! moving deterministically where exactly one is. Solutions are therefore the
//! halting paths of the pruned walk, and the branchings number one fewer.
//! One extra branching at the end of the rightmost path (the path that took
//! `One` at every branching) restores the balance, so the branching tree has
//! exactly `f(x)` nodes and the machine has `f(x) + 1` computation paths.

use crate::error::{Error, Result};
use crate::tree::{Bit, BranchingTree, Children, NodePath};

/// One move of the machine.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StepOutcome<S> {
    Halt,
    Deterministic(S),
    /// Successor states for choice `Zero` and choice `One`.
    Branch(S, S),
}

/// A self-reducible counting problem with an easy decision version, in the
/// two-way split form.
pub trait SelfReducible: Sync {
    type State: Clone + Send + Sync;

    fn initial(&self) -> Self::State;

    /// True iff the sub-instance at `state` has at least one solution.
    fn decide(&self, state: &Self::State) -> bool;

    /// Splits a sub-instance into its two parts (choice `Zero`, choice
    /// `One`), or `None` once nothing is left to split.
    fn split(&self, state: &Self::State) -> Option<(Self::State, Self::State)>;

    /// The size parameter `n` (variables, vertices).
    fn num_vars(&self) -> usize;

    /// `n'`: the most nondeterministic bits any computation path uses.
    fn depth_bound(&self) -> usize {
        self.num_vars() + 1
    }

    /// Most machine steps allowed on one path.
    fn step_budget(&self) -> usize {
        self.num_vars() + 1
    }

    fn step(&self, state: &Self::State) -> StepOutcome<Self::State> {
        match self.split(state) {
            None => StepOutcome::Halt,
            Some((zero, one)) => match (self.decide(&zero), self.decide(&one)) {
                (true, true) => StepOutcome::Branch(zero, one),
                (true, false) => StepOutcome::Deterministic(zero),
                (false, true) => StepOutcome::Deterministic(one),
                (false, false) => StepOutcome::Halt,
            },
        }
    }
}

impl<P: SelfReducible + ?Sized> SelfReducible for &P {
    type State = P::State;

    fn initial(&self) -> Self::State {
        (**self).initial()
    }
    fn decide(&self, state: &Self::State) -> bool {
        (**self).decide(state)
    }
    fn split(&self, state: &Self::State) -> Option<(Self::State, Self::State)> {
        (**self).split(state)
    }
    fn num_vars(&self) -> usize {
        (**self).num_vars()
    }
    fn depth_bound(&self) -> usize {
        (**self).depth_bound()
    }
    fn step_budget(&self) -> usize {
        (**self).step_budget()
    }
    fn step(&self, state: &Self::State) -> StepOutcome<Self::State> {
        (**self).step(state)
    }
}

/// Machine state at a branching node.
#[derive(Debug, Clone)]
pub enum MachineCursor<S> {
    /// A real branching of the problem.
    Branch {
        next: Box<(S, S)>,
        rightmost: bool,
        depth: usize,
        steps: usize,
    },
    /// The extra branching at the end of the rightmost path; both of its
    /// children halt.
    Synthetic { depth: usize },
}

impl<S> MachineCursor<S> {
    pub fn depth(&self) -> usize {
        match self {
            MachineCursor::Branch { depth, .. } | MachineCursor::Synthetic { depth } => *depth,
        }
    }
}

/// The branching tree of the wrapped machine, answered by replay.
#[derive(Clone)]
pub struct MachineTree<P: SelfReducible> {
    problem: P,
    root: Option<MachineCursor<P::State>>,
}

impl<P: SelfReducible> std::fmt::Debug for MachineTree<P> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("MachineTree")
            .field("num_vars", &self.problem.num_vars())
            .field("depth_bound", &self.problem.depth_bound())
            .field("empty", &self.root.is_none())
            .finish()
    }
}

/// Builds the branching tree of `problem`. An instance whose decision
/// version is false yields the empty tree.
pub fn build_branching_tree<P: SelfReducible>(problem: P) -> Result<MachineTree<P>> {
    if problem.depth_bound() == 0 {
        return Err(Error::MalformedInstance(
            "depth bound must be at least 1 to hold the closing branching".into(),
        ));
    }
    let root = if problem.decide(&problem.initial()) {
        run_until_branch(&problem, problem.initial(), true, 0, 0)?
    } else {
        None
    };
    Ok(MachineTree { problem, root })
}

/// Runs deterministic steps from `state` until the next branching (a node at
/// `depth`) or a halt.
fn run_until_branch<P: SelfReducible>(
    problem: &P,
    mut state: P::State,
    rightmost: bool,
    depth: usize,
    mut steps: usize,
) -> Result<Option<MachineCursor<P::State>>> {
    let check_depth = |depth: usize| {
        if depth >= problem.depth_bound() {
            Err(Error::MalformedInstance(format!(
                "a path branches more than the declared bound of {} times",
                problem.depth_bound()
            )))
        } else {
            Ok(())
        }
    };
    loop {
        steps += 1;
        if steps > problem.step_budget() {
            return Err(Error::MalformedInstance(format!(
                "a path exceeded the step budget of {}",
                problem.step_budget()
            )));
        }
        match problem.step(&state) {
            StepOutcome::Halt => {
                if !rightmost {
                    return Ok(None);
                }
                check_depth(depth)?;
                return Ok(Some(MachineCursor::Synthetic { depth }));
            }
            StepOutcome::Deterministic(next) => state = next,
            StepOutcome::Branch(zero, one) => {
                check_depth(depth)?;
                return Ok(Some(MachineCursor::Branch {
                    next: Box::new((zero, one)),
                    rightmost,
                    depth,
                    steps,
                }));
            }
        }
    }
}

impl<P: SelfReducible> MachineTree<P> {
    pub fn problem(&self) -> &P {
        &self.problem
    }

    /// `n'`.
    pub fn depth_bound(&self) -> usize {
        self.problem.depth_bound()
    }

    /// The size parameter `n` of the underlying problem.
    pub fn num_vars(&self) -> usize {
        self.problem.num_vars()
    }
}

impl<P: SelfReducible> BranchingTree for MachineTree<P> {
    type Cursor = MachineCursor<P::State>;

    /// The tree sits inside the full binary tree of height `n'`.
    fn height(&self) -> usize {
        self.problem.depth_bound()
    }

    /// A node is reached after at most `n' - 1` choices, since the node's own
    /// branching also counts toward the `n'` bits of its paths.
    fn max_depth(&self) -> usize {
        self.problem.depth_bound().saturating_sub(1)
    }

    fn root(&self) -> Option<Self::Cursor> {
        self.root.clone()
    }

    fn child(&self, at: &Self::Cursor, bit: Bit) -> Result<Option<Self::Cursor>> {
        match at {
            MachineCursor::Synthetic { .. } => Ok(None),
            MachineCursor::Branch {
                next,
                rightmost,
                depth,
                steps,
            } => {
                let state = match bit {
                    Bit::Zero => next.0.clone(),
                    Bit::One => next.1.clone(),
                };
                run_until_branch(
                    &self.problem,
                    state,
                    *rightmost && bit == Bit::One,
                    depth + 1,
                    *steps,
                )
            }
        }
    }
}

/// The children of `node` in the branching tree of `problem`, by replaying
/// the machine along the node's choices.
pub fn children_in_s<P: SelfReducible>(problem: &P, node: &NodePath) -> Result<Children> {
    build_branching_tree(problem)?.children(node)
}
