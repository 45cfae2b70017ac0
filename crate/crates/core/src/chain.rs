//! The lazy random walk on a branching tree and its stationary distribution.
//!
//! From node `i` the walk stays put with probability 1/2, moves to the parent
//! with probability 1/4 and to each present child with probability 1/8; mass
//! for a missing parent or child stays. The stationary distribution is
//! `π(i) = α · 2^(n - d_i)`, so `π(root) = α · 2^n`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::RngCore;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::rng::{stream, tag};
use crate::tree::{Bit, BranchingTree, ExplicitTree, NodePath};

/// Chain configuration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChainParams {
    /// Allowed total-variation distance from stationarity after burn-in.
    pub tv_tolerance: f64,
    /// The constant `C` in the burn-in length.
    pub burn_in_constant: f64,
    /// Keep visited nodes in an arena instead of replaying them.
    pub memo: bool,
}

impl Default for ChainParams {
    fn default() -> Self {
        Self {
            tv_tolerance: 0.01,
            burn_in_constant: 2.0,
            memo: false,
        }
    }
}

impl ChainParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.tv_tolerance > 0.0 && self.tv_tolerance < 1.0) {
            return Err(Error::param(format!(
                "tv tolerance must lie in (0, 1), got {}",
                self.tv_tolerance
            )));
        }
        if !(self.burn_in_constant > 0.0 && self.burn_in_constant.is_finite()) {
            return Err(Error::param(format!(
                "burn-in constant must be positive, got {}",
                self.burn_in_constant
            )));
        }
        Ok(())
    }
}

/// Steps needed to come within `tv` of stationarity on a tree of height `n`:
/// `ceil(C · 16(n+1)² · (ln(n+1) + ln(1/tv)))`, and 0 for a lone root.
pub fn burn_in_steps(n: usize, tv: f64, c: f64) -> u64 {
    if n == 0 {
        return 0;
    }
    let m = (n + 1) as f64;
    (c * 16.0 * m * m * (m.ln() - tv.ln())).ceil() as u64
}

/// One move of the walk, decoded from three random bits.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Move {
    Stay,
    Parent,
    Child(Bit),
}

#[inline]
fn decode(r: u64) -> Move {
    match r & 7 {
        0..=3 => Move::Stay,
        4 | 5 => Move::Parent,
        6 => Move::Child(Bit::Zero),
        _ => Move::Child(Bit::One),
    }
}

/// One lazy step from `node`, replaying the node from the root.
pub fn lazy_step<T, R>(tree: &T, node: &NodePath, rng: &mut R) -> Result<NodePath>
where
    T: BranchingTree + ?Sized,
    R: RngCore + ?Sized,
{
    let children = tree.children(node)?;
    Ok(match decode(rng.next_u64()) {
        Move::Stay => node.clone(),
        Move::Parent => node.parent().unwrap_or_else(|| node.clone()),
        Move::Child(b) if children.has(b) => node.child(b),
        Move::Child(_) => node.clone(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Kid {
    Unknown,
    Absent,
    /// Present, but its slot has been discarded.
    Present,
    At(u32),
}

#[derive(Debug, Clone)]
struct Slot<C> {
    parent: u32,
    depth: u32,
    bit: Bit,
    cursor: C,
    kids: [Kid; 2],
}

/// Default arena size for memoized walks.
pub const DEFAULT_MEMO_CAP: usize = 1 << 20;

/// A walker for the lazy chain that keeps the cursors of its current root
/// path, so each move costs at most one oracle call.
///
/// Without memoization the slots are exactly the root path and a node is
/// recomputed from its parent's cursor each time the walk enters it. With
/// memoization every visited node keeps its slot until the arena is full, at
/// which point the walker falls back to the path-only mode. Both modes
/// consume randomness identically and follow the same trajectory.
pub struct Walker<'t, T: BranchingTree + ?Sized> {
    tree: &'t T,
    slots: Vec<Slot<T::Cursor>>,
    cur: u32,
    memo: bool,
    cap: usize,
    buf: u64,
    left: u32,
}

impl<'t, T: BranchingTree + ?Sized> Walker<'t, T> {
    /// A walker at the root of a nonempty tree.
    pub fn new(tree: &'t T, memo: bool) -> Result<Self> {
        Self::with_cap(tree, memo, DEFAULT_MEMO_CAP)
    }

    pub fn with_cap(tree: &'t T, memo: bool, cap: usize) -> Result<Self> {
        let root = tree
            .root()
            .ok_or_else(|| Error::param("cannot walk on the empty tree"))?;
        Ok(Self {
            tree,
            slots: vec![Slot {
                parent: u32::MAX,
                depth: 0,
                bit: Bit::Zero,
                cursor: root,
                kids: [Kid::Unknown; 2],
            }],
            cur: 0,
            memo,
            cap: cap.max(2),
            buf: 0,
            left: 0,
        })
    }

    #[inline]
    pub fn depth(&self) -> usize {
        self.slots[self.cur as usize].depth as usize
    }

    #[inline]
    pub fn at_root(&self) -> bool {
        self.cur == 0
    }

    /// Whether memoization is (still) active.
    pub fn is_memoized(&self) -> bool {
        self.memo
    }

    /// Number of cached slots.
    pub fn cached_nodes(&self) -> usize {
        self.slots.len()
    }

    /// The current node.
    pub fn node(&self) -> NodePath {
        let mut bits = Vec::with_capacity(self.depth());
        let mut i = self.cur;
        while i != 0 {
            let s = &self.slots[i as usize];
            bits.push(s.bit);
            i = s.parent;
        }
        let mut p = NodePath::root();
        for b in bits.into_iter().rev() {
            p.push(b);
        }
        p
    }

    /// Returns to the root, keeping any memoized nodes.
    pub fn reset(&mut self) {
        if !self.memo {
            self.slots.truncate(1);
        }
        self.cur = 0;
    }

    #[inline]
    fn next3<R: RngCore + ?Sized>(&mut self, rng: &mut R) -> u64 {
        if self.left == 0 {
            self.buf = rng.next_u64();
            self.left = 21;
        }
        let r = self.buf & 7;
        self.buf >>= 3;
        self.left -= 1;
        r
    }

    #[inline]
    pub fn step<R: RngCore + ?Sized>(&mut self, rng: &mut R) -> Result<()> {
        match decode(self.next3(rng)) {
            Move::Stay => Ok(()),
            Move::Parent => {
                self.ascend();
                Ok(())
            }
            Move::Child(b) => self.descend(b),
        }
    }

    #[inline]
    fn ascend(&mut self) {
        if self.cur == 0 {
            return;
        }
        let parent = self.slots[self.cur as usize].parent;
        if !self.memo {
            self.slots.pop();
        }
        self.cur = parent;
    }

    #[inline]
    fn descend(&mut self, bit: Bit) -> Result<()> {
        let cur = self.cur as usize;
        let next = match self.slots[cur].kids[bit.index()] {
            Kid::Absent => return Ok(()),
            Kid::At(i) => i,
            Kid::Unknown | Kid::Present => {
                let Some(cursor) = self.tree.child(&self.slots[cur].cursor, bit)? else {
                    self.slots[cur].kids[bit.index()] = Kid::Absent;
                    return Ok(());
                };
                let i = self.slots.len() as u32;
                let depth = self.slots[cur].depth + 1;
                self.slots.push(Slot {
                    parent: self.cur,
                    depth,
                    bit,
                    cursor,
                    kids: [Kid::Unknown; 2],
                });
                self.slots[cur].kids[bit.index()] = if self.memo { Kid::At(i) } else { Kid::Present };
                i
            }
        };
        self.cur = next;
        if self.memo && self.slots.len() >= self.cap {
            self.drop_memo();
        }
        Ok(())
    }

    /// Keeps only the current root path and stops memoizing.
    fn drop_memo(&mut self) {
        let mut path = Vec::new();
        let mut i = self.cur;
        loop {
            path.push(i);
            if i == 0 {
                break;
            }
            i = self.slots[i as usize].parent;
        }
        path.reverse();
        let mut old: Vec<Option<Slot<T::Cursor>>> = self.slots.drain(..).map(Some).collect();
        for (k, &j) in path.iter().enumerate() {
            let mut s = old[j as usize].take().expect("path indices are distinct");
            s.parent = if k == 0 { u32::MAX } else { k as u32 - 1 };
            for kid in &mut s.kids {
                if let Kid::At(_) = kid {
                    *kid = Kid::Present;
                }
            }
            self.slots.push(s);
        }
        self.cur = path.len() as u32 - 1;
        self.memo = false;
    }

    pub fn run<R: RngCore + ?Sized>(&mut self, steps: u64, rng: &mut R) -> Result<()> {
        for _ in 0..steps {
            self.step(rng)?;
        }
        Ok(())
    }

    /// Runs `steps` steps and counts how many of them end above depth
    /// `below` (at depth `< below`).
    pub fn run_tally<R: RngCore + ?Sized>(
        &mut self,
        steps: u64,
        below: usize,
        rng: &mut R,
    ) -> Result<u64> {
        let below = below as u32;
        let mut hits = 0;
        for _ in 0..steps {
            self.step(rng)?;
            hits += u64::from(self.slots[self.cur as usize].depth < below);
        }
        Ok(hits)
    }
}

/// Runs the chain from the root for the burn-in length of the tree's height
/// and returns where it ends.
pub fn sample_stationary<T, R>(tree: &T, params: &ChainParams, rng: &mut R) -> Result<NodePath>
where
    T: BranchingTree + ?Sized,
    R: RngCore + ?Sized,
{
    params.validate()?;
    let mut w = Walker::new(tree, params.memo)?;
    w.run(
        burn_in_steps(tree.height(), params.tv_tolerance, params.burn_in_constant),
        rng,
    )?;
    Ok(w.node())
}

/// An estimate of the normalizing factor `α` of a tree.
#[derive(Debug, Clone, PartialEq)]
pub struct AlphaEstimate {
    pub value: f64,
    pub zeta: f64,
    pub confidence: f64,
    /// Restarts per repetition, `m`.
    pub samples: u64,
    /// Repetitions, `t`.
    pub repetitions: u64,
    /// Median root-hit fraction.
    pub root_hit_fraction: f64,
    pub steps: u64,
}

/// Restarts per repetition: `ceil(4(n+1)/ζ²)`.
pub fn alpha_samples(n: usize, zeta: f64) -> u64 {
    (4.0 * (n + 1) as f64 / (zeta * zeta)).ceil() as u64
}

/// Repetitions for the median: `ceil(8 ln(1/δ))`.
pub fn alpha_repetitions(delta: f64) -> u64 {
    ((8.0 * (1.0 / delta).ln()).ceil() as u64).max(1)
}

pub(crate) fn median(mut xs: Vec<f64>) -> f64 {
    xs.sort_by(f64::total_cmp);
    let k = xs.len();
    if k % 2 == 1 {
        xs[k / 2]
    } else {
        (xs[k / 2 - 1] + xs[k / 2]) / 2.0
    }
}

/// Estimates `α` of `tree` within a factor `1 ± ζ` with probability at least
/// `1 - δ`: `t` repetitions of `m` independent burnt-in samples each, taking
/// the median root-hit fraction `p̂` and returning `p̂ · 2^-n`.
///
/// The fraction is floored at `1/(n+1)`, a lower bound on `π(root)` for
/// every tree, so the estimate stays positive.
pub fn estimate_alpha<T>(
    tree: &T,
    zeta: f64,
    delta: f64,
    params: &ChainParams,
    seed: u64,
) -> Result<AlphaEstimate>
where
    T: BranchingTree + ?Sized,
{
    estimate_alpha_keyed(tree, zeta, delta, params, seed, &[])
}

pub(crate) fn estimate_alpha_keyed<T>(
    tree: &T,
    zeta: f64,
    delta: f64,
    params: &ChainParams,
    seed: u64,
    key: &[u64],
) -> Result<AlphaEstimate>
where
    T: BranchingTree + ?Sized,
{
    if !(zeta > 0.0 && zeta < 1.0) {
        return Err(Error::param(format!("ζ must lie in (0, 1), got {zeta}")));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::param(format!("δ must lie in (0, 1), got {delta}")));
    }
    params.validate()?;
    if tree.is_empty() {
        return Err(Error::param("α is undefined for the empty tree"));
    }
    let n = tree.height();
    let m = alpha_samples(n, zeta);
    let t = alpha_repetitions(delta);
    let burn = burn_in_steps(n, params.tv_tolerance, params.burn_in_constant);
    let fractions: Vec<f64> = (0..t)
        .into_par_iter()
        .map(|rep| -> Result<f64> {
            let mut w = Walker::new(tree, params.memo)?;
            let mut hits = 0u64;
            for sample in 0..m {
                let mut path = vec![tag::ALPHA];
                path.extend_from_slice(key);
                path.extend([rep, sample]);
                let mut rng = stream(seed, &path);
                w.reset();
                w.run(burn, &mut rng)?;
                hits += u64::from(w.at_root());
            }
            Ok(hits as f64 / m as f64)
        })
        .collect::<Result<_>>()?;
    let p = median(fractions).max(1.0 / (n + 1) as f64);
    Ok(AlphaEstimate {
        value: p * (-(n as f64)).exp2(),
        zeta,
        confidence: 1.0 - delta,
        samples: m,
        repetitions: t,
        root_hit_fraction: p,
        steps: t * m * burn,
    })
}

/// The exact stationary distribution of an explicit tree.
#[derive(Debug, Clone, PartialEq)]
pub struct Stationary {
    pub alpha: BigRational,
    /// `π` in the tree's node order.
    pub pi: Vec<BigRational>,
}

impl Stationary {
    pub fn get(&self, tree: &ExplicitTree, node: &NodePath) -> Option<&BigRational> {
        tree.index_of(node).map(|i| &self.pi[i])
    }
}

fn pow2(k: usize) -> BigInt {
    BigInt::one() << k
}

/// `π(i) = α · 2^(n - d_i)` with `α = 1 / Σ_i 2^(n - d_i)`, exactly.
pub fn stationary_exact(tree: &ExplicitTree) -> Result<Stationary> {
    if tree.is_empty() {
        return Err(Error::param("the empty tree has no stationary distribution"));
    }
    let n = tree.height();
    let weights: Vec<BigInt> = tree.nodes().iter().map(|p| pow2(n - p.len())).collect();
    let total: BigInt = weights.iter().sum();
    let alpha = BigRational::new(BigInt::one(), total);
    let pi = weights
        .into_iter()
        .map(|w| BigRational::from_integer(w) * &alpha)
        .collect();
    Ok(Stationary { alpha, pi })
}

/// Row `i` of the exact transition kernel as `(target, probability)` pairs,
/// self-loop included. The non-lazy variant (parent 1/2, children 1/4 each)
/// is a diagnostic.
pub fn transition_row(tree: &ExplicitTree, i: usize, lazy: bool) -> Vec<(usize, BigRational)> {
    let (up, down) = if lazy { (4, 8) } else { (2, 4) };
    let frac = |d: i64| BigRational::new(BigInt::one(), BigInt::from(d));
    let mut row = Vec::with_capacity(4);
    let mut stay = BigRational::one();
    if let Some(p) = tree.parent_index(i) {
        row.push((p, frac(up)));
        stay -= frac(up);
    }
    for b in Bit::BOTH {
        if let Some(c) = tree.child_index(i, b) {
            row.push((c, frac(down)));
            stay -= frac(down);
        }
    }
    if !stay.is_zero() {
        row.push((i, stay));
    }
    row
}

/// The whole kernel, one sparse row per node.
pub fn transition_kernel(tree: &ExplicitTree, lazy: bool) -> Vec<Vec<(usize, BigRational)>> {
    (0..tree.len()).map(|i| transition_row(tree, i, lazy)).collect()
}
