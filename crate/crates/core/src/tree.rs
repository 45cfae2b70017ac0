//! Binary branching trees given by a children oracle.
//!
//! A tree `S` lives inside the full binary tree of some height `n`. Nodes are
//! identified by the choice bits leading to them from the root ([`NodePath`]),
//! so an implicit tree of height 40 or more never needs to be materialized.
//! Traversal goes through cursors: a cursor is whatever state a tree needs to
//! answer "which children does this node have" cheaply, and samplers keep one
//! cursor per node on their current root path.

use std::collections::HashMap;
use std::fmt;
use std::ops::ControlFlow;
use std::str::FromStr;

use rand::Rng;

use crate::error::{Error, Result};

/// One nondeterministic choice: `Zero` is the left child, `One` the right.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Bit {
    Zero,
    One,
}

impl Bit {
    pub const BOTH: [Bit; 2] = [Bit::Zero, Bit::One];

    #[inline]
    pub fn index(self) -> usize {
        self as usize
    }
}

impl From<bool> for Bit {
    fn from(b: bool) -> Self {
        if b {
            Bit::One
        } else {
            Bit::Zero
        }
    }
}

/// The sequence of choices leading from the root to a node. The root is the
/// empty path; the length of a path is the depth of its node.
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct NodePath {
    // bits past `len` are kept zero so derived Eq/Hash are correct
    words: Vec<u64>,
    len: usize,
}

impl NodePath {
    pub fn root() -> Self {
        Self::default()
    }

    #[allow(clippy::len_without_is_empty)]
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_root(&self) -> bool {
        self.len == 0
    }

    pub fn depth(&self) -> usize {
        self.len
    }

    pub fn bit(&self, i: usize) -> Bit {
        assert!(i < self.len, "bit index {i} out of range for path of length {}", self.len);
        Bit::from((self.words[i / 64] >> (i % 64)) & 1 == 1)
    }

    pub fn bits(&self) -> impl Iterator<Item = Bit> + '_ {
        (0..self.len).map(move |i| self.bit(i))
    }

    pub fn push(&mut self, bit: Bit) {
        if self.len.is_multiple_of(64) {
            self.words.push(0);
        }
        if bit == Bit::One {
            self.words[self.len / 64] |= 1 << (self.len % 64);
        }
        self.len += 1;
    }

    pub fn pop(&mut self) -> Option<Bit> {
        if self.len == 0 {
            return None;
        }
        let bit = self.bit(self.len - 1);
        self.len -= 1;
        self.words[self.len / 64] &= !(1 << (self.len % 64));
        if self.len.is_multiple_of(64) {
            self.words.pop();
        }
        Some(bit)
    }

    pub fn child(&self, bit: Bit) -> NodePath {
        let mut p = self.clone();
        p.push(bit);
        p
    }

    pub fn parent(&self) -> Option<NodePath> {
        let mut p = self.clone();
        p.pop().map(|_| p)
    }

    /// The first `len` choices of this path.
    pub fn prefix(&self, len: usize) -> NodePath {
        let mut p = self.clone();
        while p.len > len {
            p.pop();
        }
        p
    }

    /// True if this path only ever chose `One`.
    pub fn is_rightmost(&self) -> bool {
        self.bits().all(|b| b == Bit::One)
    }
}

impl fmt::Display for NodePath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.len == 0 {
            return f.write_str("-");
        }
        for b in self.bits() {
            f.write_str(if b == Bit::One { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for NodePath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "NodePath({self})")
    }
}

impl FromStr for NodePath {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let mut p = NodePath::root();
        if s == "-" {
            return Ok(p);
        }
        if s.is_empty() {
            return Err(Error::parse(0, "empty node path (use '-' for the root)"));
        }
        for c in s.chars() {
            match c {
                '0' => p.push(Bit::Zero),
                '1' => p.push(Bit::One),
                other => return Err(Error::parse(0, format!("unexpected character {other:?} in node path"))),
            }
        }
        Ok(p)
    }
}

impl PartialOrd for NodePath {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// Breadth-first order: shallower first, then lexicographic.
impl Ord for NodePath {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.len
            .cmp(&other.len)
            .then_with(|| self.bits().cmp(other.bits()))
    }
}

/// Which children of a node are present.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Children {
    pub zero: bool,
    pub one: bool,
}

impl Children {
    pub const NONE: Children = Children {
        zero: false,
        one: false,
    };

    pub fn has(&self, bit: Bit) -> bool {
        match bit {
            Bit::Zero => self.zero,
            Bit::One => self.one,
        }
    }

    pub fn count(&self) -> usize {
        self.zero as usize + self.one as usize
    }

    pub fn bits(&self) -> impl Iterator<Item = Bit> + '_ {
        Bit::BOTH.into_iter().filter(|b| self.has(*b))
    }

    /// The child paths of `node`.
    pub fn paths(&self, node: &NodePath) -> Vec<NodePath> {
        self.bits().map(|b| node.child(b)).collect()
    }
}

/// A (possibly empty) binary tree of bounded height, given by an oracle.
///
/// Implementations must be pure: the same cursor and bit always produce the
/// same answer, and concurrent calls are allowed.
pub trait BranchingTree: Sync {
    type Cursor: Clone + Send + Sync;

    /// Declared height `n`: no node is deeper than this.
    fn height(&self) -> usize;

    /// A structural bound on node depth that may be tighter than
    /// [`height`](Self::height). Levels beyond it are known to be empty.
    fn max_depth(&self) -> usize {
        self.height()
    }

    /// Cursor at the root, or `None` for the empty tree.
    fn root(&self) -> Option<Self::Cursor>;

    /// Cursor at the `bit` child of `at`, or `None` if that child is absent.
    fn child(&self, at: &Self::Cursor, bit: Bit) -> Result<Option<Self::Cursor>>;

    fn is_empty(&self) -> bool {
        self.root().is_none()
    }

    /// Replays `node` from the root.
    fn locate(&self, node: &NodePath) -> Result<Self::Cursor> {
        let mut cur = self.root().ok_or_else(|| Error::NotInTree(node.clone()))?;
        for b in node.bits() {
            cur = self
                .child(&cur, b)?
                .ok_or_else(|| Error::NotInTree(node.clone()))?;
        }
        Ok(cur)
    }

    /// The children of `node`. Asking about a node outside the tree is an
    /// error, never an empty answer.
    fn children(&self, node: &NodePath) -> Result<Children> {
        let cur = self.locate(node)?;
        Ok(Children {
            zero: self.child(&cur, Bit::Zero)?.is_some(),
            one: self.child(&cur, Bit::One)?.is_some(),
        })
    }

    fn contains(&self, node: &NodePath) -> Result<bool> {
        match self.locate(node) {
            Ok(_) => Ok(true),
            Err(Error::NotInTree(_)) => Ok(false),
            Err(e) => Err(e),
        }
    }
}

impl<T: BranchingTree + ?Sized> BranchingTree for &T {
    type Cursor = T::Cursor;

    fn height(&self) -> usize {
        (**self).height()
    }
    fn max_depth(&self) -> usize {
        (**self).max_depth()
    }
    fn root(&self) -> Option<Self::Cursor> {
        (**self).root()
    }
    fn child(&self, at: &Self::Cursor, bit: Bit) -> Result<Option<Self::Cursor>> {
        (**self).child(at, bit)
    }
}

/// The subtree `S_i` of all nodes at depth `<= i`, with height `i`.
#[derive(Debug, Clone)]
pub struct Truncated<T> {
    inner: T,
    depth: usize,
}

/// `S_i`: keeps the nodes of `tree` down to depth `depth`.
pub fn truncate<T: BranchingTree>(tree: T, depth: usize) -> Result<Truncated<T>> {
    if depth > tree.height() {
        return Err(Error::DepthOutOfRange {
            depth,
            height: tree.height(),
        });
    }
    Ok(Truncated { inner: tree, depth })
}

impl<T: BranchingTree> Truncated<T> {
    /// Truncating again composes to the smaller depth without nesting views.
    pub fn truncate(self, depth: usize) -> Result<Truncated<T>> {
        if depth > self.depth {
            return Err(Error::DepthOutOfRange {
                depth,
                height: self.depth,
            });
        }
        Ok(Truncated {
            inner: self.inner,
            depth,
        })
    }

    pub fn inner(&self) -> &T {
        &self.inner
    }
}

impl<T: BranchingTree> BranchingTree for Truncated<T> {
    type Cursor = (T::Cursor, usize);

    fn height(&self) -> usize {
        self.depth
    }

    fn max_depth(&self) -> usize {
        self.depth.min(self.inner.max_depth())
    }

    fn root(&self) -> Option<Self::Cursor> {
        self.inner.root().map(|c| (c, 0))
    }

    fn child(&self, at: &Self::Cursor, bit: Bit) -> Result<Option<Self::Cursor>> {
        if at.1 >= self.depth {
            return Ok(None);
        }
        Ok(self.inner.child(&at.0, bit)?.map(|c| (c, at.1 + 1)))
    }
}

/// The full binary tree of a given height.
#[derive(Debug, Clone, Copy)]
pub struct FullBinaryTree {
    pub height: usize,
}

impl BranchingTree for FullBinaryTree {
    type Cursor = usize;

    fn height(&self) -> usize {
        self.height
    }

    fn root(&self) -> Option<usize> {
        Some(0)
    }

    fn child(&self, at: &usize, _bit: Bit) -> Result<Option<usize>> {
        Ok((*at < self.height).then_some(at + 1))
    }
}

const NO_CHILD: u32 = u32::MAX;

/// A materialized tree: a finite prefix-closed set of paths.
#[derive(Clone)]
pub struct ExplicitTree {
    height: usize,
    // breadth-first order, root at index 0
    paths: Vec<NodePath>,
    index: HashMap<NodePath, u32>,
    kids: Vec<[u32; 2]>,
}

impl ExplicitTree {
    pub fn empty(height: usize) -> Self {
        Self {
            height,
            paths: Vec::new(),
            index: HashMap::new(),
            kids: Vec::new(),
        }
    }

    /// Builds a tree from its node set, checking prefix closure and height.
    pub fn from_paths(height: usize, paths: impl IntoIterator<Item = NodePath>) -> Result<Self> {
        let mut paths: Vec<NodePath> = paths.into_iter().collect();
        paths.sort();
        paths.dedup();
        if let Some(p) = paths.iter().find(|p| p.len() > height) {
            return Err(Error::InvalidTree(format!(
                "node {p} is deeper than the declared height {height}"
            )));
        }
        let index: HashMap<NodePath, u32> = paths
            .iter()
            .enumerate()
            .map(|(i, p)| (p.clone(), i as u32))
            .collect();
        let mut kids = vec![[NO_CHILD; 2]; paths.len()];
        for (i, p) in paths.iter().enumerate() {
            let Some(parent) = p.parent() else { continue };
            let Some(&pi) = index.get(&parent) else {
                return Err(Error::InvalidTree(format!(
                    "node {p} is present but its parent {parent} is not"
                )));
            };
            kids[pi as usize][p.bit(p.len() - 1).index()] = i as u32;
        }
        Ok(Self {
            height,
            paths,
            index,
            kids,
        })
    }

    pub fn full_binary(height: usize) -> Self {
        let mut level = vec![NodePath::root()];
        let mut all = level.clone();
        for _ in 0..height {
            level = level
                .iter()
                .flat_map(|p| Bit::BOTH.map(|b| p.child(b)))
                .collect();
            all.extend(level.iter().cloned());
        }
        Self::from_paths(height, all).expect("full binary tree is prefix-closed")
    }

    /// Parses the line format: one node per line as a 0/1 string, `-` for the
    /// root. An optional `height N` line declares the height (otherwise the
    /// deepest node sets it); blank lines and `#` comments are skipped.
    pub fn parse(text: &str) -> Result<Self> {
        let mut height = None;
        let mut paths = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if let Some(rest) = line.strip_prefix("height") {
                if height.is_some() || !paths.is_empty() {
                    return Err(Error::parse(i + 1, "'height' must come first and only once"));
                }
                height = Some(
                    rest.trim()
                        .parse::<usize>()
                        .map_err(|e| Error::parse(i + 1, format!("bad height: {e}")))?,
                );
                continue;
            }
            let p = line.parse::<NodePath>().map_err(|e| match e {
                Error::Parse { message, .. } => Error::parse(i + 1, message),
                e => e,
            })?;
            paths.push(p);
        }
        let height = height.unwrap_or_else(|| paths.iter().map(NodePath::len).max().unwrap_or(0));
        Self::from_paths(height, paths)
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("height {}\n", self.height);
        for p in &self.paths {
            s.push_str(&p.to_string());
            s.push('\n');
        }
        s
    }

    pub fn len(&self) -> usize {
        self.paths.len()
    }

    pub fn is_empty(&self) -> bool {
        self.paths.is_empty()
    }

    pub fn nodes(&self) -> &[NodePath] {
        &self.paths
    }

    pub fn index_of(&self, p: &NodePath) -> Option<usize> {
        self.index.get(p).map(|&i| i as usize)
    }

    pub fn depth_of(&self, i: usize) -> usize {
        self.paths[i].len()
    }

    /// Index of the `bit` child of node `i`.
    #[inline]
    pub fn child_index(&self, i: usize, bit: Bit) -> Option<usize> {
        let c = self.kids[i][bit.index()];
        (c != NO_CHILD).then_some(c as usize)
    }

    /// Index of the parent of node `i`.
    pub fn parent_index(&self, i: usize) -> Option<usize> {
        self.paths[i].parent().and_then(|p| self.index_of(&p))
    }

    /// Deepest occupied level, if any.
    pub fn deepest(&self) -> Option<usize> {
        self.paths.last().map(NodePath::len)
    }

    /// Number of nodes at each depth `0..=height`.
    pub fn level_counts(&self) -> Vec<usize> {
        let mut r = vec![0; self.height + 1];
        for p in &self.paths {
            r[p.len()] += 1;
        }
        r
    }

    /// `S_i` as a new explicit tree.
    pub fn truncated(&self, depth: usize) -> Result<ExplicitTree> {
        if depth > self.height {
            return Err(Error::DepthOutOfRange {
                depth,
                height: self.height,
            });
        }
        Self::from_paths(
            depth,
            self.paths.iter().filter(|p| p.len() <= depth).cloned(),
        )
    }
}

impl fmt::Debug for ExplicitTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ExplicitTree")
            .field("height", &self.height)
            .field("nodes", &self.paths)
            .finish()
    }
}

impl PartialEq for ExplicitTree {
    fn eq(&self, other: &Self) -> bool {
        self.height == other.height && self.paths == other.paths
    }
}

impl BranchingTree for ExplicitTree {
    type Cursor = u32;

    fn height(&self) -> usize {
        self.height
    }

    fn max_depth(&self) -> usize {
        self.deepest().unwrap_or(0)
    }

    fn root(&self) -> Option<u32> {
        (!self.paths.is_empty()).then_some(0)
    }

    fn child(&self, at: &u32, bit: Bit) -> Result<Option<u32>> {
        let c = self.kids[*at as usize][bit.index()];
        Ok((c != NO_CHILD).then_some(c))
    }

    fn locate(&self, node: &NodePath) -> Result<u32> {
        self.index
            .get(node)
            .copied()
            .ok_or_else(|| Error::NotInTree(node.clone()))
    }
}

/// `|S|` of an explicit tree.
pub fn exact_size(tree: &ExplicitTree) -> usize {
    tree.len()
}

/// Depth-first walk over every node of `tree`, in preorder with the `Zero`
/// child first. The visitor may stop the walk early.
pub fn for_each_node<T, F>(tree: &T, mut visit: F) -> Result<()>
where
    T: BranchingTree + ?Sized,
    F: FnMut(&NodePath) -> ControlFlow<()>,
{
    let Some(root) = tree.root() else {
        return Ok(());
    };
    let mut stack = vec![(root, NodePath::root())];
    while let Some((cur, path)) = stack.pop() {
        if visit(&path).is_break() {
            return Ok(());
        }
        for b in [Bit::One, Bit::Zero] {
            if let Some(c) = tree.child(&cur, b)? {
                stack.push((c, path.child(b)));
            }
        }
    }
    Ok(())
}

/// A random tree of exactly the given height with between `height + 1` and
/// `max_nodes` nodes: a random root-to-depth-`height` spine plus nodes grown
/// at random open slots.
pub fn random_tree<R: Rng + ?Sized>(rng: &mut R, height: usize, max_nodes: usize) -> ExplicitTree {
    assert!(max_nodes > height, "need at least height + 1 nodes");
    let cap = if height < 63 {
        max_nodes.min((1usize << (height + 1)) - 1)
    } else {
        max_nodes
    };
    let target = rng.random_range(height + 1..=cap);

    let mut nodes = vec![NodePath::root()];
    let mut seen: std::collections::HashSet<NodePath> = nodes.iter().cloned().collect();
    let mut spine = NodePath::root();
    for _ in 0..height {
        spine.push(Bit::from(rng.random::<bool>()));
        if seen.insert(spine.clone()) {
            nodes.push(spine.clone());
        }
    }
    // open slots: absent children of nodes above the bottom level
    let mut open: Vec<NodePath> = Vec::new();
    for p in &nodes {
        if p.len() < height {
            for b in Bit::BOTH {
                let c = p.child(b);
                if !seen.contains(&c) {
                    open.push(c);
                }
            }
        }
    }
    while nodes.len() < target && !open.is_empty() {
        let c = open.swap_remove(rng.random_range(0..open.len()));
        if !seen.insert(c.clone()) {
            continue;
        }
        if c.len() < height {
            open.extend(Bit::BOTH.map(|b| c.child(b)));
        }
        nodes.push(c);
    }
    ExplicitTree::from_paths(height, nodes).expect("grown trees are prefix-closed")
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    fn p(s: &str) -> NodePath {
        s.parse().unwrap()
    }

    fn tree(height: usize, nodes: &[&str]) -> ExplicitTree {
        ExplicitTree::from_paths(height, nodes.iter().map(|s| p(s))).unwrap()
    }

    fn node_set<T: BranchingTree>(t: &T) -> Vec<NodePath> {
        let mut out = Vec::new();
        for_each_node(t, |n| {
            out.push(n.clone());
            ControlFlow::Continue(())
        })
        .unwrap();
        out.sort();
        out
    }

    #[test]
    fn path_push_pop_roundtrip_across_word_boundary() {
        let mut path = NodePath::root();
        for i in 0..130 {
            path.push(Bit::from(i % 3 == 0));
        }
        assert_eq!(path.len(), 130);
        assert_eq!(path.bit(129), Bit::from(129 % 3 == 0));
        for _ in 0..70 {
            path.pop();
        }
        let mut rebuilt = NodePath::root();
        for i in 0..60 {
            rebuilt.push(Bit::from(i % 3 == 0));
        }
        assert_eq!(path, rebuilt);
    }

    #[test]
    fn path_display_and_parse() {
        assert_eq!(NodePath::root().to_string(), "-");
        assert_eq!(p("0110").to_string(), "0110");
        assert!("01a".parse::<NodePath>().is_err());
        assert!(p("111").is_rightmost());
        assert!(!p("101").is_rightmost());
    }

    #[test]
    fn children_of_full_binary_root() {
        let t = FullBinaryTree { height: 2 };
        let c = t.children(&NodePath::root()).unwrap();
        assert_eq!(c.paths(&NodePath::root()), vec![p("0"), p("1")]);
        assert_eq!(t.children(&p("01")).unwrap(), Children::NONE);
    }

    #[test]
    fn children_of_chain_tree() {
        let t = tree(2, &["-", "1", "11"]);
        assert_eq!(t.children(&p("1")).unwrap().paths(&p("1")), vec![p("11")]);
    }

    #[test]
    fn children_of_single_root() {
        let t = tree(0, &["-"]);
        assert_eq!(t.children(&NodePath::root()).unwrap().count(), 0);
    }

    #[test]
    fn children_outside_tree_is_an_error() {
        let t = tree(2, &["-", "1", "11"]);
        assert!(matches!(t.children(&p("0")), Err(Error::NotInTree(_))));
        let full = FullBinaryTree { height: 2 };
        assert!(matches!(full.children(&p("010")), Err(Error::NotInTree(_))));
    }

    #[test]
    fn truncate_full_binary() {
        let full = FullBinaryTree { height: 2 };
        let s0 = truncate(&full, 0).unwrap();
        assert_eq!(s0.height(), 0);
        assert_eq!(node_set(&s0), vec![NodePath::root()]);
        let s1 = truncate(&full, 1).unwrap();
        assert_eq!(node_set(&s1), vec![NodePath::root(), p("0"), p("1")]);
        assert!(matches!(truncate(&full, 3), Err(Error::DepthOutOfRange { .. })));
    }

    #[test]
    fn truncate_chain_tree() {
        let t = tree(2, &["-", "1", "11"]);
        let s1 = truncate(&t, 1).unwrap();
        assert_eq!(node_set(&s1), vec![NodePath::root(), p("1")]);
        assert_eq!(s1.children(&p("1")).unwrap(), Children::NONE);
    }

    #[test]
    fn exact_sizes() {
        assert_eq!(exact_size(&ExplicitTree::full_binary(2)), 7);
        assert_eq!(exact_size(&tree(2, &["-", "1", "11"])), 3);
        assert_eq!(exact_size(&ExplicitTree::empty(3)), 0);
        assert!(ExplicitTree::empty(3).is_empty());
    }

    #[test]
    fn loader_rejects_missing_prefix() {
        let err = ExplicitTree::parse("-\n11\n").unwrap_err();
        assert!(matches!(err, Error::InvalidTree(_)));
    }

    #[test]
    fn loader_rejects_nodes_below_declared_height() {
        let err = ExplicitTree::parse("height 1\n-\n1\n11\n").unwrap_err();
        assert!(matches!(err, Error::InvalidTree(_)));
    }

    #[test]
    fn loader_reads_root_token_and_infers_height() {
        let t = ExplicitTree::parse("# chain\n-\n1\n11\n").unwrap();
        assert_eq!(t.height(), 2);
        assert_eq!(t.len(), 3);
        assert_eq!(ExplicitTree::parse(&t.to_text()).unwrap(), t);
        let empty = ExplicitTree::parse("").unwrap();
        assert!(empty.is_empty());
    }

    #[test]
    fn random_trees_reach_their_height() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for h in 0..12 {
            let t = random_tree(&mut rng, h, 200);
            assert_eq!(t.height(), h);
            assert_eq!(t.deepest(), Some(h));
            assert!(t.len() <= 200);
        }
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn arb_tree() -> impl Strategy<Value = ExplicitTree> {
            (0usize..9, 1usize..120, any::<u64>()).prop_map(|(h, extra, seed)| {
                let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
                random_tree(&mut rng, h, h + extra)
            })
        }

        proptest! {
            #[test]
            fn truncation_composes(t in arb_tree()) {
                let h = t.height();
                for i in 0..=h {
                    for j in 0..=i {
                        let twice = truncate(&t, i).unwrap().truncate(j).unwrap();
                        let once = truncate(&t, j).unwrap();
                        prop_assert_eq!(node_set(&twice), node_set(&once));
                        prop_assert_eq!(twice.height(), j);
                    }
                }
            }

            #[test]
            fn full_truncation_keeps_size(t in arb_tree()) {
                let whole = truncate(&t, t.height()).unwrap();
                prop_assert_eq!(node_set(&whole).len(), exact_size(&t));
            }

            #[test]
            fn explicit_trees_are_prefix_closed(t in arb_tree()) {
                for n in t.nodes() {
                    for k in 0..n.len() {
                        prop_assert!(t.index_of(&n.prefix(k)).is_some());
                    }
                }
            }

            #[test]
            fn oracle_matches_node_set(t in arb_tree()) {
                for n in t.nodes() {
                    let c = t.children(n).unwrap();
                    for b in Bit::BOTH {
                        prop_assert_eq!(c.has(b), t.index_of(&n.child(b)).is_some());
                    }
                }
            }
        }
    }
}
