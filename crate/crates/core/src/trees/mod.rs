//! Ordered trees and universal trees.
//!
//! A tree is stored as an arena of nodes whose children are listed in branching
//! order. A node is identified with the sequence of child positions leading to
//! it from the root, so the lexicographic order on nodes is the slice order on
//! those sequences (a proper prefix is smaller).
//!
//! Leaves of height-`d/2` trees are written `⟨m_{d-1}, m_{d-3}, …, m_1⟩`: the
//! first direction belongs to priority `d-1`, the last to priority `1`.

mod bounds;
mod universal;

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

pub use bounds::{binomial, ceil_lg, floor_lg, g_lower, size_bounds, SizeBounds};
pub use universal::{
    count_trees, embeds, enumerate_trees, is_universal, min_universal, min_universal_size, MinUniversal,
};

use crate::error::{Error, Limits, Result};
use crate::game::Priority;

/// Nested-list form of an ordered tree: a node is the list of its children.
///
/// Serializes as nested JSON arrays; a leaf is `[]`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Shape(pub Vec<Shape>);

impl Shape {
    pub fn leaf() -> Shape {
        Shape(Vec::new())
    }

    pub fn node(children: Vec<Shape>) -> Shape {
        Shape(children)
    }

    /// A chain of `h` unary nodes ending in a leaf.
    pub fn path(h: usize) -> Shape {
        (0..h).fold(Shape::leaf(), |acc, _| Shape(vec![acc]))
    }

    pub fn is_leaf(&self) -> bool {
        self.0.is_empty()
    }

    pub fn leaves(&self) -> usize {
        if self.0.is_empty() {
            1
        } else {
            self.0.iter().map(Shape::leaves).sum()
        }
    }

    pub fn height(&self) -> usize {
        self.0.iter().map(|c| c.height() + 1).max().unwrap_or(0)
    }

    /// Extends every leaf shallower than `h` by a unary chain.
    pub fn padded(&self, h: usize) -> Shape {
        if self.0.is_empty() {
            Shape::path(h)
        } else {
            Shape(self.0.iter().map(|c| c.padded(h.saturating_sub(1))).collect())
        }
    }
}

/// An ordered tree with its leaves materialized in lexicographic order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrderedTree {
    children: Vec<Vec<usize>>,
    depth: Vec<usize>,
    height: usize,
    leaves: Vec<Vec<u32>>,
    leaf_nodes: Vec<usize>,
}

impl OrderedTree {
    pub fn from_shape(shape: &Shape) -> OrderedTree {
        let mut tree = OrderedTree {
            children: Vec::new(),
            depth: Vec::new(),
            height: 0,
            leaves: Vec::new(),
            leaf_nodes: Vec::new(),
        };
        // Pre-order traversal in child order visits leaves in lexicographic order.
        let mut path: Vec<u32> = Vec::new();
        let mut stack: Vec<(&Shape, usize, usize)> = Vec::new();
        tree.children.push(Vec::new());
        tree.depth.push(0);
        stack.push((shape, 0, 0));
        loop {
            let Some(&mut (node, id, ref mut next)) = stack.last_mut() else {
                break;
            };
            if node.is_leaf() {
                tree.leaves.push(path.clone());
                tree.leaf_nodes.push(id);
                tree.height = tree.height.max(path.len());
                stack.pop();
                path.pop();
                continue;
            }
            if *next == node.0.len() {
                stack.pop();
                path.pop();
                continue;
            }
            let pos = *next;
            *next += 1;
            let child = tree.children.len();
            tree.children.push(Vec::new());
            tree.depth.push(path.len() + 1);
            tree.children[id].push(child);
            path.push(pos as u32);
            stack.push((&node.0[pos], child, 0));
        }
        tree
    }

    pub fn to_shape(&self) -> Shape {
        fn build(t: &OrderedTree, v: usize) -> Shape {
            Shape(t.children[v].iter().map(|&c| build(t, c)).collect())
        }
        build(self, 0)
    }

    pub fn num_nodes(&self) -> usize {
        self.children.len()
    }

    pub fn root(&self) -> usize {
        0
    }

    pub fn children(&self, node: usize) -> &[usize] {
        &self.children[node]
    }

    pub fn node_depth(&self, node: usize) -> usize {
        self.depth[node]
    }

    pub fn height(&self) -> usize {
        self.height
    }

    /// Number of leaves.
    pub fn size(&self) -> usize {
        self.leaves.len()
    }

    /// Leaves in increasing lexicographic order.
    pub fn leaves(&self) -> &[Vec<u32>] {
        &self.leaves
    }

    pub fn leaf(&self, i: usize) -> &[u32] {
        &self.leaves[i]
    }

    /// Arena id of the `i`-th leaf.
    pub fn leaf_node(&self, i: usize) -> usize {
        self.leaf_nodes[i]
    }

    /// Whether every leaf has depth equal to the height.
    pub fn is_full_depth(&self) -> bool {
        self.leaves.iter().all(|l| l.len() == self.height)
    }

    pub(crate) fn require_full_depth(&self, h: usize) -> Result<()> {
        if self.height != h || !self.is_full_depth() {
            return Err(Error::InvalidTree(format!(
                "expected all leaves at depth {h}, tree has height {} and {} full-depth",
                self.height,
                if self.is_full_depth() { "is" } else { "is not" }
            )));
        }
        Ok(())
    }

    /// The extreme leaf whose `p`-truncation stands in relation `mode` to `reference`.
    ///
    /// Leaves are sorted and truncation is monotone in leaf order, so each query is a
    /// binary search. Returns the leaf's index in [`OrderedTree::leaves`].
    pub fn leaf_query(&self, mode: LeafQuery, p: Priority, reference: &[u32]) -> Option<usize> {
        let len = truncation_len(2 * self.height as Priority, p);
        fn key(l: &[u32], len: usize) -> &[u32] {
            &l[..len.min(l.len())]
        }
        let n = self.leaves.len();
        let first_geq = self.leaves.partition_point(|l| key(l, len) < reference);
        let first_gt = self.leaves.partition_point(|l| key(l, len) <= reference);
        match mode {
            LeafQuery::MaxEq => (first_gt > first_geq).then(|| first_gt - 1),
            LeafQuery::MaxLt => first_geq.checked_sub(1),
            LeafQuery::MinGeq => (first_geq < n).then_some(first_geq),
            LeafQuery::MinGt => (first_gt < n).then_some(first_gt),
        }
    }
}

/// Which extreme leaf [`OrderedTree::leaf_query`] looks for.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LeafQuery {
    /// Largest leaf with truncation equal to the reference.
    MaxEq,
    /// Largest leaf with truncation strictly below the reference.
    MaxLt,
    /// Smallest leaf with truncation at least the reference.
    MinGeq,
    /// Smallest leaf with truncation strictly above the reference.
    MinGt,
}

/// Lexicographic order on nodes; a proper prefix is smaller.
pub fn lex_compare(a: &[u32], b: &[u32]) -> Ordering {
    a.cmp(b)
}

/// Length of the `p`-truncation of a leaf of a height-`d/2` tree.
pub fn truncation_len(d: Priority, p: Priority) -> usize {
    ((d + 1).saturating_sub(p) / 2) as usize
}

/// The `p`-truncation `⟨m_{d-1}, …, m_p⟩` (odd `p`) or `⟨m_{d-1}, …, m_{p+1}⟩` (even `p`).
pub fn truncate(leaf: &[u32], p: Priority, d: Priority) -> Result<&[u32]> {
    if p == 0 || p > d {
        return Err(Error::PriorityOutOfRange { priority: p, bound: d });
    }
    if leaf.len() != (d / 2) as usize {
        return Err(Error::InvalidTree(format!(
            "leaf of length {} in a tree for d = {d}",
            leaf.len()
        )));
    }
    Ok(&leaf[..truncation_len(d, p)])
}

fn checked_pow(n: usize, h: usize) -> Option<u128> {
    let mut acc: u128 = 1;
    for _ in 0..h {
        acc = acc.checked_mul(n as u128)?;
    }
    Some(acc)
}

/// The full `n`-ary tree of height `h`.
pub fn full_tree(n: usize, h: usize) -> Result<OrderedTree> {
    full_tree_within(n, h, &Limits::default())
}

pub fn full_tree_within(n: usize, h: usize, limits: &Limits) -> Result<OrderedTree> {
    if n == 0 {
        return Err(Error::InvalidTree("branching factor must be positive".into()));
    }
    let leaves = checked_pow(n, h).unwrap_or(u128::MAX);
    if leaves > limits.max_leaves as u128 {
        return Err(Error::cap("full tree leaves", leaves, limits.max_leaves as u128));
    }
    let shape = (0..h).fold(Shape::leaf(), |acc, _| Shape(vec![acc; n]));
    Ok(OrderedTree::from_shape(&shape))
}

/// Leaf count of [`succinct_tree`]: `f(ℓ,h) = 2 f(⌊ℓ/2⌋,h) + f(ℓ,h-1)`, `f(ℓ,0) = 1`, `f(0,h) = 0`.
pub fn succinct_leaves(l: usize, h: usize) -> u128 {
    if l == 0 {
        0
    } else if h == 0 {
        1
    } else {
        succinct_leaves(l / 2, h)
            .saturating_mul(2)
            .saturating_add(succinct_leaves(l, h - 1))
    }
}

/// A quasi-polynomial `(ℓ,h)`-universal tree.
///
/// The root's children are those of `T(⌊ℓ/2⌋,h)`, then one child carrying
/// `T(ℓ,h-1)`, then the children of `T(⌊ℓ/2⌋,h)` again.
pub fn succinct_tree(l: usize, h: usize) -> Result<OrderedTree> {
    succinct_tree_within(l, h, &Limits::default())
}

pub fn succinct_tree_within(l: usize, h: usize, limits: &Limits) -> Result<OrderedTree> {
    if l == 0 {
        return Err(Error::InvalidTree("a universal tree needs ℓ ≥ 1".into()));
    }
    let leaves = succinct_leaves(l, h);
    if leaves > limits.max_leaves as u128 {
        return Err(Error::cap("succinct tree leaves", leaves, limits.max_leaves as u128));
    }
    fn build(l: usize, h: usize) -> Shape {
        if h == 0 {
            return Shape::leaf();
        }
        let mut children = Vec::new();
        if l / 2 > 0 {
            children.extend(build(l / 2, h).0);
        }
        children.push(build(l, h - 1));
        if l / 2 > 0 {
            children.extend(build(l / 2, h).0);
        }
        Shape(children)
    }
    Ok(OrderedTree::from_shape(&build(l, h)))
}
