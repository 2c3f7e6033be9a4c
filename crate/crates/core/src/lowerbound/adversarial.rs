use crate::error::{Error, Result};
use crate::game::{Edge, GameGraph, Priority};
use crate::trees::OrderedTree;

fn check_tree(t: &OrderedTree, d: Priority) -> Result<()> {
    if d == 0 || !d.is_multiple_of(2) {
        return Err(Error::InvalidTree(format!("d = {d} must be a positive even number")));
    }
    t.require_full_depth((d / 2) as usize)
}

fn common_prefix(a: &[u32], b: &[u32]) -> usize {
    a.iter().zip(b).take_while(|(x, y)| x == y).count()
}

/// The even graph of a tree: one vertex per leaf (in leaf order). For leaves
/// `i < j` whose deepest common ancestor has depth `c`, with `p = d − 2c`, there
/// is an edge `i → j` of priority `p` and an edge `j → i` of priority `p − 1`.
/// Every vertex has a self-loop of each even priority.
pub fn build_gt(t: &OrderedTree, d: Priority) -> Result<GameGraph> {
    check_tree(t, d)?;
    let n = t.size();
    let mut edges = Vec::new();
    for i in 0..n {
        for p in (2..=d).step_by(2) {
            edges.push(Edge::new(i, i, p));
        }
        for j in i + 1..n {
            let p = d - 2 * common_prefix(t.leaf(i), t.leaf(j)) as Priority;
            edges.push(Edge::new(i, j, p));
            edges.push(Edge::new(j, i, p - 1));
        }
    }
    GameGraph::with_bound(n, d, edges)
}

/// One letter of the adversarial word together with the edge of the graph
/// from [`build_gt`] that produces it.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AlphaStep {
    pub letter: Priority,
    pub from: usize,
    pub to: usize,
}

#[derive(Clone, Copy, Debug)]
enum Task {
    Alpha(usize),
    Beta(usize, u64),
    Step(Priority, usize),
}

/// The adversarial word of a tree, streamed letter by letter.
///
/// For a node `x` at height `k` with children `x_1 < … < x_m`:
/// `α_x = β_{x_m} (2k−1) β_{x_{m−1}} … (2k−1) β_{x_1}` and `β_x = (α_x (2k))^r`,
/// with `α_x = β_x = ε` at leaves. The stream is `α_root` followed by `2` forever.
/// Each letter comes with the graph edge realizing it: `α_x` starts at the
/// largest leaf below `x` and ends at the largest leaf below `x_1`, while `β_x`
/// starts and ends at the largest leaf below `x`.
#[derive(Clone, Debug)]
pub struct AlphaWord {
    t: OrderedTree,
    height: usize,
    r: u64,
    max_leaf: Vec<usize>,
    stack: Vec<Task>,
    at: usize,
}

/// Streams the adversarial word of `t` for `d` and repetition count `r ≥ 1`.
pub fn alpha_word(t: &OrderedTree, d: Priority, r: u64) -> Result<AlphaWord> {
    check_tree(t, d)?;
    if r == 0 {
        return Err(Error::InvalidTree("repetition count must be at least 1".into()));
    }
    let mut max_leaf = vec![0; t.num_nodes()];
    for i in 0..t.size() {
        max_leaf[t.leaf_node(i)] = i;
    }
    // Children come after their parent in the arena, so a reverse sweep sees them first.
    for x in (0..t.num_nodes()).rev() {
        if let Some(&last) = t.children(x).last() {
            max_leaf[x] = max_leaf[last];
        }
    }
    let root = t.root();
    Ok(AlphaWord {
        t: t.clone(),
        height: (d / 2) as usize,
        r,
        at: max_leaf[root],
        max_leaf,
        stack: vec![Task::Alpha(root)],
    })
}

impl AlphaWord {
    /// The vertex the path is currently at.
    pub fn position(&self) -> usize {
        self.at
    }

    fn k(&self, x: usize) -> Priority {
        (self.height - self.t.node_depth(x)) as Priority
    }
}

impl Iterator for AlphaWord {
    type Item = AlphaStep;

    fn next(&mut self) -> Option<AlphaStep> {
        loop {
            let Some(task) = self.stack.pop() else {
                return Some(AlphaStep {
                    letter: 2,
                    from: self.at,
                    to: self.at,
                });
            };
            match task {
                Task::Step(letter, to) => {
                    let step = AlphaStep {
                        letter,
                        from: self.at,
                        to,
                    };
                    self.at = to;
                    return Some(step);
                }
                Task::Alpha(x) => {
                    let children = self.t.children(x);
                    let odd = 2 * self.k(x) - 1;
                    for (i, &c) in children.iter().enumerate() {
                        if i > 0 {
                            self.stack.push(Task::Step(odd, self.max_leaf[children[i - 1]]));
                        }
                        self.stack.push(Task::Beta(c, self.r));
                    }
                }
                Task::Beta(x, left) => {
                    if left == 0 || self.t.children(x).is_empty() {
                        continue;
                    }
                    self.stack.push(Task::Beta(x, left - 1));
                    self.stack.push(Task::Step(2 * self.k(x), self.max_leaf[x]));
                    self.stack.push(Task::Alpha(x));
                }
            }
        }
    }
}

/// Length of the finite part `α_root` of the adversarial word, saturating at `u128::MAX`.
pub fn alpha_len(t: &OrderedTree, r: u64) -> u128 {
    fn go(t: &OrderedTree, x: usize, r: u64) -> (u128, u128) {
        let children = t.children(x);
        if children.is_empty() {
            return (0, 0);
        }
        let mut alpha: u128 = (children.len() - 1) as u128;
        for &c in children {
            alpha = alpha.saturating_add(go(t, c, r).1);
        }
        let beta = (alpha.saturating_add(1)).saturating_mul(r as u128);
        (alpha, beta)
    }
    go(t, t.root(), r).0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::is_even_graph;
    use crate::trees::{full_tree, Shape};

    fn example_tree() -> OrderedTree {
        let shape: Shape = serde_json::from_str("[[[[],[],[]],[[]]],[[[],[]],[[],[]]]]").unwrap();
        OrderedTree::from_shape(&shape)
    }

    /// Direct expansion of the recursive definition.
    fn expand(t: &OrderedTree, x: usize, h: usize, r: u64) -> (Vec<Priority>, Vec<Priority>) {
        let children = t.children(x);
        if children.is_empty() {
            return (vec![], vec![]);
        }
        let k = (h - t.node_depth(x)) as Priority;
        let mut alpha = Vec::new();
        for (i, &c) in children.iter().enumerate().rev() {
            alpha.extend(expand(t, c, h, r).1);
            if i > 0 {
                alpha.push(2 * k - 1);
            }
        }
        let mut beta = Vec::new();
        for _ in 0..r {
            beta.extend(&alpha);
            beta.push(2 * k);
        }
        (alpha, beta)
    }

    #[test]
    fn single_leaf_graph() {
        let t = full_tree(1, 2).unwrap();
        let g = build_gt(&t, 4).unwrap();
        assert_eq!(g.num_vertices(), 1);
        let mut pri: Vec<Priority> = g.edges().iter().map(|e| e.pri).collect();
        pri.sort_unstable();
        assert_eq!(pri, vec![2, 4]);
    }

    #[test]
    fn example_graph_edges() {
        let g = build_gt(&example_tree(), 6).unwrap();
        assert!(is_even_graph(&g));
        let has = |s: usize, t: usize, p: Priority| g.out_edges(s).iter().any(|e| e.dst == t && e.pri == p);
        assert!(has(7, 6, 1));
        assert!(has(6, 7, 2));
        for s in 4..8 {
            for t in 0..4 {
                assert!(has(s, t, 5));
                assert!(has(t, s, 6));
            }
        }
        assert!(has(3, 0, 3));
        assert!(has(0, 2, 2));
    }

    #[test]
    fn stream_matches_expansion_and_walks_the_graph() {
        let t = example_tree();
        let g = build_gt(&t, 6).unwrap();
        for r in 1..=3 {
            let (alpha, _) = expand(&t, t.root(), 3, r);
            assert_eq!(alpha_len(&t, r), alpha.len() as u128);
            let steps: Vec<AlphaStep> = alpha_word(&t, 6, r).unwrap().take(alpha.len() + 5).collect();
            let letters: Vec<Priority> = steps.iter().map(|s| s.letter).collect();
            assert_eq!(&letters[..alpha.len()], &alpha[..]);
            assert!(letters[alpha.len()..].iter().all(|&p| p == 2));
            assert_eq!(steps[0].from, 7);
            for w in steps.windows(2) {
                assert_eq!(w[0].to, w[1].from);
            }
            for s in &steps {
                assert!(g.out_edges(s.from).iter().any(|e| e.dst == s.to && e.pri == s.letter));
            }
        }
    }

    #[test]
    fn leaf_words_are_empty() {
        let t = full_tree(1, 1).unwrap();
        assert_eq!(alpha_len(&t, 5), 0);
        let first = alpha_word(&t, 2, 5).unwrap().next().unwrap();
        assert_eq!(first, AlphaStep { letter: 2, from: 0, to: 0 });
    }
}
