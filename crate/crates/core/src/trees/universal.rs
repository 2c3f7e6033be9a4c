use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap};

use serde::{Deserialize, Serialize};

use super::{OrderedTree, Shape};
use crate::error::{Error, Limits, Result};

/// Whether `t` embeds into `big` with roots mapped to each other and the children
/// of every node mapped injectively and in order.
pub fn embeds(t: &OrderedTree, big: &OrderedTree) -> bool {
    let mut memo = vec![0u8; t.num_nodes() * big.num_nodes()];
    embeds_at(t, big, t.root(), big.root(), &mut memo)
}

fn embeds_at(t: &OrderedTree, big: &OrderedTree, x: usize, y: usize, memo: &mut [u8]) -> bool {
    let key = x * big.num_nodes() + y;
    match memo[key] {
        1 => return false,
        2 => return true,
        _ => {}
    }
    // Leftmost greedy matching of child sequences is optimal for subsequence embedding.
    let targets = big.children(y);
    let mut j = 0;
    let mut ok = true;
    for &c in t.children(x) {
        loop {
            if j == targets.len() {
                ok = false;
                break;
            }
            let hit = embeds_at(t, big, c, targets[j], memo);
            j += 1;
            if hit {
                break;
            }
        }
        if !ok {
            break;
        }
    }
    memo[key] = if ok { 2 } else { 1 };
    ok
}

/// Number of ordered trees with exactly `l` leaves, all at depth `h`.
pub fn count_trees(l: usize, h: usize) -> u128 {
    if h == 0 {
        return u128::from(l == 1);
    }
    let below: Vec<u128> = (0..=l).map(|a| count_trees(a, h - 1)).collect();
    // seq[m] = number of child sequences with m leaves in total.
    let mut seq = vec![0u128; l + 1];
    seq[0] = 1;
    for m in 1..=l {
        seq[m] = (1..=m).fold(0u128, |acc, a| acc.saturating_add(below[a].saturating_mul(seq[m - a])));
    }
    if l == 0 {
        0
    } else {
        seq[l]
    }
}

/// All ordered trees with exactly `l` leaves, all at depth exactly `h`.
pub fn enumerate_trees(l: usize, h: usize, limits: &Limits) -> Result<Vec<Shape>> {
    let count = count_trees(l, h);
    if count > limits.max_enumerated as u128 {
        return Err(Error::cap("enumerated trees", count, limits.max_enumerated as u128));
    }
    let mut memo = HashMap::new();
    Ok(trees(l, h, &mut memo))
}

fn trees(l: usize, h: usize, memo: &mut HashMap<(usize, usize), Vec<Shape>>) -> Vec<Shape> {
    if h == 0 {
        return if l == 1 { vec![Shape::leaf()] } else { Vec::new() };
    }
    if let Some(v) = memo.get(&(l, h)) {
        return v.clone();
    }
    let below: Vec<Vec<Shape>> = (0..=l).map(|a| trees(a, h - 1, memo)).collect();
    // sequences[m] = child lists whose subtrees hold m leaves in total.
    let mut sequences: Vec<Vec<Vec<Shape>>> = vec![Vec::new(); l + 1];
    sequences[0].push(Vec::new());
    for m in 1..=l {
        let mut out = Vec::new();
        for a in 1..=m {
            for first in &below[a] {
                for rest in &sequences[m - a] {
                    let mut children = Vec::with_capacity(rest.len() + 1);
                    children.push(first.clone());
                    children.extend(rest.iter().cloned());
                    out.push(children);
                }
            }
        }
        sequences[m] = out;
    }
    let result: Vec<Shape> = if l == 0 {
        Vec::new()
    } else {
        std::mem::take(&mut sequences[l]).into_iter().map(Shape).collect()
    };
    memo.insert((l, h), result.clone());
    result
}

/// Whether every ordered tree of height at most `h` with at most `l` leaves embeds into `big`.
///
/// It suffices to check trees with exactly `l` leaves all at depth `h`: any
/// smaller tree embeds into one of those.
pub fn is_universal(big: &OrderedTree, l: usize, h: usize, limits: &Limits) -> Result<bool> {
    if l == 0 || h == 0 {
        return Ok(true);
    }
    if big.height() < h {
        return Ok(false);
    }
    for shape in enumerate_trees(l, h, limits)? {
        if !embeds(&OrderedTree::from_shape(&shape), big) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// A smallest `(ℓ,h)`-universal tree found by exhaustive search.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MinUniversal {
    pub leaves: usize,
    pub height: usize,
    pub size: usize,
    pub witness: Shape,
}

pub fn min_universal_size(l: usize, h: usize) -> Result<usize> {
    Ok(min_universal(l, h, &Limits::default())?.size)
}

/// Exact minimum over trees of height `h` that are `(ℓ,h)`-universal.
///
/// Only the root's child sequence `C_1 … C_k` is searched; children are
/// full-depth trees of height `h-1` with at most `min(ℓ,h-1)` leaves, since a
/// smallest `(ℓ,h-1)`-universal tree hosts everything a larger child could.
///
/// A suffix `X` of the sequence hosts every forest of total size `b` iff for every
/// subtree type `τ` with `|τ| ≤ b`, the part of `X` after the first child hosting
/// `τ` hosts every forest of size `b - |τ|`. So the sequence is built right to
/// left and the search state is, per type, the capacity of the suffix after its
/// first host. A* over these states with cost = leaves.
pub fn min_universal(l: usize, h: usize, limits: &Limits) -> Result<MinUniversal> {
    if l == 0 {
        return Err(Error::InvalidTree("a universal tree needs ℓ ≥ 1".into()));
    }
    if h == 0 {
        return Ok(MinUniversal {
            leaves: l,
            height: 0,
            size: 1,
            witness: Shape::leaf(),
        });
    }

    let mut types: Vec<(usize, OrderedTree)> = Vec::new();
    for a in 1..=l {
        for shape in enumerate_trees(a, h - 1, limits)? {
            types.push((a, OrderedTree::from_shape(&shape)));
        }
    }

    let below = min_universal(l, h - 1, limits)?.size;
    let mut by_capability: HashMap<Vec<bool>, (usize, Shape)> = HashMap::new();
    let mut visited = 0usize;
    for a in 1..=below {
        for shape in enumerate_trees(a, h - 1, limits)? {
            visited += 1;
            if visited > limits.max_enumerated {
                return Err(Error::cap("candidate subtrees", visited as u128, limits.max_enumerated as u128));
            }
            let tree = OrderedTree::from_shape(&shape);
            let hosts: Vec<bool> = types.iter().map(|(_, ty)| embeds(ty, &tree)).collect();
            by_capability.entry(hosts).or_insert((a, shape));
        }
    }
    let mut pool: Vec<(Vec<bool>, usize, Shape)> = by_capability.into_iter().map(|(c, (a, s))| (c, a, s)).collect();
    pool.sort_by(|x, y| (x.1, &x.2).cmp(&(y.1, &y.2)));
    let covers = |a: &[bool], b: &[bool]| a.iter().zip(b).all(|(x, y)| !*x || *y);
    let pool: Vec<(Vec<bool>, usize, Shape)> = pool
        .iter()
        .enumerate()
        .filter(|&(i, (cap, a, _))| {
            !pool.iter().enumerate().any(|(j, (other, b, _))| {
                j != i && covers(cap, other) && (b < a || (b == a && (other != cap || j < i)))
            })
        })
        .map(|(_, x)| x.clone())
        .collect();

    // State: per type, capacity of the suffix after its first host (-1: no host yet),
    // clamped to what that type can still need. The suffix capacity itself is derived.
    let capacity = |phi: &[i8]| -> usize {
        (0..=l)
            .take_while(|&b| types.iter().zip(phi).all(|(&(size, _), &f)| size > b || f >= (b - size) as i8))
            .last()
            .unwrap_or(0)
    };
    // Each prepended child raises the capacity by at most one, and every type that
    // still lacks a good enough host needs a child with at least as many leaves.
    let remaining = |phi: &[i8]| -> usize {
        let lacking = types
            .iter()
            .zip(phi)
            .filter(|(&(size, _), &f)| f < (l - size) as i8)
            .map(|(&(size, _), _)| size)
            .max()
            .unwrap_or(0);
        (l - capacity(phi).min(l)).max(lacking)
    };
    let start: Vec<i8> = vec![-1; types.len()];
    let mut best: HashMap<Vec<i8>, (usize, Option<(Vec<i8>, usize)>)> = HashMap::new();
    best.insert(start.clone(), (0, None));
    let mut heap = BinaryHeap::new();
    heap.push(Reverse((0usize, 0usize, start)));
    let mut expanded: Vec<(usize, Vec<i8>)> = Vec::new();
    while let Some(Reverse((_, cost, phi))) = heap.pop() {
        if best.get(&phi).is_some_and(|&(c, _)| c < cost) {
            continue;
        }
        // Transitions are monotone in the state, so a pointwise-larger state that
        // was reached at most as cheaply makes this one redundant.
        if expanded
            .iter()
            .any(|(c, e): &(usize, Vec<i8>)| *c <= cost && e.iter().zip(&phi).all(|(a, b)| a >= b))
        {
            continue;
        }
        expanded.push((cost, phi.clone()));
        let cap = capacity(&phi);
        if cap >= l {
            let mut children = Vec::new();
            let mut cur = phi;
            while let Some((prev, cand)) = best[&cur].1.clone() {
                children.push(pool[cand].2.clone());
                cur = prev;
            }
            return Ok(MinUniversal {
                leaves: l,
                height: h,
                size: cost,
                witness: Shape(children),
            });
        }
        if best.len() > limits.max_states {
            return Err(Error::cap("universal-tree search states", best.len() as u128, limits.max_states as u128));
        }
        for (ci, (hosts, a, _)) in pool.iter().enumerate() {
            let next: Vec<i8> = phi
                .iter()
                .zip(hosts)
                .zip(&types)
                .map(|((&f, &host), &(size, _))| if host { cap.min(l - size) as i8 } else { f })
                .collect();
            if next == phi {
                continue;
            }
            let c = cost + a;
            if best.get(&next).is_none_or(|&(old, _)| c < old) {
                best.insert(next.clone(), (c, Some((phi.clone(), ci))));
                let estimate = c + remaining(&next);
                heap.push(Reverse((estimate, c, next)));
            }
        }
    }
    unreachable!("repeating a smallest (ℓ,h-1)-universal child always reaches capacity ℓ")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trees::{full_tree, succinct_tree};

    fn flat(k: usize) -> OrderedTree {
        OrderedTree::from_shape(&Shape(vec![Shape::leaf(); k]))
    }

    #[test]
    fn embedding_examples() {
        let leaf = OrderedTree::from_shape(&Shape::leaf());
        assert!(embeds(&leaf, &flat(2)));
        assert!(!embeds(&flat(3), &flat(2)));
        // root → one child → two leaves, into root → {1-leaf child, 2-leaf child}
        let t = OrderedTree::from_shape(&Shape(vec![Shape(vec![Shape::leaf(), Shape::leaf()])]));
        let big = OrderedTree::from_shape(&Shape(vec![
            Shape(vec![Shape::leaf()]),
            Shape(vec![Shape::leaf(), Shape::leaf()]),
        ]));
        assert!(embeds(&t, &big));
        assert!(!embeds(&big, &t));
    }

    #[test]
    fn enumeration_counts() {
        let lim = Limits::default();
        assert_eq!(enumerate_trees(1, 3, &lim).unwrap().len(), 1);
        assert_eq!(enumerate_trees(2, 1, &lim).unwrap().len(), 1);
        assert_eq!(enumerate_trees(2, 2, &lim).unwrap().len(), 2);
        for l in 1..=6 {
            assert_eq!(count_trees(l, 2), 1 << (l - 1));
        }
        assert_eq!(count_trees(4, 3), 27);
        assert_eq!(count_trees(5, 3), 81);
        let all = enumerate_trees(5, 3, &lim).unwrap();
        let distinct: std::collections::BTreeSet<_> = all.iter().collect();
        assert_eq!(distinct.len(), all.len());
        assert!(all.iter().all(|s| s.leaves() == 5 && OrderedTree::from_shape(s).is_full_depth()));
    }

    #[test]
    fn enumeration_cap() {
        let lim = Limits {
            max_enumerated: 10,
            ..Limits::default()
        };
        assert!(matches!(enumerate_trees(5, 3, &lim), Err(Error::CapExceeded { .. })));
    }

    #[test]
    fn universality_examples() {
        let lim = Limits::default();
        assert!(is_universal(&full_tree(3, 2).unwrap(), 3, 2, &lim).unwrap());
        assert!(!is_universal(&flat(2), 3, 1, &lim).unwrap());
        let t = OrderedTree::from_shape(&Shape(vec![
            Shape(vec![Shape::leaf()]),
            Shape(vec![Shape::leaf(), Shape::leaf()]),
        ]));
        assert!(is_universal(&t, 2, 2, &lim).unwrap());
        assert!(is_universal(&succinct_tree(4, 2).unwrap(), 4, 2, &lim).unwrap());
    }

    #[test]
    fn small_minima() {
        assert_eq!(min_universal_size(2, 1).unwrap(), 2);
        assert_eq!(min_universal_size(3, 1).unwrap(), 3);
        assert_eq!(min_universal_size(2, 2).unwrap(), 3);
    }

    #[test]
    fn witness_is_universal_and_minimal() {
        let lim = Limits::default();
        for (l, h) in [(3, 2), (4, 2), (3, 3)] {
            let m = min_universal(l, h, &lim).unwrap();
            let w = OrderedTree::from_shape(&m.witness);
            assert_eq!(w.size(), m.size);
            assert!(is_universal(&w, l, h, &lim).unwrap());
        }
    }

    /// Plain exhaustive search over every full-depth tree, smallest first.
    fn brute_min(l: usize, h: usize) -> usize {
        let lim = Limits::default();
        (1..)
            .find(|&size| {
                enumerate_trees(size, h, &lim)
                    .unwrap()
                    .iter()
                    .any(|s| is_universal(&OrderedTree::from_shape(s), l, h, &lim).unwrap())
            })
            .unwrap()
    }

    #[test]
    fn search_matches_plain_enumeration() {
        for (l, h) in [(1, 2), (2, 2), (3, 2), (4, 2), (5, 2), (2, 3), (3, 3)] {
            assert_eq!(min_universal_size(l, h).unwrap(), brute_min(l, h), "({l},{h})");
        }
    }
}
