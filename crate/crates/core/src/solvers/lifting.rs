use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use super::Solution;
use crate::error::{Error, Result};
use crate::game::{EdgeId, ParityGame, Player, Priority};
use crate::trees::{truncation_len, LeafQuery, OrderedTree};

/// A map from vertices to leaves of a tree (by index in leaf order); `None` is ⊤.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreeLabelling {
    pub labels: Vec<Option<usize>>,
}

impl TreeLabelling {
    pub fn is_top(&self, v: usize) -> bool {
        self.labels[v].is_none()
    }

    /// Pointwise comparison with ⊤ above every leaf.
    pub fn le(&self, other: &TreeLabelling) -> bool {
        let rank = |x: Option<usize>| x.map_or(usize::MAX, |i| i);
        self.labels.len() == other.labels.len()
            && self.labels.iter().zip(&other.labels).all(|(&a, &b)| rank(a) <= rank(b))
    }
}

/// Output of [`lift_solve`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LiftResult {
    /// Winners and Even's positional strategy; `odd_strategy` is `None`.
    pub solution: Solution,
    pub labelling: TreeLabelling,
    /// Number of times a label was raised.
    pub lift_count: u64,
}

// Labels inside the solver: leaf index, or `top` = number of leaves.
struct Lifter<'a> {
    t: &'a OrderedTree,
    d: Priority,
    top: usize,
}

impl Lifter<'_> {
    /// Least label of `v` compatible with moving along an edge of priority `p` to a vertex labelled `target`.
    fn requirement(&self, p: Priority, target: usize) -> usize {
        if target == self.top {
            return self.top;
        }
        let leaf = self.t.leaf(target);
        let reference = &leaf[..truncation_len(self.d, p)];
        let mode = if p.is_multiple_of(2) { LeafQuery::MinGeq } else { LeafQuery::MinGt };
        self.t.leaf_query(mode, p, reference).unwrap_or(self.top)
    }

    fn lift(&self, g: &ParityGame, mu: &[usize], v: usize) -> usize {
        let reqs = g.out_edges(v).iter().map(|e| self.requirement(e.pri, mu[e.dst]));
        match g.owner(v) {
            Player::Even => reqs.min(),
            Player::Odd => reqs.max(),
        }
        .expect("every vertex has a successor")
    }
}

fn check_tree(g: &ParityGame, t: &OrderedTree) -> Result<()> {
    t.require_full_depth((g.bound() / 2) as usize)
}

/// Progress-measure lifting: the least fixpoint of the lift operator from the
/// all-smallest-leaf labelling, computed with a work-list.
///
/// Vertices not labelled ⊤ are Even's winning region provided `t` is
/// `(n, d/2)`-universal for the game's `n` and `d`.
pub fn lift_solve(g: &ParityGame, t: &OrderedTree) -> Result<LiftResult> {
    check_tree(g, t)?;
    let n = g.num_vertices();
    let lifter = Lifter {
        t,
        d: g.bound(),
        top: t.size(),
    };
    let preds = g.graph().in_edges();
    let mut mu = vec![0usize; n];
    let mut queued = vec![true; n];
    let mut queue: VecDeque<usize> = (0..n).collect();
    let mut lift_count = 0u64;
    while let Some(v) = queue.pop_front() {
        queued[v] = false;
        if mu[v] == lifter.top {
            continue;
        }
        let new = lifter.lift(g, &mu, v);
        if new > mu[v] {
            mu[v] = new;
            lift_count += 1;
            for &id in &preds[v] {
                let w = g.edge(id).src;
                if !queued[w] && mu[w] != lifter.top {
                    queued[w] = true;
                    queue.push_back(w);
                }
            }
        }
    }
    let winner: Vec<Player> = mu
        .iter()
        .map(|&m| if m == lifter.top { Player::Odd } else { Player::Even })
        .collect();
    let even_strategy = (0..n)
        .map(|v| {
            if g.owner(v) != Player::Even || winner[v] != Player::Even {
                return None;
            }
            g.out_edge_ids(v).min_by_key(|&id| {
                let e = g.edge(id);
                lifter.requirement(e.pri, mu[e.dst])
            })
        })
        .collect();
    Ok(LiftResult {
        solution: Solution {
            winner,
            even_strategy: Some(even_strategy),
            odd_strategy: None,
        },
        labelling: TreeLabelling {
            labels: mu.iter().map(|&m| (m != lifter.top).then_some(m)).collect(),
        },
        lift_count,
    })
}

fn edge_progresses(t: &OrderedTree, d: Priority, p: Priority, from: usize, to: usize) -> bool {
    let len = truncation_len(d, p);
    let (a, b) = (&t.leaf(from)[..len], &t.leaf(to)[..len]);
    if p.is_multiple_of(2) {
        a >= b
    } else {
        a > b
    }
}

/// Whether `mu` is a progress measure on the strategy subgraph of `sigma`:
/// every edge of priority `p` from `v` to `u` has `μ(v)|_p ≥ μ(u)|_p`, strictly
/// when `p` is odd.
pub fn check_progress_measure(
    g: &ParityGame,
    t: &OrderedTree,
    sigma: &[Option<EdgeId>],
    mu: &TreeLabelling,
) -> Result<bool> {
    if let Some(v) = mu.labels.iter().position(Option::is_none) {
        return Err(Error::PartialLabelling(v));
    }
    Ok(check_progress_measure_on(g, t, sigma, mu, &vec![true; g.num_vertices()]))
}

/// [`check_progress_measure`] restricted to `region`, which the strategy
/// subgraph must not leave.
pub fn check_progress_measure_on(
    g: &ParityGame,
    t: &OrderedTree,
    sigma: &[Option<EdgeId>],
    mu: &TreeLabelling,
    region: &[bool],
) -> bool {
    let n = g.num_vertices();
    if check_tree(g, t).is_err() || mu.labels.len() != n || sigma.len() != n || region.len() != n {
        return false;
    }
    let d = g.bound();
    let edge_ok = |id: EdgeId| {
        let e = g.edge(id);
        match (mu.labels[e.src], mu.labels[e.dst]) {
            (Some(a), Some(b)) if region[e.dst] && a < t.size() && b < t.size() => {
                edge_progresses(t, d, e.pri, a, b)
            }
            _ => false,
        }
    };
    (0..n).filter(|&v| region[v]).all(|v| match g.owner(v) {
        Player::Even => sigma[v].is_some_and(|id| g.out_edge_ids(v).contains(&id) && edge_ok(id)),
        Player::Odd => g.out_edge_ids(v).all(edge_ok),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::Edge;
    use crate::solvers::{verify_region, zielonka};
    use crate::trees::{full_tree, succinct_tree};

    #[test]
    fn self_loops() {
        let t = full_tree(1, 1).unwrap();
        let even = ParityGame::new(vec![Player::Even], vec![Edge::new(0, 0, 2)]).unwrap();
        let r = lift_solve(&even, &t).unwrap();
        assert_eq!(r.labelling.labels, vec![Some(0)]);
        assert_eq!(r.solution.winner, vec![Player::Even]);
        assert!(check_progress_measure(&even, &t, &r.solution.even_strategy.unwrap(), &r.labelling).unwrap());

        let odd = ParityGame::new(vec![Player::Even], vec![Edge::new(0, 0, 1)]).unwrap();
        let r = lift_solve(&odd, &t).unwrap();
        assert_eq!(r.labelling.labels, vec![None]);
        assert_eq!(r.solution.winner, vec![Player::Odd]);
    }

    #[test]
    fn progress_measure_examples() {
        let t = full_tree(2, 1).unwrap();
        let odd = ParityGame::new(vec![Player::Odd], vec![Edge::new(0, 0, 1)]).unwrap();
        for leaf in 0..2 {
            let mu = TreeLabelling { labels: vec![Some(leaf)] };
            assert!(!check_progress_measure(&odd, &t, &[None], &mu).unwrap());
        }
        let top = TreeLabelling { labels: vec![None] };
        assert!(matches!(
            check_progress_measure(&odd, &t, &[None], &top),
            Err(Error::PartialLabelling(0))
        ));
    }

    #[test]
    fn rejects_wrong_height() {
        let g = ParityGame::new(vec![Player::Even], vec![Edge::new(0, 0, 4)]).unwrap();
        assert!(lift_solve(&g, &full_tree(2, 1).unwrap()).is_err());
    }

    #[test]
    fn agrees_with_zielonka_and_certifies() {
        use crate::generate::{random_game, GameParams};
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for _ in 0..60 {
            let n = rand::Rng::random_range(&mut rng, 1..=8);
            let g = random_game(&GameParams { n, d: 6, max_out: 3 }, &mut rng).unwrap();
            let t = succinct_tree(n, 3).unwrap();
            let r = lift_solve(&g, &t).unwrap();
            let z = zielonka(&g);
            assert_eq!(r.solution.winner, z.winner);
            let sigma = r.solution.even_strategy.as_ref().unwrap();
            assert!(verify_region(&g, &r.solution.winner, Player::Even, sigma));
            let region = r.solution.even_set();
            assert!(check_progress_measure_on(&g, &t, sigma, &r.labelling, &region));
        }
    }

    /// Every progress measure on Even's region (with ⊤ elsewhere) bounds the lifted labelling from above.
    #[test]
    fn lifted_labelling_is_least() {
        use crate::generate::{random_game, GameParams};
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(6);
        let t = full_tree(3, 2).unwrap();
        for _ in 0..25 {
            let g = random_game(&GameParams { n: 3, d: 4, max_out: 2 }, &mut rng).unwrap();
            let r = lift_solve(&g, &t).unwrap();
            let region = r.solution.even_set();
            let inside: Vec<usize> = (0..3).filter(|&v| region[v]).collect();
            let total = t.size().pow(inside.len() as u32);
            for code in 0..total {
                let mut labels = vec![None; 3];
                let mut c = code;
                for &v in &inside {
                    labels[v] = Some(c % t.size());
                    c /= t.size();
                }
                let nu = TreeLabelling { labels };
                // Best Even move for nu: any edge that progresses.
                let sigma: Vec<Option<EdgeId>> = (0..3)
                    .map(|v| {
                        g.out_edge_ids(v).find(|&id| {
                            let e = g.edge(id);
                            region[e.dst] && edge_progresses(&t, 4, e.pri, nu.labels[v].unwrap_or(0), nu.labels[e.dst].unwrap_or(0))
                        })
                    })
                    .collect();
                if check_progress_measure_on(&g, &t, &sigma, &nu, &region) {
                    assert!(r.labelling.le(&nu));
                }
            }
        }
    }
}
