use std::collections::{BTreeMap, VecDeque};

use serde::{Deserialize, Serialize};

use super::safety::{chained_product, check_alphabet, solve_safety, DetProduct, ProductNode, SafetyArena};
use super::{zielonka, Solution};
use crate::automata::SafetyAutomaton;
use crate::error::{Limits, Result};
use crate::game::{EdgeId, ParityGame, Player, PositionalStrategy, Priority};

/// Output of [`solve_by_separation`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeparationSolution {
    /// Winners read off the product at the automaton's initial state. Even's
    /// strategy needs memory and is not positional, so `even_strategy` is `None`;
    /// `odd_strategy` comes from Zielonka's algorithm.
    pub solution: Solution,
    /// Even's move at `(v, initial state)` for every Even vertex she wins.
    pub initial_moves: PositionalStrategy,
    pub product_states: usize,
}

enum Product<'a> {
    Det(DetProduct<'a>),
    Explicit(super::ChainedProduct),
}

/// A winning safety region with a way to pick Even's moves in it.
struct Solved<'a> {
    product: Product<'a>,
    safe: Vec<bool>,
}

impl<'a> Solved<'a> {
    fn new(g: &'a ParityGame, a: &'a SafetyAutomaton, limits: &Limits) -> Result<Self> {
        check_alphabet(g, a)?;
        let (product, safe) = if a.is_deterministic() {
            let p = DetProduct::new(g, a, limits)?;
            let safe = solve_safety(&p);
            (Product::Det(p), safe)
        } else {
            let p = chained_product(g, a, limits)?;
            let safe = solve_safety(&p.game);
            (Product::Explicit(p), safe)
        };
        Ok(Solved { product, safe })
    }

    fn pair(&self, v: usize, q: usize) -> usize {
        match &self.product {
            Product::Det(p) => p.id(v, q),
            Product::Explicit(p) => p.pair(v, q),
        }
    }

    fn size(&self) -> usize {
        self.safe.len()
    }

    /// Product vertex reached from memory `q` along game edge `e`.
    fn step(&self, g: &ParityGame, q: usize, e: EdgeId) -> usize {
        match &self.product {
            Product::Det(p) => p.successor(q, e),
            Product::Explicit(p) => {
                let edge = g.edge(e);
                p.choice(edge.dst, q, edge.pri).expect("choice vertex of every game edge")
            }
        }
    }

    /// Lowest-id edge from `(v,q)` into the safe region.
    fn safe_move(&self, g: &ParityGame, v: usize, q: usize) -> Option<EdgeId> {
        g.out_edge_ids(v).find(|&e| self.safe[self.step(g, q, e)])
    }
}

/// Solves `g` through the safety game `G ▷ A`: Even wins from `v` iff she wins
/// the product from `(v, initial)`. Correct whenever `A` is a separator for the
/// game's size and priorities (good-for-separation if nondeterministic).
pub fn solve_by_separation(g: &ParityGame, a: &SafetyAutomaton, limits: &Limits) -> Result<SeparationSolution> {
    let solved = Solved::new(g, a, limits)?;
    let n = g.num_vertices();
    let q0 = a.initial();
    let winner: Vec<Player> = (0..n)
        .map(|v| if solved.safe[solved.pair(v, q0)] { Player::Even } else { Player::Odd })
        .collect();
    let initial_moves = (0..n)
        .map(|v| {
            (g.owner(v) == Player::Even && winner[v] == Player::Even)
                .then(|| solved.safe_move(g, v, q0))
                .flatten()
        })
        .collect();
    let z = zielonka(g);
    let zodd = z.odd_strategy.expect("zielonka returns both strategies");
    let odd_strategy = (0..n)
        .map(|v| if winner[v] == Player::Odd && z.winner[v] == Player::Odd { zodd[v] } else { None })
        .collect();
    Ok(SeparationSolution {
        solution: Solution {
            winner,
            even_strategy: None,
            odd_strategy: Some(odd_strategy),
        },
        initial_moves,
        product_states: solved.size(),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MemoryMove {
    pub vertex: usize,
    pub memory: usize,
    pub edge: EdgeId,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MemoryUpdate {
    /// Vertex being entered.
    pub vertex: usize,
    pub memory: usize,
    pub priority: Priority,
    pub next: usize,
}

/// Even's winning strategy in `G` with the automaton's states as memory.
///
/// At vertex `v` with memory `q` Even takes `move_at(v,q)`; after an edge of
/// priority `p` into `u` the memory becomes `update(u,q,p)`, a `p`-successor of
/// `q` in the automaton. Only the memory states reachable in plays consistent with
/// the strategy from Even's winning region are tabulated.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MemoryStrategy {
    pub initial_memory: usize,
    pub moves: Vec<MemoryMove>,
    pub updates: Vec<MemoryUpdate>,
}

impl MemoryStrategy {
    pub fn move_at(&self, v: usize, q: usize) -> Option<EdgeId> {
        self.moves
            .binary_search_by_key(&(v, q), |m| (m.vertex, m.memory))
            .ok()
            .map(|i| self.moves[i].edge)
    }

    pub fn update(&self, u: usize, q: usize, p: Priority) -> Option<usize> {
        self.updates
            .binary_search_by_key(&(u, q, p), |m| (m.vertex, m.memory, m.priority))
            .ok()
            .map(|i| self.updates[i].next)
    }
}

/// Extracts Even's finite-memory strategy from the solved product `G ▷ A`.
pub fn memory_strategy(g: &ParityGame, a: &SafetyAutomaton, limits: &Limits) -> Result<MemoryStrategy> {
    let solved = Solved::new(g, a, limits)?;
    let q0 = a.initial();
    let mut moves = BTreeMap::new();
    let mut updates = BTreeMap::new();
    let mut seen = vec![false; solved.size()];
    let mut queue = VecDeque::new();
    for v in 0..g.num_vertices() {
        let id = solved.pair(v, q0);
        if solved.safe[id] {
            seen[id] = true;
            queue.push_back((v, q0));
        }
    }
    while let Some((v, q)) = queue.pop_front() {
        let edges: Vec<EdgeId> = match g.owner(v) {
            Player::Even => {
                let e = solved.safe_move(g, v, q).expect("safe Even vertex has a safe move");
                moves.insert((v, q), e);
                vec![e]
            }
            Player::Odd => g.out_edge_ids(v).collect(),
        };
        for e in edges {
            let edge = g.edge(e);
            let next = match &solved.product {
                Product::Det(_) => a.delta(q, edge.pri),
                Product::Explicit(p) => {
                    let c = p.choice(edge.dst, q, edge.pri).expect("choice vertex");
                    let mut pick = None;
                    p.game.for_each_successor(c, |w| {
                        if pick.is_none() && solved.safe[w] {
                            pick = Some(w);
                        }
                    });
                    match p.nodes[pick.expect("safe choice vertex has a safe successor")] {
                        ProductNode::Pair { q, .. } => q,
                        ProductNode::Choice { .. } => unreachable!("choices lead to pairs"),
                    }
                }
            };
            updates.insert((edge.dst, q, edge.pri), next);
            let id = solved.pair(edge.dst, next);
            if !seen[id] {
                seen[id] = true;
                queue.push_back((edge.dst, next));
            }
        }
    }
    Ok(MemoryStrategy {
        initial_memory: q0,
        moves: moves
            .into_iter()
            .map(|((vertex, memory), edge)| MemoryMove { vertex, memory, edge })
            .collect(),
        updates: updates
            .into_iter()
            .map(|((vertex, memory, priority), next)| MemoryUpdate {
                vertex,
                memory,
                priority,
                next,
            })
            .collect(),
    })
}

/// Whether every play from `from` consistent with `strategy` keeps the automaton
/// run it tracks away from rejecting states, with every memory update a genuine
/// transition of `a`.
pub fn check_memory_strategy(g: &ParityGame, a: &SafetyAutomaton, strategy: &MemoryStrategy, from: &[usize]) -> bool {
    let q0 = strategy.initial_memory;
    if q0 >= a.num_states() || a.is_rejecting(q0) || g.bound() > a.alphabet() {
        return false;
    }
    let states = a.num_states();
    let mut seen = vec![false; g.num_vertices() * states];
    let mut stack: Vec<(usize, usize)> = Vec::new();
    for &v in from {
        if v >= g.num_vertices() {
            return false;
        }
        if !seen[v * states + q0] {
            seen[v * states + q0] = true;
            stack.push((v, q0));
        }
    }
    while let Some((v, q)) = stack.pop() {
        let edges: Vec<EdgeId> = match g.owner(v) {
            Player::Even => match strategy.move_at(v, q) {
                Some(e) if g.out_edge_ids(v).contains(&e) => vec![e],
                _ => return false,
            },
            Player::Odd => g.out_edge_ids(v).collect(),
        };
        for e in edges {
            let edge = g.edge(e);
            let Some(next) = strategy.update(edge.dst, q, edge.pri) else {
                return false;
            };
            if !a.successors(q, edge.pri).contains(&(next as u32)) || a.is_rejecting(next) {
                return false;
            }
            if !seen[edge.dst * states + next] {
                seen[edge.dst * states + next] = true;
                stack.push((edge.dst, next));
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automata::{counter_separator, register_product, tree_separator};
    use crate::game::Edge;
    use crate::generate::{random_game, GameParams};
    use crate::trees::{full_tree, succinct_tree};
    use rand::{Rng, SeedableRng};

    #[test]
    fn self_loops_with_counter() {
        let a = counter_separator(1, 2).unwrap();
        let even = ParityGame::new(vec![Player::Even], vec![Edge::new(0, 0, 2)]).unwrap();
        let s = solve_by_separation(&even, &a, &Limits::default()).unwrap();
        assert_eq!(s.solution.winner, vec![Player::Even]);
        assert_eq!(s.initial_moves, vec![Some(0)]);
        let odd = ParityGame::new(vec![Player::Even], vec![Edge::new(0, 0, 1)]).unwrap();
        let s = solve_by_separation(&odd, &a, &Limits::default()).unwrap();
        assert_eq!(s.solution.winner, vec![Player::Odd]);
    }

    #[test]
    fn alphabet_too_small() {
        let a = counter_separator(1, 2).unwrap();
        let g = ParityGame::new(vec![Player::Even], vec![Edge::new(0, 0, 4)]).unwrap();
        assert!(solve_by_separation(&g, &a, &Limits::default()).is_err());
    }

    #[test]
    fn separators_match_zielonka_with_memory_certificates() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(21);
        for _ in 0..40 {
            let n = rng.random_range(1..=6);
            let g = random_game(&GameParams { n, d: 4, max_out: 3 }, &mut rng).unwrap();
            let z = zielonka(&g);
            let seps = [
                counter_separator(n, 4).unwrap(),
                tree_separator(&succinct_tree(n, 2).unwrap(), 4).unwrap(),
                tree_separator(&full_tree(n, 2).unwrap(), 4).unwrap(),
            ];
            for a in &seps {
                let s = solve_by_separation(&g, a, &Limits::default()).unwrap();
                assert_eq!(s.solution.winner, z.winner);
                let m = memory_strategy(&g, a, &Limits::default()).unwrap();
                assert!(check_memory_strategy(&g, a, &m, &s.solution.region(Player::Even)));
                for v in s.solution.region(Player::Even) {
                    if g.owner(v) == Player::Even {
                        assert_eq!(m.move_at(v, a.initial()), s.initial_moves[v]);
                    }
                }
            }
        }
    }

    #[test]
    fn register_product_matches_zielonka() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(22);
        for _ in 0..10 {
            let n = rng.random_range(1..=3);
            let g = random_game(&GameParams { n, d: 4, max_out: 2 }, &mut rng).unwrap();
            let rp = register_product(n, 4).unwrap();
            let s = solve_by_separation(&g, &rp.automaton, &Limits::default()).unwrap();
            assert_eq!(s.solution.winner, zielonka(&g).winner);
            let m = memory_strategy(&g, &rp.automaton, &Limits::default()).unwrap();
            assert!(check_memory_strategy(&g, &rp.automaton, &m, &s.solution.region(Player::Even)));
        }
    }

    #[test]
    fn tampered_strategy_is_caught() {
        // v0 (Even): 1-loop or 2-edge to v1 with a 2-loop.
        let g = ParityGame::new(
            vec![Player::Even, Player::Even],
            vec![Edge::new(0, 0, 1), Edge::new(0, 1, 2), Edge::new(1, 1, 2)],
        )
        .unwrap();
        let a = counter_separator(2, 2).unwrap();
        let mut m = memory_strategy(&g, &a, &Limits::default()).unwrap();
        assert!(check_memory_strategy(&g, &a, &m, &[0, 1]));
        for mv in &mut m.moves {
            if mv.vertex == 0 {
                mv.edge = 0;
            }
        }
        assert!(!check_memory_strategy(&g, &a, &m, &[0, 1]));
    }
}
