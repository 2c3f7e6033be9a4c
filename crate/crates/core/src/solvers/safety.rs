use std::collections::VecDeque;

use crate::automata::SafetyAutomaton;
use crate::error::{Error, Limits, Result};
use crate::game::{EdgeId, ParityGame, Player, Priority};

/// A game in which Even (the safety player) wins by never visiting an unsafe vertex.
///
/// Implemented by an explicit [`SafetyGame`] and by the implicit product of a game
/// with a deterministic automaton, which never materializes its edges.
pub trait SafetyArena {
    fn num_vertices(&self) -> usize;
    fn owner(&self, v: usize) -> Player;
    fn is_unsafe(&self, v: usize) -> bool;
    fn out_degree(&self, v: usize) -> usize;
    /// Calls `f` once per edge entering `v`, with the edge's source.
    fn for_each_predecessor(&self, v: usize, f: impl FnMut(usize));
    /// Calls `f` once per edge leaving `v`, in edge order.
    fn for_each_successor(&self, v: usize, f: impl FnMut(usize));
}

/// The vertices from which Even can avoid unsafe vertices forever.
///
/// This is the complement of Odd's attractor to the unsafe set, computed with
/// per-vertex counters; vertices are processed first-in first-out starting from
/// the unsafe vertices in increasing order.
pub fn solve_safety<A: SafetyArena>(arena: &A) -> Vec<bool> {
    let n = arena.num_vertices();
    let mut attracted = vec![false; n];
    // remaining[w] = 1 + number of successors of the Even vertex w not yet attracted; 0 = untouched.
    let mut remaining: Vec<u32> = vec![0; n];
    let mut queue: VecDeque<u32> = VecDeque::new();
    for v in 0..n {
        if arena.is_unsafe(v) {
            attracted[v] = true;
            queue.push_back(v as u32);
        }
    }
    while let Some(u) = queue.pop_front() {
        arena.for_each_predecessor(u as usize, |w| {
            if attracted[w] {
                return;
            }
            if arena.owner(w) == Player::Odd {
                attracted[w] = true;
                queue.push_back(w as u32);
                return;
            }
            if remaining[w] == 0 {
                remaining[w] = arena.out_degree(w) as u32 + 1;
            }
            remaining[w] -= 1;
            if remaining[w] == 1 {
                attracted[w] = true;
                queue.push_back(w as u32);
            }
        });
    }
    attracted.iter().map(|&a| !a).collect()
}

/// An explicit safety game.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SafetyGame {
    owner: Vec<Player>,
    unsafe_: Vec<bool>,
    succ_offsets: Vec<usize>,
    succ: Vec<u32>,
    pred_offsets: Vec<usize>,
    pred: Vec<u32>,
}

impl SafetyGame {
    pub fn new(owner: Vec<Player>, unsafe_: Vec<bool>, edges: &[(usize, usize)]) -> Result<Self> {
        let n = owner.len();
        if unsafe_.len() != n {
            return Err(Error::InvalidGame("unsafe flags do not cover all vertices".into()));
        }
        let mut out_count = vec![0usize; n + 1];
        let mut in_count = vec![0usize; n + 1];
        for &(a, b) in edges {
            if a >= n || b >= n {
                return Err(Error::InvalidGame(format!("edge ({a},{b}) out of range")));
            }
            out_count[a + 1] += 1;
            in_count[b + 1] += 1;
        }
        for v in 0..n {
            if out_count[v + 1] == 0 {
                return Err(Error::NoOutgoingEdge(v));
            }
            out_count[v + 1] += out_count[v];
            in_count[v + 1] += in_count[v];
        }
        let mut succ = vec![0u32; edges.len()];
        let mut pred = vec![0u32; edges.len()];
        let mut so = out_count.clone();
        let mut po = in_count.clone();
        for &(a, b) in edges {
            succ[so[a]] = b as u32;
            so[a] += 1;
            pred[po[b]] = a as u32;
            po[b] += 1;
        }
        Ok(SafetyGame {
            owner,
            unsafe_,
            succ_offsets: out_count,
            succ,
            pred_offsets: in_count,
            pred,
        })
    }

    pub fn successors(&self, v: usize) -> &[u32] {
        &self.succ[self.succ_offsets[v]..self.succ_offsets[v + 1]]
    }

    pub fn num_edges(&self) -> usize {
        self.succ.len()
    }
}

impl SafetyArena for SafetyGame {
    fn num_vertices(&self) -> usize {
        self.owner.len()
    }
    fn owner(&self, v: usize) -> Player {
        self.owner[v]
    }
    fn is_unsafe(&self, v: usize) -> bool {
        self.unsafe_[v]
    }
    fn out_degree(&self, v: usize) -> usize {
        self.succ_offsets[v + 1] - self.succ_offsets[v]
    }
    fn for_each_predecessor(&self, v: usize, mut f: impl FnMut(usize)) {
        for &w in &self.pred[self.pred_offsets[v]..self.pred_offsets[v + 1]] {
            f(w as usize);
        }
    }
    fn for_each_successor(&self, v: usize, mut f: impl FnMut(usize)) {
        for &w in self.successors(v) {
            f(w as usize);
        }
    }
}

/// A vertex of the chained product.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ProductNode {
    /// Game vertex `v` with automaton state `q`.
    Pair { v: usize, q: usize },
    /// Even picks the automaton's successor after reading `p` from `q` on entering `u`.
    Choice { u: usize, q: usize, p: Priority },
}

/// The chained product `G ▷ A` as an explicit safety game.
#[derive(Clone, Debug)]
pub struct ChainedProduct {
    pub game: SafetyGame,
    pub nodes: Vec<ProductNode>,
    num_states: usize,
    choice_index: std::collections::HashMap<(usize, usize, Priority), usize>,
}

impl ChainedProduct {
    /// Id of the pair vertex `(v, q)`.
    pub fn pair(&self, v: usize, q: usize) -> usize {
        v * self.num_states + q
    }

    pub fn choice(&self, u: usize, q: usize, p: Priority) -> Option<usize> {
        self.choice_index.get(&(u, q, p)).copied()
    }

    pub fn num_vertices(&self) -> usize {
        self.nodes.len()
    }
}

pub(crate) fn check_alphabet(g: &ParityGame, a: &SafetyAutomaton) -> Result<()> {
    if a.alphabet() < g.bound() {
        return Err(Error::AlphabetMismatch {
            expected: a.alphabet(),
            found: g.bound(),
        });
    }
    Ok(())
}

/// Builds `G ▷ A`. Pair vertices `(v,q)` come first, numbered `v·|Q| + q`.
///
/// For a deterministic `A` the edge `(v,u)` of priority `p` becomes
/// `(v,q) → (u, δ(q,p))`. Otherwise it leads to an Even-owned vertex `(u,q,p)`
/// with one edge per transition `(q,p,q')`, so Even resolves the nondeterminism.
pub fn chained_product(g: &ParityGame, a: &SafetyAutomaton, limits: &Limits) -> Result<ChainedProduct> {
    check_alphabet(g, a)?;
    let n = g.num_vertices();
    let states = a.num_states();
    let pairs = n as u128 * states as u128;
    if pairs > limits.max_states as u128 {
        return Err(Error::cap("product vertices", pairs, limits.max_states as u128));
    }
    let mut nodes: Vec<ProductNode> = Vec::with_capacity(pairs as usize);
    for v in 0..n {
        for q in 0..states {
            nodes.push(ProductNode::Pair { v, q });
        }
    }
    let mut edges: Vec<(usize, usize)> = Vec::new();
    let mut choice_index = std::collections::HashMap::new();
    if a.is_deterministic() {
        for v in 0..n {
            for q in 0..states {
                for e in g.out_edges(v) {
                    edges.push((v * states + q, e.dst * states + a.delta(q, e.pri)));
                }
            }
        }
    } else {
        let mut entries: Vec<(usize, Priority)> = g.edges().iter().map(|e| (e.dst, e.pri)).collect();
        entries.sort_unstable();
        entries.dedup();
        let total = pairs + entries.len() as u128 * states as u128;
        if total > limits.max_states as u128 {
            return Err(Error::cap("product vertices", total, limits.max_states as u128));
        }
        for &(u, p) in &entries {
            for q in 0..states {
                let id = nodes.len();
                nodes.push(ProductNode::Choice { u, q, p });
                choice_index.insert((u, q, p), id);
                for &t in a.successors(q, p) {
                    edges.push((id, u * states + t as usize));
                }
            }
        }
        for v in 0..n {
            for q in 0..states {
                for e in g.out_edges(v) {
                    edges.push((v * states + q, choice_index[&(e.dst, q, e.pri)]));
                }
            }
        }
    }
    let owner = nodes
        .iter()
        .map(|node| match *node {
            ProductNode::Pair { v, .. } => g.owner(v),
            ProductNode::Choice { .. } => Player::Even,
        })
        .collect();
    let unsafe_ = nodes
        .iter()
        .map(|node| match *node {
            ProductNode::Pair { q, .. } | ProductNode::Choice { q, .. } => a.is_rejecting(q),
        })
        .collect();
    Ok(ChainedProduct {
        game: SafetyGame::new(owner, unsafe_, &edges)?,
        nodes,
        num_states: states,
        choice_index,
    })
}

/// `G ▷ A` for a deterministic `A`, with edges computed on demand.
///
/// Vertex `(v,q)` is numbered `v·|Q| + q`. Predecessors use a precomputed inverse
/// of the transition function.
pub(crate) struct DetProduct<'a> {
    g: &'a ParityGame,
    a: &'a SafetyAutomaton,
    states: usize,
    in_edges: Vec<Vec<EdgeId>>,
    inv_offsets: Vec<u32>,
    inv: Vec<u32>,
}

impl<'a> DetProduct<'a> {
    pub(crate) fn new(g: &'a ParityGame, a: &'a SafetyAutomaton, limits: &Limits) -> Result<Self> {
        check_alphabet(g, a)?;
        if !a.is_deterministic() {
            return Err(Error::Nondeterministic);
        }
        let states = a.num_states();
        let total = g.num_vertices() as u128 * states as u128;
        if total > limits.max_states as u128 || total > u32::MAX as u128 {
            return Err(Error::cap("product vertices", total, limits.max_states as u128));
        }
        let d = a.alphabet() as usize;
        // inverse[(p-1)·|Q| + q'] lists the q with δ(q,p) = q'.
        let mut counts = vec![0u32; d * states + 1];
        for q in 0..states {
            for p in 1..=d {
                counts[(p - 1) * states + a.delta(q, p as Priority) + 1] += 1;
            }
        }
        for i in 0..d * states {
            counts[i + 1] += counts[i];
        }
        let mut fill = counts.clone();
        let mut inv = vec![0u32; d * states];
        for q in 0..states {
            for p in 1..=d {
                let slot = (p - 1) * states + a.delta(q, p as Priority);
                inv[fill[slot] as usize] = q as u32;
                fill[slot] += 1;
            }
        }
        Ok(DetProduct {
            g,
            a,
            states,
            in_edges: g.graph().in_edges(),
            inv_offsets: counts,
            inv,
        })
    }

    pub(crate) fn id(&self, v: usize, q: usize) -> usize {
        v * self.states + q
    }

    pub(crate) fn successor(&self, q: usize, e: EdgeId) -> usize {
        let edge = self.g.edge(e);
        self.id(edge.dst, self.a.delta(q, edge.pri))
    }
}

impl SafetyArena for DetProduct<'_> {
    fn num_vertices(&self) -> usize {
        self.g.num_vertices() * self.states
    }
    fn owner(&self, v: usize) -> Player {
        self.g.owner(v / self.states)
    }
    fn is_unsafe(&self, v: usize) -> bool {
        self.a.is_rejecting(v % self.states)
    }
    fn out_degree(&self, v: usize) -> usize {
        self.g.out_degree(v / self.states)
    }
    fn for_each_predecessor(&self, v: usize, mut f: impl FnMut(usize)) {
        let (u, target) = (v / self.states, v % self.states);
        for &e in &self.in_edges[u] {
            let edge = self.g.edge(e);
            let slot = (edge.pri as usize - 1) * self.states + target;
            for &q in &self.inv[self.inv_offsets[slot] as usize..self.inv_offsets[slot + 1] as usize] {
                f(edge.src * self.states + q as usize);
            }
        }
    }
    fn for_each_successor(&self, v: usize, mut f: impl FnMut(usize)) {
        let (w, q) = (v / self.states, v % self.states);
        for e in self.g.out_edge_ids(w) {
            f(self.successor(q, e));
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automata::counter_separator;
    use crate::game::Edge;

    #[test]
    fn trivial_safety_games() {
        let none = SafetyGame::new(vec![Player::Even, Player::Odd], vec![false, false], &[(0, 1), (1, 0)]).unwrap();
        assert_eq!(solve_safety(&none), vec![true, true]);
        let all = SafetyGame::new(vec![Player::Even, Player::Odd], vec![true, true], &[(0, 1), (1, 0)]).unwrap();
        assert_eq!(solve_safety(&all), vec![false, false]);
        let forced = SafetyGame::new(vec![Player::Even, Player::Even], vec![false, true], &[(0, 1), (1, 1)]).unwrap();
        assert_eq!(solve_safety(&forced), vec![false, false]);
    }

    #[test]
    fn even_avoids_and_odd_forces() {
        // 0 (Even) -> 1 safe loop or 2 unsafe; 3 (Odd) -> 1 or 2.
        let edges = [(0, 1), (0, 2), (1, 1), (2, 2), (3, 1), (3, 2)];
        let owner = vec![Player::Even, Player::Even, Player::Even, Player::Odd];
        let g = SafetyGame::new(owner, vec![false, false, true, false], &edges).unwrap();
        assert_eq!(solve_safety(&g), vec![true, true, false, false]);
    }

    #[test]
    fn product_of_odd_loop_reaches_reject() {
        let g = ParityGame::new(vec![Player::Even], vec![Edge::new(0, 0, 1)]).unwrap();
        let a = counter_separator(1, 2).unwrap();
        let prod = chained_product(&g, &a, &Limits::default()).unwrap();
        assert_eq!(prod.num_vertices(), 3);
        // (0,<1>) -> (0,<0>) -> (0,reject)
        let start = prod.pair(0, a.initial());
        let mid = prod.game.successors(start)[0] as usize;
        let end = prod.game.successors(mid)[0] as usize;
        assert!(SafetyArena::is_unsafe(&prod.game, end));
        assert!(!solve_safety(&prod.game)[start]);
    }

    #[test]
    fn nondeterministic_product_gives_choice_to_even() {
        let g = ParityGame::new(vec![Player::Odd], vec![Edge::new(0, 0, 1)]).unwrap();
        let a = SafetyAutomaton::new(2, 2, 0, &[1], &[(0, 1, 0), (0, 1, 1), (0, 2, 0), (1, 1, 1), (1, 2, 1)]).unwrap();
        let prod = chained_product(&g, &a, &Limits::default()).unwrap();
        let c = prod.choice(0, 0, 1).unwrap();
        assert_eq!(SafetyArena::owner(&prod.game, c), Player::Even);
        assert_eq!(prod.game.successors(c).len(), 2);
        assert!(solve_safety(&prod.game)[prod.pair(0, 0)]);
    }

    #[test]
    fn implicit_product_agrees_with_explicit() {
        use crate::generate::{random_game, GameParams};
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..30 {
            let g = random_game(&GameParams { n: 6, d: 4, max_out: 3 }, &mut rng).unwrap();
            let a = counter_separator(3, 4).unwrap();
            let explicit = chained_product(&g, &a, &Limits::default()).unwrap();
            let implicit = DetProduct::new(&g, &a, &Limits::default()).unwrap();
            assert_eq!(solve_safety(&explicit.game), solve_safety(&implicit));
            for v in 0..implicit.num_vertices() {
                let mut a1 = Vec::new();
                let mut a2 = Vec::new();
                implicit.for_each_successor(v, |w| a1.push(w));
                explicit.game.for_each_successor(v, |w| a2.push(w));
                assert_eq!(a1, a2);
            }
        }
    }
}
