//! Game graphs with edge priorities, plays as words over `1..=d`, and the
//! even-graph and limsup classifiers.

use std::fmt;
use std::ops::Range;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scc;

/// An edge priority (a letter of the alphabet `1..=d`).
pub type Priority = u32;

/// Index of an edge in [`GameGraph::edges`].
pub type EdgeId = usize;

/// A positional strategy: the chosen outgoing edge per vertex, where defined.
pub type PositionalStrategy = Vec<Option<EdgeId>>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Player {
    Even,
    Odd,
}

impl Player {
    pub fn opponent(self) -> Player {
        match self {
            Player::Even => Player::Odd,
            Player::Odd => Player::Even,
        }
    }

    /// The player favoured by priority `p` under the max-parity condition.
    pub fn of_priority(p: Priority) -> Player {
        if p.is_multiple_of(2) {
            Player::Even
        } else {
            Player::Odd
        }
    }

    pub fn index(self) -> usize {
        match self {
            Player::Even => 0,
            Player::Odd => 1,
        }
    }
}

impl fmt::Display for Player {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Player::Even => write!(f, "even"),
            Player::Odd => write!(f, "odd"),
        }
    }
}

/// Smallest even number that is at least `max` and at least 2.
pub fn even_bound(max: Priority) -> Priority {
    let d = max.max(2);
    d + d % 2
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Edge {
    pub src: usize,
    pub dst: usize,
    pub pri: Priority,
}

impl Edge {
    pub fn new(src: usize, dst: usize, pri: Priority) -> Self {
        Edge { src, dst, pri }
    }
}

/// A directed graph with edge priorities in `1..=d`, `d` even.
///
/// Edges are stored grouped by source so that the out-edges of a vertex are a
/// contiguous slice. Vertices without out-edges are permitted here; a
/// [`ParityGame`] rejects them.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GameGraph {
    n: usize,
    d: Priority,
    edges: Vec<Edge>,
    offsets: Vec<usize>,
}

impl GameGraph {
    /// Builds a graph whose bound `d` is the smallest even number covering all priorities.
    pub fn new(n: usize, edges: Vec<Edge>) -> Result<Self> {
        let max = edges.iter().map(|e| e.pri).max().unwrap_or(0);
        Self::with_bound(n, even_bound(max), edges)
    }

    /// Builds a graph with an explicit even priority bound `d`.
    pub fn with_bound(n: usize, d: Priority, mut edges: Vec<Edge>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidGame("a game graph needs at least one vertex".into()));
        }
        if d == 0 || !d.is_multiple_of(2) {
            return Err(Error::InvalidGame(format!("priority bound {d} is not a positive even number")));
        }
        for e in &edges {
            if e.src >= n {
                return Err(Error::InvalidGame(format!("edge source {} out of range", e.src)));
            }
            if e.dst >= n {
                return Err(Error::DanglingSuccessor {
                    vertex: e.src,
                    successor: e.dst,
                });
            }
            if e.pri == 0 || e.pri > d {
                return Err(Error::PriorityOutOfRange { priority: e.pri, bound: d });
            }
        }
        edges.sort_by_key(|e| e.src);
        let mut offsets = vec![0usize; n + 1];
        for e in &edges {
            offsets[e.src + 1] += 1;
        }
        for v in 0..n {
            offsets[v + 1] += offsets[v];
        }
        Ok(GameGraph { n, d, edges, offsets })
    }

    pub fn num_vertices(&self) -> usize {
        self.n
    }

    /// The even priority bound `d`.
    pub fn bound(&self) -> Priority {
        self.d
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, id: EdgeId) -> Edge {
        self.edges[id]
    }

    pub fn out_edge_ids(&self, v: usize) -> Range<EdgeId> {
        self.offsets[v]..self.offsets[v + 1]
    }

    pub fn out_edges(&self, v: usize) -> &[Edge] {
        &self.edges[self.out_edge_ids(v)]
    }

    pub fn out_degree(&self, v: usize) -> usize {
        self.offsets[v + 1] - self.offsets[v]
    }

    pub fn max_priority(&self) -> Priority {
        self.edges.iter().map(|e| e.pri).max().unwrap_or(0)
    }

    /// Incoming edge ids per vertex.
    pub fn in_edges(&self) -> Vec<Vec<EdgeId>> {
        let mut preds = vec![Vec::new(); self.n];
        for (id, e) in self.edges.iter().enumerate() {
            preds[e.dst].push(id);
        }
        preds
    }

    /// A cycle (as edge ids, in order) whose maximum priority has the parity of
    /// `parity`, if one exists.
    ///
    /// For each priority `p` of that parity, the graph is restricted to edges of
    /// priority at most `p`; a `p`-edge inside one SCC of the restriction closes
    /// such a cycle.
    pub fn cycle_with_parity(&self, parity: Player) -> Option<Vec<EdgeId>> {
        let first = match parity {
            Player::Even => 2,
            Player::Odd => 1,
        };
        let mut p = first;
        while p <= self.d {
            let comps = scc::tarjan(
                self.n,
                |_| true,
                |v| {
                    self.out_edges(v)
                        .iter()
                        .filter(move |e| e.pri <= p)
                        .map(|e| e.dst)
                },
            );
            for (id, e) in self.edges.iter().enumerate() {
                if e.pri == p && comps.component[e.src] == comps.component[e.dst] {
                    let back = self.path_within(e.dst, e.src, |f| {
                        f.pri <= p && comps.component[f.src] == comps.component[e.src]
                    });
                    let mut cycle = vec![id];
                    cycle.extend(back.expect("SCC members are mutually reachable"));
                    return Some(cycle);
                }
            }
            p += 2;
        }
        None
    }

    /// Shortest path (edge ids) from `from` to `to` using edges accepted by `allow`.
    pub(crate) fn path_within(
        &self,
        from: usize,
        to: usize,
        allow: impl Fn(&Edge) -> bool,
    ) -> Option<Vec<EdgeId>> {
        if from == to {
            return Some(Vec::new());
        }
        let mut via: Vec<Option<EdgeId>> = vec![None; self.n];
        let mut seen = vec![false; self.n];
        seen[from] = true;
        let mut queue = std::collections::VecDeque::from([from]);
        while let Some(v) = queue.pop_front() {
            for id in self.out_edge_ids(v) {
                let e = self.edges[id];
                if !allow(&e) || seen[e.dst] {
                    continue;
                }
                seen[e.dst] = true;
                via[e.dst] = Some(id);
                if e.dst == to {
                    let mut path = Vec::new();
                    let mut cur = to;
                    while cur != from {
                        let id = via[cur].expect("bfs parent");
                        path.push(id);
                        cur = self.edges[id].src;
                    }
                    path.reverse();
                    return Some(path);
                }
                queue.push_back(e.dst);
            }
        }
        None
    }
}

/// True iff every cycle of `g` has an even maximum priority.
pub fn is_even_graph(g: &GameGraph) -> bool {
    g.cycle_with_parity(Player::Odd).is_none()
}

/// A parity game: a game graph plus vertex ownership.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParityGame {
    graph: GameGraph,
    owner: Vec<Player>,
}

impl ParityGame {
    pub fn new(owner: Vec<Player>, edges: Vec<Edge>) -> Result<Self> {
        let graph = GameGraph::new(owner.len().max(1), edges)?;
        Self::from_graph(graph, owner)
    }

    pub fn from_graph(graph: GameGraph, owner: Vec<Player>) -> Result<Self> {
        if owner.len() != graph.num_vertices() {
            return Err(Error::InvalidGame(format!(
                "{} owners for {} vertices",
                owner.len(),
                graph.num_vertices()
            )));
        }
        for v in 0..graph.num_vertices() {
            if graph.out_degree(v) == 0 {
                return Err(Error::NoOutgoingEdge(v));
            }
        }
        Ok(ParityGame { graph, owner })
    }

    pub fn graph(&self) -> &GameGraph {
        &self.graph
    }

    pub fn owner(&self, v: usize) -> Player {
        self.owner[v]
    }

    pub fn owners(&self) -> &[Player] {
        &self.owner
    }

    pub fn num_vertices(&self) -> usize {
        self.graph.num_vertices()
    }

    pub fn bound(&self) -> Priority {
        self.graph.bound()
    }

    pub fn edges(&self) -> &[Edge] {
        self.graph.edges()
    }

    pub fn edge(&self, id: EdgeId) -> Edge {
        self.graph.edge(id)
    }

    pub fn out_edge_ids(&self, v: usize) -> Range<EdgeId> {
        self.graph.out_edge_ids(v)
    }

    pub fn out_edges(&self, v: usize) -> &[Edge] {
        self.graph.out_edges(v)
    }

    pub fn out_degree(&self, v: usize) -> usize {
        self.graph.out_degree(v)
    }

    pub fn to_dump(&self) -> GameDump {
        GameDump {
            n: self.num_vertices(),
            d: self.bound(),
            owner: self.owner.iter().map(|p| p.index() as u8).collect(),
            edges: self
                .edges()
                .iter()
                .map(|e| DumpEdge {
                    src: e.src,
                    dst: e.dst,
                    pri: e.pri,
                })
                .collect(),
        }
    }

    pub fn from_dump(dump: &GameDump) -> Result<Self> {
        let owner = dump
            .owner
            .iter()
            .map(|&o| match o {
                0 => Ok(Player::Even),
                1 => Ok(Player::Odd),
                other => Err(Error::InvalidGame(format!("owner {other} is neither 0 nor 1"))),
            })
            .collect::<Result<Vec<_>>>()?;
        let edges = dump.edges.iter().map(|e| Edge::new(e.src, e.dst, e.pri)).collect();
        let graph = GameGraph::with_bound(dump.n, dump.d, edges)?;
        Self::from_graph(graph, owner)
    }
}

/// JSON dump of a game: `{n, d, owner[], edges[{src,dst,pri}]}` with owner 0 = Even, 1 = Odd.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GameDump {
    pub n: usize,
    pub d: Priority,
    pub owner: Vec<u8>,
    pub edges: Vec<DumpEdge>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DumpEdge {
    pub src: usize,
    pub dst: usize,
    pub pri: Priority,
}

/// The subgraph with every Odd edge and exactly the edges `sigma` picks at Even vertices.
pub fn strategy_subgraph(g: &ParityGame, sigma: &[Option<EdgeId>]) -> Result<GameGraph> {
    restricted_subgraph(g, Player::Even, sigma)
}

/// Keeps all edges of `player`'s opponent and the edges `sigma` picks for `player`.
pub(crate) fn restricted_subgraph(
    g: &ParityGame,
    player: Player,
    sigma: &[Option<EdgeId>],
) -> Result<GameGraph> {
    if sigma.len() != g.num_vertices() {
        return Err(Error::InvalidStrategy(format!(
            "strategy covers {} vertices, game has {}",
            sigma.len(),
            g.num_vertices()
        )));
    }
    let mut edges = Vec::with_capacity(g.edges().len());
    for v in 0..g.num_vertices() {
        if g.owner(v) == player {
            let id = sigma[v]
                .ok_or_else(|| Error::InvalidStrategy(format!("no choice at {player} vertex {v}")))?;
            if !g.out_edge_ids(v).contains(&id) {
                return Err(Error::InvalidStrategy(format!("edge {id} does not leave vertex {v}")));
            }
            edges.push(g.edge(id));
        } else {
            edges.extend_from_slice(g.out_edges(v));
        }
    }
    GameGraph::with_bound(g.num_vertices(), g.bound(), edges)
}

/// An ultimately periodic word `prefix · period^ω`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Lasso {
    pub prefix: Vec<Priority>,
    pub period: Vec<Priority>,
}

impl Lasso {
    pub fn new(prefix: Vec<Priority>, period: Vec<Priority>) -> Result<Self> {
        if period.is_empty() {
            return Err(Error::InvalidGame("lasso period must be nonempty".into()));
        }
        if let Some(&p) = prefix.iter().chain(period.iter()).find(|&&p| p == 0) {
            return Err(Error::PriorityOutOfRange { priority: p, bound: 0 });
        }
        Ok(Lasso { prefix, period })
    }

    pub fn periodic(period: Vec<Priority>) -> Result<Self> {
        Self::new(Vec::new(), period)
    }

    pub fn max_letter(&self) -> Priority {
        self.prefix.iter().chain(&self.period).copied().max().unwrap_or(0)
    }

    /// The `i`-th letter of the infinite word.
    pub fn letter(&self, i: usize) -> Priority {
        if i < self.prefix.len() {
            self.prefix[i]
        } else {
            self.period[(i - self.prefix.len()) % self.period.len()]
        }
    }
}

impl fmt::Display for Lasso {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |w: &[Priority]| w.iter().map(|p| p.to_string()).collect::<Vec<_>>().join(" ");
        if !self.prefix.is_empty() {
            write!(f, "({}) ", join(&self.prefix))?;
        }
        write!(f, "({})^w", join(&self.period))
    }
}

/// The winner of the infinite word: the parity of the largest letter of the period.
pub fn classify_lasso(w: &Lasso) -> Player {
    Player::of_priority(*w.period.iter().max().expect("nonempty period"))
}

/// A finite walk: vertices `v_0 … v_k` and the priorities of the `k` edges taken.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Walk {
    pub vertices: Vec<usize>,
    pub word: Vec<Priority>,
}

impl Walk {
    /// The lasso of the infinite path that follows the walk up to its last
    /// repeated vertex and then loops on the closed part forever.
    pub fn closed_lasso(&self) -> Option<Lasso> {
        let mut last_seen = std::collections::HashMap::new();
        let mut best: Option<(usize, usize)> = None;
        for (j, &v) in self.vertices.iter().enumerate() {
            if let Some(&i) = last_seen.get(&v) {
                best = Some((i, j));
            }
            last_seen.insert(v, j);
        }
        let (i, j) = best?;
        Some(Lasso {
            prefix: self.word[..i].to_vec(),
            period: self.word[i..j].to_vec(),
        })
    }
}

/// A uniformly random walk of `length` edges from `start`.
pub fn random_walk(g: &GameGraph, start: usize, length: usize, rng: &mut impl Rng) -> Result<Walk> {
    let mut vertices = Vec::with_capacity(length + 1);
    let mut word = Vec::with_capacity(length);
    let mut v = start;
    vertices.push(v);
    for _ in 0..length {
        let out = g.out_edges(v);
        if out.is_empty() {
            return Err(Error::DeadEnd(v));
        }
        let e = out[rng.random_range(0..out.len())];
        word.push(e.pri);
        v = e.dst;
        vertices.push(v);
    }
    Ok(Walk { vertices, word })
}

/// Random walks in an even graph, deterministic for a fixed seed.
pub fn sample_even_walks(g: &GameGraph, count: usize, length: usize, seed: u64) -> Result<Vec<Walk>> {
    if !is_even_graph(g) {
        return Err(Error::NotEven);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let start = rng.random_range(0..g.num_vertices());
            random_walk(g, start, length, &mut rng)
        })
        .collect()
}

/// Priority projections of random walks in an even graph.
pub fn sample_even_path_words(
    g: &GameGraph,
    count: usize,
    length: usize,
    seed: u64,
) -> Result<Vec<Vec<Priority>>> {
    Ok(sample_even_walks(g, count, length, seed)?
        .into_iter()
        .map(|w| w.word)
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn single(pri: Priority) -> GameGraph {
        GameGraph::new(1, vec![Edge::new(0, 0, pri)]).unwrap()
    }

    #[test]
    fn bound_is_smallest_even_cover() {
        assert_eq!(single(1).bound(), 2);
        assert_eq!(single(2).bound(), 2);
        assert_eq!(single(5).bound(), 6);
    }

    #[test]
    fn rejects_zero_priority_and_dangling_edges() {
        assert!(GameGraph::new(1, vec![Edge::new(0, 0, 0)]).is_err());
        assert!(matches!(
            GameGraph::new(1, vec![Edge::new(0, 3, 1)]),
            Err(Error::DanglingSuccessor { .. })
        ));
    }

    #[test]
    fn game_requires_out_edges() {
        let err = ParityGame::new(vec![Player::Even, Player::Odd], vec![Edge::new(0, 1, 1)]).unwrap_err();
        assert_eq!(err.to_string(), "vertex 1 has no outgoing edge");
    }

    #[test]
    fn self_loop_parity() {
        assert!(is_even_graph(&single(2)));
        assert!(!is_even_graph(&single(1)));
    }

    #[test]
    fn odd_cycle_hidden_behind_even_edge() {
        // 0 -2-> 1 -3-> 0 is odd; 1 -4-> 1 is even.
        let g = GameGraph::new(
            2,
            vec![Edge::new(0, 1, 2), Edge::new(1, 0, 3), Edge::new(1, 1, 4)],
        )
        .unwrap();
        assert!(!is_even_graph(&g));
        let cycle = g.cycle_with_parity(Player::Odd).unwrap();
        let max = cycle.iter().map(|&id| g.edge(id).pri).max().unwrap();
        assert_eq!(max, 3);
        assert!(g.cycle_with_parity(Player::Even).is_some());
    }

    #[test]
    fn witness_cycle_is_closed() {
        let g = GameGraph::new(
            3,
            vec![Edge::new(0, 1, 1), Edge::new(1, 2, 1), Edge::new(2, 0, 1), Edge::new(2, 2, 2)],
        )
        .unwrap();
        let cycle = g.cycle_with_parity(Player::Odd).unwrap();
        for w in cycle.windows(2) {
            assert_eq!(g.edge(w[0]).dst, g.edge(w[1]).src);
        }
        assert_eq!(g.edge(*cycle.last().unwrap()).dst, g.edge(cycle[0]).src);
    }

    #[test]
    fn strategy_subgraph_picks_even_edges() {
        let game = ParityGame::new(vec![Player::Even], vec![Edge::new(0, 0, 1), Edge::new(0, 0, 2)]).unwrap();
        let sub = strategy_subgraph(&game, &[Some(1)]).unwrap();
        assert_eq!(sub.edges(), &[Edge::new(0, 0, 2)]);
    }

    #[test]
    fn strategy_subgraph_keeps_odd_edges() {
        let game = ParityGame::new(
            vec![Player::Odd, Player::Odd],
            vec![Edge::new(0, 1, 1), Edge::new(1, 0, 2), Edge::new(1, 1, 3)],
        )
        .unwrap();
        let sub = strategy_subgraph(&game, &[None, None]).unwrap();
        assert_eq!(sub, *game.graph());
    }

    #[test]
    fn strategy_subgraph_rejects_missing_choice() {
        let game = ParityGame::new(vec![Player::Even], vec![Edge::new(0, 0, 1)]).unwrap();
        assert!(matches!(strategy_subgraph(&game, &[None]), Err(Error::InvalidStrategy(_))));
    }

    #[test]
    fn classify_examples() {
        assert_eq!(classify_lasso(&Lasso::periodic(vec![2]).unwrap()), Player::Even);
        assert_eq!(classify_lasso(&Lasso::new(vec![6], vec![1]).unwrap()), Player::Odd);
        assert_eq!(classify_lasso(&Lasso::periodic(vec![1, 2, 3]).unwrap()), Player::Odd);
    }

    #[test]
    fn sampling_single_loop() {
        let words = sample_even_path_words(&single(2), 1, 4, 7).unwrap();
        assert_eq!(words, vec![vec![2, 2, 2, 2]]);
    }

    #[test]
    fn sampling_two_cycle_alternates() {
        let g = GameGraph::new(2, vec![Edge::new(0, 1, 1), Edge::new(1, 0, 2)]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert_eq!(random_walk(&g, 0, 4, &mut rng).unwrap().word, vec![1, 2, 1, 2]);
        assert_eq!(random_walk(&g, 1, 4, &mut rng).unwrap().word, vec![2, 1, 2, 1]);
    }

    #[test]
    fn sampling_is_deterministic_and_requires_even() {
        let g = GameGraph::new(
            3,
            vec![
                Edge::new(0, 1, 1),
                Edge::new(0, 2, 2),
                Edge::new(1, 0, 2),
                Edge::new(2, 0, 4),
                Edge::new(2, 1, 4),
            ],
        )
        .unwrap();
        assert!(is_even_graph(&g));
        let a = sample_even_path_words(&g, 5, 10, 42).unwrap();
        let b = sample_even_path_words(&g, 5, 10, 42).unwrap();
        assert_eq!(a, b);
        assert!(matches!(sample_even_path_words(&single(1), 1, 3, 0), Err(Error::NotEven)));
    }

    #[test]
    fn closed_lasso_uses_last_repeat() {
        let walk = Walk {
            vertices: vec![0, 1, 0, 1],
            word: vec![1, 2, 1],
        };
        let lasso = walk.closed_lasso().unwrap();
        assert_eq!(lasso.prefix, vec![1]);
        assert_eq!(lasso.period, vec![2, 1]);
    }

    #[test]
    fn dump_round_trip() {
        let game = ParityGame::new(
            vec![Player::Even, Player::Odd],
            vec![Edge::new(0, 1, 1), Edge::new(1, 0, 4)],
        )
        .unwrap();
        let json = serde_json::to_string(&game.to_dump()).unwrap();
        assert_eq!(
            json,
            r#"{"n":2,"d":4,"owner":[0,1],"edges":[{"src":0,"dst":1,"pri":1},{"src":1,"dst":0,"pri":4}]}"#
        );
        let back: GameDump = serde_json::from_str(&json).unwrap();
        assert_eq!(ParityGame::from_dump(&back).unwrap(), game);
    }
}
