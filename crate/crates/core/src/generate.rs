//! Seeded random games and even graphs.

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game::{Edge, GameGraph, ParityGame, Player, Priority};

/// Parameters of a random game.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GameParams {
    pub n: usize,
    /// Even priority bound; edge priorities are uniform in `1..=d`.
    pub d: Priority,
    /// Out-degrees are uniform in `1..=max_out`, capped by `n`.
    pub max_out: usize,
}

fn check(params: &GameParams) -> Result<()> {
    if params.n == 0 || params.max_out == 0 {
        return Err(Error::InvalidGame("random games need n ≥ 1 and max_out ≥ 1".into()));
    }
    if params.d == 0 || !params.d.is_multiple_of(2) {
        return Err(Error::InvalidGame(format!("d = {} must be a positive even number", params.d)));
    }
    Ok(())
}

fn random_owners(n: usize, rng: &mut impl Rng) -> Vec<Player> {
    (0..n)
        .map(|_| if rng.random_bool(0.5) { Player::Even } else { Player::Odd })
        .collect()
}

/// Distinct random successors of every vertex.
fn random_targets(params: &GameParams, rng: &mut impl Rng) -> Vec<Vec<usize>> {
    let all: Vec<usize> = (0..params.n).collect();
    (0..params.n)
        .map(|_| {
            let k = rng.random_range(1..=params.max_out.min(params.n));
            let mut t: Vec<usize> = all.choose_multiple(rng, k).copied().collect();
            t.sort_unstable();
            t
        })
        .collect()
}

/// A random game with edge priorities.
pub fn random_game(params: &GameParams, rng: &mut impl Rng) -> Result<ParityGame> {
    check(params)?;
    let owner = random_owners(params.n, rng);
    let mut edges = Vec::new();
    for (v, targets) in random_targets(params, rng).into_iter().enumerate() {
        for u in targets {
            edges.push(Edge::new(v, u, rng.random_range(1..=params.d)));
        }
    }
    ParityGame::from_graph(GameGraph::with_bound(params.n, params.d, edges)?, owner)
}

pub fn random_game_seeded(params: &GameParams, seed: u64) -> Result<ParityGame> {
    random_game(params, &mut ChaCha8Rng::seed_from_u64(seed))
}

/// A random game in which all edges leaving a vertex share its priority, so it can
/// be written in the vertex-priority text format.
pub fn random_vertex_priority_game(params: &GameParams, rng: &mut impl Rng) -> Result<ParityGame> {
    check(params)?;
    let owner = random_owners(params.n, rng);
    let mut edges = Vec::new();
    for (v, targets) in random_targets(params, rng).into_iter().enumerate() {
        let pri = rng.random_range(1..=params.d);
        edges.extend(targets.into_iter().map(|u| Edge::new(v, u, pri)));
    }
    ParityGame::from_graph(GameGraph::with_bound(params.n, params.d, edges)?, owner)
}

/// A random even graph: a random graph with edges on odd cycles deleted, then an
/// even self-loop added at every vertex left without successors.
pub fn random_even_graph(params: &GameParams, rng: &mut impl Rng) -> Result<GameGraph> {
    check(params)?;
    let mut edges = Vec::new();
    for (v, targets) in random_targets(params, rng).into_iter().enumerate() {
        for u in targets {
            edges.push(Edge::new(v, u, rng.random_range(1..=params.d)));
        }
    }
    loop {
        let g = GameGraph::with_bound(params.n, params.d, edges.clone())?;
        let Some(cycle) = g.cycle_with_parity(Player::Odd) else {
            break;
        };
        // The cycle's maximal edge is odd; dropping it breaks this cycle.
        let worst = *cycle.iter().max_by_key(|&&id| g.edge(id).pri).expect("nonempty cycle");
        let e = g.edge(worst);
        let pos = edges.iter().position(|&f| f == e).expect("edge of the graph");
        edges.swap_remove(pos);
    }
    let mut has_out = vec![false; params.n];
    for e in &edges {
        has_out[e.src] = true;
    }
    for (v, ok) in has_out.into_iter().enumerate() {
        if !ok {
            edges.push(Edge::new(v, v, 2 * rng.random_range(1..=params.d / 2)));
        }
    }
    GameGraph::with_bound(params.n, params.d, edges)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::is_even_graph;

    #[test]
    fn games_respect_parameters() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for n in 1..12 {
            let p = GameParams { n, d: 6, max_out: 3 };
            let g = random_game(&p, &mut rng).unwrap();
            assert_eq!(g.num_vertices(), n);
            assert_eq!(g.bound(), 6);
            for v in 0..n {
                assert!((1..=3).contains(&g.out_edges(v).len()));
            }
        }
    }

    #[test]
    fn seeded_generation_is_reproducible() {
        let p = GameParams { n: 10, d: 4, max_out: 2 };
        assert_eq!(random_game_seeded(&p, 9).unwrap(), random_game_seeded(&p, 9).unwrap());
    }

    #[test]
    fn even_graphs_are_even_and_total() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for n in 1..15 {
            let p = GameParams { n, d: 8, max_out: 3 };
            let g = random_even_graph(&p, &mut rng).unwrap();
            assert!(is_even_graph(&g));
            assert!((0..n).all(|v| g.out_degree(v) > 0));
        }
    }

    #[test]
    fn vertex_priority_games_have_uniform_out_priorities() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let g = random_vertex_priority_game(&GameParams { n: 8, d: 4, max_out: 3 }, &mut rng).unwrap();
        for v in 0..8 {
            let out = g.out_edges(v);
            assert!(out.iter().all(|e| e.pri == out[0].pri));
        }
    }
}
