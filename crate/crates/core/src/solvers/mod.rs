//! Parity game solvers: Zielonka's recursive algorithm, the separation approach
//! through safety games, and progress-measure lifting over universal trees.

mod exhaustive;
mod lifting;
mod safety;
mod separation;
mod zielonka;

use serde::{Deserialize, Serialize};

pub use exhaustive::{solve_exhaustive, winning_positional};
pub use lifting::{check_progress_measure, check_progress_measure_on, lift_solve, LiftResult, TreeLabelling};
pub use safety::{chained_product, solve_safety, ChainedProduct, ProductNode, SafetyArena, SafetyGame};
pub use separation::{check_memory_strategy, memory_strategy, solve_by_separation, MemoryStrategy, SeparationSolution};
pub use zielonka::zielonka;

use crate::game::{Edge, GameGraph, ParityGame, Player, PositionalStrategy};

/// Winning regions and positional strategies.
///
/// `even_strategy` is defined at Even vertices that Even wins, `odd_strategy` at
/// Odd vertices that Odd wins; a solver that certifies only one side leaves the
/// other strategy `None`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Solution {
    pub winner: Vec<Player>,
    pub even_strategy: Option<PositionalStrategy>,
    pub odd_strategy: Option<PositionalStrategy>,
}

impl Solution {
    pub fn even_set(&self) -> Vec<bool> {
        self.winner.iter().map(|&p| p == Player::Even).collect()
    }

    pub fn region(&self, player: Player) -> Vec<usize> {
        (0..self.winner.len()).filter(|&v| self.winner[v] == player).collect()
    }
}

/// Whether `player`'s strategy keeps plays from its region inside the region and
/// every cycle there is won by `player`.
pub fn verify_region(g: &ParityGame, winner: &[Player], player: Player, sigma: &[Option<usize>]) -> bool {
    let n = g.num_vertices();
    if winner.len() != n || sigma.len() != n {
        return false;
    }
    let inside = |v: usize| winner[v] == player;
    let mut edges: Vec<Edge> = Vec::new();
    for v in (0..n).filter(|&v| inside(v)) {
        if g.owner(v) == player {
            let Some(id) = sigma[v] else { return false };
            if !g.out_edge_ids(v).contains(&id) || !inside(g.edge(id).dst) {
                return false;
            }
            edges.push(g.edge(id));
        } else {
            if g.out_edges(v).iter().any(|e| !inside(e.dst)) {
                return false;
            }
            edges.extend_from_slice(g.out_edges(v));
        }
    }
    let Ok(h) = GameGraph::with_bound(n, g.bound(), edges) else {
        return false;
    };
    h.cycle_with_parity(player.opponent()).is_none()
}

/// Checks both regions: each player's strategy traps plays in its region and all
/// cycles there have that player's parity.
pub fn verify_solution(g: &ParityGame, sol: &Solution) -> bool {
    let (Some(even), Some(odd)) = (&sol.even_strategy, &sol.odd_strategy) else {
        return false;
    };
    verify_region(g, &sol.winner, Player::Even, even) && verify_region(g, &sol.winner, Player::Odd, odd)
}
