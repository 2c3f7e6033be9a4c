use crate::error::{Error, Result};
use crate::game::{restricted_subgraph, EdgeId, ParityGame, Player};
use crate::scc;

/// Vertices from which `player` wins by playing the positional strategy `sigma`.
///
/// `player` wins from `v` iff no cycle of the opponent's parity is reachable from
/// `v` in the graph where `player`'s moves are fixed by `sigma`.
pub fn winning_positional(g: &ParityGame, player: Player, sigma: &[Option<EdgeId>]) -> Result<Vec<bool>> {
    let h = restricted_subgraph(g, player, sigma)?;
    let n = h.num_vertices();
    let mut bad = vec![false; n];
    let mut p = match player.opponent() {
        Player::Even => 2,
        Player::Odd => 1,
    };
    while p <= h.bound() {
        let comps = scc::tarjan(n, |_| true, |v| {
            h.out_edges(v).iter().filter(move |e| e.pri <= p).map(|e| e.dst)
        });
        for e in h.edges() {
            if e.pri == p && comps.component[e.src] == comps.component[e.dst] {
                bad[e.src] = true;
            }
        }
        p += 2;
    }
    // Backward closure: anything that can reach a bad cycle loses.
    let preds = h.in_edges();
    let mut stack: Vec<usize> = (0..n).filter(|&v| bad[v]).collect();
    while let Some(v) = stack.pop() {
        for &id in &preds[v] {
            let w = h.edge(id).src;
            if !bad[w] {
                bad[w] = true;
                stack.push(w);
            }
        }
    }
    Ok(bad.into_iter().map(|b| !b).collect())
}

/// Winning regions of both players by enumerating all their positional strategies.
///
/// Returns `[even_region, odd_region]` as membership flags. By positional
/// determinacy the two regions partition the vertices; the function does not
/// assume it, so callers can check it. Fails if either player has more than
/// `max_strategies` strategies.
pub fn solve_exhaustive(g: &ParityGame, max_strategies: usize) -> Result<[Vec<bool>; 2]> {
    let mut out = [Vec::new(), Vec::new()];
    for player in [Player::Even, Player::Odd] {
        let mine: Vec<usize> = (0..g.num_vertices()).filter(|&v| g.owner(v) == player).collect();
        let count = mine
            .iter()
            .try_fold(1u128, |acc, &v| acc.checked_mul(g.out_degree(v) as u128))
            .unwrap_or(u128::MAX);
        if count > max_strategies as u128 {
            return Err(Error::cap("positional strategies", count, max_strategies as u128));
        }
        let mut wins = vec![false; g.num_vertices()];
        let mut choice = vec![0usize; mine.len()];
        loop {
            let mut sigma = vec![None; g.num_vertices()];
            for (i, &v) in mine.iter().enumerate() {
                sigma[v] = Some(g.out_edge_ids(v).start + choice[i]);
            }
            for (v, w) in winning_positional(g, player, &sigma)?.into_iter().enumerate() {
                wins[v] |= w;
            }
            // Next strategy in mixed-radix order.
            let mut i = 0;
            while i < mine.len() {
                choice[i] += 1;
                if choice[i] < g.out_degree(mine[i]) {
                    break;
                }
                choice[i] = 0;
                i += 1;
            }
            if i == mine.len() {
                break;
            }
        }
        out[player.index()] = wins;
    }
    Ok(out)
}
