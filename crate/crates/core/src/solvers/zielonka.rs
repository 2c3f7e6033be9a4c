use std::collections::VecDeque;

use super::Solution;
use crate::game::{ParityGame, Player, Priority};

/// Vertex-priority arena obtained by putting a fresh vertex in the middle of every
/// edge. The middle vertex carries the edge's priority and original vertices get
/// priority 0, which never decides a play since every cycle passes a middle vertex.
struct Split {
    n: usize,
    priority: Vec<Priority>,
    owner: Vec<Player>,
    succ: Vec<Vec<usize>>,
    pred: Vec<Vec<usize>>,
}

impl Split {
    fn new(g: &ParityGame) -> Split {
        let n = g.num_vertices();
        let m = g.edges().len();
        let total = n + m;
        let mut priority = vec![0; total];
        let mut owner = g.owners().to_vec();
        owner.resize(total, Player::Even);
        let mut succ = vec![Vec::new(); total];
        let mut pred = vec![Vec::new(); total];
        for (id, e) in g.edges().iter().enumerate() {
            let mid = n + id;
            priority[mid] = e.pri;
            succ[e.src].push(mid);
            pred[mid].push(e.src);
            succ[mid].push(e.dst);
            pred[e.dst].push(mid);
        }
        Split {
            n,
            priority,
            owner,
            succ,
            pred,
        }
    }
}

/// Attractor of `target` for `player` inside `alive`; records attracting moves in `strategy`.
fn attractor(s: &Split, alive: &[bool], target: &[usize], player: Player, strategy: &mut [Option<usize>]) -> Vec<bool> {
    let total = s.succ.len();
    let mut attr = vec![false; total];
    let mut count: Vec<usize> = vec![0; total];
    let mut queue: VecDeque<usize> = VecDeque::new();
    let mut sorted = target.to_vec();
    sorted.sort_unstable();
    for &v in &sorted {
        if !attr[v] {
            attr[v] = true;
            queue.push_back(v);
        }
    }
    while let Some(u) = queue.pop_front() {
        for &w in &s.pred[u] {
            if !alive[w] || attr[w] {
                continue;
            }
            if s.owner[w] == player {
                attr[w] = true;
                strategy[w] = Some(u);
                queue.push_back(w);
            } else {
                if count[w] == 0 {
                    count[w] = s.succ[w].iter().filter(|&&x| alive[x]).count() + 1;
                }
                count[w] -= 1;
                if count[w] == 1 {
                    attr[w] = true;
                    queue.push_back(w);
                }
            }
        }
    }
    attr
}

/// Solves the subgame on `alive`; returns the winner per vertex (meaningful on
/// `alive`) and fills both players' strategies there.
fn solve(s: &Split, alive: &[bool], strategy: &mut [Option<usize>], winner: &mut [Player]) {
    let mut alive = alive.to_vec();
    loop {
        let Some(p) = (0..alive.len()).filter(|&v| alive[v]).map(|v| s.priority[v]).max() else {
            return;
        };
        let me = Player::of_priority(p);
        let top: Vec<usize> = (0..alive.len()).filter(|&v| alive[v] && s.priority[v] == p).collect();
        let a = attractor(s, &alive, &top, me, strategy);
        let rest: Vec<bool> = (0..alive.len()).map(|v| alive[v] && !a[v]).collect();
        solve(s, &rest, strategy, winner);
        let theirs: Vec<usize> = (0..alive.len()).filter(|&v| rest[v] && winner[v] != me).collect();
        if theirs.is_empty() {
            for v in (0..alive.len()).filter(|&v| alive[v]) {
                winner[v] = me;
                // At top-priority vertices any move inside the subgame is fine.
                if a[v] && s.owner[v] == me && strategy[v].is_none_or(|t| !alive[t]) {
                    strategy[v] = s.succ[v].iter().copied().find(|&t| alive[t]);
                }
            }
            for &v in &top {
                if s.owner[v] == me {
                    strategy[v] = s.succ[v].iter().copied().find(|&t| alive[t]);
                }
            }
            return;
        }
        let b = attractor(s, &alive, &theirs, me.opponent(), strategy);
        for v in (0..alive.len()).filter(|&v| b[v]) {
            winner[v] = me.opponent();
            alive[v] = false;
        }
    }
}

/// Zielonka's recursive algorithm with positional strategies for both players.
pub fn zielonka(g: &ParityGame) -> Solution {
    let s = Split::new(g);
    let total = s.succ.len();
    let mut strategy = vec![None; total];
    let mut winner = vec![Player::Even; total];
    solve(&s, &vec![true; total], &mut strategy, &mut winner);
    let mut even = vec![None; s.n];
    let mut odd = vec![None; s.n];
    for v in 0..s.n {
        let edge = strategy[v].map(|mid| mid - s.n);
        match (g.owner(v), winner[v]) {
            (Player::Even, Player::Even) => even[v] = edge,
            (Player::Odd, Player::Odd) => odd[v] = edge,
            _ => {}
        }
    }
    Solution {
        winner: winner[..s.n].to_vec(),
        even_strategy: Some(even),
        odd_strategy: Some(odd),
    }
}
