use std::collections::HashMap;

use super::{ParityAutomaton, SafetyAutomaton};
use crate::error::{Error, Limits, Result};
use crate::game::Priority;
use crate::trees::{floor_lg, truncate, LeafQuery, OrderedTree};

fn check_d(d: Priority) -> Result<()> {
    if d == 0 || !d.is_multiple_of(2) {
        return Err(Error::InvalidAutomaton(format!("d = {d} must be a positive even number")));
    }
    Ok(())
}

fn fmt_tuple(values: impl IntoIterator<Item = impl ToString>) -> String {
    let parts: Vec<String> = values.into_iter().map(|v| v.to_string()).collect();
    format!("<{}>", parts.join(","))
}

/// The counters `⟨c_{d-1}, c_{d-3}, …, c_1⟩` of a counter-separator state.
///
/// States are numbered in mixed radix `n+1` with `c_{d-1}` most significant, so
/// numeric order is lexicographic order on the tuples. The last state rejects.
pub fn counter_state(id: usize, n: usize, d: Priority) -> Option<Vec<usize>> {
    let h = (d / 2) as usize;
    let mut rest = id;
    let mut digits = vec![0; h];
    for i in (0..h).rev() {
        digits[i] = rest % (n + 1);
        rest /= n + 1;
    }
    (rest == 0).then_some(digits)
}

pub fn counter_separator(n: usize, d: Priority) -> Result<SafetyAutomaton> {
    counter_separator_within(n, d, &Limits::default())
}

/// The deterministic safety separator that keeps one counter per odd priority.
///
/// An even letter `p` resets every counter below `p` to `n`; an odd letter `p`
/// decrements `c_p` (rejecting at `0`) and resets the counters below it.
pub fn counter_separator_within(n: usize, d: Priority, limits: &Limits) -> Result<SafetyAutomaton> {
    check_d(d)?;
    let h = (d / 2) as usize;
    let tuples = (0..h).try_fold(1u128, |acc, _| acc.checked_mul(n as u128 + 1)).unwrap_or(u128::MAX);
    if tuples + 1 > limits.max_states as u128 {
        return Err(Error::cap("counter separator states", tuples + 1, limits.max_states as u128));
    }
    let tuples = tuples as usize;
    let reject = tuples;
    // weight[i] = (n+1)^(h-1-i), the place value of position i.
    let mut weight = vec![1usize; h];
    for i in (0..h.saturating_sub(1)).rev() {
        weight[i] = weight[i + 1] * (n + 1);
    }
    let mut rejecting = vec![false; tuples + 1];
    rejecting[reject] = true;
    let all_n: usize = weight.iter().map(|w| w * n).sum();
    let a = SafetyAutomaton::from_fn(tuples + 1, d, all_n, rejecting, |q, p| {
        if q == reject {
            return [reject];
        }
        // Position of priority p's counter (odd p) or first position below p (even p).
        let j = ((d - 1 - p.min(d - 1)) / 2) as usize;
        let keep_through = if p % 2 == 0 { (d - p) as usize / 2 } else { j + 1 };
        let high: usize = (0..keep_through).map(|i| (q / weight[i]) % (n + 1) * weight[i]).sum();
        let low: usize = (keep_through..h).map(|i| weight[i] * n).sum();
        if p % 2 == 0 {
            return [high + low];
        }
        if (q / weight[j]).is_multiple_of(n + 1) {
            [reject]
        } else {
            [high - weight[j] + low]
        }
    })?;
    let names = (0..=tuples)
        .map(|q| match counter_state(q, n, d) {
            Some(c) if q < tuples => fmt_tuple(c),
            _ => "reject".to_string(),
        })
        .collect();
    Ok(a.with_names(names))
}

/// The deterministic safety automaton whose states are the leaves of `tree`.
///
/// The initial state is the largest leaf. On an even letter `p` the automaton moves
/// to the largest leaf with the same `p`-truncation, on an odd letter to the largest
/// leaf with a strictly smaller `p`-truncation, and rejects when there is none.
pub fn tree_separator(tree: &OrderedTree, d: Priority) -> Result<SafetyAutomaton> {
    check_d(d)?;
    tree.require_full_depth((d / 2) as usize)?;
    let leaves = tree.size();
    let reject = leaves;
    let mut rejecting = vec![false; leaves + 1];
    rejecting[reject] = true;
    let a = SafetyAutomaton::from_fn(leaves + 1, d, leaves - 1, rejecting, |q, p| {
        if q == reject {
            return [reject];
        }
        let r = truncate(tree.leaf(q), p, d).expect("leaf depth checked");
        let mode = if p % 2 == 0 { LeafQuery::MaxEq } else { LeafQuery::MaxLt };
        [tree.leaf_query(mode, p, r).unwrap_or(reject)]
    })?;
    let names = (0..=leaves)
        .map(|q| if q == reject { "reject".to_string() } else { fmt_tuple(tree.leaf(q)) })
        .collect();
    Ok(a.with_names(names))
}

/// Number of non-increasing sequences of length `m = ⌊lg n⌋+1` over `1..=d`.
pub fn register_state_count(n: usize, d: Priority) -> u128 {
    let m = floor_lg(n.max(1)) as u128 + 1;
    crate::trees::binomial(d as u128 + m - 1, m).unwrap_or(u128::MAX)
}

pub fn register_automaton(n: usize, d: Priority) -> Result<ParityAutomaton> {
    register_automaton_within(n, d, &Limits::default())
}

/// The nondeterministic parity automaton over register sequences `⟨r_m, …, r_1⟩`.
///
/// Every letter updates the registers to hold the maximum seen since their last
/// reset; the automaton may then reset one register `k`, emitting `2k` if it held
/// an even value and `2k+1` otherwise, or reset nothing and emit `1`.
pub fn register_automaton_within(n: usize, d: Priority, limits: &Limits) -> Result<ParityAutomaton> {
    check_d(d)?;
    if n == 0 {
        return Err(Error::InvalidAutomaton("register automaton needs n ≥ 1".into()));
    }
    let count = register_state_count(n, d);
    if count > limits.max_states as u128 {
        return Err(Error::cap("register automaton states", count, limits.max_states as u128));
    }
    let m = floor_lg(n) + 1;
    // Index 0 holds r_m, index m-1 holds r_1.
    let mut states: Vec<Vec<Priority>> = Vec::new();
    let mut current = vec![1 as Priority; m];
    fn fill(pos: usize, max: Priority, current: &mut Vec<Priority>, out: &mut Vec<Vec<Priority>>) {
        if pos == current.len() {
            out.push(current.clone());
            return;
        }
        for v in 1..=max {
            current[pos] = v;
            fill(pos + 1, v, current, out);
        }
    }
    fill(0, d, &mut current, &mut states);
    let index: HashMap<Vec<Priority>, usize> = states.iter().cloned().enumerate().map(|(i, s)| (s, i)).collect();
    let initial = index[&vec![1; m]];
    let bound = 2 * floor_lg(n) as Priority + 3;
    let a = ParityAutomaton::from_fn(states.len(), d, bound, initial, |q, p| {
        let updated: Vec<Priority> = states[q].iter().map(|&r| r.max(p)).collect();
        let mut out = vec![(1, index[&updated])];
        for k in 1..=m {
            let r_k = updated[m - k];
            let mut reset = updated.clone();
            reset.remove(m - k);
            reset.push(1);
            let pri = if r_k.is_multiple_of(2) { 2 * k } else { 2 * k + 1 } as Priority;
            out.push((pri, index[&reset]));
        }
        out
    })?;
    Ok(a.with_names(states.iter().map(|s| fmt_tuple(s.iter())).collect()))
}

pub fn product_parity_safety(r: &ParityAutomaton, s: &SafetyAutomaton) -> Result<SafetyAutomaton> {
    product_parity_safety_within(r, s, &Limits::default())
}

/// The chained product `R ▷ S`: `R` reads the input letter and `S` reads the
/// priority of the transition `R` took.
///
/// Pairs whose `S` component rejects are merged into one absorbing sink, so the
/// result has `|R|·|S \ reject| + 1` states.
pub fn product_parity_safety_within(
    r: &ParityAutomaton,
    s: &SafetyAutomaton,
    limits: &Limits,
) -> Result<SafetyAutomaton> {
    if !s.is_deterministic() {
        return Err(Error::Nondeterministic);
    }
    if s.alphabet() < r.priority_bound() {
        return Err(Error::AlphabetMismatch {
            expected: s.alphabet(),
            found: r.priority_bound(),
        });
    }
    let keep: Vec<usize> = (0..s.num_states()).filter(|&q| !s.is_rejecting(q)).collect();
    let needed = r.num_states() as u128 * keep.len() as u128 + 1;
    if needed > limits.max_states as u128 {
        return Err(Error::cap("register product states", needed, limits.max_states as u128));
    }
    let mut s_index = vec![usize::MAX; s.num_states()];
    for (i, &q) in keep.iter().enumerate() {
        s_index[q] = i;
    }
    let width = keep.len();
    let sink = r.num_states() * width;
    let id = |rq: usize, sq: usize| if s_index[sq] == usize::MAX { sink } else { rq * width + s_index[sq] };
    let initial = id(r.initial(), s.initial());
    let mut rejecting = vec![false; sink + 1];
    rejecting[sink] = true;
    let a = SafetyAutomaton::from_fn(sink + 1, r.alphabet(), initial, rejecting, |q, p| {
        if q == sink {
            return vec![sink];
        }
        let (rq, sq) = (q / width, keep[q % width]);
        r.successors(rq, p)
            .iter()
            .map(|&(pri, rt)| id(rt as usize, s.delta(sq, pri)))
            .collect()
    })?;
    let names = (0..=sink)
        .map(|q| {
            if q == sink {
                "reject".to_string()
            } else {
                format!("({},{})", r.state_name(q / width), s.state_name(keep[q % width]))
            }
        })
        .collect();
    Ok(a.with_names(names))
}

/// The safety separator `R_{n,d} ▷ U_{n',d''}` with its parameters.
#[derive(Clone, Debug)]
pub struct RegisterProduct {
    pub automaton: SafetyAutomaton,
    pub register_states: usize,
    /// Vertex bound for the inner separator: `n · |R_{n,d}|`.
    pub inner_n: usize,
    /// Priority bound for the inner separator: smallest even number ≥ `2⌊lg n⌋+3`.
    pub inner_d: Priority,
    pub inner_leaves: usize,
}

pub fn register_product(n: usize, d: Priority) -> Result<RegisterProduct> {
    register_product_within(n, d, &Limits::default())
}

/// Chains the register automaton with a tree separator built on a succinct
/// universal tree.
///
/// The inner separator reads the priorities of the register automaton along plays
/// of `G ▷ R_{n,d}`, whose strategy subgraphs have up to `n·|R_{n,d}|` vertices.
pub fn register_product_within(n: usize, d: Priority, limits: &Limits) -> Result<RegisterProduct> {
    let r = register_automaton_within(n, d, limits)?;
    let bound = r.priority_bound();
    let inner_d = bound + bound % 2;
    let inner_n = n * r.num_states();
    let tree = crate::trees::succinct_tree_within(inner_n, (inner_d / 2) as usize, limits)?;
    let u = tree_separator(&tree, inner_d)?;
    let automaton = product_parity_safety_within(&r, &u, limits)?;
    Ok(RegisterProduct {
        automaton,
        register_states: r.num_states(),
        inner_n,
        inner_d,
        inner_leaves: tree.size(),
    })
}
