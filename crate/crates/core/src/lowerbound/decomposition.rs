use std::collections::{BTreeMap, VecDeque};

use serde::{Deserialize, Serialize};

use crate::automata::SafetyAutomaton;
use crate::error::{Error, Result};
use crate::game::{Lasso, Priority};
use crate::scc;
use crate::trees::{OrderedTree, Shape};

/// Keeps the states reachable from the initial state by reject-free runs and sends
/// every other transition target to a single rejecting sink (added only if used).
///
/// The accepted language does not change. Surviving states keep their relative order.
pub fn make_accessible(a: &SafetyAutomaton) -> SafetyAutomaton {
    let n = a.num_states();
    let reach = reject_free_reachable(a);
    let mut order = Vec::new();
    for q in 0..n {
        if reach[q] {
            order.push(q);
        }
    }
    let kept = order.len();
    let needs_sink = kept == 0
        || order
            .iter()
            .any(|&q| (1..=a.alphabet()).any(|p| a.successors(q, p).iter().any(|&t| !reach[t as usize])));
    let sink = kept;
    let total = kept + usize::from(needs_sink);
    let mut map = vec![sink; n];
    for (i, &q) in order.iter().enumerate() {
        map[q] = i;
    }
    let mut rejecting = vec![false; total];
    if needs_sink {
        rejecting[sink] = true;
    }
    let initial = if kept == 0 { sink } else { map[a.initial()] };
    let out = SafetyAutomaton::from_fn(total, a.alphabet(), initial, rejecting, |q, p| {
        if q == sink {
            vec![sink]
        } else {
            a.successors(order[q], p).iter().map(|&t| map[t as usize]).collect()
        }
    })
    .expect("restriction keeps the automaton total");
    match a.names() {
        Some(names) => {
            let mut renamed: Vec<String> = order.iter().map(|&q| names[q].clone()).collect();
            if needs_sink {
                renamed.push("reject".into());
            }
            out.with_names(renamed)
        }
        None => out,
    }
}

fn reject_free_reachable(a: &SafetyAutomaton) -> Vec<bool> {
    let mut reach = vec![false; a.num_states()];
    if a.is_rejecting(a.initial()) {
        return reach;
    }
    reach[a.initial()] = true;
    let mut queue = VecDeque::from([a.initial()]);
    while let Some(q) = queue.pop_front() {
        for p in 1..=a.alphabet() {
            for &t in a.successors(q, p) {
                let t = t as usize;
                if !reach[t] && !a.is_rejecting(t) {
                    reach[t] = true;
                    queue.push_back(t);
                }
            }
        }
    }
    reach
}

/// A reject-free run from the initial state that can loop forever on a word whose
/// largest recurring letter is odd; proof that the automaton is not a strong separator.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OddCycleWitness {
    pub lasso: Lasso,
    /// States of the cycle, starting where the period starts.
    pub cycle: Vec<usize>,
}

/// One quasi-order of a decomposition: its classes in increasing order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Level {
    /// The odd index `j` of the quasi-order.
    pub index: Priority,
    pub classes: Vec<Vec<usize>>,
    /// For each class, the class of the next coarser level containing it (empty at the top).
    pub parent: Vec<usize>,
    #[serde(skip)]
    class_of: Vec<Option<usize>>,
}

impl Level {
    pub fn class_of(&self, q: usize) -> Option<usize> {
        self.class_of.get(q).copied().flatten()
    }
}

/// A chain of linear quasi-orders on the non-rejecting states, one per odd index
/// `1, 3, …, d+1`, each refining the next.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreeDecomposition {
    pub d: Priority,
    /// `levels[i]` is the quasi-order with index `2i+1`.
    pub levels: Vec<Level>,
}

impl TreeDecomposition {
    pub fn level(&self, j: Priority) -> &Level {
        &self.levels[(j / 2) as usize]
    }

    /// Checks refinement and the three decomposition conditions against every
    /// transition between non-rejecting states of `a`.
    pub fn verify(&self, a: &SafetyAutomaton) -> std::result::Result<(), String> {
        let d = self.d;
        if self.levels.len() != (d / 2 + 1) as usize {
            return Err(format!("expected {} levels, found {}", d / 2 + 1, self.levels.len()));
        }
        let top = &self.levels[(d / 2) as usize];
        if top.classes.len() != 1 {
            return Err(format!("top level has {} classes", top.classes.len()));
        }
        for q in (0..a.num_states()).filter(|&q| !a.is_rejecting(q)) {
            for (i, level) in self.levels.iter().enumerate() {
                let Some(c) = level.class_of(q) else {
                    return Err(format!("state {q} missing from level {}", level.index));
                };
                if i + 1 < self.levels.len() && self.levels[i + 1].class_of(q) != Some(level.parent[c]) {
                    return Err(format!("level {} does not refine level {}", level.index, level.index + 2));
                }
            }
        }
        for (s, p, t) in a.transitions() {
            if a.is_rejecting(s) || a.is_rejecting(t) {
                continue;
            }
            for level in &self.levels {
                let (cs, ct) = (level.class_of(s), level.class_of(t));
                let j = level.index;
                if p < j && cs < ct {
                    return Err(format!("transition ({s},{p},{t}) increases level {j}"));
                }
                if p % 2 == 1 && j <= p && cs <= ct {
                    return Err(format!("odd transition ({s},{p},{t}) does not decrease level {j}"));
                }
            }
        }
        Ok(())
    }
}

/// Outcome of [`extract_decomposition`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Extraction {
    Decomposition(TreeDecomposition),
    NotSeparator(OddCycleWitness),
}

/// Shortest reject-free word leading from the initial state to `target`.
fn access_word(a: &SafetyAutomaton, target: usize) -> Vec<Priority> {
    let n = a.num_states();
    let mut via: Vec<Option<(usize, Priority)>> = vec![None; n];
    let mut seen = vec![false; n];
    let start = a.initial();
    seen[start] = true;
    let mut queue = VecDeque::from([start]);
    while let Some(q) = queue.pop_front() {
        if q == target {
            break;
        }
        for p in 1..=a.alphabet() {
            for &t in a.successors(q, p) {
                let t = t as usize;
                if !seen[t] && !a.is_rejecting(t) {
                    seen[t] = true;
                    via[t] = Some((q, p));
                    queue.push_back(t);
                }
            }
        }
    }
    let mut word = Vec::new();
    let mut cur = target;
    while cur != start {
        let (prev, p) = via[cur].expect("accessible state");
        word.push(p);
        cur = prev;
    }
    word.reverse();
    word
}

/// Transitions `(s, p, t)` with `p ≤ max` and both ends in the same group.
fn grouped_edges<'a>(a: &'a SafetyAutomaton, group: &'a [usize], max: Priority, s: usize) -> impl Iterator<Item = (Priority, usize)> + 'a {
    let g = group[s];
    (1..=max).flat_map(move |p| {
        a.successors(s, p)
            .iter()
            .map(move |&t| (p, t as usize))
            .filter(move |&(_, t)| g != usize::MAX && group[t] == g)
    })
}

/// Looks for a cycle with odd maximum priority `q ≤ p` inside one group.
fn find_odd_cycle(a: &SafetyAutomaton, group: &[usize], p: Priority) -> Option<OddCycleWitness> {
    let n = a.num_states();
    let included = |s: usize| group[s] != usize::MAX;
    let mut q = 1;
    while q <= p {
        let comps = scc::tarjan(n, included, |s| grouped_edges(a, group, q, s).map(|(_, t)| t));
        for s in (0..n).filter(|&s| included(s)) {
            for &t in a.successors(s, q) {
                let t = t as usize;
                if group[t] != group[s] || comps.component[t] != comps.component[s] {
                    continue;
                }
                // Close the cycle s -q-> t ~> s inside the component.
                let c = comps.component[s];
                let mut via: Vec<Option<(usize, Priority)>> = vec![None; n];
                let mut seen = vec![false; n];
                seen[t] = true;
                let mut queue = VecDeque::from([t]);
                while let Some(x) = queue.pop_front() {
                    if x == s {
                        break;
                    }
                    for (pp, y) in grouped_edges(a, group, q, x) {
                        if !seen[y] && comps.component[y] == c {
                            seen[y] = true;
                            via[y] = Some((x, pp));
                            queue.push_back(y);
                        }
                    }
                }
                let mut back = Vec::new();
                let mut path = Vec::new();
                let mut cur = s;
                while cur != t {
                    let (prev, pp) = via[cur].expect("component members are mutually reachable");
                    back.push(pp);
                    path.push(cur);
                    cur = prev;
                }
                back.reverse();
                path.reverse();
                // The period reads q from s to t, then follows `path` back to s.
                let mut cycle = vec![s];
                if t != s {
                    cycle.push(t);
                    cycle.extend(&path[..path.len() - 1]);
                }
                let mut period = vec![q];
                period.extend(back);
                let lasso = Lasso::new(access_word(a, s), period).expect("nonempty period");
                return Some(OddCycleWitness { lasso, cycle });
            }
        }
        q += 2;
    }
    None
}

/// Resistance of every grouped state: the largest number of `p`-transitions on a
/// path that uses transitions of priority at most `p` and stays in its group.
fn grouped_resistance(a: &SafetyAutomaton, group: &[usize], p: Priority) -> std::result::Result<Vec<u64>, OddCycleWitness> {
    if let Some(w) = find_odd_cycle(a, group, p) {
        return Err(w);
    }
    let n = a.num_states();
    let comps = scc::tarjan(n, |s| group[s] != usize::MAX, |s| grouped_edges(a, group, p, s).map(|(_, t)| t));
    let members = comps.members();
    let mut res_comp = vec![0u64; comps.count];
    // Components are numbered sinks first.
    for (c, states) in members.iter().enumerate() {
        let mut best = 0;
        for &s in states {
            for (pp, t) in grouped_edges(a, group, p, s) {
                let ct = comps.component[t];
                if ct != c {
                    best = best.max(res_comp[ct] + u64::from(pp == p));
                }
            }
        }
        res_comp[c] = best;
    }
    Ok((0..n)
        .map(|s| if group[s] == usize::MAX { 0 } else { res_comp[comps.component[s]] })
        .collect())
}

/// Resistance of the states of `class` with respect to the odd priority `p`, or a
/// witness that the sub-automaton on `class` has an odd cycle.
pub fn resistance(
    a: &SafetyAutomaton,
    class: &[usize],
    p: Priority,
) -> std::result::Result<BTreeMap<usize, u64>, OddCycleWitness> {
    let mut group = vec![usize::MAX; a.num_states()];
    for &s in class {
        group[s] = 0;
    }
    let r = grouped_resistance(a, &group, p)?;
    Ok(class.iter().map(|&s| (s, r[s])).collect())
}

fn level_from_keys(index: Priority, states: &[usize], n: usize, key: impl Fn(usize) -> (usize, u64)) -> Level {
    let mut keys: Vec<(usize, u64)> = states.iter().map(|&s| key(s)).collect();
    keys.sort_unstable();
    keys.dedup();
    let mut classes = vec![Vec::new(); keys.len()];
    let mut class_of = vec![None; n];
    for &s in states {
        let c = keys.binary_search(&key(s)).expect("key present");
        classes[c].push(s);
        class_of[s] = Some(c);
    }
    Level {
        index,
        classes,
        parent: keys.iter().map(|k| k.0).collect(),
        class_of,
    }
}

/// Builds the decomposition level by level from the top: each class of level
/// `2i+3` is split by resistance with respect to `2i+1`, lower resistance first.
///
/// Returns a witness instead if some class contains an odd cycle reachable by a
/// reject-free run.
pub fn extract_decomposition(a: &SafetyAutomaton, d: Priority) -> Result<Extraction> {
    if d == 0 || !d.is_multiple_of(2) || a.alphabet() != d {
        return Err(Error::AlphabetMismatch {
            expected: d,
            found: a.alphabet(),
        });
    }
    let reach = reject_free_reachable(a);
    if let Some(q) = (0..a.num_states()).find(|&q| !a.is_rejecting(q) && !reach[q]) {
        return Err(Error::NotAccessible(q));
    }
    let n = a.num_states();
    let states: Vec<usize> = (0..n).filter(|&q| !a.is_rejecting(q)).collect();
    if states.is_empty() {
        return Err(Error::InvalidAutomaton("no non-rejecting states".into()));
    }
    let h = (d / 2) as usize;
    let mut levels: Vec<Level> = Vec::with_capacity(h + 1);
    let mut top = level_from_keys(d + 1, &states, n, |_| (0, 0));
    top.parent.clear();
    levels.push(top);
    for i in (0..h).rev() {
        let p = 2 * i as Priority + 1;
        let above = levels.last().expect("top level");
        let group: Vec<usize> = (0..n).map(|q| above.class_of(q).unwrap_or(usize::MAX)).collect();
        let res = match grouped_resistance(a, &group, p) {
            Ok(r) => r,
            Err(w) => return Ok(Extraction::NotSeparator(w)),
        };
        let level = level_from_keys(p, &states, n, |s| (group[s], res[s]));
        levels.push(level);
    }
    levels.reverse();
    let dec = TreeDecomposition { d, levels };
    dec.verify(a).map_err(|e| Error::InvalidAutomaton(format!("decomposition check failed: {e}")))?;
    Ok(Extraction::Decomposition(dec))
}

/// The tree of nested classes of a decomposition and an injective map from its
/// leaves (in leaf order) to states.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DTree {
    pub tree: OrderedTree,
    /// The lowest-id state of each finest class, indexed like the tree's leaves.
    pub leaf_states: Vec<usize>,
}

pub fn d_tree(dec: &TreeDecomposition) -> DTree {
    fn build(dec: &TreeDecomposition, level: usize, class: usize, leaf_states: &mut Vec<usize>) -> Shape {
        if level == 0 {
            leaf_states.push(*dec.levels[0].classes[class].iter().min().expect("nonempty class"));
            return Shape::leaf();
        }
        let below = &dec.levels[level - 1];
        let children = (0..below.classes.len())
            .filter(|&c| below.parent[c] == class)
            .map(|c| build(dec, level - 1, c, leaf_states))
            .collect();
        Shape::node(children)
    }
    let mut leaf_states = Vec::new();
    let shape = build(dec, dec.levels.len() - 1, 0, &mut leaf_states);
    DTree {
        tree: OrderedTree::from_shape(&shape),
        leaf_states,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automata::{counter_separator, tree_separator};
    use crate::trees::{full_tree, succinct_tree};

    fn decomposition(a: &SafetyAutomaton, d: Priority) -> TreeDecomposition {
        match extract_decomposition(a, d).unwrap() {
            Extraction::Decomposition(dec) => dec,
            Extraction::NotSeparator(w) => panic!("unexpected witness {:?}", w),
        }
    }

    #[test]
    fn accessible_automata_are_unchanged() {
        let a = counter_separator(2, 4).unwrap();
        assert_eq!(make_accessible(&a), a);
    }

    #[test]
    fn unreachable_states_are_removed() {
        // 0 -> 0 on everything; 1 unreachable.
        let a = SafetyAutomaton::new(2, 2, 0, &[], &[(0, 1, 0), (0, 2, 0), (1, 1, 0), (1, 2, 1)]).unwrap();
        let b = make_accessible(&a);
        assert_eq!(b.num_states(), 1);
        assert!(matches!(extract_decomposition(&a, 2), Err(Error::NotAccessible(1))));
    }

    #[test]
    fn states_behind_reject_become_rejecting() {
        // 0 -1-> 1 (rejecting) -1-> 2 (non-rejecting, only reachable through 1).
        let a = SafetyAutomaton::new(
            3,
            2,
            0,
            &[1],
            &[(0, 1, 1), (0, 2, 0), (1, 1, 2), (1, 2, 1), (2, 1, 2), (2, 2, 2)],
        )
        .unwrap();
        let b = make_accessible(&a);
        assert_eq!(b.num_states(), 2);
        assert_eq!(b.num_non_rejecting(), 1);
        assert_eq!(b.reject_sink(), Some(1));
    }

    #[test]
    fn counter_resistance() {
        let a = counter_separator(2, 2).unwrap();
        let r = resistance(&a, &[0, 1, 2], 1).unwrap();
        // States are numbered <0>, <1>, <2>.
        assert_eq!(r.into_iter().collect::<Vec<_>>(), vec![(0, 0), (1, 1), (2, 2)]);
    }

    #[test]
    fn chain_resistance() {
        // s2 -1-> s1 -1-> s0, every other transition rejects.
        let mut tr = vec![(2, 1, 1), (1, 1, 0), (0, 1, 3)];
        for q in 0..4 {
            tr.push((q, 2, 3));
        }
        tr.push((3, 1, 3));
        let a = SafetyAutomaton::new(4, 2, 2, &[3], &tr).unwrap();
        let r = resistance(&a, &[0, 1, 2], 1).unwrap();
        assert_eq!(r.into_iter().collect::<Vec<_>>(), vec![(0, 0), (1, 1), (2, 2)]);
    }

    #[test]
    fn odd_self_loop_is_a_witness() {
        let a = SafetyAutomaton::new(1, 2, 0, &[], &[(0, 1, 0), (0, 2, 0)]).unwrap();
        assert!(resistance(&a, &[0], 1).is_err());
        match extract_decomposition(&a, 2).unwrap() {
            Extraction::NotSeparator(w) => {
                assert_eq!(w.lasso.period, vec![1]);
                assert!(w.lasso.prefix.is_empty());
                assert!(a.accepts_lasso(&w.lasso).unwrap());
            }
            Extraction::Decomposition(_) => panic!("accepts (1)^w"),
        }
    }

    #[test]
    fn counter_decomposition() {
        let a = counter_separator(2, 2).unwrap();
        let dec = decomposition(&a, 2);
        assert_eq!(dec.level(3).classes, vec![vec![0, 1, 2]]);
        assert_eq!(dec.level(1).classes, vec![vec![0], vec![1], vec![2]]);
        let t = d_tree(&dec);
        assert_eq!(t.tree.size(), 3);
        assert_eq!(t.tree.height(), 1);
        assert_eq!(t.leaf_states, vec![0, 1, 2]);
    }

    #[test]
    fn even_only_automaton_has_single_classes() {
        let a = SafetyAutomaton::new(2, 4, 0, &[1], &[(0, 2, 0), (0, 4, 0), (0, 1, 1), (0, 3, 1), (1, 1, 1), (1, 2, 1), (1, 3, 1), (1, 4, 1)]).unwrap();
        let dec = decomposition(&a, 4);
        assert!(dec.levels.iter().all(|l| l.classes.len() == 1));
        let t = d_tree(&dec);
        assert_eq!(t.tree.size(), 1);
        assert_eq!(t.tree.height(), 2);
    }

    #[test]
    fn built_in_separators_decompose() {
        for n in 1..=3 {
            for d in [2, 4, 6] {
                let h = (d / 2) as usize;
                let seps = [
                    counter_separator(n, d).unwrap(),
                    tree_separator(&succinct_tree(n, h).unwrap(), d).unwrap(),
                    tree_separator(&full_tree(n, h).unwrap(), d).unwrap(),
                ];
                for a in &seps {
                    let dec = decomposition(a, d);
                    dec.verify(a).unwrap();
                    let t = d_tree(&dec);
                    assert!(t.tree.size() <= a.num_non_rejecting());
                    let mut distinct = t.leaf_states.clone();
                    distinct.sort_unstable();
                    distinct.dedup();
                    assert_eq!(distinct.len(), t.leaf_states.len());
                }
            }
        }
    }

    #[test]
    fn tree_separator_recovers_its_tree() {
        let t = succinct_tree(3, 2).unwrap();
        let a = tree_separator(&t, 4).unwrap();
        let dt = d_tree(&decomposition(&a, 4));
        assert_eq!(dt.tree.to_shape(), t.to_shape());
    }
}
