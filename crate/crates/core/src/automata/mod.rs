//! Safety and parity automata over the alphabet `1..=d`, and the separators
//! built from counters, universal trees and registers.

mod separators;

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

pub use separators::{
    counter_separator, counter_separator_within, counter_state, product_parity_safety,
    product_parity_safety_within, register_automaton, register_automaton_within, register_product,
    register_product_within, register_state_count, tree_separator, RegisterProduct,
};

use crate::error::{Error, Result};
use crate::game::{Lasso, Priority};

/// A safety automaton: a run is accepting iff it never visits a rejecting state.
///
/// Transitions are stored per `(state, letter)` as a contiguous slice of targets.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SafetyAutomaton {
    alphabet: Priority,
    initial: usize,
    rejecting: Vec<bool>,
    offsets: Vec<usize>,
    targets: Vec<u32>,
    deterministic: bool,
    names: Option<Vec<String>>,
}

impl SafetyAutomaton {
    /// Builds an automaton from explicit `(from, letter, to)` triples.
    pub fn new(
        num_states: usize,
        alphabet: Priority,
        initial: usize,
        rejecting: &[usize],
        transitions: &[(usize, Priority, usize)],
    ) -> Result<Self> {
        let mut per: Vec<Vec<u32>> = vec![Vec::new(); num_states * alphabet as usize];
        for &(from, letter, to) in transitions {
            if from >= num_states || to >= num_states {
                return Err(Error::InvalidAutomaton(format!(
                    "transition ({from},{letter},{to}) names a state outside 0..{num_states}"
                )));
            }
            if letter == 0 || letter > alphabet {
                return Err(Error::AlphabetMismatch {
                    expected: alphabet,
                    found: letter,
                });
            }
            per[from * alphabet as usize + letter as usize - 1].push(to as u32);
        }
        let mut flags = vec![false; num_states];
        for &r in rejecting {
            if r >= num_states {
                return Err(Error::InvalidAutomaton(format!("rejecting state {r} out of range")));
            }
            flags[r] = true;
        }
        Self::from_fn(num_states, alphabet, initial, flags, |q, p| {
            per[q * alphabet as usize + p as usize - 1].iter().map(|&t| t as usize)
        })
    }

    /// Builds an automaton whose transitions are given by `succ(state, letter)`.
    pub fn from_fn<I>(
        num_states: usize,
        alphabet: Priority,
        initial: usize,
        rejecting: Vec<bool>,
        mut succ: impl FnMut(usize, Priority) -> I,
    ) -> Result<Self>
    where
        I: IntoIterator<Item = usize>,
    {
        if num_states == 0 || initial >= num_states {
            return Err(Error::InvalidAutomaton(format!(
                "initial state {initial} with {num_states} states"
            )));
        }
        if alphabet == 0 {
            return Err(Error::InvalidAutomaton("empty alphabet".into()));
        }
        if rejecting.len() != num_states {
            return Err(Error::InvalidAutomaton("rejecting flags do not cover all states".into()));
        }
        let mut offsets = Vec::with_capacity(num_states * alphabet as usize + 1);
        let mut targets: Vec<u32> = Vec::new();
        let mut deterministic = true;
        offsets.push(0);
        for q in 0..num_states {
            for p in 1..=alphabet {
                let start = targets.len();
                for t in succ(q, p) {
                    if t >= num_states {
                        return Err(Error::InvalidAutomaton(format!(
                            "transition ({q},{p},{t}) leaves the state space"
                        )));
                    }
                    targets.push(t as u32);
                }
                let slice = &mut targets[start..];
                slice.sort_unstable();
                let mut len = 0;
                for i in 0..slice.len() {
                    if i == 0 || slice[i] != slice[len - 1] {
                        slice[len] = slice[i];
                        len += 1;
                    }
                }
                targets.truncate(start + len);
                match len {
                    0 => {
                        return Err(Error::InvalidAutomaton(format!(
                            "no transition from state {q} on letter {p}"
                        )))
                    }
                    1 => {}
                    _ => deterministic = false,
                }
                offsets.push(targets.len());
            }
        }
        Ok(SafetyAutomaton {
            alphabet,
            initial,
            rejecting,
            offsets,
            targets,
            deterministic,
            names: None,
        })
    }

    pub fn with_names(mut self, names: Vec<String>) -> Self {
        if names.len() == self.num_states() {
            self.names = Some(names);
        }
        self
    }

    pub fn num_states(&self) -> usize {
        self.rejecting.len()
    }

    /// The largest letter `d`.
    pub fn alphabet(&self) -> Priority {
        self.alphabet
    }

    pub fn initial(&self) -> usize {
        self.initial
    }

    pub fn is_rejecting(&self, q: usize) -> bool {
        self.rejecting[q]
    }

    pub fn is_deterministic(&self) -> bool {
        self.deterministic
    }

    pub fn num_non_rejecting(&self) -> usize {
        self.rejecting.iter().filter(|&&r| !r).count()
    }

    /// The single absorbing rejecting state, if the automaton is in that normal form.
    pub fn reject_sink(&self) -> Option<usize> {
        let mut rej = (0..self.num_states()).filter(|&q| self.rejecting[q]);
        let sink = rej.next()?;
        if rej.next().is_some() {
            return None;
        }
        (1..=self.alphabet)
            .all(|p| self.successors(sink, p) == [sink as u32])
            .then_some(sink)
    }

    pub fn successors(&self, q: usize, p: Priority) -> &[u32] {
        let i = q * self.alphabet as usize + p as usize - 1;
        &self.targets[self.offsets[i]..self.offsets[i + 1]]
    }

    /// The successor of `q` on `p` in a deterministic automaton.
    pub fn delta(&self, q: usize, p: Priority) -> usize {
        debug_assert!(self.deterministic);
        self.targets[self.offsets[q * self.alphabet as usize + p as usize - 1]] as usize
    }

    /// All transitions as `(from, letter, to)`.
    pub fn transitions(&self) -> impl Iterator<Item = (usize, Priority, usize)> + '_ {
        (0..self.num_states()).flat_map(move |q| {
            (1..=self.alphabet).flat_map(move |p| self.successors(q, p).iter().map(move |&t| (q, p, t as usize)))
        })
    }

    pub fn num_transitions(&self) -> usize {
        self.targets.len()
    }

    pub fn state_name(&self, q: usize) -> String {
        match &self.names {
            Some(names) => names[q].clone(),
            None if self.rejecting[q] => format!("reject{q}"),
            None => q.to_string(),
        }
    }

    pub fn names(&self) -> Option<&[String]> {
        self.names.as_deref()
    }

    /// Merges all rejecting states into one absorbing sink placed last.
    ///
    /// The language is unchanged: a run is rejected as soon as it enters any
    /// rejecting state. Non-rejecting states keep their relative order.
    pub fn normalized(&self) -> SafetyAutomaton {
        if self.reject_sink() == Some(self.num_states() - 1) {
            return self.clone();
        }
        let keep: Vec<usize> = (0..self.num_states()).filter(|&q| !self.rejecting[q]).collect();
        let sink = keep.len();
        let mut map = vec![sink; self.num_states()];
        for (i, &q) in keep.iter().enumerate() {
            map[q] = i;
        }
        let mut rejecting = vec![false; sink + 1];
        rejecting[sink] = true;
        let out = SafetyAutomaton::from_fn(sink + 1, self.alphabet, map[self.initial], rejecting, |q, p| {
            if q == sink {
                vec![sink]
            } else {
                self.successors(keep[q], p).iter().map(|&t| map[t as usize]).collect()
            }
        })
        .expect("normalizing preserves totality");
        match &self.names {
            Some(names) => {
                let mut renamed: Vec<String> = keep.iter().map(|&q| names[q].clone()).collect();
                renamed.push("reject".into());
                out.with_names(renamed)
            }
            None => out,
        }
    }

    fn check_letters(&self, word: &[Priority]) -> Result<()> {
        match word.iter().find(|&&p| p == 0 || p > self.alphabet) {
            Some(&p) => Err(Error::AlphabetMismatch {
                expected: self.alphabet,
                found: p,
            }),
            None => Ok(()),
        }
    }

    /// The states visited by the unique run on a finite word.
    pub fn run_det(&self, word: &[Priority]) -> Result<Vec<usize>> {
        if !self.deterministic {
            return Err(Error::Nondeterministic);
        }
        self.check_letters(word)?;
        let mut trace = Vec::with_capacity(word.len() + 1);
        let mut q = self.initial;
        trace.push(q);
        for &p in word {
            q = self.delta(q, p);
            trace.push(q);
        }
        Ok(trace)
    }

    /// Whether some run on the ultimately periodic word avoids rejecting states forever.
    pub fn accepts_lasso(&self, w: &Lasso) -> Result<bool> {
        self.check_letters(&w.prefix)?;
        self.check_letters(&w.period)?;
        if self.deterministic {
            return Ok(self.accepts_lasso_det(w));
        }
        Ok(self.accepts_lasso_search(w))
    }

    fn accepts_lasso_det(&self, w: &Lasso) -> bool {
        let mut q = self.initial;
        if self.rejecting[q] {
            return false;
        }
        for &p in &w.prefix {
            q = self.delta(q, p);
            if self.rejecting[q] {
                return false;
            }
        }
        // The state at the start of each period repetition determines the rest.
        let mut seen = std::collections::HashSet::new();
        while seen.insert(q) {
            for &p in &w.period {
                q = self.delta(q, p);
                if self.rejecting[q] {
                    return false;
                }
            }
        }
        true
    }

    /// Reachability over (state, position) pairs; accept iff the reachable
    /// reject-free part contains a cycle.
    fn accepts_lasso_search(&self, w: &Lasso) -> bool {
        let u = w.prefix.len();
        let len = u + w.period.len();
        let next_pos = |i: usize| if i + 1 == len { u } else { i + 1 };
        let id = |q: usize, i: usize| q * len + i;
        let total = self.num_states() * len;
        if self.rejecting[self.initial] {
            return false;
        }
        let mut reached = vec![false; total];
        let mut order = Vec::new();
        let mut queue = VecDeque::from([(self.initial, 0usize)]);
        reached[id(self.initial, 0)] = true;
        while let Some((q, i)) = queue.pop_front() {
            order.push((q, i));
            for &t in self.successors(q, w.letter(i)) {
                let t = t as usize;
                let j = next_pos(i);
                if !self.rejecting[t] && !reached[id(t, j)] {
                    reached[id(t, j)] = true;
                    queue.push_back((t, j));
                }
            }
        }
        // Repeatedly discard nodes without a surviving successor.
        let mut out_count = vec![0usize; total];
        let mut preds: Vec<Vec<usize>> = vec![Vec::new(); total];
        for &(q, i) in &order {
            for &t in self.successors(q, w.letter(i)) {
                let t = t as usize;
                let k = id(t, next_pos(i));
                if reached[k] {
                    out_count[id(q, i)] += 1;
                    preds[k].push(id(q, i));
                }
            }
        }
        let mut alive = order.len();
        let mut dead: Vec<usize> = order.iter().map(|&(q, i)| id(q, i)).filter(|&k| out_count[k] == 0).collect();
        while let Some(k) = dead.pop() {
            alive -= 1;
            for &pk in &preds[k] {
                out_count[pk] -= 1;
                if out_count[pk] == 0 {
                    dead.push(pk);
                }
            }
        }
        alive > 0
    }

    pub fn to_json(&self) -> AutomatonJson {
        AutomatonJson {
            states: self.num_states(),
            initial: self.initial,
            rejecting: (0..self.num_states()).filter(|&q| self.rejecting[q]).collect(),
            transitions: self
                .transitions()
                .map(|(from, letter, to)| TransitionJson {
                    from,
                    letter,
                    pri: None,
                    to,
                })
                .collect(),
            deterministic: self.deterministic,
            alphabet: Some(self.alphabet),
            priority_bound: None,
            names: self.names.clone(),
        }
    }

    pub fn from_json(json: &AutomatonJson) -> Result<Self> {
        if json.transitions.iter().any(|t| t.pri.is_some()) {
            return Err(Error::InvalidAutomaton(
                "transition priorities given; this is a parity automaton".into(),
            ));
        }
        let alphabet = json
            .alphabet
            .unwrap_or_else(|| json.transitions.iter().map(|t| t.letter).max().unwrap_or(0));
        let triples: Vec<(usize, Priority, usize)> =
            json.transitions.iter().map(|t| (t.from, t.letter, t.to)).collect();
        let a = SafetyAutomaton::new(json.states, alphabet, json.initial, &json.rejecting, &triples)?;
        if json.deterministic && !a.deterministic {
            return Err(Error::Nondeterministic);
        }
        Ok(match &json.names {
            Some(names) => a.with_names(names.clone()),
            None => a,
        })
    }
}

/// JSON form shared by safety and parity automata.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AutomatonJson {
    pub states: usize,
    pub initial: usize,
    #[serde(default)]
    pub rejecting: Vec<usize>,
    pub transitions: Vec<TransitionJson>,
    #[serde(default)]
    pub deterministic: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alphabet: Option<Priority>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub priority_bound: Option<Priority>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub names: Option<Vec<String>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TransitionJson {
    pub from: usize,
    pub letter: Priority,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pri: Option<Priority>,
    pub to: usize,
}

/// A parity automaton: transitions carry priorities in `1..=bound`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParityAutomaton {
    alphabet: Priority,
    bound: Priority,
    initial: usize,
    num_states: usize,
    offsets: Vec<usize>,
    transitions: Vec<(Priority, u32)>,
    names: Option<Vec<String>>,
}

impl ParityAutomaton {
    /// Builds an automaton whose transitions from `(state, letter)` are `succ(state, letter)`
    /// as `(priority, target)` pairs.
    pub fn from_fn<I>(
        num_states: usize,
        alphabet: Priority,
        bound: Priority,
        initial: usize,
        mut succ: impl FnMut(usize, Priority) -> I,
    ) -> Result<Self>
    where
        I: IntoIterator<Item = (Priority, usize)>,
    {
        if num_states == 0 || initial >= num_states {
            return Err(Error::InvalidAutomaton(format!(
                "initial state {initial} with {num_states} states"
            )));
        }
        let mut offsets = vec![0];
        let mut transitions = Vec::new();
        for q in 0..num_states {
            for p in 1..=alphabet {
                let start = transitions.len();
                for (pri, t) in succ(q, p) {
                    if t >= num_states {
                        return Err(Error::InvalidAutomaton(format!("target {t} out of range")));
                    }
                    if pri == 0 || pri > bound {
                        return Err(Error::PriorityOutOfRange { priority: pri, bound });
                    }
                    transitions.push((pri, t as u32));
                }
                if transitions.len() == start {
                    return Err(Error::InvalidAutomaton(format!(
                        "no transition from state {q} on letter {p}"
                    )));
                }
                transitions[start..].sort_unstable();
                offsets.push(transitions.len());
            }
        }
        Ok(ParityAutomaton {
            alphabet,
            bound,
            initial,
            num_states,
            offsets,
            transitions,
            names: None,
        })
    }

    pub fn with_names(mut self, names: Vec<String>) -> Self {
        if names.len() == self.num_states {
            self.names = Some(names);
        }
        self
    }

    pub fn num_states(&self) -> usize {
        self.num_states
    }

    pub fn alphabet(&self) -> Priority {
        self.alphabet
    }

    /// Upper bound on transition priorities.
    pub fn priority_bound(&self) -> Priority {
        self.bound
    }

    pub fn initial(&self) -> usize {
        self.initial
    }

    /// Transitions from `q` on letter `p` as `(priority, target)`.
    pub fn successors(&self, q: usize, p: Priority) -> &[(Priority, u32)] {
        let i = q * self.alphabet as usize + p as usize - 1;
        &self.transitions[self.offsets[i]..self.offsets[i + 1]]
    }

    pub fn state_name(&self, q: usize) -> String {
        match &self.names {
            Some(names) => names[q].clone(),
            None => q.to_string(),
        }
    }

    pub fn to_json(&self) -> AutomatonJson {
        let mut transitions = Vec::new();
        for q in 0..self.num_states {
            for p in 1..=self.alphabet {
                for &(pri, t) in self.successors(q, p) {
                    transitions.push(TransitionJson {
                        from: q,
                        letter: p,
                        pri: Some(pri),
                        to: t as usize,
                    });
                }
            }
        }
        AutomatonJson {
            states: self.num_states,
            initial: self.initial,
            rejecting: Vec::new(),
            transitions,
            deterministic: (0..self.num_states)
                .all(|q| (1..=self.alphabet).all(|p| self.successors(q, p).len() == 1)),
            alphabet: Some(self.alphabet),
            priority_bound: Some(self.bound),
            names: self.names.clone(),
        }
    }
}
