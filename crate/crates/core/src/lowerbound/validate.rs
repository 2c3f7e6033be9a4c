use std::collections::HashSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::adversarial::{alpha_len, alpha_word, build_gt};
use crate::automata::SafetyAutomaton;
use crate::error::{Error, Limits, Result};
use crate::game::{random_walk, Lasso, Priority};
use crate::generate::{random_even_graph, GameParams};
use crate::trees::{count_trees, enumerate_trees, OrderedTree, Shape};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Verdict {
    Pass,
    Fail,
    Inconclusive,
}

impl Verdict {
    fn combine(self, other: Verdict) -> Verdict {
        use Verdict::*;
        match (self, other) {
            (Fail, _) | (_, Fail) => Fail,
            (Inconclusive, _) | (_, Inconclusive) => Inconclusive,
            _ => Pass,
        }
    }
}

/// Settings of [`validate_separator`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationConfig {
    pub n: usize,
    pub d: Priority,
    /// Closed-walk lassos sampled from even graphs, besides one canonical cycle per tree.
    pub lassos: usize,
    pub walk_length: usize,
    /// Letters of each adversarial word read before giving up.
    pub budget: u64,
    /// Random odd lassos, besides all odd periods of length at most 3.
    pub random_odd: usize,
    /// Largest number of trees per leaf count whose graphs and words are used.
    pub max_trees: usize,
    pub seed: u64,
}

impl ValidationConfig {
    pub fn new(n: usize, d: Priority) -> Self {
        ValidationConfig {
            n,
            d,
            lassos: 1000,
            walk_length: 4 * n + 8,
            budget: 1_000_000,
            random_odd: 200,
            max_trees: 64,
            seed: 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SectionReport {
    pub name: String,
    pub verdict: Verdict,
    /// Words checked.
    pub checked: u64,
    /// Adversarial words cut off by the budget.
    pub truncated: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub section: String,
    pub description: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lasso: Option<Lasso>,
    /// The rejected finite word, when short enough to print.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub word: Option<Vec<Priority>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub verdict: Verdict,
    pub sections: Vec<SectionReport>,
    pub witnesses: Vec<Witness>,
}

const MAX_WITNESSES: usize = 5;
const MAX_PRINTED_WORD: u64 = 200;

/// Full-depth trees of height `d/2` with at most `n` leaves, at most `max` per leaf count.
fn test_trees(n: usize, d: Priority, max: usize, rng: &mut impl Rng) -> Result<Vec<Shape>> {
    let h = (d / 2) as usize;
    let mut out = Vec::new();
    for l in 1..=n {
        let count = count_trees(l, h);
        let limits = Limits::default();
        if count <= max as u128 {
            out.extend(enumerate_trees(l, h, &limits)?);
        } else if count <= limits.max_enumerated as u128 {
            let all = enumerate_trees(l, h, &limits)?;
            out.extend(rand::seq::index::sample(rng, all.len(), max).into_iter().map(|i| all[i].clone()));
        } else {
            out.extend((0..max).map(|_| random_tree(l, h, rng)));
        }
    }
    Ok(out)
}

/// A random tree with exactly `l` leaves at depth `h`, from random compositions.
fn random_tree(l: usize, h: usize, rng: &mut impl Rng) -> Shape {
    if h == 0 {
        return Shape::leaf();
    }
    let mut parts = Vec::new();
    let mut left = l;
    while left > 0 {
        let a = rng.random_range(1..=left);
        parts.push(a);
        left -= a;
    }
    Shape::node(parts.into_iter().map(|a| random_tree(a, h - 1, rng)).collect())
}

/// Existential simulation of `a` on a word: the set of states reachable by reject-free runs.
struct Runs<'a> {
    a: &'a SafetyAutomaton,
    states: Vec<u32>,
    scratch: Vec<bool>,
}

impl<'a> Runs<'a> {
    fn new(a: &'a SafetyAutomaton) -> Self {
        let states = if a.is_rejecting(a.initial()) {
            Vec::new()
        } else {
            vec![a.initial() as u32]
        };
        Runs {
            a,
            states,
            scratch: vec![false; a.num_states()],
        }
    }

    /// Reads one letter; returns whether some run survives.
    fn read(&mut self, p: Priority) -> bool {
        let mut next = Vec::new();
        for &q in &self.states {
            for &t in self.a.successors(q as usize, p) {
                if !self.a.is_rejecting(t as usize) && !self.scratch[t as usize] {
                    self.scratch[t as usize] = true;
                    next.push(t);
                }
            }
        }
        for &t in &next {
            self.scratch[t as usize] = false;
        }
        next.sort_unstable();
        self.states = next;
        !self.states.is_empty()
    }
}

fn push_witness(witnesses: &mut Vec<Witness>, section: &str, description: String, lasso: Option<Lasso>, word: Option<Vec<Priority>>) {
    if witnesses.iter().filter(|w| w.section == section).count() < MAX_WITNESSES {
        witnesses.push(Witness {
            section: section.into(),
            description,
            lasso,
            word,
        });
    }
}

/// The lasso `(α · d)^ω` with repetition 1: a closed walk of the tree's graph.
fn canonical_cycle(t: &OrderedTree, d: Priority) -> Result<Lasso> {
    let len = alpha_len(t, 1) as usize;
    let mut period: Vec<Priority> = alpha_word(t, d, 1)?.take(len).map(|s| s.letter).collect();
    period.push(d);
    Lasso::periodic(period)
}

fn section_even_cycles(
    a: &SafetyAutomaton,
    cfg: &ValidationConfig,
    trees: &[OrderedTree],
    rng: &mut ChaCha8Rng,
    witnesses: &mut Vec<Witness>,
) -> Result<SectionReport> {
    const NAME: &str = "even-cycles";
    let mut fail = false;
    let mut checked = 0;
    let mut check = |lasso: Lasso, source: String, witnesses: &mut Vec<Witness>| -> Result<()> {
        checked += 1;
        if !a.accepts_lasso(&lasso)? {
            fail = true;
            push_witness(witnesses, NAME, format!("rejects a closed walk of {source}"), Some(lasso), None);
        }
        Ok(())
    };
    for t in trees {
        if alpha_len(t, 1) < cfg.budget as u128 {
            check(canonical_cycle(t, cfg.d)?, format!("the graph of tree {}", shape_json(t)), witnesses)?;
        }
    }
    let params = GameParams {
        n: cfg.n,
        d: cfg.d,
        max_out: 3,
    };
    let graphs: Vec<_> = trees.iter().map(|t| build_gt(t, cfg.d)).collect::<Result<_>>()?;
    for i in 0..cfg.lassos {
        let (g, source) = if i % 2 == 0 || graphs.is_empty() {
            (random_even_graph(&params, rng)?, "a random even graph".to_string())
        } else {
            let k = rng.random_range(0..graphs.len());
            (graphs[k].clone(), format!("the graph of tree {}", shape_json(&trees[k])))
        };
        let start = rng.random_range(0..g.num_vertices());
        let walk = random_walk(&g, start, cfg.walk_length.max(g.num_vertices() + 1), rng)?;
        let lasso = walk.closed_lasso().expect("walks longer than the vertex count close a cycle");
        check(lasso, source, witnesses)?;
    }
    Ok(SectionReport {
        name: NAME.into(),
        verdict: if fail { Verdict::Fail } else { Verdict::Pass },
        checked,
        truncated: 0,
    })
}

fn shape_json(t: &OrderedTree) -> String {
    serde_json::to_string(&t.to_shape()).expect("shapes serialize")
}

fn section_adversarial(
    a: &SafetyAutomaton,
    cfg: &ValidationConfig,
    trees: &[OrderedTree],
    witnesses: &mut Vec<Witness>,
) -> Result<SectionReport> {
    const NAME: &str = "adversarial-prefixes";
    let r = a.num_states() as u64;
    let mut verdict = Verdict::Pass;
    let mut truncated = 0;
    for t in trees {
        let finite = alpha_len(t, r);
        let mut runs = Runs::new(a);
        let mut read: u64 = 0;
        let mut rejected = runs.states.is_empty();
        let mut recent: Vec<Priority> = Vec::new();
        let mut stream = alpha_word(t, cfg.d, r)?;
        while !rejected && (read as u128) < finite && read < cfg.budget {
            let p = stream.next().expect("infinite stream").letter;
            if read < MAX_PRINTED_WORD {
                recent.push(p);
            }
            read += 1;
            rejected = !runs.read(p);
        }
        if !rejected && (read as u128) < finite {
            truncated += 1;
            verdict = verdict.combine(Verdict::Inconclusive);
            continue;
        }
        // The rest of the word is 2 forever: look for a repeated state set.
        let mut seen = HashSet::new();
        while !rejected && seen.insert(runs.states.clone()) {
            if read >= cfg.budget {
                truncated += 1;
                verdict = verdict.combine(Verdict::Inconclusive);
                break;
            }
            if read < MAX_PRINTED_WORD {
                recent.push(2);
            }
            read += 1;
            rejected = !runs.read(2);
        }
        if rejected {
            verdict = Verdict::Fail;
            push_witness(
                witnesses,
                NAME,
                format!("rejects the adversarial word of tree {} (r = {r}) after {read} letters", shape_json(t)),
                None,
                (read <= MAX_PRINTED_WORD).then_some(recent),
            );
        }
    }
    Ok(SectionReport {
        name: NAME.into(),
        verdict,
        checked: trees.len() as u64,
        truncated,
    })
}

/// All periods of length at most 3 whose largest letter is odd.
fn short_odd_periods(d: Priority) -> Vec<Vec<Priority>> {
    let mut out: Vec<Vec<Priority>> = Vec::new();
    let mut layer: Vec<Vec<Priority>> = vec![Vec::new()];
    for _ in 0..3 {
        let mut next = Vec::new();
        for w in &layer {
            for p in 1..=d {
                let mut v = w.clone();
                v.push(p);
                next.push(v);
            }
        }
        out.extend(next.iter().filter(|w| w.iter().max().is_some_and(|m| m % 2 == 1)).cloned());
        layer = next;
    }
    out
}

fn section_odd(a: &SafetyAutomaton, cfg: &ValidationConfig, rng: &mut ChaCha8Rng, witnesses: &mut Vec<Witness>) -> Result<SectionReport> {
    const NAME: &str = "odd-lassos";
    let mut lassos: Vec<Lasso> = short_odd_periods(cfg.d)
        .into_iter()
        .map(Lasso::periodic)
        .collect::<Result<_>>()?;
    for _ in 0..cfg.random_odd {
        let prefix: Vec<Priority> = (0..rng.random_range(0..4)).map(|_| rng.random_range(1..=cfg.d)).collect();
        let top = 2 * rng.random_range(0..cfg.d / 2) + 1;
        let mut period: Vec<Priority> = (0..rng.random_range(1..=6)).map(|_| rng.random_range(1..=top)).collect();
        let at = rng.random_range(0..period.len());
        period[at] = top;
        lassos.push(Lasso::new(prefix, period)?);
    }
    let mut fail = false;
    for lasso in &lassos {
        if a.accepts_lasso(lasso)? {
            fail = true;
            push_witness(witnesses, NAME, "accepts a word whose largest recurring letter is odd".into(), Some(lasso.clone()), None);
        }
    }
    Ok(SectionReport {
        name: NAME.into(),
        verdict: if fail { Verdict::Fail } else { Verdict::Pass },
        checked: lassos.len() as u64,
        truncated: 0,
    })
}

/// Tests `a` against the strong separator contract for `n` and `d`: it must accept
/// words of closed walks in even graphs with at most `n` vertices, including the
/// adversarial words, and reject words whose largest recurring letter is odd.
///
/// Passing is evidence, not proof. Each failure carries a concrete word.
pub fn validate_separator(a: &SafetyAutomaton, cfg: &ValidationConfig) -> Result<ValidationReport> {
    if cfg.n == 0 || cfg.d == 0 || !cfg.d.is_multiple_of(2) {
        return Err(Error::InvalidAutomaton(format!("cannot validate for n = {}, d = {}", cfg.n, cfg.d)));
    }
    if a.alphabet() < cfg.d {
        return Err(Error::AlphabetMismatch {
            expected: a.alphabet(),
            found: cfg.d,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let trees: Vec<OrderedTree> = test_trees(cfg.n, cfg.d, cfg.max_trees, &mut rng)?
        .iter()
        .map(OrderedTree::from_shape)
        .collect();
    let mut witnesses = Vec::new();
    let sections = vec![
        section_even_cycles(a, cfg, &trees, &mut rng, &mut witnesses)?,
        section_adversarial(a, cfg, &trees, &mut witnesses)?,
        section_odd(a, cfg, &mut rng, &mut witnesses)?,
    ];
    let verdict = sections.iter().fold(Verdict::Pass, |v, s| v.combine(s.verdict));
    Ok(ValidationReport {
        verdict,
        sections,
        witnesses,
    })
}
