use serde::{Deserialize, Serialize};

use super::decomposition::{d_tree, extract_decomposition, make_accessible, Extraction, OddCycleWitness};
use crate::automata::SafetyAutomaton;
use crate::error::{Error, Limits, Result};
use crate::game::Priority;
use crate::trees::{binomial, count_trees, floor_lg, g_lower, is_universal, Shape};

/// Sizes compared by the lower-bound report.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counts {
    /// Leaves of the extracted tree.
    #[serde(rename = "L")]
    pub leaves: Option<usize>,
    /// Non-rejecting states of the accessible part.
    #[serde(rename = "Q")]
    pub states: usize,
    /// `C(⌊lg n⌋ + d/2 − 1, ⌊lg n⌋)`.
    #[serde(rename = "B")]
    pub binomial: u128,
    /// `g(n, d/2)`.
    pub g: u128,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LowerBoundVerdict {
    /// All checks hold.
    Consistent,
    /// An odd cycle was found: the automaton is not a strong separator.
    NotStrongSeparator,
    /// Some check failed.
    Inconsistent,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LowerBoundReport {
    pub verdict: LowerBoundVerdict,
    pub n: usize,
    pub d: Priority,
    pub counts: Counts,
    /// Whether the extracted tree is `(n, d/2)`-universal; `None` when too many trees to check.
    pub universal: Option<bool>,
    pub checks: Vec<Check>,
    pub witnesses: Vec<OddCycleWitness>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d_tree: Option<Shape>,
}

/// Extracts the tree hidden in `a` and compares its size with the lower bounds.
///
/// Checks that the leaves inject into the states, and, when the tree is verified
/// universal, that it has at least `g(n, d/2) ≥ C(⌊lg n⌋ + d/2 − 1, ⌊lg n⌋)` leaves.
pub fn lower_bound_report(a: &SafetyAutomaton, n: usize, d: Priority, limits: &Limits) -> Result<LowerBoundReport> {
    if n == 0 {
        return Err(Error::InvalidAutomaton("n must be at least 1".into()));
    }
    let h = (d / 2) as usize;
    let acc = make_accessible(a);
    let lg = floor_lg(n) as u128;
    let counts = Counts {
        leaves: None,
        states: acc.num_non_rejecting(),
        binomial: binomial(lg + h as u128 - 1, lg).unwrap_or(u128::MAX),
        g: g_lower(n, h).unwrap_or(u128::MAX),
    };
    let dec = match extract_decomposition(&acc, d)? {
        Extraction::Decomposition(dec) => dec,
        Extraction::NotSeparator(w) => {
            return Ok(LowerBoundReport {
                verdict: LowerBoundVerdict::NotStrongSeparator,
                n,
                d,
                counts,
                universal: None,
                checks: Vec::new(),
                witnesses: vec![w],
                d_tree: None,
            })
        }
    };
    let dt = d_tree(&dec);
    let leaves = dt.tree.size();
    let universal = if count_trees(n, h) <= limits.max_enumerated as u128 {
        Some(is_universal(&dt.tree, n, h, limits)?)
    } else {
        None
    };
    let mut checks = vec![
        Check {
            name: "decomposition conditions".into(),
            passed: dec.verify(&acc).is_ok(),
        },
        Check {
            name: "L <= Q".into(),
            passed: leaves <= counts.states,
        },
        Check {
            name: "g >= B".into(),
            passed: counts.g >= counts.binomial,
        },
    ];
    if let Some(true) = universal {
        checks.push(Check {
            name: "L >= g".into(),
            passed: leaves as u128 >= counts.g,
        });
    }
    if let Some(u) = universal {
        checks.push(Check {
            name: "universal".into(),
            passed: u,
        });
    }
    let verdict = if checks.iter().all(|c| c.passed) {
        LowerBoundVerdict::Consistent
    } else {
        LowerBoundVerdict::Inconsistent
    };
    Ok(LowerBoundReport {
        verdict,
        n,
        d,
        counts: Counts {
            leaves: Some(leaves),
            ..counts
        },
        universal,
        checks,
        witnesses: Vec::new(),
        d_tree: Some(dt.tree.to_shape()),
    })
}
