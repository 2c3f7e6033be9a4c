use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Lower and upper bounds on the size of `(ℓ,h)`-universal trees.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SizeBounds {
    pub leaves: usize,
    pub height: usize,
    /// Exact value of the lower-bound recurrence `g(ℓ,h)`.
    pub g: u128,
    /// `C(⌊lg ℓ⌋+h-1, h-1)`.
    pub binom_lower: u128,
    /// `2ℓ·C(⌈lg ℓ⌉+h+1, h)`.
    pub jl_upper: u128,
}

pub fn floor_lg(l: usize) -> usize {
    assert!(l > 0, "lg of zero");
    (usize::BITS - 1 - l.leading_zeros()) as usize
}

pub fn ceil_lg(l: usize) -> usize {
    let f = floor_lg(l);
    if l.is_power_of_two() {
        f
    } else {
        f + 1
    }
}

/// `C(n,k)`, or `None` on overflow.
pub fn binomial(n: u128, k: u128) -> Option<u128> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        // acc * (n-i) is divisible by (i+1) because acc = C(n, i).
        acc = acc.checked_mul(n - i)? / (i + 1);
    }
    Some(acc)
}

/// `g(ℓ,h) = Σ_{δ=1}^{ℓ} g(⌊ℓ/δ⌋, h-1)` with `g(ℓ,1) = ℓ` and `g(1,h) = 1`.
///
/// Terms with equal quotient `⌊ℓ/δ⌋` are summed in one step, so the cost per
/// memoized entry is `O(√ℓ)`.
pub fn g_lower(l: usize, h: usize) -> Option<u128> {
    fn go(l: usize, h: usize, memo: &mut HashMap<(usize, usize), Option<u128>>) -> Option<u128> {
        if h == 1 {
            return Some(l as u128);
        }
        if l <= 1 {
            return Some(l as u128);
        }
        if let Some(&v) = memo.get(&(l, h)) {
            return v;
        }
        let mut total: u128 = 0;
        let mut delta = 1;
        let mut ok = true;
        while delta <= l {
            let q = l / delta;
            let last = l / q;
            match go(q, h - 1, memo).and_then(|g| g.checked_mul((last - delta + 1) as u128)) {
                Some(term) => match total.checked_add(term) {
                    Some(t) => total = t,
                    None => ok = false,
                },
                None => ok = false,
            }
            if !ok {
                break;
            }
            delta = last + 1;
        }
        let out = ok.then_some(total);
        memo.insert((l, h), out);
        out
    }
    if h == 0 {
        return Some(1);
    }
    go(l, h, &mut HashMap::new())
}

pub fn size_bounds(l: usize, h: usize) -> Result<SizeBounds> {
    if l == 0 || h == 0 {
        return Err(Error::InvalidTree(format!("size bounds need ℓ ≥ 1 and h ≥ 1, got ({l},{h})")));
    }
    let overflow = || Error::cap("size bound arithmetic", u128::MAX, u128::MAX);
    let g = g_lower(l, h).ok_or_else(overflow)?;
    let binom_lower = binomial((floor_lg(l) + h - 1) as u128, (h - 1) as u128).ok_or_else(overflow)?;
    let jl_upper = binomial((ceil_lg(l) + h + 1) as u128, h as u128)
        .and_then(|c| c.checked_mul(2 * l as u128))
        .ok_or_else(overflow)?;
    Ok(SizeBounds {
        leaves: l,
        height: h,
        g,
        binom_lower,
        jl_upper,
    })
}
