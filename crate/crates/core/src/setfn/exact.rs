//! Exhaustive routines: the local monotonicity/submodularity check and
//! brute-force optima.

use super::{Form, SetFunctionInstance, VALUE_TOL};
use crate::error::{Error, Result};
use std::fmt;

/// Maximum number of subsets brute force is willing to evaluate.
pub const BRUTE_FORCE_LIMIT: u64 = 10_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ViolationKind {
    /// f(S) > f(T) for S ⊂ T.
    Monotonicity,
    /// f(S ∪ {i}) − f(S) < f(T ∪ {i}) − f(T) for S ⊂ T.
    Submodularity,
}

/// A violating triple `(S, T, i)` with `T = S ∪ {j}` for a single `j`.
#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub kind: ViolationKind,
    pub smaller: Vec<usize>,
    pub larger: Vec<usize>,
    pub element: Option<usize>,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            ViolationKind::Monotonicity => write!(
                f,
                "monotonicity fails: f({:?}) > f({:?})",
                self.smaller, self.larger
            ),
            ViolationKind::Submodularity => write!(
                f,
                "submodularity fails: gain of {} w.r.t. {:?} is below its gain w.r.t. {:?}",
                self.element.unwrap_or_default(),
                self.smaller,
                self.larger
            ),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SubmodularityCheck {
    pub ok: bool,
    pub violation: Option<Violation>,
}

fn members(mask: usize, n: usize) -> Vec<usize> {
    (0..n).filter(|&e| mask >> e & 1 == 1).collect()
}

/// Exhaustively verifies monotonicity and submodularity of a tabulated
/// instance.
///
/// Only pairs `S ⊂ T` with `|T| = |S| + 1` are examined. Chaining the
/// adjacent inequalities along any maximal chain from `S` to `T` yields the
/// general ones, so this is equivalent to the full definition.
pub fn check_monotone_submodular(inst: &SetFunctionInstance) -> Result<SubmodularityCheck> {
    let values = match inst.form() {
        Form::Tabulated { values } => values,
        Form::Coverage { .. } => return Err(Error::NotTabulated),
    };
    let n = inst.ground_size();
    if n > super::MAX_TABULATED {
        return Err(Error::TooLarge(format!("exhaustive check needs n <= 24, got {n}")));
    }
    for s in 0..values.len() {
        for j in (0..n).filter(|&j| s >> j & 1 == 0) {
            let t = s | 1 << j;
            if values[s] > values[t] + VALUE_TOL {
                return Ok(SubmodularityCheck {
                    ok: false,
                    violation: Some(Violation {
                        kind: ViolationKind::Monotonicity,
                        smaller: members(s, n),
                        larger: members(t, n),
                        element: None,
                    }),
                });
            }
            for i in (j + 1..n).filter(|&i| s >> i & 1 == 0) {
                let gain_s = values[s | 1 << i] - values[s];
                let gain_t = values[t | 1 << i] - values[t];
                if gain_s + VALUE_TOL < gain_t {
                    return Ok(SubmodularityCheck {
                        ok: false,
                        violation: Some(Violation {
                            kind: ViolationKind::Submodularity,
                            smaller: members(s, n),
                            larger: members(t, n),
                            element: Some(i),
                        }),
                    });
                }
            }
        }
    }
    Ok(SubmodularityCheck {
        ok: true,
        violation: None,
    })
}

fn binomial(n: u64, k: u64) -> u64 {
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * u128::from(n - i) / u128::from(i + 1);
        if acc > u128::from(u64::MAX) {
            return u64::MAX;
        }
    }
    acc as u64
}

/// Exact maximum of f over all subsets of size at most `k`.
///
/// Subsets are scanned by size and then lexicographically; the first
/// maximizer found is returned.
pub fn brute_force_opt(inst: &SetFunctionInstance, k: usize) -> Result<(Vec<usize>, f64)> {
    let n = inst.ground_size();
    let k = k.min(n);
    let total = (0..=k as u64).fold(0u64, |acc, j| acc.saturating_add(binomial(n as u64, j)));
    if total > BRUTE_FORCE_LIMIT {
        return Err(Error::TooLarge(format!(
            "brute force over {total} subsets exceeds the limit of {BRUTE_FORCE_LIMIT}"
        )));
    }
    let mut best = (Vec::new(), inst.value(&[]));
    for size in 1..=k {
        let mut idx: Vec<usize> = (0..size).collect();
        loop {
            let v = inst.value(&idx);
            if v > best.1 {
                best = (idx.clone(), v);
            }
            // advance to the next combination in lexicographic order
            let Some(pos) = (0..size).rev().find(|&p| idx[p] < n - size + p) else {
                break;
            };
            idx[pos] += 1;
            for q in pos + 1..size {
                idx[q] = idx[q - 1] + 1;
            }
        }
    }
    Ok(best)
}

/// `profile[k]` is the optimum over subsets of size at most `k`, for
/// `k = 0..=n`, from a single sweep over all subsets.
pub fn optimum_profile(inst: &SetFunctionInstance) -> Result<Vec<f64>> {
    let n = inst.ground_size();
    if n >= 64 || (1u64 << n) > BRUTE_FORCE_LIMIT {
        return Err(Error::TooLarge(format!(
            "optimum profile needs 2^n <= {BRUTE_FORCE_LIMIT}, got n = {n}"
        )));
    }
    let mut by_size = vec![f64::NEG_INFINITY; n + 1];
    for mask in 0..1u64 << n {
        let size = mask.count_ones() as usize;
        let v = inst.value_of_mask(mask);
        if v > by_size[size] {
            by_size[size] = v;
        }
    }
    let mut running = f64::NEG_INFINITY;
    Ok(by_size
        .into_iter()
        .map(|v| {
            running = running.max(v);
            running
        })
        .collect())
}

/// True iff some increment of the optimum sequence exceeds the previous one:
/// `f(O_{l+1}) − f(O_l) > f(O_l) − f(O_{l−1})` for some `l`.
pub fn check_opt_difference_growth(inst: &SetFunctionInstance) -> Result<bool> {
    let opt = optimum_profile(inst)?;
    Ok(opt
        .windows(3)
        .any(|w| w[2] - w[1] > w[1] - w[0] + VALUE_TOL))
}
