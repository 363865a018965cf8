use super::{SetFunctionInstance, SolutionState, VALUE_TOL};
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::cmp::Ordering;
use std::collections::BinaryHeap;

/// Per-iteration record of a greedy (or batched greedy) run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GreedyTrace {
    pub budget: usize,
    pub chosen: Vec<usize>,
    pub marginal_gains: Vec<f64>,
    /// `cumulative[t]` is the sum of the first `t + 1` gains.
    pub cumulative: Vec<f64>,
}

impl GreedyTrace {
    pub(crate) fn new(budget: usize) -> Self {
        Self {
            budget,
            chosen: Vec::with_capacity(budget),
            marginal_gains: Vec::with_capacity(budget),
            cumulative: Vec::with_capacity(budget),
        }
    }

    pub(crate) fn push(&mut self, element: usize, gain: f64) {
        let total = self.value() + gain;
        self.chosen.push(element);
        self.marginal_gains.push(gain);
        self.cumulative.push(total);
    }

    /// Value after all recorded steps.
    pub fn value(&self) -> f64 {
        self.cumulative.last().copied().unwrap_or(0.0)
    }

    /// Value after the first `steps` elements (`steps` is clamped to the length).
    pub fn value_after(&self, steps: usize) -> f64 {
        match steps.min(self.cumulative.len()) {
            0 => 0.0,
            s => self.cumulative[s - 1],
        }
    }

    pub fn len(&self) -> usize {
        self.chosen.len()
    }

    pub fn is_empty(&self) -> bool {
        self.chosen.is_empty()
    }
}

#[derive(Debug)]
struct Bound {
    gain: f64,
    element: usize,
    stamp: usize,
}

impl PartialEq for Bound {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Bound {}

impl PartialOrd for Bound {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Bound {
    // max-heap on gain, then lowest element index
    fn cmp(&self, other: &Self) -> Ordering {
        self.gain
            .total_cmp(&other.gain)
            .then_with(|| other.element.cmp(&self.element))
    }
}

fn checked_gain(state: &SolutionState<'_>, e: usize) -> Result<f64> {
    let g = state.gain(e);
    if g < -VALUE_TOL {
        return Err(Error::NegativeMarginal { element: e, gain: g });
    }
    Ok(g)
}

/// Greedy maximization under the cardinality constraint `k`.
///
/// Each step adds the element of largest marginal gain, ties going to the
/// lowest index. With `lazy` set, stale gains from earlier steps serve as
/// upper bounds and are only refreshed when they reach the top of the queue;
/// the resulting trace is identical to the plain scan.
pub fn greedy(inst: &SetFunctionInstance, k: usize, lazy: bool) -> Result<GreedyTrace> {
    let n = inst.ground_size();
    if k > n {
        return Err(Error::invalid(format!("budget {k} exceeds ground set size {n}")));
    }
    if lazy {
        lazy_greedy(inst, k)
    } else {
        plain_greedy(inst, k)
    }
}

fn plain_greedy(inst: &SetFunctionInstance, k: usize) -> Result<GreedyTrace> {
    let mut state = inst.empty_state();
    let mut trace = GreedyTrace::new(k);
    for _ in 0..k {
        let mut best: Option<(usize, f64)> = None;
        for e in (0..inst.ground_size()).filter(|&e| !state.contains(e)) {
            let g = checked_gain(&state, e)?;
            if best.map_or(true, |(_, bg)| g > bg) {
                best = Some((e, g));
            }
        }
        let (e, g) = best.expect("k <= n leaves a candidate");
        state.insert(e);
        trace.push(e, g);
    }
    Ok(trace)
}

fn lazy_greedy(inst: &SetFunctionInstance, k: usize) -> Result<GreedyTrace> {
    let mut state = inst.empty_state();
    let mut trace = GreedyTrace::new(k);
    if k == 0 {
        return Ok(trace);
    }
    let mut heap = BinaryHeap::with_capacity(inst.ground_size());
    for e in 0..inst.ground_size() {
        heap.push(Bound {
            gain: checked_gain(&state, e)?,
            element: e,
            stamp: 0,
        });
    }
    while trace.len() < k {
        let top = heap.pop().expect("k <= n leaves a candidate");
        let step = trace.len();
        if top.stamp == step {
            state.insert(top.element);
            trace.push(top.element, top.gain);
        } else {
            heap.push(Bound {
                gain: checked_gain(&state, top.element)?,
                element: top.element,
                stamp: step,
            });
        }
    }
    Ok(trace)
}

/// Lower bound on the value of the greedy iterates implied by a set of
/// optimum guarantees `(k_l, f(O_{k_l}))`.
///
/// `out[0] = 0` and `out[q] = out[q-1] + max_l (f(O_{k_l}) − out[q-1]) / k_l`
/// for `q = 1..=steps`.
pub fn greedy_lb_recursion(guarantees: &[(f64, f64)], steps: usize) -> Result<Vec<f64>> {
    if guarantees.is_empty() {
        return Err(Error::invalid("greedy lower-bound recursion needs at least one guarantee"));
    }
    for (i, &(k, v)) in guarantees.iter().enumerate() {
        if !(k > 0.0 && k.is_finite()) || !(v > 0.0 && v.is_finite()) {
            return Err(Error::invalid(format!("guarantee {i} = ({k}, {v}) must be positive")));
        }
        if i > 0 {
            let (pk, pv) = guarantees[i - 1];
            if k <= pk || v < pv {
                return Err(Error::invalid(
                    "guarantee budgets must ascend with non-decreasing optima",
                ));
            }
        }
    }
    let mut out = Vec::with_capacity(steps + 1);
    let mut cur = 0.0;
    out.push(cur);
    for _ in 0..steps {
        let step = guarantees
            .iter()
            .map(|&(k, v)| (v - cur) / k)
            .fold(f64::NEG_INFINITY, f64::max);
        cur += step;
        out.push(cur);
    }
    Ok(out)
}
