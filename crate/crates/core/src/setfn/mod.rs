//! Explicit monotone submodular set functions.
//!
//! Two representations are supported: a dense table indexed by subset bitmask
//! (small ground sets only) and weighted coverage, which is monotone and
//! submodular by construction. On top of them sit the discrete greedy
//! algorithm, exhaustive optimum search and the exhaustive
//! monotonicity/submodularity check.

mod exact;
mod greedy;
mod parse;

pub use exact::{
    brute_force_opt, check_monotone_submodular, check_opt_difference_growth, optimum_profile,
    SubmodularityCheck, Violation, ViolationKind, BRUTE_FORCE_LIMIT,
};
pub use greedy::{greedy, greedy_lb_recursion, GreedyTrace};
pub use parse::{format_instance, parse_instance};

use crate::error::{Error, Result};
use rand::Rng;

/// Largest ground set accepted by the tabulated representation.
pub const MAX_TABULATED: usize = 24;

/// Absolute tolerance for floating comparisons on set-function values.
pub const VALUE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub enum Form {
    /// `values[mask]` is f of the subset whose members are the set bits of `mask`.
    Tabulated { values: Vec<f64> },
    /// Element `e` covers the universe items `sets[e]`; f(S) is the total
    /// weight of covered items.
    Coverage {
        labels: Vec<String>,
        sets: Vec<Vec<usize>>,
        weights: Vec<f64>,
    },
}

/// An explicit set function over the ground set `{0, .., n-1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct SetFunctionInstance {
    ground_size: usize,
    form: Form,
    verified: bool,
}

impl SetFunctionInstance {
    /// Builds a tabulated instance from `2^n` values in bitmask order.
    ///
    /// Values are shifted so that f(∅) = 0. The instance is not `verified`
    /// until it passes [`check_monotone_submodular`] via [`Self::verify`].
    pub fn tabulated(n: usize, mut values: Vec<f64>) -> Result<Self> {
        if n > MAX_TABULATED {
            return Err(Error::TooLarge(format!(
                "tabulated instances are capped at n = {MAX_TABULATED}, got {n}"
            )));
        }
        if values.len() != 1usize << n {
            return Err(Error::invalid(format!(
                "tabulated instance with n = {n} needs {} values, got {}",
                1usize << n,
                values.len()
            )));
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::invalid(format!("non-finite value {v}")));
        }
        let empty = values[0];
        for v in values.iter_mut() {
            *v -= empty;
        }
        if let Some((mask, v)) = values.iter().enumerate().find(|(_, v)| **v < -VALUE_TOL) {
            return Err(Error::invalid(format!(
                "negative value {v} at subset mask {mask:#b} after normalization"
            )));
        }
        Ok(Self {
            ground_size: n,
            form: Form::Tabulated { values },
            verified: false,
        })
    }

    /// Builds a weighted coverage instance. Element `e` covers `sets[e]`,
    /// a list of indices into `weights`.
    pub fn coverage(sets: Vec<Vec<usize>>, weights: Vec<f64>) -> Result<Self> {
        let labels = (0..sets.len()).map(|i| format!("S{}", i + 1)).collect();
        Self::coverage_with_labels(labels, sets, weights)
    }

    pub fn coverage_with_labels(
        labels: Vec<String>,
        mut sets: Vec<Vec<usize>>,
        weights: Vec<f64>,
    ) -> Result<Self> {
        if labels.len() != sets.len() {
            return Err(Error::invalid("one label per set required"));
        }
        if let Some(w) = weights.iter().find(|w| !w.is_finite() || **w < 0.0) {
            return Err(Error::invalid(format!("coverage weight {w} must be finite and >= 0")));
        }
        for (i, set) in sets.iter_mut().enumerate() {
            if let Some(item) = set.iter().find(|&&it| it >= weights.len()) {
                return Err(Error::invalid(format!(
                    "set {} covers item {item} outside universe of size {}",
                    labels[i],
                    weights.len()
                )));
            }
            set.sort_unstable();
            set.dedup();
        }
        Ok(Self {
            ground_size: sets.len(),
            form: Form::Coverage {
                labels,
                sets,
                weights,
            },
            verified: true,
        })
    }

    /// Random weighted coverage instance: each element covers each universe
    /// item independently with probability `density`, weights are integers
    /// in `1..=max_weight`.
    pub fn random_coverage<R: Rng + ?Sized>(
        rng: &mut R,
        n_sets: usize,
        universe: usize,
        density: f64,
        max_weight: u32,
    ) -> Self {
        let sets = (0..n_sets)
            .map(|_| (0..universe).filter(|_| rng.gen_bool(density)).collect())
            .collect();
        let weights = (0..universe)
            .map(|_| f64::from(rng.gen_range(1..=max_weight.max(1))))
            .collect();
        Self::coverage(sets, weights).expect("generated coverage instance is valid")
    }

    /// The four-element instance whose optimum increments grow from budget
    /// 2 to budget 3. Element `i` here is element `i + 1` in the usual
    /// one-based listing.
    pub fn example_3_4() -> Self {
        let mut values = vec![0.0; 16];
        for (mask, v) in values.iter_mut().enumerate() {
            let has_first = mask & 1 != 0;
            let others = (mask >> 1).count_ones();
            *v = match (has_first, others) {
                (false, 0) => 0.0,
                (true, 0) => 1.0,
                (false, 1) => 0.5,
                (true, 1) => 7.0 / 6.0,
                (false, 2) => 1.0,
                (true, 2) => 4.0 / 3.0,
                (false, 3) => 1.5,
                (true, 3) => 1.5,
                _ => unreachable!(),
            };
        }
        let mut inst = Self::tabulated(4, values).expect("static instance");
        inst.verified = true;
        inst
    }

    /// Looks up a named built-in instance.
    pub fn builtin(name: &str) -> Option<Self> {
        match name {
            "example-3.4" => Some(Self::example_3_4()),
            _ => None,
        }
    }

    /// Runs the exhaustive check and marks the instance as verified on success.
    pub fn verify(mut self) -> Result<Self> {
        if self.verified {
            return Ok(self);
        }
        let check = check_monotone_submodular(&self)?;
        match check.violation {
            None => {
                self.verified = true;
                Ok(self)
            }
            Some(v) => Err(Error::invalid(format!("instance is not monotone submodular: {v}"))),
        }
    }

    pub fn ground_size(&self) -> usize {
        self.ground_size
    }

    pub fn form(&self) -> &Form {
        &self.form
    }

    pub fn is_verified(&self) -> bool {
        self.verified
    }

    pub fn is_tabulated(&self) -> bool {
        matches!(self.form, Form::Tabulated { .. })
    }

    /// Human-readable name of element `e`.
    pub fn label(&self, e: usize) -> String {
        match &self.form {
            Form::Coverage { labels, .. } => labels[e].clone(),
            Form::Tabulated { .. } => e.to_string(),
        }
    }

    /// f of the given subset (duplicates ignored).
    pub fn value(&self, elems: &[usize]) -> f64 {
        let mut state = self.empty_state();
        for &e in elems {
            if !state.contains(e) {
                state.insert(e);
            }
        }
        state.value()
    }

    /// f of the subset encoded by `mask` (requires n <= 64).
    pub fn value_of_mask(&self, mask: u64) -> f64 {
        match &self.form {
            Form::Tabulated { values } => values[mask as usize],
            Form::Coverage { .. } => {
                let elems: Vec<usize> = (0..self.ground_size).filter(|&e| mask >> e & 1 == 1).collect();
                self.value(&elems)
            }
        }
    }

    pub(crate) fn empty_state(&self) -> SolutionState<'_> {
        let covered = match &self.form {
            Form::Coverage { weights, .. } => vec![false; weights.len()],
            Form::Tabulated { .. } => Vec::new(),
        };
        SolutionState {
            inst: self,
            members: vec![false; self.ground_size],
            mask: 0,
            covered,
            value: 0.0,
        }
    }
}

/// Incremental evaluation state for a growing solution.
#[derive(Debug, Clone)]
pub(crate) struct SolutionState<'a> {
    inst: &'a SetFunctionInstance,
    members: Vec<bool>,
    mask: usize,
    covered: Vec<bool>,
    value: f64,
}

impl SolutionState<'_> {
    pub(crate) fn contains(&self, e: usize) -> bool {
        self.members[e]
    }

    pub(crate) fn value(&self) -> f64 {
        self.value
    }

    /// Marginal gain f(S ∪ {e}) − f(S) of a non-member `e`.
    pub(crate) fn gain(&self, e: usize) -> f64 {
        debug_assert!(!self.members[e]);
        match &self.inst.form {
            Form::Tabulated { values } => values[self.mask | 1 << e] - values[self.mask],
            Form::Coverage { sets, weights, .. } => sets[e]
                .iter()
                .filter(|&&it| !self.covered[it])
                .map(|&it| weights[it])
                .sum(),
        }
    }

    /// Adds `e` and returns its marginal gain.
    pub(crate) fn insert(&mut self, e: usize) -> f64 {
        let gain = self.gain(e);
        self.members[e] = true;
        match &self.inst.form {
            Form::Tabulated { values } => {
                self.mask |= 1 << e;
                self.value = values[self.mask];
            }
            Form::Coverage { sets, .. } => {
                for &it in &sets[e] {
                    self.covered[it] = true;
                }
                self.value += gain;
            }
        }
        gain
    }
}
