//! Analytic model of weighted hard instances.
//!
//! A block `(alpha, delta)` stands for a normalized hard sub-instance scaled
//! by `alpha` whose optimum grows linearly to `alpha` over `delta` units of
//! budget, while the best value any efficient algorithm (and greedy) gets
//! from `b` units is `alpha * (1 - exp(-b / delta))`. Budgets are continuous
//! reals here.

use crate::error::{Error, Result};
use std::fmt::Write as _;

/// Iteration cap for the water-filling level search.
pub const WATER_FILL_MAX_ITER: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Block {
    pub alpha: f64,
    pub delta: f64,
}

impl Block {
    pub fn density(&self) -> f64 {
        self.alpha / self.delta
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BlockInstance {
    blocks: Vec<Block>,
}

/// Water-filling solution of `max Σ alpha_j (1 - exp(-b_j / delta_j))`
/// subject to `Σ b_j = b`, `b_j >= 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct Allocation {
    pub value: f64,
    pub budgets: Vec<f64>,
    /// Common marginal value of every block that receives budget.
    pub level: f64,
    pub iterations: usize,
}

impl BlockInstance {
    pub fn new(blocks: Vec<Block>) -> Result<Self> {
        if blocks.is_empty() {
            return Err(Error::invalid("a block instance needs at least one block"));
        }
        for (j, b) in blocks.iter().enumerate() {
            if !(b.alpha > 0.0 && b.alpha.is_finite() && b.delta > 0.0 && b.delta.is_finite()) {
                return Err(Error::invalid(format!(
                    "block {j} = ({}, {}) needs positive finite weight and width",
                    b.alpha, b.delta
                )));
            }
        }
        Ok(Self { blocks })
    }

    pub fn from_pairs(pairs: &[(f64, f64)]) -> Result<Self> {
        Self::new(
            pairs
                .iter()
                .map(|&(alpha, delta)| Block { alpha, delta })
                .collect(),
        )
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    pub fn total_weight(&self) -> f64 {
        self.blocks.iter().map(|b| b.alpha).sum()
    }

    pub fn total_width(&self) -> f64 {
        self.blocks.iter().map(|b| b.delta).sum()
    }

    /// True iff densities `alpha_j / delta_j` are non-increasing in `j`, up
    /// to a relative `1e-12` for rounding.
    pub fn is_density_sorted(&self) -> bool {
        self.blocks
            .windows(2)
            .all(|w| w[1].density() <= w[0].density() * (1.0 + 1e-12))
    }

    /// Replaces block `j` by sub-blocks `(l * alpha, l * delta)` for each
    /// `l` in `fractions` (which must sum to one).
    pub fn split_block(&self, j: usize, fractions: &[f64]) -> Result<Self> {
        let total: f64 = fractions.iter().sum();
        if (total - 1.0).abs() > 1e-12 || fractions.iter().any(|&l| l <= 0.0) {
            return Err(Error::invalid("split fractions must be positive and sum to one"));
        }
        let b = *self
            .blocks
            .get(j)
            .ok_or_else(|| Error::invalid(format!("no block {j}")))?;
        let mut blocks = self.blocks[..j].to_vec();
        blocks.extend(fractions.iter().map(|&l| Block {
            alpha: l * b.alpha,
            delta: l * b.delta,
        }));
        blocks.extend_from_slice(&self.blocks[j + 1..]);
        Self::new(blocks)
    }

    /// Optimum with budget `b`: blocks are filled in order of decreasing
    /// density (ties by index), block `j` contributing
    /// `min(remaining / delta_j, 1) * alpha_j`.
    pub fn opt_value(&self, b: f64) -> Result<f64> {
        check_budget(b)?;
        let mut order: Vec<usize> = (0..self.blocks.len()).collect();
        order.sort_by(|&x, &y| {
            self.blocks[y]
                .density()
                .total_cmp(&self.blocks[x].density())
                .then(x.cmp(&y))
        });
        let mut remaining = b;
        let mut value = 0.0;
        for j in order {
            if remaining <= 0.0 {
                break;
            }
            let blk = self.blocks[j];
            let used = remaining.min(blk.delta);
            value += blk.alpha * used / blk.delta;
            remaining -= used;
        }
        Ok(value)
    }

    /// Best achievable value with budget `b`, by bisection on the
    /// water level.
    ///
    /// At level `λ` block `j` receives `max(0, delta_j ln(density_j / λ))`.
    /// The total is decreasing in `λ`, so bisecting `ln λ` between a level
    /// where every block is active and the largest density converges
    /// unconditionally.
    pub fn best_value(&self, b: f64) -> Result<Allocation> {
        check_budget(b)?;
        let m = self.blocks.len();
        if b == 0.0 {
            return Ok(Allocation {
                value: 0.0,
                budgets: vec![0.0; m],
                level: self.max_density(),
                iterations: 0,
            });
        }
        let log_density: Vec<f64> = self.blocks.iter().map(|blk| blk.density().ln()).collect();
        let spend = |t: f64| -> f64 {
            self.blocks
                .iter()
                .zip(&log_density)
                .map(|(blk, &ld)| (blk.delta * (ld - t)).max(0.0))
                .sum()
        };
        let min_ld = log_density.iter().copied().fold(f64::INFINITY, f64::min);
        let max_ld = log_density.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        // below min density every block is active and spend(t) >= width * (min_ld - t)
        let mut lo = min_ld - b / self.total_width();
        let mut hi = max_ld;
        let tol = 1e-10 * b;
        let mut iterations = 0;
        let mut t = 0.5 * (lo + hi);
        let mut converged = false;
        while iterations < WATER_FILL_MAX_ITER {
            iterations += 1;
            t = 0.5 * (lo + hi);
            let s = spend(t);
            if (s - b).abs() <= tol {
                converged = true;
                break;
            }
            if s > b {
                lo = t;
            } else {
                hi = t;
            }
            if hi - lo <= f64::EPSILON * t.abs().max(1.0) {
                converged = (spend(lo) - b).abs() <= tol || (spend(hi) - b).abs() <= tol;
                t = if (spend(lo) - b).abs() < (spend(hi) - b).abs() { lo } else { hi };
                break;
            }
        }
        if !converged {
            return Err(Error::NoConvergence(format!(
                "water-filling level search for budget {b} did not reach tolerance {tol:e}"
            )));
        }
        // with the active set fixed the level has a closed form
        let (mut width, mut weighted) = (0.0, 0.0);
        for (blk, &ld) in self.blocks.iter().zip(&log_density) {
            if ld > t {
                width += blk.delta;
                weighted += blk.delta * ld;
            }
        }
        if width > 0.0 {
            let exact = (weighted - b) / width;
            let same_active = log_density.iter().all(|&ld| (ld > t) == (ld > exact));
            if same_active {
                t = exact;
            }
        }
        let budgets: Vec<f64> = self
            .blocks
            .iter()
            .zip(&log_density)
            .map(|(blk, &ld)| (blk.delta * (ld - t)).max(0.0))
            .collect();
        let value = self
            .blocks
            .iter()
            .zip(&budgets)
            .map(|(blk, &bj)| blk.alpha * -(-bj / blk.delta).exp_m1())
            .sum();
        Ok(Allocation {
            value,
            budgets,
            level: t.exp(),
            iterations,
        })
    }

    /// Tight greedy ratio `best_value(b) / opt_value(b)` on the modeled
    /// instance; 1 at `b = 0` (the limit from the right).
    pub fn greedy_ratio_at(&self, b: f64) -> Result<f64> {
        if !self.is_density_sorted() {
            return Err(Error::invalid(
                "greedy ratio needs density-sorted blocks (alpha/delta non-increasing)",
            ));
        }
        check_budget(b)?;
        if b == 0.0 {
            return Ok(1.0);
        }
        Ok(self.best_value(b)?.value / self.opt_value(b)?)
    }

    fn max_density(&self) -> f64 {
        self.blocks
            .iter()
            .map(Block::density)
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Parses one `alpha delta` pair per line; `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self> {
        let mut pairs = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let nums: Vec<&str> = line.split_whitespace().collect();
            if nums.len() != 2 {
                return Err(Error::parse(i + 1, "expected `alpha delta`"));
            }
            let parse = |s: &str| {
                s.parse::<f64>()
                    .map_err(|_| Error::parse(i + 1, format!("cannot parse {s:?}")))
            };
            pairs.push((parse(nums[0])?, parse(nums[1])?));
        }
        Self::from_pairs(&pairs)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::from("# alpha delta\n");
        for b in &self.blocks {
            let _ = writeln!(out, "{:?} {:?}", b.alpha, b.delta);
        }
        out
    }
}

fn check_budget(b: f64) -> Result<()> {
    if !(b >= 0.0) || !b.is_finite() {
        return Err(Error::invalid(format!("budget must be finite and >= 0, got {b}")));
    }
    Ok(())
}

/// Transition parameters of a greedy run: ascending budgets
/// `k_{l_1} < .. < k_{l_t}` and `r_1, .., r_{t-1}`, where `r_j` times the
/// optimum at `k_{l_j}` is the value at which the dominating greedy
/// guarantee moves from horizon `j` to horizon `j + 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct RParams {
    pub budgets: Vec<f64>,
    pub r: Vec<f64>,
}

impl RParams {
    pub fn new(budgets: Vec<f64>, r: Vec<f64>) -> Result<Self> {
        let p = Self { budgets, r };
        p.validate()?;
        Ok(p)
    }

    /// Checks ascent, `r_j ∈ [0, 1]` and the feasibility chain
    /// `r_{j-1} <= r_j (1 + ((k_j - k_{j-1}) / k_{j-1}) (1 - r_{j-1}))`.
    pub fn validate(&self) -> Result<()> {
        let k = &self.budgets;
        if k.is_empty() {
            return Err(Error::invalid("at least one budget required"));
        }
        if k[0] <= 0.0 || k.windows(2).any(|w| w[1] <= w[0]) || k.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("budgets must be positive and strictly ascending"));
        }
        if self.r.len() + 1 != k.len() {
            return Err(Error::invalid(format!(
                "{} budgets need {} transition parameters, got {}",
                k.len(),
                k.len() - 1,
                self.r.len()
            )));
        }
        if let Some(r) = self.r.iter().find(|r| !(0.0..=1.0).contains(*r)) {
            return Err(Error::Infeasible(format!("r = {r} outside [0, 1]")));
        }
        for j in 1..self.r.len() {
            let growth = (k[j] - k[j - 1]) / k[j - 1];
            let rhs = self.r[j] * (1.0 + growth * (1.0 - self.r[j - 1]));
            if self.r[j - 1] > rhs + 1e-12 {
                return Err(Error::Infeasible(format!(
                    "r_{} = {} exceeds r_{} (1 + {growth} (1 - r_{})) = {rhs}",
                    j,
                    self.r[j - 1],
                    j + 1,
                    j
                )));
            }
        }
        Ok(())
    }

    /// Optimum values at the budgets implied by `r`, with the first fixed at 1:
    /// `f(O_{k_j}) = Π_{j' < j} (k_{j'+1}/k_{j'} − (k_{j'+1}/k_{j'} − 1) r_{j'})`.
    pub fn implied_optima(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.budgets.len());
        let mut cur = 1.0;
        out.push(cur);
        for (j, &r) in self.r.iter().enumerate() {
            let ratio = self.budgets[j + 1] / self.budgets[j];
            cur *= ratio - (ratio - 1.0) * r;
            out.push(cur);
        }
        out
    }
}

/// Recovers `r_j = (1 − (k_j / k_{j+1}) (v_{j+1} / v_j)) / (1 − k_j / k_{j+1})`
/// from optima `v_j` at budgets `k_j`.
pub fn r_from_optima(budgets: &[f64], optima: &[f64]) -> Vec<f64> {
    budgets
        .windows(2)
        .zip(optima.windows(2))
        .map(|(k, v)| {
            let ratio = k[0] / k[1];
            (1.0 - ratio * (v[1] / v[0])) / (1.0 - ratio)
        })
        .collect()
}

/// Hard instance realizing the given transition parameters: widths are the
/// budget gaps, `alpha_1 = 1` and
/// `alpha_j = (delta_j / Σ_{s<j} delta_s) (Σ_{s<j} alpha_s) (1 − r_{j−1})`.
pub fn instance_from_r(params: &RParams) -> Result<BlockInstance> {
    params.validate()?;
    let k = &params.budgets;
    let mut blocks = Vec::with_capacity(k.len());
    let mut width_sum = 0.0;
    let mut weight_sum = 0.0;
    for j in 0..k.len() {
        let delta = if j == 0 { k[0] } else { k[j] - k[j - 1] };
        let alpha = if j == 0 {
            1.0
        } else {
            (delta / width_sum) * weight_sum * (1.0 - params.r[j - 1])
        };
        if alpha <= 0.0 {
            return Err(Error::Infeasible(format!(
                "r_{} = 1 leaves block {} with zero weight",
                j,
                j + 1
            )));
        }
        blocks.push(Block { alpha, delta });
        width_sum += delta;
        weight_sum += alpha;
    }
    BlockInstance::new(blocks)
}

/// Geometric family with weights `(q/e)^{i-1}` and widths `q^{i-1} K_1`,
/// `i = 1..=count`. Consecutive densities shrink by a factor `e`.
pub fn lower_bound_family(q: u32, count: u32, first_width: f64) -> Result<BlockInstance> {
    if q < 2 || f64::from(q) <= std::f64::consts::E {
        return Err(Error::invalid(format!("q = {q} must satisfy q / e > 1")));
    }
    if count == 0 {
        return Err(Error::invalid("the family needs at least one block"));
    }
    if !(first_width > 0.0 && first_width.is_finite()) {
        return Err(Error::invalid("first width must be positive"));
    }
    let qf = f64::from(q);
    // widths up to 50^39 are representable with room to spare for the sums
    if f64::from(count - 1) * qf.ln() > 39.0 * 50f64.ln() {
        return Err(Error::TooLarge(format!(
            "q^(N-1) = {q}^{} exceeds the supported range (50^39)",
            count - 1
        )));
    }
    let weight_step = qf / std::f64::consts::E;
    let blocks = (0..count)
        .map(|i| Block {
            alpha: weight_step.powi(i as i32),
            delta: qf.powi(i as i32) * first_width,
        })
        .collect();
    BlockInstance::new(blocks)
}

/// Value of lower-order blocks relative to the next block:
/// `1 / (q/e − 1)`, an upper bound on `Σ_{j<i} (q/e)^{j-1} / (q/e)^{i-1}`.
pub fn lower_bound_tail(q: u32) -> f64 {
    1.0 / (f64::from(q) / std::f64::consts::E - 1.0)
}

/// Greedy ratio on two adjacent family blocks when the budget is `a` times
/// the width of the first:
/// `[(1 − e^{−(a+q)/(q+1)}) e/q + (1 − e^{−(a−1)/(q+1)})] / (e/q + (a−1)/q)`.
pub fn lower_bound_pair_ratio(q: u32, a: f64) -> f64 {
    let qf = f64::from(q);
    let e_over_q = std::f64::consts::E / qf;
    let first = -(-(a + qf) / (qf + 1.0)).exp_m1() * e_over_q;
    let second = -(-(a - 1.0) / (qf + 1.0)).exp_m1();
    (first + second) / (e_over_q + (a - 1.0) / qf)
}

/// Evaluates [`lower_bound_pair_ratio`] on a grid of `a >= 1`.
pub fn lower_bound_ratio_curve(q: u32, a_grid: &[f64]) -> Result<Vec<(f64, f64)>> {
    if let Some(a) = a_grid.iter().find(|&&a| !(a >= 1.0)) {
        return Err(Error::invalid(format!("a = {a} must be >= 1")));
    }
    Ok(a_grid
        .iter()
        .map(|&a| (a, lower_bound_pair_ratio(q, a)))
        .collect())
}

/// Maximum of the pair ratio over `a ∈ [1, q + 1]`: a scan of 4000 points
/// followed by golden-section refinement. Returns `(argmax, max)`.
pub fn lower_bound_max(q: u32) -> (f64, f64) {
    let hi = f64::from(q) + 1.0;
    crate::numeric::maximize_scalar(|a| lower_bound_pair_ratio(q, a), 1.0, hi, 4000, 1e-10)
}
