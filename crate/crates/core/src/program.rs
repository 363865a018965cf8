//! Worst-case expected greedy ratio for a discrete budget distribution.
//!
//! The adversary's instance is in standard form: one block per budget gap,
//! block `j` having width `rho_j − rho_{j−1}` and weight `beta_j`, with
//! densities `beta_j / (rho_j − rho_{j−1})` non-increasing. For budget
//! `rho_i` the best achievable value spreads the budget over the first `l`
//! blocks so that their marginal values agree; `h_i` is the best such
//! ratio over the admissible `l`, and the expected ratio is `Σ p_i h_i`.
//! The worst case is found by minimizing over the density ratios.

use crate::error::{Error, Result};
use crate::numeric::{nelder_mead_box, NelderMeadOptions, ShiftedHalton};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;

/// Largest grid accepted by the minimizer.
pub const MAX_GRID: usize = 64;

/// Discrete budget distribution: budgets `rho_1 < .. < rho_m` (as multiples
/// of a base budget) with probabilities `p_i`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BudgetGrid {
    rho: Vec<f64>,
    p: Vec<f64>,
}

impl BudgetGrid {
    pub fn new(rho: Vec<f64>, p: Vec<f64>) -> Result<Self> {
        if rho.is_empty() {
            return Err(Error::invalid("budget grid needs at least one budget"));
        }
        if rho.len() != p.len() {
            return Err(Error::invalid("one probability per budget required"));
        }
        if !(rho[0] > 0.0) || rho.iter().any(|r| !r.is_finite()) {
            return Err(Error::invalid("budgets must be positive and finite"));
        }
        if let Some(w) = rho.windows(2).find(|w| w[1] <= w[0]) {
            return Err(Error::invalid(format!(
                "budgets must be strictly ascending ({} then {})",
                w[0], w[1]
            )));
        }
        if p.iter().any(|&x| !(x >= 0.0)) {
            return Err(Error::invalid("probabilities must be >= 0"));
        }
        let total: f64 = p.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::invalid(format!("probabilities sum to {total}, not 1")));
        }
        Ok(Self { rho, p })
    }

    /// Equal probability on every budget.
    pub fn uniform(rho: Vec<f64>) -> Result<Self> {
        let m = rho.len().max(1);
        Self::new(rho, vec![1.0 / m as f64; m])
    }

    /// Accepts non-negative weights and normalizes them.
    pub fn with_weights(rho: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        let total: f64 = weights.iter().sum();
        if !(total > 0.0) || weights.iter().any(|&w| !(w >= 0.0)) {
            return Err(Error::invalid("weights must be >= 0 with a positive total"));
        }
        Self::new(rho, weights.into_iter().map(|w| w / total).collect())
    }

    pub fn len(&self) -> usize {
        self.rho.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rho.is_empty()
    }

    pub fn rho(&self) -> &[f64] {
        &self.rho
    }

    pub fn p(&self) -> &[f64] {
        &self.p
    }

    /// Gaps `rho_j − rho_{j−1}` with `rho_0 = 0`.
    pub fn widths(&self) -> Vec<f64> {
        let mut prev = 0.0;
        self.rho
            .iter()
            .map(|&r| {
                let w = r - prev;
                prev = r;
                w
            })
            .collect()
    }

    /// Same probabilities with every budget multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        Self::new(self.rho.iter().map(|r| r * factor).collect(), self.p.clone())
    }

    /// Parses `rho p` lines (`#` comments allowed); weights are normalized.
    pub fn parse(text: &str) -> Result<Self> {
        let mut rho = Vec::new();
        let mut w = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split(|c: char| c == ',' || c.is_whitespace()).filter(|s| !s.is_empty()).collect();
            if fields.len() != 2 {
                return Err(Error::parse(i + 1, "expected `rho p`"));
            }
            let num = |s: &str| {
                s.parse::<f64>()
                    .map_err(|_| Error::parse(i + 1, format!("cannot parse {s:?}")))
            };
            rho.push(num(fields[0])?);
            w.push(num(fields[1])?);
        }
        Self::with_weights(rho, w)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::from("# rho p\n");
        for (r, p) in self.rho.iter().zip(&self.p) {
            let _ = writeln!(out, "{r:?} {p:?}");
        }
        out
    }
}

/// Density ratios `s_i = d_{i+1} / d_i ∈ [0, 1]` between consecutive
/// standard-form blocks, `i = 1..m-1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityParams {
    pub s: Vec<f64>,
}

impl DensityParams {
    pub fn new(s: Vec<f64>) -> Result<Self> {
        if let Some(v) = s.iter().find(|v| !(0.0..=1.0).contains(*v)) {
            return Err(Error::invalid(format!("density ratio {v} outside [0, 1]")));
        }
        Ok(Self { s })
    }
}

/// Standard-form weights for the given density ratios: `d_1 = 1`,
/// `d_{i+1} = d_i s_i`, `beta_i = d_i (rho_i − rho_{i−1})`.
pub fn beta_from_density(grid: &BudgetGrid, params: &DensityParams) -> Result<Vec<f64>> {
    if params.s.len() + 1 != grid.len() {
        return Err(Error::invalid(format!(
            "{} budgets need {} density ratios, got {}",
            grid.len(),
            grid.len() - 1,
            params.s.len()
        )));
    }
    let mut d = 1.0;
    Ok(grid
        .widths()
        .into_iter()
        .enumerate()
        .map(|(i, w)| {
            if i > 0 {
                d *= params.s[i - 1];
            }
            d * w
        })
        .collect())
}

/// Checks that `beta` is a valid standard-form weight vector.
pub fn check_beta(grid: &BudgetGrid, beta: &[f64]) -> Result<()> {
    if beta.len() != grid.len() {
        return Err(Error::invalid(format!(
            "expected {} weights, got {}",
            grid.len(),
            beta.len()
        )));
    }
    if !(beta[0] > 0.0) || beta.iter().any(|b| !(*b >= 0.0) || !b.is_finite()) {
        return Err(Error::invalid("weights must be finite, >= 0, and beta_1 > 0"));
    }
    let widths = grid.widths();
    for j in 1..beta.len() {
        let (a, b) = (beta[j - 1] / widths[j - 1], beta[j] / widths[j]);
        if b > a * (1.0 + 1e-12) {
            return Err(Error::Infeasible(format!(
                "density of block {} ({b}) exceeds that of block {j} ({a})",
                j + 1
            )));
        }
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct InnerAllocation {
    /// Budget given to each of the first `l` blocks.
    pub x: Vec<f64>,
    pub feasible: bool,
}

fn log_density_ratios(grid: &BudgetGrid, beta: &[f64], blocks: usize) -> Result<Vec<f64>> {
    let widths = grid.widths();
    let d1 = beta[0] / widths[0];
    (0..blocks)
        .map(|j| {
            if beta[j] > 0.0 {
                Ok((beta[j] / widths[j] / d1).ln())
            } else {
                Err(Error::invalid(format!(
                    "beta_{} = 0: the allocation over {blocks} blocks is undefined",
                    j + 1
                )))
            }
        })
        .collect()
}

fn check_indices(grid: &BudgetGrid, budget: usize, blocks: usize) -> Result<()> {
    if budget >= grid.len() {
        return Err(Error::invalid(format!("budget index {budget} out of range")));
    }
    if blocks == 0 || blocks > grid.len() {
        return Err(Error::invalid(format!("block count {blocks} outside 1..={}", grid.len())));
    }
    Ok(())
}

/// Equal-marginal split of budget `rho_budget` (0-based index) over the
/// first `blocks` standard-form blocks.
///
/// `x_1/rho_1 = rho_i/rho_l − Σ_{j≤l} ln(d_j/d_1) (rho_j − rho_{j−1}) / rho_l`
/// and `x_j/(rho_j − rho_{j−1}) = x_1/rho_1 + ln(d_j/d_1)`, where `d_j` is
/// the density of block `j`. Feasible iff `x_l >= 0`, which implies every
/// `x_j >= 0` because densities are non-increasing.
pub fn inner_allocation(grid: &BudgetGrid, beta: &[f64], budget: usize, blocks: usize) -> Result<InnerAllocation> {
    check_indices(grid, budget, blocks)?;
    let widths = grid.widths();
    let logs = log_density_ratios(grid, beta, blocks)?;
    let rho = grid.rho();
    let rho_l = rho[blocks - 1];
    let spread: f64 = logs.iter().zip(&widths).map(|(l, w)| l * w).sum();
    let u = rho[budget] / rho_l - spread / rho_l;
    let x: Vec<f64> = logs.iter().zip(&widths).map(|(l, w)| w * (u + l)).collect();
    let feasible = x[blocks - 1] >= 0.0;
    if feasible {
        debug_assert!(x.iter().all(|&v| v >= -1e-9 * rho[budget]), "telescoping: {x:?}");
    }
    Ok(InnerAllocation { x, feasible })
}

/// Ratio achieved by the equal-marginal split over the first `blocks` blocks:
/// `Σ_{j≤l} beta_j (1 − e^{−x_j / (rho_j − rho_{j−1})}) / Σ_{j≤i} beta_j`.
pub fn h_il(grid: &BudgetGrid, beta: &[f64], budget: usize, blocks: usize) -> Result<f64> {
    let alloc = inner_allocation(grid, beta, budget, blocks)?;
    if !alloc.feasible {
        return Err(Error::Infeasible(format!(
            "budget {budget} split over {blocks} blocks gives the last block {}",
            alloc.x[blocks - 1]
        )));
    }
    let widths = grid.widths();
    let value: f64 = alloc
        .x
        .iter()
        .zip(&widths)
        .zip(beta)
        .map(|((x, w), b)| b * -(-x / w).exp_m1())
        .sum();
    let opt: f64 = beta[..=budget].iter().sum();
    Ok(value / opt)
}

/// Same quantity as [`h_il`] after telescoping:
/// `(Σ_{j≤l} beta_j − beta_1 (rho_l/rho_1) e^{−x_1/rho_1}) / Σ_{j≤i} beta_j`.
pub fn h_il_closed_form(grid: &BudgetGrid, beta: &[f64], budget: usize, blocks: usize) -> Result<f64> {
    let alloc = inner_allocation(grid, beta, budget, blocks)?;
    if !alloc.feasible {
        return Err(Error::Infeasible(format!("budget {budget} over {blocks} blocks")));
    }
    let rho = grid.rho();
    let u = alloc.x[0] / rho[0];
    let top: f64 = beta[..blocks].iter().sum::<f64>() - beta[0] * rho[blocks - 1] / rho[0] * (-u).exp();
    Ok(top / beta[..=budget].iter().sum::<f64>())
}

/// Best ratio for budget `rho_budget`: the maximum of [`h_il`] over block
/// counts whose split is feasible. Block counts stop at the first zero weight.
pub fn h_i(grid: &BudgetGrid, beta: &[f64], budget: usize) -> Result<f64> {
    check_beta(grid, beta)?;
    check_indices(grid, budget, 1)?;
    Ok(Evaluator::new(grid).per_budget(beta)[budget])
}

/// `h_i` for every budget.
pub fn per_budget_ratios(grid: &BudgetGrid, beta: &[f64]) -> Result<Vec<f64>> {
    check_beta(grid, beta)?;
    Ok(Evaluator::new(grid).per_budget(beta))
}

/// `Σ_i p_i h_i`.
pub fn expected_ratio(grid: &BudgetGrid, beta: &[f64]) -> Result<f64> {
    check_beta(grid, beta)?;
    Ok(Evaluator::new(grid).expected(beta))
}

/// O(m²) evaluation of every `h_i` using prefix sums over the blocks.
struct Evaluator<'a> {
    grid: &'a BudgetGrid,
    widths: Vec<f64>,
}

impl<'a> Evaluator<'a> {
    fn new(grid: &'a BudgetGrid) -> Self {
        Self {
            grid,
            widths: grid.widths(),
        }
    }

    fn per_budget(&self, beta: &[f64]) -> Vec<f64> {
        let rho = self.grid.rho();
        let m = rho.len();
        let d1 = beta[0] / self.widths[0];
        // candidates l = 1..=usable, stopping at the first zero weight
        let usable = beta.iter().position(|&b| b <= 0.0).unwrap_or(m);
        let mut logs = Vec::with_capacity(usable);
        let mut spread = Vec::with_capacity(usable);
        let mut weight_prefix = Vec::with_capacity(m);
        let mut acc = 0.0;
        for &b in beta {
            acc += b;
            weight_prefix.push(acc);
        }
        let mut s = 0.0;
        for j in 0..usable {
            let l = (beta[j] / self.widths[j] / d1).ln();
            s += l * self.widths[j];
            logs.push(l);
            spread.push(s);
        }
        (0..m)
            .map(|i| {
                let mut best = f64::NEG_INFINITY;
                for l in 0..usable {
                    let u = (rho[i] - spread[l]) / rho[l];
                    if self.widths[l] * (u + logs[l]) < 0.0 {
                        continue;
                    }
                    let value = weight_prefix[l] - d1 * rho[l] * (-u).exp();
                    best = best.max(value / weight_prefix[i]);
                }
                best
            })
            .collect()
    }

    fn expected(&self, beta: &[f64]) -> f64 {
        self.per_budget(beta)
            .iter()
            .zip(self.grid.p())
            .map(|(h, p)| h * p)
            .sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub starts: usize,
    pub max_evals: usize,
    pub seed: u64,
    /// Lower clamp applied to density ratios during the search.
    pub density_floor: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            starts: 64,
            max_evals: 20_000,
            seed: 0,
            density_floor: 1e-9,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StartDiagnostics {
    pub start: usize,
    pub initial_value: f64,
    pub value: f64,
    pub evals: usize,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WorstCase {
    pub ratio: f64,
    pub beta: Vec<f64>,
    pub density_ratios: Vec<f64>,
    pub per_budget: Vec<f64>,
    pub best_start: usize,
    pub starts: Vec<StartDiagnostics>,
}

impl WorstCase {
    /// Ratio rounded to four decimals, the reporting precision.
    pub fn rounded(&self) -> f64 {
        (self.ratio * 1e4).round() / 1e4
    }
}

/// Multi-start search for the standard-form weights minimizing the expected
/// ratio.
///
/// Each start runs a box-bounded Nelder–Mead over the density ratios
/// `s ∈ [0, 1]^{m−1}` (clamped below at `density_floor`) from a point of a
/// seeded Halton sequence. Starts run in parallel; the result depends only
/// on the configuration, ties going to the lowest start index.
pub fn minimize_expected_ratio(grid: &BudgetGrid, config: &SolverConfig) -> Result<WorstCase> {
    if config.starts == 0 {
        return Err(Error::invalid("solver needs at least one start"));
    }
    if config.max_evals == 0 {
        return Err(Error::invalid("solver needs a positive evaluation budget"));
    }
    if !(config.density_floor > 0.0 && config.density_floor < 1.0) {
        return Err(Error::invalid("density floor must lie in (0, 1)"));
    }
    if grid.len() > MAX_GRID {
        return Err(Error::TooLarge(format!(
            "grid of {} budgets exceeds the cap of {MAX_GRID}",
            grid.len()
        )));
    }
    let eval = Evaluator::new(grid);
    let dim = grid.len() - 1;
    let to_params = |x: &[f64]| DensityParams {
        s: x.iter().map(|v| v.clamp(config.density_floor, 1.0)).collect(),
    };
    let objective = |x: &[f64]| -> f64 {
        let beta = beta_from_density(grid, &to_params(x)).expect("dimension matches");
        eval.expected(&beta)
    };
    let halton = ShiftedHalton::new(dim, config.seed);
    let opts = NelderMeadOptions {
        max_evals: config.max_evals,
        ..NelderMeadOptions::default()
    };
    let runs: Vec<(Vec<f64>, StartDiagnostics)> = (0..config.starts)
        .into_par_iter()
        .map(|start| {
            let x0 = halton.point(start);
            let initial_value = objective(&x0);
            let res = nelder_mead_box(objective, &x0, 0.0, 1.0, &opts);
            (
                res.x,
                StartDiagnostics {
                    start,
                    initial_value,
                    value: res.value,
                    evals: res.evals,
                    converged: res.converged,
                },
            )
        })
        .collect();
    let (best_x, best) = runs
        .iter()
        .min_by(|a, b| a.1.value.total_cmp(&b.1.value).then(a.1.start.cmp(&b.1.start)))
        .expect("at least one start");
    let params = to_params(best_x);
    let beta = beta_from_density(grid, &params)?;
    Ok(WorstCase {
        ratio: best.value,
        per_budget: eval.per_budget(&beta),
        beta,
        density_ratios: params.s,
        best_start: best.start,
        starts: runs.into_iter().map(|(_, d)| d).collect(),
    })
}
