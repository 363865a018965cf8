//! Seeded self-checks behind the `check` subcommand. Each check cross-checks
//! two code paths of the library on random inputs.

use crate::block::{lower_bound_max, lower_bound_tail, BlockInstance};
use crate::error::Result;
use crate::program::{beta_from_density, expected_ratio, minimize_expected_ratio, per_budget_ratios, BudgetGrid, DensityParams, SolverConfig};
use crate::rounds::{batched_threshold_greedy, check_observation_condition, RoundConfig};
use crate::setfn::{brute_force_opt, check_monotone_submodular, check_opt_difference_growth, greedy, greedy_lb_recursion, SetFunctionInstance};
use crate::two_budget::{greedy_per_budget, greedy_two_budget_ratio, hardness_ratio, TwoBudgetParams};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn result(name: &'static str, passed: bool, detail: String) -> CheckResult {
    CheckResult { name, passed, detail }
}

pub fn random_grid<R: Rng>(rng: &mut R, max_m: usize) -> BudgetGrid {
    let m = rng.gen_range(1..=max_m);
    let mut rho = Vec::with_capacity(m);
    let mut r = 0.0;
    for _ in 0..m {
        r += rng.gen_range(0.05..1.0);
        rho.push(r);
    }
    let w: Vec<f64> = (0..m).map(|_| rng.gen_range(0.01..1.0)).collect();
    BudgetGrid::with_weights(rho, w).expect("valid by construction")
}

pub fn random_density<R: Rng>(rng: &mut R, m: usize) -> DensityParams {
    DensityParams {
        s: (0..m.saturating_sub(1)).map(|_| rng.gen_range(0.02..1.0)).collect(),
    }
}

fn baseline() -> Result<CheckResult> {
    let grid = BudgetGrid::new(vec![1.0], vec![1.0])?;
    let wc = minimize_expected_ratio(&grid, &SolverConfig::default())?;
    Ok(result("baseline", wc.rounded() == 0.6321, format!("ratio {:.4}", wc.ratio)))
}

fn lower_bound() -> CheckResult {
    let (a, v) = lower_bound_max(50);
    let tail = lower_bound_tail(50);
    let ok = (v - 0.85114).abs() <= 5e-5 && (a - 9.2199).abs() <= 1e-3 && tail < 0.0575 && v + tail < 0.9087;
    result("lower_bound", ok, format!("max {v:.5} at a = {a:.4}, tail {tail:.5}"))
}

fn program_vs_blocks(rng: &mut ChaCha8Rng, cases: usize) -> Result<CheckResult> {
    let mut worst: f64 = 0.0;
    for _ in 0..cases {
        let grid = random_grid(rng, 8);
        let beta = beta_from_density(&grid, &random_density(rng, grid.len()))?;
        let h = per_budget_ratios(&grid, &beta)?;
        let inst = BlockInstance::from_pairs(&beta.iter().copied().zip(grid.widths()).collect::<Vec<_>>())?;
        for (i, &r) in grid.rho().iter().enumerate() {
            worst = worst.max((h[i] - inst.greedy_ratio_at(r)?).abs());
        }
    }
    Ok(result("program_vs_blocks", worst <= 1e-8, format!("max |diff| {worst:.2e} over {cases} cases")))
}

fn two_budget(rng: &mut ChaCha8Rng) -> Result<CheckResult> {
    let mut closed: f64 = 0.0;
    for i in 1..100 {
        let rho = i as f64 / 100.0;
        for j in 0..100 {
            let p = TwoBudgetParams::new(rho, rho + (1.0 - rho) * j as f64 / 100.0)?;
            closed = closed.max((greedy_two_budget_ratio(&p) - hardness_ratio(rho, p.alpha())?).abs());
        }
    }
    let mut cross: f64 = 0.0;
    for _ in 0..20 {
        let rho = rng.gen_range(0.02..0.98);
        let c = rng.gen_range(rho..0.999);
        let p = TwoBudgetParams::new(rho, c)?;
        let grid = BudgetGrid::uniform(vec![rho, 1.0])?;
        let h = per_budget_ratios(&grid, &[c, 1.0 - c])?;
        let (a, b) = greedy_per_budget(&p);
        cross = cross.max((h[0] - a).abs()).max((h[1] - b).abs());
    }
    Ok(result(
        "two_budget",
        closed <= 1e-9 && cross <= 1e-8,
        format!("greedy vs hardness {closed:.2e}, vs program {cross:.2e}"),
    ))
}

fn greedy_bound(rng: &mut ChaCha8Rng, cases: usize) -> Result<CheckResult> {
    let mut worst_margin = f64::INFINITY;
    let mut lazy_ok = true;
    for _ in 0..cases {
        let n = rng.gen_range(2..=10);
        let inst = SetFunctionInstance::random_coverage(rng, n, 12, 0.3, 4);
        let k = rng.gen_range(1..=n);
        let g = greedy(&inst, k, false)?;
        lazy_ok &= greedy(&inst, k, true)? == g;
        let (_, opt) = brute_force_opt(&inst, k)?;
        if opt > 0.0 {
            let bound = 1.0 - (1.0 - 1.0 / k as f64).powi(k as i32);
            worst_margin = worst_margin.min(g.value() / opt - bound);
        }
    }
    let ex = SetFunctionInstance::example_3_4();
    let ex_ok = check_monotone_submodular(&ex)?.ok && check_opt_difference_growth(&ex)?;
    Ok(result(
        "greedy",
        worst_margin >= -1e-12 && lazy_ok && ex_ok,
        format!("min ratio margin {worst_margin:.4}, lazy matches {lazy_ok}, example {ex_ok}"),
    ))
}

fn invariance(rng: &mut ChaCha8Rng, cases: usize) -> Result<CheckResult> {
    let mut split: f64 = 0.0;
    let mut scale: f64 = 0.0;
    for _ in 0..cases {
        let grid = random_grid(rng, 6);
        let beta = beta_from_density(&grid, &random_density(rng, grid.len()))?;
        let inst = BlockInstance::from_pairs(&beta.iter().copied().zip(grid.widths()).collect::<Vec<_>>())?;
        let j = rng.gen_range(0..inst.len());
        let cut = rng.gen_range(0.1..0.9);
        let pieces = inst.split_block(j, &[cut, 1.0 - cut])?;
        for &r in grid.rho() {
            split = split.max((inst.greedy_ratio_at(r)? - pieces.greedy_ratio_at(r)?).abs());
        }
        let base = expected_ratio(&grid, &beta)?;
        let c = rng.gen_range(0.1..10.0);
        let scaled: Vec<f64> = beta.iter().map(|b| b * c).collect();
        scale = scale.max((expected_ratio(&grid, &scaled)? - base).abs());
        scale = scale.max((expected_ratio(&grid.scaled(c)?, &scaled)? - base).abs());
    }
    Ok(result(
        "invariance",
        split <= 1e-9 && scale <= 1e-12,
        format!("split {split:.2e}, scaling {scale:.2e}"),
    ))
}

fn discrete_continuous(rng: &mut ChaCha8Rng, cases: usize) -> Result<CheckResult> {
    let k = 10_000.0;
    let mut worst: f64 = 0.0;
    for _ in 0..cases {
        let grid = random_grid(rng, 4);
        let beta = beta_from_density(&grid, &random_density(rng, grid.len()))?;
        let inst = BlockInstance::from_pairs(&beta.iter().copied().zip(grid.widths()).collect::<Vec<_>>())?;
        let mut acc = 0.0;
        let guarantees: Vec<(f64, f64)> = beta
            .iter()
            .zip(grid.rho())
            .map(|(b, r)| {
                acc += b;
                (r * k, acc)
            })
            .collect();
        let last = *grid.rho().last().expect("non-empty");
        let lb = greedy_lb_recursion(&guarantees, (last * k) as usize)?;
        for &r in grid.rho() {
            let steps = (r * k) as usize;
            let b = steps as f64 / k;
            let disc = lb[steps] / inst.opt_value(b)?;
            worst = worst.max((disc / inst.greedy_ratio_at(b)? - 1.0).abs());
        }
    }
    Ok(result("discrete_continuous", worst <= 1e-3, format!("max relative gap {worst:.2e} at k = {k}")))
}

fn observation(rng: &mut ChaCha8Rng, cases: usize) -> Result<CheckResult> {
    let mut ok = true;
    let mut worst = f64::INFINITY;
    for _ in 0..cases {
        let n = rng.gen_range(8..=12);
        let inst = SetFunctionInstance::random_coverage(rng, n, 16, 0.3, 4);
        let k = rng.gen_range(5..=n);
        let cfg = RoundConfig::exact(&inst, 5, 0.1, vec![k.div_ceil(2), k])?;
        let run = batched_threshold_greedy(&inst, k, &cfg)?;
        ok &= check_observation_condition(&run.trace, cfg.rounds, cfg.eps, &cfg.budgets, &run.optima)?.ok;
        let plain = greedy(&inst, k, false)?.value();
        if plain > 0.0 {
            worst = worst.min(run.value() / plain);
        }
    }
    Ok(result(
        "observation",
        ok && worst >= 0.85,
        format!("condition holds {ok}, min value / greedy {worst:.4}"),
    ))
}

/// Runs every check; `scale` multiplies the number of random cases.
pub fn run_suite(seed: u64, scale: usize) -> Result<Vec<CheckResult>> {
    let scale = scale.max(1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(vec![
        baseline()?,
        lower_bound(),
        program_vs_blocks(&mut rng, 100 * scale)?,
        two_budget(&mut rng)?,
        greedy_bound(&mut rng, 100 * scale)?,
        invariance(&mut rng, 40 * scale)?,
        discrete_continuous(&mut rng, 5 * scale)?,
        observation(&mut rng, 20 * scale)?,
    ])
}
