//! Closed forms for two budgets `k_1 = rho k_2` drawn with equal
//! probability.
//!
//! Hard instances weight two disjoint hard functions as `alpha f_1 + f_2`;
//! from greedy's side the same family is described by
//! `c = f(O_{k_1}) / f(O_{k_2}) = alpha / (1 + alpha)`. Both descriptions
//! go through `A = alpha (1 − rho) / rho = (1 − rho) / (rho (1/c − 1))`.

use crate::error::{Error, Result};
use crate::numeric::golden_section_min;
use serde::{Deserialize, Serialize};
use std::f64::consts::E;
use std::fmt::Write as _;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Case {
    I,
    II,
    III,
}

/// `rho ∈ (0, 1)` and `c ∈ [rho, 1]`; `c = 1` is the `alpha = ∞` limit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TwoBudgetParams {
    pub rho: f64,
    pub c: f64,
}

impl TwoBudgetParams {
    pub fn new(rho: f64, c: f64) -> Result<Self> {
        if !(rho > 0.0 && rho < 1.0) {
            return Err(Error::invalid(format!("rho = {rho} must lie in (0, 1)")));
        }
        if !(c >= rho && c <= 1.0) {
            return Err(Error::invalid(format!("c = {c} must lie in [rho, 1] = [{rho}, 1]")));
        }
        Ok(Self { rho, c })
    }

    /// Requires `alpha (1 − rho) / rho >= 1` (up to rounding); `alpha = ∞` gives `c = 1`.
    pub fn from_alpha(rho: f64, alpha: f64) -> Result<Self> {
        if !(rho > 0.0 && rho < 1.0) {
            return Err(Error::invalid(format!("rho = {rho} must lie in (0, 1)")));
        }
        if !(alpha * (1.0 - rho) / rho >= 1.0 - 1e-12) {
            return Err(Error::invalid(format!(
                "alpha = {alpha} violates alpha (1 − rho) / rho >= 1"
            )));
        }
        let c = if alpha.is_infinite() { 1.0 } else { alpha / (1.0 + alpha) };
        Self::new(rho, c.max(rho))
    }

    pub fn alpha(&self) -> f64 {
        if self.c >= 1.0 {
            f64::INFINITY
        } else {
            self.c / (1.0 - self.c)
        }
    }

    /// `A = alpha (1 − rho) / rho`, infinite at `c = 1`.
    pub fn a(&self) -> f64 {
        if self.c >= 1.0 {
            f64::INFINITY
        } else {
            (1.0 - self.rho) / (self.rho * (1.0 / self.c - 1.0))
        }
    }

    /// `(1 − rho/c) / (1 − rho)`: the fraction of `f(O_{k_1})` below which
    /// the `k_1` guarantee dominates greedy's step.
    pub fn crossover(&self) -> f64 {
        (1.0 - self.rho / self.c) / (1.0 - self.rho)
    }
}

/// Hardness case selected by `A` against `e` and `e^{1/rho}`.
pub fn hardness_case(rho: f64, alpha: f64) -> Case {
    let a = alpha * (1.0 - rho) / rho;
    if a <= E {
        Case::I
    } else if a.ln() <= 1.0 / rho {
        Case::II
    } else {
        Case::III
    }
}

/// Greedy case selected by the crossover fraction against `1 − e^{−1}` and
/// `1 − e^{−1/rho}`.
pub fn greedy_case(params: &TwoBudgetParams) -> Case {
    let g = params.crossover();
    if g <= 1.0 - 1.0 / E {
        Case::I
    } else if g <= -(-1.0 / params.rho).exp_m1() {
        Case::II
    } else {
        Case::III
    }
}

fn hardness_terms(rho: f64, alpha: f64, case: Case) -> (f64, f64) {
    if alpha.is_infinite() {
        return (1.0 - 1.0 / E, -(-1.0 / rho).exp_m1());
    }
    let a = alpha * (1.0 - rho) / rho;
    let second = |scale: f64| ((1.0 - scale * a.powf(rho - 1.0)) * alpha + 1.0 - scale * a.powf(rho)) / (alpha + 1.0);
    match case {
        Case::I => {
            let s = (-rho).exp();
            let first = ((1.0 - s * a.powf(rho - 1.0)) * alpha + 1.0 - s * a.powf(rho)) / alpha;
            (first, second(1.0 / E))
        }
        Case::II => (1.0 - 1.0 / E, second(1.0 / E)),
        Case::III => (1.0 - 1.0 / E, -(-1.0 / rho).exp_m1() * alpha / (alpha + 1.0)),
    }
}

/// Upper bound on any efficient algorithm's average ratio over the two
/// budgets, on the hard instance with weight `alpha`.
pub fn hardness_ratio(rho: f64, alpha: f64) -> Result<f64> {
    TwoBudgetParams::from_alpha(rho, alpha)?;
    let (a, b) = hardness_terms(rho, alpha, hardness_case(rho, alpha));
    Ok(0.5 * (a + b))
}

/// Greedy's guaranteed ratios `(at k_1, at k_2)` for the given case formula.
pub fn greedy_terms_for_case(params: &TwoBudgetParams, case: Case) -> (f64, f64) {
    let TwoBudgetParams { rho, c } = *params;
    if c >= 1.0 {
        return (1.0 - 1.0 / E, -(-1.0 / rho).exp_m1());
    }
    let a = params.a();
    let g = params.crossover();
    match case {
        Case::I => {
            let s = (-rho).exp() * a.powf(rho);
            let first = (1.0 - s) / c + s * g;
            let second = 1.0 - a.powf(rho) / E + a.powf(rho) / E * (c - rho) / (1.0 - rho);
            (first, second)
        }
        Case::II => (
            1.0 - 1.0 / E,
            1.0 - a.powf(rho) / E * (1.0 - c) - a.powf(rho - 1.0) / E * c,
        ),
        Case::III => (1.0 - 1.0 / E, -(-1.0 / rho).exp_m1() * c),
    }
}

/// Greedy's guaranteed ratios at `k_1` and `k_2`.
pub fn greedy_per_budget(params: &TwoBudgetParams) -> (f64, f64) {
    greedy_terms_for_case(params, greedy_case(params))
}

/// Greedy's guaranteed average ratio over the two budgets.
pub fn greedy_two_budget_ratio(params: &TwoBudgetParams) -> f64 {
    let (a, b) = greedy_per_budget(params);
    0.5 * (a + b)
}

/// Optimal value with budget `beta k_2` on the hard instance: the weight-1
/// part has width `1 − rho`, the weight-`alpha` part width `rho`.
pub fn gap_opt_value(rho: f64, alpha: f64, beta: f64) -> f64 {
    if alpha < rho / (1.0 - rho) {
        f64::min(1.0, beta / (1.0 - rho)) + f64::max((beta - 1.0 + rho) / rho, 0.0) * alpha
    } else {
        f64::min(1.0, beta / rho) * alpha + f64::max((beta - rho) / (1.0 - rho), 0.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WorstC {
    pub rho: f64,
    pub c: f64,
    pub ratio: f64,
    pub case: Case,
}

/// Least greedy ratio over `c ∈ [rho, 1]`: a 1000-point scan, then golden
/// section on the best bracket to `1e-8`.
pub fn worst_c(rho: f64) -> Result<WorstC> {
    TwoBudgetParams::new(rho, rho)?;
    let f = |c: f64| greedy_two_budget_ratio(&TwoBudgetParams { rho, c: c.clamp(rho, 1.0) });
    let points = 1000;
    let step = (1.0 - rho) / (points - 1) as f64;
    let at = |i: usize| if i + 1 == points { 1.0 } else { rho + step * i as f64 };
    let (best_i, best) = (0..points)
        .map(|i| (i, f(at(i))))
        .fold((0, f64::INFINITY), |b, x| if x.1 < b.1 { x } else { b });
    let (lo, hi) = (at(best_i.saturating_sub(1)), at((best_i + 1).min(points - 1)));
    let (mut c, mut ratio) = golden_section_min(f, lo, hi, 1e-8);
    if best < ratio {
        c = at(best_i);
        ratio = best;
    }
    let c = c.clamp(rho, 1.0);
    Ok(WorstC {
        rho,
        c,
        ratio,
        case: greedy_case(&TwoBudgetParams { rho, c }),
    })
}

/// Evenly spaced values from `lo` to `hi` (inclusive, up to rounding).
pub fn rho_grid(lo: f64, hi: f64, step: f64) -> Result<Vec<f64>> {
    if !(lo > 0.0 && lo <= hi && hi < 1.0 && step > 0.0) {
        return Err(Error::invalid(format!(
            "need 0 < rho-min <= rho-max < 1 and step > 0, got {lo}..{hi} by {step}"
        )));
    }
    let count = ((hi - lo) / step + 1e-9).floor() as usize + 1;
    Ok((0..count).map(|i| ((lo + step * i as f64) * 1e12).round() / 1e12).collect())
}

pub fn figure1_sweep(rhos: &[f64]) -> Result<Vec<WorstC>> {
    rhos.iter().map(|&r| worst_c(r)).collect()
}

pub fn sweep_csv(rows: &[WorstC]) -> String {
    let mut out = String::from("rho,worst_ratio,worst_c\n");
    for r in rows {
        let _ = writeln!(out, "{},{},{}", r.rho, r.ratio, r.c);
    }
    out
}
