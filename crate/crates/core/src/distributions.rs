//! Budget perturbation distributions and their discretization.
//!
//! Spec files hold either `key=value` lines
//!
//! ```text
//! kind=log_uniform
//! lo=1
//! hi=600
//! ```
//!
//! (`kind` is one of `point`, `uniform`, `log_uniform`, `empirical`; the
//! empirical kind takes `budgets=2.6,23.3,...`), a bare list of budgets one
//! per line, or a grid of `rho p` lines.

use crate::error::{Error, Result};
use crate::program::BudgetGrid;
use serde::{Deserialize, Serialize};
use std::path::Path;

pub const BUILTIN_NAMES: [&str; 5] = [
    "baseline",
    "uniform-1-10",
    "loguniform-1-10",
    "loguniform-1-600",
    "democrats-2020",
];

/// Campaign budgets in millions: Bennet, Biden, Bloomberg, Buttigieg,
/// Gabbard, Klobuchar, Patrick, Sanders, Steyer, Warren, Yang.
pub const DEMOCRATS_2020: [f64; 11] = [2.6, 23.3, 188.4, 34.1, 2.9, 10.1, 0.9, 50.1, 153.7, 33.7, 19.2];

/// Points used for interval distributions when none is requested.
pub const DEFAULT_POINTS: usize = 25;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PerturbationSpec {
    Point,
    Uniform { lo: f64, hi: f64 },
    LogUniform { lo: f64, hi: f64 },
    Empirical { budgets: Vec<f64> },
}

impl PerturbationSpec {
    pub fn validate(&self) -> Result<()> {
        match self {
            Self::Point => Ok(()),
            Self::Uniform { lo, hi } | Self::LogUniform { lo, hi } => {
                if !(lo.is_finite() && hi.is_finite() && *lo > 0.0 && lo < hi) {
                    return Err(Error::invalid(format!("interval [{lo}, {hi}] needs 0 < lo < hi")));
                }
                Ok(())
            }
            Self::Empirical { budgets } => {
                if budgets.is_empty() {
                    return Err(Error::invalid("empirical distribution has no budgets"));
                }
                if let Some(b) = budgets.iter().find(|b| !(b.is_finite() && **b > 0.0)) {
                    return Err(Error::invalid(format!("budget {b} is not positive")));
                }
                Ok(())
            }
        }
    }

    /// Number of distinct support points, if the distribution is discrete.
    pub fn support_size(&self) -> Option<usize> {
        match self {
            Self::Point => Some(1),
            Self::Empirical { budgets } => Some(atoms(budgets).len()),
            _ => None,
        }
    }
}

pub fn builtin(name: &str) -> Result<PerturbationSpec> {
    Ok(match name {
        "baseline" => PerturbationSpec::Point,
        "uniform-1-10" => PerturbationSpec::Uniform { lo: 1.0, hi: 10.0 },
        "loguniform-1-10" => PerturbationSpec::LogUniform { lo: 1.0, hi: 10.0 },
        "loguniform-1-600" => PerturbationSpec::LogUniform { lo: 1.0, hi: 600.0 },
        "democrats-2020" => PerturbationSpec::Empirical {
            budgets: DEMOCRATS_2020.to_vec(),
        },
        other => return Err(Error::UnknownDistribution(other.to_string())),
    })
}

/// Distinct sorted values with multiplicities.
fn atoms(budgets: &[f64]) -> Vec<(f64, usize)> {
    let mut sorted = budgets.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mut out: Vec<(f64, usize)> = Vec::new();
    for b in sorted {
        match out.last_mut() {
            Some((v, c)) if *v == b => *c += 1,
            _ => out.push((b, 1)),
        }
    }
    out
}

fn even(lo: f64, hi: f64, m: usize) -> Vec<f64> {
    if m == 1 {
        return vec![hi];
    }
    (0..m)
        .map(|i| if i + 1 == m { hi } else { lo + (hi - lo) * i as f64 / (m - 1) as f64 })
        .collect()
}

/// Turns a distribution into a budget grid.
///
/// Interval kinds get `points` evenly (or geometrically) spaced budgets with
/// equal probability; a single point sits at the upper end. Empirical
/// budgets keep their distinct values, normalized so the largest is 1, with
/// probability proportional to multiplicity; `points`, if given, must equal
/// the number of distinct values. `tau` drops probability mass below the
/// `tau` quantile and above the `1 − tau` quantile.
pub fn discretize(spec: &PerturbationSpec, points: Option<usize>, tau: f64) -> Result<BudgetGrid> {
    spec.validate()?;
    if !(0.0..0.5).contains(&tau) {
        return Err(Error::invalid(format!("tail mass {tau} must lie in [0, 0.5)")));
    }
    if points == Some(0) {
        return Err(Error::invalid("at least one point is required"));
    }
    match spec {
        PerturbationSpec::Point => BudgetGrid::new(vec![1.0], vec![1.0]),
        PerturbationSpec::Uniform { lo, hi } => {
            let span = hi - lo;
            let rho = even(lo + tau * span, hi - tau * span, points.unwrap_or(DEFAULT_POINTS));
            BudgetGrid::uniform(rho)
        }
        PerturbationSpec::LogUniform { lo, hi } => {
            let (a, b) = (lo.ln(), hi.ln());
            let span = b - a;
            let rho = even(a + tau * span, b - tau * span, points.unwrap_or(DEFAULT_POINTS))
                .into_iter()
                .map(f64::exp)
                .collect::<Vec<_>>();
            // keep the requested endpoints exact
            let mut rho = rho;
            if tau == 0.0 {
                if rho.len() > 1 {
                    rho[0] = *lo;
                }
                *rho.last_mut().expect("non-empty") = *hi;
            }
            BudgetGrid::uniform(rho)
        }
        PerturbationSpec::Empirical { budgets } => {
            let atoms = atoms(budgets);
            if let Some(m) = points {
                if m != atoms.len() {
                    return Err(Error::invalid(format!(
                        "empirical distribution has {} distinct budgets; points must match",
                        atoms.len()
                    )));
                }
            }
            let total = budgets.len() as f64;
            let mut below = 0.0;
            let kept: Vec<(f64, f64)> = atoms
                .iter()
                .filter_map(|&(v, c)| {
                    let mass = c as f64 / total;
                    let keep = below + mass > tau && below < 1.0 - tau;
                    below += mass;
                    keep.then_some((v, mass))
                })
                .collect();
            let top = kept.last().map(|k| k.0).expect("some atom survives tau < 0.5");
            BudgetGrid::with_weights(
                kept.iter().map(|k| k.0 / top).collect(),
                kept.iter().map(|k| k.1).collect(),
            )
        }
    }
}

/// What a `--dist` argument resolved to.
#[derive(Debug, Clone, PartialEq)]
pub enum Source {
    Spec(PerturbationSpec),
    Grid(BudgetGrid),
}

impl Source {
    pub fn into_grid(self, points: Option<usize>, tau: f64) -> Result<BudgetGrid> {
        match self {
            Self::Spec(spec) => discretize(&spec, points, tau),
            Self::Grid(grid) => {
                if points.is_some_and(|m| m != grid.len()) {
                    return Err(Error::invalid("points cannot be changed for an explicit grid"));
                }
                Ok(grid)
            }
        }
    }
}

/// Parses the contents of a distribution file.
pub fn parse_source(text: &str) -> Result<Source> {
    let lines: Vec<(usize, &str)> = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty())
        .collect();
    let Some(&(first_line, first)) = lines.first() else {
        return Err(Error::parse(1, "empty distribution file"));
    };
    let num = |line: usize, s: &str| -> Result<f64> {
        s.trim()
            .parse()
            .map_err(|_| Error::parse(line, format!("cannot parse {s:?} as a number")))
    };
    if first.contains('=') {
        let mut kind = None;
        let (mut lo, mut hi, mut budgets) = (None, None, None);
        for &(ln, line) in &lines {
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::parse(ln, "expected `key=value`"))?;
            match key.trim() {
                "kind" => kind = Some((ln, value.trim().to_string())),
                "lo" => lo = Some(num(ln, value)?),
                "hi" => hi = Some(num(ln, value)?),
                "budgets" => {
                    budgets = Some(
                        value
                            .split(',')
                            .filter(|t| !t.trim().is_empty())
                            .map(|t| num(ln, t))
                            .collect::<Result<Vec<_>>>()?,
                    )
                }
                other => return Err(Error::parse(ln, format!("unknown key {other:?}"))),
            }
        }
        let (kind_line, kind) = kind.ok_or_else(|| Error::parse(first_line, "missing `kind=`"))?;
        let need = |v: Option<f64>, name: &str| v.ok_or_else(|| Error::parse(kind_line, format!("missing `{name}=`")));
        let spec = match kind.as_str() {
            "point" => PerturbationSpec::Point,
            "uniform" => PerturbationSpec::Uniform {
                lo: need(lo, "lo")?,
                hi: need(hi, "hi")?,
            },
            "log_uniform" | "loguniform" => PerturbationSpec::LogUniform {
                lo: need(lo, "lo")?,
                hi: need(hi, "hi")?,
            },
            "empirical" => PerturbationSpec::Empirical {
                budgets: budgets.ok_or_else(|| Error::parse(kind_line, "missing `budgets=`"))?,
            },
            other => return Err(Error::parse(kind_line, format!("unknown kind {other:?}"))),
        };
        spec.validate()?;
        return Ok(Source::Spec(spec));
    }
    let columns = first.split_whitespace().count();
    if columns == 2 {
        return Ok(Source::Grid(BudgetGrid::parse(text)?));
    }
    let budgets = lines
        .iter()
        .map(|&(ln, line)| {
            if line.split_whitespace().count() != 1 {
                return Err(Error::parse(ln, "expected one budget per line"));
            }
            num(ln, line)
        })
        .collect::<Result<Vec<_>>>()?;
    let spec = PerturbationSpec::Empirical { budgets };
    spec.validate()?;
    Ok(Source::Spec(spec))
}

/// Resolves a builtin name or a path to a distribution file.
pub fn resolve(name_or_path: &str) -> Result<Source> {
    match builtin(name_or_path) {
        Ok(spec) => Ok(Source::Spec(spec)),
        Err(unknown) => {
            let path = Path::new(name_or_path);
            if path.is_file() {
                parse_source(&std::fs::read_to_string(path)?)
            } else {
                Err(unknown)
            }
        }
    }
}
