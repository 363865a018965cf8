//! Line-oriented instance files.
//!
//! ```text
//! # comments and blank lines are ignored
//! coverage 3 3
//! S1: 0,1
//! S2: 1,2
//! S3: 2
//! weights: 1,1,1
//! ```
//!
//! or
//!
//! ```text
//! tabulated 2
//! 0 1 1 1.5
//! ```
//!
//! Tabulated values are listed in subset-bitmask order and may span lines.

use super::{Form, SetFunctionInstance};
use crate::error::{Error, Result};
use std::fmt::Write as _;

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty())
}

fn number<T: std::str::FromStr>(line: usize, tok: &str) -> Result<T> {
    tok.trim()
        .parse()
        .map_err(|_| Error::parse(line, format!("cannot parse {tok:?} as a number")))
}

pub fn parse_instance(text: &str) -> Result<SetFunctionInstance> {
    let mut lines = content_lines(text);
    let (hline, header) = lines.next().ok_or_else(|| Error::parse(1, "empty instance file"))?;
    let mut head = header.split_whitespace();
    match head.next() {
        Some("coverage") => {
            let n_sets: usize = number(hline, head.next().unwrap_or(""))?;
            let universe: usize = number(hline, head.next().unwrap_or(""))?;
            let mut labels = Vec::with_capacity(n_sets);
            let mut sets = Vec::with_capacity(n_sets);
            let mut weights = None;
            for (ln, line) in lines {
                let (key, rest) = line
                    .split_once(':')
                    .ok_or_else(|| Error::parse(ln, "expected `id: item,item,...`"))?;
                let items = rest
                    .split(',')
                    .map(str::trim)
                    .filter(|t| !t.is_empty())
                    .map(|t| number::<f64>(ln, t).map(|v| (t, v)));
                if key.trim() == "weights" {
                    let w: Vec<f64> = items.map(|r| r.map(|(_, v)| v)).collect::<Result<_>>()?;
                    if w.len() != universe {
                        return Err(Error::parse(
                            ln,
                            format!("expected {universe} weights, got {}", w.len()),
                        ));
                    }
                    weights = Some(w);
                } else {
                    let set = items
                        .map(|r| r.and_then(|(t, _)| number::<usize>(ln, t)))
                        .collect::<Result<Vec<_>>>()?;
                    labels.push(key.trim().to_string());
                    sets.push(set);
                }
            }
            if sets.len() != n_sets {
                return Err(Error::parse(
                    hline,
                    format!("header announces {n_sets} sets, found {}", sets.len()),
                ));
            }
            let weights = weights.unwrap_or_else(|| vec![1.0; universe]);
            SetFunctionInstance::coverage_with_labels(labels, sets, weights)
        }
        Some("tabulated") => {
            let n: usize = number(hline, head.next().unwrap_or(""))?;
            let mut values = Vec::new();
            for (ln, line) in lines {
                for tok in line.split(|c: char| c == ',' || c.is_whitespace()) {
                    if !tok.is_empty() {
                        values.push(number::<f64>(ln, tok)?);
                    }
                }
            }
            SetFunctionInstance::tabulated(n, values)
        }
        other => Err(Error::parse(
            hline,
            format!("unknown instance kind {other:?}; expected `coverage` or `tabulated`"),
        )),
    }
}

/// Serializes an instance in the format accepted by [`parse_instance`].
pub fn format_instance(inst: &SetFunctionInstance) -> String {
    let mut out = String::new();
    match inst.form() {
        Form::Coverage {
            labels,
            sets,
            weights,
        } => {
            let _ = writeln!(out, "coverage {} {}", sets.len(), weights.len());
            for (label, set) in labels.iter().zip(sets) {
                let items: Vec<String> = set.iter().map(usize::to_string).collect();
                let _ = writeln!(out, "{label}: {}", items.join(","));
            }
            let w: Vec<String> = weights.iter().map(|w| format!("{w}")).collect();
            let _ = writeln!(out, "weights: {}", w.join(","));
        }
        Form::Tabulated { values } => {
            let _ = writeln!(out, "tabulated {}", inst.ground_size());
            for chunk in values.chunks(8) {
                let row: Vec<String> = chunk.iter().map(|v| format!("{v}")).collect();
                let _ = writeln!(out, "{}", row.join(" "));
            }
        }
    }
    out
}
