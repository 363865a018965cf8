//! Command-line front end. Every subcommand writes its tables and a
//! `<command>-report.json` into `--out` and prints a short summary.

use crate::block::{lower_bound_family, lower_bound_max, lower_bound_ratio_curve, lower_bound_tail, BlockInstance};
use crate::distributions;
use crate::error::{Error, Result};
use crate::program::{minimize_expected_ratio, SolverConfig};
use crate::rounds::{batched_threshold_greedy, check_observation_condition, Optima, RoundConfig};
use crate::setfn::{brute_force_opt, greedy, parse_instance, SetFunctionInstance};
use crate::suite::run_suite;
use crate::two_budget::{figure1_sweep, rho_grid, sweep_csv};
use clap::{Args, Parser, Subcommand};
use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};
use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

#[derive(Debug, Parser)]
#[command(name = "budget-ratio", version, about = "Worst-case greedy ratios under random cardinality budgets")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args, Clone)]
pub struct OutArgs {
    /// Directory for tables and the JSON report.
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Worst-case expected ratio for a budget distribution.
    Analyze {
        /// Builtin name or path to a distribution file.
        #[arg(long, default_value = "baseline")]
        dist: String,
        #[arg(long)]
        points: Option<usize>,
        /// Probability mass trimmed from each tail.
        #[arg(long, default_value_t = 0.0)]
        tau: f64,
        #[arg(long, default_value_t = 64)]
        starts: usize,
        #[arg(long, default_value_t = SolverConfig::default().max_evals)]
        max_evals: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Also write per-start solver diagnostics.
        #[arg(long)]
        diagnostics: bool,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Worst ratio over c for two budgets, swept over rho.
    TwoBudget {
        #[arg(long, default_value_t = 0.01)]
        rho_min: f64,
        #[arg(long, default_value_t = 0.99)]
        rho_max: f64,
        #[arg(long, default_value_t = 0.01)]
        step: f64,
        /// Re-derive five random rows with the general program.
        #[arg(long)]
        cross_check: bool,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Constants of the geometric hard family.
    LowerBound {
        #[arg(long, default_value_t = 50)]
        q: u32,
        /// Blocks in the emitted family.
        #[arg(long = "N", short = 'N', default_value_t = 4)]
        n: u32,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Greedy (and optionally round-based greedy) on an explicit instance.
    Greedy {
        /// `example-3.4` or a path to an instance file.
        #[arg(long)]
        instance: String,
        #[arg(long, value_delimiter = ',', required = true)]
        budgets: Vec<usize>,
        #[arg(long)]
        lazy: bool,
        /// Run round-based threshold greedy with this many rounds.
        #[arg(long)]
        rounds: Option<usize>,
        #[arg(long, default_value_t = 0.1)]
        eps: f64,
        /// Guess optima instead of computing them exactly.
        #[arg(long)]
        guess: bool,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Best and optimal values of a block instance file.
    Blocks {
        #[arg(long)]
        file: PathBuf,
        #[arg(long, value_delimiter = ',', required = true)]
        budgets: Vec<f64>,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Runs the seeded self-check suite.
    Check {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Multiplier on the number of random cases.
        #[arg(long, default_value_t = 1)]
        scale: usize,
        #[command(flatten)]
        out: OutArgs,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Analyze { .. } => "analyze",
            Command::TwoBudget { .. } => "two-budget",
            Command::LowerBound { .. } => "lower-bound",
            Command::Greedy { .. } => "greedy",
            Command::Blocks { .. } => "blocks",
            Command::Check { .. } => "check",
        }
    }

    fn out_dir(&self) -> &Path {
        match self {
            Command::Analyze { out, .. }
            | Command::TwoBudget { out, .. }
            | Command::LowerBound { out, .. }
            | Command::Greedy { out, .. }
            | Command::Blocks { out, .. }
            | Command::Check { out, .. } => &out.out,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub command: Vec<String>,
    pub inputs_digest: String,
    pub headline: BTreeMap<String, Value>,
    pub outputs: Vec<String>,
    #[serde(skip)]
    pub summary: Vec<String>,
    #[serde(skip)]
    pub wall_time: Duration,
}

struct Run {
    out: PathBuf,
    digest: Sha256,
    headline: BTreeMap<String, Value>,
    outputs: Vec<String>,
    summary: Vec<String>,
}

impl Run {
    fn new(out: &Path, args: &[String]) -> Result<Self> {
        fs::create_dir_all(out)?;
        let mut digest = Sha256::new();
        for a in args {
            digest.update(a.as_bytes());
            digest.update([0]);
        }
        Ok(Self {
            out: out.to_path_buf(),
            digest,
            headline: BTreeMap::new(),
            outputs: Vec::new(),
            summary: Vec::new(),
        })
    }

    fn input(&mut self, bytes: &[u8]) {
        self.digest.update(bytes);
    }

    fn put(&mut self, key: &str, value: impl Serialize) {
        self.headline.insert(key.to_string(), json!(value));
    }

    fn say(&mut self, line: String) {
        self.summary.push(line);
    }

    fn path(&mut self, name: &str) -> PathBuf {
        let p = self.out.join(name);
        self.outputs.push(p.display().to_string());
        p
    }

    fn write_text(&mut self, name: &str, text: &str) -> Result<()> {
        let p = self.path(name);
        fs::write(p, text)?;
        Ok(())
    }

    fn write_rows<T: Serialize>(&mut self, name: &str, rows: &[T]) -> Result<()> {
        let p = self.path(name);
        let mut w = csv::Writer::from_path(p)?;
        for r in rows {
            w.serialize(r)?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I) -> Result<RunReport>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let args: Vec<std::ffi::OsString> = args.into_iter().map(Into::into).collect();
    let cli = Cli::try_parse_from(&args).map_err(|e| Error::InvalidInput(e.to_string()))?;
    let echo: Vec<String> = args.iter().skip(1).map(|a| a.to_string_lossy().into_owned()).collect();
    execute(cli, echo)
}

pub fn execute(cli: Cli, echo: Vec<String>) -> Result<RunReport> {
    let start = Instant::now();
    let name = cli.command.name();
    let mut run = Run::new(cli.command.out_dir(), &echo)?;
    let outcome = match cli.command {
        Command::Analyze {
            dist,
            points,
            tau,
            starts,
            max_evals,
            seed,
            diagnostics,
            ..
        } => analyze(&mut run, &dist, points, tau, SolverConfig { starts, max_evals, seed, ..SolverConfig::default() }, diagnostics),
        Command::TwoBudget {
            rho_min,
            rho_max,
            step,
            cross_check,
            seed,
            ..
        } => two_budget(&mut run, rho_min, rho_max, step, cross_check, seed),
        Command::LowerBound { q, n, .. } => lower_bound(&mut run, q, n),
        Command::Greedy {
            instance,
            budgets,
            lazy,
            rounds,
            eps,
            guess,
            ..
        } => greedy_cmd(&mut run, &instance, &budgets, lazy, rounds, eps, guess),
        Command::Blocks { file, budgets, .. } => blocks(&mut run, &file, &budgets),
        Command::Check { seed, scale, .. } => check(&mut run, seed, scale),
    };
    let report_path = run.path(&format!("{name}-report.json"));
    let report = RunReport {
        command: echo,
        inputs_digest: format!("{:x}", run.digest.finalize_reset()),
        headline: std::mem::take(&mut run.headline),
        outputs: std::mem::take(&mut run.outputs),
        summary: std::mem::take(&mut run.summary),
        wall_time: start.elapsed(),
    };
    fs::write(report_path, serde_json::to_string_pretty(&report)? + "\n")?;
    outcome.map(|_| report)
}

fn analyze(run: &mut Run, dist: &str, points: Option<usize>, tau: f64, config: SolverConfig, diagnostics: bool) -> Result<()> {
    if Path::new(dist).is_file() {
        run.input(&fs::read(dist)?);
    }
    let grid = distributions::resolve(dist)?.into_grid(points, tau)?;
    let wc = minimize_expected_ratio(&grid, &config)?;

    #[derive(Serialize)]
    struct Row {
        i: usize,
        rho: f64,
        p: f64,
        beta: f64,
        h: f64,
    }
    let rows: Vec<Row> = (0..grid.len())
        .map(|i| Row {
            i: i + 1,
            rho: grid.rho()[i],
            p: grid.p()[i],
            beta: wc.beta[i],
            h: wc.per_budget[i],
        })
        .collect();
    run.write_rows("analyze.csv", &rows)?;
    let pairs: Vec<(f64, f64)> = wc
        .beta
        .iter()
        .copied()
        .zip(grid.widths())
        .take_while(|(b, _)| *b > 0.0)
        .collect();
    run.write_text("worst_instance.txt", &BlockInstance::from_pairs(&pairs)?.to_text())?;
    if diagnostics {
        run.write_rows("analyze_starts.csv", &wc.starts)?;
    }
    let converged = wc.starts.iter().filter(|s| s.converged).count();
    run.put("dist", dist);
    run.put("points", grid.len());
    run.put("ratio", wc.ratio);
    run.put("ratio_4dp", wc.rounded());
    run.put("best_start", wc.best_start);
    run.put("converged_starts", converged);
    run.put("starts", config.starts);
    run.say(format!("distribution: {dist} ({} budgets)", grid.len()));
    run.say(format!("worst-case expected ratio: {:.4}", wc.ratio));
    run.say(format!("best start: {} ({converged}/{} converged)", wc.best_start, config.starts));
    Ok(())
}

fn two_budget(run: &mut Run, lo: f64, hi: f64, step: f64, cross_check: bool, seed: u64) -> Result<()> {
    let rows = figure1_sweep(&rho_grid(lo, hi, step)?)?;
    run.write_text("figure1.csv", &sweep_csv(&rows))?;
    let peak = rows
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.ratio.total_cmp(&b.1.ratio))
        .map(|(i, _)| i)
        .expect("non-empty grid");
    // one rise then one fall
    let unimodal = rows[..=peak].windows(2).all(|w| w[1].ratio >= w[0].ratio)
        && rows[peak..].windows(2).all(|w| w[1].ratio <= w[0].ratio);
    let (first, last) = (&rows[0], &rows[rows.len() - 1]);
    run.put("rows", rows.len());
    run.put("peak_rho", rows[peak].rho);
    run.put("peak_ratio", rows[peak].ratio);
    run.put("first_ratio", first.ratio);
    run.put("last_ratio", last.ratio);
    run.put("unimodal", unimodal);
    run.say(format!("{} rows, rho {}..{}", rows.len(), first.rho, last.rho));
    run.say(format!("peak {:.4} at rho = {}", rows[peak].ratio, rows[peak].rho));
    run.say(format!("endpoints {:.4} and {:.4}; single peak: {unimodal}", first.ratio, last.ratio));
    if cross_check {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let picks = sample(&mut rng, rows.len(), rows.len().min(5)).into_vec();
        let mut worst: f64 = 0.0;
        for i in picks {
            let r = &rows[i];
            let grid = crate::program::BudgetGrid::uniform(vec![r.rho, 1.0])?;
            let wc = minimize_expected_ratio(&grid, &SolverConfig { seed, ..SolverConfig::default() })?;
            worst = worst.max((wc.ratio - r.ratio).abs());
        }
        run.put("cross_check_max_diff", worst);
        run.say(format!("cross-check against the general program: max |diff| {worst:.2e}"));
        if worst > 2e-4 {
            return Err(Error::CheckFailed(format!("two-budget cross-check differs by {worst:e}")));
        }
    }
    Ok(())
}

fn lower_bound(run: &mut Run, q: u32, n: u32) -> Result<()> {
    if q < 3 {
        return Err(Error::invalid(format!("q = {q} must be >= 3")));
    }
    let (a, max) = lower_bound_max(q);
    let tail = lower_bound_tail(q);
    let grid: Vec<f64> = (0..=400).map(|i| 1.0 + f64::from(q) * f64::from(i) / 400.0).collect();
    #[derive(Serialize)]
    struct Point {
        a: f64,
        ratio: f64,
    }
    let curve: Vec<Point> = lower_bound_ratio_curve(q, &grid)?
        .into_iter()
        .map(|(a, ratio)| Point { a, ratio })
        .collect();
    run.write_rows("lower_bound_curve.csv", &curve)?;
    let family = lower_bound_family(q, n, 1.0)?;
    run.write_text("lower_bound_family.txt", &family.to_text())?;
    // largest ratio of the emitted family on a geometric budget grid
    let total = family.total_width();
    let mut family_max: f64 = 0.0;
    for i in 0..=2000 {
        let b = total.powf(f64::from(i) / 2000.0);
        family_max = family_max.max(family.greedy_ratio_at(b)?);
    }
    run.put("q", q);
    run.put("max_ratio", max);
    run.put("argmax_a", a);
    run.put("tail_bound", tail);
    run.put("combined_bound", max + tail);
    run.put("family_blocks", n);
    run.put("family_max_ratio", family_max);
    run.say(format!("max two-block ratio {max:.5} at a = {a:.4}"));
    run.say(format!("lower-order mass < {tail:.4}"));
    run.say(format!("combined bound {:.4}", max + tail));
    run.say(format!("largest ratio on the {n}-block family: {family_max:.4}"));
    Ok(())
}

fn load_instance(run: &mut Run, spec: &str) -> Result<SetFunctionInstance> {
    if let Some(inst) = SetFunctionInstance::builtin(spec) {
        return Ok(inst);
    }
    let text = fs::read_to_string(spec)?;
    run.input(text.as_bytes());
    parse_instance(&text)
}

fn greedy_cmd(run: &mut Run, spec: &str, budgets: &[usize], lazy: bool, rounds: Option<usize>, eps: f64, guess: bool) -> Result<()> {
    let inst = load_instance(run, spec)?;
    let mut sorted = budgets.to_vec();
    sorted.sort_unstable();
    sorted.dedup();

    #[derive(Serialize)]
    struct Row {
        budget: usize,
        greedy_value: f64,
        optimum: Option<f64>,
        ratio: Option<f64>,
        chosen: String,
    }
    let mut rows = Vec::new();
    let mut optima = Vec::new();
    for &k in &sorted {
        let trace = greedy(&inst, k, lazy)?;
        let opt = match brute_force_opt(&inst, k) {
            Ok((_, v)) => Some(v),
            Err(Error::TooLarge(_)) => None,
            Err(e) => return Err(e),
        };
        optima.push(opt);
        let ratio = opt.map(|o| if o > 0.0 { trace.value() / o } else { 1.0 });
        let chosen: Vec<String> = trace.chosen.iter().map(|&e| inst.label(e).to_string()).collect();
        let shown = opt.map_or("n/a".to_string(), |o| format!("{o:.4}"));
        let shown_ratio = ratio.map_or("n/a".to_string(), |r| format!("{r:.4}"));
        run.say(format!("k = {k}: greedy {:.4}, optimum {shown}, ratio {shown_ratio}", trace.value()));
        run.put(&format!("greedy_k{k}"), trace.value());
        if let Some(o) = opt {
            run.put(&format!("optimum_k{k}"), o);
        }
        if let Some(r) = ratio {
            run.put(&format!("ratio_k{k}"), r);
        }
        rows.push(Row {
            budget: k,
            greedy_value: trace.value(),
            optimum: opt,
            ratio,
            chosen: chosen.join(" "),
        });
    }
    run.write_rows("greedy.csv", &rows)?;

    if let Some(t) = rounds {
        let guarantees: Vec<usize> = sorted.iter().copied().filter(|&k| k > 0).collect();
        if guarantees.is_empty() {
            return Err(Error::invalid("round-based greedy needs a positive budget"));
        }
        let exact: Option<Vec<f64>> = sorted.iter().zip(&optima).filter(|(k, _)| **k > 0).map(|(_, o)| *o).collect();
        let optima_mode = match (guess, exact) {
            (false, Some(v)) => Optima::Exact(v),
            _ => Optima::Guessed,
        };
        let exact_mode = matches!(optima_mode, Optima::Exact(_));
        let cfg = RoundConfig {
            rounds: t,
            eps,
            budgets: guarantees.clone(),
            optima: optima_mode,
            pad: false,
        };
        for &k in &guarantees {
            let res = batched_threshold_greedy(&inst, k, &cfg)?;
            run.write_text(&format!("rounds_k{k}.csv"), &res.log_csv())?;
            run.put(&format!("rounds_value_k{k}"), res.value());
            run.put(&format!("rounds_error_bound_k{k}"), res.error_bound);
            let mut line = format!("k = {k}, {t} rounds: value {:.4}, error bound {:.4}", res.value(), res.error_bound);
            if exact_mode {
                let chk = check_observation_condition(&res.trace, t, eps, &cfg.budgets, &res.optima)?;
                run.put(&format!("rounds_condition_k{k}"), chk.ok);
                line.push_str(&format!(", per-round condition {}", if chk.ok { "holds" } else { "fails" }));
            } else if let Some(g) = res.guess {
                run.put(&format!("rounds_guess_k{k}"), g);
            }
            run.say(line);
        }
    }
    Ok(())
}

fn blocks(run: &mut Run, file: &Path, budgets: &[f64]) -> Result<()> {
    let text = fs::read_to_string(file)?;
    run.input(text.as_bytes());
    let inst = BlockInstance::parse(&text)?;
    #[derive(Serialize)]
    struct Row {
        budget: f64,
        opt_value: f64,
        best_value: f64,
        ratio: f64,
    }
    let mut rows = Vec::new();
    for &b in budgets {
        let opt = inst.opt_value(b)?;
        let best = inst.best_value(b)?.value;
        let ratio = if opt > 0.0 { best / opt } else { 1.0 };
        run.say(format!("b = {b}: optimum {opt:.4}, best {best:.4}, ratio {ratio:.4}"));
        rows.push(Row {
            budget: b,
            opt_value: opt,
            best_value: best,
            ratio,
        });
    }
    run.put("blocks", inst.len());
    run.put("density_sorted", inst.is_density_sorted());
    run.put(
        "ratios",
        rows.iter().map(|r| r.ratio).collect::<Vec<_>>(),
    );
    run.write_rows("blocks.csv", &rows)?;
    Ok(())
}

fn check(run: &mut Run, seed: u64, scale: usize) -> Result<()> {
    let results = run_suite(seed, scale)?;
    run.write_rows("check.csv", &results)?;
    let mut failed = Vec::new();
    for r in &results {
        run.say(format!("{} {}: {}", if r.passed { "PASS" } else { "FAIL" }, r.name, r.detail));
        run.put(r.name, r.passed);
        if !r.passed {
            failed.push(r.name);
        }
    }
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Error::CheckFailed(failed.join(", ")))
    }
}

/// Applies `RATIO_THREADS`, runs, prints, and returns the exit code.
pub fn main_with_args(args: Vec<std::ffi::OsString>) -> i32 {
    if let Some(n) = std::env::var("RATIO_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        // the pool can only be configured once per process
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
    let cli = match Cli::try_parse_from(&args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let _ = e.print();
            return code;
        }
    };
    let echo: Vec<String> = args.iter().skip(1).map(|a| a.to_string_lossy().into_owned()).collect();
    let name = cli.command.name();
    match execute(cli, echo) {
        Ok(report) => {
            for line in &report.summary {
                println!("{line}");
            }
            println!("wrote {} files to {}", report.outputs.len(), report.outputs.last().map_or(String::new(), |p| {
                Path::new(p).parent().map_or(String::new(), |d| d.display().to_string())
            }));
            eprintln!("{name} finished in {:.2?}", report.wall_time);
            0
        }
        Err(e) => {
            eprintln!("{}", json!({ "error": e.kind(), "command": name, "message": e.to_string() }));
            1
        }
    }
}
