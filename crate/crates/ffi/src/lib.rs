//! C ABI over the `budget-ratio` library.
//!
//! Every fallible function returns a [`BrStatus`] and writes results through
//! out-pointers. On failure the message is available from
//! [`br_last_error_message`] on the same thread. Grids and block instances
//! are opaque handles released with their `_free` function.

use budget_ratio::block::{lower_bound_max, lower_bound_tail, BlockInstance};
use budget_ratio::distributions;
use budget_ratio::program::{expected_ratio, minimize_expected_ratio, per_budget_ratios, BudgetGrid, SolverConfig};
use budget_ratio::two_budget::{greedy_two_budget_ratio, hardness_ratio, worst_c, TwoBudgetParams};
use budget_ratio::Error;
use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BrStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidInput = 2,
    TooLarge = 3,
    Infeasible = 4,
    NoConvergence = 5,
    Parse = 6,
    UnknownDistribution = 7,
    Io = 8,
    BufferTooSmall = 9,
    Panic = 10,
    Other = 11,
}

impl From<&Error> for BrStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::InvalidInput(_) => BrStatus::InvalidInput,
            Error::TooLarge(_) => BrStatus::TooLarge,
            Error::Infeasible(_) => BrStatus::Infeasible,
            Error::NoConvergence(_) => BrStatus::NoConvergence,
            Error::Parse { .. } => BrStatus::Parse,
            Error::UnknownDistribution(_) => BrStatus::UnknownDistribution,
            Error::Io(_) => BrStatus::Io,
            _ => BrStatus::Other,
        }
    }
}

/// Opaque budget grid.
pub struct BrGrid(BudgetGrid);

/// Opaque block instance.
pub struct BrBlocks(BlockInstance);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("no interior nul");
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(c));
}

fn fail(status: BrStatus, msg: impl Into<String>) -> BrStatus {
    set_error(msg.into());
    status
}

fn guard<F>(f: F) -> BrStatus
where
    F: FnOnce() -> Result<(), BrStatus>,
{
    LAST_ERROR.with(|slot| *slot.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => BrStatus::Ok,
        Ok(Err(s)) => s,
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".to_string());
            fail(BrStatus::Panic, msg)
        }
    }
}

fn lift<T>(r: budget_ratio::Result<T>) -> Result<T, BrStatus> {
    r.map_err(|e| fail(BrStatus::from(&e), e.to_string()))
}

fn null(what: &str) -> BrStatus {
    fail(BrStatus::NullPointer, format!("{what} is null"))
}

unsafe fn slice<'a>(p: *const f64, len: usize, what: &str) -> Result<&'a [f64], BrStatus> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn out<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, BrStatus> {
    p.as_mut().ok_or_else(|| null(what))
}

unsafe fn grid<'a>(g: *const BrGrid) -> Result<&'a BudgetGrid, BrStatus> {
    g.as_ref().map(|g| &g.0).ok_or_else(|| null("grid"))
}

unsafe fn blocks<'a>(b: *const BrBlocks) -> Result<&'a BlockInstance, BrStatus> {
    b.as_ref().map(|b| &b.0).ok_or_else(|| null("blocks"))
}

/// Message of the last failed call on this thread, or null. The pointer is
/// valid until the next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn br_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static nul-terminated string.
#[no_mangle]
pub extern "C" fn br_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Grid with increasing budgets `rho[0..m]` and probabilities `p[0..m]`.
///
/// # Safety
/// `rho` and `p` must point to `m` doubles; `out_grid` must be writable.
#[no_mangle]
pub unsafe extern "C" fn br_grid_new(rho: *const f64, p: *const f64, m: usize, out_grid: *mut *mut BrGrid) -> BrStatus {
    guard(|| {
        let dst = out(out_grid, "out_grid")?;
        let g = lift(BudgetGrid::new(slice(rho, m, "rho")?.to_vec(), slice(p, m, "p")?.to_vec()))?;
        *dst = Box::into_raw(Box::new(BrGrid(g)));
        Ok(())
    })
}

/// Grid for a builtin distribution name or a distribution file path.
/// `points == 0` keeps the default resolution.
///
/// # Safety
/// `name` must be a nul-terminated string; `out_grid` must be writable.
#[no_mangle]
pub unsafe extern "C" fn br_grid_from_distribution(name: *const c_char, points: usize, tau: f64, out_grid: *mut *mut BrGrid) -> BrStatus {
    guard(|| {
        let dst = out(out_grid, "out_grid")?;
        if name.is_null() {
            return Err(null("name"));
        }
        let name = CStr::from_ptr(name)
            .to_str()
            .map_err(|_| fail(BrStatus::InvalidInput, "name is not UTF-8"))?;
        let points = (points > 0).then_some(points);
        let g = lift(distributions::resolve(name).and_then(|s| s.into_grid(points, tau)))?;
        *dst = Box::into_raw(Box::new(BrGrid(g)));
        Ok(())
    })
}

/// Number of budgets in the grid, 0 for null.
///
/// # Safety
/// `g` must be null or a live grid.
#[no_mangle]
pub unsafe extern "C" fn br_grid_len(g: *const BrGrid) -> usize {
    g.as_ref().map_or(0, |g| g.0.len())
}

/// Copies budgets and probabilities into caller buffers of length `cap`.
///
/// # Safety
/// `g` must be a live grid; `rho` and `p` must hold `cap` doubles.
#[no_mangle]
pub unsafe extern "C" fn br_grid_values(g: *const BrGrid, rho: *mut f64, p: *mut f64, cap: usize) -> BrStatus {
    guard(|| {
        let g = grid(g)?;
        if cap < g.len() {
            return Err(fail(BrStatus::BufferTooSmall, format!("need {} slots", g.len())));
        }
        if rho.is_null() || p.is_null() {
            return Err(null("output buffer"));
        }
        ptr::copy_nonoverlapping(g.rho().as_ptr(), rho, g.len());
        ptr::copy_nonoverlapping(g.p().as_ptr(), p, g.len());
        Ok(())
    })
}

/// # Safety
/// `g` must be null or a grid not yet freed.
#[no_mangle]
pub unsafe extern "C" fn br_grid_free(g: *mut BrGrid) {
    if !g.is_null() {
        drop(Box::from_raw(g));
    }
}

/// Expected greedy ratio of the instance with block weights `beta`.
///
/// # Safety
/// `beta` must hold `len` doubles; `out_ratio` must be writable.
#[no_mangle]
pub unsafe extern "C" fn br_expected_ratio(g: *const BrGrid, beta: *const f64, len: usize, out_ratio: *mut f64) -> BrStatus {
    guard(|| {
        let dst = out(out_ratio, "out_ratio")?;
        *dst = lift(expected_ratio(grid(g)?, slice(beta, len, "beta")?))?;
        Ok(())
    })
}

/// Per-budget greedy ratios written into `out_ratios[0..len]`.
///
/// # Safety
/// `beta` and `out_ratios` must each hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn br_per_budget_ratios(g: *const BrGrid, beta: *const f64, len: usize, out_ratios: *mut f64) -> BrStatus {
    guard(|| {
        let h = lift(per_budget_ratios(grid(g)?, slice(beta, len, "beta")?))?;
        if out_ratios.is_null() {
            return Err(null("out_ratios"));
        }
        ptr::copy_nonoverlapping(h.as_ptr(), out_ratios, h.len());
        Ok(())
    })
}

/// Worst-case expected ratio over all instances for the grid. The
/// minimizing weights go to `out_beta` when it is non-null and holds
/// `beta_cap >= len` doubles.
///
/// # Safety
/// Pointers must be valid as described.
#[no_mangle]
pub unsafe extern "C" fn br_minimize(
    g: *const BrGrid,
    starts: usize,
    max_evals: usize,
    seed: u64,
    out_ratio: *mut f64,
    out_beta: *mut f64,
    beta_cap: usize,
) -> BrStatus {
    guard(|| {
        let g = grid(g)?;
        let dst = out(out_ratio, "out_ratio")?;
        if !out_beta.is_null() && beta_cap < g.len() {
            return Err(fail(BrStatus::BufferTooSmall, format!("need {} slots", g.len())));
        }
        let d = SolverConfig::default();
        let config = SolverConfig {
            starts: if starts == 0 { d.starts } else { starts },
            max_evals: if max_evals == 0 { d.max_evals } else { max_evals },
            seed,
            ..d
        };
        let wc = lift(minimize_expected_ratio(g, &config))?;
        *dst = wc.ratio;
        if !out_beta.is_null() {
            ptr::copy_nonoverlapping(wc.beta.as_ptr(), out_beta, wc.beta.len());
        }
        Ok(())
    })
}

/// Block instance from weights `alpha` and widths `delta`.
///
/// # Safety
/// `alpha` and `delta` must hold `n` doubles; `out_blocks` must be writable.
#[no_mangle]
pub unsafe extern "C" fn br_blocks_new(alpha: *const f64, delta: *const f64, n: usize, out_blocks: *mut *mut BrBlocks) -> BrStatus {
    guard(|| {
        let dst = out(out_blocks, "out_blocks")?;
        let pairs: Vec<(f64, f64)> = slice(alpha, n, "alpha")?
            .iter()
            .copied()
            .zip(slice(delta, n, "delta")?.iter().copied())
            .collect();
        let b = lift(BlockInstance::from_pairs(&pairs))?;
        *dst = Box::into_raw(Box::new(BrBlocks(b)));
        Ok(())
    })
}

/// # Safety
/// `b` must be null or a block instance not yet freed.
#[no_mangle]
pub unsafe extern "C" fn br_blocks_free(b: *mut BrBlocks) {
    if !b.is_null() {
        drop(Box::from_raw(b));
    }
}

/// Optimum value at budget `budget`.
///
/// # Safety
/// `b` must be a live instance; `out_value` must be writable.
#[no_mangle]
pub unsafe extern "C" fn br_blocks_opt_value(b: *const BrBlocks, budget: f64, out_value: *mut f64) -> BrStatus {
    guard(|| {
        let dst = out(out_value, "out_value")?;
        *dst = lift(blocks(b)?.opt_value(budget))?;
        Ok(())
    })
}

/// Best value obtainable by splitting `budget` across blocks.
///
/// # Safety
/// `b` must be a live instance; `out_value` must be writable.
#[no_mangle]
pub unsafe extern "C" fn br_blocks_best_value(b: *const BrBlocks, budget: f64, out_value: *mut f64) -> BrStatus {
    guard(|| {
        let dst = out(out_value, "out_value")?;
        *dst = lift(blocks(b)?.best_value(budget))?.value;
        Ok(())
    })
}

/// Greedy ratio at `budget` for a density-sorted instance.
///
/// # Safety
/// `b` must be a live instance; `out_ratio` must be writable.
#[no_mangle]
pub unsafe extern "C" fn br_blocks_greedy_ratio(b: *const BrBlocks, budget: f64, out_ratio: *mut f64) -> BrStatus {
    guard(|| {
        let dst = out(out_ratio, "out_ratio")?;
        *dst = lift(blocks(b)?.greedy_ratio_at(budget))?;
        Ok(())
    })
}

/// Maximum two-block ratio of the hard family with parameter `q`, its
/// argmax and the bound on the remaining mass.
///
/// # Safety
/// Out-pointers must be writable; `out_tail` may be null.
#[no_mangle]
pub unsafe extern "C" fn br_lower_bound_max(q: u32, out_argmax: *mut f64, out_max: *mut f64, out_tail: *mut f64) -> BrStatus {
    guard(|| {
        if q < 3 {
            return Err(fail(BrStatus::InvalidInput, format!("q = {q} must be >= 3")));
        }
        let a = out(out_argmax, "out_argmax")?;
        let m = out(out_max, "out_max")?;
        (*a, *m) = lower_bound_max(q);
        if let Some(t) = out_tail.as_mut() {
            *t = lower_bound_tail(q);
        }
        Ok(())
    })
}

/// Expected greedy ratio for two equally likely budgets `rho < 1` with the
/// first block holding fraction `c` of the value.
///
/// # Safety
/// `out_ratio` must be writable.
#[no_mangle]
pub unsafe extern "C" fn br_two_budget_ratio(rho: f64, c: f64, out_ratio: *mut f64) -> BrStatus {
    guard(|| {
        let dst = out(out_ratio, "out_ratio")?;
        *dst = greedy_two_budget_ratio(&lift(TwoBudgetParams::new(rho, c))?);
        Ok(())
    })
}

/// Hardness ratio for two budgets parameterized by `rho` and `alpha`.
///
/// # Safety
/// `out_ratio` must be writable.
#[no_mangle]
pub unsafe extern "C" fn br_two_budget_hardness(rho: f64, alpha: f64, out_ratio: *mut f64) -> BrStatus {
    guard(|| {
        let dst = out(out_ratio, "out_ratio")?;
        *dst = lift(hardness_ratio(rho, alpha))?;
        Ok(())
    })
}

/// Worst `c` for two budgets and the ratio there.
///
/// # Safety
/// Out-pointers must be writable.
#[no_mangle]
pub unsafe extern "C" fn br_two_budget_worst(rho: f64, out_c: *mut f64, out_ratio: *mut f64) -> BrStatus {
    guard(|| {
        let c = out(out_c, "out_c")?;
        let r = out(out_ratio, "out_ratio")?;
        let w = lift(worst_c(rho))?;
        *c = w.c;
        *r = w.ratio;
        Ok(())
    })
}
