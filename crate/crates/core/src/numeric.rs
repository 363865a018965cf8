//! Small numerical kernels: one-dimensional golden-section search, a
//! box-bounded Nelder–Mead simplex and a shifted Halton sequence for
//! multi-start initial points.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const INV_PHI: f64 = 0.618_033_988_749_894_8;

/// Golden-section minimization of a unimodal `f` on `[lo, hi]`.
pub fn golden_section_min<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64, tol: f64) -> (f64, f64) {
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while hi - lo > tol {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2);
        }
    }
    let x = 0.5 * (lo + hi);
    let fx = f(x);
    [(x1, f1), (x2, f2), (x, fx)]
        .into_iter()
        .fold((x, fx), |best, c| if c.1 < best.1 { c } else { best })
}

/// Minimizes `f` on `[lo, hi]`: scans `points` evenly spaced abscissae,
/// then refines the best bracket by golden section to `tol`.
pub fn minimize_scalar<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, points: usize, tol: f64) -> (f64, f64) {
    let points = points.max(3);
    let step = (hi - lo) / (points - 1) as f64;
    let xs = |i: usize| if i + 1 == points { hi } else { lo + step * i as f64 };
    let (best_i, best_f) = (0..points)
        .map(|i| (i, f(xs(i))))
        .fold((0, f64::INFINITY), |b, c| if c.1 < b.1 { c } else { b });
    let a = xs(best_i.saturating_sub(1));
    let b = xs((best_i + 1).min(points - 1));
    let refined = golden_section_min(&f, a, b, tol);
    if refined.1 <= best_f {
        refined
    } else {
        (xs(best_i), best_f)
    }
}

/// Maximizing counterpart of [`minimize_scalar`].
pub fn maximize_scalar<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, points: usize, tol: f64) -> (f64, f64) {
    let (x, v) = minimize_scalar(|x| -f(x), lo, hi, points, tol);
    (x, -v)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NelderMeadOptions {
    pub max_evals: usize,
    /// Stop once the spread of simplex values falls below this.
    pub f_tol: f64,
    /// ... and the simplex diameter falls below this.
    pub x_tol: f64,
    /// Initial simplex edge as a fraction of the box width.
    pub initial_step: f64,
}

impl Default for NelderMeadOptions {
    fn default() -> Self {
        Self {
            max_evals: 2000,
            f_tol: 1e-12,
            x_tol: 1e-9,
            initial_step: 0.1,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NelderMeadResult {
    pub x: Vec<f64>,
    pub value: f64,
    pub evals: usize,
    pub converged: bool,
}

/// Nelder–Mead on the box `[lo, hi]^d`; trial points are projected onto the
/// box. Uses dimension-adapted coefficients (reflection 1, expansion
/// `1 + 2/d`, contraction `0.75 − 1/(2d)`, shrink `1 − 1/d`).
pub fn nelder_mead_box<F: FnMut(&[f64]) -> f64>(
    mut f: F,
    x0: &[f64],
    lo: f64,
    hi: f64,
    opts: &NelderMeadOptions,
) -> NelderMeadResult {
    let d = x0.len();
    let project = |x: &mut [f64]| x.iter_mut().for_each(|v| *v = v.clamp(lo, hi));
    let mut evals = 0usize;
    let mut eval = |x: &[f64], evals: &mut usize| {
        *evals += 1;
        f(x)
    };
    if d == 0 {
        let v = eval(x0, &mut evals);
        return NelderMeadResult {
            x: Vec::new(),
            value: v,
            evals,
            converged: true,
        };
    }
    let df = d as f64;
    let (c_refl, c_exp, c_con, c_shr) = if d >= 2 {
        (1.0, 1.0 + 2.0 / df, 0.75 - 0.5 / df, 1.0 - 1.0 / df)
    } else {
        (1.0, 2.0, 0.5, 0.5)
    };
    let step = opts.initial_step * (hi - lo);
    let mut start = x0.to_vec();
    project(&mut start);
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(d + 1);
    let v0 = eval(&start, &mut evals);
    simplex.push((start.clone(), v0));
    for i in 0..d {
        let mut p = start.clone();
        p[i] = if p[i] + step <= hi { p[i] + step } else { p[i] - step };
        let v = eval(&p, &mut evals);
        simplex.push((p, v));
    }
    let mut converged = false;
    while evals < opts.max_evals {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let spread = simplex[d].1 - simplex[0].1;
        let diameter = simplex[1..]
            .iter()
            .map(|(p, _)| {
                p.iter()
                    .zip(&simplex[0].0)
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0, f64::max)
            })
            .fold(0.0, f64::max);
        if spread <= opts.f_tol && diameter <= opts.x_tol {
            converged = true;
            break;
        }
        let mut centroid = vec![0.0; d];
        for (p, _) in &simplex[..d] {
            for (c, v) in centroid.iter_mut().zip(p) {
                *c += v / df;
            }
        }
        let toward = |coef: f64| -> Vec<f64> {
            let mut p: Vec<f64> = centroid
                .iter()
                .zip(&simplex[d].0)
                .map(|(c, w)| c + coef * (c - w))
                .collect();
            project(&mut p);
            p
        };
        let reflected = toward(c_refl);
        let fr = eval(&reflected, &mut evals);
        if fr < simplex[0].1 {
            let expanded = toward(c_refl * c_exp);
            let fe = eval(&expanded, &mut evals);
            simplex[d] = if fe < fr { (expanded, fe) } else { (reflected, fr) };
        } else if fr < simplex[d - 1].1 {
            simplex[d] = (reflected, fr);
        } else {
            let (candidate, fc) = if fr < simplex[d].1 {
                let p = toward(c_refl * c_con);
                let v = eval(&p, &mut evals);
                (p, v)
            } else {
                let p = toward(-c_con);
                let v = eval(&p, &mut evals);
                (p, v)
            };
            if fc < simplex[d].1.min(fr) {
                simplex[d] = (candidate, fc);
            } else {
                let best = simplex[0].0.clone();
                for (p, v) in simplex[1..].iter_mut() {
                    for (x, b) in p.iter_mut().zip(&best) {
                        *x = b + c_shr * (*x - b);
                    }
                    *v = eval(p, &mut evals);
                }
            }
        }
    }
    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    let (x, value) = simplex.swap_remove(0);
    NelderMeadResult {
        x,
        value,
        evals,
        converged,
    }
}

const PRIMES: [u32; 64] = [
    2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89,
    97, 101, 103, 107, 109, 113, 127, 131, 137, 139, 149, 151, 157, 163, 167, 173, 179, 181, 191,
    193, 197, 199, 211, 223, 227, 229, 233, 239, 241, 251, 257, 263, 269, 271, 277, 281, 283, 293, 307,
    311,
];

fn radical_inverse(mut index: u64, base: u32) -> f64 {
    let b = u64::from(base);
    let inv = 1.0 / base as f64;
    let mut factor = inv;
    let mut out = 0.0;
    while index > 0 {
        out += (index % b) as f64 * factor;
        index /= b;
        factor *= inv;
    }
    out
}

/// Halton points in `[0, 1)^dim` with a seeded Cranley–Patterson shift.
/// Point `i` depends only on `(seed, dim, i)`, so prefixes are stable as
/// the number of points grows.
#[derive(Debug, Clone)]
pub struct ShiftedHalton {
    shift: Vec<f64>,
}

impl ShiftedHalton {
    pub const MAX_DIM: usize = PRIMES.len();

    pub fn new(dim: usize, seed: u64) -> Self {
        assert!(dim <= Self::MAX_DIM, "Halton dimension {dim} exceeds {}", Self::MAX_DIM);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Self {
            shift: (0..dim).map(|_| rng.gen::<f64>()).collect(),
        }
    }

    pub fn point(&self, index: usize) -> Vec<f64> {
        self.shift
            .iter()
            .zip(PRIMES)
            .map(|(s, p)| (radical_inverse(index as u64 + 1, p) + s).fract())
            .collect()
    }
}
