//! Box-constrained maximization over four parameters.
//!
//! Projected limited-memory quasi-Newton with central finite-difference
//! gradients and a backtracking Armijo search along the projected path.
//! Every trial point is projected onto the box before it is evaluated.

use std::collections::VecDeque;

use crate::bbeta::{ALPHA_MAX, ALPHA_MIN};
use crate::error::{Error, Result};

pub type Vec4 = [f64; 4];

const HISTORY: usize = 5;
const ARMIJO: f64 = 1e-4;
const MAX_BACKTRACKS: usize = 50;
const MIN_STEP: f64 = 1e-12;

pub const DEFAULT_MAX_ITERS: usize = 100;
pub const DEFAULT_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bounds4 {
    lower: Vec4,
    upper: Vec4,
}

impl Bounds4 {
    pub fn new(lower: Vec4, upper: Vec4) -> Result<Self> {
        for j in 0..4 {
            if !(lower[j] < upper[j]) {
                return Err(Error::InvalidConfig(format!(
                    "bound {j}: lower {} is not below upper {}",
                    lower[j], upper[j]
                )));
            }
        }
        Ok(Self { lower, upper })
    }

    pub fn lower(&self) -> Vec4 {
        self.lower
    }

    pub fn upper(&self) -> Vec4 {
        self.upper
    }

    pub fn contains(&self, v: &Vec4) -> bool {
        (0..4).all(|j| v[j] >= self.lower[j] && v[j] <= self.upper[j])
    }

    pub fn project(&self, v: &Vec4) -> Vec4 {
        std::array::from_fn(|j| v[j].clamp(self.lower[j], self.upper[j]))
    }
}

impl Default for Bounds4 {
    fn default() -> Self {
        Self {
            lower: [ALPHA_MIN; 4],
            upper: [ALPHA_MAX; 4],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimReport {
    pub argmax: Vec4,
    pub value: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Finite-difference step for coordinate value `v`.
fn fd_step(v: f64) -> f64 {
    (1e-6 * v.abs()).max(1e-6)
}

/// Evaluates, mapping any non-finite value to `-inf`.
fn eval<F: FnMut(&Vec4) -> f64>(f: &mut F, v: &Vec4) -> f64 {
    let y = f(v);
    if y.is_finite() {
        y
    } else {
        f64::NEG_INFINITY
    }
}

/// Central-difference gradient; stencil points are kept inside `bounds`
/// (one-sided at an active bound).
pub fn fd_gradient<F: FnMut(&Vec4) -> f64>(mut f: F, at: &Vec4, bounds: &Bounds4) -> Vec4 {
    let mut g = [0.0; 4];
    for j in 0..4 {
        let h = fd_step(at[j]);
        let mut plus = *at;
        let mut minus = *at;
        plus[j] = (at[j] + h).min(bounds.upper[j]);
        minus[j] = (at[j] - h).max(bounds.lower[j]);
        let fp = eval(&mut f, &plus);
        let fm = eval(&mut f, &minus);
        let d = (fp - fm) / (plus[j] - minus[j]);
        g[j] = if d.is_finite() { d } else { 0.0 };
    }
    g
}

fn dot(a: &Vec4, b: &Vec4) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn inf_norm(a: &Vec4) -> f64 {
    a.iter().fold(0.0, |m, v| m.max(v.abs()))
}

/// Which coordinates are pinned: at a bound with the gradient pushing outward.
fn blocked(x: &Vec4, g: &Vec4, b: &Bounds4) -> [bool; 4] {
    std::array::from_fn(|j| (x[j] <= b.lower[j] && g[j] < 0.0) || (x[j] >= b.upper[j] && g[j] > 0.0))
}

/// Maximizes `objective` over the box `bounds`, starting from `start`.
///
/// The returned point is never worse than `start`. Non-finite objective values
/// are treated as `-inf`, so such steps are always rejected.
pub fn maximize<F: FnMut(&Vec4) -> f64>(
    mut objective: F,
    start: Vec4,
    bounds: &Bounds4,
    max_iters: usize,
    tol: f64,
) -> Result<OptimReport> {
    if !bounds.contains(&start) {
        return Err(Error::InvalidConfig(format!("start {start:?} lies outside the bounds")));
    }
    let mut x = start;
    let mut fx = eval(&mut objective, &x);
    if !fx.is_finite() {
        return Err(Error::InvalidConfig(format!("objective is not finite at start {start:?}")));
    }

    // (s, y) pairs for the minimization of -f
    let mut memory: VecDeque<(Vec4, Vec4)> = VecDeque::with_capacity(HISTORY);
    let mut g = fd_gradient(&mut objective, &x, bounds);
    let mut steepest_scale: Option<f64> = None;

    for iter in 0..max_iters {
        let pg: Vec4 = std::array::from_fn(|j| (x[j] + g[j]).clamp(bounds.lower[j], bounds.upper[j]) - x[j]);
        if inf_norm(&pg) < tol {
            return Ok(OptimReport {
                argmax: x,
                value: fx,
                iterations: iter,
                converged: true,
            });
        }

        let fixed = blocked(&x, &g, bounds);
        let mut d = two_loop(&memory, &g, &fixed);
        if !(dot(&d, &g) > 0.0) {
            memory.clear();
            d = std::array::from_fn(|j| if fixed[j] { 0.0 } else { g[j] });
        }

        let mut step = if memory.is_empty() {
            *steepest_scale.get_or_insert_with(|| 1.0 / inf_norm(&d).max(1e-300))
        } else {
            1.0
        };

        let mut accepted = None;
        for attempt in 0..MAX_BACKTRACKS {
            let trial = bounds.project(&std::array::from_fn(|j| x[j] + step * d[j]));
            let s: Vec4 = std::array::from_fn(|j| trial[j] - x[j]);
            if inf_norm(&s) < MIN_STEP {
                break;
            }
            let ft = eval(&mut objective, &trial);
            if ft >= fx + ARMIJO * dot(&g, &s) && ft >= fx {
                accepted = Some((trial, ft, s, attempt));
                break;
            }
            step *= 0.5;
        }

        let Some((trial, ft, s, attempt)) = accepted else {
            // no improving step above MIN_STEP
            return Ok(OptimReport {
                argmax: x,
                value: fx,
                iterations: iter + 1,
                converged: true,
            });
        };

        if memory.is_empty() {
            steepest_scale = Some(if attempt == 0 { step * 2.0 } else { step });
        }

        let g_new = fd_gradient(&mut objective, &trial, bounds);
        let y: Vec4 = std::array::from_fn(|j| g[j] - g_new[j]);
        let sy = dot(&s, &y);
        if sy > 1e-12 * dot(&y, &y).max(f64::MIN_POSITIVE) && sy > 0.0 {
            if memory.len() == HISTORY {
                memory.pop_front();
            }
            memory.push_back((s, y));
        }
        x = trial;
        fx = ft;
        g = g_new;
    }

    Ok(OptimReport {
        argmax: x,
        value: fx,
        iterations: max_iters,
        converged: false,
    })
}

/// L-BFGS ascent direction `H * g` restricted to the free coordinates.
fn two_loop(memory: &VecDeque<(Vec4, Vec4)>, g: &Vec4, fixed: &[bool; 4]) -> Vec4 {
    let mask = |v: &Vec4| -> Vec4 { std::array::from_fn(|j| if fixed[j] { 0.0 } else { v[j] }) };
    let mut q = mask(g);
    if memory.is_empty() {
        return q;
    }
    let mut alphas = Vec::with_capacity(memory.len());
    for (s, y) in memory.iter().rev() {
        let (s, y) = (mask(s), mask(y));
        let sy = dot(&s, &y);
        if sy <= 0.0 {
            alphas.push(0.0);
            continue;
        }
        let a = dot(&s, &q) / sy;
        for j in 0..4 {
            q[j] -= a * y[j];
        }
        alphas.push(a);
    }
    let (s, y) = memory.back().map(|(s, y)| (mask(s), mask(y))).unwrap();
    let yy = dot(&y, &y);
    let gamma = if yy > 0.0 { dot(&s, &y) / yy } else { 1.0 };
    let gamma = if gamma > 0.0 { gamma } else { 1.0 };
    for v in q.iter_mut() {
        *v *= gamma;
    }
    for ((s, y), a) in memory.iter().zip(alphas.iter().rev()) {
        let (s, y) = (mask(s), mask(y));
        let sy = dot(&s, &y);
        if sy <= 0.0 {
            continue;
        }
        let b = dot(&y, &q) / sy;
        for j in 0..4 {
            q[j] += (a - b) * s[j];
        }
    }
    mask(&q)
}
