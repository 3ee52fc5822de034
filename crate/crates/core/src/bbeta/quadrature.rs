//! Tanh-sinh quadrature for the one-dimensional density integral.
//!
//! For a point `(x, y)` the density is an integral over `u` on
//! `(max(0, x + y - 1), min(x, y))` of a product of four powers. Every factor
//! is a distance from one interval endpoint plus a non-negative offset, so
//! after the substitution `u = mid + half * tanh(pi/2 * sinh(t))` all node
//! quantities can be formed in log space from `log(1 - |tanh|)`, which never
//! underflows. A node's log-integrand is then linear in the shape parameters:
//!
//! ```text
//! l_k(alpha) = log w_k + sum_j (alpha_j - 1) * log f_kj
//! ```
//!
//! [`DensityTable`] stores `log w_k` and `log f_kj` for a fixed point so that
//! repeated evaluations under different parameters reduce to a dot product
//! and a streaming log-sum-exp.

use std::f64::consts::{FRAC_PI_2, LN_2};

use crate::bbeta::{BetaParams, Point2, ALPHA_MIN};
use crate::error::{Error, Result};

/// Largest `|t|` ever sampled. Far enough that the integrand has decayed by
/// `exp(-TAIL_MARGIN)` even when the local endpoint exponent is `ALPHA_MIN`.
const T_MAX: f64 = 10.5;
const TAIL_MARGIN: f64 = 50.0;
/// Nodes with `|t|` below this are always used.
const T_FLOOR: f64 = 3.0;
/// First level at which successive estimates are compared.
const FIRST_CHECK_LEVEL: usize = 2;
/// Offset shared by two factors that would vanish at the same endpoint
/// (points with `x == y` or `x + y == 1`). Without it the integral diverges
/// there whenever the two exponents sum below one.
const RIDGE_OFFSET: f64 = 1e-12;
/// Log-density floor; values below this are saturated.
pub const LOG_PDF_FLOOR: f64 = -745.0;

/// Refinement depth and stopping tolerances for the density integral.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureConfig {
    /// Number of step-halving levels; level `j` uses step `2^-j`.
    pub levels: usize,
    /// Absolute tolerance on the density value.
    pub abs_tol: f64,
    /// Relative tolerance on the integral.
    pub rel_tol: f64,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            levels: 10,
            abs_tol: 1e-10,
            rel_tol: 1e-8,
        }
    }
}

impl QuadratureConfig {
    pub fn validate(&self) -> Result<()> {
        if self.levels < 3 {
            return Err(Error::InvalidConfig(format!(
                "quadrature levels must be >= 3, got {}",
                self.levels
            )));
        }
        if !(self.abs_tol > 0.0) || !(self.rel_tol > 0.0) {
            return Err(Error::InvalidConfig(
                "quadrature tolerances must be positive".into(),
            ));
        }
        Ok(())
    }
}

/// Integration interval and factor offsets for one point.
///
/// Factors 0 (`u`) and 3 (`1 - x - y + u`) are measured from the lower
/// endpoint; factors 1 (`x - u`) and 2 (`y - u`) from the upper endpoint.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Frame {
    log_half: f64,
    /// `ln(offset)` per factor, or `None` when the factor vanishes at its endpoint.
    log_offset: [Option<f64>; 4],
}

impl Frame {
    pub(crate) fn new(p: Point2) -> Self {
        let (x, y) = (p.x(), p.y());
        let s = x + y - 1.0;
        let (lo, mut off0, mut off3) = if s > 0.0 { (s, s, 0.0) } else { (0.0, 0.0, -s) };
        let (hi, mut off1, mut off2) = if x <= y { (x, 0.0, y - x) } else { (y, x - y, 0.0) };
        if off0 == 0.0 && off3 == 0.0 {
            off0 = 0.5 * RIDGE_OFFSET;
            off3 = 0.5 * RIDGE_OFFSET;
        }
        if off1 == 0.0 && off2 == 0.0 {
            off1 = 0.5 * RIDGE_OFFSET;
            off2 = 0.5 * RIDGE_OFFSET;
        }
        let log_off = |o: f64| if o > 0.0 { Some(o.ln()) } else { None };
        Frame {
            log_half: (0.5 * (hi - lo)).ln(),
            log_offset: [log_off(off0), log_off(off1), log_off(off2), log_off(off3)],
        }
    }

    /// Smallest local power (including the measure) at either endpoint.
    /// Decides how far into the tails the nodes must reach.
    fn endpoint_power(&self, a: &[f64; 4]) -> f64 {
        let vanish = |k: usize| self.log_offset[k].is_none();
        let side = |i: usize, j: usize| match (vanish(i), vanish(j)) {
            (true, false) => a[i],
            (false, true) => a[j],
            // no vanishing factor: decays like the measure alone
            _ => 1.0,
        };
        side(0, 3).min(side(1, 2)).max(ALPHA_MIN)
    }

    fn cutoff(&self, a: &[f64; 4]) -> f64 {
        (TAIL_MARGIN / (FRAC_PI_2 * self.endpoint_power(a)))
            .ln()
            .clamp(T_FLOOR, T_MAX)
    }

    /// Both nodes at `+t` and `-t` (just one when `t == 0`).
    fn push_nodes(&self, t: f64, out: &mut Vec<Node>) {
        let v = FRAC_PI_2 * t.sinh();
        let e = (-2.0 * v).exp();
        let l1pe = e.ln_1p();
        // log(1 - tanh v) and log(1 + tanh v) for v >= 0
        let log_near = LN_2 - 2.0 * v - l1pe;
        let log_far = LN_2 - l1pe;
        let log_cosh_v = v + l1pe - LN_2;
        let log_weight = (FRAC_PI_2 * t.cosh()).ln() - 2.0 * log_cosh_v + self.log_half;

        let mut push = |log_d_lo: f64, log_d_hi: f64| {
            let mut log_factor = [0.0; 4];
            for (k, lf) in log_factor.iter_mut().enumerate() {
                let log_d = if k == 0 || k == 3 { log_d_lo } else { log_d_hi };
                *lf = match self.log_offset[k] {
                    None => log_d,
                    Some(lo) => log_add_exp(lo, log_d),
                };
            }
            out.push(Node {
                abs_t: t,
                log_weight,
                log_factor,
            });
        };
        // t > 0 approaches the upper endpoint.
        push(self.log_half + log_far, self.log_half + log_near);
        if t > 0.0 {
            push(self.log_half + log_near, self.log_half + log_far);
        }
    }

    /// Nodes added at refinement level `level`, ordered by `|t|`.
    pub(crate) fn level_nodes(&self, level: usize) -> Vec<Node> {
        let mut out = Vec::new();
        if level == 0 {
            let mut k = 0.0;
            while k <= T_MAX {
                self.push_nodes(k, &mut out);
                k += 1.0;
            }
        } else {
            let h = (0.5f64).powi(level as i32);
            let mut m = 1u64;
            loop {
                let t = m as f64 * h;
                if t > T_MAX {
                    break;
                }
                self.push_nodes(t, &mut out);
                m += 2;
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct Node {
    abs_t: f64,
    log_weight: f64,
    log_factor: [f64; 4],
}

fn log_add_exp(a: f64, b: f64) -> f64 {
    let (m, n) = if a >= b { (a, b) } else { (b, a) };
    m + (n - m).exp().ln_1p()
}

/// Streaming log-sum-exp accumulator.
#[derive(Debug, Clone, Copy)]
struct LogSum {
    max: f64,
    sum: f64,
}

impl LogSum {
    fn new() -> Self {
        Self {
            max: f64::NEG_INFINITY,
            sum: 0.0,
        }
    }

    #[inline]
    fn push(&mut self, l: f64) {
        if l > self.max {
            self.sum = self.sum * (self.max - l).exp() + 1.0;
            self.max = l;
        } else {
            self.sum += (l - self.max).exp();
        }
    }

    fn value(&self) -> f64 {
        self.max + self.sum.ln()
    }
}

/// Log-density from a frame, optionally reusing precomputed node levels.
pub(crate) fn log_density(
    frame: &Frame,
    cached: &[Vec<Node>],
    params: &BetaParams,
    cfg: &QuadratureConfig,
) -> Result<f64> {
    let a = params.alpha();
    let exps = [a[0] - 1.0, a[1] - 1.0, a[2] - 1.0, a[3] - 1.0];
    let log_norm = params.log_norm();
    let cutoff = frame.cutoff(&a);

    let mut acc = LogSum::new();
    let mut prev = f64::NAN;
    let mut rel_change = f64::INFINITY;
    let mut scratch;
    for level in 0..cfg.levels {
        let nodes: &[Node] = match cached.get(level) {
            Some(n) => n,
            None => {
                scratch = frame.level_nodes(level);
                &scratch
            }
        };
        for n in nodes {
            if n.abs_t > cutoff {
                break;
            }
            let l = n.log_weight
                + exps[0] * n.log_factor[0]
                + exps[1] * n.log_factor[1]
                + exps[2] * n.log_factor[2]
                + exps[3] * n.log_factor[3];
            acc.push(l);
        }
        let est = acc.value() - level as f64 * LN_2 - log_norm;
        if level >= FIRST_CHECK_LEVEL {
            rel_change = (est - prev).exp_m1().abs();
            let abs_change = (est.exp() - prev.exp()).abs();
            if rel_change <= cfg.rel_tol || abs_change <= cfg.abs_tol {
                return Ok(est.max(LOG_PDF_FLOOR));
            }
        }
        prev = est;
    }
    Err(Error::QuadratureNotConverged {
        levels: cfg.levels,
        rel_change,
    })
}

/// Precomputed quadrature nodes for one data point.
///
/// Evaluating [`DensityTable::log_pdf`] gives bitwise the same value as
/// [`crate::bbeta::log_pdf`] for the same point; it only skips rebuilding the
/// first `cached_levels` node sets.
#[derive(Debug, Clone)]
pub struct DensityTable {
    point: Point2,
    frame: Frame,
    levels: Vec<Vec<Node>>,
}

impl DensityTable {
    /// Default number of levels kept in memory per point.
    pub const DEFAULT_CACHED_LEVELS: usize = 5;

    pub fn new(point: Point2, cached_levels: usize) -> Self {
        let frame = Frame::new(point);
        let levels = (0..cached_levels).map(|l| frame.level_nodes(l)).collect();
        Self {
            point,
            frame,
            levels,
        }
    }

    pub fn point(&self) -> Point2 {
        self.point
    }

    pub fn log_pdf(&self, params: &BetaParams, cfg: &QuadratureConfig) -> Result<f64> {
        log_density(&self.frame, &self.levels, params, cfg)
    }
}
