//! The flexible bivariate beta distribution.
//!
//! `(U1, U2, U3, U4) ~ Dirichlet(alpha)` and the observed pair is
//! `X = U1 + U2`, `Y = U1 + U3`. The joint density of `(X, Y)` has no closed
//! form; it is a one-dimensional integral over `u1` on
//! `(max(0, x + y - 1), min(x, y))`, evaluated in [`quadrature`].

mod quadrature;

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

pub use quadrature::{DensityTable, QuadratureConfig, LOG_PDF_FLOOR};

/// Smallest admissible shape parameter.
pub const ALPHA_MIN: f64 = 1e-3;
/// Largest admissible shape parameter.
pub const ALPHA_MAX: f64 = 50.0;

/// Nudge applied to sampled coordinates that round onto the boundary.
const BOUNDARY_NUDGE: f64 = 1e-12;

/// The four Dirichlet shape parameters of one component.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BetaParams([f64; 4]);

impl BetaParams {
    pub fn new(alpha: [f64; 4]) -> Result<Self> {
        for (index, &value) in alpha.iter().enumerate() {
            if !(ALPHA_MIN..=ALPHA_MAX).contains(&value) {
                return Err(Error::AlphaOutOfBounds {
                    index,
                    value,
                    min: ALPHA_MIN,
                    max: ALPHA_MAX,
                });
            }
        }
        Ok(Self(alpha))
    }

    /// Clamps each entry into `[ALPHA_MIN, ALPHA_MAX]`. NaN maps to `ALPHA_MIN`.
    pub fn clamped(alpha: [f64; 4]) -> Self {
        Self(alpha.map(|a| {
            if a.is_nan() {
                ALPHA_MIN
            } else {
                a.clamp(ALPHA_MIN, ALPHA_MAX)
            }
        }))
    }

    pub fn alpha(&self) -> [f64; 4] {
        self.0
    }

    pub fn sum(&self) -> f64 {
        self.0.iter().sum()
    }

    /// `log B(alpha)`; see [`log_beta_norm`].
    pub fn log_norm(&self) -> f64 {
        log_beta_norm(self)
    }
}

/// A point strictly inside the unit square.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point2 {
    x: f64,
    y: f64,
}

impl Point2 {
    pub fn new(x: f64, y: f64) -> Result<Self> {
        let inside = |v: f64| v > 0.0 && v < 1.0;
        if inside(x) && inside(y) {
            Ok(Self { x, y })
        } else {
            Err(Error::PointOutOfDomain { x, y })
        }
    }

    pub fn x(&self) -> f64 {
        self.x
    }

    pub fn y(&self) -> f64 {
        self.y
    }
}

/// `log B(alpha) = sum_i lgamma(alpha_i) - lgamma(sum_i alpha_i)`.
pub fn log_beta_norm(params: &BetaParams) -> f64 {
    let a = params.alpha();
    a.iter().map(|&v| libm::lgamma(v)).sum::<f64>() - libm::lgamma(params.sum())
}

/// Range of `u1` over which the density integrand is positive.
pub fn support_interval(p: Point2) -> (f64, f64) {
    ((p.x + p.y - 1.0).max(0.0), p.x.min(p.y))
}

/// Log-density at `p`, evaluated by tanh-sinh quadrature.
pub fn log_pdf(params: &BetaParams, p: Point2, cfg: &QuadratureConfig) -> Result<f64> {
    let frame = quadrature::Frame::new(p);
    quadrature::log_density(&frame, &[], params, cfg)
}

/// `(E[X], E[Y])`.
pub fn mean(params: &BetaParams) -> (f64, f64) {
    let [a1, a2, a3, _] = params.alpha();
    let s = params.sum();
    ((a1 + a2) / s, (a1 + a3) / s)
}

/// `Cov(X, Y) = (a1 a4 - a2 a3) / (s^2 (s + 1))`.
pub fn covariance_xy(params: &BetaParams) -> f64 {
    let [a1, a2, a3, a4] = params.alpha();
    let s = params.sum();
    (a1 * a4 - a2 * a3) / (s * s * (s + 1.0))
}

/// `(Var X, Var Y)`; both marginals are beta distributed.
pub fn variance(params: &BetaParams) -> (f64, f64) {
    let (mx, my) = mean(params);
    let s1 = params.sum() + 1.0;
    (mx * (1.0 - mx) / s1, my * (1.0 - my) / s1)
}

/// Draws one point through the Dirichlet construction.
pub fn sample_one<R: Rng + ?Sized>(params: &BetaParams, rng: &mut R) -> Point2 {
    let a = params.alpha();
    let lg = a.map(|shape| log_gamma_variate(shape, rng));
    let m = lg.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let w = lg.map(|l| (l - m).exp());
    let total: f64 = w.iter().sum();
    let u = w.map(|v| v / total);
    let clamp = |v: f64| {
        if v <= 0.0 {
            BOUNDARY_NUDGE
        } else if v >= 1.0 {
            1.0 - BOUNDARY_NUDGE
        } else {
            v
        }
    };
    Point2 {
        x: clamp(u[0] + u[1]),
        y: clamp(u[0] + u[2]),
    }
}

/// `ln G` for `G ~ Gamma(shape, 1)`.
///
/// Marsaglia-Tsang squeeze/rejection for `shape >= 1`; smaller shapes use
/// `G(shape) = G(shape + 1) * U^(1 / shape)`, kept in log space because
/// `U^(1 / shape)` underflows for shapes near `ALPHA_MIN`.
pub fn log_gamma_variate<R: Rng + ?Sized>(shape: f64, rng: &mut R) -> f64 {
    if shape < 1.0 {
        let u = open_unit(rng);
        return log_gamma_variate(shape + 1.0, rng) + u.ln() / shape;
    }
    let d = shape - 1.0 / 3.0;
    let c = 1.0 / (9.0 * d).sqrt();
    loop {
        let z: f64 = rng.sample(StandardNormal);
        let v = 1.0 + c * z;
        if v <= 0.0 {
            continue;
        }
        let v = v * v * v;
        let u = open_unit(rng);
        let z2 = z * z;
        if u < 1.0 - 0.0331 * z2 * z2 || u.ln() < 0.5 * z2 + d * (1.0 - v + v.ln()) {
            return d.ln() + v.ln();
        }
    }
}

/// Uniform on `(0, 1]`.
fn open_unit<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    1.0 - rng.random::<f64>()
}
