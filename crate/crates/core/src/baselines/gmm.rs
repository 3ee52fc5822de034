use std::f64::consts::PI;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::kmeans::{kmeans_fit_with, kmeans_predict};
use crate::emfit::DataMatrix;
use crate::error::{Error, Result};
use crate::util::log_sum_exp;

/// Added to every covariance diagonal after the M-step.
pub const COVARIANCE_REG: f64 = 1e-6;
pub const DEFAULT_EPOCHS: usize = 200;
pub const DEFAULT_TOL: f64 = 1e-4;

/// Symmetric 2x2 matrix `[[xx, xy], [xy, yy]]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cov2 {
    pub xx: f64,
    pub xy: f64,
    pub yy: f64,
}

impl Cov2 {
    pub fn det(&self) -> f64 {
        self.xx * self.yy - self.xy * self.xy
    }

    pub fn eigenvalues(&self) -> (f64, f64) {
        let tr = 0.5 * (self.xx + self.yy);
        let disc = (0.25 * (self.xx - self.yy).powi(2) + self.xy * self.xy).sqrt();
        (tr - disc, tr + disc)
    }

    /// `log N(p | mean, self)`.
    fn log_normal(&self, mean: [f64; 2], p: [f64; 2]) -> f64 {
        let det = self.det();
        let dx = p[0] - mean[0];
        let dy = p[1] - mean[1];
        let maha = (self.yy * dx * dx - 2.0 * self.xy * dx * dy + self.xx * dy * dy) / det;
        -0.5 * maha - 0.5 * det.ln() - (2.0 * PI).ln()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GaussianMixtureModel {
    pub weights: Vec<f64>,
    pub means: Vec<[f64; 2]>,
    pub covariances: Vec<Cov2>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GmmFit {
    pub model: GaussianMixtureModel,
    pub log_likelihood_trace: Vec<f64>,
    pub converged: bool,
}

impl GaussianMixtureModel {
    pub fn k(&self) -> usize {
        self.weights.len()
    }

    /// Per-point log joint `log pi_c + log N(x | c)`.
    fn log_joint(&self, p: [f64; 2], out: &mut [f64]) {
        for (c, o) in out.iter_mut().enumerate() {
            *o = self.weights[c].ln() + self.covariances[c].log_normal(self.means[c], p);
        }
    }

    /// Responsibilities (row-major `n x k`) and the total log-likelihood.
    pub fn responsibilities(&self, data: &DataMatrix) -> (Vec<Vec<f64>>, f64) {
        let k = self.k();
        let mut buf = vec![0.0; k];
        let mut ll = 0.0;
        let rows = data
            .rows()
            .map(|p| {
                self.log_joint(p, &mut buf);
                let lse = log_sum_exp(&buf);
                ll += lse;
                buf.iter().map(|l| (l - lse).exp()).collect()
            })
            .collect();
        (rows, ll)
    }

    pub fn log_likelihood(&self, data: &DataMatrix) -> f64 {
        self.responsibilities(data).1
    }
}

fn m_step(data: &DataMatrix, resp: &[Vec<f64>], k: usize) -> GaussianMixtureModel {
    let n = data.len() as f64;
    let mut weights = vec![0.0; k];
    let mut means = vec![[0.0; 2]; k];
    let mut covariances = Vec::with_capacity(k);
    for c in 0..k {
        let nk: f64 = resp.iter().map(|r| r[c]).sum::<f64>().max(f64::MIN_POSITIVE);
        let mut m = [0.0; 2];
        for (r, p) in resp.iter().zip(data.rows()) {
            m[0] += r[c] * p[0];
            m[1] += r[c] * p[1];
        }
        m = [m[0] / nk, m[1] / nk];
        let (mut xx, mut xy, mut yy) = (0.0, 0.0, 0.0);
        for (r, p) in resp.iter().zip(data.rows()) {
            let dx = p[0] - m[0];
            let dy = p[1] - m[1];
            xx += r[c] * dx * dx;
            xy += r[c] * dx * dy;
            yy += r[c] * dy * dy;
        }
        weights[c] = nk / n;
        means[c] = m;
        covariances.push(Cov2 {
            xx: xx / nk + COVARIANCE_REG,
            xy: xy / nk,
            yy: yy / nk + COVARIANCE_REG,
        });
    }
    let total: f64 = weights.iter().sum();
    for w in &mut weights {
        *w /= total;
    }
    GaussianMixtureModel {
        weights,
        means,
        covariances,
    }
}

/// EM for a full-covariance Gaussian mixture, initialized from k-means.
///
/// A step that would lower the log-likelihood (possible only through the
/// covariance regularization) ends the fit at the previous parameters.
pub fn gmm_fit(data: &DataMatrix, k: usize, seed: u64, epochs: usize, tol: f64) -> Result<GmmFit> {
    if k == 0 {
        return Err(Error::InvalidConfig("GMM needs at least one component".into()));
    }
    if data.len() < k {
        return Err(Error::TooFewPoints {
            points: data.len(),
            clusters: k,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let km = kmeans_fit_with(data, k, &mut rng, super::kmeans::DEFAULT_ITERS)?;
    let hard = kmeans_predict(&km, data);
    let init_resp: Vec<Vec<f64>> = hard
        .iter()
        .map(|&l| (0..k).map(|c| if c == l { 1.0 } else { 0.0 }).collect())
        .collect();
    let mut model = m_step(data, &init_resp, k);
    let (mut resp, mut ll) = model.responsibilities(data);
    let mut trace = vec![ll];
    let mut converged = false;
    for _ in 0..epochs {
        let next = m_step(data, &resp, k);
        let (next_resp, next_ll) = next.responsibilities(data);
        if !(next_ll >= ll) {
            converged = true;
            break;
        }
        let delta = next_ll - ll;
        model = next;
        resp = next_resp;
        ll = next_ll;
        trace.push(ll);
        if delta < tol {
            converged = true;
            break;
        }
    }
    Ok(GmmFit {
        model,
        log_likelihood_trace: trace,
        converged,
    })
}

/// Highest-responsibility component per point; ties go to the lower index.
pub fn gmm_predict(model: &GaussianMixtureModel, data: &DataMatrix) -> Vec<usize> {
    let mut buf = vec![0.0; model.k()];
    data.rows()
        .map(|p| {
            model.log_joint(p, &mut buf);
            crate::util::argmax(&buf)
        })
        .collect()
}
