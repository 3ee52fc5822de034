//! The bivariate beta mixture: density, EM fitting, prediction, sampling.
//!
//! Each epoch runs an E-step (posterior responsibilities and the observed-data
//! log-likelihood from the same density matrix), tests for convergence, then
//! updates the mixing weights in closed form and each component's shape
//! parameters by numerical maximization of its weighted log-likelihood.

mod document;

use log::{debug, warn};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::baselines::{kmeans_fit_with, kmeans_predict};
use crate::bbeta::{self, BetaParams, DensityTable, Point2, QuadratureConfig, LOG_PDF_FLOOR};
use crate::error::{Error, Result};
use crate::optim::{self, Bounds4};
use crate::util::{argmax, derive_seed, log_sum_exp};

pub use document::{load, save, FORMAT_VERSION};

/// Tolerance on the mixing-weight sum.
pub const WEIGHT_SUM_TOL: f64 = 1e-12;
/// Concentration `sum(alpha)` of the product-form seed.
pub const SEED_CONCENTRATION: f64 = 4.0;
/// A cluster whose total responsibility falls below this fraction of `N` is re-seeded.
pub const EMPTY_CLUSTER_FRACTION: f64 = 1e-6;
/// Responsibilities below this are left out of a component's M-step objective.
const NEGLIGIBLE_RESPONSIBILITY: f64 = 1e-14;

/// `N` points inside the open unit square.
#[derive(Debug, Clone, PartialEq)]
pub struct DataMatrix {
    points: Vec<Point2>,
}

impl DataMatrix {
    pub fn new(points: Vec<Point2>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidData("data matrix is empty".into()));
        }
        Ok(Self { points })
    }

    pub fn from_rows(rows: &[[f64; 2]]) -> Result<Self> {
        let points = rows
            .iter()
            .map(|r| Point2::new(r[0], r[1]))
            .collect::<Result<Vec<_>>>()?;
        Self::new(points)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Point2] {
        &self.points
    }

    pub fn rows(&self) -> impl Iterator<Item = [f64; 2]> + '_ {
        self.points.iter().map(|p| [p.x(), p.y()])
    }
}

/// Mixing weights and per-cluster shape parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct MixtureModel {
    weights: Vec<f64>,
    components: Vec<BetaParams>,
}

impl MixtureModel {
    pub fn new(weights: Vec<f64>, components: Vec<BetaParams>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::InvalidModel("a model needs at least one cluster".into()));
        }
        if weights.len() != components.len() {
            return Err(Error::InvalidModel(format!(
                "{} weights for {} components",
                weights.len(),
                components.len()
            )));
        }
        if let Some((i, w)) = weights.iter().enumerate().find(|(_, w)| !(w.is_finite() && **w >= 0.0)) {
            return Err(Error::InvalidModel(format!("weights[{i}] = {w} is not a probability")));
        }
        let sum: f64 = weights.iter().sum();
        if (sum - 1.0).abs() > WEIGHT_SUM_TOL {
            return Err(Error::InvalidModel(format!("weights sum to {sum}, not 1")));
        }
        Ok(Self { weights, components })
    }

    pub fn clusters(&self) -> usize {
        self.components.len()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn components(&self) -> &[BetaParams] {
        &self.components
    }

    /// Reorders clusters so that cluster `i` of the result is cluster `order[i]` of `self`.
    pub fn permuted(&self, order: &[usize]) -> Self {
        Self {
            weights: order.iter().map(|&i| self.weights[i]).collect(),
            components: order.iter().map(|&i| self.components[i]).collect(),
        }
    }
}

/// Posterior cluster memberships, `N x C` row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Responsibilities {
    gamma: Vec<f64>,
    clusters: usize,
    degenerate: Vec<usize>,
}

impl Responsibilities {
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let clusters = rows.first().map_or(0, |r| r.len());
        if clusters == 0 {
            return Err(Error::InvalidData("responsibilities need at least one row and column".into()));
        }
        let mut gamma = Vec::with_capacity(rows.len() * clusters);
        for (n, r) in rows.iter().enumerate() {
            if r.len() != clusters {
                return Err(Error::InvalidData(format!("row {n} has {} entries, expected {clusters}", r.len())));
            }
            let s: f64 = r.iter().sum();
            if (s - 1.0).abs() > 1e-9 || r.iter().any(|g| !(0.0..=1.0).contains(g)) {
                return Err(Error::InvalidData(format!("row {n} is not a probability vector")));
            }
            gamma.extend_from_slice(r);
        }
        Ok(Self {
            gamma,
            clusters,
            degenerate: Vec::new(),
        })
    }

    pub fn len(&self) -> usize {
        self.gamma.len() / self.clusters
    }

    pub fn is_empty(&self) -> bool {
        self.gamma.is_empty()
    }

    pub fn clusters(&self) -> usize {
        self.clusters
    }

    pub fn row(&self, n: usize) -> &[f64] {
        &self.gamma[n * self.clusters..(n + 1) * self.clusters]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.gamma.chunks_exact(self.clusters)
    }

    /// Points where every component density saturated at the floor; their
    /// rows were set to the uniform distribution.
    pub fn degenerate_points(&self) -> &[usize] {
        &self.degenerate
    }

    /// Hard labels; ties go to the lower cluster index.
    pub fn labels(&self) -> Vec<usize> {
        self.rows().map(argmax).collect()
    }

    fn column_sum(&self, c: usize) -> f64 {
        self.rows().map(|r| r[c]).sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitConfig {
    pub epochs: usize,
    /// Absolute tolerance on the change in total log-likelihood.
    pub conv_tol: f64,
    pub seed: u64,
    pub restarts: usize,
    pub quadrature: QuadratureConfig,
    /// Per-component optimizer iteration cap within one M-step.
    pub mstep_max_iters: usize,
    pub mstep_tol: f64,
    pub kmeans_iters: usize,
}

impl Default for FitConfig {
    fn default() -> Self {
        Self {
            epochs: 200,
            conv_tol: 1e-4,
            seed: 42,
            restarts: 3,
            quadrature: QuadratureConfig::default(),
            mstep_max_iters: optim::DEFAULT_MAX_ITERS,
            mstep_tol: optim::DEFAULT_TOL,
            kmeans_iters: crate::baselines::defaults::KMEANS_ITERS,
        }
    }
}

impl FitConfig {
    pub fn validate(&self) -> Result<()> {
        if self.epochs == 0 {
            return Err(Error::InvalidConfig("epochs must be >= 1".into()));
        }
        if !(self.conv_tol > 0.0) {
            return Err(Error::InvalidConfig("convergence tolerance must be positive".into()));
        }
        if self.restarts == 0 {
            return Err(Error::InvalidConfig("restarts must be >= 1".into()));
        }
        self.quadrature.validate()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitTrace {
    pub log_likelihood_per_epoch: Vec<f64>,
    pub epochs_run: usize,
    pub converged: bool,
    /// Epochs (0-based) in which a vanishing cluster was re-seeded.
    pub reseeded_epochs: Vec<usize>,
}

#[derive(Debug, Clone)]
pub struct FitResult {
    pub model: MixtureModel,
    pub responsibilities: Responsibilities,
    pub trace: FitTrace,
    /// Which restart produced the result.
    pub restart: usize,
}

/// Quadrature tables for a fixed data set, reused across every density
/// evaluation during a fit.
struct Evaluator {
    tables: Vec<DensityTable>,
    quad: QuadratureConfig,
}

impl Evaluator {
    fn new(data: &DataMatrix, quad: QuadratureConfig) -> Self {
        Self::with_levels(data, quad, DensityTable::DEFAULT_CACHED_LEVELS)
    }

    fn with_levels(data: &DataMatrix, quad: QuadratureConfig, levels: usize) -> Self {
        let tables = data.points().iter().map(|&p| DensityTable::new(p, levels)).collect();
        Self { tables, quad }
    }

    /// `N x C` matrix of `log BBe(x_n | theta_c)`.
    fn log_density_matrix(&self, model: &MixtureModel) -> Result<Vec<f64>> {
        let c_count = model.clusters();
        let mut out = Vec::with_capacity(self.tables.len() * c_count);
        for (n, table) in self.tables.iter().enumerate() {
            for (c, theta) in model.components.iter().enumerate() {
                let v = table.log_pdf(theta, &self.quad).map_err(|e| Error::Density {
                    point: n,
                    component: c,
                    source: Box::new(e),
                })?;
                out.push(v);
            }
        }
        Ok(out)
    }

    /// Responsibilities and total log-likelihood from one density pass.
    fn e_step(&self, model: &MixtureModel) -> Result<(Responsibilities, f64)> {
        let c_count = model.clusters();
        let dens = self.log_density_matrix(model)?;
        let log_w: Vec<f64> = model.weights.iter().map(|w| w.ln()).collect();
        let mut gamma = Vec::with_capacity(dens.len());
        let mut degenerate = Vec::new();
        let mut ll = 0.0;
        let mut joint = vec![0.0; c_count];
        for (n, row) in dens.chunks_exact(c_count).enumerate() {
            for c in 0..c_count {
                joint[c] = log_w[c] + row[c];
            }
            let lse = log_sum_exp(&joint);
            ll += lse;
            if row.iter().all(|&v| v <= LOG_PDF_FLOOR) {
                degenerate.push(n);
                gamma.extend(std::iter::repeat(1.0 / c_count as f64).take(c_count));
            } else {
                gamma.extend(joint.iter().map(|j| (j - lse).exp()));
            }
        }
        if !degenerate.is_empty() {
            warn!("{} points have negligible density under every component", degenerate.len());
        }
        Ok((
            Responsibilities {
                gamma,
                clusters: c_count,
                degenerate,
            },
            ll,
        ))
    }

    /// `sum_n w_n log BBe(x_n | theta)` over the listed points; `-inf` on failure.
    fn weighted_log_density(&self, members: &[(usize, f64)], theta: &BetaParams) -> f64 {
        let mut total = 0.0;
        for &(n, w) in members {
            match self.tables[n].log_pdf(theta, &self.quad) {
                Ok(v) => total += w * v,
                Err(_) => return f64::NEG_INFINITY,
            }
        }
        total
    }

    /// Mixture density per point, `log sum_c pi_c BBe(x_n | theta_c)`.
    fn point_log_likelihoods(&self, model: &MixtureModel) -> Result<Vec<f64>> {
        let c_count = model.clusters();
        let dens = self.log_density_matrix(model)?;
        Ok(dens
            .chunks_exact(c_count)
            .map(|row| {
                let joint: Vec<f64> = row.iter().zip(&model.weights).map(|(d, w)| w.ln() + d).collect();
                log_sum_exp(&joint)
            })
            .collect())
    }
}

/// Shape parameters whose mean is `(mx, my)` with zero covariance.
pub fn product_seed(mx: f64, my: f64) -> BetaParams {
    let s = SEED_CONCENTRATION;
    BetaParams::clamped([
        s * mx * my,
        s * mx * (1.0 - my),
        s * (1.0 - mx) * my,
        s * (1.0 - mx) * (1.0 - my),
    ])
}

fn check_fit_inputs(data: &DataMatrix, clusters: usize) -> Result<()> {
    if clusters == 0 {
        return Err(Error::InvalidConfig("need at least one cluster".into()));
    }
    if data.len() < clusters {
        return Err(Error::TooFewPoints {
            points: data.len(),
            clusters,
        });
    }
    Ok(())
}

/// Observed-data log-likelihood `sum_n log sum_c pi_c BBe(x_n | theta_c)`.
pub fn log_likelihood(model: &MixtureModel, data: &DataMatrix, quad: &QuadratureConfig) -> Result<f64> {
    Ok(Evaluator::with_levels(data, *quad, 0).e_step(model)?.1)
}

pub fn e_step(model: &MixtureModel, data: &DataMatrix, quad: &QuadratureConfig) -> Result<Responsibilities> {
    Ok(Evaluator::with_levels(data, *quad, 0).e_step(model)?.0)
}

/// `pi_c = mean_n gamma_{n,c}`, renormalized against rounding.
pub fn m_step_weights(resp: &Responsibilities) -> Vec<f64> {
    let n = resp.len() as f64;
    let mut w: Vec<f64> = (0..resp.clusters()).map(|c| resp.column_sum(c) / n).collect();
    let total: f64 = w.iter().sum();
    for v in &mut w {
        *v /= total;
    }
    w
}

/// Per-component weighted log-likelihood `Q_c(theta) = sum_n gamma_{n,c} log BBe(x_n | theta)`.
pub fn component_objective(
    data: &DataMatrix,
    resp: &Responsibilities,
    cluster: usize,
    theta: &BetaParams,
    quad: &QuadratureConfig,
) -> f64 {
    let ev = Evaluator::with_levels(data, *quad, 0);
    ev.weighted_log_density(&members(resp, cluster), theta)
}

fn members(resp: &Responsibilities, cluster: usize) -> Vec<(usize, f64)> {
    resp.rows()
        .enumerate()
        .filter_map(|(n, r)| (r[cluster] >= NEGLIGIBLE_RESPONSIBILITY).then_some((n, r[cluster])))
        .collect()
}

/// Updates every component's shape parameters against fixed responsibilities.
///
/// Weights are carried over from `model` unless a cluster is re-seeded, in
/// which case it takes one point's worth of weight from the others.
pub fn m_step_components(
    model: &MixtureModel,
    data: &DataMatrix,
    resp: &Responsibilities,
    cfg: &FitConfig,
) -> Result<MixtureModel> {
    let ev = Evaluator::new(data, cfg.quadrature);
    Ok(m_step_components_with(&ev, model, resp, cfg)?.0)
}

fn m_step_components_with(
    ev: &Evaluator,
    model: &MixtureModel,
    resp: &Responsibilities,
    cfg: &FitConfig,
) -> Result<(MixtureModel, Vec<usize>)> {
    let n = resp.len();
    let bounds = Bounds4::default();
    let mut components = model.components.clone();
    let mut empty = Vec::new();
    for c in 0..model.clusters() {
        if resp.column_sum(c) < EMPTY_CLUSTER_FRACTION * n as f64 {
            empty.push(c);
            continue;
        }
        let members = members(resp, c);
        let objective = |v: &[f64; 4]| match BetaParams::new(*v) {
            Ok(theta) => ev.weighted_log_density(&members, &theta),
            Err(_) => f64::NEG_INFINITY,
        };
        let start = components[c].alpha();
        let report = optim::maximize(objective, start, &bounds, cfg.mstep_max_iters, cfg.mstep_tol)?;
        debug!(
            "cluster {c}: Q {:.6} after {} iterations (converged: {})",
            report.value, report.iterations, report.converged
        );
        components[c] = BetaParams::new(report.argmax)?;
    }

    let mut weights = model.weights.clone();
    if !empty.is_empty() {
        let per_point = ev.point_log_likelihoods(model)?;
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| per_point[a].total_cmp(&per_point[b]).then(a.cmp(&b)));
        let share = 1.0 / n as f64;
        for (k, &c) in empty.iter().enumerate() {
            let p = ev.tables[order[k % n]].point();
            components[c] = product_seed(p.x(), p.y());
            warn!("cluster {c} lost its support; re-seeded at ({:.4}, {:.4})", p.x(), p.y());
        }
        let reseeded_mass = share * empty.len() as f64;
        let others: f64 = (0..weights.len()).filter(|c| !empty.contains(c)).map(|c| weights[c]).sum();
        for c in 0..weights.len() {
            weights[c] = if empty.contains(&c) {
                share
            } else if others > 0.0 {
                weights[c] * (1.0 - reseeded_mass) / others
            } else {
                (1.0 - reseeded_mass) / (weights.len() - empty.len()).max(1) as f64
            };
        }
        let total: f64 = weights.iter().sum();
        for w in &mut weights {
            *w /= total;
        }
    }
    Ok((MixtureModel { weights, components }, empty))
}

/// k-means hard assignments mapped to weights and product-form seeds.
pub fn initialize<R: Rng + ?Sized>(
    data: &DataMatrix,
    clusters: usize,
    kmeans_iters: usize,
    rng: &mut R,
) -> Result<MixtureModel> {
    check_fit_inputs(data, clusters)?;
    let km = kmeans_fit_with(data, clusters, rng, kmeans_iters)?;
    let labels = kmeans_predict(&km, data);
    let mut counts = vec![0usize; clusters];
    let mut sums = vec![[0.0f64; 2]; clusters];
    for (&l, p) in labels.iter().zip(data.rows()) {
        counts[l] += 1;
        sums[l][0] += p[0];
        sums[l][1] += p[1];
    }
    let n = data.len() as f64;
    let mut weights = Vec::with_capacity(clusters);
    let mut components = Vec::with_capacity(clusters);
    for c in 0..clusters {
        let (mx, my) = if counts[c] > 0 {
            (sums[c][0] / counts[c] as f64, sums[c][1] / counts[c] as f64)
        } else {
            (km.centroids[c][0], km.centroids[c][1])
        };
        // an empty k-means cluster still gets a sliver of weight
        weights.push(counts[c].max(1) as f64 / n);
        components.push(product_seed(mx, my));
    }
    let total: f64 = weights.iter().sum();
    for w in &mut weights {
        *w /= total;
    }
    MixtureModel::new(weights, components)
}

/// Runs EM from a given initial model.
pub fn fit_from(data: &DataMatrix, init: MixtureModel, cfg: &FitConfig) -> Result<FitResult> {
    cfg.validate()?;
    check_fit_inputs(data, init.clusters())?;
    let ev = Evaluator::new(data, cfg.quadrature);
    run_em(&ev, init, cfg, 0)
}

fn run_em(ev: &Evaluator, init: MixtureModel, cfg: &FitConfig, restart: usize) -> Result<FitResult> {
    let mut model = init;
    let mut trace = Vec::new();
    let mut reseeded_epochs = Vec::new();
    let mut old = f64::NEG_INFINITY;
    let mut converged = false;
    let mut resp;
    let mut epoch = 0;
    loop {
        let (r, ll) = ev.e_step(&model)?;
        resp = r;
        trace.push(ll);
        debug!("restart {restart} epoch {epoch}: log-likelihood {ll:.6}");
        if (ll - old).abs() < cfg.conv_tol {
            converged = true;
            break;
        }
        if epoch + 1 >= cfg.epochs {
            break;
        }
        old = ll;
        let weights = m_step_weights(&resp);
        let with_weights = MixtureModel {
            weights,
            components: model.components.clone(),
        };
        let (next, empty) = m_step_components_with(ev, &with_weights, &resp, cfg)?;
        if !empty.is_empty() {
            reseeded_epochs.push(epoch);
        }
        model = next;
        epoch += 1;
    }
    let epochs_run = trace.len();
    Ok(FitResult {
        model,
        responsibilities: resp,
        trace: FitTrace {
            log_likelihood_per_epoch: trace,
            epochs_run,
            converged,
            reseeded_epochs,
        },
        restart,
    })
}

/// Fits a `clusters`-component mixture; the best of `cfg.restarts` seeded runs wins.
pub fn fit(data: &DataMatrix, clusters: usize, cfg: &FitConfig) -> Result<FitResult> {
    cfg.validate()?;
    check_fit_inputs(data, clusters)?;
    let ev = Evaluator::new(data, cfg.quadrature);
    let mut best: Option<FitResult> = None;
    for r in 0..cfg.restarts {
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(cfg.seed, r as u64));
        let init = initialize(data, clusters, cfg.kmeans_iters, &mut rng)?;
        let result = run_em(&ev, init, cfg, r)?;
        let ll = *result.trace.log_likelihood_per_epoch.last().unwrap();
        debug!("restart {r}: final log-likelihood {ll:.6}");
        let better = match &best {
            None => true,
            Some(b) => ll > *b.trace.log_likelihood_per_epoch.last().unwrap(),
        };
        if better {
            best = Some(result);
        }
    }
    Ok(best.expect("at least one restart"))
}

/// Hard cluster labels (argmax responsibility, lowest index on ties).
pub fn predict(model: &MixtureModel, data: &DataMatrix, quad: &QuadratureConfig) -> Result<Vec<usize>> {
    Ok(e_step(model, data, quad)?.labels())
}

/// Draws `n` points and their generating cluster ids.
pub fn sample<R: Rng + ?Sized>(model: &MixtureModel, n: usize, rng: &mut R) -> Result<(DataMatrix, Vec<usize>)> {
    if n == 0 {
        return Err(Error::InvalidConfig("sample size must be >= 1".into()));
    }
    let mut points = Vec::with_capacity(n);
    let mut labels = Vec::with_capacity(n);
    for _ in 0..n {
        let z = draw_cluster(&model.weights, rng);
        points.push(bbeta::sample_one(&model.components[z], rng));
        labels.push(z);
    }
    Ok((DataMatrix::new(points)?, labels))
}

fn draw_cluster<R: Rng + ?Sized>(weights: &[f64], rng: &mut R) -> usize {
    let u: f64 = rng.random();
    let mut acc = 0.0;
    for (c, w) in weights.iter().enumerate() {
        acc += w;
        if u < acc {
            return c;
        }
    }
    // rounding left u above the cumulative sum: last cluster with weight
    weights.iter().rposition(|&w| w > 0.0).unwrap_or(0)
}
