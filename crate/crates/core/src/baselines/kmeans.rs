use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::emfit::DataMatrix;
use crate::error::{Error, Result};

pub const DEFAULT_ITERS: usize = 50;

#[derive(Debug, Clone, PartialEq)]
pub struct KMeansModel {
    pub centroids: Vec<[f64; 2]>,
    pub inertia: f64,
}

impl KMeansModel {
    pub fn k(&self) -> usize {
        self.centroids.len()
    }
}

fn sq_dist(a: [f64; 2], b: [f64; 2]) -> f64 {
    let dx = a[0] - b[0];
    let dy = a[1] - b[1];
    dx * dx + dy * dy
}

/// Index of the nearest centroid and the squared distance to it.
fn nearest(p: [f64; 2], centroids: &[[f64; 2]]) -> (usize, f64) {
    let mut best = (0, f64::INFINITY);
    for (i, &c) in centroids.iter().enumerate() {
        let d = sq_dist(p, c);
        if d < best.1 {
            best = (i, d);
        }
    }
    best
}

pub fn inertia(data: &DataMatrix, centroids: &[[f64; 2]]) -> f64 {
    data.rows().map(|p| nearest(p, centroids).1).sum()
}

/// k-means++ seeding: each new centroid is drawn with probability
/// proportional to its squared distance from the nearest chosen one.
pub fn kmeans_plus_plus<R: Rng + ?Sized>(data: &DataMatrix, k: usize, rng: &mut R) -> Vec<[f64; 2]> {
    let rows: Vec<[f64; 2]> = data.rows().collect();
    let mut centroids = Vec::with_capacity(k);
    centroids.push(rows[rng.random_range(0..rows.len())]);
    let mut d2: Vec<f64> = rows.iter().map(|&p| sq_dist(p, centroids[0])).collect();
    while centroids.len() < k {
        let total: f64 = d2.iter().sum();
        let pick = if total > 0.0 {
            let mut target = rng.random::<f64>() * total;
            let mut idx = rows.len() - 1;
            for (i, &w) in d2.iter().enumerate() {
                if target < w {
                    idx = i;
                    break;
                }
                target -= w;
            }
            idx
        } else {
            // every point coincides with a centroid
            rng.random_range(0..rows.len())
        };
        let c = rows[pick];
        centroids.push(c);
        for (d, &p) in d2.iter_mut().zip(&rows) {
            *d = d.min(sq_dist(p, c));
        }
    }
    centroids
}

/// k-means++ seeding followed by at most `iters` Lloyd iterations.
pub fn kmeans_fit(data: &DataMatrix, k: usize, seed: u64, iters: usize) -> Result<KMeansModel> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    kmeans_fit_with(data, k, &mut rng, iters)
}

pub fn kmeans_fit_with<R: Rng + ?Sized>(
    data: &DataMatrix,
    k: usize,
    rng: &mut R,
    iters: usize,
) -> Result<KMeansModel> {
    if k == 0 {
        return Err(Error::InvalidConfig("k-means needs at least one cluster".into()));
    }
    if data.len() < k {
        return Err(Error::TooFewPoints {
            points: data.len(),
            clusters: k,
        });
    }
    let rows: Vec<[f64; 2]> = data.rows().collect();
    let mut centroids = kmeans_plus_plus(data, k, rng);
    let mut labels = vec![usize::MAX; rows.len()];

    for _ in 0..iters {
        let mut changed = false;
        for (l, &p) in labels.iter_mut().zip(&rows) {
            let (c, _) = nearest(p, &centroids);
            if *l != c {
                *l = c;
                changed = true;
            }
        }
        if !changed {
            break;
        }
        let mut sums = vec![[0.0, 0.0]; k];
        let mut counts = vec![0usize; k];
        for (&l, &p) in labels.iter().zip(&rows) {
            sums[l][0] += p[0];
            sums[l][1] += p[1];
            counts[l] += 1;
        }
        for c in 0..k {
            if counts[c] > 0 {
                let n = counts[c] as f64;
                centroids[c] = [sums[c][0] / n, sums[c][1] / n];
            }
        }
        // empty clusters take the point farthest from its centroid
        for c in 0..k {
            if counts[c] == 0 {
                let far = rows
                    .iter()
                    .enumerate()
                    .map(|(i, &p)| (i, sq_dist(p, centroids[labels[i]])))
                    .fold((0, -1.0), |b, x| if x.1 > b.1 { x } else { b })
                    .0;
                centroids[c] = rows[far];
                counts[c] = 1;
                labels[far] = c;
            }
        }
    }
    let inertia = inertia(data, &centroids);
    Ok(KMeansModel { centroids, inertia })
}

/// Nearest centroid per point; ties go to the lower index.
pub fn kmeans_predict(model: &KMeansModel, data: &DataMatrix) -> Vec<usize> {
    data.rows().map(|p| nearest(p, &model.centroids).0).collect()
}
