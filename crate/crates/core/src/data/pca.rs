use super::{normalize, RawMatrix};
use crate::error::{Error, Result};

/// Eigenvalues at or below this fraction of the largest count as zero.
const RANK_TOL: f64 = 1e-12;
const JACOBI_SWEEPS: usize = 100;

/// Leading two principal axes of a data set.
#[derive(Debug, Clone, PartialEq)]
pub struct Pca {
    pub mean: Vec<f64>,
    /// Unit eigenvectors, descending eigenvalue. The largest-magnitude
    /// entry of each is positive.
    pub components: [Vec<f64>; 2],
    /// All eigenvalues of the covariance, descending.
    pub eigenvalues: Vec<f64>,
}

impl Pca {
    pub fn project(&self, row: &[f64]) -> [f64; 2] {
        let mut out = [0.0; 2];
        for (o, comp) in out.iter_mut().zip(&self.components) {
            *o = row.iter().zip(&self.mean).zip(comp).map(|((x, m), c)| (x - m) * c).sum();
        }
        out
    }

    pub fn reconstruct(&self, scores: [f64; 2]) -> Vec<f64> {
        (0..self.mean.len())
            .map(|j| self.mean[j] + scores[0] * self.components[0][j] + scores[1] * self.components[1][j])
            .collect()
    }
}

/// Cyclic Jacobi eigen-decomposition of a symmetric matrix.
/// Returns `(eigenvalues, eigenvectors as columns)`, unsorted.
fn jacobi_eigen(mut a: Vec<Vec<f64>>) -> (Vec<f64>, Vec<Vec<f64>>) {
    let m = a.len();
    let mut v: Vec<Vec<f64>> = (0..m).map(|i| (0..m).map(|j| f64::from(u8::from(i == j))).collect()).collect();
    for _ in 0..JACOBI_SWEEPS {
        let off: f64 = (0..m).flat_map(|i| (0..m).filter(move |&j| j != i).map(move |j| (i, j))).map(|(i, j)| a[i][j] * a[i][j]).sum();
        let scale: f64 = (0..m).map(|i| a[i][i] * a[i][i]).sum::<f64>();
        if off <= 1e-30 * scale.max(f64::MIN_POSITIVE) {
            break;
        }
        for p in 0..m {
            for q in p + 1..m {
                if a[p][q] == 0.0 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..m {
                    let (akp, akq) = (a[k][p], a[k][q]);
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..m {
                    let (apk, aqk) = (a[p][k], a[q][k]);
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
                for row in v.iter_mut() {
                    let (vp, vq) = (row[p], row[q]);
                    row[p] = c * vp - s * vq;
                    row[q] = s * vp + c * vq;
                }
            }
        }
    }
    ((0..m).map(|i| a[i][i]).collect(), v)
}

pub fn pca_fit(raw: &RawMatrix) -> Result<Pca> {
    let (n, m) = (raw.len(), raw.cols());
    if m < 2 {
        return Err(Error::InvalidData(format!("PCA needs at least 2 columns, found {m}")));
    }
    if n < 3 {
        return Err(Error::InvalidData(format!("PCA needs at least 3 rows, found {n}")));
    }
    let mean: Vec<f64> = (0..m).map(|j| raw.column(j).sum::<f64>() / n as f64).collect();
    let mut cov = vec![vec![0.0; m]; m];
    for r in raw.rows() {
        for i in 0..m {
            let di = r[i] - mean[i];
            for j in i..m {
                cov[i][j] += di * (r[j] - mean[j]);
            }
        }
    }
    for i in 0..m {
        for j in i..m {
            cov[i][j] /= (n - 1) as f64;
            cov[j][i] = cov[i][j];
        }
    }
    let (values, vectors) = jacobi_eigen(cov);
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| values[b].total_cmp(&values[a]));
    let eigenvalues: Vec<f64> = order.iter().map(|&i| values[i]).collect();
    if !(eigenvalues[0] > 0.0) || eigenvalues[1] <= RANK_TOL * eigenvalues[0] {
        return Err(Error::RankDeficient);
    }
    let axis = |k: usize| -> Vec<f64> {
        let mut col: Vec<f64> = vectors.iter().map(|row| row[order[k]]).collect();
        let lead = col.iter().copied().fold(0.0f64, |best, x| if x.abs() > best.abs() { x } else { best });
        if lead < 0.0 {
            col.iter_mut().for_each(|x| *x = -*x);
        }
        col
    };
    Ok(Pca {
        mean,
        components: [axis(0), axis(1)],
        eigenvalues,
    })
}

/// Project onto the two leading principal axes, then normalize.
pub fn pca_2d(raw: &RawMatrix) -> Result<RawMatrix> {
    let pca = pca_fit(raw)?;
    let rows: Vec<[f64; 2]> = raw.rows().iter().map(|r| pca.project(r)).collect();
    normalize(&RawMatrix::from_pairs(&rows, raw.labels().map(<[usize]>::to_vec))?)
}
