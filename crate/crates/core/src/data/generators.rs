use std::f64::consts::TAU;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::{normalize, RawMatrix};
use crate::emfit::DataMatrix;
use crate::error::{Error, Result};

pub const DEFAULT_CIRCLE_NOISE: f64 = 0.05;

const OUTER_RADIUS: f64 = 1.0;
const INNER_RADIUS: f64 = 0.45;

const VARIED_CENTERS: [[f64; 2]; 3] = [[-6.0, 0.0], [6.0, 0.0], [0.0, 0.0]];
const VARIED_SDS: [f64; 3] = [0.8, 0.8, 2.5];

const ANISO_SD: f64 = 0.5;
/// Centers before the shear, for negative correlation. The positive set
/// mirrors the x coordinates so the two data sets are reflections of each other.
const ANISO_CENTERS: [[f64; 2]; 3] = [[-2.0, -3.0], [0.0, 0.0], [2.0, 3.0]];

const BLOB_SD: f64 = 0.6;
/// Pairwise distances 8, ~8.06, ~8.06: all above 10 standard deviations.
const BLOB_CENTERS: [[f64; 2]; 3] = [[0.0, 0.0], [8.0, 0.0], [4.0, 7.0]];

/// Normalized points with their ground-truth labels.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledDataset {
    pub data: DataMatrix,
    pub labels: Vec<usize>,
}

impl LabeledDataset {
    fn from_raw(raw: RawMatrix) -> Result<Self> {
        let norm = normalize(&raw)?;
        let labels = norm.labels().expect("generators always label").to_vec();
        Ok(Self {
            data: norm.to_data_matrix()?,
            labels,
        })
    }

    pub fn to_raw(&self) -> RawMatrix {
        let rows: Vec<[f64; 2]> = self.data.rows().collect();
        RawMatrix::from_pairs(&rows, Some(self.labels.clone())).expect("dataset is rectangular")
    }
}

/// Sizes of `k` groups sharing `n` points; the first `n % k` groups get one extra.
pub fn split_sizes(n: usize, k: usize) -> Vec<usize> {
    (0..k).map(|i| n / k + usize::from(i < n % k)).collect()
}

fn check_n(n: usize, k: usize) -> Result<()> {
    if n < k.max(2) {
        return Err(Error::InvalidConfig(format!("need at least {} points, got {n}", k.max(2))));
    }
    Ok(())
}

fn normal(rng: &mut ChaCha8Rng) -> f64 {
    rng.sample(StandardNormal)
}

/// Concentric circles before normalization.
pub fn circles_raw(n: usize, noise_sd: f64, seed: u64) -> Result<RawMatrix> {
    check_n(n, 2)?;
    if !(noise_sd >= 0.0 && noise_sd.is_finite()) {
        return Err(Error::InvalidConfig(format!("noise sd must be >= 0, got {noise_sd}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rows = Vec::with_capacity(n);
    let mut labels = Vec::with_capacity(n);
    for (label, (&size, radius)) in split_sizes(n, 2).iter().zip([OUTER_RADIUS, INNER_RADIUS]).enumerate() {
        for _ in 0..size {
            let theta = TAU * rng.random::<f64>();
            let x = radius * theta.cos() + noise_sd * normal(&mut rng);
            let y = radius * theta.sin() + noise_sd * normal(&mut rng);
            rows.push([x, y]);
            labels.push(label);
        }
    }
    RawMatrix::from_pairs(&rows, Some(labels))
}

pub fn gen_circles(n: usize, noise_sd: f64, seed: u64) -> Result<LabeledDataset> {
    LabeledDataset::from_raw(circles_raw(n, noise_sd, seed)?)
}

fn gaussian_groups(
    n: usize,
    seed: u64,
    centers: &[[f64; 2]],
    sds: &[f64],
    transform: impl Fn([f64; 2]) -> [f64; 2],
) -> Result<LabeledDataset> {
    check_n(n, centers.len())?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rows = Vec::with_capacity(n);
    let mut labels = Vec::with_capacity(n);
    for (label, &size) in split_sizes(n, centers.len()).iter().enumerate() {
        let [cx, cy] = centers[label];
        for _ in 0..size {
            let p = [cx + sds[label] * normal(&mut rng), cy + sds[label] * normal(&mut rng)];
            rows.push(transform(p));
            labels.push(label);
        }
    }
    LabeledDataset::from_raw(RawMatrix::from_pairs(&rows, Some(labels))?)
}

/// Two tight blobs on either side of a broad one.
pub fn gen_varied_blobs(n: usize, seed: u64) -> Result<LabeledDataset> {
    gaussian_groups(n, seed, &VARIED_CENTERS, &VARIED_SDS, |p| p)
}

/// Three sheared blobs; `sign` selects the sign of the within-cluster correlation.
pub fn gen_aniso(n: usize, sign: i8, seed: u64) -> Result<LabeledDataset> {
    if sign != 1 && sign != -1 {
        return Err(Error::InvalidConfig(format!("correlation sign must be +1 or -1, got {sign}")));
    }
    let s = f64::from(sign);
    let centers = ANISO_CENTERS.map(|[x, y]| [-s * x, y]);
    gaussian_groups(n, seed, &centers, &[ANISO_SD; 3], |[x, y]| [x, s * 1.5 * x + 0.5 * y])
}

/// Three well separated isotropic blobs.
pub fn gen_blobs(n: usize, seed: u64) -> Result<LabeledDataset> {
    gaussian_groups(n, seed, &BLOB_CENTERS, &[BLOB_SD; 3], |p| p)
}

/// The five synthetic benchmark sets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Dataset {
    Circles,
    Varied,
    AnisoNeg,
    AnisoPos,
    Blobs,
}

impl Dataset {
    pub const ALL: [Dataset; 5] = [
        Dataset::Circles,
        Dataset::Varied,
        Dataset::AnisoNeg,
        Dataset::AnisoPos,
        Dataset::Blobs,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Dataset::Circles => "circles",
            Dataset::Varied => "varied",
            Dataset::AnisoNeg => "aniso-neg",
            Dataset::AnisoPos => "aniso-pos",
            Dataset::Blobs => "blobs",
        }
    }

    pub fn clusters(self) -> usize {
        match self {
            Dataset::Circles => 2,
            _ => 3,
        }
    }

    pub fn generate(self, n: usize, seed: u64) -> Result<LabeledDataset> {
        match self {
            Dataset::Circles => gen_circles(n, DEFAULT_CIRCLE_NOISE, seed),
            Dataset::Varied => gen_varied_blobs(n, seed),
            Dataset::AnisoNeg => gen_aniso(n, -1, seed),
            Dataset::AnisoPos => gen_aniso(n, 1, seed),
            Dataset::Blobs => gen_blobs(n, seed),
        }
    }
}

impl fmt::Display for Dataset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Dataset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Dataset::ALL
            .into_iter()
            .find(|d| d.name() == s)
            .ok_or_else(|| Error::InvalidConfig(format!("unknown dataset '{s}'")))
    }
}
