//! Getting data into the unit square: synthetic benchmark sets, CSV files,
//! min-max normalization and PCA reduction to two dimensions.

mod csvio;
mod generators;
mod pca;

pub use csvio::{parse_csv, parse_labels, read_csv, read_labels, render_csv, write_csv};
pub use generators::{
    circles_raw, gen_aniso, gen_blobs, gen_circles, gen_varied_blobs, split_sizes, Dataset, LabeledDataset,
    DEFAULT_CIRCLE_NOISE,
};
pub use pca::{pca_2d, pca_fit, Pca};

use crate::emfit::DataMatrix;
use crate::error::{Error, Result};

/// Lower and upper edge of the normalized range.
pub const NORM_LO: f64 = 0.01;
pub const NORM_HI: f64 = 0.99;

/// Rectangular table of finite reals with optional integer labels.
#[derive(Debug, Clone, PartialEq)]
pub struct RawMatrix {
    rows: Vec<Vec<f64>>,
    cols: usize,
    labels: Option<Vec<usize>>,
}

impl RawMatrix {
    pub fn new(rows: Vec<Vec<f64>>, labels: Option<Vec<usize>>) -> Result<Self> {
        if rows.len() < 2 {
            return Err(Error::InvalidData(format!("need at least 2 rows, found {}", rows.len())));
        }
        let cols = rows[0].len();
        if cols == 0 {
            return Err(Error::InvalidData("rows have no columns".into()));
        }
        for (i, r) in rows.iter().enumerate() {
            if r.len() != cols {
                return Err(Error::InvalidData(format!(
                    "row {i} has {} columns, expected {cols}",
                    r.len()
                )));
            }
            if let Some(v) = r.iter().find(|v| !v.is_finite()) {
                return Err(Error::InvalidData(format!("row {i} contains non-finite value {v}")));
            }
        }
        if let Some(l) = &labels {
            if l.len() != rows.len() {
                return Err(Error::LengthMismatch {
                    left: rows.len(),
                    right: l.len(),
                });
            }
        }
        Ok(Self { rows, cols, labels })
    }

    pub fn from_pairs(rows: &[[f64; 2]], labels: Option<Vec<usize>>) -> Result<Self> {
        Self::new(rows.iter().map(|r| r.to_vec()).collect(), labels)
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    pub fn labels(&self) -> Option<&[usize]> {
        self.labels.as_deref()
    }

    pub fn column(&self, j: usize) -> impl Iterator<Item = f64> + '_ {
        self.rows.iter().map(move |r| r[j])
    }

    pub fn with_labels(self, labels: Option<Vec<usize>>) -> Result<Self> {
        Self::new(self.rows, labels)
    }

    /// Two-column matrix as fit input. Values must already lie in the open unit square.
    pub fn to_data_matrix(&self) -> Result<DataMatrix> {
        if self.cols != 2 {
            return Err(Error::InvalidData(format!(
                "expected 2 columns, found {} (reduce with PCA first)",
                self.cols
            )));
        }
        let pairs: Vec<[f64; 2]> = self.rows.iter().map(|r| [r[0], r[1]]).collect();
        DataMatrix::from_rows(&pairs)
    }
}

/// Per-column min-max scaling onto `[NORM_LO, NORM_HI]`.
///
/// Written as an interpolation between the two bounds so that column minima
/// and maxima land on the bounds exactly.
pub fn normalize(raw: &RawMatrix) -> Result<RawMatrix> {
    let mut ranges = Vec::with_capacity(raw.cols);
    for j in 0..raw.cols {
        let (lo, hi) = raw
            .column(j)
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
        if !(hi > lo) {
            return Err(Error::ConstantColumn { column: j });
        }
        ranges.push((lo, hi));
    }
    let rows = raw
        .rows
        .iter()
        .map(|r| {
            r.iter()
                .zip(&ranges)
                .map(|(&v, &(lo, hi))| {
                    let t = (v - lo) / (hi - lo);
                    NORM_LO * (1.0 - t) + NORM_HI * t
                })
                .collect()
        })
        .collect();
    Ok(RawMatrix {
        rows,
        cols: raw.cols,
        labels: raw.labels.clone(),
    })
}
