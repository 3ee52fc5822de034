//! External clustering metrics: permutation-matched accuracy, ARI and AMI.
//!
//! All three are computed from the contingency table of the two labelings.
//! Label values are arbitrary non-negative integers; they are canonicalized
//! to a contiguous range before tabulation.

mod assignment;

use std::collections::BTreeMap;

use crate::error::{Error, Result};

pub use assignment::max_weight_assignment;

/// Cluster ids compacted to `0..k` in increasing order of the original ids.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelVector {
    labels: Vec<usize>,
    k: usize,
}

impl LabelVector {
    pub fn new(raw: &[usize]) -> Result<Self> {
        if raw.is_empty() {
            return Err(Error::InvalidData("label vector is empty".into()));
        }
        let ids: BTreeMap<usize, usize> = raw
            .iter()
            .copied()
            .collect::<std::collections::BTreeSet<_>>()
            .into_iter()
            .enumerate()
            .map(|(i, v)| (v, i))
            .collect();
        Ok(Self {
            labels: raw.iter().map(|v| ids[v]).collect(),
            k: ids.len(),
        })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.labels
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContingencyTable {
    counts: Vec<Vec<u64>>,
    row_sums: Vec<u64>,
    col_sums: Vec<u64>,
    n: u64,
}

impl ContingencyTable {
    pub fn counts(&self) -> &[Vec<u64>] {
        &self.counts
    }

    pub fn row_sums(&self) -> &[u64] {
        &self.row_sums
    }

    pub fn col_sums(&self) -> &[u64] {
        &self.col_sums
    }

    pub fn n(&self) -> u64 {
        self.n
    }
}

/// `counts[i][j]` = number of points with true label `i` and predicted label `j`.
pub fn contingency(y: &[usize], yhat: &[usize]) -> Result<ContingencyTable> {
    if y.len() != yhat.len() {
        return Err(Error::LengthMismatch {
            left: y.len(),
            right: yhat.len(),
        });
    }
    let y = LabelVector::new(y)?;
    let yhat = LabelVector::new(yhat)?;
    let mut counts = vec![vec![0u64; yhat.k()]; y.k()];
    for (&i, &j) in y.as_slice().iter().zip(yhat.as_slice()) {
        counts[i][j] += 1;
    }
    let row_sums = counts.iter().map(|r| r.iter().sum()).collect();
    let col_sums = (0..yhat.k()).map(|j| counts.iter().map(|r| r[j]).sum()).collect();
    Ok(ContingencyTable {
        counts,
        row_sums,
        col_sums,
        n: y.len() as u64,
    })
}

/// Best agreement rate over all relabelings of `yhat`.
///
/// Solved as a maximum-weight assignment on the contingency table, padded
/// square so surplus clusters on either side match nothing.
pub fn clustering_accuracy(y: &[usize], yhat: &[usize]) -> Result<f64> {
    let t = contingency(y, yhat)?;
    let k = t.counts.len().max(t.col_sums.len());
    let weights: Vec<Vec<f64>> = (0..k)
        .map(|i| {
            (0..k)
                .map(|j| t.counts.get(i).and_then(|r| r.get(j)).copied().unwrap_or(0) as f64)
                .collect()
        })
        .collect();
    let matching = max_weight_assignment(&weights);
    let hits: f64 = matching.iter().enumerate().map(|(i, &j)| weights[i][j]).sum();
    Ok(hits / t.n as f64)
}

fn choose2(v: u64) -> f64 {
    let v = v as f64;
    0.5 * v * (v - 1.0)
}

/// Adjusted Rand Index (pair counting, Hubert-Arabie correction).
pub fn adjusted_rand_index(y: &[usize], yhat: &[usize]) -> Result<f64> {
    let t = contingency(y, yhat)?;
    if t.n < 2 {
        return Err(Error::InvalidData("ARI needs at least two points".into()));
    }
    let index: f64 = t.counts.iter().flatten().map(|&c| choose2(c)).sum();
    let sum_a: f64 = t.row_sums.iter().map(|&a| choose2(a)).sum();
    let sum_b: f64 = t.col_sums.iter().map(|&b| choose2(b)).sum();
    let expected = sum_a * sum_b / choose2(t.n);
    let max = 0.5 * (sum_a + sum_b);
    if max == expected {
        return Ok(1.0);
    }
    Ok((index - expected) / (max - expected))
}

fn entropy(sums: &[u64], n: f64) -> f64 {
    sums.iter()
        .filter(|&&s| s > 0)
        .map(|&s| {
            let p = s as f64 / n;
            -p * p.ln()
        })
        .sum()
}

/// Mutual information in nats.
pub fn mutual_information(t: &ContingencyTable) -> f64 {
    let n = t.n as f64;
    let mut mi = 0.0;
    for (i, row) in t.counts.iter().enumerate() {
        for (j, &c) in row.iter().enumerate() {
            if c == 0 {
                continue;
            }
            let c = c as f64;
            mi += c / n * (n * c / (t.row_sums[i] as f64 * t.col_sums[j] as f64)).ln();
        }
    }
    mi.max(0.0)
}

/// `ln(k!)` for `k = 0..=n`.
fn log_factorials(n: u64) -> Vec<f64> {
    let mut out = Vec::with_capacity(n as usize + 1);
    let mut acc = 0.0;
    out.push(0.0);
    for k in 1..=n {
        acc += (k as f64).ln();
        out.push(acc);
    }
    out
}

/// Expected mutual information under the hypergeometric model of random
/// labelings with the table's margins.
pub fn expected_mutual_information(t: &ContingencyTable) -> f64 {
    let n = t.n;
    let nf = n as f64;
    let lf = log_factorials(n);
    let mut emi = 0.0;
    for &a in &t.row_sums {
        for &b in &t.col_sums {
            let lo = (a + b).saturating_sub(n).max(1);
            let hi = a.min(b);
            let fixed = lf[a as usize] + lf[b as usize] + lf[(n - a) as usize] + lf[(n - b) as usize] - lf[n as usize];
            for nij in lo..=hi {
                let x = nij as f64;
                let term = x / nf * (nf * x / (a as f64 * b as f64)).ln();
                let log_p = fixed
                    - lf[nij as usize]
                    - lf[(a - nij) as usize]
                    - lf[(b - nij) as usize]
                    - lf[(n + nij - a - b) as usize];
                emi += term * log_p.exp();
            }
        }
    }
    emi
}

/// Adjusted Mutual Information with arithmetic-mean normalization.
pub fn adjusted_mutual_information(y: &[usize], yhat: &[usize]) -> Result<f64> {
    let t = contingency(y, yhat)?;
    let n = t.n as f64;
    let mi = mutual_information(&t);
    let emi = expected_mutual_information(&t);
    let h = 0.5 * (entropy(&t.row_sums, n) + entropy(&t.col_sums, n));
    let denom = h - emi;
    let numer = mi - emi;
    if denom.abs() < 1e-15 {
        return Ok(if numer.abs() < 1e-15 { 1.0 } else { numer / denom });
    }
    Ok(numer / denom)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scores {
    pub ca: f64,
    pub ari: f64,
    pub ami: f64,
}

pub fn score_all(y: &[usize], yhat: &[usize]) -> Result<Scores> {
    Ok(Scores {
        ca: clustering_accuracy(y, yhat)?,
        ari: adjusted_rand_index(y, yhat)?,
        ami: adjusted_mutual_information(y, yhat)?,
    })
}
