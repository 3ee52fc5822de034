//! The synthetic benchmark grid: every data set clustered by every algorithm.

use std::fmt::Write as _;
use std::time::Instant;

use betamix::baselines::{self, defaults};
use betamix::data::Dataset;
use betamix::emfit;
use betamix::metrics::{self, Scores};
use betamix::util::derive_seed;
use betamix::{DataMatrix, FitConfig};

use crate::manifest::RunManifest;
use crate::svg;
use crate::{exit, BenchArgs, Failure};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Algorithm {
    KMeans,
    Gmm,
    Fbbmm,
}

impl Algorithm {
    pub const ALL: [Algorithm; 3] = [Algorithm::KMeans, Algorithm::Gmm, Algorithm::Fbbmm];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::KMeans => "kmeans",
            Algorithm::Gmm => "gmm",
            Algorithm::Fbbmm => "fbbmm",
        }
    }

    /// Hard labels for `data` with `k` clusters; all randomness comes from `seed`.
    pub fn cluster(self, data: &DataMatrix, k: usize, seed: u64) -> betamix::Result<Vec<usize>> {
        match self {
            Algorithm::KMeans => {
                let model = baselines::kmeans_fit(data, k, seed, defaults::KMEANS_ITERS)?;
                Ok(baselines::kmeans_predict(&model, data))
            }
            Algorithm::Gmm => {
                let fit = baselines::gmm_fit(data, k, seed, defaults::GMM_EPOCHS, defaults::GMM_TOL)?;
                Ok(baselines::gmm_predict(&fit.model, data))
            }
            Algorithm::Fbbmm => {
                let cfg = FitConfig {
                    seed,
                    ..FitConfig::default()
                };
                let fit = emfit::fit(data, k, &cfg)?;
                Ok(fit.responsibilities.labels())
            }
        }
    }
}

#[derive(Debug, Clone)]
pub struct Cell {
    pub dataset: Dataset,
    pub algorithm: Algorithm,
    pub scores: Scores,
    pub seconds: f64,
}

pub fn svg_name(dataset: Dataset, algorithm: Algorithm) -> String {
    format!("{}_{}.svg", dataset.name(), algorithm.name())
}

pub fn metrics_csv(cells: &[Cell]) -> String {
    let mut out = String::from("dataset,algorithm,ca,ari,ami\n");
    for c in cells {
        writeln!(
            out,
            "{},{},{:.6},{:.6},{:.6}",
            c.dataset.name(),
            c.algorithm.name(),
            c.scores.ca,
            c.scores.ari,
            c.scores.ami
        )
        .unwrap();
    }
    out
}

fn index_html(n: usize, seed: u64) -> String {
    let mut out = String::new();
    writeln!(out, "<!DOCTYPE html>\n<html><head><meta charset=\"utf-8\"><title>betamix bench</title></head><body>").unwrap();
    writeln!(out, "<p>n = {n}, seed = {seed}</p>\n<table>\n<tr><th></th>").unwrap();
    for a in Algorithm::ALL {
        writeln!(out, "<th>{}</th>", a.name()).unwrap();
    }
    out.push_str("</tr>\n");
    for d in Dataset::ALL {
        write!(out, "<tr><th>{}</th>", d.name()).unwrap();
        for a in Algorithm::ALL {
            write!(out, "<td><img src=\"{}\" width=\"230\"></td>", svg_name(d, a)).unwrap();
        }
        out.push_str("</tr>\n");
    }
    out.push_str("</table>\n</body></html>\n");
    out
}

pub fn run(a: &BenchArgs) -> Result<i32, Failure> {
    let mut m = RunManifest::start("bench");
    m.flag("n", a.n).flag("seed", a.seed);
    m.seed = Some(a.seed);
    std::fs::create_dir_all(&a.output)?;
    let mut cells = Vec::new();
    for (i, ds) in Dataset::ALL.into_iter().enumerate() {
        let data_seed = derive_seed(a.seed, i as u64);
        let set = ds.generate(a.n, data_seed)?;
        let points: Vec<[f64; 2]> = set.data.rows().collect();
        for alg in Algorithm::ALL {
            let t = Instant::now();
            let labels = alg.cluster(&set.data, ds.clusters(), data_seed)?;
            let seconds = t.elapsed().as_secs_f64();
            let scores = metrics::score_all(&set.labels, &labels)?;
            let title = format!("{} / {}", ds.name(), alg.name());
            let path = a.output.join(svg_name(ds, alg));
            std::fs::write(&path, svg::scatter(&points, Some(&labels), &title))?;
            m.outputs.push(path);
            log::info!("{title}: ARI {:.3} in {seconds:.1}s", scores.ari);
            cells.push(Cell {
                dataset: ds,
                algorithm: alg,
                scores,
                seconds,
            });
        }
    }
    let table = metrics_csv(&cells);
    print!("{table}");
    let csv_path = a.output.join("metrics.csv");
    std::fs::write(&csv_path, &table)?;
    std::fs::write(a.output.join("index.html"), index_html(a.n, a.seed))?;
    m.outputs.push(csv_path);
    // timings vary run to run, so they stay out of metrics.csv
    let timings: Vec<_> = cells
        .iter()
        .map(|c| {
            serde_json::json!({
                "dataset": c.dataset.name(),
                "algorithm": c.algorithm.name(),
                "seconds": c.seconds,
            })
        })
        .collect();
    m.detail("timings", timings);
    m.finish(&a.output.join("manifest.json"))?;
    Ok(exit::OK)
}
