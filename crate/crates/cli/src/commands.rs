use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use log::{info, warn};
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use betamix::data::{self, RawMatrix};
use betamix::emfit::{self, MixtureModel};
use betamix::metrics;
use betamix::{DataMatrix, FitConfig};

use crate::manifest::{self, RunManifest};
use crate::svg;
use crate::{exit, EvalArgs, Failure, FitArgs, GenerateArgs, PlotArgs, PredictArgs, SampleArgs};

fn context(path: &Path) -> impl Fn(betamix::Error) -> Failure + '_ {
    move |e| Failure::usage(format!("{}: {e}", path.display()))
}

fn write(path: &Path, text: &str) -> Result<(), Failure> {
    std::fs::write(path, text).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))
}

/// Normalized (optionally PCA-reduced) two-column data from a CSV file.
pub fn load_points(path: &Path, labels: bool, pca: bool) -> Result<DataMatrix, Failure> {
    let raw = data::read_csv(path, labels).map_err(context(path))?;
    let raw = raw.with_labels(None)?;
    let reduced = if pca { data::pca_2d(&raw) } else { data::normalize(&raw) }.map_err(context(path))?;
    reduced.to_data_matrix().map_err(context(path))
}

pub fn load_model(path: &Path) -> Result<MixtureModel, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))?;
    emfit::load(&text).map_err(context(path))
}

fn labeled_csv(points: &DataMatrix, labels: &[usize]) -> Result<String, Failure> {
    let rows: Vec<[f64; 2]> = points.rows().collect();
    Ok(data::render_csv(&RawMatrix::from_pairs(&rows, Some(labels.to_vec()))?))
}

/// `model.toml` -> `model.trace.csv`
pub fn trace_path(model_path: &Path) -> PathBuf {
    model_path.with_extension("trace.csv")
}

pub fn generate(a: &GenerateArgs) -> Result<i32, Failure> {
    let mut m = RunManifest::start("generate");
    m.flag("dataset", a.dataset.name()).flag("n", a.n).flag("seed", a.seed);
    m.seed = Some(a.seed);
    let ds = a.dataset.generate(a.n, a.seed)?;
    write(&a.output, &data::render_csv(&ds.to_raw()))?;
    m.outputs.push(a.output.clone());
    m.finish(&manifest::path_for(&a.output))?;
    Ok(exit::OK)
}

pub fn fit(a: &FitArgs) -> Result<i32, Failure> {
    let mut m = RunManifest::start("fit");
    m.flag("clusters", a.clusters)
        .flag("seed", a.seed)
        .flag("epochs", a.epochs)
        .flag("tol", a.tol)
        .flag("restarts", a.restarts)
        .flag("pca", a.pca)
        .flag("labels", a.labels);
    m.seed = Some(a.seed);
    m.inputs.push(a.input.clone());
    let points = load_points(&a.input, a.labels, a.pca)?;
    let cfg = FitConfig {
        epochs: a.epochs,
        conv_tol: a.tol,
        seed: a.seed,
        restarts: a.restarts,
        ..FitConfig::default()
    };
    let result = emfit::fit(&points, a.clusters, &cfg)?;
    let trace = &result.trace;
    let final_ll = *trace.log_likelihood_per_epoch.last().expect("trace is never empty");

    let mut doc = String::new();
    if !trace.converged {
        writeln!(
            doc,
            "# not converged: stopped after {} epochs (tolerance {})",
            trace.epochs_run, a.tol
        )
        .unwrap();
    }
    doc.push_str(&emfit::save(&result.model));
    write(&a.output, &doc)?;

    let mut trace_csv = String::from("epoch,log_likelihood\n");
    for (e, ll) in trace.log_likelihood_per_epoch.iter().enumerate() {
        writeln!(trace_csv, "{e},{ll:?}").unwrap();
    }
    let trace_file = trace_path(&a.output);
    write(&trace_file, &trace_csv)?;

    println!(
        "clusters {}  log-likelihood {final_ll:.6}  epochs {}  converged {}",
        a.clusters, trace.epochs_run, trace.converged
    );
    m.outputs.extend([a.output.clone(), trace_file]);
    m.detail("converged", trace.converged)
        .detail("epochs_run", trace.epochs_run)
        .detail("log_likelihood", final_ll)
        .detail("restart", result.restart)
        .detail("reseeded_epochs", &trace.reseeded_epochs);
    m.finish(&manifest::path_for(&a.output))?;
    if trace.converged {
        info!("converged after {} epochs", trace.epochs_run);
        Ok(exit::OK)
    } else {
        warn!("EM did not converge within {} epochs", a.epochs);
        Ok(exit::NOT_CONVERGED)
    }
}

pub fn predict(a: &PredictArgs) -> Result<i32, Failure> {
    let mut m = RunManifest::start("predict");
    m.flag("pca", a.pca).flag("labels", a.labels);
    m.inputs.extend([a.model.clone(), a.input.clone()]);
    let model = load_model(&a.model)?;
    let points = load_points(&a.input, a.labels, a.pca)?;
    let labels = emfit::predict(&model, &points, &FitConfig::default().quadrature)?;
    write(&a.output, &labeled_csv(&points, &labels)?)?;
    m.outputs.push(a.output.clone());
    m.finish(&manifest::path_for(&a.output))?;
    Ok(exit::OK)
}

pub fn sample(a: &SampleArgs) -> Result<i32, Failure> {
    let mut m = RunManifest::start("sample");
    m.flag("n", a.n).flag("seed", a.seed);
    m.seed = Some(a.seed);
    m.inputs.push(a.model.clone());
    if a.n == 0 {
        return Err(Failure::usage("--n must be at least 1"));
    }
    let model = load_model(&a.model)?;
    let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
    let (points, labels) = emfit::sample(&model, a.n, &mut rng)?;
    write(&a.output, &labeled_csv(&points, &labels)?)?;
    m.outputs.push(a.output.clone());
    m.finish(&manifest::path_for(&a.output))?;
    Ok(exit::OK)
}

pub fn eval(a: &EvalArgs) -> Result<i32, Failure> {
    let mut m = RunManifest::start("eval");
    m.inputs.extend([a.truth.clone(), a.predicted.clone()]);
    let truth = data::read_labels(&a.truth).map_err(context(&a.truth))?;
    let predicted = data::read_labels(&a.predicted).map_err(context(&a.predicted))?;
    let s = metrics::score_all(&truth, &predicted)?;
    println!("CA  {:.6}\nARI {:.6}\nAMI {:.6}", s.ca, s.ari, s.ami);
    if let Some(out) = &a.output {
        write(out, &format!("metric,value\nCA,{:?}\nARI,{:?}\nAMI,{:?}\n", s.ca, s.ari, s.ami))?;
        m.outputs.push(out.clone());
        m.detail("ca", s.ca).detail("ari", s.ari).detail("ami", s.ami);
        m.finish(&manifest::path_for(out))?;
    }
    Ok(exit::OK)
}

pub fn plot(a: &PlotArgs) -> Result<i32, Failure> {
    let mut m = RunManifest::start("plot");
    m.flag("labels", a.labels);
    m.inputs.push(a.input.clone());
    let raw = data::read_csv(&a.input, a.labels).map_err(context(&a.input))?;
    if raw.cols() != 2 {
        return Err(Failure::usage(format!(
            "{}: plot needs 2 value columns, found {}",
            a.input.display(),
            raw.cols()
        )));
    }
    let points: Vec<[f64; 2]> = raw.rows().iter().map(|r| [r[0], r[1]]).collect();
    write(&a.output, &svg::scatter(&points, raw.labels(), ""))?;
    m.outputs.push(a.output.clone());
    m.finish(&manifest::path_for(&a.output))?;
    Ok(exit::OK)
}
