//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Runs as a plain binary (no libtest harness) so every line is printed in
//! order; the process fails if any criterion fails.

use std::collections::BTreeMap;
use std::path::Path;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use betamix::bbeta::{self, BetaParams, Point2, QuadratureConfig};
use betamix::data::Dataset;
use betamix::emfit::{self, MixtureModel};
use betamix::metrics;
use betamix::{DataMatrix, FitConfig};
use betamix_cli::bench::Algorithm;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn bp(a: [f64; 4]) -> BetaParams {
    BetaParams::new(a).unwrap()
}

fn quad() -> QuadratureConfig {
    QuadratureConfig::default()
}

fn density(theta: &BetaParams, x: f64, y: f64) -> f64 {
    bbeta::log_pdf(theta, Point2::new(x, y).unwrap(), &quad()).unwrap().exp()
}

fn pearson(pts: &[(f64, f64)]) -> f64 {
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for p in pts {
        sxy += (p.0 - mx) * (p.1 - my);
        sxx += (p.0 - mx).powi(2);
        syy += (p.1 - my).powi(2);
    }
    sxy / (sxx * syy).sqrt()
}

// ---------------------------------------------------------------- 1

fn normalization() -> Outcome {
    let sets = [
        [3.0, 3.0, 3.0, 3.0],
        [1.0, 1.0, 1.0, 1.0],
        [0.8, 0.8, 0.8, 0.8],
        [2.0, 4.0, 2.0, 2.0],
        [4.0, 2.0, 2.0, 2.0],
        [4.0, 2.0, 4.0, 0.5],
        [1.0, 1.0, 1.0, 0.5],
        [0.5, 1.0, 1.0, 1.0],
    ];
    let t = Instant::now();
    let g = 400;
    let h = 1.0 / g as f64;
    let mut totals = Vec::new();
    for a in sets {
        let theta = bp(a);
        let mut total = 0.0;
        for i in 0..g {
            for j in 0..g {
                total += density(&theta, (i as f64 + 0.5) * h, (j as f64 + 0.5) * h);
            }
        }
        totals.push(total * h * h);
    }
    let secs = t.elapsed().as_secs_f64();
    let ok = totals.iter().all(|v| (0.99..=1.01).contains(v)) && secs <= 60.0;
    let lo = totals.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = totals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    outcome(ok, format!("integrals in [{lo:.5}, {hi:.5}] (need [0.99, 1.01]), {secs:.1} s (limit 60 s)"))
}

// ---------------------------------------------------------------- 2

fn uniform_oracle() -> Outcome {
    let theta = bp([1.0; 4]);
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let x: f64 = rng.random_range(1e-9..1.0);
        let y: f64 = rng.random_range(1e-9..1.0);
        let exact = 6.0 * (x.min(y) - (x + y - 1.0).max(0.0));
        worst = worst.max((density(&theta, x, y) - exact).abs());
    }
    outcome(worst <= 1e-8, format!("max |pdf - 6 * width| = {worst:.2e} over 1000 points (limit 1e-8)"))
}

// ---------------------------------------------------------------- 3

fn correlation_signs() -> Outcome {
    let draw = |a: [f64; 4], seed: u64| {
        let theta = bp(a);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let pts: Vec<(f64, f64)> = (0..20_000)
            .map(|_| {
                let p = bbeta::sample_one(&theta, &mut rng);
                (p.x(), p.y())
            })
            .collect();
        pearson(&pts)
    };
    let pos = draw([4.0, 2.0, 2.0, 2.0], 31);
    let neg = draw([1.0, 1.0, 1.0, 0.5], 32);
    let zero = draw([3.0, 3.0, 3.0, 3.0], 33);
    outcome(
        pos > 0.0 && neg < 0.0 && zero.abs() < 0.03,
        format!("r(4,2,2,2) = {pos:+.4}, r(1,1,1,0.5) = {neg:+.4}, r(3,3,3,3) = {zero:+.4} (|r| < 0.03)"),
    )
}

// ---------------------------------------------------------------- 4

/// Probability mass of each cell of a `cells x cells` grid, by a
/// `sub x sub` midpoint rule inside every cell.
fn cell_masses(theta: &BetaParams, cells: usize, sub: usize) -> Vec<f64> {
    let h = 1.0 / (cells * sub) as f64;
    let mut out = vec![0.0; cells * cells];
    for i in 0..cells * sub {
        for j in 0..cells * sub {
            let x = (i as f64 + 0.5) * h;
            let y = (j as f64 + 0.5) * h;
            out[(i / sub) * cells + j / sub] += density(theta, x, y) * h * h;
        }
    }
    out
}

fn sampler_agreement() -> Outcome {
    let cells = 20;
    let n = 200_000;
    let mut parts = Vec::new();
    let mut ok = true;
    for (k, a) in [[2.0, 2.0, 2.0, 2.0], [4.0, 2.0, 4.0, 0.5]].into_iter().enumerate() {
        let theta = bp(a);
        let mass = cell_masses(&theta, cells, 16);
        let total: f64 = mass.iter().sum();
        let mut counts = vec![0usize; cells * cells];
        let mut rng = ChaCha8Rng::seed_from_u64(40 + k as u64);
        for _ in 0..n {
            let p = bbeta::sample_one(&theta, &mut rng);
            let i = ((p.x() * cells as f64) as usize).min(cells - 1);
            let j = ((p.y() * cells as f64) as usize).min(cells - 1);
            counts[i * cells + j] += 1;
        }
        let tv = 0.5
            * counts
                .iter()
                .zip(&mass)
                .map(|(&c, &m)| (c as f64 / n as f64 - m / total).abs())
                .sum::<f64>();
        ok &= tv < 0.02;
        parts.push(format!("TV{a:?} = {tv:.4}"));
    }
    outcome(ok, format!("{} (limit 0.02)", parts.join(", ")))
}

// ---------------------------------------------------------------- 5

fn sampled(model: &MixtureModel, n: usize, seed: u64) -> (DataMatrix, Vec<usize>) {
    emfit::sample(model, n, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap()
}

fn corners() -> MixtureModel {
    MixtureModel::new(vec![0.5, 0.5], vec![bp([8.0, 2.0, 2.0, 2.0]), bp([2.0, 2.0, 2.0, 8.0])]).unwrap()
}

fn em_ascent() -> Outcome {
    let three = MixtureModel::new(
        vec![0.3, 0.3, 0.4],
        vec![bp([8.0, 2.0, 2.0, 2.0]), bp([2.0, 2.0, 2.0, 8.0]), bp([2.0, 8.0, 2.0, 2.0])],
    )
    .unwrap();
    let fixtures: Vec<(&str, DataMatrix, usize)> = vec![
        ("corners", sampled(&corners(), 120, 501).0, 2),
        ("three-corners", sampled(&three, 120, 502).0, 3),
        ("aniso-neg", Dataset::AnisoNeg.generate(90, 503).unwrap().data, 3),
        ("varied", Dataset::Varied.generate(90, 504).unwrap().data, 3),
        ("circles", Dataset::Circles.generate(100, 505).unwrap().data, 2),
    ];
    let mut worst = f64::INFINITY;
    let mut where_ = String::new();
    let mut epochs = 0;
    for (name, data, c) in &fixtures {
        for seed in 0..20 {
            let cfg = FitConfig {
                seed,
                restarts: 1,
                ..FitConfig::default()
            };
            let fit = emfit::fit(data, *c, &cfg).unwrap();
            let trace = &fit.trace.log_likelihood_per_epoch;
            epochs += trace.len();
            for w in trace.windows(2) {
                let step = w[1] - w[0];
                if step < worst {
                    worst = step;
                    where_ = format!("{name} seed {seed}");
                }
            }
        }
    }
    outcome(
        worst >= -1e-6,
        format!("smallest epoch change {worst:+.3e} ({where_}) over 100 fits, {epochs} epochs (slack -1e-6)"),
    )
}

// ---------------------------------------------------------------- 6

fn recovery() -> Outcome {
    let truth = corners();
    let analytic = [bbeta::mean(&truth.components()[0]), bbeta::mean(&truth.components()[1])];
    let mut good = 0;
    let mut mean_ok = true;
    let mut worst_mean = 0.0f64;
    let mut slowest = 0.0f64;
    for seed in 0..20u64 {
        let (data, labels) = sampled(&truth, 500, 600 + seed);
        let t = Instant::now();
        let fit = emfit::fit(
            &data,
            2,
            &FitConfig {
                seed,
                ..FitConfig::default()
            },
        )
        .unwrap();
        slowest = slowest.max(t.elapsed().as_secs_f64());
        let pred = fit.responsibilities.labels();
        let ca = metrics::clustering_accuracy(&labels, &pred).unwrap();
        if ca < 0.9 {
            continue;
        }
        good += 1;
        // match fitted clusters to generating ones with the accuracy-optimal permutation
        let mut w = vec![vec![0.0; 2]; 2];
        for (&p, &l) in pred.iter().zip(&labels) {
            w[p][l] += 1.0;
        }
        let matching = metrics::max_weight_assignment(&w);
        for (c, &l) in matching.iter().enumerate() {
            let (mx, my) = bbeta::mean(&fit.model.components()[c]);
            let d = (mx - analytic[l].0).abs().max((my - analytic[l].1).abs());
            worst_mean = worst_mean.max(d);
            mean_ok &= d <= 0.05;
        }
    }
    outcome(
        good >= 18 && mean_ok && slowest <= 120.0,
        format!(
            "CA >= 0.90 in {good}/20 seeds (need 18), worst mean error {worst_mean:.4} (limit 0.05), slowest fit {slowest:.1} s (limit 120 s)"
        ),
    )
}

// ---------------------------------------------------------------- 7

fn comparisons() -> Vec<(String, Outcome)> {
    let seeds = 0..10u64;
    let ari = |ds: Dataset, alg: Algorithm, seed: u64| {
        let set = ds.generate(500, seed).unwrap();
        let pred = alg.cluster(&set.data, ds.clusters(), seed).unwrap();
        metrics::adjusted_rand_index(&set.labels, &pred).unwrap()
    };
    let fmt = |v: &[f64]| v.iter().map(|a| format!("{a:.2}")).collect::<Vec<_>>().join(" ");
    let mut out = Vec::new();

    let (mut f, mut k) = (Vec::new(), Vec::new());
    for s in seeds.clone() {
        f.push(ari(Dataset::Circles, Algorithm::Fbbmm, s));
        k.push(ari(Dataset::Circles, Algorithm::KMeans, s));
    }
    let wins = f.iter().zip(&k).filter(|(a, b)| **a >= **b + 0.3).count();
    out.push((
        "7a circles: FBBMM ARI >= k-means ARI + 0.3".to_string(),
        outcome(wins >= 6, format!("{wins}/10 seeds (need 6); fbbmm [{}] kmeans [{}]", fmt(&f), fmt(&k))),
    ));

    for (tag, ds) in [("7b", Dataset::AnisoNeg), ("7c", Dataset::AnisoPos)] {
        let (mut f, mut k) = (Vec::new(), Vec::new());
        for s in seeds.clone() {
            f.push(ari(ds, Algorithm::Fbbmm, s));
            k.push(ari(ds, Algorithm::KMeans, s));
        }
        let wins = f.iter().zip(&k).filter(|(a, b)| **a >= 0.8 && **a > **b).count();
        out.push((
            format!("{tag} {ds}: FBBMM ARI >= 0.8 and > k-means"),
            outcome(wins >= 6, format!("{wins}/10 seeds (need 6); fbbmm [{}] kmeans [{}]", fmt(&f), fmt(&k))),
        ));
    }

    let mut wins = 0;
    let mut worst = f64::INFINITY;
    for s in seeds {
        let scores: Vec<f64> = Algorithm::ALL.iter().map(|&a| ari(Dataset::Blobs, a, s)).collect();
        worst = worst.min(scores.iter().copied().fold(f64::INFINITY, f64::min));
        if scores.iter().all(|&v| v >= 0.95) {
            wins += 1;
        }
    }
    out.push((
        "7d blobs: every algorithm ARI >= 0.95".to_string(),
        outcome(wins >= 6, format!("{wins}/10 seeds (need 6); lowest ARI {worst:.3}")),
    ));
    out
}

// ---------------------------------------------------------------- 8

fn brute_force_accuracy(y: &[usize], yhat: &[usize]) -> f64 {
    let k = y.iter().chain(yhat).max().unwrap() + 1;
    let mut perm: Vec<usize> = (0..k).collect();
    let mut best = 0;
    // Heap's algorithm over all relabelings of yhat
    fn visit(perm: &mut Vec<usize>, m: usize, y: &[usize], yhat: &[usize], best: &mut usize) {
        if m == 1 {
            let hits = y.iter().zip(yhat).filter(|(a, b)| **a == perm[**b]).count();
            *best = (*best).max(hits);
            return;
        }
        for i in 0..m {
            visit(perm, m - 1, y, yhat, best);
            let j = if m % 2 == 0 { i } else { 0 };
            perm.swap(j, m - 1);
        }
    }
    visit(&mut perm, k, y, yhat, &mut best);
    best as f64 / y.len() as f64
}

fn pair_counting_ari(y: &[usize], yhat: &[usize]) -> f64 {
    let (mut n11, mut n10, mut n01, mut n00) = (0.0, 0.0, 0.0, 0.0);
    for i in 0..y.len() {
        for j in i + 1..y.len() {
            match (y[i] == y[j], yhat[i] == yhat[j]) {
                (true, true) => n11 += 1.0,
                (true, false) => n10 += 1.0,
                (false, true) => n01 += 1.0,
                (false, false) => n00 += 1.0,
            }
        }
    }
    let denom: f64 = (n00 + n01) * (n01 + n11) + (n00 + n10) * (n10 + n11);
    if denom == 0.0 {
        return 1.0;
    }
    2.0 * (n00 * n11 - n01 * n10) / denom
}

fn mi(y: &[usize], yhat: &[usize]) -> f64 {
    let n = y.len() as f64;
    let mut joint: BTreeMap<(usize, usize), f64> = BTreeMap::new();
    let mut a: BTreeMap<usize, f64> = BTreeMap::new();
    let mut b: BTreeMap<usize, f64> = BTreeMap::new();
    for (&u, &v) in y.iter().zip(yhat) {
        *joint.entry((u, v)).or_default() += 1.0;
        *a.entry(u).or_default() += 1.0;
        *b.entry(v).or_default() += 1.0;
    }
    joint.iter().map(|(&(u, v), &c)| c / n * (n * c / (a[&u] * b[&v])).ln()).sum()
}

fn entropy(y: &[usize]) -> f64 {
    let n = y.len() as f64;
    let mut counts: BTreeMap<usize, f64> = BTreeMap::new();
    for &u in y {
        *counts.entry(u).or_default() += 1.0;
    }
    counts.values().map(|c| -(c / n) * (c / n).ln()).sum()
}

/// AMI with E[MI] averaged over every permutation of `yhat` (the margins stay fixed).
fn exhaustive_ami(y: &[usize], yhat: &[usize]) -> f64 {
    let mut idx: Vec<usize> = (0..yhat.len()).collect();
    let mut total = 0.0;
    let mut count = 0usize;
    fn visit(idx: &mut Vec<usize>, m: usize, y: &[usize], yhat: &[usize], total: &mut f64, count: &mut usize) {
        if m <= 1 {
            let permuted: Vec<usize> = idx.iter().map(|&i| yhat[i]).collect();
            *total += mi(y, &permuted);
            *count += 1;
            return;
        }
        for i in 0..m {
            visit(idx, m - 1, y, yhat, total, count);
            let j = if m % 2 == 0 { i } else { 0 };
            idx.swap(j, m - 1);
        }
    }
    visit(&mut idx, yhat.len(), y, yhat, &mut total, &mut count);
    let emi = total / count as f64;
    let num = mi(y, yhat) - emi;
    let den = 0.5 * (entropy(y) + entropy(yhat)) - emi;
    if den.abs() < 1e-15 && num.abs() < 1e-15 {
        return 1.0;
    }
    num / den
}

fn random_labels(rng: &mut ChaCha8Rng, n: usize, k: usize) -> Vec<usize> {
    (0..n).map(|_| rng.random_range(0..k)).collect()
}

fn metric_oracles() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut ca_mismatch = 0;
    for _ in 0..200 {
        let n = rng.random_range(1..=12);
        let (k1, k2) = (rng.random_range(1..=6), rng.random_range(1..=6));
        let y = random_labels(&mut rng, n, k1);
        let yhat = random_labels(&mut rng, n, k2);
        if metrics::clustering_accuracy(&y, &yhat).unwrap() != brute_force_accuracy(&y, &yhat) {
            ca_mismatch += 1;
        }
    }
    let mut ari_err = 0.0f64;
    for _ in 0..200 {
        let n = rng.random_range(2..=50);
        let (k1, k2) = (rng.random_range(1..=6), rng.random_range(1..=6));
        let y = random_labels(&mut rng, n, k1);
        let yhat = random_labels(&mut rng, n, k2);
        ari_err = ari_err.max((metrics::adjusted_rand_index(&y, &yhat).unwrap() - pair_counting_ari(&y, &yhat)).abs());
    }
    let mut ami_err = 0.0f64;
    for _ in 0..200 {
        let n = rng.random_range(2..=8);
        let (k1, k2) = (rng.random_range(1..=4), rng.random_range(1..=4));
        let y = random_labels(&mut rng, n, k1);
        let yhat = random_labels(&mut rng, n, k2);
        ami_err = ami_err.max((metrics::adjusted_mutual_information(&y, &yhat).unwrap() - exhaustive_ami(&y, &yhat)).abs());
    }
    let worked = metrics::clustering_accuracy(&[0, 0, 1, 1], &[1, 1, 0, 0]).unwrap();
    outcome(
        ca_mismatch == 0 && ari_err <= 1e-12 && ami_err <= 1e-9 && worked == 1.0,
        format!(
            "CA mismatches {ca_mismatch}/200, max ARI error {ari_err:.1e} (limit 1e-12), max AMI error {ami_err:.1e} (limit 1e-9), [a,a,b,b] vs [b,b,a,a] CA {worked}"
        ),
    )
}

// ---------------------------------------------------------------- 9

fn snapshot(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| matches!(p.extension().and_then(|e| e.to_str()), Some("csv" | "svg")))
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), std::fs::read(&p).unwrap()))
        .collect()
}

fn bench_determinism() -> Outcome {
    let root = tempfile::tempdir().unwrap();
    let mut runs = Vec::new();
    for name in ["a", "b"] {
        let out = root.path().join(name);
        let code = betamix_cli::run(["betamix", "bench", "--seed", "7", "--output", out.to_str().unwrap()]);
        assert_eq!(code, 0, "bench run failed");
        runs.push(snapshot(&out));
    }
    let svgs = runs[0].keys().filter(|k| k.ends_with(".svg")).count();
    let rows = runs[0].get("metrics.csv").map_or(0, |c| c.iter().filter(|&&b| b == b'\n').count() - 1);
    let same = runs[0] == runs[1];
    outcome(
        same && svgs == 15 && rows == 15,
        format!("{} files compared, identical: {same}; {svgs} SVGs, {rows} metric rows", runs[0].len()),
    )
}

// ---------------------------------------------------------------- 10

fn serialization() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut failures = 0;
    for i in 0..100u64 {
        let c = rng.random_range(1..=3);
        let truth = MixtureModel::new(
            vec![1.0 / c as f64; c],
            (0..c)
                .map(|_| BetaParams::new(std::array::from_fn(|_| rng.random_range(0.3..12.0))).unwrap())
                .collect(),
        )
        .unwrap();
        let (data, _) = sampled(&truth, 40, 1000 + i);
        let cfg = FitConfig {
            seed: i,
            restarts: 1,
            epochs: 15,
            ..FitConfig::default()
        };
        let model = emfit::fit(&data, c, &cfg).unwrap().model;
        let back = emfit::load(&emfit::save(&model)).unwrap();
        let bitwise = back.weights().iter().zip(model.weights()).all(|(a, b)| a.to_bits() == b.to_bits())
            && back
                .components()
                .iter()
                .zip(model.components())
                .all(|(a, b)| a.alpha().iter().zip(b.alpha()).all(|(u, v)| u.to_bits() == v.to_bits()));
        if !bitwise {
            failures += 1;
        }
    }
    outcome(failures == 0, format!("{} of 100 fitted models round-trip bit for bit", 100 - failures))
}

// ----------------------------------------------------------------

fn report(name: &str, run: &dyn Fn() -> Outcome) -> bool {
    let t = Instant::now();
    let o = run();
    println!(
        "{} {name}: {} [{:.1} s]",
        if o.pass { "PASS" } else { "FAIL" },
        o.detail,
        t.elapsed().as_secs_f64()
    );
    o.pass
}

fn main() {
    let mut all_pass = true;
    all_pass &= report("1 density normalization", &normalization);
    all_pass &= report("2 uniform-shape density oracle", &uniform_oracle);
    all_pass &= report("3 correlation signs", &correlation_signs);
    all_pass &= report("4 sampler vs density", &sampler_agreement);
    all_pass &= report("5 EM ascent", &em_ascent);
    all_pass &= report("6 parameter recovery", &recovery);
    let t = Instant::now();
    for (name, o) in comparisons() {
        all_pass &= o.pass;
        println!("{} {name}: {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
    }
    println!("     (criterion 7 took {:.1} s)", t.elapsed().as_secs_f64());
    all_pass &= report("8 metric oracles", &metric_oracles);
    all_pass &= report("9 bench determinism", &bench_determinism);
    all_pass &= report("10 model round trip", &serialization);
    if !all_pass {
        std::process::exit(1);
    }
}
