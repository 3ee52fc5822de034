use betamix::data::{self, split_sizes, Dataset, RawMatrix};
use proptest::prelude::*;

fn matrix(rows: usize, cols: usize) -> impl Strategy<Value = RawMatrix> {
    prop::collection::vec(prop::collection::vec(-1e3..1e3f64, cols), rows)
        .prop_filter_map("constant column", |r| {
            let m = RawMatrix::new(r, None).ok()?;
            data::normalize(&m).ok().map(|_| m)
        })
}

proptest! {
    #[test]
    fn normalize_is_idempotent(m in matrix(12, 3)) {
        let once = data::normalize(&m).unwrap();
        let twice = data::normalize(&once).unwrap();
        for (a, b) in once.rows().iter().flatten().zip(twice.rows().iter().flatten()) {
            prop_assert!((a - b).abs() <= 1e-15, "{a} vs {b}");
        }
        for j in 0..3 {
            let lo = once.column(j).fold(f64::INFINITY, f64::min);
            let hi = once.column(j).fold(f64::NEG_INFINITY, f64::max);
            prop_assert_eq!((lo, hi), (0.01, 0.99));
        }
    }

    #[test]
    fn pca_ignores_rotations(m in matrix(20, 3), a in 0.0..std::f64::consts::TAU, b in 0.0..std::f64::consts::TAU) {
        prop_assume!(data::pca_fit(&m).map(|p| p.eigenvalues[0] > 1.01 * p.eigenvalues[1] && p.eigenvalues[1] > 1.01 * p.eigenvalues[2]).unwrap_or(false));
        // rotation about z then about x
        let (ca, sa, cb, sb) = (a.cos(), a.sin(), b.cos(), b.sin());
        let rot = [[ca, -sa, 0.0], [cb * sa, cb * ca, -sb], [sb * sa, sb * ca, cb]];
        let rotated: Vec<Vec<f64>> = m
            .rows()
            .iter()
            .map(|r| (0..3).map(|i| (0..3).map(|j| rot[i][j] * r[j]).sum()).collect())
            .collect();
        let p1 = data::pca_2d(&m).unwrap();
        let p2 = data::pca_2d(&RawMatrix::new(rotated, None).unwrap()).unwrap();
        for j in 0..2 {
            let c1: Vec<f64> = p1.column(j).collect();
            let c2: Vec<f64> = p2.column(j).collect();
            let same = c1.iter().zip(&c2).all(|(u, v)| (u - v).abs() < 1e-6);
            let flipped = c1.iter().zip(&c2).all(|(u, v)| (u - (1.0 - v)).abs() < 1e-6);
            prop_assert!(same || flipped, "column {}", j);
        }
    }
}

#[test]
fn label_counts_follow_split_rule() {
    for n in 3..1000 {
        for ds in [Dataset::Circles, Dataset::Varied, Dataset::AnisoNeg, Dataset::Blobs] {
            let set = ds.generate(n, n as u64).unwrap();
            let mut counts = vec![0; ds.clusters()];
            for &l in &set.labels {
                counts[l] += 1;
            }
            assert_eq!(counts, split_sizes(n, ds.clusters()), "{ds} n={n}");
        }
    }
}

#[test]
fn planar_data_reconstructs_exactly() {
    // points on the plane spanned by u and v through an offset
    let u = [1.0, 2.0, -1.0];
    let v = [0.5, -1.0, 3.0];
    let rows: Vec<Vec<f64>> = (0..50)
        .map(|i| {
            let s = (i as f64 * 0.37).sin() * 4.0;
            let t = (i as f64 * 1.13).cos() * 2.0;
            (0..3).map(|j| 7.0 + s * u[j] + t * v[j]).collect()
        })
        .collect();
    let m = RawMatrix::new(rows.clone(), None).unwrap();
    let pca = data::pca_fit(&m).unwrap();
    for r in &rows {
        let back = pca.reconstruct(pca.project(r));
        for j in 0..3 {
            assert!((back[j] - r[j]).abs() < 1e-9);
        }
    }
    assert!(pca.eigenvalues[0] >= pca.eigenvalues[1]);
}

#[test]
fn projected_variances_decrease() {
    let rows: Vec<Vec<f64>> = (0..40)
        .map(|i| {
            let i = i as f64;
            vec![(i * 0.7).sin() * 5.0, (i * 1.3).cos() * 2.0 + i * 0.01, (i * 0.2).sin()]
        })
        .collect();
    let m = RawMatrix::new(rows.clone(), None).unwrap();
    let pca = data::pca_fit(&m).unwrap();
    let proj: Vec<[f64; 2]> = rows.iter().map(|r| pca.project(r)).collect();
    let var = |j: usize| proj.iter().map(|p| p[j] * p[j]).sum::<f64>();
    assert!(var(0) >= var(1));
}

#[test]
fn axis_aligned_projection_is_axis_permutation() {
    // uncorrelated columns: the principal axes are the coordinate axes
    for (rows, first) in [
        (vec![vec![-3.0, 0.0], vec![3.0, 0.0], vec![0.0, -1.0], vec![0.0, 1.0]], 0),
        (vec![vec![-1.0, 0.0], vec![1.0, 0.0], vec![0.0, -3.0], vec![0.0, 3.0]], 1),
    ] {
        let m = RawMatrix::new(rows, None).unwrap();
        let p = data::pca_fit(&m).unwrap();
        for r in m.rows() {
            let s = p.project(r);
            assert_eq!(s[0].abs(), (r[first] - p.mean[first]).abs());
            assert_eq!(s[1].abs(), (r[1 - first] - p.mean[1 - first]).abs());
        }
    }
}

#[test]
fn csv_file_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("d.csv");
    let set = Dataset::Varied.generate(60, 3).unwrap();
    data::write_csv(&set.to_raw(), &path).unwrap();
    let back = data::read_csv(&path, true).unwrap();
    assert_eq!(back, set.to_raw());
}
