//! Shared fixtures for the criterion benchmarks.

use betamix::bbeta::BetaParams;
use betamix::emfit::{self, MixtureModel};
use betamix::DataMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Two well separated components in opposite corners.
pub fn corner_model() -> MixtureModel {
    MixtureModel::new(
        vec![0.5, 0.5],
        vec![
            BetaParams::new([8.0, 2.0, 2.0, 2.0]).expect("in bounds"),
            BetaParams::new([2.0, 2.0, 2.0, 8.0]).expect("in bounds"),
        ],
    )
    .expect("valid model")
}

pub fn corner_data(n: usize, seed: u64) -> DataMatrix {
    emfit::sample(&corner_model(), n, &mut ChaCha8Rng::seed_from_u64(seed))
        .expect("sampling succeeds")
        .0
}

/// Shapes spanning the cheap and the expensive ends of the quadrature.
pub fn shape_cases() -> Vec<(&'static str, BetaParams)> {
    [
        ("uniform", [1.0, 1.0, 1.0, 1.0]),
        ("moderate", [4.0, 2.0, 4.0, 0.5]),
        ("spiky", [0.05, 0.3, 0.2, 0.01]),
        ("peaked", [40.0, 12.0, 9.0, 30.0]),
    ]
    .into_iter()
    .map(|(name, a)| (name, BetaParams::new(a).expect("in bounds")))
    .collect()
}
