//! k-means and Gaussian mixture baselines.

mod gmm;
mod kmeans;

pub use gmm::{gmm_fit, gmm_predict, Cov2, GaussianMixtureModel, GmmFit, COVARIANCE_REG};
pub use kmeans::{inertia, kmeans_fit, kmeans_fit_with, kmeans_plus_plus, kmeans_predict, KMeansModel};

pub mod defaults {
    pub use super::gmm::{DEFAULT_EPOCHS as GMM_EPOCHS, DEFAULT_TOL as GMM_TOL};
    pub use super::kmeans::DEFAULT_ITERS as KMEANS_ITERS;
}
