//! Model documents.
//!
//! A model is stored as a small TOML document:
//!
//! ```toml
//! format = "fbbmm-model/1"
//! clusters = 2
//! weights = [0.5, 0.5]
//!
//! [[components]]
//! alpha = [8.0, 2.0, 2.0, 2.0]
//!
//! [[components]]
//! alpha = [2.0, 2.0, 2.0, 8.0]
//! ```
//!
//! Floats are written in shortest round-trip form, so `load(save(m)) == m`
//! bit for bit.

use serde::{Deserialize, Serialize};

use super::{MixtureModel, WEIGHT_SUM_TOL};
use crate::bbeta::{BetaParams, ALPHA_MAX, ALPHA_MIN};
use crate::error::{Error, Result};

pub const FORMAT_VERSION: &str = "fbbmm-model/1";

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Document {
    format: String,
    clusters: usize,
    weights: Vec<f64>,
    components: Vec<Component>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Component {
    alpha: Vec<f64>,
}

pub fn save(model: &MixtureModel) -> String {
    let doc = Document {
        format: FORMAT_VERSION.to_string(),
        clusters: model.clusters(),
        weights: model.weights().to_vec(),
        components: model
            .components()
            .iter()
            .map(|c| Component { alpha: c.alpha().to_vec() })
            .collect(),
    };
    toml::to_string(&doc).expect("model documents always serialize")
}

pub fn load(text: &str) -> Result<MixtureModel> {
    let doc: Document = toml::from_str(text).map_err(|e| Error::Document(e.message().to_string()))?;
    if doc.format != FORMAT_VERSION {
        return Err(Error::Document(format!(
            "format: expected \"{FORMAT_VERSION}\", found \"{}\"",
            doc.format
        )));
    }
    if doc.clusters == 0 {
        return Err(Error::Document("clusters: must be >= 1".into()));
    }
    if doc.weights.len() != doc.clusters {
        return Err(Error::Document(format!(
            "weights: {} entries for {} clusters",
            doc.weights.len(),
            doc.clusters
        )));
    }
    if doc.components.len() != doc.clusters {
        return Err(Error::Document(format!(
            "components: {} entries for {} clusters",
            doc.components.len(),
            doc.clusters
        )));
    }
    for (i, w) in doc.weights.iter().enumerate() {
        if !(w.is_finite() && *w >= 0.0) {
            return Err(Error::Document(format!("weights[{i}]: {w} is not a probability")));
        }
    }
    let sum: f64 = doc.weights.iter().sum();
    if (sum - 1.0).abs() > WEIGHT_SUM_TOL {
        return Err(Error::Document(format!("weights: sum is {sum}, expected 1")));
    }
    let mut components = Vec::with_capacity(doc.clusters);
    for (c, comp) in doc.components.iter().enumerate() {
        let alpha: [f64; 4] = comp.alpha.as_slice().try_into().map_err(|_| {
            Error::Document(format!("components[{c}].alpha: expected 4 values, found {}", comp.alpha.len()))
        })?;
        for (j, a) in alpha.iter().enumerate() {
            if !(ALPHA_MIN..=ALPHA_MAX).contains(a) {
                return Err(Error::Document(format!(
                    "components[{c}].alpha[{j}]: {a} is outside [ALPHA_MIN = {ALPHA_MIN}, ALPHA_MAX = {ALPHA_MAX}]"
                )));
            }
        }
        components.push(BetaParams::new(alpha)?);
    }
    MixtureModel::new(doc.weights, components)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn model() -> MixtureModel {
        MixtureModel::new(
            vec![0.3, 0.7],
            vec![
                BetaParams::new([8.0, 2.0, 2.0, 2.0]).unwrap(),
                BetaParams::new([0.1234567890123456, 2.0, 49.99999999999999, 0.001]).unwrap(),
            ],
        )
        .unwrap()
    }

    #[test]
    fn round_trip() {
        let m = model();
        let text = save(&m);
        assert!(text.starts_with("format = \"fbbmm-model/1\""));
        assert_eq!(load(&text).unwrap(), m);
    }

    #[test]
    fn rejects_bad_weight_sum() {
        let text = save(&model()).replace("weights = [0.3, 0.7]", "weights = [0.2, 0.7]");
        let err = load(&text).unwrap_err().to_string();
        assert!(err.contains("weights"), "{err}");
    }

    #[test]
    fn rejects_zero_alpha() {
        let text = save(&model()).replace("alpha = [8.0,", "alpha = [0.0,");
        let err = load(&text).unwrap_err().to_string();
        assert!(err.contains("ALPHA_MIN") && err.contains("components[0].alpha[0]"), "{err}");
    }

    #[test]
    fn rejects_wrong_version_and_shape() {
        let text = save(&model()).replace("fbbmm-model/1", "fbbmm-model/2");
        assert!(load(&text).unwrap_err().to_string().contains("format"));
        let text = save(&model()).replace("clusters = 2", "clusters = 3");
        assert!(load(&text).is_err());
        assert!(load("not toml at all [").is_err());
    }
}
