//! Order-invariant embedding keys for anchored stars.
//!
//! Three interchangeable backends produce [`EmbeddingKey`]s: a trained
//! graph-isomorphism network, the same network with seeded untrained
//! weights, and a deterministic hash of the star's canonical form. All
//! three map isomorphic stars to equal keys bit-exactly (the exactness
//! contract); they differ only in how rarely non-isomorphic stars collide,
//! which is measured by [`conflict_ratio`].

mod gin;
mod train;
mod wl;

pub use gin::{GinLayer, GinModel, LabelFeatures, ModelConfig};
pub use train::{
    assign_training_labels, build_training_set, compute_loss, loss_and_gradient, train_model,
    GradBuffer, LabelGridConfig, TrainConfig, TrainingSet,
};
pub use wl::wl_hash_key;

use crate::feature::AnchoredStar;
use crate::{Error, Result};

/// Raw embedding components before quantization.
pub type EmbeddingVector = Vec<f64>;

/// Which key producer a key or an index belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum BackendTag {
    Gin,
    Wl,
}

impl BackendTag {
    pub fn name(self) -> &'static str {
        match self {
            BackendTag::Gin => "gin",
            BackendTag::Wl => "wl",
        }
    }
}

/// Quantized, hashable digest of an embedding.
///
/// Keys from different backends or different models never compare equal:
/// the tag and the producing model's digest are part of the key.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EmbeddingKey {
    pub components: Vec<i64>,
    pub backend: BackendTag,
    pub model_digest: u64,
}

const QUANT_SCALE: f64 = 1e6;

/// Quantizes an embedding vector into a key: `round(o_i * 10^6)` per
/// component, half away from zero.
pub fn embedding_key(vec: &[f64], model: &GinModel) -> Result<EmbeddingKey> {
    let mut components = Vec::with_capacity(vec.len());
    for &x in vec {
        if !x.is_finite() {
            return Err(Error::NonFiniteEmbedding(x));
        }
        components.push((x * QUANT_SCALE).round() as i64);
    }
    Ok(EmbeddingKey { components, backend: BackendTag::Gin, model_digest: model.digest() })
}

/// A selected embedding backend.
#[derive(Debug, Clone)]
pub enum Backend {
    Gin(GinModel),
    Wl,
}

impl Backend {
    pub fn tag(&self) -> BackendTag {
        match self {
            Backend::Gin(_) => BackendTag::Gin,
            Backend::Wl => BackendTag::Wl,
        }
    }

    /// Digest of the producing model; zero for the hash backend.
    pub fn model_digest(&self) -> u64 {
        match self {
            Backend::Gin(m) => m.digest(),
            Backend::Wl => 0,
        }
    }

    /// Key for a star under this backend.
    pub fn key_for_star(&self, star: &AnchoredStar) -> Result<EmbeddingKey> {
        match self {
            Backend::Gin(model) => {
                let vec = model.forward(star)?;
                embedding_key(&vec, model)
            }
            Backend::Wl => Ok(wl_hash_key(star)),
        }
    }

    /// Largest label code the backend can embed, if bounded.
    pub fn sigma_bound(&self) -> Option<u32> {
        match self {
            Backend::Gin(model) => Some(model.sigma_size()),
            Backend::Wl => None,
        }
    }
}

/// Fraction of non-isomorphic sampled pairs whose keys collide.
///
/// Isomorphic pairs (equal canonical triples) are excluded from the
/// denominator; a sample with no non-isomorphic pair yields 0.
pub fn conflict_ratio(backend: &Backend, pairs: &[(AnchoredStar, AnchoredStar)]) -> Result<f64> {
    let mut considered = 0u64;
    let mut conflicts = 0u64;
    for (a, b) in pairs {
        if a.center_label == b.center_label
            && a.anchor_label == b.anchor_label
            && a.leaf_labels == b.leaf_labels
        {
            continue;
        }
        considered += 1;
        if backend.key_for_star(a)? == backend.key_for_star(b)? {
            conflicts += 1;
        }
    }
    if considered == 0 {
        Ok(0.0)
    } else {
        Ok(conflicts as f64 / considered as f64)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Label;

    #[test]
    fn quantization_rounds_half_away_from_zero() {
        let model = GinModel::seeded(2, &ModelConfig::default());
        let key = embedding_key(&[0.598_000_4, 0.636_000_1, 0.0], &model).unwrap();
        assert_eq!(key.components, vec![598_000, 636_000, 0]);
        let key = embedding_key(&[0.000_000_5, -0.000_000_5, -0.0], &model).unwrap();
        assert_eq!(key.components, vec![1, -1, 0]);
        let zero = embedding_key(&[0.0, 0.0, 0.0], &model).unwrap();
        assert_eq!(zero.components, vec![0, 0, 0]);
    }

    #[test]
    fn equal_vectors_make_equal_keys() {
        let model = GinModel::seeded(2, &ModelConfig::default());
        let v = vec![1.25, -3.5, 0.125];
        assert_eq!(embedding_key(&v, &model).unwrap(), embedding_key(&v.clone(), &model).unwrap());
    }

    #[test]
    fn non_finite_components_are_rejected() {
        let model = GinModel::seeded(2, &ModelConfig::default());
        assert!(matches!(
            embedding_key(&[f64::NAN, 0.0, 0.0], &model),
            Err(Error::NonFiniteEmbedding(_))
        ));
        assert!(embedding_key(&[f64::INFINITY, 0.0, 0.0], &model).is_err());
    }

    #[test]
    fn conflict_ratio_excludes_isomorphic_pairs() {
        let a = AnchoredStar::new(Label(0), Label(1), vec![Label(2), Label(1)]);
        let b = AnchoredStar::new(Label(0), Label(1), vec![Label(1), Label(2)]);
        // Only isomorphic pairs sampled: denominator empty, ratio 0.
        let ratio = conflict_ratio(&Backend::Wl, &[(a.clone(), b.clone()), (b.clone(), a.clone())])
            .unwrap();
        assert_eq!(ratio, 0.0);
        let c = AnchoredStar::new(Label(0), Label(1), vec![Label(1)]);
        let ratio = conflict_ratio(&Backend::Wl, &[(a.clone(), b), (a, c)]).unwrap();
        assert_eq!(ratio, 0.0);
    }
}
