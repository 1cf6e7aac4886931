//! A small graph-isomorphism-network forward pass over anchored stars.
//!
//! Per layer, every vertex sums its neighbors' hidden states, combines with
//! its own state scaled by `1 + epsilon`, and passes through a one-layer
//! MLP (`tanh(Wx + b)`). A sum readout over all star vertices followed by a
//! final linear map yields the embedding. Every floating-point sum
//! accumulates its addends in a canonical order (lexicographic on the
//! numeric component values), so isomorphic stars produce bit-identical
//! embeddings regardless of how their leaves are listed in memory.

use std::io::{Read, Write};
use std::path::Path;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

use crate::bytes::Reader;
use crate::feature::AnchoredStar;
use crate::graph::Label;
use crate::{Error, Result};

const MODEL_MAGIC: &[u8; 8] = b"GAE-GIN1";

/// Deterministic per-label input encodings: one n-vector per label code.
#[derive(Debug, Clone, PartialEq)]
pub struct LabelFeatures {
    rows: Vec<f64>,
    sigma: u32,
    dim: usize,
}

impl LabelFeatures {
    /// Seeded table; identical `(sigma, dim, seed)` triples give
    /// bit-identical tables, distinct labels get distinct rows.
    pub fn init(sigma: u32, dim: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rows = (0..sigma as usize * dim).map(|_| rng.random_range(-1.0..1.0)).collect();
        LabelFeatures { rows, sigma, dim }
    }

    pub fn row(&self, label: Label) -> Result<&[f64]> {
        if label.0 >= self.sigma {
            return Err(Error::LabelOutOfRange(label.0, self.sigma));
        }
        let start = label.0 as usize * self.dim;
        Ok(&self.rows[start..start + self.dim])
    }

    pub fn sigma(&self) -> u32 {
        self.sigma
    }
}

/// One message-passing layer: `h' = tanh(W((1 + eps) h + sum_neighbors) + b)`.
#[derive(Debug, Clone, PartialEq)]
pub struct GinLayer {
    pub epsilon: f64,
    /// `dim x dim`, row-major.
    pub weight: Vec<f64>,
    pub bias: Vec<f64>,
}

/// Configuration for seeding a fresh model.
#[derive(Debug, Clone)]
pub struct ModelConfig {
    pub layer_count: usize,
    pub feature_dim: usize,
    pub output_dim: usize,
    pub epsilon: f64,
    pub seed: u64,
}

impl Default for ModelConfig {
    fn default() -> Self {
        ModelConfig { layer_count: 2, feature_dim: 10, output_dim: 3, epsilon: 0.0, seed: 7 }
    }
}

/// The embedding model: label encodings, message-passing layers, and the
/// final linear map from the readout to the output space.
#[derive(Debug, Clone, PartialEq)]
pub struct GinModel {
    features: LabelFeatures,
    layers: Vec<GinLayer>,
    /// `output_dim x feature_dim`, row-major.
    final_weight: Vec<f64>,
    feature_dim: usize,
    output_dim: usize,
    seed: u64,
    digest: u64,
}

impl GinModel {
    /// Fresh model with seeded weights; usable as-is (untrained) or as the
    /// starting point for training.
    pub fn seeded(sigma: u32, cfg: &ModelConfig) -> Self {
        let features = LabelFeatures::init(sigma, cfg.feature_dim, cfg.seed);
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(0x9e37_79b9));
        let n = cfg.feature_dim;
        let m = cfg.output_dim;
        let hidden_bound = (3.0 / n as f64).sqrt();
        let layers = (0..cfg.layer_count)
            .map(|_| GinLayer {
                epsilon: cfg.epsilon,
                weight: (0..n * n).map(|_| rng.random_range(-hidden_bound..hidden_bound)).collect(),
                bias: vec![0.0; n],
            })
            .collect();
        let out_bound = (6.0 / (n + m) as f64).sqrt();
        let final_weight = (0..m * n).map(|_| rng.random_range(-out_bound..out_bound)).collect();
        let mut model = GinModel {
            features,
            layers,
            final_weight,
            feature_dim: n,
            output_dim: m,
            seed: cfg.seed,
            digest: 0,
        };
        model.refresh_digest();
        model
    }

    pub fn feature_dim(&self) -> usize {
        self.feature_dim
    }

    pub fn output_dim(&self) -> usize {
        self.output_dim
    }

    pub fn layer_count(&self) -> usize {
        self.layers.len()
    }

    pub fn sigma_size(&self) -> u32 {
        self.features.sigma()
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Content digest of all weights; equal weights give equal digests.
    pub fn digest(&self) -> u64 {
        self.digest
    }

    fn weight_bytes(&self) -> Vec<u8> {
        let mut bytes = Vec::new();
        for layer in &self.layers {
            bytes.extend_from_slice(&layer.epsilon.to_le_bytes());
            for w in &layer.weight {
                bytes.extend_from_slice(&w.to_le_bytes());
            }
            for b in &layer.bias {
                bytes.extend_from_slice(&b.to_le_bytes());
            }
        }
        for w in &self.final_weight {
            bytes.extend_from_slice(&w.to_le_bytes());
        }
        for f in &self.features.rows {
            bytes.extend_from_slice(&f.to_le_bytes());
        }
        bytes
    }

    pub(crate) fn refresh_digest(&mut self) {
        let mut hasher = Sha256::new();
        hasher.update(self.weight_bytes());
        let out = hasher.finalize();
        self.digest = u64::from_le_bytes(out[..8].try_into().expect("sha256 is 32 bytes"));
    }

    /// Embeds a star; the output is invariant under any reordering of the
    /// star's leaves down to the last bit.
    pub fn forward(&self, star: &AnchoredStar) -> Result<Vec<f64>> {
        self.run_forward(star, None)
    }

    pub(crate) fn forward_with_tape(&self, star: &AnchoredStar) -> Result<(Vec<f64>, ForwardTape)> {
        let mut tape = ForwardTape::default();
        let out = self.run_forward(star, Some(&mut tape))?;
        Ok((out, tape))
    }

    fn run_forward(
        &self,
        star: &AnchoredStar,
        mut tape: Option<&mut ForwardTape>,
    ) -> Result<Vec<f64>> {
        let n = self.feature_dim;
        // Vertex layout: 0 = center, 1 = anchor endpoint, 2.. = leaves.
        let vertex_count = star.leaf_count() + 2;
        let mut h = Vec::with_capacity(vertex_count * n);
        h.extend_from_slice(self.features.row(star.center_label)?);
        h.extend_from_slice(self.features.row(star.anchor_label)?);
        for &leaf in &star.leaf_labels {
            h.extend_from_slice(self.features.row(leaf)?);
        }

        if let Some(t) = tape.as_deref_mut() {
            t.hiddens.clear();
            t.inputs.clear();
            t.hiddens.push(h.clone());
        }

        let mut next = vec![0.0; vertex_count * n];
        let mut center_agg = vec![0.0; n];
        for layer in &self.layers {
            // Neighbor aggregation: the center sums everyone else (in
            // canonical sorted order); every other vertex sees the center.
            sum_canonical(
                (1..vertex_count).map(|v| &h[v * n..(v + 1) * n]),
                &mut center_agg,
            );
            let scale = 1.0 + layer.epsilon;
            let mut inputs = vec![0.0; vertex_count * n];
            for v in 0..vertex_count {
                let agg: &[f64] = if v == 0 { &center_agg } else { &h[..n] };
                let x = &mut inputs[v * n..(v + 1) * n];
                for i in 0..n {
                    x[i] = scale * h[v * n + i] + agg[i];
                }
                let z = &mut next[v * n..(v + 1) * n];
                mat_vec(&layer.weight, x, n, n, z);
                for (zi, bi) in z.iter_mut().zip(&layer.bias) {
                    *zi = (*zi + bi).tanh();
                }
            }
            std::mem::swap(&mut h, &mut next);
            if let Some(t) = tape.as_deref_mut() {
                t.inputs.push(inputs);
                t.hiddens.push(h.clone());
            }
        }

        let mut readout = vec![0.0; n];
        sum_canonical((0..vertex_count).map(|v| &h[v * n..(v + 1) * n]), &mut readout);
        let mut out = vec![0.0; self.output_dim];
        mat_vec(&self.final_weight, &readout, self.output_dim, n, &mut out);
        if let Some(t) = tape {
            t.readout = readout;
        }
        Ok(out)
    }

    // Flat parameter indexing for the optimizer and gradient checks. Layout:
    // per layer W then b, then the final weight. Epsilon is a fixed scalar,
    // not a parameter.
    pub fn param_count(&self) -> usize {
        let n = self.feature_dim;
        self.layers.len() * (n * n + n) + self.output_dim * n
    }

    pub fn param(&self, idx: usize) -> f64 {
        let n = self.feature_dim;
        let per_layer = n * n + n;
        let layer = idx / per_layer;
        if layer < self.layers.len() {
            let off = idx % per_layer;
            if off < n * n {
                self.layers[layer].weight[off]
            } else {
                self.layers[layer].bias[off - n * n]
            }
        } else {
            self.final_weight[idx - self.layers.len() * per_layer]
        }
    }

    pub fn set_param(&mut self, idx: usize, value: f64) {
        let n = self.feature_dim;
        let per_layer = n * n + n;
        let layer = idx / per_layer;
        if layer < self.layers.len() {
            let off = idx % per_layer;
            if off < n * n {
                self.layers[layer].weight[off] = value;
            } else {
                self.layers[layer].bias[off - n * n] = value;
            }
        } else {
            self.final_weight[idx - self.layers.len() * per_layer] = value;
        }
    }

    pub(crate) fn layers(&self) -> &[GinLayer] {
        &self.layers
    }

    pub(crate) fn final_weight(&self) -> &[f64] {
        &self.final_weight
    }

    /// Replaces all weights from a hand-built description; used by tests
    /// that pin exact arithmetic.
    pub fn from_parts(
        features: LabelFeatures,
        layers: Vec<GinLayer>,
        final_weight: Vec<f64>,
        output_dim: usize,
        seed: u64,
    ) -> Self {
        let feature_dim = features.dim;
        let mut model =
            GinModel { features, layers, final_weight, feature_dim, output_dim, seed, digest: 0 };
        model.refresh_digest();
        model
    }

    /// Writes the versioned binary model file and returns its byte size.
    pub fn save(&self, path: &Path) -> Result<u64> {
        let mut buf = Vec::new();
        buf.extend_from_slice(MODEL_MAGIC);
        buf.extend_from_slice(&(self.layers.len() as u32).to_le_bytes());
        buf.extend_from_slice(&(self.feature_dim as u32).to_le_bytes());
        buf.extend_from_slice(&(self.output_dim as u32).to_le_bytes());
        buf.extend_from_slice(&self.features.sigma.to_le_bytes());
        buf.extend_from_slice(&self.seed.to_le_bytes());
        buf.extend_from_slice(&self.weight_bytes());
        buf.extend_from_slice(&self.digest.to_le_bytes());
        let mut file = std::fs::File::create(path)?;
        file.write_all(&buf)?;
        Ok(buf.len() as u64)
    }

    /// Reads a model file, recomputing and verifying the weight digest.
    pub fn load(path: &Path) -> Result<Self> {
        let mut bytes = Vec::new();
        std::fs::File::open(path)?.read_to_end(&mut bytes)?;
        let mut r = Reader::new(&bytes);
        if r.take(8)? != MODEL_MAGIC {
            return Err(Error::BadMagic { expected: "GAE-GIN1" });
        }
        let layer_count = r.u32()? as usize;
        let n = r.u32()? as usize;
        let m = r.u32()? as usize;
        let sigma = r.u32()?;
        let seed = r.u64()?;
        let mut layers = Vec::with_capacity(layer_count);
        for _ in 0..layer_count {
            let epsilon = r.f64()?;
            let weight = r.f64_vec(n * n)?;
            let bias = r.f64_vec(n)?;
            layers.push(GinLayer { epsilon, weight, bias });
        }
        let final_weight = r.f64_vec(m * n)?;
        let rows = r.f64_vec(sigma as usize * n)?;
        let stored_digest = r.u64()?;
        r.expect_end()?;

        let features = LabelFeatures { rows, sigma, dim: n };
        let mut model = GinModel {
            features,
            layers,
            final_weight,
            feature_dim: n,
            output_dim: m,
            seed,
            digest: 0,
        };
        model.refresh_digest();
        if model.digest != stored_digest {
            return Err(Error::ChecksumMismatch);
        }
        Ok(model)
    }
}

/// Per-star intermediate values recorded for backpropagation.
#[derive(Debug, Default)]
pub(crate) struct ForwardTape {
    /// `hiddens[t]` are the vertex states entering layer `t`;
    /// `hiddens[layer_count]` are the final states.
    pub hiddens: Vec<Vec<f64>>,
    /// `inputs[t][v]` is the combined vector fed to layer `t`'s MLP.
    pub inputs: Vec<Vec<f64>>,
    pub readout: Vec<f64>,
}

/// Sums vectors in a canonical order: addends are sorted lexicographically
/// by component value before accumulation, so the floating-point result is
/// independent of caller-side ordering.
pub(crate) fn sum_canonical<'a>(addends: impl Iterator<Item = &'a [f64]>, out: &mut [f64]) {
    let mut sorted: Vec<&[f64]> = addends.collect();
    sorted.sort_unstable_by(|a, b| {
        for (x, y) in a.iter().zip(b.iter()) {
            match x.total_cmp(y) {
                std::cmp::Ordering::Equal => continue,
                other => return other,
            }
        }
        std::cmp::Ordering::Equal
    });
    out.fill(0.0);
    for v in sorted {
        for (o, x) in out.iter_mut().zip(v) {
            *o += x;
        }
    }
}

pub(crate) fn mat_vec(mat: &[f64], x: &[f64], rows: usize, cols: usize, out: &mut [f64]) {
    for r in 0..rows {
        let row = &mat[r * cols..(r + 1) * cols];
        let mut acc = 0.0;
        for (w, v) in row.iter().zip(x) {
            acc += w * v;
        }
        out[r] = acc;
    }
}
