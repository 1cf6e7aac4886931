//! Deterministic first-order training of the embedding model.
//!
//! The training set is every anchored star the index build will file (one
//! entry per star, no isomorphism testing). Each star gets a unique target
//! vector from an axis-aligned grid whose points sit at least `xi` apart;
//! the hinge loss then pushes every within-batch pair of embeddings at
//! least as far apart as their targets. Everything is seeded: same graph,
//! same configs, same seeds give a bit-identical model digest.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::feature::{enumerate_anchored_stars, AnchoredStar};
use crate::graph::{normalize_edge, Graph, OrientedEdge};
use crate::{Error, Result};

use super::gin::{ForwardTape, GinModel, ModelConfig};

/// Epochs, step size, batch size, and the shuffling seed.
#[derive(Debug, Clone)]
pub struct TrainConfig {
    pub epochs: usize,
    pub learning_rate: f64,
    pub batch_size: usize,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig { epochs: 20, learning_rate: 1e-3, batch_size: 1024, seed: 11 }
    }
}

/// Target-grid parameters: minimum spacing and an optional value range.
///
/// Without an explicit range the grid starts at 0 with spacing exactly
/// `xi`; an explicit range only widens feasibility checks, values are still
/// packed at minimum spacing from its lower end.
#[derive(Debug, Clone)]
pub struct LabelGridConfig {
    pub xi: f64,
    pub range: Option<(f64, f64)>,
    pub seed: u64,
}

impl Default for LabelGridConfig {
    fn default() -> Self {
        LabelGridConfig { xi: 1.0, range: None, seed: 13 }
    }
}

/// The set `D`: stars in deterministic enumeration order with their target
/// vectors.
#[derive(Debug)]
pub struct TrainingSet {
    pub stars: Vec<AnchoredStar>,
    pub labels: Vec<Vec<f64>>,
    pub xi: f64,
    pub range: (f64, f64),
}

fn grid_geometry(count: usize, m: usize, xi: f64, range: Option<(f64, f64)>) -> Result<(usize, f64, f64)> {
    assert!(count >= 1, "need at least one training label");
    assert!(m >= 2, "target vectors need at least two dimensions");
    assert!(xi > 0.0, "grid spacing must be positive");
    let mut g = (count as f64).powf(1.0 / m as f64).floor() as usize;
    g = g.max(1);
    while (g as u128).pow(m as u32) < count as u128 {
        g += 1;
    }
    let span = (g - 1) as f64 * xi;
    let (a, b) = range.unwrap_or((0.0, span));
    if b - a < span {
        return Err(Error::InfeasibleLabelGrid { needed: g, xi, a, b });
    }
    Ok((g, a, b))
}

/// Builds `count` unique m-dimensional target vectors: `g = ceil(count^(1/m))`
/// axis values spaced `xi` apart, the first `count` grid points in
/// lexicographic order, assignment shuffled by `seed`. All pairwise
/// Euclidean distances are at least `xi`.
pub fn assign_training_labels(
    count: usize,
    m: usize,
    xi: f64,
    range: Option<(f64, f64)>,
    seed: u64,
) -> Result<Vec<Vec<f64>>> {
    let (g, a, _b) = grid_geometry(count, m, xi, range)?;
    let axis: Vec<f64> = (0..g).map(|i| a + i as f64 * xi).collect();
    let mut points = Vec::with_capacity(count);
    for idx in 0..count {
        let mut point = vec![0.0; m];
        let mut rest = idx;
        for j in (0..m).rev() {
            point[j] = axis[rest % g];
            rest /= g;
        }
        points.push(point);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    points.shuffle(&mut rng);
    Ok(points)
}

/// Collects the training set per the index-build orientation rules: for
/// each label-normalized orientation, stars centered at `from` when `from`
/// is sparse, else centered at `to` when `to` is sparse; dense-dense edges
/// contribute nothing.
pub fn build_training_set(
    g: &Graph,
    dstar: u32,
    m: usize,
    grid: &LabelGridConfig,
) -> Result<TrainingSet> {
    let mut stars = Vec::new();
    for (u, v) in g.edges() {
        for o in normalize_edge(g, u, v)? {
            if g.degree(o.from) <= dstar as usize {
                stars.extend(enumerate_anchored_stars(g, o)?);
            } else if g.degree(o.to) <= dstar as usize {
                stars.extend(enumerate_anchored_stars(g, OrientedEdge::new(o.to, o.from))?);
            }
        }
    }
    if stars.is_empty() {
        return Err(Error::EmptyTrainingSet { dstar });
    }
    let labels = assign_training_labels(stars.len(), m, grid.xi, grid.range, grid.seed)?;
    let (_, a, b) = grid_geometry(stars.len(), m, grid.xi, grid.range)?;
    Ok(TrainingSet { stars, labels, xi: grid.xi, range: (a, b) })
}

fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// Hinge loss over all unordered pairs in the batch:
/// `sum max(0, ||l(S) - l(S')|| - ||o(S) - o(S')||)`.
pub fn compute_loss(model: &GinModel, stars: &[AnchoredStar], labels: &[Vec<f64>]) -> Result<f64> {
    assert_eq!(stars.len(), labels.len());
    let outs: Vec<Vec<f64>> = stars.iter().map(|s| model.forward(s)).collect::<Result<_>>()?;
    let mut loss = 0.0;
    for i in 0..outs.len() {
        for j in (i + 1)..outs.len() {
            let margin = euclidean(&labels[i], &labels[j]) - euclidean(&outs[i], &outs[j]);
            if margin > 0.0 {
                loss += margin;
            }
        }
    }
    Ok(loss)
}

/// Parameter gradients in the same flat layout as [`GinModel::param`].
#[derive(Debug)]
pub struct GradBuffer {
    layers: Vec<(Vec<f64>, Vec<f64>)>,
    final_weight: Vec<f64>,
    feature_dim: usize,
}

impl GradBuffer {
    fn zeros(model: &GinModel) -> Self {
        let n = model.feature_dim();
        GradBuffer {
            layers: (0..model.layer_count()).map(|_| (vec![0.0; n * n], vec![0.0; n])).collect(),
            final_weight: vec![0.0; model.output_dim() * n],
            feature_dim: n,
        }
    }

    pub fn param(&self, idx: usize) -> f64 {
        let n = self.feature_dim;
        let per_layer = n * n + n;
        let layer = idx / per_layer;
        if layer < self.layers.len() {
            let off = idx % per_layer;
            if off < n * n {
                self.layers[layer].0[off]
            } else {
                self.layers[layer].1[off - n * n]
            }
        } else {
            self.final_weight[idx - self.layers.len() * per_layer]
        }
    }
}

/// Batch loss plus its gradient with respect to every trainable parameter.
///
/// Pairs whose embeddings coincide exactly contribute a fixed loss floor
/// and no gradient: isomorphic stars move in lockstep under any weights,
/// so their distance term has no descent direction.
pub fn loss_and_gradient(
    model: &GinModel,
    stars: &[AnchoredStar],
    labels: &[Vec<f64>],
) -> Result<(f64, GradBuffer)> {
    assert_eq!(stars.len(), labels.len());
    let mut outs = Vec::with_capacity(stars.len());
    let mut tapes = Vec::with_capacity(stars.len());
    for star in stars {
        let (out, tape) = model.forward_with_tape(star)?;
        outs.push(out);
        tapes.push(tape);
    }

    let m = model.output_dim();
    let mut loss = 0.0;
    let mut grad_out = vec![vec![0.0; m]; stars.len()];
    for i in 0..outs.len() {
        for j in (i + 1)..outs.len() {
            let l_dist = euclidean(&labels[i], &labels[j]);
            let o_dist = euclidean(&outs[i], &outs[j]);
            let margin = l_dist - o_dist;
            if margin > 0.0 {
                loss += margin;
                if o_dist > 0.0 {
                    for k in 0..m {
                        let d = (outs[i][k] - outs[j][k]) / o_dist;
                        grad_out[i][k] -= d;
                        grad_out[j][k] += d;
                    }
                }
            }
        }
    }

    let mut grads = GradBuffer::zeros(model);
    for (tape, grad) in tapes.iter().zip(&grad_out) {
        backward(model, tape, grad, &mut grads);
    }
    Ok((loss, grads))
}

fn backward(model: &GinModel, tape: &ForwardTape, grad_out: &[f64], grads: &mut GradBuffer) {
    let n = model.feature_dim();
    let m = model.output_dim();
    let final_w = model.final_weight();
    let vertices = tape.hiddens[0].len() / n;

    // o = W_final * readout
    for r in 0..m {
        for c in 0..n {
            grads.final_weight[r * n + c] += grad_out[r] * tape.readout[c];
        }
    }
    let mut grad_readout = vec![0.0; n];
    for c in 0..n {
        let mut acc = 0.0;
        for r in 0..m {
            acc += final_w[r * n + c] * grad_out[r];
        }
        grad_readout[c] = acc;
    }

    // readout = sum over vertices of the final hidden states
    let mut grad_h: Vec<f64> = Vec::with_capacity(vertices * n);
    for _ in 0..vertices {
        grad_h.extend_from_slice(&grad_readout);
    }

    let mut gz = vec![0.0; n];
    let mut grad_x = vec![0.0; vertices * n];
    for (t, layer) in model.layers().iter().enumerate().rev() {
        let h_out = &tape.hiddens[t + 1];
        let inputs = &tape.inputs[t];
        let scale = 1.0 + layer.epsilon;

        grad_x.fill(0.0);
        for v in 0..vertices {
            for i in 0..n {
                let y = h_out[v * n + i];
                gz[i] = grad_h[v * n + i] * (1.0 - y * y);
            }
            let x = &inputs[v * n..(v + 1) * n];
            let (dw, db) = &mut grads.layers[t];
            for r in 0..n {
                let g = gz[r];
                db[r] += g;
                for c in 0..n {
                    dw[r * n + c] += g * x[c];
                }
            }
            // grad wrt the combined input: W^T gz
            let gx = &mut grad_x[v * n..(v + 1) * n];
            for c in 0..n {
                let mut acc = 0.0;
                for r in 0..n {
                    acc += layer.weight[r * n + c] * gz[r];
                }
                gx[c] = acc;
            }
        }

        // x_v = scale * h_v + agg_v with agg_center = sum of the others and
        // agg_other = h_center.
        let mut next_grad_h = vec![0.0; vertices * n];
        for v in 0..vertices {
            for i in 0..n {
                next_grad_h[v * n + i] += scale * grad_x[v * n + i];
            }
        }
        for v in 1..vertices {
            for i in 0..n {
                next_grad_h[v * n + i] += grad_x[i]; // from the center's aggregation
                next_grad_h[i] += grad_x[v * n + i]; // others aggregate the center
            }
        }
        grad_h = next_grad_h;
    }
}

/// Trains a seeded model on every star the index build will file.
///
/// Runs `epochs` passes of batched adaptive-moment descent on the pairwise
/// hinge loss (moments 0.9/0.999, epsilon 1e-8), batches drawn from a
/// seeded shuffle per epoch. Fully deterministic given the seeds.
pub fn train_model(
    g: &Graph,
    dstar: u32,
    model_cfg: &ModelConfig,
    train_cfg: &TrainConfig,
    grid_cfg: &LabelGridConfig,
) -> Result<GinModel> {
    assert!(train_cfg.epochs >= 1, "need at least one epoch");
    assert!(train_cfg.learning_rate > 0.0, "step size must be positive");
    assert!(train_cfg.batch_size >= 2, "pairwise loss needs batches of at least two");

    let set = build_training_set(g, dstar, model_cfg.output_dim, grid_cfg)?;
    let mut model = GinModel::seeded(g.sigma_size(), model_cfg);

    let param_count = model.param_count();
    let mut moment1 = vec![0.0; param_count];
    let mut moment2 = vec![0.0; param_count];
    let (beta1, beta2, eps) = (0.9, 0.999, 1e-8);
    let mut step = 0u32;

    let mut rng = ChaCha8Rng::seed_from_u64(train_cfg.seed);
    let mut order: Vec<usize> = (0..set.stars.len()).collect();
    let mut batch_stars: Vec<AnchoredStar> = Vec::with_capacity(train_cfg.batch_size);
    let mut batch_labels: Vec<Vec<f64>> = Vec::with_capacity(train_cfg.batch_size);

    for _ in 0..train_cfg.epochs {
        order.shuffle(&mut rng);
        for chunk in order.chunks(train_cfg.batch_size) {
            if chunk.len() < 2 {
                continue;
            }
            batch_stars.clear();
            batch_labels.clear();
            for &i in chunk {
                batch_stars.push(set.stars[i].clone());
                batch_labels.push(set.labels[i].clone());
            }
            let (_, grads) = loss_and_gradient(&model, &batch_stars, &batch_labels)?;
            step += 1;
            let bc1 = 1.0 - beta1.powi(step as i32);
            let bc2 = 1.0 - beta2.powi(step as i32);
            for p in 0..param_count {
                let g = grads.param(p);
                moment1[p] = beta1 * moment1[p] + (1.0 - beta1) * g;
                moment2[p] = beta2 * moment2[p] + (1.0 - beta2) * g * g;
                let update = (moment1[p] / bc1) / ((moment2[p] / bc2).sqrt() + eps);
                model.set_param(p, model.param(p) - train_cfg.learning_rate * update);
            }
        }
    }
    model.refresh_digest();
    Ok(model)
}
