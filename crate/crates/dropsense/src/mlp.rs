//! A small fully connected classifier, implemented from scratch.
//!
//! The network maps the 25 segment features to 5 material classes: affine
//! layers with ReLU (or tanh) hidden activations, a softmax output, and
//! cross-entropy loss trained by plain mini-batch gradient descent. Inputs
//! are z-score normalized with statistics taken from the training split
//! only; the statistics are stored in the model so inference applies the
//! same transform.
//!
//! Everything is deterministic given the seed: weight initialization and
//! epoch shuffling use separate streams of one counter-based generator, so
//! retraining with the same data and seed reproduces the model bit-for-bit.

use std::time::Instant;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::FEATURE_COUNT;

/// Width of the input layer: one unit per feature.
pub const INPUT_DIM: usize = FEATURE_COUNT;

/// Number of material classes.
pub const CLASS_COUNT: usize = 5;

/// Hidden-layer activation function.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Activation {
    Relu,
    Tanh,
}

impl Activation {
    fn apply(self, z: f64) -> f64 {
        match self {
            Activation::Relu => z.max(0.0),
            Activation::Tanh => z.tanh(),
        }
    }

    /// Derivative expressed in terms of the activation output `y`.
    fn derivative_from_output(self, y: f64) -> f64 {
        match self {
            Activation::Relu => {
                if y > 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
            Activation::Tanh => 1.0 - y * y,
        }
    }
}

impl std::str::FromStr for Activation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "relu" => Ok(Activation::Relu),
            "tanh" => Ok(Activation::Tanh),
            other => Err(Error::InvalidConfig(format!(
                "unknown activation `{other}` (expected `relu` or `tanh`)"
            ))),
        }
    }
}

/// A trained (or freshly initialized) network plus its input normalization.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MlpModel {
    /// Layer widths from input to output, e.g. `[25, 64, 32, 5]`.
    pub layer_dims: Vec<usize>,
    pub activation: Activation,
    /// Per-feature mean of the training split.
    pub norm_mean: Vec<f64>,
    /// Per-feature standard deviation of the training split (floored to 1
    /// for constant features).
    pub norm_std: Vec<f64>,
    /// `weights[l][o][i]`: weight from unit `i` to unit `o` of layer `l`.
    pub weights: Vec<Vec<Vec<f64>>>,
    /// `biases[l][o]`: bias of unit `o` of layer `l`.
    pub biases: Vec<Vec<f64>>,
}

impl MlpModel {
    /// Checks structural consistency: dimension chain, matching weight and
    /// bias shapes, finite parameters, and positive normalization scales.
    pub fn validate(&self) -> Result<()> {
        if self.layer_dims.len() < 3 {
            return Err(Error::InvalidConfig(format!(
                "model needs at least one hidden layer, got dims {:?}",
                self.layer_dims
            )));
        }
        if self.layer_dims[0] != INPUT_DIM {
            return Err(Error::InvalidConfig(format!(
                "input width must be {INPUT_DIM}, got {}",
                self.layer_dims[0]
            )));
        }
        if *self.layer_dims.last().unwrap() != CLASS_COUNT {
            return Err(Error::InvalidConfig(format!(
                "output width must be {CLASS_COUNT}, got {}",
                self.layer_dims.last().unwrap()
            )));
        }
        if self.layer_dims.contains(&0) {
            return Err(Error::InvalidConfig("zero-sized layer".into()));
        }
        let layers = self.layer_dims.len() - 1;
        if self.weights.len() != layers || self.biases.len() != layers {
            return Err(Error::InvalidConfig(format!(
                "expected {layers} weight and bias layers, got {} and {}",
                self.weights.len(),
                self.biases.len()
            )));
        }
        for l in 0..layers {
            let (fan_in, fan_out) = (self.layer_dims[l], self.layer_dims[l + 1]);
            if self.weights[l].len() != fan_out || self.biases[l].len() != fan_out {
                return Err(Error::InvalidConfig(format!(
                    "layer {l}: expected {fan_out} rows"
                )));
            }
            for row in &self.weights[l] {
                if row.len() != fan_in {
                    return Err(Error::InvalidConfig(format!(
                        "layer {l}: expected {fan_in} columns"
                    )));
                }
                if row.iter().any(|w| !w.is_finite()) {
                    return Err(Error::InvalidConfig(format!(
                        "layer {l}: non-finite weight"
                    )));
                }
            }
            if self.biases[l].iter().any(|b| !b.is_finite()) {
                return Err(Error::InvalidConfig(format!("layer {l}: non-finite bias")));
            }
        }
        if self.norm_mean.len() != INPUT_DIM || self.norm_std.len() != INPUT_DIM {
            return Err(Error::InvalidConfig(
                "normalization vectors must match the input width".into(),
            ));
        }
        if self.norm_mean.iter().any(|m| !m.is_finite())
            || self.norm_std.iter().any(|s| !(s.is_finite() && *s > 0.0))
        {
            return Err(Error::InvalidConfig(
                "normalization stats must be finite with positive scales".into(),
            ));
        }
        Ok(())
    }
}

/// Training hyperparameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub hidden_dims: Vec<usize>,
    pub activation: Activation,
    pub learning_rate: f64,
    pub batch_size: usize,
    pub epochs: usize,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            hidden_dims: vec![64, 32],
            activation: Activation::Relu,
            learning_rate: 0.01,
            batch_size: 32,
            epochs: 200,
            seed: 42,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.hidden_dims.is_empty() {
            return Err(Error::InvalidConfig(
                "at least one hidden layer is required".into(),
            ));
        }
        if self.hidden_dims.contains(&0) {
            return Err(Error::InvalidConfig("zero-sized hidden layer".into()));
        }
        if !(self.learning_rate.is_finite() && self.learning_rate > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "learning rate must be positive and finite, got {}",
                self.learning_rate
            )));
        }
        if self.batch_size == 0 {
            return Err(Error::InvalidConfig("batch size must be at least 1".into()));
        }
        if self.epochs == 0 {
            return Err(Error::InvalidConfig(
                "epoch count must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

/// A set of feature vectors with material labels, used for training and
/// evaluation.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledSet {
    pub features: Vec<[f64; INPUT_DIM]>,
    pub labels: Vec<usize>,
}

impl LabeledSet {
    pub fn new(features: Vec<[f64; INPUT_DIM]>, labels: Vec<usize>) -> Result<Self> {
        let set = LabeledSet { features, labels };
        set.validate()?;
        Ok(set)
    }

    pub fn validate(&self) -> Result<()> {
        if self.features.is_empty() {
            return Err(Error::InvalidArgument("empty labeled set".into()));
        }
        if self.features.len() != self.labels.len() {
            return Err(Error::InvalidArgument(format!(
                "{} feature rows but {} labels",
                self.features.len(),
                self.labels.len()
            )));
        }
        if let Some(&bad) = self.labels.iter().find(|&&l| l >= CLASS_COUNT) {
            return Err(Error::InvalidArgument(format!(
                "label {bad} out of range 0..{CLASS_COUNT}"
            )));
        }
        if self
            .features
            .iter()
            .any(|row| row.iter().any(|v| !v.is_finite()))
        {
            return Err(Error::InvalidArgument("non-finite feature value".into()));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.features.len()
    }

    pub fn is_empty(&self) -> bool {
        self.features.is_empty()
    }

    /// Number of records per class label.
    pub fn class_counts(&self) -> [usize; CLASS_COUNT] {
        let mut counts = [0usize; CLASS_COUNT];
        for &l in &self.labels {
            counts[l] += 1;
        }
        counts
    }
}

/// Intermediate state of one forward pass, kept for backpropagation.
#[derive(Debug, Clone)]
pub struct ForwardPass {
    /// Input to each affine layer: the normalized input first, then each
    /// hidden activation in order.
    pub layer_inputs: Vec<Vec<f64>>,
    pub logits: Vec<f64>,
    pub probabilities: [f64; CLASS_COUNT],
}

/// A predicted class with the full probability vector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Prediction {
    pub label: usize,
    pub probabilities: [f64; CLASS_COUNT],
}

/// Gradients with the same shape as the model parameters.
#[derive(Debug, Clone)]
pub struct Gradients {
    pub weights: Vec<Vec<Vec<f64>>>,
    pub biases: Vec<Vec<f64>>,
}

impl Gradients {
    fn zeros_like(model: &MlpModel) -> Self {
        Gradients {
            weights: model
                .weights
                .iter()
                .map(|layer| layer.iter().map(|row| vec![0.0; row.len()]).collect())
                .collect(),
            biases: model.biases.iter().map(|b| vec![0.0; b.len()]).collect(),
        }
    }
}

/// Per-epoch validation metrics and total training time.
#[derive(Debug, Clone)]
pub struct TrainReport {
    pub val_loss: Vec<f64>,
    pub val_accuracy: Vec<f64>,
    pub train_seconds: f64,
}

/// Confusion counts over an evaluation set. Rows are true labels, columns
/// are predictions.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfusionMatrix {
    pub counts: [[usize; CLASS_COUNT]; CLASS_COUNT],
    pub inference_seconds: f64,
}

impl ConfusionMatrix {
    pub fn total(&self) -> usize {
        self.counts.iter().flatten().sum()
    }

    pub fn row_total(&self, class: usize) -> usize {
        self.counts[class].iter().sum()
    }

    /// Number of records on the diagonal (predicted correctly).
    pub fn correct(&self) -> usize {
        (0..CLASS_COUNT).map(|c| self.counts[c][c]).sum()
    }

    /// Fraction of all records predicted correctly.
    pub fn overall_accuracy(&self) -> f64 {
        self.correct() as f64 / self.total() as f64
    }

    /// Fraction of class `class` predicted correctly, or `None` if the
    /// class has no records.
    pub fn per_class_accuracy(&self, class: usize) -> Option<f64> {
        let row = self.row_total(class);
        (row > 0).then(|| self.counts[class][class] as f64 / row as f64)
    }
}

/// Numerically stable softmax: shifts by the maximum logit before
/// exponentiating, so logits with magnitudes in the hundreds do not
/// overflow.
pub fn softmax(logits: &[f64]) -> Vec<f64> {
    let max = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = logits.iter().map(|z| (z - max).exp()).collect();
    let sum: f64 = exps.iter().sum();
    exps.iter().map(|e| e / sum).collect()
}

/// Cross-entropy of one sample from raw logits, via log-sum-exp.
fn cross_entropy_from_logits(logits: &[f64], label: usize) -> f64 {
    let max = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lse = max + logits.iter().map(|z| (z - max).exp()).sum::<f64>().ln();
    lse - logits[label]
}

fn affine(weights: &[Vec<f64>], biases: &[f64], input: &[f64]) -> Vec<f64> {
    weights
        .iter()
        .zip(biases)
        .map(|(row, b)| b + row.iter().zip(input).map(|(w, x)| w * x).sum::<f64>())
        .collect()
}

/// Initializes a model for the given hyperparameters: weights drawn from
/// N(0, 1/fan_in), biases zero, identity normalization. Deterministic in
/// `cfg.seed`.
pub fn init_model(cfg: &TrainConfig) -> Result<MlpModel> {
    cfg.validate()?;
    let mut layer_dims = Vec::with_capacity(cfg.hidden_dims.len() + 2);
    layer_dims.push(INPUT_DIM);
    layer_dims.extend_from_slice(&cfg.hidden_dims);
    layer_dims.push(CLASS_COUNT);

    let mut rng = ChaCha20Rng::seed_from_u64(cfg.seed);
    rng.set_stream(0); // stream 1 is reserved for epoch shuffling
    let mut weights = Vec::with_capacity(layer_dims.len() - 1);
    let mut biases = Vec::with_capacity(layer_dims.len() - 1);
    for pair in layer_dims.windows(2) {
        let (fan_in, fan_out) = (pair[0], pair[1]);
        let dist =
            Normal::new(0.0, 1.0 / (fan_in as f64).sqrt()).expect("positive standard deviation");
        weights.push(
            (0..fan_out)
                .map(|_| (0..fan_in).map(|_| dist.sample(&mut rng)).collect())
                .collect(),
        );
        biases.push(vec![0.0; fan_out]);
    }

    Ok(MlpModel {
        layer_dims,
        activation: cfg.activation,
        norm_mean: vec![0.0; INPUT_DIM],
        norm_std: vec![1.0; INPUT_DIM],
        weights,
        biases,
    })
}

/// Runs one forward pass, returning every intermediate activation.
///
/// The model is assumed structurally valid (see [`MlpModel::validate`]);
/// the input must be finite.
pub fn forward(model: &MlpModel, input: &[f64; INPUT_DIM]) -> Result<ForwardPass> {
    if input.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidArgument("non-finite feature value".into()));
    }
    let normalized: Vec<f64> = input
        .iter()
        .zip(model.norm_mean.iter().zip(&model.norm_std))
        .map(|(x, (m, s))| (x - m) / s)
        .collect();

    let layers = model.weights.len();
    let mut layer_inputs = Vec::with_capacity(layers);
    layer_inputs.push(normalized);
    for l in 0..layers - 1 {
        let z = affine(
            &model.weights[l],
            &model.biases[l],
            layer_inputs.last().unwrap(),
        );
        layer_inputs.push(z.into_iter().map(|v| model.activation.apply(v)).collect());
    }
    let logits = affine(
        &model.weights[layers - 1],
        &model.biases[layers - 1],
        layer_inputs.last().unwrap(),
    );
    let probs = softmax(&logits);
    let mut probabilities = [0.0; CLASS_COUNT];
    probabilities.copy_from_slice(&probs);
    Ok(ForwardPass {
        layer_inputs,
        logits,
        probabilities,
    })
}

/// Computes the mean cross-entropy of a batch and the gradients of every
/// parameter with respect to it.
pub fn loss_and_backward(
    model: &MlpModel,
    batch: &[([f64; INPUT_DIM], usize)],
) -> Result<(f64, Gradients)> {
    if batch.is_empty() {
        return Err(Error::InvalidArgument("empty batch".into()));
    }
    if let Some((_, bad)) = batch.iter().find(|(_, l)| *l >= CLASS_COUNT) {
        return Err(Error::InvalidArgument(format!(
            "label {bad} out of range 0..{CLASS_COUNT}"
        )));
    }
    let mut grads = Gradients::zeros_like(model);
    let mut total_loss = 0.0;
    let layers = model.weights.len();

    for (input, label) in batch {
        let pass = forward(model, input)?;
        total_loss += cross_entropy_from_logits(&pass.logits, *label);

        // Softmax + cross-entropy collapse to (p - onehot) at the output.
        let mut delta: Vec<f64> = pass.probabilities.to_vec();
        delta[*label] -= 1.0;

        for l in (0..layers).rev() {
            let layer_input = &pass.layer_inputs[l];
            for (o, d) in delta.iter().enumerate() {
                let grad_row = &mut grads.weights[l][o];
                for (i, x) in layer_input.iter().enumerate() {
                    grad_row[i] += d * x;
                }
                grads.biases[l][o] += d;
            }
            if l > 0 {
                // layer_inputs[l] is the activation output of layer l-1.
                let mut prev = vec![0.0; layer_input.len()];
                for (o, d) in delta.iter().enumerate() {
                    for (i, w) in model.weights[l][o].iter().enumerate() {
                        prev[i] += w * d;
                    }
                }
                for (p, y) in prev.iter_mut().zip(layer_input) {
                    *p *= model.activation.derivative_from_output(*y);
                }
                delta = prev;
            }
        }
    }

    let scale = 1.0 / batch.len() as f64;
    for layer in &mut grads.weights {
        for row in layer {
            for g in row {
                *g *= scale;
            }
        }
    }
    for layer in &mut grads.biases {
        for g in layer {
            *g *= scale;
        }
    }
    Ok((total_loss * scale, grads))
}

fn apply_gradients(model: &mut MlpModel, grads: &Gradients, learning_rate: f64) {
    for (wl, gl) in model.weights.iter_mut().zip(&grads.weights) {
        for (wr, gr) in wl.iter_mut().zip(gl) {
            for (w, g) in wr.iter_mut().zip(gr) {
                *w -= learning_rate * g;
            }
        }
    }
    for (bl, gl) in model.biases.iter_mut().zip(&grads.biases) {
        for (b, g) in bl.iter_mut().zip(gl) {
            *b -= learning_rate * g;
        }
    }
}

/// Per-feature mean and standard deviation, with constant features floored
/// to a scale of 1 so normalization never divides by zero.
fn normalization_stats(features: &[[f64; INPUT_DIM]]) -> (Vec<f64>, Vec<f64>) {
    let n = features.len() as f64;
    let mut mean = vec![0.0; INPUT_DIM];
    for row in features {
        for (m, v) in mean.iter_mut().zip(row) {
            *m += v;
        }
    }
    for m in &mut mean {
        *m /= n;
    }
    let mut std = vec![0.0; INPUT_DIM];
    for row in features {
        for (s, (v, m)) in std.iter_mut().zip(row.iter().zip(&mean)) {
            *s += (v - m) * (v - m);
        }
    }
    for s in &mut std {
        *s = (*s / n).sqrt();
        if *s < 1e-12 {
            *s = 1.0;
        }
    }
    (mean, std)
}

fn validation_metrics(model: &MlpModel, set: &LabeledSet) -> Result<(f64, f64)> {
    let mut loss = 0.0;
    let mut correct = 0usize;
    for (input, label) in set.features.iter().zip(&set.labels) {
        let pass = forward(model, input)?;
        loss += cross_entropy_from_logits(&pass.logits, *label);
        if argmax(&pass.probabilities) == *label {
            correct += 1;
        }
    }
    Ok((loss / set.len() as f64, correct as f64 / set.len() as f64))
}

/// Index of the largest value; the lowest index wins exact ties.
fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, v) in values.iter().enumerate().skip(1) {
        if *v > values[best] {
            best = i;
        }
    }
    best
}

/// Trains a fresh model with mini-batch gradient descent.
///
/// Normalization statistics come from `train_set` only. Validation loss and
/// accuracy are recorded after every epoch. Deterministic given data and
/// `cfg.seed`.
pub fn train(
    train_set: &LabeledSet,
    val_set: &LabeledSet,
    cfg: &TrainConfig,
) -> Result<(MlpModel, TrainReport)> {
    cfg.validate()?;
    train_set.validate()?;
    val_set.validate()?;

    let start = Instant::now();
    let mut model = init_model(cfg)?;
    let (mean, std) = normalization_stats(&train_set.features);
    model.norm_mean = mean;
    model.norm_std = std;

    let mut rng = ChaCha20Rng::seed_from_u64(cfg.seed);
    rng.set_stream(1);
    let mut indices: Vec<usize> = (0..train_set.len()).collect();
    let mut val_loss = Vec::with_capacity(cfg.epochs);
    let mut val_accuracy = Vec::with_capacity(cfg.epochs);

    let mut batch: Vec<([f64; INPUT_DIM], usize)> = Vec::with_capacity(cfg.batch_size);
    for _ in 0..cfg.epochs {
        indices.shuffle(&mut rng);
        for chunk in indices.chunks(cfg.batch_size) {
            batch.clear();
            batch.extend(
                chunk
                    .iter()
                    .map(|&i| (train_set.features[i], train_set.labels[i])),
            );
            let (_, grads) = loss_and_backward(&model, &batch)?;
            apply_gradients(&mut model, &grads, cfg.learning_rate);
        }
        let (vl, va) = validation_metrics(&model, val_set)?;
        val_loss.push(vl);
        val_accuracy.push(va);
    }

    Ok((
        model,
        TrainReport {
            val_loss,
            val_accuracy,
            train_seconds: start.elapsed().as_secs_f64(),
        },
    ))
}

/// Classifies one feature vector.
pub fn predict(model: &MlpModel, input: &[f64; INPUT_DIM]) -> Result<Prediction> {
    let pass = forward(model, input)?;
    Ok(Prediction {
        label: argmax(&pass.probabilities),
        probabilities: pass.probabilities,
    })
}

/// Classifies every record of a labeled set and tallies the confusion
/// matrix, timing the inference loop.
pub fn evaluate(model: &MlpModel, set: &LabeledSet) -> Result<ConfusionMatrix> {
    set.validate()?;
    let start = Instant::now();
    let mut counts = [[0usize; CLASS_COUNT]; CLASS_COUNT];
    for (input, label) in set.features.iter().zip(&set.labels) {
        let pred = predict(model, input)?;
        counts[*label][pred.label] += 1;
    }
    Ok(ConfusionMatrix {
        counts,
        inference_seconds: start.elapsed().as_secs_f64(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    fn zeroed_model(cfg: &TrainConfig) -> MlpModel {
        let mut model = init_model(cfg).unwrap();
        for layer in &mut model.weights {
            for row in layer {
                row.iter_mut().for_each(|w| *w = 0.0);
            }
        }
        model
    }

    fn small_cfg() -> TrainConfig {
        TrainConfig {
            hidden_dims: vec![6, 5],
            ..TrainConfig::default()
        }
    }

    #[test]
    fn init_is_deterministic_in_seed() {
        let cfg = TrainConfig::default();
        let a = init_model(&cfg).unwrap();
        let b = init_model(&cfg).unwrap();
        assert_eq!(a, b);
        let c = init_model(&TrainConfig { seed: 43, ..cfg }).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn init_scale_tracks_fan_in() {
        // One hidden layer of 400 gives 10000 first-layer weights; their
        // sample standard deviation should be close to 1/sqrt(25) = 0.2.
        let cfg = TrainConfig {
            hidden_dims: vec![400],
            ..TrainConfig::default()
        };
        let model = init_model(&cfg).unwrap();
        let flat: Vec<f64> = model.weights[0].iter().flatten().copied().collect();
        assert_eq!(flat.len(), 10_000);
        let mean = flat.iter().sum::<f64>() / flat.len() as f64;
        let var = flat.iter().map(|w| (w - mean).powi(2)).sum::<f64>() / flat.len() as f64;
        let std = var.sqrt();
        assert!(mean.abs() < 0.02, "mean {mean}");
        assert!((std - 0.2).abs() / 0.2 < 0.2, "std {std}");
        // Biases start at zero.
        assert!(model.biases.iter().flatten().all(|&b| b == 0.0));
    }

    #[test]
    fn zero_weight_model_is_uniform_with_ln5_loss() {
        let model = zeroed_model(&small_cfg());
        let input = [0.3; INPUT_DIM];
        let pass = forward(&model, &input).unwrap();
        for p in pass.probabilities {
            assert!((p - 0.2).abs() < 1e-15, "p = {p}");
        }
        let (loss, _) = loss_and_backward(&model, &[(input, 3)]).unwrap();
        assert!((loss - 5.0f64.ln()).abs() < 1e-12, "loss = {loss}");
    }

    #[test]
    fn softmax_is_a_distribution_and_stable() {
        let mut rng = ChaCha20Rng::seed_from_u64(21);
        for _ in 0..500 {
            let scale = *[1.0, 10.0, 1e3].get(rng.random_range(0..3)).unwrap();
            let logits: Vec<f64> = (0..CLASS_COUNT)
                .map(|_| rng.random_range(-scale..scale))
                .collect();
            let p = softmax(&logits);
            assert!(p.iter().all(|v| v.is_finite() && *v >= 0.0));
            assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-6);
            // Shifting every logit by a constant must not change the winner.
            let shift: f64 = rng.random_range(-100.0..100.0);
            let shifted: Vec<f64> = logits.iter().map(|z| z + shift).collect();
            assert_eq!(argmax(&softmax(&logits)), argmax(&softmax(&shifted)));
        }
    }

    #[test]
    fn argmax_breaks_ties_toward_lowest_index() {
        assert_eq!(argmax(&[0.2, 0.2, 0.2, 0.2, 0.2]), 0);
        assert_eq!(argmax(&[0.1, 0.4, 0.4, 0.05, 0.05]), 1);
        let model = zeroed_model(&small_cfg());
        let pred = predict(&model, &[1.0; INPUT_DIM]).unwrap();
        assert_eq!(pred.label, 0);
    }

    /// Central-difference gradient check over every parameter of a small
    /// 25-8-5 network on a random batch of 4.
    fn check_gradients(activation: Activation, seed: u64) -> f64 {
        let cfg = TrainConfig {
            hidden_dims: vec![8],
            activation,
            seed,
            ..TrainConfig::default()
        };
        let mut model = init_model(&cfg).unwrap();
        let mut rng = ChaCha20Rng::seed_from_u64(seed ^ 0x5eed);
        let batch: Vec<([f64; INPUT_DIM], usize)> = (0..4)
            .map(|_| {
                let mut x = [0.0; INPUT_DIM];
                x.iter_mut().for_each(|v| *v = rng.random_range(-2.0..2.0));
                (x, rng.random_range(0..CLASS_COUNT))
            })
            .collect();
        let (_, grads) = loss_and_backward(&model, &batch).unwrap();

        let h = 1e-5;
        let mut worst: f64 = 0.0;
        let layers = model.weights.len();
        for l in 0..layers {
            for o in 0..model.weights[l].len() {
                for i in 0..model.weights[l][o].len() {
                    let orig = model.weights[l][o][i];
                    model.weights[l][o][i] = orig + h;
                    let (up, _) = loss_and_backward(&model, &batch).unwrap();
                    model.weights[l][o][i] = orig - h;
                    let (down, _) = loss_and_backward(&model, &batch).unwrap();
                    model.weights[l][o][i] = orig;
                    let numeric = (up - down) / (2.0 * h);
                    let analytic = grads.weights[l][o][i];
                    let denom = analytic.abs().max(numeric.abs()).max(1e-4);
                    worst = worst.max((analytic - numeric).abs() / denom);
                }
            }
            for o in 0..model.biases[l].len() {
                let orig = model.biases[l][o];
                model.biases[l][o] = orig + h;
                let (up, _) = loss_and_backward(&model, &batch).unwrap();
                model.biases[l][o] = orig - h;
                let (down, _) = loss_and_backward(&model, &batch).unwrap();
                model.biases[l][o] = orig;
                let numeric = (up - down) / (2.0 * h);
                let analytic = grads.biases[l][o];
                let denom = analytic.abs().max(numeric.abs()).max(1e-4);
                worst = worst.max((analytic - numeric).abs() / denom);
            }
        }
        worst
    }

    #[test]
    fn backprop_matches_finite_differences_relu() {
        let worst = check_gradients(Activation::Relu, 1001);
        assert!(worst < 1e-4, "worst relative error {worst}");
    }

    #[test]
    fn backprop_matches_finite_differences_tanh() {
        let worst = check_gradients(Activation::Tanh, 2002);
        assert!(worst < 1e-4, "worst relative error {worst}");
    }

    /// Two Gaussian blobs mapped to labels 1 and 3.
    fn toy_clusters(n_per: usize, seed: u64) -> LabeledSet {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let mut features = Vec::new();
        let mut labels = Vec::new();
        for _ in 0..n_per {
            let mut a = [0.0; INPUT_DIM];
            let mut b = [0.0; INPUT_DIM];
            for i in 0..INPUT_DIM {
                a[i] = 2.0 + rng.random_range(-0.5..0.5);
                b[i] = -2.0 + rng.random_range(-0.5..0.5);
            }
            features.push(a);
            labels.push(1);
            features.push(b);
            labels.push(3);
        }
        LabeledSet::new(features, labels).unwrap()
    }

    #[test]
    fn separable_clusters_reach_full_training_accuracy() {
        let set = toy_clusters(20, 33);
        let cfg = TrainConfig {
            hidden_dims: vec![8],
            epochs: 50,
            learning_rate: 0.05,
            ..TrainConfig::default()
        };
        let (model, report) = train(&set, &set, &cfg).unwrap();
        assert_eq!(report.val_accuracy.len(), 50);
        assert_eq!(*report.val_accuracy.last().unwrap(), 1.0);
        assert!(
            report.val_loss.last().unwrap() < report.val_loss.first().unwrap(),
            "loss did not decrease: {:?}",
            (report.val_loss.first(), report.val_loss.last())
        );
        let cm = evaluate(&model, &set).unwrap();
        assert_eq!(cm.overall_accuracy(), 1.0);
    }

    #[test]
    fn training_is_deterministic_in_seed() {
        let set = toy_clusters(10, 34);
        let cfg = TrainConfig {
            hidden_dims: vec![8],
            epochs: 10,
            ..TrainConfig::default()
        };
        let (a, ra) = train(&set, &set, &cfg).unwrap();
        let (b, rb) = train(&set, &set, &cfg).unwrap();
        assert_eq!(a, b);
        assert_eq!(ra.val_loss, rb.val_loss);
    }

    #[test]
    fn normalization_comes_from_training_split_only() {
        let mut features = vec![[0.0; INPUT_DIM]; 4];
        // Feature 0 takes values 1, 3, 5, 7: mean 4, population std sqrt(5).
        for (i, row) in features.iter_mut().enumerate() {
            row[0] = 1.0 + 2.0 * i as f64;
            row[1] = 9.0; // constant: scale must floor to 1
        }
        let train_set = LabeledSet::new(features, vec![0, 1, 2, 3]).unwrap();
        let val_set = LabeledSet::new(vec![[100.0; INPUT_DIM]], vec![0]).unwrap();
        let cfg = TrainConfig {
            hidden_dims: vec![4],
            epochs: 1,
            ..TrainConfig::default()
        };
        let (model, _) = train(&train_set, &val_set, &cfg).unwrap();
        assert!((model.norm_mean[0] - 4.0).abs() < 1e-12);
        assert!((model.norm_std[0] - 5.0f64.sqrt()).abs() < 1e-12);
        assert_eq!(model.norm_mean[1], 9.0);
        assert_eq!(model.norm_std[1], 1.0);
    }

    #[test]
    fn evaluate_fills_rows_by_true_label() {
        // Bias the output layer so the model always predicts class 2.
        let mut model = zeroed_model(&small_cfg());
        model.biases.last_mut().unwrap()[2] = 5.0;
        let set = LabeledSet::new(vec![[0.5; INPUT_DIM]; 6], vec![0, 0, 2, 2, 2, 4]).unwrap();
        let cm = evaluate(&model, &set).unwrap();
        assert_eq!(cm.counts[0][2], 2);
        assert_eq!(cm.counts[2][2], 3);
        assert_eq!(cm.counts[4][2], 1);
        assert_eq!(cm.total(), 6);
        assert_eq!(cm.overall_accuracy(), 0.5);
        assert_eq!(cm.per_class_accuracy(2), Some(1.0));
        assert_eq!(cm.per_class_accuracy(0), Some(0.0));
        assert_eq!(cm.per_class_accuracy(1), None);
    }

    #[test]
    fn invalid_configs_are_rejected() {
        for mutate in [
            |c: &mut TrainConfig| c.hidden_dims = vec![],
            |c: &mut TrainConfig| c.hidden_dims = vec![64, 0],
            |c: &mut TrainConfig| c.learning_rate = 0.0,
            |c: &mut TrainConfig| c.learning_rate = f64::NAN,
            |c: &mut TrainConfig| c.batch_size = 0,
            |c: &mut TrainConfig| c.epochs = 0,
        ] {
            let mut cfg = TrainConfig::default();
            mutate(&mut cfg);
            assert!(matches!(init_model(&cfg), Err(Error::InvalidConfig(_))));
        }
    }

    #[test]
    fn labeled_set_validation() {
        assert!(LabeledSet::new(vec![], vec![]).is_err());
        assert!(LabeledSet::new(vec![[0.0; INPUT_DIM]], vec![5]).is_err());
        assert!(LabeledSet::new(vec![[f64::NAN; INPUT_DIM]], vec![0]).is_err());
        assert!(LabeledSet::new(vec![[0.0; INPUT_DIM]], vec![0, 1]).is_err());
    }

    #[test]
    fn model_validation_catches_shape_and_value_errors() {
        let good = init_model(&small_cfg()).unwrap();
        assert!(good.validate().is_ok());

        let mut bad = good.clone();
        bad.layer_dims[0] = 24;
        assert!(bad.validate().is_err());

        let mut bad = good.clone();
        bad.weights[0][0][0] = f64::NAN;
        assert!(bad.validate().is_err());

        let mut bad = good.clone();
        bad.norm_std[3] = 0.0;
        assert!(bad.validate().is_err());

        let mut bad = good.clone();
        bad.weights.pop();
        assert!(bad.validate().is_err());

        let mut bad = good;
        bad.biases[0].pop();
        assert!(bad.validate().is_err());
    }

    #[test]
    fn cross_entropy_is_stable_for_extreme_logits() {
        let logits = vec![1e3, -1e3, 0.0, 500.0, -500.0];
        let loss = cross_entropy_from_logits(&logits, 1);
        assert!(loss.is_finite());
        assert!((loss - 2e3).abs() < 1.0, "loss = {loss}");
    }

    #[test]
    fn confident_correct_prediction_has_near_zero_loss() {
        // Push the true class's logit far above the others.
        let mut model = zeroed_model(&small_cfg());
        model.biases.last_mut().unwrap()[4] = 40.0;
        let (loss, _) = loss_and_backward(&model, &[([0.1; INPUT_DIM], 4)]).unwrap();
        assert!(loss >= 0.0);
        assert!(loss < 1e-12, "loss = {loss}");
    }

    #[test]
    fn forward_matches_straight_line_recomputation() {
        // Re-run the arithmetic of a random model without any of the
        // library plumbing and compare probabilities.
        let cfg = TrainConfig {
            hidden_dims: vec![7, 6],
            seed: 99,
            ..TrainConfig::default()
        };
        let mut model = init_model(&cfg).unwrap();
        let mut rng = ChaCha20Rng::seed_from_u64(100);
        for m in &mut model.norm_mean {
            *m = rng.random_range(-1.0..1.0);
        }
        for s in &mut model.norm_std {
            *s = rng.random_range(0.5..2.0);
        }
        let mut x = [0.0; INPUT_DIM];
        x.iter_mut().for_each(|v| *v = rng.random_range(-3.0..3.0));

        let mut a: Vec<f64> = (0..INPUT_DIM)
            .map(|i| (x[i] - model.norm_mean[i]) / model.norm_std[i])
            .collect();
        for l in 0..model.weights.len() {
            let mut z = vec![0.0; model.layer_dims[l + 1]];
            for (o, zo) in z.iter_mut().enumerate() {
                *zo = model.biases[l][o];
                for (i, ai) in a.iter().enumerate() {
                    *zo += model.weights[l][o][i] * ai;
                }
            }
            if l + 1 < model.weights.len() {
                a = z
                    .into_iter()
                    .map(|v| if v > 0.0 { v } else { 0.0 })
                    .collect();
            } else {
                a = z;
            }
        }
        let m = a.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let exps: Vec<f64> = a.iter().map(|z| (z - m).exp()).collect();
        let total: f64 = exps.iter().sum();

        let pass = forward(&model, &x).unwrap();
        for (p, e) in pass.probabilities.iter().zip(&exps) {
            assert!((p - e / total).abs() < 1e-12, "{p} vs {}", e / total);
        }
    }

    #[test]
    fn predict_agrees_with_forward_argmax() {
        let model = init_model(&small_cfg()).unwrap();
        let mut rng = ChaCha20Rng::seed_from_u64(55);
        for _ in 0..1000 {
            let mut x = [0.0; INPUT_DIM];
            x.iter_mut().for_each(|v| *v = rng.random_range(-5.0..5.0));
            let pass = forward(&model, &x).unwrap();
            let pred = predict(&model, &x).unwrap();
            assert_eq!(pred.label, argmax(&pass.probabilities));
            assert_eq!(pred.probabilities, pass.probabilities);
        }
    }

    #[test]
    fn per_class_accuracy_follows_from_counts() {
        // A 160-record class row with 155 correct works out to 96.875%.
        let mut cm = ConfusionMatrix {
            counts: [[0; CLASS_COUNT]; CLASS_COUNT],
            inference_seconds: 0.0,
        };
        cm.counts[0] = [155, 3, 0, 1, 1];
        assert_eq!(cm.row_total(0), 160);
        assert_eq!(cm.per_class_accuracy(0), Some(0.96875));
    }

    #[test]
    fn unrelated_labels_score_near_chance() {
        // Predictions from a random untrained model are independent of
        // uniformly random labels, so accuracy sits near 1/5.
        let cfg = TrainConfig {
            hidden_dims: vec![16],
            seed: 7,
            ..TrainConfig::default()
        };
        let model = init_model(&cfg).unwrap();
        let mut rng = ChaCha20Rng::seed_from_u64(8);
        let features: Vec<[f64; INPUT_DIM]> = (0..2000)
            .map(|_| {
                let mut x = [0.0; INPUT_DIM];
                x.iter_mut().for_each(|v| *v = rng.random_range(-2.0..2.0));
                x
            })
            .collect();
        let labels: Vec<usize> = (0..2000)
            .map(|_| rng.random_range(0..CLASS_COUNT))
            .collect();
        let set = LabeledSet::new(features, labels).unwrap();
        let cm = evaluate(&model, &set).unwrap();
        let acc = cm.overall_accuracy();
        assert!((acc - 0.2).abs() < 0.05, "accuracy {acc}");
    }
}
