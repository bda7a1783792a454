//! Hard-parameter-sharing multi-task network: two shared rectified
//! layers (40 -> 64 -> 32) feeding one small head per hyper-parameter.
//! Categorical and integer-valued parameters get softmax heads trained
//! with cross-entropy; continuous parameters get a sigmoid-squashed
//! scalar head trained with MSE on the [0,1]-normalized target, scaled
//! by 1/s in the total loss.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rng::StreamRng;
use crate::tuning::{HyperParamAssignment, HyperParamSpace, ParamKind, ParamValue};

pub const INPUT_DIM: usize = 40;
pub const HIDDEN1: usize = 64;
pub const HIDDEN2: usize = 32;

#[derive(Debug, Error, PartialEq)]
pub enum MtlError {
    #[error("no training rows for this model")]
    NoTrainingRows,
    #[error("target {0} missing from assignment")]
    MissingTarget(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Linear {
    pub w: Vec<f64>,
    pub b: Vec<f64>,
    pub in_dim: usize,
    pub out_dim: usize,
}

impl Linear {
    fn init(in_dim: usize, out_dim: usize, rng: &mut StreamRng) -> Linear {
        let bound = (6.0 / (in_dim + out_dim) as f64).sqrt();
        Linear {
            w: (0..in_dim * out_dim)
                .map(|_| rng.uniform(-bound, bound))
                .collect(),
            b: vec![0.0; out_dim],
            in_dim,
            out_dim,
        }
    }

    fn forward(&self, x: &[f64], out: &mut [f64]) {
        for (o, slot) in out.iter_mut().enumerate() {
            let row = &self.w[o * self.in_dim..(o + 1) * self.in_dim];
            *slot = self.b[o] + row.iter().zip(x).map(|(w, v)| w * v).sum::<f64>();
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum HeadKind {
    /// Softmax over the labels of a categorical domain.
    Categorical { labels: Vec<String> },
    /// Softmax over the values of a small integer range.
    IntRange { lo: i64, hi: i64 },
    /// Sigmoid-squashed scalar mapped onto [lo, hi].
    Numeric { lo: f64, hi: f64 },
}

impl HeadKind {
    fn out_dim(&self) -> usize {
        match self {
            HeadKind::Categorical { labels } => labels.len(),
            HeadKind::IntRange { lo, hi } => (hi - lo + 1) as usize,
            HeadKind::Numeric { .. } => 1,
        }
    }

    fn is_numeric(&self) -> bool {
        matches!(self, HeadKind::Numeric { .. })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Head {
    pub name: String,
    pub kind: HeadKind,
    pub layer: Linear,
}

/// One training target per head: a class index or a [0,1] value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Target {
    Class(usize),
    Value01(f64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MultiTaskNet {
    pub shared1: Linear,
    pub shared2: Linear,
    pub heads: Vec<Head>,
    /// Regression-loss divisor from the total-loss definition.
    pub s: f64,
}

fn head_kind_for(kind: &ParamKind) -> HeadKind {
    match kind {
        ParamKind::Categorical { labels } => HeadKind::Categorical {
            labels: labels.clone(),
        },
        ParamKind::Integer { lo, hi } => HeadKind::IntRange { lo: *lo, hi: *hi },
        ParamKind::Continuous { lo, hi } => HeadKind::Numeric { lo: *lo, hi: *hi },
    }
}

fn sigmoid(z: f64) -> f64 {
    1.0 / (1.0 + (-z).exp())
}

impl MultiTaskNet {
    /// Fresh Glorot-initialized network matching the space's domains.
    pub fn new(space: &HyperParamSpace, s: f64, seed: u64) -> MultiTaskNet {
        let mut rng = StreamRng::new(seed)
            .with_str("mtl-init")
            .with_str(space.model_id.name());
        let shared1 = Linear::init(INPUT_DIM, HIDDEN1, &mut rng);
        let shared2 = Linear::init(HIDDEN1, HIDDEN2, &mut rng);
        let heads = space
            .domains
            .iter()
            .map(|d| {
                let kind = head_kind_for(&d.kind);
                Head {
                    layer: Linear::init(HIDDEN2, kind.out_dim(), &mut rng),
                    name: d.name.clone(),
                    kind,
                }
            })
            .collect();
        MultiTaskNet {
            shared1,
            shared2,
            heads,
            s,
        }
    }

    fn forward_shared(&self, x: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let mut h1 = vec![0.0; HIDDEN1];
        self.shared1.forward(x, &mut h1);
        for v in h1.iter_mut() {
            *v = v.max(0.0);
        }
        let mut h2 = vec![0.0; HIDDEN2];
        self.shared2.forward(&h1, &mut h2);
        for v in h2.iter_mut() {
            *v = v.max(0.0);
        }
        (h1, h2)
    }

    /// Smallest |pre-activation| of the rectifier layers over a batch.
    /// Finite-difference checks are only meaningful at points where no
    /// unit sits on the rectifier kink, i.e. this margin is comfortably
    /// above the probe step.
    pub fn min_preactivation_magnitude(&self, inputs: &[Vec<f64>]) -> f64 {
        let mut margin = f64::INFINITY;
        for x in inputs {
            let mut a1 = vec![0.0; HIDDEN1];
            self.shared1.forward(x, &mut a1);
            for v in &a1 {
                margin = margin.min(v.abs());
            }
            let h1: Vec<f64> = a1.iter().map(|v| v.max(0.0)).collect();
            let mut a2 = vec![0.0; HIDDEN2];
            self.shared2.forward(&h1, &mut a2);
            for v in &a2 {
                margin = margin.min(v.abs());
            }
        }
        margin
    }

    /// Raw head outputs (logits or pre-squash scalar) for one input.
    pub fn head_outputs(&self, x: &[f64]) -> Vec<Vec<f64>> {
        let (_, h2) = self.forward_shared(x);
        self.heads
            .iter()
            .map(|head| {
                let mut out = vec![0.0; head.kind.out_dim()];
                head.layer.forward(&h2, &mut out);
                out
            })
            .collect()
    }

    /// Total loss: sum of categorical cross-entropies plus the sum of
    /// numeric MSEs divided by s, averaged over the batch per head.
    pub fn loss(&self, inputs: &[Vec<f64>], targets: &[Vec<Target>]) -> f64 {
        self.loss_split(inputs, targets).total()
    }

    pub fn loss_split(&self, inputs: &[Vec<f64>], targets: &[Vec<Target>]) -> LossParts {
        let n = inputs.len() as f64;
        let mut ce_sum = 0.0;
        let mut mse_sum = 0.0;
        for (x, row) in inputs.iter().zip(targets) {
            let outs = self.head_outputs(x);
            for (h, (head, out)) in self.heads.iter().zip(&outs).enumerate() {
                match (&head.kind, row[h]) {
                    (HeadKind::Numeric { .. }, Target::Value01(t)) => {
                        let pred = sigmoid(out[0]);
                        mse_sum += (pred - t) * (pred - t);
                    }
                    (_, Target::Class(c)) => {
                        ce_sum += cross_entropy(out, c);
                    }
                    _ => unreachable!("target kind mismatch"),
                }
            }
        }
        LossParts {
            ce: ce_sum / n,
            mse: mse_sum / n,
            s: self.s,
        }
    }

    pub fn params_flat(&self) -> Vec<f64> {
        let mut out = Vec::new();
        for layer in self.layers() {
            out.extend_from_slice(&layer.w);
            out.extend_from_slice(&layer.b);
        }
        out
    }

    pub fn set_params_flat(&mut self, flat: &[f64]) {
        let mut at = 0;
        let mut layers = vec![&mut self.shared1, &mut self.shared2];
        layers.extend(self.heads.iter_mut().map(|h| &mut h.layer));
        for layer in layers {
            let wl = layer.w.len();
            layer.w.copy_from_slice(&flat[at..at + wl]);
            at += wl;
            let bl = layer.b.len();
            layer.b.copy_from_slice(&flat[at..at + bl]);
            at += bl;
        }
        debug_assert_eq!(at, flat.len());
    }

    fn layers(&self) -> Vec<&Linear> {
        let mut out = vec![&self.shared1, &self.shared2];
        out.extend(self.heads.iter().map(|h| &h.layer));
        out
    }

    /// Analytic gradient of the total loss, flattened like
    /// [`params_flat`]. Averaged over the batch, matching `loss`.
    pub fn gradients(&self, inputs: &[Vec<f64>], targets: &[Vec<Target>]) -> Vec<f64> {
        let mut g1w = vec![0.0; self.shared1.w.len()];
        let mut g1b = vec![0.0; self.shared1.b.len()];
        let mut g2w = vec![0.0; self.shared2.w.len()];
        let mut g2b = vec![0.0; self.shared2.b.len()];
        let mut ghw: Vec<Vec<f64>> = self
            .heads
            .iter()
            .map(|h| vec![0.0; h.layer.w.len()])
            .collect();
        let mut ghb: Vec<Vec<f64>> = self
            .heads
            .iter()
            .map(|h| vec![0.0; h.layer.b.len()])
            .collect();
        let n = inputs.len() as f64;

        for (x, row) in inputs.iter().zip(targets) {
            let mut a1 = vec![0.0; HIDDEN1];
            self.shared1.forward(x, &mut a1);
            let h1: Vec<f64> = a1.iter().map(|v| v.max(0.0)).collect();
            let mut a2 = vec![0.0; HIDDEN2];
            self.shared2.forward(&h1, &mut a2);
            let h2: Vec<f64> = a2.iter().map(|v| v.max(0.0)).collect();

            let mut dh2 = vec![0.0; HIDDEN2];
            for (h, head) in self.heads.iter().enumerate() {
                let mut out = vec![0.0; head.kind.out_dim()];
                head.layer.forward(&h2, &mut out);
                // d(loss)/d(out)
                let dout: Vec<f64> = match (&head.kind, row[h]) {
                    (HeadKind::Numeric { .. }, Target::Value01(t)) => {
                        let pred = sigmoid(out[0]);
                        // MSE/s with the sigmoid chain rule.
                        vec![2.0 * (pred - t) * pred * (1.0 - pred) / self.s / n]
                    }
                    (_, Target::Class(c)) => {
                        let probs = softmax(&out);
                        probs
                            .iter()
                            .enumerate()
                            .map(|(k, p)| (p - if k == c { 1.0 } else { 0.0 }) / n)
                            .collect()
                    }
                    _ => unreachable!(),
                };
                for (o, &d) in dout.iter().enumerate() {
                    ghb[h][o] += d;
                    for (i, &h2v) in h2.iter().enumerate() {
                        ghw[h][o * HIDDEN2 + i] += d * h2v;
                    }
                    for (i, dh) in dh2.iter_mut().enumerate() {
                        *dh += d * head.layer.w[o * HIDDEN2 + i];
                    }
                }
            }

            let da2: Vec<f64> = dh2
                .iter()
                .zip(&a2)
                .map(|(d, &a)| if a > 0.0 { *d } else { 0.0 })
                .collect();
            let mut dh1 = vec![0.0; HIDDEN1];
            for (o, &d) in da2.iter().enumerate() {
                g2b[o] += d;
                for (i, &h1v) in h1.iter().enumerate() {
                    g2w[o * HIDDEN1 + i] += d * h1v;
                }
                for (i, dh) in dh1.iter_mut().enumerate() {
                    *dh += d * self.shared2.w[o * HIDDEN1 + i];
                }
            }
            let da1: Vec<f64> = dh1
                .iter()
                .zip(&a1)
                .map(|(d, &a)| if a > 0.0 { *d } else { 0.0 })
                .collect();
            for (o, &d) in da1.iter().enumerate() {
                g1b[o] += d;
                for (i, &xv) in x.iter().enumerate() {
                    g1w[o * INPUT_DIM + i] += d * xv;
                }
            }
        }

        let mut flat = Vec::new();
        flat.extend(g1w);
        flat.extend(g1b);
        flat.extend(g2w);
        flat.extend(g2b);
        for (w, b) in ghw.into_iter().zip(ghb) {
            flat.extend(w);
            flat.extend(b);
        }
        flat
    }

    /// Slice bounds of each head's parameters inside the flat layout.
    pub fn head_param_ranges(&self) -> Vec<(String, bool, std::ops::Range<usize>)> {
        let mut at = self.shared1.w.len()
            + self.shared1.b.len()
            + self.shared2.w.len()
            + self.shared2.b.len();
        self.heads
            .iter()
            .map(|h| {
                let len = h.layer.w.len() + h.layer.b.len();
                let range = at..at + len;
                at += len;
                (h.name.clone(), h.kind.is_numeric(), range)
            })
            .collect()
    }
}

/// Cross-entropy and MSE components of the total loss; total applies
/// the 1/s scaling to the regression part.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LossParts {
    pub ce: f64,
    pub mse: f64,
    pub s: f64,
}

impl LossParts {
    pub fn total(&self) -> f64 {
        self.ce + self.mse / self.s
    }
}

fn softmax(logits: &[f64]) -> Vec<f64> {
    let max = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = logits.iter().map(|z| (z - max).exp()).collect();
    let sum: f64 = exps.iter().sum();
    exps.iter().map(|e| e / sum).collect()
}

fn cross_entropy(logits: &[f64], class: usize) -> f64 {
    let max = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let log_sum = logits.iter().map(|z| (z - max).exp()).sum::<f64>().ln() + max;
    log_sum - logits[class]
}

/// Turn a stored best assignment into per-head targets.
pub fn targets_for(
    space: &HyperParamSpace,
    assignment: &HyperParamAssignment,
) -> Result<Vec<Target>, MtlError> {
    space
        .domains
        .iter()
        .map(|d| {
            let value = assignment
                .get(&d.name)
                .ok_or_else(|| MtlError::MissingTarget(d.name.clone()))?;
            Ok(match (&d.kind, value) {
                (ParamKind::Categorical { labels }, ParamValue::Cat(v)) => Target::Class(
                    labels
                        .iter()
                        .position(|l| l == v)
                        .ok_or_else(|| MtlError::MissingTarget(d.name.clone()))?,
                ),
                (ParamKind::Integer { lo, .. }, ParamValue::Int(v)) => {
                    Target::Class((v - lo) as usize)
                }
                (ParamKind::Continuous { lo, hi }, ParamValue::Num(v)) => {
                    let span = hi - lo;
                    let t = if span > 0.0 { (v - lo) / span } else { 0.5 };
                    Target::Value01(t.clamp(0.0, 1.0))
                }
                _ => return Err(MtlError::MissingTarget(d.name.clone())),
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy)]
pub struct TrainOptions {
    pub epochs: usize,
    pub lr: f64,
    pub batch: usize,
    pub momentum: f64,
}

impl Default for TrainOptions {
    fn default() -> Self {
        TrainOptions {
            epochs: 200,
            lr: 0.05,
            batch: 32,
            momentum: 0.9,
        }
    }
}

/// Mini-batch SGD with momentum on the total loss. Returns the trained
/// net and the end-of-epoch loss trace (entry 0 is the pre-training
/// loss).
pub fn train_mtl(
    space: &HyperParamSpace,
    inputs: &[Vec<f64>],
    targets: &[Vec<Target>],
    s: f64,
    opts: TrainOptions,
    seed: u64,
) -> Result<(MultiTaskNet, Vec<f64>), MtlError> {
    if inputs.is_empty() {
        return Err(MtlError::NoTrainingRows);
    }
    debug_assert_eq!(inputs.len(), targets.len());
    let mut net = MultiTaskNet::new(space, s, seed);
    let mut trace = vec![net.loss(inputs, targets)];
    if net.heads.is_empty() {
        return Ok((net, trace));
    }
    let mut velocity = vec![0.0; net.params_flat().len()];
    let mut order: Vec<usize> = (0..inputs.len()).collect();
    for epoch in 0..opts.epochs {
        let mut rng = StreamRng::new(seed)
            .with_str("mtl-epoch")
            .with_str(space.model_id.name())
            .with_u64(epoch as u64);
        rng.shuffle(&mut order);
        for chunk in order.chunks(opts.batch.max(1)) {
            let batch_x: Vec<Vec<f64>> = chunk.iter().map(|&i| inputs[i].clone()).collect();
            let batch_t: Vec<Vec<Target>> = chunk.iter().map(|&i| targets[i].clone()).collect();
            let grads = net.gradients(&batch_x, &batch_t);
            let mut params = net.params_flat();
            for ((p, v), g) in params.iter_mut().zip(velocity.iter_mut()).zip(&grads) {
                *v = opts.momentum * *v - opts.lr * g;
                *p += *v;
            }
            net.set_params_flat(&params);
        }
        trace.push(net.loss(inputs, targets));
    }
    Ok((net, trace))
}

/// Head outputs mapped into a valid assignment: argmax labels for the
/// softmax heads, squashed-and-clamped values for numeric heads.
pub fn predict_hparams(
    net: &MultiTaskNet,
    x: &[f64],
    space: &HyperParamSpace,
) -> HyperParamAssignment {
    debug_assert_eq!(net.heads.len(), space.domains.len());
    let outs = net.head_outputs(x);
    let values = net
        .heads
        .iter()
        .zip(&outs)
        .map(|(head, out)| {
            let value = match &head.kind {
                HeadKind::Categorical { labels } => {
                    let mut best = 0;
                    for (i, &z) in out.iter().enumerate() {
                        if z > out[best] {
                            best = i;
                        }
                    }
                    ParamValue::Cat(labels[best].clone())
                }
                HeadKind::IntRange { lo, .. } => {
                    let mut best = 0;
                    for (i, &z) in out.iter().enumerate() {
                        if z > out[best] {
                            best = i;
                        }
                    }
                    ParamValue::Int(lo + best as i64)
                }
                HeadKind::Numeric { lo, hi } => {
                    ParamValue::Num((lo + sigmoid(out[0]) * (hi - lo)).clamp(*lo, *hi))
                }
            };
            (head.name.clone(), value)
        })
        .collect();
    HyperParamAssignment {
        model_id: space.model_id,
        values,
    }
}
