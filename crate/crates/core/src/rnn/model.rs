//! Many-to-one recurrent classifier: embeddings → RNN → dropout → linear →
//! sigmoid.

use rand::Rng;

use super::cell::{CellParams, CellState, StepCache};
use super::config::ModelConfig;
use crate::data::Sample;
use crate::error::{Error, Result};
use crate::features::{assemble_input, Embeddings, VariableSet};
use crate::linalg::{sigmoid, Matrix};

/// All learned tensors of a model. Also used to hold gradients.
#[derive(Debug, Clone, PartialEq)]
pub struct Params {
    pub embeddings: Embeddings,
    pub forward: CellParams,
    /// Present for bidirectional models.
    pub backward: Option<CellParams>,
    pub head_w: Matrix,
    pub head_b: Vec<f64>,
}

impl Params {
    pub fn zeros(config: &ModelConfig) -> Self {
        let kind = config.rnn_type.cell();
        let (d, h) = (config.input_dim(), config.hidden_dim);
        Self {
            embeddings: Embeddings::zeros(&config.vars),
            forward: CellParams::zeros(kind, d, h),
            backward: config
                .rnn_type
                .bidirectional()
                .then(|| CellParams::zeros(kind, d, h)),
            head_w: Matrix::zeros(config.outputs(), config.readout_dim()),
            head_b: vec![0.0; config.outputs()],
        }
    }

    /// Embeddings uniform in ±0.05; every recurrent and head tensor uniform
    /// in ±1/√H.
    pub fn init<R: Rng + ?Sized>(config: &ModelConfig, rng: &mut R) -> Self {
        let kind = config.rnn_type.cell();
        let (d, h) = (config.input_dim(), config.hidden_dim);
        let bound = 1.0 / (h as f64).sqrt();
        let embeddings = Embeddings::new(&config.vars, rng);
        let forward = CellParams::uniform(kind, d, h, bound, rng);
        let backward = config
            .rnn_type
            .bidirectional()
            .then(|| CellParams::uniform(kind, d, h, bound, rng));
        let head_w = Matrix::uniform(config.outputs(), config.readout_dim(), bound, rng);
        let head_b = (0..config.outputs())
            .map(|_| rng.random_range(-bound..bound))
            .collect();
        Self {
            embeddings,
            forward,
            backward,
            head_w,
            head_b,
        }
    }

    pub fn zeros_like(&self) -> Self {
        Self {
            embeddings: self.embeddings.zeros_like(),
            forward: self.forward.zeros_like(),
            backward: self.backward.as_ref().map(CellParams::zeros_like),
            head_w: Matrix::zeros(self.head_w.rows, self.head_w.cols),
            head_b: vec![0.0; self.head_b.len()],
        }
    }

    /// Named tensors in the fixed serialization order.
    pub fn tensors(&self) -> Vec<(String, &[f64])> {
        let mut out: Vec<(String, &[f64])> = Vec::new();
        for (name, t) in [
            ("embed.looking", &self.embeddings.looking),
            ("embed.orientation", &self.embeddings.orientation),
            ("embed.movement", &self.embeddings.movement),
        ] {
            if let Some(t) = t {
                out.push((name.to_string(), &t.weights.data));
            }
        }
        for (dir, cell) in [
            ("fwd", Some(&self.forward)),
            ("bwd", self.backward.as_ref()),
        ] {
            if let Some(c) = cell {
                out.push((format!("{dir}.w_ih"), &c.w_ih.data));
                out.push((format!("{dir}.w_hh"), &c.w_hh.data));
                out.push((format!("{dir}.b_ih"), &c.b_ih));
                out.push((format!("{dir}.b_hh"), &c.b_hh));
            }
        }
        out.push(("head.w".into(), &self.head_w.data));
        out.push(("head.b".into(), &self.head_b));
        out
    }

    /// Mutable view of [`Params::tensors`], same order.
    pub fn tensors_mut(&mut self) -> Vec<(String, &mut [f64])> {
        let Params {
            embeddings,
            forward,
            backward,
            head_w,
            head_b,
        } = self;
        let mut out: Vec<(String, &mut [f64])> = Vec::new();
        let Embeddings {
            looking,
            orientation,
            movement,
        } = embeddings;
        for (name, t) in [
            ("embed.looking", looking),
            ("embed.orientation", orientation),
            ("embed.movement", movement),
        ] {
            if let Some(t) = t {
                out.push((name.to_string(), &mut t.weights.data));
            }
        }
        for (dir, cell) in [("fwd", Some(forward)), ("bwd", backward.as_mut())] {
            if let Some(c) = cell {
                out.push((format!("{dir}.w_ih"), &mut c.w_ih.data));
                out.push((format!("{dir}.w_hh"), &mut c.w_hh.data));
                out.push((format!("{dir}.b_ih"), &mut c.b_ih));
                out.push((format!("{dir}.b_hh"), &mut c.b_hh));
            }
        }
        out.push(("head.w".into(), &mut head_w.data));
        out.push(("head.b".into(), head_b));
        out
    }

    pub fn num_params(&self) -> usize {
        self.tensors().iter().map(|(_, t)| t.len()).sum()
    }

    /// Rounds every entry to the nearest `f32`, making the parameters exactly
    /// representable in a checkpoint.
    pub fn round_to_f32(&mut self) {
        for (_, t) in self.tensors_mut() {
            for v in t.iter_mut() {
                *v = *v as f32 as f64;
            }
        }
    }

    /// `self += scale * other`, tensor by tensor.
    pub fn add_scaled(&mut self, other: &Params, scale: f64) {
        for ((_, dst), (_, src)) in self.tensors_mut().into_iter().zip(other.tensors()) {
            for (d, s) in dst.iter_mut().zip(src) {
                *d += scale * s;
            }
        }
    }

    pub fn scale(&mut self, factor: f64) {
        for (_, t) in self.tensors_mut() {
            for v in t.iter_mut() {
                *v *= factor;
            }
        }
    }

    pub fn l2_norm(&self) -> f64 {
        self.tensors()
            .iter()
            .flat_map(|(_, t)| t.iter())
            .map(|v| v * v)
            .sum::<f64>()
            .sqrt()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Train,
    Eval,
}

/// Inverted-dropout multipliers: each coordinate is `0` with probability `p`
/// and `1/(1-p)` otherwise.
pub fn dropout_mask<R: Rng + ?Sized>(width: usize, p: f64, rng: &mut R) -> Vec<f64> {
    let keep = 1.0 / (1.0 - p);
    (0..width)
        .map(|_| if rng.random::<f64>() < p { 0.0 } else { keep })
        .collect()
}

/// Intermediate values of one forward pass, consumed by the backward pass.
#[derive(Debug, Clone)]
pub struct Trace {
    pub inputs: Vec<Vec<f64>>,
    fwd: Vec<StepCache>,
    bwd: Vec<StepCache>,
    pub readout: Vec<f64>,
    pub mask: Option<Vec<f64>>,
    pub logits: Vec<f64>,
    pub probs: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Model {
    pub config: ModelConfig,
    pub params: Params,
}

impl Model {
    pub fn new<R: Rng + ?Sized>(config: ModelConfig, rng: &mut R) -> Result<Self> {
        config.validate()?;
        let params = Params::init(&config, rng);
        Ok(Self { config, params })
    }

    pub fn zeros(config: ModelConfig) -> Result<Self> {
        config.validate()?;
        let params = Params::zeros(&config);
        Ok(Self { config, params })
    }

    pub fn vars(&self) -> &VariableSet {
        &self.config.vars
    }

    /// Assembled input vectors of a sample, one per frame.
    pub fn assemble(&self, sample: &Sample) -> Result<Vec<Vec<f64>>> {
        sample
            .inputs
            .iter()
            .map(|f| {
                assemble_input(
                    f,
                    &self.params.embeddings,
                    &self.config.vars,
                    self.config.image_dim,
                )
            })
            .collect()
    }

    fn run_direction(
        cell: &CellParams,
        xs: &[Vec<f64>],
        reverse: bool,
    ) -> (Vec<f64>, Vec<StepCache>) {
        let mut state = CellState::zeros(cell.kind, cell.hidden_dim());
        let mut caches = Vec::with_capacity(xs.len());
        let order: Box<dyn Iterator<Item = &Vec<f64>>> = if reverse {
            Box::new(xs.iter().rev())
        } else {
            Box::new(xs.iter())
        };
        for x in order {
            let (next, cache) = cell.step_cached(x, &state);
            caches.push(cache);
            state = next;
        }
        (state.h, caches)
    }

    fn rnn_trace(&self, xs: &[Vec<f64>]) -> Result<(Vec<f64>, Vec<StepCache>, Vec<StepCache>)> {
        if xs.is_empty() {
            return Err(Error::InvalidArgument("empty input sequence".into()));
        }
        let d = self.params.forward.input_dim();
        if let Some(x) = xs.iter().find(|x| x.len() != d) {
            return Err(Error::Shape(format!(
                "input vector of length {} (model expects {d})",
                x.len()
            )));
        }
        let (mut readout, fwd) = Self::run_direction(&self.params.forward, xs, false);
        let mut bwd = Vec::new();
        if let Some(cell) = &self.params.backward {
            let (hb, caches) = Self::run_direction(cell, xs, true);
            readout.extend(hb);
            bwd = caches;
        }
        Ok((readout, fwd, bwd))
    }

    /// Final hidden state (or `[forward | backward]` final states) after
    /// consuming an already-assembled sequence from zero initial state.
    pub fn rnn_forward(&self, xs: &[Vec<f64>]) -> Result<Vec<f64>> {
        Ok(self.rnn_trace(xs)?.0)
    }

    /// `sigmoid(W · (mask ⊙ readout) + b)`; `None` means no dropout.
    pub fn head_forward(&self, readout: &[f64], mask: Option<&[f64]>) -> Result<Vec<f64>> {
        Ok(self
            .head_logits(readout, mask)?
            .into_iter()
            .map(sigmoid)
            .collect())
    }

    fn head_logits(&self, readout: &[f64], mask: Option<&[f64]>) -> Result<Vec<f64>> {
        let w = &self.params.head_w;
        if readout.len() != w.cols || mask.is_some_and(|m| m.len() != w.cols) {
            return Err(Error::Shape(format!(
                "head expects readout of width {}, got {}",
                w.cols,
                readout.len()
            )));
        }
        let dropped: Vec<f64> = match mask {
            Some(m) => readout.iter().zip(m).map(|(r, m)| r * m).collect(),
            None => readout.to_vec(),
        };
        let mut logits = self.params.head_b.clone();
        w.matvec_acc(&dropped, &mut logits);
        Ok(logits)
    }

    /// Full forward pass with a fixed dropout mask, keeping everything the
    /// backward pass needs.
    pub fn trace(&self, sample: &Sample, mask: Option<&[f64]>) -> Result<Trace> {
        let inputs = self.assemble(sample)?;
        let (readout, fwd, bwd) = self.rnn_trace(&inputs)?;
        let logits = self.head_logits(&readout, mask)?;
        let probs = logits.iter().map(|&z| sigmoid(z)).collect();
        Ok(Trace {
            inputs,
            fwd,
            bwd,
            readout,
            mask: mask.map(<[f64]>::to_vec),
            logits,
            probs,
        })
    }

    /// Crossing probabilities (one per horizon) without dropout.
    pub fn predict(&self, sample: &Sample) -> Result<Vec<f64>> {
        Ok(self.trace(sample, None)?.probs)
    }

    /// Draws a dropout mask for the readout in training mode.
    pub fn sample_mask<R: Rng + ?Sized>(&self, rng: &mut R) -> Option<Vec<f64>> {
        (self.config.dropout > 0.0)
            .then(|| dropout_mask(self.config.readout_dim(), self.config.dropout, rng))
    }

    /// Backpropagates `d loss / d logits` through the head, both recurrent
    /// directions and the embeddings, accumulating into `grads`.
    pub fn backward(
        &self,
        sample: &Sample,
        trace: &Trace,
        dlogits: &[f64],
        grads: &mut Params,
    ) -> Result<()> {
        let readout_dim = trace.readout.len();
        let dropped: Vec<f64> = match &trace.mask {
            Some(m) => trace.readout.iter().zip(m).map(|(r, m)| r * m).collect(),
            None => trace.readout.clone(),
        };
        grads.head_w.outer_acc(dlogits, &dropped);
        for (b, d) in grads.head_b.iter_mut().zip(dlogits) {
            *b += d;
        }
        let mut dreadout = vec![0.0; readout_dim];
        self.params.head_w.matvec_t_acc(dlogits, &mut dreadout);
        if let Some(m) = &trace.mask {
            for (d, m) in dreadout.iter_mut().zip(m) {
                *d *= m;
            }
        }

        let steps = trace.inputs.len();
        let hd = self.config.hidden_dim;
        let mut dxs = vec![vec![0.0; self.config.input_dim()]; steps];

        let mut bptt = |cell: &CellParams,
                        caches: &[StepCache],
                        dh_final: &[f64],
                        grads: &mut CellParams,
                        reverse: bool| {
            let mut dh = dh_final.to_vec();
            let mut dc = vec![0.0; hd];
            for k in (0..steps).rev() {
                let pos = if reverse { steps - 1 - k } else { k };
                let (dx, dh_prev, dc_prev) =
                    cell.step_backward(&trace.inputs[pos], &caches[k], &dh, &dc, grads);
                for (a, b) in dxs[pos].iter_mut().zip(&dx) {
                    *a += b;
                }
                dh = dh_prev;
                dc = if dc_prev.is_empty() {
                    vec![0.0; hd]
                } else {
                    dc_prev
                };
            }
        };
        bptt(
            &self.params.forward,
            &trace.fwd,
            &dreadout[..hd],
            &mut grads.forward,
            false,
        );
        if let (Some(cell), Some(g)) = (&self.params.backward, grads.backward.as_mut()) {
            bptt(cell, &trace.bwd, &dreadout[hd..], g, true);
        }

        let image_dim = self.config.image_dim;
        for (frame, dx) in sample.inputs.iter().zip(&dxs) {
            grads.embeddings.accumulate(frame, image_dim, dx)?;
        }
        Ok(())
    }
}

/// Forward pass in the given mode. Training mode draws a dropout mask from
/// `rng`; evaluation mode ignores it.
pub fn model_forward<R: Rng + ?Sized>(
    sample: &Sample,
    model: &Model,
    mode: Mode,
    rng: &mut R,
) -> Result<Vec<f64>> {
    let mask = match mode {
        Mode::Train => model.sample_mask(rng),
        Mode::Eval => None,
    };
    Ok(model.trace(sample, mask.as_deref())?.probs)
}
