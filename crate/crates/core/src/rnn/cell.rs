//! LSTM and GRU cells with hand-written backward passes.
//!
//! Weight matrices stack the gate blocks row-wise: LSTM `[i; f; g; o]`,
//! GRU `[z; r; n]`, each block `H` rows.
//!
//! LSTM: `i, f, o = σ(·)`, `g = tanh(·)`, `c' = f⊙c + i⊙g`, `h' = o⊙tanh(c')`.
//!
//! GRU: `z, r = σ(W x + b_i + U h + b_h)`,
//! `n = tanh(W_n x + b_in + r⊙(U_n h + b_hn))`, `h' = (1−z)⊙n + z⊙h`.

use rand::Rng;

use super::config::CellKind;
use crate::error::{Error, Result};
use crate::linalg::{sigmoid, Matrix};

#[derive(Debug, Clone, PartialEq)]
pub struct CellParams {
    pub kind: CellKind,
    pub w_ih: Matrix,
    pub w_hh: Matrix,
    pub b_ih: Vec<f64>,
    pub b_hh: Vec<f64>,
}

/// Hidden (and, for LSTM, cell) state.
#[derive(Debug, Clone, PartialEq)]
pub struct CellState {
    pub h: Vec<f64>,
    /// Empty for GRU.
    pub c: Vec<f64>,
}

impl CellState {
    pub fn zeros(kind: CellKind, hidden: usize) -> Self {
        Self {
            h: vec![0.0; hidden],
            c: match kind {
                CellKind::Lstm => vec![0.0; hidden],
                CellKind::Gru => Vec::new(),
            },
        }
    }
}

/// Values saved by a forward step for its backward pass.
#[derive(Debug, Clone)]
pub struct StepCache {
    h_prev: Vec<f64>,
    c_prev: Vec<f64>,
    /// Activated gates, same block layout as the weights.
    gates: Vec<f64>,
    /// LSTM: new cell state. GRU: `U_n h + b_hn`.
    aux: Vec<f64>,
}

impl CellParams {
    pub fn zeros(kind: CellKind, input_dim: usize, hidden: usize) -> Self {
        let g = kind.gates() * hidden;
        Self {
            kind,
            w_ih: Matrix::zeros(g, input_dim),
            w_hh: Matrix::zeros(g, hidden),
            b_ih: vec![0.0; g],
            b_hh: vec![0.0; g],
        }
    }

    /// Every entry uniform in `(-bound, bound)`.
    pub fn uniform<R: Rng + ?Sized>(
        kind: CellKind,
        input_dim: usize,
        hidden: usize,
        bound: f64,
        rng: &mut R,
    ) -> Self {
        let g = kind.gates() * hidden;
        let w_ih = Matrix::uniform(g, input_dim, bound, rng);
        let w_hh = Matrix::uniform(g, hidden, bound, rng);
        let mut vec =
            |n: usize| -> Vec<f64> { (0..n).map(|_| rng.random_range(-bound..bound)).collect() };
        let b_ih = vec(g);
        let b_hh = vec(g);
        Self {
            kind,
            w_ih,
            w_hh,
            b_ih,
            b_hh,
        }
    }

    pub fn input_dim(&self) -> usize {
        self.w_ih.cols
    }

    pub fn hidden_dim(&self) -> usize {
        self.w_hh.cols
    }

    pub fn zeros_like(&self) -> Self {
        Self::zeros(self.kind, self.input_dim(), self.hidden_dim())
    }

    fn check(&self, x: &[f64], state: &CellState) -> Result<()> {
        let h = self.hidden_dim();
        let c_len = match self.kind {
            CellKind::Lstm => h,
            CellKind::Gru => 0,
        };
        if x.len() != self.input_dim() || state.h.len() != h || state.c.len() != c_len {
            return Err(Error::Shape(format!(
                "{:?} cell expects x[{}], h[{h}], c[{c_len}]; got x[{}], h[{}], c[{}]",
                self.kind,
                self.input_dim(),
                x.len(),
                state.h.len(),
                state.c.len()
            )));
        }
        Ok(())
    }

    /// One recurrence step.
    pub fn step(&self, x: &[f64], state: &CellState) -> Result<CellState> {
        self.check(x, state)?;
        Ok(self.step_cached(x, state).0)
    }

    pub(crate) fn step_cached(&self, x: &[f64], state: &CellState) -> (CellState, StepCache) {
        match self.kind {
            CellKind::Lstm => self.lstm_forward(x, state),
            CellKind::Gru => self.gru_forward(x, state),
        }
    }

    fn lstm_forward(&self, x: &[f64], state: &CellState) -> (CellState, StepCache) {
        let hd = self.hidden_dim();
        let mut a = self.b_ih.clone();
        for (a, b) in a.iter_mut().zip(&self.b_hh) {
            *a += b;
        }
        self.w_ih.matvec_acc(x, &mut a);
        self.w_hh.matvec_acc(&state.h, &mut a);
        let mut gates = a;
        for (k, v) in gates.iter_mut().enumerate() {
            *v = if k / hd == 2 { v.tanh() } else { sigmoid(*v) };
        }
        let (i, rest) = gates.split_at(hd);
        let (f, rest) = rest.split_at(hd);
        let (g, o) = rest.split_at(hd);
        let mut c = vec![0.0; hd];
        let mut h = vec![0.0; hd];
        for j in 0..hd {
            c[j] = f[j] * state.c[j] + i[j] * g[j];
            h[j] = o[j] * c[j].tanh();
        }
        let cache = StepCache {
            h_prev: state.h.clone(),
            c_prev: state.c.clone(),
            gates,
            aux: c.clone(),
        };
        (CellState { h, c }, cache)
    }

    fn gru_forward(&self, x: &[f64], state: &CellState) -> (CellState, StepCache) {
        let hd = self.hidden_dim();
        let mut ai = self.b_ih.clone();
        self.w_ih.matvec_acc(x, &mut ai);
        let mut ah = self.b_hh.clone();
        self.w_hh.matvec_acc(&state.h, &mut ah);
        let mut gates = vec![0.0; 3 * hd];
        for j in 0..hd {
            gates[j] = sigmoid(ai[j] + ah[j]);
            gates[hd + j] = sigmoid(ai[hd + j] + ah[hd + j]);
            let r = gates[hd + j];
            gates[2 * hd + j] = (ai[2 * hd + j] + r * ah[2 * hd + j]).tanh();
        }
        let h: Vec<f64> = (0..hd)
            .map(|j| {
                let z = gates[j];
                (1.0 - z) * gates[2 * hd + j] + z * state.h[j]
            })
            .collect();
        let cache = StepCache {
            h_prev: state.h.clone(),
            c_prev: Vec::new(),
            gates,
            aux: ah[2 * hd..].to_vec(),
        };
        (CellState { h, c: Vec::new() }, cache)
    }

    /// Backward through one step. `dh`/`dc` are gradients w.r.t. the step's
    /// outputs; parameter gradients are accumulated into `grads`. Returns
    /// `(dx, dh_prev, dc_prev)`.
    pub(crate) fn step_backward(
        &self,
        x: &[f64],
        cache: &StepCache,
        dh: &[f64],
        dc: &[f64],
        grads: &mut CellParams,
    ) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
        match self.kind {
            CellKind::Lstm => self.lstm_backward(x, cache, dh, dc, grads),
            CellKind::Gru => self.gru_backward(x, cache, dh, grads),
        }
    }

    fn lstm_backward(
        &self,
        x: &[f64],
        cache: &StepCache,
        dh: &[f64],
        dc: &[f64],
        grads: &mut CellParams,
    ) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
        let hd = self.hidden_dim();
        let gt = &cache.gates;
        let c = &cache.aux;
        let mut da = vec![0.0; 4 * hd];
        let mut dc_prev = vec![0.0; hd];
        for j in 0..hd {
            let (i, f, g, o) = (gt[j], gt[hd + j], gt[2 * hd + j], gt[3 * hd + j]);
            let tc = c[j].tanh();
            let d_o = dh[j] * tc;
            let dct = dc[j] + dh[j] * o * (1.0 - tc * tc);
            let di = dct * g;
            let dg = dct * i;
            let df = dct * cache.c_prev[j];
            dc_prev[j] = dct * f;
            da[j] = di * i * (1.0 - i);
            da[hd + j] = df * f * (1.0 - f);
            da[2 * hd + j] = dg * (1.0 - g * g);
            da[3 * hd + j] = d_o * o * (1.0 - o);
        }
        grads.w_ih.outer_acc(&da, x);
        grads.w_hh.outer_acc(&da, &cache.h_prev);
        for ((bi, bh), d) in grads.b_ih.iter_mut().zip(grads.b_hh.iter_mut()).zip(&da) {
            *bi += d;
            *bh += d;
        }
        let mut dx = vec![0.0; self.input_dim()];
        self.w_ih.matvec_t_acc(&da, &mut dx);
        let mut dh_prev = vec![0.0; hd];
        self.w_hh.matvec_t_acc(&da, &mut dh_prev);
        (dx, dh_prev, dc_prev)
    }

    fn gru_backward(
        &self,
        x: &[f64],
        cache: &StepCache,
        dh: &[f64],
        grads: &mut CellParams,
    ) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
        let hd = self.hidden_dim();
        let gt = &cache.gates;
        let ah_n = &cache.aux;
        let mut dai = vec![0.0; 3 * hd];
        let mut dah = vec![0.0; 3 * hd];
        let mut dh_prev = vec![0.0; hd];
        for j in 0..hd {
            let (z, r, n) = (gt[j], gt[hd + j], gt[2 * hd + j]);
            let dz = dh[j] * (cache.h_prev[j] - n);
            let dn = dh[j] * (1.0 - z);
            dh_prev[j] = dh[j] * z;
            let dan = dn * (1.0 - n * n);
            let dr = dan * ah_n[j];
            let daz = dz * z * (1.0 - z);
            let dar = dr * r * (1.0 - r);
            dai[j] = daz;
            dai[hd + j] = dar;
            dai[2 * hd + j] = dan;
            dah[j] = daz;
            dah[hd + j] = dar;
            dah[2 * hd + j] = dan * r;
        }
        grads.w_ih.outer_acc(&dai, x);
        grads.w_hh.outer_acc(&dah, &cache.h_prev);
        for k in 0..3 * hd {
            grads.b_ih[k] += dai[k];
            grads.b_hh[k] += dah[k];
        }
        let mut dx = vec![0.0; self.input_dim()];
        self.w_ih.matvec_t_acc(&dai, &mut dx);
        self.w_hh.matvec_t_acc(&dah, &mut dh_prev);
        (dx, dh_prev, Vec::new())
    }
}

/// One LSTM step: returns `(h', c')`.
pub fn lstm_step(
    x: &[f64],
    h: &[f64],
    c: &[f64],
    params: &CellParams,
) -> Result<(Vec<f64>, Vec<f64>)> {
    if params.kind != CellKind::Lstm {
        return Err(Error::InvalidArgument(
            "lstm_step needs LSTM parameters".into(),
        ));
    }
    let s = params.step(
        x,
        &CellState {
            h: h.to_vec(),
            c: c.to_vec(),
        },
    )?;
    Ok((s.h, s.c))
}

/// One GRU step: returns `h'`.
pub fn gru_step(x: &[f64], h: &[f64], params: &CellParams) -> Result<Vec<f64>> {
    if params.kind != CellKind::Gru {
        return Err(Error::InvalidArgument(
            "gru_step needs GRU parameters".into(),
        ));
    }
    Ok(params
        .step(
            x,
            &CellState {
                h: h.to_vec(),
                c: Vec::new(),
            },
        )?
        .h)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn sig(x: f64) -> f64 {
        1.0 / (1.0 + (-x).exp())
    }

    /// Gate pre-activation for block `b`, unit `j`, written as explicit loops.
    #[allow(clippy::needless_range_loop)]
    fn pre(p: &CellParams, b: usize, j: usize, x: &[f64], h: &[f64]) -> (f64, f64) {
        let hd = p.hidden_dim();
        let row = b * hd + j;
        let mut xi = p.b_ih[row];
        for k in 0..x.len() {
            xi += p.w_ih.data[row * x.len() + k] * x[k];
        }
        let mut hh = p.b_hh[row];
        for k in 0..hd {
            hh += p.w_hh.data[row * hd + k] * h[k];
        }
        (xi, hh)
    }

    fn lstm_oracle(p: &CellParams, x: &[f64], h: &[f64], c: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let hd = p.hidden_dim();
        let mut h2 = vec![0.0; hd];
        let mut c2 = vec![0.0; hd];
        for j in 0..hd {
            let s = |b| {
                let (a, b2) = pre(p, b, j, x, h);
                a + b2
            };
            let i = sig(s(0));
            let f = sig(s(1));
            let g = s(2).tanh();
            let o = sig(s(3));
            c2[j] = f * c[j] + i * g;
            h2[j] = o * c2[j].tanh();
        }
        (h2, c2)
    }

    fn gru_oracle(p: &CellParams, x: &[f64], h: &[f64]) -> Vec<f64> {
        (0..p.hidden_dim())
            .map(|j| {
                let (zx, zh) = pre(p, 0, j, x, h);
                let (rx, rh) = pre(p, 1, j, x, h);
                let (nx, nh) = pre(p, 2, j, x, h);
                let z = sig(zx + zh);
                let r = sig(rx + rh);
                let n = (nx + r * nh).tanh();
                (1.0 - z) * n + z * h[j]
            })
            .collect()
    }

    #[test]
    fn zero_lstm_from_zero_state() {
        let p = CellParams::zeros(CellKind::Lstm, 3, 4);
        let (h, c) = lstm_step(&[0.3, -1.0, 2.0], &[0.0; 4], &[0.0; 4], &p).unwrap();
        assert_eq!(h, vec![0.0; 4]);
        assert_eq!(c, vec![0.0; 4]);
    }

    #[test]
    fn zero_lstm_halves_cell() {
        let p = CellParams::zeros(CellKind::Lstm, 3, 4);
        let (h, c) = lstm_step(&[1.0, 1.0, 1.0], &[0.0; 4], &[1.0; 4], &p).unwrap();
        for j in 0..4 {
            assert!((c[j] - 0.5).abs() < 1e-15);
            assert!((h[j] - 0.5 * 0.5f64.tanh()).abs() < 1e-15);
            assert!((h[j] - 0.2311).abs() < 1e-4);
        }
    }

    #[test]
    fn zero_gru_cases() {
        let p = CellParams::zeros(CellKind::Gru, 2, 3);
        let h = gru_step(&[5.0, -5.0], &[0.8; 3], &p).unwrap();
        assert!(h.iter().all(|&v| (v - 0.4).abs() < 1e-15));
        assert_eq!(gru_step(&[5.0, -5.0], &[0.0; 3], &p).unwrap(), vec![0.0; 3]);
    }

    #[test]
    fn random_steps_match_scalar_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let d = rng.random_range(1..9);
            let hd = rng.random_range(1..6);
            let x: Vec<f64> = (0..d).map(|_| rng.random_range(-2.0..2.0)).collect();
            let h: Vec<f64> = (0..hd).map(|_| rng.random_range(-1.0..1.0)).collect();
            let c: Vec<f64> = (0..hd).map(|_| rng.random_range(-1.0..1.0)).collect();

            let p = CellParams::uniform(CellKind::Lstm, d, hd, 0.7, &mut rng);
            let (h2, c2) = lstm_step(&x, &h, &c, &p).unwrap();
            let (oh, oc) = lstm_oracle(&p, &x, &h, &c);
            for j in 0..hd {
                assert!((h2[j] - oh[j]).abs() < 1e-6);
                assert!((c2[j] - oc[j]).abs() < 1e-6);
            }

            let p = CellParams::uniform(CellKind::Gru, d, hd, 0.7, &mut rng);
            let h2 = gru_step(&x, &h, &p).unwrap();
            let oh = gru_oracle(&p, &x, &h);
            for j in 0..hd {
                assert!((h2[j] - oh[j]).abs() < 1e-6);
            }
        }
    }

    #[test]
    fn shape_errors() {
        let p = CellParams::zeros(CellKind::Lstm, 3, 4);
        assert!(matches!(
            lstm_step(&[0.0; 2], &[0.0; 4], &[0.0; 4], &p),
            Err(Error::Shape(_))
        ));
        assert!(lstm_step(&[0.0; 3], &[0.0; 3], &[0.0; 4], &p).is_err());
        assert!(gru_step(&[0.0; 3], &[0.0; 4], &p).is_err());
    }
}
