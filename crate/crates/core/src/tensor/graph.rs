//! Tape-based reverse-mode differentiation.
//!
//! Nodes are appended in evaluation order, so walking the tape backwards is
//! a valid reverse topological order.

use alloc::rc::Rc;
use alloc::vec::Vec;

use rand::Rng;

use super::{matmul_a_bt_acc, matmul_at_b_acc, softmax_masked_into, Scalar, Tensor};
use crate::error::{Error, Result};

/// Handle to a node on a [`Graph`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Var(usize);

impl Var {
    pub fn index(self) -> usize {
        self.0
    }
}

#[derive(Debug)]
enum Op<T> {
    Leaf,
    MatMul(Var, Var),
    Add(Var, Var),
    Mul(Var, Var),
    AddRow(Var, Var),
    MulRow(Var, Var),
    Scale(Var, T),
    LeakyRelu(Var, T),
    Sigmoid(Var),
    LayerNorm {
        x: Var,
        rstd: Vec<T>,
    },
    MaskedSoftmax(Var),
    ConcatCols(Vec<Var>),
    SliceRows {
        x: Var,
        start: usize,
    },
    Transpose(Var),
    BroadcastRows(Var),
    BroadcastCols(Var),
    Dropout {
        x: Var,
        mask: Vec<T>,
    },
    Sum(Var),
    Mean(Var),
    Bce {
        p: Var,
        labels: Vec<T>,
        lo: T,
        hi: T,
    },
}

#[derive(Debug)]
struct Node<T> {
    value: Tensor<T>,
    op: Op<T>,
    requires_grad: bool,
}

#[derive(Debug)]
pub struct Graph<T> {
    nodes: Vec<Node<T>>,
    grads: Vec<Option<Tensor<T>>>,
    backward_done: bool,
}

impl<T: Scalar> Default for Graph<T> {
    fn default() -> Self {
        Self::new()
    }
}

impl<T: Scalar> Graph<T> {
    pub fn new() -> Self {
        Graph {
            nodes: Vec::new(),
            grads: Vec::new(),
            backward_done: false,
        }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    fn push(&mut self, value: Tensor<T>, op: Op<T>, requires_grad: bool) -> Var {
        self.nodes.push(Node {
            value,
            op,
            requires_grad,
        });
        Var(self.nodes.len() - 1)
    }

    fn rg(&self, v: Var) -> bool {
        self.nodes[v.0].requires_grad
    }

    /// Trainable leaf.
    pub fn param(&mut self, value: Tensor<T>) -> Var {
        self.push(value, Op::Leaf, true)
    }

    /// Leaf that never receives a gradient.
    pub fn constant(&mut self, value: Tensor<T>) -> Var {
        self.push(value, Op::Leaf, false)
    }

    pub fn value(&self, v: Var) -> &Tensor<T> {
        &self.nodes[v.0].value
    }

    pub fn shape(&self, v: Var) -> (usize, usize) {
        self.nodes[v.0].value.shape()
    }

    /// Accumulated gradient, or `None` when nothing flowed into `v`.
    pub fn grad(&self, v: Var) -> Option<&Tensor<T>> {
        self.grads.get(v.0).and_then(Option::as_ref)
    }

    /// Gradient of a trainable leaf, zero-filled if it had no path to the loss.
    pub fn grad_or_zeros(&self, v: Var) -> Tensor<T> {
        match self.grad(v) {
            Some(g) => g.clone(),
            None => {
                let (r, c) = self.shape(v);
                Tensor::zeros(r, c)
            }
        }
    }

    pub fn reset_grads(&mut self) {
        self.grads.clear();
        self.backward_done = false;
    }

    fn same_shape(&self, op: &'static str, a: Var, b: Var) -> Result<()> {
        let (sa, sb) = (self.shape(a), self.shape(b));
        if sa != sb {
            return Err(Error::shape(
                op,
                alloc::format!("{sa:?}"),
                alloc::format!("{sb:?}"),
            ));
        }
        Ok(())
    }

    fn row_operand(&self, op: &'static str, x: Var, row: Var) -> Result<()> {
        let (_, c) = self.shape(x);
        let s = self.shape(row);
        if s != (1, c) {
            return Err(Error::shape(
                op,
                alloc::format!("(1, {c})"),
                alloc::format!("{s:?}"),
            ));
        }
        Ok(())
    }

    pub fn matmul(&mut self, a: Var, b: Var) -> Result<Var> {
        let out = self.value(a).matmul(self.value(b))?;
        let rg = self.rg(a) || self.rg(b);
        Ok(self.push(out, Op::MatMul(a, b), rg))
    }

    pub fn add(&mut self, a: Var, b: Var) -> Result<Var> {
        self.same_shape("add", a, b)?;
        let mut out = self.value(a).clone();
        out.add_assign(self.value(b));
        let rg = self.rg(a) || self.rg(b);
        Ok(self.push(out, Op::Add(a, b), rg))
    }

    /// Elementwise product.
    pub fn mul(&mut self, a: Var, b: Var) -> Result<Var> {
        self.same_shape("mul", a, b)?;
        let vb = self.value(b).data();
        let mut out = self.value(a).clone();
        for (o, &y) in out.data_mut().iter_mut().zip(vb) {
            *o = *o * y;
        }
        let rg = self.rg(a) || self.rg(b);
        Ok(self.push(out, Op::Mul(a, b), rg))
    }

    /// `x + row` with `row` (1×c) broadcast over every row of `x`.
    pub fn add_row(&mut self, x: Var, row: Var) -> Result<Var> {
        self.row_operand("add_row", x, row)?;
        let mut out = self.value(x).clone();
        let b = self.value(row).data();
        for r in 0..out.rows() {
            for (o, &bv) in out.row_mut(r).iter_mut().zip(b) {
                *o += bv;
            }
        }
        let rg = self.rg(x) || self.rg(row);
        Ok(self.push(out, Op::AddRow(x, row), rg))
    }

    /// `x ⊙ row` with `row` (1×c) broadcast over every row of `x`.
    pub fn mul_row(&mut self, x: Var, row: Var) -> Result<Var> {
        self.row_operand("mul_row", x, row)?;
        let mut out = self.value(x).clone();
        let g = self.value(row).data();
        for r in 0..out.rows() {
            for (o, &gv) in out.row_mut(r).iter_mut().zip(g) {
                *o = *o * gv;
            }
        }
        let rg = self.rg(x) || self.rg(row);
        Ok(self.push(out, Op::MulRow(x, row), rg))
    }

    pub fn scale(&mut self, x: Var, s: T) -> Var {
        let out = self.value(x).map(|v| v * s);
        let rg = self.rg(x);
        self.push(out, Op::Scale(x, s), rg)
    }

    pub fn leaky_relu(&mut self, x: Var, slope: T) -> Var {
        let out = self
            .value(x)
            .map(|v| if v > T::zero() { v } else { v * slope });
        let rg = self.rg(x);
        self.push(out, Op::LeakyRelu(x, slope), rg)
    }

    pub fn sigmoid(&mut self, x: Var) -> Var {
        let out = self.value(x).map(|v| T::one() / (T::one() + (-v).exp()));
        let rg = self.rg(x);
        self.push(out, Op::Sigmoid(x), rg)
    }

    /// Row-wise normalization to zero mean and unit variance (no affine).
    pub fn layer_norm(&mut self, x: Var, eps: T) -> Var {
        let xv = self.value(x);
        let (rows, cols) = xv.shape();
        let mut out = Tensor::zeros(rows, cols);
        let mut rstd = Vec::with_capacity(rows);
        let n = T::from_f64(cols as f64);
        for r in 0..rows {
            let row = xv.row(r);
            let mean = row.iter().copied().sum::<T>() / n;
            let var = row.iter().map(|&v| (v - mean) * (v - mean)).sum::<T>() / n;
            let rs = T::one() / (var + eps).sqrt();
            for (o, &v) in out.row_mut(r).iter_mut().zip(row) {
                *o = (v - mean) * rs;
            }
            rstd.push(rs);
        }
        let rg = self.rg(x);
        self.push(out, Op::LayerNorm { x, rstd }, rg)
    }

    /// Row-wise softmax restricted to `mask` (row-major, same shape as `x`).
    /// Masked-out entries are exactly 0. Every row needs at least one member.
    pub fn masked_softmax(&mut self, x: Var, mask: Rc<[bool]>) -> Result<Var> {
        let xv = self.value(x);
        let (rows, cols) = xv.shape();
        if mask.len() != rows * cols {
            return Err(Error::shape("masked_softmax", rows * cols, mask.len()));
        }
        let mut out = Tensor::zeros(rows, cols);
        for r in 0..rows {
            let m = &mask[r * cols..(r + 1) * cols];
            softmax_masked_into(xv.row(r), m, &mut out.data_mut()[r * cols..(r + 1) * cols])?;
        }
        let rg = self.rg(x);
        Ok(self.push(out, Op::MaskedSoftmax(x), rg))
    }

    pub fn concat_cols(&mut self, parts: &[Var]) -> Result<Var> {
        let first = *parts.first().ok_or(Error::Empty("concat_cols input"))?;
        let rows = self.shape(first).0;
        let mut total = 0;
        for &p in parts {
            let (r, c) = self.shape(p);
            if r != rows {
                return Err(Error::shape("concat_cols", rows, r));
            }
            total += c;
        }
        let mut out = Tensor::zeros(rows, total);
        let mut off = 0;
        for &p in parts {
            let v = self.value(p);
            let c = v.cols();
            for r in 0..rows {
                out.row_mut(r)[off..off + c].copy_from_slice(v.row(r));
            }
            off += c;
        }
        let rg = parts.iter().any(|&p| self.rg(p));
        Ok(self.push(out, Op::ConcatCols(parts.to_vec()), rg))
    }

    pub fn slice_rows(&mut self, x: Var, start: usize, len: usize) -> Result<Var> {
        let (rows, cols) = self.shape(x);
        if start + len > rows {
            return Err(Error::shape("slice_rows", rows, start + len));
        }
        let data = self.value(x).data()[start * cols..(start + len) * cols].to_vec();
        let out = Tensor::from_vec(len, cols, data)?;
        let rg = self.rg(x);
        Ok(self.push(out, Op::SliceRows { x, start }, rg))
    }

    pub fn transpose(&mut self, x: Var) -> Var {
        let out = self.value(x).transpose();
        let rg = self.rg(x);
        self.push(out, Op::Transpose(x), rg)
    }

    /// Repeats a 1×c row `rows` times.
    pub fn broadcast_rows(&mut self, x: Var, rows: usize) -> Result<Var> {
        let (r, c) = self.shape(x);
        if r != 1 {
            return Err(Error::shape("broadcast_rows", 1, r));
        }
        let src = self.value(x).data().to_vec();
        let mut data = Vec::with_capacity(rows * c);
        for _ in 0..rows {
            data.extend_from_slice(&src);
        }
        let rg = self.rg(x);
        Ok(self.push(Tensor::from_vec(rows, c, data)?, Op::BroadcastRows(x), rg))
    }

    /// Repeats an r×1 column `cols` times.
    pub fn broadcast_cols(&mut self, x: Var, cols: usize) -> Result<Var> {
        let (r, c) = self.shape(x);
        if c != 1 {
            return Err(Error::shape("broadcast_cols", 1, c));
        }
        let mut out = Tensor::zeros(r, cols);
        for i in 0..r {
            let v = self.value(x).data()[i];
            out.row_mut(i).iter_mut().for_each(|o| *o = v);
        }
        let rg = self.rg(x);
        Ok(self.push(out, Op::BroadcastCols(x), rg))
    }

    /// Inverted dropout: kept entries are scaled by `1 / (1 - rate)`.
    pub fn dropout<R: Rng + ?Sized>(&mut self, x: Var, rate: f64, rng: &mut R) -> Var {
        if rate <= 0.0 {
            return x;
        }
        let keep = T::from_f64(1.0 / (1.0 - rate));
        let n = self.value(x).len();
        let mask: Vec<T> = (0..n)
            .map(|_| {
                if rng.gen::<f64>() < rate {
                    T::zero()
                } else {
                    keep
                }
            })
            .collect();
        let mut out = self.value(x).clone();
        for (o, &m) in out.data_mut().iter_mut().zip(&mask) {
            *o = *o * m;
        }
        let rg = self.rg(x);
        self.push(out, Op::Dropout { x, mask }, rg)
    }

    pub fn sum(&mut self, x: Var) -> Var {
        let s = self.value(x).sum();
        let rg = self.rg(x);
        self.push(Tensor::filled(1, 1, s), Op::Sum(x), rg)
    }

    pub fn mean(&mut self, x: Var) -> Var {
        let v = self.value(x);
        let s = v.sum() / T::from_f64(v.len() as f64);
        let rg = self.rg(x);
        self.push(Tensor::filled(1, 1, s), Op::Mean(x), rg)
    }

    /// Mean binary cross-entropy of probabilities `p` against 0/1 `labels`,
    /// with `p` clamped to `[eps, 1 - eps]`.
    pub fn bce_mean(&mut self, p: Var, labels: &[T], eps: T) -> Result<Var> {
        let pv = self.value(p);
        if pv.len() != labels.len() {
            return Err(Error::shape("bce_mean", pv.len(), labels.len()));
        }
        if labels.is_empty() {
            return Err(Error::Empty("bce_mean input"));
        }
        let (lo, hi) = (eps, T::one() - eps);
        let mut total = T::zero();
        for (&q, &y) in pv.data().iter().zip(labels) {
            let q = q.max(lo).min(hi);
            total += y * q.ln() + (T::one() - y) * (T::one() - q).ln();
        }
        let loss = -total / T::from_f64(labels.len() as f64);
        let rg = self.rg(p);
        Ok(self.push(
            Tensor::filled(1, 1, loss),
            Op::Bce {
                p,
                labels: labels.to_vec(),
                lo,
                hi,
            },
            rg,
        ))
    }

    fn acc(&mut self, v: Var, g: Tensor<T>) {
        if !self.rg(v) {
            return;
        }
        match &mut self.grads[v.0] {
            Some(cur) => cur.add_assign(&g),
            slot @ None => *slot = Some(g),
        }
    }

    /// Accumulates d`loss`/d`v` into every node that requires a gradient.
    pub fn backward(&mut self, loss: Var) -> Result<()> {
        if self.backward_done {
            return Err(Error::Autodiff("backward called twice without reset_grads"));
        }
        if self.shape(loss) != (1, 1) {
            return Err(Error::Autodiff("backward needs a scalar loss"));
        }
        self.grads.clear();
        self.grads.resize_with(self.nodes.len(), || None);
        self.grads[loss.0] = Some(Tensor::filled(1, 1, T::one()));

        for idx in (0..=loss.0).rev() {
            if !self.nodes[idx].requires_grad {
                continue;
            }
            let Some(gout) = self.grads[idx].take() else {
                continue;
            };
            self.propagate(idx, &gout);
            self.grads[idx] = Some(gout);
        }
        self.backward_done = true;
        Ok(())
    }

    fn propagate(&mut self, idx: usize, gout: &Tensor<T>) {
        // Temporarily take the op so `self` can be borrowed mutably.
        let op = core::mem::replace(&mut self.nodes[idx].op, Op::Leaf);
        match &op {
            Op::Leaf => {}
            Op::MatMul(a, b) => {
                if self.rg(*a) {
                    let bv = self.value(*b);
                    let mut ga = Tensor::zeros(gout.rows(), bv.rows());
                    matmul_a_bt_acc(gout, bv, &mut ga);
                    self.acc(*a, ga);
                }
                if self.rg(*b) {
                    let av = self.value(*a);
                    let mut gb = Tensor::zeros(av.cols(), gout.cols());
                    matmul_at_b_acc(av, gout, &mut gb);
                    self.acc(*b, gb);
                }
            }
            Op::Add(a, b) => {
                self.acc(*a, gout.clone());
                self.acc(*b, gout.clone());
            }
            Op::Mul(a, b) => {
                if self.rg(*a) {
                    let mut ga = gout.clone();
                    for (g, &y) in ga.data_mut().iter_mut().zip(self.value(*b).data()) {
                        *g = *g * y;
                    }
                    self.acc(*a, ga);
                }
                if self.rg(*b) {
                    let mut gb = gout.clone();
                    for (g, &x) in gb.data_mut().iter_mut().zip(self.value(*a).data()) {
                        *g = *g * x;
                    }
                    self.acc(*b, gb);
                }
            }
            Op::AddRow(x, row) => {
                self.acc(*x, gout.clone());
                if self.rg(*row) {
                    self.acc(*row, column_sums(gout));
                }
            }
            Op::MulRow(x, row) => {
                if self.rg(*x) {
                    let gv = self.value(*row).data().to_vec();
                    let mut gx = gout.clone();
                    for r in 0..gx.rows() {
                        for (g, &s) in gx.row_mut(r).iter_mut().zip(&gv) {
                            *g = *g * s;
                        }
                    }
                    self.acc(*x, gx);
                }
                if self.rg(*row) {
                    let xv = self.value(*x);
                    let mut gr = Tensor::zeros(1, xv.cols());
                    for r in 0..xv.rows() {
                        for ((o, &g), &v) in
                            gr.data_mut().iter_mut().zip(gout.row(r)).zip(xv.row(r))
                        {
                            *o += g * v;
                        }
                    }
                    self.acc(*row, gr);
                }
            }
            Op::Scale(x, s) => {
                let s = *s;
                self.acc(*x, gout.map(|g| g * s));
            }
            Op::LeakyRelu(x, slope) => {
                let mut gx = gout.clone();
                for (g, &v) in gx.data_mut().iter_mut().zip(self.value(*x).data()) {
                    if v <= T::zero() {
                        *g = *g * *slope;
                    }
                }
                self.acc(*x, gx);
            }
            Op::Sigmoid(x) => {
                let mut gx = gout.clone();
                for (g, &y) in gx.data_mut().iter_mut().zip(self.nodes[idx].value.data()) {
                    *g = *g * y * (T::one() - y);
                }
                self.acc(*x, gx);
            }
            Op::LayerNorm { x, rstd } => {
                let y = &self.nodes[idx].value;
                let (rows, cols) = y.shape();
                let n = T::from_f64(cols as f64);
                let mut gx = Tensor::zeros(rows, cols);
                for (r, &rs) in rstd.iter().enumerate().take(rows) {
                    let (yr, gr) = (y.row(r), gout.row(r));
                    let mean_g = gr.iter().copied().sum::<T>() / n;
                    let mean_gy = gr.iter().zip(yr).map(|(&g, &v)| g * v).sum::<T>() / n;
                    for ((o, &g), &v) in gx.row_mut(r).iter_mut().zip(gr).zip(yr) {
                        *o = rs * (g - mean_g - v * mean_gy);
                    }
                }
                self.acc(*x, gx);
            }
            Op::MaskedSoftmax(x) => {
                let y = &self.nodes[idx].value;
                let (rows, cols) = y.shape();
                let mut gx = Tensor::zeros(rows, cols);
                for r in 0..rows {
                    let (yr, gr) = (y.row(r), gout.row(r));
                    let dot = yr.iter().zip(gr).map(|(&p, &g)| p * g).sum::<T>();
                    for ((o, &p), &g) in gx.row_mut(r).iter_mut().zip(yr).zip(gr) {
                        *o = p * (g - dot);
                    }
                }
                self.acc(*x, gx);
            }
            Op::ConcatCols(parts) => {
                let mut off = 0;
                for &p in parts {
                    let (rows, c) = self.shape(p);
                    if self.rg(p) {
                        let mut gp = Tensor::zeros(rows, c);
                        for r in 0..rows {
                            gp.row_mut(r).copy_from_slice(&gout.row(r)[off..off + c]);
                        }
                        self.acc(p, gp);
                    }
                    off += c;
                }
            }
            Op::SliceRows { x, start } => {
                let (rows, cols) = self.shape(*x);
                let mut gx = Tensor::zeros(rows, cols);
                gx.data_mut()[start * cols..start * cols + gout.len()].copy_from_slice(gout.data());
                self.acc(*x, gx);
            }
            Op::Transpose(x) => {
                self.acc(*x, gout.transpose());
            }
            Op::BroadcastRows(x) => {
                self.acc(*x, column_sums(gout));
            }
            Op::BroadcastCols(x) => {
                let sums: Vec<T> = (0..gout.rows())
                    .map(|r| gout.row(r).iter().copied().sum())
                    .collect();
                let n = sums.len();
                self.acc(*x, Tensor::from_vec(n, 1, sums).expect("column shape"));
            }
            Op::Dropout { x, mask } => {
                let mut gx = gout.clone();
                for (g, &m) in gx.data_mut().iter_mut().zip(mask) {
                    *g = *g * m;
                }
                self.acc(*x, gx);
            }
            Op::Sum(x) => {
                let (r, c) = self.shape(*x);
                self.acc(*x, Tensor::filled(r, c, gout.data()[0]));
            }
            Op::Mean(x) => {
                let (r, c) = self.shape(*x);
                let g = gout.data()[0] / T::from_f64((r * c) as f64);
                self.acc(*x, Tensor::filled(r, c, g));
            }
            Op::Bce { p, labels, lo, hi } => {
                let pv = self.value(*p);
                let n = T::from_f64(labels.len() as f64);
                let scale = gout.data()[0] / n;
                let mut gp = Tensor::zeros(pv.rows(), pv.cols());
                for ((o, &q), &y) in gp.data_mut().iter_mut().zip(pv.data()).zip(labels) {
                    if q >= *lo && q <= *hi {
                        *o = scale * (-y / q + (T::one() - y) / (T::one() - q));
                    }
                }
                self.acc(*p, gp);
            }
        }
        self.nodes[idx].op = op;
    }
}

fn column_sums<T: Scalar>(g: &Tensor<T>) -> Tensor<T> {
    let mut out = Tensor::zeros(1, g.cols());
    for r in 0..g.rows() {
        for (o, &v) in out.data_mut().iter_mut().zip(g.row(r)) {
            *o += v;
        }
    }
    out
}
