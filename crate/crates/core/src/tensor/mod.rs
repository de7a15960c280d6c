//! Dense row-major matrices, a reverse-mode autodiff tape and Adam.
//!
//! Everything is generic over [`Scalar`] so training runs in `f32` while
//! gradient checks run the identical graph in `f64`. Reductions always run
//! in a fixed order, which keeps results bitwise reproducible.

mod adam;
mod graph;

use alloc::vec;
use alloc::vec::Vec;
use core::fmt::Debug;

use num_traits::Float;
use rand::Rng;

pub use adam::{AdamConfig, AdamState};
pub use graph::{Graph, Var};

use crate::error::{Error, Result};

pub trait Scalar:
    Float + Default + Debug + Send + Sync + core::iter::Sum + core::ops::AddAssign + 'static
{
    fn from_f64(x: f64) -> Self;
    fn to_f64(self) -> f64;
}

impl Scalar for f32 {
    fn from_f64(x: f64) -> Self {
        x as f32
    }
    fn to_f64(self) -> f64 {
        self as f64
    }
}

impl Scalar for f64 {
    fn from_f64(x: f64) -> Self {
        x
    }
    fn to_f64(self) -> f64 {
        self
    }
}

#[derive(Clone, PartialEq)]
pub struct Tensor<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Debug> Debug for Tensor<T> {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(f, "Tensor({}x{}) ", self.rows, self.cols)?;
        if self.data.len() <= 16 {
            f.debug_list().entries(&self.data).finish()
        } else {
            f.debug_list().entries(&self.data[..16]).finish()?;
            f.write_str("...")
        }
    }
}

impl<T: Scalar> Tensor<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Tensor {
            rows,
            cols,
            data: vec![T::zero(); rows * cols],
        }
    }

    pub fn filled(rows: usize, cols: usize, value: T) -> Self {
        Tensor {
            rows,
            cols,
            data: vec![value; rows * cols],
        }
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<T>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::shape("from_vec", rows * cols, data.len()));
        }
        Ok(Tensor { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<T>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            if r.len() != cols {
                return Err(Error::shape("from_rows", cols, r.len()));
            }
            data.extend_from_slice(r);
        }
        Ok(Tensor {
            rows: rows.len(),
            cols,
            data,
        })
    }

    /// Glorot-style uniform init in `(-a, a)`, `a = sqrt(6 / (fan_in + fan_out))`.
    pub fn glorot<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> Self {
        let bound = libm::sqrt(6.0 / (rows + cols) as f64);
        let data = (0..rows * cols)
            .map(|_| T::from_f64(rng.gen_range(-bound..bound)))
            .collect();
        Tensor { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn data(&self) -> &[T] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [T] {
        &mut self.data
    }

    pub fn into_data(self) -> Vec<T> {
        self.data
    }

    pub fn get(&self, r: usize, c: usize) -> T {
        self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: T) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[T] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn row_mut(&mut self, r: usize) -> &mut [T] {
        &mut self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn map(&self, f: impl Fn(T) -> T) -> Self {
        Tensor {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&x| f(x)).collect(),
        }
    }

    pub fn cast<U: Scalar>(&self) -> Tensor<U> {
        Tensor {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&x| U::from_f64(x.to_f64())).collect(),
        }
    }

    pub fn transpose(&self) -> Self {
        let mut out = Tensor::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out.data[c * self.rows + r] = self.data[r * self.cols + c];
            }
        }
        out
    }

    /// Rows gathered in the given order.
    pub fn select_rows(&self, idx: &[usize]) -> Self {
        let mut data = Vec::with_capacity(idx.len() * self.cols);
        for &i in idx {
            data.extend_from_slice(self.row(i));
        }
        Tensor {
            rows: idx.len(),
            cols: self.cols,
            data,
        }
    }

    pub fn matmul(&self, rhs: &Tensor<T>) -> Result<Self> {
        if self.cols != rhs.rows {
            return Err(Error::shape(
                "matmul",
                alloc::format!("lhs cols {}", self.cols),
                alloc::format!("rhs rows {}", rhs.rows),
            ));
        }
        let mut out = Tensor::zeros(self.rows, rhs.cols);
        matmul_acc(self, rhs, &mut out);
        Ok(out)
    }

    pub fn add_assign(&mut self, other: &Tensor<T>) {
        debug_assert_eq!(self.shape(), other.shape());
        for (a, &b) in self.data.iter_mut().zip(&other.data) {
            *a += b;
        }
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|x| x.is_finite())
    }

    pub fn max_abs_diff(&self, other: &Tensor<T>) -> T {
        self.data
            .iter()
            .zip(&other.data)
            .fold(T::zero(), |m, (&a, &b)| m.max((a - b).abs()))
    }

    pub fn sum(&self) -> T {
        self.data.iter().copied().sum()
    }
}

/// `out += a * b`, i-k-j loop order.
pub(crate) fn matmul_acc<T: Scalar>(a: &Tensor<T>, b: &Tensor<T>, out: &mut Tensor<T>) {
    let (n, k, m) = (a.rows, a.cols, b.cols);
    for i in 0..n {
        let orow = &mut out.data[i * m..(i + 1) * m];
        for p in 0..k {
            let av = a.data[i * k + p];
            if av == T::zero() {
                continue;
            }
            let brow = &b.data[p * m..(p + 1) * m];
            for (o, &bv) in orow.iter_mut().zip(brow) {
                *o += av * bv;
            }
        }
    }
}

/// `out += aᵀ * b`.
pub(crate) fn matmul_at_b_acc<T: Scalar>(a: &Tensor<T>, b: &Tensor<T>, out: &mut Tensor<T>) {
    let (k, n, m) = (a.rows, a.cols, b.cols);
    for p in 0..k {
        let brow = &b.data[p * m..(p + 1) * m];
        for i in 0..n {
            let av = a.data[p * n + i];
            if av == T::zero() {
                continue;
            }
            let orow = &mut out.data[i * m..(i + 1) * m];
            for (o, &bv) in orow.iter_mut().zip(brow) {
                *o += av * bv;
            }
        }
    }
}

/// `out += a * bᵀ`.
pub(crate) fn matmul_a_bt_acc<T: Scalar>(a: &Tensor<T>, b: &Tensor<T>, out: &mut Tensor<T>) {
    let (n, k, m) = (a.rows, a.cols, b.rows);
    for i in 0..n {
        let arow = &a.data[i * k..(i + 1) * k];
        for j in 0..m {
            let brow = &b.data[j * k..(j + 1) * k];
            let mut acc = T::zero();
            for (&x, &y) in arow.iter().zip(brow) {
                acc += x * y;
            }
            out.data[i * m + j] += acc;
        }
    }
}

/// Softmax over the entries where `mask` is set; the rest come out exactly 0.
///
/// Uses max subtraction, so finite scores always give finite probabilities.
pub fn softmax_masked<T: Scalar>(scores: &[T], mask: &[bool]) -> Result<Vec<T>> {
    if scores.len() != mask.len() {
        return Err(Error::shape("softmax_masked", scores.len(), mask.len()));
    }
    let mut out = vec![T::zero(); scores.len()];
    softmax_masked_into(scores, mask, &mut out)?;
    Ok(out)
}

pub(crate) fn softmax_masked_into<T: Scalar>(
    scores: &[T],
    mask: &[bool],
    out: &mut [T],
) -> Result<()> {
    if !mask.iter().any(|&m| m) {
        return Err(Error::Empty("softmax mask"));
    }
    let mut max = T::neg_infinity();
    for (&s, &m) in scores.iter().zip(mask) {
        // NaN must reach the output so callers see a non-finite result.
        if m && (s > max || s.is_nan()) {
            max = s;
            if s.is_nan() {
                break;
            }
        }
    }
    let mut total = T::zero();
    for ((o, &s), &m) in out.iter_mut().zip(scores).zip(mask) {
        *o = if m { (s - max).exp() } else { T::zero() };
        total += *o;
    }
    for o in out.iter_mut() {
        *o = *o / total;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn matmul_small() {
        let a = Tensor::from_vec(2, 3, vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0]).unwrap();
        let b = Tensor::from_vec(3, 2, vec![7.0, 8.0, 9.0, 10.0, 11.0, 12.0]).unwrap();
        let c = a.matmul(&b).unwrap();
        assert_eq!(c.data(), &[58.0, 64.0, 139.0, 154.0]);
        assert!(a.matmul(&a).is_err());
    }

    #[test]
    fn transposed_products_agree_with_explicit_transpose() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let a = Tensor::<f64>::glorot(4, 3, &mut rng);
        let b = Tensor::<f64>::glorot(4, 5, &mut rng);
        let mut out = Tensor::zeros(3, 5);
        matmul_at_b_acc(&a, &b, &mut out);
        assert!(out.max_abs_diff(&a.transpose().matmul(&b).unwrap()) < 1e-14);

        let c = Tensor::<f64>::glorot(5, 3, &mut rng);
        let mut out = Tensor::zeros(4, 5);
        matmul_a_bt_acc(&a, &c, &mut out);
        assert!(out.max_abs_diff(&a.matmul(&c.transpose()).unwrap()) < 1e-14);
    }

    #[test]
    fn glorot_bounds() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let t = Tensor::<f32>::glorot(10, 14, &mut rng);
        let a = (6.0f32 / 24.0).sqrt();
        assert!(t.data().iter().all(|x| x.abs() < a));
    }

    #[test]
    fn masked_softmax_cases() {
        let p = softmax_masked(&[3.0f64, 1.0, 2.0], &[false, true, false]).unwrap();
        assert_eq!(p, vec![0.0, 1.0, 0.0]);

        let p = softmax_masked(&[0.7f64, 0.7], &[true, true]).unwrap();
        assert_eq!(p, vec![0.5, 0.5]);

        let s = [0.3f64, -1.2, 2.5, 0.0];
        let m = [true, true, false, true];
        let p = softmax_masked(&s, &m).unwrap();
        let shifted: Vec<f64> = s.iter().map(|x| x + 123.0).collect();
        let q = softmax_masked(&shifted, &m).unwrap();
        for (a, b) in p.iter().zip(&q) {
            assert!((a - b).abs() < 1e-12);
        }
        assert_eq!(p[2], 0.0);
        assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);

        assert!(softmax_masked(&[1.0f64, 2.0], &[false, false]).is_err());
    }

    #[test]
    fn masked_softmax_survives_huge_scores() {
        let p = softmax_masked(&[1e30f32, 1e30, -1e30], &[true, true, true]).unwrap();
        assert!(p.iter().all(|x| x.is_finite()));
        assert!((p[0] - 0.5).abs() < 1e-6);
    }

    #[test]
    fn masked_softmax_passes_nan_through() {
        let p = softmax_masked(&[0.0f64, f64::NAN, 1.0], &[true, true, true]).unwrap();
        assert!(p.iter().all(|x| x.is_nan()));
        let p = softmax_masked(&[f64::NAN, 1.0], &[false, true]).unwrap();
        assert_eq!(p, vec![0.0, 1.0]);
    }
}
