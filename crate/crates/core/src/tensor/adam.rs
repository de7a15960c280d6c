use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::{Scalar, Tensor};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdamConfig {
    pub lr: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
}

impl Default for AdamConfig {
    fn default() -> Self {
        AdamConfig {
            lr: 1e-4,
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
        }
    }
}

/// Bias-corrected Adam moments for an ordered list of parameters.
#[derive(Debug, Clone)]
pub struct AdamState<T> {
    pub config: AdamConfig,
    m: Vec<Tensor<T>>,
    v: Vec<Tensor<T>>,
    t: u64,
}

impl<T: Scalar> AdamState<T> {
    pub fn new(config: AdamConfig, shapes: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let zeros: Vec<Tensor<T>> = shapes
            .into_iter()
            .map(|(r, c)| Tensor::zeros(r, c))
            .collect();
        AdamState {
            config,
            m: zeros.clone(),
            v: zeros,
            t: 0,
        }
    }

    pub fn steps(&self) -> u64 {
        self.t
    }

    pub fn step(&mut self, params: &mut [&mut Tensor<T>], grads: &[Tensor<T>]) -> Result<()> {
        if params.len() != self.m.len() || grads.len() != self.m.len() {
            return Err(Error::shape(
                "adam_step",
                self.m.len(),
                params.len().min(grads.len()),
            ));
        }
        for (i, (p, g)) in params.iter().zip(grads).enumerate() {
            if p.shape() != self.m[i].shape() || g.shape() != self.m[i].shape() {
                return Err(Error::shape(
                    "adam_step",
                    alloc::format!("{:?}", self.m[i].shape()),
                    alloc::format!("{:?}/{:?}", p.shape(), g.shape()),
                ));
            }
        }
        self.t += 1;
        let c = self.config;
        let t = self.t as i32;
        let bc1 = T::from_f64(1.0 - libm::pow(c.beta1, t as f64));
        let bc2 = T::from_f64(1.0 - libm::pow(c.beta2, t as f64));
        let (b1, b2) = (T::from_f64(c.beta1), T::from_f64(c.beta2));
        let (lr, eps) = (T::from_f64(c.lr), T::from_f64(c.eps));
        for (i, (p, g)) in params.iter_mut().zip(grads).enumerate() {
            let m = self.m[i].data_mut();
            let v = self.v[i].data_mut();
            for (((w, &gr), mi), vi) in p.data_mut().iter_mut().zip(g.data()).zip(m).zip(v) {
                *mi = b1 * *mi + (T::one() - b1) * gr;
                *vi = b2 * *vi + (T::one() - b2) * gr * gr;
                let m_hat = *mi / bc1;
                let v_hat = *vi / bc2;
                *w = *w - lr * m_hat / (v_hat.sqrt() + eps);
            }
        }
        Ok(())
    }
}
