//! Small scalar-output perceptrons with ReLU hidden layers.

use rand::Rng;

use crate::linalg::{axpy, dot, Mat};

#[derive(Clone, Debug, PartialEq)]
pub struct Mlp {
    /// `[W1, b1, W2, b2, ...]`; the last layer has a single output.
    pub params: Vec<Mat>,
}

/// Pre-activations of one forward pass.
pub struct MlpCache {
    input: Vec<f64>,
    pre: Vec<Vec<f64>>,
    pub output: f64,
}

impl Mlp {
    /// `sizes` lists the input width and each hidden width; a final scalar
    /// output layer is appended.
    pub fn new<R: Rng + ?Sized>(sizes: &[usize], rng: &mut R) -> Self {
        let mut params = Vec::new();
        let mut widths = sizes.to_vec();
        widths.push(1);
        for w in widths.windows(2) {
            params.push(Mat::glorot(w[0], w[1], rng));
            params.push(Mat::zeros(1, w[1]));
        }
        Mlp { params }
    }

    pub fn input_dim(&self) -> usize {
        self.params[0].rows()
    }

    pub fn zeros_like(&self) -> Vec<Mat> {
        self.params
            .iter()
            .map(|p| Mat::zeros(p.rows(), p.cols()))
            .collect()
    }

    fn layer(x: &[f64], w: &Mat, b: &Mat) -> Vec<f64> {
        let mut out = b.data().to_vec();
        for (k, &xk) in x.iter().enumerate() {
            if xk != 0.0 {
                axpy(xk, w.row(k), &mut out);
            }
        }
        out
    }

    pub fn run(&self, x: &[f64]) -> MlpCache {
        let layers = self.params.len() / 2;
        let mut pre = Vec::with_capacity(layers - 1);
        let mut act = x.to_vec();
        for l in 0..layers - 1 {
            let z = Self::layer(&act, &self.params[2 * l], &self.params[2 * l + 1]);
            act = z.iter().map(|&v| v.max(0.0)).collect();
            pre.push(z);
        }
        let output =
            dot(&act, self.params[2 * layers - 2].data()) + self.params[2 * layers - 1].data()[0];
        MlpCache {
            input: x.to_vec(),
            pre,
            output,
        }
    }

    pub fn forward(&self, x: &[f64]) -> f64 {
        self.run(x).output
    }

    /// Accumulate the gradient of `d_out · output` into `grads`.
    pub fn backward(&self, cache: &MlpCache, d_out: f64, grads: &mut [Mat]) {
        let layers = self.params.len() / 2;
        let act = |l: usize| -> Vec<f64> {
            if l == 0 {
                cache.input.clone()
            } else {
                cache.pre[l - 1].iter().map(|&v| v.max(0.0)).collect()
            }
        };
        let mut delta = vec![d_out];
        for l in (0..layers).rev() {
            let a = act(l);
            for (k, &x) in a.iter().enumerate() {
                if x != 0.0 {
                    axpy(x, &delta, grads[2 * l].row_mut(k));
                }
            }
            axpy(1.0, &delta, grads[2 * l + 1].data_mut());
            if l == 0 {
                break;
            }
            let w = &self.params[2 * l];
            delta = (0..w.rows())
                .map(|k| {
                    if cache.pre[l - 1][k] > 0.0 {
                        dot(w.row(k), &delta)
                    } else {
                        0.0
                    }
                })
                .collect();
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seed;

    #[test]
    fn gradient_matches_finite_differences() {
        let mut rng = seed::rng_for(1, "mlp", 0);
        let m = Mlp::new(&[3, 5, 4], &mut rng);
        let x = [0.3, -1.2, 0.8];
        let mut grads = m.zeros_like();
        m.backward(&m.run(&x), 1.0, &mut grads);
        for (t, grad) in grads.iter().enumerate() {
            for (i, &an) in grad.data().iter().enumerate() {
                let h = 1e-6;
                let mut p = m.clone();
                p.params[t].data_mut()[i] += h;
                let mut q = m.clone();
                q.params[t].data_mut()[i] -= h;
                let fd = (p.forward(&x) - q.forward(&x)) / (2.0 * h);
                assert!((fd - an).abs() < 1e-6);
            }
        }
    }
}
