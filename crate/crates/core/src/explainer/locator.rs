//! Start-node locator for graph-level explanations.
//!
//! A perceptron scores every node from the target model's embeddings,
//! `ω_i = MLP([z_g, z_i])`, and the explanation starts at the best-scoring
//! node. It is fitted so that `softmax(ω)` over sampled candidates matches
//! `softmax(−loss)`, where `loss` is the explainer's training loss of a
//! trajectory started at each candidate.

use rand::Rng;

use crate::error::{Error, Result};
use crate::gnn::Embeddings;
use crate::linalg::{softmax, Mat};
use crate::mlp::Mlp;

/// Hidden widths of the locator perceptron.
pub const LOCATOR_HIDDEN: [usize; 2] = [64, 16];

#[derive(Clone, Debug, PartialEq)]
pub struct Locator {
    pub mlp: Mlp,
}

fn input(emb: &Embeddings, v: usize) -> Vec<f64> {
    let mut x = emb.graph.clone();
    x.extend_from_slice(emb.nodes.row(v));
    x
}

impl Locator {
    /// `node_dim` is the width of one node embedding; the graph embedding is
    /// twice as wide.
    pub fn new<R: Rng + ?Sized>(node_dim: usize, rng: &mut R) -> Self {
        let sizes = [3 * node_dim, LOCATOR_HIDDEN[0], LOCATOR_HIDDEN[1]];
        Locator {
            mlp: Mlp::new(&sizes, rng),
        }
    }

    pub fn score(&self, emb: &Embeddings, v: usize) -> f64 {
        self.mlp.forward(&input(emb, v))
    }

    /// The node with the highest score; ties go to the smaller id.
    pub fn locate(&self, emb: &Embeddings) -> Result<usize> {
        let n = emb.nodes.rows();
        if n == 0 {
            return Err(Error::InvalidGraph(
                "cannot locate a start node in an empty graph".into(),
            ));
        }
        let scores: Vec<f64> = (0..n).map(|v| self.score(emb, v)).collect();
        Ok(super::env::argmax(&scores))
    }

    /// `KL(softmax(−losses) ‖ softmax(ω))` over `candidates`, accumulating
    /// its gradient into `grads`.
    pub fn kl_loss(
        &self,
        emb: &Embeddings,
        candidates: &[usize],
        losses: &[f64],
        grads: &mut [Mat],
    ) -> Result<f64> {
        if candidates.len() != losses.len() || candidates.is_empty() {
            return Err(Error::InvalidParameter(
                "locator needs one loss per candidate and at least one candidate".into(),
            ));
        }
        let caches: Vec<_> = candidates
            .iter()
            .map(|&v| self.mlp.run(&input(emb, v)))
            .collect();
        let omega: Vec<f64> = caches.iter().map(|c| c.output).collect();
        let neg: Vec<f64> = losses.iter().map(|&l| -l).collect();
        let target = softmax(&neg);
        let p = softmax(&omega);
        let kl: f64 = target
            .iter()
            .zip(&p)
            .filter(|(&t, _)| t > 0.0)
            .map(|(&t, &q)| t * (t.ln() - q.max(f64::MIN_POSITIVE).ln()))
            .sum();
        for (k, c) in caches.iter().enumerate() {
            self.mlp.backward(c, p[k] - target[k], grads);
        }
        Ok(kl)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    fn embeddings() -> Embeddings {
        let nodes = Mat::from_rows(&[vec![1.0, 0.0], vec![0.0, 1.0], vec![0.5, 0.5]]);
        Embeddings {
            nodes,
            graph: vec![1.0, 1.0, 0.5, 0.5],
        }
    }

    #[test]
    fn kl_vanishes_when_scores_match_targets() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let loc = Locator::new(2, &mut rng);
        let emb = embeddings();
        let omega: Vec<f64> = (0..3).map(|v| loc.score(&emb, v)).collect();
        let losses: Vec<f64> = omega.iter().map(|w| -w + 7.0).collect();
        let mut g = loc.mlp.zeros_like();
        let kl = loc.kl_loss(&emb, &[0, 1, 2], &losses, &mut g).unwrap();
        assert!(kl.abs() < 1e-12);
        assert!(g.iter().all(|m| m.max_abs() < 1e-12));
    }

    #[test]
    fn kl_gradient_matches_finite_differences() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let loc = Locator::new(2, &mut rng);
        let emb = embeddings();
        let cands = [0, 1, 2];
        let losses = [0.3, 2.0, 1.1];
        let mut g = loc.mlp.zeros_like();
        loc.kl_loss(&emb, &cands, &losses, &mut g).unwrap();
        let h = 1e-6;
        for (t, grad) in g.iter().enumerate() {
            for (j, &an) in grad.data().iter().enumerate() {
                let mut plus = loc.clone();
                plus.mlp.params[t].data_mut()[j] += h;
                let mut minus = loc.clone();
                minus.mlp.params[t].data_mut()[j] -= h;
                let mut scratch = loc.mlp.zeros_like();
                let fp = plus.kl_loss(&emb, &cands, &losses, &mut scratch).unwrap();
                let fm = minus.kl_loss(&emb, &cands, &losses, &mut scratch).unwrap();
                let fd = (fp - fm) / (2.0 * h);
                assert!(
                    (fd - an).abs() <= 1e-6 * (1.0 + an.abs()),
                    "tensor {t} entry {j}: {fd} vs {an}"
                );
            }
        }
    }
}
