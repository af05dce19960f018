//! Binary linear SVM, L2-regularized hinge loss, solved by dual coordinate
//! descent. The bias is learned as the weight of a constant feature 1.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Stop once the duality gap falls to this value.
pub const GAP_TOLERANCE: f64 = 1e-6;
pub const MAX_EPOCHS: usize = 20_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearSvm {
    pub weights: Vec<f64>,
    pub bias: f64,
}

/// How the solver finished.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverInfo {
    pub epochs: usize,
    /// Primal minus dual objective at exit.
    pub duality_gap: f64,
    pub primal: f64,
    /// `Σ max(0, 1 - yᵢ f(xᵢ))` at exit.
    pub hinge_loss: f64,
    pub converged: bool,
}

impl LinearSvm {
    pub fn decision(&self, x: &[f64]) -> f64 {
        dot(&self.weights, x) + self.bias
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

struct State<'a> {
    x: &'a [Vec<f64>],
    y: &'a [f64],
    /// Weights with the bias last.
    w: Vec<f64>,
}

impl State<'_> {
    fn margin(&self, i: usize) -> f64 {
        let d = self.w.len() - 1;
        dot(&self.w[..d], &self.x[i]) + self.w[d]
    }

    fn objectives(&self, c: f64, alpha: &[f64]) -> (f64, f64, f64) {
        let half_norm = 0.5 * dot(&self.w, &self.w);
        let hinge: f64 = (0..self.x.len())
            .map(|i| (1.0 - self.y[i] * self.margin(i)).max(0.0))
            .sum();
        let primal = half_norm + c * hinge;
        let dual = alpha.iter().sum::<f64>() - half_norm;
        (primal, dual, hinge)
    }
}

/// Trains `min ½‖w‖² + ½b² + C Σ max(0, 1 - yᵢ(wᵀxᵢ + b))` with labels
/// `yᵢ ∈ {-1, +1}`. Coordinates are visited in a fresh random order each
/// epoch drawn from `seed`.
pub fn train_binary(
    x: &[Vec<f64>],
    y: &[f64],
    c: f64,
    seed: u64,
) -> Result<(LinearSvm, SolverInfo)> {
    if !(c > 0.0 && c.is_finite()) {
        return Err(Error::InvalidParameter(format!("C = {c} must be > 0")));
    }
    if x.len() != y.len() {
        return Err(Error::LengthMismatch {
            left: x.len(),
            right: y.len(),
        });
    }
    if y.iter().any(|&v| v != 1.0 && v != -1.0) {
        return Err(Error::InvalidInput("binary labels must be ±1".into()));
    }
    let m = x.len();
    let d = x.first().map_or(0, Vec::len);
    if x.iter().any(|r| r.len() != d) {
        return Err(Error::InvalidInput("feature rows differ in length".into()));
    }
    let q: Vec<f64> = x.iter().map(|r| dot(r, r) + 1.0).collect();
    let mut st = State {
        x,
        y,
        w: vec![0.0; d + 1],
    };
    let mut alpha = vec![0.0; m];
    let mut order: Vec<usize> = (0..m).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut info = SolverInfo {
        epochs: 0,
        duality_gap: f64::INFINITY,
        primal: f64::INFINITY,
        hinge_loss: f64::INFINITY,
        converged: false,
    };
    for epoch in 1..=MAX_EPOCHS {
        order.shuffle(&mut rng);
        for &i in &order {
            let g = y[i] * st.margin(i) - 1.0;
            let old = alpha[i];
            let new = (old - g / q[i]).clamp(0.0, c);
            let delta = (new - old) * y[i];
            if delta != 0.0 {
                alpha[i] = new;
                for (wj, xj) in st.w[..d].iter_mut().zip(&x[i]) {
                    *wj += delta * xj;
                }
                st.w[d] += delta;
            }
        }
        let (primal, dual, hinge) = st.objectives(c, &alpha);
        info = SolverInfo {
            epochs: epoch,
            duality_gap: primal - dual,
            primal,
            hinge_loss: hinge,
            converged: primal - dual <= GAP_TOLERANCE,
        };
        if info.converged {
            break;
        }
    }
    if !info.converged {
        log::warn!(
            "linear SVM stopped after {} epochs with duality gap {:e}",
            info.epochs,
            info.duality_gap
        );
    }
    let bias = st.w.pop().expect("bias slot");
    Ok((
        LinearSvm {
            weights: st.w,
            bias,
        },
        info,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    fn blobs(seed: u64, m: usize, gap: f64) -> (Vec<Vec<f64>>, Vec<f64>) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut x = Vec::new();
        let mut y = Vec::new();
        for i in 0..m {
            let label = if i % 2 == 0 { 1.0 } else { -1.0 };
            x.push(vec![
                label * gap + rng.random_range(-1.0..1.0),
                rng.random_range(-1.0..1.0),
                rng.random_range(-1.0..1.0),
            ]);
            y.push(label);
        }
        (x, y)
    }

    #[test]
    fn separable_data_is_fit_exactly() {
        let (x, y) = blobs(1, 40, 3.0);
        let (svm, info) = train_binary(&x, &y, 10.0, 0).unwrap();
        assert!(info.converged && info.duality_gap <= GAP_TOLERANCE);
        assert!(info.hinge_loss <= 1e-4);
        for (xi, yi) in x.iter().zip(&y) {
            assert!(svm.decision(xi) * yi > 0.0);
        }
    }

    #[test]
    fn matches_primal_subgradient_oracle() {
        // The optimum is unique; a long projected subgradient run on the
        // primal must land near the same objective.
        let (x, y) = blobs(2, 30, 0.5);
        let c = 0.7;
        let (_, info) = train_binary(&x, &y, c, 3).unwrap();
        let primal = |w: &[f64]| {
            let half = 0.5 * dot(w, w);
            half + c * x
                .iter()
                .zip(&y)
                .map(|(xi, yi)| (1.0 - yi * (dot(&w[..3], xi) + w[3])).max(0.0))
                .sum::<f64>()
        };
        let mut w = vec![0.0; 4];
        let mut best = primal(&w);
        for t in 1..=200_000 {
            let mut g = w.clone();
            for (xi, yi) in x.iter().zip(&y) {
                if yi * (dot(&w[..3], xi) + w[3]) < 1.0 {
                    for j in 0..3 {
                        g[j] -= c * yi * xi[j];
                    }
                    g[3] -= c * yi;
                }
            }
            let step = 0.05 / (t as f64).sqrt();
            for j in 0..4 {
                w[j] -= step * g[j];
            }
            best = best.min(primal(&w));
        }
        assert!(info.primal <= best + 1e-6);
        assert!(best - info.primal < 1e-2 * best);
    }

    #[test]
    fn deterministic_in_seed() {
        let (x, y) = blobs(3, 25, 0.3);
        let a = train_binary(&x, &y, 1.0, 5).unwrap();
        let b = train_binary(&x, &y, 1.0, 5).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn rejects_bad_inputs() {
        let (x, y) = blobs(4, 4, 1.0);
        assert!(train_binary(&x, &y, 0.0, 0).is_err());
        assert!(train_binary(&x, &y[..3], 1.0, 0).is_err());
        assert!(train_binary(&x, &[1.0, 0.0, 1.0, -1.0], 1.0, 0).is_err());
    }
}
