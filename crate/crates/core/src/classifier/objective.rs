//! L2-regularized logistic loss and its L-BFGS minimizer.
//!
//! With inverse regularization strength `c` (larger `c`, weaker penalty) the
//! minimized objective is
//!
//! ```text
//! L(w, b) = (1/n) * sum_i [softplus(z_i) - y_i * z_i] + |w|^2 / (2 c n),   z_i = w.x_i + b
//! ```
//!
//! which has the same minimizer as `0.5 |w|^2 + c * sum_i loss_i`. The bias
//! is not penalized. Parameters are laid out as `[w_0, .., w_{d-1}, b]`.

use std::collections::VecDeque;

use super::features::FeatureVector;

/// Numerically stable `ln(1 + e^z)`.
pub fn softplus(z: f64) -> f64 {
    if z > 0.0 {
        z + (-z).exp().ln_1p()
    } else {
        z.exp().ln_1p()
    }
}

pub fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// A training problem over borrowed rows.
#[derive(Debug, Clone)]
pub struct Problem<'a> {
    rows: Vec<&'a FeatureVector>,
    labels: Vec<bool>,
    dim: usize,
    c: f64,
}

impl<'a> Problem<'a> {
    pub fn new(rows: Vec<&'a FeatureVector>, labels: Vec<bool>, dim: usize, c: f64) -> Self {
        assert_eq!(rows.len(), labels.len(), "one label per row");
        assert!(c > 0.0, "regularization must be positive");
        Problem {
            rows,
            labels,
            dim,
            c,
        }
    }

    /// Number of parameters including the bias.
    pub fn n_params(&self) -> usize {
        self.dim + 1
    }

    pub fn loss(&self, params: &[f64]) -> f64 {
        let (w, b) = params.split_at(self.dim);
        let n = self.rows.len().max(1) as f64;
        let data: f64 = self
            .rows
            .iter()
            .zip(&self.labels)
            .map(|(x, &y)| {
                let z = x.dot(w) + b[0];
                softplus(z) - if y { z } else { 0.0 }
            })
            .sum();
        let penalty: f64 = w.iter().map(|v| v * v).sum();
        data / n + penalty / (2.0 * self.c * n)
    }

    /// Loss and its gradient, written into `grad`.
    pub fn loss_and_grad(&self, params: &[f64], grad: &mut [f64]) -> f64 {
        let (w, b) = params.split_at(self.dim);
        let n = self.rows.len().max(1) as f64;
        grad.iter_mut().for_each(|g| *g = 0.0);
        let mut data = 0.0;
        for (x, &y) in self.rows.iter().zip(&self.labels) {
            let z = x.dot(w) + b[0];
            data += softplus(z) - if y { z } else { 0.0 };
            let r = sigmoid(z) - if y { 1.0 } else { 0.0 };
            for &(i, cnt) in x.entries() {
                grad[i] += r * f64::from(cnt);
            }
            grad[self.dim] += r;
        }
        let mut penalty = 0.0;
        for i in 0..self.dim {
            grad[i] = grad[i] / n + w[i] / (self.c * n);
            penalty += w[i] * w[i];
        }
        grad[self.dim] /= n;
        data / n + penalty / (2.0 * self.c * n)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    /// Stop once the largest absolute gradient component is at most this.
    pub tol: f64,
    pub max_iter: usize,
    /// Number of correction pairs kept by L-BFGS.
    pub memory: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            tol: 1e-6,
            max_iter: 1000,
            memory: 10,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    pub params: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
    pub grad_norm: f64,
    /// Objective value before the first step and after every accepted step.
    pub loss_history: Vec<f64>,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn inf_norm(a: &[f64]) -> f64 {
    a.iter().fold(0.0, |m, v| m.max(v.abs()))
}

const ARMIJO: f64 = 1e-4;
const MAX_BACKTRACKS: usize = 60;

/// Minimizes the problem from zero with L-BFGS and a backtracking Armijo
/// line search, so the loss never increases between iterations.
pub fn minimize(problem: &Problem<'_>, config: &SolverConfig) -> Solution {
    let n = problem.n_params();
    let mut x = vec![0.0; n];
    let mut g = vec![0.0; n];
    let mut f = problem.loss_and_grad(&x, &mut g);
    let mut history = vec![f];
    let mut pairs: VecDeque<(Vec<f64>, Vec<f64>, f64)> = VecDeque::with_capacity(config.memory);

    let mut x_new = vec![0.0; n];
    let mut g_new = vec![0.0; n];
    let mut dir = vec![0.0; n];
    let mut alpha = vec![0.0; config.memory.max(1)];
    let mut iterations = 0;

    while iterations < config.max_iter && inf_norm(&g) > config.tol {
        // two-loop recursion: dir = -H g
        dir.copy_from_slice(&g);
        for (k, (s, y, rho)) in pairs.iter().enumerate().rev() {
            alpha[k] = rho * dot(s, &dir);
            dir.iter_mut()
                .zip(y)
                .for_each(|(d, yi)| *d -= alpha[k] * yi);
        }
        if let Some((s, y, _)) = pairs.back() {
            let gamma = dot(s, y) / dot(y, y);
            dir.iter_mut().for_each(|d| *d *= gamma);
        }
        for (k, (s, y, rho)) in pairs.iter().enumerate() {
            let beta = rho * dot(y, &dir);
            dir.iter_mut()
                .zip(s)
                .for_each(|(d, si)| *d += (alpha[k] - beta) * si);
        }
        dir.iter_mut().for_each(|d| *d = -*d);

        let mut slope = dot(&g, &dir);
        if slope >= 0.0 || slope.is_nan() {
            pairs.clear();
            dir.iter_mut().zip(&g).for_each(|(d, gi)| *d = -gi);
            slope = dot(&g, &dir);
        }
        let mut step = if pairs.is_empty() {
            1.0 / dot(&g, &g).sqrt().max(1.0)
        } else {
            1.0
        };

        let mut accepted = None;
        for _ in 0..MAX_BACKTRACKS {
            x_new
                .iter_mut()
                .zip(&x)
                .zip(&dir)
                .for_each(|((xn, xi), di)| *xn = xi + step * di);
            let f_new = problem.loss_and_grad(&x_new, &mut g_new);
            if f_new <= f + ARMIJO * step * slope {
                accepted = Some(f_new);
                break;
            }
            step *= 0.5;
        }
        let Some(f_new) = accepted else {
            // no representable decrease left along any descent direction
            break;
        };

        let s: Vec<f64> = x_new.iter().zip(&x).map(|(a, b)| a - b).collect();
        let y: Vec<f64> = g_new.iter().zip(&g).map(|(a, b)| a - b).collect();
        let sy = dot(&s, &y);
        if sy > 1e-12 * dot(&s, &s).sqrt() * dot(&y, &y).sqrt() && sy > 0.0 {
            if pairs.len() == config.memory {
                pairs.pop_front();
            }
            if config.memory > 0 {
                pairs.push_back((s, y, 1.0 / sy));
            }
        }

        std::mem::swap(&mut x, &mut x_new);
        std::mem::swap(&mut g, &mut g_new);
        f = f_new;
        history.push(f);
        iterations += 1;
    }

    let grad_norm = inf_norm(&g);
    Solution {
        params: x,
        iterations,
        converged: grad_norm <= config.tol,
        grad_norm,
        loss_history: history,
    }
}
