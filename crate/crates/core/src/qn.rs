//! BFGS quasi-Newton descent with central-difference gradients and an
//! Armijo backtracking line search.

use alloc::vec;
use alloc::vec::Vec;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QnSettings {
    pub max_iters: usize,
    /// Central-difference step.
    pub grad_step: f64,
    /// Stop once the gradient norm drops below this.
    pub conv_tol: f64,
}

impl Default for QnSettings {
    fn default() -> Self {
        QnSettings { max_iters: 200, grad_step: 1e-5, conv_tol: 1e-8 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct QnOutcome {
    pub x: Vec<f64>,
    pub value: f64,
    pub start_value: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Objective at every accepted iterate, starting point first.
    pub history: Vec<f64>,
}

const ARMIJO_C1: f64 = 1e-4;
const MAX_BACKTRACKS: usize = 50;

fn gradient<F: FnMut(&[f64]) -> f64>(f: &mut F, x: &mut [f64], h: f64, out: &mut [f64]) {
    for i in 0..x.len() {
        let xi = x[i];
        x[i] = xi + h;
        let up = f(x);
        x[i] = xi - h;
        let down = f(x);
        x[i] = xi;
        out[i] = (up - down) / (2.0 * h);
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Minimizes `f` from `x0`. Every accepted step strictly lowers the objective,
/// so `value <= start_value` always holds.
pub fn minimize<F: FnMut(&[f64]) -> f64>(f: &mut F, x0: &[f64], settings: &QnSettings) -> QnOutcome {
    let n = x0.len();
    let mut x = x0.to_vec();
    let mut fx = f(&x);
    let start_value = fx;
    let mut history = vec![fx];
    let mut g = vec![0.0; n];
    gradient(f, &mut x, settings.grad_step, &mut g);

    let mut h = identity(n);
    let mut p = vec![0.0; n];
    let mut x_new = vec![0.0; n];
    let mut g_new = vec![0.0; n];
    let mut s = vec![0.0; n];
    let mut y = vec![0.0; n];
    let mut hy = vec![0.0; n];
    let mut iterations = 0;
    let mut converged = false;
    let mut first_step = true;

    while iterations < settings.max_iters {
        if libm::sqrt(dot(&g, &g)) < settings.conv_tol {
            converged = true;
            break;
        }
        for i in 0..n {
            p[i] = -(0..n).map(|j| h[i * n + j] * g[j]).sum::<f64>();
        }
        let mut slope = dot(&g, &p);
        if slope >= 0.0 {
            h = identity(n);
            for i in 0..n {
                p[i] = -g[i];
            }
            slope = -dot(&g, &g);
        }

        let mut t = 1.0;
        let mut accepted = None;
        for _ in 0..MAX_BACKTRACKS {
            for i in 0..n {
                x_new[i] = x[i] + t * p[i];
            }
            let f_new = f(&x_new);
            if f_new <= fx + ARMIJO_C1 * t * slope && f_new < fx {
                accepted = Some(f_new);
                break;
            }
            t *= 0.5;
        }
        let Some(f_new) = accepted else {
            // no descent along p at machine precision
            break;
        };
        iterations += 1;

        gradient(f, &mut x_new, settings.grad_step, &mut g_new);
        for i in 0..n {
            s[i] = x_new[i] - x[i];
            y[i] = g_new[i] - g[i];
        }
        let sy = dot(&s, &y);
        if sy > 1e-14 * libm::sqrt(dot(&s, &s) * dot(&y, &y)) && sy > 0.0 {
            if first_step {
                let scale = sy / dot(&y, &y);
                for v in h.iter_mut() {
                    *v *= scale;
                }
                first_step = false;
            }
            bfgs_update(&mut h, &s, &y, sy, &mut hy);
        }
        x.copy_from_slice(&x_new);
        g.copy_from_slice(&g_new);
        fx = f_new;
        history.push(fx);
    }

    QnOutcome { x, value: fx, start_value, iterations, converged, history }
}

fn identity(n: usize) -> Vec<f64> {
    let mut h = vec![0.0; n * n];
    for i in 0..n {
        h[i * n + i] = 1.0;
    }
    h
}

/// Inverse-Hessian update `H <- (I - r s y^T) H (I - r y s^T) + r s s^T`, `r = 1/(s.y)`.
fn bfgs_update(h: &mut [f64], s: &[f64], y: &[f64], sy: f64, hy: &mut [f64]) {
    let n = s.len();
    let r = 1.0 / sy;
    for i in 0..n {
        hy[i] = (0..n).map(|j| h[i * n + j] * y[j]).sum();
    }
    let yhy = dot(y, hy);
    let coef = (1.0 + r * yhy) * r;
    for i in 0..n {
        for j in 0..n {
            h[i * n + j] += coef * s[i] * s[j] - r * (hy[i] * s[j] + s[i] * hy[j]);
        }
    }
}
