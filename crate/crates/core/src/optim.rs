//! Limited-memory BFGS for smooth unconstrained minimization.
//!
//! Two-loop recursion (Nocedal & Wright, ch. 7) with backtracking Armijo line
//! search; the Wolfe curvature condition gates which (s, y) pairs enter the
//! memory so the inverse-Hessian estimate stays positive definite.

use std::collections::VecDeque;

pub struct LbfgsOptions {
    /// Stop when the Euclidean gradient norm falls below this.
    pub gradient_tol: f64,
    pub max_iterations: usize,
    pub memory: usize,
    pub armijo_c1: f64,
    pub wolfe_c2: f64,
    pub max_backtracks: usize,
}

impl Default for LbfgsOptions {
    fn default() -> Self {
        Self {
            gradient_tol: 1e-9,
            max_iterations: 500,
            memory: 10,
            armijo_c1: 1e-4,
            wolfe_c2: 0.9,
            max_backtracks: 60,
        }
    }
}

pub struct LbfgsOutcome {
    pub x: Vec<f64>,
    pub value: f64,
    pub gradient_norm: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Objective at the start point and after each accepted step.
    pub objective_history: Vec<f64>,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Minimize `f`, which returns the objective and its gradient.
pub fn minimize<F>(mut f: F, x0: Vec<f64>, opts: &LbfgsOptions) -> LbfgsOutcome
where
    F: FnMut(&[f64]) -> (f64, Vec<f64>),
{
    let mut x = x0;
    let (mut fx, mut g) = f(&x);
    let mut history = vec![fx];
    let mut mem: VecDeque<(Vec<f64>, Vec<f64>, f64)> = VecDeque::with_capacity(opts.memory);

    let mut gnorm = norm(&g);
    if gnorm <= opts.gradient_tol {
        return LbfgsOutcome {
            x,
            value: fx,
            gradient_norm: gnorm,
            iterations: 0,
            converged: true,
            objective_history: history,
        };
    }

    for iter in 1..=opts.max_iterations {
        let mut dir = two_loop(&g, &mem);
        let mut slope = dot(&dir, &g);
        if slope >= 0.0 {
            // not a descent direction (stale memory); fall back to steepest descent
            dir = g.iter().map(|v| -v).collect();
            slope = -gnorm * gnorm;
        }

        let mut alpha = if mem.is_empty() {
            (1.0 / gnorm).min(1.0)
        } else {
            1.0
        };
        let mut accepted = None;
        for _ in 0..opts.max_backtracks {
            let cand: Vec<f64> = x.iter().zip(&dir).map(|(xi, di)| xi + alpha * di).collect();
            let (fc, gc) = f(&cand);
            // small absolute slack keeps the search alive at float resolution
            if fc <= fx + opts.armijo_c1 * alpha * slope + 4.0 * f64::EPSILON * fx.abs() {
                accepted = Some((cand, fc, gc));
                break;
            }
            alpha *= 0.5;
        }
        let Some((x_new, f_new, g_new)) = accepted else {
            // line search stalled at float resolution; report the best point
            return LbfgsOutcome {
                x,
                value: fx,
                gradient_norm: gnorm,
                iterations: iter - 1,
                converged: gnorm <= opts.gradient_tol,
                objective_history: history,
            };
        };

        let s: Vec<f64> = x_new.iter().zip(&x).map(|(a, b)| a - b).collect();
        let yv: Vec<f64> = g_new.iter().zip(&g).map(|(a, b)| a - b).collect();
        let sy = dot(&s, &yv);
        let wolfe_ok = dot(&g_new, &dir) >= opts.wolfe_c2 * slope;
        if wolfe_ok && sy > 1e-12 * norm(&s) * norm(&yv) {
            if mem.len() == opts.memory {
                mem.pop_front();
            }
            let rho = 1.0 / sy;
            mem.push_back((s, yv, rho));
        }

        x = x_new;
        fx = f_new;
        g = g_new;
        gnorm = norm(&g);
        history.push(fx);

        if gnorm <= opts.gradient_tol {
            return LbfgsOutcome {
                x,
                value: fx,
                gradient_norm: gnorm,
                iterations: iter,
                converged: true,
                objective_history: history,
            };
        }
    }

    LbfgsOutcome {
        x,
        value: fx,
        gradient_norm: gnorm,
        iterations: opts.max_iterations,
        converged: false,
        objective_history: history,
    }
}

fn two_loop(g: &[f64], mem: &VecDeque<(Vec<f64>, Vec<f64>, f64)>) -> Vec<f64> {
    let mut q: Vec<f64> = g.to_vec();
    let mut alphas = Vec::with_capacity(mem.len());
    for (s, y, rho) in mem.iter().rev() {
        let a = rho * dot(s, &q);
        for (qi, yi) in q.iter_mut().zip(y) {
            *qi -= a * yi;
        }
        alphas.push(a);
    }
    if let Some((s, y, _)) = mem.back() {
        let gamma = dot(s, y) / dot(y, y);
        for qi in q.iter_mut() {
            *qi *= gamma;
        }
    }
    for ((s, y, rho), a) in mem.iter().zip(alphas.iter().rev()) {
        let b = rho * dot(y, &q);
        for (qi, si) in q.iter_mut().zip(s) {
            *qi += (a - b) * si;
        }
    }
    for qi in q.iter_mut() {
        *qi = -*qi;
    }
    q
}
