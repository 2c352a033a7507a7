//! Small dense Levenberg–Marquardt solver with forward-difference Jacobian.

use nalgebra::{DMatrix, DVector};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LmOptions {
    pub max_iters: usize,
    /// Cost below which a solution counts as a root.
    pub cost_threshold: f64,
    /// Relative step size that ends the iteration.
    pub step_tol: f64,
    /// Cost at which polishing stops; roundoff dominates below it.
    pub cost_floor: f64,
}

impl Default for LmOptions {
    fn default() -> Self {
        Self {
            max_iters: 200,
            cost_threshold: 1e-12,
            step_tol: 1e-12,
            cost_floor: 1e-28,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LmResult {
    pub x: Vec<f64>,
    pub cost: f64,
    pub iterations: usize,
}

/// Forward-difference step for coordinate `x`.
pub fn fd_step(x: f64) -> f64 {
    1e-7 * (1.0 + x.abs())
}

/// Residual function: writes `r(x)` into the output buffer.
pub trait Residual {
    fn eval(&self, x: &[f64], out: &mut Vec<f64>);
}

impl<F: Fn(&[f64], &mut Vec<f64>)> Residual for F {
    fn eval(&self, x: &[f64], out: &mut Vec<f64>) {
        self(x, out)
    }
}

fn sq_norm(r: &[f64]) -> f64 {
    r.iter().map(|v| v * v).sum()
}

/// Jacobian by forward differences around `x`, given `r0 = r(x)`.
pub fn jacobian(f: &impl Residual, x: &[f64], r0: &[f64]) -> DMatrix<f64> {
    let m = r0.len();
    let n = x.len();
    let mut jac = DMatrix::zeros(m, n);
    let mut xp = x.to_vec();
    let mut rp = Vec::with_capacity(m);
    for j in 0..n {
        let h = fd_step(x[j]);
        xp[j] = x[j] + h;
        let h = xp[j] - x[j];
        f.eval(&xp, &mut rp);
        for i in 0..m {
            jac[(i, j)] = (rp[i] - r0[i]) / h;
        }
        xp[j] = x[j];
    }
    jac
}

/// Gradient `2·Jᵀr` of the cost `‖r‖²` as the solver sees it.
pub fn cost_gradient(f: &impl Residual, x: &[f64]) -> Vec<f64> {
    let mut r = Vec::new();
    f.eval(x, &mut r);
    let jac = jacobian(f, x, &r);
    let g = jac.transpose() * DVector::from_column_slice(&r);
    g.iter().map(|v| 2.0 * v).collect()
}

/// Minimizes `‖r(x)‖²` from `x0`. Iteration continues past the threshold
/// until the cost reaches the floor, steps become negligible, progress
/// stalls, or the iteration budget runs out.
pub fn minimize(f: &impl Residual, x0: &[f64], opts: &LmOptions) -> LmResult {
    let n = x0.len();
    let mut x = DVector::from_column_slice(x0);
    let mut r = Vec::new();
    f.eval(x.as_slice(), &mut r);
    let mut cost = sq_norm(&r);
    if n == 0 || r.is_empty() || !cost.is_finite() {
        return LmResult {
            x: x0.to_vec(),
            cost,
            iterations: 0,
        };
    }

    let mut lambda = -1.0;
    let mut nu = 2.0;
    let mut rejected_below_threshold = 0;
    let mut trial = Vec::with_capacity(r.len());
    let mut iterations = 0;
    let mut fresh_jacobian = true;
    let mut a = DMatrix::zeros(0, 0);
    let mut g = DVector::zeros(0);

    while iterations < opts.max_iters && cost > opts.cost_floor {
        iterations += 1;
        if fresh_jacobian {
            let jac = jacobian(f, x.as_slice(), &r);
            a = jac.transpose() * &jac;
            g = jac.transpose() * DVector::from_column_slice(&r);
            fresh_jacobian = false;
        }
        if lambda < 0.0 {
            let max_diag = (0..n).map(|i| a[(i, i)]).fold(0.0, f64::max);
            lambda = 1e-3 * if max_diag > 0.0 { max_diag } else { 1.0 };
        }

        let mut damped = a.clone();
        for i in 0..n {
            damped[(i, i)] += lambda;
        }
        let step = damped.cholesky().map(|c| c.solve(&(-&g)));
        let Some(delta) = step.filter(|d| d.iter().all(|v| v.is_finite())) else {
            // Singular normal equations: steepest descent with backtracking.
            match descent_step(f, &x, &g, cost, &mut trial) {
                Some((xn, cn)) => {
                    x = xn;
                    cost = cn;
                    std::mem::swap(&mut r, &mut trial);
                    fresh_jacobian = true;
                    continue;
                }
                None => break,
            }
        };

        let x_new = &x + &delta;
        f.eval(x_new.as_slice(), &mut trial);
        let cost_new = sq_norm(&trial);
        let predicted = delta.dot(&(&delta * lambda - &g));
        let small_step = delta.norm() < opts.step_tol * (1.0 + x.norm());

        if cost_new.is_finite() && cost_new < cost {
            let rho = if predicted > 0.0 { (cost - cost_new) / predicted } else { 1.0 };
            x = x_new;
            cost = cost_new;
            std::mem::swap(&mut r, &mut trial);
            fresh_jacobian = true;
            lambda *= (1.0 - (2.0 * rho - 1.0).powi(3)).max(1.0 / 3.0);
            nu = 2.0;
            rejected_below_threshold = 0;
        } else {
            lambda *= nu;
            nu *= 2.0;
            if cost < opts.cost_threshold {
                rejected_below_threshold += 1;
                if rejected_below_threshold >= 3 {
                    break;
                }
            }
            if !lambda.is_finite() {
                break;
            }
        }
        if small_step {
            break;
        }
    }

    LmResult {
        x: x.as_slice().to_vec(),
        cost,
        iterations,
    }
}

/// Armijo backtracking along `−g`. Returns the new point and cost, with
/// the residual left in `trial`.
fn descent_step(
    f: &impl Residual,
    x: &DVector<f64>,
    g: &DVector<f64>,
    cost: f64,
    trial: &mut Vec<f64>,
) -> Option<(DVector<f64>, f64)> {
    let gg = g.norm_squared();
    if gg == 0.0 || !gg.is_finite() {
        return None;
    }
    let mut t = 1.0;
    for _ in 0..60 {
        let xn = x - g * t;
        f.eval(xn.as_slice(), trial);
        let cn = sq_norm(trial);
        // Cost gradient is 2g, so the Armijo decrease is 2·c₁·t·‖g‖².
        if cn.is_finite() && cn <= cost - 2e-4 * t * gg {
            return Some((xn, cn));
        }
        t *= 0.5;
    }
    None
}
