//! Preconditioned gradient descent for scale-invariant quotients.

use crate::error::{Error, Result};

/// A 0-homogeneous objective on a vector space of nodal values.
pub trait Quotient: Sync {
    /// Value and gradient.
    fn eval(&self, x: &[f64]) -> Result<(f64, Vec<f64>)>;
    /// Norm used for renormalization after every accepted step.
    fn norm(&self, x: &[f64]) -> f64;
    /// Applies the inverse of the metric, `P g ≈ K^{-1} g`.
    fn precondition(&self, g: &[f64]) -> Vec<f64>;
    /// Applies the metric `K`.
    fn metric(&self, s: &[f64]) -> Vec<f64>;
}

#[derive(Debug, Clone, PartialEq)]
pub struct DescentOptions {
    pub max_iter: usize,
    /// Relative level change that counts as stagnation.
    pub tol_rel: f64,
    /// Number of consecutive stagnating steps before stopping.
    pub window: usize,
    /// Stop when `‖x‖ ‖∇Q‖ < grad_tol |Q|`.
    pub grad_tol: f64,
    pub armijo: f64,
    pub max_backtracks: usize,
    /// First trial step as a fraction of `max |x|` along the first direction.
    pub initial_step: f64,
}

impl Default for DescentOptions {
    fn default() -> Self {
        DescentOptions {
            max_iter: 5000,
            tol_rel: 1e-8,
            window: 10,
            grad_tol: 1e-10,
            armijo: 1e-4,
            max_backtracks: 60,
            initial_step: 0.05,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DescentOutcome {
    pub x: Vec<f64>,
    pub level: f64,
    pub trace: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
    pub last_change: f64,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn max_abs(a: &[f64]) -> f64 {
    a.iter().fold(0.0, |m, v| m.max(v.abs()))
}

pub fn minimize<Q: Quotient>(q: &Q, x0: Vec<f64>, opt: &DescentOptions) -> Result<DescentOutcome> {
    let mut x = x0;
    let n0 = q.norm(&x);
    if !(n0 > 0.0) || !n0.is_finite() {
        return Err(Error::OutOfRange("initial guess has zero or non-finite norm".into()));
    }
    x.iter_mut().for_each(|v| *v /= n0);
    let (mut f, mut g) = q.eval(&x)?;
    let mut trace = vec![f];
    let mut d: Vec<f64> = q.precondition(&g).iter().map(|v| -v).collect();
    let dm = max_abs(&d);
    let mut step = if dm > 0.0 { opt.initial_step * max_abs(&x) / dm } else { 0.0 };
    let mut quiet = 0usize;
    let mut last_change = f64::INFINITY;
    for it in 0..opt.max_iter {
        let gnorm = dot(&g, &g).sqrt() * dot(&x, &x).sqrt();
        if gnorm <= opt.grad_tol * f.abs().max(f64::MIN_POSITIVE) {
            return Ok(DescentOutcome { x, level: f, trace, iterations: it, converged: true, last_change });
        }
        let mut slope = dot(&g, &d);
        if !(slope < 0.0) {
            d = g.iter().map(|v| -v).collect();
            slope = -dot(&g, &g);
        }
        let mut accepted = None;
        let mut a = step;
        for _ in 0..opt.max_backtracks {
            let xn: Vec<f64> = x.iter().zip(&d).map(|(xi, di)| xi + a * di).collect();
            match q.eval(&xn) {
                Ok((fn_, gn)) if fn_.is_finite() && fn_ <= f + opt.armijo * a * slope => {
                    accepted = Some((xn, fn_, gn));
                    break;
                }
                Ok(_) | Err(Error::DegenerateDirection { .. }) | Err(Error::NonFinite(_)) => a *= 0.5,
                Err(e) => return Err(e),
            }
        }
        let Some((mut xn, fn_, mut gn)) = accepted else {
            // the line search cannot improve on the current level at working precision
            return Ok(DescentOutcome { x, level: f, trace, iterations: it, converged: true, last_change: 0.0 });
        };
        let s = q.norm(&xn);
        xn.iter_mut().for_each(|v| *v /= s);
        gn.iter_mut().for_each(|v| *v *= s);
        let sv: Vec<f64> = xn.iter().zip(&x).map(|(a, b)| a - b).collect();
        let yv: Vec<f64> = gn.iter().zip(&g).map(|(a, b)| a - b).collect();
        let sy = dot(&sv, &yv);
        let sks = dot(&sv, &q.metric(&sv));
        step = if sy > 0.0 && sks > 0.0 { sks / sy } else { 2.0 * a };
        last_change = (f - fn_).abs() / fn_.abs().max(f64::MIN_POSITIVE);
        quiet = if last_change < opt.tol_rel { quiet + 1 } else { 0 };
        x = xn;
        f = fn_;
        g = gn;
        trace.push(f);
        if quiet >= opt.window {
            return Ok(DescentOutcome { x, level: f, trace, iterations: it + 1, converged: true, last_change });
        }
        d = q.precondition(&g).iter().map(|v| -v).collect();
    }
    Ok(DescentOutcome { x, level: f, trace, iterations: opt.max_iter, converged: false, last_change })
}
