//! Laplacian preconditioners: a masked 5/7-point stencil solved by conjugate
//! gradients on grids, and a tridiagonal solve for radial profiles.

use crate::geometry::GridDomain;

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Dirichlet Laplacian `h^{n-2} Σ_d (2x_i − x_{i+e_d} − x_{i−e_d})` on the interior nodes.
#[derive(Debug, Clone)]
pub struct GridLaplacian {
    inside: Vec<bool>,
    strides: Vec<usize>,
    scale: f64,
    pub cg_tol: f64,
    pub cg_max_iter: usize,
}

impl GridLaplacian {
    pub fn new(dom: &GridDomain) -> Self {
        let dim = dom.dim();
        GridLaplacian {
            inside: dom.inside_mask().to_vec(),
            strides: dom.strides()[..dim].to_vec(),
            scale: dom.h().powi(dim as i32 - 2),
            cg_tol: 1e-3,
            cg_max_iter: 2000,
        }
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; x.len()];
        for (i, yi) in y.iter_mut().enumerate() {
            if !self.inside[i] {
                continue;
            }
            let mut s = 0.0;
            for &st in &self.strides {
                s += 2.0 * x[i];
                if self.inside[i + st] {
                    s -= x[i + st];
                }
                if self.inside[i - st] {
                    s -= x[i - st];
                }
            }
            *yi = self.scale * s;
        }
        y
    }

    /// Approximately solves `K z = b` by conjugate gradients from zero.
    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let mut r: Vec<f64> = b.iter().zip(&self.inside).map(|(v, &m)| if m { *v } else { 0.0 }).collect();
        let mut z = vec![0.0; b.len()];
        let b2 = dot(&r, &r);
        if b2 == 0.0 {
            return z;
        }
        let mut d = r.clone();
        let mut rr = b2;
        for _ in 0..self.cg_max_iter {
            let kd = self.apply(&d);
            let a = rr / dot(&d, &kd);
            for i in 0..z.len() {
                z[i] += a * d[i];
                r[i] -= a * kd[i];
            }
            let rr_new = dot(&r, &r);
            if rr_new <= self.cg_tol * self.cg_tol * b2 {
                break;
            }
            let beta = rr_new / rr;
            for i in 0..d.len() {
                d[i] = r[i] + beta * d[i];
            }
            rr = rr_new;
        }
        z
    }
}

/// Symmetric tridiagonal matrix with diagonal `diag` and off-diagonal `off`.
#[derive(Debug, Clone, PartialEq)]
pub struct Tridiagonal {
    pub diag: Vec<f64>,
    pub off: Vec<f64>,
}

impl Tridiagonal {
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let n = self.diag.len();
        (0..n)
            .map(|i| {
                let mut s = self.diag[i] * x[i];
                if i > 0 {
                    s += self.off[i - 1] * x[i - 1];
                }
                if i + 1 < n {
                    s += self.off[i] * x[i + 1];
                }
                s
            })
            .collect()
    }

    /// Thomas algorithm.
    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.diag.len();
        let mut c = vec![0.0; n];
        let mut d = vec![0.0; n];
        let mut denom = self.diag[0];
        c[0] = if n > 1 { self.off[0] / denom } else { 0.0 };
        d[0] = b[0] / denom;
        for i in 1..n {
            denom = self.diag[i] - self.off[i - 1] * c[i - 1];
            if i + 1 < n {
                c[i] = self.off[i] / denom;
            }
            d[i] = (b[i] - self.off[i - 1] * d[i - 1]) / denom;
        }
        let mut x = vec![0.0; n];
        x[n - 1] = d[n - 1];
        for i in (0..n - 1).rev() {
            x[i] = d[i] - c[i] * x[i + 1];
        }
        x
    }
}
