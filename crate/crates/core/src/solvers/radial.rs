//! Radial quotients on a ball with P1 elements in `r`.
//!
//! Profiles live on `r_i = R i / N`, `i = 0..=N`, with `u_N = 0`. Gradient
//! terms use the exact element weights `∫ r^{n-1} dr`; the `L^p` and `L^q`
//! terms use 4-point Gauss–Legendre per element.

use super::descent::{minimize, DescentOptions, Quotient};
use super::precond::Tridiagonal;
use crate::constants::{critical_exponent, omega};
use crate::error::{Error, Result};
use crate::fields::{pow_abs, pow_sign};
use crate::quadrature::gauss_legendre;
use crate::summation::pairwise_sum;

#[derive(Debug, Clone, PartialEq)]
pub struct RadialOptions {
    pub intervals: usize,
    pub radius: f64,
    pub descent: DescentOptions,
}

impl Default for RadialOptions {
    fn default() -> Self {
        RadialOptions {
            intervals: 2000,
            radius: 1.0,
            descent: DescentOptions { max_iter: 50_000, ..DescentOptions::default() },
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RadialResult {
    pub n: usize,
    pub p: f64,
    pub q: f64,
    pub lambda: f64,
    pub level: f64,
    pub radii: Vec<f64>,
    /// Nonnegative profile with `‖u‖_{L^q(B_R)} = 1`; the last entry is 0.
    pub profile: Vec<f64>,
    pub trace: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
}

impl RadialResult {
    /// `c^{1/(q-p)} u`, the solution of the Euler–Lagrange equation.
    pub fn rescaled_profile(&self) -> Vec<f64> {
        let s = super::rescale_factor(self.level, self.p, self.q);
        self.profile.iter().map(|v| s * v).collect()
    }

    pub fn peak(&self) -> f64 {
        self.profile.iter().fold(0.0, |m, v| m.max(*v))
    }
}

/// Quadrature data shared by the radial quotient and the Pohozaev residual.
#[derive(Debug, Clone)]
pub(crate) struct RadialMesh {
    pub dr: f64,
    pub radii: Vec<f64>,
    /// `∫_{r_e}^{r_{e+1}} r^{n-1} dr`.
    pub elem_weight: Vec<f64>,
    /// Per element: Gauss weights times `r^{n-1}` and the local coordinate `t`.
    pub gauss: Vec<[(f64, f64); 4]>,
}

impl RadialMesh {
    pub fn new(n: usize, radius: f64, intervals: usize) -> Self {
        let dr = radius / intervals as f64;
        let nf = n as f64;
        let radii: Vec<f64> = (0..=intervals).map(|i| radius * i as f64 / intervals as f64).collect();
        let (gx, gw) = gauss_legendre(4);
        let mut elem_weight = Vec::with_capacity(intervals);
        let mut gauss = Vec::with_capacity(intervals);
        for e in 0..intervals {
            let (a, b) = (radii[e], radii[e + 1]);
            elem_weight.push((b.powf(nf) - a.powf(nf)) / nf);
            let mut pts = [(0.0, 0.0); 4];
            for k in 0..4 {
                let t = 0.5 * (gx[k] + 1.0);
                let r = a + t * dr;
                pts[k] = (0.5 * dr * gw[k] * r.powf(nf - 1.0), t);
            }
            gauss.push(pts);
        }
        RadialMesh { dr, radii, elem_weight, gauss }
    }

    pub fn intervals(&self) -> usize {
        self.elem_weight.len()
    }

    fn at(u: &[f64], i: usize) -> f64 {
        u.get(i).copied().unwrap_or(0.0)
    }

    /// `∫ r^{n-1} |u'|^p` and its gradient over the free nodes.
    pub fn slope_term(&self, u: &[f64], p: f64) -> (f64, Vec<f64>) {
        let mut terms = Vec::with_capacity(self.intervals());
        let mut grad = vec![0.0; u.len()];
        for e in 0..self.intervals() {
            let s = (Self::at(u, e + 1) - Self::at(u, e)) / self.dr;
            terms.push(self.elem_weight[e] * pow_abs(s, p));
            let d = self.elem_weight[e] * p * pow_sign(s, p) / self.dr;
            grad[e] -= d;
            if e + 1 < u.len() {
                grad[e + 1] += d;
            }
        }
        (pairwise_sum(&terms), grad)
    }

    /// `∫ r^{n-1} G(u)` with its gradient, `G` given with its derivative.
    pub fn value_term(&self, u: &[f64], g: impl Fn(f64) -> (f64, f64)) -> (f64, Vec<f64>) {
        let mut terms = Vec::with_capacity(self.intervals());
        let mut grad = vec![0.0; u.len()];
        for e in 0..self.intervals() {
            let (a, b) = (Self::at(u, e), Self::at(u, e + 1));
            let mut s = 0.0;
            let (mut da, mut db) = (0.0, 0.0);
            for &(w, t) in &self.gauss[e] {
                let (v, dv) = g(a + t * (b - a));
                s += w * v;
                da += w * dv * (1.0 - t);
                db += w * dv * t;
            }
            terms.push(s);
            grad[e] += da;
            if e + 1 < u.len() {
                grad[e + 1] += db;
            }
        }
        (pairwise_sum(&terms), grad)
    }

    /// Free-node stiffness matrix with element weights `W_e / Δr²`.
    pub fn stiffness(&self) -> Tridiagonal {
        let m = self.intervals();
        let mut diag = vec![0.0; m];
        let mut off = vec![0.0; m.saturating_sub(1)];
        for e in 0..m {
            let k = self.elem_weight[e] / (self.dr * self.dr);
            diag[e] += k;
            if e + 1 < m {
                diag[e + 1] += k;
                off[e] -= k;
            }
        }
        Tridiagonal { diag, off }
    }
}

pub(crate) struct RadialQuotient {
    mesh: RadialMesh,
    p: f64,
    q: f64,
    lambda: f64,
    area: f64,
    stiff: Tridiagonal,
}

impl RadialQuotient {
    pub fn new(n: usize, p: f64, q: f64, lambda: f64, radius: f64, intervals: usize) -> Self {
        let mesh = RadialMesh::new(n, radius, intervals);
        let stiff = mesh.stiffness();
        RadialQuotient { mesh, p, q, lambda, area: n as f64 * omega(n as f64), stiff }
    }

    fn power(r: f64) -> impl Fn(f64) -> (f64, f64) {
        move |v| (pow_abs(v, r), r * pow_sign(v, r))
    }
}

impl Quotient for RadialQuotient {
    fn eval(&self, x: &[f64]) -> Result<(f64, Vec<f64>)> {
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("radial profile".into()));
        }
        let (a, ga) = self.mesh.slope_term(x, self.p);
        let (b, gb) = self.mesh.value_term(x, Self::power(self.p));
        let (c, gc) = self.mesh.value_term(x, Self::power(self.q));
        if !(c > 0.0) {
            return Err(Error::DegenerateDirection { min_psi: 0.0 });
        }
        let kappa = self.area.powf(1.0 - self.p / self.q);
        let den = c.powf(self.p / self.q);
        let val = kappa * (a - self.lambda * b) / den;
        let s = self.p / self.q * val / c;
        let grad = (0..x.len()).map(|i| kappa * (ga[i] - self.lambda * gb[i]) / den - s * gc[i]).collect();
        Ok((val, grad))
    }

    fn norm(&self, x: &[f64]) -> f64 {
        (self.area * self.mesh.value_term(x, Self::power(self.q)).0).powf(1.0 / self.q)
    }

    fn precondition(&self, g: &[f64]) -> Vec<f64> {
        self.stiff.solve(g)
    }

    fn metric(&self, s: &[f64]) -> Vec<f64> {
        self.stiff.apply(s)
    }
}

fn check(n: usize, p: f64, q: f64, opts: &RadialOptions) -> Result<()> {
    let nf = n as f64;
    if n < 2 || !(p > 1.0 && p < nf) {
        return Err(Error::OutOfRange(format!("need 1 < p < n, got n = {}, p = {}", n, p)));
    }
    if !(q >= p && q <= critical_exponent(n, p)) {
        return Err(Error::OutOfRange(format!("need p <= q <= p*, got q = {}", q)));
    }
    if opts.intervals < 4 || !(opts.radius > 0.0) {
        return Err(Error::OutOfRange("radial mesh needs at least 4 intervals and a positive radius".into()));
    }
    Ok(())
}

fn default_start(opts: &RadialOptions) -> Vec<f64> {
    (0..opts.intervals)
        .map(|i| {
            let s = i as f64 / opts.intervals as f64;
            (1.0 - s * s).powi(2)
        })
        .collect()
}

/// Minimizes the radial quotient
/// `(nω_n)^{1-p/q} (∫ r^{n-1}|u'|^p − λ ∫ r^{n-1}|u|^p) / (∫ r^{n-1}|u|^q)^{p/q}`.
pub fn radial_level(n: usize, p: f64, q: f64, lambda: f64, opts: &RadialOptions, start: Option<&[f64]>) -> Result<RadialResult> {
    check(n, p, q, opts)?;
    let quot = RadialQuotient::new(n, p, q, lambda, opts.radius, opts.intervals);
    let x0 = match start {
        Some(s) if s.len() >= opts.intervals => s[..opts.intervals].to_vec(),
        Some(_) => return Err(Error::GridMismatch("warm start has the wrong length".into())),
        None => default_start(opts),
    };
    let out = minimize(&quot, x0, &opts.descent)?;
    if !out.converged {
        return Err(Error::NoConvergence { iterations: out.iterations, last_change: out.last_change });
    }
    let sign = if out.x.iter().sum::<f64>() < 0.0 { -1.0 } else { 1.0 };
    let mut x: Vec<f64> = out.x.iter().map(|v| (sign * v).abs()).collect();
    let s = quot.norm(&x);
    x.iter_mut().for_each(|v| *v /= s);
    let level = quot.eval(&x)?.0;
    if !(level > 0.0) {
        return Err(Error::NonPositiveLevel { level });
    }
    let mut profile = x;
    profile.push(0.0);
    Ok(RadialResult {
        n,
        p,
        q,
        lambda,
        level,
        radii: quot.mesh.radii.clone(),
        profile,
        trace: out.trace,
        iterations: out.iterations,
        converged: out.converged,
    })
}

/// The critical case `q = p*`.
pub fn radial_critical_level(n: usize, p: f64, lambda: f64, opts: &RadialOptions) -> Result<RadialResult> {
    radial_level(n, p, critical_exponent(n, p), lambda, opts, None)
}

/// First radial eigenvalue `inf ∫|u'|^p r^{n-1} / ∫|u|^p r^{n-1}` of the ball.
pub fn radial_eigenvalue(n: usize, p: f64, opts: &RadialOptions) -> Result<RadialResult> {
    radial_level(n, p, p, 0.0, opts, None)
}

/// Levels along increasing `λ`, each solve warm-started from the previous
/// minimizer so the computed levels cannot increase.
pub fn radial_scan(n: usize, p: f64, q: f64, lambdas: &[f64], opts: &RadialOptions) -> Result<Vec<RadialResult>> {
    if lambdas.windows(2).any(|w| !(w[1] >= w[0])) {
        return Err(Error::OutOfRange("scan values must be nondecreasing".into()));
    }
    let mut out: Vec<RadialResult> = Vec::with_capacity(lambdas.len());
    for &l in lambdas {
        let start = out.last().map(|r| r.profile.clone());
        out.push(radial_level(n, p, q, l, opts, start.as_deref())?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn element_weights_sum_to_ball_moment() {
        let m = RadialMesh::new(3, 1.0, 100);
        assert!((m.elem_weight.iter().sum::<f64>() - 1.0 / 3.0).abs() < 1e-15);
        let (v, _) = m.value_term(&vec![1.0; 100], |_| (1.0, 0.0));
        assert!((v - 1.0 / 3.0).abs() < 1e-14);
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let q = RadialQuotient::new(3, 1.7, 3.5, 2.0, 1.0, 40);
        let x: Vec<f64> = (0..40).map(|i| 1.0 - (i as f64 / 40.0).powi(2) + 0.01 * (i as f64).sin()).collect();
        let (_, g) = q.eval(&x).unwrap();
        for i in [0, 7, 39] {
            let t = 1e-6;
            let mut y = x.clone();
            y[i] += t;
            let fp = q.eval(&y).unwrap().0;
            y[i] -= 2.0 * t;
            let fm = q.eval(&y).unwrap().0;
            let fd = (fp - fm) / (2.0 * t);
            assert!((fd - g[i]).abs() < 1e-6 * g[i].abs().max(1e-4), "{}: {} vs {}", i, fd, g[i]);
        }
    }

    #[test]
    fn ball_eigenvalue_is_pi_squared() {
        let r = radial_eigenvalue(3, 2.0, &RadialOptions { intervals: 400, ..Default::default() }).unwrap();
        assert!((r.level - PI * PI).abs() / (PI * PI) < 1e-4, "{}", r.level);
    }

    #[test]
    fn scan_rejects_unsorted_values() {
        assert!(radial_scan(3, 2.0, 4.0, &[1.0, 0.5], &RadialOptions::default()).is_err());
        let above = radial_level(3, 2.0, 4.0, 30.0, &RadialOptions { intervals: 200, ..Default::default() }, None);
        assert!(matches!(above, Err(Error::NonPositiveLevel { .. })), "{:?}", above);
    }
}
