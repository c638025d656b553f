//! Closed-form constants: ball volumes, the affine normalization `α_{n,p}`,
//! the sharp Sobolev constants `K_{n,p}` and the extremal bubble family.

use crate::error::{Error, Result};
use crate::geometry::{LinearMap, Point};
use std::f64::consts::PI;

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// Γ(x) by the Lanczos approximation (g = 7), with reflection below 1/2.
pub fn gamma(x: f64) -> f64 {
    if x < 0.5 {
        PI / ((PI * x).sin() * gamma(1.0 - x))
    } else {
        let x = x - 1.0;
        let mut a = LANCZOS[0];
        let t = x + LANCZOS_G + 0.5;
        for (i, c) in LANCZOS.iter().enumerate().skip(1) {
            a += c / (x + i as f64);
        }
        (2.0 * PI).sqrt() * t.powf(x + 0.5) * (-t).exp() * a
    }
}

/// ln Γ(x) for x > 0.
pub fn ln_gamma(x: f64) -> f64 {
    if x < 0.5 {
        (PI / (PI * x).sin()).ln() - ln_gamma(1.0 - x)
    } else {
        let x = x - 1.0;
        let mut a = LANCZOS[0];
        let t = x + LANCZOS_G + 0.5;
        for (i, c) in LANCZOS.iter().enumerate().skip(1) {
            a += c / (x + i as f64);
        }
        0.5 * (2.0 * PI).ln() + (x + 0.5) * t.ln() - t + a.ln()
    }
}

/// Euler beta function via log-gamma.
pub fn beta(a: f64, b: f64) -> f64 {
    (ln_gamma(a) + ln_gamma(b) - ln_gamma(a + b)).exp()
}

/// Volume of the unit ball in R^k, `π^{k/2} / Γ(k/2 + 1)`; k may be fractional.
pub fn omega(k: f64) -> f64 {
    PI.powf(0.5 * k) / gamma(0.5 * k + 1.0)
}

/// `α_{n,p} = (2ω_{n+p-2})^{-1/p} (nω_nω_{p-1})^{1/p} (nω_n)^{1/n}`.
pub fn alpha_np(n: usize, p: f64) -> f64 {
    let nf = n as f64;
    let area = nf * omega(nf);
    (2.0 * omega(nf + p - 2.0)).powf(-1.0 / p) * (area * omega(p - 1.0)).powf(1.0 / p) * area.powf(1.0 / nf)
}

/// Critical Sobolev exponent `np/(n-p)`; infinite for `p >= n`.
pub fn critical_exponent(n: usize, p: f64) -> f64 {
    let nf = n as f64;
    if p >= nf {
        f64::INFINITY
    } else {
        nf * p / (nf - p)
    }
}

/// Sharp constant of `‖u‖_{p*} ≤ K_{n,p} E_p(u)`, for `p = 1` and `1 < p < n`.
pub fn k_np(n: usize, p: f64) -> Result<f64> {
    let nf = n as f64;
    if !(p >= 1.0) || p >= nf {
        return Err(Error::OutOfRange(format!("K_(n,p) requires 1 <= p < n, got n = {}, p = {}", n, p)));
    }
    if p == 1.0 {
        return Ok(PI.powf(-0.5) / nf * gamma(0.5 * nf + 1.0).powf(1.0 / nf));
    }
    let ratio = (ln_gamma(0.5 * nf + 1.0) + ln_gamma(nf) - ln_gamma(nf - nf / p + 1.0) - ln_gamma(nf / p)).exp();
    Ok(PI.powf(-0.5) * nf.powf(-1.0 / p) * ((p - 1.0) / (nf - p)).powf(1.0 - 1.0 / p) * ratio.powf(1.0 / nf))
}

/// The classical sharp Sobolev constant `‖u‖_{p*} / ‖∇u‖_p` evaluated on the
/// radial bubble `(1 + r^{p'})^{-(n-p)/p}` through its two Beta integrals.
pub fn classical_sobolev_constant(n: usize, p: f64) -> Result<f64> {
    let nf = n as f64;
    if !(p > 1.0) || p >= nf {
        return Err(Error::OutOfRange(format!("requires 1 < p < n, got n = {}, p = {}", n, p)));
    }
    let pc = p / (p - 1.0);
    let pstar = critical_exponent(n, p);
    let area = nf * omega(nf);
    // ∫_0^∞ r^{a-1} (1 + r^c)^{-b} dr = B(a/c, b - a/c) / c
    let radial = |a: f64, c: f64, b: f64| beta(a / c, b - a / c) / c;
    let mass = area * radial(nf, pc, nf);
    let slope = ((nf - p) / (p - 1.0)).powf(p) * area * radial(nf + pc, pc, nf);
    Ok(mass.powf(1.0 / pstar) / slope.powf(1.0 / p))
}

/// `μ^A_{p,p*} = K_{n,p}^{-1}`.
pub fn mu_critical(n: usize, p: f64) -> Result<f64> {
    Ok(1.0 / k_np(n, p)?)
}

/// Constants bundle for one `(n, p)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SharpConstants {
    pub n: usize,
    pub p: f64,
    pub alpha_np: f64,
    pub k_np: Option<f64>,
    pub p_star: f64,
    /// `ω_0, ω_1, …, ω_{⌈n+p⌉}`.
    pub omegas: Vec<f64>,
}

impl SharpConstants {
    pub fn new(n: usize, p: f64) -> Self {
        let top = (n as f64 + p).ceil() as usize;
        SharpConstants {
            n,
            p,
            alpha_np: alpha_np(n, p),
            k_np: k_np(n, p).ok(),
            p_star: critical_exponent(n, p),
            omegas: (0..=top).map(|k| omega(k as f64)).collect(),
        }
    }

    pub fn mu_critical(&self) -> Option<f64> {
        self.k_np.map(|k| 1.0 / k)
    }

    /// `K_{n,p}^{-p}`, the Sobolev threshold for critical levels.
    pub fn sobolev_level(&self) -> Option<f64> {
        self.k_np.map(|k| k.powf(-self.p))
    }
}

/// A member `a (1 + b|A(x - x0)|^{p/(p-1)})^{1 - n/p}` of the extremal family.
#[derive(Debug, Clone, PartialEq)]
pub struct ExtremalBubble {
    pub amplitude: f64,
    pub scale: f64,
    pub center: Point,
    pub map: LinearMap,
}

impl ExtremalBubble {
    pub fn new(amplitude: f64, scale: f64, center: Point, map: LinearMap) -> Result<Self> {
        if !(scale > 0.0) {
            return Err(Error::OutOfRange(format!("bubble scale must be positive, got {}", scale)));
        }
        let det = map.det();
        if (det - 1.0).abs() > 1e-12 {
            return Err(Error::OutOfRange(format!("bubble map must have det 1, got {}", det)));
        }
        Ok(ExtremalBubble { amplitude, scale, center, map })
    }

    pub fn standard(dim: usize, scale: f64) -> Self {
        ExtremalBubble { amplitude: 1.0, scale, center: [0.0; 3], map: LinearMap::identity(dim) }
    }
}

/// Pointwise value of the bubble; requires `1 < p < n`.
pub fn bubble(e: &ExtremalBubble, n: usize, p: f64, x: &Point) -> Result<f64> {
    let nf = n as f64;
    if !(p > 1.0) || p >= nf {
        return Err(Error::OutOfRange(format!("bubble requires 1 < p < n, got n = {}, p = {}", n, p)));
    }
    let mut d = [0.0; 3];
    for i in 0..n {
        d[i] = x[i] - e.center[i];
    }
    let y = e.map.apply(&d);
    let r = (0..n).map(|i| y[i] * y[i]).sum::<f64>().sqrt();
    Ok(e.amplitude * (1.0 + e.scale * r.powf(p / (p - 1.0))).powf(1.0 - nf / p))
}

/// Sobolev quotient `‖∇u‖_p^p / ‖u‖_{p*}^p` of the rescaled bubble
/// `(1 + |b x|^{p'})^{1-n/p}` shifted down by its boundary value so that it
/// vanishes on the unit sphere.
/// Radial integrals use graded composite Gauss–Legendre panels.
pub fn truncated_bubble_quotient(n: usize, p: f64, b: f64) -> Result<f64> {
    let nf = n as f64;
    if !(p > 1.0) || p >= nf || !(b > 0.0) {
        return Err(Error::OutOfRange(format!("requires 1 < p < n and b > 0, got n = {}, p = {}, b = {}", n, p, b)));
    }
    let pc = p / (p - 1.0);
    let expo = 1.0 - nf / p;
    let pstar = critical_exponent(n, p);
    let bs = b.powf(pc);
    let edge = (1.0 + bs).powf(expo);
    let value = |r: f64| (1.0 + bs * r.powf(pc)).powf(expo) - edge;
    let slope = |r: f64| (expo * (1.0 + bs * r.powf(pc)).powf(expo - 1.0) * bs * pc * r.powf(pc - 1.0)).abs();
    let (gx, gw) = crate::quadrature::gauss_legendre(20);
    let width = 1.0 / b;
    let mut breaks = vec![0.0];
    let mut t = (1e-4 * width).min(0.5);
    while t < 1.0 {
        breaks.push(t);
        t *= 1.25;
    }
    breaks.push(1.0);
    let (mut num, mut den) = (Vec::new(), Vec::new());
    for w in breaks.windows(2) {
        let (a, c) = (w[0], w[1]);
        let half = 0.5 * (c - a);
        for (x, wt) in gx.iter().zip(&gw) {
            let r = a + half * (x + 1.0);
            let jac = half * wt * r.powf(nf - 1.0);
            num.push(jac * slope(r).powf(p));
            den.push(jac * value(r).abs().powf(pstar));
        }
    }
    let area = nf * omega(nf);
    let num = area * crate::summation::pairwise_sum(&num);
    let den = area * crate::summation::pairwise_sum(&den);
    Ok(num / den.powf(p / pstar))
}
