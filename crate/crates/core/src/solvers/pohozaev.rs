//! The Pohozaev identity on a ball as a residual diagnostic for radial
//! solutions of `Δ^A_p u = u^{q-1} + λ u^{p-1}`.

use super::radial::RadialMesh;
use crate::constants::omega;
use crate::error::{Error, Result};
use crate::fields::{pow_abs, radial_profile, ScalarField};
use crate::geometry::Point;
use num_rational::BigRational;
use num_traits::{FromPrimitive, Zero};

/// Largest radial-profile scatter accepted from a grid field.
pub const RADIAL_SCATTER_MAX: f64 = 0.05;

#[derive(Debug, Clone, PartialEq)]
pub struct PohozaevReport {
    /// `(1/p − 1) ∫_{∂B} |u'(R)|^p (x·ν) dσ`.
    pub lhs: f64,
    /// `(n/p − 1) ∫ u f(u) − n ∫ F(u)`.
    pub rhs: f64,
    pub residual: f64,
}

/// Residual for a profile sampled on `r_i = R i / N` with `u_N = 0`.
pub fn pohozaev_residual_profile(radii: &[f64], u: &[f64], n: usize, p: f64, q: f64, lambda: f64) -> Result<PohozaevReport> {
    let k = radii.len();
    if k < 4 || u.len() != k {
        return Err(Error::GridMismatch("profile and radii must match and have at least 4 nodes".into()));
    }
    let scale = u.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if !(scale > 0.0) || u.iter().any(|v| !v.is_finite()) {
        return Err(Error::NotRadial { scatter: f64::INFINITY, threshold: RADIAL_SCATTER_MAX });
    }
    let radius = radii[k - 1];
    let nf = n as f64;
    let mesh = RadialMesh::new(n, radius, k - 1);
    let free = &u[..k - 1];
    let area = nf * omega(nf);
    let (m_q, _) = mesh.value_term(free, |v| (pow_abs(v, q), 0.0));
    let (m_p, _) = mesh.value_term(free, |v| (pow_abs(v, p), 0.0));
    let uf = area * (m_q + lambda * m_p);
    let big_f = area * (m_q / q + lambda * m_p / p);
    let dr = mesh.dr;
    let du = (3.0 * u[k - 1] - 4.0 * u[k - 2] + u[k - 3]) / (2.0 * dr);
    let lhs = (1.0 / p - 1.0) * pow_abs(du, p) * radius * area * radius.powf(nf - 1.0);
    let rhs = (nf / p - 1.0) * uf - nf * big_f;
    let residual = (lhs - rhs).abs() / lhs.abs().max(rhs.abs()).max(f64::MIN_POSITIVE);
    Ok(PohozaevReport { lhs, rhs, residual })
}

/// Residual for a grid field on the ball `B_R(center)`, through its radial profile.
pub fn pohozaev_residual(u: &ScalarField, center: &Point, p: f64, q: f64, lambda: f64, radius: f64) -> Result<PohozaevReport> {
    let prof = radial_profile(u, center)?;
    if prof.scatter > RADIAL_SCATTER_MAX {
        return Err(Error::NotRadial { scatter: prof.scatter, threshold: RADIAL_SCATTER_MAX });
    }
    let intervals = ((radius / u.domain().h()).ceil() as usize).max(8);
    let radii: Vec<f64> = (0..=intervals).map(|i| radius * i as f64 / intervals as f64).collect();
    let mut vals: Vec<f64> = radii.iter().map(|&r| prof.eval(r)).collect();
    *vals.last_mut().unwrap() = 0.0;
    pohozaev_residual_profile(&radii, &vals, u.dim(), p, q, lambda)
}

/// `(n − p)/p − n/p*` in exact rational arithmetic on the binary value of `p`.
pub fn critical_pohozaev_coefficient(n: usize, p: f64) -> Result<BigRational> {
    let pr = BigRational::from_float(p).ok_or_else(|| Error::NonFinite(format!("p = {}", p)))?;
    let nr = BigRational::from_usize(n).expect("small integer");
    if pr <= BigRational::zero() || pr >= nr {
        return Err(Error::OutOfRange(format!("need 0 < p < n, got p = {}", p)));
    }
    let p_star = &nr * &pr / (&nr - &pr);
    Ok((&nr - &pr) / &pr - &nr / p_star)
}
