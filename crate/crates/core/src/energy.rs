//! Directional energies `Ψ_ξ`, the affine energy, the kernel `H_u^p` and the
//! weak form of the affine p-Laplacian.

use crate::constants::alpha_np;
use crate::error::{Error, Result};
use crate::fields::{corner_sign, gradient_weight, gradients, pow_abs, pow_sign, truncate, CellGradients, ScalarField};
use crate::geometry::{GridDomain, Point};
use crate::quadrature::{DirectionSet, RuleId};
use crate::summation::{log_sum_exp, pairwise_sum};
use rayon::prelude::*;

/// Below this value a directional energy declares the field degenerate.
pub const EPS_PSI: f64 = 1e-30;
/// Fields with `max |u|` below this are treated as the zero function.
pub const EPS_U: f64 = 1e-12;
/// Regularization width for `1 < p < 2`, relative to the largest cell gradient.
pub const REG_EPS_REL: f64 = 1e-9;

#[inline]
fn dot(a: &Point, b: &Point) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn check_dims(u: &ScalarField, ds: &DirectionSet) -> Result<()> {
    if u.dim() != ds.dim() {
        return Err(Error::GridMismatch(format!("{}-D field with a {}-D direction set", u.dim(), ds.dim())));
    }
    if !u.is_finite() {
        return Err(Error::NonFinite("field contains non-finite values".into()));
    }
    Ok(())
}

/// `Ψ_j = Σ_cells vol |g_cell · ξ_j|^p`.
pub fn psi(u: &ScalarField, ds: &DirectionSet, p: f64) -> Result<Vec<f64>> {
    check_dims(u, ds)?;
    Ok(psi_cells(&gradients(u), ds, p))
}

pub fn psi_cells(g: &CellGradients, ds: &DirectionSet, p: f64) -> Vec<f64> {
    psi_terms(g, ds, p, false).0
}

/// Largest `cells × directions` table of `|ξ_j · g|^p` kept for the flux pass.
const POWER_CACHE_MAX: usize = 1 << 24;

fn psi_terms(g: &CellGradients, ds: &DirectionSet, p: f64, keep: bool) -> (Vec<f64>, Option<Vec<Vec<f64>>>) {
    let keep = keep && g.grads.len() * ds.len() <= POWER_CACHE_MAX;
    let cols: Vec<(f64, Option<Vec<f64>>)> = ds
        .directions()
        .par_iter()
        .map(|xi| {
            let terms: Vec<f64> = g.grads.iter().map(|gc| pow_abs(dot(gc, xi), p)).collect();
            let s = g.cell_volume * pairwise_sum(&terms);
            (s, keep.then_some(terms))
        })
        .collect();
    let (psi, tables): (Vec<f64>, Vec<Option<Vec<f64>>>) = cols.into_iter().unzip();
    let cache = if keep { Some(tables.into_iter().map(|t| t.unwrap()).collect()) } else { None };
    (psi, cache)
}

/// `Σ_cells vol |g_cell|^p`.
pub fn grad_norm_pow(g: &CellGradients, p: f64) -> f64 {
    let terms: Vec<f64> = g.grads.par_iter().map(|v| pow_abs(dot(v, v).sqrt(), p)).collect();
    g.cell_volume * pairwise_sum(&terms)
}

/// `log Σ_j w_j Ψ_j^{-n/p}`, or `None` when some `Ψ_j < ε_ψ`.
fn log_power_mean(psi: &[f64], ds: &DirectionSet, p: f64) -> Result<Option<f64>> {
    if psi.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("directional energy is not finite".into()));
    }
    let min_psi = psi.iter().copied().fold(f64::INFINITY, f64::min);
    if min_psi < EPS_PSI {
        return Ok(None);
    }
    let r = ds.dim() as f64 / p;
    let terms: Vec<f64> = psi.iter().zip(ds.weights()).map(|(s, w)| w.ln() - r * s.ln()).collect();
    Ok(Some(log_sum_exp(&terms)))
}

/// `E = α_{n,p} (Σ_j w_j Ψ_j^{-n/p})^{-1/n}`, with 0 for degenerate input.
pub fn energy_from_psi(psi: &[f64], ds: &DirectionSet, p: f64) -> Result<f64> {
    let n = ds.dim() as f64;
    Ok(match log_power_mean(psi, ds, p)? {
        None => 0.0,
        Some(l) => alpha_np(ds.dim(), p) * (-l / n).exp(),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnergyReport {
    pub n: usize,
    pub p: f64,
    pub rule: RuleId,
    pub psi: Vec<f64>,
    pub energy: f64,
    pub grad_norm: f64,
    pub degenerate: bool,
    pub min_psi: f64,
}

impl EnergyReport {
    pub const CSV_HEADER: &'static str = "n,p,m,E,grad_norm,min_psi,degenerate";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{:.16e},{},{:.16e},{:.16e},{:.16e},{}",
            self.n, self.p, self.rule.m, self.energy, self.grad_norm, self.min_psi, self.degenerate
        )
    }
}

pub fn energy(u: &ScalarField, ds: &DirectionSet, p: f64) -> Result<EnergyReport> {
    check_dims(u, ds)?;
    let g = gradients(u);
    let psi = psi_cells(&g, ds, p);
    let energy = energy_from_psi(&psi, ds, p)?;
    let min_psi = psi.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(EnergyReport {
        n: ds.dim(),
        p,
        rule: ds.id(),
        energy,
        grad_norm: grad_norm_pow(&g, p).powf(1.0 / p),
        degenerate: min_psi < EPS_PSI,
        min_psi,
        psi,
    })
}

/// The discrete measure `c_j` of `H_u^p(ζ) = Σ_j c_j |ξ_j · ζ|^p`.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelCoefficients {
    pub rule: RuleId,
    pub p: f64,
    pub energy: f64,
    pub coeffs: Vec<f64>,
    directions: Vec<Point>,
}

impl KernelCoefficients {
    pub fn hp(&self, zeta: &Point) -> f64 {
        let t: Vec<f64> = self.coeffs.iter().zip(&self.directions).map(|(c, xi)| c * pow_abs(dot(xi, zeta), self.p)).collect();
        pairwise_sum(&t)
    }

    /// `H_u(ζ)`.
    pub fn norm(&self, zeta: &Point) -> f64 {
        self.hp(zeta).powf(1.0 / self.p)
    }

    pub fn check_rule(&self, ds: &DirectionSet) -> Result<()> {
        if self.rule != ds.id() {
            return Err(Error::GridMismatch(format!("kernel built on {:?}, used with {:?}", self.rule, ds.id())));
        }
        Ok(())
    }
}

pub fn kernel(u: &ScalarField, ds: &DirectionSet, p: f64) -> Result<KernelCoefficients> {
    check_dims(u, ds)?;
    kernel_from_psi(&psi(u, ds, p)?, ds, p)
}

/// `c_j = α^{-n} E^{n+p} Ψ_j^{-(n+p)/p} w_j`, evaluated in log-space.
pub fn kernel_from_psi(psi: &[f64], ds: &DirectionSet, p: f64) -> Result<KernelCoefficients> {
    let n = ds.dim() as f64;
    let l = log_power_mean(psi, ds, p)?.ok_or_else(|| Error::DegenerateDirection {
        min_psi: psi.iter().copied().fold(f64::INFINITY, f64::min),
    })?;
    let la = alpha_np(ds.dim(), p).ln();
    let coeffs = psi
        .iter()
        .zip(ds.weights())
        .map(|(s, w)| (p * la - (n + p) / n * l + w.ln() - (n + p) / p * s.ln()).exp())
        .collect();
    Ok(KernelCoefficients {
        rule: ds.id(),
        p,
        energy: (la - l / n).exp(),
        coeffs,
        directions: ds.directions().to_vec(),
    })
}

/// `d/dt |t|^p / p`, smoothed for `1 < p < 2` as `t (t² + ε²)^{(p-2)/2}`.
#[inline]
fn flux(t: f64, p: f64, eps2: f64) -> f64 {
    if p >= 2.0 {
        pow_sign(t, p)
    } else if p == 1.5 {
        t / (t * t + eps2).sqrt().sqrt()
    } else {
        t * (t * t + eps2).powf(0.5 * (p - 2.0))
    }
}

fn reg_eps2(g: &CellGradients, p: f64) -> f64 {
    if p >= 2.0 {
        return 0.0;
    }
    let scale = g.grads.iter().fold(0.0f64, |m, v| m.max(dot(v, v)));
    REG_EPS_REL * REG_EPS_REL * scale
}

/// Per cell `Σ_j c_j flux(ξ_j · g) ξ_j`, the vector `H^{p-1} ∇H` at the cell gradient.
fn cell_fluxes(k: &KernelCoefficients, g: &CellGradients) -> Vec<Point> {
    cell_fluxes_cached(k, g, None)
}

/// With `powers[j][cell] = |t|^p` the flux is `|t|^p / t` wherever the smoothing is
/// below round-off, i.e. `t² > 1e12 ε²`.
fn cell_fluxes_cached(k: &KernelCoefficients, g: &CellGradients, powers: Option<&[Vec<f64>]>) -> Vec<Point> {
    let eps2 = reg_eps2(g, k.p);
    let p = k.p;
    let cut = 1e12 * eps2;
    g.grads
        .par_iter()
        .enumerate()
        .map(|(cell, gc)| {
            let mut v = [0.0; 3];
            for (j, (c, xi)) in k.coeffs.iter().zip(&k.directions).enumerate() {
                let t = dot(gc, xi);
                let f = match powers {
                    Some(pw) if t * t > cut => pw[j][cell] / t,
                    _ => flux(t, p, eps2),
                };
                let s = c * f;
                v[0] += s * xi[0];
                v[1] += s * xi[1];
                v[2] += s * xi[2];
            }
            v
        })
        .collect()
}

/// `∫ H_u^{p-1}(∇u) ∇H_u(∇u) · ∇φ`.
pub fn weak_form(u: &ScalarField, ds: &DirectionSet, p: f64, phi: &ScalarField) -> Result<f64> {
    check_dims(u, ds)?;
    u.check_same_grid(phi)?;
    let gu = gradients(u);
    let k = kernel_from_psi(&psi_cells(&gu, ds, p), ds, p)?;
    Ok(weak_form_with(&k, &gu, &gradients(phi)))
}

pub fn weak_form_with(k: &KernelCoefficients, gu: &CellGradients, gphi: &CellGradients) -> f64 {
    let v = cell_fluxes(k, gu);
    let terms: Vec<f64> = v.iter().zip(&gphi.grads).map(|(a, b)| dot(a, b)).collect();
    gu.cell_volume * pairwise_sum(&terms)
}

/// The weak form together with `Σ vol Σ_j c_j |flux_j| |ξ_j · ∇φ|`, the same
/// sum with every term replaced by its magnitude.
pub fn weak_form_with_scale(k: &KernelCoefficients, gu: &CellGradients, gphi: &CellGradients) -> (f64, f64) {
    let eps2 = reg_eps2(gu, k.p);
    let p = k.p;
    let pairs: Vec<(f64, f64)> = gu
        .grads
        .par_iter()
        .zip(&gphi.grads)
        .map(|(a, b)| {
            let (mut s, mut m) = (0.0, 0.0);
            for (c, xi) in k.coeffs.iter().zip(&k.directions) {
                let t = c * flux(dot(a, xi), p, eps2) * dot(b, xi);
                s += t;
                m += t.abs();
            }
            (s, m)
        })
        .collect();
    let (s, m): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
    (gu.cell_volume * pairwise_sum(&s), gu.cell_volume * pairwise_sum(&m))
}

/// Transposes per-cell gradient sensitivities onto the nodes:
/// returns `Σ_cells vol · V_cell · ∂g_cell/∂u_i` for every node `i`.
pub fn scatter_cell_vectors(dom: &GridDomain, vecs: &[Point]) -> Vec<f64> {
    let dim = dom.dim();
    let w = gradient_weight(dim, dom.h()) * dom.cell_volume();
    let mut out = vec![0.0; dom.num_nodes()];
    for (cell, v) in dom.cells().iter().zip(vecs) {
        for (k, &o) in dom.corner_offsets().iter().enumerate() {
            let mut s = 0.0;
            for (d, vd) in v.iter().enumerate().take(dim) {
                s += corner_sign(k, d) * vd;
            }
            out[cell.base + o] += w * s;
        }
    }
    for (i, x) in out.iter_mut().enumerate() {
        if !dom.is_inside(i) {
            *x = 0.0;
        }
    }
    out
}

/// Nodal gradient of `E^p`.
pub fn energy_gradient(u: &ScalarField, ds: &DirectionSet, p: f64) -> Result<Vec<f64>> {
    Ok(energy_p_and_gradient(u, ds, p)?.1)
}

/// `E^p(u)` together with its nodal gradient, sharing one gradient sweep.
pub fn energy_p_and_gradient(u: &ScalarField, ds: &DirectionSet, p: f64) -> Result<(f64, Vec<f64>)> {
    check_dims(u, ds)?;
    energy_p_and_gradient_cells(u.domain(), &gradients(u), ds, p)
}

/// [`energy_p_and_gradient`] from precomputed cell gradients.
pub fn energy_p_and_gradient_cells(dom: &GridDomain, g: &CellGradients, ds: &DirectionSet, p: f64) -> Result<(f64, Vec<f64>)> {
    let (psi, cache) = psi_terms(g, ds, p, true);
    let k = kernel_from_psi(&psi, ds, p)?;
    let v: Vec<Point> = cell_fluxes_cached(&k, g, cache.as_deref()).into_iter().map(|a| [p * a[0], p * a[1], p * a[2]]).collect();
    Ok((k.energy.powf(p), scatter_cell_vectors(dom, &v)))
}

/// `‖∇u‖_p^p` with its nodal gradient.
pub fn classical_energy_p_and_gradient(u: &ScalarField, p: f64) -> (f64, Vec<f64>) {
    classical_energy_p_and_gradient_cells(u.domain(), &gradients(u), p)
}

pub fn classical_energy_p_and_gradient_cells(dom: &GridDomain, g: &CellGradients, p: f64) -> (f64, Vec<f64>) {
    let v: Vec<Point> = g
        .grads
        .par_iter()
        .map(|gc| {
            let m = dot(gc, gc).sqrt();
            let s = if m == 0.0 { 0.0 } else { p * pow_sign(m, p) / m };
            [s * gc[0], s * gc[1], s * gc[2]]
        })
        .collect();
    (grad_norm_pow(g, p), scatter_cell_vectors(dom, &v))
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuperadditivityReport {
    /// `F(Ψ(T)+Ψ(R)) − F(Ψ(T)) − F(Ψ(R))`, with `F(Ψ) = E^p`.
    pub gap: f64,
    /// `E^p(u) − E^p(T_h u) − E^p(R_h u)` with `E^p(u)` evaluated directly.
    pub direct_gap: f64,
    pub energy_p: f64,
    pub truncated_p: f64,
    pub remainder_p: f64,
    /// `max_j |Ψ_j(u) − Ψ_j(T) − Ψ_j(R)| / Ψ_j(u)`.
    pub decomposition_defect: f64,
}

pub fn superadditivity_check(u: &ScalarField, ds: &DirectionSet, p: f64, h: f64) -> Result<SuperadditivityReport> {
    check_dims(u, ds)?;
    let (t, r) = truncate(u, h)?;
    let (pu, pt, pr) = (psi(u, ds, p)?, psi(&t, ds, p)?, psi(&r, ds, p)?);
    let sum: Vec<f64> = pt.iter().zip(&pr).map(|(a, b)| a + b).collect();
    let ep = |s: &[f64]| -> Result<f64> { Ok(energy_from_psi(s, ds, p)?.powf(p)) };
    let (e_sum, e_u, e_t, e_r) = (ep(&sum)?, ep(&pu)?, ep(&pt)?, ep(&pr)?);
    let defect = pu
        .iter()
        .zip(&sum)
        .map(|(a, b)| if *a > 0.0 { (a - b).abs() / a } else { 0.0 })
        .fold(0.0, f64::max);
    Ok(SuperadditivityReport {
        gap: e_sum - e_t - e_r,
        direct_gap: e_u - e_t - e_r,
        energy_p: e_u,
        truncated_p: e_t,
        remainder_p: e_r,
        decomposition_defect: defect,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::{quadratic_bump, random_field, RandomFieldSpec};
    use crate::geometry::{build_grid, transform_domain, DomainSpec, LinearMap};
    use crate::quadrature::{default_directions, directions};
    use proptest::prelude::*;
    use std::f64::consts::PI;
    use std::sync::Arc;

    fn disk(h: f64) -> Arc<GridDomain> {
        Arc::new(build_grid(&DomainSpec::unit_ball(2), h).unwrap())
    }

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    #[test]
    fn psi_examples() {
        let ds = default_directions(2).unwrap();
        let u = ScalarField::zeros(disk(0.1));
        assert!(psi(&u, &ds, 2.0).unwrap().iter().all(|&v| v == 0.0));

        let patch = Arc::new(GridDomain::patch(2, [0.0; 3], 0.1, [5, 5, 1]));
        let ramp = ScalarField::from_fn(patch, |x| x[1]).unwrap();
        let e1 = directions(2, 4).unwrap();
        assert!(psi(&ramp, &e1, 2.0).unwrap()[0].abs() < 1e-28);

        let bump = quadratic_bump(disk(0.01), &[0.0; 3], 1.0, None).unwrap();
        let v = psi(&bump, &e1, 2.0).unwrap()[0];
        assert!(rel(v, PI) < 0.01, "{}", v);
    }

    #[test]
    fn energy_examples() {
        let ds = default_directions(2).unwrap();
        let zero = energy(&ScalarField::zeros(disk(0.1)), &ds, 2.0).unwrap();
        assert!(zero.degenerate && zero.energy == 0.0);

        let bump = quadratic_bump(disk(0.01), &[0.0; 3], 1.0, None).unwrap();
        let r = energy(&bump, &ds, 2.0).unwrap();
        assert!(rel(r.energy, (2.0 * PI).sqrt()) < 0.01);
        assert!(rel(r.grad_norm, (2.0 * PI).sqrt()) < 0.01);
        assert!(r.csv_row().split(',').count() == 7);
    }

    #[test]
    fn sheared_bump_energy_is_invariant_gradient_norm_is_not() {
        let ds = default_directions(2).unwrap();
        let dom = disk(0.01);
        let bump = quadratic_bump(dom.clone(), &[0.0; 3], 1.0, None).unwrap();
        let t = LinearMap::from_rows(&[vec![1.0, 1.0], vec![0.0, 1.0]]).unwrap();
        let target = Arc::new(transform_domain(&dom, &t).unwrap());
        let sheared = quadratic_bump(target, &[0.0; 3], 1.0, Some(&t)).unwrap();
        let (a, b) = (energy(&bump, &ds, 2.0).unwrap(), energy(&sheared, &ds, 2.0).unwrap());
        assert!(rel(b.energy, a.energy) < 0.02, "{} vs {}", b.energy, a.energy);
        assert!(rel(b.grad_norm, a.grad_norm) > 0.1);
    }

    #[test]
    fn non_finite_field_is_rejected() {
        let dom = disk(0.2);
        let mut vals = vec![0.0; dom.num_nodes()];
        let k = (0..dom.num_nodes()).find(|&i| dom.is_inside(i)).unwrap();
        vals[k] = f64::NAN;
        let u = ScalarField::from_values_unchecked(dom, vals);
        let ds = default_directions(2).unwrap();
        assert!(matches!(energy(&u, &ds, 2.0), Err(Error::NonFinite(_))));
    }

    #[test]
    fn kernel_examples() {
        let ds = default_directions(2).unwrap();
        let dom = disk(0.05);
        let u = random_field(dom.clone(), &RandomFieldSpec::default(), 5);
        let (k1, k2) = (kernel(&u, &ds, 1.5).unwrap(), kernel(&u.scaled(2.0), &ds, 1.5).unwrap());
        for (a, b) in k1.coeffs.iter().zip(&k2.coeffs) {
            assert!(rel(*b, *a) < 1e-10);
        }
        assert!(k1.coeffs.iter().all(|&c| c > 0.0));

        let bump = quadratic_bump(disk(0.02), &[0.0; 3], 1.0, None).unwrap();
        let k = kernel(&bump, &ds, 2.0).unwrap();
        for j in 0..7 {
            let th = 0.3 + j as f64;
            let z = [2.0 * th.cos(), 2.0 * th.sin(), 0.0];
            assert!((k.norm(&z) - 2.0).abs() / 2.0 < 1e-6, "{}", k.norm(&z));
        }

        let tiny = ScalarField::from_fn(dom, |_| 1e-20).unwrap();
        assert!(matches!(kernel(&tiny, &ds, 2.0), Err(Error::DegenerateDirection { .. })));
    }

    #[test]
    fn kernel_rejects_other_rule() {
        let ds = directions(2, 64).unwrap();
        let u = quadratic_bump(disk(0.1), &[0.0; 3], 1.0, None).unwrap();
        let k = kernel(&u, &ds, 2.0).unwrap();
        assert!(k.check_rule(&ds).is_ok());
        assert!(matches!(k.check_rule(&directions(2, 128).unwrap()), Err(Error::GridMismatch(_))));
    }

    #[test]
    fn kernel_reproduces_energy_exactly() {
        let ds = default_directions(2).unwrap();
        for (seed, p) in [(1u64, 2.0), (2, 1.5), (3, 3.0)] {
            let u = random_field(disk(0.05), &RandomFieldSpec::default(), seed);
            let g = gradients(&u);
            let k = kernel(&u, &ds, p).unwrap();
            let terms: Vec<f64> = g.grads.iter().map(|z| k.hp(z)).collect();
            let total = g.cell_volume * pairwise_sum(&terms);
            let ep = k.energy.powf(p);
            assert!(rel(total, ep) < 1e-10);
            assert!(rel(weak_form(&u, &ds, p, &u).unwrap(), ep) < 1e-10);
        }
    }

    #[test]
    fn weak_form_matches_finite_differences() {
        let ds = default_directions(2).unwrap();
        let dom = disk(0.05);
        for p in [2.0, 1.5, 2.5] {
            let u = random_field(dom.clone(), &RandomFieldSpec::default(), 7);
            let phi = random_field(dom.clone(), &RandomFieldSpec::default(), 8);
            assert_eq!(weak_form(&u, &ds, p, &ScalarField::zeros(dom.clone())).unwrap(), 0.0);
            let t = 1e-5;
            let shift = |s: f64| {
                let v: Vec<f64> = u.values().iter().zip(phi.values()).map(|(a, b)| a + s * b).collect();
                energy(&ScalarField::from_values(dom.clone(), v).unwrap(), &ds, p).unwrap().energy.powf(p)
            };
            let fd = (shift(t) - shift(-t)) / (2.0 * t) / p;
            let wf = weak_form(&u, &ds, p, &phi).unwrap();
            assert!(rel(wf, fd) < 1e-5, "p = {}: {} vs {}", p, wf, fd);
        }
    }

    #[test]
    fn gradient_is_linear_assembly_of_weak_form() {
        let ds = default_directions(2).unwrap();
        let dom = disk(0.05);
        let u = random_field(dom.clone(), &RandomFieldSpec::default(), 9);
        for p in [2.0, 1.5] {
            let g = energy_gradient(&u, &ds, p).unwrap();
            for s in 20..23 {
                let phi = random_field(dom.clone(), &RandomFieldSpec::default(), s);
                let lhs: f64 = g.iter().zip(phi.values()).map(|(a, b)| a * b).sum();
                let rhs = p * weak_form(&u, &ds, p, &phi).unwrap();
                assert!((lhs - rhs).abs() <= 1e-12 * rhs.abs().max(1.0), "{} vs {}", lhs, rhs);
            }
        }
    }

    #[test]
    fn gradient_of_radial_bump_matches_classical() {
        let ds = default_directions(2).unwrap();
        let u = quadratic_bump(disk(0.02), &[0.0; 3], 1.0, None).unwrap();
        let ga = energy_gradient(&u, &ds, 2.0).unwrap();
        let (_, gc) = classical_energy_p_and_gradient(&u, 2.0);
        let num: f64 = ga.iter().zip(&gc).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
        let den: f64 = gc.iter().map(|b| b * b).sum::<f64>().sqrt();
        assert!(num / den < 1e-6, "{}", num / den);
    }

    #[test]
    fn superadditivity_examples() {
        let ds = default_directions(2).unwrap();
        let dom = disk(0.02);
        let bump = quadratic_bump(dom.clone(), &[0.0; 3], 1.0, None).unwrap();
        let r = superadditivity_check(&bump, &ds, 2.0, 2.0).unwrap();
        assert_eq!(r.gap, 0.0);
        assert_eq!(r.direct_gap, 0.0);
        let r = superadditivity_check(&bump, &ds, 2.0, 0.5).unwrap();
        assert!(r.gap.abs() < 1e-10 * r.energy_p);
        assert!(r.direct_gap.abs() < 0.02 * r.energy_p);
        let t = LinearMap::from_rows(&[vec![1.0, 0.9], vec![0.0, 1.0]]).unwrap();
        let sheared = quadratic_bump(dom, &[0.0; 3], 1.0, Some(&t)).unwrap();
        let r = superadditivity_check(&sheared, &ds, 2.0, 0.5).unwrap();
        assert!(r.gap >= -1e-8, "{}", r.gap);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn comparison_inequality_holds(seed in 0u64..10_000, p in prop::sample::select(vec![1.5, 2.0, 3.0])) {
            let ds = default_directions(2).unwrap();
            let u = random_field(disk(0.1), &RandomFieldSpec::default(), seed);
            let r = energy(&u, &ds, p).unwrap();
            prop_assert!(r.energy <= r.grad_norm * (1.0 + 1e-12));
        }

        #[test]
        fn energy_is_absolutely_homogeneous(seed in 0u64..10_000, c in prop::sample::select(vec![-2.0, 0.5, 10.0])) {
            let ds = default_directions(2).unwrap();
            let u = random_field(disk(0.1), &RandomFieldSpec::default(), seed);
            let (a, b) = (energy(&u, &ds, 1.5).unwrap().energy, energy(&u.scaled(c), &ds, 1.5).unwrap().energy);
            prop_assert!((b - c.abs() * a).abs() <= 1e-12 * b);
        }

        #[test]
        fn truncation_gap_is_nonnegative(seed in 0u64..10_000, frac in 0.1f64..0.9) {
            let ds = default_directions(2).unwrap();
            let u = random_field(disk(0.1), &RandomFieldSpec::default(), seed);
            let r = superadditivity_check(&u, &ds, 2.0, frac * u.max_abs()).unwrap();
            prop_assert!(r.gap >= -1e-12 * r.energy_p);
        }
    }
}
