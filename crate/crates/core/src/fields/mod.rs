//! Nodal grid functions with zero trace, their cell gradients and norms.

mod io;
mod random;

pub use io::{read_field, write_field, FIELD_MAGIC};
pub use random::{random_field, RandomFieldSpec};

use crate::error::{Error, Result};
use crate::geometry::{GridDomain, LinearMap, Point};
use crate::summation::pairwise_sum;
use rayon::prelude::*;
use std::sync::Arc;

/// A piecewise-multilinear function given by its nodal values.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    dom: Arc<GridDomain>,
    values: Vec<f64>,
}

impl ScalarField {
    pub fn zeros(dom: Arc<GridDomain>) -> Self {
        let n = dom.num_nodes();
        ScalarField { dom, values: vec![0.0; n] }
    }

    /// Samples `f` at the interior nodes; masked nodes are set to 0.
    pub fn from_fn<F>(dom: Arc<GridDomain>, f: F) -> Result<Self>
    where
        F: Fn(&Point) -> f64 + Sync,
    {
        let values: Vec<f64> = (0..dom.num_nodes())
            .into_par_iter()
            .map(|i| if dom.is_inside(i) { f(&dom.node_coords(i)) } else { 0.0 })
            .collect();
        ScalarField::from_values(dom, values)
    }

    /// Wraps nodal values; masked entries are overwritten with 0.
    pub fn from_values(dom: Arc<GridDomain>, mut values: Vec<f64>) -> Result<Self> {
        if values.len() != dom.num_nodes() {
            return Err(Error::GridMismatch(format!("{} values for {} nodes", values.len(), dom.num_nodes())));
        }
        for (i, v) in values.iter_mut().enumerate() {
            if !dom.is_inside(i) {
                *v = 0.0;
            } else if !v.is_finite() {
                return Err(Error::NonFinite(format!("field value at node {}", i)));
            }
        }
        Ok(ScalarField { dom, values })
    }

    /// Skips the finiteness check. Only meant for fault-injection fixtures.
    pub fn from_values_unchecked(dom: Arc<GridDomain>, values: Vec<f64>) -> Self {
        assert_eq!(values.len(), dom.num_nodes());
        ScalarField { dom, values }
    }

    pub fn domain(&self) -> &GridDomain {
        &self.dom
    }

    pub fn domain_arc(&self) -> &Arc<GridDomain> {
        &self.dom
    }

    pub fn dim(&self) -> usize {
        self.dom.dim()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn scaled(&self, c: f64) -> ScalarField {
        self.map(|v| c * v)
    }

    /// Nodewise `|u|`.
    pub fn abs(&self) -> ScalarField {
        self.map(f64::abs)
    }

    fn map(&self, f: impl Fn(f64) -> f64) -> ScalarField {
        ScalarField { dom: self.dom.clone(), values: self.values.iter().map(|&v| f(v)).collect() }
    }

    /// Checks that `other` lives on the same grid.
    pub fn check_same_grid(&self, other: &ScalarField) -> Result<()> {
        if Arc::ptr_eq(&self.dom, &other.dom) || self.dom.same_grid(&other.dom) {
            Ok(())
        } else {
            Err(Error::GridMismatch("fields live on different grids".into()))
        }
    }

    /// Value of the multilinear interpolant at `x`; 0 outside the grid box.
    pub fn interpolate(&self, x: &Point) -> f64 {
        let dom = &*self.dom;
        let dim = dom.dim();
        let shape = dom.shape();
        let origin = dom.origin();
        let h = dom.h();
        let mut base = [0usize; 3];
        let mut frac = [0.0; 3];
        for d in 0..dim {
            let s = (x[d] - origin[d]) / h;
            let top = (shape[d] - 1) as f64;
            if !(s >= 0.0 && s <= top) {
                return 0.0;
            }
            let i = (s.floor() as usize).min(shape[d].saturating_sub(2));
            base[d] = i;
            frac[d] = s - i as f64;
        }
        let b = dom.node_index(base);
        let mut acc = 0.0;
        for (k, &off) in dom.corner_offsets().iter().enumerate() {
            let mut w = 1.0;
            for d in 0..dim {
                w *= if (k >> d) & 1 == 1 { frac[d] } else { 1.0 - frac[d] };
            }
            if w != 0.0 {
                acc += w * self.values[b + off];
            }
        }
        acc
    }
}

/// Per-cell gradient of the multilinear interpolant at the centroid, and the
/// centroid value used by the one-point cell quadrature.
#[derive(Debug, Clone, PartialEq)]
pub struct CellGradients {
    pub dim: usize,
    pub cell_volume: f64,
    pub grads: Vec<Point>,
    pub centroid_values: Vec<f64>,
}

impl CellGradients {
    pub fn len(&self) -> usize {
        self.grads.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grads.is_empty()
    }
}

/// Centroid weights: the derivative of the centroid gradient component `d`
/// with respect to corner `k` is `sign(k, d) * gradient_weight(dim, h)`.
pub fn gradient_weight(dim: usize, h: f64) -> f64 {
    1.0 / (h * (1usize << (dim - 1)) as f64)
}

#[inline]
pub fn corner_sign(k: usize, d: usize) -> f64 {
    if (k >> d) & 1 == 1 {
        1.0
    } else {
        -1.0
    }
}

pub fn gradients(u: &ScalarField) -> CellGradients {
    let dom = u.domain();
    let dim = dom.dim();
    let gw = gradient_weight(dim, dom.h());
    let avg = 1.0 / (1usize << dim) as f64;
    let offs = dom.corner_offsets();
    let vals = &u.values;
    let pairs: Vec<(Point, f64)> = dom
        .cells()
        .par_iter()
        .map(|c| {
            let mut g = [0.0; 3];
            let mut s = 0.0;
            for (k, &o) in offs.iter().enumerate() {
                let v = vals[c.base + o];
                s += v;
                for (d, gd) in g.iter_mut().enumerate().take(dim) {
                    *gd += corner_sign(k, d) * v;
                }
            }
            for gd in g.iter_mut().take(dim) {
                *gd *= gw;
            }
            (g, s * avg)
        })
        .collect();
    let (grads, centroid_values) = pairs.into_iter().unzip();
    CellGradients { dim, cell_volume: dom.cell_volume(), grads, centroid_values }
}

/// `Σ_cells vol |u(centroid)|^q`.
pub fn lq_norm_pow(u: &ScalarField, q: f64) -> f64 {
    lq_norm_pow_cells(&gradients(u), q)
}

pub fn lq_norm_pow_cells(g: &CellGradients, q: f64) -> f64 {
    let terms: Vec<f64> = g.centroid_values.par_iter().map(|v| pow_abs(*v, q)).collect();
    g.cell_volume * pairwise_sum(&terms)
}

/// `(Σ_cells vol |u(centroid)|^q)^{1/q}`; requires `q >= 1`.
pub fn lq_norm(u: &ScalarField, q: f64) -> Result<f64> {
    if !(q >= 1.0) {
        return Err(Error::OutOfRange(format!("L^q norm needs q >= 1, got {}", q)));
    }
    Ok(lq_norm_pow(u, q).powf(1.0 / q))
}

/// `|x|^p` with exact branches for the exponents used most.
#[inline]
pub fn pow_abs(x: f64, p: f64) -> f64 {
    let a = x.abs();
    if p == 2.0 {
        a * a
    } else if p == 1.5 {
        a * a.sqrt()
    } else if p == 1.0 {
        a
    } else if p == 3.0 {
        a * a * a
    } else if p == 4.0 {
        let s = a * a;
        s * s
    } else if p == 6.0 {
        let s = a * a * a;
        s * s
    } else if a == 0.0 {
        0.0
    } else {
        a.powf(p)
    }
}

/// `|x|^{p-2} x`, the derivative of `|x|^p / p`.
#[inline]
pub fn pow_sign(x: f64, p: f64) -> f64 {
    if p == 2.0 {
        x
    } else if p == 1.5 {
        x.signum() * x.abs().sqrt()
    } else if p == 3.0 {
        x * x.abs()
    } else if p == 4.0 {
        x * x * x
    } else if p == 6.0 {
        let s = x * x;
        s * s * x
    } else if x == 0.0 {
        0.0
    } else {
        x.signum() * x.abs().powf(p - 1.0)
    }
}

/// Nodewise `(T_h u, R_h u)` with `T_h(s) = min(max(s, -h), h)` and `R_h = s - T_h(s)`.
pub fn truncate(u: &ScalarField, h: f64) -> Result<(ScalarField, ScalarField)> {
    if !(h > 0.0) {
        return Err(Error::OutOfRange(format!("truncation level must be positive, got {}", h)));
    }
    let t = u.map(|s| s.clamp(-h, h));
    let r = ScalarField { dom: u.dom.clone(), values: u.values.iter().zip(&t.values).map(|(s, t)| s - t).collect() };
    Ok((t, r))
}

/// Samples `u ∘ T` on `target` by multilinear interpolation of `u`.
pub fn pullback(u: &ScalarField, t: &LinearMap, target: Arc<GridDomain>) -> Result<ScalarField> {
    t.check_invertible()?;
    if t.dim() != u.dim() || target.dim() != u.dim() {
        return Err(Error::GridMismatch("dimension mismatch in pullback".into()));
    }
    ScalarField::from_fn(target, |x| u.interpolate(&t.apply(x)))
}

/// Radially binned profile of a field about a center.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialProfile {
    pub radii: Vec<f64>,
    pub values: Vec<f64>,
    /// RMS deviation of the nodal values from the interpolated profile,
    /// relative to `max |u|`.
    pub scatter: f64,
}

impl RadialProfile {
    /// Piecewise-linear evaluation, constant beyond the end bins.
    pub fn eval(&self, r: f64) -> f64 {
        let k = self.radii.partition_point(|&x| x < r);
        if k == 0 {
            return self.values[0];
        }
        if k == self.radii.len() {
            return *self.values.last().unwrap();
        }
        let (r0, r1) = (self.radii[k - 1], self.radii[k]);
        let t = (r - r0) / (r1 - r0);
        self.values[k - 1] * (1.0 - t) + self.values[k] * t
    }
}

/// Bins interior nodes by distance from `center` into shells of width `h`.
pub fn radial_profile(u: &ScalarField, center: &Point) -> Result<RadialProfile> {
    let dom = u.domain();
    let dim = dom.dim();
    let h = dom.h();
    let scale = u.max_abs();
    if scale == 0.0 {
        return Err(Error::NotRadial { scatter: f64::INFINITY, threshold: 0.0 });
    }
    let rad = |x: &Point| (0..dim).map(|d| (x[d] - center[d]).powi(2)).sum::<f64>().sqrt();
    let nodes: Vec<(f64, f64)> = (0..dom.num_nodes())
        .filter(|&i| dom.is_inside(i))
        .map(|i| (rad(&dom.node_coords(i)), u.values[i]))
        .collect();
    let rmax = nodes.iter().fold(0.0f64, |m, n| m.max(n.0));
    let nb = (rmax / h).floor() as usize + 1;
    let mut sr = vec![0.0; nb];
    let mut sv = vec![0.0; nb];
    let mut cnt = vec![0usize; nb];
    for &(r, v) in &nodes {
        let b = ((r / h).floor() as usize).min(nb - 1);
        sr[b] += r;
        sv[b] += v;
        cnt[b] += 1;
    }
    let mut radii = Vec::new();
    let mut values = Vec::new();
    for b in 0..nb {
        if cnt[b] > 0 {
            radii.push(sr[b] / cnt[b] as f64);
            values.push(sv[b] / cnt[b] as f64);
        }
    }
    let mut prof = RadialProfile { radii, values, scatter: 0.0 };
    let dev: Vec<f64> = nodes.iter().map(|&(r, v)| (v - prof.eval(r)).powi(2)).collect();
    prof.scatter = (pairwise_sum(&dev) / nodes.len() as f64).sqrt() / scale;
    Ok(prof)
}

/// `a (1 - |M(x - c)|^2 / r^2)_+`, the quadratic bump, optionally through a map `M`.
pub fn quadratic_bump(dom: Arc<GridDomain>, center: &Point, radius: f64, map: Option<&LinearMap>) -> Result<ScalarField> {
    let dim = dom.dim();
    let c = *center;
    let m = map.copied();
    ScalarField::from_fn(dom, move |x| {
        let mut d = [0.0; 3];
        for i in 0..dim {
            d[i] = x[i] - c[i];
        }
        if let Some(m) = &m {
            d = m.apply(&d);
        }
        let s = (0..dim).map(|i| d[i] * d[i]).sum::<f64>() / (radius * radius);
        (1.0 - s).max(0.0)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{build_grid, transform_domain, DomainSpec};
    use std::f64::consts::PI;

    fn disk(h: f64) -> Arc<GridDomain> {
        Arc::new(build_grid(&DomainSpec::unit_ball(2), h).unwrap())
    }

    fn l2_grad(u: &ScalarField) -> f64 {
        let g = gradients(u);
        (g.cell_volume * g.grads.iter().map(|v| v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sum::<f64>()).sqrt()
    }

    #[test]
    fn zero_field_has_zero_gradients() {
        let u = ScalarField::zeros(disk(0.1));
        assert!(gradients(&u).grads.iter().all(|g| *g == [0.0; 3]));
        assert_eq!(lq_norm(&u, 2.0).unwrap(), 0.0);
    }

    #[test]
    fn linear_ramp_is_exact_on_patch() {
        let dom = Arc::new(GridDomain::patch(2, [0.0; 3], 0.1, [6, 5, 1]));
        let u = ScalarField::from_fn(dom.clone(), |x| x[0]).unwrap();
        for g in gradients(&u).grads {
            assert!((g[0] - 1.0).abs() < 1e-12 && g[1].abs() < 1e-12);
        }
        let dom3 = Arc::new(GridDomain::patch(3, [0.0; 3], 0.2, [4, 3, 5]));
        let w = ScalarField::from_fn(dom3, |x| 2.0 * x[0] - x[1] + 0.5 * x[2]).unwrap();
        for g in gradients(&w).grads {
            assert!((g[0] - 2.0).abs() < 1e-12 && (g[1] + 1.0).abs() < 1e-12 && (g[2] - 0.5).abs() < 1e-12);
        }
    }

    #[test]
    fn bump_gradient_and_norm_on_disk() {
        let dom = disk(0.01);
        let u = quadratic_bump(dom, &[0.0; 3], 1.0, None).unwrap();
        let gn = l2_grad(&u);
        assert!((gn / (2.0 * PI).sqrt() - 1.0).abs() < 0.01, "{}", gn);
        let l2 = lq_norm(&u, 2.0).unwrap();
        assert!((l2 / (PI / 3.0).sqrt() - 1.0).abs() < 0.01, "{}", l2);
    }

    #[test]
    fn constant_on_patch_norm() {
        let dom = Arc::new(GridDomain::patch(2, [0.0; 3], 0.25, [5, 5, 1]));
        let u = ScalarField::from_fn(dom, |_| 1.0).unwrap();
        assert!((lq_norm(&u, 3.0).unwrap() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn lq_norm_rejects_small_exponent() {
        let u = ScalarField::zeros(disk(0.2));
        assert!(matches!(lq_norm(&u, 0.5), Err(Error::OutOfRange(_))));
    }

    #[test]
    fn truncation_examples() {
        let u = quadratic_bump(disk(0.05), &[0.0; 3], 1.0, None).unwrap();
        let (t, r) = truncate(&u, 2.0).unwrap();
        assert_eq!(t, u);
        assert!(r.values().iter().all(|&v| v == 0.0));
        let (t, r) = truncate(&u, 0.5).unwrap();
        assert_eq!(t.max(), 0.5);
        assert!((r.max() - 0.5).abs() < 1e-12);
        for ((a, b), c) in t.values().iter().zip(r.values()).zip(u.values()) {
            assert_eq!(a + b, *c);
        }
        assert!(truncate(&u, 0.0).is_err());
    }

    #[test]
    fn pullback_identity_reproduces_values() {
        let dom = disk(0.05);
        let u = quadratic_bump(dom.clone(), &[0.1, -0.2, 0.0], 0.7, None).unwrap();
        let v = pullback(&u, &LinearMap::identity(2), dom).unwrap();
        for (a, b) in u.values().iter().zip(v.values()) {
            assert!((a - b).abs() <= 1e-12);
        }
    }

    #[test]
    fn pullback_shear_keeps_l2_and_scaling_divides_mass() {
        let dom = disk(0.01);
        let u = quadratic_bump(dom.clone(), &[0.0; 3], 1.0, None).unwrap();
        let shear = LinearMap::from_rows(&[vec![1.0, 0.8], vec![0.0, 1.0]]).unwrap();
        let target = Arc::new(transform_domain(&dom, &shear).unwrap());
        let v = pullback(&u, &shear, target).unwrap();
        let (a, b) = (lq_norm(&u, 2.0).unwrap(), lq_norm(&v, 2.0).unwrap());
        assert!((a - b).abs() / a < 0.02);

        let two = LinearMap::scaling(2, 2.0);
        let target = Arc::new(transform_domain(&dom, &two).unwrap());
        let w = pullback(&u, &two, target).unwrap();
        let (m0, m1) = (lq_norm(&u, 1.0).unwrap(), lq_norm(&w, 1.0).unwrap());
        assert!((m1 / m0 - 0.25).abs() < 0.02 * 0.25);
    }

    #[test]
    fn pullback_rejects_singular() {
        let dom = disk(0.1);
        let u = quadratic_bump(dom.clone(), &[0.0; 3], 1.0, None).unwrap();
        assert!(matches!(pullback(&u, &LinearMap::diag(&[1.0, 0.0]), dom), Err(Error::SingularMatrix { .. })));
    }

    #[test]
    fn radial_profile_of_bump_has_small_scatter() {
        let u = quadratic_bump(disk(0.02), &[0.0; 3], 1.0, None).unwrap();
        let prof = radial_profile(&u, &[0.0; 3]).unwrap();
        assert!(prof.scatter < 5e-3, "{}", prof.scatter);
        assert!((prof.eval(0.5) - 0.75).abs() < 0.01);
        let shear = LinearMap::from_rows(&[vec![1.0, 0.8], vec![0.0, 1.0]]).unwrap();
        let v = quadratic_bump(disk(0.02), &[0.0; 3], 1.0, Some(&shear)).unwrap();
        assert!(radial_profile(&v, &[0.0; 3]).unwrap().scatter > 0.05);
        assert!(matches!(radial_profile(&ScalarField::zeros(disk(0.1)), &[0.0; 3]), Err(Error::NotRadial { .. })));
    }

    #[test]
    fn masked_values_are_forced_to_zero() {
        let dom = disk(0.25);
        let u = ScalarField::from_values(dom.clone(), vec![1.0; dom.num_nodes()]).unwrap();
        for i in 0..dom.num_nodes() {
            assert_eq!(u.values()[i] != 0.0, dom.is_inside(i));
        }
        assert!(matches!(ScalarField::from_values(dom.clone(), vec![f64::NAN; dom.num_nodes()]), Err(Error::NonFinite(_))));
        assert!(matches!(ScalarField::from_values(dom, vec![0.0; 3]), Err(Error::GridMismatch(_))));
    }

    #[test]
    fn pow_helpers_match_powf() {
        for &p in &[1.0, 1.5, 1.9, 2.0, 2.5, 3.0, 4.0, 6.0] {
            for &x in &[-2.3, -0.1, 0.0, 0.7, 5.0] {
                let a: f64 = x;
                assert!((pow_abs(x, p) - a.abs().powf(p)).abs() <= 1e-14 * (1.0 + a.abs().powf(p)));
                let s = if x == 0.0 { 0.0 } else { a.signum() * a.abs().powf(p - 1.0) };
                assert!((pow_sign(x, p) - s).abs() <= 1e-14 * (1.0 + s.abs()));
            }
        }
    }
}
