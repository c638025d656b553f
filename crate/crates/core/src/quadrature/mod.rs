//! Direction sets on the unit sphere with weights approximating surface measure.
//!
//! * n = 2: `m` equally spaced angles, each of weight `2π/m`.
//! * n = 3: octahedrally symmetric Lebedev–Laikov rules for the tabulated
//!   sizes (26, 110, 194, 302, 434, 590), otherwise a Gauss–Legendre ×
//!   trapezoid product rule when `m = 2k²`.
//!
//! All rules are closed under `ξ ↦ -ξ` and have strictly positive weights.

mod lebedev_table;

use crate::constants;
use crate::error::{Error, Result};
use crate::geometry::Point;
use std::f64::consts::PI;

/// Default number of directions in the plane.
pub const DEFAULT_M_2D: usize = 128;
/// Default number of directions in space (smallest positive-weight Lebedev
/// rule at or above 266 nodes).
pub const DEFAULT_M_3D: usize = 302;

#[derive(Debug, Clone, Copy)]
enum Orbit {
    A1 { w: f64 },
    A2 { w: f64 },
    A3 { w: f64 },
    B { l: f64, m: f64, w: f64 },
    C { p: f64, q: f64, w: f64 },
    D { r: f64, s: f64, t: f64, w: f64 },
}

/// Which family a direction set came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RuleKind {
    UniformCircle,
    Lebedev,
    ProductGauss,
}

/// Identity of a rule; two sets with equal ids are identical.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RuleId {
    pub dim: usize,
    pub m: usize,
    pub kind: RuleKind,
}

/// Quadrature nodes `ξ_j ∈ S^{n-1}` with positive weights `w_j`.
#[derive(Debug, Clone, PartialEq)]
pub struct DirectionSet {
    id: RuleId,
    directions: Vec<Point>,
    weights: Vec<f64>,
}

impl DirectionSet {
    pub fn id(&self) -> RuleId {
        self.id
    }
    pub fn dim(&self) -> usize {
        self.id.dim
    }
    pub fn len(&self) -> usize {
        self.directions.len()
    }
    pub fn is_empty(&self) -> bool {
        self.directions.is_empty()
    }
    pub fn directions(&self) -> &[Point] {
        &self.directions
    }
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }
    /// `Σ_j w_j`, equal to `nω_n` up to rounding.
    pub fn total_weight(&self) -> f64 {
        crate::summation::pairwise_sum(&self.weights)
    }
}

/// Builds the direction set of size `m` in dimension `n`.
pub fn directions(n: usize, m: usize) -> Result<DirectionSet> {
    let bad = |reason: &str| Err(Error::BadCount { n, m, reason: reason.to_string() });
    match n {
        2 => {
            if m < 4 {
                return bad("at least 4 directions are required");
            }
            if m % 2 != 0 {
                return bad("the circle rule needs an even count to be antipodally closed");
            }
            let w = 2.0 * PI / m as f64;
            let directions = (0..m)
                .map(|j| {
                    let t = 2.0 * PI * j as f64 / m as f64;
                    [t.cos(), t.sin(), 0.0]
                })
                .collect();
            Ok(DirectionSet { id: RuleId { dim: 2, m, kind: RuleKind::UniformCircle }, directions, weights: vec![w; m] })
        }
        3 => {
            if m < 6 {
                return bad("at least 6 directions are required");
            }
            if let Some((_, orbits)) = lebedev_table::TABLE.iter().find(|(size, _)| *size == m) {
                let (dirs, wts) = expand_orbits(orbits);
                debug_assert_eq!(dirs.len(), m);
                return Ok(normalized(RuleId { dim: 3, m, kind: RuleKind::Lebedev }, dirs, wts));
            }
            let k = ((m / 2) as f64).sqrt().round() as usize;
            if k >= 2 && 2 * k * k == m {
                let (dirs, wts) = product_gauss(k);
                return Ok(normalized(RuleId { dim: 3, m, kind: RuleKind::ProductGauss }, dirs, wts));
            }
            let sizes: Vec<String> = lebedev_table::TABLE.iter().map(|(s, _)| s.to_string()).collect();
            bad(&format!("use a tabulated size ({}) or m = 2k² for the product rule", sizes.join(", ")))
        }
        _ => bad("only n = 2 and n = 3 are supported"),
    }
}

/// Default rule for dimension `n`.
pub fn default_directions(n: usize) -> Result<DirectionSet> {
    match n {
        2 => directions(2, DEFAULT_M_2D),
        _ => directions(n, DEFAULT_M_3D),
    }
}

fn normalized(id: RuleId, dirs: Vec<Point>, mut wts: Vec<f64>) -> DirectionSet {
    let area = 4.0 * PI;
    let total = crate::summation::pairwise_sum(&wts);
    for w in wts.iter_mut() {
        *w *= area / total;
    }
    let dirs = dirs
        .into_iter()
        .map(|d| {
            let n = (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt();
            [d[0] / n, d[1] / n, d[2] / n]
        })
        .collect();
    DirectionSet { id, directions: dirs, weights: wts }
}

fn expand_orbits(orbits: &[Orbit]) -> (Vec<Point>, Vec<f64>) {
    let mut dirs = Vec::new();
    let mut wts = Vec::new();
    let mut push_all = |pts: Vec<Point>, w: f64| {
        for p in pts {
            dirs.push(p);
            wts.push(w);
        }
    };
    let h2 = 0.5f64.sqrt();
    let h3 = (1.0f64 / 3.0).sqrt();
    for orbit in orbits {
        match *orbit {
            Orbit::A1 { w } => push_all(signed_perms([1.0, 0.0, 0.0]), w),
            Orbit::A2 { w } => push_all(signed_perms([h2, h2, 0.0]), w),
            Orbit::A3 { w } => push_all(signed_perms([h3, h3, h3]), w),
            Orbit::B { l, m, w } => push_all(signed_perms([l, l, m]), w),
            Orbit::C { p, q, w } => push_all(signed_perms([p, q, 0.0]), w),
            Orbit::D { r, s, t, w } => push_all(signed_perms([r, s, t]), w),
        }
    }
    (dirs, wts)
}

/// All distinct coordinate permutations with all sign choices.
fn signed_perms(v: Point) -> Vec<Point> {
    const PERMS: [[usize; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
    let mut out: Vec<Point> = Vec::new();
    for perm in PERMS {
        for signs in 0..8u32 {
            let mut p = [0.0; 3];
            for i in 0..3 {
                let s = if signs >> i & 1 == 1 { -1.0 } else { 1.0 };
                p[i] = s * v[perm[i]];
            }
            // -0.0 and 0.0 must compare equal when deduplicating
            if !out.iter().any(|q| q.iter().zip(&p).all(|(a, b)| a == b)) {
                out.push(p);
            }
        }
    }
    out
}

fn product_gauss(k: usize) -> (Vec<Point>, Vec<f64>) {
    let (zs, zw) = gauss_legendre(k);
    let nphi = 2 * k;
    let mut dirs = Vec::with_capacity(k * nphi);
    let mut wts = Vec::with_capacity(k * nphi);
    for (z, wz) in zs.iter().zip(&zw) {
        let r = (1.0 - z * z).sqrt();
        for j in 0..nphi {
            let phi = PI * (j as f64 + 0.5) / k as f64;
            dirs.push([r * phi.cos(), r * phi.sin(), *z]);
            wts.push(wz * PI / k as f64);
        }
    }
    (dirs, wts)
}

/// Gauss–Legendre nodes and weights on `[-1, 1]` (Newton iteration on `P_k`).
pub fn gauss_legendre(k: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; k];
    let mut weights = vec![0.0; k];
    for i in 0..k.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (k as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_and_derivative(k, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_and_derivative(k, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[k - 1 - i] = x;
        weights[i] = w;
        weights[k - 1 - i] = w;
    }
    if k % 2 == 1 {
        nodes[k / 2] = 0.0;
    }
    (nodes, weights)
}

fn legendre_and_derivative(k: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if k == 0 {
        return (1.0, 0.0);
    }
    for j in 2..=k {
        let p2 = ((2 * j - 1) as f64 * x * p1 - (j - 1) as f64 * p0) / j as f64;
        p0 = p1;
        p1 = p2;
    }
    let d = k as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// `Σ_j w_j |ξ0 · ξ_j|^p`, the discrete `∫_{S^{n-1}} |ξ0·ξ|^p dσ(ξ)`.
pub fn moment_integral(ds: &DirectionSet, p: f64, xi0: &Point) -> f64 {
    let vals: Vec<f64> = ds
        .directions
        .iter()
        .zip(&ds.weights)
        .map(|(d, w)| {
            let t = (xi0[0] * d[0] + xi0[1] * d[1] + xi0[2] * d[2]).abs();
            w * t.powf(p)
        })
        .collect();
    crate::summation::pairwise_sum(&vals)
}

/// `α_{n,p}` reconstructed from the moment integral of `ds` along `xi0`.
pub fn alpha_from_moment(ds: &DirectionSet, p: f64, xi0: &Point) -> f64 {
    let n = ds.dim() as f64;
    let area = n * constants::omega(n);
    area.powf((n + p) / (n * p)) * moment_integral(ds, p, xi0).powf(-1.0 / p)
}

/// Relative gap between the moment-based and the closed-form `α_{n,p}`.
pub fn alpha_consistency(n: usize, p: f64, m: usize) -> Result<f64> {
    let ds = directions(n, m)?;
    let mut xi0 = [0.0; 3];
    xi0[0] = 1.0;
    let closed = constants::alpha_np(n, p);
    Ok((alpha_from_moment(&ds, p, &xi0) - closed).abs() / closed)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn circle_rule_of_eight() {
        let ds = directions(2, 8).unwrap();
        for (j, (d, w)) in ds.directions().iter().zip(ds.weights()).enumerate() {
            let t = 2.0 * PI * j as f64 / 8.0;
            assert_eq!(d[0], t.cos());
            assert_eq!(d[1], t.sin());
            assert_eq!(*w, 2.0 * PI / 8.0);
        }
    }

    #[test]
    fn total_weights() {
        for m in [4, 8, 64, 128, 1000] {
            let ds = directions(2, m).unwrap();
            assert!((ds.total_weight() - 2.0 * PI).abs() < 1e-13);
        }
        for m in [26, 110, 194, 302, 434, 590, 2 * 12 * 12] {
            let ds = directions(3, m).unwrap();
            assert_eq!(ds.len(), m);
            assert!((ds.total_weight() - 4.0 * PI).abs() < 1e-12, "m = {}", m);
            assert!(ds.weights().iter().all(|&w| w > 0.0));
            for d in ds.directions() {
                let nrm = (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt();
                assert!((nrm - 1.0).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn rules_are_antipodally_closed() {
        for ds in [directions(2, 12).unwrap(), directions(3, 302).unwrap(), directions(3, 72).unwrap()] {
            for (d, w) in ds.directions().iter().zip(ds.weights()) {
                let found = ds.directions().iter().zip(ds.weights()).any(|(e, v)| {
                    (d[0] + e[0]).abs() < 1e-14 && (d[1] + e[1]).abs() < 1e-14 && (d[2] + e[2]).abs() < 1e-14 && (w - v).abs() < 1e-15
                });
                assert!(found);
            }
        }
    }

    #[test]
    fn bad_counts() {
        assert!(matches!(directions(2, 2), Err(Error::BadCount { .. })));
        assert!(matches!(directions(2, 7), Err(Error::BadCount { .. })));
        assert!(matches!(directions(3, 100), Err(Error::BadCount { .. })));
        assert!(matches!(directions(4, 100), Err(Error::BadCount { .. })));
    }

    #[test]
    fn moment_of_cos_squared_on_eight_nodes_is_pi() {
        let ds = directions(2, 8).unwrap();
        let v = moment_integral(&ds, 2.0, &[1.0, 0.0, 0.0]);
        assert!((v - PI).abs() < 1e-15);
        let t: f64 = 0.3;
        let w = moment_integral(&ds, 2.0, &[t.cos(), t.sin(), 0.0]);
        assert!((v - w).abs() < 1e-12);
    }

    #[test]
    fn zeroth_moment_is_total_measure() {
        let ds = directions(3, 110).unwrap();
        assert!((moment_integral(&ds, 0.0, &[0.0, 0.0, 1.0]) - 4.0 * PI).abs() < 1e-12);
    }

    #[test]
    fn lebedev_integrates_low_degree_polynomials() {
        // ∫ x^4 dσ = 4π/5, ∫ x^2 y^2 dσ = 4π/15
        for m in [26, 302, 590] {
            let ds = directions(3, m).unwrap();
            let (mut a, mut b) = (0.0, 0.0);
            for (d, w) in ds.directions().iter().zip(ds.weights()) {
                a += w * d[0].powi(4);
                b += w * d[0].powi(2) * d[1].powi(2);
            }
            assert!((a - 4.0 * PI / 5.0).abs() < 1e-12);
            assert!((b - 4.0 * PI / 15.0).abs() < 1e-12);
        }
    }

    #[test]
    fn gauss_legendre_exact_for_polynomials() {
        let (x, w) = gauss_legendre(7);
        let s: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(12)).sum();
        assert!((s - 2.0 / 13.0).abs() < 1e-14);
        assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-14);
    }

    #[test]
    fn alpha_consistency_examples() {
        assert!(alpha_consistency(2, 2.0, 256).unwrap() <= 1e-12);
        assert!(alpha_consistency(3, 2.0, 590).unwrap() <= 1e-6);
        assert!(alpha_consistency(3, 2.0, 26).unwrap() <= 1e-12);
    }

    #[test]
    fn alpha_consistency_non_integer_exponent() {
        // |cos θ|^{3/2} has kinks at the nodes θ = ±π/2, limiting the
        // circle rule to algebraic convergence of order p + 1.
        let e = alpha_consistency(2, 1.5, 512).unwrap();
        assert!(e <= 4e-7, "error {:e}", e);
        let e3 = alpha_consistency(3, 1.5, 590).unwrap();
        assert!(e3 <= 1e-4, "error {:e}", e3);
        let e19 = alpha_consistency(3, 1.9, DEFAULT_M_3D).unwrap();
        assert!(e19 <= 1e-5, "error {:e}", e19);
    }

    #[test]
    fn circle_rule_convergence_is_monotone_ish() {
        let mut prev = alpha_consistency(2, 1.5, 16).unwrap();
        let mut m = 16;
        while m < 4096 {
            m *= 2;
            let e = alpha_consistency(2, 1.5, m).unwrap();
            assert!(e <= 2.0 * prev, "m = {}: {:e} vs {:e}", m, e, prev);
            prev = e;
        }
        assert!(prev < 1e-7);
    }
}
