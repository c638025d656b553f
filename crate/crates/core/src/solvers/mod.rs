//! Quotient minimization on grids and on radial profiles: principal
//! eigenvalues, least-energy levels, critical radial levels, `λ_*`,
//! nonexistence witnesses and the Pohozaev residual.

pub mod descent;
pub mod pohozaev;
pub mod precond;
pub mod radial;

pub use descent::{minimize, DescentOptions, DescentOutcome, Quotient};
pub use pohozaev::{critical_pohozaev_coefficient, pohozaev_residual, pohozaev_residual_profile, PohozaevReport};
pub use radial::{radial_critical_level, radial_eigenvalue, radial_level, radial_scan, RadialOptions, RadialResult};

use crate::constants::{critical_exponent, k_np};
use crate::energy::{classical_energy_p_and_gradient_cells, energy_p_and_gradient_cells, kernel_from_psi, psi_cells, weak_form_with_scale};
use crate::error::{Error, Result};
use crate::fields::{gradients, lq_norm_pow, pow_abs, pow_sign, quadratic_bump, random_field, CellGradients, RandomFieldSpec, ScalarField};
use crate::geometry::GridDomain;
use crate::quadrature::{default_directions, directions, DirectionSet};
use crate::summation::pairwise_sum;
use precond::GridLaplacian;
use rayon::prelude::*;
use std::sync::Arc;

/// Which gradient energy enters the quotient.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EnergyKind {
    /// `E^p_{p,Ω}(u)`.
    Affine,
    /// `‖∇u‖_p^p`.
    Classical,
}

/// Number of Euler–Lagrange test fields.
pub const EL_BANK_SIZE: usize = 32;
const EL_BANK_SEED: u64 = 0x00E1_BA4C;

#[derive(Debug, Clone)]
pub struct SolveConfig {
    pub domain: Arc<GridDomain>,
    pub p: f64,
    pub q: f64,
    pub lambda: f64,
    /// Direction count; `None` selects the default rule.
    pub m: Option<usize>,
    pub energy: EnergyKind,
    pub max_iter: usize,
    pub tol_rel: f64,
    pub grad_tol: f64,
    pub random_starts: usize,
    pub radial_start: bool,
    pub seed: u64,
    pub initial_step: f64,
    /// Allows `q = p*` on the full grid.
    pub experimental_critical: bool,
}

impl SolveConfig {
    pub fn new(domain: Arc<GridDomain>, p: f64, q: f64, lambda: f64) -> Self {
        SolveConfig {
            domain,
            p,
            q,
            lambda,
            m: None,
            energy: EnergyKind::Affine,
            max_iter: 5000,
            tol_rel: 1e-8,
            grad_tol: 1e-10,
            random_starts: 5,
            radial_start: true,
            seed: 0,
            initial_step: 0.05,
            experimental_critical: false,
        }
    }

    /// The eigenvalue problem only needs `p > 1`.
    fn check_p(&self) -> Result<()> {
        if !(self.p > 1.0) {
            return Err(Error::OutOfRange(format!("need p > 1, got p = {}", self.p)));
        }
        if !(self.tol_rel > 0.0) {
            return Err(Error::OutOfRange(format!("tol_rel must be positive, got {}", self.tol_rel)));
        }
        if self.random_starts == 0 && !self.radial_start {
            return Err(Error::OutOfRange("no initial guesses requested".into()));
        }
        Ok(())
    }

    fn check_q(&self) -> Result<()> {
        self.check_p()?;
        let n = self.domain.dim() as f64;
        if !(self.p < n) {
            return Err(Error::OutOfRange(format!("need 1 < p < n, got p = {}, n = {}", self.p, n)));
        }
        let ps = critical_exponent(self.domain.dim(), self.p);
        if !(self.q > self.p && self.q <= ps) {
            return Err(Error::OutOfRange(format!("need p < q <= p* = {}, got q = {}", ps, self.q)));
        }
        if self.q == ps && !self.experimental_critical {
            return Err(Error::OutOfRange("q = p* on a grid needs the experimental flag; use the radial solver".into()));
        }
        Ok(())
    }

    pub fn direction_set(&self) -> Result<DirectionSet> {
        match self.m {
            Some(m) => directions(self.domain.dim(), m),
            None => default_directions(self.domain.dim()),
        }
    }

    fn descent_options(&self) -> DescentOptions {
        DescentOptions {
            max_iter: self.max_iter,
            tol_rel: self.tol_rel,
            grad_tol: self.grad_tol,
            initial_step: self.initial_step,
            ..DescentOptions::default()
        }
    }
}

/// `(Σ vol |ū|^r, ∂/∂u_i Σ vol |ū|^r)` from centroid values.
fn norm_pow_and_gradient(dom: &GridDomain, g: &CellGradients, r: f64) -> (f64, Vec<f64>) {
    let terms: Vec<f64> = g.centroid_values.iter().map(|v| pow_abs(*v, r)).collect();
    let val = g.cell_volume * pairwise_sum(&terms);
    let w = g.cell_volume * r / (1usize << dom.dim()) as f64;
    let mut out = vec![0.0; dom.num_nodes()];
    for (cell, v) in dom.cells().iter().zip(&g.centroid_values) {
        let s = w * pow_sign(*v, r);
        for &o in dom.corner_offsets() {
            out[cell.base + o] += s;
        }
    }
    for (i, x) in out.iter_mut().enumerate() {
        if !dom.is_inside(i) {
            *x = 0.0;
        }
    }
    (val, out)
}

/// `Q(u) = (A(u) − λ‖u‖_p^p) / ‖u‖_q^p` on a grid.
pub struct GridQuotient<'a> {
    dom: Arc<GridDomain>,
    ds: &'a DirectionSet,
    kind: EnergyKind,
    p: f64,
    q: f64,
    lambda: f64,
    lap: GridLaplacian,
}

impl<'a> GridQuotient<'a> {
    pub fn new(dom: Arc<GridDomain>, ds: &'a DirectionSet, kind: EnergyKind, p: f64, q: f64, lambda: f64) -> Self {
        let lap = GridLaplacian::new(&dom);
        GridQuotient { dom, ds, kind, p, q, lambda, lap }
    }

    fn field(&self, x: &[f64]) -> Result<ScalarField> {
        ScalarField::from_values(self.dom.clone(), x.to_vec())
    }

    pub fn value(&self, u: &ScalarField) -> Result<f64> {
        let g = gradients(u);
        let a = match self.kind {
            EnergyKind::Affine => crate::energy::energy_from_psi(&psi_cells(&g, self.ds, self.p), self.ds, self.p)?.powf(self.p),
            EnergyKind::Classical => crate::energy::grad_norm_pow(&g, self.p),
        };
        let np = crate::fields::lq_norm_pow_cells(&g, self.p);
        let nq = crate::fields::lq_norm_pow_cells(&g, self.q);
        if !(nq > 0.0) {
            return Err(Error::DegenerateDirection { min_psi: 0.0 });
        }
        Ok((a - self.lambda * np) / nq.powf(self.p / self.q))
    }
}

impl Quotient for GridQuotient<'_> {
    fn eval(&self, x: &[f64]) -> Result<(f64, Vec<f64>)> {
        let u = self.field(x)?;
        let g = gradients(&u);
        let (a, ga) = match self.kind {
            EnergyKind::Affine => energy_p_and_gradient_cells(&self.dom, &g, self.ds, self.p)?,
            EnergyKind::Classical => classical_energy_p_and_gradient_cells(&self.dom, &g, self.p),
        };
        let (np, gnp) = norm_pow_and_gradient(&self.dom, &g, self.p);
        let (nq, gnq) = if self.q == self.p { (np, gnp.clone()) } else { norm_pow_and_gradient(&self.dom, &g, self.q) };
        if !(nq > 0.0) {
            return Err(Error::DegenerateDirection { min_psi: 0.0 });
        }
        let den = nq.powf(self.p / self.q);
        let val = (a - self.lambda * np) / den;
        let c = self.p / self.q * val / nq;
        let grad = (0..x.len()).map(|i| (ga[i] - self.lambda * gnp[i]) / den - c * gnq[i]).collect();
        Ok((val, grad))
    }

    fn norm(&self, x: &[f64]) -> f64 {
        match self.field(x) {
            Ok(u) => lq_norm_pow(&u, self.q).powf(1.0 / self.q),
            Err(_) => f64::NAN,
        }
    }

    fn precondition(&self, g: &[f64]) -> Vec<f64> {
        self.lap.solve(g)
    }

    fn metric(&self, s: &[f64]) -> Vec<f64> {
        self.lap.apply(s)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RestartSummary {
    pub index: usize,
    pub level: f64,
    pub iterations: usize,
    pub converged: bool,
}

struct MultiStart {
    best: DescentOutcome,
    restarts: Vec<RestartSummary>,
}

fn initial_guesses(cfg: &SolveConfig) -> Result<Vec<ScalarField>> {
    let dom = cfg.domain.clone();
    let mut out = Vec::new();
    let spec = RandomFieldSpec { offset: 0.5, ..RandomFieldSpec::default() };
    for k in 0..cfg.random_starts {
        out.push(random_field(dom.clone(), &spec, cfg.seed.wrapping_mul(1_000_003).wrapping_add(k as u64)));
    }
    if cfg.radial_start {
        let dim = dom.dim();
        let mut lo = [0.0; 3];
        let mut hi = [0.0; 3];
        for d in 0..dim {
            lo[d] = dom.origin()[d];
            hi[d] = lo[d] + (dom.shape()[d] - 1) as f64 * dom.h();
        }
        let center = [0.5 * (lo[0] + hi[0]), 0.5 * (lo[1] + hi[1]), 0.5 * (lo[2] + hi[2])];
        let radius = (0..dim).map(|d| 0.5 * (hi[d] - lo[d])).fold(f64::INFINITY, f64::min);
        let mut bump = quadratic_bump(dom.clone(), &center, radius, None)?;
        if bump.max_abs() == 0.0 {
            bump = random_field(dom, &RandomFieldSpec::default(), cfg.seed);
        }
        out.push(bump);
    }
    Ok(out)
}

fn multi_start(cfg: &SolveConfig, quot: &GridQuotient) -> Result<MultiStart> {
    let starts = initial_guesses(cfg)?;
    let opts = cfg.descent_options();
    let outcomes: Vec<Result<DescentOutcome>> = starts.into_par_iter().map(|u| minimize(quot, u.into_values(), &opts)).collect();
    let outcomes: Vec<DescentOutcome> = outcomes.into_iter().collect::<Result<_>>()?;
    let restarts: Vec<RestartSummary> = outcomes
        .iter()
        .enumerate()
        .map(|(index, o)| RestartSummary { index, level: o.level, iterations: o.iterations, converged: o.converged })
        .collect();
    let pick = |only_converged: bool| {
        outcomes
            .iter()
            .enumerate()
            .filter(|(_, o)| o.converged || !only_converged)
            .min_by(|a, b| a.1.level.total_cmp(&b.1.level).then(a.0.cmp(&b.0)))
            .map(|(i, _)| i)
    };
    match pick(true) {
        Some(i) => Ok(MultiStart { best: outcomes[i].clone(), restarts }),
        None => {
            let i = pick(false).expect("at least one start");
            Err(Error::NoConvergence { iterations: outcomes[i].iterations, last_change: outcomes[i].last_change })
        }
    }
}

/// Flips the sign so the field is mostly positive, then takes `|u|`.
fn make_nonnegative(u: ScalarField) -> ScalarField {
    let s: f64 = u.values().iter().sum();
    let u = if s < 0.0 { u.scaled(-1.0) } else { u };
    u.abs()
}

#[derive(Debug, Clone, PartialEq)]
pub struct EigenResult {
    pub eigenvalue: f64,
    /// Nonnegative, `‖φ‖_p = 1`.
    pub eigenfunction: ScalarField,
    pub trace: Vec<f64>,
    pub restarts: Vec<RestartSummary>,
    /// Restarts whose level is within `1e-6` (relative) of the best.
    pub near_best: Vec<usize>,
}

fn near_best(restarts: &[RestartSummary], best: f64) -> Vec<usize> {
    restarts.iter().filter(|r| r.converged && (r.level - best).abs() <= 1e-6 * best.abs()).map(|r| r.index).collect()
}

/// Minimizes `A(u)/‖u‖_p^p`; the `q` and `lambda` fields are ignored.
pub fn principal_eigen(cfg: &SolveConfig) -> Result<EigenResult> {
    cfg.check_p()?;
    let ds = cfg.direction_set()?;
    let quot = GridQuotient::new(cfg.domain.clone(), &ds, cfg.energy, cfg.p, cfg.p, 0.0);
    let ms = multi_start(cfg, &quot)?;
    let u = make_nonnegative(ScalarField::from_values(cfg.domain.clone(), ms.best.x.clone())?);
    let u = u.scaled(1.0 / lq_norm_pow(&u, cfg.p).powf(1.0 / cfg.p));
    let eigenvalue = quot.value(&u)?;
    Ok(EigenResult {
        eigenvalue,
        eigenfunction: u,
        near_best: near_best(&ms.restarts, ms.best.level),
        trace: ms.best.trace,
        restarts: ms.restarts,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveResult {
    /// Nonnegative, `‖u‖_q = 1`.
    pub minimizer: ScalarField,
    /// The least-energy level `c_A`.
    pub level: f64,
    /// `μ_{p,q} = c_A^{1/p}`.
    pub mu: f64,
    /// `c_A^{1/(q-p)} u`, a discrete weak solution of the Euler–Lagrange equation.
    pub rescaled_solution: ScalarField,
    pub el_residual: f64,
    pub trace: Vec<f64>,
    pub positivity_fraction: f64,
    pub positivity_ok: bool,
    pub restarts: Vec<RestartSummary>,
    pub near_best: Vec<usize>,
}

/// `c^{1/(q-p)}`, the factor turning a normalized minimizer into a solution.
pub fn rescale_factor(level: f64, p: f64, q: f64) -> f64 {
    level.powf(1.0 / (q - p))
}

/// Fraction of interior nodes where `u > 0`.
pub fn positivity_fraction(u: &ScalarField) -> f64 {
    let dom = u.domain();
    let (pos, tot) = (0..dom.num_nodes())
        .filter(|&i| dom.is_inside(i))
        .fold((0usize, 0usize), |(a, b), i| (a + (u.values()[i] > 0.0) as usize, b + 1));
    pos as f64 / tot as f64
}

/// Minimizes `(E^p − λ‖u‖_p^p)/‖u‖_q^p`.
pub fn least_energy(cfg: &SolveConfig) -> Result<SolveResult> {
    cfg.check_q()?;
    let ds = cfg.direction_set()?;
    let quot = GridQuotient::new(cfg.domain.clone(), &ds, cfg.energy, cfg.p, cfg.q, cfg.lambda);
    let ms = multi_start(cfg, &quot)?;
    let u = make_nonnegative(ScalarField::from_values(cfg.domain.clone(), ms.best.x.clone())?);
    let u = u.scaled(1.0 / lq_norm_pow(&u, cfg.q).powf(1.0 / cfg.q));
    let level = quot.value(&u)?;
    if !(level > 0.0) {
        return Err(Error::NonPositiveLevel { level });
    }
    let v = u.scaled(rescale_factor(level, cfg.p, cfg.q));
    let el_residual = match cfg.energy {
        EnergyKind::Affine => el_residual(&v, &ds, cfg.p, cfg.q, cfg.lambda)?,
        EnergyKind::Classical => f64::NAN,
    };
    let frac = positivity_fraction(&u);
    Ok(SolveResult {
        minimizer: u,
        level,
        mu: level.powf(1.0 / cfg.p),
        rescaled_solution: v,
        el_residual,
        near_best: near_best(&ms.restarts, ms.best.level),
        trace: ms.best.trace,
        positivity_fraction: frac,
        positivity_ok: frac >= 0.99,
        restarts: ms.restarts,
    })
}

/// The fixed bank of smooth test fields used by [`el_residual`].
pub fn el_test_bank(dom: Arc<GridDomain>) -> Vec<ScalarField> {
    (0..EL_BANK_SIZE as u64).map(|k| random_field(dom.clone(), &RandomFieldSpec::default(), EL_BANK_SEED + k)).collect()
}

/// `max_φ |⟨Δ^A_p v, φ⟩ − ∫ (v^{q-1} + λ v^{p-1}) φ| / scale_φ` over the test bank,
/// where `scale_φ` is the larger of the two sides with every term in absolute value.
pub fn el_residual(v: &ScalarField, ds: &DirectionSet, p: f64, q: f64, lambda: f64) -> Result<f64> {
    let gv = gradients(v);
    let k = kernel_from_psi(&psi_cells(&gv, ds, p), ds, p)?;
    let f: Vec<f64> = gv.centroid_values.iter().map(|&s| pow_sign(s, q) + lambda * pow_sign(s, p)).collect();
    let mut worst: f64 = 0.0;
    for phi in el_test_bank(v.domain_arc().clone()) {
        let gp = gradients(&phi);
        let (lhs, lscale) = weak_form_with_scale(&k, &gv, &gp);
        let rt: Vec<f64> = f.iter().zip(&gp.centroid_values).map(|(a, b)| a * b).collect();
        let ra: Vec<f64> = rt.iter().map(|t| t.abs()).collect();
        let rhs = gv.cell_volume * pairwise_sum(&rt);
        let rscale = gv.cell_volume * pairwise_sum(&ra);
        let scale = lscale.max(rscale);
        if scale > 0.0 {
            worst = worst.max((lhs - rhs).abs() / scale);
        }
    }
    Ok(worst)
}

#[derive(Debug, Clone, PartialEq)]
pub struct LambdaStar {
    pub lambda_star: f64,
    pub eigenvalue: f64,
    /// `‖φ‖_p^p` for the eigenfunction scaled to `‖φ‖_{p*} = 1`.
    pub lp_norm_pow: f64,
    /// `K_{n,p}^{-p}`.
    pub sobolev_level: f64,
}

/// `λ^A − K^{-p} ‖φ‖_p^{-p}` with `φ` renormalized to unit `L^{p*}` norm.
pub fn lambda_star_from(eigenvalue: f64, phi: &ScalarField, p: f64) -> Result<LambdaStar> {
    let n = phi.dim();
    let ps = critical_exponent(n, p);
    let kp = k_np(n, p)?.powf(-p);
    let scale = lq_norm_pow(phi, ps).powf(1.0 / ps);
    if !(scale > 0.0) {
        return Err(Error::DegenerateDirection { min_psi: 0.0 });
    }
    let np = lq_norm_pow(&phi.scaled(1.0 / scale), p);
    Ok(LambdaStar { lambda_star: eigenvalue - kp / np, eigenvalue, lp_norm_pow: np, sobolev_level: kp })
}

pub fn lambda_star(cfg: &SolveConfig) -> Result<LambdaStar> {
    let eig = principal_eigen(cfg)?;
    lambda_star_from(eig.eigenvalue, &eig.eigenfunction, cfg.p)
}

/// `Q(φ)` at the principal eigenfunction scaled to `‖φ‖_q = 1`; equals
/// `(λ^A − λ) ‖φ‖_p^p`.
pub fn witness_value(eig: &EigenResult, ds: &DirectionSet, p: f64, q: f64, lambda: f64) -> Result<f64> {
    let phi = &eig.eigenfunction;
    let phi = phi.scaled(1.0 / lq_norm_pow(phi, q).powf(1.0 / q));
    GridQuotient::new(phi.domain_arc().clone(), ds, EnergyKind::Affine, p, q, lambda).value(&phi)
}

pub fn nonexistence_witness(cfg: &SolveConfig) -> Result<f64> {
    let eig = principal_eigen(cfg)?;
    witness_value(&eig, &cfg.direction_set()?, cfg.p, cfg.q, cfg.lambda)
}
