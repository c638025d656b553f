//! Acceptance criteria 1–14, one PASS/FAIL line each. Tolerances are pinned
//! below; a failing criterion makes the target exit nonzero.

use affine_vlab::constants::{alpha_np, classical_sobolev_constant, critical_exponent, k_np};
use affine_vlab::energy::{energy, energy_gradient, kernel, psi_cells, superadditivity_check};
use affine_vlab::fields::{gradients, pow_abs, pullback, quadratic_bump, random_field, RandomFieldSpec, ScalarField};
use affine_vlab::geometry::{build_grid, transform_domain, DomainSpec, GridDomain, LinearMap, Point};
use affine_vlab::quadrature::{alpha_consistency, default_directions, DirectionSet, DEFAULT_M_3D};
use affine_vlab::solvers::{
    critical_pohozaev_coefficient, least_energy, pohozaev_residual_profile, principal_eigen, radial_eigenvalue, radial_level,
    radial_scan, witness_value, EnergyKind, RadialOptions, SolveConfig,
};
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;
use std::fs;
use std::path::Path;
use std::process::Command;
use std::sync::Arc;
use std::time::Instant;

const SEED: u64 = 20_240_601;

const TOL_ALPHA_2D: f64 = 1e-12;
const TOL_ALPHA_3D: f64 = 1e-6;
const TOL_CLOSED_FORM: f64 = 1e-12;
const TOL_K_QUOTED: f64 = 1e-5;
const TOL_COMPARISON: f64 = 1e-12;
const TOL_COMPARISON_ANISOTROPIC: f64 = 2e-5;
const TOL_RADIAL: f64 = 0.01;
const TOL_KERNEL: f64 = 1e-10;
const TOL_FD_P2: f64 = 1e-5;
const TOL_FD_P15: f64 = 1e-4;
const TOL_SUPERADDITIVITY: f64 = 1e-8;
const RADIAL_GAP_PER_H: f64 = 2.0;
const TOL_AFFINE_INVARIANCE: f64 = 0.03;
const MIN_CLASSICAL_SPLIT: f64 = 0.55;
const DISK_EIGEN_BOUND: f64 = 5.7832 * 1.02;
const TOL_EL: f64 = 1e-4;
const MIN_POSITIVE_FRACTION: f64 = 0.99;
const TOL_WITNESS_ZERO: f64 = 1e-8;
const CRITICAL_AT_ZERO: f64 = 0.99;
const CRITICAL_BELOW: f64 = 0.98;
const TOL_MONOTONE: f64 = 1e-8;
const TOL_POHOZAEV: f64 = 0.02;

#[derive(Default)]
struct Verdict {
    pass: bool,
    parts: Vec<String>,
}

impl Verdict {
    fn new() -> Self {
        Verdict { pass: true, parts: Vec::new() }
    }

    fn le(&mut self, what: &str, measured: f64, tol: f64) -> &mut Self {
        let ok = measured <= tol;
        self.pass &= ok;
        self.parts.push(format!("{} {:.3e} <= {:.1e}{}", what, measured, tol, if ok { "" } else { " (!)" }));
        self
    }

    fn ge(&mut self, what: &str, measured: f64, bound: f64) -> &mut Self {
        let ok = measured >= bound;
        self.pass &= ok;
        self.parts.push(format!("{} {:.6e} >= {:.4e}{}", what, measured, bound, if ok { "" } else { " (!)" }));
        self
    }

    fn info(&mut self, what: &str, measured: f64) -> &mut Self {
        self.parts.push(format!("{} {:.3e} (info)", what, measured));
        self
    }

    fn holds(&mut self, what: &str, ok: bool) -> &mut Self {
        self.pass &= ok;
        self.parts.push(format!("{} {}", what, if ok { "yes" } else { "no (!)" }));
        self
    }
}

type Outcome = Result<Verdict, String>;

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn e<T, E: std::fmt::Display>(r: Result<T, E>) -> Result<T, String> {
    r.map_err(|x| x.to_string())
}

fn grid(spec: &DomainSpec, h: f64) -> Result<Arc<GridDomain>, String> {
    Ok(Arc::new(e(build_grid(spec, h))?))
}

fn lshape() -> DomainSpec {
    DomainSpec::Polygon { vertices: vec![[0.0, 0.0], [1.0, 0.0], [1.0, 0.5], [0.5, 0.5], [0.5, 1.0], [0.0, 1.0]] }
}

/// 100 seeded fields over the disk, the unit square and the L-shape, plus one quadratic bump per domain.
fn corpus() -> Result<Vec<ScalarField>, String> {
    let specs = [(DomainSpec::unit_ball(2), 2.0 / 48.0, [0.0, 0.0, 0.0], 1.0), (DomainSpec::unit_square(), 1.0 / 48.0, [0.5, 0.5, 0.0], 0.5), (lshape(), 1.0 / 48.0, [0.25, 0.25, 0.0], 0.25)];
    let mut out = Vec::new();
    for (k, (spec, h, c, r)) in specs.iter().enumerate() {
        let dom = grid(spec, *h)?;
        let count = if k == 0 { 34 } else { 33 };
        for j in 0..count {
            let rs = RandomFieldSpec { offset: if j % 3 == 0 { 1.5 } else { 0.0 }, ..RandomFieldSpec::default() };
            out.push(random_field(dom.clone(), &rs, SEED + 1000 * k as u64 + j as u64));
        }
        out.push(e(quadratic_bump(dom, c, *r, None))?);
    }
    Ok(out)
}

fn c1_alpha() -> Outcome {
    let mut v = Verdict::new();
    // α_{2,2} = 2√π, α_{3,2} = √3 (4π)^{1/3}
    v.le("closed form (2,2)", rel(alpha_np(2, 2.0), 2.0 * PI.sqrt()), TOL_CLOSED_FORM);
    v.le("closed form (3,2)", rel(alpha_np(3, 2.0), 3f64.sqrt() * (4.0 * PI).cbrt()), TOL_CLOSED_FORM);
    v.le("quadrature (2,2) m=256", e(alpha_consistency(2, 2.0, 256))?, TOL_ALPHA_2D);
    v.le("quadrature (3,2) Lebedev", e(alpha_consistency(3, 2.0, DEFAULT_M_3D))?, TOL_ALPHA_3D);
    Ok(v)
}

fn c2_sharp_constant() -> Outcome {
    let mut v = Verdict::new();
    let k = e(k_np(3, 2.0))?;
    // Talenti: (π n (n−2))^{-1/2} (Γ(n)/Γ(n/2))^{1/n}, Γ(3) = 2, Γ(3/2) = √π/2
    let talenti = (3.0 * PI).sqrt().recip() * (4.0 / PI.sqrt()).cbrt();
    v.le("vs Talenti", rel(k, talenti), TOL_CLOSED_FORM);
    v.le("vs bubble quotient", rel(k, e(classical_sobolev_constant(3, 2.0))?), TOL_CLOSED_FORM);
    v.le("|K - 0.42727|", (k - 0.42727).abs(), TOL_K_QUOTED);
    Ok(v)
}

fn c3_comparison() -> Outcome {
    let ds = e(default_directions(2))?;
    let fields = corpus()?;
    let mut worst = [f64::NEG_INFINITY; 2];
    for u in fields.iter().take(100) {
        for (slot, p) in [(0, 2.0), (1, 1.5), (1, 3.0)] {
            let r = e(energy(u, &ds, p))?;
            worst[slot] = worst[slot].max((r.energy - r.grad_norm) / r.grad_norm);
        }
    }
    let mut v = Verdict::new();
    v.le("100 fields p=2 max (E-G)/G", worst[0], TOL_COMPARISON);
    v.le("p=1.5,3 max (E-G)/G", worst[1], TOL_COMPARISON_ANISOTROPIC);
    Ok(v)
}

fn c4_radial_equality() -> Outcome {
    let mut v = Verdict::new();
    for (n, h) in [(2, 0.01), (3, 0.04)] {
        let dom = grid(&DomainSpec::unit_ball(n), h)?;
        let u = e(quadratic_bump(dom, &[0.0; 3], 1.0, None))?;
        let ds = e(default_directions(n))?;
        for p in [1.5, 2.0] {
            let r = e(energy(&u, &ds, p))?;
            v.le(&format!("n={} p={} |E - G|/G", n, p), rel(r.energy, r.grad_norm), TOL_RADIAL);
            if p == 2.0 && n == 2 {
                v.le("disk |E - sqrt(2pi)|", rel(r.energy, (2.0 * PI).sqrt()), TOL_RADIAL);
            } else if p == 2.0 {
                v.info("ball |E - sqrt(16pi/5)|", rel(r.energy, (16.0 * PI / 5.0).sqrt()));
            }
        }
    }
    Ok(v)
}

fn c5_kernel() -> Outcome {
    let ds = e(default_directions(2))?;
    let (mut sum_worst, mut weak_worst) = (0.0f64, 0.0f64);
    for u in &corpus()? {
        let g = gradients(u);
        for p in [1.5, 2.0, 3.0] {
            let k = e(kernel(u, &ds, p))?;
            let ep = k.energy.powf(p);
            let s: f64 = g.grads.iter().map(|z| k.hp(z)).sum::<f64>() * g.cell_volume;
            sum_worst = sum_worst.max(rel(s, ep));
            weak_worst = weak_worst.max(rel(e(affine_vlab::energy::weak_form(u, &ds, p, u))?, ep));
        }
    }
    let mut v = Verdict::new();
    v.le("sum vol H^p(grad u) vs E^p", sum_worst, TOL_KERNEL);
    v.le("weak_form(u,u) vs E^p", weak_worst, TOL_KERNEL);
    Ok(v)
}

/// Central difference of `E^p` along the nodal unit vector at `node`, with a
/// step below the nearest sign change of any `ξ_j · ∇u` in the touched cells
/// and the difference summed over those cells only.
fn central_difference(u: &ScalarField, ds: &DirectionSet, p: f64, node: usize, s_max: f64) -> Result<f64, String> {
    let dom = u.domain_arc().clone();
    let g = gradients(u);
    let mut unit = vec![0.0; dom.num_nodes()];
    unit[node] = 1.0;
    let d = gradients(&e(ScalarField::from_values(dom, unit))?);
    let dot = |a: &Point, b: &Point| a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
    let touched: Vec<usize> = (0..d.len()).filter(|&c| d.grads[c] != [0.0; 3]).collect();
    let mut s = s_max;
    for &c in &touched {
        for xi in ds.directions() {
            let (t, de) = (dot(&g.grads[c], xi), dot(&d.grads[c], xi));
            if de != 0.0 {
                s = s.min(0.01 * (t / de).abs());
            }
        }
    }
    let rise = |t: f64, x: f64| pow_abs(t, p) * (p * (x / t).ln_1p()).exp_m1();
    let base = psi_cells(&g, ds, p);
    let a = ds.dim() as f64 / p;
    let (mut lower, mut delta) = (0.0, 0.0);
    for (j, xi) in ds.directions().iter().enumerate() {
        let (mut down, mut diff) = (0.0, 0.0);
        for &c in &touched {
            let (t, de) = (dot(&g.grads[c], xi), dot(&d.grads[c], xi));
            if t != 0.0 {
                down += rise(t, -s * de);
                diff += rise(t, s * de) - rise(t, -s * de);
            }
        }
        let psi_m = base[j] + g.cell_volume * down;
        let w = ds.weights()[j] * psi_m.powf(-a);
        lower += w;
        delta += w * (-a * (g.cell_volume * diff / psi_m).ln_1p()).exp_m1();
    }
    let n = ds.dim() as f64;
    Ok(alpha_np(ds.dim(), p).powf(p) * lower.powf(-p / n) * (-(p / n) * (delta / lower).ln_1p()).exp_m1() / (2.0 * s))
}

fn c6_derivative() -> Outcome {
    let ds = e(default_directions(2))?;
    let dom = grid(&DomainSpec::unit_ball(2), 2.0 / 64.0)?;
    let interior: Vec<usize> = (0..dom.num_nodes()).filter(|&i| dom.is_inside(i)).collect();
    let mut v = Verdict::new();
    for (p, tol) in [(2.0, TOL_FD_P2), (1.5, TOL_FD_P15)] {
        let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 0xACCE);
        let mut worst: f64 = 0.0;
        for k in 0..5 {
            let u = random_field(dom.clone(), &RandomFieldSpec::default(), SEED + 77 + k);
            let g = e(energy_gradient(&u, &ds, p))?;
            let gmax = g.iter().fold(0.0f64, |m, x| m.max(x.abs()));
            for _ in 0..20 {
                let i = interior[rng.gen_range(0..interior.len())];
                let fd = central_difference(&u, &ds, p, i, 1e-5 * u.max_abs())?;
                worst = worst.max((fd - g[i]).abs() / g[i].abs().max(1e-3 * gmax));
            }
        }
        v.le(&format!("p={} 100 nodes", p), worst, tol);
    }
    Ok(v)
}

fn c7_superadditivity() -> Outcome {
    let ds = e(default_directions(2))?;
    let mut worst = f64::INFINITY;
    for u in &corpus()? {
        for p in [1.5, 2.0] {
            for t in [0.25, 0.5] {
                let r = e(superadditivity_check(u, &ds, p, t * u.max_abs()))?;
                worst = worst.min(r.direct_gap);
            }
        }
    }
    let mut v = Verdict::new();
    v.ge("min E^p(u) - E^p(T) - E^p(R)", worst, -TOL_SUPERADDITIVITY);
    let mut scaled = Vec::new();
    for h in [1.0 / 16.0, 1.0 / 32.0, 1.0 / 64.0] {
        let dom = grid(&DomainSpec::unit_ball(2), h)?;
        let u = e(quadratic_bump(dom, &[0.0; 3], 0.8, None))?;
        let mut m: f64 = 0.0;
        for t in [0.25, 0.5] {
            let r = e(superadditivity_check(&u, &ds, 2.0, t))?;
            m = m.max(r.direct_gap.abs() / r.energy_p);
        }
        scaled.push(m * 0.8 / h);
    }
    v.le("radial gap / (h/r)", scaled.iter().copied().fold(0.0, f64::max), RADIAL_GAP_PER_H);
    Ok(v)
}

fn c8_affine_invariance() -> Outcome {
    let h = 1.0 / 32.0;
    let sq = grid(&DomainSpec::unit_square(), h)?;
    // grid over diag(2, 1/2)(square), carrying u ∘ diag(1/2, 2)
    let t = LinearMap::diag(&[0.5, 2.0]);
    let img = Arc::new(e(transform_domain(&sq, &t))?);
    let ds = e(default_directions(2))?;
    let eig = |dom: &Arc<GridDomain>, kind: EnergyKind| {
        let cfg = SolveConfig { energy: kind, seed: SEED, ..SolveConfig::new(dom.clone(), 2.0, 2.0, 0.0) };
        e(principal_eigen(&cfg))
    };
    let sq_eig = eig(&sq, EnergyKind::Affine)?;
    let bump = e(quadratic_bump(sq.clone(), &[0.5, 0.5, 0.0], 0.45, None))?;
    let mut worst: f64 = 0.0;
    for u in [&bump, &sq_eig.eigenfunction] {
        let w = e(pullback(u, &t, img.clone()))?;
        for p in [1.5, 2.0] {
            worst = worst.max(rel(e(energy(&w, &ds, p))?.energy, e(energy(u, &ds, p))?.energy));
        }
    }
    let mut v = Verdict::new();
    v.le("energy rel diff", worst, TOL_AFFINE_INVARIANCE);
    v.le("affine eigen rel diff", rel(eig(&img, EnergyKind::Affine)?.eigenvalue, sq_eig.eigenvalue), TOL_AFFINE_INVARIANCE);
    let classical = rel(eig(&img, EnergyKind::Classical)?.eigenvalue, eig(&sq, EnergyKind::Classical)?.eigenvalue);
    v.ge("classical eigen rel diff", classical, MIN_CLASSICAL_SPLIT);
    Ok(v)
}

/// First zero of `J_0` by Newton's method on its power series.
fn bessel_j0_zero() -> f64 {
    let series = |x: f64| {
        let (mut j0, mut dj0) = (0.0, 0.0);
        let mut term = 1.0;
        for k in 0..40 {
            j0 += term;
            // d/dx of (-1)^k (x/2)^{2k} / (k!)^2
            if k > 0 {
                dj0 += term * 2.0 * k as f64 / x;
            }
            term *= -(x * x / 4.0) / (((k + 1) * (k + 1)) as f64);
        }
        (j0, dj0)
    };
    let mut x = 2.4;
    for _ in 0..50 {
        let (f, df) = series(x);
        x -= f / df;
    }
    x
}

fn c9_disk_eigen() -> Outcome {
    let mut v = Verdict::new();
    let j01 = bessel_j0_zero();
    v.le("j01^2 vs 5.7832", rel(j01 * j01, 5.7832), 1e-5);
    let dom = grid(&DomainSpec::unit_ball(2), 0.02)?;
    let eig = e(principal_eigen(&SolveConfig { seed: SEED, ..SolveConfig::new(dom, 2.0, 2.0, 0.0) }))?;
    v.le("lambda^A", eig.eigenvalue, DISK_EIGEN_BOUND);
    v.le("lambda^A / j01^2 - 1", eig.eigenvalue / (j01 * j01) - 1.0, 0.02);
    v.holds("trace monotone", eig.trace.windows(2).all(|w| w[1] <= w[0]));
    Ok(v)
}

fn c10_subcritical_solve() -> Outcome {
    let dom = grid(&DomainSpec::unit_ball(2), 2.0 / 64.0)?;
    let r = e(least_energy(&SolveConfig { seed: SEED, ..SolveConfig::new(dom, 1.5, 3.0, 0.0) }))?;
    let mut v = Verdict::new();
    v.ge("c_A", r.level, f64::MIN_POSITIVE);
    v.le("EL residual", r.el_residual, TOL_EL);
    v.ge("positive fraction", r.positivity_fraction, MIN_POSITIVE_FRACTION);
    v.holds("nonnegative", r.minimizer.values().iter().all(|x| *x >= 0.0));
    Ok(v)
}

fn c11_witness() -> Outcome {
    let dom = grid(&DomainSpec::unit_ball(2), 1.0 / 12.0)?;
    let cfg = SolveConfig { seed: SEED, tol_rel: 1e-7, ..SolveConfig::new(dom, 1.5, 1.5, 0.0) };
    let eig = e(principal_eigen(&cfg))?;
    let ds = e(default_directions(2))?;
    let l = eig.eigenvalue;
    let w = |lam: f64| e(witness_value(&eig, &ds, 1.5, 3.0, lam));
    let mut v = Verdict::new();
    v.le("|Q| at lambda^A", w(l)?.abs(), TOL_WITNESS_ZERO);
    v.le("Q at lambda^A + 1", w(l + 1.0)?, 0.0);
    v.ge("Q at lambda^A - 1", w(l - 1.0)?, f64::MIN_POSITIVE);
    Ok(v)
}

fn c12_critical_phase() -> Outcome {
    let o = RadialOptions::default();
    let l1 = e(radial_eigenvalue(3, 2.0, &o))?.level;
    let lams: Vec<f64> = (0..10).map(|k| k as f64 / 10.0 * l1).collect();
    let scan = e(radial_scan(3, 2.0, critical_exponent(3, 2.0), &lams, &o))?;
    let s = e(k_np(3, 2.0))?.powi(-2);
    let mut v = Verdict::new();
    v.le("lambda_1 vs pi^2", rel(l1, PI * PI), 1e-3);
    v.ge("level(0) K^2", scan[0].level / s, CRITICAL_AT_ZERO);
    v.le("level(l1/2) K^2", scan[5].level / s, CRITICAL_BELOW);
    let rise = scan.windows(2).map(|w| (w[1].level - w[0].level) / w[0].level).fold(f64::NEG_INFINITY, f64::max);
    v.le("max relative rise over scan", rise, TOL_MONOTONE);
    Ok(v)
}

fn c13_pohozaev() -> Outcome {
    let r = e(radial_level(3, 2.0, 4.0, 0.0, &RadialOptions::default(), None))?;
    let rep = e(pohozaev_residual_profile(&r.radii, &r.rescaled_profile(), 3, 2.0, 4.0, 0.0))?;
    let mut v = Verdict::new();
    v.le("subcritical residual", rep.residual, TOL_POHOZAEV);
    let mut exact = true;
    for (n, p) in [(3, 2.0), (3, 1.5), (2, 1.5), (3, 1.9)] {
        exact &= e(critical_pohozaev_coefficient(n, p))?.is_zero();
    }
    v.holds("(n-p)/p - n/p* == 0 exactly", exact);
    Ok(v)
}

fn cli_run(dir: &Path, out: &str, args: &[&str], stamp: bool) -> Result<(), String> {
    let mut a: Vec<&str> = args.to_vec();
    a.extend(["--out", out]);
    if !stamp {
        a.push("--no-timestamp");
    }
    let o = e(Command::new(env!("CARGO_BIN_EXE_affine-vlab")).current_dir(dir).args(&a).output())?;
    if !o.status.success() {
        return Err(format!("{:?}: {}", args, String::from_utf8_lossy(&o.stderr)));
    }
    Ok(())
}

fn c14_reproducible() -> Outcome {
    let tmp = e(tempfile::TempDir::new())?;
    let dir = tmp.path();
    let runs: [&[&str]; 5] = [
        &["constants", "-s", "n=3", "-s", "p=2"],
        &["energy", "-s", "domain=lshape", "-s", "p=1.5", "-s", "source=random", "-s", "seed=9"],
        &["eigen", "-s", "domain=disk", "-s", "p=2", "-s", "h=0.125"],
        &["solve", "-s", "domain=disk", "-s", "p=1.5", "-s", "q=3", "-s", "h=0.125"],
        &["scan-lambda", "-s", "domain=ball", "-s", "n=3", "-s", "p=2", "-s", "q=6", "-s", "radial=true", "-s", "intervals=400", "-s", "lambda_min=0", "-s", "lambda_max=5", "-s", "lambda_steps=4"],
    ];
    let (mut compared, mut differing) = (0usize, Vec::new());
    for (k, args) in runs.iter().enumerate() {
        let (a, b, c) = (format!("a{}", k), format!("b{}", k), format!("c{}", k));
        cli_run(dir, &a, args, false)?;
        cli_run(dir, &b, args, false)?;
        cli_run(dir, &c, args, true)?;
        for entry in e(fs::read_dir(dir.join(&a)))? {
            let name = e(entry)?.file_name().to_string_lossy().to_string();
            if !(name.ends_with(".csv") || name.ends_with(".field")) {
                continue;
            }
            let read = |d: &str| e(fs::read_to_string(dir.join(d).join(&name)));
            let (x, y, z) = (read(&a)?, read(&b)?, read(&c)?);
            let stripped = if name.ends_with(".csv") { z.split_once('\n').map(|s| s.1.to_string()).unwrap_or_default() } else { z };
            compared += 1;
            if x != y || x != stripped {
                differing.push(format!("{}/{}", args[0], name));
            }
        }
    }
    let mut v = Verdict::new();
    v.holds(&format!("{} files byte-identical", compared), differing.is_empty() && compared > 0);
    if !differing.is_empty() {
        v.parts.push(format!("differ: {}", differing.join(" ")));
    }
    Ok(v)
}

fn main() {
    let criteria: [(u32, &str, fn() -> Outcome); 14] = [
        (1, "alpha identity", c1_alpha),
        (2, "sharp constant", c2_sharp_constant),
        (3, "comparison inequality", c3_comparison),
        (4, "radial equality", c4_radial_equality),
        (5, "kernel identities", c5_kernel),
        (6, "derivative formula", c6_derivative),
        (7, "truncation superadditivity", c7_superadditivity),
        (8, "affine invariance", c8_affine_invariance),
        (9, "disk eigenvalue", c9_disk_eigen),
        (10, "subcritical solve", c10_subcritical_solve),
        (11, "nonexistence witness", c11_witness),
        (12, "critical radial phase", c12_critical_phase),
        (13, "pohozaev", c13_pohozaev),
        (14, "reproducibility", c14_reproducible),
    ];
    let filters: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    let mut ran = 0;
    for (id, name, f) in criteria {
        let label = format!("{:02} {}", id, name);
        if !filters.is_empty() && !filters.iter().any(|p| label.contains(p.as_str())) {
            continue;
        }
        ran += 1;
        let t = Instant::now();
        let outcome = std::panic::catch_unwind(f).unwrap_or_else(|_| Err("panicked".into()));
        let secs = t.elapsed().as_secs_f64();
        match outcome {
            Ok(v) => {
                failed += usize::from(!v.pass);
                println!("{} [{}] {} | {} ({:.1}s)", if v.pass { "PASS" } else { "FAIL" }, id, name, v.parts.join(" | "), secs);
            }
            Err(msg) => {
                failed += 1;
                println!("FAIL [{}] {} | error: {} ({:.1}s)", id, name, msg, secs);
            }
        }
    }
    println!("acceptance: {} criteria, {} failed", ran, failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
