//! Batch front end: a validated [`RunConfig`] in, CSV tables, field dumps and
//! pixmaps out.

pub mod config;

pub use config::{apply_overrides, parse_config, Command, ConfigError, FieldSource, RunConfig};

use affine_vlab::constants::{classical_sobolev_constant, SharpConstants};
use affine_vlab::energy::{energy, EnergyReport};
use affine_vlab::fields::{quadratic_bump, random_field, read_field, write_field, RandomFieldSpec, ScalarField};
use affine_vlab::geometry::{build_grid, transform_domain, DomainSpec, GridDomain, LinearMap, Point};
use affine_vlab::quadrature::{default_directions, directions, DirectionSet};
use affine_vlab::solvers::{
    least_energy, lambda_star_from, pohozaev_residual_profile, principal_eigen, radial_level, radial_scan, DescentOptions,
    EnergyKind, RadialOptions, RadialResult, RestartSummary, SolveConfig,
};
use affine_vlab::verify::{all_pass, csv_report, run_suite_with, text_report, SuiteOptions};
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::{SystemTime, UNIX_EPOCH};
use thiserror::Error;

pub const EXIT_OK: i32 = 0;
pub const EXIT_IO: i32 = 1;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_VALIDATION: i32 = 3;
pub const EXIT_NUMERIC: i32 = 4;
pub const EXIT_NO_CONVERGENCE: i32 = 5;
pub const EXIT_VERIFY: i32 = 6;

/// File name of the echoed configuration.
pub const RESOLVED_CONFIG: &str = "resolved.conf";

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Core(#[from] affine_vlab::Error),
    #[error("{failed} verification check(s) failed")]
    VerifyFailed { failed: usize },
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{0}")]
    Usage(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        use affine_vlab::Error as E;
        match self {
            CliError::Config(ConfigError::Parse { .. }) => EXIT_PARSE,
            CliError::Config(ConfigError::Validation(_)) => EXIT_VALIDATION,
            CliError::Core(E::FieldFormat { .. }) => EXIT_PARSE,
            CliError::Core(E::OutOfRange(_) | E::InvalidSpec(_) | E::BadCount { .. } | E::UnsupportedShape(_)) => EXIT_VALIDATION,
            CliError::Core(E::NoConvergence { .. }) => EXIT_NO_CONVERGENCE,
            CliError::Core(_) => EXIT_NUMERIC,
            CliError::VerifyFailed { .. } => EXIT_VERIFY,
            CliError::Io { .. } | CliError::Usage(_) => EXIT_IO,
        }
    }
}

/// What a run produced: files written (relative to the output directory)
/// and a short human-readable summary.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunSummary {
    pub out_dir: PathBuf,
    pub files: Vec<String>,
    pub summary: Vec<String>,
}

fn num(x: f64) -> String {
    format!("{:.16e}", x)
}

fn opt_num(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

struct Emitter {
    dir: PathBuf,
    timestamp: Option<u64>,
    files: Vec<String>,
}

impl Emitter {
    fn new(dir: &Path, timestamp: bool) -> Result<Self, CliError> {
        fs::create_dir_all(dir).map_err(|source| CliError::Io { path: dir.display().to_string(), source })?;
        let timestamp = timestamp.then(|| SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0));
        Ok(Emitter { dir: dir.to_path_buf(), timestamp, files: Vec::new() })
    }

    fn write(&mut self, name: &str, body: &str) -> Result<(), CliError> {
        let path = self.dir.join(name);
        fs::write(&path, body).map_err(|source| CliError::Io { path: path.display().to_string(), source })?;
        self.files.push(name.to_string());
        Ok(())
    }

    fn csv(&mut self, name: &str, header: &str, rows: &[String]) -> Result<(), CliError> {
        let mut body = String::new();
        if let Some(t) = self.timestamp {
            body.push_str(&format!("# timestamp {}\n", t));
        }
        body.push_str(header);
        body.push('\n');
        for r in rows {
            body.push_str(r);
            body.push('\n');
        }
        self.write(name, &body)
    }

    fn field(&mut self, name: &str, u: &ScalarField) -> Result<(), CliError> {
        self.write(name, &write_field(u))
    }
}

/// The grid the config describes: `map(domain)` discretized at spacing `h`.
pub fn build_domain(cfg: &RunConfig) -> Result<Arc<GridDomain>, CliError> {
    let base = build_grid(&cfg.domain, cfg.h)?;
    Ok(Arc::new(match &cfg.map {
        None => base,
        Some(m) => transform_domain(&base, &m.inverse()?)?,
    }))
}

fn direction_set(cfg: &RunConfig) -> Result<DirectionSet, CliError> {
    Ok(match cfg.m {
        Some(m) => directions(cfg.n, m)?,
        None => default_directions(cfg.n)?,
    })
}

fn to_point(v: &[f64]) -> Point {
    let mut p = [0.0; 3];
    p[..v.len()].copy_from_slice(v);
    p
}

/// Center and radius of the default bump: the analytic center, or the
/// deepest grid node for polygons.
fn bump_geometry(cfg: &RunConfig) -> Result<(Point, f64), CliError> {
    let center = match &cfg.domain {
        DomainSpec::Ball { center, .. } | DomainSpec::Rectangle { center, .. } | DomainSpec::Ellipsoid { center, .. } => to_point(center),
        DomainSpec::Polygon { .. } => {
            let grid = build_grid(&cfg.domain, cfg.h)?;
            let best = (0..grid.num_nodes())
                .map(|i| grid.node_coords(i))
                .max_by(|a, b| cfg.domain.depth(a).total_cmp(&cfg.domain.depth(b)))
                .ok_or(affine_vlab::Error::EmptyDomain)?;
            best
        }
    };
    let radius = cfg.bump_radius.unwrap_or_else(|| cfg.domain.depth(&center));
    if !(radius > 0.0) {
        return Err(ConfigError::Validation(format!("bump radius must be positive, got {}", radius)).into());
    }
    Ok((center, radius))
}

fn shear_map(n: usize, s: f64) -> LinearMap {
    let mut rows = vec![vec![0.0; n]; n];
    for (i, r) in rows.iter_mut().enumerate() {
        r[i] = 1.0;
    }
    rows[0][1] = s;
    LinearMap::from_rows(&rows).expect("square rows")
}

/// The field selected by `source`, on the configured grid.
pub fn load_field(cfg: &RunConfig, dom: Arc<GridDomain>) -> Result<ScalarField, CliError> {
    let bump = |extra: Option<LinearMap>, shrink: f64| -> Result<ScalarField, CliError> {
        let (c, r) = bump_geometry(cfg)?;
        // pull the bump forward through the map so it lives on map(domain)
        let (c, inv) = match &cfg.map {
            None => (c, None),
            Some(m) => (m.apply(&c), Some(m.inverse()?)),
        };
        let map = match (inv, extra) {
            (None, None) => None,
            (Some(a), None) => Some(a),
            (None, Some(b)) => Some(b),
            (Some(a), Some(b)) => Some(b.compose(&a)),
        };
        Ok(quadratic_bump(dom.clone(), &c, shrink * r, map.as_ref())?)
    };
    match &cfg.source {
        FieldSource::Bump => bump(None, 1.0),
        FieldSource::Sheared => bump(Some(shear_map(cfg.n, cfg.shear)), 0.6),
        FieldSource::Random => Ok(random_field(dom.clone(), &RandomFieldSpec::default(), cfg.seed)),
        FieldSource::File(path) => {
            let text = fs::read_to_string(path).map_err(|source| CliError::Io { path: path.clone(), source })?;
            Ok(read_field(&text, dom)?)
        }
    }
}

fn solve_config(cfg: &RunConfig, dom: Arc<GridDomain>, q: f64, lambda: f64) -> SolveConfig {
    let base = SolveConfig::new(dom, cfg.p, q, lambda);
    SolveConfig {
        m: cfg.m,
        energy: cfg.energy,
        max_iter: cfg.max_iter.unwrap_or(base.max_iter),
        tol_rel: cfg.tol_rel,
        grad_tol: cfg.grad_tol,
        random_starts: cfg.random_starts,
        radial_start: cfg.radial_start,
        seed: cfg.seed,
        initial_step: cfg.initial_step,
        experimental_critical: cfg.experimental_critical,
        ..base
    }
}

fn radial_options(cfg: &RunConfig) -> Result<RadialOptions, CliError> {
    let radius = match &cfg.domain {
        DomainSpec::Ball { radius, .. } => *radius,
        _ => return Err(ConfigError::Validation("radial = true needs domain = ball or disk".into()).into()),
    };
    let base = RadialOptions::default();
    Ok(RadialOptions {
        intervals: cfg.intervals,
        radius,
        descent: DescentOptions {
            max_iter: cfg.max_iter.unwrap_or(base.descent.max_iter),
            tol_rel: cfg.tol_rel,
            grad_tol: cfg.grad_tol,
            initial_step: cfg.initial_step,
            ..base.descent
        },
    })
}

fn trace_rows(trace: &[f64]) -> Vec<String> {
    trace.iter().enumerate().map(|(k, v)| format!("{},{}", k, num(*v))).collect()
}

fn restart_rows(r: &[RestartSummary]) -> Vec<String> {
    r.iter().map(|s| format!("{},{},{},{}", s.index, num(s.level), s.iterations, s.converged)).collect()
}

fn energy_name(k: EnergyKind) -> &'static str {
    match k {
        EnergyKind::Affine => "affine",
        EnergyKind::Classical => "classical",
    }
}

fn run_constants(cfg: &RunConfig, out: &mut Emitter, s: &mut Vec<String>) -> Result<(), CliError> {
    let c = SharpConstants::new(cfg.n, cfg.p);
    let classical = classical_sobolev_constant(cfg.n, cfg.p).ok();
    let row = format!(
        "{},{},{},{},{},{},{},{}",
        cfg.n,
        num(cfg.p),
        num(c.alpha_np),
        opt_num(c.k_np),
        num(c.p_star),
        opt_num(c.mu_critical()),
        opt_num(c.sobolev_level()),
        opt_num(classical)
    );
    out.csv("constants.csv", "n,p,alpha_np,k_np,p_star,mu_critical,sobolev_level,classical_sobolev_constant", &[row])?;
    s.push(format!("alpha_np = {}", num(c.alpha_np)));
    s.push(format!("k_np = {}", opt_num(c.k_np)));
    Ok(())
}

fn run_energy(cfg: &RunConfig, out: &mut Emitter, s: &mut Vec<String>) -> Result<(), CliError> {
    let dom = build_domain(cfg)?;
    let u = load_field(cfg, dom)?;
    let ds = direction_set(cfg)?;
    let rep: EnergyReport = energy(&u, &ds, cfg.p)?;
    out.csv("energy.csv", EnergyReport::CSV_HEADER, &[rep.csv_row()])?;
    let rows: Vec<String> = ds
        .directions()
        .iter()
        .zip(ds.weights())
        .zip(&rep.psi)
        .enumerate()
        .map(|(j, ((xi, w), psi))| {
            let xs: Vec<String> = xi[..cfg.n].iter().map(|v| num(*v)).collect();
            format!("{},{},{},{}", j, xs.join(","), num(*w), num(*psi))
        })
        .collect();
    let header = if cfg.n == 2 { "j,xi_x,xi_y,weight,psi" } else { "j,xi_x,xi_y,xi_z,weight,psi" };
    out.csv("psi.csv", header, &rows)?;
    s.push(format!("E = {}", num(rep.energy)));
    s.push(format!("grad_norm = {}", num(rep.grad_norm)));
    Ok(())
}

fn run_eigen(cfg: &RunConfig, out: &mut Emitter, s: &mut Vec<String>) -> Result<(), CliError> {
    let dom = build_domain(cfg)?;
    let sc = solve_config(cfg, dom.clone(), cfg.p, 0.0);
    let eig = principal_eigen(&sc)?;
    let star = if cfg.p < cfg.n as f64 { Some(lambda_star_from(eig.eigenvalue, &eig.eigenfunction, cfg.p)?) } else { None };
    let row = format!(
        "{},{},{},{},{},{},{},{}",
        cfg.n,
        num(cfg.p),
        energy_name(cfg.energy),
        num(cfg.h),
        dom.num_inside(),
        num(eig.eigenvalue),
        opt_num(star.as_ref().map(|l| l.lambda_star)),
        eig.near_best.len()
    );
    out.csv("eigen.csv", "n,p,energy,h,nodes,eigenvalue,lambda_star,near_best", &[row])?;
    out.csv("trace.csv", "iteration,level", &trace_rows(&eig.trace))?;
    out.csv("restarts.csv", "index,level,iterations,converged", &restart_rows(&eig.restarts))?;
    out.field("eigenfunction.field", &eig.eigenfunction)?;
    s.push(format!("eigenvalue = {}", num(eig.eigenvalue)));
    if let Some(l) = star {
        s.push(format!("lambda_star = {}", num(l.lambda_star)));
    }
    Ok(())
}

fn radial_row(r: &RadialResult, sobolev: Option<f64>) -> String {
    let below = sobolev.map(|k| (r.level < k).to_string()).unwrap_or_default();
    format!("{},{},{},{},{}", num(r.lambda), num(r.level), below, r.iterations, r.converged)
}

fn run_solve(cfg: &RunConfig, out: &mut Emitter, s: &mut Vec<String>) -> Result<(), CliError> {
    let q = cfg.q.expect("validated");
    if cfg.radial {
        let r = radial_level(cfg.n, cfg.p, q, cfg.lambda, &radial_options(cfg)?, None)?;
        let v = r.rescaled_profile();
        let poh = pohozaev_residual_profile(&r.radii, &v, cfg.n, cfg.p, q, cfg.lambda)?;
        let row = format!(
            "{},{},{},{},{},{},{},{}",
            cfg.n,
            num(cfg.p),
            num(q),
            num(cfg.lambda),
            num(r.level),
            num(r.level.powf(1.0 / cfg.p)),
            num(poh.residual),
            r.converged
        );
        out.csv("solve.csv", "n,p,q,lambda,level,mu,pohozaev_residual,converged", &[row])?;
        let rows: Vec<String> = r.radii.iter().zip(&r.profile).zip(&v).map(|((x, a), b)| format!("{},{},{}", num(*x), num(*a), num(*b))).collect();
        out.csv("profile.csv", "r,minimizer,solution", &rows)?;
        out.csv("trace.csv", "iteration,level", &trace_rows(&r.trace))?;
        s.push(format!("level = {}", num(r.level)));
        s.push(format!("pohozaev_residual = {}", num(poh.residual)));
        return Ok(());
    }
    let dom = build_domain(cfg)?;
    let res = least_energy(&solve_config(cfg, dom, q, cfg.lambda))?;
    let row = format!(
        "{},{},{},{},{},{},{},{},{},{}",
        cfg.n,
        num(cfg.p),
        num(q),
        num(cfg.lambda),
        num(cfg.h),
        num(res.level),
        num(res.mu),
        num(res.el_residual),
        num(res.positivity_fraction),
        res.positivity_ok
    );
    out.csv("solve.csv", "n,p,q,lambda,h,level,mu,el_residual,positivity_fraction,positivity_ok", &[row])?;
    out.csv("trace.csv", "iteration,level", &trace_rows(&res.trace))?;
    out.csv("restarts.csv", "index,level,iterations,converged", &restart_rows(&res.restarts))?;
    out.field("minimizer.field", &res.minimizer)?;
    out.field("solution.field", &res.rescaled_solution)?;
    s.push(format!("level = {}", num(res.level)));
    s.push(format!("el_residual = {}", num(res.el_residual)));
    Ok(())
}

/// `count` evenly spaced values from `a` to `b`.
pub fn lambda_grid(a: f64, b: f64, count: usize) -> Vec<f64> {
    if count == 1 {
        return vec![a];
    }
    (0..count).map(|k| a + (b - a) * k as f64 / (count - 1) as f64).collect()
}

fn run_scan(cfg: &RunConfig, out: &mut Emitter, s: &mut Vec<String>) -> Result<(), CliError> {
    let q = cfg.q.expect("validated");
    let (a, b, k) = cfg.lambda_range.expect("validated");
    let lambdas = lambda_grid(a, b, k);
    let sobolev = SharpConstants::new(cfg.n, cfg.p).sobolev_level();
    let rows: Vec<String> = if cfg.radial {
        radial_scan(cfg.n, cfg.p, q, &lambdas, &radial_options(cfg)?)?.iter().map(|r| radial_row(r, sobolev)).collect()
    } else {
        let dom = build_domain(cfg)?;
        let mut rows = Vec::new();
        for &l in &lambdas {
            let r = least_energy(&solve_config(cfg, dom.clone(), q, l))?;
            let below = sobolev.map(|k| (r.level < k).to_string()).unwrap_or_default();
            let iters: usize = r.restarts.iter().map(|x| x.iterations).sum();
            rows.push(format!("{},{},{},{},{}", num(l), num(r.level), below, iters, r.restarts.iter().any(|x| x.converged)));
        }
        rows
    };
    out.csv("scan.csv", "lambda,level,below_K_threshold,iterations,converged", &rows)?;
    s.push(format!("{} scan points", rows.len()));
    if let Some(k) = sobolev {
        s.push(format!("sobolev_level = {}", num(k)));
    }
    Ok(())
}

fn run_verify(cfg: &RunConfig, out: &mut Emitter, s: &mut Vec<String>) -> Result<bool, CliError> {
    let reports = run_suite_with(&SuiteOptions::new(cfg.suite, cfg.seed));
    let csv = csv_report(&reports);
    let mut lines = csv.lines();
    let header = lines.next().unwrap_or_default().to_string();
    let rows: Vec<String> = lines.map(str::to_string).collect();
    out.csv("verify.csv", &header, &rows)?;
    let text = text_report(&reports);
    out.write("verify.txt", &text)?;
    s.extend(text.lines().map(str::to_string));
    Ok(all_pass(&reports))
}

fn run_dump(cfg: &RunConfig, out: &mut Emitter, s: &mut Vec<String>) -> Result<(), CliError> {
    let u = load_field(cfg, build_domain(cfg)?)?;
    out.field("field.field", &u)?;
    s.push(format!("max |u| = {}", num(u.max_abs())));
    Ok(())
}

/// Plain-text grayscale pixmap of `u`, min–max normalized; rows run from the
/// top of the grid (largest y) down. 3-D fields show the middle z-slice.
pub fn heatmap_pgm(u: &ScalarField) -> String {
    let dom = u.domain();
    let [nx, ny, nz] = dom.shape();
    let k = nz / 2;
    let at = |i: usize, j: usize| u.values()[dom.node_index([i, j, if dom.dim() == 3 { k } else { 0 }])];
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for j in 0..ny {
        for i in 0..nx {
            lo = lo.min(at(i, j));
            hi = hi.max(at(i, j));
        }
    }
    let span = if hi > lo { hi - lo } else { 1.0 };
    let mut s = format!("P2\n{} {}\n255\n", nx, ny);
    for j in (0..ny).rev() {
        let row: Vec<String> = (0..nx).map(|i| (((at(i, j) - lo) / span * 255.0).round() as u32).min(255).to_string()).collect();
        s.push_str(&row.join(" "));
        s.push('\n');
    }
    s
}

fn run_heatmap(cfg: &RunConfig, out: &mut Emitter, s: &mut Vec<String>) -> Result<(), CliError> {
    let u = load_field(cfg, build_domain(cfg)?)?;
    out.write("heatmap.pgm", &heatmap_pgm(&u))?;
    let [nx, ny, _] = u.domain().shape();
    s.push(format!("{} x {} pixels", nx, ny));
    Ok(())
}

/// Runs the configured command, writing into `cfg.out_dir()`.
pub fn run(cfg: &RunConfig) -> Result<RunSummary, CliError> {
    let command = cfg.command.ok_or_else(|| ConfigError::Validation("no command given".into()))?;
    let dir = PathBuf::from(cfg.out_dir());
    let mut out = Emitter::new(&dir, cfg.timestamp)?;
    out.write(RESOLVED_CONFIG, &cfg.to_text())?;
    let mut summary = Vec::new();
    let mut verified = true;
    match command {
        Command::Constants => run_constants(cfg, &mut out, &mut summary)?,
        Command::Energy => run_energy(cfg, &mut out, &mut summary)?,
        Command::Eigen => run_eigen(cfg, &mut out, &mut summary)?,
        Command::Solve => run_solve(cfg, &mut out, &mut summary)?,
        Command::ScanLambda => run_scan(cfg, &mut out, &mut summary)?,
        Command::Verify => verified = run_verify(cfg, &mut out, &mut summary)?,
        Command::DumpField => run_dump(cfg, &mut out, &mut summary)?,
        Command::Heatmap => run_heatmap(cfg, &mut out, &mut summary)?,
    }
    let result = RunSummary { out_dir: dir, files: out.files, summary };
    if !verified {
        let failed = result.summary.iter().filter(|l| l.starts_with("FAIL")).count();
        eprintln!("{}", result.summary.join("\n"));
        return Err(CliError::VerifyFailed { failed });
    }
    Ok(result)
}

/// Applies `AFFINE_VLAB_THREADS` to the global worker pool.
pub fn init_threads() -> Result<(), CliError> {
    match std::env::var("AFFINE_VLAB_THREADS") {
        Err(_) => Ok(()),
        Ok(v) => {
            let n: usize = v.trim().parse().ok().filter(|n| *n > 0).ok_or_else(|| CliError::Usage(format!("AFFINE_VLAB_THREADS must be a positive integer, got '{}'", v)))?;
            rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| CliError::Usage(e.to_string()))
        }
    }
}
