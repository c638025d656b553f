//! `key = value` run configuration.

use affine_vlab::constants::critical_exponent;
use affine_vlab::geometry::{DomainSpec, LinearMap};
use affine_vlab::solvers::EnergyKind;
use affine_vlab::verify::{SuiteLevel, DEFAULT_SEED};
use std::collections::BTreeMap;
use std::str::FromStr;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("invalid configuration: {0}")]
    Validation(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Constants,
    Energy,
    Eigen,
    Solve,
    ScanLambda,
    Verify,
    DumpField,
    Heatmap,
}

impl Command {
    pub const ALL: [Command; 8] = [
        Command::Constants,
        Command::Energy,
        Command::Eigen,
        Command::Solve,
        Command::ScanLambda,
        Command::Verify,
        Command::DumpField,
        Command::Heatmap,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Command::Constants => "constants",
            Command::Energy => "energy",
            Command::Eigen => "eigen",
            Command::Solve => "solve",
            Command::ScanLambda => "scan-lambda",
            Command::Verify => "verify",
            Command::DumpField => "dump-field",
            Command::Heatmap => "heatmap",
        }
    }
}

impl FromStr for Command {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        Command::ALL.into_iter().find(|c| c.name() == s).ok_or_else(|| format!("unknown command '{}'", s))
    }
}

/// Where `energy`, `dump-field` and `heatmap` take their field from.
#[derive(Debug, Clone, PartialEq)]
pub enum FieldSource {
    /// Quadratic bump about the domain center.
    Bump,
    /// Band-limited random field from `seed`.
    Random,
    /// Quadratic bump composed with the shear `[[1, s], [0, 1]]`.
    Sheared,
    /// An `affine-field v1` file on the configured grid.
    File(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Option<Command>,
    /// Name of the domain kind as written in the file.
    pub domain_kind: String,
    pub domain: DomainSpec,
    /// The grid covers `map(domain)` when set.
    pub map: Option<LinearMap>,
    pub n: usize,
    pub p: f64,
    pub q: Option<f64>,
    pub lambda: f64,
    /// `(first, last, count)` for `scan-lambda`.
    pub lambda_range: Option<(f64, f64, usize)>,
    pub h: f64,
    pub m: Option<usize>,
    pub energy: EnergyKind,
    /// `None` keeps the solver default (5000 on grids, 50000 radially).
    pub max_iter: Option<usize>,
    pub tol_rel: f64,
    pub grad_tol: f64,
    pub random_starts: usize,
    pub radial_start: bool,
    pub initial_step: f64,
    pub experimental_critical: bool,
    /// Use the 1D radial solver on the ball of radius `radius`.
    pub radial: bool,
    pub intervals: usize,
    pub seed: u64,
    pub suite: SuiteLevel,
    pub source: FieldSource,
    pub bump_radius: Option<f64>,
    pub shear: f64,
    pub out: Option<String>,
    pub timestamp: bool,
}

/// Keys accepted in a config file.
pub const KEYS: [&str; 33] = [
    "command",
    "domain",
    "center",
    "radius",
    "half_axes",
    "vertices",
    "map",
    "n",
    "p",
    "q",
    "lambda",
    "lambda_min",
    "lambda_max",
    "lambda_steps",
    "h",
    "m",
    "energy",
    "max_iter",
    "tol_rel",
    "grad_tol",
    "random_starts",
    "radial_start",
    "initial_step",
    "experimental_critical",
    "radial",
    "intervals",
    "seed",
    "suite",
    "source",
    "field_path",
    "bump_radius",
    "shear",
    "out",
];

const DEFAULT_H: f64 = 1.0 / 32.0;
/// Placeholder exponent for `verify`, whose checks fix their own exponents.
const VERIFY_P: f64 = 1.5;

struct Entries {
    map: BTreeMap<String, (usize, String)>,
}

impl Entries {
    fn take(&mut self, key: &str) -> Option<(usize, String)> {
        self.map.remove(key)
    }

    fn parse<T: FromStr>(&mut self, key: &str) -> Result<Option<T>, ConfigError> {
        match self.take(key) {
            None => Ok(None),
            Some((line, v)) => v
                .parse::<T>()
                .map(Some)
                .map_err(|_| ConfigError::Parse { line, msg: format!("cannot parse {} = '{}'", key, v) }),
        }
    }

    fn list(&mut self, key: &str) -> Result<Option<Vec<f64>>, ConfigError> {
        match self.take(key) {
            None => Ok(None),
            Some((line, v)) => parse_list(&v).map(Some).map_err(|msg| ConfigError::Parse { line, msg: format!("{}: {}", key, msg) }),
        }
    }

    fn rows(&mut self, key: &str) -> Result<Option<Vec<Vec<f64>>>, ConfigError> {
        match self.take(key) {
            None => Ok(None),
            Some((line, v)) => v
                .split(';')
                .map(|r| parse_list(r.trim()))
                .collect::<Result<Vec<_>, _>>()
                .map(Some)
                .map_err(|msg| ConfigError::Parse { line, msg: format!("{}: {}", key, msg) }),
        }
    }
}

fn parse_list(s: &str) -> Result<Vec<f64>, String> {
    s.split(|c: char| c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty())
        .map(|t| t.parse::<f64>().map_err(|_| format!("'{}' is not a number", t)))
        .collect()
}

fn parse_bool(key: &str, line: usize, v: &str) -> Result<bool, ConfigError> {
    match v {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        _ => Err(ConfigError::Parse { line, msg: format!("{} must be true or false, got '{}'", key, v) }),
    }
}

fn lex(text: &str) -> Result<Entries, ConfigError> {
    let mut map = BTreeMap::new();
    for (k, raw) in text.lines().enumerate() {
        let line = k + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let (key, value) = body.split_once('=').ok_or_else(|| ConfigError::Parse { line, msg: format!("expected 'key = value', got '{}'", body) })?;
        let (key, value) = (key.trim(), value.trim());
        if !KEYS.contains(&key) {
            return Err(ConfigError::Parse { line, msg: format!("unknown key '{}'", key) });
        }
        if value.is_empty() {
            return Err(ConfigError::Parse { line, msg: format!("empty value for '{}'", key) });
        }
        if let Some((first, _)) = map.get(key) {
            return Err(ConfigError::Parse { line, msg: format!("duplicate key '{}' (first set on line {})", key, first) });
        }
        map.insert(key.to_string(), (line, value.to_string()));
    }
    Ok(Entries { map })
}

/// Replaces or appends `key = value` lines; overrides win over the file.
pub fn apply_overrides(text: &str, overrides: &[(String, String)]) -> String {
    let keys: Vec<&str> = overrides.iter().map(|(k, _)| k.as_str()).collect();
    let mut out = String::new();
    for raw in text.lines() {
        let body = raw.split('#').next().unwrap_or("");
        let shadowed = body.split_once('=').map_or(false, |(k, _)| keys.contains(&k.trim()));
        // blank the line instead of dropping it so line numbers stay valid
        out.push_str(if shadowed { "" } else { raw });
        out.push('\n');
    }
    for (k, v) in overrides {
        out.push_str(&format!("{} = {}\n", k, v));
    }
    out
}

fn invalid(msg: impl Into<String>) -> ConfigError {
    ConfigError::Validation(msg.into())
}

fn build_domain(kind: &str, n: usize, e: &mut Entries) -> Result<DomainSpec, ConfigError> {
    let center = e.list("center")?;
    let radius = e.parse::<f64>("radius")?;
    let half_axes = e.list("half_axes")?;
    let vertices = e.rows("vertices")?;
    let center_or = |c: Option<Vec<f64>>, d: Vec<f64>| c.unwrap_or(d);
    let spec = match kind {
        "disk" | "ball" => DomainSpec::Ball { center: center_or(center, vec![0.0; n]), radius: radius.unwrap_or(1.0) },
        "square" | "cube" => DomainSpec::Rectangle { center: center_or(center, vec![0.5; n]), half_axes: half_axes.unwrap_or(vec![0.5; n]) },
        "rectangle" | "box" => DomainSpec::Rectangle {
            center: center_or(center, vec![0.0; n]),
            half_axes: half_axes.ok_or_else(|| invalid(format!("domain = {} needs half_axes", kind)))?,
        },
        "ellipse" | "ellipsoid" => DomainSpec::Ellipsoid {
            center: center_or(center, vec![0.0; n]),
            half_axes: half_axes.ok_or_else(|| invalid(format!("domain = {} needs half_axes", kind)))?,
        },
        "polygon" => {
            let rows = vertices.ok_or_else(|| invalid("domain = polygon needs vertices"))?;
            let mut v = Vec::new();
            for r in rows {
                if r.len() != 2 {
                    return Err(invalid("polygon vertices must be 'x y' pairs separated by ';'"));
                }
                v.push([r[0], r[1]]);
            }
            DomainSpec::Polygon { vertices: v }
        }
        "lshape" => DomainSpec::Polygon {
            vertices: vec![[0.0, 0.0], [1.0, 0.0], [1.0, 0.5], [0.5, 0.5], [0.5, 1.0], [0.0, 1.0]],
        },
        _ => return Err(invalid(format!("unknown domain '{}'", kind))),
    };
    if spec.dim() != n {
        return Err(invalid(format!("domain = {} is {}-dimensional but n = {}", kind, spec.dim(), n)));
    }
    spec.validate().map_err(|err| invalid(err.to_string()))?;
    Ok(spec)
}

/// Parses and validates a configuration.
pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    let mut e = lex(text)?;
    let command = match e.take("command") {
        None => None,
        Some((line, v)) => Some(v.parse::<Command>().map_err(|msg| ConfigError::Parse { line, msg })?),
    };
    let explicit_n = e.parse::<usize>("n")?;
    let domain_free = matches!(command, Some(Command::Constants) | Some(Command::Verify));
    let domain_kind = match e.take("domain").map(|(_, v)| v) {
        Some(kind) => kind,
        None if domain_free => if explicit_n == Some(3) { "ball" } else { "disk" }.to_string(),
        None => return Err(invalid("missing required key 'domain'")),
    };
    let implied_n = match domain_kind.as_str() {
        "disk" | "square" | "rectangle" | "ellipse" | "polygon" | "lshape" => Some(2),
        "cube" => Some(3),
        _ => None,
    };
    let n = match (explicit_n, implied_n) {
        (Some(n), Some(d)) if n != d => return Err(invalid(format!("domain = {} is {}-dimensional but n = {}", domain_kind, d, n))),
        (Some(n), _) => n,
        (None, Some(n)) => n,
        (None, None) => return Err(invalid(format!("domain = {} needs n", domain_kind))),
    };
    if !(n == 2 || n == 3) {
        return Err(invalid(format!("n must be 2 or 3, got {}", n)));
    }
    let domain = build_domain(&domain_kind, n, &mut e)?;
    let map = match e.rows("map")? {
        None => None,
        Some(rows) => {
            let m = LinearMap::from_rows(&rows).map_err(|err| invalid(format!("map: {}", err)))?;
            if m.dim() != n {
                return Err(invalid(format!("map is {}x{} but n = {}", m.dim(), m.dim(), n)));
            }
            m.check_invertible().map_err(|err| invalid(format!("map: {}", err)))?;
            Some(m)
        }
    };
    let p = match (e.parse::<f64>("p")?, command) {
        (Some(p), _) => p,
        (None, Some(Command::Verify)) => VERIFY_P,
        (None, _) => return Err(invalid("missing required key 'p'")),
    };
    let q = e.parse::<f64>("q")?;
    let lambda = e.parse::<f64>("lambda")?.unwrap_or(0.0);
    let (lmin, lmax, lsteps) = (e.parse::<f64>("lambda_min")?, e.parse::<f64>("lambda_max")?, e.parse::<usize>("lambda_steps")?);
    let lambda_range = match (lmin, lmax) {
        (None, None) if lsteps.is_none() => None,
        (Some(a), Some(b)) => Some((a, b, lsteps.unwrap_or(10))),
        _ => return Err(invalid("lambda_min and lambda_max must be given together")),
    };
    let energy = match e.take("energy").map(|(_, v)| v).as_deref() {
        None | Some("affine") => EnergyKind::Affine,
        Some("classical") => EnergyKind::Classical,
        Some(other) => return Err(invalid(format!("energy must be affine or classical, got '{}'", other))),
    };
    let mut flag = |key: &str, default: bool| -> Result<bool, ConfigError> {
        match e.take(key) {
            None => Ok(default),
            Some((line, v)) => parse_bool(key, line, &v),
        }
    };
    let radial_start = flag("radial_start", true)?;
    let experimental_critical = flag("experimental_critical", false)?;
    let radial = flag("radial", false)?;
    let suite = match e.take("suite").map(|(_, v)| v).as_deref() {
        None | Some("fast") => SuiteLevel::Fast,
        Some("full") => SuiteLevel::Full,
        Some(other) => return Err(invalid(format!("suite must be fast or full, got '{}'", other))),
    };
    let field_path = e.take("field_path").map(|(_, v)| v);
    let source = match e.take("source").map(|(_, v)| v).as_deref() {
        None | Some("bump") => FieldSource::Bump,
        Some("random") => FieldSource::Random,
        Some("sheared") => FieldSource::Sheared,
        Some("file") => FieldSource::File(field_path.clone().ok_or_else(|| invalid("source = file needs field_path"))?),
        Some(other) => return Err(invalid(format!("source must be bump, random, sheared or file, got '{}'", other))),
    };
    if field_path.is_some() && !matches!(source, FieldSource::File(_)) {
        return Err(invalid("field_path is only used with source = file"));
    }
    let cfg = RunConfig {
        command,
        domain_kind,
        domain,
        map,
        n,
        p,
        q,
        lambda,
        lambda_range,
        h: e.parse("h")?.unwrap_or(DEFAULT_H),
        m: e.parse("m")?,
        energy,
        max_iter: e.parse("max_iter")?,
        tol_rel: e.parse("tol_rel")?.unwrap_or(1e-8),
        grad_tol: e.parse("grad_tol")?.unwrap_or(1e-10),
        random_starts: e.parse("random_starts")?.unwrap_or(5),
        radial_start,
        initial_step: e.parse("initial_step")?.unwrap_or(0.05),
        experimental_critical,
        radial,
        intervals: e.parse("intervals")?.unwrap_or(2000),
        seed: e.parse("seed")?.unwrap_or(DEFAULT_SEED),
        suite,
        source,
        bump_radius: e.parse("bump_radius")?,
        shear: e.parse("shear")?.unwrap_or(0.5),
        out: e.take("out").map(|(_, v)| v),
        timestamp: true,
    };
    debug_assert!(e.map.is_empty(), "unconsumed keys {:?}", e.map.keys());
    cfg.validate()?;
    Ok(cfg)
}

fn fmt_list(v: &[f64]) -> String {
    v.iter().map(|x| format!("{}", x)).collect::<Vec<_>>().join(", ")
}

impl RunConfig {
    /// Checks the parameter ranges for the configured command.
    pub fn validate(&self) -> Result<(), ConfigError> {
        let nf = self.n as f64;
        let p = self.p;
        if !(self.h > 0.0 && self.h.is_finite()) {
            return Err(invalid(format!("h must be positive, got {}", self.h)));
        }
        if !(self.tol_rel > 0.0) {
            return Err(invalid(format!("tol_rel must be positive, got {}", self.tol_rel)));
        }
        if self.random_starts == 0 && !self.radial_start {
            return Err(invalid("random_starts = 0 needs radial_start = true"));
        }
        if self.intervals < 8 {
            return Err(invalid(format!("intervals must be at least 8, got {}", self.intervals)));
        }
        if let Some((a, b, k)) = self.lambda_range {
            if !(a <= b) || k == 0 {
                return Err(invalid(format!("need lambda_min <= lambda_max and lambda_steps >= 1, got {} {} {}", a, b, k)));
            }
        }
        match self.command {
            Some(Command::Energy | Command::DumpField | Command::Heatmap) => {
                if !(p >= 1.0 && p.is_finite()) {
                    return Err(invalid(format!("need p >= 1, got p = {}", p)));
                }
            }
            Some(Command::Eigen | Command::Constants | Command::Verify) => {
                if !(p > 1.0 && p.is_finite()) {
                    return Err(invalid(format!("need p > 1, got p = {}", p)));
                }
            }
            _ => {
                if !(p > 1.0 && p < nf) {
                    return Err(invalid(format!("need 1 < p < n, got p = {} with n = {}", p, self.n)));
                }
            }
        }
        if self.command == Some(Command::ScanLambda) && self.lambda_range.is_none() {
            return Err(invalid("scan-lambda needs lambda_min and lambda_max"));
        }
        let needs_q = matches!(self.command, Some(Command::Solve) | Some(Command::ScanLambda));
        match self.q {
            None if needs_q => return Err(invalid("missing required key 'q'")),
            None => {}
            Some(q) if p < nf => {
                let ps = critical_exponent(self.n, p);
                if !(q > p) {
                    return Err(invalid(format!("need q > p, got q = {} with p = {}", q, p)));
                }
                if q > ps {
                    return Err(invalid(format!("q = {} exceeds p* = np/(n-p) = {}", q, ps)));
                }
                if q == ps && !self.radial && !self.experimental_critical && needs_q {
                    return Err(invalid("q = p* on a grid needs radial = true or experimental_critical = true"));
                }
            }
            Some(_) => {}
        }
        if self.radial && !matches!(self.domain, DomainSpec::Ball { .. }) {
            return Err(invalid("radial = true needs domain = ball or disk"));
        }
        Ok(())
    }

    pub fn out_dir(&self) -> &str {
        self.out.as_deref().unwrap_or("out")
    }

    /// The resolved configuration in the input format, with every default spelled out.
    pub fn to_text(&self) -> String {
        let mut lines: Vec<String> = Vec::new();
        let mut put = |k: &str, v: String| lines.push(format!("{} = {}", k, v));
        if let Some(c) = self.command {
            put("command", c.name().into());
        }
        put("domain", self.domain_kind.clone());
        match &self.domain {
            DomainSpec::Ball { center, radius } => {
                put("center", fmt_list(center));
                put("radius", format!("{}", radius));
            }
            DomainSpec::Rectangle { center, half_axes } | DomainSpec::Ellipsoid { center, half_axes } => {
                put("center", fmt_list(center));
                put("half_axes", fmt_list(half_axes));
            }
            DomainSpec::Polygon { vertices } => {
                if self.domain_kind == "polygon" {
                    let v: Vec<String> = vertices.iter().map(|x| format!("{} {}", x[0], x[1])).collect();
                    put("vertices", v.join("; "));
                }
            }
        }
        if let Some(m) = &self.map {
            let rows: Vec<String> = (0..m.dim()).map(|i| fmt_list(&(0..m.dim()).map(|j| m.entry(i, j)).collect::<Vec<_>>())).collect();
            put("map", rows.join("; "));
        }
        put("n", self.n.to_string());
        put("p", format!("{}", self.p));
        if let Some(q) = self.q {
            put("q", format!("{}", q));
        }
        put("lambda", format!("{}", self.lambda));
        if let Some((a, b, k)) = self.lambda_range {
            put("lambda_min", format!("{}", a));
            put("lambda_max", format!("{}", b));
            put("lambda_steps", k.to_string());
        }
        put("h", format!("{}", self.h));
        if let Some(m) = self.m {
            put("m", m.to_string());
        }
        put(
            "energy",
            match self.energy {
                EnergyKind::Affine => "affine".into(),
                EnergyKind::Classical => "classical".into(),
            },
        );
        if let Some(k) = self.max_iter {
            put("max_iter", k.to_string());
        }
        put("tol_rel", format!("{:e}", self.tol_rel));
        put("grad_tol", format!("{:e}", self.grad_tol));
        put("random_starts", self.random_starts.to_string());
        put("radial_start", self.radial_start.to_string());
        put("initial_step", format!("{}", self.initial_step));
        put("experimental_critical", self.experimental_critical.to_string());
        put("radial", self.radial.to_string());
        put("intervals", self.intervals.to_string());
        put("seed", self.seed.to_string());
        put(
            "suite",
            match self.suite {
                SuiteLevel::Fast => "fast".into(),
                SuiteLevel::Full => "full".into(),
            },
        );
        match &self.source {
            FieldSource::Bump => put("source", "bump".into()),
            FieldSource::Random => put("source", "random".into()),
            FieldSource::Sheared => put("source", "sheared".into()),
            FieldSource::File(path) => {
                put("source", "file".into());
                put("field_path", path.clone());
            }
        }
        if let Some(r) = self.bump_radius {
            put("bump_radius", format!("{}", r));
        }
        put("shear", format!("{}", self.shear));
        if let Some(o) = &self.out {
            put("out", o.clone());
        }
        let mut s = lines.join("\n");
        s.push('\n');
        s
    }
}
