//! Run configuration: a flat text file of `key = value` lines.
//!
//! ```text
//! # geometry
//! n = 3
//! radius = 1.0
//! k_max = 20
//! radii = 0.5, 0.75, 1.0
//! function = gaussian
//! center = 0.3, -0.2, 0.25
//! ```
//!
//! `#` starts a comment. Lists are comma separated. Relative paths are taken
//! from the directory of the config file. See [`KEYS`] for the accepted keys.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use polyharm::harmonics::MAX_BASIS_DEGREE;
use polyharm::interp::MAX_ORDER;
use polyharm::theory::DIVERGENCE_MAX_DEGREE;
use polyharm::ModeIndex;

/// Keys accepted in a config file, with a one-line description.
pub const KEYS: &[(&str, &str)] = &[
    ("n", "ambient dimension (default 3)"),
    ("radius", "ball radius R (default 1)"),
    (
        "order",
        "interpolation order N (default: number of radii, or 3)",
    ),
    ("k_max", "largest harmonic degree (default 8)"),
    (
        "exactness",
        "polynomial exactness of the sphere quadrature (default 3 k_max)",
    ),
    ("knots", "spheres | general (default spheres)"),
    ("radii", "knot sphere radii, ascending"),
    (
        "knot_rule",
        "general knots: clustered | equispaced | list (default clustered)",
    ),
    ("knot_radii", "general knots for knot_rule = list"),
    (
        "knots_file",
        "CSV k,ell,j,r of per-mode knot overrides (general knots)",
    ),
    (
        "function",
        "constant | gaussian | exp-linear | finite-mode | example-geometric | sampled",
    ),
    ("value", "constant: the value (default 1)"),
    ("a", "gaussian: exp(-a |x - center|^2), default 1"),
    ("center", "gaussian: center (default origin)"),
    ("direction", "exp-linear: exp(direction . x)"),
    ("c", "example-geometric: data (C r_j)^k"),
    (
        "all_ell",
        "example-geometric: populate every l of each degree (default false)",
    ),
    (
        "mode.K.L",
        "finite-mode: monomial coefficients in t = r^2 of mode (K, L)",
    ),
    (
        "samples_file",
        "sampled: CSV r,node_index,f_value on the quadrature nodes",
    ),
    (
        "k_tail",
        "smallest degree entering the seminorm maximum (default k_max / 2)",
    ),
    ("n_cheb", "Chebyshev degree of radial profiles (default 32)"),
    ("orders", "orders swept by report-t1 (default: order)"),
    (
        "probe_count",
        "equispaced probe radii on [0, R] for error curves (default 51)",
    ),
    (
        "random_probes",
        "additional uniformly random probe radii (default 0)",
    ),
    ("seed", "seed for random probes (default 0)"),
    (
        "jacobian",
        "weight the ball norm by r^(n-1) (default false)",
    ),
    ("output", "output directory when --out is not given"),
];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigError {
    pub line: Option<usize>,
    pub key: Option<String>,
    pub message: String,
}

impl ConfigError {
    fn at(line: usize, key: &str, message: impl Into<String>) -> Self {
        Self {
            line: Some(line),
            key: Some(key.into()),
            message: message.into(),
        }
    }

    pub fn field(key: &str, message: impl Into<String>) -> Self {
        Self {
            line: None,
            key: Some(key.into()),
            message: message.into(),
        }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.line, &self.key) {
            (Some(line), Some(key)) => {
                write!(f, "config line {line}, key `{key}`: {}", self.message)
            }
            (Some(line), None) => write!(f, "config line {line}: {}", self.message),
            (None, Some(key)) => write!(f, "config key `{key}`: {}", self.message),
            (None, None) => write!(f, "config: {}", self.message),
        }
    }
}

impl std::error::Error for ConfigError {}

type ConfigResult<T> = Result<T, ConfigError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KnotKind {
    Spheres,
    General,
}

#[derive(Debug, Clone, PartialEq)]
pub enum GeneralRule {
    Clustered,
    Equispaced,
    List(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq)]
pub enum FunctionSpec {
    Constant {
        value: f64,
    },
    Gaussian {
        a: f64,
        center: Vec<f64>,
    },
    ExpLinear {
        direction: Vec<f64>,
    },
    FiniteMode {
        profiles: BTreeMap<ModeIndex, Vec<f64>>,
    },
    ExampleGeometric {
        c: f64,
        all_ell: bool,
    },
    Sampled {
        path: PathBuf,
    },
}

impl FunctionSpec {
    pub fn name(&self) -> &'static str {
        match self {
            FunctionSpec::Constant { .. } => "constant",
            FunctionSpec::Gaussian { .. } => "gaussian",
            FunctionSpec::ExpLinear { .. } => "exp-linear",
            FunctionSpec::FiniteMode { .. } => "finite-mode",
            FunctionSpec::ExampleGeometric { .. } => "example-geometric",
            FunctionSpec::Sampled { .. } => "sampled",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub n: usize,
    pub radius: f64,
    pub order: usize,
    /// `order` was set explicitly rather than defaulted.
    pub order_set: bool,
    pub k_max: usize,
    pub exactness: usize,
    pub knots: KnotKind,
    /// Sphere radii; empty for sampled input until filled from the samples.
    pub radii: Vec<f64>,
    pub rule: GeneralRule,
    pub knots_file: Option<PathBuf>,
    pub function: FunctionSpec,
    pub k_tail: usize,
    pub n_cheb: usize,
    pub orders: Vec<usize>,
    pub probe_count: usize,
    pub random_probes: usize,
    pub seed: u64,
    pub jacobian: bool,
    pub output: Option<PathBuf>,
    /// `(key, value)` pairs in file order, as written.
    pub echo: Vec<(String, String)>,
}

struct Entry {
    line: usize,
    value: String,
    used: bool,
}

struct Raw {
    entries: BTreeMap<String, Entry>,
}

impl Raw {
    fn take<T: FromStr>(&mut self, key: &str) -> ConfigResult<Option<T>> {
        let Some(e) = self.entries.get_mut(key) else {
            return Ok(None);
        };
        e.used = true;
        e.value.parse().map(Some).map_err(|_| {
            ConfigError::at(
                e.line,
                key,
                format!("cannot parse `{}` as {}", e.value, type_name::<T>()),
            )
        })
    }

    fn take_list<T: FromStr>(&mut self, key: &str) -> ConfigResult<Option<Vec<T>>> {
        let Some(e) = self.entries.get_mut(key) else {
            return Ok(None);
        };
        e.used = true;
        parse_list(&e.value).map(Some).map_err(|bad| {
            ConfigError::at(
                e.line,
                key,
                format!("cannot parse list item `{bad}` as {}", type_name::<T>()),
            )
        })
    }

    fn take_bool(&mut self, key: &str) -> ConfigResult<Option<bool>> {
        let Some(e) = self.entries.get_mut(key) else {
            return Ok(None);
        };
        e.used = true;
        match e.value.to_ascii_lowercase().as_str() {
            "true" | "yes" | "1" => Ok(Some(true)),
            "false" | "no" | "0" => Ok(Some(false)),
            other => Err(ConfigError::at(
                e.line,
                key,
                format!("expected true or false, got `{other}`"),
            )),
        }
    }

    fn line(&self, key: &str) -> Option<usize> {
        self.entries.get(key).map(|e| e.line)
    }

    fn error(&self, key: &str, message: impl Into<String>) -> ConfigError {
        ConfigError {
            line: self.line(key),
            key: Some(key.into()),
            message: message.into(),
        }
    }
}

fn type_name<T>() -> &'static str {
    let full = std::any::type_name::<T>();
    match full {
        "f64" => "a number",
        "usize" | "u64" => "a non-negative integer",
        _ => full,
    }
}

fn parse_list<T: FromStr>(text: &str) -> Result<Vec<T>, String> {
    if text.trim().is_empty() {
        return Ok(Vec::new());
    }
    text.split(',')
        .map(str::trim)
        .map(|s| s.parse().map_err(|_| s.to_string()))
        .collect()
}

fn is_known(key: &str) -> bool {
    KEYS.iter().any(|(k, _)| *k == key) && key != "mode.K.L" || parse_mode_key(key).is_some()
}

fn parse_mode_key(key: &str) -> Option<ModeIndex> {
    let rest = key.strip_prefix("mode.")?;
    let (k, ell) = rest.split_once('.')?;
    Some(ModeIndex::new(k.parse().ok()?, ell.parse().ok()?))
}

fn resolve(base: &Path, p: &str) -> PathBuf {
    let p = Path::new(p);
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        base.join(p)
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            anyhow::Error::new(e).context(format!("reading config {}", path.display()))
        })?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok(Self::parse(&text, &base)?)
    }

    pub fn parse(text: &str, base: &Path) -> ConfigResult<Self> {
        let mut entries = BTreeMap::new();
        let mut echo = Vec::new();
        for (i, raw_line) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw_line.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (key, value) = content.split_once('=').ok_or_else(|| ConfigError {
                line: Some(line),
                key: None,
                message: format!("expected `key = value`, got `{content}`"),
            })?;
            let (key, value) = (key.trim(), value.trim());
            if !is_known(key) {
                return Err(ConfigError::at(line, key, "unknown key"));
            }
            if let Some(prev) = entries.get(key).map(|e: &Entry| e.line) {
                return Err(ConfigError::at(
                    line,
                    key,
                    format!("duplicate key (first set on line {prev})"),
                ));
            }
            echo.push((key.to_string(), value.to_string()));
            entries.insert(
                key.to_string(),
                Entry {
                    line,
                    value: value.to_string(),
                    used: false,
                },
            );
        }
        let mut raw = Raw { entries };
        let config = Self::build(&mut raw, base, echo)?;
        if let Some((key, e)) = raw.entries.iter().find(|(_, e)| !e.used) {
            return Err(ConfigError::at(
                e.line,
                key,
                format!("not used by function `{}`", config.function.name()),
            ));
        }
        Ok(config)
    }

    fn build(raw: &mut Raw, base: &Path, echo: Vec<(String, String)>) -> ConfigResult<Self> {
        let n: usize = raw.take("n")?.unwrap_or(3);
        if n < 2 {
            return Err(raw.error("n", "dimension must be at least 2"));
        }
        let radius: f64 = raw.take("radius")?.unwrap_or(1.0);
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(raw.error("radius", "must be positive and finite"));
        }
        let k_max: usize = raw.take("k_max")?.unwrap_or(8);
        if k_max > DIVERGENCE_MAX_DEGREE {
            return Err(raw.error("k_max", format!("exceeds the cap {DIVERGENCE_MAX_DEGREE}")));
        }
        let exactness: usize = raw.take("exactness")?.unwrap_or(3 * k_max);
        if exactness < 2 * k_max {
            return Err(raw.error(
                "exactness",
                format!("must be at least 2 k_max = {}", 2 * k_max),
            ));
        }
        let knots = match raw.take::<String>("knots")?.as_deref() {
            None | Some("spheres") => KnotKind::Spheres,
            Some("general") => KnotKind::General,
            Some(other) => {
                return Err(raw.error(
                    "knots",
                    format!("expected spheres or general, got `{other}`"),
                ))
            }
        };
        let radii: Vec<f64> = raw.take_list("radii")?.unwrap_or_default();
        if radii.windows(2).any(|w| !(w[0] < w[1]))
            || radii.iter().any(|r| !(*r >= 0.0) || *r > radius)
        {
            return Err(raw.error(
                "radii",
                format!("must be strictly increasing within [0, {radius}]"),
            ));
        }
        let knot_radii: Option<Vec<f64>> = raw.take_list("knot_radii")?;
        let rule = match raw.take::<String>("knot_rule")?.as_deref() {
            None | Some("clustered") => GeneralRule::Clustered,
            Some("equispaced") => GeneralRule::Equispaced,
            Some("list") => GeneralRule::List(
                knot_radii
                    .clone()
                    .ok_or_else(|| raw.error("knot_rule", "knot_rule = list needs knot_radii"))?,
            ),
            Some(other) => {
                return Err(raw.error(
                    "knot_rule",
                    format!("expected clustered, equispaced or list, got `{other}`"),
                ))
            }
        };
        if knot_radii.is_some() && !matches!(rule, GeneralRule::List(_)) {
            return Err(raw.error("knot_radii", "only used with knot_rule = list"));
        }
        let knots_file = raw.take::<String>("knots_file")?.map(|p| resolve(base, &p));
        if knots == KnotKind::Spheres {
            for key in ["knot_rule", "knot_radii", "knots_file"] {
                if raw.line(key).is_some() {
                    return Err(raw.error(key, "only used with knots = general"));
                }
            }
        } else if raw.line("radii").is_some() {
            return Err(raw.error("radii", "sphere radii are not used with knots = general"));
        }

        let function = Self::function(raw, n, base)?;
        let default_order = match (&rule, knots) {
            (_, KnotKind::Spheres) if !radii.is_empty() => radii.len(),
            (GeneralRule::List(r), KnotKind::General) => r.len(),
            _ => 3,
        };
        let order_set = raw.line("order").is_some();
        let order: usize = raw.take("order")?.unwrap_or(default_order);
        if order == 0 || order > MAX_ORDER {
            return Err(raw.error("order", format!("must lie in 1..={MAX_ORDER}")));
        }
        if knots == KnotKind::Spheres && !radii.is_empty() && order != radii.len() {
            return Err(raw.error(
                "order",
                format!("{order} differs from the number of radii {}", radii.len()),
            ));
        }
        let k_tail: usize = raw.take("k_tail")?.unwrap_or(k_max / 2);
        if k_tail > k_max {
            return Err(raw.error("k_tail", format!("exceeds k_max = {k_max}")));
        }
        let n_cheb: usize = raw.take("n_cheb")?.unwrap_or(32);
        if n_cheb == 0 {
            return Err(raw.error("n_cheb", "must be positive"));
        }
        let orders: Vec<usize> = raw.take_list("orders")?.unwrap_or_else(|| vec![order]);
        if orders.is_empty() || orders.iter().any(|&o| o == 0 || o > MAX_ORDER) {
            return Err(raw.error("orders", format!("every order must lie in 1..={MAX_ORDER}")));
        }
        let probe_count: usize = raw.take("probe_count")?.unwrap_or(51);
        let random_probes: usize = raw.take("random_probes")?.unwrap_or(0);
        if probe_count + random_probes == 0 {
            return Err(raw.error("probe_count", "at least one probe radius is needed"));
        }
        Ok(RunConfig {
            n,
            radius,
            order,
            order_set,
            k_max,
            exactness,
            knots,
            radii,
            rule,
            knots_file,
            function,
            k_tail,
            n_cheb,
            orders,
            probe_count,
            random_probes,
            seed: raw.take("seed")?.unwrap_or(0),
            jacobian: raw.take_bool("jacobian")?.unwrap_or(false),
            output: raw.take::<String>("output")?.map(|p| resolve(base, &p)),
            echo,
        })
    }

    fn function(raw: &mut Raw, n: usize, base: &Path) -> ConfigResult<FunctionSpec> {
        let name: String = raw
            .take("function")?
            .ok_or_else(|| ConfigError::field("function", "missing"))?;
        let vector = |raw: &mut Raw, key: &str| -> ConfigResult<Option<Vec<f64>>> {
            let v: Option<Vec<f64>> = raw.take_list(key)?;
            match v {
                Some(v) if v.len() != n => {
                    Err(raw.error(key, format!("has {} components, expected n = {n}", v.len())))
                }
                v => Ok(v),
            }
        };
        let spec = match name.as_str() {
            "constant" => FunctionSpec::Constant {
                value: raw.take("value")?.unwrap_or(1.0),
            },
            "gaussian" => FunctionSpec::Gaussian {
                a: raw.take("a")?.unwrap_or(1.0),
                center: vector(raw, "center")?.unwrap_or_else(|| vec![0.0; n]),
            },
            "exp-linear" => FunctionSpec::ExpLinear {
                direction: vector(raw, "direction")?
                    .ok_or_else(|| ConfigError::field("direction", "missing"))?,
            },
            "finite-mode" => {
                let keys: Vec<String> = raw
                    .entries
                    .keys()
                    .filter(|k| k.starts_with("mode."))
                    .cloned()
                    .collect();
                let mut profiles = BTreeMap::new();
                for key in keys {
                    let mode = parse_mode_key(&key).expect("checked while reading");
                    if mode.validate(n).is_err() {
                        return Err(
                            raw.error(&key, format!("mode {mode} does not exist for n = {n}"))
                        );
                    }
                    let coeffs: Vec<f64> = raw.take_list(&key)?.unwrap_or_default();
                    profiles.insert(mode, coeffs);
                }
                FunctionSpec::FiniteMode { profiles }
            }
            "example-geometric" => {
                let c: f64 = raw
                    .take("c")?
                    .ok_or_else(|| ConfigError::field("c", "missing"))?;
                if !(c > 0.0) || !c.is_finite() {
                    return Err(raw.error("c", "must be positive"));
                }
                FunctionSpec::ExampleGeometric {
                    c,
                    all_ell: raw.take_bool("all_ell")?.unwrap_or(false),
                }
            }
            "sampled" => {
                let path: String = raw
                    .take("samples_file")?
                    .ok_or_else(|| ConfigError::field("samples_file", "missing"))?;
                FunctionSpec::Sampled {
                    path: resolve(base, &path),
                }
            }
            other => return Err(raw.error("function", format!("unknown function `{other}`"))),
        };
        Ok(spec)
    }

    /// Checks the degree cap of a command (`diverge` allows more).
    pub fn check_degree_cap(&self, cap: usize) -> ConfigResult<()> {
        if self.k_max > cap {
            return Err(ConfigError::field(
                "k_max",
                format!("{} exceeds the cap {cap} for this command", self.k_max),
            ));
        }
        Ok(())
    }

    pub fn check_basis_cap(&self) -> ConfigResult<()> {
        self.check_degree_cap(MAX_BASIS_DEGREE)
    }
}
