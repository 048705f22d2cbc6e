//! Run configuration: flat `key = value` lines with `#` comments.
//!
//! Unknown and repeated keys are errors, so a typo cannot silently fall back
//! to a default.

use std::collections::BTreeSet;
use std::path::PathBuf;
use std::str::FromStr;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConfigError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("line {line}: unknown key `{key}`")]
    UnknownKey { line: usize, key: String },
    #[error("line {line}: key `{key}` given twice")]
    DuplicateKey { line: usize, key: String },
    #[error("key `{key}`: {msg}")]
    Value { key: String, msg: String },
    #[error("missing required key `{0}`")]
    Missing(&'static str),
    #[error("{0}")]
    Invalid(String),
}

/// Which graph `build`, `kernel` and `verify` operate on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Target {
    /// The full lattice `Z^d`.
    Lattice,
    HalfEven,
    HalfOdd,
    ClampedEven,
    ClampedOdd,
    Glued,
}

impl FromStr for Target {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "zd" => Target::Lattice,
            "h_even" => Target::HalfEven,
            "h_odd" => Target::HalfOdd,
            "f_even" => Target::ClampedEven,
            "f_odd" => Target::ClampedOdd,
            "glued" => Target::Glued,
            _ => return Err(format!("unknown target `{s}` (zd, h_even, h_odd, f_even, f_odd, glued)")),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Check {
    Delmotte,
    Volume,
    Poincare,
    Smoothing,
    Nk,
}

impl FromStr for Check {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "delmotte" => Check::Delmotte,
            "volume" => Check::Volume,
            "poincare" => Check::Poincare,
            "smoothing" => Check::Smoothing,
            "nk" => Check::Nk,
            _ => return Err(format!("unknown check `{s}`")),
        })
    }
}

/// PASS thresholds of the verification suite.
#[derive(Debug, Clone, PartialEq)]
pub struct Thresholds {
    /// Bound on `C/c` of the diagonal fit.
    pub delmotte: f64,
    /// Bound on `|B(2r)|/|B(r)|`; `None` means `1.5 * 2^d`.
    pub volume: Option<f64>,
    /// Allowed spread (max/min) of the Poincaré constant across radii.
    pub poincare: f64,
    /// Allowed spread of the smoothing constant across the judged times.
    pub smoothing: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Self { delmotte: 3.0, volume: None, poincare: 2.0, smoothing: 2.0 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub d: usize,
    pub s: usize,
    /// Induction rounds for `schedule`, counting the seed scale.
    pub scales: usize,
    /// Explicit periods; bypasses the induction.
    pub periods: Option<Vec<u64>>,
    /// Schedule file to read instead of inducting.
    pub schedule: Option<PathBuf>,
    pub box_radius: usize,
    pub t_max: usize,
    pub a_seed: u64,
    pub gamma_cap: Option<u64>,
    /// Estimation passes per induction round.
    pub passes: usize,
    pub delta_override: Option<f64>,
    pub glue_segment: Option<usize>,
    pub mirror_halves: bool,
    pub factor: f64,
    pub output_dir: PathBuf,
    pub allow_approximate: bool,
    pub max_vertices: usize,
    pub target: Target,
    pub d_eff: Option<usize>,
    pub checks: Vec<Check>,
    pub thresholds: Thresholds,
    pub window: Option<(usize, usize)>,
    pub radii: Vec<usize>,
    pub times: Vec<usize>,
    pub probe_seed: u64,
    pub decompose_gamma: usize,
}

impl RunConfig {
    /// Defaults for everything except `d` and `s`.
    pub fn new(d: usize, s: usize) -> Self {
        Self {
            d,
            s,
            scales: 1,
            periods: None,
            schedule: None,
            box_radius: 101,
            t_max: 100,
            a_seed: crate::schedule::DEFAULT_SEED,
            gamma_cap: None,
            passes: 1,
            delta_override: None,
            glue_segment: None,
            mirror_halves: false,
            factor: 3.0,
            output_dir: PathBuf::from("out"),
            allow_approximate: false,
            max_vertices: 20_000_000,
            target: Target::Glued,
            d_eff: None,
            checks: vec![Check::Delmotte, Check::Volume, Check::Poincare, Check::Smoothing],
            thresholds: Thresholds::default(),
            window: None,
            radii: vec![4, 8, 16],
            times: vec![100, 200, 400],
            probe_seed: 0x5eed,
            decompose_gamma: 1,
        }
    }

    pub fn d_eff(&self) -> usize {
        self.d_eff.unwrap_or(self.d)
    }

    pub fn volume_threshold(&self) -> f64 {
        self.thresholds.volume.unwrap_or(1.5 * 2f64.powi(self.d as i32))
    }

    /// Delmotte window, defaulting to `[min(10, T), T]`.
    pub fn window(&self) -> (usize, usize) {
        self.window.unwrap_or((10.min(self.t_max), self.t_max))
    }

    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut seen = BTreeSet::new();
        let mut pairs = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw.split('#').next().unwrap().trim();
            if content.is_empty() {
                continue;
            }
            let (k, v) = content
                .split_once('=')
                .ok_or_else(|| ConfigError::Syntax { line, msg: format!("expected `key = value`, found `{content}`") })?;
            let (k, v) = (k.trim().to_string(), v.trim().to_string());
            if k.is_empty() {
                return Err(ConfigError::Syntax { line, msg: "empty key".into() });
            }
            if !KEYS.contains(&k.as_str()) {
                return Err(ConfigError::UnknownKey { line, key: k });
            }
            if !seen.insert(k.clone()) {
                return Err(ConfigError::DuplicateKey { line, key: k });
            }
            pairs.push((k, v));
        }
        let get = |key: &str| pairs.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str());
        let d: usize = scalar("d", get("d").ok_or(ConfigError::Missing("d"))?)?;
        let s: usize = scalar("s", get("s").ok_or(ConfigError::Missing("s"))?)?;
        let mut c = Self::new(d, s);
        let t_given = get("T").is_some();
        for (k, v) in &pairs {
            let v = v.as_str();
            match k.as_str() {
                "d" | "s" => {}
                "scales" => c.scales = scalar(k, v)?,
                "periods" => c.periods = optional(v).map(|v| list(k, v)).transpose()?,
                "schedule" => c.schedule = optional(v).map(PathBuf::from),
                "box_radius" => c.box_radius = scalar(k, v)?,
                "T" => c.t_max = scalar(k, v)?,
                "a_seed" => c.a_seed = scalar(k, v)?,
                "gamma_cap" => c.gamma_cap = optional(v).map(|v| scalar(k, v)).transpose()?,
                "passes" => c.passes = scalar(k, v)?,
                "delta_override" => c.delta_override = optional(v).map(|v| scalar(k, v)).transpose()?,
                "glue_segment" => c.glue_segment = optional(v).map(|v| scalar(k, v)).transpose()?,
                "mirror_halves" => c.mirror_halves = boolean(k, v)?,
                "factor" => c.factor = scalar(k, v)?,
                "output_dir" => c.output_dir = PathBuf::from(v),
                "allow_approximate" => c.allow_approximate = boolean(k, v)?,
                "max_vertices" => c.max_vertices = scalar(k, v)?,
                "target" => c.target = scalar(k, v)?,
                "d_eff" => c.d_eff = optional(v).map(|v| scalar(k, v)).transpose()?,
                "checks" => c.checks = list(k, v)?,
                "thresholds" => c.thresholds = thresholds(v)?,
                "window" => {
                    let w: Vec<usize> = list(k, v)?;
                    let [a, b] = w[..] else {
                        return Err(value_err(k, "expected `start, end`"));
                    };
                    c.window = Some((a, b));
                }
                "radii" => c.radii = list(k, v)?,
                "times" => c.times = list(k, v)?,
                "probe_seed" => c.probe_seed = scalar(k, v)?,
                "decompose_gamma" => c.decompose_gamma = scalar(k, v)?,
                _ => unreachable!("key list and match arms agree"),
            }
        }
        if get("box_radius").is_none() && t_given {
            c.box_radius = c.t_max + 1;
        }
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let bad = |m: String| Err(ConfigError::Invalid(m));
        if self.s < 1 || self.s >= self.d {
            return bad(format!("need d > s >= 1, got d={}, s={}", self.d, self.s));
        }
        if self.a_seed == 0 || self.a_seed % 2 != 0 {
            return bad(format!("a_seed = {} must be positive and even", self.a_seed));
        }
        if self.scales < 1 {
            return bad("scales must be at least 1".into());
        }
        if self.passes < 1 {
            return bad("passes must be at least 1".into());
        }
        if self.box_radius < 1 {
            return bad("box_radius must be at least 1".into());
        }
        if !self.allow_approximate && self.target != Target::Lattice && self.box_radius < self.t_max + 1 {
            return bad(format!(
                "box_radius = {} is below T + 1 = {}; enlarge the box or set allow_approximate = true",
                self.box_radius,
                self.t_max + 1
            ));
        }
        if let Some(delta) = self.delta_override {
            if !(delta > 0.0 && delta <= 1.0) {
                return bad(format!("delta_override = {delta} outside (0, 1]"));
            }
        }
        if self.glue_segment == Some(0) {
            return bad("glue_segment must be at least 1".into());
        }
        if self.factor.is_nan() || self.factor <= 0.0 {
            return bad(format!("factor = {} must be positive", self.factor));
        }
        if self.gamma_cap == Some(0) {
            return bad("gamma_cap must be at least 1".into());
        }
        if let Some((a, b)) = self.window {
            if a > b {
                return bad(format!("window [{a}, {b}] is empty"));
            }
        }
        if self.radii.contains(&0) {
            return bad("radii must be positive".into());
        }
        if self.periods.is_some() && self.schedule.is_some() {
            return bad("give at most one of `periods` and `schedule`".into());
        }
        Ok(())
    }
}

const KEYS: &[&str] = &[
    "d",
    "s",
    "scales",
    "periods",
    "schedule",
    "box_radius",
    "T",
    "a_seed",
    "gamma_cap",
    "passes",
    "delta_override",
    "glue_segment",
    "mirror_halves",
    "factor",
    "output_dir",
    "allow_approximate",
    "max_vertices",
    "target",
    "d_eff",
    "checks",
    "thresholds",
    "window",
    "radii",
    "times",
    "probe_seed",
    "decompose_gamma",
];

fn value_err(key: &str, msg: impl Into<String>) -> ConfigError {
    ConfigError::Value { key: key.to_string(), msg: msg.into() }
}

fn scalar<T: FromStr>(key: &str, v: &str) -> Result<T, ConfigError>
where
    T::Err: std::fmt::Display,
{
    v.parse().map_err(|e: T::Err| value_err(key, format!("`{v}`: {e}")))
}

fn optional(v: &str) -> Option<&str> {
    (!v.is_empty() && v != "none").then_some(v)
}

fn boolean(key: &str, v: &str) -> Result<bool, ConfigError> {
    match v {
        "true" => Ok(true),
        "false" => Ok(false),
        _ => Err(value_err(key, format!("`{v}` is not true or false"))),
    }
}

fn list<T: FromStr>(key: &str, v: &str) -> Result<Vec<T>, ConfigError>
where
    T::Err: std::fmt::Display,
{
    v.split(',').map(str::trim).filter(|p| !p.is_empty()).map(|p| scalar(key, p)).collect()
}

fn thresholds(v: &str) -> Result<Thresholds, ConfigError> {
    let mut t = Thresholds::default();
    for part in v.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let (name, val) = part
            .split_once('=')
            .ok_or_else(|| value_err("thresholds", format!("expected name=value, found `{part}`")))?;
        let x: f64 = scalar("thresholds", val.trim())?;
        match name.trim() {
            "delmotte" => t.delmotte = x,
            "volume" => t.volume = Some(x),
            "poincare" => t.poincare = x,
            "smoothing" => t.smoothing = x,
            other => return Err(value_err("thresholds", format!("unknown threshold `{other}`"))),
        }
    }
    Ok(t)
}
