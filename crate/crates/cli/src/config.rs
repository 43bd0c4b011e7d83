//! Scenario configuration: a flat `key = value` file with optional
//! `[experiment]` sections.
//!
//! Keys before the first section apply to every experiment. Keys inside a
//! section named after the experiment being run override them; other
//! sections are parsed but ignored. Lists are comma separated. Lines starting
//! with `#` or `;` are comments.

use std::collections::BTreeMap;
use std::f64::consts::TAU;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use catasym_core::cat1::DEFAULT_SEARCH_BUDGET;
use catasym_core::strainer::DEFAULT_PAIR_BUDGET;
use clap::ValueEnum;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("line {line}: cannot parse `{text}`")]
    Syntax { line: usize, text: String },
    #[error("line {line}: key `{key}` repeated in section [{section}]")]
    Duplicate {
        line: usize,
        section: String,
        key: String,
    },
    #[error("unknown key `{0}`")]
    UnknownKey(String),
    #[error("invalid value `{value}` for `{key}`: {reason}")]
    InvalidValue {
        key: String,
        value: String,
        reason: String,
    },
    #[error("{0}")]
    Invariant(String),
}

type Result<T> = std::result::Result<T, ConfigError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, ValueEnum)]
pub enum Experiment {
    SuspenderSearch,
    StrainerVerify,
    OpennessIterate,
    BilipSweep,
    GhBounds,
    SphereMap,
}

impl Experiment {
    pub fn name(self) -> &'static str {
        match self {
            Experiment::SuspenderSearch => "suspender-search",
            Experiment::StrainerVerify => "strainer-verify",
            Experiment::OpennessIterate => "openness-iterate",
            Experiment::BilipSweep => "bilip-sweep",
            Experiment::GhBounds => "gh-bounds",
            Experiment::SphereMap => "sphere-map",
        }
    }

    pub const ALL: [Experiment; 6] = [
        Experiment::SuspenderSearch,
        Experiment::StrainerVerify,
        Experiment::OpennessIterate,
        Experiment::BilipSweep,
        Experiment::GhBounds,
        Experiment::SphereMap,
    ];
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Experiment {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self> {
        Experiment::ALL
            .into_iter()
            .find(|e| e.name() == s)
            .ok_or_else(|| ConfigError::Invariant(format!("unknown experiment `{s}`")))
    }
}

/// Base space variant. Cone experiments use the Euclidean cone over it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variant {
    Circle,
    Suspension,
    Sphere,
    Theta,
}

impl Variant {
    fn parse(key: &str, v: &str) -> Result<Self> {
        match v {
            "circle" => Ok(Variant::Circle),
            "suspension" => Ok(Variant::Suspension),
            "sphere" => Ok(Variant::Sphere),
            "theta" => Ok(Variant::Theta),
            _ => Err(invalid(
                key,
                v,
                "expected circle, suspension, sphere or theta",
            )),
        }
    }

    fn name(self) -> &'static str {
        match self {
            Variant::Circle => "circle",
            Variant::Suspension => "suspension",
            Variant::Sphere => "sphere",
            Variant::Theta => "theta",
        }
    }
}

/// Where strainer and suspender tuples come from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TupleSource {
    /// The coordinate frame: {0, L/4} with opposites {L/2, 3L/4} on the
    /// equator, plus the poles on suspensions.
    Quarter,
    /// Lexicographic search over the base sample.
    Search,
}

/// Parsed sections of a configuration file; the empty name holds the
/// global keys.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RawConfig {
    pub sections: BTreeMap<String, BTreeMap<String, String>>,
}

impl RawConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut sections: BTreeMap<String, BTreeMap<String, String>> = BTreeMap::new();
        let mut current = String::new();
        sections.insert(current.clone(), BTreeMap::new());
        for (k, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') || line.starts_with(';') {
                continue;
            }
            let syntax = || ConfigError::Syntax {
                line: k + 1,
                text: raw.to_string(),
            };
            if let Some(rest) = line.strip_prefix('[') {
                let name = rest.strip_suffix(']').ok_or_else(syntax)?.trim();
                if name.is_empty() {
                    return Err(syntax());
                }
                current = name.to_string();
                sections.entry(current.clone()).or_default();
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(syntax)?;
            let (key, value) = (key.trim(), value.trim());
            if key.is_empty() || key.contains(char::is_whitespace) {
                return Err(syntax());
            }
            let section = sections.get_mut(&current).expect("section inserted above");
            if section.insert(key.to_string(), value.to_string()).is_some() {
                return Err(ConfigError::Duplicate {
                    line: k + 1,
                    section: current.clone(),
                    key: key.to_string(),
                });
            }
        }
        Ok(RawConfig { sections })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse(&text)
    }

    /// Global keys overlaid with the experiment's section.
    pub fn merged(&self, experiment: Experiment) -> BTreeMap<String, String> {
        let mut out = self.sections.get("").cloned().unwrap_or_default();
        if let Some(s) = self.sections.get(experiment.name()) {
            out.extend(s.iter().map(|(k, v)| (k.clone(), v.clone())));
        }
        out
    }
}

/// Command-line values that take precedence over the file.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub mesh: Option<f64>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub experiment: Experiment,
    pub variant: Variant,
    /// Base lengths L, one scenario point each.
    pub lengths: Vec<f64>,
    /// Edge lengths of the theta graph.
    pub edges: Vec<f64>,
    /// Order of strainers and suspenders; also the target sphere 𝕊^{m−1}.
    pub m: usize,
    pub mesh: f64,
    pub radius_cap: f64,
    pub tol: f64,
    pub seed: u64,
    pub out: PathBuf,
    pub tuple: TupleSource,
    /// Certify at this δ instead of the sharpest grid value.
    pub delta: Option<f64>,
    pub delta_max: f64,
    pub budget: u64,
    pub pair_budget: usize,
    pub probes: usize,
    pub geodesics: usize,
    pub steps: usize,
    pub u0: Vec<f64>,
    pub x0_radius: f64,
    pub x0_angle: f64,
    pub max_iter: usize,
    /// Allowed distortion per unit excess: ratios must lie in [1 − band·t, 1 + band·t].
    pub band: f64,
    pub expect_order: Option<usize>,
    pub max_width: Option<f64>,
    pub assertions: bool,
}

fn invalid(key: &str, value: &str, reason: impl Into<String>) -> ConfigError {
    ConfigError::InvalidValue {
        key: key.to_string(),
        value: value.to_string(),
        reason: reason.into(),
    }
}

fn parse_one<T: FromStr>(key: &str, v: &str) -> Result<T>
where
    T::Err: fmt::Display,
{
    v.parse::<T>().map_err(|e| invalid(key, v, e.to_string()))
}

fn parse_list(key: &str, v: &str) -> Result<Vec<f64>> {
    v.split(',')
        .map(|s| parse_one::<f64>(key, s.trim()))
        .collect()
}

fn parse_bool(key: &str, v: &str) -> Result<bool> {
    match v {
        "true" | "yes" | "on" => Ok(true),
        "false" | "no" | "off" => Ok(false),
        _ => Err(invalid(key, v, "expected true or false")),
    }
}

impl ScenarioConfig {
    /// Built-in defaults for an experiment.
    pub fn defaults(experiment: Experiment) -> Self {
        let excess: &[f64] = match experiment {
            Experiment::BilipSweep => &[0.2, 0.1, 0.05],
            Experiment::OpennessIterate | Experiment::SuspenderSearch => &[0.0],
            _ => &[0.1],
        };
        ScenarioConfig {
            experiment,
            variant: Variant::Circle,
            lengths: excess.iter().map(|t| TAU + t).collect(),
            edges: Vec::new(),
            m: 2,
            mesh: 0.02,
            radius_cap: 3.0,
            tol: 1e-9,
            seed: 0,
            out: PathBuf::from("catasym-out"),
            tuple: TupleSource::Quarter,
            delta: match experiment {
                Experiment::SuspenderSearch => Some(0.05),
                _ => None,
            },
            delta_max: 0.3,
            budget: DEFAULT_SEARCH_BUDGET,
            pair_budget: DEFAULT_PAIR_BUDGET,
            probes: 1000,
            geodesics: 500,
            steps: 16,
            u0: vec![0.3, 0.4],
            x0_radius: 0.0,
            x0_angle: 0.0,
            max_iter: 100,
            band: 5.0,
            expect_order: None,
            max_width: None,
            assertions: true,
        }
    }

    /// Defaults, then the merged file keys, then the command line.
    pub fn from_raw(raw: &RawConfig, experiment: Experiment, over: &Overrides) -> Result<Self> {
        let keys = raw.merged(experiment);
        let mut c = Self::defaults(experiment);
        let mut m_given = false;
        for (key, v) in &keys {
            let k = key.as_str();
            match k {
                "space" => c.variant = Variant::parse(k, v)?,
                "length" => c.lengths = parse_list(k, v)?,
                "excess" => c.lengths = parse_list(k, v)?.into_iter().map(|t| TAU + t).collect(),
                "edges" => c.edges = parse_list(k, v)?,
                "m" => {
                    c.m = parse_one(k, v)?;
                    m_given = true;
                }
                "mesh" => c.mesh = parse_one(k, v)?,
                "radius_cap" => c.radius_cap = parse_one(k, v)?,
                "tol" => c.tol = parse_one(k, v)?,
                "seed" => c.seed = parse_one(k, v)?,
                "out" => c.out = PathBuf::from(v),
                "tuple" => {
                    c.tuple = match v.as_str() {
                        "quarter" => TupleSource::Quarter,
                        "search" => TupleSource::Search,
                        _ => return Err(invalid(k, v, "expected quarter or search")),
                    }
                }
                "delta" => c.delta = Some(parse_one(k, v)?),
                "delta_max" => c.delta_max = parse_one(k, v)?,
                "budget" => c.budget = parse_one(k, v)?,
                "pair_budget" => c.pair_budget = parse_one(k, v)?,
                "probes" => c.probes = parse_one(k, v)?,
                "geodesics" => c.geodesics = parse_one(k, v)?,
                "steps" => c.steps = parse_one(k, v)?,
                "u0" => c.u0 = parse_list(k, v)?,
                "x0_radius" => c.x0_radius = parse_one(k, v)?,
                "x0_angle" => c.x0_angle = parse_one(k, v)?,
                "max_iter" => c.max_iter = parse_one(k, v)?,
                "band" => c.band = parse_one(k, v)?,
                "expect_order" => c.expect_order = Some(parse_one(k, v)?),
                "max_width" => c.max_width = Some(parse_one(k, v)?),
                "assert" => c.assertions = parse_bool(k, v)?,
                _ => return Err(ConfigError::UnknownKey(key.clone())),
            }
        }
        if !m_given && matches!(c.variant, Variant::Suspension | Variant::Sphere) {
            c.m = 3;
        }
        if !keys.contains_key("u0") && c.u0.len() != c.m {
            c.u0.resize(c.m, 0.0);
        }
        if let Some(mesh) = over.mesh {
            c.mesh = mesh;
        }
        if let Some(seed) = over.seed {
            c.seed = seed;
        }
        if let Some(out) = &over.out {
            c.out = out.clone();
        }
        c.validate()?;
        Ok(c)
    }

    fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(ConfigError::Invariant(msg));
        if !(self.mesh > 0.0) {
            return bad(format!("mesh must be positive, got {}", self.mesh));
        }
        if !(self.tol > 0.0) {
            return bad(format!("tol must be positive, got {}", self.tol));
        }
        if !(self.radius_cap > 0.0) {
            return bad(format!(
                "radius_cap must be positive, got {}",
                self.radius_cap
            ));
        }
        if self.lengths.is_empty() {
            return bad("at least one length is required".into());
        }
        match self.variant {
            Variant::Circle | Variant::Suspension => {
                if let Some(l) = self.lengths.iter().find(|&&l| !(l >= TAU - 1e-12)) {
                    return bad(format!("CAT(1) circles need L ≥ 2π, got {l}"));
                }
            }
            Variant::Theta => {
                if self.edges.len() != 3 || self.edges.iter().any(|&e| !(e > 0.0)) {
                    return bad("theta graphs need three positive edge lengths".into());
                }
                let mut e = self.edges.clone();
                e.sort_by(f64::total_cmp);
                if e[0] + e[1] < TAU - 1e-12 {
                    return bad(format!(
                        "theta graph has a cycle of length {} < 2π",
                        e[0] + e[1]
                    ));
                }
            }
            Variant::Sphere => {}
        }
        let max_m = match self.variant {
            Variant::Circle | Variant::Theta => 2,
            Variant::Suspension | Variant::Sphere => 3,
        };
        if self.m == 0 || self.m > max_m {
            return bad(format!(
                "m must be in 1..={max_m} for {}",
                self.variant.name()
            ));
        }
        if self.u0.len() != self.m {
            return bad(format!("u0 has {} entries, m is {}", self.u0.len(), self.m));
        }
        if let Some(d) = self.delta {
            if !(d > 0.0) {
                return bad(format!("delta must be positive, got {d}"));
            }
        }
        if !(self.delta_max > 0.0) {
            return bad("delta_max must be positive".into());
        }
        if self.probes == 0 || self.geodesics == 0 || self.steps == 0 || self.pair_budget == 0 {
            return bad("probes, geodesics, steps and pair_budget must be positive".into());
        }
        if !(self.band > 0.0) {
            return bad("band must be positive".into());
        }
        if !(self.x0_radius >= 0.0) {
            return bad("x0_radius must be nonnegative".into());
        }
        let cone_experiment = matches!(
            self.experiment,
            Experiment::StrainerVerify | Experiment::OpennessIterate | Experiment::BilipSweep
        );
        if cone_experiment && !matches!(self.variant, Variant::Circle | Variant::Suspension) {
            return bad(format!(
                "{} runs on cones over circles or suspensions of circles",
                self.experiment
            ));
        }
        if self.experiment == Experiment::SphereMap
            && !matches!(self.variant, Variant::Circle | Variant::Suspension)
        {
            return bad("sphere-map needs a circle or a suspension of a circle".into());
        }
        if self.experiment == Experiment::GhBounds && self.variant == Variant::Sphere {
            return bad(
                "gh-bounds compares a model space against a sphere; pick another space".into(),
            );
        }
        Ok(())
    }

    /// Effective settings as text, for the report header.
    pub fn echo(&self) -> BTreeMap<String, String> {
        let list = |v: &[f64]| {
            v.iter()
                .map(|x| x.to_string())
                .collect::<Vec<_>>()
                .join(", ")
        };
        let mut e = BTreeMap::new();
        let mut put = |k: &str, v: String| {
            e.insert(k.to_string(), v);
        };
        put("space", self.variant.name().into());
        put("length", list(&self.lengths));
        if self.variant == Variant::Theta {
            put("edges", list(&self.edges));
        }
        put("m", self.m.to_string());
        put("mesh", self.mesh.to_string());
        put("radius_cap", self.radius_cap.to_string());
        put("tol", self.tol.to_string());
        put("seed", self.seed.to_string());
        put(
            "tuple",
            match self.tuple {
                TupleSource::Quarter => "quarter".into(),
                TupleSource::Search => "search".into(),
            },
        );
        put(
            "delta",
            self.delta.map_or("sharpest".into(), |d| d.to_string()),
        );
        put("delta_max", self.delta_max.to_string());
        put("budget", self.budget.to_string());
        put("pair_budget", self.pair_budget.to_string());
        put("probes", self.probes.to_string());
        put("geodesics", self.geodesics.to_string());
        put("steps", self.steps.to_string());
        put("u0", list(&self.u0));
        put("x0_radius", self.x0_radius.to_string());
        put("x0_angle", self.x0_angle.to_string());
        put("max_iter", self.max_iter.to_string());
        put("band", self.band.to_string());
        if let Some(o) = self.expect_order {
            put("expect_order", o.to_string());
        }
        if let Some(w) = self.max_width {
            put("max_width", w.to_string());
        }
        put("assert", self.assertions.to_string());
        e
    }
}
