//! Run configuration: TOML with dotted keys, reference defaults, validation
//! that names the offending key and its line.

use std::fmt;
use std::path::{Path, PathBuf};

use serde::Deserialize;
use toml::Spanned;
use twotier::params::db_to_linear;
use twotier::sweeps::{log_grid, DEFAULT_SEARCH};
use twotier::{SystemParams, UserDistribution};

#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub key: Option<String>,
    pub line: Option<usize>,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (&self.key, self.line) {
            (Some(k), Some(l)) => write!(f, "`{k}` (line {l}): {}", self.message),
            (Some(k), None) => write!(f, "`{k}`: {}", self.message),
            _ => f.write_str(&self.message),
        }
    }
}

impl std::error::Error for ConfigError {}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Distribution {
    Uniform,
    Hotspot,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepMethod {
    Analytic,
    Simulation,
    Both,
}

impl SweepMethod {
    fn as_str(self) -> &'static str {
        match self {
            SweepMethod::Analytic => "analytic",
            SweepMethod::Simulation => "simulation",
            SweepMethod::Both => "both",
        }
    }
}

type Field<T> = Option<Spanned<T>>;

/// A float that may be written as an integer.
#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(untagged)]
enum Num {
    Int(i64),
    Float(f64),
}

impl From<Num> for f64 {
    fn from(n: Num) -> f64 {
        match n {
            Num::Int(i) => i as f64,
            Num::Float(f) => f,
        }
    }
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    #[serde(default)]
    system: RawSystem,
    #[serde(default)]
    geometry: RawGeometry,
    #[serde(default)]
    propagation: RawPropagation,
    #[serde(default)]
    load: RawLoad,
    #[serde(default)]
    users: RawUsers,
    #[serde(default)]
    run: RawRun,
    #[serde(default)]
    sweep: RawSweep,
    #[serde(default)]
    report: RawReport,
    #[serde(default)]
    output: RawOutput,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSystem {
    #[serde(rename = "spreading_factor_G")]
    spreading_factor_g: Field<Num>,
    #[serde(rename = "gamma_M_db")]
    gamma_m_db: Field<Num>,
    gamma_mu_db: Field<Num>,
    #[serde(rename = "noise_power_etaW")]
    noise_power: Field<Num>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGeometry {
    #[serde(rename = "region_side_L")]
    region_side_l: Field<Num>,
    #[serde(rename = "base_separation_D")]
    base_separation_d: Field<Num>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPropagation {
    #[serde(rename = "breakpoint_macro_bM")]
    breakpoint_macro: Field<Num>,
    breakpoint_micro_bmu: Field<Num>,
    sigma_macro_db: Field<Num>,
    sigma_micro_db: Field<Num>,
    gain_ratio_h: Field<Num>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawLoad {
    #[serde(rename = "N_total")]
    users: Field<u32>,
    zeta: Field<Num>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawUsers {
    distribution: Field<Distribution>,
    hotspot_fraction: Field<Num>,
    hotspot_radius: Field<Num>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRun {
    trials: Field<u64>,
    seed: Field<u64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSweep {
    zeta_min: Field<Num>,
    zeta_max: Field<Num>,
    zeta_points: Field<u32>,
    n_values: Field<Vec<u32>>,
    method: Field<SweepMethod>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawReport {
    zeta_values: Field<Vec<Num>>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOutput {
    dir: Field<String>,
    cdf_points: Field<u32>,
}

/// Command-line values that take precedence over the file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub trials: Option<u64>,
    pub zeta: Option<f64>,
    pub users: Option<u32>,
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub params: SystemParams,
    pub gamma_macro_db: f64,
    pub gamma_micro_db: f64,
    pub distribution: Distribution,
    pub hotspot_fraction: f64,
    pub hotspot_radius: f64,
    pub trials: u64,
    pub seed: u64,
    pub zeta_min: f64,
    pub zeta_max: f64,
    pub zeta_points: u32,
    pub n_values: Vec<u32>,
    pub sweep_method: SweepMethod,
    pub report_zetas: Vec<f64>,
    pub out_dir: PathBuf,
    pub cdf_points: u32,
}

impl Default for RunConfig {
    fn default() -> Self {
        let params = SystemParams::table1();
        RunConfig {
            params,
            gamma_macro_db: 7.0,
            gamma_micro_db: 8.45,
            distribution: Distribution::Uniform,
            hotspot_fraction: 0.5,
            hotspot_radius: 100.0,
            trials: twotier::montecarlo::DEFAULT_TRIALS,
            seed: 1,
            zeta_min: DEFAULT_SEARCH.0,
            zeta_max: DEFAULT_SEARCH.1,
            zeta_points: 25,
            n_values: vec![10, 14, 18, 22, 26],
            sweep_method: SweepMethod::Both,
            report_zetas: vec![0.001, 0.005, 0.05],
            out_dir: PathBuf::from("out"),
            cdf_points: 201,
        }
    }
}

fn line_of(source: &str, offset: usize) -> usize {
    source[..offset.min(source.len())].matches('\n').count() + 1
}

struct Reader<'a> {
    source: &'a str,
}

impl Reader<'_> {
    fn take<T: Clone, U: From<T>>(&self, field: &Field<T>, target: &mut U) -> Option<usize> {
        field.as_ref().map(|s| {
            *target = s.get_ref().clone().into();
            line_of(self.source, s.span().start)
        })
    }

    fn take_list(&self, field: &Field<Vec<Num>>, target: &mut Vec<f64>) -> Option<usize> {
        field.as_ref().map(|s| {
            *target = s.get_ref().iter().map(|&n| n.into()).collect();
            line_of(self.source, s.span().start)
        })
    }
}

/// Key name and line of each value that came from the file.
#[derive(Debug, Default)]
struct Lines(Vec<(&'static str, usize)>);

impl Lines {
    fn get(&self, key: &str) -> Option<usize> {
        self.0.iter().find(|(k, _)| *k == key).map(|(_, l)| *l)
    }
}

impl RunConfig {
    pub fn from_file(path: &Path, overrides: &Overrides) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError {
            key: None,
            line: None,
            message: format!("cannot read {}: {e}", path.display()),
        })?;
        if path.extension().is_some_and(|e| e == "json") {
            let toml = crate::manifest::config_toml_from_manifest(&text).map_err(|message| ConfigError {
                key: None,
                line: None,
                message,
            })?;
            return Self::parse(&toml, overrides);
        }
        Self::parse(&text, overrides)
    }

    pub fn parse(source: &str, overrides: &Overrides) -> Result<Self, ConfigError> {
        let raw: RawConfig = toml::from_str(source).map_err(|e| {
            let line = e.span().map(|s| line_of(source, s.start));
            ConfigError {
                key: None,
                line,
                message: e.message().to_string(),
            }
        })?;
        let mut c = RunConfig::default();
        let r = Reader { source };
        let mut lines = Lines::default();
        let mut gm_db = c.gamma_macro_db;
        let mut gmu_db = c.gamma_micro_db;
        let mut dir = c.out_dir.to_string_lossy().into_owned();
        let p = &mut c.params;
        let mut record = |key: &'static str, line: Option<usize>| {
            if let Some(l) = line {
                lines.0.push((key, l));
            }
        };
        record("system.spreading_factor_G", r.take(&raw.system.spreading_factor_g, &mut p.spreading_factor_g));
        record("system.gamma_M_db", r.take(&raw.system.gamma_m_db, &mut gm_db));
        record("system.gamma_mu_db", r.take(&raw.system.gamma_mu_db, &mut gmu_db));
        record("system.noise_power_etaW", r.take(&raw.system.noise_power, &mut p.noise_power));
        record("geometry.region_side_L", r.take(&raw.geometry.region_side_l, &mut p.region_side_l));
        record("geometry.base_separation_D", r.take(&raw.geometry.base_separation_d, &mut p.base_separation_d));
        record("propagation.breakpoint_macro_bM", r.take(&raw.propagation.breakpoint_macro, &mut p.breakpoint_macro));
        record("propagation.breakpoint_micro_bmu", r.take(&raw.propagation.breakpoint_micro_bmu, &mut p.breakpoint_micro));
        record("propagation.sigma_macro_db", r.take(&raw.propagation.sigma_macro_db, &mut p.shadow_sigma_macro_db));
        record("propagation.sigma_micro_db", r.take(&raw.propagation.sigma_micro_db, &mut p.shadow_sigma_micro_db));
        record("propagation.gain_ratio_h", r.take(&raw.propagation.gain_ratio_h, &mut p.gain_ratio_h));
        record("load.N_total", r.take(&raw.load.users, &mut p.users));
        record("load.zeta", r.take(&raw.load.zeta, &mut p.zeta));
        record("users.distribution", r.take(&raw.users.distribution, &mut c.distribution));
        record("users.hotspot_fraction", r.take(&raw.users.hotspot_fraction, &mut c.hotspot_fraction));
        record("users.hotspot_radius", r.take(&raw.users.hotspot_radius, &mut c.hotspot_radius));
        record("run.trials", r.take(&raw.run.trials, &mut c.trials));
        record("run.seed", r.take(&raw.run.seed, &mut c.seed));
        record("sweep.zeta_min", r.take(&raw.sweep.zeta_min, &mut c.zeta_min));
        record("sweep.zeta_max", r.take(&raw.sweep.zeta_max, &mut c.zeta_max));
        record("sweep.zeta_points", r.take(&raw.sweep.zeta_points, &mut c.zeta_points));
        record("sweep.n_values", r.take(&raw.sweep.n_values, &mut c.n_values));
        record("sweep.method", r.take(&raw.sweep.method, &mut c.sweep_method));
        record("report.zeta_values", r.take_list(&raw.report.zeta_values, &mut c.report_zetas));
        record("output.dir", r.take(&raw.output.dir, &mut dir));
        record("output.cdf_points", r.take(&raw.output.cdf_points, &mut c.cdf_points));

        c.gamma_macro_db = gm_db;
        c.gamma_micro_db = gmu_db;
        c.params.gamma_macro = db_to_linear(gm_db);
        c.params.gamma_micro = db_to_linear(gmu_db);
        c.out_dir = PathBuf::from(dir);

        if let Some(v) = overrides.seed {
            c.seed = v;
        }
        if let Some(v) = overrides.trials {
            c.trials = v;
        }
        if let Some(v) = overrides.zeta {
            c.params.zeta = v;
        }
        if let Some(v) = overrides.users {
            c.params.users = v;
        }
        if let Some(v) = &overrides.out {
            c.out_dir = v.clone();
        }
        c.validate(&lines)?;
        Ok(c)
    }

    fn validate(&self, lines: &Lines) -> Result<(), ConfigError> {
        let fail = |key: &str, message: String| ConfigError {
            key: Some(key.to_string()),
            line: lines.get(key),
            message,
        };
        let core = |e: twotier::Error| match e {
            twotier::Error::InvalidParameter { name, reason } => fail(config_key(name), reason),
            other => fail("config", other.to_string()),
        };
        for (key, db) in [("system.gamma_M_db", self.gamma_macro_db), ("system.gamma_mu_db", self.gamma_micro_db)] {
            if !db.is_finite() {
                return Err(fail(key, format!("must be finite, got {db}")));
            }
        }
        self.params.validate().map_err(core)?;
        if self.distribution == Distribution::Hotspot && self.hotspot_fraction <= 0.0 {
            return Err(fail(
                "users.hotspot_fraction",
                format!("must lie in (0, 1] for a hotspot, got {}", self.hotspot_fraction),
            ));
        }
        self.hotspot().validate().map_err(core)?;
        if self.trials == 0 {
            return Err(fail("run.trials", "must be at least 1".into()));
        }
        if !(self.zeta_min > 0.0 && self.zeta_min <= 1.0) {
            return Err(fail("sweep.zeta_min", format!("must lie in (0, 1], got {}", self.zeta_min)));
        }
        if !(self.zeta_max > self.zeta_min && self.zeta_max <= 1.0) {
            return Err(fail(
                "sweep.zeta_max",
                format!("must lie in (zeta_min, 1], got {}", self.zeta_max),
            ));
        }
        if self.zeta_points == 0 {
            return Err(fail("sweep.zeta_points", "must be at least 1".into()));
        }
        if self.n_values.is_empty() {
            return Err(fail("sweep.n_values", "must not be empty".into()));
        }
        let cap = self.params.pole_capacity().ceil() + 4.0;
        if let Some(n) = self.n_values.iter().find(|&&n| n < 2 || f64::from(n) > cap) {
            return Err(fail("sweep.n_values", format!("{n} is outside [2, {cap}]")));
        }
        if self.report_zetas.iter().any(|z| !(*z > 0.0 && *z <= 1.0)) {
            return Err(fail("report.zeta_values", "values must lie in (0, 1]".into()));
        }
        if self.cdf_points < 2 {
            return Err(fail("output.cdf_points", "must be at least 2".into()));
        }
        Ok(())
    }

    /// The distribution users are drawn from.
    pub fn distribution(&self) -> UserDistribution {
        match self.distribution {
            Distribution::Uniform => UserDistribution::Uniform,
            Distribution::Hotspot => self.hotspot(),
        }
    }

    /// The hotspot layout, used by the comparison even when users are uniform.
    pub fn hotspot(&self) -> UserDistribution {
        UserDistribution::Hotspot {
            fraction: self.hotspot_fraction,
            radius: self.hotspot_radius,
        }
    }

    pub fn zeta_grid(&self) -> Vec<f64> {
        log_grid(self.zeta_min, self.zeta_max, self.zeta_points as usize)
    }

    /// Evenly spaced CDF evaluation points on `[0, 1]`.
    pub fn cdf_grid(&self) -> Vec<f64> {
        let k = self.cdf_points - 1;
        (0..=k).map(|i| f64::from(i) / f64::from(k)).collect()
    }

    /// Every resolved setting as a flat dotted key, in schema order.
    pub fn echo(&self) -> Vec<(&'static str, toml::Value)> {
        use toml::Value;
        let f = Value::Float;
        let i = |v: u64| Value::Integer(v as i64);
        let p = &self.params;
        vec![
            ("system.spreading_factor_G", f(p.spreading_factor_g)),
            ("system.gamma_M_db", f(self.gamma_macro_db)),
            ("system.gamma_mu_db", f(self.gamma_micro_db)),
            ("system.noise_power_etaW", f(p.noise_power)),
            ("geometry.region_side_L", f(p.region_side_l)),
            ("geometry.base_separation_D", f(p.base_separation_d)),
            ("propagation.breakpoint_macro_bM", f(p.breakpoint_macro)),
            ("propagation.breakpoint_micro_bmu", f(p.breakpoint_micro)),
            ("propagation.sigma_macro_db", f(p.shadow_sigma_macro_db)),
            ("propagation.sigma_micro_db", f(p.shadow_sigma_micro_db)),
            ("propagation.gain_ratio_h", f(p.gain_ratio_h)),
            ("load.N_total", i(u64::from(p.users))),
            ("load.zeta", f(p.zeta)),
            (
                "users.distribution",
                Value::String(
                    match self.distribution {
                        Distribution::Uniform => "uniform",
                        Distribution::Hotspot => "hotspot",
                    }
                    .into(),
                ),
            ),
            ("users.hotspot_fraction", f(self.hotspot_fraction)),
            ("users.hotspot_radius", f(self.hotspot_radius)),
            ("run.trials", i(self.trials)),
            ("run.seed", i(self.seed)),
            ("sweep.zeta_min", f(self.zeta_min)),
            ("sweep.zeta_max", f(self.zeta_max)),
            ("sweep.zeta_points", i(u64::from(self.zeta_points))),
            (
                "sweep.n_values",
                Value::Array(self.n_values.iter().map(|&n| i(u64::from(n))).collect()),
            ),
            ("sweep.method", Value::String(self.sweep_method.as_str().into())),
            (
                "report.zeta_values",
                Value::Array(self.report_zetas.iter().map(|&z| f(z)).collect()),
            ),
            ("output.dir", Value::String(self.out_dir.to_string_lossy().into_owned())),
            ("output.cdf_points", i(u64::from(self.cdf_points))),
        ]
    }
}

fn config_key(core_name: &str) -> &'static str {
    match core_name {
        "spreading_factor_g" => "system.spreading_factor_G",
        "gamma_macro" => "system.gamma_M_db",
        "gamma_micro" => "system.gamma_mu_db",
        "noise_power" => "system.noise_power_etaW",
        "region_side_l" => "geometry.region_side_L",
        "base_separation_d" => "geometry.base_separation_D",
        "breakpoint_macro" => "propagation.breakpoint_macro_bM",
        "breakpoint_micro" => "propagation.breakpoint_micro_bmu",
        "shadow_sigma_macro_db" => "propagation.sigma_macro_db",
        "shadow_sigma_micro_db" => "propagation.sigma_micro_db",
        "gain_ratio_h" => "propagation.gain_ratio_h",
        "users" => "load.N_total",
        "zeta" => "load.zeta",
        "hotspot_fraction" => "users.hotspot_fraction",
        "hotspot_radius" => "users.hotspot_radius",
        _ => "config",
    }
}
