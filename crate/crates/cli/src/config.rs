//! Scenario configuration files.
//!
//! A configuration is a TOML document (format version 1). Every key is
//! optional; missing values come from the scenario preset. Named scenarios pin
//! the physical parameters and initial conditions of the corresponding figure
//! and only accept batch-size, seed, statistics, integrator and output
//! overrides. The `custom` scenario accepts everything.
//!
//! ```toml
//! version = 1
//! scenario = "custom"
//! statistics = "fermion"
//! output_dir = "runs/custom"
//!
//! [params]
//! sigma0 = 1e-6
//! x_velocity = 2e6        # alternative to kx
//!
//! [sampler]
//! method = "exact_rejection"
//! n_pairs = 1000
//! seed = 7
//!
//! [integrator]
//! rel_tol = 1e-9
//! output_steps = 200
//!
//! [output]
//! trajectories = true
//! ```

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use bohmpair_core::{
    Error as CoreError, IntegratorConfig, PhysicalParams, SamplerConfig, SamplingMethod, SpinStatistics,
};
use serde::{Deserialize, Serialize};

pub const CONFIG_VERSION: u32 = 1;

/// Longitudinal velocity of the narrow-packet figures, m/s.
pub const FAST_X_VELOCITY: f64 = 2e7;
/// Longitudinal velocity of the spread-packet figures, m/s.
pub const SLOW_X_VELOCITY: f64 = 2e6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scenario {
    Fig3a,
    Fig3b,
    Fig4a,
    Fig4b,
    FourSlitCheck,
    Equivariance,
    Custom,
}

impl Scenario {
    pub const ALL: [Scenario; 7] = [
        Scenario::Fig3a,
        Scenario::Fig3b,
        Scenario::Fig4a,
        Scenario::Fig4b,
        Scenario::FourSlitCheck,
        Scenario::Equivariance,
        Scenario::Custom,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Scenario::Fig3a => "fig3a",
            Scenario::Fig3b => "fig3b",
            Scenario::Fig4a => "fig4a",
            Scenario::Fig4b => "fig4b",
            Scenario::FourSlitCheck => "four-slit-check",
            Scenario::Equivariance => "equivariance",
            Scenario::Custom => "custom",
        }
    }

    fn pins_physics(self) -> bool {
        self != Scenario::Custom
    }

    /// Scenarios whose initial conditions are a fixed list of pairs.
    fn pins_sampler(self) -> bool {
        matches!(self, Scenario::Fig4a | Scenario::Fig4b)
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scenario {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Scenario::ALL
            .into_iter()
            .find(|sc| sc.name() == s)
            .ok_or_else(|| format!("unknown scenario `{s}`"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    /// Write one CSV per trajectory.
    pub trajectories: bool,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self { trajectories: true }
    }
}

/// A fully resolved and validated scenario.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioConfig {
    pub version: u32,
    pub scenario: Scenario,
    pub statistics: SpinStatistics,
    pub output_dir: PathBuf,
    pub params: PhysicalParams,
    pub sampler: SamplerConfig,
    pub integrator: IntegratorConfig,
    /// Explicit initial heights `(y1, y2)` in metres. When non-empty these
    /// replace the sampler.
    pub initial_pairs: Vec<[f64; 2]>,
    pub output: OutputConfig,
}

impl ScenarioConfig {
    /// The defaults of `scenario` with no overrides.
    pub fn preset(scenario: Scenario) -> Self {
        let sigma0 = 1e-6;
        let y = 5.0 * sigma0;
        let mut cfg = Self {
            version: CONFIG_VERSION,
            scenario,
            statistics: SpinStatistics::Boson,
            output_dir: PathBuf::from("out").join(scenario.name()),
            params: PhysicalParams::baseline(SLOW_X_VELOCITY),
            sampler: SamplerConfig::default(),
            integrator: IntegratorConfig::default(),
            initial_pairs: Vec::new(),
            output: OutputConfig::default(),
        };
        let figure_batch = SamplerConfig {
            method: SamplingMethod::IndependentGaussian,
            n_pairs: 25,
            seed: 1,
        };
        match scenario {
            Scenario::Fig3a => {
                cfg.params = PhysicalParams::baseline(FAST_X_VELOCITY);
                cfg.sampler = figure_batch;
            }
            Scenario::Fig3b => cfg.sampler = figure_batch,
            Scenario::Fig4a => {
                cfg.initial_pairs = [y - 1.5 * sigma0, y, y + 1.5 * sigma0]
                    .iter()
                    .map(|&h| [h, -h])
                    .collect();
            }
            Scenario::Fig4b => {
                cfg.initial_pairs = vec![[y, -y + 1.5 * sigma0], [y, -y], [y, -y - 1.5 * sigma0]];
            }
            Scenario::FourSlitCheck => {
                cfg.sampler.n_pairs = 200;
                cfg.integrator.output_steps = 50;
                cfg.output.trajectories = false;
            }
            Scenario::Equivariance => {
                cfg.sampler.n_pairs = 10_000;
                cfg.integrator.output_steps = 10;
                cfg.output.trajectories = false;
            }
            Scenario::Custom => {}
        }
        if scenario.pins_sampler() {
            cfg.sampler.n_pairs = cfg.initial_pairs.len();
        }
        cfg
    }

    /// Slit-to-detector flight time, the end of every trajectory.
    pub fn t_end(&self) -> f64 {
        self.params.flight_time()
    }

    /// Number of pairs the scenario integrates.
    pub fn pair_count(&self) -> usize {
        if self.initial_pairs.is_empty() {
            self.sampler.n_pairs
        } else {
            self.initial_pairs.len()
        }
    }

    /// Serialize as a configuration file that loads back to `self`. Values
    /// pinned by a named scenario are omitted.
    pub fn to_toml(&self) -> String {
        let pinned = self.scenario.pins_physics();
        let sampled = self.initial_pairs.is_empty();
        let raw = RawConfig {
            version: Some(self.version),
            scenario: Some(self.scenario),
            statistics: Some(self.statistics),
            output_dir: Some(self.output_dir.clone()),
            params: (!pinned).then(|| RawParams::from(&self.params)),
            sampler: Some(RawSampler {
                method: sampled.then_some(self.sampler.method),
                n_pairs: sampled.then_some(self.sampler.n_pairs),
                seed: Some(self.sampler.seed),
            }),
            integrator: Some(self.integrator),
            initial_pairs: (!pinned && !self.initial_pairs.is_empty()).then(|| self.initial_pairs.clone()),
            output: Some(self.output),
        };
        toml::to_string(&raw).expect("configuration values are representable in TOML")
    }
}

/// Command-line values that take precedence over the file.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub scenario: Option<Scenario>,
    pub statistics: Option<SpinStatistics>,
    pub seed: Option<u64>,
    pub n_pairs: Option<usize>,
    pub output_dir: Option<PathBuf>,
    /// Replaces both integrator tolerances.
    pub tolerance: Option<f64>,
}

/// One problem with a configuration, located where possible.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    /// Dotted key path, e.g. `params.sigma0`.
    pub field: Option<String>,
    /// 1-based line and column in the source file.
    pub line: Option<usize>,
    pub column: Option<usize>,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(line) = self.line {
            write!(f, "line {line}")?;
            if let Some(col) = self.column {
                write!(f, ", column {col}")?;
            }
            f.write_str(": ")?;
        }
        if let Some(field) = &self.field {
            write!(f, "`{field}`: ")?;
        }
        f.write_str(&self.message)
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{origin}: invalid configuration\n{}", render(diagnostics))]
    Invalid { origin: String, diagnostics: Vec<Diagnostic> },
}

impl ConfigError {
    pub fn diagnostics(&self) -> &[Diagnostic] {
        match self {
            ConfigError::Io { .. } => &[],
            ConfigError::Invalid { diagnostics, .. } => diagnostics,
        }
    }
}

fn render(diagnostics: &[Diagnostic]) -> String {
    diagnostics
        .iter()
        .map(|d| format!("  {d}"))
        .collect::<Vec<_>>()
        .join("\n")
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    version: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    scenario: Option<Scenario>,
    #[serde(skip_serializing_if = "Option::is_none")]
    statistics: Option<SpinStatistics>,
    #[serde(skip_serializing_if = "Option::is_none")]
    output_dir: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    initial_pairs: Option<Vec<[f64; 2]>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    params: Option<RawParams>,
    #[serde(skip_serializing_if = "Option::is_none")]
    sampler: Option<RawSampler>,
    #[serde(skip_serializing_if = "Option::is_none")]
    integrator: Option<IntegratorConfig>,
    #[serde(skip_serializing_if = "Option::is_none")]
    output: Option<OutputConfig>,
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawParams {
    #[serde(skip_serializing_if = "Option::is_none")]
    mass: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    hbar: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    sigma0: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    slit_offset: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    kx: Option<f64>,
    /// `hbar kx / m` in m/s, converted to `kx` after the other fields.
    #[serde(skip_serializing_if = "Option::is_none")]
    x_velocity: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    ky: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    source_half_separation: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    flight_distance: Option<f64>,
}

impl From<&PhysicalParams> for RawParams {
    fn from(p: &PhysicalParams) -> Self {
        Self {
            mass: Some(p.mass),
            hbar: Some(p.hbar),
            sigma0: Some(p.sigma0),
            slit_offset: Some(p.slit_offset),
            kx: Some(p.kx),
            x_velocity: None,
            ky: Some(p.ky),
            source_half_separation: Some(p.source_half_separation),
            flight_distance: Some(p.flight_distance),
        }
    }
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSampler {
    #[serde(skip_serializing_if = "Option::is_none")]
    method: Option<SamplingMethod>,
    #[serde(skip_serializing_if = "Option::is_none")]
    n_pairs: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
}

/// Resolves key paths to source positions.
struct Locator<'a> {
    text: &'a str,
}

impl Locator<'_> {
    fn position(&self, offset: usize) -> (usize, usize) {
        let before = &self.text[..offset.min(self.text.len())];
        let line = before.matches('\n').count() + 1;
        let column = before.rfind('\n').map_or(before.len(), |nl| before.len() - nl - 1) + 1;
        (line, column)
    }

    /// Line and column of `key` inside `[table]` (or the root when `None`).
    fn find(&self, table: Option<&str>, key: &str) -> Option<(usize, usize)> {
        let mut current: Option<String> = None;
        for (idx, line) in self.text.lines().enumerate() {
            let trimmed = line.trim_start();
            if let Some(header) = trimmed.strip_prefix('[') {
                let name = header.split(']').next().unwrap_or("").trim();
                if table.is_none() && key == name {
                    return Some((idx + 1, line.len() - trimmed.len() + 1));
                }
                current = Some(name.to_string());
                continue;
            }
            let matches_key = trimmed
                .split_once('=')
                .is_some_and(|(k, _)| k.trim().trim_matches('"') == key);
            if matches_key && current.as_deref() == table {
                return Some((idx + 1, line.len() - trimmed.len() + 1));
            }
        }
        None
    }

    /// `table.key` path of the assignment enclosing `offset`.
    fn field_at(&self, offset: usize) -> Option<String> {
        let (line_no, _) = self.position(offset);
        let mut table: Option<String> = None;
        for (idx, line) in self.text.lines().enumerate() {
            let trimmed = line.trim_start();
            if let Some(header) = trimmed.strip_prefix('[') {
                table = Some(header.split(']').next().unwrap_or("").trim().to_string());
            }
            if idx + 1 == line_no {
                let key = trimmed.split_once('=').map(|(k, _)| k.trim().trim_matches('"').to_string());
                return match (table, key) {
                    (Some(t), Some(k)) => Some(format!("{t}.{k}")),
                    (None, Some(k)) => Some(k),
                    (t, None) => t,
                };
            }
        }
        None
    }

    fn diagnostic(&self, field: &str, message: impl Into<String>) -> Diagnostic {
        let (table, key) = match field.split_once('.') {
            Some((t, k)) => (Some(t), k),
            None => (None, field),
        };
        let pos = self.find(table, key).or_else(|| table.and_then(|t| self.find(None, t)));
        Diagnostic {
            field: Some(field.to_string()),
            line: pos.map(|p| p.0),
            column: pos.map(|p| p.1),
            message: message.into(),
        }
    }
}

fn core_diagnostic(loc: &Locator<'_>, table: &str, err: CoreError) -> Diagnostic {
    match err {
        CoreError::InvalidParameter { field, reason } => loc.diagnostic(&format!("{table}.{field}"), reason),
        other => Diagnostic {
            field: Some(table.to_string()),
            line: loc.find(None, table).map(|p| p.0),
            column: loc.find(None, table).map(|p| p.1),
            message: other.to_string(),
        },
    }
}

/// Parse and validate configuration text. `origin` names the source in
/// error messages.
pub fn parse_config(text: &str, origin: &str, overrides: &Overrides) -> Result<ScenarioConfig, ConfigError> {
    let loc = Locator { text };
    let invalid = |diagnostics: Vec<Diagnostic>| ConfigError::Invalid {
        origin: origin.to_string(),
        diagnostics,
    };
    let raw: RawConfig = toml::from_str(text).map_err(|e| {
        let (line, column, field) = match e.span() {
            Some(span) => {
                let (l, c) = loc.position(span.start);
                (Some(l), Some(c), loc.field_at(span.start))
            }
            None => (None, None, None),
        };
        invalid(vec![Diagnostic {
            field,
            line,
            column,
            message: e.message().to_string(),
        }])
    })?;
    resolve(raw, &loc, overrides).map_err(invalid)
}

/// Read, parse and validate a configuration file.
pub fn validate_config(path: &Path) -> Result<ScenarioConfig, ConfigError> {
    load_config(Some(path), &Overrides::default())
}

/// Load `path` (or start from an empty document) and apply `overrides`.
pub fn load_config(path: Option<&Path>, overrides: &Overrides) -> Result<ScenarioConfig, ConfigError> {
    match path {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
                path: path.to_path_buf(),
                source,
            })?;
            parse_config(&text, &path.display().to_string(), overrides)
        }
        None => parse_config("", "<defaults>", overrides),
    }
}

fn resolve(raw: RawConfig, loc: &Locator<'_>, ov: &Overrides) -> Result<ScenarioConfig, Vec<Diagnostic>> {
    let mut diags = Vec::new();

    if let Some(v) = raw.version {
        if v != CONFIG_VERSION {
            diags.push(loc.diagnostic("version", format!("unsupported version {v}, expected {CONFIG_VERSION}")));
        }
    }
    let scenario = match (raw.scenario, ov.scenario) {
        (Some(file), Some(cmd)) if file != cmd => {
            diags.push(loc.diagnostic(
                "scenario",
                format!("file declares `{file}` but `{cmd}` was requested"),
            ));
            cmd
        }
        (_, Some(cmd)) => cmd,
        (Some(file), None) => file,
        (None, None) => Scenario::Custom,
    };
    let mut cfg = ScenarioConfig::preset(scenario);

    if let Some(s) = raw.statistics {
        cfg.statistics = s;
    }
    if let Some(dir) = raw.output_dir {
        cfg.output_dir = dir;
    }
    if let Some(out) = raw.output {
        cfg.output = out;
    }
    if let Some(integrator) = raw.integrator {
        cfg.integrator = integrator;
    }

    if let Some(params) = raw.params {
        if scenario.pins_physics() {
            diags.push(loc.diagnostic("params", format!("physical parameters are fixed by scenario `{scenario}`")));
        } else {
            apply_params(&mut cfg.params, params, loc, &mut diags);
        }
    }
    if let Some(pairs) = raw.initial_pairs {
        if scenario.pins_physics() {
            diags.push(loc.diagnostic("initial_pairs", format!("initial conditions are fixed by scenario `{scenario}`")));
        } else if pairs.is_empty() {
            diags.push(loc.diagnostic("initial_pairs", "must list at least one pair"));
        } else {
            if pairs.iter().flatten().any(|v| !v.is_finite()) {
                diags.push(loc.diagnostic("initial_pairs", "heights must be finite"));
            }
            cfg.initial_pairs = pairs;
        }
    }

    let explicit_pairs = !cfg.initial_pairs.is_empty();
    let batch_fixed = scenario.pins_sampler() || (explicit_pairs && !scenario.pins_physics());
    if let Some(sampler) = raw.sampler {
        if batch_fixed && (sampler.method.is_some() || sampler.n_pairs.is_some()) {
            diags.push(loc.diagnostic("sampler", "the initial conditions are an explicit list of pairs"));
        }
        if let Some(m) = sampler.method {
            cfg.sampler.method = m;
        }
        if let Some(n) = sampler.n_pairs {
            cfg.sampler.n_pairs = n;
        }
        if let Some(seed) = sampler.seed {
            cfg.sampler.seed = seed;
        }
    }

    if let Some(s) = ov.statistics {
        cfg.statistics = s;
    }
    if let Some(seed) = ov.seed {
        cfg.sampler.seed = seed;
    }
    if let Some(n) = ov.n_pairs {
        if batch_fixed {
            diags.push(Diagnostic {
                field: Some("sampler.n_pairs".into()),
                line: None,
                column: None,
                message: "--n-pairs does not apply to an explicit list of pairs".into(),
            });
        }
        cfg.sampler.n_pairs = n;
    }
    if let Some(dir) = &ov.output_dir {
        cfg.output_dir = dir.clone();
    }
    if let Some(tol) = ov.tolerance {
        cfg.integrator = cfg.integrator.with_tolerance(tol);
    }
    if explicit_pairs {
        cfg.sampler.n_pairs = cfg.initial_pairs.len();
    }

    if let Err(e) = cfg.params.validate() {
        diags.push(core_diagnostic(loc, "params", e));
    } else if cfg.params.ky != 0.0 {
        diags.push(loc.diagnostic("params.ky", "the pair dynamics require ky = 0"));
    }
    if let Err(e) = cfg.sampler.validate() {
        diags.push(core_diagnostic(loc, "sampler", e));
    }
    if cfg.sampler.seed > i64::MAX as u64 {
        diags.push(loc.diagnostic("sampler.seed", format!("must be at most {}", i64::MAX)));
    }
    if let Err(e) = cfg.integrator.validate() {
        diags.push(core_diagnostic(loc, "integrator", e));
    }
    if cfg.output_dir.as_os_str().is_empty() {
        diags.push(loc.diagnostic("output_dir", "must not be empty"));
    }

    if diags.is_empty() {
        Ok(cfg)
    } else {
        Err(diags)
    }
}

fn apply_params(p: &mut PhysicalParams, raw: RawParams, loc: &Locator<'_>, diags: &mut Vec<Diagnostic>) {
    let set = |slot: &mut f64, v: Option<f64>| {
        if let Some(v) = v {
            *slot = v;
        }
    };
    set(&mut p.mass, raw.mass);
    set(&mut p.hbar, raw.hbar);
    set(&mut p.sigma0, raw.sigma0);
    set(&mut p.slit_offset, raw.slit_offset);
    set(&mut p.kx, raw.kx);
    set(&mut p.ky, raw.ky);
    set(&mut p.source_half_separation, raw.source_half_separation);
    set(&mut p.flight_distance, raw.flight_distance);
    match (raw.kx, raw.x_velocity) {
        (Some(_), Some(_)) => diags.push(loc.diagnostic("params.x_velocity", "give either kx or x_velocity, not both")),
        (None, Some(v)) if !(v.is_finite() && v > 0.0) => {
            diags.push(loc.diagnostic("params.x_velocity", format!("must be finite and > 0, got {v}")))
        }
        (None, Some(v)) => *p = p.with_x_velocity(v),
        _ => {}
    }
}
