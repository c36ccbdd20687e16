//! Run configuration: JSON schema, layering and validation.
//!
//! A run starts from the defaults of an experiment (or from a preset), then
//! a config file is deep-merged on top, then each `--set key=value` is
//! applied at its dotted path. Only the merged document is deserialised, so
//! a partial config file is fine but an unknown key is not.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use fanowave_core::{GaussianEnvelope, JcParams, PteParams, TleParams};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    Dynamics,
    Spectrum,
    HomSweep,
    TwoPhotonDensity,
}

impl Experiment {
    pub const ALL: [Experiment; 4] = [
        Experiment::Dynamics,
        Experiment::Spectrum,
        Experiment::HomSweep,
        Experiment::TwoPhotonDensity,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Experiment::Dynamics => "dynamics",
            Experiment::Spectrum => "spectrum",
            Experiment::HomSweep => "hom-sweep",
            Experiment::TwoPhotonDensity => "two-photon-density",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|e| e.name() == name)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SystemKind {
    /// Two-level emitter.
    Tle,
    /// Linear cavity with the emitter's single-photon response.
    Cavity,
    /// Cavity containing an emitter.
    Jc,
}

/// Scatterer parameters. Fields that do not apply to `kind` are ignored.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemConfig {
    pub kind: SystemKind,
    #[serde(default)]
    pub omega_e: f64,
    /// Waveguide coupling rate; everything else is in units of it.
    #[serde(default = "one")]
    pub gamma: f64,
    /// Emitter (or cavity) loss into non-guided modes.
    #[serde(default)]
    pub gamma_loss: f64,
    /// Defaults to `omega_e`.
    #[serde(default)]
    pub omega_c: Option<f64>,
    #[serde(default)]
    pub g: f64,
    #[serde(default)]
    pub gamma_c: f64,
    #[serde(default)]
    pub gamma_e: f64,
}

fn one() -> f64 {
    1.0
}

impl SystemConfig {
    fn tle() -> Self {
        Self {
            kind: SystemKind::Tle,
            omega_e: 0.0,
            gamma: 1.0,
            gamma_loss: 0.0,
            omega_c: None,
            g: 0.0,
            gamma_c: 0.0,
            gamma_e: 0.0,
        }
    }

    pub fn tle_params(&self) -> fanowave_core::Result<TleParams> {
        TleParams::new(self.omega_e, self.gamma, self.gamma_loss)
    }

    pub fn jc_params(&self) -> fanowave_core::Result<JcParams> {
        JcParams::new(
            self.omega_c.unwrap_or(self.omega_e),
            self.omega_e,
            self.g,
            self.gamma,
            self.gamma_c,
            self.gamma_e,
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PteConfig {
    pub v: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnvelopeConfig {
    pub k_c: f64,
    pub sigma: f64,
    #[serde(default)]
    pub t_i: f64,
}

/// Frequency grid: `n` points over `centre ± span`. Two-photon runs size
/// their grid automatically when both are null.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    #[serde(default)]
    pub span: Option<f64>,
    #[serde(default)]
    pub n: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DynamicsConfig {
    /// Last trace time; the first is the envelope's `t_i`.
    pub t_end: f64,
    pub n_times: usize,
    /// Every how many trace times a position snapshot is taken.
    pub field_every: usize,
    /// Half-width of the position window; null sizes it from the run.
    pub x_span: Option<f64>,
    pub dx: Option<f64>,
}

impl Default for DynamicsConfig {
    fn default() -> Self {
        Self {
            t_end: 20.0,
            n_times: 201,
            field_every: 5,
            x_span: None,
            dx: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SpectrumConfig {
    /// PTE strengths to scan; null means just `pte.v`.
    pub v_values: Option<Vec<f64>>,
    /// Loss sets: `[gamma_loss]` per entry for an emitter or cavity,
    /// `[gamma_c, gamma_e]` for JC. Null means the system's own values.
    pub dissipation: Option<Vec<Vec<f64>>>,
    /// Set `omega_c = omega_e - Im(Γ̃)/2` for each V (JC only).
    pub omega_c_follows_pte: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TargetChoice {
    Auto,
    On,
    Off,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct HomConfig {
    pub sigma_min: f64,
    pub sigma_max: f64,
    /// Logarithmically spaced widths.
    pub n_sigma: usize,
    pub target: TargetChoice,
    pub optimize: bool,
    pub tol: f64,
}

impl Default for HomConfig {
    fn default() -> Self {
        Self {
            sigma_min: 0.05,
            sigma_max: 2.0,
            n_sigma: 40,
            target: TargetChoice::Auto,
            optimize: true,
            tol: 1e-3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DensityConfig {
    /// Half-width of the written window around `k_c`.
    pub half_width: f64,
    /// Upper bound on rows (and columns) written; the grid is strided.
    pub max_points: usize,
}

impl Default for DensityConfig {
    fn default() -> Self {
        Self {
            half_width: 2.0,
            max_points: 161,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub experiment: Experiment,
    pub system: SystemConfig,
    pub pte: PteConfig,
    pub envelope: EnvelopeConfig,
    pub grid: GridConfig,
    pub output_dir: PathBuf,
    #[serde(default)]
    pub dynamics: DynamicsConfig,
    #[serde(default)]
    pub spectrum: SpectrumConfig,
    #[serde(default)]
    pub hom: HomConfig,
    #[serde(default)]
    pub density: DensityConfig,
}

impl RunConfig {
    /// Defaults for `experiment`: a lossless emitter at `omega_e = 0` with
    /// `Γ = 1`, no PTE, and a resonant photon.
    pub fn default_for(experiment: Experiment) -> Self {
        let (env, grid) = match experiment {
            Experiment::Dynamics => (
                EnvelopeConfig {
                    k_c: 0.0,
                    sigma: 0.73,
                    t_i: -5.0 / 0.73,
                },
                GridConfig {
                    span: Some(20.0),
                    n: Some(2049),
                },
            ),
            Experiment::Spectrum => (
                EnvelopeConfig {
                    k_c: 0.0,
                    sigma: 0.73,
                    t_i: 0.0,
                },
                GridConfig {
                    span: Some(5.0),
                    n: Some(2001),
                },
            ),
            Experiment::HomSweep | Experiment::TwoPhotonDensity => (
                EnvelopeConfig {
                    k_c: 0.0,
                    sigma: 0.43,
                    t_i: 0.0,
                },
                GridConfig {
                    span: None,
                    n: None,
                },
            ),
        };
        Self {
            experiment,
            system: SystemConfig::tle(),
            pte: PteConfig { v: 0.0 },
            envelope: env,
            grid,
            output_dir: PathBuf::from("out").join(experiment.name()),
            dynamics: DynamicsConfig::default(),
            spectrum: SpectrumConfig::default(),
            hom: HomConfig::default(),
            density: DensityConfig::default(),
        }
    }

    pub fn pte(&self) -> fanowave_core::Result<PteParams> {
        PteParams::new(self.pte.v)
    }

    pub fn envelope(&self) -> fanowave_core::Result<GaussianEnvelope> {
        GaussianEnvelope::new(self.envelope.k_c, self.envelope.sigma, self.envelope.t_i)
    }

    /// Checks that do not depend on which experiment runs. Parameter
    /// records are validated again by the library when they are built.
    pub fn validate(&self) -> Result<(), CliError> {
        if self.output_dir.as_os_str().is_empty() {
            return Err(CliError::config("output_dir must not be empty"));
        }
        if let Some(n) = self.grid.n {
            if n < 3 {
                return Err(CliError::config(format!(
                    "grid.n must be at least 3, got {n}"
                )));
            }
        }
        if let Some(s) = self.grid.span {
            if !(s > 0.0 && s.is_finite()) {
                return Err(CliError::config(format!(
                    "grid.span must be positive, got {s}"
                )));
            }
        }
        if self.grid.span.is_some() != self.grid.n.is_some() {
            return Err(CliError::config(
                "grid.span and grid.n must be given together",
            ));
        }
        self.system.tle_params()?;
        if self.system.kind == SystemKind::Jc {
            self.system.jc_params()?;
        }
        self.pte()?;
        self.envelope()?;
        Ok(())
    }
}

/// Recursively merges `over` into `base`; objects merge key by key,
/// everything else is replaced.
pub fn merge(base: &mut Value, over: Value) {
    match (base, over) {
        (Value::Object(b), Value::Object(o)) => {
            for (k, v) in o {
                match b.get_mut(&k) {
                    Some(slot) => merge(slot, v),
                    None => {
                        b.insert(k, v);
                    }
                }
            }
        }
        (slot, v) => *slot = v,
    }
}

/// Applies one `a.b.c=value` override. The value is read as JSON when it
/// parses, otherwise as a bare string, so `pte.v=2` sets a number and
/// `output_dir=runs/x` a string.
pub fn apply_set(doc: &mut Value, assignment: &str) -> Result<(), CliError> {
    let (path, raw) = assignment
        .split_once('=')
        .ok_or_else(|| CliError::config(format!("--set expects key=value, got `{assignment}`")))?;
    let keys: Vec<&str> = path.split('.').collect();
    if keys.iter().any(|k| k.is_empty()) {
        return Err(CliError::config(format!("bad key path `{path}`")));
    }
    let value = serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.to_string()));

    let mut node = doc;
    for key in &keys[..keys.len() - 1] {
        if node.is_null() {
            *node = Value::Object(Map::new());
        }
        let obj = node.as_object_mut().ok_or_else(|| {
            CliError::config(format!("`{path}`: `{key}` is not inside an object"))
        })?;
        node = obj.entry(key.to_string()).or_insert(Value::Null);
    }
    if node.is_null() {
        *node = Value::Object(Map::new());
    }
    let obj = node
        .as_object_mut()
        .ok_or_else(|| CliError::config(format!("`{path}` does not name an object field")))?;
    obj.insert(keys[keys.len() - 1].to_string(), value);
    Ok(())
}

/// Layers a base document, an optional file, `--set` overrides and an
/// optional output directory, then parses and validates the result.
pub fn resolve(
    mut doc: Value,
    file: Option<&Path>,
    sets: &[String],
    out: Option<&Path>,
) -> Result<RunConfig, CliError> {
    if let Some(path) = file {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::config(format!("cannot read config {}: {e}", path.display())))?;
        let over: Value = serde_json::from_str(&text).map_err(|e| {
            CliError::config(format!("config {} is not valid JSON: {e}", path.display()))
        })?;
        if !over.is_object() {
            return Err(CliError::config("config file must hold a JSON object"));
        }
        merge(&mut doc, over);
    }
    for s in sets {
        apply_set(&mut doc, s)?;
    }
    if let Some(dir) = out {
        doc["output_dir"] = Value::String(dir.to_string_lossy().into_owned());
    }
    let cfg: RunConfig = serde_json::from_value(doc)
        .map_err(|e| CliError::config(format!("invalid config: {e}")))?;
    cfg.validate()?;
    Ok(cfg)
}
