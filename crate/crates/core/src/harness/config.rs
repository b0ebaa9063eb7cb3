//! Run configuration: a JSON document, optionally layered over a named preset.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::potential::{Potential, PotentialKind};
use crate::schemes::{ModelParams, Scheme};
use crate::spectral::Grid;

use super::presets::{self, Example};

/// Environment variable that relocates relative output paths.
pub const OUTPUT_DIR_ENV: &str = "ISAV_OUTPUT_DIR";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub nx: usize,
    pub ny: usize,
    pub lx: f64,
    pub ly: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    pub alpha: f64,
    pub gamma: f64,
    #[serde(default, skip_serializing_if = "is_false")]
    pub dealias: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PotentialName {
    DoubleWell,
    FloryHugginsReg,
    Constant,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PresetTag {
    #[serde(rename = "paper-preset")]
    PaperPreset,
}

/// A number, or the literal string `"paper-preset"` resolved from the example
/// the initial condition belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ParamValue {
    Number(f64),
    Preset(PresetTag),
}

impl Default for ParamValue {
    fn default() -> Self {
        ParamValue::Preset(PresetTag::PaperPreset)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PotentialConfig {
    pub kind: PotentialName,
    pub eps: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma: Option<f64>,
    #[serde(default)]
    pub c_add: ParamValue,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum InitConfig {
    /// `1 + 0.5 sin x sin y`
    Ex1,
    /// Two squares at +1 in a −1 background.
    Squares,
    /// Two disks at 0.7 in a 0.3 background.
    Disks,
    /// `0.5 + 0.2 U[−1, 1]`, reproducible from `seed`.
    Random {
        #[serde(default)]
        seed: u64,
    },
    /// A snapshot file written by this crate.
    File { path: PathBuf },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub series_path: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub field_snapshot_times: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub snapshot_dir: Option<PathBuf>,
    /// Emit every k-th step (the first and last steps are always emitted).
    #[serde(default = "one", skip_serializing_if = "is_one")]
    pub record_every: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub preset: Option<String>,
    pub grid: GridConfig,
    pub model: ModelConfig,
    pub potential: PotentialConfig,
    pub scheme: Scheme,
    #[serde(rename = "S", default)]
    pub s: ParamValue,
    pub tau: f64,
    pub t_end: f64,
    pub init: InitConfig,
    #[serde(default)]
    pub outputs: OutputConfig,
    #[serde(default)]
    pub assert_energy: bool,
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig {
            series_path: None,
            field_snapshot_times: Vec::new(),
            snapshot_dir: None,
            record_every: 1,
        }
    }
}

fn is_false(b: &bool) -> bool {
    !*b
}

fn one() -> usize {
    1
}

fn is_one(k: &usize) -> bool {
    *k == 1
}

/// Fully resolved, validated run description.
#[derive(Debug, Clone)]
pub struct Resolved {
    pub grid: Grid,
    pub params: ModelParams,
    pub scheme: Scheme,
    pub steps: usize,
    pub example: Option<Example>,
}

impl RunConfig {
    /// Parses a configuration document, expanding its preset if it names one.
    pub fn from_json_str(text: &str) -> Result<Self> {
        let doc: Value = serde_json::from_str(text).map_err(|e| Error::config("<document>", e.to_string()))?;
        let merged = match doc.get("preset").and_then(Value::as_str) {
            Some(name) => {
                let mut base = presets::preset_value(name)
                    .ok_or_else(|| Error::config("preset", format!("unknown preset `{name}`")))?;
                merge_patch(&mut base, &doc);
                base
            }
            None => doc,
        };
        let cfg: RunConfig = serde_path_to_error::deserialize(merged)
            .map_err(|e| Error::config(e.path().to_string(), e.inner().to_string()))?;
        cfg.resolve()?;
        Ok(cfg)
    }

    pub fn to_json_string(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("config serializes");
        s.push('\n');
        s
    }

    pub fn example(&self) -> Option<Example> {
        match self.init {
            InitConfig::Ex1 => Some(Example::Ex1),
            InitConfig::Squares => Some(Example::Ex2),
            InitConfig::Disks => Some(Example::Ex3),
            InitConfig::Random { .. } => Some(Example::Ex4),
            InitConfig::File { .. } => None,
        }
    }

    pub fn potential(&self) -> Result<Potential> {
        let pc = &self.potential;
        let kind = match pc.kind {
            PotentialName::DoubleWell => PotentialKind::DoubleWell,
            PotentialName::Constant => PotentialKind::Constant,
            PotentialName::FloryHugginsReg => PotentialKind::FloryHugginsReg {
                beta: pc.beta.ok_or_else(|| Error::config("potential.beta", "required for flory-huggins-reg"))?,
                sigma: pc
                    .sigma
                    .ok_or_else(|| Error::config("potential.sigma", "required for flory-huggins-reg"))?,
            },
        };
        let c_add = match pc.c_add {
            ParamValue::Number(c) => c,
            ParamValue::Preset(_) => self.example().map_or(0.0, |ex| ex.c_add(pc.eps)),
        };
        Potential::new(kind, pc.eps, c_add).map_err(|e| param_error("potential", e))
    }

    pub fn stabilization(&self) -> Result<f64> {
        match self.s {
            ParamValue::Number(s) => Ok(s),
            ParamValue::Preset(_) => self
                .example()
                .map(|ex| ex.stabilization(self.potential.eps))
                .ok_or_else(|| Error::config("S", "`paper-preset` needs one of the example initial conditions; give a number")),
        }
    }

    /// Number of steps `t_end / tau`, which must be an integer up to rounding.
    pub fn steps(&self) -> Result<usize> {
        if !(self.tau.is_finite() && self.tau > 0.0) {
            return Err(Error::config("tau", format!("{} must be positive", self.tau)));
        }
        if !(self.t_end.is_finite() && self.t_end > 0.0) {
            return Err(Error::config("t_end", format!("{} must be positive", self.t_end)));
        }
        let ratio = self.t_end / self.tau;
        let n = ratio.round();
        if (ratio - n).abs() > n * f64::EPSILON || n < 1.0 {
            return Err(Error::config(
                "t_end",
                format!("t_end / tau = {ratio} is not an integer step count"),
            ));
        }
        Ok(n as usize)
    }

    pub fn resolve(&self) -> Result<Resolved> {
        let g = &self.grid;
        let grid = Grid::new(g.nx, g.ny, g.lx, g.ly).map_err(|e| Error::config("grid", e.to_string()))?;
        let alpha = self.model.alpha;
        if !(0.0..=1.0).contains(&alpha) {
            return Err(Error::config("model.alpha", format!("{alpha} is outside (0, 1] ∪ {{0}}")));
        }
        if !(self.model.gamma.is_finite() && self.model.gamma > 0.0) {
            return Err(Error::config("model.gamma", "must be positive"));
        }
        let potential = self.potential()?;
        let s = self.stabilization()?;
        let steps = self.steps()?;
        if self.outputs.record_every == 0 {
            return Err(Error::config("outputs.record_every", "must be at least 1"));
        }
        if let Some(t) = self.outputs.field_snapshot_times.iter().find(|t| !(**t >= 0.0 && **t <= self.t_end)) {
            return Err(Error::config("outputs.field_snapshot_times", format!("{t} is outside [0, t_end]")));
        }
        let mut params = ModelParams::new(alpha, self.model.gamma, s, self.tau, potential).map_err(|e| param_error("", e))?;
        params.dealias = self.model.dealias;
        Ok(Resolved {
            grid,
            params,
            scheme: self.scheme,
            steps,
            example: self.example(),
        })
    }

    /// Same configuration with a different time step, keeping `t_end`.
    pub fn with_tau(&self, tau: f64) -> Self {
        RunConfig { tau, ..self.clone() }
    }

    pub fn with_grid(&self, nx: usize, ny: usize) -> Self {
        let mut c = self.clone();
        c.grid.nx = nx;
        c.grid.ny = ny;
        c
    }

    pub fn with_scheme(&self, scheme: Scheme) -> Self {
        RunConfig { scheme, ..self.clone() }
    }

    /// Strips output settings so the run only produces in-memory results.
    pub fn quiet(&self) -> Self {
        RunConfig {
            outputs: OutputConfig::default(),
            ..self.clone()
        }
    }
}

fn param_error(prefix: &str, e: Error) -> Error {
    match e {
        Error::InvalidParameter { name, reason } => {
            let path = if prefix.is_empty() {
                name.to_string()
            } else {
                format!("{prefix}.{name}")
            };
            Error::config(path, reason)
        }
        other => other,
    }
}

/// RFC 7396 merge patch, except that an object whose `kind` changes is
/// replaced rather than merged, so fields of the old variant do not linger.
fn merge_patch(target: &mut Value, patch: &Value) {
    match (target, patch) {
        (Value::Object(t), Value::Object(p)) if p.get("kind").is_some_and(|k| Some(k) != t.get("kind")) => {
            t.clear();
            merge_patch_into(t, p);
        }
        (Value::Object(t), Value::Object(p)) => merge_patch_into(t, p),
        (t, p) => *t = p.clone(),
    }
}

fn merge_patch_into(t: &mut serde_json::Map<String, Value>, p: &serde_json::Map<String, Value>) {
    for (k, v) in p {
        if v.is_null() {
            t.remove(k);
        } else {
            merge_patch(t.entry(k.clone()).or_insert(Value::Null), v);
        }
    }
}

/// Reads and validates a configuration file.
pub fn load_config(path: impl AsRef<Path>) -> Result<RunConfig> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    RunConfig::from_json_str(&text)
}

/// Resolves a relative output path against `$ISAV_OUTPUT_DIR` when it is set.
pub fn output_path(p: &Path) -> PathBuf {
    match std::env::var_os(OUTPUT_DIR_ENV) {
        Some(dir) if p.is_relative() => PathBuf::from(dir).join(p),
        _ => p.to_path_buf(),
    }
}
