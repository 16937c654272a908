//! Run configuration: defaults, JSON config file, flag overrides.
//!
//! Precedence is flags over config file over defaults. Unknown keys in the
//! config file are rejected.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use ivri_core::{HHParams, NoiseSpec, Signal};

use crate::error::{CliError, CliResult};

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct ModelConfig {
    pub g_k: f64,
    pub g_na: f64,
    pub g_l: f64,
    pub e_k: f64,
    pub e_na: f64,
    pub e_l: f64,
}

impl Default for ModelConfig {
    fn default() -> Self {
        let p = HHParams::default();
        ModelConfig { g_k: p.g_k, g_na: p.g_na, g_l: p.g_l, e_k: p.e_k, e_na: p.e_na, e_l: p.e_l }
    }
}

impl ModelConfig {
    pub fn params(&self) -> HHParams {
        HHParams {
            g_k: self.g_k,
            g_na: self.g_na,
            g_l: self.g_l,
            e_k: self.e_k,
            e_na: self.e_na,
            e_l: self.e_l,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, rename_all = "snake_case", tag = "type")]
pub enum SignalConfig {
    Constant { value: f64 },
    Sinusoid { amplitude: f64, period: f64 },
}

impl Default for SignalConfig {
    fn default() -> Self {
        SignalConfig::Constant { value: 0.0 }
    }
}

impl SignalConfig {
    pub fn signal(&self) -> Signal {
        match *self {
            SignalConfig::Constant { value } => Signal::Constant(value),
            SignalConfig::Sinusoid { amplitude, period } => Signal::Sinusoid { amplitude, period },
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct NoiseConfig {
    /// "ou" or "cir".
    pub kind: String,
    pub tau: f64,
    pub gamma: f64,
    /// CIR barrier shift K (ignored for OU).
    pub k_shift: Option<f64>,
    pub signal: SignalConfig,
}

impl Default for NoiseConfig {
    fn default() -> Self {
        NoiseConfig {
            kind: "ou".into(),
            tau: 1.0,
            gamma: 0.5,
            k_shift: None,
            signal: SignalConfig::default(),
        }
    }
}

impl NoiseConfig {
    pub fn spec(&self) -> CliResult<NoiseSpec> {
        let signal = self.signal.signal();
        match self.kind.as_str() {
            "ou" => Ok(NoiseSpec::ou(self.tau, self.gamma, signal)?),
            "cir" => {
                let k = self.k_shift.ok_or_else(|| {
                    CliError::Usage("CIR noise needs a k_shift value".to_string())
                })?;
                Ok(NoiseSpec::cir(self.tau, self.gamma, signal, k)?)
            }
            other => Err(CliError::Usage(format!(
                "unknown noise kind '{other}' (expected 'ou' or 'cir')"
            ))),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct IntegratorConfig {
    pub dt_ode: f64,
    pub dt_sde: f64,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        IntegratorConfig { dt_ode: 0.01, dt_sde: 1e-3 }
    }
}

/// The full run configuration as read from JSON.
#[derive(Clone, Debug, Default, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub model: ModelConfig,
    pub noise: NoiseConfig,
    pub integrator: IntegratorConfig,
    pub seed: u64,
    pub out: Option<String>,
}

impl RunConfig {
    pub fn load(path: &std::path::Path) -> CliResult<RunConfig> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| CliError::Usage(format!("invalid config {}: {e}", path.display())))
    }

    /// Hash of the resolved configuration plus the command description;
    /// stamped into every output file so runs are attributable. The output
    /// directory is excluded, so the same run into different directories
    /// stays byte-identical.
    pub fn hash(&self, command_desc: &str) -> String {
        let mut hashed = self.clone();
        hashed.out = None;
        let canonical = serde_json::to_string(&hashed).expect("config serializes");
        let mut hasher = Sha256::new();
        hasher.update(canonical.as_bytes());
        hasher.update(b"\n");
        hasher.update(command_desc.as_bytes());
        let digest = hasher.finalize();
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }
}
