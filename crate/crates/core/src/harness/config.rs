use std::f64::consts::TAU;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::admissible::AdmissibleDatum;
use crate::berkovich::ProbeOptions;
use crate::error::{Error, Result};
use crate::laurent::C64;
use crate::parser::{parse_family, parse_sections, RationalMapFamily};

/// Experiment configuration, read from TOML. Unknown keys are rejected.
///
/// ```toml
/// family = "z^2 + 1/t"
/// r = 0.5
///
/// [t_grid]
/// moduli = [1e-2, 1e-3, 1e-4]   # or: j_min/j_max for r·10^-j
/// phases = 8
///
/// [sampler]
/// seed = 1
/// n_burn = 100
/// n_keep = 20000
/// ```
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Rational map family, e.g. `"z^2 + 1/t"` or `"[t*w0^2 : t*w1^2]"`.
    #[serde(default)]
    pub family: Option<String>,
    #[serde(default = "default_r")]
    pub r: f64,
    #[serde(default)]
    pub t_grid: TGrid,
    #[serde(default)]
    pub datum: Option<DatumConfig>,
    #[serde(default)]
    pub sampler: SamplerConfig,
    #[serde(default)]
    pub green: GreenConfig,
    #[serde(default)]
    pub probes: ProbeOptions,
    #[serde(default)]
    pub circle: Option<CircleConfig>,
    #[serde(default = "default_output")]
    pub output: PathBuf,
}

fn default_r() -> f64 {
    0.5
}

fn default_output() -> PathBuf {
    PathBuf::from("results")
}

/// Parameter grid: moduli times `phases` equally spaced arguments.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TGrid {
    /// Explicit moduli; overrides `j_min..=j_max`.
    #[serde(default)]
    pub moduli: Option<Vec<f64>>,
    /// Default moduli are `r·10^{-j}` for `j = j_min..=j_max`.
    #[serde(default)]
    pub j_min: u32,
    #[serde(default = "default_j_max")]
    pub j_max: u32,
    #[serde(default = "default_phases")]
    pub phases: u32,
}

fn default_j_max() -> u32 {
    6
}

fn default_phases() -> u32 {
    8
}

impl Default for TGrid {
    fn default() -> Self {
        TGrid {
            moduli: None,
            j_min: 0,
            j_max: default_j_max(),
            phases: default_phases(),
        }
    }
}

/// One parameter value of the grid.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridCell {
    pub modulus_index: usize,
    pub phase_index: usize,
    pub t: C64,
}

impl TGrid {
    pub fn moduli(&self, r: f64) -> Vec<f64> {
        match &self.moduli {
            Some(m) => m.clone(),
            None => (self.j_min..=self.j_max)
                .map(|j| r * 10f64.powi(-(j as i32)))
                .collect(),
        }
    }

    /// Cells ordered by modulus, then phase.
    pub fn cells(&self, r: f64) -> Vec<GridCell> {
        let phases = self.phases.max(1) as usize;
        self.moduli(r)
            .iter()
            .enumerate()
            .flat_map(|(i, &m)| {
                (0..phases).map(move |k| GridCell {
                    modulus_index: i,
                    phase_index: k,
                    t: C64::from_polar(m, TAU * k as f64 / phases as f64),
                })
            })
            .collect()
    }
}

/// Sections of an admissible datum on `ℙ^k` (binary forms when `k = 1`).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatumConfig {
    pub sections: Vec<String>,
    #[serde(default = "default_degree")]
    pub degree: u32,
    #[serde(default = "default_k")]
    pub k: usize,
}

fn default_degree() -> u32 {
    1
}

fn default_k() -> usize {
    1
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SamplerConfig {
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default = "default_burn")]
    pub n_burn: usize,
    #[serde(default = "default_keep")]
    pub n_keep: usize,
}

fn default_seed() -> u64 {
    1
}

fn default_burn() -> usize {
    100
}

fn default_keep() -> usize {
    20_000
}

impl Default for SamplerConfig {
    fn default() -> Self {
        SamplerConfig {
            seed: default_seed(),
            n_burn: default_burn(),
            n_keep: default_keep(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GreenConfig {
    #[serde(default = "default_n_max")]
    pub n_max: u32,
    #[serde(default = "default_tol")]
    pub tol: f64,
}

fn default_n_max() -> u32 {
    6
}

fn default_tol() -> f64 {
    1e-6
}

impl Default for GreenConfig {
    fn default() -> Self {
        GreenConfig {
            n_max: default_n_max(),
            tol: default_tol(),
        }
    }
}

/// Series evaluated along the hybrid circle by `circle-demo`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CircleConfig {
    pub series: String,
    /// Points `|z| = r·2^{-j}` for `j = 0..=j_max`.
    #[serde(default = "default_circle_j_max")]
    pub j_max: u32,
}

fn default_circle_j_max() -> u32 {
    20
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig =
            toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.r > 0.0 && self.r < 1.0) {
            return Err(Error::Config(format!("r = {} must lie in (0, 1)", self.r)));
        }
        if self.t_grid.phases == 0 {
            return Err(Error::Config("t_grid.phases must be ≥ 1".into()));
        }
        if self.t_grid.moduli.is_none() && self.t_grid.j_min > self.t_grid.j_max {
            return Err(Error::Config("t_grid.j_min exceeds j_max".into()));
        }
        for m in self.t_grid.moduli(self.r) {
            if !(m > 0.0 && m <= self.r) {
                return Err(Error::Config(format!(
                    "grid modulus {m} outside the punctured disk of radius r = {}",
                    self.r
                )));
            }
        }
        if self.sampler.n_keep == 0 {
            return Err(Error::Config("sampler.n_keep must be ≥ 1".into()));
        }
        if self.green.n_max == 0 || self.green.tol.is_nan() || self.green.tol <= 0.0 {
            return Err(Error::Config(
                "green.n_max ≥ 1 and green.tol > 0 required".into(),
            ));
        }
        if self.probes.q == 0 || self.probes.s_min > self.probes.s_max {
            return Err(Error::Config("probes need q ≥ 1 and s_min ≤ s_max".into()));
        }
        Ok(())
    }

    /// SHA-256 of the canonical JSON form, hex encoded.
    pub fn hash(&self) -> String {
        let json = serde_json::to_string(self).expect("config serializes");
        hex::encode(Sha256::digest(json.as_bytes()))
    }

    pub fn family(&self) -> Result<RationalMapFamily> {
        let text = self
            .family
            .as_deref()
            .ok_or_else(|| Error::Config("this experiment needs `family`".into()))?;
        parse_family(text)
    }

    pub fn datum(&self) -> Result<AdmissibleDatum> {
        let d = self
            .datum
            .as_ref()
            .ok_or_else(|| Error::Config("this experiment needs a [datum] section".into()))?;
        parse_sections(&d.sections, d.k, d.degree)
    }
}
