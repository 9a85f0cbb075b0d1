//! Scenario files: flat TOML with one optional section per analysis.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use goldstone_core::{Beta, ModelParams, ModelTag, MomentumGrid, Potential};
use serde::Deserialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("cannot parse {path}: {source}")]
    Parse { path: PathBuf, source: Box<toml::de::Error> },
    #[error("unknown check `{0}` (see `goldstone list-checks`)")]
    UnknownCheck(String),
    #[error("unknown tolerance `{0}`")]
    UnknownTolerance(String),
    #[error("invalid value for `{name}`: {reason}")]
    Invalid { name: String, reason: String },
}

pub fn invalid(name: impl Into<String>, reason: impl Into<String>) -> ConfigError {
    ConfigError::Invalid { name: name.into(), reason: reason.into() }
}

/// `beta = 1.5` or `beta = "inf"`.
#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(untagged)]
pub enum BetaSetting {
    Finite(f64),
    Named(String),
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum PotentialSetting {
    Gaussian { strength: f64, range: f64 },
    Constant { strength: f64 },
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct ParamsSection {
    pub mass: f64,
    pub beta: BetaSetting,
    pub total_density: f64,
    pub condensate_density: f64,
    pub condensate_amplitude: f64,
    pub coupling: f64,
    pub mu_shift: f64,
    pub potential: PotentialSetting,
}

impl Default for ParamsSection {
    fn default() -> Self {
        let d = ModelParams::default();
        Self {
            mass: d.mass,
            beta: BetaSetting::Finite(1.0),
            total_density: d.total_density,
            condensate_density: d.condensate_density,
            condensate_amplitude: d.condensate_amplitude,
            coupling: d.coupling,
            mu_shift: d.mu_shift,
            potential: PotentialSetting::Gaussian { strength: 1.0, range: 2.0 },
        }
    }
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct GridSection {
    /// Box sides `L`; the finest lattice (largest `L`) drives the q sweeps.
    pub box_sides: Vec<f64>,
    pub cutoff: f64,
    pub q_count: usize,
}

impl Default for GridSection {
    fn default() -> Self {
        Self { box_sides: vec![2.0 * PI * 1e4], cutoff: 0.1, q_count: 16 }
    }
}

#[derive(Debug, Clone, Default, Deserialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSection {
    pub dir: Option<PathBuf>,
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct TwoModeSection {
    pub draws: usize,
    pub eps_max: f64,
    pub c2v_max: f64,
}

impl Default for TwoModeSection {
    fn default() -> Self {
        Self { draws: 50, eps_max: 3.0, c2v_max: 3.0 }
    }
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct OracleSection {
    /// Lattice spacing `a`: box side `aL`, probe mode `L/2`, so `|q| = π/a` for every `L`.
    pub spacing: f64,
    pub sizes: Vec<usize>,
    pub cutoff: f64,
}

impl Default for OracleSection {
    fn default() -> Self {
        Self { spacing: 2.0, sizes: vec![4, 6, 8], cutoff: 6.0 }
    }
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct DeltaSection {
    pub normal_mu_shift: f64,
}

impl Default for DeltaSection {
    fn default() -> Self {
        Self { normal_mu_shift: -0.5 }
    }
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct BchSection {
    pub volumes: Vec<f64>,
    pub excited_cutoff: usize,
}

impl Default for BchSection {
    fn default() -> Self {
        Self { volumes: vec![8.0, 27.0, 64.0], excited_cutoff: 10 }
    }
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct CltSection {
    pub volume: f64,
    pub draws: usize,
    pub t_max: f64,
    pub t_points: usize,
}

impl Default for CltSection {
    fn default() -> Self {
        Self { volume: 125.0, draws: 10, t_max: 1.0, t_points: 10 }
    }
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct ClosureSection {
    pub q: f64,
    pub volumes: Vec<f64>,
    pub virial_momenta: Vec<f64>,
    pub excited_cutoff: usize,
}

impl Default for ClosureSection {
    fn default() -> Self {
        Self { q: 0.4, volumes: vec![8.0, 27.0, 64.0, 125.0], virial_momenta: vec![0.4, 0.3, 0.2], excited_cutoff: 8 }
    }
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct StructureSection {
    pub box_side: f64,
    pub cutoff: f64,
    pub q_count: usize,
}

impl Default for StructureSection {
    fn default() -> Self {
        Self { box_side: 2.0 * PI * 1e4, cutoff: 1e-2, q_count: 16 }
    }
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct CommutatorSection {
    pub period: i64,
    pub n_max: usize,
    pub unit: f64,
    pub volume: f64,
}

impl Default for CommutatorSection {
    fn default() -> Self {
        Self { period: 3, n_max: 4, unit: 0.9, volume: 3.0 }
    }
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct DrawsSection {
    pub draws: usize,
}

impl Default for DrawsSection {
    fn default() -> Self {
        Self { draws: 20 }
    }
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct TruncationSection {
    pub n_max: usize,
    pub box_side: f64,
}

impl Default for TruncationSection {
    fn default() -> Self {
        Self { n_max: 4, box_side: 2.0 }
    }
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioConfig {
    pub model: String,
    pub checks: Vec<String>,
    pub workers: Option<usize>,
    pub seed: u64,
    pub params: ParamsSection,
    pub grid: GridSection,
    pub output: OutputSection,
    pub tolerances: BTreeMap<String, f64>,
    #[serde(rename = "two-mode-gap")]
    pub two_mode: TwoModeSection,
    #[serde(rename = "variance-oracle")]
    pub oracle: OracleSection,
    #[serde(rename = "delta-exponents")]
    pub delta: DeltaSection,
    pub bch: BchSection,
    pub clt: CltSection,
    pub closure: ClosureSection,
    #[serde(rename = "structure-factor")]
    pub structure: StructureSection,
    #[serde(rename = "u-commutator")]
    pub commutator: CommutatorSection,
    pub equivalence: DrawsSection,
    pub truncation: TruncationSection,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            model: "wibg".into(),
            checks: Vec::new(),
            workers: None,
            seed: 1,
            params: ParamsSection::default(),
            grid: GridSection::default(),
            output: OutputSection::default(),
            tolerances: BTreeMap::new(),
            two_mode: TwoModeSection::default(),
            oracle: OracleSection::default(),
            delta: DeltaSection::default(),
            bch: BchSection::default(),
            clt: CltSection::default(),
            closure: ClosureSection::default(),
            structure: StructureSection::default(),
            commutator: CommutatorSection::default(),
            equivalence: DrawsSection::default(),
            truncation: TruncationSection::default(),
        }
    }
}

impl ScenarioConfig {
    pub fn parse(text: &str, path: &Path) -> Result<Self, ConfigError> {
        toml::from_str(text).map_err(|e| ConfigError::Parse { path: path.to_path_buf(), source: Box::new(e) })
    }

    pub fn model_tag(&self) -> Result<ModelTag, ConfigError> {
        self.model.parse().map_err(|e: goldstone_core::Error| invalid("model", e.to_string()))
    }

    pub fn model_params(&self) -> Result<ModelParams, ConfigError> {
        let s = &self.params;
        let beta = match &s.beta {
            BetaSetting::Finite(b) if *b > 0.0 && b.is_finite() => Beta::Finite(*b),
            BetaSetting::Named(n) if matches!(n.as_str(), "inf" | "infinite" | "ground") => Beta::Infinite,
            other => return Err(invalid("params.beta", format!("{other:?} is neither positive nor \"inf\""))),
        };
        let potential = match s.potential {
            PotentialSetting::Gaussian { strength, range } => Potential::Gaussian { strength, range },
            PotentialSetting::Constant { strength } => Potential::Constant { strength },
        };
        let p = ModelParams {
            mass: s.mass,
            beta,
            total_density: s.total_density,
            condensate_density: s.condensate_density,
            condensate_amplitude: s.condensate_amplitude,
            coupling: s.coupling,
            potential,
            mu_shift: s.mu_shift,
        };
        p.validate().map_err(|e| invalid("params", e.to_string()))?;
        Ok(p)
    }

    /// Grid on the largest box side.
    pub fn finest_grid(&self) -> Result<MomentumGrid, ConfigError> {
        let l = self.grid.box_sides.iter().copied().fold(f64::NAN, f64::max);
        MomentumGrid::new(l, self.grid.cutoff, self.grid.q_count).map_err(|e| invalid("grid", e.to_string()))
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.grid.box_sides.is_empty() {
            return Err(invalid("grid.box_sides", "needs at least one box side"));
        }
        if self.workers == Some(0) {
            return Err(invalid("workers", "must be positive"));
        }
        self.model_tag()?;
        self.model_params()?;
        self.finest_grid()?;
        Ok(())
    }
}
