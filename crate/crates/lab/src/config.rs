//! Run configuration: a strict TOML schema with unknown-key rejection.

use std::path::{Path, PathBuf};

use clap::ValueEnum;
use dicke_core::model::{ConvergenceTolerances, Parity};
use dicke_core::params::default_efficient_cutoff;
use dicke_core::{BasisKind, BasisSpec, ModelParams};
use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Pipeline {
    Spectrum,
    ChaosMap,
    RMap,
    Peres,
    EthStats,
    Entropy,
    TcCompare,
    Dos,
}

impl Pipeline {
    pub fn name(self) -> &'static str {
        match self {
            Pipeline::Spectrum => "spectrum",
            Pipeline::ChaosMap => "chaos-map",
            Pipeline::RMap => "r-map",
            Pipeline::Peres => "peres",
            Pipeline::EthStats => "eth-stats",
            Pipeline::Entropy => "entropy",
            Pipeline::TcCompare => "tc-compare",
            Pipeline::Dos => "dos",
        }
    }

    pub fn is_randomized(self) -> bool {
        matches!(self, Pipeline::ChaosMap)
    }
}

/// Either explicit values or `count` evenly spaced points from `start` to `stop`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Grid {
    Values(Vec<f64>),
    Linear { start: f64, stop: f64, count: usize },
}

impl Grid {
    pub fn points(&self) -> Vec<f64> {
        match self {
            Grid::Values(v) => v.clone(),
            Grid::Linear { start, stop, count } => match count {
                0 => Vec::new(),
                1 => vec![*start],
                n => (0..*n)
                    .map(|k| start + (stop - start) * k as f64 / (*n - 1) as f64)
                    .collect(),
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ParitySelection {
    Even,
    Odd,
    Both,
}

impl ParitySelection {
    pub fn sectors(self) -> Vec<Parity> {
        match self {
            ParitySelection::Even => vec![Parity::Even],
            ParitySelection::Odd => vec![Parity::Odd],
            ParitySelection::Both => vec![Parity::Even, Parity::Odd],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BasisConfig {
    pub kind: BasisKind,
    /// `n_max` or `N_max`; the reference truncation when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cutoff: Option<usize>,
}

impl Default for BasisConfig {
    fn default() -> Self {
        BasisConfig {
            kind: BasisKind::Efficient,
            cutoff: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputConfig {
    pub dir: PathBuf,
    pub cache: bool,
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig {
            dir: PathBuf::from("dicke-out"),
            cache: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ChaosMapConfig {
    pub epsilons: Grid,
    pub gammas: Grid,
    pub samples_per_cell: usize,
    pub lambda_cut: f64,
    pub t_final: f64,
}

impl Default for ChaosMapConfig {
    fn default() -> Self {
        ChaosMapConfig {
            epsilons: Grid::Linear { start: -2.0, stop: 1.0, count: 13 },
            gammas: Grid::Linear { start: 0.0, stop: 1.5, count: 7 },
            samples_per_cell: 200,
            lambda_cut: dicke_core::classical::DEFAULT_LAMBDA_CUT,
            t_final: dicke_core::classical::DEFAULT_LYAPUNOV_TIME,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RMapConfig {
    pub epsilons: Grid,
    pub gammas: Grid,
    /// Levels per moving window; `max(50, levels / 20)` when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub window: Option<usize>,
}

impl Default for RMapConfig {
    fn default() -> Self {
        RMapConfig {
            epsilons: Grid::Linear { start: -2.0, stop: 2.0, count: 41 },
            gammas: Grid::Linear { start: 0.1, stop: 1.5, count: 8 },
            window: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EthConfig {
    /// Open energy interval for the distribution statistics.
    pub range: [f64; 2],
    /// Lower edge of the region reported for diagonal fluctuations.
    pub fluctuation_floor: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub window: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub omega_max: Option<f64>,
}

impl Default for EthConfig {
    fn default() -> Self {
        EthConfig {
            range: [0.5, 1.0],
            fluctuation_floor: -0.5,
            window: None,
            omega_max: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EntropyConfig {
    pub entanglement: bool,
    pub shannon_fock: bool,
    pub shannon_efficient: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub window: Option<usize>,
}

impl Default for EntropyConfig {
    fn default() -> Self {
        EntropyConfig {
            entanglement: true,
            shannon_fock: true,
            shannon_efficient: true,
            window: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TcCompareConfig {
    /// Largest excitation number `Lambda` diagonalized.
    pub lambda_max: usize,
    /// Energy interval of the entanglement scatter comparison.
    pub range: [f64; 2],
}

impl Default for TcCompareConfig {
    fn default() -> Self {
        TcCompareConfig {
            lambda_max: 200,
            range: [0.5, 1.0],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DosConfig {
    pub epsilons: Grid,
    /// Also count converged quantum levels (both parities).
    pub quantum_count: bool,
}

impl Default for DosConfig {
    fn default() -> Self {
        DosConfig {
            epsilons: Grid::Linear { start: -2.2, stop: 2.0, count: 85 },
            quantum_count: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Must agree with the pipeline named on the command line when given.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pipeline: Option<Pipeline>,
    #[serde(default)]
    pub seed: u64,
    pub model: ModelParams,
    #[serde(default)]
    pub basis: BasisConfig,
    #[serde(default = "default_parity")]
    pub parity: ParitySelection,
    #[serde(default)]
    pub convergence: ConvergenceTolerances,
    #[serde(default)]
    pub output: OutputConfig,
    #[serde(default)]
    pub chaos_map: ChaosMapConfig,
    #[serde(default)]
    pub r_map: RMapConfig,
    #[serde(default)]
    pub eth: EthConfig,
    #[serde(default)]
    pub entropy: EntropyConfig,
    #[serde(default)]
    pub tc_compare: TcCompareConfig,
    #[serde(default)]
    pub dos: DosConfig,
}

fn default_parity() -> ParitySelection {
    ParitySelection::Even
}

impl RunConfig {
    pub fn minimal(model: ModelParams) -> Self {
        RunConfig {
            pipeline: None,
            seed: 0,
            model,
            basis: BasisConfig::default(),
            parity: default_parity(),
            convergence: ConvergenceTolerances::default(),
            output: OutputConfig::default(),
            chaos_map: ChaosMapConfig::default(),
            r_map: RMapConfig::default(),
            eth: EthConfig::default(),
            entropy: EntropyConfig::default(),
            tc_compare: TcCompareConfig::default(),
            dos: DosConfig::default(),
        }
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let de = toml::Deserializer::new(text);
        let cfg: RunConfig = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            LabError::config(path, e.into_inner().message().trim().to_string())
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| LabError::config(path.display().to_string(), e.to_string()))?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn basis(&self) -> BasisSpec {
        let cutoff = self.basis.cutoff.unwrap_or_else(|| match self.basis.kind {
            BasisKind::Efficient => default_efficient_cutoff(&self.model),
            // the Fock basis needs about three times the displaced cutoff
            BasisKind::Fock => 3 * default_efficient_cutoff(&self.model),
        });
        BasisSpec {
            kind: self.basis.kind,
            boson_cutoff: cutoff,
        }
    }

    fn validate(&self) -> Result<()> {
        let positive = |path: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(LabError::config(path, format!("must be positive, got {v}")))
            }
        };
        positive("convergence.energy", self.convergence.energy)?;
        positive("convergence.tail", self.convergence.tail)?;
        positive("chaos_map.lambda_cut", self.chaos_map.lambda_cut)?;
        positive("chaos_map.t_final", self.chaos_map.t_final)?;
        if self.chaos_map.samples_per_cell == 0 {
            return Err(LabError::config("chaos_map.samples_per_cell", "must be at least 1"));
        }
        for (path, grid) in [
            ("chaos_map.epsilons", &self.chaos_map.epsilons),
            ("chaos_map.gammas", &self.chaos_map.gammas),
            ("r_map.epsilons", &self.r_map.epsilons),
            ("r_map.gammas", &self.r_map.gammas),
            ("dos.epsilons", &self.dos.epsilons),
        ] {
            let pts = grid.points();
            if pts.is_empty() || pts.iter().any(|v| !v.is_finite()) {
                return Err(LabError::config(path, "grid must hold at least one finite value"));
            }
        }
        for path_grid in [("chaos_map.gammas", &self.chaos_map.gammas), ("r_map.gammas", &self.r_map.gammas)] {
            if path_grid.1.points().iter().any(|&g| g < 0.0) {
                return Err(LabError::config(path_grid.0, "couplings must be nonnegative"));
            }
        }
        for (path, [lo, hi]) in [
            ("eth.range", self.eth.range),
            ("tc_compare.range", self.tc_compare.range),
        ] {
            if !(lo < hi) {
                return Err(LabError::config(path, format!("empty interval [{lo}, {hi}]")));
            }
        }
        if let Some(w) = self.r_map.window.filter(|&w| w < 10) {
            return Err(LabError::config("r_map.window", format!("window of {w} levels is below 10")));
        }
        if self.eth.window == Some(0) || self.entropy.window == Some(0) {
            return Err(LabError::config("window", "windows must hold at least one level"));
        }
        Ok(())
    }
}
