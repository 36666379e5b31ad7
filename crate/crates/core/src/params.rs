//! Physical parameters of the Dicke Hamiltonian and the truncated basis it is
//! represented in.

use serde::{Deserialize, Serialize};

use crate::error::{DickeError, Result};

/// Field frequency `omega`, atomic splitting `omega0`, coupling `gamma` and
/// pseudo-spin `j = N/2`.
///
/// `j` is stored as `2j` so that half-integer spins are exact.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawParams", into = "RawParams")]
pub struct ModelParams {
    omega: f64,
    omega0: f64,
    gamma: f64,
    twice_j: u32,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawParams {
    omega: f64,
    omega0: f64,
    gamma: f64,
    j: f64,
}

impl TryFrom<RawParams> for ModelParams {
    type Error = DickeError;

    fn try_from(raw: RawParams) -> Result<Self> {
        ModelParams::new(raw.omega, raw.omega0, raw.gamma, raw.j)
    }
}

impl From<ModelParams> for RawParams {
    fn from(p: ModelParams) -> Self {
        RawParams {
            omega: p.omega,
            omega0: p.omega0,
            gamma: p.gamma,
            j: p.j(),
        }
    }
}

impl ModelParams {
    pub fn new(omega: f64, omega0: f64, gamma: f64, j: f64) -> Result<Self> {
        if !(omega.is_finite() && omega > 0.0) {
            return Err(DickeError::param(format!("omega must be > 0, got {omega}")));
        }
        if !(omega0.is_finite() && omega0 > 0.0) {
            return Err(DickeError::param(format!("omega0 must be > 0, got {omega0}")));
        }
        if !(gamma.is_finite() && gamma >= 0.0) {
            return Err(DickeError::param(format!("gamma must be >= 0, got {gamma}")));
        }
        let twice = 2.0 * j;
        if !(twice.is_finite() && twice >= 1.0 && (twice - twice.round()).abs() < 1e-12) {
            return Err(DickeError::param(format!(
                "j must be a positive half-integer, got {j}"
            )));
        }
        Ok(ModelParams {
            omega,
            omega0,
            gamma,
            twice_j: twice.round() as u32,
        })
    }

    /// Resonant parameters `omega = omega0 = 1`.
    pub fn resonant(gamma: f64, j: f64) -> Result<Self> {
        Self::new(1.0, 1.0, gamma, j)
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn omega0(&self) -> f64 {
        self.omega0
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn j(&self) -> f64 {
        self.twice_j as f64 / 2.0
    }

    pub fn twice_j(&self) -> u32 {
        self.twice_j
    }

    /// Number of atomic levels, `2j + 1`.
    pub fn atomic_dim(&self) -> usize {
        self.twice_j as usize + 1
    }

    /// Critical coupling of the superradiant transition.
    pub fn gamma_c(&self) -> f64 {
        (self.omega * self.omega0).sqrt() / 2.0
    }

    /// Displacement scale `G = 2 gamma / (omega sqrt(2j))` of the efficient basis.
    pub fn displacement_scale(&self) -> f64 {
        2.0 * self.gamma / (self.omega * (self.twice_j as f64).sqrt())
    }

    /// Effective Planck constant `1/j`.
    pub fn hbar_eff(&self) -> f64 {
        1.0 / self.j()
    }

    pub fn with_gamma(&self, gamma: f64) -> Result<Self> {
        Self::new(self.omega, self.omega0, gamma, self.j())
    }

    pub fn with_j(&self, j: f64) -> Result<Self> {
        Self::new(self.omega, self.omega0, self.gamma, j)
    }

    /// Magnetic quantum number `m = -j + index` for atomic index `0..=2j`.
    pub fn m_of(&self, index: usize) -> f64 {
        index as f64 - self.j()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BasisKind {
    /// Product states `|n> (x) |j, m_z>`.
    Fock,
    /// Displaced product states `|N>_{m_x} (x) |j, m_x>`.
    Efficient,
}

/// A truncated product basis. States are indexed boson-major:
/// `index = boson * (2j + 1) + (m + j)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BasisSpec {
    pub kind: BasisKind,
    pub boson_cutoff: usize,
}

impl BasisSpec {
    pub fn fock(n_max: usize) -> Self {
        BasisSpec {
            kind: BasisKind::Fock,
            boson_cutoff: n_max,
        }
    }

    pub fn efficient(big_n_max: usize) -> Self {
        BasisSpec {
            kind: BasisKind::Efficient,
            boson_cutoff: big_n_max,
        }
    }

    pub fn boson_dim(&self) -> usize {
        self.boson_cutoff + 1
    }

    pub fn dim(&self, params: &ModelParams) -> usize {
        params.atomic_dim() * self.boson_dim()
    }

    /// Same basis kind with the cutoff enlarged by `percent` (rounded up, at least one level).
    pub fn enlarged(&self, percent: usize) -> Self {
        let extra = (self.boson_cutoff * percent).div_ceil(100).max(1);
        BasisSpec {
            kind: self.kind,
            boson_cutoff: self.boson_cutoff + extra,
        }
    }
}

/// Reference truncations for the system sizes studied in production runs.
/// They give the dimensions 8601, 30371 and 80601.
const REFERENCE_CUTOFFS: [(u32, usize); 3] = [(60, 140), (120, 250), (200, 400)];

/// Default efficient-basis cutoff used by the pipelines.
///
/// The reference truncation for `j = 30, 60, 100`, otherwise `4j + 20`.
pub fn default_efficient_cutoff(params: &ModelParams) -> usize {
    let twice_j = params.twice_j();
    REFERENCE_CUTOFFS
        .iter()
        .find(|(t, _)| *t == twice_j)
        .map(|(_, n)| *n)
        .unwrap_or(2 * twice_j as usize + 20)
}
