//! Atom-field entanglement and basis-dependent Shannon entropies of
//! eigenstates.

use ndarray::Array2;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::basis_map::{rotate_atomic_x_to_z, CoefficientVector, EfficientToFockMap, Representation, MAP_NORM_TOLERANCE};
use crate::error::{DickeError, Result};
use crate::linalg::{symmetric_eigen, symmetric_eigenvalues};
use crate::model::{build_tavis_cummings_block, tavis_cummings_complete_below, EigenSolution};
use crate::params::{BasisKind, ModelParams};

/// Eigenvalues of a reduced matrix within this of 0 or 1 are dropped before the log.
pub const EIGENVALUE_CLIP: f64 = 1e-14;
/// Allowed trace deviation of a reduced matrix.
pub const TRACE_TOLERANCE: f64 = 1e-8;

/// Atomic reduced density matrix `rho_A[m, m'] = sum_n c_{n,m} c_{n,m'}`.
#[derive(Debug, Clone, PartialEq)]
pub struct ReducedAtomicMatrix {
    pub entries: Array2<f64>,
}

impl ReducedAtomicMatrix {
    pub fn trace(&self) -> f64 {
        self.entries.diag().sum()
    }
}

fn check_fock_like(coeffs: &CoefficientVector) -> Result<()> {
    if coeffs.repr == Representation::Efficient {
        return Err(DickeError::param(
            "efficient-basis amplitudes must be mapped to the Fock basis before tracing out the field",
        ));
    }
    let deficit = 1.0 - coeffs.norm_sqr();
    if deficit.abs() > MAP_NORM_TOLERANCE {
        return Err(DickeError::Truncation {
            context: "reduced atomic matrix".into(),
            deficit,
            limit: MAP_NORM_TOLERANCE,
        });
    }
    Ok(())
}

/// Traces out the field of a Fock or Fock-rotated state.
pub fn reduce_to_atomic(coeffs: &CoefficientVector) -> Result<ReducedAtomicMatrix> {
    check_fock_like(coeffs)?;
    let c = &coeffs.values;
    Ok(ReducedAtomicMatrix {
        entries: c.t().dot(c),
    })
}

/// Traces out the atoms instead; same nonzero spectrum as [`reduce_to_atomic`].
pub fn reduce_to_field(coeffs: &CoefficientVector) -> Result<Array2<f64>> {
    check_fock_like(coeffs)?;
    let c = &coeffs.values;
    Ok(c.dot(&c.t()))
}

fn entropy_of_spectrum(values: &[f64]) -> f64 {
    // eigenvalues within the clip of 0 or 1 contribute nothing, so pure
    // states come out exactly zero
    -values
        .iter()
        .filter(|&&l| l > EIGENVALUE_CLIP && 1.0 - l > EIGENVALUE_CLIP)
        .map(|&l| l * l.ln())
        .sum::<f64>()
}

/// `-sum lambda ln lambda` in nats.
pub fn von_neumann_entropy(rho: &ReducedAtomicMatrix) -> Result<f64> {
    let tr = rho.trace();
    if (tr - 1.0).abs() > TRACE_TOLERANCE {
        return Err(DickeError::Normalization(tr));
    }
    let values = symmetric_eigenvalues(rho.entries.view(), "reduced density matrix")?;
    Ok(entropy_of_spectrum(&values).max(0.0))
}

/// Von Neumann entropy of an arbitrary symmetric density matrix.
pub fn matrix_entropy(rho: &Array2<f64>) -> Result<f64> {
    von_neumann_entropy(&ReducedAtomicMatrix { entries: rho.clone() })
}

/// `-sum |c|^2 ln |c|^2` over the amplitudes, in nats.
pub fn shannon_entropy(coeffs: &CoefficientVector) -> f64 {
    shannon_of(coeffs.values.iter().copied())
}

pub fn shannon_of<I: IntoIterator<Item = f64>>(amplitudes: I) -> f64 {
    -amplitudes
        .into_iter()
        .map(|c| c * c)
        .filter(|&p| p > 0.0)
        .map(|p| p * p.ln())
        .sum::<f64>()
}

/// Which entropies an [`entropy_lattice`] computes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EntropyKinds {
    pub entanglement: bool,
    pub shannon_fock: bool,
    pub shannon_efficient: bool,
}

impl EntropyKinds {
    pub const ALL: EntropyKinds = EntropyKinds {
        entanglement: true,
        shannon_fock: true,
        shannon_efficient: true,
    };
}

/// Entropies of one eigenstate, in nats.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntropyRecord {
    pub epsilon: f64,
    pub parity: i8,
    pub j: f64,
    pub s_en: Option<f64>,
    pub s_sh_fock: Option<f64>,
    pub s_sh_eff: Option<f64>,
}

impl EntropyRecord {
    /// `exp(S_En) / (2j + 1)`.
    pub fn scaled_exp_entanglement(&self) -> Option<f64> {
        self.s_en.map(|s| s.exp() / (2.0 * self.j + 1.0))
    }

    /// `S / ln(2 j^2)`, the system-size normalization used for Shannon
    /// entropies.
    pub fn scaled_shannon(&self, s: f64) -> f64 {
        s / shannon_scale(self.j)
    }
}

/// `ln(2 j^2)`.
pub fn shannon_scale(j: f64) -> f64 {
    (2.0 * j * j).ln()
}

/// Per-state entropies over the converged states of `sol`.
///
/// Efficient-basis states are mapped to the Fock basis with
/// `n_max = 3 N_max` when the entanglement or Fock Shannon entropy is
/// requested. The efficient Shannon entropy is unavailable (`None`) for
/// Fock-basis solutions.
pub fn entropy_lattice(sol: &EigenSolution, which: EntropyKinds) -> Result<Vec<EntropyRecord>> {
    if !sol.has_vectors() {
        return Err(DickeError::param("entropy lattice needs eigenvectors"));
    }
    let efficient = sol.basis.kind == BasisKind::Efficient;
    let map = if efficient && (which.entanglement || which.shannon_fock) {
        Some(EfficientToFockMap::new(
            &sol.params,
            sol.basis.boson_cutoff,
            3 * sol.basis.boson_cutoff,
        )?)
    } else {
        None
    };
    let j = sol.params.j();
    sol.converged_indices(None)
        .par_iter()
        .map(|&k| {
            let c = sol.coefficient_vector(k);
            let s_sh_eff = (efficient && which.shannon_efficient).then(|| shannon_entropy(&c));
            let fock_like = match &map {
                Some(m) => Some(m.map(&c)?),
                None if !efficient => Some(c),
                None => None,
            };
            let s_en = match (&fock_like, which.entanglement) {
                (Some(f), true) => Some(von_neumann_entropy(&reduce_to_atomic(f)?)?),
                _ => None,
            };
            let s_sh_fock = match (fock_like, which.shannon_fock) {
                (Some(f), true) if f.repr == Representation::FockRotated => Some(shannon_entropy(&rotate_atomic_x_to_z(&f)?)),
                (Some(f), true) => Some(shannon_entropy(&f)),
                _ => None,
            };
            Ok(EntropyRecord {
                epsilon: sol.energies[k],
                parity: sol.parity[k].label(),
                j,
                s_en,
                s_sh_fock,
                s_sh_eff,
            })
        })
        .collect()
}

/// Entropies of the rotating-wave eigenstates below the completeness edge of
/// the blocks `Lambda <= lambda_max`, sorted by energy.
///
/// Within a block the photon number is fixed by the atomic level, so the
/// atomic reduction is diagonal and both `S_En` and the Fock Shannon entropy
/// equal the Shannon entropy of the block eigenvector.
pub fn tavis_cummings_entropies(params: &ModelParams, lambda_max: usize) -> Result<Vec<EntropyRecord>> {
    let edge = tavis_cummings_complete_below(params, lambda_max)?;
    let j = params.j();
    let blocks: Vec<Result<Vec<EntropyRecord>>> = (0..=lambda_max)
        .into_par_iter()
        .map(|lambda| {
            let block = build_tavis_cummings_block(params, lambda);
            let (values, vectors) = symmetric_eigen(block.entries.view(), "Tavis-Cummings block")?;
            Ok(values
                .iter()
                .enumerate()
                .filter(|(_, &e)| e / j < edge)
                .map(|(k, &e)| {
                    let s = shannon_of(vectors.column(k).iter().copied());
                    EntropyRecord {
                        epsilon: e / j,
                        parity: if lambda % 2 == 0 { 1 } else { -1 },
                        j,
                        s_en: Some(s),
                        s_sh_fock: Some(s),
                        s_sh_eff: None,
                    }
                })
                .collect())
        })
        .collect();
    let mut out = Vec::new();
    for b in blocks {
        out.extend(b?);
    }
    out.sort_by(|a, b| a.epsilon.total_cmp(&b.epsilon));
    Ok(out)
}
