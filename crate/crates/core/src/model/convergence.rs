//! Convergence control by comparison against an enlarged boson cutoff.

use serde::{Deserialize, Serialize};

use super::eigen::{EigenSolution, Parity};
use super::parity::diagonalize_sector;
use crate::error::{DickeError, Result};
use crate::params::{BasisSpec, ModelParams};

/// Cutoff enlargement used for the reference solve, in percent.
pub const ENLARGEMENT_PERCENT: usize = 20;

/// Fraction of the highest boson levels whose weight measures truncation.
pub const TAIL_FRACTION: f64 = 0.1;

/// Probability weight of state `k` on the top 10% of boson levels.
pub fn tail_weight(sol: &EigenSolution, k: usize) -> f64 {
    let d = sol.params.atomic_dim();
    let levels = sol.basis.boson_dim();
    let tail = ((levels as f64 * TAIL_FRACTION).ceil() as usize).clamp(1, levels);
    let start = (levels - tail) * d;
    sol.vector(k).iter().skip(start).map(|c| c * c).sum()
}

/// Marks states stable under a cutoff increase.
///
/// State `k` passes when `|eps_k - eps_k(larger)| < tol_energy` and its tail
/// weight is below `tol_tail` (skipped when `sol` carries no vectors). States
/// are compared index by index, so both solutions must cover the same parity
/// sector. Converged states form the prefix of the spectrum strictly below
/// the first failure; `epsilon_t` is the highest converged energy.
pub fn filter_converged(
    sol: &EigenSolution,
    sol_larger: &EigenSolution,
    tol_energy: f64,
    tol_tail: f64,
) -> Result<EigenSolution> {
    if sol.params != sol_larger.params {
        return Err(DickeError::param("convergence reference has different model parameters"));
    }
    if sol.basis.kind != sol_larger.basis.kind || sol_larger.basis.boson_cutoff <= sol.basis.boson_cutoff {
        return Err(DickeError::param(
            "convergence reference needs the same basis kind with a larger cutoff",
        ));
    }
    if sol.sector != sol_larger.sector {
        return Err(DickeError::param("convergence reference covers a different parity sector"));
    }
    let check_tail = sol.has_vectors();
    let passes = |k: usize| {
        k < sol_larger.len()
            && (sol.energies[k] - sol_larger.energies[k]).abs() < tol_energy
            && (!check_tail || tail_weight(sol, k) < tol_tail)
    };
    let first_fail = (0..sol.len()).find(|&k| !passes(k));
    // a failing state invalidates everything at or above its energy
    let bound = first_fail.map(|f| sol.energies[f]);
    let mut out = sol.clone();
    out.converged = sol
        .energies
        .iter()
        .map(|&e| bound.map_or(true, |b| e < b))
        .collect();
    out.epsilon_t = out
        .energies
        .iter()
        .zip(&out.converged)
        .filter(|(_, &c)| c)
        .map(|(&e, _)| e)
        .last();
    Ok(out)
}

/// Tolerances of the convergence test. The defaults (`1e-6` in scaled
/// energy, `1e-3` tail weight) give `epsilon_T ~ 1.85` for the resonant
/// `j = 30`, `gamma = 1` model at `N_max = 140`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ConvergenceTolerances {
    pub energy: f64,
    pub tail: f64,
}

impl Default for ConvergenceTolerances {
    fn default() -> Self {
        ConvergenceTolerances {
            energy: 1e-6,
            tail: 1e-3,
        }
    }
}

/// Diagonalizes one parity sector at `basis` and at the cutoff enlarged by
/// 20%, returning the convergence-filtered solution at `basis`.
pub fn converged_sector(
    params: &ModelParams,
    basis: BasisSpec,
    parity: Parity,
    tol: ConvergenceTolerances,
    with_vectors: bool,
) -> Result<EigenSolution> {
    let sol = diagonalize_sector(params, basis, parity, with_vectors)?;
    let larger = diagonalize_sector(params, basis.enlarged(ENLARGEMENT_PERCENT), parity, false)?;
    filter_converged(&sol, &larger, tol.energy, tol.tail)
}

/// Both parity sectors, converged and merged by energy.
pub fn converged_spectrum(
    params: &ModelParams,
    basis: BasisSpec,
    tol: ConvergenceTolerances,
    with_vectors: bool,
) -> Result<EigenSolution> {
    let even = converged_sector(params, basis, Parity::Even, tol, with_vectors)?;
    let odd = converged_sector(params, basis, Parity::Odd, tol, with_vectors)?;
    Ok(EigenSolution::merge(&even, &odd))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uncoupled_states_below_the_edge_converge() {
        let p = ModelParams::resonant(0.0, 2.0).unwrap();
        let sol = converged_sector(&p, BasisSpec::fock(10), Parity::Even, ConvergenceTolerances::default(), false)
            .unwrap();
        // gamma = 0: the enlarged cutoff first adds levels at E = 10 (n = 11, m_z = -1)
        let edge = 10.0 / 2.0;
        for (e, c) in sol.energies.iter().zip(&sol.converged) {
            if *e < edge {
                assert!(*c, "{e}");
            }
        }
        assert!(sol.epsilon_t.unwrap() >= sol.energies.iter().copied().filter(|&e| e < edge).fold(f64::MIN, f64::max));
        assert!(sol.converged.iter().any(|&c| !c));
    }

    #[test]
    fn converged_set_grows_with_cutoff() {
        let p = ModelParams::resonant(1.0, 5.0).unwrap();
        let tol = ConvergenceTolerances::default();
        let counts: Vec<usize> = [30usize, 40]
            .iter()
            .map(|&c| {
                converged_sector(&p, BasisSpec::efficient(c), Parity::Even, tol, true)
                    .unwrap()
                    .converged_indices(None)
                    .len()
            })
            .collect();
        assert!(counts[0] > 0);
        assert!(counts[1] >= counts[0], "{counts:?}");
    }

    #[test]
    fn rejects_smaller_reference() {
        let p = ModelParams::resonant(1.0, 1.0).unwrap();
        let a = diagonalize_sector(&p, BasisSpec::fock(10), Parity::Even, false).unwrap();
        let b = diagonalize_sector(&p, BasisSpec::fock(8), Parity::Even, false).unwrap();
        assert!(filter_converged(&a, &b, 1e-8, 1e-8).is_err());
    }

    #[test]
    fn converged_states_lie_below_epsilon_t() {
        let p = ModelParams::resonant(1.0, 3.0).unwrap();
        let sol = converged_spectrum(&p, BasisSpec::efficient(30), ConvergenceTolerances::default(), true).unwrap();
        let t = sol.epsilon_t.unwrap();
        for (e, c) in sol.energies.iter().zip(&sol.converged) {
            if *c {
                assert!(*e <= t);
            }
        }
    }
}
