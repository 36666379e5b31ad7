use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{classical_ground_state, lyapunov_exponent, sample_energy_shell, shell::derive_seed};
use crate::error::{DickeError, Result};
use crate::params::ModelParams;

/// Default classification threshold in units of `omega`.
pub const DEFAULT_LAMBDA_CUT: f64 = 1e-2;

/// Default Lyapunov integration time per initial condition.
pub const DEFAULT_LYAPUNOV_TIME: f64 = 1000.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChaosMapSettings {
    pub samples_per_cell: usize,
    /// Threshold in units of `omega`.
    pub lambda_cut: f64,
    pub t_final: f64,
    pub seed: u64,
}

impl Default for ChaosMapSettings {
    fn default() -> Self {
        ChaosMapSettings {
            samples_per_cell: 200,
            lambda_cut: DEFAULT_LAMBDA_CUT,
            t_final: DEFAULT_LYAPUNOV_TIME,
            seed: 0,
        }
    }
}

/// Fraction of chaotic initial conditions on a `(gamma, epsilon)` grid.
///
/// `fraction[g][e]` is `None` for cells at or below the ground energy, where
/// the shell has no volume to sample.
/// Initial conditions whose orbit hits the atomic pole are excluded from
/// the ratio and counted in `failed`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChaosMap {
    pub epsilon_grid: Vec<f64>,
    pub gamma_grid: Vec<f64>,
    pub fraction: Vec<Vec<Option<f64>>>,
    pub failed: Vec<Vec<usize>>,
    pub samples_per_cell: usize,
    pub lambda_cut: f64,
    pub t_final: f64,
    pub seed: u64,
}

enum Outcome {
    Chaotic,
    Regular,
    Failed,
}

pub fn chaos_fraction_map(
    epsilon_grid: &[f64],
    gamma_grid: &[f64],
    base: &ModelParams,
    settings: ChaosMapSettings,
) -> Result<ChaosMap> {
    if epsilon_grid.is_empty() || gamma_grid.is_empty() || settings.samples_per_cell == 0 {
        return Err(DickeError::param("chaos map needs nonempty grids and at least one sample per cell"));
    }
    let ne = epsilon_grid.len();
    let n = settings.samples_per_cell;
    let cut = settings.lambda_cut * base.omega();
    let mut models = Vec::with_capacity(gamma_grid.len());
    for &g in gamma_grid {
        let p = base.with_gamma(g)?;
        models.push((p, classical_ground_state(&p).0));
    }
    let jobs: Vec<(usize, usize)> = (0..gamma_grid.len() * ne)
        .filter(|&cell| epsilon_grid[cell % ne] > models[cell / ne].1)
        .flat_map(|cell| (0..n).map(move |s| (cell, s)))
        .collect();
    let outcomes: Vec<Result<Outcome>> = jobs
        .par_iter()
        .map(|&(cell, s)| {
            let (params, _) = &models[cell / ne];
            let eps = epsilon_grid[cell % ne];
            let seed = derive_seed(settings.seed, cell as u64, s as u64);
            let x0 = sample_energy_shell(eps, params, 1, seed)?[0];
            match lyapunov_exponent(&x0, params, settings.t_final) {
                Ok(l) if l > cut => Ok(Outcome::Chaotic),
                Ok(_) => Ok(Outcome::Regular),
                Err(DickeError::Singularity(_)) => Ok(Outcome::Failed),
                Err(e) => Err(e),
            }
        })
        .collect();
    let mut chaotic = vec![0usize; gamma_grid.len() * ne];
    let mut total = vec![0usize; gamma_grid.len() * ne];
    let mut failed = vec![0usize; gamma_grid.len() * ne];
    for (&(cell, _), outcome) in jobs.iter().zip(outcomes) {
        match outcome? {
            Outcome::Chaotic => {
                chaotic[cell] += 1;
                total[cell] += 1;
            }
            Outcome::Regular => total[cell] += 1,
            Outcome::Failed => failed[cell] += 1,
        }
    }
    let fraction = (0..gamma_grid.len())
        .map(|g| {
            (0..ne)
                .map(|e| {
                    let cell = g * ne + e;
                    (total[cell] > 0).then(|| chaotic[cell] as f64 / total[cell] as f64)
                })
                .collect()
        })
        .collect();
    Ok(ChaosMap {
        epsilon_grid: epsilon_grid.to_vec(),
        gamma_grid: gamma_grid.to_vec(),
        fraction,
        failed: (0..gamma_grid.len()).map(|g| failed[g * ne..(g + 1) * ne].to_vec()).collect(),
        samples_per_cell: n,
        lambda_cut: settings.lambda_cut,
        t_final: settings.t_final,
        seed: settings.seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integrable_column_is_regular_and_repeatable() {
        let base = ModelParams::resonant(1.0, 30.0).unwrap();
        let settings = ChaosMapSettings {
            samples_per_cell: 4,
            t_final: 300.0,
            seed: 9,
            ..Default::default()
        };
        let a = chaos_fraction_map(&[-1.5, -0.5, 0.5], &[0.0], &base, settings).unwrap();
        assert_eq!(a.fraction[0][0], None);
        assert_eq!(a.fraction[0][1], Some(0.0));
        assert_eq!(a.fraction[0][2], Some(0.0));
        let b = chaos_fraction_map(&[-1.5, -0.5, 0.5], &[0.0], &base, settings).unwrap();
        assert_eq!(a, b);
    }
}
