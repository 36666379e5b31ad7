//! Ratio of consecutive level spacings and its energy-resolved averages.

use serde::{Deserialize, Serialize};

use crate::error::{DickeError, Result};
use crate::model::{converged_sector, ConvergenceTolerances, EigenSolution, Parity};
use crate::params::{BasisSpec, ModelParams};

/// Spacings below this are treated as exact degeneracies and merged.
pub const DEGENERACY_TOLERANCE: f64 = 1e-13;

/// `2 ln 2 - 1`, the Poisson mean.
pub const POISSON_MEAN_RATIO: f64 = 0.386_294_361_119_890_6;

/// Large-matrix GOE mean ratio.
pub const GOE_MEAN_RATIO: f64 = 0.5307;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatioSeries {
    /// Energy of the middle level of each ratio.
    pub epsilons: Vec<f64>,
    pub ratios: Vec<f64>,
    /// Levels dropped as near-degenerate duplicates.
    pub merged: usize,
}

impl RatioSeries {
    pub fn len(&self) -> usize {
        self.ratios.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ratios.is_empty()
    }

    /// Mean ratio over middle-level energies in `[lo, hi]`, if any.
    pub fn mean_in(&self, lo: f64, hi: f64) -> Option<f64> {
        let sel: Vec<f64> = self
            .epsilons
            .iter()
            .zip(&self.ratios)
            .filter(|(e, _)| **e >= lo && **e <= hi)
            .map(|(_, r)| *r)
            .collect();
        (!sel.is_empty()).then(|| sel.iter().sum::<f64>() / sel.len() as f64)
    }
}

/// `r_k = min(s_k, s_{k-1}) / max(s_k, s_{k-1})` for ascending `energies`.
pub fn consecutive_ratios(energies: &[f64]) -> Result<RatioSeries> {
    if energies.windows(2).any(|w| w[1] < w[0]) {
        return Err(DickeError::param("levels must be ascending"));
    }
    let mut levels: Vec<f64> = Vec::with_capacity(energies.len());
    let mut merged = 0;
    for &e in energies {
        match levels.last() {
            Some(&last) if e - last < DEGENERACY_TOLERANCE => merged += 1,
            _ => levels.push(e),
        }
    }
    if levels.len() < 3 {
        return Err(DickeError::param(format!(
            "ratio statistics need at least 3 distinct levels, got {}",
            levels.len()
        )));
    }
    let mut epsilons = Vec::with_capacity(levels.len() - 2);
    let mut ratios = Vec::with_capacity(levels.len() - 2);
    for k in 1..levels.len() - 1 {
        let a = levels[k] - levels[k - 1];
        let b = levels[k + 1] - levels[k];
        epsilons.push(levels[k]);
        ratios.push(a.min(b) / a.max(b));
    }
    Ok(RatioSeries {
        epsilons,
        ratios,
        merged,
    })
}

/// Default moving-window size `max(50, levels / 20)`.
pub fn default_window(levels: usize) -> usize {
    (levels / 20).max(50)
}

/// Centered moving average over `window_levels` ratios, one point per ratio.
/// Near the edges the window shrinks to the available levels.
pub fn windowed_average(series: &RatioSeries, window_levels: usize) -> Result<Vec<(f64, f64)>> {
    if window_levels < 10 {
        return Err(DickeError::Window(format!("window of {window_levels} levels is below 10")));
    }
    let n = series.len();
    let mut prefix = vec![0.0; n + 1];
    for (k, r) in series.ratios.iter().enumerate() {
        prefix[k + 1] = prefix[k] + r;
    }
    let half = window_levels / 2;
    Ok((0..n)
        .map(|k| {
            let lo = k.saturating_sub(half);
            let hi = (lo + window_levels).min(n);
            let lo = hi.saturating_sub(window_levels);
            (series.epsilons[k], (prefix[hi] - prefix[lo]) / (hi - lo) as f64)
        })
        .collect())
}

/// Scalar diagnostic on an `(epsilon, gamma)` grid; `values[g][e]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultGrid {
    pub epsilon_grid: Vec<f64>,
    pub gamma_grid: Vec<f64>,
    pub values: Vec<Vec<Option<f64>>>,
    pub quantity: String,
}

/// Samples the windowed ratio of each spectrum at `epsilon_grid`.
///
/// Each entry of `spectra` is one symmetry sector; cells outside
/// `[lowest level, epsilon_T]` are left empty.
pub fn r_map_from_spectra(
    gammas: &[f64],
    spectra: &[(Vec<f64>, f64)],
    epsilon_grid: &[f64],
    window_levels: Option<usize>,
) -> Result<ResultGrid> {
    if gammas.len() != spectra.len() {
        return Err(DickeError::param("one spectrum per coupling is required"));
    }
    let mut values = Vec::with_capacity(gammas.len());
    for (energies, eps_t) in spectra {
        let series = consecutive_ratios(energies)?;
        let window = window_levels.unwrap_or_else(|| default_window(energies.len()));
        let avg = windowed_average(&series, window)?;
        let row = epsilon_grid
            .iter()
            .map(|&e| {
                if e < series.epsilons[0] || e > *eps_t {
                    return None;
                }
                let k = series.epsilons.partition_point(|&x| x < e).min(avg.len() - 1);
                Some(avg[k].1)
            })
            .collect();
        values.push(row);
    }
    Ok(ResultGrid {
        epsilon_grid: epsilon_grid.to_vec(),
        gamma_grid: gammas.to_vec(),
        values,
        quantity: "mean_ratio".into(),
    })
}

/// Positive-parity converged spectra over `gammas`, sampled on `epsilon_grid`.
pub fn r_map(
    base: &ModelParams,
    gammas: &[f64],
    basis: BasisSpec,
    epsilon_grid: &[f64],
    window_levels: Option<usize>,
    tol: ConvergenceTolerances,
) -> Result<ResultGrid> {
    let mut spectra = Vec::with_capacity(gammas.len());
    for &g in gammas {
        let params = base.with_gamma(g)?;
        let sol = converged_sector(&params, basis, Parity::Even, tol, false)?;
        spectra.push(converged_levels(&sol)?);
    }
    r_map_from_spectra(gammas, &spectra, epsilon_grid, window_levels)
}

/// Converged energies and `epsilon_T` of a solution.
pub fn converged_levels(sol: &EigenSolution) -> Result<(Vec<f64>, f64)> {
    let idx = sol.converged_indices(None);
    let eps_t = sol
        .epsilon_t
        .ok_or_else(|| DickeError::Truncation {
            context: "no converged states".into(),
            deficit: 1.0,
            limit: 0.0,
        })?;
    Ok((idx.iter().map(|&k| sol.energies[k]).collect(), eps_t))
}
