//! Eigenstate-thermalization diagnostics for the photon number and the
//! number of excited atoms.

use ndarray::{Array2, Axis};
use serde::{Deserialize, Serialize};

use crate::basis_map::{CoefficientVector, Representation};
use crate::error::{DickeError, Result};
use crate::linalg::transpose_product;
use crate::model::{EigenSolution, Parity};
use crate::params::{BasisKind, ModelParams};
use crate::stats::{excess_kurtosis, mean, skewness};

/// Gaussianity acceptance: `|skewness|` bound.
pub const GAUSSIAN_MAX_SKEWNESS: f64 = 0.3;
/// Gaussianity acceptance: `|excess kurtosis|` bound.
pub const GAUSSIAN_MAX_EXCESS_KURTOSIS: f64 = 0.5;
/// States in the moving mean removed before histogramming diagonals.
pub const CENTERING_WINDOW: usize = 50;
/// Minimum number of states for a distribution.
pub const MIN_DISTRIBUTION_STATES: usize = 50;
/// Largest allowed weight outside the eigenbasis used by a diagonal ensemble.
pub const SUPPORT_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ObservableKind {
    /// `a^+ a`
    PhotonNumber,
    /// `J_z + j`
    ExcitedAtoms,
}

impl ObservableKind {
    pub fn label(self) -> &'static str {
        match self {
            ObservableKind::PhotonNumber => "n",
            ObservableKind::ExcitedAtoms => "n_ex",
        }
    }
}

/// `O_{k,k'} = <E_k| O |E_k'>` over a set of eigenstates.
#[derive(Debug, Clone, PartialEq)]
pub struct ObservableMatrix {
    pub kind: ObservableKind,
    pub elements: Array2<f64>,
    pub energies: Vec<f64>,
    /// Whether the elements were divided by `j`.
    pub scaled: bool,
    pub parity: Option<Parity>,
    pub j: f64,
}

impl ObservableMatrix {
    pub fn len(&self) -> usize {
        self.energies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.energies.is_empty()
    }

    pub fn diagonal(&self) -> Vec<f64> {
        self.elements.diag().to_vec()
    }

    /// Elements divided by `j`.
    pub fn scaled(mut self) -> Self {
        if !self.scaled {
            self.elements /= self.j;
            self.scaled = true;
        }
        self
    }

    /// Restriction to the listed states.
    pub fn select(&self, indices: &[usize]) -> ObservableMatrix {
        ObservableMatrix {
            kind: self.kind,
            elements: Array2::from_shape_fn((indices.len(), indices.len()), |(a, b)| {
                self.elements[(indices[a], indices[b])]
            }),
            energies: indices.iter().map(|&k| self.energies[k]).collect(),
            scaled: self.scaled,
            parity: self.parity,
            j: self.j,
        }
    }

    /// Indices of states with energy inside the open interval `(lo, hi)`.
    pub fn indices_in(&self, lo: f64, hi: f64) -> Vec<usize> {
        (0..self.len()).filter(|&k| self.energies[k] > lo && self.energies[k] < hi).collect()
    }
}

/// Operator applied to the eigenvector columns `v` of `sol`, in its
/// construction basis.
fn apply_observable(sol: &EigenSolution, v: &Array2<f64>, energies: &[f64], kind: ObservableKind) -> Array2<f64> {
    let params = &sol.params;
    let d = params.atomic_dim();
    let j = params.j();
    let rows = v.nrows();
    let mut w = Array2::zeros(v.raw_dim());
    match (sol.basis.kind, kind) {
        (BasisKind::Fock, ObservableKind::PhotonNumber) => {
            for i in 0..rows {
                let n = (i / d) as f64;
                w.row_mut(i).assign(&(&v.row(i) * n));
            }
        }
        (BasisKind::Fock, ObservableKind::ExcitedAtoms) => {
            for i in 0..rows {
                let a = (i % d) as f64;
                w.row_mut(i).assign(&(&v.row(i) * a));
            }
        }
        (BasisKind::Efficient, ObservableKind::PhotonNumber) => {
            // a^+a = A^+A - G J_x (A + A^+) + G^2 J_x^2 with J_x = m_x
            let g = params.displacement_scale();
            for i in 0..rows {
                let (big_n, a) = (i / d, i % d);
                let m = a as f64 - j;
                let diag = big_n as f64 + g * g * m * m;
                let mut row = &v.row(i) * diag;
                if big_n > 0 {
                    row.scaled_add(-g * m * (big_n as f64).sqrt(), &v.row(i - d));
                }
                if i + d < rows {
                    row.scaled_add(-g * m * ((big_n + 1) as f64).sqrt(), &v.row(i + d));
                }
                w.row_mut(i).assign(&row);
            }
        }
        (BasisKind::Efficient, ObservableKind::ExcitedAtoms) => {
            // In the truncated space H = omega (A^+A - G^2 J_x^2) + omega0 J_z, so
            // J_z |E_k> = (E_k - omega D) |E_k> / omega0 with D diagonal.
            let g = params.displacement_scale();
            let (om, om0) = (params.omega(), params.omega0());
            for i in 0..rows {
                let (big_n, a) = (i / d, i % d);
                let m = a as f64 - j;
                let diag = big_n as f64 - g * g * m * m;
                let mut row = w.row_mut(i);
                for (k, slot) in row.iter_mut().enumerate() {
                    let e = energies[k] * j;
                    *slot = v[(i, k)] * ((e - om * diag) / om0 + j);
                }
            }
        }
    }
    w
}

/// Observable over the converged states of a single-parity solution.
pub fn observable_matrix(sol: &EigenSolution, kind: ObservableKind) -> Result<ObservableMatrix> {
    let indices = sol.converged_indices(None);
    let parities: Vec<Parity> = indices.iter().map(|&k| sol.parity[k]).collect();
    let parity = parities.first().copied();
    if parities.iter().any(|p| Some(*p) != parity) || parity == Some(Parity::Unresolved) {
        return Err(DickeError::param("observable matrix needs converged states of a single resolved parity"));
    }
    let mut out = observable_matrix_for(sol, &indices, kind)?;
    out.parity = parity;
    Ok(out)
}

/// Observable over an explicit list of states, without the parity check.
pub fn observable_matrix_for(sol: &EigenSolution, indices: &[usize], kind: ObservableKind) -> Result<ObservableMatrix> {
    if !sol.has_vectors() {
        return Err(DickeError::param("observable matrix needs eigenvectors"));
    }
    if let Some(&k) = indices.iter().find(|&&k| !sol.converged[k]) {
        return Err(DickeError::param(format!("state {k} is not converged")));
    }
    let v = sol.coefficients.select(Axis(1), indices);
    let energies: Vec<f64> = indices.iter().map(|&k| sol.energies[k]).collect();
    let w = apply_observable(sol, &v, &energies, kind);
    let mut elements = transpose_product(v.view(), w.view());
    // symmetrize away rounding
    let n = elements.nrows();
    for a in 0..n {
        for b in 0..a {
            let s = 0.5 * (elements[(a, b)] + elements[(b, a)]);
            elements[(a, b)] = s;
            elements[(b, a)] = s;
        }
    }
    Ok(ObservableMatrix {
        kind,
        elements,
        energies,
        scaled: false,
        parity: None,
        j: sol.params.j(),
    })
}

/// Diagonal elements `O_kk` only, for the listed converged states.
pub fn observable_diagonal(sol: &EigenSolution, indices: &[usize], kind: ObservableKind) -> Result<Vec<f64>> {
    if !sol.has_vectors() {
        return Err(DickeError::param("observable diagonal needs eigenvectors"));
    }
    if let Some(&k) = indices.iter().find(|&&k| !sol.converged[k]) {
        return Err(DickeError::param(format!("state {k} is not converged")));
    }
    let v = sol.coefficients.select(Axis(1), indices);
    let energies: Vec<f64> = indices.iter().map(|&k| sol.energies[k]).collect();
    let w = apply_observable(sol, &v, &energies, kind);
    Ok((0..indices.len()).map(|c| v.column(c).dot(&w.column(c))).collect())
}

/// Observable evaluated on Fock-basis amplitudes `|n; j, m_z>`.
pub fn fock_expectation(c: &CoefficientVector, kind: ObservableKind) -> Result<f64> {
    if c.repr != Representation::Fock {
        return Err(DickeError::param("expectation needs Fock-basis amplitudes"));
    }
    Ok(c
        .values
        .indexed_iter()
        .map(|((n, a), v)| {
            v * v
                * match kind {
                    ObservableKind::PhotonNumber => n as f64,
                    ObservableKind::ExcitedAtoms => a as f64,
                }
        })
        .sum())
}

/// State selector for microcanonical averages.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum MicrocanonicalWindow {
    /// The `count` states nearest in energy to `center`.
    Levels { center: f64, count: usize },
    /// States with `|epsilon - center| < half_width`.
    Width { center: f64, half_width: f64 },
}

impl MicrocanonicalWindow {
    pub fn select(&self, energies: &[f64]) -> Vec<usize> {
        match *self {
            MicrocanonicalWindow::Levels { center, count } => {
                let n = energies.len();
                let count = count.min(n);
                let mut lo = energies.partition_point(|&e| e < center);
                let mut hi = lo;
                while hi - lo < count {
                    let take_left = if lo == 0 {
                        false
                    } else if hi == n {
                        true
                    } else {
                        center - energies[lo - 1] <= energies[hi] - center
                    };
                    if take_left {
                        lo -= 1;
                    } else {
                        hi += 1;
                    }
                }
                (lo..hi).collect()
            }
            MicrocanonicalWindow::Width { center, half_width } => (0..energies.len())
                .filter(|&k| (energies[k] - center).abs() < half_width)
                .collect(),
        }
    }
}

fn window_diagonal(obs: &ObservableMatrix, window: &MicrocanonicalWindow) -> Result<Vec<f64>> {
    let idx = window.select(&obs.energies);
    if idx.is_empty() {
        return Err(DickeError::Window(format!("{window:?} selects no states")));
    }
    Ok(idx.iter().map(|&k| obs.elements[(k, k)]).collect())
}

/// `O_mic`, the mean diagonal element over the window.
pub fn microcanonical_average(obs: &ObservableMatrix, window: &MicrocanonicalWindow) -> Result<f64> {
    Ok(mean(&window_diagonal(obs, window)?))
}

/// Moving-window size used for diagonal fluctuations at pseudo-spin `j`:
/// `100 (j / 30)^2` levels, at least 10.
pub fn default_eth_window(j: f64) -> usize {
    ((100.0 * (j / 30.0).powi(2)).round() as usize).max(10)
}

fn delta_of(values: &[f64]) -> Result<f64> {
    let total: f64 = values.iter().sum();
    if total == 0.0 {
        return Err(DickeError::UndefinedResult("window diagonal sums to zero".into()));
    }
    let m = total / values.len() as f64;
    Ok(values.iter().map(|v| (v - m).abs()).sum::<f64>() / total)
}

fn extremal_of(values: &[f64]) -> Result<f64> {
    let m = mean(values);
    if m == 0.0 {
        return Err(DickeError::UndefinedResult("microcanonical average is zero".into()));
    }
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(((max - min) / m).abs())
}

/// Index windows of `w` consecutive states centered on each state, clipped
/// at the spectrum edges.
fn moving_windows(n: usize, w: usize) -> impl Iterator<Item = (usize, std::ops::Range<usize>)> {
    let w = w.min(n).max(1);
    (0..n).map(move |k| {
        let lo = k.saturating_sub(w / 2).min(n - w);
        (k, lo..lo + w)
    })
}

/// `Delta^mic = sum |O_kk - O_mic| / sum O_kk` over moving windows of
/// `window_levels` states, one value per center state.
pub fn delta_mic(obs: &ObservableMatrix, window_levels: usize) -> Result<Vec<(f64, f64)>> {
    let diag = obs.diagonal();
    moving_windows(diag.len(), window_levels)
        .map(|(k, r)| Ok((obs.energies[k], delta_of(&diag[r])?)))
        .collect()
}

/// `Delta^mic_e = |max - min| / O_mic` in one window.
pub fn delta_mic_extremal(obs: &ObservableMatrix, window: &MicrocanonicalWindow) -> Result<f64> {
    extremal_of(&window_diagonal(obs, window)?)
}

/// Extremal fluctuation over moving windows, one value per center state.
pub fn delta_mic_extremal_profile(obs: &ObservableMatrix, window_levels: usize) -> Result<Vec<(f64, f64)>> {
    let diag = obs.diagonal();
    moving_windows(diag.len(), window_levels)
        .map(|(k, r)| Ok((obs.energies[k], extremal_of(&diag[r])?)))
        .collect()
}

/// Same statistics on an arbitrary per-state quantity (e.g. an entropy).
pub fn delta_mic_series(energies: &[f64], values: &[f64], window_levels: usize) -> Result<Vec<(f64, f64)>> {
    moving_windows(values.len(), window_levels)
        .map(|(k, r)| Ok((energies[k], delta_of(&values[r])?)))
        .collect()
}

pub fn delta_mic_extremal_series(energies: &[f64], values: &[f64], window_levels: usize) -> Result<Vec<(f64, f64)>> {
    moving_windows(values.len(), window_levels)
        .map(|(k, r)| Ok((energies[k], extremal_of(&values[r])?)))
        .collect()
}

/// Sample statistics and maximum-likelihood Gaussian fit of a set of
/// matrix elements.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistributionFit {
    pub count: usize,
    pub mean: f64,
    pub sigma: f64,
    pub skewness: f64,
    pub excess_kurtosis: f64,
    /// `(bin center, probability density)`.
    pub histogram: Vec<(f64, f64)>,
    /// Zero spread: no meaningful shape.
    pub degenerate: bool,
    /// Passes the skewness and kurtosis bounds.
    pub gaussian: bool,
}

/// Bins used for distribution histograms.
pub const HISTOGRAM_BINS: usize = 50;

pub fn fit_distribution(values: &[f64], zero_mean: bool) -> DistributionFit {
    let n = values.len();
    let m = if zero_mean { 0.0 } else { mean(values) };
    let sigma = (values.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / n as f64).sqrt();
    let scale = values.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    let degenerate = n < 2 || sigma <= 1e-12 * scale.max(1e-300) || sigma == 0.0;
    let (skew, kurt) = if degenerate {
        (f64::NAN, f64::NAN)
    } else {
        (skewness(values), excess_kurtosis(values))
    };
    let histogram = if degenerate {
        vec![(m, f64::INFINITY)]
    } else {
        let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let width = (hi - lo) / HISTOGRAM_BINS as f64;
        let mut counts = vec![0usize; HISTOGRAM_BINS];
        for v in values {
            let b = (((v - lo) / width) as usize).min(HISTOGRAM_BINS - 1);
            counts[b] += 1;
        }
        counts
            .iter()
            .enumerate()
            .map(|(b, &c)| (lo + (b as f64 + 0.5) * width, c as f64 / (n as f64 * width)))
            .collect()
    };
    DistributionFit {
        count: n,
        mean: m,
        sigma,
        skewness: skew,
        excess_kurtosis: kurt,
        histogram,
        degenerate,
        gaussian: !degenerate && skew.abs() < GAUSSIAN_MAX_SKEWNESS && kurt.abs() < GAUSSIAN_MAX_EXCESS_KURTOSIS,
    }
}

/// Diagonal elements in `(lo, hi)` minus their moving mean over
/// [`CENTERING_WINDOW`] states.
pub fn centered_diagonal(obs: &ObservableMatrix, lo: f64, hi: f64) -> Result<Vec<f64>> {
    let idx = obs.indices_in(lo, hi);
    if idx.len() < MIN_DISTRIBUTION_STATES {
        return Err(DickeError::SampleSize {
            needed: MIN_DISTRIBUTION_STATES,
            found: idx.len(),
        });
    }
    let diag: Vec<f64> = idx.iter().map(|&k| obs.elements[(k, k)]).collect();
    Ok(moving_windows(diag.len(), CENTERING_WINDOW)
        .map(|(k, r)| diag[k] - mean(&diag[r]))
        .collect())
}

pub fn diagonal_distribution(obs: &ObservableMatrix, lo: f64, hi: f64) -> Result<DistributionFit> {
    Ok(fit_distribution(&centered_diagonal(obs, lo, hi)?, false))
}

/// Off-diagonal elements `O_{k,k'}`, `k < k'`, both states in `(lo, hi)` and
/// `|eps_k - eps_k'| <= omega_max` when given.
pub fn offdiagonal_elements(obs: &ObservableMatrix, lo: f64, hi: f64, omega_max: Option<f64>) -> Result<Vec<f64>> {
    let idx = obs.indices_in(lo, hi);
    if idx.len() < MIN_DISTRIBUTION_STATES {
        return Err(DickeError::SampleSize {
            needed: MIN_DISTRIBUTION_STATES,
            found: idx.len(),
        });
    }
    let mut out = Vec::with_capacity(idx.len() * (idx.len() - 1) / 2);
    for (a, &k) in idx.iter().enumerate() {
        for &l in &idx[a + 1..] {
            if omega_max.map_or(true, |w| (obs.energies[k] - obs.energies[l]).abs() <= w) {
                out.push(obs.elements[(k, l)]);
            }
        }
    }
    Ok(out)
}

pub fn offdiagonal_distribution(
    obs: &ObservableMatrix,
    lo: f64,
    hi: f64,
    omega_max: Option<f64>,
    zero_mean: bool,
) -> Result<DistributionFit> {
    Ok(fit_distribution(&offdiagonal_elements(obs, lo, hi, omega_max)?, zero_mean))
}

/// Infinite-time average `sum_k |c_k|^2 O_kk` for eigenbasis amplitudes
/// `c_k` over the states of `obs`.
pub fn diagonal_ensemble(weights: &[f64], obs: &ObservableMatrix) -> Result<f64> {
    if weights.len() != obs.len() {
        return Err(DickeError::param("one amplitude per eigenstate is required"));
    }
    let norm: f64 = weights.iter().map(|c| c * c).sum();
    if (1.0 - norm).abs() > SUPPORT_TOLERANCE {
        return Err(DickeError::Support(1.0 - norm));
    }
    Ok(weights.iter().enumerate().map(|(k, c)| c * c * obs.elements[(k, k)]).sum())
}

/// Product of a Glauber coherent state and a Bloch coherent state at a
/// classical point with `p = P = 0`, in the Fock basis up to `n_max`.
pub fn glauber_bloch_state(params: &ModelParams, q: f64, big_q: f64, n_max: usize) -> Result<CoefficientVector> {
    if big_q.abs() >= 2.0 {
        return Err(DickeError::param("Q must lie inside (-2, 2)"));
    }
    let j = params.j();
    let d = params.atomic_dim();
    let alpha = (j / 2.0).sqrt() * q;
    let mut boson = vec![0.0; n_max + 1];
    boson[0] = (-alpha * alpha / 2.0).exp();
    for n in 1..=n_max {
        boson[n] = boson[n - 1] * alpha / (n as f64).sqrt();
    }
    // |z> = (1 + z^2)^(-j) exp(z J_+) |j, -j>, z = Q / sqrt(4 - Q^2)
    let z = big_q / (4.0 - big_q * big_q).sqrt();
    let twice_j = params.twice_j() as usize;
    let mut atom = vec![0.0; d];
    let mut binom = 1.0f64;
    for (a, slot) in atom.iter_mut().enumerate() {
        if a > 0 {
            binom *= (twice_j + 1 - a) as f64 / a as f64;
        }
        *slot = binom.sqrt() * z.powi(a as i32) * (1.0 + z * z).powf(-j);
    }
    let values = Array2::from_shape_fn((n_max + 1, d), |(n, a)| boson[n] * atom[a]);
    Ok(CoefficientVector {
        repr: Representation::Fock,
        values,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{diagonalize, build_fock_hamiltonian};

    fn diag_obs(values: &[f64]) -> ObservableMatrix {
        let n = values.len();
        ObservableMatrix {
            kind: ObservableKind::PhotonNumber,
            elements: Array2::from_shape_fn((n, n), |(a, b)| if a == b { values[a] } else { 0.0 }),
            energies: (0..n).map(|k| k as f64).collect(),
            scaled: false,
            parity: None,
            j: 1.0,
        }
    }

    #[test]
    fn window_arithmetic() {
        let obs = diag_obs(&[0.0, 2.0]);
        assert_eq!(delta_mic(&obs, 2).unwrap()[0].1, 1.0);
        let obs = diag_obs(&[1.0, 3.0]);
        let w = MicrocanonicalWindow::Levels { center: 0.5, count: 2 };
        assert_eq!(delta_mic_extremal(&obs, &w).unwrap(), 1.0);
        assert_eq!(microcanonical_average(&obs, &w).unwrap(), 2.0);
        let one = MicrocanonicalWindow::Levels { center: 1.0, count: 1 };
        assert_eq!(microcanonical_average(&obs, &one).unwrap(), 3.0);
    }

    #[test]
    fn constant_diagonal_has_no_fluctuation() {
        let obs = diag_obs(&[4.0; 30]);
        assert!(delta_mic(&obs, 10).unwrap().iter().all(|p| p.1 == 0.0));
        let w = MicrocanonicalWindow::Width { center: 10.0, half_width: 5.0 };
        assert_eq!(delta_mic_extremal(&obs, &w).unwrap(), 0.0);
    }

    #[test]
    fn empty_and_zero_windows() {
        let obs = diag_obs(&[0.0; 5]);
        let w = MicrocanonicalWindow::Width { center: 100.0, half_width: 1.0 };
        assert!(matches!(microcanonical_average(&obs, &w), Err(DickeError::Window(_))));
        assert!(matches!(delta_mic(&obs, 3), Err(DickeError::UndefinedResult(_))));
    }

    #[test]
    fn level_window_picks_nearest() {
        let e = [0.0, 1.0, 2.0, 3.0, 10.0];
        let w = MicrocanonicalWindow::Levels { center: 2.2, count: 3 };
        assert_eq!(w.select(&e), vec![1, 2, 3]);
    }

    #[test]
    fn uncoupled_fock_eigenstates() {
        let p = ModelParams::resonant(0.0, 1.0).unwrap();
        let mut sol = diagonalize(build_fock_hamiltonian(&p, 6).unwrap()).unwrap();
        sol.converged = vec![true; sol.len()];
        let idx: Vec<usize> = (0..sol.len()).collect();
        let obs = observable_matrix_for(&sol, &idx, ObservableKind::PhotonNumber).unwrap();
        for k in 0..sol.len() {
            let n = sol.vector(k).iter().position(|c| c.abs() > 0.5).unwrap() / 3;
            assert!((obs.elements[(k, k)] - n as f64).abs() < 1e-12);
            for l in 0..sol.len() {
                if l != k {
                    assert!(obs.elements[(k, l)].abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn coherent_state_is_normalized() {
        let p = ModelParams::resonant(1.0, 4.0).unwrap();
        let c = glauber_bloch_state(&p, 0.7, -1.1, 60).unwrap();
        assert!((c.norm_sqr() - 1.0).abs() < 1e-12);
        // <n> = |alpha|^2 and <J_z + j> = j (1 + (Q^2/2 - 1))
        assert!((fock_expectation(&c, ObservableKind::PhotonNumber).unwrap() - 2.0 * 0.49).abs() < 1e-10);
        let want = 4.0 * 1.21 / 2.0;
        assert!((fock_expectation(&c, ObservableKind::ExcitedAtoms).unwrap() - want).abs() < 1e-10);
    }

    #[test]
    fn degenerate_distribution_flagged() {
        let f = fit_distribution(&[0.0; 100], true);
        assert!(f.degenerate && !f.gaussian);
    }
}
