//! Rotating-wave (Tavis-Cummings) limit, block diagonal in the excitation
//! number `Lambda = a^+a + J_z + j`.

use ndarray::Array2;

use super::eigen::{EigenSolution, Parity};
use crate::error::Result;
use crate::linalg::{symmetric_eigen, symmetric_eigenvalues};
use crate::params::{BasisSpec, ModelParams};
use crate::spin::ladder;

/// Tavis-Cummings Hamiltonian restricted to `Lambda = lambda`.
#[derive(Debug, Clone)]
pub struct LambdaBlock {
    pub lambda: usize,
    /// `(n, m_z + j)` of each block state, atomic index ascending.
    pub states: Vec<(usize, usize)>,
    pub entries: Array2<f64>,
}

impl LambdaBlock {
    pub fn dim(&self) -> usize {
        self.states.len()
    }
}

pub fn build_tavis_cummings_block(params: &ModelParams, lambda: usize) -> LambdaBlock {
    let j = params.j();
    let top = lambda.min(params.twice_j() as usize);
    let states: Vec<(usize, usize)> = (0..=top).map(|a| (lambda - a, a)).collect();
    let g = params.gamma() / (2.0 * j).sqrt();
    let dim = states.len();
    let mut entries = Array2::zeros((dim, dim));
    for (r, &(n, a)) in states.iter().enumerate() {
        let m = a as f64 - j;
        entries[(r, r)] = params.omega() * n as f64 + params.omega0() * m;
        if r > 0 {
            // a^+ J_- : (n, m) -> (n + 1, m - 1)
            let v = g * ((n + 1) as f64).sqrt() * ladder(j, m, m - 1.0);
            entries[(r, r - 1)] = v;
            entries[(r - 1, r)] = v;
        }
    }
    LambdaBlock {
        lambda,
        states,
        entries,
    }
}

/// Spectrum of all blocks with `Lambda <= lambda_max`.
///
/// Every state is exact, so all are flagged converged; `excitations` holds
/// `Lambda` per state and parity is `(-1)^Lambda`. With `with_vectors`, the
/// eigenvectors are embedded in the Fock basis with `n_max = lambda_max`.
pub fn tavis_cummings_spectrum(params: &ModelParams, lambda_max: usize, with_vectors: bool) -> Result<EigenSolution> {
    let d = params.atomic_dim();
    let basis = BasisSpec::fock(lambda_max);
    let rows = basis.dim(params);
    let mut states: Vec<(f64, usize, Vec<(usize, f64)>)> = Vec::new();
    for lambda in 0..=lambda_max {
        let block = build_tavis_cummings_block(params, lambda);
        let context = format!("Tavis-Cummings block {lambda}");
        if with_vectors {
            let (values, vectors) = symmetric_eigen(block.entries.view(), &context)?;
            for (k, e) in values.into_iter().enumerate() {
                let support = block
                    .states
                    .iter()
                    .enumerate()
                    .map(|(r, &(n, a))| (n * d + a, vectors[(r, k)]))
                    .collect();
                states.push((e, lambda, support));
            }
        } else {
            for e in symmetric_eigenvalues(block.entries.view(), &context)? {
                states.push((e, lambda, Vec::new()));
            }
        }
    }
    states.sort_by(|x, y| x.0.total_cmp(&y.0));
    let mut coefficients = Array2::zeros((rows, if with_vectors { states.len() } else { 0 }));
    if with_vectors {
        for (c, (_, _, support)) in states.iter().enumerate() {
            for &(i, v) in support {
                coefficients[(i, c)] = v;
            }
        }
    }
    let j = params.j();
    let energies: Vec<f64> = states.iter().map(|s| s.0 / j).collect();
    let n = energies.len();
    Ok(EigenSolution {
        params: *params,
        basis,
        epsilon_t: energies.last().copied(),
        energies,
        coefficients,
        parity: states
            .iter()
            .map(|s| if s.1 % 2 == 0 { Parity::Even } else { Parity::Odd })
            .collect(),
        converged: vec![true; n],
        sector: None,
        excitations: Some(states.iter().map(|s| s.1).collect()),
    })
}

/// Scaled energy below which the blocks `Lambda <= lambda_max` contain every
/// Tavis-Cummings eigenstate.
///
/// Block ground energies grow with `Lambda` once `Lambda > 2j`, so the
/// minimum over the next `2j + 2` blocks bounds all omitted states when
/// `omega > 0`.
pub fn tavis_cummings_complete_below(params: &ModelParams, lambda_max: usize) -> Result<f64> {
    let span = params.twice_j() as usize + 2;
    let mut bound = f64::INFINITY;
    for lambda in lambda_max + 1..=lambda_max + span {
        let block = build_tavis_cummings_block(params, lambda);
        let values = symmetric_eigenvalues(block.entries.view(), "Tavis-Cummings block")?;
        bound = bound.min(values[0]);
    }
    Ok(bound / params.j())
}
