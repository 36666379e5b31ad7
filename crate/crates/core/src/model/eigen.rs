use ndarray::{Array2, ArrayView1};
use serde::{Deserialize, Serialize};

use super::hamiltonian::HamiltonianMatrix;
use crate::basis_map::{CoefficientVector, Representation};
use crate::error::Result;
use crate::linalg::{symmetric_eigen, symmetric_eigenvalues};
use crate::params::{BasisSpec, ModelParams};

/// Eigenvalue of the parity operator `exp(i pi (a^+a + J_z + j))`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Parity {
    Even,
    Odd,
    Unresolved,
}

impl Parity {
    pub fn from_sign(sign: f64) -> Self {
        if sign > 0.0 {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    pub fn sign(self) -> Option<f64> {
        match self {
            Parity::Even => Some(1.0),
            Parity::Odd => Some(-1.0),
            Parity::Unresolved => None,
        }
    }

    pub fn label(self) -> i8 {
        match self {
            Parity::Even => 1,
            Parity::Odd => -1,
            Parity::Unresolved => 0,
        }
    }
}

/// Spectrum and eigenvectors of a truncated Hamiltonian.
///
/// `energies` are scaled, `epsilon = E / j`, and ascending. Column `k` of
/// `coefficients` is the eigenvector of state `k` in the construction basis;
/// it may have zero columns when only eigenvalues were requested.
#[derive(Debug, Clone)]
pub struct EigenSolution {
    pub params: ModelParams,
    pub basis: BasisSpec,
    pub energies: Vec<f64>,
    pub coefficients: Array2<f64>,
    pub parity: Vec<Parity>,
    pub converged: Vec<bool>,
    /// Scaled energy up to which every state is converged.
    pub epsilon_t: Option<f64>,
    /// Parity sector the solve was restricted to, if any.
    pub sector: Option<Parity>,
    /// Excitation number `Lambda` per state, when conserved.
    pub excitations: Option<Vec<usize>>,
}

impl EigenSolution {
    pub fn len(&self) -> usize {
        self.energies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.energies.is_empty()
    }

    pub fn has_vectors(&self) -> bool {
        self.coefficients.ncols() == self.energies.len() && !self.energies.is_empty()
    }

    pub fn vector(&self, k: usize) -> ArrayView1<'_, f64> {
        self.coefficients.column(k)
    }

    /// Eigenvector `k` reshaped to `(boson, atomic)` amplitudes.
    pub fn coefficient_vector(&self, k: usize) -> CoefficientVector {
        let flat: Vec<f64> = self.coefficients.column(k).iter().copied().collect();
        CoefficientVector::from_flat(
            Representation::from(self.basis.kind),
            &flat,
            self.params.atomic_dim(),
        )
        .expect("eigenvector length matches basis")
    }

    /// Indices of converged states, optionally restricted to one parity.
    pub fn converged_indices(&self, parity: Option<Parity>) -> Vec<usize> {
        (0..self.len())
            .filter(|&k| self.converged[k])
            .filter(|&k| parity.map_or(true, |p| self.parity[k] == p))
            .collect()
    }

    /// Keeps only the listed states, in the given order.
    pub fn select(&self, indices: &[usize]) -> EigenSolution {
        let coefficients = if self.has_vectors() {
            Array2::from_shape_fn((self.coefficients.nrows(), indices.len()), |(i, c)| {
                self.coefficients[(i, indices[c])]
            })
        } else {
            Array2::zeros((self.coefficients.nrows(), 0))
        };
        EigenSolution {
            params: self.params,
            basis: self.basis,
            energies: indices.iter().map(|&k| self.energies[k]).collect(),
            coefficients,
            parity: indices.iter().map(|&k| self.parity[k]).collect(),
            converged: indices.iter().map(|&k| self.converged[k]).collect(),
            epsilon_t: self.epsilon_t,
            sector: self.sector,
            excitations: self
                .excitations
                .as_ref()
                .map(|ex| indices.iter().map(|&k| ex[k]).collect()),
        }
    }

    /// Merges two solutions of the same model and basis (e.g. the two parity
    /// sectors), re-sorting by energy.
    pub fn merge(a: &EigenSolution, b: &EigenSolution) -> EigenSolution {
        assert_eq!(a.params, b.params, "merging solutions of different models");
        assert_eq!(a.basis, b.basis, "merging solutions in different bases");
        let mut order: Vec<(f64, bool, usize)> = a
            .energies
            .iter()
            .enumerate()
            .map(|(k, &e)| (e, false, k))
            .chain(b.energies.iter().enumerate().map(|(k, &e)| (e, true, k)))
            .collect();
        order.sort_by(|x, y| x.0.total_cmp(&y.0));
        let with_vectors = a.has_vectors() && b.has_vectors();
        let rows = a.coefficients.nrows();
        let mut coefficients = Array2::zeros((rows, if with_vectors { order.len() } else { 0 }));
        if with_vectors {
            for (c, &(_, from_b, k)) in order.iter().enumerate() {
                let src = if from_b { &b.coefficients } else { &a.coefficients };
                coefficients.column_mut(c).assign(&src.column(k));
            }
        }
        let pick = |from_b: bool| if from_b { b } else { a };
        let epsilon_t = match (a.epsilon_t, b.epsilon_t) {
            (Some(x), Some(y)) => Some(x.min(y)),
            _ => None,
        };
        // states above the common bound are no longer guaranteed
        let converged = order
            .iter()
            .map(|&(e, from_b, k)| pick(from_b).converged[k] && epsilon_t.map_or(false, |t| e <= t))
            .collect();
        EigenSolution {
            params: a.params,
            basis: a.basis,
            energies: order.iter().map(|o| o.0).collect(),
            coefficients,
            parity: order.iter().map(|&(_, fb, k)| pick(fb).parity[k]).collect(),
            converged,
            epsilon_t,
            sector: if a.sector == b.sector { a.sector } else { None },
            excitations: match (&a.excitations, &b.excitations) {
                (Some(ea), Some(eb)) => Some(
                    order
                        .iter()
                        .map(|&(_, fb, k)| if fb { eb[k] } else { ea[k] })
                        .collect(),
                ),
                _ => None,
            },
        }
    }
}

/// Full spectrum and eigenvectors of `h`; energies are returned as `E / j`.
pub fn diagonalize(h: HamiltonianMatrix) -> Result<EigenSolution> {
    let HamiltonianMatrix {
        entries,
        basis,
        params,
    } = h;
    let (values, vectors) = symmetric_eigen(entries.view(), &format!("{basis:?}"))?;
    drop(entries);
    Ok(solution_from_parts(params, basis, values, vectors, None))
}

/// Eigenvalues only; the returned solution carries no eigenvectors.
pub fn diagonalize_values(h: &HamiltonianMatrix) -> Result<EigenSolution> {
    let values = symmetric_eigenvalues(h.entries.view(), &format!("{:?}", h.basis))?;
    let rows = h.dim();
    Ok(solution_from_parts(
        h.params,
        h.basis,
        values,
        Array2::zeros((rows, 0)),
        None,
    ))
}

pub(crate) fn solution_from_parts(
    params: ModelParams,
    basis: BasisSpec,
    values: Vec<f64>,
    vectors: Array2<f64>,
    sector: Option<Parity>,
) -> EigenSolution {
    let j = params.j();
    let n = values.len();
    EigenSolution {
        params,
        basis,
        energies: values.into_iter().map(|e| e / j).collect(),
        coefficients: vectors,
        parity: vec![sector.unwrap_or(Parity::Unresolved); n],
        converged: vec![false; n],
        epsilon_t: None,
        sector,
        excitations: None,
    }
}
