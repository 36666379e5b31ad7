//! Parity `exp(i pi Lambda)`: sector-adapted bases and post hoc labelling.

use ndarray::Array2;

use super::eigen::{solution_from_parts, EigenSolution, Parity};
use super::hamiltonian::ElementSource;
use crate::basis_map::{rotate_atomic_x_to_z, CoefficientVector, EfficientToFockMap, Representation};
use crate::error::{DickeError, Result};
use crate::linalg::{symmetric_eigen, symmetric_eigenvalues};
use crate::params::{BasisKind, BasisSpec, ModelParams};
use crate::spin::x_basis_parity_signs;

/// `|<Pi>| > 1 - PARITY_TOLERANCE` resolves a label.
pub const PARITY_TOLERANCE: f64 = 1e-6;

/// Orthonormal basis of one parity sector, each vector a combination of at
/// most two product states.
#[derive(Debug, Clone)]
pub struct ParitySector {
    pub parity: Parity,
    pub basis: BasisSpec,
    pub params: ModelParams,
    pub columns: Vec<[(usize, f64); 2]>,
}

impl ParitySector {
    pub fn new(params: &ModelParams, basis: BasisSpec, parity: Parity) -> Result<Self> {
        let want = parity
            .sign()
            .ok_or_else(|| DickeError::param("a sector needs a definite parity"))?;
        let d = params.atomic_dim();
        let mut columns = Vec::new();
        match basis.kind {
            BasisKind::Fock => {
                // (-1)^(n + m_z + j), and m_z + j is the atomic index
                for b in 0..basis.boson_dim() {
                    for a in 0..d {
                        if (b + a) % 2 == usize::from(want < 0.0) {
                            columns.push([(b * d + a, 1.0), (b * d + a, 0.0)]);
                        }
                    }
                }
            }
            BasisKind::Efficient => {
                // Pi |N>_{m}|m_x> = (-1)^N s(m) |N>_{-m}|-m_x>
                let s = x_basis_parity_signs(params.twice_j());
                let h = std::f64::consts::FRAC_1_SQRT_2;
                for b in 0..basis.boson_dim() {
                    let boson_sign = if b % 2 == 0 { 1.0 } else { -1.0 };
                    for a in 0..d {
                        let mirror = d - 1 - a;
                        if a > mirror {
                            let c = want * boson_sign * s[a];
                            columns.push([(b * d + a, h), (b * d + mirror, c * h)]);
                        } else if a == mirror && boson_sign * s[a] == want {
                            columns.push([(b * d + a, 1.0), (b * d + a, 0.0)]);
                        }
                    }
                }
            }
        }
        Ok(ParitySector {
            parity,
            basis,
            params: *params,
            columns,
        })
    }

    pub fn dim(&self) -> usize {
        self.columns.len()
    }

    /// Projected Hamiltonian `F^T H F`.
    pub fn hamiltonian(&self) -> Array2<f64> {
        let source = ElementSource::new(&self.params, self.basis);
        let d = self.params.atomic_dim();
        let n = self.dim();
        let mut h = Array2::zeros((n, n));
        for r in 0..n {
            for c in 0..=r {
                let mut acc = 0.0;
                for &(i, ci) in &self.columns[r] {
                    if ci == 0.0 {
                        continue;
                    }
                    for &(k, ck) in &self.columns[c] {
                        // H only links atomic levels at distance <= 1
                        if ck == 0.0 || (i % d).abs_diff(k % d) > 1 {
                            continue;
                        }
                        acc += ci * ck * source.element(i, k);
                    }
                }
                h[(r, c)] = acc;
                h[(c, r)] = acc;
            }
        }
        h
    }

    /// Embeds sector vectors (columns) into the full product basis.
    pub fn embed(&self, vectors: &Array2<f64>) -> Array2<f64> {
        let full = self.basis.dim(&self.params);
        let mut out = Array2::zeros((full, vectors.ncols()));
        for (r, col) in self.columns.iter().enumerate() {
            for &(i, ci) in col {
                if ci == 0.0 {
                    continue;
                }
                for k in 0..vectors.ncols() {
                    out[(i, k)] += ci * vectors[(r, k)];
                }
            }
        }
        out
    }
}

/// Diagonalizes the Hamiltonian restricted to one parity sector.
///
/// Eigenvectors, when requested, are returned in the full product basis and
/// every state is labelled with the sector parity.
pub fn diagonalize_sector(
    params: &ModelParams,
    basis: BasisSpec,
    parity: Parity,
    with_vectors: bool,
) -> Result<EigenSolution> {
    let sector = ParitySector::new(params, basis, parity)?;
    let h = sector.hamiltonian();
    let context = format!("{basis:?} {parity:?} sector");
    if with_vectors {
        let (values, vectors) = symmetric_eigen(h.view(), &context)?;
        drop(h);
        let full = sector.embed(&vectors);
        Ok(solution_from_parts(*params, basis, values, full, Some(parity)))
    } else {
        let values = symmetric_eigenvalues(h.view(), &context)?;
        let rows = basis.dim(params);
        Ok(solution_from_parts(
            *params,
            basis,
            values,
            Array2::zeros((rows, 0)),
            Some(parity),
        ))
    }
}

/// `<Pi> = sum |c_{n,m_z}|^2 (-1)^(n + m_z + j)` for Fock-basis amplitudes.
pub fn parity_expectation(coeffs: &CoefficientVector) -> Result<f64> {
    if coeffs.repr != Representation::Fock {
        return Err(DickeError::param("parity expectation needs Fock-basis amplitudes"));
    }
    Ok(coeffs
        .values
        .indexed_iter()
        .map(|((b, a), v)| if (b + a) % 2 == 0 { v * v } else { -v * v })
        .sum())
}

pub fn classify_parity(expectation: f64) -> Parity {
    if expectation > 1.0 - PARITY_TOLERANCE {
        Parity::Even
    } else if expectation < -1.0 + PARITY_TOLERANCE {
        Parity::Odd
    } else {
        Parity::Unresolved
    }
}

/// Eigenvector `k` of `sol` expressed in the Fock basis `|n; j, m_z>`.
///
/// Efficient-basis vectors go through the displaced-Fock map (with
/// `map`, which must match the solution's cutoff) and the x -> z rotation.
pub fn fock_vector(sol: &EigenSolution, k: usize, map: Option<&EfficientToFockMap>) -> Result<CoefficientVector> {
    let c = sol.coefficient_vector(k);
    match sol.basis.kind {
        BasisKind::Fock => Ok(c),
        BasisKind::Efficient => {
            let map = map.ok_or_else(|| DickeError::param("efficient-basis vector needs a Fock map"))?;
            rotate_atomic_x_to_z(&map.map(&c)?)
        }
    }
}

/// Outcome of post hoc parity labelling.
#[derive(Debug, Clone, PartialEq)]
pub struct ParityReport {
    pub expectations: Vec<f64>,
    /// Converged states whose parity could not be resolved; nonzero means the
    /// mapping cutoff is too small.
    pub unresolved_converged: usize,
}

/// Labels every state from `<Pi>` evaluated on its Fock-basis amplitudes.
pub fn assign_parity(sol: &EigenSolution, fock_coeffs: &[CoefficientVector]) -> Result<(EigenSolution, ParityReport)> {
    if fock_coeffs.len() != sol.len() {
        return Err(DickeError::param(format!(
            "{} Fock vectors for {} states",
            fock_coeffs.len(),
            sol.len()
        )));
    }
    let expectations = fock_coeffs
        .iter()
        .map(parity_expectation)
        .collect::<Result<Vec<_>>>()?;
    let mut out = sol.clone();
    out.parity = expectations.iter().map(|&e| classify_parity(e)).collect();
    let unresolved_converged = out
        .parity
        .iter()
        .zip(&out.converged)
        .filter(|(p, &c)| c && **p == Parity::Unresolved)
        .count();
    Ok((
        out,
        ParityReport {
            expectations,
            unresolved_converged,
        },
    ))
}

/// Maps every eigenvector of `sol` to the Fock basis, with `n_max = 3 N_max`
/// for efficient-basis solutions.
pub fn fock_vectors(sol: &EigenSolution) -> Result<Vec<CoefficientVector>> {
    let map = match sol.basis.kind {
        BasisKind::Efficient => Some(EfficientToFockMap::new(
            &sol.params,
            sol.basis.boson_cutoff,
            3 * sol.basis.boson_cutoff,
        )?),
        BasisKind::Fock => None,
    };
    (0..sol.len()).map(|k| fock_vector(sol, k, map.as_ref())).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::eigen::diagonalize;
    use crate::model::hamiltonian::build_hamiltonian;

    #[test]
    fn sectors_partition_the_basis() {
        for twice_j in [1u32, 2, 5, 6] {
            let p = ModelParams::resonant(1.0, twice_j as f64 / 2.0).unwrap();
            for basis in [BasisSpec::fock(7), BasisSpec::efficient(7)] {
                let even = ParitySector::new(&p, basis, Parity::Even).unwrap();
                let odd = ParitySector::new(&p, basis, Parity::Odd).unwrap();
                assert_eq!(even.dim() + odd.dim(), basis.dim(&p));
            }
        }
    }

    #[test]
    fn sector_spectra_reassemble_full_spectrum() {
        for (twice_j, basis) in [(4u32, BasisSpec::efficient(10)), (3, BasisSpec::fock(12)), (6, BasisSpec::efficient(8))] {
            let p = ModelParams::new(1.0, 0.9, 0.8, twice_j as f64 / 2.0).unwrap();
            let full = diagonalize(build_hamiltonian(&p, basis).unwrap()).unwrap();
            let even = diagonalize_sector(&p, basis, Parity::Even, false).unwrap();
            let odd = diagonalize_sector(&p, basis, Parity::Odd, false).unwrap();
            let mut merged: Vec<f64> = even.energies.iter().chain(&odd.energies).copied().collect();
            merged.sort_by(f64::total_cmp);
            for (a, b) in merged.iter().zip(&full.energies) {
                assert!((a - b).abs() < 1e-10, "{a} vs {b}");
            }
        }
    }

    #[test]
    fn fock_product_state_parity() {
        // |n = 2; j, m_z = -j>
        let p = ModelParams::resonant(0.0, 1.0).unwrap();
        let mut v = Array2::zeros((4, 3));
        v[(2, 0)] = 1.0;
        let c = CoefficientVector {
            repr: Representation::Fock,
            values: v,
        };
        let e = parity_expectation(&c).unwrap();
        assert_eq!(e, 1.0);
        assert_eq!(classify_parity(e), Parity::Even);
        let _ = p;
    }

    #[test]
    fn opposite_parity_mixture_is_unresolved() {
        let mut v = Array2::zeros((2, 2));
        v[(0, 0)] = std::f64::consts::FRAC_1_SQRT_2;
        v[(1, 0)] = std::f64::consts::FRAC_1_SQRT_2;
        let c = CoefficientVector {
            repr: Representation::Fock,
            values: v,
        };
        let e = parity_expectation(&c).unwrap();
        assert!(e.abs() < 1e-15);
        assert_eq!(classify_parity(e), Parity::Unresolved);
    }

    #[test]
    fn efficient_sector_vectors_have_sector_parity() {
        let p = ModelParams::resonant(1.0, 2.0).unwrap();
        let basis = BasisSpec::efficient(20);
        for parity in [Parity::Even, Parity::Odd] {
            let sol = diagonalize_sector(&p, basis, parity, true).unwrap();
            let vecs = fock_vectors(&sol).unwrap();
            let low: Vec<usize> = (0..sol.len()).filter(|&k| sol.energies[k] < 0.0).collect();
            assert!(!low.is_empty());
            for k in low {
                let e = parity_expectation(&vecs[k]).unwrap();
                assert_eq!(classify_parity(e), parity, "state {k}: <Pi> = {e}");
            }
        }
    }
}
