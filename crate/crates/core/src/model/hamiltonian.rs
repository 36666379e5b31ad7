//! Dicke Hamiltonian matrices in the Fock and efficient bases.

use ndarray::Array2;

use crate::basis_map::DisplacementKernel;
use crate::error::{DickeError, Result};
use crate::params::{BasisKind, BasisSpec, ModelParams};
use crate::spin::{jz_in_x_basis, ladder};

/// Dense real symmetric Hamiltonian, in energy units (not scaled by `j`).
#[derive(Debug, Clone)]
pub struct HamiltonianMatrix {
    pub entries: Array2<f64>,
    pub basis: BasisSpec,
    pub params: ModelParams,
}

impl HamiltonianMatrix {
    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }
}

/// Matrix elements of the Hamiltonian in a truncated product basis,
/// evaluated on demand.
#[derive(Debug, Clone)]
pub enum ElementSource {
    Fock {
        params: ModelParams,
        n_max: usize,
    },
    Efficient {
        params: ModelParams,
        big_n_max: usize,
        /// `<N'|D(+G)|N>`; the `-G` block is its transpose.
        shift_up: Array2<f64>,
    },
}

impl ElementSource {
    pub fn new(params: &ModelParams, basis: BasisSpec) -> Self {
        match basis.kind {
            BasisKind::Fock => ElementSource::Fock {
                params: *params,
                n_max: basis.boson_cutoff,
            },
            BasisKind::Efficient => {
                let g = params.displacement_scale();
                let n = basis.boson_cutoff;
                ElementSource::Efficient {
                    params: *params,
                    big_n_max: n,
                    shift_up: DisplacementKernel::new(g, n, n).entries,
                }
            }
        }
    }

    pub fn params(&self) -> &ModelParams {
        match self {
            ElementSource::Fock { params, .. } | ElementSource::Efficient { params, .. } => params,
        }
    }

    pub fn basis(&self) -> BasisSpec {
        match self {
            ElementSource::Fock { n_max, .. } => BasisSpec::fock(*n_max),
            ElementSource::Efficient { big_n_max, .. } => BasisSpec::efficient(*big_n_max),
        }
    }

    pub fn dim(&self) -> usize {
        self.basis().dim(self.params())
    }

    /// `<row|H|col>` for boson-major basis indices.
    pub fn element(&self, row: usize, col: usize) -> f64 {
        let p = self.params();
        let d = p.atomic_dim();
        let (b1, a1) = (row / d, row % d);
        let (b2, a2) = (col / d, col % d);
        let j = p.j();
        let (m1, m2) = (p.m_of(a1), p.m_of(a2));
        match self {
            ElementSource::Fock { .. } => {
                if row == col {
                    return p.omega() * b1 as f64 + p.omega0() * m1;
                }
                if a1.abs_diff(a2) != 1 || b1.abs_diff(b2) != 1 {
                    return 0.0;
                }
                let coupling = p.gamma() / (2.0 * j).sqrt();
                let boson = (b1.max(b2) as f64).sqrt();
                coupling * boson * ladder(j, m1, m2)
            }
            ElementSource::Efficient { shift_up, .. } => {
                if a1 == a2 {
                    if b1 != b2 {
                        return 0.0;
                    }
                    let g = p.displacement_scale();
                    return p.omega() * (b1 as f64 - g * g * m1 * m1);
                }
                if a1.abs_diff(a2) != 1 {
                    return 0.0;
                }
                // <N'| D(G (m' - m)) |N> between displaced oscillators
                let overlap = if a1 > a2 {
                    shift_up[(b1, b2)]
                } else {
                    shift_up[(b2, b1)]
                };
                p.omega0() * jz_in_x_basis(j, m1, m2) * overlap
            }
        }
    }

    /// Dense matrix over the whole truncated basis.
    pub fn dense(&self) -> Array2<f64> {
        let n = self.dim();
        let p = self.params();
        let d = p.atomic_dim();
        let mut h = Array2::zeros((n, n));
        match self {
            ElementSource::Fock { .. } => {
                for row in 0..n {
                    h[(row, row)] = self.element(row, row);
                    let (b, a) = (row / d, row % d);
                    // neighbours with boson number b + 1
                    for a2 in [a.wrapping_sub(1), a + 1] {
                        if a2 < d && (b + 1) * d + a2 < n {
                            let col = (b + 1) * d + a2;
                            let v = self.element(row, col);
                            h[(row, col)] = v;
                            h[(col, row)] = v;
                        }
                    }
                }
            }
            ElementSource::Efficient { big_n_max, .. } => {
                let bd = big_n_max + 1;
                for row in 0..n {
                    h[(row, row)] = self.element(row, row);
                }
                for a in 0..d - 1 {
                    for b1 in 0..bd {
                        for b2 in 0..bd {
                            let row = b1 * d + a + 1;
                            let col = b2 * d + a;
                            let v = self.element(row, col);
                            h[(row, col)] = v;
                            h[(col, row)] = v;
                        }
                    }
                }
            }
        }
        h
    }
}

/// Largest basis the dense builders accept.
pub const MAX_DENSE_DIM: usize = 32_768;

fn check_cutoff(params: &ModelParams, cutoff: usize) -> Result<()> {
    let dim = (cutoff + 1)
        .checked_mul(params.atomic_dim())
        .ok_or_else(|| DickeError::param("basis dimension overflows"))?;
    if dim > MAX_DENSE_DIM {
        return Err(DickeError::param(format!(
            "basis dimension {dim} is beyond dense storage"
        )));
    }
    Ok(())
}

/// Dicke Hamiltonian over `|n> (x) |j, m_z>`, `n = 0..=n_max`.
///
/// Diagonal `omega n + omega0 m_z`; the interaction
/// `gamma/sqrt(2j) (a^+ + a)(J_+ + J_-)` couples `n -> n +/- 1` with `m_z -> m_z +/- 1`.
pub fn build_fock_hamiltonian(params: &ModelParams, n_max: usize) -> Result<HamiltonianMatrix> {
    check_cutoff(params, n_max)?;
    let source = ElementSource::new(params, BasisSpec::fock(n_max));
    Ok(HamiltonianMatrix {
        entries: source.dense(),
        basis: source.basis(),
        params: *params,
    })
}

/// Dicke Hamiltonian over the displaced basis `|N>_{m_x} (x) |j, m_x>`.
///
/// With `A = a + G J_x` the Hamiltonian reads `omega (A^+A - G^2 J_x^2) + omega0 J_z`;
/// the first part is diagonal with `omega (N - G^2 m_x^2)`, and `J_z` links
/// `m_x -> m_x +/- 1` through the overlap of oscillators displaced by `-G m_x`.
pub fn build_efficient_hamiltonian(params: &ModelParams, big_n_max: usize) -> Result<HamiltonianMatrix> {
    check_cutoff(params, big_n_max)?;
    let source = ElementSource::new(params, BasisSpec::efficient(big_n_max));
    Ok(HamiltonianMatrix {
        entries: source.dense(),
        basis: source.basis(),
        params: *params,
    })
}

pub fn build_hamiltonian(params: &ModelParams, basis: BasisSpec) -> Result<HamiltonianMatrix> {
    match basis.kind {
        BasisKind::Fock => build_fock_hamiltonian(params, basis.boson_cutoff),
        BasisKind::Efficient => build_efficient_hamiltonian(params, basis.boson_cutoff),
    }
}
