//! Displaced-Fock overlaps `<n|D(alpha)|N>` and the change of representation
//! from the efficient basis to the (rotated) Fock basis.

use std::sync::OnceLock;

use ndarray::{Array2, ArrayView2, Axis};
use serde::{Deserialize, Serialize};

use crate::error::{DickeError, Result};
use crate::params::{BasisKind, ModelParams};
use crate::spin::wigner_d_half_pi;

/// Largest admissible norm deficit after mapping.
pub const MAP_NORM_TOLERANCE: f64 = 1e-6;

const LOG_FACTORIAL_TABLE: usize = 8192;

fn log_factorial_table() -> &'static [f64] {
    static TABLE: OnceLock<Vec<f64>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut t = Vec::with_capacity(LOG_FACTORIAL_TABLE);
        let mut acc = 0.0f64;
        t.push(0.0);
        for k in 1..LOG_FACTORIAL_TABLE {
            acc += (k as f64).ln();
            t.push(acc);
        }
        t
    })
}

/// `ln(n!)`.
pub fn ln_factorial(n: usize) -> f64 {
    let table = log_factorial_table();
    if n < table.len() {
        return table[n];
    }
    // Stirling series, far past the table
    let x = n as f64 + 1.0;
    (x - 0.5) * x.ln() - x + 0.5 * (2.0 * std::f64::consts::PI).ln() + 1.0 / (12.0 * x)
        - 1.0 / (360.0 * x.powi(3))
}

/// Fills `out[b]` with `L_b^k(x) / C(b + k, b)` for `b = 0..out.len()`.
///
/// Three-term recurrence in the lower index, normalized so that the values
/// stay O(1) even where `L_b^k` itself would overflow.
fn scaled_laguerre(k: usize, x: f64, out: &mut [f64]) {
    if out.is_empty() {
        return;
    }
    let kf = k as f64;
    out[0] = 1.0;
    if out.len() > 1 {
        out[1] = (1.0 + kf - x) / (1.0 + kf);
    }
    for b in 1..out.len().saturating_sub(1) {
        let bf = b as f64;
        out[b + 1] = ((2.0 * bf + 1.0 + kf - x) * out[b] - bf * out[b - 1]) / (bf + 1.0 + kf);
    }
}

/// Associated Laguerre polynomial `L_n^k(x)` by the lower-index recurrence.
pub fn laguerre(n: usize, k: usize, x: f64) -> f64 {
    let mut l = vec![0.0; n + 1];
    scaled_laguerre(k, x, &mut l);
    let ln_binom = ln_factorial(n + k) - ln_factorial(n) - ln_factorial(k);
    l[n] * ln_binom.exp()
}

/// `<upper|D(alpha)|lower>` for `upper >= lower`, given the scaled Laguerre value.
fn upper_element(upper: usize, lower: usize, alpha: f64, scaled: f64) -> f64 {
    let k = upper - lower;
    let x = alpha * alpha;
    let log_mag = 0.5 * (ln_factorial(upper) - ln_factorial(lower)) - ln_factorial(k)
        + k as f64 * alpha.abs().ln()
        - 0.5 * x;
    let sign = if alpha < 0.0 && k % 2 == 1 { -1.0 } else { 1.0 };
    sign * log_mag.exp() * scaled
}

/// Overlap `<n|D(alpha)|N>` of a Fock state with a displaced Fock state, real `alpha`.
///
/// For `n >= N` this is `sqrt(N!/n!) alpha^(n-N) e^(-alpha^2/2) L_N^(n-N)(alpha^2)`;
/// the `n < N` branch follows from `<n|D(alpha)|N> = (-1)^(N-n) <N|D(alpha)|n>`.
pub fn displacement_element(n: usize, big_n: usize, alpha: f64) -> f64 {
    if alpha == 0.0 {
        return if n == big_n { 1.0 } else { 0.0 };
    }
    let (upper, lower) = if n >= big_n { (n, big_n) } else { (big_n, n) };
    let mut l = vec![0.0; lower + 1];
    scaled_laguerre(upper - lower, alpha * alpha, &mut l);
    let v = upper_element(upper, lower, alpha, l[lower]);
    if n < big_n && (big_n - n) % 2 == 1 {
        -v
    } else {
        v
    }
}

/// The `(n_max+1) x (N_max+1)` block of `<n|D(alpha)|N>`.
#[derive(Debug, Clone)]
pub struct DisplacementKernel {
    pub alpha: f64,
    pub n_max: usize,
    pub big_n_max: usize,
    pub entries: Array2<f64>,
}

impl DisplacementKernel {
    pub fn new(alpha: f64, n_max: usize, big_n_max: usize) -> Self {
        let mut entries = Array2::zeros((n_max + 1, big_n_max + 1));
        if alpha == 0.0 {
            for i in 0..=n_max.min(big_n_max) {
                entries[(i, i)] = 1.0;
            }
        } else {
            let x = alpha * alpha;
            let k_top = n_max.max(big_n_max);
            let mut l = vec![0.0; n_max.max(big_n_max) + 1];
            for k in 0..=k_top {
                // lower index b pairs with upper b + k in either branch
                let b_fock = if k <= n_max { big_n_max.min(n_max - k) as isize } else { -1 };
                let b_eff = if k >= 1 && k <= big_n_max {
                    n_max.min(big_n_max - k) as isize
                } else {
                    -1
                };
                let b_top = b_fock.max(b_eff);
                if b_top < 0 {
                    continue;
                }
                let len = b_top as usize + 1;
                scaled_laguerre(k, x, &mut l[..len]);
                for b in 0..len {
                    let v = upper_element(b + k, b, alpha, l[b]);
                    if (b as isize) <= b_fock {
                        entries[(b + k, b)] = v;
                    }
                    if (b as isize) <= b_eff {
                        entries[(b, b + k)] = if k % 2 == 1 { -v } else { v };
                    }
                }
            }
        }
        DisplacementKernel {
            alpha,
            n_max,
            big_n_max,
            entries,
        }
    }

    /// `sum_n |<n|D|N>|^2` for every column `N`.
    pub fn column_norms(&self) -> Vec<f64> {
        self.entries
            .axis_iter(Axis(1))
            .map(|c| c.iter().map(|v| v * v).sum())
            .collect()
    }
}

/// Which product basis a set of amplitudes refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Representation {
    /// `|n> (x) |j, m_z>`
    Fock,
    /// `|n> (x) |j, m_x>`
    FockRotated,
    /// `|N>_{m_x} (x) |j, m_x>`
    Efficient,
}

impl From<BasisKind> for Representation {
    fn from(kind: BasisKind) -> Self {
        match kind {
            BasisKind::Fock => Representation::Fock,
            BasisKind::Efficient => Representation::Efficient,
        }
    }
}

/// Real amplitudes `c[(boson, atomic)]` of a pure state.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientVector {
    pub repr: Representation,
    pub values: Array2<f64>,
}

impl CoefficientVector {
    /// Reshapes a flat boson-major vector of length `(cutoff+1)(2j+1)`.
    pub fn from_flat(repr: Representation, flat: &[f64], atomic_dim: usize) -> Result<Self> {
        if atomic_dim == 0 || flat.len() % atomic_dim != 0 {
            return Err(DickeError::param(format!(
                "vector length {} is not a multiple of the atomic dimension {atomic_dim}",
                flat.len()
            )));
        }
        let values = Array2::from_shape_vec((flat.len() / atomic_dim, atomic_dim), flat.to_vec())
            .expect("shape checked");
        Ok(CoefficientVector { repr, values })
    }

    pub fn boson_cutoff(&self) -> usize {
        self.values.nrows() - 1
    }

    pub fn atomic_dim(&self) -> usize {
        self.values.ncols()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum()
    }

    pub fn flat(&self) -> Vec<f64> {
        self.values.iter().copied().collect()
    }
}

/// Precomputed kernels `<n|D(alpha_m)|N>`, `alpha_m = -G m_x`, one per atomic level.
///
/// Immutable once built, so one instance can serve many eigenvectors from
/// several threads.
#[derive(Debug, Clone)]
pub struct EfficientToFockMap {
    pub n_max: usize,
    pub big_n_max: usize,
    kernels: Vec<Array2<f64>>,
}

impl EfficientToFockMap {
    /// Requires `n_max >= 3 N_max`.
    pub fn new(params: &ModelParams, big_n_max: usize, n_max: usize) -> Result<Self> {
        if n_max < 3 * big_n_max {
            return Err(DickeError::param(format!(
                "Fock cutoff {n_max} must be at least 3 x efficient cutoff {big_n_max}"
            )));
        }
        let g = params.displacement_scale();
        let d = params.atomic_dim();
        let mut kernels: Vec<Option<Array2<f64>>> = vec![None; d];
        for a in (0..d).rev() {
            let m = params.m_of(a);
            let mirror = d - 1 - a;
            if let Some(k) = kernels[mirror].as_ref().filter(|_| m < 0.0) {
                // D(-alpha) = parity-flipped D(alpha)
                let flipped = Array2::from_shape_fn(k.dim(), |(n, big)| {
                    if (n + big) % 2 == 1 {
                        -k[(n, big)]
                    } else {
                        k[(n, big)]
                    }
                });
                kernels[a] = Some(flipped);
            } else {
                kernels[a] = Some(DisplacementKernel::new(-g * m, n_max, big_n_max).entries);
            }
        }
        Ok(EfficientToFockMap {
            n_max,
            big_n_max,
            kernels: kernels.into_iter().map(|k| k.expect("filled")).collect(),
        })
    }

    pub fn kernel(&self, atomic_index: usize) -> ArrayView2<'_, f64> {
        self.kernels[atomic_index].view()
    }

    /// `C_{n, m_x} = sum_N C_{N, m_x} <n|D(alpha_{m_x})|N>`, without the norm check.
    pub fn apply(&self, coeffs: &CoefficientVector) -> Result<CoefficientVector> {
        if coeffs.repr != Representation::Efficient {
            return Err(DickeError::param("mapping expects efficient-basis amplitudes"));
        }
        if coeffs.boson_cutoff() != self.big_n_max || coeffs.atomic_dim() != self.kernels.len() {
            return Err(DickeError::param(format!(
                "amplitudes of shape {:?} do not match the map ({} x {})",
                coeffs.values.dim(),
                self.big_n_max + 1,
                self.kernels.len()
            )));
        }
        let mut out = Array2::zeros((self.n_max + 1, self.kernels.len()));
        for (a, kernel) in self.kernels.iter().enumerate() {
            let col = kernel.dot(&coeffs.values.column(a));
            out.column_mut(a).assign(&col);
        }
        Ok(CoefficientVector {
            repr: Representation::FockRotated,
            values: out,
        })
    }

    /// Maps and checks that the norm survives the truncation.
    pub fn map(&self, coeffs: &CoefficientVector) -> Result<CoefficientVector> {
        let out = self.apply(coeffs)?;
        let deficit = coeffs.norm_sqr() - out.norm_sqr();
        if deficit > MAP_NORM_TOLERANCE {
            return Err(DickeError::Truncation {
                context: format!("efficient -> Fock map with n_max = {}", self.n_max),
                deficit,
                limit: MAP_NORM_TOLERANCE,
            });
        }
        Ok(out)
    }

    /// Adjoint map: projects rotated-Fock amplitudes back onto the efficient basis.
    pub fn project_back(&self, coeffs: &CoefficientVector) -> Result<CoefficientVector> {
        if coeffs.repr != Representation::FockRotated || coeffs.boson_cutoff() != self.n_max {
            return Err(DickeError::param("projection expects rotated-Fock amplitudes of matching size"));
        }
        let mut out = Array2::zeros((self.big_n_max + 1, self.kernels.len()));
        for (a, kernel) in self.kernels.iter().enumerate() {
            let col = kernel.t().dot(&coeffs.values.column(a));
            out.column_mut(a).assign(&col);
        }
        Ok(CoefficientVector {
            repr: Representation::Efficient,
            values: out,
        })
    }
}

/// One-shot form of [`EfficientToFockMap::map`].
pub fn map_efficient_to_fock(
    coeffs: &CoefficientVector,
    params: &ModelParams,
    n_max: usize,
) -> Result<CoefficientVector> {
    EfficientToFockMap::new(params, coeffs.boson_cutoff(), n_max)?.map(coeffs)
}

/// Applies `d^j(pi/2)` to the atomic index: `|n; m_x>` amplitudes to `|n; m_z>` amplitudes.
pub fn rotate_atomic_x_to_z(coeffs: &CoefficientVector) -> Result<CoefficientVector> {
    if coeffs.repr != Representation::FockRotated {
        return Err(DickeError::param("x -> z rotation expects rotated-Fock amplitudes"));
    }
    let d = wigner_d_for(coeffs.atomic_dim());
    Ok(CoefficientVector {
        repr: Representation::Fock,
        values: coeffs.values.dot(&d.t()),
    })
}

/// Inverse of [`rotate_atomic_x_to_z`].
pub fn rotate_atomic_z_to_x(coeffs: &CoefficientVector) -> Result<CoefficientVector> {
    if coeffs.repr != Representation::Fock {
        return Err(DickeError::param("z -> x rotation expects Fock amplitudes"));
    }
    let d = wigner_d_for(coeffs.atomic_dim());
    Ok(CoefficientVector {
        repr: Representation::FockRotated,
        values: coeffs.values.dot(&d),
    })
}

fn wigner_d_for(atomic_dim: usize) -> Array2<f64> {
    wigner_d_half_pi(atomic_dim as u32 - 1)
}
