//! Collective pseudo-spin algebra in the `|j, m>` bases.
//!
//! Atomic indices run `0..=2j` with `m = index - j`.

use ndarray::Array2;

use crate::linalg::symmetric_eigen;

/// `sqrt(j(j+1) - m m')`, the ladder amplitude between `m` and `m' = m +/- 1`.
pub fn ladder(j: f64, m: f64, m_next: f64) -> f64 {
    (j * (j + 1.0) - m * m_next).max(0.0).sqrt()
}

/// `J_x` in the `J_z` eigenbasis.
pub fn jx_matrix(twice_j: u32) -> Array2<f64> {
    let d = twice_j as usize + 1;
    let j = twice_j as f64 / 2.0;
    let mut out = Array2::zeros((d, d));
    for a in 0..d - 1 {
        let m = a as f64 - j;
        let v = 0.5 * ladder(j, m, m + 1.0);
        out[(a, a + 1)] = v;
        out[(a + 1, a)] = v;
    }
    out
}

/// Real antisymmetric generator `-i J_y` in the `J_z` eigenbasis, so that
/// `exp(theta * K)` is the rotation `exp(-i theta J_y)`.
pub fn jy_generator(twice_j: u32) -> Array2<f64> {
    let d = twice_j as usize + 1;
    let j = twice_j as f64 / 2.0;
    let mut out = Array2::zeros((d, d));
    for a in 0..d - 1 {
        let m = a as f64 - j;
        let v = 0.5 * ladder(j, m, m + 1.0);
        // J_+ |m> = v' |m+1>, J_y = (J_+ - J_-)/(2i)
        out[(a + 1, a)] = -v;
        out[(a, a + 1)] = v;
    }
    out
}

/// Wigner small-d matrix `d^j(pi/2)`, entry `(m_z, m_x)`.
///
/// Column `m_x` holds the `J_x` eigenstate `|j, m_x> = exp(-i pi/2 J_y) |j, m_z = m_x>`
/// expanded in the `J_z` basis. Built from the eigenvectors of `J_x`, with
/// signs fixed by `sign d_{j, m} = (-1)^(j - m)`.
pub fn wigner_d_half_pi(twice_j: u32) -> Array2<f64> {
    let d = twice_j as usize + 1;
    let jx = jx_matrix(twice_j);
    let (_, mut vecs) = symmetric_eigen(jx.view(), "J_x").expect("J_x eigenproblem is well posed");
    let top = d - 1;
    for col in 0..d {
        // (-1)^(j - m) with j - m = top - col
        let want_negative = (top - col) % 2 == 1;
        if (vecs[(top, col)] < 0.0) != want_negative {
            vecs.column_mut(col).mapv_inplace(|v| -v);
        }
    }
    vecs
}

/// `<j, m'_x| J_z |j, m_x>`: only `m'_x = m_x +/- 1` is nonzero, with value
/// `-sqrt(j(j+1) - m m') / 2`.
pub fn jz_in_x_basis(j: f64, m: f64, m_next: f64) -> f64 {
    if (m - m_next).abs() == 1.0 {
        -0.5 * ladder(j, m, m_next)
    } else {
        0.0
    }
}

/// Signs `s(m_x)` with `exp(i pi (J_z + j)) |j, m_x> = s(m_x) |j, -m_x>`.
pub fn x_basis_parity_signs(twice_j: u32) -> Vec<f64> {
    let d = twice_j as usize + 1;
    let dm = wigner_d_half_pi(twice_j);
    (0..d)
        .map(|col| {
            let mirror = d - 1 - col;
            let s: f64 = (0..d)
                .map(|row| {
                    let phase = if row % 2 == 0 { 1.0 } else { -1.0 };
                    dm[(row, mirror)] * phase * dm[(row, col)]
                })
                .sum();
            s.signum()
        })
        .collect()
}
