#![allow(dead_code)]

use ndarray::{Array2, Axis};

/// Annihilation operator on `n_max + 1` Fock levels.
pub fn annihilation(n_max: usize) -> Array2<f64> {
    let mut a = Array2::zeros((n_max + 1, n_max + 1));
    for n in 1..=n_max {
        a[(n - 1, n)] = (n as f64).sqrt();
    }
    a
}

/// `J_+` in the ascending `m_z` basis.
pub fn j_plus(twice_j: u32) -> Array2<f64> {
    let j = twice_j as f64 / 2.0;
    let d = twice_j as usize + 1;
    let mut jp = Array2::zeros((d, d));
    for a in 0..d - 1 {
        let m = a as f64 - j;
        jp[(a + 1, a)] = (j * (j + 1.0) - m * (m + 1.0)).sqrt();
    }
    jp
}

pub fn j_z(twice_j: u32) -> Array2<f64> {
    let j = twice_j as f64 / 2.0;
    Array2::from_diag(&ndarray::Array1::from_iter((0..=twice_j).map(|a| a as f64 - j)))
}

/// Kronecker product with the index `(row of a) * b.nrows() + (row of b)`.
pub fn kron(a: &Array2<f64>, b: &Array2<f64>) -> Array2<f64> {
    let (ar, ac) = a.dim();
    let (br, bc) = b.dim();
    Array2::from_shape_fn((ar * br, ac * bc), |(i, k)| a[(i / br, k / bc)] * b[(i % br, k % bc)])
}

/// Matrix exponential by scaling and squaring with a Taylor series.
pub fn expm(a: &Array2<f64>) -> Array2<f64> {
    let norm = a.iter().fold(0.0f64, |m, v| m.max(v.abs())) * a.nrows() as f64;
    let squarings = if norm > 0.5 { (norm / 0.5).log2().ceil() as i32 } else { 0 };
    let scaled = a / 2f64.powi(squarings);
    let n = a.nrows();
    let mut result = Array2::eye(n);
    let mut term = Array2::eye(n);
    for k in 1..40 {
        term = term.dot(&scaled) / k as f64;
        result += &term;
        if term.iter().all(|v| v.abs() < 1e-18) {
            break;
        }
    }
    for _ in 0..squarings {
        result = result.dot(&result);
    }
    result
}

/// Deterministic pseudo-random numbers in `[-1, 1)` for fixtures.
pub fn fixture_values(seed: u64, count: usize) -> Vec<f64> {
    let mut state = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
    (0..count)
        .map(|_| {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((state >> 11) as f64 / (1u64 << 53) as f64) * 2.0 - 1.0
        })
        .collect()
}

pub fn normalized(mut v: Vec<f64>) -> Vec<f64> {
    let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.iter_mut().for_each(|x| *x /= n);
    v
}

pub fn max_abs_diff(a: &Array2<f64>, b: &Array2<f64>) -> f64 {
    (a - b).iter().fold(0.0f64, |m, v| m.max(v.abs()))
}

pub fn column_sums(a: &Array2<f64>) -> Vec<f64> {
    a.sum_axis(Axis(0)).to_vec()
}
