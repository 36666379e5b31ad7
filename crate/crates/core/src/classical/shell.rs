use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{classical_ground_state, PhaseSpacePoint};
use crate::error::{DickeError, Result};
use crate::params::ModelParams;

/// Draw budget per requested point before the shell is declared empty.
pub const MAX_DRAWS_PER_POINT: usize = 1_000_000;

/// Deterministic 64-bit seed for sample `sample` of cell `cell`.
pub fn derive_seed(seed: u64, cell: u64, sample: u64) -> u64 {
    // splitmix64 finalizer over a combined key
    let mut z = seed
        .wrapping_mul(0x9E37_79B9_7F4A_7C15)
        .wrapping_add(cell.wrapping_mul(0xC2B2_AE3D_27D4_EB4F))
        .wrapping_add(sample.wrapping_mul(0x1656_67B1_9E37_79F9));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// One point on the shell `h(x) = epsilon`, or `None` if the drawn `(Q, P)`
/// admits no bosonic solution.
fn draw<R: Rng>(rng: &mut R, epsilon: f64, params: &ModelParams) -> Option<PhaseSpacePoint> {
    let (w, w0, g) = (params.omega(), params.omega0(), params.gamma());
    // uniform on the disk of radius 2
    let (bq, bp) = loop {
        let a: f64 = rng.gen_range(-2.0..2.0);
        let b: f64 = rng.gen_range(-2.0..2.0);
        if a * a + b * b < 4.0 {
            break (a, b);
        }
    };
    let r2 = bq * bq + bp * bp;
    let atomic = w0 * (r2 / 2.0 - 1.0);
    let linear = 2.0 * g * bq * (1.0 - r2 / 4.0).sqrt();
    // w q^2 / 2 + linear q + atomic - epsilon <= 0
    let disc = linear * linear - 2.0 * w * (atomic - epsilon);
    if disc < 0.0 {
        return None;
    }
    let root = disc.sqrt();
    let (lo, hi) = ((-linear - root) / w, (-linear + root) / w);
    let q = if hi > lo { rng.gen_range(lo..=hi) } else { lo };
    let kinetic = (epsilon - atomic - linear * q - w * q * q / 2.0).max(0.0);
    let p = (2.0 * kinetic / w).sqrt();
    let sign = if rng.gen::<bool>() { 1.0 } else { -1.0 };
    Some(PhaseSpacePoint::new(q, sign * p, bq, bp))
}

/// Rejection sampling of `count` points with `h(x) = epsilon`.
pub fn sample_energy_shell(epsilon: f64, params: &ModelParams, count: usize, seed: u64) -> Result<Vec<PhaseSpacePoint>> {
    let ground = classical_ground_state(params).0;
    if epsilon < ground {
        return Err(DickeError::EmptyShell { epsilon, ground });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    let budget = MAX_DRAWS_PER_POINT.saturating_mul(count.max(1));
    let mut draws = 0usize;
    while out.len() < count {
        if draws >= budget {
            return Err(DickeError::EmptyShell { epsilon, ground });
        }
        draws += 1;
        if let Some(x) = draw(&mut rng, epsilon, params) {
            out.push(x);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classical::classical_hamiltonian;

    #[test]
    fn points_lie_on_shell() {
        let p = ModelParams::resonant(1.0, 30.0).unwrap();
        for eps in [-1.9, -0.5, 0.75, 2.0] {
            for x in sample_energy_shell(eps, &p, 200, 7).unwrap() {
                let h = classical_hamiltonian(&x, &p).unwrap();
                assert!((h - eps).abs() < 1e-12, "{h} vs {eps}");
            }
        }
    }

    #[test]
    fn seeded_samples_repeat() {
        let p = ModelParams::resonant(1.0, 30.0).unwrap();
        let a = sample_energy_shell(0.3, &p, 50, 11).unwrap();
        let b = sample_energy_shell(0.3, &p, 50, 11).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, sample_energy_shell(0.3, &p, 50, 12).unwrap());
    }

    #[test]
    fn below_ground_is_empty() {
        let p = ModelParams::resonant(1.0, 30.0).unwrap();
        assert!(matches!(
            sample_energy_shell(-2.2, &p, 1, 0),
            Err(DickeError::EmptyShell { .. })
        ));
    }

    #[test]
    fn near_ground_points_cluster_at_minima() {
        let p = ModelParams::resonant(1.0, 30.0).unwrap();
        let (e, min) = classical_ground_state(&p);
        for x in sample_energy_shell(e + 1e-4, &p, 20, 3).unwrap() {
            // the two minima are mirror images under (q, Q) -> (-q, -Q)
            let d = ((x.q.abs() - min.q.abs()).powi(2) + (x.big_q.abs() - min.big_q.abs()).powi(2) + x.p.powi(2) + x.big_p.powi(2)).sqrt();
            assert!(d < 0.1, "{x:?}");
            assert!(x.q * x.big_q <= 0.0);
        }
    }

    #[test]
    fn derived_seeds_differ() {
        assert_ne!(derive_seed(1, 0, 0), derive_seed(1, 0, 1));
        assert_ne!(derive_seed(1, 0, 1), derive_seed(1, 1, 0));
        assert_eq!(derive_seed(5, 6, 7), derive_seed(5, 6, 7));
    }
}
