mod common;

use common::{annihilation, expm, fixture_values, normalized};
use dicke_core::basis_map::*;
use dicke_core::ModelParams;
use ndarray::{s, Array2};
use proptest::prelude::*;

fn expm_kernel(alpha: f64, n_max: usize, big_n_max: usize) -> Array2<f64> {
    let a = annihilation(199);
    let generator = (&a.t() - &a) * alpha;
    expm(&generator).slice(s![..=n_max, ..=big_n_max]).to_owned()
}

#[test]
fn kernel_matches_matrix_exponential() {
    for alpha in [0.3, 1.3, 3.0, -1.3] {
        let oracle = expm_kernel(alpha, 120, 40);
        let kernel = DisplacementKernel::new(alpha, 120, 40);
        let worst = common::max_abs_diff(&oracle, &kernel.entries);
        assert!(worst < 1e-8, "alpha {alpha}: {worst}");
        for norm in kernel.column_norms() {
            assert!(norm >= 1.0 - 1e-10 && norm <= 1.0 + 1e-12, "{norm}");
        }
    }
}

#[test]
fn full_kernel_at_moderate_displacement() {
    let oracle = expm_kernel(1.3, 60, 20);
    let kernel = DisplacementKernel::new(1.3, 60, 20);
    assert!(common::max_abs_diff(&oracle, &kernel.entries) < 1e-8);
}

#[test]
fn kernel_columns_stay_unitary_up_to_the_largest_displacement() {
    let p = ModelParams::resonant(1.0, 30.0).unwrap();
    let alpha = p.displacement_scale() * p.j();
    let kernel = DisplacementKernel::new(alpha, 3 * 140, 140);
    for norm in kernel.column_norms() {
        assert!((1.0 - 1e-10..=1.0 + 1e-10).contains(&norm), "{norm}");
    }
}

fn random_efficient(p: &ModelParams, big_n_max: usize, seed: u64) -> CoefficientVector {
    let d = p.atomic_dim();
    let v = normalized(fixture_values(seed, (big_n_max + 1) * d));
    CoefficientVector::from_flat(Representation::Efficient, &v, d).unwrap()
}

#[test]
fn photon_number_agrees_across_representations() {
    let p = ModelParams::resonant(1.0, 3.0).unwrap();
    let g = p.displacement_scale();
    // random amplitudes decaying in N like converged eigenstates; flat weight on
    // N = 15 at the largest displacement loses ~1e-6 of norm past n = 45 and
    // shifts <n> by ~1e-5
    let mut v = random_efficient(&p, 15, 3);
    for (big, mut row) in v.values.rows_mut().into_iter().enumerate() {
        row *= (-(big as f64) / 3.0).exp();
    }
    let n = v.norm_sqr().sqrt();
    v.values /= n;
    // a = A - G J_x acts within each m_x column of the efficient amplitudes
    let mut native = 0.0;
    for a in 0..p.atomic_dim() {
        let m = p.m_of(a);
        for big in 0..=15 {
            let c = v.values[(big, a)];
            native += c * c * (big as f64 + g * g * m * m);
            if big < 15 {
                native -= 2.0 * g * m * ((big + 1) as f64).sqrt() * c * v.values[(big + 1, a)];
            }
        }
    }
    let fock = map_efficient_to_fock(&v, &p, 45).unwrap();
    assert!((fock.norm_sqr() - 1.0).abs() < 1e-6);
    let rotated = rotate_atomic_x_to_z(&fock).unwrap();
    assert!((rotated.norm_sqr() - fock.norm_sqr()).abs() < 1e-12);
    let mapped: f64 = rotated
        .values
        .rows()
        .into_iter()
        .enumerate()
        .map(|(n, row)| n as f64 * row.iter().map(|c| c * c).sum::<f64>())
        .sum();
    assert!((mapped - native).abs() < 1e-6, "{mapped} vs {native}");
}

#[test]
fn round_trip_recovers_amplitudes() {
    let p = ModelParams::resonant(1.0, 2.0).unwrap();
    let map = EfficientToFockMap::new(&p, 20, 60).unwrap();
    let v = random_efficient(&p, 20, 9);
    let back = map.project_back(&map.map(&v).unwrap()).unwrap();
    assert!(common::max_abs_diff(&v.values, &back.values) < 1e-6);
    let z = rotate_atomic_x_to_z(&map.map(&v).unwrap()).unwrap();
    let x = rotate_atomic_z_to_x(&z).unwrap();
    assert!(common::max_abs_diff(&x.values, &map.map(&v).unwrap().values) < 1e-12);
}

#[test]
fn mapping_requires_enough_fock_levels() {
    let p = ModelParams::resonant(1.0, 2.0).unwrap();
    assert!(EfficientToFockMap::new(&p, 20, 59).is_err());
}

#[test]
fn truncated_map_reports_lost_norm() {
    let p = ModelParams::resonant(2.0, 4.0).unwrap();
    let d = p.atomic_dim();
    // top efficient level at the largest displacement leaks past n_max
    let mut values = Array2::zeros((11, d));
    values[(10, d - 1)] = 1.0;
    let v = CoefficientVector { repr: Representation::Efficient, values };
    let map = EfficientToFockMap::new(&p, 10, 30).unwrap();
    assert!(map.map(&v).is_err());
    assert!(map.apply(&v).unwrap().norm_sqr() < 1.0 - 1e-6);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn map_is_linear(seed_a in 0u64..1000, seed_b in 0u64..1000, s in -2.0f64..2.0, t in -2.0f64..2.0) {
        let p = ModelParams::resonant(0.7, 1.5).unwrap();
        let map = EfficientToFockMap::new(&p, 8, 24).unwrap();
        let a = random_efficient(&p, 8, seed_a);
        let b = random_efficient(&p, 8, seed_b);
        let combo = CoefficientVector { repr: Representation::Efficient, values: &a.values * s + &b.values * t };
        let lhs = map.apply(&combo).unwrap().values;
        let rhs = map.apply(&a).unwrap().values * s + map.apply(&b).unwrap().values * t;
        prop_assert!(common::max_abs_diff(&lhs, &rhs) < 1e-12);
    }

    #[test]
    fn displacement_is_orthogonal_on_the_retained_block(alpha in -2.0f64..2.0) {
        let k = DisplacementKernel::new(alpha, 90, 15).entries;
        let gram = k.t().dot(&k);
        prop_assert!(common::max_abs_diff(&gram, &Array2::eye(16)) < 1e-10);
    }
}
