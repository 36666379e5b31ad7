use dicke_core::model::*;
use dicke_core::spectral::*;
use dicke_core::{BasisSpec, ModelParams};
use ndarray::Array2;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};

#[test]
fn ratio_arithmetic() {
    let s = consecutive_ratios(&[0.0, 1.0, 2.0, 3.0]).unwrap();
    assert_eq!(s.ratios, vec![1.0, 1.0]);
    assert_eq!(consecutive_ratios(&[0.0, 1.0, 3.0]).unwrap().ratios, vec![0.5]);
    assert!(consecutive_ratios(&[0.0, 1.0]).is_err());
    let merged = consecutive_ratios(&[0.0, 1.0, 1.0 + 1e-15, 3.0]).unwrap();
    assert_eq!(merged.merged, 1);
    assert_eq!(merged.ratios, vec![0.5]);
}

#[test]
fn window_edges() {
    let s = RatioSeries {
        epsilons: (0..40).map(f64::from).collect(),
        ratios: vec![0.25; 40],
        merged: 0,
    };
    assert!(windowed_average(&s, 12).unwrap().iter().all(|(_, r)| *r == 0.25));
    let s = consecutive_ratios(&[0.0, 1.0, 3.0, 4.0, 4.5, 7.0, 7.2, 9.0, 9.1, 12.0, 12.5, 13.0, 14.0]).unwrap();
    let global = s.ratios.iter().sum::<f64>() / s.len() as f64;
    for (_, r) in windowed_average(&s, s.len()).unwrap() {
        assert!((r - global).abs() < 1e-15);
    }
    assert!(windowed_average(&s, 9).is_err());
}

#[test]
fn poisson_calibration() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut e = 0.0;
    let levels: Vec<f64> = (0..100_002)
        .map(|_| {
            e += <Exp1 as Distribution<f64>>::sample(&Exp1, &mut rng);
            e
        })
        .collect();
    let s = consecutive_ratios(&levels).unwrap();
    let mean = s.ratios.iter().sum::<f64>() / s.len() as f64;
    assert!((mean - POISSON_MEAN_RATIO).abs() < 0.005, "{mean}");
}

#[test]
fn goe_calibration() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let n = 400;
    let mut all = Vec::new();
    for _ in 0..10 {
        let a = Array2::from_shape_fn((n, n), |_| StandardNormal.sample(&mut rng));
        let h: Array2<f64> = &a + &a.t();
        let (e, _) = dicke_core::linalg::symmetric_eigen(h.view(), "goe").unwrap();
        // central half of the semicircle
        let s = consecutive_ratios(&e[n / 4..3 * n / 4]).unwrap();
        all.extend(s.ratios);
    }
    let mean = all.iter().sum::<f64>() / all.len() as f64;
    assert!((mean - GOE_MEAN_RATIO).abs() < 0.01, "{mean}");
}

fn levels() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.01f64..3.0, 3..60).prop_map(|gaps| {
        let mut e = 0.0;
        gaps.into_iter()
            .map(|g| {
                e += g;
                e
            })
            .collect()
    })
}

proptest! {
    #[test]
    fn ratios_are_affine_invariant(e in levels(), a in 0.1f64..10.0, b in -5.0f64..5.0) {
        let r0 = consecutive_ratios(&e).unwrap().ratios;
        let moved: Vec<f64> = e.iter().map(|x| a * x + b).collect();
        let r1 = consecutive_ratios(&moved).unwrap().ratios;
        prop_assert_eq!(r0.len(), e.len() - 2);
        for (x, y) in r0.iter().zip(&r1) {
            prop_assert!((x - y).abs() < 1e-9);
            prop_assert!(*x > 0.0 && *x <= 1.0);
        }
    }

    #[test]
    fn ratios_are_reversal_invariant(e in levels()) {
        let r0 = consecutive_ratios(&e).unwrap().ratios;
        let rev: Vec<f64> = e.iter().rev().map(|x| -x).collect();
        let mut r1 = consecutive_ratios(&rev).unwrap().ratios;
        r1.reverse();
        for (x, y) in r0.iter().zip(&r1) {
            prop_assert!((x - y).abs() < 1e-12);
        }
    }
}

#[test]
fn mixing_parity_sectors_pushes_toward_poisson() {
    let p = ModelParams::resonant(1.0, 8.0).unwrap();
    let tol = ConvergenceTolerances::default();
    let basis = BasisSpec::efficient(60);
    let even = converged_sector(&p, basis, Parity::Even, tol, false).unwrap();
    let odd = converged_sector(&p, basis, Parity::Odd, tol, false).unwrap();
    let (even_levels, eps_t) = converged_levels(&even).unwrap();
    let (odd_levels, _) = converged_levels(&odd).unwrap();
    let lo = -0.8;
    let hi = eps_t;
    let single = consecutive_ratios(&even_levels).unwrap().mean_in(lo, hi).unwrap();
    let mut mixed = even_levels.clone();
    mixed.extend(odd_levels.iter().filter(|&&e| e <= eps_t));
    mixed.sort_by(f64::total_cmp);
    let both = consecutive_ratios(&mixed).unwrap().mean_in(lo, hi).unwrap();
    assert!(single > 0.48, "single sector {single}");
    assert!(both < single - 0.05, "mixed {both} vs {single}");
}

#[test]
fn rotating_wave_spectrum_is_poissonian() {
    let tc = ModelParams::resonant(1.0, 8.0).unwrap();
    let sol = tavis_cummings_spectrum(&tc, 60, false).unwrap();
    let edge = tavis_cummings_complete_below(&tc, 60).unwrap();
    let levels: Vec<f64> = sol.energies.iter().copied().filter(|&e| e < edge).collect();
    let r = consecutive_ratios(&levels).unwrap().mean_in(-0.8, edge).unwrap();
    assert!(r < 0.45, "rotating wave {r}");
}

#[test]
fn map_leaves_unconverged_cells_empty() {
    let base = ModelParams::resonant(1.0, 4.0).unwrap();
    let grid = r_map(&base, &[0.5, 1.0], BasisSpec::efficient(40), &[-0.5, 0.5, 50.0], Some(20), ConvergenceTolerances::default()).unwrap();
    for row in &grid.values {
        assert!(row[0].is_some());
        assert!(row[2].is_none());
    }
}
