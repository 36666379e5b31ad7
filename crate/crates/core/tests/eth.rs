use dicke_core::eth::*;
use dicke_core::model::*;
use dicke_core::{BasisSpec, ModelParams};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};

const TIGHT: ConvergenceTolerances = ConvergenceTolerances { energy: 1e-8, tail: 1e-8 };

fn j5() -> ModelParams {
    ModelParams::resonant(1.0, 5.0).unwrap()
}

#[test]
fn efficient_and_fock_routes_agree() {
    let p = j5();
    let eff = converged_sector(&p, BasisSpec::efficient(60), Parity::Even, TIGHT, true).unwrap();
    let fock = converged_sector(&p, BasisSpec::fock(150), Parity::Even, TIGHT, true).unwrap();
    let states: Vec<usize> = (0..60).collect();
    let counts = (eff.converged_indices(None).len(), fock.converged_indices(None).len());
    assert!(counts.0 >= 60 && counts.1 >= 60, "{counts:?}");
    for &k in &states {
        assert!((eff.energies[k] - fock.energies[k]).abs() < 1e-8);
    }
    for kind in [ObservableKind::PhotonNumber, ObservableKind::ExcitedAtoms] {
        let a = observable_matrix_for(&eff, &states, kind).unwrap();
        let b = observable_matrix_for(&fock, &states, kind).unwrap();
        for k in 0..60 {
            for l in 0..60 {
                // eigenvector signs are arbitrary
                let (x, y) = (a.elements[(k, l)], b.elements[(k, l)]);
                assert!((x.abs() - y.abs()).abs() < 1e-8, "{kind:?} ({k},{l}): {x} vs {y}");
            }
        }
    }
}

#[test]
fn native_excited_atoms_match_the_mapped_route() {
    for j in [1.0, 3.0, 5.0] {
        let p = ModelParams::resonant(0.9, j).unwrap();
        let sol = converged_sector(&p, BasisSpec::efficient(30), Parity::Odd, TIGHT, true).unwrap();
        let idx = sol.converged_indices(None);
        let native = observable_matrix_for(&sol, &idx, ObservableKind::ExcitedAtoms).unwrap();
        let photons = observable_matrix_for(&sol, &idx, ObservableKind::PhotonNumber).unwrap();
        let map = dicke_core::basis_map::EfficientToFockMap::new(&p, 30, 90).unwrap();
        for (row, &k) in idx.iter().enumerate() {
            let c = fock_vector(&sol, k, Some(&map)).unwrap();
            let n_ex = fock_expectation(&c, ObservableKind::ExcitedAtoms).unwrap();
            let n = fock_expectation(&c, ObservableKind::PhotonNumber).unwrap();
            assert!((native.elements[(row, row)] - n_ex).abs() < 1e-6, "j {j} state {k}");
            assert!((photons.elements[(row, row)] - n).abs() < 1e-6, "j {j} state {k}");
        }
    }
}

#[test]
fn opposite_parities_do_not_couple() {
    let p = ModelParams::resonant(0.8, 3.0).unwrap();
    let sol = converged_spectrum(&p, BasisSpec::efficient(30), TIGHT, true).unwrap();
    let idx = sol.converged_indices(None);
    for kind in [ObservableKind::PhotonNumber, ObservableKind::ExcitedAtoms] {
        let obs = observable_matrix_for(&sol, &idx, kind).unwrap();
        for (a, &k) in idx.iter().enumerate() {
            for (b, &l) in idx.iter().enumerate() {
                if sol.parity[k] != sol.parity[l] {
                    assert!(obs.elements[(a, b)].abs() < 1e-10);
                }
            }
        }
    }
    assert!(observable_matrix(&sol, ObservableKind::PhotonNumber).is_err());
}

#[test]
fn diagonals_respect_operator_bounds() {
    let p = ModelParams::resonant(1.0, 4.0).unwrap();
    let sol = converged_sector(&p, BasisSpec::efficient(40), Parity::Even, ConvergenceTolerances::default(), true).unwrap();
    let n = observable_matrix(&sol, ObservableKind::PhotonNumber).unwrap();
    let n_ex = observable_matrix(&sol, ObservableKind::ExcitedAtoms).unwrap();
    assert!(n.diagonal().iter().all(|&v| v >= -1e-10));
    assert!(n_ex.diagonal().iter().all(|&v| (-1e-8..=8.0 + 1e-8).contains(&v)));
    let scaled = n_ex.clone().scaled();
    assert!((scaled.elements[(0, 0)] * 4.0 - n_ex.elements[(0, 0)]).abs() < 1e-12);
}

#[test]
fn uncoupled_eigenstates_are_fock_states() {
    let p = ModelParams::resonant(0.0, 2.0).unwrap();
    let sol = converged_sector(&p, BasisSpec::fock(20), Parity::Even, TIGHT, true).unwrap();
    let obs = observable_matrix(&sol, ObservableKind::PhotonNumber).unwrap();
    for k in 0..obs.len() {
        for l in 0..obs.len() {
            let v = obs.elements[(k, l)];
            if k == l {
                assert!((v - v.round()).abs() < 1e-10);
            } else {
                assert!(v.abs() < 1e-10);
            }
        }
    }
}

#[test]
fn microcanonical_average_matches_recomputation() {
    let p = ModelParams::resonant(1.0, 4.0).unwrap();
    let sol = converged_sector(&p, BasisSpec::efficient(40), Parity::Even, ConvergenceTolerances::default(), true).unwrap();
    let obs = observable_matrix(&sol, ObservableKind::ExcitedAtoms).unwrap().scaled();
    let window = MicrocanonicalWindow::Levels { center: 0.75, count: 20 };
    let picked = window.select(&obs.energies);
    assert_eq!(picked.len(), 20);
    let idx = sol.converged_indices(None);
    let map = dicke_core::basis_map::EfficientToFockMap::new(&p, 40, 120).unwrap();
    let brute: f64 = picked
        .iter()
        .map(|&r| fock_expectation(&fock_vector(&sol, idx[r], Some(&map)).unwrap(), ObservableKind::ExcitedAtoms).unwrap() / 4.0)
        .sum::<f64>()
        / 20.0;
    assert!((microcanonical_average(&obs, &window).unwrap() - brute).abs() < 1e-6);
}

#[test]
fn diagonal_ensemble_with_uniform_weights_is_microcanonical() {
    let p = ModelParams::resonant(1.0, 3.0).unwrap();
    let sol = converged_sector(&p, BasisSpec::efficient(30), Parity::Even, TIGHT, true).unwrap();
    let obs = observable_matrix(&sol, ObservableKind::PhotonNumber).unwrap();
    let w = 1.0 / (obs.len() as f64).sqrt();
    let weights = vec![w; obs.len()];
    let all = MicrocanonicalWindow::Levels { center: 0.0, count: obs.len() };
    let de = diagonal_ensemble(&weights, &obs).unwrap();
    assert!((de - microcanonical_average(&obs, &all).unwrap()).abs() < 1e-12);
    assert!(diagonal_ensemble(&vec![0.5 * w; obs.len()], &obs).is_err());
}

#[test]
fn coherent_state_expectations_follow_the_classical_point() {
    let p = ModelParams::resonant(1.0, 10.0).unwrap();
    let (q, big_q) = (0.8, -1.1);
    let c = glauber_bloch_state(&p, q, big_q, 60).unwrap();
    assert!((c.norm_sqr() - 1.0).abs() < 1e-12);
    let n = fock_expectation(&c, ObservableKind::PhotonNumber).unwrap();
    let n_ex = fock_expectation(&c, ObservableKind::ExcitedAtoms).unwrap();
    assert!((n - p.j() * q * q / 2.0).abs() < 1e-10);
    assert!((n_ex - p.j() * big_q * big_q / 2.0).abs() < 1e-10);
}

#[test]
fn synthetic_distributions() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let normal: Vec<f64> = (0..20_000).map(|_| StandardNormal.sample(&mut rng)).collect();
    let fit = fit_distribution(&normal, false);
    assert!(fit.gaussian && fit.sigma > 0.97 && fit.sigma < 1.03);
    let fit = fit_distribution(&normal, true);
    assert!(fit.gaussian && fit.mean == 0.0);
    let area: f64 = fit.histogram.windows(2).map(|w| w[0].1 * (w[1].0 - w[0].0)).sum();
    assert!((area - 1.0).abs() < 0.05);
    let skewed: Vec<f64> = (0..20_000).map(|_| <Exp1 as Distribution<f64>>::sample(&Exp1, &mut rng)).collect();
    assert!(!fit_distribution(&skewed, false).gaussian);
    let spiky: Vec<f64> = (0..20_000).map(|i| if i % 100 == 0 { 10.0 } else { 0.0 }).collect();
    assert!(!fit_distribution(&spiky, false).gaussian);
    assert!(fit_distribution(&[2.0; 30], false).degenerate);
}

#[test]
fn diagonal_fluctuations_shrink_with_system_size() {
    let mut medians = Vec::new();
    for j in [4.0, 10.0] {
        let p = ModelParams::resonant(1.0, j).unwrap();
        let basis = BasisSpec::efficient(dicke_core::params::default_efficient_cutoff(&p));
        let sol = converged_sector(&p, basis, Parity::Even, ConvergenceTolerances::default(), true).unwrap();
        let w = default_eth_window(j);
        let obs = observable_matrix(&sol, ObservableKind::ExcitedAtoms).unwrap().scaled();
        let d: Vec<f64> = delta_mic(&obs, w)
            .unwrap()
            .into_iter()
            .filter(|(e, _)| *e > -0.5)
            .map(|(_, v)| v)
            .collect();
        medians.push(dicke_core::stats::median(&d));
    }
    assert!(medians[1] < medians[0], "{medians:?}");
}

#[test]
fn coherent_state_relaxes_to_the_microcanonical_value() {
    let j = 20.0;
    let p = ModelParams::resonant(1.0, j).unwrap();
    let basis = BasisSpec::efficient(dicke_core::params::default_efficient_cutoff(&p));
    let sol = converged_sector(&p, basis, Parity::Even, ConvergenceTolerances::default(), true).unwrap();
    let idx = sol.converged_indices(None);
    let n_max = 3 * basis.boson_cutoff;
    let map = dicke_core::basis_map::EfficientToFockMap::new(&p, basis.boson_cutoff, n_max).unwrap();
    // classical point with p = P = 0 on the eps = 0.75 shell, projected on even parity
    let mut c = glauber_bloch_state(&p, 0.6125, 1.0, n_max).unwrap();
    for ((n, a), v) in c.values.indexed_iter_mut() {
        if (n + a) % 2 == 1 {
            *v = 0.0;
        }
    }
    let norm = c.norm_sqr().sqrt();
    c.values /= norm;
    let weights: Vec<f64> = idx
        .iter()
        .map(|&k| (&fock_vector(&sol, k, Some(&map)).unwrap().values * &c.values).sum())
        .collect();
    let support: f64 = weights.iter().map(|w| w * w).sum();
    let energy: f64 = weights.iter().zip(&idx).map(|(w, &k)| w * w * sol.energies[k]).sum::<f64>() / support;
    assert!((energy - 0.75).abs() < 0.05, "{energy}");
    let w = default_eth_window(j);
    for kind in [ObservableKind::PhotonNumber, ObservableKind::ExcitedAtoms] {
        let obs = observable_matrix(&sol, kind).unwrap().scaled();
        // the energy tail above eps_T carries more than the strict support tolerance
        assert!(matches!(diagonal_ensemble(&weights, &obs), Err(dicke_core::DickeError::Support(_))) || support > 1.0 - 1e-6);
        let renormalized: Vec<f64> = weights.iter().map(|x| x / support.sqrt()).collect();
        let long_time = diagonal_ensemble(&renormalized, &obs).unwrap();
        let mic = microcanonical_average(&obs, &MicrocanonicalWindow::Levels { center: energy, count: w }).unwrap();
        let k = obs.energies.partition_point(|&e| e < energy);
        let spread = delta_mic(&obs, w).unwrap()[k].1 * mic;
        assert!((long_time - mic).abs() < spread, "{kind:?}: {long_time} vs {mic} (spread {spread})");
    }
}

#[test]
fn diagonal_shortcut_matches_the_full_matrix() {
    let p = ModelParams::resonant(1.0, 3.0).unwrap();
    let sol = converged_sector(&p, BasisSpec::efficient(30), Parity::Even, TIGHT, true).unwrap();
    let idx = sol.converged_indices(None);
    for kind in [ObservableKind::PhotonNumber, ObservableKind::ExcitedAtoms] {
        let full = observable_matrix_for(&sol, &idx, kind).unwrap().diagonal();
        let quick = observable_diagonal(&sol, &idx, kind).unwrap();
        for (a, b) in full.iter().zip(&quick) {
            assert!((a - b).abs() < 1e-10);
        }
    }
}
