//! Semiclassical (Weyl) density of states.
//!
//! For fixed `(Q, P)` the bosonic pair is an ellipse in `(q, p)`, so the
//! shell and phase-space volumes reduce to integrals over the atomic disk of
//! the conditional minimum `c(Q, P)`. Writing `Q = r cos(phi)`, `c` depends on
//! `phi` only through `cos^2(phi)` and the angular integral is done in closed
//! form, leaving one adaptive quadrature over `r`.

use std::f64::consts::PI;

use super::classical_ground_state;
use crate::params::ModelParams;
use crate::stats::adaptive_simpson;

/// Absolute tolerance of the radial quadrature.
pub const DOS_QUADRATURE_TOLERANCE: f64 = 1e-11;

fn kappa(params: &ModelParams) -> f64 {
    2.0 * params.gamma() * params.gamma() / params.omega()
}

/// Angular measure of `{phi : c(r, phi) < epsilon}`.
fn angular_indicator(u: f64, b: f64) -> f64 {
    // c < epsilon  <=>  b cos^2(phi) > -u
    if u > 0.0 {
        return 2.0 * PI;
    }
    if b <= 0.0 {
        return 0.0;
    }
    let t = -u / b;
    if t >= 1.0 {
        0.0
    } else {
        4.0 * t.sqrt().acos()
    }
}

/// `int (epsilon - c(r, phi))_+ dphi`.
fn angular_excess(u: f64, b: f64) -> f64 {
    if u >= 0.0 {
        return 2.0 * PI * u + PI * b;
    }
    if b <= 0.0 || -u >= b {
        return 0.0;
    }
    let phi0 = (-u / b).sqrt().acos();
    4.0 * (u * phi0 + b * (phi0 / 2.0 + (2.0 * phi0).sin() / 4.0))
}

fn radial<F: Fn(f64, f64) -> f64>(epsilon: f64, params: &ModelParams, angular: F) -> f64 {
    let k = kappa(params);
    let w0 = params.omega0();
    let integrand = |r: f64| {
        let r2 = r * r;
        let u = epsilon - w0 * (r2 / 2.0 - 1.0);
        let b = k * r2 * (1.0 - r2 / 4.0);
        r * angular(u, b)
    };
    adaptive_simpson(integrand, 0.0, 2.0, DOS_QUADRATURE_TOLERANCE)
}

/// Shell volume `V(epsilon) = int delta(epsilon - h) dq dp dQ dP`.
pub fn shell_volume(epsilon: f64, params: &ModelParams) -> f64 {
    if epsilon < classical_ground_state(params).0 {
        return 0.0;
    }
    2.0 * PI / params.omega() * radial(epsilon, params, angular_indicator)
}

/// `nu(epsilon) = V(epsilon) / (2 pi hbar_eff)^2`, states per unit scaled energy.
pub fn semiclassical_dos(epsilon: f64, params: &ModelParams) -> f64 {
    let h = 2.0 * PI * params.hbar_eff();
    shell_volume(epsilon, params) / (h * h)
}

/// Weyl count of states with scaled energy below `epsilon`,
/// `int_{epsilon_GS}^{epsilon} nu`.
pub fn semiclassical_count(epsilon: f64, params: &ModelParams) -> f64 {
    if epsilon < classical_ground_state(params).0 {
        return 0.0;
    }
    let h = 2.0 * PI * params.hbar_eff();
    2.0 * PI / params.omega() * radial(epsilon, params, angular_excess) / (h * h)
}

/// `int_{lo}^{hi} nu(epsilon) d epsilon`.
pub fn integrated_dos(lo: f64, hi: f64, params: &ModelParams) -> f64 {
    semiclassical_count(hi, params) - semiclassical_count(lo, params)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn saturates_to_disk_area() {
        // above epsilon = omega0 every (Q, P) is allowed
        let p = ModelParams::resonant(1.0, 10.0).unwrap();
        let full = 2.0 * PI * 4.0 * PI;
        for eps in [1.0, 2.5, 7.0] {
            assert!((shell_volume(eps, &p) - full).abs() < 1e-8);
        }
    }

    #[test]
    fn uncoupled_volume() {
        // gamma = 0: allowed disk r^2 < 2 (epsilon + 1) for epsilon < 1
        let p = ModelParams::resonant(0.0, 10.0).unwrap();
        for eps in [-0.8, -0.2, 0.4] {
            let want = 2.0 * PI * PI * 2.0 * (eps + 1.0);
            assert!((shell_volume(eps, &p) - want).abs() < 1e-8);
        }
    }

    #[test]
    fn count_is_integral_of_density() {
        let p = ModelParams::resonant(1.0, 10.0).unwrap();
        let (lo, hi) = (-2.0, 0.5);
        let n = 4000;
        let h = (hi - lo) / n as f64;
        let mut trap = 0.0;
        for k in 0..=n {
            let wgt = if k == 0 || k == n { 0.5 } else { 1.0 };
            trap += wgt * semiclassical_dos(lo + k as f64 * h, &p);
        }
        trap *= h;
        let direct = integrated_dos(lo, hi, &p);
        assert!((trap - direct).abs() / direct < 1e-4, "{trap} vs {direct}");
    }

    #[test]
    fn scales_with_j_squared() {
        let a = ModelParams::resonant(1.0, 15.0).unwrap();
        let b = ModelParams::resonant(1.0, 30.0).unwrap();
        let r = semiclassical_dos(0.3, &b) / semiclassical_dos(0.3, &a);
        assert!((r - 4.0).abs() < 1e-12);
    }
}
