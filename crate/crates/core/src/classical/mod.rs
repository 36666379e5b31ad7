//! Classical limit of the Dicke model in the canonical variables
//! `x = (q, p; Q, P)` with the atomic pair confined to `Q^2 + P^2 <= 4`.

mod chaos_map;
mod dos;
mod integrate;
mod lyapunov;
mod poincare;
mod shell;

pub use chaos_map::*;
pub use dos::*;
pub use integrate::*;
pub use lyapunov::*;
pub use poincare::*;
pub use shell::*;

use serde::{Deserialize, Serialize};

use crate::error::{DickeError, Result};
use crate::params::ModelParams;

/// Distance `4 - Q^2 - P^2` below which the flow is treated as singular.
pub const BOUNDARY_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct PhaseSpacePoint {
    pub q: f64,
    pub p: f64,
    #[serde(rename = "Q")]
    pub big_q: f64,
    #[serde(rename = "P")]
    pub big_p: f64,
}

impl PhaseSpacePoint {
    pub fn new(q: f64, p: f64, big_q: f64, big_p: f64) -> Self {
        PhaseSpacePoint { q, p, big_q, big_p }
    }

    pub fn to_array(self) -> [f64; 4] {
        [self.q, self.p, self.big_q, self.big_p]
    }

    pub fn from_array(x: [f64; 4]) -> Self {
        PhaseSpacePoint::new(x[0], x[1], x[2], x[3])
    }

    pub fn atomic_radius_sqr(&self) -> f64 {
        self.big_q * self.big_q + self.big_p * self.big_p
    }
}

fn atomic_root(x: &PhaseSpacePoint) -> Result<f64> {
    let r2 = x.atomic_radius_sqr();
    if !(r2 <= 4.0) {
        return Err(DickeError::param(format!("atomic variables outside the disk: Q^2 + P^2 = {r2}")));
    }
    Ok((1.0 - r2 / 4.0).sqrt())
}

/// Scaled energy `h(x) = E / j` of the classical Hamiltonian.
pub fn classical_hamiltonian(x: &PhaseSpacePoint, params: &ModelParams) -> Result<f64> {
    let s = atomic_root(x)?;
    let (w, w0, g) = (params.omega(), params.omega0(), params.gamma());
    Ok(w * (x.q * x.q + x.p * x.p) / 2.0 + w0 * (x.atomic_radius_sqr() / 2.0 - 1.0) + 2.0 * g * x.q * x.big_q * s)
}

fn interior_root(x: &[f64; 4]) -> Result<f64> {
    let gap = 4.0 - x[2] * x[2] - x[3] * x[3];
    if gap < BOUNDARY_TOLERANCE {
        return Err(DickeError::Singularity(gap));
    }
    Ok((gap / 4.0).sqrt())
}

/// Gradient `(h_q, h_p, h_Q, h_P)`.
pub fn gradient(x: &PhaseSpacePoint, params: &ModelParams) -> Result<[f64; 4]> {
    gradient_raw(&x.to_array(), params)
}

pub(crate) fn gradient_raw(x: &[f64; 4], params: &ModelParams) -> Result<[f64; 4]> {
    let s = interior_root(x)?;
    let (w, w0, g) = (params.omega(), params.omega0(), params.gamma());
    let [q, p, bq, bp] = *x;
    Ok([
        w * q + 2.0 * g * bq * s,
        w * p,
        w0 * bq + 2.0 * g * q * (s - bq * bq / (4.0 * s)),
        w0 * bp - 2.0 * g * q * bq * bp / (4.0 * s),
    ])
}

/// Hamilton's equations `(dq, dp, dQ, dP) = (h_p, -h_q, h_P, -h_Q)`.
pub fn equations_of_motion(x: &PhaseSpacePoint, params: &ModelParams) -> Result<[f64; 4]> {
    equations_raw(&x.to_array(), params)
}

pub(crate) fn equations_raw(x: &[f64; 4], params: &ModelParams) -> Result<[f64; 4]> {
    let g = gradient_raw(x, params)?;
    Ok([g[1], -g[0], g[3], -g[2]])
}

/// Symmetric Hessian of `h`, in the order `(q, p, Q, P)`.
pub(crate) fn hessian_raw(x: &[f64; 4], params: &ModelParams) -> Result<[[f64; 4]; 4]> {
    let s = interior_root(x)?;
    let (w, w0, g) = (params.omega(), params.omega0(), params.gamma());
    let [q, _, bq, bp] = *x;
    let s3 = s * s * s;
    let h_qq_big = 2.0 * g * (s - bq * bq / (4.0 * s));
    let h_qp_big = -2.0 * g * bq * bp / (4.0 * s);
    let h_bq_bq = w0 + 2.0 * g * q * (-3.0 * bq / (4.0 * s) - bq.powi(3) / (16.0 * s3));
    let h_bq_bp = 2.0 * g * q * (-bp / (4.0 * s) - bq * bq * bp / (16.0 * s3));
    let h_bp_bp = w0 + 2.0 * g * q * (-bq / (4.0 * s) - bq * bp * bp / (16.0 * s3));
    Ok([
        [w, 0.0, h_qq_big, h_qp_big],
        [0.0, w, 0.0, 0.0],
        [h_qq_big, 0.0, h_bq_bq, h_bq_bp],
        [h_qp_big, 0.0, h_bq_bp, h_bp_bp],
    ])
}

/// `-(omega0 / 2)(gamma^2 / gamma_c^2 + gamma_c^2 / gamma^2)` above the
/// critical coupling, `-omega0` below.
pub fn ground_state_energy_analytic(params: &ModelParams) -> f64 {
    let (g, gc) = (params.gamma(), params.gamma_c());
    if g > gc {
        let r = g * g / (gc * gc);
        -params.omega0() / 2.0 * (r + 1.0 / r)
    } else {
        -params.omega0()
    }
}

/// Numerical global minimum of `h`.
///
/// The bosonic minimum is eliminated exactly (`p = 0`, `q = -2 gamma Q s / omega`);
/// the remaining profile is minimal at `P = 0`, leaving a one-dimensional
/// golden-section search over `Q in [0, 2]`. Returns the energy and one of the
/// two (mirror-symmetric) minimizers.
pub fn classical_ground_state(params: &ModelParams) -> (f64, PhaseSpacePoint) {
    let kappa = 2.0 * params.gamma() * params.gamma() / params.omega();
    let w0 = params.omega0();
    let profile = |bq: f64| {
        let x = bq * bq;
        w0 * x / 2.0 - w0 - kappa * x * (1.0 - x / 4.0)
    };
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (0.0f64, 2.0f64);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (profile(c), profile(d));
    while b - a > 1e-13 {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = profile(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = profile(d);
        }
    }
    let mut bq = (a + b) / 2.0;
    if profile(0.0) <= profile(bq) {
        bq = 0.0;
    }
    let s = (1.0 - bq * bq / 4.0).sqrt();
    let q = -2.0 * params.gamma() * bq * s / params.omega();
    (profile(bq), PhaseSpacePoint::new(q, 0.0, bq, 0.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn origin_energy() {
        let p = ModelParams::new(1.3, 0.7, 0.9, 4.0).unwrap();
        let e = classical_hamiltonian(&PhaseSpacePoint::default(), &p).unwrap();
        assert_eq!(e, -0.7);
        assert_eq!(equations_of_motion(&PhaseSpacePoint::default(), &p).unwrap(), [0.0; 4]);
    }

    #[test]
    fn outside_disk_rejected() {
        let p = ModelParams::resonant(1.0, 4.0).unwrap();
        assert!(classical_hamiltonian(&PhaseSpacePoint::new(0.0, 0.0, 2.0, 0.1), &p).is_err());
        assert!(equations_of_motion(&PhaseSpacePoint::new(0.0, 0.0, 2.0, 0.0), &p).is_err());
    }

    #[test]
    fn uncoupled_rotations() {
        let p = ModelParams::new(1.5, 0.5, 0.0, 1.0).unwrap();
        let x = PhaseSpacePoint::new(0.3, -0.2, 0.4, 1.1);
        let f = equations_of_motion(&x, &p).unwrap();
        let want = [1.5 * -0.2, -1.5 * 0.3, 0.5 * 1.1, -0.5 * 0.4];
        for (a, b) in f.iter().zip(want) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn ground_state_resonant() {
        let p = ModelParams::resonant(1.0, 30.0).unwrap();
        let (e, x) = classical_ground_state(&p);
        assert!((e + 2.125).abs() < 1e-10, "{e}");
        assert!((ground_state_energy_analytic(&p) + 2.125).abs() < 1e-15);
        assert!((classical_hamiltonian(&x, &p).unwrap() - e).abs() < 1e-12);
    }

    #[test]
    fn ground_state_normal_phase() {
        let p = ModelParams::resonant(0.3, 30.0).unwrap();
        let (e, x) = classical_ground_state(&p);
        assert_eq!(e, -1.0);
        assert_eq!(x, PhaseSpacePoint::default());
    }

    #[test]
    fn hessian_matches_gradient_differences() {
        let p = ModelParams::new(1.0, 1.2, 0.8, 3.0).unwrap();
        let x = [0.4, -0.7, 0.9, -1.1];
        let h = hessian_raw(&x, &p).unwrap();
        let step = 1e-6;
        for k in 0..4 {
            let mut up = x;
            let mut dn = x;
            up[k] += step;
            dn[k] -= step;
            let gu = gradient_raw(&up, &p).unwrap();
            let gd = gradient_raw(&dn, &p).unwrap();
            for i in 0..4 {
                let fd = (gu[i] - gd[i]) / (2.0 * step);
                assert!((fd - h[i][k]).abs() < 1e-7, "({i},{k}): {fd} vs {}", h[i][k]);
            }
        }
    }
}
