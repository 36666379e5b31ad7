use std::cell::Cell;

use ode_solvers::{Dop853, OutputType, SVector, System, Vector4};
use serde::{Deserialize, Serialize};

use super::{classical_hamiltonian, equations_raw, hessian_raw, PhaseSpacePoint};
use crate::error::{DickeError, Result};
use crate::params::ModelParams;

/// Default relative and absolute step tolerance.
pub const DEFAULT_TOLERANCE: f64 = 1e-13;

/// Spacing of stored trajectory samples.
pub const DEFAULT_SAMPLE_DT: f64 = 0.1;

const MAX_STEPS: u32 = u32::MAX;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub samples: Vec<PhaseSpacePoint>,
    /// `max_t |h(x(t)) - h(x(0))|` over the stored samples.
    pub energy_drift: f64,
}

impl Trajectory {
    pub fn last(&self) -> PhaseSpacePoint {
        *self.samples.last().expect("trajectory holds its initial point")
    }
}

struct Flow<'a> {
    params: &'a ModelParams,
    singular: &'a Cell<Option<f64>>,
}

impl System<f64, Vector4<f64>> for Flow<'_> {
    fn system(&self, _t: f64, y: &Vector4<f64>, dy: &mut Vector4<f64>) {
        match equations_raw(&[y[0], y[1], y[2], y[3]], self.params) {
            Ok(f) => dy.copy_from_slice(&f),
            Err(_) => {
                self.singular.set(Some(4.0 - y[2] * y[2] - y[3] * y[3]));
                dy.fill(0.0);
            }
        }
    }

    fn solout(&mut self, _t: f64, _y: &Vector4<f64>, _dy: &Vector4<f64>) -> bool {
        self.singular.get().is_some()
    }
}

/// State plus one tangent vector under the linearized flow.
struct TangentFlow<'a> {
    params: &'a ModelParams,
    singular: &'a Cell<Option<f64>>,
}

impl System<f64, SVector<f64, 8>> for TangentFlow<'_> {
    fn system(&self, _t: f64, y: &SVector<f64, 8>, dy: &mut SVector<f64, 8>) {
        let x = [y[0], y[1], y[2], y[3]];
        let (f, h) = match (equations_raw(&x, self.params), hessian_raw(&x, self.params)) {
            (Ok(f), Ok(h)) => (f, h),
            _ => {
                self.singular.set(Some(4.0 - y[2] * y[2] - y[3] * y[3]));
                dy.fill(0.0);
                return;
            }
        };
        let dot = |row: &[f64; 4]| row[0] * y[4] + row[1] * y[5] + row[2] * y[6] + row[3] * y[7];
        dy[0] = f[0];
        dy[1] = f[1];
        dy[2] = f[2];
        dy[3] = f[3];
        dy[4] = dot(&h[1]);
        dy[5] = -dot(&h[0]);
        dy[6] = dot(&h[3]);
        dy[7] = -dot(&h[2]);
    }

    fn solout(&mut self, _t: f64, _y: &SVector<f64, 8>, _dy: &SVector<f64, 8>) -> bool {
        self.singular.get().is_some()
    }
}

fn check_run<E: std::fmt::Display>(
    outcome: std::result::Result<ode_solvers::dop_shared::Stats, E>,
    singular: &Cell<Option<f64>>,
    reached: f64,
) -> Result<()> {
    if let Some(gap) = singular.get() {
        return Err(DickeError::Singularity(gap));
    }
    outcome.map(|_| ()).map_err(|e| DickeError::Integration {
        time: reached,
        reason: e.to_string(),
    })
}

fn initial_state(x0: &PhaseSpacePoint, params: &ModelParams) -> Result<f64> {
    let e = classical_hamiltonian(x0, params)?;
    equations_raw(&x0.to_array(), params)?;
    Ok(e)
}

/// Integrates Hamilton's equations over `[0, t_final]` (negative `t_final`
/// runs backwards) with an adaptive 8th-order Dormand-Prince scheme, storing
/// samples every [`DEFAULT_SAMPLE_DT`].
pub fn integrate(x0: &PhaseSpacePoint, t_final: f64, params: &ModelParams, tol: f64) -> Result<Trajectory> {
    integrate_sampled(x0, t_final, params, tol, DEFAULT_SAMPLE_DT)
}

pub fn integrate_sampled(
    x0: &PhaseSpacePoint,
    t_final: f64,
    params: &ModelParams,
    tol: f64,
    sample_dt: f64,
) -> Result<Trajectory> {
    let e0 = initial_state(x0, params)?;
    if t_final == 0.0 {
        return Ok(Trajectory {
            times: vec![0.0],
            samples: vec![*x0],
            energy_drift: 0.0,
        });
    }
    let singular = Cell::new(None);
    let flow = Flow {
        params,
        singular: &singular,
    };
    let dx = sample_dt.abs().min(t_final.abs()) * t_final.signum();
    let y0 = Vector4::from(x0.to_array());
    let mut stepper = Dop853::from_param(
        flow, 0.0, t_final, dx, y0, tol, tol, 0.9, 0.0, 0.333, 6.0, t_final.abs(), 0.0, MAX_STEPS, MAX_STEPS,
        OutputType::Dense,
    );
    let outcome = stepper.integrate();
    let reached = stepper.x_out().last().copied().unwrap_or(0.0);
    check_run(outcome, &singular, reached)?;
    let times = stepper.x_out().clone();
    let samples: Vec<PhaseSpacePoint> = stepper
        .y_out()
        .iter()
        .map(|y| PhaseSpacePoint::new(y[0], y[1], y[2], y[3]))
        .collect();
    let mut energy_drift = 0.0f64;
    for x in &samples {
        energy_drift = energy_drift.max((classical_hamiltonian(x, params)? - e0).abs());
    }
    Ok(Trajectory {
        times,
        samples,
        energy_drift,
    })
}

/// End point of the flow after time `dt`, without intermediate storage.
pub fn propagate(x0: &PhaseSpacePoint, dt: f64, params: &ModelParams, tol: f64) -> Result<PhaseSpacePoint> {
    initial_state(x0, params)?;
    if dt == 0.0 {
        return Ok(*x0);
    }
    let singular = Cell::new(None);
    let flow = Flow {
        params,
        singular: &singular,
    };
    let mut stepper = Dop853::from_param(
        flow,
        0.0,
        dt,
        dt,
        Vector4::from(x0.to_array()),
        tol,
        tol,
        0.9,
        0.0,
        0.333,
        6.0,
        dt.abs(),
        0.0,
        MAX_STEPS,
        MAX_STEPS,
        OutputType::Sparse,
    );
    let outcome = stepper.integrate();
    let reached = stepper.x_out().last().copied().unwrap_or(0.0);
    check_run(outcome, &singular, reached)?;
    let y = stepper.y_out().last().expect("solver stores the end point");
    Ok(PhaseSpacePoint::new(y[0], y[1], y[2], y[3]))
}

/// Advances state and tangent vector together over `dt`.
pub(crate) fn propagate_tangent(
    x: &[f64; 4],
    v: &[f64; 4],
    dt: f64,
    params: &ModelParams,
    tol: f64,
) -> Result<([f64; 4], [f64; 4])> {
    let singular = Cell::new(None);
    let flow = TangentFlow {
        params,
        singular: &singular,
    };
    let y0 = SVector::<f64, 8>::from([x[0], x[1], x[2], x[3], v[0], v[1], v[2], v[3]]);
    let mut stepper = Dop853::from_param(
        flow,
        0.0,
        dt,
        dt,
        y0,
        tol,
        tol,
        0.9,
        0.0,
        0.333,
        6.0,
        dt.abs(),
        0.0,
        MAX_STEPS,
        MAX_STEPS,
        OutputType::Sparse,
    );
    let outcome = stepper.integrate();
    let reached = stepper.x_out().last().copied().unwrap_or(0.0);
    check_run(outcome, &singular, reached)?;
    let y = stepper.y_out().last().expect("solver stores the end point");
    Ok(([y[0], y[1], y[2], y[3]], [y[4], y[5], y[6], y[7]]))
}
