use super::integrate::propagate_tangent;
use super::PhaseSpacePoint;
use crate::error::{DickeError, Result};
use crate::params::ModelParams;

/// Time between tangent-vector renormalizations.
pub const RENORMALIZATION_INTERVAL: f64 = 1.0;

/// Tolerance of the Lyapunov integrations.
pub const LYAPUNOV_TOLERANCE: f64 = 1e-10;

/// Largest Lyapunov exponent from the tangent flow.
///
/// The tangent vector is renormalized every unit of time; the exponent is
/// the mean log-stretch rate over the second half of the run.
pub fn lyapunov_exponent(x0: &PhaseSpacePoint, params: &ModelParams, t_final: f64) -> Result<f64> {
    let chunks = (t_final / RENORMALIZATION_INTERVAL).round() as usize;
    if chunks < 2 {
        return Err(DickeError::param(format!(
            "Lyapunov run needs t_final >= {}, got {t_final}",
            2.0 * RENORMALIZATION_INTERVAL
        )));
    }
    let mut x = x0.to_array();
    let mut v = [0.5; 4];
    let mut stretch = 0.0;
    let discard = chunks / 2;
    for c in 0..chunks {
        let (nx, nv) = propagate_tangent(&x, &v, RENORMALIZATION_INTERVAL, params, LYAPUNOV_TOLERANCE)?;
        let norm = nv.iter().map(|a| a * a).sum::<f64>().sqrt();
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(DickeError::Integration {
                time: (c + 1) as f64 * RENORMALIZATION_INTERVAL,
                reason: format!("tangent vector norm {norm}"),
            });
        }
        if c >= discard {
            stretch += norm.ln();
        }
        x = nx;
        v = nv.map(|a| a / norm);
    }
    let span = (chunks - discard) as f64 * RENORMALIZATION_INTERVAL;
    Ok((stretch / span).max(0.0))
}
