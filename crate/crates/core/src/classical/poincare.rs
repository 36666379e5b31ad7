use serde::{Deserialize, Serialize};

use super::integrate::{integrate_sampled, propagate};
use super::{equations_raw, PhaseSpacePoint};
use crate::error::Result;
use crate::params::ModelParams;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Coordinate {
    #[serde(rename = "q")]
    SmallQ,
    #[serde(rename = "p")]
    SmallP,
    #[serde(rename = "Q")]
    BigQ,
    #[serde(rename = "P")]
    BigP,
}

impl Coordinate {
    fn index(self) -> usize {
        match self {
            Coordinate::SmallQ => 0,
            Coordinate::SmallP => 1,
            Coordinate::BigQ => 2,
            Coordinate::BigP => 3,
        }
    }
}

/// Section `x[coordinate] = value`, crossed with the sign of `direction`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SectionPlane {
    pub coordinate: Coordinate,
    pub value: f64,
    pub direction: f64,
    pub record: (Coordinate, Coordinate),
}

impl Default for SectionPlane {
    /// `p = 0` with `dp/dt > 0`, recording `(Q, P)`.
    fn default() -> Self {
        SectionPlane {
            coordinate: Coordinate::SmallP,
            value: 0.0,
            direction: 1.0,
            record: (Coordinate::BigQ, Coordinate::BigP),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SectionCrossing {
    pub time: f64,
    pub point: PhaseSpacePoint,
    pub coords: (f64, f64),
}

/// Spacing of the coarse scan for sign changes.
pub const SECTION_SCAN_DT: f64 = 0.05;

/// Time tolerance of crossing refinement.
pub const SECTION_TIME_TOLERANCE: f64 = 1e-10;

/// Crossings of `plane` along the orbit of `x0` up to `t_final`.
///
/// Sign changes are bracketed on a dense-output grid and refined by Newton
/// iteration in time, re-integrating from the bracket start.
pub fn poincare_section(
    x0: &PhaseSpacePoint,
    params: &ModelParams,
    plane: SectionPlane,
    t_final: f64,
) -> Result<Vec<SectionCrossing>> {
    let tol = super::integrate::DEFAULT_TOLERANCE;
    let tr = integrate_sampled(x0, t_final, params, tol, SECTION_SCAN_DT)?;
    let c = plane.coordinate.index();
    let dir = plane.direction.signum();
    let offset = |x: &[f64; 4]| x[c] - plane.value;
    let mut out = Vec::new();
    for k in 1..tr.samples.len() {
        let a = tr.samples[k - 1].to_array();
        let b = tr.samples[k].to_array();
        if !(dir * offset(&a) < 0.0 && dir * offset(&b) >= 0.0) {
            continue;
        }
        let span = tr.times[k] - tr.times[k - 1];
        // linear guess, then Newton on the crossing time
        let mut dt = span * offset(&a) / (offset(&a) - offset(&b));
        let mut x = propagate(&tr.samples[k - 1], dt, params, tol)?;
        for _ in 0..50 {
            let xa = x.to_array();
            let rate = equations_raw(&xa, params)?[c];
            if rate == 0.0 {
                break;
            }
            let step = -offset(&xa) / rate;
            dt += step;
            x = propagate(&tr.samples[k - 1], dt, params, tol)?;
            if step.abs() < SECTION_TIME_TOLERANCE {
                break;
            }
        }
        let xa = x.to_array();
        out.push(SectionCrossing {
            time: tr.times[k - 1] + dt,
            point: x,
            coords: (xa[plane.record.0.index()], xa[plane.record.1.index()]),
        });
    }
    Ok(out)
}
