use std::f64::consts::{PI, TAU};

use crate::error::{Error, Result};

/// Largest accepted phase step between consecutive loop samples.
pub const MAX_PHASE_STEP: f64 = PI - 0.1;

/// Integer winding of a sampled closed loop, with the sum before rounding.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Winding {
    pub value: i64,
    pub raw: f64,
}

/// Wraps an angle into (−π, π].
pub fn principal_value(x: f64) -> f64 {
    let r = (x + PI).rem_euclid(TAU) - PI;
    if r <= -PI {
        r + TAU
    } else {
        r
    }
}

/// Winding number of phases sampled around a closed loop.
///
/// Sums the principal-value steps between consecutive samples, including the
/// step from the last sample back to the first. Any step of magnitude at
/// least [`MAX_PHASE_STEP`] is refused as undersampled.
pub fn unwrap_winding(phases: &[f64]) -> Result<Winding> {
    if phases.is_empty() {
        return Err(Error::InvalidInput("winding needs at least one phase sample".into()));
    }
    if phases.iter().any(|p| !p.is_finite()) {
        return Err(Error::NonFinite("phase samples"));
    }
    let n = phases.len();
    let mut total = 0.0;
    for i in 0..n {
        let step = principal_value(phases[(i + 1) % n] - phases[i]);
        if step.abs() >= MAX_PHASE_STEP {
            return Err(Error::UndersampledLoop { index: i, step });
        }
        total += step;
    }
    let raw = total / TAU;
    Ok(Winding {
        value: raw.round() as i64,
        raw,
    })
}
