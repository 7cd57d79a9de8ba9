use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Smooth cutoff `psi(xi) = sigma((|xi| - rho) / rho)` with the smoothstep
/// `sigma(u) = 3u^2 - 2u^3` clamped to `[0, 1]`: zero for `|xi| <= rho`,
/// one for `|xi| >= 2 rho`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CutoffFunction {
    pub rho: f64,
}

impl CutoffFunction {
    pub fn new(rho: f64) -> Result<Self> {
        if !(rho > 0.0 && rho.is_finite()) {
            return Err(Error::InvalidSymbol { reason: format!("cutoff radius rho = {rho} must be positive") });
        }
        Ok(Self { rho })
    }

    pub fn eval(&self, xi: f64) -> f64 {
        let u = ((xi.abs() - self.rho) / self.rho).clamp(0.0, 1.0);
        u * u * (3.0 - 2.0 * u)
    }
}
