//! Model parameters and the amplitude limit of the wave family.

use crate::error::{EpError, Result};
use crate::numerics::bisect_descending;

/// Temperature ratio `K` and amplitude `eps` of a wave travelling at `c = V + eps`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlasmaParams {
    k: f64,
    eps: f64,
}

impl PlasmaParams {
    /// Validate `K >= 0` and `eps > 0`. Existence of the wave is checked later.
    pub fn new(k: f64, eps: f64) -> Result<Self> {
        if !k.is_finite() || k < 0.0 {
            return Err(EpError::InvalidParameter(format!("K must be finite and >= 0, got {k}")));
        }
        if !eps.is_finite() || eps <= 0.0 {
            return Err(EpError::InvalidParameter(format!("eps must be finite and > 0, got {eps}")));
        }
        Ok(Self { k, eps })
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    /// Ion sound speed `V = sqrt(1 + K)`.
    pub fn v(&self) -> f64 {
        ion_sound_speed(self.k)
    }

    /// Wave speed `c = V + eps`.
    pub fn c(&self) -> f64 {
        self.v() + self.eps
    }

    /// Same `K` with a different wave speed.
    pub fn with_speed(&self, c: f64) -> Result<Self> {
        Self::new(self.k, c - self.v())
    }
}

pub fn ion_sound_speed(k: f64) -> f64 {
    (1.0 + k).sqrt()
}

/// Largest admissible amplitude `eps_K` and the root `zeta` that defines it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CriticalAmplitude {
    pub eps: f64,
    pub zeta: f64,
}

/// Log form of the sonic-point condition for `K > 0`; negative while a wave exists.
fn sonic_residual(k: f64, z: f64) -> f64 {
    0.5 * k * (z * z - 1.0) - k * z.ln() - (k * (z - 1.0).powi(2)).ln_1p()
}

/// Threshold amplitude beyond which no solitary wave exists.
///
/// For `K > 0` the peak density reaches the sonic value; for `K = 0` the
/// Sagdeev potential loses its root.
pub fn critical_amplitude(k: f64) -> Result<CriticalAmplitude> {
    if !k.is_finite() || k < 0.0 {
        return Err(EpError::InvalidParameter(format!("K must be finite and >= 0, got {k}")));
    }
    let v = ion_sound_speed(k);
    if k == 0.0 {
        // z^2 + 1 = exp(z^2 / 2), nontrivial root on (1, 3)
        let f = |z: f64| (z * z).ln_1p() - 0.5 * z * z;
        let z = bisect_descending(f, 1.0, 3.0);
        return Ok(CriticalAmplitude { eps: z - v, zeta: z });
    }
    let lo = ((k + 1.0) / k).sqrt();
    let f = |z: f64| -sonic_residual(k, z);
    let mut hi = 2.0 * lo;
    while sonic_residual(k, hi) <= 0.0 {
        hi *= 2.0;
        if hi > 1e12 {
            return Err(EpError::InvalidParameter(format!("no sonic root for K = {k}")));
        }
    }
    // scan for the first sign change, then refine
    let steps = 10_000;
    let dz = (hi - lo) / steps as f64;
    let mut a = lo;
    for i in 1..=steps {
        let b = lo + dz * i as f64;
        if sonic_residual(k, b) > 0.0 {
            let z = bisect_descending(f, a, b);
            return Ok(CriticalAmplitude { eps: k.sqrt() * z - v, zeta: z });
        }
        a = b;
    }
    Err(EpError::InvalidParameter(format!("no sonic root bracketed for K = {k}")))
}

/// 60 log-spaced amplitudes between 1% and 99% of `eps_K`.
pub fn default_eps_grid(k: f64, points: usize) -> Result<Vec<f64>> {
    let top = critical_amplitude(k)?.eps;
    let (a, b) = ((0.01 * top).ln(), (0.99 * top).ln());
    Ok((0..points)
        .map(|i| (a + (b - a) * i as f64 / (points.max(2) - 1) as f64).exp())
        .collect())
}
