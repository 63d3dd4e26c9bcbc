//! Conformal data attached to the SLE parameter kappa.

use crate::error::{Error, Result};
use serde::Serialize;

/// kappa together with the boundary weight `h = h_{1,2}` and the central charge.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KappaParams {
    pub kappa: f64,
    pub h: f64,
    pub c: f64,
}

impl KappaParams {
    /// Derive the weights from kappa. Rejects non-positive or non-finite input.
    pub fn new(kappa: f64) -> Result<Self> {
        check_kappa(kappa)?;
        Ok(Self {
            kappa,
            h: (6.0 - kappa) / (2.0 * kappa),
            c: (3.0 * kappa - 8.0) * (6.0 - kappa) / (2.0 * kappa),
        })
    }

    /// Weight `h_{1,3}` of the once-fused boundary field.
    pub fn h13(&self) -> f64 {
        (8.0 - self.kappa) / self.kappa
    }

    /// Kac weight `h_{1,s}` at this kappa.
    pub fn kac(&self, s: u32) -> Result<f64> {
        kac_weight(self.kappa, s)
    }
}

/// Same as [`KappaParams::new`].
pub fn derive_params(kappa: f64) -> Result<KappaParams> {
    KappaParams::new(kappa)
}

/// `h_{1,s} = (s-1)(2(s+1)-kappa) / (2 kappa)`.
pub fn kac_weight(kappa: f64, s: u32) -> Result<f64> {
    check_kappa(kappa)?;
    if s == 0 {
        return Err(Error::Domain("Kac index s must be at least 1".into()));
    }
    let s = f64::from(s);
    Ok((s - 1.0) * (2.0 * (s + 1.0) - kappa) / (2.0 * kappa))
}

fn check_kappa(kappa: f64) -> Result<()> {
    if !kappa.is_finite() || kappa <= 0.0 {
        return Err(Error::Domain(format!("kappa must be positive and finite, got {kappa}")));
    }
    Ok(())
}
