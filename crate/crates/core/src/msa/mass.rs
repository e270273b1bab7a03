//! Mass-loss formulas of the inductive step.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NdronsMass {
    /// `m' - L^{-1} ln (2L+1)^d`.
    pub mass: f64,
    pub loss: f64,
    /// `loss ≤ m'/2`, which gives `mass ≥ m'/2`.
    pub half_mass_ok: bool,
    pub negative: bool,
}

/// Mass guaranteed on a non-tunnelling, completely non-resonant
/// non-interactive cube of radius `l` when its projections carry mass `m_prime`.
pub fn ndrons_mass(m_prime: f64, l: u64, d: usize) -> NdronsMass {
    let loss = d as f64 * (2.0 * l as f64 + 1.0).ln() / l as f64;
    let mass = m_prime - loss;
    NdronsMass {
        mass,
        loss,
        half_mass_ok: loss <= m_prime / 2.0,
        negative: mass < 0.0,
    }
}

/// `m_k (1 - (5J+6) / (2 L_k)^{1/2})`.
pub fn next_mass_lower_bound(m_k: f64, j: u32, l_k: u64) -> Result<f64> {
    if j % 2 == 0 {
        return Err(Error::InvalidParameter(format!("J = {j} must be odd")));
    }
    if !(m_k > 0.0) {
        return Err(Error::InvalidParameter(format!("m_k = {m_k} must be positive")));
    }
    let factor = 1.0 - (5.0 * j as f64 + 6.0) / (2.0 * l_k as f64).sqrt();
    if factor <= 0.0 {
        return Err(Error::ScaleTooSmall { factor });
    }
    Ok(m_k * factor)
}
