use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Exponents and constants of the multi-scale induction.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MsaParameters {
    pub alpha: f64,
    pub beta: f64,
    pub p: f64,
    pub q: f64,
    pub p_tilde: f64,
    pub gamma: f64,
    #[serde(rename = "J")]
    pub j: u32,
    pub r0: u64,
}

impl Default for MsaParameters {
    /// Smallest integer exponents admissible for `d = 1`.
    fn default() -> Self {
        MsaParameters {
            alpha: 1.5,
            beta: 0.5,
            p: 13.0,
            q: 53.0,
            p_tilde: 37.0,
            gamma: 0.5,
            j: 3,
            r0: 1,
        }
    }
}

impl MsaParameters {
    /// Checks every constraint for single-particle dimension `d`, naming the
    /// first one that fails.
    pub fn validate(&self, d: usize) -> Result<()> {
        let d = d as f64;
        let fail = |msg: String| Err(Error::InvalidParameter(msg));
        if !(self.alpha > 1.0 && self.alpha < 2.0) {
            return fail(format!("alpha = {} must lie in (1, 2)", self.alpha));
        }
        if !(self.beta > 0.0 && self.beta < 1.0) {
            return fail(format!("beta = {} must lie in (0, 1)", self.beta));
        }
        if !(self.p > 12.0 * d) {
            return fail(format!("p = {} must exceed 12d = {}", self.p, 12.0 * d));
        }
        if !(self.q > 4.0 * self.p) {
            return fail(format!("q = {} must exceed 4p = {}", self.q, 4.0 * self.p));
        }
        let pt_min = 2.25 * self.p + 7.5 * d;
        if !(self.p_tilde > pt_min) {
            return fail(format!("p_tilde = {} must exceed 9p/4 + 15d/2 = {pt_min}", self.p_tilde));
        }
        if !(self.gamma > 0.0) {
            return fail(format!("gamma = {} must be positive", self.gamma));
        }
        if self.j % 2 == 0 {
            return fail(format!("J = {} must be odd", self.j));
        }
        Ok(())
    }
}

/// The energy window `I = [E⁰, E*]` and its discretization.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnergyInterval {
    pub e_low: f64,
    pub e_high: f64,
    #[serde(default = "default_grid_points")]
    pub grid_points: usize,
}

fn default_grid_points() -> usize {
    64
}

impl EnergyInterval {
    pub fn new(e_low: f64, e_high: f64) -> Self {
        EnergyInterval {
            e_low,
            e_high,
            grid_points: default_grid_points(),
        }
    }

    pub fn with_grid_points(mut self, n: usize) -> Self {
        self.grid_points = n;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.e_low <= self.e_high) {
            return Err(Error::InvalidParameter(format!(
                "energy interval [{}, {}] is empty",
                self.e_low, self.e_high
            )));
        }
        if self.grid_points == 0 {
            return Err(Error::InvalidParameter("grid_points must be positive".into()));
        }
        Ok(())
    }

    pub fn is_empty(&self) -> bool {
        !(self.e_low <= self.e_high)
    }

    pub fn contains(&self, e: f64) -> bool {
        self.e_low <= e && e <= self.e_high
    }

    /// `grid_points` equispaced energies including both endpoints.
    pub fn uniform_grid(&self) -> Vec<f64> {
        if self.is_empty() {
            return Vec::new();
        }
        match self.grid_points {
            0 => Vec::new(),
            1 => vec![self.e_low],
            n => (0..n)
                .map(|i| self.e_low + (self.e_high - self.e_low) * i as f64 / (n - 1) as f64)
                .collect(),
        }
    }
}
