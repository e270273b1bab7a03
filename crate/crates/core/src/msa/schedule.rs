//! Length scales `L_{k+1} = ⌊L_k^α⌋` and masses `m_k = m₀ ∏_{j≤k} (1 - γ L_j^{-1/2})`.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

fn isqrt(n: u128) -> u128 {
    if n < 2 {
        return n;
    }
    let mut x = (n as f64).sqrt() as u128;
    while x * x > n {
        x -= 1;
    }
    while (x + 1) * (x + 1) <= n {
        x += 1;
    }
    x
}

/// `⌊L^α⌋`, exact when `2α` is an integer, `None` on overflow.
pub fn floor_pow(l: u64, alpha: f64) -> Option<u64> {
    let twice = 2.0 * alpha;
    if twice.fract() == 0.0 && twice <= 64.0 {
        let v = (l as u128).checked_pow(twice as u32)?;
        return u64::try_from(isqrt(v)).ok();
    }
    let v = (l as f64).powf(alpha).floor();
    if v >= u64::MAX as f64 {
        None
    } else {
        Some(v as u64)
    }
}

pub fn length_schedule(l0: u64, alpha: f64, k: usize) -> Result<Vec<u64>> {
    if !(alpha > 1.0) {
        return Err(Error::InvalidParameter(format!("alpha = {alpha} must exceed 1")));
    }
    if l0 <= 2 {
        return Err(Error::InvalidParameter(format!("L0 = {l0} must exceed 2")));
    }
    let mut out = Vec::with_capacity(k + 1);
    out.push(l0);
    for i in 1..=k {
        let next = floor_pow(out[i - 1], alpha).ok_or(Error::Overflow(i))?;
        out.push(next);
    }
    Ok(out)
}

/// Masses `m_0 … m_K` for `lengths = [L_0 … L_K]`.
pub fn mass_schedule(m0: f64, gamma: f64, lengths: &[u64]) -> Result<Vec<f64>> {
    if !(m0 > 0.0) || !(gamma >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "need m0 > 0 and gamma >= 0, got m0 = {m0}, gamma = {gamma}"
        )));
    }
    let mut out = Vec::with_capacity(lengths.len());
    let mut m = m0;
    out.push(m);
    for (j, &l) in lengths.iter().enumerate().skip(1) {
        let factor = 1.0 - gamma / (l as f64).sqrt();
        if factor <= 0.0 {
            return Err(Error::ScheduleInvalid { index: j, factor });
        }
        m *= factor;
        out.push(m);
    }
    Ok(out)
}

/// `∏_{j≥1} (1 - γ L_j^{-1/2})` over the whole infinite schedule.
///
/// Terms beyond the computed lengths follow the same recurrence in floating
/// point until they drop below double precision. Returns 0 when a factor is
/// nonpositive.
pub fn infinite_mass_product(gamma: f64, lengths: &[u64], alpha: f64) -> f64 {
    let mut prod = 1.0;
    for &l in lengths.iter().skip(1) {
        let f = 1.0 - gamma / (l as f64).sqrt();
        if f <= 0.0 {
            return 0.0;
        }
        prod *= f;
    }
    let Some(&last) = lengths.last() else {
        return prod;
    };
    let mut exact = Some(last);
    let mut l = last as f64;
    loop {
        exact = exact.and_then(|e| floor_pow(e, alpha));
        l = match exact {
            Some(e) => e as f64,
            None => l.powf(alpha).floor(),
        };
        let term = gamma / l.sqrt();
        if !(term > 1e-18) {
            break;
        }
        if term >= 1.0 {
            return 0.0;
        }
        prod *= 1.0 - term;
    }
    prod
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MsaSchedule {
    pub lengths: Vec<u64>,
    pub masses: Vec<f64>,
    pub m0: f64,
    pub gamma: f64,
    pub alpha: f64,
    /// Infinite product of mass factors.
    pub mass_product: f64,
    /// Whether that product stays at least `1/2`, so every `m_k ≥ m₀/2`.
    pub product_floor_ok: bool,
}

impl MsaSchedule {
    pub fn build(l0: u64, alpha: f64, k: usize, m0: f64, gamma: f64) -> Result<Self> {
        let lengths = length_schedule(l0, alpha, k)?;
        let masses = mass_schedule(m0, gamma, &lengths)?;
        let mass_product = infinite_mass_product(gamma, &lengths, alpha);
        Ok(MsaSchedule {
            lengths,
            masses,
            m0,
            gamma,
            alpha,
            mass_product,
            product_floor_ok: mass_product >= 0.5,
        })
    }

    pub fn scales(&self) -> usize {
        self.lengths.len()
    }

    pub fn length(&self, k: usize) -> Option<u64> {
        self.lengths.get(k).copied()
    }

    pub fn mass(&self, k: usize) -> Option<f64> {
        self.masses.get(k).copied()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn length_examples() {
        assert_eq!(length_schedule(3, 1.5, 3).unwrap(), vec![3, 5, 11, 36]);
        assert_eq!(length_schedule(10, 1.5, 2).unwrap(), vec![10, 31, 172]);
        assert!(matches!(length_schedule(3, 1.0, 2), Err(Error::InvalidParameter(_))));
        assert!(length_schedule(2, 1.5, 2).is_err());
        assert!(matches!(length_schedule(3, 1.5, 20), Err(Error::Overflow(_))));
    }

    #[test]
    fn floor_pow_is_exact_on_perfect_powers() {
        // 16^{3/2} = 64 and 100^{3/2} = 1000 exactly.
        assert_eq!(floor_pow(16, 1.5), Some(64));
        assert_eq!(floor_pow(100, 1.5), Some(1000));
        assert_eq!(floor_pow(99, 1.5), Some(985));
        assert_eq!(floor_pow(8, 1.25), Some(13));
    }

    #[test]
    fn mass_examples() {
        let m = mass_schedule(0.7, 0.0, &[3, 5, 11]).unwrap();
        assert_eq!(m, vec![0.7; 3]);
        let m = mass_schedule(1.0, 0.5, &[3, 5, 11]).unwrap();
        assert!((m[1] - 0.776_393_202_250_021).abs() < 1e-12);
        assert!((m[2] - 0.659_347_523_084_301).abs() < 1e-12);
        assert!(matches!(
            mass_schedule(1.0, 3.0, &[3, 5, 11]),
            Err(Error::ScheduleInvalid { index: 1, .. })
        ));
    }

    #[test]
    fn default_schedule_keeps_half_the_mass() {
        let s = MsaSchedule::build(3, 1.5, 2, 0.5, 0.5).unwrap();
        assert!(s.product_floor_ok);
        assert!(s.masses.iter().all(|&m| m >= s.m0 / 2.0));
        assert!(s.mass_product < s.masses[2] / s.m0);
    }
}
