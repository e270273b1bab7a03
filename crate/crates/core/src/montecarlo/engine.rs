//! Sampling and exact enumeration of disorder configurations.
//!
//! An event maps a disorder sample to a small outcome code. Monte Carlo runs
//! count codes over seeded samples; exhaustive runs enumerate every atom
//! assignment of a discrete law and weigh codes exactly. Both reduce with
//! commutative sums, so the result does not depend on the thread schedule.

use std::collections::BTreeMap;

use num::{BigInt, BigRational, One, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::lattice::Point;
use crate::randomfield::{sample_potential, DisorderSample, DistributionSpec};
use crate::{Error, Result};

/// Auto mode enumerates when `sites · log₂(atoms)` is at most this.
pub const AUTO_EXHAUSTIVE_BITS: f64 = 20.0;
/// Hard cap on forced enumeration.
pub const MAX_EXHAUSTIVE_BITS: f64 = 26.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    MonteCarlo,
    Exhaustive,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModeRequest {
    #[default]
    Auto,
    MonteCarlo,
    Exhaustive,
}

/// `sites · log₂(#atoms)`, or `None` for a continuous law.
pub fn disorder_bits(n_sites: usize, dist: &DistributionSpec) -> Option<f64> {
    let atoms = dist.atoms()?;
    Some(n_sites as f64 * (atoms.len().max(1) as f64).log2())
}

pub fn resolve_mode(request: ModeRequest, n_sites: usize, dist: &DistributionSpec) -> Result<Mode> {
    let bits = disorder_bits(n_sites, dist);
    match request {
        ModeRequest::MonteCarlo => Ok(Mode::MonteCarlo),
        ModeRequest::Auto => Ok(match bits {
            Some(b) if b <= AUTO_EXHAUSTIVE_BITS => Mode::Exhaustive,
            _ => Mode::MonteCarlo,
        }),
        ModeRequest::Exhaustive => match bits {
            None => Err(Error::InvalidParameter(
                "exhaustive mode needs a discrete disorder law".into(),
            )),
            Some(b) if b > MAX_EXHAUSTIVE_BITS => Err(Error::InvalidParameter(format!(
                "{b:.1} disorder bits exceed the enumeration cap of {MAX_EXHAUSTIVE_BITS}"
            ))),
            Some(_) => Ok(Mode::Exhaustive),
        },
    }
}

/// Counts per outcome code over `n` seeded samples.
pub fn monte_carlo<F>(
    sites: &[Point],
    dist: &DistributionSpec,
    n: u64,
    seed: u64,
    event: F,
) -> Result<BTreeMap<u8, u64>>
where
    F: Fn(&DisorderSample) -> Result<u8> + Sync,
{
    (0..n)
        .into_par_iter()
        .map(|i| event(&sample_potential(sites, dist, seed, i)))
        .try_fold(BTreeMap::new, |mut acc, code| {
            *acc.entry(code?).or_insert(0u64) += 1;
            Ok(acc)
        })
        .try_reduce(BTreeMap::new, |mut a, b| {
            for (k, v) in b {
                *a.entry(k).or_insert(0) += v;
            }
            Ok(a)
        })
}

/// Exact outcome probabilities over all atom assignments.
#[derive(Clone, Debug, PartialEq)]
pub struct ExactDistribution {
    pub probabilities: BTreeMap<u8, BigRational>,
    pub configurations: u64,
}

impl ExactDistribution {
    pub fn probability(&self, pred: impl Fn(u8) -> bool) -> BigRational {
        self.probabilities
            .iter()
            .filter(|(k, _)| pred(**k))
            .fold(BigRational::zero(), |acc, (_, p)| acc + p)
    }
}

pub fn rational_from_f64(x: f64) -> BigRational {
    BigRational::from_float(x).expect("finite probability")
}

pub fn rational_to_f64(x: &BigRational) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// Enumerates every assignment of the law's atoms to `sites`. Site `j` takes
/// atom `(c / A^j) mod A` in configuration `c`. Configurations are grouped by
/// atom histogram, so the exact weight `∏ p_a^{h_a}` is formed once per group.
pub fn exhaustive<F>(sites: &[Point], dist: &DistributionSpec, event: F) -> Result<ExactDistribution>
where
    F: Fn(&DisorderSample) -> Result<u8> + Sync,
{
    let atoms = dist
        .atoms()
        .ok_or_else(|| Error::InvalidParameter("exhaustive mode needs a discrete disorder law".into()))?;
    let a = atoms.len() as u64;
    let n = sites.len() as u32;
    let total = a
        .checked_pow(n)
        .filter(|&t| t <= 1 << MAX_EXHAUSTIVE_BITS as u32)
        .ok_or_else(|| Error::InvalidParameter(format!("{a}^{n} configurations exceed the enumeration cap")))?;
    type Tally = BTreeMap<(Vec<u16>, u8), u64>;
    let tally: Tally = (0..total)
        .into_par_iter()
        .map(|c| {
            let mut hist = vec![0u16; atoms.len()];
            let mut rest = c;
            let values = sites
                .iter()
                .map(|s| {
                    let k = (rest % a) as usize;
                    rest /= a;
                    hist[k] += 1;
                    (s.clone(), atoms[k].0)
                })
                .collect();
            let code = event(&DisorderSample::from_values(values))?;
            Ok((hist, code))
        })
        .try_fold(Tally::new, |mut acc, item: Result<(Vec<u16>, u8)>| -> Result<Tally> {
            *acc.entry(item?).or_insert(0) += 1;
            Ok(acc)
        })
        .try_reduce(Tally::new, |mut x, y| {
            for (k, v) in y {
                *x.entry(k).or_insert(0) += v;
            }
            Ok(x)
        })?;
    let probs: Vec<BigRational> = atoms.iter().map(|(_, p)| rational_from_f64(*p)).collect();
    let mut out: BTreeMap<u8, BigRational> = BTreeMap::new();
    for ((hist, code), count) in tally {
        let mut w = BigRational::one();
        for (p, &h) in probs.iter().zip(&hist) {
            w *= num::pow(p.clone(), h as usize);
        }
        *out.entry(code).or_insert_with(BigRational::zero) += w * BigRational::from_integer(BigInt::from(count));
    }
    Ok(ExactDistribution {
        probabilities: out,
        configurations: total,
    })
}
