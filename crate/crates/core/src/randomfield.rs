//! I.i.d. disorder samples, the short-range interaction, and the
//! log-Hölder concentration check on the single-site distribution.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::lattice::Point;
use crate::{Error, Result};

/// Raw single-site law before the amplitude `g` is applied.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum DistributionKind {
    Uniform { a: f64, b: f64 },
    /// `ℙ{V = v1} = p`, `ℙ{V = v0} = 1 - p`.
    Bernoulli { p: f64, v0: f64, v1: f64 },
    Discrete { values: Vec<f64>, weights: Vec<f64> },
    Constant { v: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DistributionSpec {
    #[serde(flatten)]
    pub kind: DistributionKind,
    /// Amplitude `g` of `gV(x; ω)`.
    #[serde(default = "one")]
    pub amplitude: f64,
    /// Target concentration exponent in `sup_a ℙ{V ∈ [a, a + e^{-L^β}]} ≤ L^{-q0}`.
    #[serde(default = "default_q0")]
    pub q0: f64,
    #[serde(default = "default_beta")]
    pub beta: f64,
    #[serde(default = "yes")]
    pub nonnegative: bool,
}

fn one() -> f64 {
    1.0
}
fn default_q0() -> f64 {
    2.0
}
fn default_beta() -> f64 {
    0.5
}
fn yes() -> bool {
    true
}

impl DistributionSpec {
    pub fn new(kind: DistributionKind) -> Self {
        DistributionSpec {
            kind,
            amplitude: 1.0,
            q0: default_q0(),
            beta: default_beta(),
            nonnegative: true,
        }
    }

    pub fn uniform(a: f64, b: f64) -> Self {
        Self::new(DistributionKind::Uniform { a, b })
    }

    pub fn bernoulli(p: f64, v0: f64, v1: f64) -> Self {
        Self::new(DistributionKind::Bernoulli { p, v0, v1 })
    }

    pub fn discrete(values: Vec<f64>, weights: Vec<f64>) -> Self {
        Self::new(DistributionKind::Discrete { values, weights })
    }

    pub fn constant(v: f64) -> Self {
        Self::new(DistributionKind::Constant { v })
    }

    pub fn with_amplitude(mut self, g: f64) -> Self {
        self.amplitude = g;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidParameter(m.to_string()));
        if !self.amplitude.is_finite() {
            return bad("amplitude must be finite");
        }
        if !(self.beta > 0.0 && self.beta < 1.0) {
            return bad("beta must lie in (0, 1)");
        }
        if !(self.q0 > 0.0) {
            return bad("q0 must be positive");
        }
        match &self.kind {
            DistributionKind::Uniform { a, b } => {
                if !(a < b) {
                    return bad("uniform(a, b) needs a < b");
                }
            }
            DistributionKind::Bernoulli { p, v0, v1 } => {
                if !(0.0..=1.0).contains(p) {
                    return bad("bernoulli p must lie in [0, 1]");
                }
                if !(v0 < v1) {
                    return bad("bernoulli levels need v0 < v1");
                }
            }
            DistributionKind::Discrete { values, weights } => {
                if values.is_empty() || values.len() != weights.len() {
                    return bad("discrete needs equally many values and weights");
                }
                if weights.iter().any(|w| !(*w >= 0.0)) {
                    return bad("discrete weights must be nonnegative");
                }
                let total: f64 = weights.iter().sum();
                if (total - 1.0).abs() > 1e-12 {
                    return bad("discrete weights must sum to 1");
                }
            }
            DistributionKind::Constant { v } => {
                if !v.is_finite() {
                    return bad("constant value must be finite");
                }
            }
        }
        if self.nonnegative && self.min_value() < 0.0 {
            return bad("distribution produces negative values but nonnegative is set");
        }
        Ok(())
    }

    /// Atoms `(value, probability)` after scaling, merged and sorted by
    /// value; `None` for continuous laws. Zero-probability atoms are dropped.
    pub fn atoms(&self) -> Option<Vec<(f64, f64)>> {
        let g = self.amplitude;
        let raw: Vec<(f64, f64)> = match &self.kind {
            DistributionKind::Uniform { .. } => return None,
            DistributionKind::Bernoulli { p, v0, v1 } => vec![(g * v0, 1.0 - p), (g * v1, *p)],
            DistributionKind::Discrete { values, weights } => values
                .iter()
                .zip(weights)
                .map(|(v, w)| (g * v, *w))
                .collect(),
            DistributionKind::Constant { v } => vec![(g * v, 1.0)],
        };
        let mut merged: Vec<(f64, f64)> = Vec::new();
        let mut sorted: Vec<(f64, f64)> = raw.into_iter().filter(|a| a.1 > 0.0).collect();
        sorted.sort_by(|a, b| a.0.total_cmp(&b.0));
        for (v, w) in sorted {
            match merged.last_mut() {
                Some(last) if last.0 == v => last.1 += w,
                _ => merged.push((v, w)),
            }
        }
        Some(merged)
    }

    pub fn is_degenerate(&self) -> bool {
        match &self.kind {
            DistributionKind::Constant { .. } => true,
            _ if self.amplitude == 0.0 => true,
            _ => self.atoms().is_some_and(|a| a.len() <= 1),
        }
    }

    pub fn min_value(&self) -> f64 {
        let g = self.amplitude;
        match &self.kind {
            DistributionKind::Uniform { a, b } => (g * a).min(g * b),
            _ => self
                .atoms()
                .expect("discrete")
                .first()
                .map(|a| a.0)
                .unwrap_or(0.0),
        }
    }

    /// Maps a uniform variate `u ∈ [0, 1)` to a value of the law.
    pub fn quantile(&self, u: f64) -> f64 {
        let g = self.amplitude;
        match &self.kind {
            DistributionKind::Uniform { a, b } => g * (a + (b - a) * u),
            DistributionKind::Bernoulli { p, v0, v1 } => {
                if u < *p {
                    g * v1
                } else {
                    g * v0
                }
            }
            DistributionKind::Discrete { values, weights } => {
                let mut acc = 0.0;
                for (v, w) in values.iter().zip(weights) {
                    acc += w;
                    if u < acc {
                        return g * v;
                    }
                }
                g * values[values.len() - 1]
            }
            DistributionKind::Constant { v } => g * v,
        }
    }
}

/// Values of the field `V` on a finite set of single-particle sites.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DisorderSample {
    values: BTreeMap<Point, f64>,
    pub seed: u64,
    pub sample_index: u64,
}

impl DisorderSample {
    pub fn from_values(values: BTreeMap<Point, f64>) -> Self {
        DisorderSample {
            values,
            seed: 0,
            sample_index: 0,
        }
    }

    pub fn from_fn<'a>(sites: impl IntoIterator<Item = &'a Point>, f: impl Fn(&Point) -> f64) -> Self {
        Self::from_values(sites.into_iter().map(|p| (p.clone(), f(p))).collect())
    }

    pub fn get(&self, site: &Point) -> Option<f64> {
        self.values.get(site).copied()
    }

    pub fn value(&self, site: &Point) -> Result<f64> {
        self.get(site).ok_or_else(|| Error::MissingSiteValue(site.clone()))
    }

    pub fn set(&mut self, site: Point, value: f64) {
        self.values.insert(site, value);
    }

    pub fn values(&self) -> &BTreeMap<Point, f64> {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

const GOLDEN: u64 = 0x9e37_79b9_7f4a_7c15;

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(GOLDEN);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Stream key for `(seed, sample index, site)`; each site draws from its
/// own ChaCha stream so no generator state is shared between sites,
/// samples or worker threads.
pub fn site_stream_key(seed: u64, index: u64, site: &Point) -> u64 {
    let mut h = splitmix(seed ^ 0x5eed);
    h = splitmix(h ^ index);
    h = splitmix(h ^ site.dim() as u64);
    for &c in site.coords() {
        h = splitmix(h ^ (c as u64));
    }
    h
}

/// Generator for auxiliary per-sample draws (not site values), keyed by
/// `(seed, index, tag)`.
pub fn sample_rng(seed: u64, index: u64, tag: u64) -> ChaCha8Rng {
    let h = splitmix(splitmix(splitmix(seed ^ 0xa0c5) ^ index) ^ tag);
    ChaCha8Rng::seed_from_u64(h)
}

pub fn site_uniform(seed: u64, index: u64, site: &Point) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(site_stream_key(seed, index, site));
    rng.random::<f64>()
}

pub fn sample_potential<'a>(
    sites: impl IntoIterator<Item = &'a Point>,
    dist: &DistributionSpec,
    seed: u64,
    index: u64,
) -> DisorderSample {
    let values = sites
        .into_iter()
        .map(|s| (s.clone(), dist.quantile(site_uniform(seed, index, s))))
        .collect();
    DisorderSample {
        values,
        seed,
        sample_index: index,
    }
}

/// Short-range interaction `U(x₁, x₂)`, zero for `|x₁ - x₂| > r0`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InteractionSpec {
    pub r0: u64,
    /// `profile[k]` is the value at `|x₁ - x₂| = k`, `k = 0..=r0`.
    pub profile: Vec<f64>,
    /// Declared upper bound on `U`.
    pub bound: f64,
    /// Optional per-offset values keyed by `x₁ - x₂`; overrides the radial
    /// profile and allows `U(x₁, x₂) ≠ U(x₂, x₁)`.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub offsets: Vec<OffsetValue>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OffsetValue {
    pub offset: Vec<i64>,
    pub value: f64,
}

impl InteractionSpec {
    pub fn none() -> Self {
        InteractionSpec {
            r0: 0,
            profile: vec![0.0],
            bound: 0.0,
            offsets: Vec::new(),
        }
    }

    /// Constant value `u` for `|x₁ - x₂| ≤ r0`.
    pub fn step(r0: u64, u: f64) -> Self {
        InteractionSpec {
            r0,
            profile: vec![u; r0 as usize + 1],
            bound: u,
            offsets: Vec::new(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.profile.len() != self.r0 as usize + 1 {
            return Err(Error::InvalidParameter(format!(
                "interaction profile needs r0 + 1 = {} entries, got {}",
                self.r0 + 1,
                self.profile.len()
            )));
        }
        let vals = self.profile.iter().chain(self.offsets.iter().map(|o| &o.value));
        for &v in vals {
            if !(v >= 0.0 && v <= self.bound) {
                return Err(Error::InvalidParameter(format!(
                    "interaction value {v} outside [0, {}]",
                    self.bound
                )));
            }
        }
        for o in &self.offsets {
            let gap = o.offset.iter().map(|c| c.unsigned_abs()).max().unwrap_or(0);
            if gap > self.r0 {
                return Err(Error::InvalidParameter(format!(
                    "interaction offset {:?} beyond range r0 = {}",
                    o.offset, self.r0
                )));
            }
        }
        Ok(())
    }

    pub fn value(&self, x1: &Point, x2: &Point) -> f64 {
        debug_assert_eq!(x1.dim(), x2.dim());
        let gap = x1.max_dist(x2);
        if gap > self.r0 {
            return 0.0;
        }
        if !self.offsets.is_empty() {
            let diff: Vec<i64> = x1.coords().iter().zip(x2.coords()).map(|(a, b)| a - b).collect();
            if let Some(o) = self.offsets.iter().find(|o| o.offset == diff) {
                return o.value;
            }
        }
        self.profile[gap as usize]
    }

    pub fn is_zero(&self) -> bool {
        self.profile.iter().all(|&v| v == 0.0) && self.offsets.iter().all(|o| o.value == 0.0)
    }
}

pub fn interaction_value(x1: &Point, x2: &Point, u: &InteractionSpec) -> f64 {
    u.value(x1, x2)
}

/// Closed-form `sup_a ℙ{V ∈ [a, a + ε]}`.
pub fn concentration_supremum(dist: &DistributionSpec, epsilon: f64) -> Result<f64> {
    if !(epsilon > 0.0) {
        return Err(Error::InvalidParameter("epsilon must be positive".into()));
    }
    if dist.is_degenerate() {
        return Ok(1.0);
    }
    match &dist.kind {
        DistributionKind::Uniform { a, b } => {
            let width = (dist.amplitude * (b - a)).abs();
            Ok((epsilon / width).min(1.0))
        }
        _ => {
            let atoms = dist.atoms().ok_or(Error::AnalyticUnavailable)?;
            Ok(window_mass(&atoms, epsilon))
        }
    }
}

/// Largest total weight of sorted atoms inside a closed window of length `eps`.
fn window_mass(sorted: &[(f64, f64)], eps: f64) -> f64 {
    let mut best = 0.0f64;
    let mut lo = 0;
    let mut acc = 0.0;
    for hi in 0..sorted.len() {
        acc += sorted[hi].1;
        while sorted[hi].0 - sorted[lo].0 > eps {
            acc -= sorted[lo].1;
            lo += 1;
        }
        best = best.max(acc);
    }
    best.min(1.0)
}

/// Histogram estimate of the concentration from observed values.
pub fn empirical_concentration(values: &[f64], epsilon: f64) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    let mut sorted: Vec<(f64, f64)> = values.iter().map(|&v| (v, 1.0 / values.len() as f64)).collect();
    sorted.sort_by(|a, b| a.0.total_cmp(&b.0));
    window_mass(&sorted, epsilon)
}

/// Log-Hölder condition at scale `L`: concentration at `ε = e^{-L^β}` is at most `L^{-q0}`.
pub fn log_holder_holds(dist: &DistributionSpec, length: f64) -> Result<bool> {
    let eps = (-length.powf(dist.beta)).exp();
    Ok(concentration_supremum(dist, eps)? <= length.powf(-dist.q0))
}

/// Smallest grid value from which the log-Hölder condition holds for the
/// rest of the (ascending) grid.
pub fn log_holder_onset(dist: &DistributionSpec, grid: &[f64]) -> Result<Option<f64>> {
    let mut onset = None;
    for &l in grid.iter().rev() {
        if log_holder_holds(dist, l)? {
            onset = Some(l);
        } else {
            break;
        }
    }
    Ok(onset)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sites(n: i64) -> Vec<Point> {
        (-n..=n).map(|x| Point::new(vec![x])).collect()
    }

    #[test]
    fn constant_and_degenerate_bernoulli() {
        let s = sample_potential(&sites(3), &DistributionSpec::constant(0.0), 1, 0);
        assert!(s.values().values().all(|&v| v == 0.0));
        let s = sample_potential(&sites(3), &DistributionSpec::bernoulli(1.0, 0.0, 1.0), 9, 4);
        assert!(s.values().values().all(|&v| v == 1.0));
    }

    #[test]
    fn sampling_is_deterministic_and_order_free() {
        let d = DistributionSpec::uniform(0.0, 1.0);
        let a = sample_potential(&sites(5), &d, 42, 7);
        let b = sample_potential(&sites(5), &d, 42, 7);
        assert_eq!(a, b);
        let rev: Vec<Point> = sites(5).into_iter().rev().collect();
        let c = sample_potential(&rev, &d, 42, 7);
        assert_eq!(a.values(), c.values());
        let other = sample_potential(&sites(5), &d, 42, 8);
        assert_ne!(a.values(), other.values());
    }

    #[test]
    fn neighbouring_sites_uncorrelated() {
        let d = DistributionSpec::uniform(0.0, 1.0);
        let (x, y) = (Point::new(vec![0]), Point::new(vec![1]));
        let n = 10_000;
        let pairs: Vec<(f64, f64)> = (0..n)
            .map(|i| (site_uniform(3, i, &x), site_uniform(3, i, &y)))
            .map(|(u, v)| (d.quantile(u), d.quantile(v)))
            .collect();
        let mx = pairs.iter().map(|p| p.0).sum::<f64>() / n as f64;
        let my = pairs.iter().map(|p| p.1).sum::<f64>() / n as f64;
        let cov = pairs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>() / n as f64;
        let vx = pairs.iter().map(|p| (p.0 - mx).powi(2)).sum::<f64>() / n as f64;
        let vy = pairs.iter().map(|p| (p.1 - my).powi(2)).sum::<f64>() / n as f64;
        assert!((cov / (vx * vy).sqrt()).abs() < 0.05);
    }

    #[test]
    fn interaction_support() {
        let u0 = InteractionSpec::step(0, 3.0);
        assert_eq!(u0.value(&Point::new(vec![0]), &Point::new(vec![1])), 0.0);
        let u1 = InteractionSpec::step(1, 2.0);
        assert_eq!(u1.value(&Point::new(vec![4]), &Point::new(vec![4])), 2.0);
        assert_eq!(u1.value(&Point::new(vec![0]), &Point::new(vec![2])), 0.0);
        assert!(u1.validate().is_ok());
    }

    #[test]
    fn asymmetric_offsets() {
        let mut u = InteractionSpec::step(1, 2.0);
        u.offsets.push(OffsetValue {
            offset: vec![1],
            value: 0.5,
        });
        u.validate().unwrap();
        let (a, b) = (Point::new(vec![1]), Point::new(vec![0]));
        assert_eq!(u.value(&a, &b), 0.5);
        assert_eq!(u.value(&b, &a), 2.0);
    }

    #[test]
    fn concentration_examples() {
        let u = DistributionSpec::uniform(0.0, 1.0);
        let c = concentration_supremum(&u, (-4.0f64).exp()).unwrap();
        assert!((c - 0.018_315_638_888_734_18).abs() < 1e-15);
        let b = DistributionSpec::bernoulli(0.5, 0.0, 1.0);
        assert_eq!(concentration_supremum(&b, 0.3).unwrap(), 0.5);
        assert_eq!(concentration_supremum(&b, 1.0).unwrap(), 1.0);
        let k = DistributionSpec::constant(2.0);
        assert_eq!(concentration_supremum(&k, 1e-9).unwrap(), 1.0);
        assert!(concentration_supremum(&u, 0.0).is_err());
        let scaled = DistributionSpec::uniform(0.0, 1.0).with_amplitude(4.0);
        assert_eq!(concentration_supremum(&scaled, 0.4).unwrap(), 0.1);
    }

    #[test]
    fn empirical_tracks_analytic() {
        let d = DistributionSpec::uniform(0.0, 1.0);
        let vals: Vec<f64> = (0..20_000)
            .map(|i| d.quantile(site_uniform(11, i, &Point::new(vec![0]))))
            .collect();
        let e = empirical_concentration(&vals, 0.1);
        assert!((e - 0.1).abs() < 0.02, "{e}");
    }

    #[test]
    fn log_holder_eventually_holds_for_uniform() {
        let mut d = DistributionSpec::uniform(0.0, 1.0);
        d.q0 = 3.0;
        // e^{-√L} ≤ L^{-3}  ⇔  √L ≥ 3 ln L
        let grid: Vec<f64> = (1..=40).map(|k| (k * 100) as f64).collect();
        let onset = log_holder_onset(&d, &grid).unwrap().unwrap();
        for &l in grid.iter().filter(|&&l| l >= onset) {
            assert!(log_holder_holds(&d, l).unwrap());
        }
        assert_eq!(onset, 300.0);
        assert!(!log_holder_holds(&d, 200.0).unwrap());
        assert!(!log_holder_holds(&DistributionSpec::constant(1.0), 400.0).unwrap());
    }

    #[test]
    fn validation_errors() {
        assert!(DistributionSpec::uniform(1.0, 1.0).validate().is_err());
        assert!(DistributionSpec::bernoulli(1.2, 0.0, 1.0).validate().is_err());
        assert!(DistributionSpec::discrete(vec![0.0, 1.0], vec![0.3, 0.3]).validate().is_err());
        assert!(DistributionSpec::uniform(-1.0, 1.0).validate().is_err());
        let mut ok = DistributionSpec::uniform(-1.0, 1.0);
        ok.nonnegative = false;
        assert!(ok.validate().is_ok());
    }
}
