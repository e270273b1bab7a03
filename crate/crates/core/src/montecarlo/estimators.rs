//! Estimators for the probabilistic properties of the induction.

use num::{BigRational, Zero};
use serde::{Deserialize, Serialize};

use crate::lattice::{Cube, ParticleKind, Point};
use crate::montecarlo::engine::{exhaustive, monte_carlo, rational_to_f64, resolve_mode, Mode, ModeRequest};
use crate::montecarlo::pairs::{CubePair, PairKind};
use crate::montecarlo::stats::clopper_pearson;
use crate::msa::classify::{first_common_singular_energy, is_cnr, singularity, ResonanceSet};
use crate::msa::{EnergyInterval, MsaParameters, MsaSchedule};
use crate::operator::{LaplacianConvention, Realization};
use crate::randomfield::{DisorderSample, DistributionSpec, InteractionSpec};
use crate::spectral::lowest_eigenpair;
use crate::{Error, Result};

/// Disorder law, interaction and Laplacian convention.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Model {
    pub d: usize,
    pub distribution: DistributionSpec,
    pub interaction: InteractionSpec,
    #[serde(default)]
    pub convention: LaplacianConvention,
}

impl Model {
    pub fn new(d: usize, distribution: DistributionSpec, interaction: InteractionSpec) -> Self {
        Model {
            d,
            distribution,
            interaction,
            convention: LaplacianConvention::Full,
        }
    }

    pub fn realization<'a>(&'a self, sample: &'a DisorderSample) -> Realization<'a> {
        Realization {
            sample,
            interaction: &self.interaction,
            convention: self.convention,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunSpec {
    pub n_samples: u64,
    pub seed: u64,
    pub mode: ModeRequest,
}

impl RunSpec {
    pub fn new(n_samples: u64, seed: u64) -> Self {
        RunSpec {
            n_samples,
            seed,
            mode: ModeRequest::Auto,
        }
    }

    pub fn with_mode(mut self, mode: ModeRequest) -> Self {
        self.mode = mode;
        self
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum EventName {
    W1,
    W2,
    S0,
    DSk,
    #[serde(rename = "LIFSHITZ")]
    Lifshitz,
}

impl EventName {
    pub fn as_str(self) -> &'static str {
        match self {
            EventName::W1 => "W1",
            EventName::W2 => "W2",
            EventName::S0 => "S0",
            EventName::DSk => "DSk",
            EventName::Lifshitz => "LIFSHITZ",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundStatus {
    Satisfied,
    Violated,
    NotAssessable,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EstimatorResult {
    pub event: EventName,
    #[serde(rename = "L")]
    pub length: u64,
    pub k: Option<usize>,
    pub estimate: f64,
    /// Exact probability `p/q` in exhaustive mode.
    pub exact: Option<String>,
    /// Favorable sample count in Monte Carlo mode.
    pub favorable: Option<u64>,
    /// Samples drawn, or configurations enumerated.
    pub n_samples: u64,
    pub ci95: (f64, f64),
    pub paper_bound: Option<f64>,
    pub bound_satisfied: BoundStatus,
    pub seed: u64,
    pub mode: Mode,
    pub notes: Vec<String>,
}

/// Bound comparison. Monte Carlo verdicts need the whole interval on one
/// side; bounds below `1/n` cannot be certified by `n` samples.
pub fn assess_bound(bound: Option<f64>, estimate: f64, ci: (f64, f64), n: u64, mode: Mode) -> BoundStatus {
    let Some(b) = bound else {
        return BoundStatus::NotAssessable;
    };
    match mode {
        Mode::Exhaustive if estimate <= b => BoundStatus::Satisfied,
        Mode::Exhaustive => BoundStatus::Violated,
        Mode::MonteCarlo if b < 1.0 / n as f64 => BoundStatus::NotAssessable,
        Mode::MonteCarlo if ci.1 <= b => BoundStatus::Satisfied,
        Mode::MonteCarlo if ci.0 > b => BoundStatus::Violated,
        Mode::MonteCarlo => BoundStatus::NotAssessable,
    }
}

/// Shared driver: evaluates a boolean event over the disorder on `sites`.
#[allow(clippy::too_many_arguments)]
pub fn estimate_event<F>(
    event: EventName,
    length: u64,
    k: Option<usize>,
    bound: Option<f64>,
    sites: &[Point],
    dist: &DistributionSpec,
    run: &RunSpec,
    indicator: F,
) -> Result<EstimatorResult>
where
    F: Fn(&DisorderSample) -> Result<bool> + Sync,
{
    let mode = resolve_mode(run.mode, sites.len(), dist)?;
    let code = |s: &DisorderSample| indicator(s).map(u8::from);
    let (estimate, exact, favorable, n, ci) = match mode {
        Mode::Exhaustive => {
            let ex = exhaustive(sites, dist, code)?;
            let p = ex.probability(|c| c == 1);
            let f = rational_to_f64(&p);
            (f, Some(p.to_string()), None, ex.configurations, (f, f))
        }
        Mode::MonteCarlo => {
            if run.n_samples == 0 {
                return Err(Error::InvalidParameter("n_samples must be at least 1".into()));
            }
            let counts = monte_carlo(sites, dist, run.n_samples, run.seed, code)?;
            let hits = counts.get(&1).copied().unwrap_or(0);
            let f = hits as f64 / run.n_samples as f64;
            (f, None, Some(hits), run.n_samples, clopper_pearson(hits, run.n_samples, 0.95))
        }
    };
    Ok(EstimatorResult {
        event,
        length,
        k,
        estimate,
        exact,
        favorable,
        n_samples: n,
        ci95: ci,
        paper_bound: bound,
        bound_satisfied: assess_bound(bound, estimate, ci, n, mode),
        seed: run.seed,
        mode,
        notes: Vec::new(),
    })
}

/// Single-particle sites whose disorder enters `cube`.
pub fn disorder_sites(cube: &Cube) -> Vec<Point> {
    match cube.kind() {
        ParticleKind::One => cube.sites(),
        ParticleKind::Two => cube.projection_sites().into_iter().collect(),
    }
}

/// ℙ{cube is not E-CNR}, bound `L^{-q}`.
pub fn estimate_w1(
    model: &Model,
    cube: &Cube,
    energy: f64,
    params: &MsaParameters,
    budget: usize,
    run: &RunSpec,
) -> Result<EstimatorResult> {
    if cube.radius() < 2 {
        return Err(Error::InvalidParameter("W1 needs L >= 2".into()));
    }
    let l = cube.radius() as u64;
    let bound = (l as f64).powf(-params.q);
    estimate_event(
        EventName::W1,
        l,
        None,
        Some(bound),
        &disorder_sites(cube),
        &model.distribution,
        run,
        |s| Ok(!is_cnr(&model.realization(s), cube, energy, params, budget)?.is_cnr()),
    )
}

/// Some energy of `interval` (all of ℝ when `None`) at which neither cube of
/// the pair is E-CNR.
pub fn neither_cnr_energy(
    r: &Realization<'_>,
    pair: &CubePair,
    interval: Option<&EnergyInterval>,
    params: &MsaParameters,
    budget: usize,
) -> Result<Option<f64>> {
    let a = ResonanceSet::build(r, &pair.a, params, budget)?;
    let b = ResonanceSet::build(r, &pair.b, params, budget)?;
    let (lo, hi) = match interval {
        Some(i) if i.is_empty() => return Ok(None),
        Some(i) => (i.e_low, i.e_high),
        None => (f64::NEG_INFINITY, f64::INFINITY),
    };
    for &(x0, x1) in &a.intervals {
        for &(y0, y1) in &b.intervals {
            let (s, t) = (x0.max(y0), x1.min(y1));
            if s < t && s < hi && t > lo {
                return Ok(Some((0.5 * (s + t)).clamp(lo, hi)));
            }
        }
    }
    Ok(None)
}

/// ℙ{∃E: neither cube of the pair is E-CNR}, bound `L^{-q}`.
pub fn estimate_w2(
    model: &Model,
    pair: &CubePair,
    interval: Option<&EnergyInterval>,
    params: &MsaParameters,
    budget: usize,
    run: &RunSpec,
) -> Result<EstimatorResult> {
    let l = pair.radius() as u64;
    if l < 2 {
        return Err(Error::InvalidParameter("W2 needs L >= 2".into()));
    }
    let bound = (l as f64).powf(-params.q);
    estimate_event(
        EventName::W2,
        l,
        None,
        Some(bound),
        &pair.sites(),
        &model.distribution,
        run,
        |s| Ok(neither_cnr_energy(&model.realization(s), pair, interval, params, budget)?.is_some()),
    )
}

/// ℙ{∃E ∈ I: cube is (E, m0)-singular}, bound `L0^{-2p}`.
pub fn estimate_s0(
    model: &Model,
    cube: &Cube,
    interval: &EnergyInterval,
    m0: f64,
    params: &MsaParameters,
    run: &RunSpec,
) -> Result<EstimatorResult> {
    if cube.radius() < 2 {
        return Err(Error::InvalidParameter("S0 needs L0 >= 2".into()));
    }
    let l = cube.radius() as u64;
    let bound = (l as f64).powf(-2.0 * params.p);
    let cubes = [cube.clone()];
    estimate_event(
        EventName::S0,
        l,
        Some(0),
        Some(bound),
        &disorder_sites(cube),
        &model.distribution,
        run,
        |s| Ok(first_common_singular_energy(&model.realization(s), &cubes, interval, m0, params.beta)?.is_some()),
    )
}

/// The pair used by [`estimate_dsk`]: canonical unless centers are given.
pub fn dsk_pair(
    schedule: &MsaSchedule,
    k: usize,
    kind: PairKind,
    d: usize,
    r0: u64,
    centers: Option<(Point, Point)>,
) -> Result<CubePair> {
    let l = schedule
        .length(k)
        .ok_or_else(|| Error::InvalidParameter(format!("scale {k} is beyond the schedule")))?;
    let l = usize::try_from(l).map_err(|_| Error::Overflow(k))?;
    match centers {
        Some((u, v)) => CubePair::custom(u, v, l, kind, r0),
        None => CubePair::canonical(kind, l, d, r0),
    }
}

/// ℙ{∃E ∈ I: both cubes of an `L_k`-distant pair are (E, m_k)-singular},
/// bound `L_k^{-2p}`.
#[allow(clippy::too_many_arguments)]
pub fn estimate_dsk(
    model: &Model,
    schedule: &MsaSchedule,
    k: usize,
    interval: &EnergyInterval,
    kind: PairKind,
    centers: Option<(Point, Point)>,
    params: &MsaParameters,
    run: &RunSpec,
) -> Result<EstimatorResult> {
    let r0 = params.r0.max(model.interaction.r0);
    let pair = dsk_pair(schedule, k, kind, model.d, r0, centers)?;
    let mass = schedule.mass(k).expect("length checked");
    let l = pair.radius() as u64;
    let bound = (l as f64).powf(-2.0 * params.p);
    let cubes = [pair.a.clone(), pair.b.clone()];
    let mut res = estimate_event(
        EventName::DSk,
        l,
        Some(k),
        Some(bound),
        &pair.sites(),
        &model.distribution,
        run,
        |s| Ok(first_common_singular_energy(&model.realization(s), &cubes, interval, mass, params.beta)?.is_some()),
    )?;
    res.notes.push(format!("pair={}", serde_json::to_string(&kind)?.trim_matches('"')));
    res.notes.push(format!("m_k={mass}"));
    Ok(res)
}

/// `2C·L^{-1/2}`.
pub fn lifshitz_threshold(l: usize, c: f64) -> f64 {
    2.0 * c / (l as f64).sqrt()
}

/// Ways the disorder law misses the hypotheses of the lowest-eigenvalue
/// lemma; empty when all hold.
pub fn lifshitz_hypothesis_gaps(dist: &DistributionSpec) -> Vec<String> {
    let mut gaps = Vec::new();
    if dist.is_degenerate() {
        gaps.push("law is degenerate".to_string());
    }
    let lo = dist.min_value();
    if lo != 0.0 {
        gaps.push(format!("essential infimum is {lo}, not 0"));
    }
    let positive = match dist.atoms() {
        Some(atoms) => atoms.iter().any(|&(v, w)| v > 0.0 && w > 0.0),
        None => dist.quantile(0.0).max(dist.quantile(1.0 - 1e-12)) > 0.0,
    };
    if !positive {
        gaps.push("P{V > 0} = 0".to_string());
    }
    gaps
}

/// ℙ{E0 ≤ 2C·L^{-1/2}} for the cube. No bound is attached.
pub fn estimate_lifshitz(model: &Model, cube: &Cube, c: f64, run: &RunSpec) -> Result<EstimatorResult> {
    if !(c > 0.0) {
        return Err(Error::InvalidParameter(format!("C = {c} must be positive")));
    }
    if cube.radius() == 0 {
        return Err(Error::InvalidParameter("the lowest-eigenvalue statistic needs L >= 1".into()));
    }
    let threshold = lifshitz_threshold(cube.radius(), c);
    let mut res = estimate_event(
        EventName::Lifshitz,
        cube.radius() as u64,
        None,
        None,
        &disorder_sites(cube),
        &model.distribution,
        run,
        |s| Ok(lowest_eigenpair(&model.realization(s).hamiltonian(cube)?)?.0 <= threshold),
    )?;
    res.notes.push(format!("threshold={threshold}"));
    for gap in lifshitz_hypothesis_gaps(&model.distribution) {
        res.notes.push(format!("hypothesis: {gap}"));
    }
    Ok(res)
}

/// Joint law of the two singularity indicators of a pair at fixed energy.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IndicatorCorrelation {
    pub p_a: f64,
    pub p_b: f64,
    pub p_ab: f64,
    pub covariance: f64,
    /// `NaN` when either indicator is almost surely constant.
    pub correlation: f64,
    pub exact_covariance: Option<String>,
    pub n_samples: u64,
    pub mode: Mode,
}

impl IndicatorCorrelation {
    pub fn exactly_uncorrelated(&self) -> Option<bool> {
        self.exact_covariance.as_ref().map(|c| c == "0")
    }
}

/// Covariance and correlation of `1{a singular}` and `1{b singular}` at `energy`.
pub fn singularity_correlation(
    model: &Model,
    pair: &CubePair,
    energy: f64,
    mass: f64,
    run: &RunSpec,
) -> Result<IndicatorCorrelation> {
    let sites = pair.sites();
    let mode = resolve_mode(run.mode, sites.len(), &model.distribution)?;
    let code = |s: &DisorderSample| -> Result<u8> {
        let r = model.realization(s);
        let a = singularity(&r.hamiltonian(&pair.a)?, energy, mass)?.singular;
        let b = singularity(&r.hamiltonian(&pair.b)?, energy, mass)?.singular;
        Ok(u8::from(a) | (u8::from(b) << 1))
    };
    let (p_a, p_b, p_ab, exact, n) = match mode {
        Mode::Exhaustive => {
            let ex = exhaustive(&sites, &model.distribution, code)?;
            let pa = ex.probability(|c| c & 1 == 1);
            let pb = ex.probability(|c| c & 2 == 2);
            let pab = ex.probability(|c| c == 3);
            let cov: BigRational = &pab - &pa * &pb;
            let cov_str = if cov.is_zero() { "0".to_string() } else { cov.to_string() };
            (
                rational_to_f64(&pa),
                rational_to_f64(&pb),
                rational_to_f64(&pab),
                Some(cov_str),
                ex.configurations,
            )
        }
        Mode::MonteCarlo => {
            let counts = monte_carlo(&sites, &model.distribution, run.n_samples, run.seed, code)?;
            let n = run.n_samples as f64;
            let get = |pred: fn(u8) -> bool| {
                counts.iter().filter(|(c, _)| pred(**c)).map(|(_, v)| *v).sum::<u64>() as f64 / n
            };
            (get(|c| c & 1 == 1), get(|c| c & 2 == 2), get(|c| c == 3), None, run.n_samples)
        }
    };
    let covariance = p_ab - p_a * p_b;
    let var = p_a * (1.0 - p_a) * p_b * (1.0 - p_b);
    Ok(IndicatorCorrelation {
        p_a,
        p_b,
        p_ab,
        covariance,
        correlation: if var > 0.0 { covariance / var.sqrt() } else { f64::NAN },
        exact_covariance: exact,
        n_samples: n,
        mode,
    })
}
