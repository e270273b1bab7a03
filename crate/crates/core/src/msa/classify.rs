//! Cube classifiers: resonance, complete non-resonance, singularity, tunnelling.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::lattice::{Cube, ParticleKind, Point};
use crate::msa::params::{EnergyInterval, MsaParameters};
use crate::operator::{assemble_single_particle, HamiltonianMatrix, LaplacianConvention, Realization};
use crate::randomfield::DisorderSample;
use crate::spectral::{self, distance_to_sorted, GreenSolver};
use crate::{Error, Result};

/// Default cap on sub-cube spectra computed by a complete-non-resonance scan.
pub const DEFAULT_SUBCUBE_BUDGET: usize = 100_000;

/// `e^{-L^β}`.
pub fn resonance_width(radius: usize, beta: f64) -> f64 {
    (-(radius as f64).powf(beta)).exp()
}

fn require_radius(cube: &Cube, min: usize) -> Result<()> {
    if cube.radius() < min {
        return Err(Error::InvalidParameter(format!(
            "cube radius {} below the minimum {min} for this classifier",
            cube.radius()
        )));
    }
    Ok(())
}

/// Ascending spectrum of the cube Hamiltonian. Non-interactive two-particle
/// cubes go through the tensor-sum of their factors.
pub fn cube_eigenvalues(r: &Realization<'_>, cube: &Cube) -> Result<Vec<f64>> {
    if cube.kind() == ParticleKind::Two && !cube.is_interactive(r.interaction.r0) {
        let (c1, c2) = cube.projections()?;
        let s1 = spectral::eigenvalues(&assemble_single_particle(&c1, r.sample, r.convention)?)?;
        let s2 = spectral::eigenvalues(&assemble_single_particle(&c2, r.sample, r.convention)?)?;
        return Ok(crate::operator::tensor_sum_spectrum(&s1, &s2));
    }
    spectral::eigenvalues(&r.hamiltonian(cube)?)
}

/// E-R test on an assembled Hamiltonian (`L ≥ 2`).
pub fn is_resonant(h: &HamiltonianMatrix, energy: f64, beta: f64) -> Result<bool> {
    require_radius(h.cube(), 2)?;
    Ok(spectral::spectral_distance(h, energy)? < resonance_width(h.cube().radius(), beta))
}

/// Smallest `ℓ'` with `ℓ' ≥ L^{1/α}`; exact when `2α` is an integer.
pub fn min_subcube_radius(l: usize, alpha: f64) -> usize {
    let twice = 2.0 * alpha;
    if twice.fract() == 0.0 && twice <= 16.0 {
        // ℓ'^{2α} ≥ L² in integers.
        let target = (l as u128).pow(2);
        let e = twice as u32;
        let mut c = ((l as f64).powf(1.0 / alpha).floor() as u128).saturating_sub(1);
        while c.pow(e) < target {
            c += 1;
        }
        return c as usize;
    }
    ((l as f64).powf(1.0 / alpha) - 1e-12).ceil() as usize
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScanMode {
    Exhaustive,
    Subsampled,
}

/// Which sub-cubes a complete-non-resonance scan inspects.
#[derive(Clone, Debug)]
pub struct SubcubePlan {
    pub mode: ScanMode,
    /// `(radius, centers)`, largest radius first.
    pub entries: Vec<(usize, Vec<Point>)>,
}

impl SubcubePlan {
    pub fn new(cube: &Cube, alpha: f64, budget: usize) -> Self {
        let l = cube.radius();
        let lo = min_subcube_radius(l, alpha).min(l);
        let full: usize = (lo..=l)
            .map(|ell| (2 * (l - ell) + 1).pow(cube.dim() as u32))
            .sum();
        if full <= budget {
            let entries = (lo..=l).rev().map(|ell| (ell, cube.subcube_centers(ell))).collect();
            return SubcubePlan {
                mode: ScanMode::Exhaustive,
                entries,
            };
        }
        let mut radii = Vec::new();
        let mut ell = lo.max(1);
        while ell < l {
            radii.push(ell);
            ell *= 2;
        }
        radii.push(l);
        let entries = radii
            .into_iter()
            .rev()
            .map(|ell| (ell, strided_centers(cube, ell, (ell / 2).max(1))))
            .collect();
        SubcubePlan {
            mode: ScanMode::Subsampled,
            entries,
        }
    }

    pub fn evaluations(&self) -> usize {
        self.entries.iter().map(|e| e.1.len()).sum()
    }

    pub fn cubes<'a>(&'a self, parent: &'a Cube) -> impl Iterator<Item = Cube> + 'a {
        self.entries
            .iter()
            .flat_map(move |(ell, cs)| cs.iter().map(move |c| parent.subcube(c.clone(), *ell)))
    }
}

/// Centers of contained sub-cubes on a grid of the given stride, always
/// including both extremes along every axis.
pub fn strided_centers(cube: &Cube, ell: usize, stride: usize) -> Vec<Point> {
    if ell > cube.radius() {
        return Vec::new();
    }
    let reach = (cube.radius() - ell) as i64;
    let mut offs: Vec<i64> = (0..)
        .map(|i| -reach + i * stride as i64)
        .take_while(|&o| o <= reach)
        .collect();
    if *offs.last().unwrap() != reach {
        offs.push(reach);
    }
    let dim = cube.dim();
    let mut out = Vec::with_capacity(offs.len().pow(dim as u32));
    let mut idx = vec![0usize; dim];
    loop {
        let coords = cube
            .center()
            .coords()
            .iter()
            .zip(&idx)
            .map(|(c, &i)| c + offs[i])
            .collect();
        out.push(Point::new(coords));
        let mut axis = dim;
        loop {
            if axis == 0 {
                return out;
            }
            axis -= 1;
            idx[axis] += 1;
            if idx[axis] < offs.len() {
                break;
            }
            idx[axis] = 0;
        }
    }
}

/// Energies at which some inspected sub-cube is resonant: a union of open
/// intervals `(λ - w, λ + w)`, stored merged and sorted.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResonanceSet {
    pub intervals: Vec<(f64, f64)>,
    pub mode: ScanMode,
    pub evaluated: usize,
}

impl ResonanceSet {
    pub fn build(r: &Realization<'_>, cube: &Cube, params: &MsaParameters, budget: usize) -> Result<Self> {
        require_radius(cube, 2)?;
        let plan = SubcubePlan::new(cube, params.alpha, budget);
        let subs: Vec<Cube> = plan.cubes(cube).collect();
        let per_cube: Vec<Vec<(f64, f64)>> = subs
            .par_iter()
            .map(|c| {
                let w = resonance_width(c.radius(), params.beta);
                Ok(cube_eigenvalues(r, c)?.into_iter().map(|l| (l - w, l + w)).collect())
            })
            .collect::<Result<_>>()?;
        let mut all: Vec<(f64, f64)> = per_cube.into_iter().flatten().collect();
        all.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut intervals: Vec<(f64, f64)> = Vec::with_capacity(all.len());
        for (a, b) in all {
            match intervals.last_mut() {
                // Open intervals only merge when they overlap strictly.
                Some(last) if a < last.1 => last.1 = last.1.max(b),
                _ => intervals.push((a, b)),
            }
        }
        Ok(ResonanceSet {
            intervals,
            mode: plan.mode,
            evaluated: subs.len(),
        })
    }

    pub fn contains(&self, e: f64) -> bool {
        let i = self.intervals.partition_point(|iv| iv.1 <= e);
        i < self.intervals.len() && self.intervals[i].0 < e
    }

    /// Some energy in both sets, if they meet.
    pub fn common_energy(&self, other: &ResonanceSet) -> Option<f64> {
        let (mut i, mut j) = (0, 0);
        while i < self.intervals.len() && j < other.intervals.len() {
            let (a, b) = self.intervals[i];
            let (c, d) = other.intervals[j];
            let lo = a.max(c);
            let hi = b.min(d);
            if lo < hi {
                return Some(0.5 * (lo + hi));
            }
            if b < d {
                i += 1;
            } else {
                j += 1;
            }
        }
        None
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CnrVerdict {
    Cnr,
    NotCnr,
    /// Subsampled scan found nothing resonant; not a certificate.
    Indeterminate,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CnrReport {
    pub verdict: CnrVerdict,
    pub mode: ScanMode,
    pub evaluated: usize,
    /// A resonant sub-cube `(center, radius)` when one was found.
    pub witness: Option<(Point, usize)>,
}

impl CnrReport {
    /// Indeterminate scans count as non-resonant.
    pub fn is_cnr(&self) -> bool {
        self.verdict != CnrVerdict::NotCnr
    }
}

/// E-CNR scan, stopping at the first resonant sub-cube (largest first, so
/// the cube itself is tested before anything else).
pub fn is_cnr(
    r: &Realization<'_>,
    cube: &Cube,
    energy: f64,
    params: &MsaParameters,
    budget: usize,
) -> Result<CnrReport> {
    require_radius(cube, 2)?;
    let plan = SubcubePlan::new(cube, params.alpha, budget);
    let mut evaluated = 0;
    for (ell, centers) in &plan.entries {
        let w = resonance_width(*ell, params.beta);
        for y in centers {
            evaluated += 1;
            let sub = cube.subcube(y.clone(), *ell);
            if distance_to_sorted(&cube_eigenvalues(r, &sub)?, energy) < w {
                return Ok(CnrReport {
                    verdict: CnrVerdict::NotCnr,
                    mode: plan.mode,
                    evaluated,
                    witness: Some((y.clone(), *ell)),
                });
            }
        }
    }
    Ok(CnrReport {
        verdict: match plan.mode {
            ScanMode::Exhaustive => CnrVerdict::Cnr,
            ScanMode::Subsampled => CnrVerdict::Indeterminate,
        },
        mode: plan.mode,
        evaluated,
        witness: None,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SingularityReport {
    pub singular: bool,
    /// `max_{v ∈ ∂⁻C} |G(u, v; E)|`, infinite on a solver resonance.
    pub green_max: f64,
    pub resonance: bool,
}

/// `max_{v∈∂⁻C} |G(center, v; E)|` for an assembled cube, `+∞` if `E` hits
/// the spectrum numerically.
pub fn boundary_green_max(h: &HamiltonianMatrix, energy: f64) -> Result<f64> {
    let solver = match GreenSolver::new(h, energy) {
        Ok(s) => s,
        Err(Error::Resonance { .. }) => return Ok(f64::INFINITY),
        Err(e) => return Err(e),
    };
    let g = match solver.column(h.cube().center_index()) {
        Ok(g) => g,
        Err(Error::Resonance { .. }) => return Ok(f64::INFINITY),
        Err(e) => return Err(e),
    };
    Ok(h.cube()
        .inner_boundary_indices()
        .into_iter()
        .map(|i| g[i].abs())
        .fold(0.0, f64::max))
}

/// (E,m)-singularity of an assembled cube (`L ≥ 1`).
pub fn singularity(h: &HamiltonianMatrix, energy: f64, mass: f64) -> Result<SingularityReport> {
    require_radius(h.cube(), 1)?;
    let green_max = boundary_green_max(h, energy)?;
    let threshold = (-mass * h.cube().radius() as f64).exp();
    Ok(SingularityReport {
        singular: green_max > threshold,
        green_max,
        resonance: green_max.is_infinite(),
    })
}

pub fn is_singular(r: &Realization<'_>, cube: &Cube, energy: f64, mass: f64) -> Result<bool> {
    Ok(singularity(&r.hamiltonian(cube)?, energy, mass)?.singular)
}

/// The discretized `∃E ∈ I` scan: the uniform grid plus `λ ± w/2` for every
/// listed eigenvalue `λ ∈ I`, clipped to `I`, sorted, deduplicated.
pub fn energy_grid(interval: &EnergyInterval, eigenvalues: &[f64], width: f64) -> Vec<f64> {
    if interval.is_empty() {
        return Vec::new();
    }
    let mut grid = interval.uniform_grid();
    for &l in eigenvalues.iter().filter(|&&l| interval.contains(l)) {
        for e in [l - 0.5 * width, l + 0.5 * width] {
            grid.push(e.clamp(interval.e_low, interval.e_high));
        }
    }
    grid.sort_by(f64::total_cmp);
    grid.dedup();
    grid
}

/// First grid energy at which every listed cube is (E,m)-singular.
pub fn first_common_singular_energy(
    r: &Realization<'_>,
    cubes: &[Cube],
    interval: &EnergyInterval,
    mass: f64,
    beta: f64,
) -> Result<Option<f64>> {
    let hs: Vec<HamiltonianMatrix> = cubes.iter().map(|c| r.hamiltonian(c)).collect::<Result<_>>()?;
    let mut eigs = Vec::new();
    let mut width = f64::INFINITY;
    for h in &hs {
        eigs.extend(spectral::eigenvalues(h)?);
        width = width.min(resonance_width(h.cube().radius(), beta));
    }
    for e in energy_grid(interval, &eigs, width) {
        let mut all = true;
        for h in &hs {
            if !singularity(h, e, mass)?.singular {
                all = false;
                break;
            }
        }
        if all {
            return Ok(Some(e));
        }
    }
    Ok(None)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TunnellingReport {
    pub tunnelling: bool,
    pub energy: Option<f64>,
    pub pair: Option<(Point, Point)>,
}

/// m-tunnelling of a single-particle cube: some grid energy in `I` at which two
/// disjoint contained sub-cubes of radius `prev_length` are (E,m)-singular.
pub fn tunnelling(
    cube: &Cube,
    sample: &DisorderSample,
    convention: LaplacianConvention,
    interval: &EnergyInterval,
    mass: f64,
    prev_length: usize,
    beta: f64,
) -> Result<TunnellingReport> {
    if cube.kind() != ParticleKind::One {
        return Err(Error::WrongParticleKind {
            expected: ParticleKind::One,
        });
    }
    if prev_length == 0 || prev_length >= cube.radius() {
        return Err(Error::InvalidParameter(format!(
            "need 0 < prev_length ({prev_length}) < radius ({})",
            cube.radius()
        )));
    }
    let none = TunnellingReport {
        tunnelling: false,
        energy: None,
        pair: None,
    };
    if interval.is_empty() {
        return Ok(none);
    }
    let centers = cube.subcube_centers(prev_length);
    let hs: Vec<HamiltonianMatrix> = centers
        .iter()
        .map(|c| assemble_single_particle(&cube.subcube(c.clone(), prev_length), sample, convention))
        .collect::<Result<_>>()?;
    let mut eigs = Vec::new();
    for h in &hs {
        eigs.extend(spectral::eigenvalues(h)?);
    }
    let grid = energy_grid(interval, &eigs, resonance_width(prev_length, beta));
    let reach = 2 * prev_length as u64;
    let hit = grid.par_iter().find_map_first(|&e| {
        let singular: Vec<usize> = hs
            .iter()
            .enumerate()
            .filter(|(_, h)| singularity(h, e, mass).map(|s| s.singular).unwrap_or(true))
            .map(|(i, _)| i)
            .collect();
        for (a, &i) in singular.iter().enumerate() {
            for &j in &singular[a + 1..] {
                if centers[i].max_dist(&centers[j]) > reach {
                    return Some((e, i, j));
                }
            }
        }
        None
    });
    Ok(match hit {
        Some((e, i, j)) => TunnellingReport {
            tunnelling: true,
            energy: Some(e),
            pair: Some((centers[i].clone(), centers[j].clone())),
        },
        None => none,
    })
}

pub fn is_tunnelling(
    cube: &Cube,
    sample: &DisorderSample,
    interval: &EnergyInterval,
    mass: f64,
    prev_length: usize,
    beta: f64,
) -> Result<bool> {
    Ok(tunnelling(cube, sample, LaplacianConvention::Full, interval, mass, prev_length, beta)?.tunnelling)
}

/// A two-particle cube tunnels when either single-particle factor does.
pub fn is_tunnelling_two_particle(
    cube: &Cube,
    sample: &DisorderSample,
    convention: LaplacianConvention,
    interval: &EnergyInterval,
    mass: f64,
    prev_length: usize,
    beta: f64,
) -> Result<bool> {
    let (c1, c2) = cube.projections()?;
    for c in [c1, c2] {
        if tunnelling(&c, sample, convention, interval, mass, prev_length, beta)?.tunnelling {
            return Ok(true);
        }
    }
    Ok(false)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassificationFlags {
    #[serde(rename = "R")]
    pub resonant: bool,
    #[serde(rename = "CNR")]
    pub cnr: bool,
    #[serde(rename = "S")]
    pub singular: bool,
    /// Only evaluated for non-interactive two-particle cubes when a previous
    /// scale is supplied.
    #[serde(rename = "T")]
    pub tunnelling: Option<bool>,
    pub interactive: Option<bool>,
}

/// One JSON-lines classification record.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassificationRecord {
    pub cube: Cube,
    #[serde(rename = "E")]
    pub energy: f64,
    pub flags: ClassificationFlags,
    pub green_max: f64,
    pub spectral_distance: f64,
    pub mode: ScanMode,
}

#[derive(Clone, Debug)]
pub struct ClassifyOptions {
    pub mass: f64,
    pub budget: usize,
    /// `(L_{k-1}, I)` for the tunnelling flag.
    pub tunnelling: Option<(usize, EnergyInterval)>,
}

pub fn classify(
    r: &Realization<'_>,
    cube: &Cube,
    energy: f64,
    params: &MsaParameters,
    opts: &ClassifyOptions,
) -> Result<ClassificationRecord> {
    require_radius(cube, 2)?;
    let h = r.hamiltonian(cube)?;
    let distance = spectral::spectral_distance(&h, energy)?;
    let resonant = distance < resonance_width(cube.radius(), params.beta);
    let cnr = is_cnr(r, cube, energy, params, opts.budget)?;
    let sing = singularity(&h, energy, opts.mass)?;
    let interactive = match cube.kind() {
        ParticleKind::Two => Some(cube.is_interactive(params.r0.max(r.interaction.r0))),
        ParticleKind::One => None,
    };
    let tunnelling = match (&opts.tunnelling, cube.kind(), interactive) {
        (Some((prev, interval)), ParticleKind::Two, Some(false)) => Some(is_tunnelling_two_particle(
            cube,
            r.sample,
            r.convention,
            interval,
            opts.mass,
            *prev,
            params.beta,
        )?),
        (Some((prev, interval)), ParticleKind::One, _) => Some(
            tunnelling(cube, r.sample, r.convention, interval, opts.mass, *prev, params.beta)?.tunnelling,
        ),
        _ => None,
    };
    Ok(ClassificationRecord {
        cube: cube.clone(),
        energy,
        flags: ClassificationFlags {
            resonant,
            cnr: cnr.is_cnr(),
            singular: sing.singular,
            tunnelling,
            interactive,
        },
        green_max: sing.green_max,
        spectral_distance: distance,
        mode: cnr.mode,
    })
}
