//! Exact check of the Combes–Thomas bound
//! `|G(x, y; E)| ≤ (2/δ)·exp(−δ·|x − y|₁ / (12·dim))`, `δ = dist(E, σ(H)) ≤ 1`.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::lattice::{Cube, Point};
use crate::operator::{HamiltonianMatrix, Realization};
use crate::randomfield::{sample_potential, sample_rng, DistributionSpec, InteractionSpec};
use crate::spectral::{self, distance_to_sorted, GreenSolver};
use crate::{Error, Result};

/// Relative slack granted for solver round-off.
pub const CT_SLACK: f64 = 1e-10;

pub fn ct_bound(delta: f64, l1: u64, dim: usize) -> f64 {
    2.0 / delta * (-delta * l1 as f64 / (12.0 * dim as f64)).exp()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CtWitness {
    pub x: Point,
    pub y: Point,
    pub green: f64,
    pub bound: f64,
}

/// Outcome for one `(H, E)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CtInstanceReport {
    pub energy: f64,
    pub delta: f64,
    pub pairs: u64,
    pub violations: u64,
    /// `max |G| / bound` over all pairs.
    pub worst_ratio: f64,
    pub worst: Option<CtWitness>,
}

/// Checks every site pair of the cube at `energy`. Errors unless
/// `0 < δ ≤ 1`.
pub fn check_instance(h: &HamiltonianMatrix, energy: f64) -> Result<CtInstanceReport> {
    let eig = spectral::eigenvalues(h)?;
    check_with_spectrum(h, energy, &eig, 1.0)
}

/// As [`check_instance`] but for any `δ > 0`; the bound is then outside the
/// lemma's range and only informative.
pub fn check_instance_any_gap(h: &HamiltonianMatrix, energy: f64) -> Result<CtInstanceReport> {
    let eig = spectral::eigenvalues(h)?;
    check_with_spectrum(h, energy, &eig, f64::INFINITY)
}

fn check_with_spectrum(h: &HamiltonianMatrix, energy: f64, eig: &[f64], max_delta: f64) -> Result<CtInstanceReport> {
    let delta = distance_to_sorted(eig, energy);
    if !(delta > 0.0 && delta <= max_delta) {
        return Err(Error::InvalidParameter(format!("delta = {delta} outside (0, {max_delta}]")));
    }
    let cube = h.cube();
    let dim = cube.dim();
    let solver = GreenSolver::new(h, energy)?;
    let sites = cube.sites();
    let mut rep = CtInstanceReport {
        energy,
        delta,
        pairs: 0,
        violations: 0,
        worst_ratio: 0.0,
        worst: None,
    };
    for (j, x) in sites.iter().enumerate() {
        let col = solver.column(j)?;
        for (i, y) in sites.iter().enumerate() {
            let g = col[i].abs();
            let b = ct_bound(delta, x.l1_dist(y), dim);
            rep.pairs += 1;
            if g > b * (1.0 + CT_SLACK) {
                rep.violations += 1;
            }
            let ratio = g / b;
            if ratio > rep.worst_ratio {
                rep.worst_ratio = ratio;
                rep.worst = Some(CtWitness {
                    x: x.clone(),
                    y: y.clone(),
                    green: g,
                    bound: b,
                });
            }
        }
    }
    Ok(rep)
}

/// Random instance family: two-particle cubes at the origin with uniform
/// disorder and a random step interaction.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CtGenerator {
    pub d: usize,
    pub l_min: usize,
    pub l_max: usize,
    pub max_amplitude: f64,
    pub r0: u64,
    pub max_interaction: f64,
    pub energies_per_instance: usize,
}

impl Default for CtGenerator {
    fn default() -> Self {
        CtGenerator {
            d: 1,
            l_min: 2,
            l_max: 8,
            max_amplitude: 2.0,
            r0: 1,
            max_interaction: 2.0,
            energies_per_instance: 5,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CtReport {
    pub instances: u64,
    pub checks: u64,
    pub pairs: u64,
    pub violations: u64,
    /// Candidate energies dropped because their gap exceeded 1.
    pub rejected: u64,
    pub worst_ratio: f64,
    pub worst: Option<CtWitness>,
}

/// Draws `n_instances` cubes. Energy `j` of an instance sits at distance
/// `δ ∈ (0, 1]` below the spectrum for even `j`, and at a random point of a
/// random spectral gap for odd `j`; gap energies with `δ > 1` are rejected.
pub fn verify_combes_thomas(generator: &CtGenerator, n_instances: u64, seed: u64) -> Result<CtReport> {
    if generator.l_min == 0 || generator.l_min > generator.l_max || generator.d == 0 {
        return Err(Error::InvalidParameter("generator needs 1 <= l_min <= l_max and d >= 1".into()));
    }
    let reports: Vec<(Vec<CtInstanceReport>, u64)> = (0..n_instances)
        .map(|i| run_instance(generator, seed, i))
        .collect::<Result<_>>()?;
    let mut out = CtReport {
        instances: n_instances,
        checks: 0,
        pairs: 0,
        violations: 0,
        rejected: 0,
        worst_ratio: 0.0,
        worst: None,
    };
    for (reps, rejected) in reports {
        out.rejected += rejected;
        for r in reps {
            out.checks += 1;
            out.pairs += r.pairs;
            out.violations += r.violations;
            if r.worst_ratio > out.worst_ratio {
                out.worst_ratio = r.worst_ratio;
                out.worst = r.worst;
            }
        }
    }
    Ok(out)
}

fn run_instance(g: &CtGenerator, seed: u64, index: u64) -> Result<(Vec<CtInstanceReport>, u64)> {
    let mut rng = sample_rng(seed, index, 0xc7);
    let l = rng.random_range(g.l_min..=g.l_max);
    let amplitude = g.max_amplitude * (1.0 - rng.random::<f64>());
    let u = g.max_interaction * rng.random::<f64>();
    let cube = Cube::two_particle(Point::origin(2 * g.d), l);
    let sites: Vec<Point> = cube.projection_sites().into_iter().collect();
    let sample = sample_potential(&sites, &DistributionSpec::uniform(0.0, amplitude), seed, index);
    let interaction = InteractionSpec::step(g.r0, u);
    let h = Realization::new(&sample, &interaction).hamiltonian(&cube)?;
    let eig = spectral::eigenvalues(&h)?;
    let mut reports = Vec::new();
    let mut rejected = 0;
    for j in 0..g.energies_per_instance {
        let energy = if j % 2 == 0 || eig.len() < 2 {
            eig[0] - (1.0 - rng.random::<f64>())
        } else {
            let k = rng.random_range(0..eig.len() - 1);
            let (a, b) = (eig[k], eig[k + 1]);
            let t = 0.05 + 0.9 * rng.random::<f64>();
            a + t * (b - a)
        };
        let delta = distance_to_sorted(&eig, energy);
        if !(delta > 0.0 && delta <= 1.0) {
            rejected += 1;
            continue;
        }
        reports.push(check_with_spectrum(&h, energy, &eig, 1.0)?);
    }
    Ok((reports, rejected))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::{assemble_single_particle, LaplacianConvention};
    use crate::randomfield::DisorderSample;

    #[test]
    fn single_site_and_three_site_path() {
        let c = Cube::one_particle(Point::new(vec![0]), 0);
        let s = DisorderSample::from_fn(&c.sites(), |_| 0.0);
        let h = assemble_single_particle(&c, &s, LaplacianConvention::Full).unwrap();
        let r = check_instance(&h, 2.0 - 0.5).unwrap();
        assert_eq!(r.violations, 0);
        assert!((r.worst_ratio - 0.5f64).abs() < 1e-12);

        let c = Cube::one_particle(Point::new(vec![0]), 1);
        let s = DisorderSample::from_fn(&c.sites(), |_| 0.0);
        let h = assemble_single_particle(&c, &s, LaplacianConvention::Full).unwrap();
        // δ = 2 - √2 + 0.5 > 1: refused by the strict check.
        assert!(check_instance(&h, -0.5).is_err());
        let r = check_instance_any_gap(&h, -0.5).unwrap();
        assert_eq!(r.pairs, 9);
        assert_eq!(r.violations, 0);
        assert!((r.delta - (2.0 - 2f64.sqrt() + 0.5)).abs() < 1e-12);
        // Dense inverse oracle for the worst ratio.
        let m = nalgebra::DMatrix::from_row_slice(3, 3, &[2.5f64, -1.0, 0.0, -1.0, 2.5, -1.0, 0.0, -1.0, 2.5]);
        let inv = m.try_inverse().unwrap();
        let mut worst: f64 = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                worst = worst.max(inv[(i, j)].abs() / ct_bound(r.delta, i.abs_diff(j) as u64, 1));
            }
        }
        assert!((worst - r.worst_ratio).abs() < 1e-12);

        assert!(check_instance(&h, -0.3).is_ok());
    }

    #[test]
    fn generator_finds_no_violations() {
        let rep = verify_combes_thomas(&CtGenerator::default(), 12, 5).unwrap();
        assert_eq!(rep.violations, 0);
        assert!(rep.checks > 0);
        assert!(rep.worst_ratio < 1.0);
    }
}
