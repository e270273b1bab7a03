//! Maximal families of pairwise distant singular sub-cubes (`M_ND`, `M_D`).

use std::collections::BTreeSet;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::lattice::{cubes_ell_distant, Cube, DistanceMode, Point};
use crate::msa::classify::{singularity, strided_centers};
use crate::operator::Realization;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SubcubeKind {
    #[serde(rename = "NI")]
    NonInteractive,
    #[serde(rename = "I")]
    Interactive,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CandidateStrategy {
    /// Centers on a grid of stride `L_k`, plus the extra seeds.
    #[default]
    Stride,
    /// Every contained center.
    All,
}

#[derive(Clone, Debug)]
pub struct CountOptions {
    pub strategy: CandidateStrategy,
    pub extra_seeds: Vec<Point>,
    /// Counts above this are reported as the cap (`J + 1`).
    pub cap: usize,
    pub distance_mode: DistanceMode,
}

impl CountOptions {
    pub fn with_cap(cap: usize) -> Self {
        CountOptions {
            strategy: CandidateStrategy::Stride,
            extra_seeds: Vec::new(),
            cap,
            distance_mode: DistanceMode::Center,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CountReport {
    pub count: usize,
    pub capped: bool,
    pub candidates: usize,
    pub singular_centers: Vec<Point>,
    /// Centers of one maximal family.
    pub family: Vec<Point>,
}

/// Candidate centers `y` with `C_{L_k}(y) ⊆ big`, sorted and deduplicated.
pub fn candidate_centers(big: &Cube, l_k: usize, opts: &CountOptions) -> Vec<Point> {
    let mut set: BTreeSet<Point> = match opts.strategy {
        CandidateStrategy::All => big.subcube_centers(l_k).into_iter().collect(),
        CandidateStrategy::Stride => strided_centers(big, l_k, l_k.max(1)).into_iter().collect(),
    };
    for s in &opts.extra_seeds {
        if big.contains_cube(&big.subcube(s.clone(), l_k)) {
            set.insert(s.clone());
        }
    }
    set.into_iter().collect()
}

/// Largest subset of `cubes` that is pairwise `ell`-distant, searched exactly
/// by branch and bound and stopped once `cap` members are found. Returns
/// indices of one optimal (or capped) family.
pub fn max_distant_family(cubes: &[Cube], ell: u64, cap: usize, mode: DistanceMode) -> Result<Vec<usize>> {
    let n = cubes.len();
    let mut compatible = vec![vec![false; n]; n];
    for i in 0..n {
        for j in i + 1..n {
            let ok = cubes_ell_distant(&cubes[i], &cubes[j], ell, mode)?;
            compatible[i][j] = ok;
            compatible[j][i] = ok;
        }
    }
    fn grow(
        chosen: &mut Vec<usize>,
        pool: &[usize],
        compatible: &[Vec<bool>],
        cap: usize,
        best: &mut Vec<usize>,
    ) {
        if chosen.len() > best.len() {
            *best = chosen.clone();
        }
        if best.len() >= cap {
            return;
        }
        for (k, &v) in pool.iter().enumerate() {
            if chosen.len() + (pool.len() - k) <= best.len() {
                return;
            }
            let rest: Vec<usize> = pool[k + 1..].iter().copied().filter(|&w| compatible[v][w]).collect();
            chosen.push(v);
            grow(chosen, &rest, compatible, cap, best);
            chosen.pop();
            if best.len() >= cap {
                return;
            }
        }
    }
    let mut best = Vec::new();
    let pool: Vec<usize> = (0..n).collect();
    grow(&mut Vec::new(), &pool, &compatible, cap, &mut best);
    best.truncate(cap);
    Ok(best)
}

/// `M_ND` or `M_D` of `big` at energy `E`: the maximal number of pairwise
/// `L_k`-distant (E,m)-singular sub-cubes of radius `L_k` of the given kind.
pub fn count_singular_subcubes(
    r: &Realization<'_>,
    big: &Cube,
    energy: f64,
    mass: f64,
    l_k: usize,
    kind: SubcubeKind,
    opts: &CountOptions,
) -> Result<CountReport> {
    if l_k == 0 || l_k >= big.radius() {
        return Err(Error::InvalidParameter(format!(
            "need 0 < L_k ({l_k}) < radius ({})",
            big.radius()
        )));
    }
    let r0 = r.interaction.r0;
    let candidates: Vec<Cube> = candidate_centers(big, l_k, opts)
        .into_iter()
        .map(|c| big.subcube(c, l_k))
        .filter(|c| c.is_interactive(r0) == (kind == SubcubeKind::Interactive))
        .collect();
    let flags: Vec<bool> = candidates
        .par_iter()
        .map(|c| Ok(singularity(&r.hamiltonian(c)?, energy, mass)?.singular))
        .collect::<Result<_>>()?;
    let singular: Vec<Cube> = candidates
        .iter()
        .zip(&flags)
        .filter(|(_, &s)| s)
        .map(|(c, _)| c.clone())
        .collect();
    let family = max_distant_family(&singular, l_k as u64, opts.cap, opts.distance_mode)?;
    Ok(CountReport {
        count: family.len(),
        capped: family.len() >= opts.cap,
        candidates: candidates.len(),
        singular_centers: singular.iter().map(|c| c.center().clone()).collect(),
        family: family.iter().map(|&i| singular[i].center().clone()).collect(),
    })
}

/// `M_ND + M_D`, each capped at `opts.cap`.
pub fn count_total(
    r: &Realization<'_>,
    big: &Cube,
    energy: f64,
    mass: f64,
    l_k: usize,
    opts: &CountOptions,
) -> Result<usize> {
    let nd = count_singular_subcubes(r, big, energy, mass, l_k, SubcubeKind::NonInteractive, opts)?;
    let d = count_singular_subcubes(r, big, energy, mass, l_k, SubcubeKind::Interactive, opts)?;
    Ok(nd.count + d.count)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::randomfield::{DisorderSample, InteractionSpec};

    fn p(c: &[i64]) -> Point {
        Point::new(c.to_vec())
    }

    /// Largest `k ≤ cap` for which some `k`-subset is pairwise distant, by
    /// plain enumeration of combinations.
    fn brute_force_max(cubes: &[Cube], ell: u64, cap: usize) -> usize {
        fn exists(cubes: &[Cube], ell: u64, k: usize, start: usize, chosen: &mut Vec<usize>) -> bool {
            if chosen.len() == k {
                return true;
            }
            for i in start..cubes.len() {
                let ok = chosen
                    .iter()
                    .all(|&j| cubes_ell_distant(&cubes[i], &cubes[j], ell, DistanceMode::Center).unwrap());
                if ok {
                    chosen.push(i);
                    if exists(cubes, ell, k, i + 1, chosen) {
                        return true;
                    }
                    chosen.pop();
                }
            }
            false
        }
        (0..=cap.min(cubes.len()))
            .rev()
            .find(|&k| exists(cubes, ell, k, 0, &mut Vec::new()))
            .unwrap_or(0)
    }

    #[test]
    fn family_search_matches_subset_enumeration() {
        let mut state = 12345u64;
        let mut next = || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (state >> 33) as i64
        };
        for _ in 0..40 {
            let n = 3 + (next() % 10) as usize;
            let cubes: Vec<Cube> = (0..n)
                .map(|_| Cube::two_particle(p(&[next() % 40 - 20, next() % 40 - 20]), 1))
                .collect();
            for cap in [2, 4, 20] {
                let fam = max_distant_family(&cubes, 1, cap, DistanceMode::Center).unwrap();
                assert_eq!(fam.len(), brute_force_max(&cubes, 1, cap));
            }
        }
    }

    /// Flat potential 10 with zero-potential wells; the interaction is off.
    fn wells_sample(big: &Cube, wells: &[i64]) -> DisorderSample {
        DisorderSample::from_fn(&big.projection_sites(), |x| {
            if wells.contains(&x.coords()[0]) { 0.0 } else { 10.0 }
        })
    }

    #[test]
    fn counting_examples() {
        let big = Cube::two_particle(p(&[0, 0]), 14);
        let u = InteractionSpec::none();
        let mut opts = CountOptions::with_cap(4);
        opts.strategy = CandidateStrategy::All;

        // Far below the spectrum nothing is singular.
        let s = wells_sample(&big, &[]);
        let r = Realization::new(&s, &u);
        let rep = count_singular_subcubes(&r, &big, -5.0, 0.1, 1, SubcubeKind::NonInteractive, &opts).unwrap();
        assert_eq!(rep.count, 0);

        // Wells at ±11 only: the singular NI sub-cubes sit at (-11, 11) and
        // its mirror (11, -11), which are at symmetrized distance 0.
        let s = wells_sample(&big, &[-11, 11]);
        let r = Realization::new(&s, &u);
        let one = Cube::one_particle(p(&[-11]), 1);
        let h1 = crate::operator::assemble_single_particle(&one, &s, r.convention).unwrap();
        let e1 = crate::spectral::eigenvalues(&h1).unwrap()[0];
        let rep = count_singular_subcubes(&r, &big, 2.0 * e1 + 1e-9, 0.5, 1, SubcubeKind::NonInteractive, &opts)
            .unwrap();
        assert!(rep.singular_centers.contains(&p(&[-11, 11])));
        assert_eq!(rep.count, 1);
    }

    #[test]
    fn crafted_pair_counts_two() {
        // Radius-1 sub-cubes in d = 1; the potential is 10 except at the
        // wells. A sub-cube whose two projections are centered on wells
        // sees the ground state of two decoupled wells, energy ≈ 2·1.8.
        let big = Cube::two_particle(p(&[0, 0]), 12);
        let wells = [-11i64, -1, 1, 11];
        let s = wells_sample(&big, &wells);
        let u = InteractionSpec::none();
        let r = Realization::new(&s, &u);
        let one = Cube::one_particle(p(&[-11]), 1);
        let h1 = crate::operator::assemble_single_particle(&one, &s, r.convention).unwrap();
        let e1 = crate::spectral::eigenvalues(&h1).unwrap()[0];
        let energy = 2.0 * e1 + 1e-9;

        let mut opts = CountOptions::with_cap(4);
        opts.strategy = CandidateStrategy::All;
        let rep = count_singular_subcubes(&r, &big, energy, 0.5, 1, SubcubeKind::NonInteractive, &opts).unwrap();
        let singular: Vec<Cube> = rep.singular_centers.iter().map(|c| big.subcube(c.clone(), 1)).collect();
        assert!(!singular.is_empty());
        assert_eq!(rep.count, brute_force_max(&singular, 1, 4));
        assert!(rep.count >= 2, "{rep:?}");
        let fam: Vec<Cube> = rep.family.iter().map(|c| big.subcube(c.clone(), 1)).collect();
        for i in 0..fam.len() {
            for j in i + 1..fam.len() {
                assert!(cubes_ell_distant(&fam[i], &fam[j], 1, DistanceMode::Center).unwrap());
            }
        }
    }

    #[test]
    fn stride_candidates_include_seeds() {
        let big = Cube::two_particle(p(&[0, 0]), 10);
        let mut opts = CountOptions::with_cap(4);
        opts.extra_seeds = vec![p(&[3, -2]), p(&[20, 0])];
        let cs = candidate_centers(&big, 3, &opts);
        assert!(cs.contains(&p(&[3, -2])));
        assert!(!cs.contains(&p(&[20, 0])));
        assert!(cs.contains(&p(&[-7, -7])) && cs.contains(&p(&[7, 7])));
    }

    #[test]
    fn guards() {
        let big = Cube::two_particle(p(&[0, 0]), 3);
        let s = wells_sample(&big, &[]);
        let u = InteractionSpec::none();
        let r = Realization::new(&s, &u);
        let opts = CountOptions::with_cap(4);
        assert!(count_singular_subcubes(&r, &big, 0.0, 0.1, 3, SubcubeKind::Interactive, &opts).is_err());
    }
}
