//! Dense brute-force reference implementations for d = 1, written against
//! plain coordinates and nalgebra only.
#![allow(dead_code)]

use std::collections::HashMap;

use nalgebra::{DMatrix, SymmetricEigen};

/// Dense two-particle Hamiltonian on the max-norm cube of radius `l` around
/// `(c1, c2)`: diagonal `4 + V(x1) + V(x2) + u·[|x1-x2| <= r0]`, hopping `-1`.
pub struct Dense2 {
    pub c: (i64, i64),
    pub l: i64,
    pub sites: Vec<(i64, i64)>,
    pub eig: SymmetricEigen<f64, nalgebra::Dyn>,
}

impl Dense2 {
    pub fn new(c: (i64, i64), l: i64, v: &HashMap<i64, f64>, r0: i64, u: f64) -> Self {
        let mut sites = Vec::new();
        for x1 in c.0 - l..=c.0 + l {
            for x2 in c.1 - l..=c.1 + l {
                sites.push((x1, x2));
            }
        }
        let n = sites.len();
        let pos: HashMap<(i64, i64), usize> = sites.iter().enumerate().map(|(i, &s)| (s, i)).collect();
        let mut h = DMatrix::<f64>::zeros(n, n);
        for (i, &(x1, x2)) in sites.iter().enumerate() {
            let w = if (x1 - x2).abs() <= r0 { u } else { 0.0 };
            h[(i, i)] = 4.0 + v[&x1] + v[&x2] + w;
            for nb in [(x1 + 1, x2), (x1 - 1, x2), (x1, x2 + 1), (x1, x2 - 1)] {
                if let Some(&j) = pos.get(&nb) {
                    h[(i, j)] = -1.0;
                }
            }
        }
        Dense2 {
            c,
            l,
            sites,
            eig: SymmetricEigen::new(h),
        }
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut e: Vec<f64> = self.eig.eigenvalues.iter().copied().collect();
        e.sort_by(f64::total_cmp);
        e
    }

    /// `max |G(c, y; E)|` over `|y - c|_∞ = l`, by spectral decomposition.
    pub fn boundary_green_max(&self, e: f64) -> f64 {
        let ci = self.sites.iter().position(|&s| s == self.c).unwrap();
        let q = &self.eig.eigenvectors;
        let mut best = 0.0f64;
        for (j, &(y1, y2)) in self.sites.iter().enumerate() {
            if (y1 - self.c.0).abs().max((y2 - self.c.1).abs()) != self.l {
                continue;
            }
            let g: f64 = (0..self.sites.len())
                .map(|k| q[(ci, k)] * q[(j, k)] / (self.eig.eigenvalues[k] - e))
                .sum();
            best = best.max(g.abs());
        }
        best
    }

    pub fn singular(&self, e: f64, mass: f64) -> bool {
        self.boundary_green_max(e) > (-mass * self.l as f64).exp()
    }
}

pub fn width(l: i64, beta: f64) -> f64 {
    (-(l as f64).powf(beta)).exp()
}

/// Sub-cube radii `ℓ` with `ℓ^α >= L`, `ℓ <= L`.
pub fn cnr_radii(l: i64, alpha: f64) -> Vec<i64> {
    (1..=l).filter(|&e| (e as f64).powf(alpha) >= l as f64 - 1e-9).collect()
}

/// Open resonance intervals `(λ - w, λ + w)` of every sub-cube inspected by
/// the completely-non-resonant scan of the cube at `c`.
pub fn resonance_intervals(
    c: (i64, i64),
    l: i64,
    v: &HashMap<i64, f64>,
    r0: i64,
    u: f64,
    alpha: f64,
    beta: f64,
) -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    for ell in cnr_radii(l, alpha) {
        let w = width(ell, beta);
        for y1 in c.0 - l + ell..=c.0 + l - ell {
            for y2 in c.1 - l + ell..=c.1 + l - ell {
                for lam in Dense2::new((y1, y2), ell, v, r0, u).eigenvalues() {
                    out.push((lam - w, lam + w));
                }
            }
        }
    }
    out
}

/// The scan energies: `n` equispaced points of `[lo, hi]`, plus `λ ± w/2`
/// for each listed eigenvalue in `[lo, hi]`, clipped.
pub fn scan_energies(lo: f64, hi: f64, n: usize, eigs: &[f64], w: f64) -> Vec<f64> {
    let mut g: Vec<f64> = (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect();
    for &l in eigs.iter().filter(|&&l| l >= lo && l <= hi) {
        g.push((l - w / 2.0).clamp(lo, hi));
        g.push((l + w / 2.0).clamp(lo, hi));
    }
    g
}

/// Every assignment of `{v0, v1}` to `sites`, with the number of `v1` entries.
pub fn assignments(sites: &[i64], v0: f64, v1: f64) -> impl Iterator<Item = (HashMap<i64, f64>, u32)> + '_ {
    (0u64..1 << sites.len()).map(move |bits| {
        let v = sites
            .iter()
            .enumerate()
            .map(|(i, &s)| (s, if bits >> i & 1 == 1 { v1 } else { v0 }))
            .collect();
        (v, bits.count_ones())
    })
}

/// Union of the two one-dimensional projections of the cube at `c`.
pub fn projection_sites(c: (i64, i64), l: i64) -> Vec<i64> {
    let mut s: Vec<i64> = (c.0 - l..=c.0 + l).chain(c.1 - l..=c.1 + l).collect();
    s.sort_unstable();
    s.dedup();
    s
}
