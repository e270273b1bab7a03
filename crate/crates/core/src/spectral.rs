//! Eigenvalues, eigenvectors and Green functions of finite-volume Hamiltonians.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::lattice::Point;
use crate::operator::HamiltonianMatrix;
use crate::sparse::BandedLu;
use crate::{Error, Result};

pub const DEFAULT_DENSE_CAP: usize = 20_000;

/// Relative pivot size below which `H - E` counts as singular.
pub const RESONANCE_PIVOT_RTOL: f64 = 1e-14;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SpectrumMethod {
    Dense,
    IterativeExtremal,
}

#[derive(Clone, Debug)]
pub struct SpectrumResult {
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    /// Column `j` belongs to `eigenvalues[j]`, rows in cube index order.
    pub eigenvectors: Option<DMatrix<f64>>,
    pub method: SpectrumMethod,
}

impl SpectrumResult {
    pub fn min(&self) -> f64 {
        self.eigenvalues[0]
    }

    pub fn distance(&self, energy: f64) -> f64 {
        distance_to_sorted(&self.eigenvalues, energy)
    }
}

/// `min |λ - E|` over an ascending list; `+∞` for an empty list.
pub fn distance_to_sorted(eigenvalues: &[f64], energy: f64) -> f64 {
    let i = eigenvalues.partition_point(|&l| l < energy);
    let mut best = f64::INFINITY;
    if i < eigenvalues.len() {
        best = best.min(eigenvalues[i] - energy);
    }
    if i > 0 {
        best = best.min(energy - eigenvalues[i - 1]);
    }
    best
}

fn check_cap(h: &HamiltonianMatrix, cap: usize) -> Result<()> {
    if h.dim() > cap {
        return Err(Error::DenseCapExceeded {
            sites: h.dim(),
            cap,
        });
    }
    Ok(())
}

pub fn full_spectrum(h: &HamiltonianMatrix, want_vectors: bool) -> Result<SpectrumResult> {
    full_spectrum_with_cap(h, want_vectors, DEFAULT_DENSE_CAP)
}

pub fn full_spectrum_with_cap(
    h: &HamiltonianMatrix,
    want_vectors: bool,
    cap: usize,
) -> Result<SpectrumResult> {
    check_cap(h, cap)?;
    let dense = h.matrix().to_dense();
    if !want_vectors {
        let mut eigenvalues: Vec<f64> = dense.symmetric_eigenvalues().iter().copied().collect();
        eigenvalues.sort_by(f64::total_cmp);
        return Ok(SpectrumResult {
            eigenvalues,
            eigenvectors: None,
            method: SpectrumMethod::Dense,
        });
    }
    let eig = dense.symmetric_eigen();
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let eigenvalues = order.iter().map(|&j| eig.eigenvalues[j]).collect();
    let vectors = DMatrix::from_fn(h.dim(), order.len(), |i, j| eig.eigenvectors[(i, order[j])]);
    Ok(SpectrumResult {
        eigenvalues,
        eigenvectors: Some(vectors),
        method: SpectrumMethod::Dense,
    })
}

/// Eigenvalues of the Hamiltonian, ascending.
pub fn eigenvalues(h: &HamiltonianMatrix) -> Result<Vec<f64>> {
    Ok(full_spectrum(h, false)?.eigenvalues)
}

pub fn spectral_distance(h: &HamiltonianMatrix, energy: f64) -> Result<f64> {
    Ok(distance_to_sorted(&eigenvalues(h)?, energy))
}

fn residual_norm(h: &HamiltonianMatrix, lambda: f64, v: &[f64]) -> f64 {
    let mut hv = vec![0.0; v.len()];
    h.matrix().matvec(v, &mut hv);
    hv.iter()
        .zip(v)
        .map(|(a, b)| (a - lambda * b).powi(2))
        .sum::<f64>()
        .sqrt()
}

fn normalize(v: &mut [f64]) -> f64 {
    let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if n > 0.0 {
        v.iter_mut().for_each(|x| *x /= n);
    }
    n
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    y.iter_mut().zip(x).for_each(|(yi, xi)| *yi += alpha * xi);
}

/// Tuning for the Lanczos ground-state solver.
#[derive(Clone, Copy, Debug)]
pub struct LanczosOptions {
    pub krylov_dim: usize,
    pub max_restarts: usize,
    /// Residual target relative to `‖H‖∞`.
    pub tol: f64,
}

impl Default for LanczosOptions {
    fn default() -> Self {
        LanczosOptions {
            krylov_dim: 120,
            max_restarts: 60,
            tol: 1e-12,
        }
    }
}

/// Lowest eigenpair by restarted Lanczos with full reorthogonalization.
///
/// The start vector is constant: for `-Δ + W` the ground state is positive
/// (Perron–Frobenius on a connected cube), so it is never orthogonal to it.
pub fn lanczos_lowest(h: &HamiltonianMatrix, opts: LanczosOptions) -> Result<(f64, Vec<f64>)> {
    let n = h.dim();
    let norm = h.matrix().inf_norm().max(f64::MIN_POSITIVE);
    let mut start = vec![1.0; n];
    normalize(&mut start);
    let mut total_iters = 0;
    for _ in 0..=opts.max_restarts {
        let m = opts.krylov_dim.min(n).max(1);
        let mut basis: Vec<Vec<f64>> = Vec::with_capacity(m);
        let mut alpha = Vec::with_capacity(m);
        let mut beta: Vec<f64> = Vec::with_capacity(m);
        let mut q = start.clone();
        let mut w = vec![0.0; n];
        for j in 0..m {
            total_iters += 1;
            h.matrix().matvec(&q, &mut w);
            let a = dot(&w, &q);
            alpha.push(a);
            basis.push(q.clone());
            // Full reorthogonalization, applied twice for stability.
            for _ in 0..2 {
                for b in &basis {
                    let c = dot(&w, b);
                    axpy(-c, b, &mut w);
                }
            }
            let b = normalize(&mut w);
            if j + 1 == m || b <= 1e-14 * norm {
                break;
            }
            beta.push(b);
            q.copy_from_slice(&w);
        }
        let k = alpha.len();
        let t = DMatrix::from_fn(k, k, |i, j| {
            if i == j {
                alpha[i]
            } else if i.abs_diff(j) == 1 {
                beta[i.min(j)]
            } else {
                0.0
            }
        });
        let eig = t.symmetric_eigen();
        let (imin, theta) = eig
            .eigenvalues
            .iter()
            .copied()
            .enumerate()
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .expect("nonempty tridiagonal");
        let mut v = vec![0.0; n];
        for (i, b) in basis.iter().enumerate() {
            axpy(eig.eigenvectors[(i, imin)], b, &mut v);
        }
        normalize(&mut v);
        let res = residual_norm(h, theta, &v);
        if res <= opts.tol * norm || k == n {
            return Ok((theta, v));
        }
        start = v;
    }
    Err(Error::NoConvergence(total_iters))
}

/// Lowest eigenvalue and normalized eigenvector.
pub fn lowest_eigenpair(h: &HamiltonianMatrix) -> Result<(f64, Vec<f64>)> {
    lanczos_lowest(h, LanczosOptions::default())
}

/// The `k` lowest eigenpairs: dense eigenvalues, then inverse iteration on
/// the banded factorization for the vectors. Near-degenerate clusters are
/// orthogonalized against the vectors already found.
pub fn lowest_eigenpairs(h: &HamiltonianMatrix, k: usize) -> Result<SpectrumResult> {
    let values = eigenvalues(h)?;
    let k = k.min(values.len());
    let n = h.dim();
    let norm = h.matrix().inf_norm().max(f64::MIN_POSITIVE);
    let mut vectors: Vec<Vec<f64>> = Vec::with_capacity(k);
    for (j, &lambda) in values.iter().take(k).enumerate() {
        let mut found = None;
        for attempt in 0..4 {
            let shift = lambda - norm * 1e-13 * (1 + 10 * attempt) as f64;
            let lu = BandedLu::factor(h.matrix(), shift);
            let mut v: Vec<f64> = (0..n)
                .map(|i| 1.0 + 0.5 * ((i * (j + 3) + attempt) as f64 * 0.618_033_988_75).sin())
                .collect();
            for _ in 0..6 {
                for u in &vectors {
                    let c = dot(&v, u);
                    axpy(-c, u, &mut v);
                }
                normalize(&mut v);
                lu.solve_in_place(&mut v);
                if !v.iter().all(|x| x.is_finite()) {
                    break;
                }
                for u in &vectors {
                    let c = dot(&v, u);
                    axpy(-c, u, &mut v);
                }
                normalize(&mut v);
                if residual_norm(h, lambda, &v) <= 1e-10 * norm {
                    found = Some(v.clone());
                    break;
                }
            }
            if found.is_some() {
                break;
            }
        }
        vectors.push(found.ok_or(Error::NoConvergence(j))?);
    }
    let eigenvectors = DMatrix::from_fn(n, k, |i, j| vectors[j][i]);
    Ok(SpectrumResult {
        eigenvalues: values[..k].to_vec(),
        eigenvectors: Some(eigenvectors),
        method: SpectrumMethod::IterativeExtremal,
    })
}

/// One row `G(source, ·; E)` of the finite-volume resolvent.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GreenRow {
    pub source: Point,
    pub energy: f64,
    /// In cube index order.
    pub values: Vec<f64>,
    /// `‖H - E‖∞ · max |g|`, a cheap lower estimate of the condition number.
    pub condition_estimate: f64,
}

/// Factorization of `H - E` shared by all sources at one energy.
pub struct GreenSolver<'h> {
    h: &'h HamiltonianMatrix,
    energy: f64,
    lu: BandedLu,
    shifted_norm: f64,
}

impl<'h> GreenSolver<'h> {
    pub fn new(h: &'h HamiltonianMatrix, energy: f64) -> Result<Self> {
        let lu = BandedLu::factor(h.matrix(), energy);
        let norm = h.matrix().inf_norm();
        let pivot = lu.min_pivot();
        if !(pivot >= RESONANCE_PIVOT_RTOL * norm.max(1.0)) {
            return Err(Error::Resonance { energy, pivot });
        }
        Ok(GreenSolver {
            h,
            energy,
            lu,
            shifted_norm: norm + energy.abs(),
        })
    }

    pub fn energy(&self) -> f64 {
        self.energy
    }

    pub fn column(&self, source: usize) -> Result<Vec<f64>> {
        let g = self.lu.inverse_column(source);
        if !g.iter().all(|x| x.is_finite()) {
            return Err(Error::Resonance {
                energy: self.energy,
                pivot: self.lu.min_pivot(),
            });
        }
        Ok(g)
    }

    pub fn row(&self, source: &Point) -> Result<GreenRow> {
        let idx = self
            .h
            .cube()
            .index_of(source)
            .ok_or_else(|| Error::InvalidParameter(format!("source {source} outside cube")))?;
        let values = self.column(idx)?;
        let gmax = values.iter().fold(0.0f64, |a, x| a.max(x.abs()));
        Ok(GreenRow {
            source: source.clone(),
            energy: self.energy,
            values,
            condition_estimate: self.shifted_norm * gmax,
        })
    }
}

pub fn green_row(h: &HamiltonianMatrix, energy: f64, source: &Point) -> Result<GreenRow> {
    GreenSolver::new(h, energy)?.row(source)
}

impl GreenRow {
    pub fn get(&self, h: &HamiltonianMatrix, target: &Point) -> Option<f64> {
        h.cube().index_of(target).map(|i| self.values[i])
    }

    /// `‖(H - E) g - δ_source‖₂`.
    pub fn residual(&self, h: &HamiltonianMatrix) -> f64 {
        let mut hg = vec![0.0; self.values.len()];
        h.matrix().matvec(&self.values, &mut hg);
        let src = h.cube().index_of(&self.source).unwrap_or(usize::MAX);
        hg.iter()
            .zip(&self.values)
            .enumerate()
            .map(|(i, (a, g))| {
                let r = a - self.energy * g - if i == src { 1.0 } else { 0.0 };
                r * r
            })
            .sum::<f64>()
            .sqrt()
    }
}

/// Dense `(H - E)^{-1}`, for cross-checks on small cubes.
pub fn dense_resolvent(h: &HamiltonianMatrix, energy: f64) -> Option<DMatrix<f64>> {
    let mut m = h.matrix().to_dense();
    for i in 0..h.dim() {
        m[(i, i)] -= energy;
    }
    m.try_inverse()
}

pub fn column_as_vector(m: &DMatrix<f64>, j: usize) -> DVector<f64> {
    m.column(j).into_owned()
}
