//! Finite-volume Hamiltonians with Dirichlet boundary conditions.
//!
//! On a cube `C ⊂ ℤ^n` the operator is `-Δ_C + W`, where `-Δ_C` keeps the
//! full-lattice diagonal `2n` and couples ℓ¹-neighbours inside `C` with
//! `-1` (simple truncation). For two particles `W(x) = V(x₁) + V(x₂) + U(x₁, x₂)`,
//! for one particle `W(x) = V(x)`.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::lattice::{Cube, ParticleKind, Point};
use crate::randomfield::{DisorderSample, InteractionSpec};
use crate::sparse::CsrMatrix;
use crate::{Error, Result};

/// Diagonal convention of the kinetic term.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LaplacianConvention {
    /// `-Δ = 2n·I - A`, nonnegative.
    #[default]
    Full,
    /// `-A` only (spectrum shifted down by `2n`).
    Adjacency,
}

impl LaplacianConvention {
    pub fn diagonal(self, dim: usize) -> f64 {
        match self {
            LaplacianConvention::Full => 2.0 * dim as f64,
            LaplacianConvention::Adjacency => 0.0,
        }
    }
}

#[derive(Clone, Debug)]
pub struct HamiltonianMatrix {
    cube: Cube,
    matrix: CsrMatrix,
    diag_constant: f64,
}

impl HamiltonianMatrix {
    /// Assembles `-Δ_C + W` from a potential given per site index.
    pub fn with_potential(
        cube: &Cube,
        convention: LaplacianConvention,
        mut potential: impl FnMut(usize, &Point) -> Result<f64>,
    ) -> Result<Self> {
        let diag_constant = convention.diagonal(cube.dim());
        let mut rows = Vec::with_capacity(cube.len());
        for i in 0..cube.len() {
            let site = cube.site(i);
            let mut row = Vec::with_capacity(2 * cube.dim() + 1);
            row.push((i, diag_constant + potential(i, &site)?));
            row.extend(cube.neighbor_indices(i).into_iter().map(|j| (j, -1.0)));
            rows.push(row);
        }
        Ok(HamiltonianMatrix {
            cube: cube.clone(),
            matrix: CsrMatrix::from_rows(rows),
            diag_constant,
        })
    }

    pub fn cube(&self) -> &Cube {
        &self.cube
    }

    pub fn matrix(&self) -> &CsrMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn diag_constant(&self) -> f64 {
        self.diag_constant
    }

    /// Writes `row col value` lines, one stored entry per line.
    pub fn write_triplets<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        for (i, j, v) in self.matrix.triplets() {
            writeln!(out, "{i} {j} {v:.17e}")?;
        }
        Ok(())
    }
}

pub fn assemble_single_particle(
    cube: &Cube,
    sample: &DisorderSample,
    convention: LaplacianConvention,
) -> Result<HamiltonianMatrix> {
    if cube.kind() != ParticleKind::One {
        return Err(Error::WrongParticleKind {
            expected: ParticleKind::One,
        });
    }
    HamiltonianMatrix::with_potential(cube, convention, |_, x| sample.value(x))
}

pub fn assemble_two_particle(
    cube: &Cube,
    sample: &DisorderSample,
    interaction: &InteractionSpec,
    convention: LaplacianConvention,
) -> Result<HamiltonianMatrix> {
    if cube.kind() != ParticleKind::Two {
        return Err(Error::WrongParticleKind {
            expected: ParticleKind::Two,
        });
    }
    // Per-axis value tables avoid a map lookup per site.
    let (c1, c2) = cube.projections()?;
    let v1: Vec<f64> = c1.sites().iter().map(|s| sample.value(s)).collect::<Result<_>>()?;
    let v2: Vec<f64> = c2.sites().iter().map(|s| sample.value(s)).collect::<Result<_>>()?;
    let half = c1.len();
    HamiltonianMatrix::with_potential(cube, convention, |i, x| {
        let (x1, x2) = x.split();
        Ok(v1[i / half] + v2[i % half] + interaction.value(&x1, &x2))
    })
}

/// A fixed disorder realization together with the interaction: everything
/// needed to build the Hamiltonian of any cube covered by the sample.
#[derive(Clone, Copy, Debug)]
pub struct Realization<'a> {
    pub sample: &'a DisorderSample,
    pub interaction: &'a InteractionSpec,
    pub convention: LaplacianConvention,
}

impl<'a> Realization<'a> {
    pub fn new(sample: &'a DisorderSample, interaction: &'a InteractionSpec) -> Self {
        Realization {
            sample,
            interaction,
            convention: LaplacianConvention::Full,
        }
    }

    pub fn hamiltonian(&self, cube: &Cube) -> Result<HamiltonianMatrix> {
        match cube.kind() {
            ParticleKind::One => assemble_single_particle(cube, self.sample, self.convention),
            ParticleKind::Two => {
                assemble_two_particle(cube, self.sample, self.interaction, self.convention)
            }
        }
    }
}

/// All pairwise sums of two spectra, ascending, multiplicities kept.
pub fn tensor_sum_spectrum(s1: &[f64], s2: &[f64]) -> Vec<f64> {
    let mut out: Vec<f64> = s1.iter().flat_map(|a| s2.iter().map(move |b| a + b)).collect();
    out.sort_by(f64::total_cmp);
    out
}
