//! Two-particle spectra: the tensor-sum structure of non-interactive cubes and
//! the upward shift a repulsive interaction gives the bottom of the spectrum.
use anderson2p::operator::{assemble_single_particle, assemble_two_particle, tensor_sum_spectrum};
use anderson2p::randomfield::sample_potential;
use anderson2p::spectral::eigenvalues;
use anderson2p::{Cube, DistributionSpec, InteractionSpec, LaplacianConvention, Point};

fn main() -> anderson2p::Result<()> {
    let conv = LaplacianConvention::Full;
    let u = InteractionSpec::step(1, 2.0);
    let dist = DistributionSpec::uniform(0.0, 3.0);

    let ni = Cube::two_particle(Point::new(vec![0, 12]), 4);
    let sample = sample_potential(&ni.projection_sites(), &dist, 1, 0);
    let full = eigenvalues(&assemble_two_particle(&ni, &sample, &u, conv)?)?;
    let (c1, c2) = ni.projections()?;
    let s1 = eigenvalues(&assemble_single_particle(&c1, &sample, conv)?)?;
    let s2 = eigenvalues(&assemble_single_particle(&c2, &sample, conv)?)?;
    let ts = tensor_sum_spectrum(&s1, &s2);
    let gap = full.iter().zip(&ts).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    println!("non-interactive cube {}: {} levels, max |full - tensor sum| = {gap:.2e}", ni.center(), full.len());

    let diag = Cube::two_particle(Point::new(vec![0, 0]), 4);
    let sample = sample_potential(&diag.projection_sites(), &dist, 1, 0);
    let with = eigenvalues(&assemble_two_particle(&diag, &sample, &u, conv)?)?;
    let without = eigenvalues(&assemble_two_particle(&diag, &sample, &InteractionSpec::none(), conv)?)?;
    println!("interactive cube: E0 with U {:.6}, without {:.6}", with[0], without[0]);
    Ok(())
}
