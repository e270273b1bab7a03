//! Green function row on a two-particle cube and its decay from the center.
use anderson2p::msa::classify::singularity;
use anderson2p::randomfield::sample_potential;
use anderson2p::spectral::{green_row, spectral_distance};
use anderson2p::{Cube, DistributionSpec, InteractionSpec, Point, Realization};

fn main() -> anderson2p::Result<()> {
    let cube = Cube::two_particle(Point::new(vec![0, 0]), 6);
    let sample = sample_potential(&cube.projection_sites(), &DistributionSpec::uniform(0.0, 4.0), 3, 0);
    let u = InteractionSpec::step(1, 1.0);
    let h = Realization::new(&sample, &u).hamiltonian(&cube)?;
    let e = 0.2;
    let row = green_row(&h, e, cube.center())?;
    println!("E = {e}, dist(E, spectrum) = {:.4}", spectral_distance(&h, e)?);
    println!("residual {:.2e}, condition estimate {:.2e}", row.residual(&h), row.condition_estimate);
    for r in 0..=6 {
        let shell = cube
            .sites()
            .iter()
            .enumerate()
            .filter(|(_, s)| s.max_dist(cube.center()) == r)
            .map(|(i, _)| row.values[i].abs())
            .fold(0.0, f64::max);
        println!("  |x - c| = {r}: max |G| = {shell:.3e}");
    }
    for m in [0.5, 1.0, 2.0] {
        let s = singularity(&h, e, m)?;
        println!("m = {m}: singular {} (green max {:.3e})", s.singular, s.green_max);
    }
    Ok(())
}
