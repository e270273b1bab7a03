//! Checks |G(x,y;E)| <= (2/δ) exp(-δ|x-y|₁/(12·dim)) on random instances.
use anderson2p::montecarlo::combes_thomas::check_instance;
use anderson2p::montecarlo::{verify_combes_thomas, CtGenerator};
use anderson2p::randomfield::sample_potential;
use anderson2p::spectral::eigenvalues;
use anderson2p::{Cube, DistributionSpec, InteractionSpec, Point, Realization};

fn main() -> anderson2p::Result<()> {
    let rep = verify_combes_thomas(&CtGenerator::default(), 50, 7)?;
    println!(
        "{} instances, {} energies, {} site pairs: {} violations, worst ratio {:.4}",
        rep.instances, rep.checks, rep.pairs, rep.violations, rep.worst_ratio
    );

    let cube = Cube::two_particle(Point::new(vec![0, 0]), 5);
    let sample = sample_potential(&cube.projection_sites(), &DistributionSpec::uniform(0.0, 2.0), 9, 0);
    let u = InteractionSpec::step(1, 1.0);
    let h = Realization::new(&sample, &u).hamiltonian(&cube)?;
    let e0 = eigenvalues(&h)?[0];
    for delta in [0.05, 0.25, 1.0] {
        let r = check_instance(&h, e0 - delta)?;
        println!("δ = {delta}: {} violations, worst ratio {:.4}", r.violations, r.worst_ratio);
    }
    Ok(())
}
