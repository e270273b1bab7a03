//! Probability that the bottom of the spectrum sits below 2C/sqrt(L).
use anderson2p::montecarlo::{estimate_lifshitz, ModeRequest, Model, RunSpec};
use anderson2p::{Cube, DistributionSpec, InteractionSpec, Point};

fn main() -> anderson2p::Result<()> {
    let model = Model::new(1, DistributionSpec::bernoulli(0.5, 0.0, 1.0), InteractionSpec::none());
    let run = RunSpec::new(2000, 20240521).with_mode(ModeRequest::MonteCarlo);
    for l in [10, 20, 40, 80] {
        let r = estimate_lifshitz(&model, &Cube::one_particle(Point::new(vec![0]), l), 1.0, &run)?;
        println!("L={l:<3} P = {:.4}  95% CI [{:.4}, {:.4}]", r.estimate, r.ci95.0, r.ci95.1);
    }
    let two = estimate_lifshitz(&model, &Cube::two_particle(Point::new(vec![0, 0]), 10), 1.0, &RunSpec::new(300, 1))?;
    println!("two particles, L=10: P = {:.4} {:?}", two.estimate, two.notes);
    Ok(())
}
