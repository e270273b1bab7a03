//! W1 and W2 probabilities, exactly on Bernoulli disorder and by Monte Carlo.
use anderson2p::montecarlo::{estimate_w1, estimate_w2, CubePair, ModeRequest, Model, PairKind, RunSpec};
use anderson2p::msa::classify::DEFAULT_SUBCUBE_BUDGET;
use anderson2p::msa::{EnergyInterval, MsaParameters};
use anderson2p::{Cube, DistributionSpec, InteractionSpec, Point};

fn main() -> anderson2p::Result<()> {
    let params = MsaParameters::default();
    let model = Model::new(1, DistributionSpec::bernoulli(0.5, 0.0, 1.0), InteractionSpec::step(1, 1.0));
    let exact = RunSpec::new(0, 1).with_mode(ModeRequest::Exhaustive);
    let mc = RunSpec::new(20_000, 1).with_mode(ModeRequest::MonteCarlo);

    let cube = Cube::two_particle(Point::new(vec![0, 0]), 2);
    for run in [&exact, &mc] {
        let r = estimate_w1(&model, &cube, 1.0, &params, DEFAULT_SUBCUBE_BUDGET, run)?;
        println!("W1 {:?}: {:.5} {:?} exact={:?} bound {:?}", r.mode, r.estimate, r.ci95, r.exact, r.bound_satisfied);
    }

    let interval = EnergyInterval::new(0.0, 1.0);
    for kind in [PairKind::Interactive, PairKind::Mixed] {
        let pair = CubePair::canonical(kind, 2, 1, 1)?;
        let r = estimate_w2(&model, &pair, Some(&interval), &params, DEFAULT_SUBCUBE_BUDGET, &exact)?;
        println!("W2 {kind:?} pair, {} bits: {:?} = {:.5}", pair.sites().len(), r.exact, r.estimate);
    }
    Ok(())
}
