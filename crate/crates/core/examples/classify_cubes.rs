//! Classification flags for a few cubes and the count of distant singular
//! sub-cubes inside a larger one.
use anderson2p::msa::classify::{classify, ClassifyOptions, DEFAULT_SUBCUBE_BUDGET};
use anderson2p::msa::{count_singular_subcubes, CountOptions, EnergyInterval, MsaParameters, SubcubeKind};
use anderson2p::randomfield::sample_potential;
use anderson2p::{Cube, DistributionSpec, InteractionSpec, Point, Realization};

fn main() -> anderson2p::Result<()> {
    let params = MsaParameters::default();
    let big = Cube::two_particle(Point::new(vec![0, 10]), 16);
    let u = InteractionSpec::step(params.r0, 1.0);
    let sample = sample_potential(&big.projection_sites(), &DistributionSpec::uniform(0.0, 2.0), 5, 0);
    let r = Realization::new(&sample, &u);
    let opts = ClassifyOptions {
        mass: 0.3,
        budget: DEFAULT_SUBCUBE_BUDGET,
        tunnelling: Some((2, EnergyInterval::new(0.0, 1.0).with_grid_points(16))),
    };
    for c in [vec![0, 0], vec![0, 10], vec![-6, 14]] {
        let cube = Cube::two_particle(Point::new(c), 5);
        let rec = classify(&r, &cube, 0.5, &params, &opts)?;
        println!("{}", serde_json::to_string(&rec)?);
    }

    let copts = CountOptions::with_cap(params.j as usize + 1);
    for kind in [SubcubeKind::NonInteractive, SubcubeKind::Interactive] {
        let rep = count_singular_subcubes(&r, &big, 0.5, 0.3, 3, kind, &copts)?;
        println!(
            "{kind:?}: {} of {} candidates singular, distant family of {}{}",
            rep.singular_centers.len(),
            rep.candidates,
            rep.count,
            if rep.capped { " (capped)" } else { "" }
        );
    }
    Ok(())
}
