//! Fitted decay rates of the lowest eigenvectors, with and without disorder.
use anderson2p::decay::{decay_report, ShellMetric};
use anderson2p::msa::EnergyInterval;
use anderson2p::randomfield::sample_potential;
use anderson2p::{Cube, DistributionSpec, InteractionSpec, Point, Realization};

fn main() -> anderson2p::Result<()> {
    let cube = Cube::two_particle(Point::new(vec![0, 0]), 12);
    let u = InteractionSpec::step(1, 1.0);
    let all = EnergyInterval::new(f64::NEG_INFINITY, f64::INFINITY);
    for amplitude in [0.0, 4.0] {
        let dist = DistributionSpec::uniform(0.0, 1.0).with_amplitude(amplitude);
        let sample = sample_potential(&cube.projection_sites(), &dist, 2, 0);
        let h = Realization::new(&sample, &u).hamiltonian(&cube)?;
        for metric in [ShellMetric::MaxNorm, ShellMetric::Symmetrized] {
            println!("amplitude {amplitude}, {metric:?} shells");
            for f in decay_report(&h, &all, 4, metric)? {
                println!(
                    "  E={:.4} m_hat={:.3} r2={:.3} center={} slack={:.2}",
                    f.eigenvalue.unwrap_or(f64::NAN),
                    f.m_hat,
                    f.r2,
                    f.localization_center,
                    f.log_slack
                );
            }
        }
    }
    Ok(())
}
