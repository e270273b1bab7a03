//! Disorder laws: seeded per-site sampling, concentration and the
//! log-Hölder regularity onset.
use anderson2p::randomfield::{concentration_supremum, empirical_concentration, log_holder_onset, sample_potential};
use anderson2p::{DistributionSpec, Point};

fn main() -> anderson2p::Result<()> {
    let sites: Vec<Point> = (-3..=3).map(|x| Point::new(vec![x])).collect();
    let dist = DistributionSpec::uniform(0.0, 1.0).with_amplitude(2.0);
    let a = sample_potential(&sites, &dist, 42, 0);
    // Per-site streams: a sub-window sees the same values.
    let b = sample_potential(&sites[2..5], &dist, 42, 0);
    for s in &sites[2..5] {
        assert_eq!(a.value(s)?, b.value(s)?);
    }
    println!("{:?}", a.values().values().collect::<Vec<_>>());

    let many = sample_potential(&(0..20_000).map(|x| Point::new(vec![x])).collect::<Vec<_>>(), &dist, 1, 0);
    let values: Vec<f64> = many.values().values().copied().collect();
    for eps in [0.01, 0.1, 0.5] {
        println!(
            "eps {eps}: sup P(V in [a, a+eps]) = {:.4}, empirical {:.4}",
            concentration_supremum(&dist, eps)?,
            empirical_concentration(&values, eps)
        );
    }
    // Scales 10^0.1 .. 10^4.
    let grid: Vec<f64> = (1..=40).map(|i| 10f64.powf(i as f64 / 10.0)).collect();
    let mut strict = dist.clone();
    strict.q0 = 6.0;
    for d in [dist, strict, DistributionSpec::bernoulli(0.5, 0.0, 1.0)] {
        print!("q0 = {}, ", d.q0);
        println!("{:?}: log-Hölder from L = {:?}", d.kind, log_holder_onset(&d, &grid)?);
    }
    Ok(())
}
