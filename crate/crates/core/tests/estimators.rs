use anderson2p::montecarlo::estimators::neither_cnr_energy;
use anderson2p::montecarlo::{
    estimate_dsk, estimate_s0, estimate_w2, BoundStatus, CubePair, Mode, ModeRequest, Model, PairKind, RunSpec,
};
use anderson2p::msa::classify::DEFAULT_SUBCUBE_BUDGET;
use anderson2p::msa::{EnergyInterval, MsaParameters, MsaSchedule};
use anderson2p::randomfield::sample_potential;
use anderson2p::{Cube, DistributionSpec, InteractionSpec, Point};

fn bernoulli_model() -> Model {
    Model::new(1, DistributionSpec::bernoulli(0.5, 0.0, 1.0), InteractionSpec::step(1, 1.0))
}

fn exhaustive() -> RunSpec {
    RunSpec::new(0, 7).with_mode(ModeRequest::Exhaustive)
}

#[test]
fn w2_is_symmetric_in_the_pair() {
    let model = bernoulli_model();
    let params = MsaParameters::default();
    let interval = EnergyInterval::new(0.0, 1.0);
    let pair = CubePair::canonical(PairKind::Mixed, 2, 1, 1).unwrap();
    let swapped = CubePair {
        a: pair.b.clone(),
        b: pair.a.clone(),
        kind: pair.kind,
    };
    let x = estimate_w2(&model, &pair, Some(&interval), &params, DEFAULT_SUBCUBE_BUDGET, &exhaustive()).unwrap();
    let y = estimate_w2(&model, &swapped, Some(&interval), &params, DEFAULT_SUBCUBE_BUDGET, &exhaustive()).unwrap();
    assert_eq!(x.exact, y.exact);
    assert_eq!(x.mode, Mode::Exhaustive);
}

#[test]
fn w2_energy_lies_in_both_resonance_sets() {
    let model = Model::new(1, DistributionSpec::uniform(0.0, 1.0), InteractionSpec::step(1, 1.0));
    let params = MsaParameters::default();
    let pair = CubePair::canonical(PairKind::Interactive, 2, 1, 1).unwrap();
    let mut found = 0;
    for i in 0..200 {
        let sample = sample_potential(&pair.sites(), &model.distribution, 11, i);
        let r = model.realization(&sample);
        if let Some(e) = neither_cnr_energy(&r, &pair, None, &params, DEFAULT_SUBCUBE_BUDGET).unwrap() {
            found += 1;
            for c in [&pair.a, &pair.b] {
                let rep = anderson2p::msa::classify::is_cnr(&r, c, e, &params, DEFAULT_SUBCUBE_BUDGET).unwrap();
                assert!(!rep.is_cnr());
            }
        }
    }
    assert!(found > 0);
}

#[test]
fn exact_estimates_above_a_bound_are_violations() {
    // Desk-scale lengths put the bound L^{-2p} far below any nonzero probability.
    let model = bernoulli_model();
    let params = MsaParameters::default();
    let interval = EnergyInterval::new(0.0, 1.0).with_grid_points(16);
    let cube = Cube::two_particle(Point::new(vec![0, 0]), 3);
    let r = estimate_s0(&model, &cube, &interval, 0.5, &params, &exhaustive()).unwrap();
    assert_eq!(r.exact.as_deref(), Some("21/128"));
    assert_eq!(r.bound_satisfied, BoundStatus::Violated);

    let mc = estimate_s0(&model, &cube, &interval, 0.5, &params, &RunSpec::new(200, 3).with_mode(ModeRequest::MonteCarlo))
        .unwrap();
    assert_eq!(mc.bound_satisfied, BoundStatus::NotAssessable);
}

#[test]
fn dsk_non_interactive_pair_shares_its_first_projection() {
    let model = bernoulli_model();
    let params = MsaParameters::default();
    let interval = EnergyInterval::new(0.0, 1.0).with_grid_points(8);
    let schedule = MsaSchedule::build(3, 1.5, 1, 0.5, 0.5).unwrap();
    let pair = CubePair::canonical(PairKind::NonInteractive, 3, 1, 1).unwrap();
    // Centers (0, 8) and (0, 33): both cubes see the same disorder on [-3, 3].
    assert_eq!(pair.sites().len(), 3 * 7);
    let mc = RunSpec::new(400, 5).with_mode(ModeRequest::MonteCarlo);
    let r = estimate_dsk(&model, &schedule, 0, &interval, PairKind::NonInteractive, None, &params, &mc).unwrap();
    assert_eq!(r.n_samples, 400);
    assert!(r.notes.iter().any(|n| n == "pair=NI"));
    assert!(r.ci95.0 <= r.estimate && r.estimate <= r.ci95.1);
}

#[test]
fn monte_carlo_is_reproducible_across_thread_counts() {
    let model = Model::new(1, DistributionSpec::uniform(0.0, 2.0), InteractionSpec::step(1, 1.0));
    let params = MsaParameters::default();
    let interval = EnergyInterval::new(0.0, 1.0).with_grid_points(8);
    let cube = Cube::two_particle(Point::new(vec![0, 0]), 3);
    let run = RunSpec::new(300, 99);
    let go = |threads| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| estimate_s0(&model, &cube, &interval, 0.5, &params, &run).unwrap())
    };
    assert_eq!(go(1), go(3));
}
