//! One function per subcommand. Each computes its results, writes them
//! through the [`OutputSet`] and returns lines for standard output.

use serde::Serialize;
use serde_json::json;

use crate::cli::config::ExperimentConfig;
use crate::cli::output::{fmt_f64, OutputSet};
use crate::decay::{decay_report, DecayFitResult};
use crate::lattice::{Cube, Point};
use crate::montecarlo::estimators::{
    disorder_sites, estimate_dsk, estimate_lifshitz, estimate_s0, estimate_w1, estimate_w2,
};
use crate::montecarlo::{verify_combes_thomas, CubePair, EstimatorResult};
use crate::msa::classify::{classify, ClassifyOptions};
use crate::randomfield::{sample_potential, DisorderSample};
use crate::spectral::{full_spectrum, spectral_distance, GreenSolver};
use crate::{Realization, Result};

pub type Lines = Vec<String>;

fn realization_sample(cfg: &ExperimentConfig, cube: &Cube, index: u64) -> DisorderSample {
    sample_potential(&disorder_sites(cube), &cfg.model.distribution, cfg.run.seed, index)
}

pub fn schedule(cfg: &ExperimentConfig, out: &mut OutputSet) -> Result<Lines> {
    let s = cfg.msa.schedule()?;
    #[derive(Serialize)]
    struct Row {
        k: usize,
        #[serde(rename = "L")]
        l: u64,
        m: f64,
    }
    let rows: Vec<Row> = s
        .lengths
        .iter()
        .zip(&s.masses)
        .enumerate()
        .map(|(k, (&l, &m))| Row { k, l, m })
        .collect();
    let mut records: Vec<serde_json::Value> = rows.iter().map(|r| json!(r)).collect();
    records.push(json!({
        "m0": s.m0,
        "gamma": s.gamma,
        "alpha": s.alpha,
        "mass_product": s.mass_product,
        "product_floor_ok": s.product_floor_ok,
    }));
    out.write_jsonl("schedule", &records)?;
    let csv: Vec<Vec<String>> = rows
        .iter()
        .map(|r| vec![r.k.to_string(), r.l.to_string(), fmt_f64(r.m)])
        .collect();
    out.write_csv("schedule", &["k", "L", "m"], &csv)?;
    Ok(vec![
        format!("L: {:?}", s.lengths),
        format!("m: {:?}", s.masses),
        format!("mass product {} (floor ok: {})", s.mass_product, s.product_floor_ok),
    ])
}

pub fn spectrum(cfg: &ExperimentConfig, out: &mut OutputSet) -> Result<Lines> {
    let cube = cfg.spectrum.cube.cube(cfg.model.d)?;
    let model = cfg.model();
    let sample = realization_sample(cfg, &cube, 0);
    let h = model.realization(&sample).hamiltonian(&cube)?;
    let spec = full_spectrum(&h, false)?;
    out.write_jsonl(
        "spectrum",
        &[json!({ "cube": cube, "method": spec.method, "n": spec.eigenvalues.len(), "eigenvalues": spec.eigenvalues })],
    )?;
    let rows: Vec<Vec<String>> = spec
        .eigenvalues
        .iter()
        .enumerate()
        .map(|(i, e)| vec![i.to_string(), fmt_f64(*e)])
        .collect();
    out.write_csv("spectrum", &["index", "eigenvalue"], &rows)?;
    if cfg.spectrum.triplets {
        let mut buf = Vec::new();
        h.write_triplets(&mut buf)?;
        out.write_text("hamiltonian.txt", &buf)?;
    }
    Ok(vec![format!(
        "{} eigenvalues in [{}, {}]",
        spec.eigenvalues.len(),
        spec.eigenvalues.first().copied().unwrap_or(f64::NAN),
        spec.eigenvalues.last().copied().unwrap_or(f64::NAN)
    )])
}

pub fn green(cfg: &ExperimentConfig, out: &mut OutputSet) -> Result<Lines> {
    let cube = cfg.green.cube.cube(cfg.model.d)?;
    let source = match &cfg.green.source {
        Some(s) => Point::new(s.clone()),
        None => cube.center().clone(),
    };
    let sample = realization_sample(cfg, &cube, 0);
    let model = cfg.model();
    let h = model.realization(&sample).hamiltonian(&cube)?;
    let energy = cfg.green.energy;
    let row = GreenSolver::new(&h, energy)?.row(&source)?;
    let boundary_max = cube
        .inner_boundary_indices()
        .iter()
        .map(|&i| row.values[i].abs())
        .fold(0.0f64, f64::max);
    let mut records = vec![json!({
        "source": row.source,
        "energy": energy,
        "condition_estimate": row.condition_estimate,
        "spectral_distance": spectral_distance(&h, energy)?,
        "boundary_max": boundary_max,
        "residual": row.residual(&h),
    })];
    let mut rows = Vec::with_capacity(row.values.len());
    for (i, v) in row.values.iter().enumerate() {
        let site = cube.site(i);
        records.push(json!({ "site": site, "G": v }));
        rows.push(vec![site.to_string(), fmt_f64(*v)]);
    }
    out.write_jsonl("green", &records)?;
    out.write_csv("green", &["site", "G"], &rows)?;
    Ok(vec![format!("max |G({source}, v)| over the inner boundary: {boundary_max:e}")])
}

pub fn classify_cmd(cfg: &ExperimentConfig, out: &mut OutputSet) -> Result<Lines> {
    let c = &cfg.classify;
    let cube = c.cube.cube(cfg.model.d)?;
    let params = cfg.msa.params();
    let opts = ClassifyOptions {
        mass: c.mass.unwrap_or(cfg.msa.m0),
        budget: cfg.msa.subcube_budget,
        tunnelling: c.prev_length.map(|p| (p, cfg.msa.interval())),
    };
    let model = cfg.model();
    let mut records = Vec::new();
    let mut rows = Vec::new();
    let mut singular = 0;
    for i in 0..c.samples {
        let sample = realization_sample(cfg, &cube, i);
        let rec = classify(&model.realization(&sample), &cube, c.energy, &params, &opts)?;
        let f = &rec.flags;
        singular += f.singular as u32;
        let opt = |b: Option<bool>| b.map(|x| x.to_string()).unwrap_or_default();
        rows.push(vec![
            i.to_string(),
            f.resonant.to_string(),
            f.cnr.to_string(),
            f.singular.to_string(),
            opt(f.tunnelling),
            opt(f.interactive),
            fmt_f64(rec.green_max),
            fmt_f64(rec.spectral_distance),
        ]);
        records.push(json!({ "sample": i, "record": rec }));
    }
    out.write_jsonl("classify", &records)?;
    out.write_csv(
        "classify",
        &["sample", "R", "CNR", "S", "T", "interactive", "green_max", "spectral_distance"],
        &rows,
    )?;
    Ok(vec![format!("{singular} of {} realizations singular", c.samples)])
}

const SUMMARY_HEADER: [&str; 10] = ["event", "L", "k", "estimate", "ci_lo", "ci_hi", "n", "bound", "mode", "seed"];

fn summary_row(r: &EstimatorResult) -> Vec<String> {
    vec![
        r.event.as_str().to_string(),
        r.length.to_string(),
        r.k.map(|k| k.to_string()).unwrap_or_default(),
        fmt_f64(r.estimate),
        fmt_f64(r.ci95.0),
        fmt_f64(r.ci95.1),
        r.n_samples.to_string(),
        r.paper_bound.map(fmt_f64).unwrap_or_default(),
        serde_json::to_value(r.mode).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default(),
        r.seed.to_string(),
    ]
}

fn summary_line(r: &EstimatorResult) -> String {
    format!(
        "{} L={} estimate={} ci95=[{:.6}, {:.6}] n={} bound={} {:?}",
        r.event.as_str(),
        r.length,
        r.exact.clone().unwrap_or_else(|| fmt_f64(r.estimate)),
        r.ci95.0,
        r.ci95.1,
        r.n_samples,
        r.paper_bound.map(|b| format!("{b:e}")).unwrap_or_else(|| "-".into()),
        r.bound_satisfied,
    )
}

fn write_estimates(out: &mut OutputSet, stem: &str, results: &[EstimatorResult]) -> Result<Lines> {
    out.write_jsonl(stem, results)?;
    let rows: Vec<Vec<String>> = results.iter().map(summary_row).collect();
    out.write_csv(stem, &SUMMARY_HEADER, &rows)?;
    Ok(results.iter().map(summary_line).collect())
}

pub fn estimate_w1_cmd(cfg: &ExperimentConfig, out: &mut OutputSet) -> Result<Lines> {
    let cube = cfg.w1.cube.cube(cfg.model.d)?;
    let r = estimate_w1(
        &cfg.model(),
        &cube,
        cfg.w1.energy,
        &cfg.msa.params(),
        cfg.msa.subcube_budget,
        &cfg.run_spec(),
    )?;
    write_estimates(out, "estimate-w1", &[r])
}

pub fn estimate_w2_cmd(cfg: &ExperimentConfig, out: &mut OutputSet) -> Result<Lines> {
    let w = &cfg.w2;
    let r0 = cfg.msa.r0.max(cfg.model.interaction.r0);
    let pair = match w.pair.points() {
        Some((u, v)) => CubePair::custom(u, v, w.radius, w.pair.kind, r0)?,
        None => CubePair::canonical(w.pair.kind, w.radius, cfg.model.d, r0)?,
    };
    let interval = cfg.msa.interval();
    let r = estimate_w2(
        &cfg.model(),
        &pair,
        w.restrict_to_interval.then_some(&interval),
        &cfg.msa.params(),
        cfg.msa.subcube_budget,
        &cfg.run_spec(),
    )?;
    write_estimates(out, "estimate-w2", &[r])
}

pub fn estimate_s0_cmd(cfg: &ExperimentConfig, out: &mut OutputSet) -> Result<Lines> {
    let cube = crate::cli::config::CubeConfig {
        particles: cfg.s0.particles,
        radius: cfg.msa.l0 as usize,
        center: cfg.s0.center.clone(),
    }
    .cube(cfg.model.d)?;
    let r = estimate_s0(
        &cfg.model(),
        &cube,
        &cfg.msa.interval(),
        cfg.msa.m0,
        &cfg.msa.params(),
        &cfg.run_spec(),
    )?;
    write_estimates(out, "estimate-s0", &[r])
}

pub fn estimate_dsk_cmd(cfg: &ExperimentConfig, out: &mut OutputSet) -> Result<Lines> {
    let r = estimate_dsk(
        &cfg.model(),
        &cfg.msa.schedule()?,
        cfg.dsk.k,
        &cfg.msa.interval(),
        cfg.dsk.pair.kind,
        cfg.dsk.pair.points(),
        &cfg.msa.params(),
        &cfg.run_spec(),
    )?;
    write_estimates(out, "estimate-dsk", &[r])
}

pub fn estimate_lifshitz_cmd(cfg: &ExperimentConfig, out: &mut OutputSet) -> Result<Lines> {
    let l = &cfg.lifshitz;
    let model = cfg.model();
    let mut results = Vec::new();
    let mut failure = None;
    for &len in &l.lengths {
        let cube = crate::cli::config::CubeConfig {
            particles: l.particles,
            radius: len,
            center: None,
        }
        .cube(cfg.model.d)?;
        match estimate_lifshitz(&model, &cube, l.c, &cfg.run_spec()) {
            Ok(r) => results.push(r),
            Err(e) => {
                failure = Some(e);
                break;
            }
        }
    }
    let lines = write_estimates(out, "estimate-lifshitz", &results)?;
    match failure {
        Some(e) => Err(e),
        None => Ok(lines),
    }
}

pub fn verify_ct(cfg: &ExperimentConfig, out: &mut OutputSet) -> Result<Lines> {
    let rep = verify_combes_thomas(&cfg.ct.generator, cfg.ct.n_instances, cfg.run.seed)?;
    out.write_jsonl("verify-ct", &[&rep])?;
    out.write_csv(
        "verify-ct",
        &["instances", "checks", "pairs", "violations", "rejected", "worst_ratio"],
        &[vec![
            rep.instances.to_string(),
            rep.checks.to_string(),
            rep.pairs.to_string(),
            rep.violations.to_string(),
            rep.rejected.to_string(),
            fmt_f64(rep.worst_ratio),
        ]],
    )?;
    Ok(vec![
        format!("violations: {}", rep.violations),
        format!(
            "checked {} site pairs over {} (H, E) instances; worst |G|/bound = {:.6}",
            rep.pairs, rep.checks, rep.worst_ratio
        ),
    ])
}

pub fn median(v: &mut [f64]) -> f64 {
    if v.is_empty() {
        return f64::NAN;
    }
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct DecayRecord {
    pub amplitude: f64,
    pub sample: u64,
    #[serde(flatten)]
    pub fit: DecayFitResult,
}

pub fn decay_cmd(cfg: &ExperimentConfig, out: &mut OutputSet) -> Result<Lines> {
    let dc = &cfg.decay;
    let cube = dc.cube.cube(cfg.model.d)?;
    let sites = disorder_sites(&cube);
    let interval = dc.interval();
    let mut records: Vec<DecayRecord> = Vec::new();
    let mut summaries = Vec::new();
    let mut failure = None;
    'amps: for &g in &dc.amplitudes {
        let dist = dc.distribution.clone().with_amplitude(g);
        let n = if g == 0.0 || dist.is_degenerate() { 1 } else { dc.samples };
        let start = records.len();
        for s in 0..n {
            let sample = sample_potential(&sites, &dist, cfg.run.seed, s);
            let r = Realization {
                sample: &sample,
                interaction: &cfg.model.interaction,
                convention: cfg.model.convention,
            };
            let fits = r
                .hamiltonian(&cube)
                .and_then(|h| decay_report(&h, &interval, dc.max_states, dc.metric));
            match fits {
                Ok(fits) => records.extend(fits.into_iter().map(|fit| DecayRecord {
                    amplitude: g,
                    sample: s,
                    fit,
                })),
                Err(e) => {
                    failure = Some(e);
                    break 'amps;
                }
            }
        }
        let mut m: Vec<f64> = records[start..].iter().map(|r| r.fit.m_hat).collect();
        let mut r2: Vec<f64> = records[start..].iter().map(|r| r.fit.r2).collect();
        summaries.push((g, n, m.len(), median(&mut m), median(&mut r2)));
    }
    let mut json_records: Vec<serde_json::Value> = records.iter().map(|r| json!(r)).collect();
    for (g, n, states, mm, mr) in &summaries {
        json_records.push(json!({
            "summary": true, "amplitude": g, "samples": n, "states": states,
            "median_m_hat": mm, "median_r2": mr,
        }));
    }
    out.write_jsonl("decay", &json_records)?;
    let rows: Vec<Vec<String>> = records
        .iter()
        .map(|r| {
            vec![
                r.fit.eigenvalue.map(fmt_f64).unwrap_or_default(),
                fmt_f64(r.fit.m_hat),
                fmt_f64(r.fit.c_hat),
                fmt_f64(r.fit.r2),
                r.fit.localization_center.to_string(),
                fmt_f64(r.amplitude),
                r.sample.to_string(),
            ]
        })
        .collect();
    out.write_csv("decay", &["eigenvalue", "m_hat", "C_hat", "r2", "center", "amplitude", "sample"], &rows)?;
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(summaries
        .iter()
        .map(|(g, n, states, mm, mr)| {
            format!("amplitude {g}: {states} states over {n} samples, median m_hat {mm:.4}, median r2 {mr:.4}")
        })
        .collect())
}
