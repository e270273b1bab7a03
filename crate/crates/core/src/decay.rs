//! Exponential decay fits for eigenvectors.
//!
//! The fit is a least-squares line through `(r, ln max_{|x-c|=r} |ψ(x)|)`
//! over distance shells around a localization center `c`.

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::lattice::{Cube, ParticleKind, Point};
use crate::msa::EnergyInterval;
use crate::operator::HamiltonianMatrix;
use crate::spectral::lowest_eigenpairs;
use crate::{Error, Result};

/// Shells whose maximum falls below this are solver noise and dropped.
pub const DECAY_FLOOR: f64 = 1e-12;
pub const MIN_SHELLS: usize = 3;

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CenterMode {
    #[default]
    Argmax,
    Given(Point),
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ShellMetric {
    /// `|x - c|_∞`.
    #[default]
    MaxNorm,
    /// `min(|x - c|_∞, |x - Sc|_∞)` with `S` the particle exchange; the
    /// max-norm on one-particle cubes.
    Symmetrized,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecayFitResult {
    pub eigenvalue: Option<f64>,
    pub m_hat: f64,
    #[serde(rename = "C_hat")]
    pub c_hat: f64,
    pub r2: f64,
    pub localization_center: Point,
    /// Smallest `s ≥ 0` with `max_shell(r) ≤ C_hat·e^{-m_hat·r}·e^{s}` on every
    /// fitted shell.
    pub log_slack: f64,
    pub shells_used: usize,
}

impl DecayFitResult {
    /// The slack in distance units, `log_slack / m_hat`, for positive rates.
    pub fn distance_slack(&self) -> Option<f64> {
        (self.m_hat > 0.0).then(|| self.log_slack / self.m_hat)
    }
}

fn shell_distance(x: &Point, c: &Point, metric: ShellMetric, kind: ParticleKind) -> u64 {
    match (metric, kind) {
        (ShellMetric::Symmetrized, ParticleKind::Two) => x.max_dist(c).min(x.max_dist(&c.exchanged())),
        _ => x.max_dist(c),
    }
}

/// Fits the decay of `vector` (indexed in cube order) around a center.
pub fn fit_decay(cube: &Cube, vector: &[f64], center: &CenterMode, metric: ShellMetric) -> Result<DecayFitResult> {
    if vector.len() != cube.len() {
        return Err(Error::DimensionMismatch {
            left: vector.len(),
            right: cube.len(),
        });
    }
    let c = match center {
        CenterMode::Argmax => {
            let (i, _) = vector
                .iter()
                .enumerate()
                .max_by(|a, b| a.1.abs().total_cmp(&b.1.abs()))
                .ok_or(Error::TooFewShells(0))?;
            cube.site(i)
        }
        CenterMode::Given(p) => {
            if p.dim() != cube.dim() {
                return Err(Error::DimensionMismatch {
                    left: p.dim(),
                    right: cube.dim(),
                });
            }
            p.clone()
        }
    };
    let mut shells: Vec<f64> = Vec::new();
    for (i, v) in vector.iter().enumerate() {
        let r = shell_distance(&cube.site(i), &c, metric, cube.kind()) as usize;
        if r >= shells.len() {
            shells.resize(r + 1, 0.0);
        }
        shells[r] = shells[r].max(v.abs());
    }
    let pts: Vec<(f64, f64)> = shells
        .iter()
        .enumerate()
        .filter(|(_, &m)| m >= DECAY_FLOOR)
        .map(|(r, &m)| (r as f64, m.ln()))
        .collect();
    if pts.len() < MIN_SHELLS {
        return Err(Error::TooFewShells(pts.len()));
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = pts.iter().map(|p| (p.1 - my).powi(2)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = pts.iter().map(|p| (p.1 - intercept - slope * p.0).powi(2)).sum();
    let r2 = if syy <= f64::EPSILON * n * my.abs().max(1.0) {
        1.0
    } else {
        (1.0 - ss_res / syy).clamp(0.0, 1.0)
    };
    let log_slack = pts
        .iter()
        .map(|p| p.1 - intercept - slope * p.0)
        .fold(0.0f64, f64::max);
    Ok(DecayFitResult {
        eigenvalue: None,
        m_hat: -slope,
        c_hat: intercept.exp(),
        r2,
        localization_center: c,
        log_slack,
        shells_used: pts.len(),
    })
}

/// Fits for the lowest `max_states` eigenpairs whose eigenvalue lies in
/// `interval`.
pub fn decay_report(
    h: &HamiltonianMatrix,
    interval: &EnergyInterval,
    max_states: usize,
    metric: ShellMetric,
) -> Result<Vec<DecayFitResult>> {
    if interval.is_empty() || max_states == 0 {
        return Ok(Vec::new());
    }
    let spec = lowest_eigenpairs(h, max_states)?;
    let vecs = spec.eigenvectors.as_ref().expect("vectors requested");
    let picked: Vec<usize> = (0..spec.eigenvalues.len())
        .filter(|&j| interval.contains(spec.eigenvalues[j]))
        .collect();
    picked
        .par_iter()
        .map(|&j| {
            let v: Vec<f64> = vecs.column(j).iter().copied().collect();
            let mut fit = fit_decay(h.cube(), &v, &CenterMode::Argmax, metric)?;
            fit.eigenvalue = Some(spec.eigenvalues[j]);
            Ok(fit)
        })
        .collect()
}

/// CSV with columns `eigenvalue, m_hat, C_hat, r2, center`.
pub fn write_decay_csv<W: Write>(out: W, fits: &[DecayFitResult]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["eigenvalue", "m_hat", "C_hat", "r2", "center"])?;
    for f in fits {
        w.write_record([
            f.eigenvalue.map(|e| format!("{e:.12e}")).unwrap_or_default(),
            format!("{:.12e}", f.m_hat),
            format!("{:.12e}", f.c_hat),
            format!("{:.12e}", f.r2),
            f.localization_center.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::{assemble_single_particle, LaplacianConvention};
    use crate::randomfield::DisorderSample;
    use proptest::prelude::*;

    fn line(l: usize) -> Cube {
        Cube::one_particle(Point::new(vec![0]), l)
    }

    #[test]
    fn exact_exponential() {
        let c = line(10);
        let v: Vec<f64> = c.sites().iter().map(|x| (-0.5 * x.coords()[0].abs() as f64).exp()).collect();
        let f = fit_decay(&c, &v, &CenterMode::Argmax, ShellMetric::MaxNorm).unwrap();
        assert!((f.m_hat - 0.5).abs() < 1e-12);
        assert!((f.c_hat - 1.0).abs() < 1e-12);
        assert!((f.r2 - 1.0).abs() < 1e-12);
        assert_eq!(f.shells_used, 11);
        assert!(f.log_slack < 1e-12);
    }

    #[test]
    fn constant_vector_has_zero_rate() {
        let c = line(4);
        let f = fit_decay(&c, &[0.3; 9], &CenterMode::Argmax, ShellMetric::MaxNorm).unwrap();
        assert!(f.m_hat.abs() < 1e-14);
        assert_eq!(f.r2, 1.0);
    }

    #[test]
    fn too_few_shells() {
        let c = line(1);
        assert!(matches!(
            fit_decay(&c, &[0.5, 1.0, 0.2], &CenterMode::Argmax, ShellMetric::MaxNorm),
            Err(Error::TooFewShells(2))
        ));
        let c = line(5);
        let mut v = vec![0.0; 11];
        v[5] = 1.0;
        v[6] = 1e-3;
        assert!(matches!(
            fit_decay(&c, &v, &CenterMode::Argmax, ShellMetric::MaxNorm),
            Err(Error::TooFewShells(2))
        ));
    }

    #[test]
    fn single_well_matches_two_shell_ratio() {
        let c = line(12);
        let s = DisorderSample::from_fn(&c.sites(), |x| if x.coords()[0] == 0 { 0.0 } else { 3.0 });
        let h = assemble_single_particle(&c, &s, LaplacianConvention::Full).unwrap();
        let iv = EnergyInterval::new(-10.0, 10.0);
        let fits = decay_report(&h, &iv, 1, ShellMetric::MaxNorm).unwrap();
        let f = &fits[0];
        assert!(f.m_hat > 0.0);
        let spec = lowest_eigenpairs(&h, 1).unwrap();
        let v = spec.eigenvectors.unwrap();
        let at = |x: i64| v[(c.index_of(&Point::new(vec![x])).unwrap(), 0)].abs();
        let oracle = (at(2) / at(6)).ln() / 4.0;
        assert!((f.m_hat - oracle).abs() < 0.1 * oracle, "{} vs {oracle}", f.m_hat);
        assert_eq!(f.localization_center, Point::new(vec![0]));
    }

    #[test]
    fn report_below_spectrum_is_empty() {
        let c = line(5);
        let s = DisorderSample::from_fn(&c.sites(), |_| 0.0);
        let h = assemble_single_particle(&c, &s, LaplacianConvention::Full).unwrap();
        assert!(decay_report(&h, &EnergyInterval::new(-3.0, -1.0), 5, ShellMetric::MaxNorm)
            .unwrap()
            .is_empty());
    }

    #[test]
    fn symmetrized_shells_fold_the_exchange_image() {
        let c = Cube::two_particle(Point::new(vec![0, 0]), 6);
        let a = Point::new(vec![-3, 3]);
        let v: Vec<f64> = c
            .sites()
            .iter()
            .map(|x| (-(x.max_dist(&a).min(x.max_dist(&a.exchanged())) as f64)).exp())
            .collect();
        let f = fit_decay(&c, &v, &CenterMode::Given(a.clone()), ShellMetric::Symmetrized).unwrap();
        assert!((f.m_hat - 1.0).abs() < 1e-12);
        let g = fit_decay(&c, &v, &CenterMode::Given(a), ShellMetric::MaxNorm).unwrap();
        assert!(g.r2 < 1.0);
    }

    #[test]
    fn csv_export() {
        let c = line(10);
        let v: Vec<f64> = c.sites().iter().map(|x| (-0.5 * x.coords()[0].abs() as f64).exp()).collect();
        let mut f = fit_decay(&c, &v, &CenterMode::Argmax, ShellMetric::MaxNorm).unwrap();
        f.eigenvalue = Some(1.0);
        let mut buf = Vec::new();
        write_decay_csv(&mut buf, &[f]).unwrap();
        let s = String::from_utf8(buf).unwrap();
        assert!(s.starts_with("eigenvalue,m_hat,C_hat,r2,center\n"));
        assert_eq!(s.lines().count(), 2);
    }

    proptest! {
        #[test]
        fn sign_flip_and_shell_relabeling_invariance(
            vals in proptest::collection::vec(1e-6f64..1.0, 9),
        ) {
            let c = line(4);
            let mut v = vals.clone();
            v[4] = 2.0;
            let f = fit_decay(&c, &v, &CenterMode::Argmax, ShellMetric::MaxNorm).unwrap();
            let neg: Vec<f64> = v.iter().map(|x| -x).collect();
            let g = fit_decay(&c, &neg, &CenterMode::Argmax, ShellMetric::MaxNorm).unwrap();
            prop_assert_eq!(&f, &g);
            // Mirror x -> -x keeps every shell around 0.
            let mut m = v.clone();
            m.reverse();
            let h = fit_decay(&c, &m, &CenterMode::Argmax, ShellMetric::MaxNorm).unwrap();
            prop_assert!((f.m_hat - h.m_hat).abs() < 1e-12);
            prop_assert!((f.r2 - h.r2).abs() < 1e-12);
            prop_assert!(f.r2 >= 0.0 && f.r2 <= 1.0 && f.m_hat.is_finite());
        }
    }
}
