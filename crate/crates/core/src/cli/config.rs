//! Experiment configuration: a TOML file with dotted sections, defaults for
//! every key, and `key=value` overrides.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::decay::ShellMetric;
use crate::lattice::{Cube, ParticleKind, Point};
use crate::montecarlo::combes_thomas::CtGenerator;
use crate::montecarlo::{Model, ModeRequest, PairKind, RunSpec};
use crate::msa::{EnergyInterval, MsaParameters, MsaSchedule};
use crate::operator::LaplacianConvention;
use crate::randomfield::{DistributionSpec, InteractionSpec};
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModelConfig {
    pub d: usize,
    pub convention: LaplacianConvention,
    pub distribution: DistributionSpec,
    pub interaction: InteractionSpec,
}

impl Default for ModelConfig {
    fn default() -> Self {
        ModelConfig {
            d: 1,
            convention: LaplacianConvention::Full,
            distribution: DistributionSpec::bernoulli(0.5, 0.0, 1.0),
            interaction: InteractionSpec::step(1, 1.0),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MsaConfig {
    pub alpha: f64,
    pub beta: f64,
    pub p: f64,
    pub q: f64,
    pub p_tilde: f64,
    pub gamma: f64,
    #[serde(rename = "J")]
    pub j: u32,
    pub r0: u64,
    #[serde(rename = "L0")]
    pub l0: u64,
    pub m0: f64,
    #[serde(rename = "K")]
    pub k: usize,
    pub e_low: f64,
    pub e_high: f64,
    pub grid_points: usize,
    /// Cap on sub-cube spectra per complete-non-resonance scan.
    pub subcube_budget: usize,
}

impl Default for MsaConfig {
    fn default() -> Self {
        let p = MsaParameters::default();
        MsaConfig {
            alpha: p.alpha,
            beta: p.beta,
            p: p.p,
            q: p.q,
            p_tilde: p.p_tilde,
            gamma: p.gamma,
            j: p.j,
            r0: p.r0,
            l0: 3,
            m0: 0.5,
            k: 3,
            e_low: 0.0,
            e_high: 1.0,
            grid_points: 16,
            subcube_budget: crate::msa::classify::DEFAULT_SUBCUBE_BUDGET,
        }
    }
}

impl MsaConfig {
    pub fn params(&self) -> MsaParameters {
        MsaParameters {
            alpha: self.alpha,
            beta: self.beta,
            p: self.p,
            q: self.q,
            p_tilde: self.p_tilde,
            gamma: self.gamma,
            j: self.j,
            r0: self.r0,
        }
    }

    pub fn interval(&self) -> EnergyInterval {
        EnergyInterval::new(self.e_low, self.e_high).with_grid_points(self.grid_points)
    }

    pub fn schedule(&self) -> Result<MsaSchedule> {
        MsaSchedule::build(self.l0, self.alpha, self.k, self.m0, self.gamma)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub n_samples: u64,
    pub seed: u64,
    /// Worker threads; 0 picks the machine default. Not part of the config hash.
    pub workers: usize,
    pub mode: ModeRequest,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            n_samples: 2000,
            seed: 20240521,
            workers: 0,
            mode: ModeRequest::Auto,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    pub directory: String,
    pub formats: Vec<String>,
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig {
            directory: "anderson2p-out".into(),
            formats: vec!["jsonl".into(), "csv".into()],
        }
    }
}

/// A cube centered at `center` (origin by default).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CubeConfig {
    pub particles: u8,
    pub radius: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub center: Option<Vec<i64>>,
}

impl CubeConfig {
    fn new(particles: u8, radius: usize) -> Self {
        CubeConfig {
            particles,
            radius,
            center: None,
        }
    }

    pub fn cube(&self, d: usize) -> Result<Cube> {
        let kind = match self.particles {
            1 => ParticleKind::One,
            2 => ParticleKind::Two,
            n => return Err(Error::Config(format!("particles = {n} must be 1 or 2"))),
        };
        let dim = d * self.particles as usize;
        let center = match &self.center {
            Some(c) if c.len() != dim => {
                return Err(Error::Config(format!("center has {} coordinates, expected {dim}", c.len())))
            }
            Some(c) => Point::new(c.clone()),
            None => Point::origin(dim),
        };
        Ok(Cube::new(center, self.radius, kind))
    }
}

impl Default for CubeConfig {
    fn default() -> Self {
        CubeConfig::new(2, 3)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SpectrumCommand {
    pub cube: CubeConfig,
    /// Also write the Hamiltonian as `i j value` triplets.
    pub triplets: bool,
}

impl Default for SpectrumCommand {
    fn default() -> Self {
        SpectrumCommand {
            cube: CubeConfig::new(2, 3),
            triplets: true,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GreenCommand {
    pub cube: CubeConfig,
    pub energy: f64,
    /// Source site; the cube center when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub source: Option<Vec<i64>>,
}

impl Default for GreenCommand {
    fn default() -> Self {
        GreenCommand {
            cube: CubeConfig::new(2, 3),
            energy: -0.5,
            source: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ClassifyCommand {
    pub cube: CubeConfig,
    pub energy: f64,
    /// Mass for the singularity test; `msa.m0` when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mass: Option<f64>,
    /// Previous scale for the tunnelling flag.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub prev_length: Option<usize>,
    /// Number of disorder realizations classified.
    pub samples: u64,
}

impl Default for ClassifyCommand {
    fn default() -> Self {
        ClassifyCommand {
            cube: CubeConfig {
                particles: 2,
                radius: 5,
                center: Some(vec![0, 8]),
            },
            energy: 0.5,
            mass: None,
            prev_length: Some(2),
            samples: 8,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct W1Command {
    pub cube: CubeConfig,
    pub energy: f64,
}

impl Default for W1Command {
    fn default() -> Self {
        W1Command {
            cube: CubeConfig::new(2, 2),
            energy: 1.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PairConfig {
    pub kind: PairKind,
    /// Explicit two-particle centers; the canonical pair when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub centers: Option<[Vec<i64>; 2]>,
}

impl Default for PairConfig {
    fn default() -> Self {
        PairConfig {
            kind: PairKind::Interactive,
            centers: None,
        }
    }
}

impl PairConfig {
    pub fn points(&self) -> Option<(Point, Point)> {
        self.centers
            .as_ref()
            .map(|[a, b]| (Point::new(a.clone()), Point::new(b.clone())))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct W2Command {
    pub radius: usize,
    pub pair: PairConfig,
    /// Restrict the energy to `[msa.e_low, msa.e_high]`; all of ℝ otherwise.
    pub restrict_to_interval: bool,
}

impl Default for W2Command {
    fn default() -> Self {
        W2Command {
            radius: 2,
            pair: PairConfig::default(),
            restrict_to_interval: true,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct S0Command {
    pub particles: u8,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub center: Option<Vec<i64>>,
}

impl Default for S0Command {
    fn default() -> Self {
        S0Command {
            particles: 2,
            center: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DskCommand {
    pub k: usize,
    pub pair: PairConfig,
}

impl Default for DskCommand {
    fn default() -> Self {
        DskCommand {
            k: 0,
            pair: PairConfig::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LifshitzCommand {
    pub particles: u8,
    pub lengths: Vec<usize>,
    #[serde(rename = "C")]
    pub c: f64,
}

impl Default for LifshitzCommand {
    fn default() -> Self {
        LifshitzCommand {
            particles: 1,
            lengths: vec![10, 20, 40],
            c: 1.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CtCommand {
    pub n_instances: u64,
    pub generator: CtGenerator,
}

impl Default for CtCommand {
    fn default() -> Self {
        CtCommand {
            n_instances: 200,
            generator: CtGenerator::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DecayCommand {
    pub cube: CubeConfig,
    pub distribution: DistributionSpec,
    /// Disorder amplitudes compared; each gets `samples` realizations
    /// (one when the amplitude is zero).
    pub amplitudes: Vec<f64>,
    pub samples: u64,
    pub max_states: usize,
    pub metric: ShellMetric,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub e_low: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub e_high: Option<f64>,
}

impl Default for DecayCommand {
    fn default() -> Self {
        DecayCommand {
            cube: CubeConfig::new(2, 20),
            distribution: DistributionSpec::uniform(0.0, 1.0),
            amplitudes: vec![4.0, 0.0],
            samples: 20,
            max_states: 10,
            metric: ShellMetric::MaxNorm,
            e_low: None,
            e_high: None,
        }
    }
}

impl DecayCommand {
    pub fn interval(&self) -> EnergyInterval {
        EnergyInterval::new(
            self.e_low.unwrap_or(f64::NEG_INFINITY),
            self.e_high.unwrap_or(f64::INFINITY),
        )
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub model: ModelConfig,
    pub msa: MsaConfig,
    pub run: RunConfig,
    pub output: OutputConfig,
    pub spectrum: SpectrumCommand,
    pub green: GreenCommand,
    pub classify: ClassifyCommand,
    pub w1: W1Command,
    pub w2: W2Command,
    pub s0: S0Command,
    pub dsk: DskCommand,
    pub lifshitz: LifshitzCommand,
    pub ct: CtCommand,
    pub decay: DecayCommand,
}

/// Sets `path = value` inside a TOML table, creating sections as needed.
/// `raw` is parsed as a TOML value, falling back to a bare string.
pub fn apply_override(table: &mut toml::Table, assignment: &str) -> Result<()> {
    let (path, raw) = assignment
        .split_once('=')
        .ok_or_else(|| Error::Config(format!("override `{assignment}` is not key=value")))?;
    let path = path.trim();
    let raw = raw.trim();
    let value = match format!("v = {raw}").parse::<toml::Table>() {
        Ok(mut t) => t.remove("v").expect("parsed key"),
        Err(_) => toml::Value::String(raw.to_string()),
    };
    let keys: Vec<&str> = path.split('.').collect();
    if keys.iter().any(|k| k.is_empty()) {
        return Err(Error::Config(format!("bad override key `{path}`")));
    }
    let mut cur = table;
    for k in &keys[..keys.len() - 1] {
        let entry = cur
            .entry(k.to_string())
            .or_insert_with(|| toml::Value::Table(toml::Table::new()));
        cur = entry
            .as_table_mut()
            .ok_or_else(|| Error::Config(format!("`{k}` in `{path}` is not a section")))?;
    }
    cur.insert(keys[keys.len() - 1].to_string(), value);
    Ok(())
}

impl ExperimentConfig {
    /// Parses `text` (possibly empty), applies overrides, then validates.
    pub fn from_toml_with_overrides(text: &str, overrides: &[String]) -> Result<Self> {
        let mut table: toml::Table = text.parse().map_err(|e| Error::Config(format!("{e}")))?;
        for o in overrides {
            apply_override(&mut table, o)?;
        }
        let cfg: ExperimentConfig = table.try_into().map_err(|e| Error::Config(format!("{e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if self.model.d == 0 {
            return bad("model.d must be positive".into());
        }
        self.model
            .distribution
            .validate()
            .map_err(|e| Error::Config(format!("model.distribution: {e}")))?;
        self.model
            .interaction
            .validate()
            .map_err(|e| Error::Config(format!("model.interaction: {e}")))?;
        self.msa
            .params()
            .validate(self.model.d)
            .map_err(|e| Error::Config(format!("msa: {e}")))?;
        if self.msa.l0 <= 2 {
            return bad(format!("msa.L0 = {} must exceed 2", self.msa.l0));
        }
        if !(self.msa.m0 > 0.0) {
            return bad(format!("msa.m0 = {} must be positive", self.msa.m0));
        }
        self.msa
            .interval()
            .validate()
            .map_err(|e| Error::Config(format!("msa: {e}")))?;
        if self.run.n_samples < 1 {
            return bad("run.n_samples must be at least 1".into());
        }
        for f in &self.output.formats {
            if f != "jsonl" && f != "csv" {
                return bad(format!("output.formats: unknown format `{f}`"));
            }
        }
        self.decay
            .distribution
            .validate()
            .map_err(|e| Error::Config(format!("decay.distribution: {e}")))?;
        Ok(())
    }

    pub fn model(&self) -> Model {
        Model {
            d: self.model.d,
            distribution: self.model.distribution.clone(),
            interaction: self.model.interaction.clone(),
            convention: self.model.convention,
        }
    }

    pub fn run_spec(&self) -> RunSpec {
        RunSpec {
            n_samples: self.run.n_samples,
            seed: self.run.seed,
            mode: self.run.mode,
        }
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// SHA-256 of the resolved config with `run.workers` and
    /// `output.directory` blanked: neither affects results.
    pub fn hash(&self) -> String {
        let mut c = self.clone();
        c.run.workers = 0;
        c.output.directory.clear();
        hex::encode(Sha256::digest(c.to_toml().as_bytes()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_round_trip() {
        let cfg = ExperimentConfig::from_toml_with_overrides("", &[]).unwrap();
        assert_eq!(cfg, ExperimentConfig::default());
        let back = ExperimentConfig::from_toml_with_overrides(&cfg.to_toml(), &[]).unwrap();
        assert_eq!(back, cfg);
    }

    #[test]
    fn overrides_and_validation() {
        let cfg = ExperimentConfig::from_toml_with_overrides(
            "[msa]\nL0 = 10\n",
            &["msa.K=2".into(), "run.mode=exhaustive".into(), "model.distribution.kind=uniform".into()],
        );
        // Switching the kind leaves Bernoulli fields behind.
        assert!(cfg.is_err());
        let cfg = ExperimentConfig::from_toml_with_overrides(
            "[msa]\nL0 = 10\n",
            &["msa.K=2".into(), "run.mode=exhaustive".into(), "decay.cube.center=[1, 2]".into()],
        )
        .unwrap();
        assert_eq!((cfg.msa.l0, cfg.msa.k, cfg.run.mode), (10, 2, ModeRequest::Exhaustive));
        assert_eq!(cfg.decay.cube.center, Some(vec![1, 2]));

        let err = ExperimentConfig::from_toml_with_overrides("", &["msa.p=5".into()]).unwrap_err();
        assert!(err.to_string().contains("12d"), "{err}");
        let err = ExperimentConfig::from_toml_with_overrides("", &["msa.L0=2".into()]).unwrap_err();
        assert!(err.to_string().contains("L0"), "{err}");
        assert!(ExperimentConfig::from_toml_with_overrides("", &["msa.nope=1".into()]).is_err());
        assert!(ExperimentConfig::from_toml_with_overrides("", &["novalue".into()]).is_err());
    }

    #[test]
    fn hash_ignores_workers_and_directory() {
        let a = ExperimentConfig::default();
        let mut b = a.clone();
        b.run.workers = 4;
        b.output.directory = "elsewhere".into();
        assert_eq!(a.hash(), b.hash());
        b.run.seed += 1;
        assert_ne!(a.hash(), b.hash());
    }
}
