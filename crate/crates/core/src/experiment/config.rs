use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::bialgebra::{build_function_algebra, build_group_algebra, CounitalBialgebra};
use crate::error::{Error, Result};
use crate::fock::{check_alignment, GridSpec, StepFunction};
use crate::group::FiniteGroup;
use crate::io::{self, JsonMatrix, JsonVector};
use crate::linalg::CMatrix;
use crate::qsmaps::{Character, ImplementingTriple};
use crate::tolerance::{self, Tolerances};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GroupSource {
    Cyclic(usize),
    Symmetric(usize),
    File(PathBuf),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BialgebraSource {
    /// C(G): functions on a group.
    FunctionAlgebra(GroupSource),
    /// ℂ[G]: the group algebra.
    GroupAlgebra(GroupSource),
    /// A bialgebra file; axioms are checked by `verify`, not at load time.
    File(PathBuf),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RepSource {
    /// "faithful": the stored faithful representation.
    Named(String),
    /// The one-dimensional representation given by a stored character.
    Character {
        character: usize,
    },
    Matrices(Vec<JsonMatrix>),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TripleConfig {
    pub pi: RepSource,
    pub xi: JsonVector,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub isometry: Option<JsonMatrix>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CharacterChoice {
    /// "counit"
    Named(String),
    Stored {
        stored: usize,
    },
}

impl Default for CharacterChoice {
    fn default() -> Self {
        CharacterChoice::Named("counit".into())
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepConfig {
    pub h0: f64,
    pub ratio: f64,
    pub count: usize,
}

impl SweepConfig {
    pub fn values(&self) -> Vec<f64> {
        (0..self.count)
            .map(|k| self.h0 * self.ratio.powi(k as i32))
            .collect()
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StepPairConfig {
    pub f: Vec<Vec<serde_json::Value>>,
    pub g: Vec<Vec<serde_json::Value>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Probes {
    /// "all"
    Named(String),
    Indices(Vec<usize>),
}

impl Default for Probes {
    fn default() -> Self {
        Probes::Named("all".into())
    }
}

fn default_compat() -> usize {
    3
}

fn default_cap() -> usize {
    tolerance::DIMENSION_CAP
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub name: String,
    pub bialgebra: BialgebraSource,
    pub triple: TripleConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub noise_dim: Option<usize>,
    #[serde(default)]
    pub character: CharacterChoice,
    pub horizon: f64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub sample_times: Vec<f64>,
    pub sweep: SweepConfig,
    pub step_functions: Vec<StepPairConfig>,
    #[serde(default)]
    pub probes: Probes,
    #[serde(default)]
    pub tolerances: Tolerances,
    /// Absolute bound on the final max error of a sweep.
    pub error_bound: f64,
    #[serde(default = "default_compat")]
    pub compatibility_n: usize,
    #[serde(default = "default_cap")]
    pub dimension_cap: usize,
}

impl ExperimentConfig {
    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serialisable")
    }
}

/// A config turned into model objects. The bialgebra is only shape-checked.
#[derive(Debug, Clone)]
pub struct Experiment {
    pub name: String,
    pub b: CounitalBialgebra,
    pub triple: ImplementingTriple,
    pub chi: Character,
    pub horizon: f64,
    pub times: Vec<f64>,
    pub hs: Vec<f64>,
    pub pairs: Vec<(StepFunction, StepFunction)>,
    pub probes: Vec<usize>,
    pub tol: Tolerances,
    pub error_bound: f64,
    pub compatibility_n: usize,
    pub dimension_cap: usize,
}

fn resolve(base: &Path, p: &Path) -> PathBuf {
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        base.join(p)
    }
}

fn group(src: &GroupSource, base: &Path) -> Result<FiniteGroup> {
    match src {
        GroupSource::Cyclic(n) => FiniteGroup::cyclic(*n),
        GroupSource::Symmetric(k) => FiniteGroup::symmetric(*k),
        GroupSource::File(p) => io::load_group(&resolve(base, p)),
    }
}

fn config_err(e: Error) -> Error {
    match e {
        Error::Config(_) => e,
        other => Error::Config(other.to_string()),
    }
}

impl Experiment {
    /// Relative file paths are taken relative to `base`.
    pub fn from_config(cfg: &ExperimentConfig, base: &Path) -> Result<Self> {
        Self::build(cfg, base).map_err(config_err)
    }

    fn build(cfg: &ExperimentConfig, base: &Path) -> Result<Self> {
        let b = match &cfg.bialgebra {
            BialgebraSource::FunctionAlgebra(g) => build_function_algebra(&group(g, base)?),
            BialgebraSource::GroupAlgebra(g) => build_group_algebra(&group(g, base)?),
            BialgebraSource::File(p) => {
                io::parse_bialgebra(&std::fs::read_to_string(resolve(base, p))?)?
            }
        };
        let pi = match &cfg.triple.pi {
            RepSource::Named(s) if s == "faithful" => b.faithful_rep().to_vec(),
            RepSource::Named(s) => {
                return Err(Error::Config(format!("unknown representation {s:?}")))
            }
            RepSource::Character { character } => {
                let chi = Character::stored(&b, *character)?;
                chi.values()
                    .iter()
                    .map(|&z| CMatrix::from_element(1, 1, z))
                    .collect()
            }
            RepSource::Matrices(ms) => ms
                .iter()
                .map(|m| io::matrix_from_json(m))
                .collect::<Result<_>>()?,
        };
        let xi = io::vector_from_json(&cfg.triple.xi)?;
        let triple = match &cfg.triple.isometry {
            None => ImplementingTriple::pair(pi, xi),
            Some(d) => ImplementingTriple::with_isometry(pi, xi, io::matrix_from_json(d)?),
        };
        if triple.pi.len() != b.dim() {
            return Err(Error::Config(format!(
                "representation has {} matrices, bialgebra dimension is {}",
                triple.pi.len(),
                b.dim()
            )));
        }
        let d = triple.noise_dim();
        if let Some(nd) = cfg.noise_dim {
            if nd != d {
                return Err(Error::Config(format!(
                    "noise_dim {nd} does not match the triple (d = {d})"
                )));
            }
        }
        let chi = match &cfg.character {
            CharacterChoice::Named(s) if s == "counit" => Character::counit(&b),
            CharacterChoice::Named(s) => {
                return Err(Error::Config(format!("unknown character {s:?}")))
            }
            CharacterChoice::Stored { stored } => Character::stored(&b, *stored)?,
        };

        if !(cfg.horizon > 0.0) {
            return Err(Error::Config("horizon must be positive".into()));
        }
        let times = if cfg.sample_times.is_empty() {
            vec![cfg.horizon]
        } else {
            cfg.sample_times.clone()
        };
        if let Some(t) = times.iter().find(|&&t| !(0.0..=cfg.horizon).contains(&t)) {
            return Err(Error::Config(format!(
                "sample time {t} outside [0, {}]",
                cfg.horizon
            )));
        }

        let sw = &cfg.sweep;
        if sw.count == 0 || !(sw.h0 > 0.0) || !(sw.ratio > 0.0 && sw.ratio < 1.0) {
            return Err(Error::Config(
                "sweep needs h0 > 0, 0 < ratio < 1 and count ≥ 1".into(),
            ));
        }
        let hs = sw.values();
        let value = hs[0] * triple.xi_norm_sq();
        if value > 1.0 {
            return Err(Error::Config(format!(
                "h0‖ξ‖² = {value} exceeds 1; the walk unitary U_ξ^(h) exists only for h‖ξ‖² ≤ 1"
            )));
        }

        let mut pairs = Vec::with_capacity(cfg.step_functions.len());
        for p in &cfg.step_functions {
            let f = io::step_function_from_json(&p.f)?;
            let g = io::step_function_from_json(&p.g)?;
            for s in [&f, &g] {
                if s.noise_dim() != d {
                    return Err(Error::Config(format!(
                        "step function in noise dimension {}, triple has d = {d}",
                        s.noise_dim()
                    )));
                }
                if s.total_time() < cfg.horizon * (1.0 - tolerance::GRID_ALIGNMENT) {
                    return Err(Error::Config(format!(
                        "step function covers [0, {}), horizon is {}",
                        s.total_time(),
                        cfg.horizon
                    )));
                }
                for &h in &hs {
                    check_alignment(s, &GridSpec::from_time(cfg.horizon, h)?)?;
                }
            }
            pairs.push((f, g));
        }

        let probes = match &cfg.probes {
            Probes::Named(s) if s == "all" => (0..b.dim()).collect(),
            Probes::Named(s) => return Err(Error::Config(format!("unknown probe set {s:?}"))),
            Probes::Indices(v) => {
                if let Some(&i) = v.iter().find(|&&i| i >= b.dim()) {
                    return Err(Error::IndexOutOfRange {
                        index: i,
                        limit: b.dim(),
                    });
                }
                v.clone()
            }
        };

        let lifted = (d + 1).checked_pow(cfg.compatibility_n as u32);
        if lifted.is_none_or(|x| x > cfg.dimension_cap) {
            return Err(Error::DimensionCap {
                dim: lifted.unwrap_or(usize::MAX),
                cap: cfg.dimension_cap,
            });
        }

        Ok(Self {
            name: cfg.name.clone(),
            b,
            triple,
            chi,
            horizon: cfg.horizon,
            times,
            hs,
            pairs,
            probes,
            tol: cfg.tolerances,
            error_bound: cfg.error_bound,
            compatibility_n: cfg.compatibility_n,
            dimension_cap: cfg.dimension_cap,
        })
    }
}
