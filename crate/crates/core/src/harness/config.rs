//! JSON experiment configuration: schema structs and their translation into
//! validated domain objects.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::inner::{InnerConfig, InnerMethod};
use crate::operators::{
    block_rotation, random_linear_contraction, random_psd, GrowthFn, NonexpansiveMap,
    OperatorSpec, ScalarMonotone,
};
use crate::problem::{AffineSolutionSet, SystemProblem};
use crate::schedules::{preset, LevelSequence, Schedule};
use crate::space::{SpaceSpec, Vector};

use super::HarnessError;

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub space: SpaceConfig,
    pub equations: Vec<OperatorConfig>,
    /// Wraps every equation as A_i(x) - A_i(xhat) so the vector is an exact
    /// solution; sets it as the known solution.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub consistent_with: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub known_solution: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub solution_set: Option<SolutionSetConfig>,
    pub method: MethodConfig,
    pub schedules: SchedulesConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub noise: Option<NoiseConfig>,
    pub run: RunSection,
    #[serde(default)]
    pub output: OutputSection,
    #[serde(default)]
    pub strict: bool,
    #[serde(default)]
    pub validation: ValidationSection,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct SpaceConfig {
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    pub dim: usize,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum OperatorConfig {
    PsdLinear {
        matrix: Vec<Vec<f64>>,
    },
    ResidualOfNonexpansive {
        map: MapConfig,
    },
    DiagonalMonotone {
        functions: Vec<ScalarFnConfig>,
        box_radius: f64,
    },
    AffineResidual {
        base: Box<OperatorConfig>,
        data: Vec<f64>,
    },
    /// Seeded rank-deficient PSD matrix (catalog generator).
    RandomPsd {
        rank: usize,
        eigen_min: f64,
        eigen_max: f64,
        seed: u64,
    },
    /// Seeded I - T with T a linear contraction (catalog generator).
    RandomContractionResidual {
        norm_bound: f64,
        seed: u64,
    },
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum MapConfig {
    Zero,
    Identity,
    Linear { matrix: Vec<Vec<f64>> },
    ProjectBox { lower: Vec<f64>, upper: Vec<f64> },
    ProjectBall { center: Vec<f64>, radius: f64 },
    BlockRotation { angle: f64 },
    Compose { outer: Box<MapConfig>, inner: Box<MapConfig> },
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ScalarFnConfig {
    Linear { slope: f64 },
    Cubic { scale: f64 },
    LinearTanh { slope: f64, tanh_scale: f64 },
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct SolutionSetConfig {
    pub anchor: Vec<f64>,
    pub directions: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum MethodConfig {
    Implicit {
        #[serde(default)]
        inner: InnerSection,
    },
    Explicit {},
    Newton {
        anchors: AnchorsConfig,
        #[serde(default = "default_eta")]
        eta: f64,
        #[serde(default)]
        inner: InnerSection,
    },
}

fn default_eta() -> f64 {
    1.0
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum AnchorsConfig {
    /// Anchors at the known solution (v = 0).
    AtSolution,
    /// Seeded source-condition anchors x_i^0 = xhat + A_i'(xhat) v_i with
    /// ||v_i|| = v_scale.
    SourceCondition { v_scale: f64, seed: u64 },
    Explicit { vectors: Vec<Vec<f64>> },
}

#[derive(Debug, Clone, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct InnerSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_iter: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub method: Option<String>,
}

impl InnerSection {
    pub fn build(&self) -> Result<InnerConfig, HarnessError> {
        let mut cfg = InnerConfig::default();
        if let Some(t) = self.tol {
            if t <= 0.0 {
                return Err(HarnessError::Schema("inner.tol must be positive".into()));
            }
            cfg.tol = t;
        }
        if let Some(m) = self.max_iter {
            if m == 0 {
                return Err(HarnessError::Schema("inner.max_iter must be at least 1".into()));
            }
            cfg.max_iter = m;
        }
        if let Some(name) = &self.method {
            cfg.method = match name.as_str() {
                "auto" => InnerMethod::Auto,
                "contraction" => InnerMethod::ContractionFixedPoint,
                "damped_newton" => InnerMethod::DampedNewton,
                "direct" => InnerMethod::DirectLinear,
                other => {
                    return Err(HarnessError::Schema(format!(
                        "unknown inner.method {other:?}; expected auto | contraction | damped_newton | direct"
                    )))
                }
            };
        }
        Ok(cfg)
    }
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct SchedulesConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub preset: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<ScheduleConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<ScheduleConfig>,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum ScheduleConfig {
    Power { coefficient: f64, exponent: f64 },
    Table { values: Vec<f64> },
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseConfig {
    pub h: LevelConfig,
    pub delta: LevelConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub growth: Option<GrowthConfig>,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LevelConfig {
    Constant { value: f64 },
    PowerDecay { coefficient: f64, exponent: f64 },
    Table { values: Vec<f64> },
}

impl LevelConfig {
    pub fn build(&self) -> Result<LevelSequence, HarnessError> {
        let check = |v: f64, what: &str| {
            if v.is_finite() && v >= 0.0 {
                Ok(v)
            } else {
                Err(HarnessError::Schema(format!(
                    "noise {what} must be finite and nonnegative, got {v}"
                )))
            }
        };
        Ok(match self {
            LevelConfig::Constant { value } => LevelSequence::Constant(check(*value, "level")?),
            LevelConfig::PowerDecay {
                coefficient,
                exponent,
            } => LevelSequence::PowerDecay {
                coefficient: check(*coefficient, "coefficient")?,
                exponent: check(*exponent, "exponent")?,
            },
            LevelConfig::Table { values } => {
                for v in values {
                    check(*v, "table entry")?;
                }
                LevelSequence::Table(values.clone())
            }
        })
    }
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct GrowthConfig {
    pub offset: f64,
    pub slope: f64,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct RunSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_iters: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_cap: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x0: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dir: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub formats: Option<Vec<String>>,
}

#[derive(Debug, Clone, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct ValidationSection {
    /// Ball radius R for the implicit validator (default 2 max(1, ||xhat||)).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r: Option<f64>,
    /// Bound d for the explicit validator (default 0.5).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d: Option<f64>,
    /// Trace horizon (default 100000).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_max: Option<usize>,
}

fn to_vector(v: &[f64], what: &str) -> Result<Vector, HarnessError> {
    for (i, x) in v.iter().enumerate() {
        if !x.is_finite() {
            return Err(HarnessError::Schema(format!(
                "{what}: entry {i} is not finite"
            )));
        }
    }
    Ok(Vector::from_vec(v.to_vec()))
}

fn to_matrix(rows: &[Vec<f64>], what: &str) -> Result<DMatrix<f64>, HarnessError> {
    let n = rows.len();
    if n == 0 || rows.iter().any(|r| r.len() != n) {
        return Err(HarnessError::Schema(format!("{what}: matrix must be square")));
    }
    Ok(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
}

impl SpaceConfig {
    pub fn build(&self) -> Result<SpaceSpec, HarnessError> {
        match self.kind.as_str() {
            "hilbert" => SpaceSpec::hilbert(self.dim).map_err(|e| HarnessError::Schema(e.to_string())),
            "lp" => {
                let p = self.p.ok_or_else(|| {
                    HarnessError::Schema("space.p is required when kind = \"lp\"".into())
                })?;
                SpaceSpec::lp(p, self.dim).map_err(|e| HarnessError::Schema(e.to_string()))
            }
            other => Err(HarnessError::Schema(format!(
                "unknown space.kind {other:?}; expected \"hilbert\" or \"lp\""
            ))),
        }
    }
}

impl MapConfig {
    fn build(&self, dim: usize) -> Result<NonexpansiveMap, HarnessError> {
        Ok(match self {
            MapConfig::Zero => NonexpansiveMap::zero(dim),
            MapConfig::Identity => NonexpansiveMap::identity(dim),
            MapConfig::Linear { matrix } => NonexpansiveMap::Linear {
                matrix: to_matrix(matrix, "map.linear")?,
            },
            MapConfig::ProjectBox { lower, upper } => NonexpansiveMap::ProjectBox {
                lower: to_vector(lower, "map.project_box.lower")?,
                upper: to_vector(upper, "map.project_box.upper")?,
            },
            MapConfig::ProjectBall { center, radius } => NonexpansiveMap::ProjectBall {
                center: to_vector(center, "map.project_ball.center")?,
                radius: *radius,
            },
            MapConfig::BlockRotation { angle } => NonexpansiveMap::Linear {
                matrix: block_rotation(dim, *angle),
            },
            MapConfig::Compose { outer, inner } => NonexpansiveMap::Compose {
                outer: Box::new(outer.build(dim)?),
                inner: Box::new(inner.build(dim)?),
            },
        })
    }
}

impl ScalarFnConfig {
    fn build(&self) -> ScalarMonotone {
        match self {
            ScalarFnConfig::Linear { slope } => ScalarMonotone::Linear { slope: *slope },
            ScalarFnConfig::Cubic { scale } => ScalarMonotone::Cubic { scale: *scale },
            ScalarFnConfig::LinearTanh { slope, tanh_scale } => ScalarMonotone::LinearTanh {
                slope: *slope,
                tanh_scale: *tanh_scale,
            },
        }
    }
}

impl OperatorConfig {
    pub fn build(&self, space: &SpaceSpec, index: usize) -> Result<OperatorSpec, HarnessError> {
        let wrap = |e: crate::operators::OperatorError| {
            HarnessError::Schema(format!("equation {index}: {e}"))
        };
        Ok(match self {
            OperatorConfig::PsdLinear { matrix } => {
                OperatorSpec::psd_linear(to_matrix(matrix, "psd_linear.matrix")?).map_err(wrap)?
            }
            OperatorConfig::ResidualOfNonexpansive { map } => {
                OperatorSpec::residual_of_nonexpansive(map.build(space.dim())?, space, 0x5eed)
                    .map_err(wrap)?
            }
            OperatorConfig::DiagonalMonotone {
                functions,
                box_radius,
            } => {
                if functions.len() != space.dim() {
                    return Err(HarnessError::Schema(format!(
                        "equation {index}: diagonal_monotone needs {} functions, got {}",
                        space.dim(),
                        functions.len()
                    )));
                }
                OperatorSpec::diagonal_monotone(
                    functions.iter().map(|f| f.build()).collect(),
                    *box_radius,
                )
                .map_err(wrap)?
            }
            OperatorConfig::AffineResidual { base, data } => {
                let base = base.build(space, index)?;
                OperatorSpec::affine_residual(base, to_vector(data, "affine_residual.data")?)
                    .map_err(wrap)?
            }
            OperatorConfig::RandomPsd {
                rank,
                eigen_min,
                eigen_max,
                seed,
            } => OperatorSpec::psd_linear(random_psd(
                space.dim(),
                *rank,
                *eigen_min,
                *eigen_max,
                *seed,
            ))
            .map_err(wrap)?,
            OperatorConfig::RandomContractionResidual { norm_bound, seed } => {
                OperatorSpec::residual_of_nonexpansive(
                    random_linear_contraction(space.dim(), *norm_bound, *seed, space),
                    space,
                    *seed,
                )
                .map_err(wrap)?
            }
        })
    }
}

impl ExperimentConfig {
    /// Builds the problem: space, validated equations, optional consistency
    /// wrap, known solution, declared solution set.
    pub fn build_problem(&self) -> Result<SystemProblem, HarnessError> {
        let space = self.space.build()?;
        if self.equations.is_empty() {
            return Err(HarnessError::Schema("equations must not be empty".into()));
        }
        if self.consistent_with.is_some() && self.known_solution.is_some() {
            return Err(HarnessError::Schema(
                "give either consistent_with or known_solution, not both".into(),
            ));
        }
        let mut equations = Vec::with_capacity(self.equations.len());
        for (i, cfg) in self.equations.iter().enumerate() {
            equations.push(cfg.build(&space, i)?);
        }
        let known = if let Some(xw) = &self.consistent_with {
            let xhat = to_vector(xw, "consistent_with")?;
            if xhat.len() != space.dim() {
                return Err(HarnessError::Schema(
                    "consistent_with has the wrong dimension".into(),
                ));
            }
            equations = equations
                .into_iter()
                .map(|eq| {
                    let data = eq.apply(&xhat);
                    OperatorSpec::affine_residual(eq, data)
                        .map_err(|e| HarnessError::Schema(e.to_string()))
                })
                .collect::<Result<_, _>>()?;
            Some(xhat)
        } else if let Some(ks) = &self.known_solution {
            Some(to_vector(ks, "known_solution")?)
        } else {
            None
        };
        let solution_set = self
            .solution_set
            .as_ref()
            .map(|s| -> Result<AffineSolutionSet, HarnessError> {
                Ok(AffineSolutionSet {
                    anchor: to_vector(&s.anchor, "solution_set.anchor")?,
                    directions: s
                        .directions
                        .iter()
                        .map(|d| to_vector(d, "solution_set.directions"))
                        .collect::<Result<_, _>>()?,
                })
            })
            .transpose()?;
        SystemProblem::new(space, equations, known, solution_set)
            .map_err(|e| HarnessError::Schema(e.to_string()))
    }

    /// Builds (alpha, gamma). Gamma falls back to the preset's (n+1)^(1/2)
    /// when only alpha is given for a method that needs gamma.
    pub fn build_schedules(&self) -> Result<(Schedule, Schedule), HarnessError> {
        let sched = &self.schedules;
        if let Some(name) = &sched.preset {
            if sched.alpha.is_some() || sched.gamma.is_some() {
                return Err(HarnessError::Schema(
                    "give either a preset or explicit alpha/gamma schedules, not both".into(),
                ));
            }
            return preset(name, sched.k).map_err(HarnessError::from);
        }
        let alpha = match &sched.alpha {
            Some(ScheduleConfig::Power {
                coefficient,
                exponent,
            }) => Schedule::power_alpha(*coefficient, *exponent)?,
            Some(ScheduleConfig::Table { values }) => Schedule::table_alpha(values.clone())?,
            None => {
                return Err(HarnessError::Schema(
                    "schedules: either preset or alpha is required".into(),
                ))
            }
        };
        let gamma = match &sched.gamma {
            Some(ScheduleConfig::Power {
                coefficient,
                exponent,
            }) => Schedule::power_gamma(*coefficient, *exponent)?,
            Some(ScheduleConfig::Table { values }) => Schedule::table_gamma(values.clone())?,
            None => Schedule::power_gamma(1.0, 0.5)?,
        };
        Ok((alpha, gamma))
    }

    pub fn build_growth(&self) -> Result<GrowthFn, HarnessError> {
        match self.noise.as_ref().and_then(|n| n.growth.as_ref()) {
            Some(g) => {
                if g.offset < 0.0 || g.slope < 0.0 {
                    return Err(HarnessError::Schema(
                        "noise.growth must have nonnegative offset and slope".into(),
                    ));
                }
                Ok(GrowthFn::Affine {
                    offset: g.offset,
                    slope: g.slope,
                })
            }
            None => Ok(GrowthFn::default()),
        }
    }

    /// Referential completeness and the seed rule: a base seed is mandatory
    /// whenever noise is present.
    pub fn check_seed_rule(&self) -> Result<(), HarnessError> {
        if self.noise.is_some() && self.run.seed.is_none() {
            return Err(HarnessError::Schema(
                "run.seed is required when noise is present".into(),
            ));
        }
        Ok(())
    }
}
