//! JSON run configuration and its validation into library types.

use std::path::Path;

use serde::Deserialize;
use symtop::algebra3::reorthonormalize;
use symtop::dynamics::Method;
use symtop::phase::{random_state, PhaseState, SpaceId};
use symtop::{BodyParams, FullState, Mat3, Potential, ReducedState, Rotation, SimOptions, Vec3};

use crate::CliError;

/// Largest orthogonality defect accepted for a rotation read from a config.
pub const ROTATION_INPUT_TOL: f64 = 1e-6;
/// Largest `| |ν| − 1 |` accepted for a direction read from a config.
pub const NU_INPUT_TOL: f64 = 1e-6;

#[derive(Clone, Copy, Debug, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum SpaceChoice {
    Full,
    Reduced,
}

#[derive(Clone, Copy, Debug, Default, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum MethodChoice {
    Rk4,
    #[default]
    Rk4Repair,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BodyConfig {
    #[serde(rename = "M")]
    pub mass: f64,
    #[serde(rename = "I1")]
    pub i1: f64,
    #[serde(rename = "I3")]
    pub i3: f64,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum PotentialConfig {
    #[default]
    Zero,
    LinearGravity {
        g: [f64; 3],
        chi: f64,
    },
    Dipole {
        moment: f64,
        source: [f64; 3],
    },
    Sum {
        terms: Vec<PotentialConfig>,
    },
}

#[derive(Clone, Debug, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum RotationConfig {
    /// Row-major entries.
    Matrix([f64; 9]),
    AxisAngle {
        axis: [f64; 3],
        angle: f64,
    },
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialConfig {
    #[serde(default)]
    pub x: [f64; 3],
    #[serde(default)]
    pub p: [f64; 3],
    #[serde(default)]
    pub pi: [f64; 3],
    pub rotation: Option<RotationConfig>,
    pub nu: Option<[f64; 3]>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub space: SpaceChoice,
    pub body: BodyConfig,
    #[serde(default)]
    pub potential: PotentialConfig,
    /// Omitted: a pseudo-random state drawn from `seed`.
    pub initial: Option<InitialConfig>,
    pub dt: f64,
    #[serde(rename = "T")]
    pub duration: f64,
    #[serde(default)]
    pub method: MethodChoice,
    #[serde(default = "default_stride")]
    pub sample_stride: usize,
    #[serde(default)]
    pub seed: u64,
    /// Step of the reduced run in `compare`; must equal `dt` when given.
    pub reduced_dt: Option<f64>,
}

fn default_stride() -> usize {
    1
}

/// A validated configuration.
#[derive(Clone, Debug)]
pub struct Run {
    pub space: SpaceId,
    pub body: BodyParams,
    pub potential: Potential,
    pub z0: Vec<f64>,
    pub opts: SimOptions,
}

impl Run {
    /// The initial state as a full state; only valid for full runs.
    pub fn full_state(&self) -> Result<FullState, CliError> {
        if self.space != SpaceId::CotSE3 {
            return Err(CliError::Validation(
                "this command needs space = \"full\"".into(),
            ));
        }
        Ok(FullState::unflatten(&self.z0)?)
    }
}

pub fn load(path: &Path) -> Result<Run, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    parse(&text)
}

pub fn parse(text: &str) -> Result<Run, CliError> {
    let cfg: RunConfig =
        serde_json::from_str(text).map_err(|e| CliError::Validation(format!("config: {e}")))?;
    cfg.validate()
}

fn invalid(msg: impl Into<String>) -> CliError {
    CliError::Validation(msg.into())
}

fn finite3(name: &str, v: [f64; 3]) -> Result<Vec3, CliError> {
    if v.iter().all(|c| c.is_finite()) {
        Ok(Vec3::new(v[0], v[1], v[2]))
    } else {
        Err(invalid(format!("{name} has non-finite components")))
    }
}

fn finite(name: &str, v: f64) -> Result<f64, CliError> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(invalid(format!("{name} is not finite")))
    }
}

impl PotentialConfig {
    pub fn build(&self) -> Result<Potential, CliError> {
        Ok(match self {
            PotentialConfig::Zero => Potential::Zero,
            PotentialConfig::LinearGravity { g, chi } => Potential::LinearGravity {
                g: finite3("potential.g", *g)?,
                chi: finite("potential.chi", *chi)?,
            },
            PotentialConfig::Dipole { moment, source } => Potential::Dipole {
                moment: finite("potential.moment", *moment)?,
                source: finite3("potential.source", *source)?,
            },
            PotentialConfig::Sum { terms } => Potential::Sum(
                terms
                    .iter()
                    .map(PotentialConfig::build)
                    .collect::<Result<_, _>>()?,
            ),
        })
    }
}

impl RotationConfig {
    /// Reorthonormalized rotation; rejects inputs further than
    /// [`ROTATION_INPUT_TOL`] from `SO(3)`.
    pub fn build(&self) -> Result<Rotation, CliError> {
        match self {
            RotationConfig::Matrix(e) => {
                if !e.iter().all(|c| c.is_finite()) {
                    return Err(invalid("rotation.matrix has non-finite entries"));
                }
                let m = Mat3::from_row_major(e);
                let defect = m.orthogonality_defect();
                if defect > ROTATION_INPUT_TOL || m.determinant() <= 0.0 {
                    return Err(invalid(format!(
                        "rotation.matrix is not a rotation (orthogonality defect {defect:.3e}, det {:.6})",
                        m.determinant()
                    )));
                }
                Ok(reorthonormalize(&m)?)
            }
            RotationConfig::AxisAngle { axis, angle } => {
                let axis = finite3("rotation.axis_angle.axis", *axis)?
                    .normalized()
                    .ok_or_else(|| invalid("rotation.axis_angle.axis is zero"))?;
                Ok(Rotation::from_axis_angle(
                    &axis,
                    finite("rotation.axis_angle.angle", *angle)?,
                ))
            }
        }
    }
}

fn unit_nu(v: [f64; 3]) -> Result<Vec3, CliError> {
    let nu = finite3("initial.nu", v)?;
    let n = nu.norm();
    if (n - 1.0).abs() > NU_INPUT_TOL {
        return Err(invalid(format!(
            "initial.nu must be a unit vector, |nu| = {n}"
        )));
    }
    Ok(nu * n.recip())
}

impl InitialConfig {
    fn build(&self, space: SpaceId) -> Result<Vec<f64>, CliError> {
        let x = finite3("initial.x", self.x)?;
        let p = finite3("initial.p", self.p)?;
        let pi = finite3("initial.pi", self.pi)?;
        match space {
            SpaceId::CotSE3 => {
                if self.nu.is_some() {
                    return Err(invalid("full runs take initial.rotation, not initial.nu"));
                }
                let rotation = self
                    .rotation
                    .as_ref()
                    .ok_or_else(|| invalid("full runs need initial.rotation"))?
                    .build()?;
                Ok(FullState { x, rotation, p, pi }.flatten())
            }
            _ => {
                let nu = match (&self.nu, &self.rotation) {
                    (Some(nu), None) => unit_nu(*nu)?,
                    (None, Some(r)) => r.build()?.matrix().column(2),
                    _ => {
                        return Err(invalid(
                            "reduced runs need exactly one of initial.nu, initial.rotation",
                        ))
                    }
                };
                Ok(ReducedState::new(x, p, nu, pi)?.flatten())
            }
        }
    }
}

impl RunConfig {
    pub fn space_id(&self) -> SpaceId {
        match self.space {
            SpaceChoice::Full => SpaceId::CotSE3,
            SpaceChoice::Reduced => SpaceId::Reduced,
        }
    }

    pub fn validate(&self) -> Result<Run, CliError> {
        let space = self.space_id();
        let body = BodyParams::new(self.body.mass, self.body.i1, self.body.i3)?;
        let potential = self.potential.build()?;
        let method = match self.method {
            MethodChoice::Rk4 => Method::Rk4,
            MethodChoice::Rk4Repair => Method::Rk4Repair,
        };
        let opts = SimOptions::new(self.dt, self.duration)
            .with_method(method)
            .with_stride(self.sample_stride);
        opts.steps()?;
        if let Some(rdt) = self.reduced_dt {
            if rdt != self.dt {
                return Err(invalid(format!(
                    "reduced_dt = {rdt} differs from dt = {}; both runs must use the same step",
                    self.dt
                )));
            }
        }
        let z0 = match &self.initial {
            Some(init) => init.build(space)?,
            None => random_state::<f64>(space, self.seed).flatten(),
        };
        Ok(Run {
            space,
            body,
            potential,
            z0,
            opts,
        })
    }
}
