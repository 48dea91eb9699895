//! Run configuration as read from JSON.

use std::path::Path;

use dirac_spectra::problem::{BoundaryPair, DiracProblem, PotentialGrid, ReducedBC, Weights};
use dirac_spectra::timoshenko::BeamCoefficients;
use dirac_spectra::C64;
use serde::Deserialize;

use crate::CliError;

/// A complex number written either as a plain number or as `[re, im]`.
#[derive(Clone, Copy, Debug, Deserialize, PartialEq)]
#[serde(untagged)]
pub enum Num {
    Real(f64),
    Pair([f64; 2]),
}

impl Num {
    pub fn value(self) -> C64 {
        match self {
            Num::Real(x) => C64::new(x, 0.0),
            Num::Pair([re, im]) => C64::new(re, im),
        }
    }
}

impl Default for Num {
    fn default() -> Self {
        Num::Real(0.0)
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeightSpec {
    pub b1: f64,
    pub b2: f64,
    #[serde(default)]
    pub ratio: Option<[u32; 2]>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum PotentialSpec {
    Zero,
    Constant {
        #[serde(default)]
        q11: Num,
        #[serde(default)]
        q12: Num,
        #[serde(default)]
        q21: Num,
        #[serde(default)]
        q22: Num,
    },
    Samples {
        q12: Vec<Num>,
        q21: Vec<Num>,
        #[serde(default)]
        q11: Option<Vec<Num>>,
        #[serde(default)]
        q22: Option<Vec<Num>>,
    },
    Preset {
        name: String,
        #[serde(default = "one")]
        scale: f64,
    },
}

fn one() -> f64 {
    1.0
}

#[derive(Clone, Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum BcSpec {
    Full { c: [[Num; 2]; 2], d: [[Num; 2]; 2] },
    Reduced { a: Num, b: Num, c: Num, d: Num },
    Preset { name: String },
}

#[derive(Clone, Debug, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct KernelSpec {
    #[serde(default)]
    pub lambdas: Vec<Num>,
    #[serde(default)]
    pub n_list: Vec<usize>,
    #[serde(default)]
    pub dump: bool,
}

#[derive(Clone, Debug, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct BasisSpec {
    #[serde(default)]
    pub eps: Option<f64>,
}

/// A profile given as one constant or as samples on the beam grid.
#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum Profile {
    Constant(f64),
    Samples(Vec<f64>),
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BeamSpec {
    #[serde(default = "one")]
    pub length: f64,
    #[serde(default)]
    pub m: Option<usize>,
    pub rho: Profile,
    pub i_rho: Profile,
    pub k: Profile,
    pub ei: Profile,
    #[serde(default = "no_damping")]
    pub p1: Profile,
    #[serde(default = "no_damping")]
    pub p2: Profile,
    #[serde(default)]
    pub alpha: [Num; 2],
    #[serde(default)]
    pub beta: [Num; 2],
}

fn no_damping() -> Profile {
    Profile::Constant(0.0)
}

#[derive(Clone, Debug, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum ModeSpec {
    #[default]
    Auto,
    ClosedForm,
    Propagator,
    KernelTrace,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub weights: Option<WeightSpec>,
    #[serde(default)]
    pub potential: Option<PotentialSpec>,
    #[serde(default)]
    pub bc: Option<BcSpec>,
    #[serde(default)]
    pub mode: ModeSpec,
    #[serde(default)]
    pub strip: Option<f64>,
    #[serde(default)]
    pub window: Option<[f64; 2]>,
    #[serde(default)]
    pub grid_m: Option<usize>,
    #[serde(default)]
    pub grid_n: Option<usize>,
    #[serde(default)]
    pub kernel: KernelSpec,
    #[serde(default)]
    pub basis: BasisSpec,
    #[serde(default)]
    pub beam: Option<BeamSpec>,
}

pub const DEFAULT_M: usize = 512;
pub const DEFAULT_N: usize = 128;
pub const DEFAULT_WINDOW: [f64; 2] = [-20.0, 20.0];

fn invalid(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| invalid(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| invalid(e.to_string()))
    }

    pub fn m(&self) -> usize {
        self.grid_m.unwrap_or(DEFAULT_M)
    }

    pub fn n(&self) -> usize {
        self.grid_n.unwrap_or(DEFAULT_N)
    }

    pub fn window(&self) -> Result<(f64, f64), CliError> {
        let [lo, hi] = self.window.unwrap_or(DEFAULT_WINDOW);
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(invalid(format!("window [{lo}, {hi}] is empty")));
        }
        Ok((lo, hi))
    }

    pub fn weights(&self) -> Result<Weights, CliError> {
        let w = self.weights.as_ref().ok_or_else(|| invalid("missing \"weights\""))?;
        match w.ratio {
            Some([n1, n2]) => Weights::with_ratio(w.b1, w.b2, n1, n2),
            None => Weights::new(w.b1, w.b2),
        }
        .map_err(|e| invalid(e.to_string()))
    }

    pub fn potential(&self) -> Result<PotentialGrid, CliError> {
        let m = self.m();
        let spec = self.potential.clone().unwrap_or(PotentialSpec::Zero);
        let built = match spec {
            PotentialSpec::Zero => PotentialGrid::zero(m),
            PotentialSpec::Constant { q11, q12, q21, q22 } => {
                let e = [q11, q12, q21, q22].map(Num::value);
                PotentialGrid::from_fn(m, |_| e)
            }
            PotentialSpec::Samples { q12, q21, q11, q22 } => {
                let v = |s: Vec<Num>| s.into_iter().map(Num::value).collect::<Vec<_>>();
                PotentialGrid::from_samples(v(q12), v(q21), q11.map(v), q22.map(v))
            }
            PotentialSpec::Preset { name, scale } => preset_potential(&name, m, scale)?,
        };
        built.map_err(|e| invalid(e.to_string()))
    }

    pub fn bc(&self) -> Result<BoundaryPair, CliError> {
        let spec = self.bc.as_ref().ok_or_else(|| invalid("missing \"bc\""))?;
        match spec {
            BcSpec::Full { c, d } => {
                let r = |i: usize| [c[i][0], c[i][1], d[i][0], d[i][1]].map(Num::value);
                BoundaryPair::from_rows(r(0), r(1)).map_err(|e| invalid(e.to_string()))
            }
            BcSpec::Reduced { a, b, c, d } => {
                Ok(BoundaryPair::from_reduced(&ReducedBC::new(a.value(), b.value(), c.value(), d.value())))
            }
            BcSpec::Preset { name } => match name.as_str() {
                "periodic" => Ok(BoundaryPair::periodic()),
                "antiperiodic" => Ok(BoundaryPair::antiperiodic()),
                "separated" => Ok(BoundaryPair::from_reduced(&ReducedBC::real(0.0, 1.0, -2.0, 0.0))),
                other => Err(invalid(format!("unknown bc preset {other:?}"))),
            },
        }
    }

    pub fn problem(&self) -> Result<DiracProblem, CliError> {
        Ok(DiracProblem::new(self.weights()?, self.potential()?, self.bc()?))
    }

    pub fn beam(&self) -> Result<BeamCoefficients, CliError> {
        let spec = self.beam.as_ref().ok_or_else(|| invalid("missing \"beam\""))?;
        let m = match spec.m {
            Some(m) => m,
            None => [&spec.rho, &spec.i_rho, &spec.k, &spec.ei, &spec.p1, &spec.p2]
                .iter()
                .find_map(|p| match p {
                    Profile::Samples(v) => Some(v.len().saturating_sub(1)),
                    Profile::Constant(_) => None,
                })
                .unwrap_or(self.m()),
        };
        let sample = |p: &Profile, name: &str| -> Result<Vec<f64>, CliError> {
            match p {
                Profile::Constant(v) => Ok(vec![*v; m + 1]),
                Profile::Samples(v) if v.len() == m + 1 => Ok(v.clone()),
                Profile::Samples(v) => Err(invalid(format!("{name} has {} samples, expected {}", v.len(), m + 1))),
            }
        };
        Ok(BeamCoefficients {
            length: spec.length,
            rho: sample(&spec.rho, "rho")?,
            i_rho: sample(&spec.i_rho, "i_rho")?,
            k: sample(&spec.k, "k")?,
            ei: sample(&spec.ei, "ei")?,
            p1: sample(&spec.p1, "p1")?,
            p2: sample(&spec.p2, "p2")?,
            alpha: spec.alpha.map(Num::value),
            beta: spec.beta.map(Num::value),
        })
    }
}

/// Named potentials: `unit` has `Q12 = Q21 = 1`; `smooth` has `Q12 = 1 + x`, `Q21 = cos 2x`;
/// `diagonal` has `Q11 = 1`, `Q22 = x`.
fn preset_potential(name: &str, m: usize, s: f64) -> Result<dirac_spectra::Result<PotentialGrid>, CliError> {
    let z = C64::new(0.0, 0.0);
    let r = |v: f64| C64::new(s * v, 0.0);
    Ok(match name {
        "unit" => PotentialGrid::constant(m, r(1.0), r(1.0)),
        "smooth" => PotentialGrid::off_diagonal(m, |x| r(1.0 + x), |x| r((2.0 * x).cos())),
        "diagonal" => PotentialGrid::from_fn(m, |x| [r(1.0), z, z, r(x)]),
        other => return Err(invalid(format!("unknown potential preset {other:?}"))),
    })
}
