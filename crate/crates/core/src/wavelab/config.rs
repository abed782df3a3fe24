//! Experiment configuration, read from TOML.
//!
//! ```toml
//! flux = "burgers"          # burgers | exp
//! period = 1.0
//! ul = 1.0                  # shock / rarefaction modes
//! ur = -1.0
//! # ubar = 0.0              # periodic mode
//! delta = 1e-3
//! solver = "oracle"         # oracle | fronttrack | both
//! output = "out"
//!
//! [profile]
//! kind = "pieces"           # pieces | square | two_constant | zero
//! pieces = [
//!   { width = 0.5, value = 0.3 },
//!   { width = 0.5, left = -0.3, right = -0.3 },
//! ]
//!
//! [times]
//! start = 0.25
//! end = 256.0
//! count = 48
//! # values = [1.0, 5.0, 10.0]   # explicit list, overrides the sweep
//! ```

use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::flux::ConvexFlux;
use crate::profile::{PeriodicProfile, PieceKind, RiemannPerturbedIC, TwoConstantProfile};

/// Which evaluator produces the solution.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Solver {
    #[default]
    Oracle,
    Fronttrack,
    Both,
}

impl Solver {
    pub fn uses_oracle(self) -> bool {
        matches!(self, Solver::Oracle | Solver::Both)
    }

    pub fn uses_fronttrack(self) -> bool {
        matches!(self, Solver::Fronttrack | Solver::Both)
    }
}

impl FromStr for Solver {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "oracle" => Ok(Solver::Oracle),
            "fronttrack" => Ok(Solver::Fronttrack),
            "both" => Ok(Solver::Both),
            other => Err(Error::Config(format!("unknown solver {other:?}"))),
        }
    }
}

/// One piece of a profile: `value` for a constant, `left`/`right` for a ramp.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PieceSpec {
    Constant { width: f64, value: f64 },
    Linear { width: f64, left: f64, right: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ProfileSpec {
    Pieces { pieces: Vec<PieceSpec> },
    /// `first` on the first half period, `second` on the rest.
    Square { first: f64, second: f64 },
    /// `m1` then `−m2`, switching so that the mean vanishes.
    TwoConstant { m1: f64, m2: f64 },
    Zero,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Spacing {
    #[default]
    Geometric,
    Linear,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TimeSweep {
    pub start: f64,
    pub end: f64,
    pub count: usize,
    pub spacing: Spacing,
    pub values: Vec<f64>,
}

impl Default for TimeSweep {
    fn default() -> Self {
        TimeSweep {
            start: 0.25,
            end: 256.0,
            count: 48,
            spacing: Spacing::Geometric,
            values: Vec::new(),
        }
    }
}

impl TimeSweep {
    pub fn geometric(start: f64, end: f64, count: usize) -> Self {
        TimeSweep {
            start,
            end,
            count,
            ..Default::default()
        }
    }

    pub fn explicit(values: &[f64]) -> Self {
        TimeSweep {
            values: values.to_vec(),
            ..Default::default()
        }
    }

    pub fn samples(&self) -> Result<Vec<f64>> {
        let ts = if !self.values.is_empty() {
            self.values.clone()
        } else {
            if self.count < 2 || !(self.start > 0.0) || !(self.end > self.start) {
                return Err(Error::Config(format!(
                    "time sweep needs count >= 2 and 0 < start < end, got {} samples on [{}, {}]",
                    self.count, self.start, self.end
                )));
            }
            let n = self.count - 1;
            let mut ts: Vec<f64> = (0..=n)
                .map(|i| {
                    let q = i as f64 / n as f64;
                    match self.spacing {
                        Spacing::Geometric => self.start * (self.end / self.start).powf(q),
                        Spacing::Linear => self.start + (self.end - self.start) * q,
                    }
                })
                .collect();
            ts[0] = self.start;
            ts[n] = self.end;
            ts
        };
        if ts.first().is_some_and(|&t| !(t > 0.0)) || ts.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::Config("time samples must be positive and strictly increasing".into()));
        }
        Ok(ts)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    #[serde(default = "default_flux")]
    pub flux: String,
    #[serde(default = "default_period")]
    pub period: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ul: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ur: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ubar: Option<f64>,
    #[serde(default = "default_delta")]
    pub delta: f64,
    #[serde(default)]
    pub solver: Solver,
    #[serde(default = "default_output")]
    pub output: PathBuf,
    pub profile: ProfileSpec,
    #[serde(default)]
    pub times: TimeSweep,
}

fn default_flux() -> String {
    "burgers".into()
}

fn default_period() -> f64 {
    1.0
}

fn default_delta() -> f64 {
    1e-3
}

fn default_output() -> PathBuf {
    PathBuf::from("out")
}

impl ExperimentConfig {
    /// Riemann-mode config with Burgers flux and the default sweep.
    pub fn riemann(ul: f64, ur: f64, profile: ProfileSpec) -> Self {
        ExperimentConfig {
            flux: default_flux(),
            period: 1.0,
            ul: Some(ul),
            ur: Some(ur),
            ubar: None,
            delta: default_delta(),
            solver: Solver::Oracle,
            output: default_output(),
            profile,
            times: TimeSweep::default(),
        }
    }

    /// Periodic-mode config with Burgers flux and the default sweep.
    pub fn periodic(ubar: f64, profile: ProfileSpec) -> Self {
        ExperimentConfig {
            ul: None,
            ur: None,
            ubar: Some(ubar),
            ..Self::riemann(0.0, 0.0, profile)
        }
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.delta > 0.0) {
            return Err(Error::Config(format!("delta must be positive, got {}", self.delta)));
        }
        if !(self.period > 0.0) {
            return Err(Error::Config(format!("period must be positive, got {}", self.period)));
        }
        ConvexFlux::by_name(&self.flux).map_err(|e| Error::Config(e.to_string()))?;
        self.times.samples()?;
        self.profile()?;
        Ok(())
    }

    pub fn flux(&self) -> Result<ConvexFlux> {
        ConvexFlux::by_name(&self.flux).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn samples(&self) -> Result<Vec<f64>> {
        self.times.samples()
    }

    /// The perturbation `w₀` (without any background state).
    pub fn profile(&self) -> Result<PeriodicProfile> {
        let p = self.period;
        let built = match &self.profile {
            ProfileSpec::Pieces { pieces } => {
                let parts: Vec<(f64, PieceKind)> = pieces
                    .iter()
                    .map(|s| match *s {
                        PieceSpec::Constant { width, value } => (width, PieceKind::Constant(value)),
                        PieceSpec::Linear { width, left, right } => (width, PieceKind::Linear { left, right }),
                    })
                    .collect();
                PeriodicProfile::new(p, &parts)
            }
            ProfileSpec::Square { first, second } => PeriodicProfile::square_wave(p, *first, *second),
            ProfileSpec::TwoConstant { m1, m2 } => TwoConstantProfile::new(*m1, *m2, p, 0.0)?.to_profile(),
            ProfileSpec::Zero => PeriodicProfile::zero(p),
        };
        built.map_err(|e| Error::Config(format!("profile: {e}")))
    }

    pub fn two_constant(&self) -> Option<TwoConstantProfile> {
        match self.profile {
            ProfileSpec::TwoConstant { m1, m2 } => TwoConstantProfile::new(m1, m2, self.period, self.ubar.unwrap_or(0.0)).ok(),
            _ => None,
        }
    }

    /// Perturbed Riemann data; needs `ul` and `ur`.
    pub fn riemann_ic(&self) -> Result<RiemannPerturbedIC> {
        let (Some(ul), Some(ur)) = (self.ul, self.ur) else {
            return Err(Error::Config("this experiment needs both ul and ur".into()));
        };
        RiemannPerturbedIC::new(self.flux()?, ul, ur, self.profile()?)
    }

    /// Background state for periodic mode.
    pub fn periodic_mean(&self) -> Result<f64> {
        self.ubar.ok_or_else(|| Error::Config("periodic mode needs ubar".into()))
    }
}
