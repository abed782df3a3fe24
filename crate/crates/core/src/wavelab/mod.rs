//! Experiment harness: the shock, rarefaction and periodic-decay sweeps,
//! decay-rate fits and report emission.

mod config;
mod emit;
mod experiments;

use serde::{Deserialize, Serialize};

pub use crate::charax::{ReferenceWave, WaveKind};
pub use config::{ExperimentConfig, PieceSpec, ProfileSpec, Solver, Spacing, TimeSweep};
pub use emit::{emit, read_json, to_csv, to_json, to_svg, Format};
pub use experiments::{detect_merge_time, oracle_diff, run_periodic_decay, run_rarefaction, run_shock_stability, MergeTime};

use crate::error::{precondition, Result};

/// Values at or below this are raised to it before taking logarithms.
pub const FIT_FLOOR: f64 = 1e-14;

/// One named column of samples, aligned with [`DecayReport::times`].
/// `None` marks a time where the quantity is undefined.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Series {
    pub name: String,
    pub values: Vec<Option<f64>>,
}

impl Series {
    pub fn new(name: &str, values: Vec<f64>) -> Self {
        Series {
            name: name.into(),
            values: values.into_iter().map(Some).collect(),
        }
    }

    pub fn partial(name: &str, values: Vec<Option<f64>>) -> Self {
        Series {
            name: name.into(),
            values,
        }
    }
}

/// Samples on their own time grid, e.g. `|X(tₙ) − s tₙ|` at the periodic
/// coincidence times.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointSeries {
    pub name: String,
    pub times: Vec<f64>,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    /// Largest observed violation measure, compared against `tolerance`.
    pub worst: f64,
    pub tolerance: f64,
}

impl Check {
    /// Passes when `worst <= tolerance`.
    pub fn at_most(name: &str, worst: f64, tolerance: f64) -> Self {
        Check {
            name: name.into(),
            passed: worst <= tolerance,
            worst,
            tolerance,
        }
    }
}

/// Least-squares fit of `log v = log C + k log t`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateFit {
    pub exponent: f64,
    pub constant: f64,
    /// Largest `|log v − fitted|` over the samples.
    pub max_residual: f64,
    /// Some value was at or below [`FIT_FLOOR`].
    pub floored: bool,
}

/// Outcome of one experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayReport {
    pub experiment: String,
    pub config: ExperimentConfig,
    pub times: Vec<f64>,
    pub series: Vec<Series>,
    /// Series the rate fit is taken on.
    pub fitted_series: Option<String>,
    pub fit: Option<RateFit>,
    /// `T_S` for shocks, `T_P` for two-constant periodic data.
    pub detected_t: Option<f64>,
    pub extra: Vec<PointSeries>,
    /// Empirical `sup t·metric` per series; the theory leaves these open.
    pub constants: Vec<(String, f64)>,
    pub checks: Vec<Check>,
    pub notes: Vec<String>,
}

impl DecayReport {
    fn new(experiment: &str, config: &ExperimentConfig, times: Vec<f64>) -> Self {
        DecayReport {
            experiment: experiment.into(),
            config: config.clone(),
            times,
            series: Vec::new(),
            fitted_series: None,
            fit: None,
            detected_t: None,
            extra: Vec::new(),
            constants: Vec::new(),
            checks: Vec::new(),
            notes: Vec::new(),
        }
    }

    pub fn fitted_exponent(&self) -> Option<f64> {
        self.fit.map(|f| f.exponent)
    }

    pub fn fitted_constant(&self) -> Option<f64> {
        self.fit.map(|f| f.constant)
    }

    pub fn series(&self, name: &str) -> Option<&Series> {
        self.series.iter().find(|s| s.name == name)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    /// Fits the named series over the last decade of samples; a failed fit
    /// leaves a note instead.
    fn fit_last_decade(&mut self, name: &str) {
        self.fitted_series = Some(name.into());
        let Some(s) = self.series(name) else {
            self.notes.push(format!("no series {name} to fit"));
            return;
        };
        let (ts, vs): (Vec<f64>, Vec<f64>) = self
            .times
            .iter()
            .zip(&s.values)
            .filter_map(|(&t, v)| v.map(|v| (t, v)))
            .unzip();
        let start = last_decade_start(&ts);
        match start.map_or_else(
            || Err(precondition("samples span less than one decade")),
            |i| fit_rate(&ts[i..], &vs[i..]),
        ) {
            Ok(fit) => {
                if fit.floored {
                    self.notes.push(format!("{name}: values floored at {FIT_FLOOR:e} before the fit"));
                }
                self.fit = Some(fit);
            }
            Err(e) => self.notes.push(format!("{name}: no rate fit ({e})")),
        }
    }

    /// Records `sup t·v` after `from` and a check that `t·v` shows no
    /// increasing trend over the last decade. Values known only up to
    /// `resolution` (the mesh size for front tracking) may jitter by
    /// `t·resolution`.
    fn bounded_after(&mut self, name: &str, from: f64, resolution: f64) {
        let Some(s) = self.series(name) else { return };
        let pts: Vec<(f64, f64)> = self
            .times
            .iter()
            .zip(&s.values)
            .filter_map(|(&t, v)| v.filter(|_| t >= from).map(|v| (t, t * v.abs())))
            .collect();
        let Some(&(t_max, _)) = pts.last() else { return };
        let constant = pts.iter().map(|p| p.1).fold(0.0, f64::max);
        self.constants.push((name.into(), constant));
        let last = pts.iter().filter(|p| p.0 >= t_max / 10.0).map(|p| p.1).fold(0.0, f64::max);
        let prior = pts
            .iter()
            .filter(|p| p.0 < t_max / 10.0 && p.0 >= t_max / 100.0)
            .map(|p| p.1)
            .fold(f64::NAN, f64::max);
        if prior.is_nan() {
            self.notes.push(format!("{name}: too few samples before the last decade for a trend check"));
            return;
        }
        // Ratio of the last decade's peak to the previous decade's peak.
        let floor = prior.max(TREND_NOISE);
        let ratio = if last <= TREND_NOISE { 0.0 } else { last / floor };
        let allowance = TREND_GROWTH + t_max * resolution / floor;
        self.checks.push(Check::at_most(&format!("{name}_t_bounded"), ratio, allowance));
    }
}

/// Peaks of `t·metric` below this count as zero in the trend check.
const TREND_NOISE: f64 = 1e-10;

/// Allowed growth of the `t·metric` peak from one decade to the next.
const TREND_GROWTH: f64 = 1.1;

/// Index of the first sample in the last decade: the last one at or below
/// `t_max / 10`, so that the selection spans at least a decade.
pub fn last_decade_start(times: &[f64]) -> Option<usize> {
    let t_max = *times.last()?;
    times.iter().rposition(|&t| t <= t_max / 10.0)
}

/// Least squares on `(log t, log v)`.
pub fn fit_rate(times: &[f64], values: &[f64]) -> Result<RateFit> {
    if times.len() != values.len() {
        return Err(precondition("times and values differ in length"));
    }
    if times.len() < 8 {
        return Err(precondition(format!("rate fit needs at least 8 samples, got {}", times.len())));
    }
    if times.iter().any(|&t| !(t > 0.0)) || values.iter().any(|v| !v.is_finite() || *v < 0.0) {
        return Err(precondition("rate fit needs positive times and finite nonnegative values"));
    }
    let (lo, hi) = times.iter().fold((f64::INFINITY, 0.0f64), |(a, b), &t| (a.min(t), b.max(t)));
    if hi < 10.0 * lo {
        return Err(precondition(format!("samples on [{lo}, {hi}] span less than one decade")));
    }
    let floored = values.iter().any(|&v| v <= FIT_FLOOR);
    let xs: Vec<f64> = times.iter().map(|t| t.ln()).collect();
    let ys: Vec<f64> = values.iter().map(|v| v.max(FIT_FLOOR).ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let k = sxy / sxx;
    let c = my - k * mx;
    let max_residual = xs.iter().zip(&ys).map(|(x, y)| (y - c - k * x).abs()).fold(0.0, f64::max);
    Ok(RateFit {
        exponent: k,
        constant: c.exp(),
        max_residual,
        floored,
    })
}

#[cfg(test)]
mod tests;
