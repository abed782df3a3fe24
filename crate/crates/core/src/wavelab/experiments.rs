use serde::{Deserialize, Serialize};

use super::{Check, DecayReport, ExperimentConfig, PointSeries, Series};
use crate::charax::{
    divide_sandwich, fan_mismatch, forward_characteristic_scaled, glue_check, shock_offset, shock_offset_galilean, CharKind,
    EntropyField, PeriodicField, ReferenceWave, TrackedField,
};
use crate::error::{precondition, Error, Result};
use crate::flux::{normalize, ConvexFlux, FluxKind, GPotential, Interval};
use crate::fronttrack::{
    approximate_flux, snapped_initial_state, snapped_periodic_state, FluxPolygon, FrontTracker, PiecewiseConstantState,
};
use crate::oracle::{HopfOracle, PeriodicOracle, Side};
use crate::profile::{PeriodicProfile, RiemannPerturbedIC};
use crate::quad::{integrate, QuadOptions};

/// Tolerance for identities the oracle reproduces exactly up to rounding.
const ORACLE_TOL: f64 = 1e-8;

/// Branch-and-bound tolerance for certified sup norms.
const EXTREMA_TOL: f64 = 1e-12;

/// Samples per glue check.
const GLUE_SAMPLES: usize = 4096;

/// Forward characteristic step: `Δt = 0.01·max(1, t)`.
const CHAR_STEP: f64 = 0.01;

/// Shock set refinement target for `T_S`.
const MERGE_TOL: f64 = 1e-6;

fn ft_tol(delta: f64) -> f64 {
    (5.0 * delta).max(ORACLE_TOL)
}

fn require_burgers(flux: &ConvexFlux) -> Result<()> {
    if flux.kind() == FluxKind::Burgers {
        Ok(())
    } else {
        Err(Error::Config(format!(
            "the oracle solves Burgers only (flux is {}); use solver = \"fronttrack\"",
            flux.name()
        )))
    }
}

/// Polygon with nodes on multiples of `delta` covering `[lo, hi]`.
fn polygon(flux: &ConvexFlux, delta: f64, lo: f64, hi: f64) -> Result<FluxPolygon> {
    let lo = ((lo / delta).floor() - 1.0) * delta;
    let hi = ((hi / delta).ceil() + 1.0) * delta;
    approximate_flux(flux, delta, Interval::new(lo, hi)?)
}

/// Window on which front tracking from snapped data is exact for
/// `|x| ≤ smax·t_end + 3p` up to `t_end`.
fn ft_window(poly: &FluxPolygon, p: f64, t_end: f64) -> Result<Interval> {
    let reach = 2.0 * poly.max_abs_speed() * t_end + 4.0 * p;
    Interval::new(-reach, reach)
}

fn periodic_deviation(o: &PeriodicOracle, t: f64, reference: f64) -> Result<f64> {
    let e = o.extrema(t, EXTREMA_TOL)?;
    Ok((e.sup - reference).max(reference - e.inf))
}

fn state_deviation(s: &PiecewiseConstantState, reference: f64) -> f64 {
    s.values.iter().map(|v| (v - reference).abs()).fold(0.0, f64::max)
}

/// `sup |s − c|` over pieces meeting `(a, b)`.
fn deviation_on(s: &PiecewiseConstantState, a: f64, b: f64, c: f64) -> f64 {
    s.max_abs_difference(&PiecewiseConstantState::constant(s.time, c), a, b, 0.0)
}

/// Where the shock set of the oracle becomes a single point for good.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MergeTime {
    /// Refined `T_S`; `None` when the last sample is still unmerged.
    pub t_s: Option<f64>,
    /// Sampled times with an unmerged shock set.
    pub unmerged_samples: usize,
}

/// Estimates `T_S` from merged flags on `samples`: the bracket between
/// the last unmerged sample and its successor is bisected down to
/// `MERGE_TOL`. When every sample is merged, earlier times are probed by
/// halving; `T_S = 0` means the shock set is a point from the start.
pub fn detect_merge_time(oracle: &HopfOracle, samples: &[f64]) -> Result<MergeTime> {
    let merged = |t: f64| -> Result<bool> { Ok(oracle.shock_interval(t)?.merged) };
    let flags = samples.iter().map(|&t| merged(t)).collect::<Result<Vec<_>>>()?;
    let unmerged_samples = flags.iter().filter(|m| !**m).count();
    let bracket = match flags.iter().rposition(|m| !m) {
        Some(i) if i + 1 == samples.len() => {
            return Ok(MergeTime {
                t_s: None,
                unmerged_samples,
            })
        }
        Some(i) => Some((samples[i], samples[i + 1])),
        None => {
            let mut t = samples.first().copied().ok_or_else(|| precondition("no time samples"))?;
            let floor = t * 1e-9;
            let mut found = None;
            while t > floor {
                t *= 0.5;
                if !merged(t)? {
                    found = Some((t, 2.0 * t));
                    break;
                }
            }
            found
        }
    };
    let Some((mut lo, mut hi)) = bracket else {
        return Ok(MergeTime {
            t_s: Some(0.0),
            unmerged_samples,
        });
    };
    while hi - lo > MERGE_TOL * hi.max(1.0) {
        let mid = 0.5 * (lo + hi);
        if merged(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(MergeTime {
        t_s: Some(hi),
        unmerged_samples,
    })
}

struct ShockSeries {
    x_err: Vec<f64>,
    sup_left: Vec<f64>,
    sup_right: Vec<f64>,
    glue: Vec<f64>,
    offset: Vec<f64>,
}

impl ShockSeries {
    fn with_capacity(n: usize) -> Self {
        ShockSeries {
            x_err: Vec::with_capacity(n),
            sup_left: Vec::with_capacity(n),
            sup_right: Vec::with_capacity(n),
            glue: Vec::with_capacity(n),
            offset: Vec::with_capacity(n),
        }
    }

    fn into_series(self, suffix: &str) -> Vec<Series> {
        vec![
            Series::new(&format!("X_err{suffix}"), self.x_err),
            Series::new(&format!("sup_left{suffix}"), self.sup_left),
            Series::new(&format!("sup_right{suffix}"), self.sup_right),
            Series::new(&format!("glue_mismatch{suffix}"), self.glue),
            Series::new(&format!("offset_pred{suffix}"), self.offset),
        ]
    }
}

/// Shock experiment: decay of `|X(t) − st|` and of the one-sided sup
/// norms, gluing to `u_l`/`u_r`, `T_S`, and the offset identity.
pub fn run_shock_stability(config: &ExperimentConfig) -> Result<DecayReport> {
    let ic = config.riemann_ic()?;
    ic.require_shock()?;
    let ts = config.samples()?;
    let mut report = DecayReport::new("shock", config, ts.clone());
    let flux = ic.flux().clone();
    let solver = config.solver;
    let mut t_s = ts[0];
    let mut oracle_x = None;
    if solver.uses_oracle() {
        require_burgers(&flux)?;
        let oracle = HopfOracle::new(ic.clone())?;
        let merge = detect_merge_time(&oracle, &ts)?;
        report.detected_t = merge.t_s;
        match merge.t_s {
            Some(t) => t_s = t,
            None => {
                report.notes.push("shock set still unmerged at the last sample".into());
                t_s = f64::INFINITY;
            }
        }
        let (series, xs, merged) = shock_oracle_series(&oracle, &ts)?;
        let after: Vec<usize> = (0..ts.len()).filter(|&i| merged[i] && ts[i] > t_s).collect();
        let glue = after.iter().map(|&i| series.glue[i]).fold(0.0, f64::max);
        let offset = after
            .iter()
            .map(|&i| (series.offset[i] - (xs[i] - ic.shock_speed() * ts[i])).abs())
            .fold(0.0, f64::max);
        report.checks.push(Check::at_most("glue_after_merge", glue, ORACLE_TOL));
        report.checks.push(Check::at_most("offset_identity", offset, ORACLE_TOL));
        report.checks.push(Check::at_most(
            "merged_after_t_s",
            (0..ts.len()).filter(|&i| ts[i] > t_s && !merged[i]).count() as f64,
            0.0,
        ));
        report.series.extend(series.into_series(""));
        let coincidence = coincidence_times(&oracle, t_s, ts[ts.len() - 1])?;
        if !coincidence.times.is_empty() {
            let worst = coincidence.values.iter().copied().fold(0.0, f64::max);
            report.checks.push(Check::at_most("integer_time_coincidence", worst, ORACLE_TOL));
        }
        report.extra.push(coincidence);
        oracle_x = Some((xs, merged));
    }
    if solver.uses_fronttrack() {
        let suffix = if solver.uses_oracle() { "_ft" } else { "" };
        let (series, xs) = shock_ft_series(&ic, config.delta, &ts)?;
        let tol = ft_tol(config.delta);
        let glue = (0..ts.len())
            .filter(|&i| ts[i] > t_s)
            .map(|i| series.glue[i])
            .fold(0.0, f64::max);
        report.checks.push(Check::at_most(&format!("glue_after_merge{suffix}"), glue, tol));
        if let Some((oxs, merged)) = &oracle_x {
            let worst = (0..ts.len())
                .filter(|&i| merged[i] && ts[i] > t_s)
                .map(|i| (oxs[i] - xs[i]).abs())
                .fold(0.0, f64::max);
            let mut worst_sup = 0.0f64;
            let ft = series.into_series(suffix);
            for name in ["sup_left", "sup_right"] {
                let (a, b) = (report.series(name), ft.iter().find(|s| s.name == format!("{name}{suffix}")));
                if let (Some(a), Some(b)) = (a, b) {
                    for (i, (u, v)) in a.values.iter().zip(&b.values).enumerate() {
                        if ts[i] > t_s {
                            if let (Some(u), Some(v)) = (u, v) {
                                worst_sup = worst_sup.max((u - v).abs());
                            }
                        }
                    }
                }
            }
            report.checks.push(Check::at_most("solver_agreement", worst.max(worst_sup), tol));
            report.series.extend(ft);
        } else {
            report.series.extend(series.into_series(suffix));
        }
    }
    let from = if t_s.is_finite() { t_s } else { ts[0] };
    let resolution = if solver.uses_oracle() { 0.0 } else { config.delta };
    for name in ["X_err", "sup_left", "sup_right"] {
        report.bounded_after(name, from, resolution);
    }
    report.fit_last_decade("X_err");
    Ok(report)
}

fn shock_oracle_series(oracle: &HopfOracle, ts: &[f64]) -> Result<(ShockSeries, Vec<f64>, Vec<bool>)> {
    let ic = oracle.ic();
    let (ul, ur, s, p) = (ic.ul(), ic.ur(), ic.shock_speed(), ic.period());
    let w = ic.perturbation();
    let (alpha, beta) = (w.min_value(), w.max_value());
    let left = oracle.left_solution();
    let right = oracle.right_solution();
    let zero_mean = PeriodicOracle::new(w, 0.0);
    let (lf, rf) = (PeriodicField::new(left.clone()), PeriodicField::new(right.clone()));
    let mut out = ShockSeries::with_capacity(ts.len());
    let mut xs = Vec::with_capacity(ts.len());
    let mut merged = Vec::with_capacity(ts.len());
    for &t in ts {
        let si = oracle.shock_interval(t)?;
        let x = if si.merged { si.x_low } else { 0.5 * (si.x_low + si.x_high) };
        let band = 1e-9 * (1.0 + t);
        // Left of t(ūr + α) every minimizer lies in y < 0, so u = u_l there;
        // symmetrically u = u_r right of t(ūl + β).
        let (a, b) = (t * (ur + alpha), t * (ul + beta));
        let near_left = if x - band > a {
            oracle.deviation_extrema(t, a, x - band, |_| ul, &[], EXTREMA_TOL)?.max_abs()
        } else {
            0.0
        };
        let near_right = if b > x + band {
            oracle.deviation_extrema(t, x + band, b, |_| ur, &[], EXTREMA_TOL)?.max_abs()
        } else {
            0.0
        };
        out.x_err.push((x - s * t).abs());
        out.sup_left.push(near_left.max(periodic_deviation(&left, t, ul)?));
        out.sup_right.push(near_right.max(periodic_deviation(&right, t, ur)?));
        let window = Interval::new(a - p, b + p)?;
        out.glue.push(glue_check(oracle, &lf, &rf, x, t, window, GLUE_SAMPLES, band)?);
        out.offset.push(shock_offset_galilean(&zero_mean, ul, ur, x, t)?);
        xs.push(x);
        merged.push(si.merged);
    }
    Ok((out, xs, merged))
}

/// `|X(tₙ) − s tₙ|` at `tₙ = n p/(ūl − ūr)` in `(t_s, t_max]`.
fn coincidence_times(oracle: &HopfOracle, t_s: f64, t_max: f64) -> Result<PointSeries> {
    let ic = oracle.ic();
    let step = ic.period() / (ic.ul() - ic.ur());
    let mut out = PointSeries {
        name: "X_err_coincidence".into(),
        times: Vec::new(),
        values: Vec::new(),
    };
    if !t_s.is_finite() {
        return Ok(out);
    }
    let mut n = (t_s / step).floor() as i64;
    loop {
        let t = n as f64 * step;
        if t > t_max {
            break;
        }
        if t > t_s && t > 0.0 {
            let si = oracle.shock_interval(t)?;
            out.times.push(t);
            out.values.push((si.x_low - ic.shock_speed() * t).abs().max((si.x_high - ic.shock_speed() * t).abs()));
        }
        n += 1;
    }
    Ok(out)
}

fn riemann_polygon(ic: &RiemannPerturbedIC, delta: f64) -> Result<FluxPolygon> {
    let (lo, hi) = ic.value_range();
    polygon(ic.flux(), delta, lo, hi)
}

fn periodic_tracked(w: &PeriodicProfile, ubar: f64, poly: &FluxPolygon) -> Result<TrackedField> {
    TrackedField::new(snapped_periodic_state(w, ubar, poly)?, poly)
}

fn shock_ft_series(ic: &RiemannPerturbedIC, delta: f64, ts: &[f64]) -> Result<(ShockSeries, Vec<f64>)> {
    let poly = riemann_polygon(ic, delta)?;
    let (ul, ur, s, p) = (ic.ul(), ic.ur(), ic.shock_speed(), ic.period());
    let t_end = ts[ts.len() - 1];
    let state = snapped_initial_state(ic, &poly, ft_window(&poly, p, t_end)?)?;
    let mut tracker = FrontTracker::with_tracer(&state, &poly, 0.0)?;
    let w = ic.perturbation();
    let left = periodic_tracked(w, ul, &poly)?;
    let right = periodic_tracked(w, ur, &poly)?;
    let f = ic.flux();
    let a_speed = f.deriv(ur + w.min_value())?;
    let b_speed = f.deriv(ul + w.max_value())?;
    let a_div = w.argmin_primitive();
    let mut out = ShockSeries::with_capacity(ts.len());
    let mut xs = Vec::with_capacity(ts.len());
    for &t in ts {
        tracker.advance_to(t)?;
        let x = tracker
            .tracked_position()
            .ok_or_else(|| Error::Internal("lost the tracked front".into()))?;
        let u = tracker.state();
        let ls = left.state_at(t)?;
        let rs = right.state_at(t)?;
        let (a, b) = (t * a_speed - p, t * b_speed + p);
        // The tracer and the shock front it rides may differ by rounding.
        let band = 1e-9 * (1.0 + t);
        out.x_err.push((x - s * t).abs());
        out.sup_left.push(deviation_on(&u, a, x - band, ul).max(state_deviation(&ls, ul)));
        out.sup_right.push(deviation_on(&u, x + band, b, ur).max(state_deviation(&rs, ur)));
        out.glue.push(
            u.max_abs_difference(&ls, a, x - band, band)
                .max(u.max_abs_difference(&rs, x + band, b, band)),
        );
        // Enough divide periods on each side to enclose X.
        let n_l = (a_div + f.deriv(ul)? * t - x) / p;
        let n_r = (x - a_div - f.deriv(ur)? * t) / p;
        let n = n_l.max(n_r).max(0.0).ceil() as i64 + 1;
        out.offset.push(shock_offset(ic, &left, &right, x, t, n)?);
        xs.push(x);
    }
    Ok((out, xs))
}

/// Rarefaction experiment: decay of `sup |u − u^R|`, the divide sandwich,
/// and the exact fan structure for nonnegative primitives.
pub fn run_rarefaction(config: &ExperimentConfig) -> Result<DecayReport> {
    let ic = config.riemann_ic()?;
    ic.require_rarefaction()?;
    let ts = config.samples()?;
    let mut report = DecayReport::new("rarefaction", config, ts.clone());
    let flux = ic.flux().clone();
    let wave = ReferenceWave::new(&flux, ic.ul(), ic.ur())?;
    let nonnegative = ic.perturbation().primitive_range().0 >= -1e-14;
    let solver = config.solver;
    if solver.uses_oracle() {
        require_burgers(&flux)?;
        let oracle = HopfOracle::new(ic.clone())?;
        let (sup, sandwich, fan) = rarefaction_oracle_series(&oracle, &wave, &ts, nonnegative)?;
        report.checks.push(Check::at_most(
            "divide_sandwich",
            sandwich.iter().copied().fold(0.0, f64::max),
            ORACLE_TOL,
        ));
        report.series.push(Series::new("sup_rarefaction", sup));
        report.series.push(Series::new("sandwich_excess", sandwich));
        if let Some(fan) = fan {
            report
                .checks
                .push(Check::at_most("fan_identity", fan.iter().copied().fold(0.0, f64::max), ORACLE_TOL));
            report.series.push(Series::new("fan_mismatch", fan));
        }
    }
    if solver.uses_fronttrack() {
        let suffix = if solver.uses_oracle() { "_ft" } else { "" };
        let tol = ft_tol(config.delta);
        let (sup, fan) = rarefaction_ft_series(&ic, &wave, config.delta, &ts, nonnegative)?;
        if let Some(fan) = fan {
            report.checks.push(Check::at_most(
                &format!("fan_identity{suffix}"),
                fan.iter().copied().fold(0.0, f64::max),
                tol,
            ));
            report.series.push(Series::new(&format!("fan_mismatch{suffix}"), fan));
        }
        if let Some(o) = report.series("sup_rarefaction").filter(|_| solver.uses_oracle()) {
            let worst = o
                .values
                .iter()
                .zip(&sup)
                .map(|(a, b)| a.map_or(0.0, |a| (a - b).abs()))
                .fold(0.0, f64::max);
            report.checks.push(Check::at_most("solver_agreement", worst, tol));
        }
        report.series.push(Series::new(&format!("sup_rarefaction{suffix}"), sup));
    }
    let resolution = if solver.uses_oracle() { 0.0 } else { config.delta };
    report.bounded_after("sup_rarefaction", ts[0], resolution);
    report.fit_last_decade("sup_rarefaction");
    Ok(report)
}

type RarefactionSeries = (Vec<f64>, Vec<f64>, Option<Vec<f64>>);

fn rarefaction_oracle_series(
    oracle: &HopfOracle,
    wave: &ReferenceWave,
    ts: &[f64],
    nonnegative: bool,
) -> Result<RarefactionSeries> {
    let ic = oracle.ic();
    let (ul, ur, p) = (ic.ul(), ic.ur(), ic.period());
    let w = ic.perturbation();
    let (alpha, beta) = (w.min_value(), w.max_value());
    let left = oracle.left_solution();
    let right = oracle.right_solution();
    let (lf, rf) = (PeriodicField::new(left.clone()), PeriodicField::new(right.clone()));
    let t_end = ts[ts.len() - 1];
    let xl = forward_characteristic_scaled(&lf, 0.0, t_end, CharKind::Maximal, CHAR_STEP, CHAR_STEP)?;
    let xr = forward_characteristic_scaled(&rf, 0.0, t_end, CharKind::Minimal, CHAR_STEP, CHAR_STEP)?;
    let mut sup = Vec::with_capacity(ts.len());
    let mut sandwich = Vec::with_capacity(ts.len());
    let mut fan = nonnegative.then(Vec::new);
    for &t in ts {
        // u = u_l left of t(ūl + α) and u = u_r right of t(ūr + β); u^R is
        // constant on both sides.
        let (a, b) = (t * (ul + alpha), t * (ur + beta));
        let near = oracle
            .deviation_extrema(t, a, b, |x| wave.eval(x, t, Side::Right), &[ul * t, ur * t], EXTREMA_TOL)?
            .max_abs();
        sup.push(
            near.max(periodic_deviation(&left, t, ul)?)
                .max(periodic_deviation(&right, t, ur)?),
        );
        let rep = divide_sandwich(oracle, &lf, &rf, ic, t, xl.at(t), xr.at(t), 512)?;
        sandwich.push(rep.worst());
        if let Some(fan) = fan.as_mut() {
            let window = Interval::new(a - p, b + p)?;
            fan.push(fan_mismatch(oracle, &lf, &rf, ic, t, window, 1024)?);
        }
    }
    Ok((sup, sandwich, fan))
}

fn rarefaction_ft_series(
    ic: &RiemannPerturbedIC,
    wave: &ReferenceWave,
    delta: f64,
    ts: &[f64],
    nonnegative: bool,
) -> Result<(Vec<f64>, Option<Vec<f64>>)> {
    let poly = riemann_polygon(ic, delta)?;
    let (ul, ur, p) = (ic.ul(), ic.ur(), ic.period());
    let t_end = ts[ts.len() - 1];
    let full = TrackedField::new(snapped_initial_state(ic, &poly, ft_window(&poly, p, t_end)?)?, &poly)?;
    let w = ic.perturbation();
    let left = periodic_tracked(w, ul, &poly)?;
    let right = periodic_tracked(w, ur, &poly)?;
    let f = ic.flux();
    let a_speed = f.deriv(ul + w.min_value())?;
    let b_speed = f.deriv(ur + w.max_value())?;
    let mut sup = Vec::with_capacity(ts.len());
    let mut fan = nonnegative.then(Vec::new);
    for &t in ts {
        let (a, b) = (t * a_speed - p, t * b_speed + p);
        let near = full.with_state(t, |u| {
            // u^R is monotone, so its extremes on a piece sit at the ends.
            let mut cuts = vec![a];
            cuts.extend(u.breakpoints_in(a, b));
            cuts.push(b);
            cuts.windows(2)
                .map(|c| {
                    let v = u.sample(0.5 * (c[0] + c[1]));
                    (v - wave.eval(c[0], t, Side::Right))
                        .abs()
                        .max((v - wave.eval(c[1], t, Side::Left)).abs())
                })
                .fold(0.0, f64::max)
        })?;
        let ls = left.state_at(t)?;
        let rs = right.state_at(t)?;
        sup.push(near.max(state_deviation(&ls, ul)).max(state_deviation(&rs, ur)));
        if let Some(fan) = fan.as_mut() {
            fan.push(fan_mismatch(&full, &left, &right, ic, t, Interval::new(a, b)?, 1024)?);
        }
    }
    Ok((sup, fan))
}

/// Periodic experiment: `sup u − ū` and `ū − inf u` against the optimal
/// envelope built from `z(t)`.
pub fn run_periodic_decay(config: &ExperimentConfig) -> Result<DecayReport> {
    let flux = config.flux()?;
    let w = config.profile()?;
    let p = w.period();
    let base = config.periodic_mean()?;
    let ubar = base + w.mean();
    let ts = config.samples()?;
    let mut report = DecayReport::new("periodic", config, ts.clone());
    let nf = normalize(&flux, ubar)?;
    let g = GPotential::new(nf.clone());
    let mut zs = Vec::with_capacity(ts.len());
    let mut bound_sup = Vec::with_capacity(ts.len());
    let mut bound_inf = Vec::with_capacity(ts.len());
    let mut residual = Vec::with_capacity(ts.len());
    for &t in &ts {
        match g.z_residual(p, t) {
            Ok((z, r)) => {
                zs.push(Some(z));
                residual.push(Some(r));
                bound_sup.push(nf.flux().inv_deriv(z / t).ok().map(|u| u - ubar));
                bound_inf.push(nf.flux().inv_deriv((z - p) / t).ok().map(|u| ubar - u));
            }
            Err(_) => {
                zs.push(None);
                residual.push(None);
                bound_sup.push(None);
                bound_inf.push(None);
            }
        }
    }
    let t_p = config.two_constant().map(|tc| tc.t_p(&flux)).transpose()?;
    report.detected_t = t_p;
    let solver = config.solver;
    let mut runs: Vec<(&str, Vec<f64>, Vec<f64>, f64)> = Vec::new();
    if solver.uses_oracle() {
        require_burgers(&flux)?;
        let o = PeriodicOracle::new(&w, base);
        let mut sup = Vec::with_capacity(ts.len());
        let mut inf = Vec::with_capacity(ts.len());
        for &t in &ts {
            let e = o.extrema(t, EXTREMA_TOL)?;
            sup.push(e.sup - ubar);
            inf.push(ubar - e.inf);
        }
        runs.push(("", sup, inf, ORACLE_TOL));
    }
    if solver.uses_fronttrack() {
        let poly = polygon(&flux, config.delta, base + w.min_value(), base + w.max_value())?;
        let field = periodic_tracked(&w, base, &poly)?;
        let mut sup = Vec::with_capacity(ts.len());
        let mut inf = Vec::with_capacity(ts.len());
        for &t in &ts {
            let (lo, hi) = field.with_state(t, |s| {
                s.values
                    .iter()
                    .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)))
            })?;
            sup.push(hi - ubar);
            inf.push(ubar - lo);
        }
        let suffix = if solver.uses_oracle() { "_ft" } else { "" };
        runs.push((suffix, sup, inf, ft_tol(config.delta)));
    }
    if runs.len() == 2 {
        let worst = (0..ts.len())
            .map(|i| (runs[0].1[i] - runs[1].1[i]).abs().max((runs[0].2[i] - runs[1].2[i]).abs()))
            .fold(0.0, f64::max);
        report.checks.push(Check::at_most("solver_agreement", worst, runs[1].3));
    }
    let excess = |vals: &[f64], bounds: &[Option<f64>], keep: &dyn Fn(f64) -> bool| {
        vals.iter()
            .zip(bounds)
            .zip(&ts)
            .filter(|(_, &t)| keep(t))
            .filter_map(|((v, b), _)| b.map(|b| v - b))
            .fold(0.0f64, f64::max)
    };
    for (suffix, sup, inf, tol) in &runs {
        let all = |_: f64| true;
        let worst = excess(sup, &bound_sup, &all).max(excess(inf, &bound_inf, &all));
        report.checks.push(Check::at_most(&format!("within_bound{suffix}"), worst, *tol));
        if let Some(tp) = t_p {
            let gap = sup
                .iter()
                .zip(&bound_sup)
                .chain(inf.iter().zip(&bound_inf))
                .zip(ts.iter().chain(&ts))
                .filter(|(_, &t)| t > tp)
                .filter_map(|((v, b), _)| b.map(|b| (v - b).abs()))
                .fold(0.0f64, f64::max);
            report.checks.push(Check::at_most(&format!("attained_after_t_p{suffix}"), gap, *tol));
        }
    }
    let (main_suffix, main_sup, main_inf, _) = &runs[0];
    let t_last = ts[ts.len() - 1];
    if w.is_zero() {
        report.notes.push("zero perturbation: no asymptote to compare".into());
    } else {
        let target = p / (2.0 * flux.second_deriv(ubar)?);
        let ratio = t_last * main_sup[main_sup.len() - 1] / target;
        report.notes.push(format!(
            "asymptote: t·(sup − ū) = {:.6} at t = {t_last} against p/(2f''(ū)) = {target:.6}",
            ratio * target
        ));
        report.checks.push(Check::at_most(&format!("asymptote_5pct{main_suffix}"), (ratio - 1.0).abs(), 0.05));
    }
    let r_worst = residual.iter().flatten().copied().fold(0.0, f64::max);
    report.checks.push(Check::at_most("z_residual", r_worst, 1e-12));
    let defined: Vec<f64> = zs.iter().flatten().copied().collect();
    if let (Some(first), Some(last)) = (defined.first(), defined.last()) {
        let (d0, d1) = ((first - 0.5 * p).abs(), (last - 0.5 * p).abs());
        report.checks.push(Check {
            name: "z_converges".into(),
            passed: d1 < d0 || d0 == 0.0,
            worst: d1,
            tolerance: d0,
        });
    }
    let (sup_name, inf_name) = if main_suffix.is_empty() {
        ("sup_dev".to_string(), "inf_dev".to_string())
    } else {
        (format!("sup_dev{main_suffix}"), format!("inf_dev{main_suffix}"))
    };
    report.series.push(Series::new(&sup_name, main_sup.clone()));
    report.series.push(Series::new(&inf_name, main_inf.clone()));
    if let Some((suffix, sup, inf, _)) = runs.get(1) {
        report.series.push(Series::new(&format!("sup_dev{suffix}"), sup.clone()));
        report.series.push(Series::new(&format!("inf_dev{suffix}"), inf.clone()));
    }
    report.series.push(Series::partial("bound_sup", bound_sup));
    report.series.push(Series::partial("bound_inf", bound_inf));
    report.series.push(Series::partial("z", zs));
    report.series.push(Series::partial("z_residual", residual));
    let from = t_p.unwrap_or(ts[0]);
    let resolution = if solver.uses_oracle() { 0.0 } else { config.delta };
    report.bounded_after(&sup_name, from, resolution);
    report.bounded_after(&inf_name, from, resolution);
    report.fit_last_decade(&sup_name);
    Ok(report)
}

/// L¹ distance per period between front tracking and the oracle, one
/// series per `δ` in `deltas`. The window covers the wave and two periods
/// on either side; checks ask for distances `≤ 5δ` and, for each halving
/// of `δ`, a reduction factor in `[1.5, 3]`.
pub fn oracle_diff(config: &ExperimentConfig, deltas: &[f64]) -> Result<DecayReport> {
    let ic = config.riemann_ic()?;
    require_burgers(ic.flux())?;
    if deltas.is_empty() || deltas.iter().any(|d| !(*d > 0.0)) {
        return Err(Error::Config("oracle-diff needs positive mesh sizes".into()));
    }
    let ts = config.samples()?;
    let mut report = DecayReport::new("oracle-diff", config, ts.clone());
    let oracle = HopfOracle::new(ic.clone())?;
    let p = ic.period();
    let f = ic.flux();
    let speeds = [f.deriv(ic.ul())?, f.deriv(ic.ur())?, ic.shock_speed()];
    let (s_lo, s_hi) = speeds.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &s| (a.min(s), b.max(s)));
    let t_end = ts[ts.len() - 1];
    let mut all = Vec::with_capacity(deltas.len());
    for &delta in deltas {
        let poly = riemann_polygon(&ic, delta)?;
        let field = TrackedField::new(snapped_initial_state(&ic, &poly, ft_window(&poly, p, t_end)?)?, &poly)?;
        let mut dist = Vec::with_capacity(ts.len());
        for &t in &ts {
            let (a, b) = (s_lo * t - 2.0 * p, s_hi * t + 2.0 * p);
            let l1 = field.with_state(t, |u| {
                u.l1_distance(a, b, |x0, x1, v| {
                    let mut failed = None;
                    let q = integrate(
                        |x| match oracle.value(x, t) {
                            Ok(o) => (o - v).abs(),
                            Err(e) => {
                                failed = Some(e);
                                0.0
                            }
                        },
                        x0,
                        x1,
                        QuadOptions::abs(1e-12 * (1.0 + x1 - x0)),
                    );
                    match failed {
                        Some(e) => Err(e),
                        None => Ok(q.value),
                    }
                })
            })??;
            dist.push(l1 / ((b - a) / p));
        }
        let worst = dist.iter().copied().fold(0.0, f64::max);
        report.checks.push(Check::at_most(&format!("l1_within_5delta[{delta}]"), worst, 5.0 * delta));
        report.series.push(Series::new(&format!("l1_per_period[{delta}]"), dist.clone()));
        all.push((delta, dist));
    }
    for pair in all.windows(2) {
        let ((d0, a), (d1, b)) = (&pair[0], &pair[1]);
        if (d0 / d1 - 2.0).abs() > 1e-12 {
            continue;
        }
        let mut worst = 0.0f64;
        let mut ratios = Vec::with_capacity(ts.len());
        for (x, y) in a.iter().zip(b) {
            let r = x / y;
            ratios.push(r);
            worst = worst.max(1.5 - r).max(r - 3.0);
        }
        report.checks.push(Check::at_most(&format!("halving_ratio[{d0}->{d1}]"), worst.max(0.0), 0.0));
        report.series.push(Series::new(&format!("ratio[{d0}->{d1}]"), ratios));
    }
    Ok(report)
}
