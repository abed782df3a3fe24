//! Generalized characteristics on top of any entropy solution evaluator.

use std::sync::Mutex;

use serde::{Deserialize, Serialize};

use crate::error::{precondition, Error, Result};
use crate::flux::{rh_speed, ConvexFlux, Interval};
use crate::fronttrack::{FluxPolygon, FrontTracker, PiecewiseConstantState};
use crate::oracle::{HopfOracle, PeriodicOracle, Side};
use crate::profile::RiemannPerturbedIC;
use crate::quad::{integrate_panels, QuadOptions};
use crate::roots::bisect_predicate;

/// Read access to an entropy solution `u(x, t)`.
pub trait EntropyField {
    fn flux(&self) -> &ConvexFlux;

    /// `(u(x−, t), u(x+, t))`; at `t = 0` the initial data.
    fn one_sided(&self, x: f64, t: f64) -> Result<(f64, f64)>;

    /// `∫ₐᵇ u(x, t) dx`, exact at `t = 0`.
    fn integral(&self, a: f64, b: f64, t: f64) -> Result<f64>;

    /// Bounds on all values taken, from the maximum principle.
    fn value_range(&self) -> (f64, f64);

    /// Jumps at or below this size are treated as continuity.
    fn jump_tolerance(&self) -> f64 {
        1e-9
    }

    /// Right-continuous value.
    fn value(&self, x: f64, t: f64) -> Result<f64> {
        Ok(self.one_sided(x, t)?.1)
    }
}

impl EntropyField for HopfOracle {
    fn flux(&self) -> &ConvexFlux {
        self.ic().flux()
    }

    fn one_sided(&self, x: f64, t: f64) -> Result<(f64, f64)> {
        if t == 0.0 {
            return Ok((self.ic().eval_left(x), self.ic().eval(x)));
        }
        let m = self.minimizers(t, x)?;
        Ok((m.velocity(x, t, Side::Left), m.velocity(x, t, Side::Right)))
    }

    fn integral(&self, a: f64, b: f64, t: f64) -> Result<f64> {
        if t == 0.0 {
            Ok(self.ic().integral(a, b))
        } else {
            HopfOracle::integral(self, a, b, t)
        }
    }

    fn value_range(&self) -> (f64, f64) {
        self.ic().value_range()
    }
}

/// A periodic Burgers oracle seen as an entropy field.
#[derive(Debug, Clone)]
pub struct PeriodicField {
    oracle: PeriodicOracle,
    flux: ConvexFlux,
}

impl PeriodicField {
    pub fn new(oracle: PeriodicOracle) -> Self {
        PeriodicField {
            oracle,
            flux: ConvexFlux::burgers(),
        }
    }

    pub fn oracle(&self) -> &PeriodicOracle {
        &self.oracle
    }
}

impl EntropyField for PeriodicField {
    fn flux(&self) -> &ConvexFlux {
        &self.flux
    }

    fn one_sided(&self, x: f64, t: f64) -> Result<(f64, f64)> {
        let o = &self.oracle;
        if t == 0.0 {
            let w = o.perturbation();
            return Ok((o.ubar() + w.eval_left(x), o.ubar() + w.eval(x)));
        }
        Ok((o.value(x, t, Side::Left)?, o.value(x, t, Side::Right)?))
    }

    fn integral(&self, a: f64, b: f64, t: f64) -> Result<f64> {
        let o = &self.oracle;
        if t == 0.0 {
            Ok(o.ubar() * (b - a) + o.perturbation().integral(a, b))
        } else {
            o.integral(a, b, t)
        }
    }

    fn value_range(&self) -> (f64, f64) {
        let w = self.oracle.perturbation();
        (self.oracle.ubar() + w.min_value(), self.oracle.ubar() + w.max_value())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum WaveKind {
    Shock,
    Rarefaction,
}

/// The unperturbed Riemann solution: a shock `u^S` or a centred fan `u^R`.
#[derive(Debug, Clone)]
pub struct ReferenceWave {
    kind: WaveKind,
    ul: f64,
    ur: f64,
    speed: f64,
    flux: ConvexFlux,
}

impl ReferenceWave {
    /// `ul ≥ ur` gives a shock (a constant when equal), otherwise a fan.
    pub fn new(flux: &ConvexFlux, ul: f64, ur: f64) -> Result<Self> {
        let speed = if ul == ur { flux.deriv(ul)? } else { rh_speed(flux, ul, ur)? };
        Ok(ReferenceWave {
            kind: if ul >= ur { WaveKind::Shock } else { WaveKind::Rarefaction },
            ul,
            ur,
            speed,
            flux: flux.clone(),
        })
    }

    pub fn kind(&self) -> WaveKind {
        self.kind
    }

    pub fn ul(&self) -> f64 {
        self.ul
    }

    pub fn ur(&self) -> f64 {
        self.ur
    }

    /// Shock speed `s` (the Rankine–Hugoniot chord slope for fans too).
    pub fn speed(&self) -> f64 {
        self.speed
    }

    pub fn eval(&self, x: f64, t: f64, side: Side) -> f64 {
        let (l, r) = self.one_sided_raw(x, t);
        match side {
            Side::Left => l,
            Side::Right => r,
        }
    }

    fn one_sided_raw(&self, x: f64, t: f64) -> (f64, f64) {
        if t == 0.0 || self.kind == WaveKind::Shock {
            let c = self.speed * t;
            let l = if x <= c { self.ul } else { self.ur };
            let r = if x < c { self.ul } else { self.ur };
            return (l, r);
        }
        let v = x / t;
        let u = if v <= self.flux.df_raw(self.ul) {
            self.ul
        } else if v >= self.flux.df_raw(self.ur) {
            self.ur
        } else {
            self.flux.inv_deriv(v).unwrap_or(if v < 0.0 { self.ul } else { self.ur })
        };
        (u, u)
    }

    // ∫ (f′)⁻¹(v) dv = v·h(v) − f(h(v)) with h = (f′)⁻¹.
    fn fan_primitive(&self, x: f64, t: f64) -> f64 {
        let v = (x / t).clamp(self.flux.df_raw(self.ul), self.flux.df_raw(self.ur));
        let h = if v <= self.flux.df_raw(self.ul) {
            self.ul
        } else if v >= self.flux.df_raw(self.ur) {
            self.ur
        } else {
            self.flux.inv_deriv(v).unwrap_or(self.ul)
        };
        let inner = t * (v * h - self.flux.f_raw(h));
        let lo = self.flux.df_raw(self.ul) * t;
        let hi = self.flux.df_raw(self.ur) * t;
        // Constant states outside the fan.
        if x < lo {
            inner + self.ul * (x - lo)
        } else if x > hi {
            inner + self.ur * (x - hi)
        } else {
            inner
        }
    }
}

impl EntropyField for ReferenceWave {
    fn flux(&self) -> &ConvexFlux {
        &self.flux
    }

    fn one_sided(&self, x: f64, t: f64) -> Result<(f64, f64)> {
        Ok(self.one_sided_raw(x, t))
    }

    fn integral(&self, a: f64, b: f64, t: f64) -> Result<f64> {
        if t == 0.0 || self.kind == WaveKind::Shock {
            let c = self.speed * t;
            let part = |x: f64| if x <= c { self.ul * (x - c) } else { self.ur * (x - c) };
            return Ok(part(b) - part(a));
        }
        Ok(self.fan_primitive(b, t) - self.fan_primitive(a, t))
    }

    fn value_range(&self) -> (f64, f64) {
        (self.ul.min(self.ur), self.ul.max(self.ur))
    }
}

struct TrackCache {
    tracker: FrontTracker,
    state: Option<PiecewiseConstantState>,
}

/// Front tracking solution advanced lazily to the requested time.
///
/// Requests are cheapest in nondecreasing time order; an earlier time
/// restarts the evolution from the initial state.
pub struct TrackedField {
    flux: ConvexFlux,
    poly: FluxPolygon,
    initial: PiecewiseConstantState,
    range: (f64, f64),
    cache: Mutex<TrackCache>,
}

impl std::fmt::Debug for TrackedField {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("TrackedField")
            .field("delta", &self.poly.delta())
            .field("initial_pieces", &self.initial.piece_count())
            .finish()
    }
}

impl TrackedField {
    pub fn new(initial: PiecewiseConstantState, poly: &FluxPolygon) -> Result<Self> {
        let tracker = FrontTracker::new(&initial, poly)?;
        let lo = initial.values.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = initial.values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        Ok(TrackedField {
            flux: poly.flux().clone(),
            poly: poly.clone(),
            initial,
            range: (lo, hi),
            cache: Mutex::new(TrackCache { tracker, state: None }),
        })
    }

    pub fn poly(&self) -> &FluxPolygon {
        &self.poly
    }

    pub fn initial(&self) -> &PiecewiseConstantState {
        &self.initial
    }

    /// Runs `f` on the state at time `t`.
    pub fn with_state<R>(&self, t: f64, f: impl FnOnce(&PiecewiseConstantState) -> R) -> Result<R> {
        if t < self.initial.time {
            return Err(precondition(format!("t = {t} precedes the initial state")));
        }
        let mut c = self.cache.lock().map_err(|_| Error::Internal("poisoned tracker".into()))?;
        if c.state.as_ref().is_some_and(|s| s.time == t) {
            return Ok(f(c.state.as_ref().expect("checked")));
        }
        if t < c.tracker.time() {
            c.tracker = FrontTracker::new(&self.initial, &self.poly)?;
        }
        c.tracker.advance_to(t)?;
        let s = c.tracker.state();
        let out = f(&s);
        c.state = Some(s);
        Ok(out)
    }

    pub fn state_at(&self, t: f64) -> Result<PiecewiseConstantState> {
        self.with_state(t, |s| s.clone())
    }
}

impl EntropyField for TrackedField {
    fn flux(&self) -> &ConvexFlux {
        &self.flux
    }

    fn one_sided(&self, x: f64, t: f64) -> Result<(f64, f64)> {
        self.with_state(t, |s| (s.sample_left(x), s.sample(x)))
    }

    fn integral(&self, a: f64, b: f64, t: f64) -> Result<f64> {
        self.with_state(t, |s| s.integral(a, b))
    }

    fn value_range(&self) -> (f64, f64) {
        self.range
    }

    fn jump_tolerance(&self) -> f64 {
        0.5 * self.poly.delta()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CharKind {
    Minimal,
    Maximal,
}

/// A backward extremal characteristic: a straight line into the past.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CharLine {
    pub anchor_x: f64,
    pub anchor_t: f64,
    pub slope: f64,
    /// The one-sided value carried along the line.
    pub value: f64,
    pub kind: CharKind,
}

impl CharLine {
    pub fn position(&self, t: f64) -> f64 {
        self.anchor_x - self.slope * (self.anchor_t - t)
    }

    /// Intersection with `t = 0`.
    pub fn foot(&self) -> f64 {
        self.position(0.0)
    }
}

/// Minimal (slope `f′(u(x̄−))`) or maximal (slope `f′(u(x̄+))`) backward
/// characteristic through `(x̄, t̄)`.
pub fn backward_extremal<F: EntropyField + ?Sized>(field: &F, x: f64, t: f64, kind: CharKind) -> Result<CharLine> {
    if !(t > 0.0) {
        return Err(precondition(format!("anchor time must be positive, got {t}")));
    }
    let (l, r) = field.one_sided(x, t)?;
    let value = match kind {
        CharKind::Minimal => l,
        CharKind::Maximal => r,
    };
    Ok(CharLine {
        anchor_x: x,
        anchor_t: t,
        slope: field.flux().deriv(value)?,
        value,
        kind,
    })
}

/// Largest deviation of the solution from the carried value at `samples`
/// interior times of the line; either one-sided limit may match.
pub fn verify_line<F: EntropyField + ?Sized>(field: &F, line: &CharLine, samples: usize) -> Result<f64> {
    let mut worst = 0.0f64;
    for j in 0..samples {
        let t = line.anchor_t * (j as f64 + 0.5) / samples as f64;
        let (l, r) = field.one_sided(line.position(t), t)?;
        worst = worst.max((l - line.value).abs().min((r - line.value).abs()));
    }
    Ok(worst)
}

/// Sampled forward characteristic.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CharPath {
    pub times: Vec<f64>,
    pub positions: Vec<f64>,
}

impl CharPath {
    /// Linear interpolation in time.
    pub fn at(&self, t: f64) -> f64 {
        let i = self.times.partition_point(|&s| s < t);
        if i == 0 {
            return self.positions[0];
        }
        if i >= self.times.len() {
            return *self.positions.last().expect("non-empty");
        }
        let (t0, t1) = (self.times[i - 1], self.times[i]);
        let w = (t - t0) / (t1 - t0);
        self.positions[i - 1] + w * (self.positions[i] - self.positions[i - 1])
    }
}

/// Forward characteristic from `(x0, 0)` with the default step `0.01`.
pub fn forward_characteristic<F: EntropyField + ?Sized>(field: &F, x0: f64, t_end: f64, kind: CharKind) -> Result<CharPath> {
    forward_characteristic_with_step(field, x0, t_end, kind, 0.01)
}

/// Backward Euler on the differential inclusion `ẋ ∈ [f′(u(x+)), f′(u(x−))]`.
///
/// Each step solves `y − x ∈ Δt·[f′(u(y+, t′)), f′(u(y−, t′))]` at the new
/// time `t′`. Because `∂ₓ f′(u) ≤ 1/t′` and `Δt ≤ t′`, the map
/// `y ↦ y − Δt·f′(u(y, t′))` is nondecreasing, so the solution set is an
/// interval found by bisection; its left end gives the minimal and its right
/// end the maximal characteristic. A path riding a shock lands on the shock
/// exactly, and straight characteristics are reproduced without error.
pub fn forward_characteristic_with_step<F: EntropyField + ?Sized>(
    field: &F,
    x0: f64,
    t_end: f64,
    kind: CharKind,
    max_step: f64,
) -> Result<CharPath> {
    march(field, x0, t_end, |_| max_step, |field, x, t1, dt, _| step_root(field, x, t1, dt, kind))
}

/// As [`forward_characteristic_with_step`] with `Δt = max(min_step, rel_step·t)`,
/// for long horizons. Order between paths, and hence confinement between
/// divides, holds for any step since `Δt ≤ t′` always.
pub fn forward_characteristic_scaled<F: EntropyField + ?Sized>(
    field: &F,
    x0: f64,
    t_end: f64,
    kind: CharKind,
    min_step: f64,
    rel_step: f64,
) -> Result<CharPath> {
    if !(rel_step >= 0.0) {
        return Err(precondition("relative step must be nonnegative"));
    }
    march(
        field,
        x0,
        t_end,
        |t| min_step.max(rel_step * t),
        |field, x, t1, dt, _| step_root(field, x, t1, dt, kind),
    )
}

/// Forward characteristic leaving `(x0, 0)` with slope `slope` when the
/// inclusion allows a choice (a centred fan at `x0`); later steps keep the
/// previous velocity whenever the solution set is not a single point.
pub fn forward_characteristic_through<F: EntropyField + ?Sized>(
    field: &F,
    x0: f64,
    slope: f64,
    t_end: f64,
    max_step: f64,
) -> Result<CharPath> {
    let mut velocity = slope;
    march(field, x0, t_end, |_| max_step, |field, x, t1, dt, _| {
        let lo = step_root(field, x, t1, dt, CharKind::Minimal)?;
        let hi = step_root(field, x, t1, dt, CharKind::Maximal)?;
        let y = (x + dt * velocity).clamp(lo.min(hi), hi.max(lo));
        velocity = (y - x) / dt;
        Ok(y)
    })
}

fn march<F, D, S>(field: &F, x0: f64, t_end: f64, step_size: D, mut step: S) -> Result<CharPath>
where
    F: EntropyField + ?Sized,
    D: Fn(f64) -> f64,
    S: FnMut(&F, f64, f64, f64, f64) -> Result<f64>,
{
    if !(step_size(0.0) > 0.0) || !(t_end >= 0.0) {
        return Err(precondition("step must be positive and t_end nonnegative"));
    }
    let mut times = vec![0.0];
    let mut positions = vec![x0];
    let (mut t, mut x) = (0.0f64, x0);
    while t < t_end {
        let mut t1 = t + step_size(t);
        if t1 > t_end - 1e-12 * t_end.max(1.0) {
            t1 = t_end;
        }
        x = step(field, x, t1, t1 - t, t)?;
        t = t1;
        times.push(t);
        positions.push(x);
    }
    Ok(CharPath { times, positions })
}

fn step_root<F: EntropyField + ?Sized>(field: &F, x: f64, t1: f64, dt: f64, kind: CharKind) -> Result<f64> {
    let flux = field.flux();
    let (vlo, vhi) = field.value_range();
    let pad = 1e-9 * (1.0 + x.abs());
    let lo = x + dt * flux.deriv(vlo)? - pad;
    let hi = x + dt * flux.deriv(vhi)? + pad;
    // Inside a centred fan the inclusion holds with equality up to rounding,
    // so the comparison gets a little slack towards the requested end.
    let left_of_root = |y: f64| -> Result<bool> {
        let (um, up) = field.one_sided(y, t1)?;
        let slack = 16.0 * f64::EPSILON * (1.0 + x.abs() + y.abs());
        Ok(match kind {
            CharKind::Minimal => y - x < dt * flux.df_raw(up) - slack,
            CharKind::Maximal => y - x <= dt * flux.df_raw(um) + slack,
        })
    };
    // Zero tolerance: bisect down to adjacent floats.
    let (a, b) = bisect_predicate(left_of_root, lo, hi, 0.0)?;
    Ok(0.5 * (a + b))
}

/// Terms of the triangle identity for two solutions and their backward
/// characteristics from a common point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TriangleReport {
    pub lhs_left_term: f64,
    pub lhs_right_term: f64,
    pub rhs: f64,
    pub residual: f64,
    pub b: f64,
    pub b_tilde: f64,
    pub foot: f64,
    pub foot_tilde: f64,
}

/// Checks
///
/// ```text
/// ∫₀ᵗ̄ [f(b) − f(ũ(ξ−)) − f′(b)(b − ũ(ξ−))] dt + ∫₀ᵗ̄ [f(b̃) − f(u(ξ̃+)) − f′(b̃)(b̃ − u(ξ̃+))] dt
///     = ∫_{ξ̃(0)}^{ξ(0)} (u₀ − ũ₀) dx
/// ```
///
/// where `ξ` (kind `kinds.0`) belongs to `u` and `ξ̃` (kind `kinds.1`) to `ũ`.
/// Both integrands are `≤ 0` by convexity.
pub fn triangle_residual<U, V>(u: &U, ut: &V, x: f64, t: f64, kinds: (CharKind, CharKind)) -> Result<TriangleReport>
where
    U: EntropyField + ?Sized,
    V: EntropyField + ?Sized,
{
    let xi = backward_extremal(u, x, t, kinds.0)?;
    let xt = backward_extremal(ut, x, t, kinds.1)?;
    if xt.foot() > xi.foot() + 1e-12 * (1.0 + xi.foot().abs()) {
        return Err(precondition(format!(
            "feet out of order: ξ̃(0) = {} > ξ(0) = {}",
            xt.foot(),
            xi.foot()
        )));
    }
    let f = u.flux();
    let ft = ut.flux();
    let (b, bt) = (xi.value, xt.value);
    let opts = QuadOptions {
        abs_tol: 1e-10,
        rel_tol: 0.0,
        max_evaluations: 2_000_000,
    };
    let mut failure: Option<Error> = None;
    let left = integrate_panels(
        |s| match ut.one_sided(xi.position(s), s) {
            Ok((v, _)) => ft.f_raw(b) - ft.f_raw(v) - ft.df_raw(b) * (b - v),
            Err(e) => {
                failure.get_or_insert(e);
                0.0
            }
        },
        0.0,
        t,
        256,
        opts,
    );
    let right = integrate_panels(
        |s| match u.one_sided(xt.position(s), s) {
            Ok((_, v)) => f.f_raw(bt) - f.f_raw(v) - f.df_raw(bt) * (bt - v),
            Err(e) => {
                failure.get_or_insert(e);
                0.0
            }
        },
        0.0,
        t,
        256,
        opts,
    );
    if let Some(e) = failure {
        return Err(e);
    }
    let (a0, a1) = (xt.foot(), xi.foot());
    let rhs = u.integral(a0, a1, 0.0)? - ut.integral(a0, a1, 0.0)?;
    Ok(TriangleReport {
        lhs_left_term: left.value,
        lhs_right_term: right.value,
        rhs,
        residual: left.value + right.value - rhs,
        b,
        b_tilde: bt,
        foot: a1,
        foot_tilde: a0,
    })
}

/// Divide `a + k p + f′(ū) t` of the periodic solution with mean `ū`.
pub fn divide_position(ic: &RiemannPerturbedIC, ubar: f64, k: i64, t: f64) -> Result<f64> {
    let a = ic.perturbation().argmin_primitive();
    Ok(a + k as f64 * ic.period() + ic.flux().deriv(ubar)? * t)
}

/// Predicted `X(T) − sT` from the conservation balance over the region
/// between the divides `Γ_l^{−N}` and `Γ_r^N`:
///
/// ```text
/// −1/(ūl − ūr) · [∫_{Γ_l^{−N}(T)}^{X_T} (u_l − ūl) + ∫_{X_T}^{Γ_r^N(T)} (u_r − ūr)]
/// ```
pub fn shock_offset<L, R>(ic: &RiemannPerturbedIC, left: &L, right: &R, x_t: f64, t: f64, n: i64) -> Result<f64>
where
    L: EntropyField + ?Sized,
    R: EntropyField + ?Sized,
{
    ic.require_shock()?;
    let (ul, ur) = (ic.ul(), ic.ur());
    let gl0 = divide_position(ic, ul, -n, 0.0)?;
    let gr0 = divide_position(ic, ur, n, 0.0)?;
    let gl = divide_position(ic, ul, -n, t)?;
    let gr = divide_position(ic, ur, n, t)?;
    if !(gl0 < 0.0 && 0.0 < gr0 && gl < x_t && x_t < gr) {
        return Err(precondition(format!(
            "N = {n} too small: need Γ_l^-N < X < Γ_r^N, got {gl} < {x_t} < {gr}"
        )));
    }
    let il = left.integral(gl, x_t, t)? - ul * (x_t - gl);
    let ir = right.integral(x_t, gr, t)? - ur * (gr - x_t);
    Ok(-(il + ir) / (ul - ur))
}

/// Burgers form of [`shock_offset`]: `1/(ūl − ūr) ∫_{X−ūl T}^{X−ūr T} w(y, T) dy`
/// with `w` the zero-mean periodic solution.
pub fn shock_offset_galilean(w: &PeriodicOracle, ul: f64, ur: f64, x_t: f64, t: f64) -> Result<f64> {
    if w.ubar() != 0.0 {
        return Err(precondition("the Galilean route needs the zero-mean periodic solution"));
    }
    if !(ul > ur) {
        return Err(precondition("shock data need ūl > ūr"));
    }
    if t == 0.0 {
        return Ok(0.0);
    }
    Ok(w.integral(x_t - ul * t, x_t - ur * t, t)? / (ul - ur))
}

/// `max |u − u_l|` left of the shock and `max |u − u_r|` right of it over
/// `n` samples of `window`, skipping `|x − X| < band`.
pub fn glue_check<U, L, R>(u: &U, ul: &L, ur: &R, x_shock: f64, t: f64, window: Interval, n: usize, band: f64) -> Result<f64>
where
    U: EntropyField + ?Sized,
    L: EntropyField + ?Sized,
    R: EntropyField + ?Sized,
{
    let mut worst = 0.0f64;
    for j in 0..n {
        let x = window.lo + window.width() * (j as f64 + 0.5) / n as f64;
        if (x - x_shock).abs() < band {
            continue;
        }
        let v = u.value(x, t)?;
        let reference = if x < x_shock { ul.value(x, t)? } else { ur.value(x, t)? };
        worst = worst.max((v - reference).abs());
    }
    Ok(worst)
}

/// Rarefaction confinement between divides.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SandwichReport {
    pub t: f64,
    /// `max |u − u_l|` left of `Γ_l^{−1}(t)`.
    pub left_glue: f64,
    /// `max |u − u_r|` right of `Γ_r^0(t)`.
    pub right_glue: f64,
    /// Largest violation of `(x−a)/t ≤ f′(u) ≤ (x−a+p)/t` between the divides.
    pub claim_excess: f64,
    /// Largest violation of `Γ_l^{−1} ≤ X_{l+} ≤ Γ_l^0` and `Γ_r^{−1} ≤ X_{r−} ≤ Γ_r^0`.
    pub divide_excess: f64,
}

impl SandwichReport {
    pub fn worst(&self) -> f64 {
        self.left_glue.max(self.right_glue).max(self.claim_excess).max(self.divide_excess)
    }
}

/// Structural checks for rarefaction data at time `t`; `x_l_plus` and
/// `x_r_minus` are the extremal forward characteristics of `u_l` and `u_r`
/// from the origin at that time.
#[allow(clippy::too_many_arguments)]
pub fn divide_sandwich<U, L, R>(
    u: &U,
    ul: &L,
    ur: &R,
    ic: &RiemannPerturbedIC,
    t: f64,
    x_l_plus: f64,
    x_r_minus: f64,
    n: usize,
) -> Result<SandwichReport>
where
    U: EntropyField + ?Sized,
    L: EntropyField + ?Sized,
    R: EntropyField + ?Sized,
{
    ic.require_rarefaction()?;
    let p = ic.period();
    let a = ic.perturbation().argmin_primitive();
    // The left pair must bracket the origin from (0, p]: with a minimizer
    // at 0 the maximal characteristic of u_l from the origin hugs the divide
    // through 0 from the right.
    let shift = if a == 0.0 { p } else { 0.0 };
    let f = ic.flux();
    let gl_m1 = divide_position(ic, ic.ul(), -1, t)? + shift;
    let gl_0 = divide_position(ic, ic.ul(), 0, t)? + shift;
    let gr_m1 = divide_position(ic, ic.ur(), -1, t)?;
    let gr_0 = divide_position(ic, ic.ur(), 0, t)?;
    let band = 1e-9 * (1.0 + t);
    let mut left_glue = 0.0f64;
    let mut right_glue = 0.0f64;
    for j in 0..n {
        let s = 3.0 * p * (j as f64 + 0.5) / n as f64;
        let x = gl_m1 - s;
        if gl_m1 - x > band {
            left_glue = left_glue.max((u.value(x, t)? - ul.value(x, t)?).abs());
        }
        let x = gr_0 + s;
        if x - gr_0 > band {
            right_glue = right_glue.max((u.value(x, t)? - ur.value(x, t)?).abs());
        }
    }
    let mut claim_excess = 0.0f64;
    for j in 0..n {
        let x = gl_m1 + (gr_0 - gl_m1) * (j as f64 + 0.5) / n as f64;
        let (l, r) = u.one_sided(x, t)?;
        for v in [l, r] {
            let s = f.df_raw(v);
            claim_excess = claim_excess.max((x - a) / t - s).max(s - (x - a - shift + p) / t);
        }
    }
    let divide_excess = [gl_m1 - x_l_plus, x_l_plus - gl_0, gr_m1 - x_r_minus, x_r_minus - gr_0]
        .into_iter()
        .fold(0.0f64, f64::max);
    Ok(SandwichReport {
        t,
        left_glue,
        right_glue,
        claim_excess: claim_excess.max(0.0),
        divide_excess,
    })
}

/// For data with a nonnegative primitive: largest deviation from
/// `u_l` left of `f′(ūl)t`, `(f′)⁻¹(x/t)` inside the fan and `u_r` right of
/// `f′(ūr)t`, over `n` samples spread across `window`.
pub fn fan_mismatch<U, L, R>(u: &U, ul: &L, ur: &R, ic: &RiemannPerturbedIC, t: f64, window: Interval, n: usize) -> Result<f64>
where
    U: EntropyField + ?Sized,
    L: EntropyField + ?Sized,
    R: EntropyField + ?Sized,
{
    ic.require_rarefaction()?;
    let f = ic.flux();
    let lo = f.deriv(ic.ul())? * t;
    let hi = f.deriv(ic.ur())? * t;
    let mut worst = 0.0f64;
    let mut check = |x: f64| -> Result<()> {
        let v = u.value(x, t)?;
        let reference = if x < lo {
            ul.value(x, t)?
        } else if x > hi {
            ur.value(x, t)?
        } else {
            f.inv_deriv(x / t)?
        };
        worst = worst.max((v - reference).abs());
        Ok(())
    };
    for j in 0..n {
        check(lo + (hi - lo) * (j as f64 + 0.5) / n as f64)?;
        check(window.lo + window.width() * (j as f64 + 0.5) / n as f64)?;
    }
    Ok(worst)
}

#[cfg(test)]
mod tests;
