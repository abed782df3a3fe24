//! Exact entropy solutions of Burgers' equation through the Hopf potentials
//!
//! ```text
//! F(t, x, y) = (x − y)² / (2t) + ∫₀ʸ u₀
//! ```
//!
//! For piecewise constant or linear data `F` is piecewise quadratic in `y`
//! with known breakpoints, so every minimization below is exact up to
//! rounding: each quadratic piece is minimized in closed form and the pieces
//! are compared.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use crate::error::{precondition, Error, Result};
use crate::flux::FluxKind;
use crate::profile::{PeriodicProfile, RiemannPerturbedIC};
use crate::quad::{integrate_with_breaks, QuadOptions};
use crate::roots::bisect_predicate;

/// Potential values closer than this count as tied minima.
pub const TIE_TOLERANCE: f64 = 1e-10;

/// Which one-sided limit of a possibly discontinuous solution to return.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Side {
    /// `u(x−, t)`.
    Left,
    /// `u(x+, t)`.
    Right,
}

/// Which potential: `F_l` (data `ūl + w₀` everywhere), `F_r`, or the joined `F`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    Left,
    Right,
    Joined,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Constraint {
    NonPositive,
    NonNegative,
    All,
}

/// Leftmost and rightmost global minimizers and the minimum value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExtremalMinimizers {
    pub y_star_low: f64,
    pub y_star_high: f64,
    pub min_value: f64,
}

impl ExtremalMinimizers {
    /// `(x − Y)/t` with the leftmost minimizer for the left limit.
    pub fn velocity(&self, x: f64, t: f64, side: Side) -> f64 {
        let y = match side {
            Side::Left => self.y_star_low,
            Side::Right => self.y_star_high,
        };
        (x - y) / t
    }
}

/// Endpoints of the shock set at time `t`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShockInterval {
    pub t: f64,
    pub x_low: f64,
    pub x_high: f64,
    pub merged: bool,
}

impl ShockInterval {
    pub fn width(&self) -> f64 {
        self.x_high - self.x_low
    }
}

fn check_time(t: f64) -> Result<()> {
    if t > 0.0 && t.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain {
            what: "t",
            value: t,
            lo: 0.0,
            hi: f64::INFINITY,
        })
    }
}

/// One potential `(x−y)²/(2t) + c·y + ∫₀ʸ w₀` on a window of `y`.
#[derive(Clone, Copy)]
struct Quadratics<'a> {
    w: &'a PeriodicProfile,
    c: f64,
    t: f64,
    x: f64,
}

/// A maximal interval of `y` on which the potential is a single quadratic.
#[derive(Debug, Clone, Copy)]
struct Segment {
    id: i64,
    a: f64,
    b: f64,
    y0: f64,
    w_y0: f64,
    c0: f64,
    c1: f64,
}

impl<'a> Quadratics<'a> {
    fn value_on(&self, s: &Segment, y: f64) -> f64 {
        if y == 0.0 {
            return self.x * self.x / (2.0 * self.t);
        }
        let d = y - s.y0;
        let e = self.x - y;
        e * e / (2.0 * self.t) + self.c * y + s.w_y0 + s.c0 * d + 0.5 * s.c1 * d * d
    }

    fn value(&self, y: f64) -> f64 {
        if y == 0.0 {
            return self.x * self.x / (2.0 * self.t);
        }
        let e = self.x - y;
        e * e / (2.0 * self.t) + self.c * y + self.w.integral_from_zero(y)
    }

    /// `F'' = 1/t + w₀'` on the segment.
    fn curvature(&self, s: &Segment) -> f64 {
        1.0 / self.t + s.c1
    }

    /// Unclipped stationary point of the segment's quadratic.
    fn vertex(&self, s: &Segment) -> f64 {
        s.y0 + ((self.x - s.y0) / self.t - self.c - s.c0) / self.curvature(s)
    }

    /// Visits the quadratic pieces covering `[lo, hi]`.
    fn for_each_segment(&self, lo: f64, hi: f64, mut visit: impl FnMut(&Segment)) {
        if !(lo <= hi) {
            return;
        }
        let w = self.w;
        let p = w.period();
        let pieces = w.pieces();
        let n = pieces.len();
        let (k, mut idx, _) = w.locate(lo);
        let mut k = k;
        loop {
            let piece = &pieces[idx];
            let base = k * p;
            let y0 = base + piece.start;
            let end = if idx + 1 == n { base + p } else { base + pieces[idx + 1].start };
            let a = lo.max(y0);
            let b = hi.min(end);
            if a <= b {
                let seg = Segment {
                    id: (k as i64) * n as i64 + idx as i64,
                    a,
                    b,
                    y0,
                    w_y0: k * w.total() + w.cumulative_at(idx),
                    c0: piece.kind.left(),
                    c1: piece.slope(),
                };
                visit(&seg);
            }
            if end >= hi {
                break;
            }
            idx += 1;
            if idx == n {
                idx = 0;
                k += 1.0;
            }
        }
    }

    /// Candidate minimizers on `[lo, hi]`, pushed as `(y, F(y), segment)`
    /// where the segment id is set for smooth interior minima.
    ///
    /// A vertex clamped to a segment end is kept only if the neighbouring
    /// segment is clamped to the same point (a kink minimum) or the end is a
    /// window end; otherwise it merely shadows a smooth minimum next door and
    /// would pollute the tie band.
    fn candidates(&self, lo: f64, hi: f64, out: &mut Vec<Candidate>) {
        #[derive(Clone, Copy, PartialEq)]
        enum Kind {
            Interior,
            AtStart,
            AtEnd,
        }
        let start = out.len();
        let mut kinds: Vec<Kind> = Vec::with_capacity(32);
        self.for_each_segment(lo, hi, |s| {
            if self.curvature(s) > 0.0 {
                let v = self.vertex(s);
                let (y, k) = if v <= s.a {
                    (s.a, Kind::AtStart)
                } else if v >= s.b {
                    (s.b, Kind::AtEnd)
                } else {
                    (v, Kind::Interior)
                };
                let tag = if k == Kind::Interior { Some(s.id) } else { None };
                out.push((y, self.value_on(s, y), tag));
                kinds.push(k);
            } else {
                out.push((s.a, self.value_on(s, s.a), None));
                kinds.push(Kind::AtStart);
                out.push((s.b, self.value_on(s, s.b), None));
                kinds.push(Kind::AtEnd);
            }
        });
        let n = kinds.len();
        let mut keep = vec![true; n];
        for i in 0..n {
            keep[i] = match kinds[i] {
                Kind::Interior => true,
                Kind::AtStart => i == 0 || kinds[i - 1] == Kind::AtEnd,
                Kind::AtEnd => i + 1 == n || kinds[i + 1] == Kind::AtStart,
            };
        }
        let mut w = start;
        for i in 0..n {
            if keep[i] {
                out[w] = out[start + i];
                w += 1;
            }
        }
        out.truncate(w);
    }

    /// Window outside of which no minimizer over `constraint` can lie.
    fn bracket(&self, constraint: Constraint) -> (f64, f64) {
        let p = self.w.period();
        let lo = self.x - self.t * (self.c + self.w.upper_bound()) - p;
        let hi = self.x - self.t * (self.c + self.w.lower_bound()) + p;
        match constraint {
            Constraint::All => (lo, hi),
            // Shifting a point below `lo` by one period lowers F, so the
            // minimizer over y ≤ 0 lies in [lo, hi] or in the last period.
            Constraint::NonPositive => (lo.min(-p), hi.min(0.0)),
            Constraint::NonNegative => (lo.max(0.0), hi.max(p)),
        }
    }
}

/// `(y, F(y), id of the quadratic piece when y is its interior vertex)`.
type Candidate = (f64, f64, Option<i64>);

/// Extremal minimizers plus the smooth-piece tags used by [`branch_and_bound`].
#[derive(Debug, Clone, Copy)]
pub(crate) struct Tagged {
    pub(crate) m: ExtremalMinimizers,
    pub(crate) low_tag: Option<i64>,
    pub(crate) high_tag: Option<i64>,
}

fn select(cands: &[Candidate]) -> Result<Tagged> {
    let min = cands.iter().fold(f64::INFINITY, |m, c| m.min(c.1));
    if !min.is_finite() {
        return Err(Error::Internal("empty minimization bracket".into()));
    }
    let mut low = (f64::INFINITY, None);
    let mut high = (f64::NEG_INFINITY, None);
    for &(y, v, tag) in cands {
        if v <= min + TIE_TOLERANCE {
            if y < low.0 {
                low = (y, tag);
            }
            if y > high.0 {
                high = (y, tag);
            }
        }
    }
    Ok(Tagged {
        m: ExtremalMinimizers {
            y_star_low: low.0,
            y_star_high: high.0,
            min_value: min,
        },
        low_tag: low.1,
        high_tag: high.1,
    })
}

/// Exact Hopf solution of Burgers' equation for perturbed Riemann data.
#[derive(Debug, Clone)]
pub struct HopfOracle {
    ic: RiemannPerturbedIC,
}

/// A Hopf potential for a given branch; see [`HopfOracle::potential`].
#[derive(Debug, Clone, Copy)]
pub struct HopfPotential<'a> {
    oracle: &'a HopfOracle,
    branch: Branch,
}

impl HopfOracle {
    pub fn new(ic: RiemannPerturbedIC) -> Result<Self> {
        if ic.flux().kind() != FluxKind::Burgers {
            return Err(precondition(format!(
                "the Hopf evaluator needs the Burgers flux, got `{}`",
                ic.flux().name()
            )));
        }
        Ok(HopfOracle { ic })
    }

    pub fn ic(&self) -> &RiemannPerturbedIC {
        &self.ic
    }

    pub fn potential(&self, branch: Branch) -> HopfPotential<'_> {
        HopfPotential { oracle: self, branch }
    }

    fn side(&self, c: f64, t: f64, x: f64) -> Quadratics<'_> {
        Quadratics {
            w: self.ic.perturbation(),
            c,
            t,
            x,
        }
    }

    fn constrained(&self, c: f64, t: f64, x: f64, constraint: Constraint, out: &mut Vec<Candidate>) {
        let q = self.side(c, t, x);
        let (lo, hi) = q.bracket(constraint);
        q.candidates(lo, hi, out);
    }

    /// `m₋(t, x)`: minimum of `F_l` over `y ≤ 0`, with its minimizers.
    pub fn m_minus(&self, t: f64, x: f64) -> Result<ExtremalMinimizers> {
        self.potential(Branch::Left).extremal_minimizers(t, x, Constraint::NonPositive)
    }

    /// `m₊(t, x)`: minimum of `F_r` over `y ≥ 0`, with its minimizers.
    pub fn m_plus(&self, t: f64, x: f64) -> Result<ExtremalMinimizers> {
        self.potential(Branch::Right).extremal_minimizers(t, x, Constraint::NonNegative)
    }

    /// Minimizers of the joined potential over all `y`.
    pub fn minimizers(&self, t: f64, x: f64) -> Result<ExtremalMinimizers> {
        self.potential(Branch::Joined).extremal_minimizers(t, x, Constraint::All)
    }

    /// One-sided value of the entropy solution.
    pub fn u_exact(&self, x: f64, t: f64, side: Side) -> Result<f64> {
        Ok(self.minimizers(t, x)?.velocity(x, t, side))
    }

    /// `min_y F(t, x, y)`; its `x`-derivative is the solution, so
    /// `∫ₐᵇ u(x, t) dx = m(b) − m(a)`.
    pub fn value_function(&self, x: f64, t: f64) -> Result<f64> {
        Ok(self.minimizers(t, x)?.min_value)
    }

    pub fn integral(&self, a: f64, b: f64, t: f64) -> Result<f64> {
        Ok(self.value_function(b, t)? - self.value_function(a, t)?)
    }

    /// Periodic solution with data `ūl + w₀`.
    pub fn left_solution(&self) -> PeriodicOracle {
        PeriodicOracle::from_parts(self.ic.perturbation().clone(), self.ic.ul())
    }

    /// Periodic solution with data `ūr + w₀`.
    pub fn right_solution(&self) -> PeriodicOracle {
        PeriodicOracle::from_parts(self.ic.perturbation().clone(), self.ic.ur())
    }

    /// Endpoints of the shock set, located by bisection on the sign of
    /// `m₊ − m₋`.
    pub fn shock_interval(&self, t: f64) -> Result<ShockInterval> {
        check_time(t)?;
        self.ic.require_shock()?;
        let w = self.ic.perturbation();
        let s = self.ic.shock_speed();
        let pad = 1e-9 * t.max(1.0);
        let lo = (s + w.lower_bound()) * t - pad;
        let hi = (s + w.upper_bound()) * t + pad;
        let gap = |x: f64| -> Result<f64> { Ok(self.m_plus(t, x)?.min_value - self.m_minus(t, x)?.min_value) };
        if !(gap(lo)? > 0.0) || !(gap(hi)? < 0.0) {
            return Err(Error::Internal(format!("shock set not bracketed at t = {t}")));
        }
        let tol = 1e-12 * t;
        let (_, x_low) = bisect_predicate(|x| Ok(gap(x)? > 0.0), lo, hi, tol)?;
        let (x_high, _) = bisect_predicate(|x| Ok(gap(x)? >= 0.0), lo, hi, tol)?;
        let (x_low, x_high) = if x_low <= x_high {
            (x_low, x_high)
        } else {
            let mid = 0.5 * (x_low + x_high);
            (mid, mid)
        };
        Ok(ShockInterval {
            t,
            x_low,
            x_high,
            merged: x_high - x_low <= 1e-10 * t.max(1.0),
        })
    }

    /// The viscous solution from the Hopf–Cole formula
    ///
    /// ```text
    /// u^ε(x, t) = ∫ (x−y)/t · e^{−F/2ε} dy / ∫ e^{−F/2ε} dy
    /// ```
    ///
    /// with `F` shifted by its minimum before exponentiation.
    pub fn u_viscous(&self, x: f64, t: f64, eps: f64) -> Result<f64> {
        let c = self.u_exact(x, t, Side::Right)?;
        Ok(c + self.u_viscous_deviation(x, t, eps, c)?)
    }

    /// `u^ε(x, t) − c`, evaluated as a single quotient so that deviations far
    /// below the rounding level of `u^ε` itself keep full relative precision.
    ///
    /// On every quadratic piece of `F` the Gaussian integrals are taken in
    /// closed form through `erfc`; consecutive identical pieces are merged
    /// first so that their shared boundary terms do not cancel numerically.
    pub fn u_viscous_deviation(&self, x: f64, t: f64, eps: f64, c: f64) -> Result<f64> {
        check_time(t)?;
        if !(eps > 0.0) || !eps.is_finite() {
            return Err(Error::Domain {
                what: "eps",
                value: eps,
                lo: 0.0,
                hi: f64::INFINITY,
            });
        }
        let m = self.minimizers(t, x)?.min_value;
        let w = self.ic.perturbation();
        let p = w.period();
        let (wmin, _) = w.primitive_range();
        // e^{-745} underflows, so nothing beyond this level can contribute.
        let cutoff = 2.0 * eps * 745.0;

        let left = self.side(self.ic.ul(), t, x);
        let right = self.side(self.ic.ur(), t, x);

        // Lower envelope (x−y)²/(2t) + c·y + min W, monotone away from its vertex.
        let envelope = |c: f64, y: f64| (x - y).powi(2) / (2.0 * t) + c * y + wmin;
        let step0 = p.max((2.0 * t * cutoff).sqrt());
        let (l_lo, _) = left.bracket(Constraint::All);
        let mut lo = l_lo.min(x - self.ic.ul() * t).min(0.0) - p;
        let mut step = step0;
        while envelope(self.ic.ul(), lo) - m < cutoff {
            lo -= step;
            step *= 2.0;
        }
        let (_, r_hi) = right.bracket(Constraint::All);
        let mut hi = r_hi.max(x - self.ic.ur() * t).max(0.0) + p;
        let mut step = step0;
        while envelope(self.ic.ur(), hi) - m < cutoff {
            hi += step;
            step *= 2.0;
        }

        let mut num = 0.0;
        let mut den = 0.0;
        for (q, a, b) in [(left, lo, 0.0), (right, 0.0, hi)] {
            let mut segs: Vec<Segment> = Vec::new();
            q.for_each_segment(a, b, |s| {
                if s.a == s.b {
                    return;
                }
                if let Some(last) = segs.last_mut() {
                    if last.c1 == 0.0 && s.c1 == 0.0 && last.c0 == s.c0 && last.b == s.a {
                        last.b = s.b;
                        return;
                    }
                }
                segs.push(*s);
            });
            for s in &segs {
                let (n, d) = viscous_piece(&q, s, m, eps, c)?;
                num += n;
                den += d;
            }
        }
        if !(den > 0.0) {
            return Err(Error::Internal("viscous normalization vanished".into()));
        }
        Ok(num / den)
    }

    /// Certified extrema of `u(·, t) − r` on `[a, b]`.
    ///
    /// `r` must be nondecreasing and affine between consecutive `breaks`.
    pub fn deviation_extrema<R: Fn(f64) -> f64>(
        &self,
        t: f64,
        a: f64,
        b: f64,
        reference: R,
        breaks: &[f64],
        tol: f64,
    ) -> Result<Extrema> {
        check_time(t)?;
        let n = (((b - a) / self.ic.period()).ceil() as usize * 64).clamp(64, 1 << 16);
        let joined = self.potential(Branch::Joined);
        branch_and_bound(|x| joined.tagged(t, x, Constraint::All), t, a, b, reference, breaks, n, tol)
    }
}

/// `√π / 2`.
const HALF_SQRT_PI: f64 = 0.886_226_925_452_758_013_649_083_741_671;

/// Scaled complementary error function `e^{x²} erfc(x)` for `x ≥ 0`.
pub(crate) fn erfcx(x: f64) -> f64 {
    if x < 10.0 {
        libm::erfc(x) * (x * x).exp()
    } else {
        // Continued fraction x + (1/2)/(x + 1/(x + (3/2)/(x + ...))).
        let mut f = x;
        for k in (1..=60).rev() {
            f = x + 0.5 * k as f64 / f;
        }
        1.0 / (2.0 * HALF_SQRT_PI * f)
    }
}

/// Numerator and denominator contributions of one quadratic piece to the
/// Hopf–Cole quotient for `u^ε − c`.
fn viscous_piece(q: &Quadratics<'_>, s: &Segment, m: f64, eps: f64, c: f64) -> Result<(f64, f64)> {
    let t = q.t;
    let energy = |y: f64| (q.value_on(s, y) - m) / (2.0 * eps);
    let curv = q.curvature(s);
    if curv > 0.0 {
        let v = q.vertex(s);
        let r2 = curv / (4.0 * eps);
        let r = r2.sqrt();
        let (sa, sb) = ((s.a - v) * r, (s.b - v) * r);
        let (ea, eb) = (energy(s.a), energy(s.b));
        let mass = if sa >= 0.0 || sb <= 0.0 {
            // One-sided tail: difference of two scaled erfc terms.
            let (t1, t2) = if sa >= 0.0 {
                ((-ea).exp() * erfcx(sa), (-eb).exp() * erfcx(sb))
            } else {
                ((-eb).exp() * erfcx(-sb), (-ea).exp() * erfcx(-sa))
            };
            if t2 > 0.5 * t1 {
                None
            } else {
                Some(HALF_SQRT_PI * (t1 - t2) / r)
            }
        } else {
            let ev = energy(v);
            Some((-ev).exp() * HALF_SQRT_PI * (libm::erf(-sa) + libm::erf(sb)) / r)
        };
        if let Some(i0) = mass {
            // (x − v)/t − c, written so that it vanishes exactly when it should.
            let drift = (q.c - c) + s.c0 + s.c1 * (v - s.y0);
            let moment = ((-ea).exp() - (-eb).exp()) / (2.0 * r2);
            return Ok((drift * i0 - moment / t, i0));
        }
    }
    let x = q.x;
    let mut breaks = Vec::with_capacity(5);
    if curv > 0.0 {
        let v = q.vertex(s);
        let sigma = (2.0 * eps / curv).sqrt();
        for k in [-6.0, -2.0, 0.0, 2.0, 6.0] {
            breaks.push(v + k * sigma);
        }
    }
    let opts = QuadOptions {
        abs_tol: 0.0,
        rel_tol: 1e-12,
        max_evaluations: 200_000,
    };
    let weight = |y: f64| (-energy(y)).exp();
    let d = integrate_with_breaks(weight, s.a, s.b, &breaks, opts);
    let n = integrate_with_breaks(|y| ((x - y) / t - c) * weight(y), s.a, s.b, &breaks, opts);
    if !d.converged && d.error > 1e-10 * d.value.abs() {
        return Err(Error::Internal(format!(
            "viscous quadrature stalled on [{}, {}]",
            s.a, s.b
        )));
    }
    Ok((n.value, d.value))
}

impl<'a> HopfPotential<'a> {
    pub fn branch(&self) -> Branch {
        self.branch
    }

    fn constants(&self, y: f64) -> f64 {
        let ic = &self.oracle.ic;
        match self.branch {
            Branch::Left => ic.ul(),
            Branch::Right => ic.ur(),
            Branch::Joined => {
                if y <= 0.0 {
                    ic.ul()
                } else {
                    ic.ur()
                }
            }
        }
    }

    /// `F(t, x, y)` for this branch.
    pub fn potential(&self, t: f64, x: f64, y: f64) -> Result<f64> {
        check_time(t)?;
        Ok(self.oracle.side(self.constants(y), t, x).value(y))
    }

    /// Global minimum over the constrained set with its extremal minimizers.
    pub fn extremal_minimizers(&self, t: f64, x: f64, constraint: Constraint) -> Result<ExtremalMinimizers> {
        Ok(self.tagged(t, x, constraint)?.m)
    }

    pub(crate) fn tagged(&self, t: f64, x: f64, constraint: Constraint) -> Result<Tagged> {
        check_time(t)?;
        let ic = &self.oracle.ic;
        let mut cands = Vec::with_capacity(64);
        match self.branch {
            Branch::Left => self.oracle.constrained(ic.ul(), t, x, constraint, &mut cands),
            Branch::Right => self.oracle.constrained(ic.ur(), t, x, constraint, &mut cands),
            Branch::Joined => match constraint {
                Constraint::NonPositive => self.oracle.constrained(ic.ul(), t, x, constraint, &mut cands),
                Constraint::NonNegative => self.oracle.constrained(ic.ur(), t, x, constraint, &mut cands),
                Constraint::All => {
                    self.oracle.constrained(ic.ul(), t, x, Constraint::NonPositive, &mut cands);
                    self.oracle.constrained(ic.ur(), t, x, Constraint::NonNegative, &mut cands);
                    // y = 0 closes both constrained windows; it is a minimizer of
                    // the joined potential only if F'(0−) ≤ 0 ≤ F'(0+).
                    let w = ic.perturbation();
                    let left_slope = -x / t + ic.ul() + w.eval_left(0.0);
                    let right_slope = -x / t + ic.ur() + w.eval(0.0);
                    // Slopes that vanish up to rounding keep y = 0: it may be
                    // the clamped end of a vertex sitting at 0.
                    let scale = 1.0 + (x / t).abs() + ic.ul().abs().max(ic.ur().abs()) + w.upper_bound().abs().max(w.lower_bound().abs());
                    let tol = 16.0 * f64::EPSILON * scale;
                    if left_slope > tol || right_slope < -tol {
                        cands.retain(|c| !(c.0 == 0.0 && c.2.is_none()));
                    }
                }
            },
        }
        select(&cands)
    }
}

/// Exact periodic solution of Burgers' equation with data `ū + w₀`.
#[derive(Debug, Clone)]
pub struct PeriodicOracle {
    profile: PeriodicProfile,
    ubar: f64,
}

impl PeriodicOracle {
    /// Data `ubar + profile`; a nonzero profile mean is folded into `ū`.
    pub fn new(profile: &PeriodicProfile, ubar: f64) -> Self {
        let (w, m) = profile.shift_to_zero_mean();
        Self::from_parts(w, ubar + m)
    }

    fn from_parts(profile: PeriodicProfile, ubar: f64) -> Self {
        PeriodicOracle { profile, ubar }
    }

    pub fn ubar(&self) -> f64 {
        self.ubar
    }

    pub fn perturbation(&self) -> &PeriodicProfile {
        &self.profile
    }

    pub fn period(&self) -> f64 {
        self.profile.period()
    }

    fn quadratics(&self, c: f64, t: f64, x: f64) -> Quadratics<'_> {
        Quadratics {
            w: &self.profile,
            c,
            t,
            x,
        }
    }

    fn minimize(&self, c: f64, t: f64, x: f64) -> Result<ExtremalMinimizers> {
        Ok(self.minimize_tagged(c, t, x)?.m)
    }

    fn minimize_tagged(&self, c: f64, t: f64, x: f64) -> Result<Tagged> {
        check_time(t)?;
        let q = self.quadratics(c, t, x);
        let (lo, hi) = q.bracket(Constraint::All);
        let mut cands = Vec::with_capacity(32);
        q.candidates(lo, hi, &mut cands);
        select(&cands)
    }

    /// Minimizers of `(x−y)²/(2t) + ū·y + ∫₀ʸ w₀`.
    pub fn minimizers(&self, x: f64, t: f64) -> Result<ExtremalMinimizers> {
        self.minimize(self.ubar, t, x)
    }

    /// `u(x±, t)` through the Galilean map `w(x − ū t, t) + ū`, where `w`
    /// solves the zero-mean problem.
    pub fn value(&self, x: f64, t: f64, side: Side) -> Result<f64> {
        let xi = x - self.ubar * t;
        Ok(self.minimize(0.0, t, xi)?.velocity(xi, t, side) + self.ubar)
    }

    /// `u(x±, t)` from the potential with drift `ū`, without the Galilean map.
    pub fn value_direct(&self, x: f64, t: f64, side: Side) -> Result<f64> {
        Ok(self.minimizers(x, t)?.velocity(x, t, side))
    }

    pub fn value_function(&self, x: f64, t: f64) -> Result<f64> {
        Ok(self.minimizers(x, t)?.min_value)
    }

    /// Exact `∫ₐᵇ u(x, t) dx`.
    pub fn integral(&self, a: f64, b: f64, t: f64) -> Result<f64> {
        Ok(self.value_function(b, t)? - self.value_function(a, t)?)
    }

    /// Certified `inf` and `sup` of `u(·, t)` over a period.
    pub fn extrema(&self, t: f64, tol: f64) -> Result<Extrema> {
        check_time(t)?;
        let p = self.period();
        let x0 = self.ubar * t;
        branch_and_bound(
            |x| self.minimize_tagged(self.ubar, t, x),
            t,
            x0,
            x0 + p,
            |_| 0.0,
            &[],
            256,
            tol,
        )
    }
}

/// Bounds produced by [`branch_and_bound`]: the reported extremes are
/// attained (as one-sided limits), and the true extremes lie within the gaps.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Extrema {
    pub inf: f64,
    pub sup: f64,
    pub inf_gap: f64,
    pub sup_gap: f64,
}

impl Extrema {
    /// `sup |u − r|`.
    pub fn max_abs(&self) -> f64 {
        self.sup.max(-self.inf)
    }
}

struct Cell {
    priority: f64,
    i: usize,
    j: usize,
}

impl PartialEq for Cell {
    fn eq(&self, o: &Self) -> bool {
        self.priority == o.priority
    }
}
impl Eq for Cell {}
impl PartialOrd for Cell {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for Cell {
    fn cmp(&self, o: &Self) -> Ordering {
        self.priority.total_cmp(&o.priority)
    }
}

/// Extrema of `u − r` on `[a, b]` where `u(x±) = (x − Y)/t`, `Y` is
/// nondecreasing in `x` and `r` is nondecreasing and affine between `breaks`.
///
/// On a cell `[x₁, x₂]` monotonicity gives
/// `u − r ≤ (x₂ − Y⁺(x₁))/t − r(x₁)` and `u − r ≥ (x₁ − Y₋(x₂))/t − r(x₂)`,
/// so cells whose bounds cannot beat the best sampled values are discarded.
/// When both ends of a cell minimize on the same smooth quadratic piece (or
/// share the minimizer) `u` is affine on the cell and its ends are exact.
#[allow(clippy::too_many_arguments)]
pub(crate) fn branch_and_bound<M, R>(
    mut minimizers: M,
    t: f64,
    a: f64,
    b: f64,
    reference: R,
    breaks: &[f64],
    initial: usize,
    tol: f64,
) -> Result<Extrema>
where
    M: FnMut(f64) -> Result<Tagged>,
    R: Fn(f64) -> f64,
{
    if !(a < b) {
        return Err(precondition(format!("empty interval [{a}, {b}]")));
    }
    struct Node {
        x: f64,
        low: f64,
        high: f64,
        low_tag: Option<i64>,
        high_tag: Option<i64>,
        r: f64,
    }
    let mut nodes: Vec<Node> = Vec::with_capacity(initial * 4);
    let mut best_sup = f64::NEG_INFINITY;
    let mut best_inf = f64::INFINITY;
    let mut sample = |x: f64, nodes: &mut Vec<Node>, sup: &mut f64, inf: &mut f64| -> Result<usize> {
        let tg = minimizers(x)?;
        let r = reference(x);
        *sup = sup.max((x - tg.m.y_star_low) / t - r);
        *inf = inf.min((x - tg.m.y_star_high) / t - r);
        nodes.push(Node {
            x,
            low: tg.m.y_star_low,
            high: tg.m.y_star_high,
            low_tag: tg.low_tag,
            high_tag: tg.high_tag,
            r,
        });
        Ok(nodes.len() - 1)
    };
    let n = initial.max(2);
    let mut xs: Vec<f64> = (0..=n)
        .map(|k| if k == n { b } else { a + (b - a) * k as f64 / n as f64 })
        .collect();
    xs.extend(breaks.iter().copied().filter(|&x| x > a && x < b));
    xs.sort_by(f64::total_cmp);
    xs.dedup();
    for &x in &xs {
        sample(x, &mut nodes, &mut best_sup, &mut best_inf)?;
    }
    let affine = |n: &[Node], i: usize, j: usize| {
        n[i].high == n[j].low || (n[i].high_tag.is_some() && n[i].high_tag == n[j].low_tag)
    };
    let upper = |n: &[Node], i: usize, j: usize| {
        if affine(n, i, j) {
            ((n[i].x - n[i].high) / t - n[i].r).max((n[j].x - n[j].low) / t - n[j].r)
        } else {
            (n[j].x - n[i].high) / t - n[i].r
        }
    };
    let lower = |n: &[Node], i: usize, j: usize| {
        if affine(n, i, j) {
            ((n[i].x - n[i].high) / t - n[i].r).min((n[j].x - n[j].low) / t - n[j].r)
        } else {
            (n[i].x - n[j].low) / t - n[j].r
        }
    };
    let excess = |n: &[Node], i: usize, j: usize, s: f64, f: f64| (upper(n, i, j) - s).max(f - lower(n, i, j));
    let mut heap = BinaryHeap::new();
    for k in 0..xs.len() - 1 {
        let e = excess(&nodes, k, k + 1, best_sup, best_inf);
        if e > tol {
            heap.push(Cell { priority: e, i: k, j: k + 1 });
        }
    }
    let budget = 2_000_000usize;
    let mut evaluations = nodes.len();
    while let Some(cell) = heap.pop() {
        let e = excess(&nodes, cell.i, cell.j, best_sup, best_inf);
        if e <= tol {
            continue;
        }
        if let Some(top) = heap.peek() {
            if e < top.priority {
                heap.push(Cell { priority: e, ..cell });
                continue;
            }
        }
        let (xi, xj) = (nodes[cell.i].x, nodes[cell.j].x);
        let mid = 0.5 * (xi + xj);
        if evaluations >= budget || !(mid > xi && mid < xj) {
            heap.push(Cell { priority: e, ..cell });
            break;
        }
        let m = sample(mid, &mut nodes, &mut best_sup, &mut best_inf)?;
        evaluations += 1;
        for (i, j) in [(cell.i, m), (m, cell.j)] {
            let e = excess(&nodes, i, j, best_sup, best_inf);
            if e > tol {
                heap.push(Cell { priority: e, i, j });
            }
        }
    }
    let mut sup_bound = best_sup;
    let mut inf_bound = best_inf;
    for c in heap.iter() {
        sup_bound = sup_bound.max(upper(&nodes, c.i, c.j));
        inf_bound = inf_bound.min(lower(&nodes, c.i, c.j));
    }
    Ok(Extrema {
        inf: best_inf,
        sup: best_sup,
        inf_gap: best_inf - inf_bound,
        sup_gap: sup_bound - best_sup,
    })
}
