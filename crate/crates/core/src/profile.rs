//! Periodic perturbations, perturbed Riemann data and divide lines.

use serde::{Deserialize, Serialize};

use crate::error::{precondition, Result};
use crate::flux::{rh_speed, ConvexFlux};

/// Shape of one piece of a periodic profile.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum PieceKind {
    Constant(f64),
    /// Linear ramp from `left` at the start of the piece to `right` at its end.
    Linear { left: f64, right: f64 },
}

impl PieceKind {
    pub fn left(&self) -> f64 {
        match *self {
            PieceKind::Constant(c) => c,
            PieceKind::Linear { left, .. } => left,
        }
    }

    pub fn right(&self) -> f64 {
        match *self {
            PieceKind::Constant(c) => c,
            PieceKind::Linear { right, .. } => right,
        }
    }

    fn shifted(&self, by: f64) -> PieceKind {
        match *self {
            PieceKind::Constant(c) => PieceKind::Constant(c + by),
            PieceKind::Linear { left, right } => PieceKind::Linear {
                left: left + by,
                right: right + by,
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Piece {
    pub start: f64,
    pub width: f64,
    pub kind: PieceKind,
}

impl Piece {
    /// Value at offset `d ∈ [0, width]` from the piece start.
    pub fn value_at(&self, d: f64) -> f64 {
        match self.kind {
            PieceKind::Constant(c) => c,
            PieceKind::Linear { left, right } => left + (right - left) * (d / self.width),
        }
    }

    /// Slope of the piece (zero for constants).
    pub fn slope(&self) -> f64 {
        match self.kind {
            PieceKind::Constant(_) => 0.0,
            PieceKind::Linear { left, right } => (right - left) / self.width,
        }
    }

    /// `∫` of the piece from its start to offset `d`.
    pub fn integral_to(&self, d: f64) -> f64 {
        let c0 = self.kind.left();
        c0 * d + 0.5 * self.slope() * d * d
    }
}

/// A periodic, piecewise constant or linear function on `[0, p)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PeriodicProfile {
    period: f64,
    pieces: Vec<Piece>,
    cumulative: Vec<f64>,
    total: f64,
    min: f64,
    max: f64,
}

/// Margin by which the exact extrema are widened into strict bounds.
pub const BOUND_MARGIN: f64 = 1e-12;

impl PeriodicProfile {
    /// Builds a profile from `(width, kind)` pairs whose widths sum to `period`.
    pub fn new(period: f64, pieces: &[(f64, PieceKind)]) -> Result<Self> {
        if !(period > 0.0) || !period.is_finite() {
            return Err(precondition(format!("period must be positive, got {period}")));
        }
        if pieces.is_empty() {
            return Err(precondition("profile needs at least one piece"));
        }
        let sum: f64 = pieces.iter().map(|(w, _)| w).sum();
        if (sum - period).abs() > 1e-12 * period {
            return Err(precondition(format!("piece widths sum to {sum}, not the period {period}")));
        }
        let mut out = Vec::with_capacity(pieces.len());
        let mut start = 0.0;
        for (k, &(width, kind)) in pieces.iter().enumerate() {
            if !(width > 0.0) {
                return Err(precondition(format!("piece {k} has non-positive width {width}")));
            }
            if !kind.left().is_finite() || !kind.right().is_finite() {
                return Err(precondition(format!("piece {k} has a non-finite value")));
            }
            let width = if k + 1 == pieces.len() { period - start } else { width };
            if !(width > 0.0) {
                return Err(precondition("piece widths leave an empty last piece"));
            }
            out.push(Piece { start, width, kind });
            start += width;
        }
        Ok(Self::from_pieces(period, out))
    }

    fn from_pieces(period: f64, pieces: Vec<Piece>) -> Self {
        let mut cumulative = Vec::with_capacity(pieces.len());
        let mut acc = 0.0;
        let mut min = f64::INFINITY;
        let mut max = f64::NEG_INFINITY;
        for p in &pieces {
            cumulative.push(acc);
            acc += p.integral_to(p.width);
            for v in [p.kind.left(), p.kind.right()] {
                min = min.min(v);
                max = max.max(v);
            }
        }
        PeriodicProfile {
            period,
            pieces,
            cumulative,
            total: acc,
            min,
            max,
        }
    }

    pub fn constant(period: f64, value: f64) -> Result<Self> {
        Self::new(period, &[(period, PieceKind::Constant(value))])
    }

    pub fn zero(period: f64) -> Result<Self> {
        Self::constant(period, 0.0)
    }

    /// `first` on `[0, p/2)` and `second` on `[p/2, p)`.
    pub fn square_wave(period: f64, first: f64, second: f64) -> Result<Self> {
        Self::new(
            period,
            &[
                (0.5 * period, PieceKind::Constant(first)),
                (0.5 * period, PieceKind::Constant(second)),
            ],
        )
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    pub fn mean(&self) -> f64 {
        self.total / self.period
    }

    /// `∫₀ᵖ w₀`.
    pub fn total(&self) -> f64 {
        self.total
    }

    /// Exact minimum over a period.
    pub fn min_value(&self) -> f64 {
        self.min
    }

    /// Exact maximum over a period.
    pub fn max_value(&self) -> f64 {
        self.max
    }

    /// Strict lower bound `α`.
    pub fn lower_bound(&self) -> f64 {
        self.min - BOUND_MARGIN
    }

    /// Strict upper bound `β`.
    pub fn upper_bound(&self) -> f64 {
        self.max + BOUND_MARGIN
    }

    pub fn is_zero(&self) -> bool {
        self.min == 0.0 && self.max == 0.0
    }

    /// `true` when every piece is constant.
    pub fn is_piecewise_constant(&self) -> bool {
        self.pieces.iter().all(|p| matches!(p.kind, PieceKind::Constant(_)))
    }

    /// Splits `x` into its period index and the piece containing it.
    pub(crate) fn locate(&self, x: f64) -> (f64, usize, f64) {
        let k = (x / self.period).floor();
        let mut r = x - k * self.period;
        let mut k = k;
        if r >= self.period {
            r -= self.period;
            k += 1.0;
        }
        if r < 0.0 {
            r = 0.0;
        }
        let idx = self.pieces.partition_point(|p| p.start <= r).saturating_sub(1);
        (k, idx, r - self.pieces[idx].start)
    }

    /// `w₀(x)`, right-continuous at breakpoints.
    pub fn eval(&self, x: f64) -> f64 {
        let (_, idx, d) = self.locate(x);
        self.pieces[idx].value_at(d)
    }

    /// Left limit `w₀(x−)`.
    pub fn eval_left(&self, x: f64) -> f64 {
        let (_, idx, d) = self.locate(x);
        if d == 0.0 {
            let prev = if idx == 0 { self.pieces.len() - 1 } else { idx - 1 };
            self.pieces[prev].kind.right()
        } else {
            self.pieces[idx].value_at(d)
        }
    }

    /// `∫₀ˣ w₀` for any mean.
    pub fn integral_from_zero(&self, x: f64) -> f64 {
        if x == 0.0 {
            return 0.0;
        }
        let (k, idx, d) = self.locate(x);
        k * self.total + self.cumulative[idx] + self.pieces[idx].integral_to(d)
    }

    /// `∫ₐᵇ w₀`.
    pub fn integral(&self, a: f64, b: f64) -> f64 {
        self.integral_from_zero(b) - self.integral_from_zero(a)
    }

    /// Cumulative integral from 0 to the start of piece `idx` in period 0.
    pub(crate) fn cumulative_at(&self, idx: usize) -> f64 {
        self.cumulative[idx]
    }

    fn mean_tolerance(&self) -> f64 {
        1e-12 * self.min.abs().max(self.max.abs()).max(1.0)
    }

    pub fn has_zero_mean(&self) -> bool {
        self.mean().abs() <= self.mean_tolerance()
    }

    /// The periodic primitive `W(x) = ∫₀ˣ w₀`.
    pub fn primitive(&self, x: f64) -> Result<f64> {
        if !self.has_zero_mean() {
            return Err(precondition(format!("primitive needs zero mean, mean is {}", self.mean())));
        }
        Ok(self.integral_from_zero(x))
    }

    /// Returns the profile minus its mean, and the mean.
    /// A mean already zero within tolerance is left untouched.
    pub fn shift_to_zero_mean(&self) -> (PeriodicProfile, f64) {
        if self.has_zero_mean() {
            return (self.clone(), 0.0);
        }
        let mean = self.mean();
        let pieces = self
            .pieces
            .iter()
            .map(|p| Piece {
                kind: p.kind.shifted(-mean),
                ..*p
            })
            .collect();
        (Self::from_pieces(self.period, pieces), mean)
    }

    /// Adds a constant to every value.
    pub fn offset(&self, by: f64) -> PeriodicProfile {
        let pieces = self
            .pieces
            .iter()
            .map(|p| Piece {
                kind: p.kind.shifted(by),
                ..*p
            })
            .collect();
        Self::from_pieces(self.period, pieces)
    }

    /// Range `(min, max)` of `∫₀ˣ (w₀ − w̄)` over one period.
    pub fn primitive_range(&self) -> (f64, f64) {
        let mean = self.mean();
        let mut lo = 0.0f64;
        let mut hi = 0.0f64;
        for (i, p) in self.pieces.iter().enumerate() {
            let base = self.cumulative[i] - mean * p.start;
            lo = lo.min(base);
            hi = hi.max(base);
            let (l, r) = (p.kind.left() - mean, p.kind.right() - mean);
            if l * r < 0.0 {
                let d = p.width * (-l) / (r - l);
                let v = base + p.integral_to(d) - mean * d;
                lo = lo.min(v);
                hi = hi.max(v);
            }
        }
        (lo, hi)
    }

    /// Leftmost point of `[0, p)` minimizing `∫₀ˣ (w₀ − w̄)`.
    ///
    /// Minimizers sit at breakpoints where `w₀ − w̄` changes sign from
    /// negative to positive, or inside linear pieces at their zero crossing,
    /// so only those candidates are compared.
    pub fn argmin_primitive(&self) -> f64 {
        let mean = self.mean();
        let mut cands: Vec<(f64, f64)> = Vec::with_capacity(2 * self.pieces.len());
        for (i, p) in self.pieces.iter().enumerate() {
            let base = self.cumulative[i] - mean * p.start;
            cands.push((p.start, base));
            let (l, r) = (p.kind.left() - mean, p.kind.right() - mean);
            if l < 0.0 && r > 0.0 {
                let d = p.width * (-l) / (r - l);
                cands.push((p.start + d, base + p.integral_to(d) - mean * d));
            }
        }
        let scale = cands.iter().fold(1.0f64, |m, c| m.max(c.1.abs()));
        let best = cands.iter().fold(f64::INFINITY, |m, c| m.min(c.1));
        let tol = 1e-14 * scale.max(self.period * self.min.abs().max(self.max.abs()));
        cands
            .iter()
            .filter(|c| c.1 <= best + tol)
            .map(|c| c.0)
            .fold(f64::INFINITY, f64::min)
    }
}

/// A divide line `x = anchor + slope·t` of a periodic solution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DivideLine {
    pub anchor: f64,
    pub slope: f64,
    pub index: i64,
}

impl DivideLine {
    pub fn position(&self, t: f64) -> f64 {
        self.anchor + self.slope * t
    }
}

/// Divide lines of the periodic solution with data `ū + w₀`, indexed by `range`.
pub fn divides(
    profile: &PeriodicProfile,
    flux: &ConvexFlux,
    ubar: f64,
    range: std::ops::RangeInclusive<i64>,
) -> Result<Vec<DivideLine>> {
    let slope = flux.deriv(ubar)?;
    let a = profile.argmin_primitive();
    Ok(range
        .map(|n| DivideLine {
            anchor: a + n as f64 * profile.period(),
            slope,
            index: n,
        })
        .collect())
}

/// Two-valued periodic data: `m₁ + ū` then `−m₂ + ū`, switching at
/// `m₂·p/(m₁+m₂)` so that the mean is `ū`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TwoConstantProfile {
    pub m1: f64,
    pub m2: f64,
    pub period: f64,
    pub ubar: f64,
}

impl TwoConstantProfile {
    pub fn new(m1: f64, m2: f64, period: f64, ubar: f64) -> Result<Self> {
        if !(m1 > 0.0 && m2 > 0.0 && period > 0.0) {
            return Err(precondition("two-constant data need m1, m2, p > 0"));
        }
        Ok(TwoConstantProfile { m1, m2, period, ubar })
    }

    pub fn switch_point(&self) -> f64 {
        self.m2 * self.period / (self.m1 + self.m2)
    }

    /// The full data `ū + w₀` as a profile.
    pub fn to_profile(&self) -> Result<PeriodicProfile> {
        let x = self.switch_point();
        PeriodicProfile::new(
            self.period,
            &[
                (x, PieceKind::Constant(self.m1 + self.ubar)),
                (self.period - x, PieceKind::Constant(-self.m2 + self.ubar)),
            ],
        )
    }

    /// Time after which the periodic solution is an exact sawtooth.
    pub fn t_p(&self, flux: &ConvexFlux) -> Result<f64> {
        let d0 = flux.deriv(self.ubar)?;
        let up = flux.deriv(self.m1 + self.ubar)? - d0;
        let down = -(flux.deriv(-self.m2 + self.ubar)? - d0);
        Ok((self.period / up).max(self.period / down))
    }
}

/// Riemann data `ūl` / `ūr` with a zero-mean periodic perturbation on top.
#[derive(Debug, Clone)]
pub struct RiemannPerturbedIC {
    flux: ConvexFlux,
    ul: f64,
    ur: f64,
    perturbation: PeriodicProfile,
    shock_speed: f64,
}

impl RiemannPerturbedIC {
    pub fn new(flux: ConvexFlux, ul: f64, ur: f64, perturbation: PeriodicProfile) -> Result<Self> {
        if !perturbation.has_zero_mean() {
            return Err(precondition(format!(
                "perturbation must have zero mean, mean is {}",
                perturbation.mean()
            )));
        }
        for u in [
            ul + perturbation.min_value(),
            ul + perturbation.max_value(),
            ur + perturbation.min_value(),
            ur + perturbation.max_value(),
        ] {
            flux.eval(u)?;
        }
        let shock_speed = if ul == ur { flux.deriv(ul)? } else { rh_speed(&flux, ul, ur)? };
        Ok(RiemannPerturbedIC {
            flux,
            ul,
            ur,
            perturbation,
            shock_speed,
        })
    }

    /// Unperturbed data on a unit period.
    pub fn unperturbed(flux: ConvexFlux, ul: f64, ur: f64) -> Result<Self> {
        Self::new(flux, ul, ur, PeriodicProfile::zero(1.0)?)
    }

    pub fn flux(&self) -> &ConvexFlux {
        &self.flux
    }

    pub fn ul(&self) -> f64 {
        self.ul
    }

    pub fn ur(&self) -> f64 {
        self.ur
    }

    pub fn perturbation(&self) -> &PeriodicProfile {
        &self.perturbation
    }

    pub fn period(&self) -> f64 {
        self.perturbation.period()
    }

    /// Rankine–Hugoniot speed `s` (or `f'(ū)` when the states coincide).
    pub fn shock_speed(&self) -> f64 {
        self.shock_speed
    }

    /// `u₀(x)`, right-continuous.
    pub fn eval(&self, x: f64) -> f64 {
        let base = if x < 0.0 { self.ul } else { self.ur };
        base + self.perturbation.eval(x)
    }

    /// Left limit `u₀(x−)`.
    pub fn eval_left(&self, x: f64) -> f64 {
        let base = if x <= 0.0 { self.ul } else { self.ur };
        base + self.perturbation.eval_left(x)
    }

    /// `∫ₐᵇ u₀`.
    pub fn integral(&self, a: f64, b: f64) -> f64 {
        let background = |x: f64| if x < 0.0 { self.ul * x } else { self.ur * x };
        background(b) - background(a) + self.perturbation.integral(a, b)
    }

    /// Smallest and largest data values.
    pub fn value_range(&self) -> (f64, f64) {
        let (lo, hi) = (self.perturbation.min_value(), self.perturbation.max_value());
        (self.ul.min(self.ur) + lo, self.ul.max(self.ur) + hi)
    }

    pub(crate) fn require_shock(&self) -> Result<()> {
        if self.ul > self.ur {
            Ok(())
        } else {
            Err(precondition(format!("shock data need ul > ur, got {} and {}", self.ul, self.ur)))
        }
    }

    pub(crate) fn require_rarefaction(&self) -> Result<()> {
        if self.ul < self.ur {
            Ok(())
        } else {
            Err(precondition(format!(
                "rarefaction data need ul < ur, got {} and {}",
                self.ul, self.ur
            )))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn square(m: f64) -> PeriodicProfile {
        PeriodicProfile::square_wave(1.0, m, -m).unwrap()
    }

    #[test]
    fn rejects_bad_widths() {
        assert!(PeriodicProfile::new(1.0, &[(0.4, PieceKind::Constant(0.0))]).is_err());
        assert!(PeriodicProfile::new(1.0, &[(1.5, PieceKind::Constant(0.0)), (-0.5, PieceKind::Constant(1.0))]).is_err());
        assert!(PeriodicProfile::new(0.0, &[(0.0, PieceKind::Constant(0.0))]).is_err());
    }

    #[test]
    fn shift_examples() {
        let (z, c) = PeriodicProfile::constant(1.0, 0.7).unwrap().shift_to_zero_mean();
        assert_abs_diff_eq!(c, 0.7, epsilon = 1e-15);
        assert!(z.has_zero_mean() && z.max_value().abs() < 1e-15);
        let (s, m) = square(0.3).shift_to_zero_mean();
        assert_eq!(m, 0.0);
        assert_eq!(s, square(0.3));
        let two = TwoConstantProfile::new(1.0, 1.0, 1.0, 0.5).unwrap().to_profile().unwrap();
        let (w, m) = two.shift_to_zero_mean();
        assert_abs_diff_eq!(m, 0.5, epsilon = 1e-15);
        assert_eq!(w.eval(0.25), 1.0);
        assert_eq!(w.eval(0.75), -1.0);
    }

    #[test]
    fn primitive_examples() {
        assert_eq!(PeriodicProfile::zero(1.0).unwrap().primitive(3.3).unwrap(), 0.0);
        assert_abs_diff_eq!(square(0.4).primitive(0.5).unwrap(), 0.2, epsilon = 1e-15);
        let neg = PeriodicProfile::square_wave(1.0, -0.4, 0.4).unwrap();
        let n = 1 << 14;
        let (mut best, mut at) = (f64::INFINITY, 0.0);
        for k in 0..=n {
            let x = k as f64 / n as f64;
            let w = neg.primitive(x).unwrap();
            if w < best {
                best = w;
                at = x;
            }
        }
        assert_abs_diff_eq!(best, -0.2, epsilon = 1e-15);
        assert_eq!(at, 0.5);
        assert!(PeriodicProfile::constant(1.0, 1.0).unwrap().primitive(0.5).is_err());
    }

    #[test]
    fn argmin_examples() {
        assert_eq!(PeriodicProfile::zero(1.0).unwrap().argmin_primitive(), 0.0);
        assert_eq!(square(0.3).argmin_primitive(), 0.0);
        assert_eq!(PeriodicProfile::square_wave(1.0, -0.3, 0.3).unwrap().argmin_primitive(), 0.5);
        // linear ramp −1 → 1: minimum at the zero crossing
        let ramp = PeriodicProfile::new(2.0, &[(2.0, PieceKind::Linear { left: -1.0, right: 1.0 })]).unwrap();
        assert_abs_diff_eq!(ramp.argmin_primitive(), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn divides_examples() {
        let b = ConvexFlux::burgers();
        let z = PeriodicProfile::zero(1.0).unwrap();
        let d = divides(&z, &b, 0.0, -1..=1).unwrap();
        assert_eq!(d.iter().map(|l| l.anchor).collect::<Vec<_>>(), vec![-1.0, 0.0, 1.0]);
        assert!(d.iter().all(|l| l.slope == 0.0));
        let neg = PeriodicProfile::square_wave(1.0, -0.3, 0.3).unwrap();
        let d = divides(&neg, &b, 0.0, -2..=2).unwrap();
        for l in &d {
            assert_eq!(l.anchor, 0.5 + l.index as f64);
        }
        let d = divides(&z, &b, 2.0, 0..=3).unwrap();
        assert!(d.iter().all(|l| l.slope == 2.0 && l.anchor == l.index as f64));
        assert_eq!(d[1].position(0.5), 2.0);
    }

    #[test]
    fn eval_conventions() {
        let s = square(0.3);
        assert_eq!(s.eval(0.5), -0.3);
        assert_eq!(s.eval_left(0.5), 0.3);
        assert_eq!(s.eval(-0.25), -0.3);
        assert_eq!(s.eval_left(0.0), -0.3);
        assert_eq!(s.lower_bound(), -0.3 - BOUND_MARGIN);
    }

    #[test]
    fn two_constant_facts() {
        let tc = TwoConstantProfile::new(1.0, 3.0, 2.0, 0.25).unwrap();
        let p = tc.to_profile().unwrap();
        assert_abs_diff_eq!(p.mean(), 0.25, epsilon = 1e-15);
        let one = TwoConstantProfile::new(1.0, 1.0, 1.0, 0.0).unwrap();
        assert_eq!(one.t_p(&ConvexFlux::burgers()).unwrap(), 1.0);
        let e = TwoConstantProfile::new(1.0, 1.0, 1.0, 0.0).unwrap();
        let tp = e.t_p(&ConvexFlux::exp()).unwrap();
        assert_abs_diff_eq!(tp, 1.0 / (1.0 - (-1f64).exp()), epsilon = 1e-14);
    }

    #[test]
    fn riemann_ic() {
        let ic = RiemannPerturbedIC::new(ConvexFlux::burgers(), 1.0, -1.0, square(0.3)).unwrap();
        assert_eq!(ic.shock_speed(), 0.0);
        assert_eq!(ic.eval(-0.25), 0.7);
        assert_eq!(ic.eval(0.25), -0.7);
        assert_eq!(ic.eval(0.0), -0.7);
        assert_eq!(ic.eval_left(0.0), 0.7);
        assert_abs_diff_eq!(ic.integral(-1.0, 0.5), 1.0 - 0.5 + 0.15, epsilon = 1e-15);
        assert!(RiemannPerturbedIC::new(
            ConvexFlux::burgers(),
            1.0,
            -1.0,
            PeriodicProfile::constant(1.0, 0.2).unwrap()
        )
        .is_err());
        let same = RiemannPerturbedIC::unperturbed(ConvexFlux::burgers(), 0.4, 0.4).unwrap();
        assert_eq!(same.shock_speed(), 0.4);
    }

    fn random_profile() -> impl Strategy<Value = PeriodicProfile> {
        (0.2f64..3.0, proptest::collection::vec((0.05f64..1.0, -2.0f64..2.0, -2.0f64..2.0, any::<bool>()), 1..8))
            .prop_map(|(p, raw)| {
                let total: f64 = raw.iter().map(|r| r.0).sum();
                let pieces: Vec<(f64, PieceKind)> = raw
                    .iter()
                    .map(|&(w, a, b, lin)| {
                        let kind = if lin { PieceKind::Linear { left: a, right: b } } else { PieceKind::Constant(a) };
                        (w / total * p, kind)
                    })
                    .collect();
                PeriodicProfile::new(p, &pieces).unwrap().shift_to_zero_mean().0
            })
    }

    proptest! {
        #[test]
        fn primitive_is_periodic(w in random_profile(), x in -20.0f64..20.0) {
            let p = w.period();
            let a = w.primitive(x).unwrap();
            let b = w.primitive(x + p).unwrap();
            prop_assert!((a - b).abs() <= 1e-12 * (1.0 + x.abs()));
        }

        #[test]
        fn integral_from_argmin_nonnegative(w in random_profile()) {
            let a = w.argmin_primitive();
            prop_assert!((0.0..w.period()).contains(&a));
            let n = 1 << 14;
            for k in 0..=n {
                let x = a + w.period() * k as f64 / n as f64;
                prop_assert!(w.integral(a, x) >= -1e-12);
            }
        }

        #[test]
        fn bounds_strict(w in random_profile(), x in -5.0f64..5.0) {
            let v = w.eval(x);
            prop_assert!(w.lower_bound() < v && v < w.upper_bound());
        }

        #[test]
        fn two_constant_mean(m1 in 0.01f64..5.0, m2 in 0.01f64..5.0, p in 0.1f64..4.0, ubar in -2.0f64..2.0) {
            let tc = TwoConstantProfile::new(m1, m2, p, ubar).unwrap();
            prop_assert!((tc.to_profile().unwrap().mean() - ubar).abs() <= 1e-14 * (1.0 + m1 + m2 + ubar.abs()));
        }

        #[test]
        fn mean_after_shift(w in random_profile(), c in -3.0f64..3.0) {
            let (z, m) = w.offset(c).shift_to_zero_mean();
            prop_assert!(z.mean().abs() <= 1e-12);
            prop_assert!((m - c).abs() <= 1e-12);
        }
    }
}
