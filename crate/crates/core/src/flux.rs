//! Strictly convex fluxes, normalization about a reference state, and the
//! potential `g` with its balancing root `z(t)`.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{precondition, Error, Result};
use crate::quad::{integrate, QuadOptions};
use crate::roots::bisect_increasing;

pub type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Closed real interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo <= hi) || !lo.is_finite() || !hi.is_finite() {
            return Err(precondition(format!("invalid interval [{lo}, {hi}]")));
        }
        Ok(Interval { lo, hi })
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn contains_interval(&self, other: &Interval) -> bool {
        self.contains(other.lo) && self.contains(other.hi)
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FluxKind {
    /// `u²/2`; the only flux the exact Hopf evaluator accepts.
    Burgers,
    /// `eᵘ − 1 − u`.
    Exp,
    Custom,
}

/// A strictly convex flux together with its first two derivatives and the
/// inverse of its derivative, all valid on `domain`.
#[derive(Clone)]
pub struct ConvexFlux {
    name: String,
    kind: FluxKind,
    f: ScalarFn,
    df: ScalarFn,
    d2f: ScalarFn,
    inv_df: ScalarFn,
    domain: Interval,
    slope_range: Interval,
}

impl fmt::Debug for ConvexFlux {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ConvexFlux")
            .field("name", &self.name)
            .field("kind", &self.kind)
            .field("domain", &self.domain)
            .finish()
    }
}

const BURGERS_BOUND: f64 = 1e9;
const EXP_BOUND: f64 = 8.0;

impl ConvexFlux {
    /// Builds a flux from user-supplied evaluators.
    ///
    /// The derivative must be strictly increasing on `domain`; this is spot
    /// checked on a grid together with `f'' > 0` and the inverse round trip.
    pub fn custom(
        name: impl Into<String>,
        f: ScalarFn,
        df: ScalarFn,
        d2f: ScalarFn,
        inv_df: ScalarFn,
        domain: Interval,
    ) -> Result<Self> {
        let flux = Self::assemble(name.into(), FluxKind::Custom, f, df, d2f, inv_df, domain);
        flux.validate(257)?;
        Ok(flux)
    }

    fn assemble(
        name: String,
        kind: FluxKind,
        f: ScalarFn,
        df: ScalarFn,
        d2f: ScalarFn,
        inv_df: ScalarFn,
        domain: Interval,
    ) -> Self {
        let slope_range = Interval {
            lo: df(domain.lo),
            hi: df(domain.hi),
        };
        ConvexFlux {
            name,
            kind,
            f,
            df,
            d2f,
            inv_df,
            domain,
            slope_range,
        }
    }

    pub fn burgers() -> Self {
        Self::assemble(
            "burgers".into(),
            FluxKind::Burgers,
            Arc::new(|u| 0.5 * u * u),
            Arc::new(|u| u),
            Arc::new(|_| 1.0),
            Arc::new(|v| v),
            Interval {
                lo: -BURGERS_BOUND,
                hi: BURGERS_BOUND,
            },
        )
    }

    /// `eᵘ − 1 − u` on `[-8, 8]`, where `ln(1+v)` inverts the derivative to
    /// better than 1e-12.
    pub fn exp() -> Self {
        Self::assemble(
            "exp".into(),
            FluxKind::Exp,
            Arc::new(|u: f64| u.exp_m1() - u),
            Arc::new(|u: f64| u.exp_m1()),
            Arc::new(|u: f64| u.exp()),
            Arc::new(|v: f64| v.ln_1p()),
            Interval {
                lo: -EXP_BOUND,
                hi: EXP_BOUND,
            },
        )
    }

    /// Plain `eᵘ`, mostly useful as input to [`normalize`].
    pub fn pure_exp() -> Self {
        Self::assemble(
            "pure-exp".into(),
            FluxKind::Custom,
            Arc::new(|u: f64| u.exp()),
            Arc::new(|u: f64| u.exp()),
            Arc::new(|u: f64| u.exp()),
            Arc::new(|v: f64| v.ln()),
            Interval {
                lo: -EXP_BOUND,
                hi: EXP_BOUND,
            },
        )
    }

    /// Looks up a built-in flux by its config name.
    pub fn by_name(name: &str) -> Result<Self> {
        match name {
            "burgers" => Ok(Self::burgers()),
            "exp" => Ok(Self::exp()),
            other => Err(Error::Config(format!("unknown flux `{other}` (expected burgers or exp)"))),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn kind(&self) -> FluxKind {
        self.kind
    }

    pub fn domain(&self) -> Interval {
        self.domain
    }

    /// Range of `f'` over the domain, i.e. the domain of `(f')⁻¹`.
    pub fn slope_range(&self) -> Interval {
        self.slope_range
    }

    fn check(&self, u: f64) -> Result<()> {
        if self.domain.contains(u) {
            Ok(())
        } else {
            Err(Error::Domain {
                what: "u",
                value: u,
                lo: self.domain.lo,
                hi: self.domain.hi,
            })
        }
    }

    pub fn eval(&self, u: f64) -> Result<f64> {
        self.check(u)?;
        Ok((self.f)(u))
    }

    pub fn deriv(&self, u: f64) -> Result<f64> {
        self.check(u)?;
        Ok((self.df)(u))
    }

    pub fn second_deriv(&self, u: f64) -> Result<f64> {
        self.check(u)?;
        Ok((self.d2f)(u))
    }

    pub fn inv_deriv(&self, v: f64) -> Result<f64> {
        if !self.slope_range.contains(v) {
            return Err(Error::Domain {
                what: "f'(u)",
                value: v,
                lo: self.slope_range.lo,
                hi: self.slope_range.hi,
            });
        }
        Ok((self.inv_df)(v).clamp(self.domain.lo, self.domain.hi))
    }

    // Unchecked evaluators for inner loops whose inputs were validated once.
    pub(crate) fn f_raw(&self, u: f64) -> f64 {
        (self.f)(u)
    }

    pub(crate) fn df_raw(&self, u: f64) -> f64 {
        (self.df)(u)
    }

    /// Grid check of convexity, monotone derivative and inverse round trip.
    pub fn validate(&self, points: usize) -> Result<()> {
        let n = points.max(2);
        let Interval { lo, hi } = self.domain;
        let mut prev = f64::NEG_INFINITY;
        for k in 0..n {
            let u = lo + (hi - lo) * k as f64 / (n - 1) as f64;
            let d2 = (self.d2f)(u);
            if !(d2 > 0.0) {
                return Err(precondition(format!("f''({u}) = {d2} is not positive")));
            }
            let d = (self.df)(u);
            if !(d > prev) {
                return Err(precondition(format!("f' is not increasing at u = {u}")));
            }
            prev = d;
            let back = (self.inv_df)(d);
            if (back - u).abs() > 1e-12 * u.abs().max(1.0) {
                return Err(precondition(format!("(f')⁻¹(f'({u})) = {back}")));
            }
        }
        Ok(())
    }
}

/// Rankine–Hugoniot speed of the jump from `ul` to `ur`.
pub fn rh_speed(flux: &ConvexFlux, ul: f64, ur: f64) -> Result<f64> {
    if ul == ur {
        return Err(Error::Degenerate(format!("no jump: ul = ur = {ul}")));
    }
    let fl = flux.eval(ul)?;
    let fr = flux.eval(ur)?;
    if flux.kind == FluxKind::Burgers {
        return Ok(0.5 * (ul + ur));
    }
    Ok((fl - fr) / (ul - ur))
}

/// A flux whose value and slope vanish at `ubar`, obtained by subtracting
/// the tangent line there. Entropy solutions are unaffected apart from a
/// constant drift `f'(ū)` of the frame.
#[derive(Debug, Clone)]
pub struct NormalizedFlux {
    base: ConvexFlux,
    ubar: f64,
    flux: ConvexFlux,
}

pub fn normalize(flux: &ConvexFlux, ubar: f64) -> Result<NormalizedFlux> {
    let f0 = flux.eval(ubar)?;
    let d0 = flux.deriv(ubar)?;
    if f0 == 0.0 && d0 == 0.0 {
        return Ok(NormalizedFlux {
            base: flux.clone(),
            ubar,
            flux: flux.clone(),
        });
    }
    let (f, df, inv) = (flux.f.clone(), flux.df.clone(), flux.inv_df.clone());
    let normalized = ConvexFlux::assemble(
        format!("{}@{}", flux.name, ubar),
        FluxKind::Custom,
        Arc::new(move |u| f(u) - f0 - d0 * (u - ubar)),
        Arc::new(move |u| df(u) - d0),
        flux.d2f.clone(),
        Arc::new(move |v| inv(v + d0)),
        flux.domain,
    );
    Ok(NormalizedFlux {
        base: flux.clone(),
        ubar,
        flux: normalized,
    })
}

impl NormalizedFlux {
    pub fn base(&self) -> &ConvexFlux {
        &self.base
    }

    pub fn ubar(&self) -> f64 {
        self.ubar
    }

    pub fn flux(&self) -> &ConvexFlux {
        &self.flux
    }
}

/// `g(v) = ∫₀ᵛ [(f')⁻¹(s) − ū] ds` for a normalized flux.
#[derive(Clone)]
pub struct GPotential {
    flux: NormalizedFlux,
    closed_form: Option<ScalarFn>,
}

impl fmt::Debug for GPotential {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GPotential")
            .field("flux", &self.flux)
            .field("closed_form", &self.closed_form.is_some())
            .finish()
    }
}

impl GPotential {
    /// Uses the closed form `v²/2` for Burgers and quadrature otherwise.
    pub fn new(flux: NormalizedFlux) -> Self {
        let closed_form: Option<ScalarFn> = if flux.base.kind == FluxKind::Burgers {
            Some(Arc::new(|v| 0.5 * v * v))
        } else {
            None
        };
        GPotential { flux, closed_form }
    }

    pub fn with_closed_form(flux: NormalizedFlux, g: ScalarFn) -> Self {
        GPotential {
            flux,
            closed_form: Some(g),
        }
    }

    pub fn quadrature_only(flux: NormalizedFlux) -> Self {
        GPotential {
            flux,
            closed_form: None,
        }
    }

    pub fn flux(&self) -> &NormalizedFlux {
        &self.flux
    }

    pub fn g_of(&self, v: f64) -> Result<f64> {
        let nf = &self.flux.flux;
        let range = nf.slope_range;
        if !range.contains(v) {
            return Err(Error::Domain {
                what: "v",
                value: v,
                lo: range.lo,
                hi: range.hi,
            });
        }
        if v == 0.0 {
            return Ok(0.0);
        }
        if let Some(g) = &self.closed_form {
            return Ok(g(v));
        }
        let ubar = self.flux.ubar;
        let inv = nf.inv_df.clone();
        let q = integrate(move |s| inv(s) - ubar, 0.0, v, QuadOptions::abs(1e-13));
        if !q.converged {
            return Err(Error::Internal(format!("quadrature for g({v}) did not converge")));
        }
        Ok(q.value)
    }

    /// The unique `z ∈ (0, p)` with `g(z/t) = g((z−p)/t)`.
    pub fn z_of(&self, p: f64, t: f64) -> Result<f64> {
        if !(p > 0.0) || !(t > 0.0) {
            return Err(precondition(format!("z(t) needs p > 0 and t > 0 (p = {p}, t = {t})")));
        }
        let range = self.flux.flux.slope_range;
        // Only z with both z/t and (z−p)/t in the slope range are admissible.
        let lo = (range.lo * t + p).max(0.0);
        let hi = (range.hi * t).min(p);
        if !(lo < hi) {
            return Err(Error::Domain {
                what: "p/t",
                value: p / t,
                lo: range.lo,
                hi: range.hi,
            });
        }
        let h = |z: f64| -> Result<f64> { Ok(self.g_of(z / t)? - self.g_of((z - p) / t)?) };
        if lo > 0.0 && h(lo)? >= 0.0 || hi < p && h(hi)? <= 0.0 {
            return Err(Error::Domain {
                what: "p/t",
                value: p / t,
                lo: range.lo,
                hi: range.hi,
            });
        }
        let (z, _) = bisect_increasing(h, lo, hi, 200)?;
        if !(z > 0.0 && z < p) {
            return Err(Error::Internal(format!("z = {z} escaped (0, {p})")));
        }
        Ok(z)
    }

    /// `|g(z/t) − g((z−p)/t)|` at the computed root.
    pub fn z_residual(&self, p: f64, t: f64) -> Result<(f64, f64)> {
        let z = self.z_of(p, t)?;
        let r = (self.g_of(z / t)? - self.g_of((z - p) / t)?).abs();
        Ok((z, r))
    }
}
