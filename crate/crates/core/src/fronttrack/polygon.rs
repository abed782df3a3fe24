use serde::{Deserialize, Serialize};

use crate::error::{precondition, Error, Result};
use crate::flux::{ConvexFlux, Interval};

/// Piecewise linear interpolant of a convex flux on a uniform `u`-grid.
#[derive(Debug, Clone)]
pub struct FluxPolygon {
    flux: ConvexFlux,
    delta: f64,
    u: Vec<f64>,
    f: Vec<f64>,
    chords: Vec<f64>,
}

/// A wave front of the polygonal Riemann solution, emitted from `position`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Front {
    pub position: f64,
    pub left_value: f64,
    pub right_value: f64,
    pub speed: f64,
}

/// Interpolates `flux` at `lo + kδ` over `u_range`, closing the grid with
/// the upper end of the range.
pub fn approximate_flux(flux: &ConvexFlux, delta: f64, u_range: Interval) -> Result<FluxPolygon> {
    if !(delta > 0.0) || !delta.is_finite() {
        return Err(precondition(format!("delta must be positive, got {delta}")));
    }
    if !flux.domain().contains_interval(&u_range) {
        return Err(Error::Domain {
            what: "u range",
            value: if flux.domain().contains(u_range.lo) { u_range.hi } else { u_range.lo },
            lo: flux.domain().lo,
            hi: flux.domain().hi,
        });
    }
    let Interval { lo, hi } = u_range;
    if !(hi > lo) {
        return Err(precondition("u range must have positive width"));
    }
    let steps = ((hi - lo) / delta * (1.0 + 1e-12)).floor() as usize;
    if steps > 50_000_000 {
        return Err(precondition(format!("delta {delta} gives too many nodes on {u_range}")));
    }
    let mut u: Vec<f64> = (0..=steps).map(|k| lo + k as f64 * delta).collect();
    let last = *u.last().expect("at least one node");
    if hi - last > 1e-9 * delta {
        u.push(hi);
    } else {
        *u.last_mut().expect("at least one node") = hi;
    }
    if u.len() < 2 {
        u = vec![lo, hi];
    }
    let f: Vec<f64> = u.iter().map(|&x| flux.eval(x)).collect::<Result<_>>()?;
    let chords: Vec<f64> = (0..u.len() - 1).map(|k| (f[k + 1] - f[k]) / (u[k + 1] - u[k])).collect();
    if chords.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(precondition(format!(
            "chord slopes not increasing; delta {delta} is below the resolution of the flux"
        )));
    }
    Ok(FluxPolygon {
        flux: flux.clone(),
        delta,
        u,
        f,
        chords,
    })
}

impl FluxPolygon {
    pub fn flux(&self) -> &ConvexFlux {
        &self.flux
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn node_count(&self) -> usize {
        self.u.len()
    }

    pub fn range(&self) -> Interval {
        Interval {
            lo: self.u[0],
            hi: *self.u.last().expect("non-empty"),
        }
    }

    /// `(u, f(u))` pairs.
    pub fn nodes(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.u.iter().copied().zip(self.f.iter().copied())
    }

    pub fn value(&self, i: usize) -> f64 {
        self.u[i]
    }

    pub fn flux_at(&self, i: usize) -> f64 {
        self.f[i]
    }

    /// Slope of the polygon between nodes `i` and `i + 1`.
    pub fn segment_speed(&self, i: usize) -> f64 {
        self.chords[i]
    }

    /// Rankine–Hugoniot speed of the polygon between two nodes.
    pub fn chord_speed(&self, i: usize, j: usize) -> f64 {
        if j == i + 1 {
            self.chords[i]
        } else if i == j + 1 {
            self.chords[j]
        } else {
            (self.f[j] - self.f[i]) / (self.u[j] - self.u[i])
        }
    }

    pub fn max_abs_speed(&self) -> f64 {
        self.chords[0].abs().max(self.chords[self.chords.len() - 1].abs())
    }

    /// Index of the node nearest to `u` (clamped to the grid).
    pub fn nearest_node(&self, u: f64) -> usize {
        let lo = self.u[0];
        let n = self.u.len() - 1;
        let k = ((u - lo) / self.delta).round();
        let k = if k < 0.0 { 0 } else { (k as usize).min(n) };
        // The closing node may be closer than the regular grid suggests.
        let mut best = k;
        for c in [k.saturating_sub(1), (k + 1).min(n)] {
            if (self.u[c] - u).abs() < (self.u[best] - u).abs() {
                best = c;
            }
        }
        best
    }

    /// Index of the node equal to `u` up to `1e-9·δ`.
    pub fn node_index(&self, u: f64) -> Option<usize> {
        let k = self.nearest_node(u);
        ((self.u[k] - u).abs() <= 1e-9 * self.delta).then_some(k)
    }

    /// Maximum of `|f − polygon|` on a fine scan of the range.
    pub fn interpolation_error(&self, per_cell: usize) -> f64 {
        let mut worst = 0.0f64;
        for k in 0..self.u.len() - 1 {
            for j in 1..per_cell {
                let u = self.u[k] + (self.u[k + 1] - self.u[k]) * j as f64 / per_cell as f64;
                let p = self.f[k] + self.chords[k] * (u - self.u[k]);
                worst = worst.max((self.flux.f_raw(u) - p).abs());
            }
        }
        worst
    }

    /// `(left, right, speed)` for each front solving the Riemann problem
    /// between nodes `l` and `r`: one shock if `l > r`, one front per grid
    /// cell of the fan if `l < r`.
    pub(crate) fn fan_indices(&self, l: usize, r: usize, out: &mut Vec<(usize, usize, f64)>) {
        use std::cmp::Ordering::*;
        match l.cmp(&r) {
            Equal => {}
            Greater => out.push((l, r, self.chord_speed(r, l))),
            Less => {
                for k in l..r {
                    out.push((k, k + 1, self.chords[k]));
                }
            }
        }
    }
}

/// Fronts solving the Riemann problem `(ul, ur)` for the polygonal flux,
/// all placed at the origin and ordered by speed.
pub fn riemann_fan(poly: &FluxPolygon, ul: f64, ur: f64) -> Result<Vec<Front>> {
    let node = |u: f64| {
        poly.node_index(u)
            .ok_or_else(|| precondition(format!("{u} is not a node of the flux polygon")))
    };
    let (l, r) = (node(ul)?, node(ur)?);
    let mut idx = Vec::new();
    poly.fan_indices(l, r, &mut idx);
    Ok(idx
        .into_iter()
        .map(|(a, b, s)| Front {
            position: 0.0,
            left_value: poly.value(a),
            right_value: poly.value(b),
            speed: s,
        })
        .collect())
}
