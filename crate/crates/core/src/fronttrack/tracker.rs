use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use super::polygon::FluxPolygon;
use super::state::PiecewiseConstantState;
use crate::error::{precondition, Error, Result};
use crate::flux::Interval;
use crate::profile::{PieceKind, RiemannPerturbedIC};

const NIL: usize = usize::MAX;

#[derive(Debug, Clone)]
struct Slot {
    x0: f64,
    t0: f64,
    speed: f64,
    left: usize,
    right: usize,
    prev: usize,
    next: usize,
    // Added to the next front's position to express it in this front's frame.
    // Non-zero only on the link that closes a periodic chain.
    off: f64,
    alive: bool,
    version: u32,
    tracer: bool,
}

impl Slot {
    fn pos(&self, t: f64) -> f64 {
        self.x0 + self.speed * (t - self.t0)
    }
}

#[derive(Debug, Clone, Copy)]
struct Event {
    t: f64,
    x: f64,
    a: usize,
    va: u32,
    b: usize,
    vb: u32,
}

impl PartialEq for Event {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Event {}
impl PartialOrd for Event {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Event {
    // Reversed so the max-heap pops the earliest event first.
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .t
            .total_cmp(&self.t)
            .then(other.x.total_cmp(&self.x))
            .then(other.a.cmp(&self.a))
    }
}

/// Event-driven exact solver for the polygonal flux.
#[derive(Debug, Clone)]
pub struct FrontTracker {
    poly: FluxPolygon,
    slots: Vec<Slot>,
    free: Vec<usize>,
    head: usize,
    background: usize,
    period: Option<f64>,
    time: f64,
    heap: BinaryHeap<Event>,
    tracked: Option<usize>,
    events: u64,
    scratch: Vec<(usize, usize, f64)>,
}

impl FrontTracker {
    pub fn new(state: &PiecewiseConstantState, poly: &FluxPolygon) -> Result<Self> {
        let idx: Vec<usize> = state
            .values
            .iter()
            .map(|&v| {
                poly.node_index(v)
                    .ok_or_else(|| precondition(format!("state value {v} is not a polygon node")))
            })
            .collect::<Result<_>>()?;
        let mut tr = FrontTracker {
            poly: poly.clone(),
            slots: Vec::new(),
            free: Vec::new(),
            head: NIL,
            background: idx[0],
            period: state.period,
            time: state.time,
            heap: BinaryHeap::new(),
            tracked: None,
            events: 0,
            scratch: Vec::new(),
        };
        let mut chain = Vec::new();
        let mut fan = Vec::new();
        for (i, &b) in state.breakpoints.iter().enumerate() {
            fan.clear();
            tr.poly.fan_indices(idx[i], idx[i + 1], &mut fan);
            for &(l, r, s) in &fan {
                chain.push(tr.alloc(b, s, l, r, false));
            }
        }
        tr.link_chain(&chain);
        for &s in &chain {
            tr.schedule(s);
        }
        Ok(tr)
    }

    /// Tracker on a line state that also follows the maximal forward
    /// characteristic from `x0`.
    pub fn with_tracer(state: &PiecewiseConstantState, poly: &FluxPolygon, x0: f64) -> Result<Self> {
        if state.period.is_some() {
            return Err(precondition("tracing needs a line state"));
        }
        let mut tr = FrontTracker::new(state, poly)?;
        let t = tr.time;
        let tol = 1e-12 * (1.0 + x0.abs());
        // Fronts emitted exactly at x0: ride the rightmost one.
        let mut cur = tr.head;
        let mut before = NIL;
        let mut at = NIL;
        while cur != NIL {
            let x = tr.slots[cur].pos(t);
            if (x - x0).abs() <= tol {
                at = cur;
            } else if x < x0 {
                before = cur;
            } else {
                break;
            }
            cur = tr.slots[cur].next;
        }
        if at != NIL {
            tr.tracked = Some(at);
            return Ok(tr);
        }
        let u = if before == NIL {
            if tr.head == NIL { tr.background } else { tr.slots[tr.head].left }
        } else {
            tr.slots[before].right
        };
        let id = tr.alloc(x0, tr.poly.flux().df_raw(tr.poly.value(u)), u, u, true);
        let after = if before == NIL { tr.head } else { tr.slots[before].next };
        tr.splice(before, &[id], after, 0.0);
        if before == NIL {
            tr.head = id;
        }
        if before != NIL {
            tr.schedule(before);
        }
        tr.schedule(id);
        tr.tracked = Some(id);
        Ok(tr)
    }

    pub fn poly(&self) -> &FluxPolygon {
        &self.poly
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn event_count(&self) -> u64 {
        self.events
    }

    pub fn front_count(&self) -> usize {
        self.slots.iter().filter(|s| s.alive && !s.tracer).count()
    }

    /// Position of the followed characteristic at the current time.
    pub fn tracked_position(&self) -> Option<f64> {
        self.tracked.map(|s| self.slots[s].pos(self.time))
    }

    fn alloc(&mut self, x0: f64, speed: f64, left: usize, right: usize, tracer: bool) -> usize {
        let slot = Slot {
            x0,
            t0: self.time,
            speed,
            left,
            right,
            prev: NIL,
            next: NIL,
            off: 0.0,
            alive: true,
            version: 0,
            tracer,
        };
        match self.free.pop() {
            Some(i) => {
                let v = self.slots[i].version.wrapping_add(1);
                self.slots[i] = Slot { version: v, ..slot };
                i
            }
            None => {
                self.slots.push(slot);
                self.slots.len() - 1
            }
        }
    }

    fn release(&mut self, i: usize) {
        let s = &mut self.slots[i];
        s.alive = false;
        s.version = s.version.wrapping_add(1);
        self.free.push(i);
    }

    fn link_chain(&mut self, chain: &[usize]) {
        for w in chain.windows(2) {
            self.slots[w[0]].next = w[1];
            self.slots[w[1]].prev = w[0];
        }
        if let (Some(&first), Some(&last)) = (chain.first(), chain.last()) {
            self.head = first;
            if let Some(p) = self.period {
                self.slots[last].next = first;
                self.slots[last].off = p;
                self.slots[first].prev = last;
            }
        }
    }

    // Links prev → items → next; `tail_off` is the offset from the last
    // inserted item (or from prev when items is empty) to next.
    fn splice(&mut self, prev: usize, items: &[usize], next: usize, tail_off: f64) {
        let mut last = prev;
        for &i in items {
            self.slots[i].prev = last;
            if last != NIL {
                self.slots[last].next = i;
            }
            last = i;
        }
        if last != NIL {
            self.slots[last].next = next;
            self.slots[last].off = tail_off;
        }
        if next != NIL {
            self.slots[next].prev = last;
        }
    }

    fn schedule(&mut self, a: usize) {
        let b = self.slots[a].next;
        if b == NIL || b == a {
            return;
        }
        let (sa, sb) = (&self.slots[a], &self.slots[b]);
        let closing = sa.speed - sb.speed;
        if !(closing > 0.0) {
            return;
        }
        let now = self.time;
        let xa = sa.pos(now);
        let gap = sb.pos(now) + sa.off - xa;
        let t = now + gap.max(0.0) / closing;
        self.heap.push(Event {
            t,
            x: xa + sa.speed * (t - now),
            a,
            va: sa.version,
            b,
            vb: sb.version,
        });
    }

    fn valid(&self, ev: &Event) -> bool {
        let (a, b) = (&self.slots[ev.a], &self.slots[ev.b]);
        a.alive && b.alive && a.version == ev.va && b.version == ev.vb && a.next == ev.b
    }

    /// Processes all collisions up to `t_end`.
    pub fn advance_to(&mut self, t_end: f64) -> Result<()> {
        if t_end < self.time {
            return Err(precondition(format!("cannot step back from t={} to t={t_end}", self.time)));
        }
        while let Some(&ev) = self.heap.peek() {
            if ev.t > t_end {
                break;
            }
            self.heap.pop();
            if self.valid(&ev) {
                self.collide(ev);
            }
        }
        self.time = t_end;
        Ok(())
    }

    fn collide(&mut self, ev: Event) {
        self.events += 1;
        let t = ev.t.max(self.time);
        self.time = t;
        let a = ev.a;
        let xc = self.slots[a].pos(t);
        let tol = 1e-12 * (1.0 + xc.abs() + self.poly.max_abs_speed() * t.abs());

        // The event partner always joins, whatever rounding says.
        let mut first = a;
        let mut last = ev.b;
        let mut cum_right = self.slots[a].off;
        let mut members = 2usize;
        loop {
            let cand = self.slots[last].next;
            if cand == NIL || cand == first {
                break;
            }
            let x = self.slots[cand].pos(t) + cum_right + self.slots[last].off;
            if (x - xc).abs() > tol {
                break;
            }
            cum_right += self.slots[last].off;
            last = cand;
            members += 1;
        }
        let mut cum_left = 0.0;
        loop {
            let cand = self.slots[first].prev;
            if cand == NIL || cand == last {
                break;
            }
            let shift = cum_left - self.slots[cand].off;
            let x = self.slots[cand].pos(t) + shift;
            if (x - xc).abs() > tol {
                break;
            }
            cum_left = shift;
            first = cand;
            members += 1;
        }
        let prev = self.slots[first].prev;
        let next = self.slots[last].next;
        let whole_cycle = prev == last;
        let (l, r) = (self.slots[first].left, self.slots[last].right);
        let mut tracked_hit = false;
        let mut cur = first;
        let mut removed = Vec::with_capacity(members);
        for _ in 0..members {
            removed.push(cur);
            if Some(cur) == self.tracked {
                tracked_hit = true;
            }
            cur = self.slots[cur].next;
        }
        let tail_off = (cum_right - cum_left) + self.slots[last].off;
        let head_removed = removed.contains(&self.head);
        for &i in &removed {
            self.release(i);
        }

        if whole_cycle {
            // Every front met at one point; only a constant can remain.
            self.head = NIL;
            self.background = l;
            return;
        }

        let x_new = xc - cum_left;
        self.scratch.clear();
        self.poly.fan_indices(l, r, &mut self.scratch);
        let fan = std::mem::take(&mut self.scratch);
        let mut items: Vec<usize> = fan.iter().map(|&(fl, fr, s)| self.alloc(x_new, s, fl, fr, false)).collect();
        self.scratch = fan;
        if tracked_hit {
            self.tracked = if items.is_empty() {
                let id = self.alloc(x_new, self.poly.flux().df_raw(self.poly.value(l)), l, l, true);
                items.push(id);
                Some(id)
            } else if l > r {
                Some(items[0])
            } else {
                items.last().copied()
            };
        }
        let tail = if items.is_empty() && prev != NIL {
            self.slots[prev].off + tail_off
        } else {
            tail_off
        };
        self.splice(prev, &items, next, tail);
        if prev == NIL || head_removed {
            self.head = items.first().copied().unwrap_or(next);
        }
        if self.head == NIL {
            self.background = l;
        }
        if prev != NIL {
            self.schedule(prev);
        }
        for &i in &items {
            self.schedule(i);
        }
    }

    /// Current solution as a piecewise constant state.
    pub fn state(&self) -> PiecewiseConstantState {
        let t = self.time;
        if self.head == NIL {
            return PiecewiseConstantState {
                time: t,
                breakpoints: Vec::new(),
                values: vec![self.poly.value(self.background)],
                period: self.period,
            };
        }
        let mut breaks: Vec<f64> = Vec::new();
        let mut vals: Vec<usize> = vec![self.slots[self.head].left];
        let start = self.head;
        let origin = self.slots[start].pos(t);
        let limit = self.period.map_or(f64::INFINITY, |p| origin + p);
        let mut cur = start;
        let mut shift = 0.0;
        loop {
            let s = &self.slots[cur];
            if !s.tracer {
                let x = (s.pos(t) + shift).min(limit);
                if x >= limit {
                    // Rounding pushed a front onto the next period copy.
                    *vals.last_mut().expect("non-empty") = s.right;
                } else if breaks.last().is_some_and(|&b| x <= b) {
                    *vals.last_mut().expect("non-empty") = s.right;
                } else {
                    breaks.push(x);
                    vals.push(s.right);
                }
                if vals.len() >= 2 && vals[vals.len() - 1] == vals[vals.len() - 2] {
                    vals.pop();
                    breaks.pop();
                }
            }
            shift += s.off;
            cur = s.next;
            if cur == NIL || cur == start {
                break;
            }
        }
        PiecewiseConstantState {
            time: t,
            breakpoints: breaks,
            values: vals.into_iter().map(|i| self.poly.value(i)).collect(),
            period: self.period,
        }
    }
}

/// Evolves `state` to `t_end` with the polygonal flux.
pub fn evolve(state: &PiecewiseConstantState, poly: &FluxPolygon, t_end: f64) -> Result<PiecewiseConstantState> {
    if t_end < state.time {
        return Err(precondition(format!("t_end {t_end} precedes the state time {}", state.time)));
    }
    let mut tr = FrontTracker::new(state, poly)?;
    tr.advance_to(t_end)?;
    Ok(tr.state())
}

/// Where a shock path came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PathSource {
    FrontTracking,
    Oracle,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShockPath {
    pub times: Vec<f64>,
    pub positions: Vec<f64>,
    pub source: PathSource,
}

impl ShockPath {
    /// Largest `|ΔX|/Δt` between consecutive samples.
    pub fn lipschitz(&self) -> f64 {
        self.times
            .windows(2)
            .zip(self.positions.windows(2))
            .map(|(t, x)| (x[1] - x[0]).abs() / (t[1] - t[0]))
            .fold(0.0, f64::max)
    }
}

/// Node-snapped initial data of `ic` on `window`, constant outside.
pub fn snapped_initial_state(ic: &RiemannPerturbedIC, poly: &FluxPolygon, window: Interval) -> Result<PiecewiseConstantState> {
    let profile = ic.perturbation();
    if !profile.is_piecewise_constant() {
        return Err(precondition("front tracking needs a piecewise constant perturbation"));
    }
    let p = profile.period();
    let mut cuts = vec![0.0];
    let k0 = (window.lo / p).floor() as i64;
    let k1 = (window.hi / p).ceil() as i64;
    for k in k0..=k1 {
        for piece in profile.pieces() {
            let x = piece.start + k as f64 * p;
            if x > window.lo && x < window.hi && x != 0.0 {
                cuts.push(x);
            }
        }
    }
    cuts.retain(|&x| x > window.lo && x < window.hi);
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let snap = |u: f64| -> Result<f64> {
        let range = poly.range();
        if u < range.lo - 1e-12 || u > range.hi + 1e-12 {
            return Err(Error::Domain { what: "initial value", value: u, lo: range.lo, hi: range.hi });
        }
        Ok(poly.value(poly.nearest_node(u)))
    };
    // Sample inside each interval: evaluating exactly at a cut can land on
    // the wrong side after reducing modulo the period.
    let half = 0.5 * profile.pieces().iter().map(|q| q.width).fold(f64::INFINITY, f64::min);
    let first = cuts[0];
    let mut breakpoints = Vec::new();
    let mut values = vec![snap(ic.eval(first - half))?];
    for (i, &x) in cuts.iter().enumerate() {
        let mid = cuts.get(i + 1).map_or(x + half, |&y| 0.5 * (x + y));
        let v = snap(ic.eval(mid))?;
        if v != *values.last().expect("non-empty") {
            breakpoints.push(x);
            values.push(v);
        }
    }
    PiecewiseConstantState::new(0.0, breakpoints, values, None)
}

/// Node-snapped periodic data `ū + w₀` over one period starting at 0.
pub fn snapped_periodic_state(
    profile: &crate::profile::PeriodicProfile,
    ubar: f64,
    poly: &FluxPolygon,
) -> Result<PiecewiseConstantState> {
    let mut entries: Vec<(f64, f64)> = Vec::new();
    for piece in profile.pieces() {
        let PieceKind::Constant(c) = piece.kind else {
            return Err(precondition("front tracking needs a piecewise constant perturbation"));
        };
        let v = poly.value(poly.nearest_node(ubar + c));
        if entries.last().map(|e| e.1) != Some(v) {
            entries.push((piece.start, v));
        }
    }
    let period = Some(profile.period());
    if entries.len() > 1 && entries[0].1 == entries[entries.len() - 1].1 {
        // No jump at the period start.
        entries.remove(0);
    }
    if entries.len() == 1 {
        return PiecewiseConstantState::new(0.0, Vec::new(), vec![entries[0].1], period);
    }
    let mut values = vec![entries[entries.len() - 1].1];
    values.extend(entries.iter().map(|e| e.1));
    PiecewiseConstantState::new(0.0, entries.iter().map(|e| e.0).collect(), values, period)
}

/// Maximal forward characteristic from the origin, sampled at `t_samples`.
pub fn shock_path(ic: &RiemannPerturbedIC, poly: &FluxPolygon, t_samples: &[f64]) -> Result<ShockPath> {
    ic.require_shock()?;
    if t_samples.windows(2).any(|w| !(w[1] > w[0])) || t_samples.first().is_some_and(|&t| t < 0.0) {
        return Err(precondition("time samples must be increasing and nonnegative"));
    }
    let t_end = t_samples.last().copied().unwrap_or(0.0);
    let p = ic.period();
    let reach = poly.max_abs_speed() * t_end + ic.shock_speed().abs() * t_end + 2.0 * p;
    let window = Interval::new(-reach, reach)?;
    let state = snapped_initial_state(ic, poly, window)?;
    let mut tr = FrontTracker::with_tracer(&state, poly, 0.0)?;
    let mut positions = Vec::with_capacity(t_samples.len());
    for &t in t_samples {
        tr.advance_to(t)?;
        positions.push(tr.tracked_position().ok_or_else(|| Error::Internal("lost the tracked front".into()))?);
    }
    Ok(ShockPath {
        times: t_samples.to_vec(),
        positions,
        source: PathSource::FrontTracking,
    })
}
