use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{precondition, Error, Result};

/// Piecewise constant function of `x` at a fixed time.
///
/// With a period, `breakpoints` lists the jumps inside one period
/// `[b₀, b₀ + p)` and `values[0] == values[n]` is the value left of `b₀`
/// (equivalently right of the last jump).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PiecewiseConstantState {
    pub time: f64,
    pub breakpoints: Vec<f64>,
    pub values: Vec<f64>,
    pub period: Option<f64>,
}

impl PiecewiseConstantState {
    pub fn new(time: f64, breakpoints: Vec<f64>, values: Vec<f64>, period: Option<f64>) -> Result<Self> {
        let state = PiecewiseConstantState {
            time,
            breakpoints,
            values,
            period,
        };
        state.check()?;
        Ok(state)
    }

    pub fn constant(time: f64, value: f64) -> Self {
        PiecewiseConstantState {
            time,
            breakpoints: Vec::new(),
            values: vec![value],
            period: None,
        }
    }

    fn check(&self) -> Result<()> {
        if self.values.len() != self.breakpoints.len() + 1 {
            return Err(precondition("need exactly one more value than breakpoints"));
        }
        if self.breakpoints.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(precondition("breakpoints must be strictly increasing"));
        }
        if self.values.windows(2).any(|w| w[0] == w[1]) {
            return Err(precondition("adjacent values must differ"));
        }
        if self.values.iter().chain(&self.breakpoints).any(|v| !v.is_finite()) {
            return Err(precondition("non-finite state entry"));
        }
        if let Some(p) = self.period {
            if !(p > 0.0) {
                return Err(precondition("period must be positive"));
            }
            if let (Some(&a), Some(&b)) = (self.breakpoints.first(), self.breakpoints.last()) {
                if b - a >= p {
                    return Err(precondition("breakpoints span more than one period"));
                }
                if self.values[0] != self.values[self.values.len() - 1] {
                    return Err(precondition("periodic state must wrap to its first value"));
                }
            }
        }
        Ok(())
    }

    pub fn piece_count(&self) -> usize {
        self.values.len()
    }

    fn reduce(&self, x: f64) -> f64 {
        match (self.period, self.breakpoints.first()) {
            (Some(p), Some(&b0)) => {
                let r = b0 + (x - b0).rem_euclid(p);
                if r >= b0 + p {
                    b0
                } else {
                    r
                }
            }
            _ => x,
        }
    }

    /// Right-continuous value at `x`.
    pub fn sample(&self, x: f64) -> f64 {
        let x = self.reduce(x);
        self.values[self.breakpoints.partition_point(|&b| b <= x)]
    }

    /// Left limit at `x`.
    pub fn sample_left(&self, x: f64) -> f64 {
        let x = self.reduce(x);
        self.values[self.breakpoints.partition_point(|&b| b < x)]
    }

    /// Average over one period.
    pub fn mean_per_period(&self) -> Result<f64> {
        let p = self.period.ok_or_else(|| precondition("state is not periodic"))?;
        let n = self.breakpoints.len();
        if n == 0 {
            return Ok(self.values[0]);
        }
        let b0 = self.breakpoints[0];
        let mut sum = 0.0;
        for i in 0..n {
            let right = if i + 1 < n { self.breakpoints[i + 1] - b0 } else { p };
            sum += self.values[i + 1] * (right - (self.breakpoints[i] - b0));
        }
        Ok(sum / p)
    }

    /// Sum of jump sizes (per period for periodic states).
    pub fn total_variation(&self) -> f64 {
        self.values.windows(2).map(|w| (w[1] - w[0]).abs()).sum()
    }

    /// Integral over `[a, b]`.
    pub fn integral(&self, a: f64, b: f64) -> f64 {
        if b < a {
            return -self.integral(b, a);
        }
        match self.period {
            Some(p) if !self.breakpoints.is_empty() => {
                let b0 = self.breakpoints[0];
                let whole = ((b - a) / p).floor();
                let per = self.mean_per_period().unwrap_or(0.0) * p;
                let rest_a = a + whole * p;
                let ra = self.reduce(rest_a);
                let rb = ra + (b - rest_a);
                let mut s = whole * per + self.line_integral(ra, rb.min(b0 + p));
                if rb > b0 + p {
                    s += self.line_integral(b0, rb - p);
                }
                s
            }
            _ => self.line_integral(a, b),
        }
    }

    fn line_integral(&self, a: f64, b: f64) -> f64 {
        let mut s = 0.0;
        let mut x = a;
        let mut i = self.breakpoints.partition_point(|&q| q <= a);
        while x < b {
            let next = self.breakpoints.get(i).copied().unwrap_or(f64::INFINITY).min(b);
            s += self.values[i] * (next - x);
            x = next;
            i += 1;
        }
        s
    }

    /// Jumps strictly inside `(a, b)` in increasing order, repeated over
    /// periods for periodic states.
    pub fn breakpoints_in(&self, a: f64, b: f64) -> Vec<f64> {
        let mut cuts = Vec::new();
        match (self.period, self.breakpoints.first()) {
            (Some(p), Some(&b0)) => {
                let lo = ((a - b0) / p).floor() as i64 - 1;
                let hi = ((b - b0) / p).ceil() as i64 + 1;
                for j in lo..=hi {
                    cuts.extend(self.breakpoints.iter().map(|&q| q + p * j as f64).filter(|&q| q > a && q < b));
                }
            }
            _ => {
                let i = self.breakpoints.partition_point(|&q| q <= a);
                let k = self.breakpoints.partition_point(|&q| q < b);
                if i < k {
                    cuts.extend_from_slice(&self.breakpoints[i..k]);
                }
            }
        }
        cuts.sort_by(f64::total_cmp);
        cuts.dedup();
        cuts
    }

    /// `sup |self − other|` over `(a, b)`, ignoring sub-intervals narrower
    /// than `slack`: the same front tracked in two states can sit at
    /// positions that differ by rounding.
    pub fn max_abs_difference(&self, other: &PiecewiseConstantState, a: f64, b: f64, slack: f64) -> f64 {
        if !(b > a) {
            return 0.0;
        }
        let mut cuts = vec![a];
        cuts.extend(self.breakpoints_in(a, b));
        cuts.extend(other.breakpoints_in(a, b));
        cuts.push(b);
        cuts.sort_by(f64::total_cmp);
        cuts.dedup();
        cuts.windows(2)
            .filter(|w| w[1] - w[0] >= slack)
            .map(|w| {
                let m = 0.5 * (w[0] + w[1]);
                (self.sample(m) - other.sample(m)).abs()
            })
            .fold(0.0, f64::max)
    }

    /// `∫|self − g|` over `[a, b]`, splitting at the state's breakpoints and
    /// integrating `g` with the supplied rule on each piece.
    pub fn l1_distance<G>(&self, a: f64, b: f64, mut piece_integral: G) -> Result<f64>
    where
        G: FnMut(f64, f64, f64) -> Result<f64>,
    {
        let mut cuts = vec![a];
        cuts.extend(self.breakpoints_in(a, b));
        cuts.push(b);
        cuts.dedup();
        let mut total = 0.0;
        for w in cuts.windows(2) {
            let v = self.sample(0.5 * (w[0] + w[1]));
            total += piece_integral(w[0], w[1], v)?;
        }
        Ok(total)
    }

    /// Text dump: a header line, then one `x_left value` line per piece.
    pub fn to_snapshot(&self, delta: f64) -> String {
        let mut out = String::new();
        let period = self.period.map_or("none".to_string(), |p| p.to_string());
        let _ = writeln!(out, "# time {} delta {} period {}", self.time, delta, period);
        let _ = writeln!(out, "-inf {}", self.values[0]);
        for (b, v) in self.breakpoints.iter().zip(&self.values[1..]) {
            let _ = writeln!(out, "{b} {v}");
        }
        out
    }

    /// Inverse of [`to_snapshot`](Self::to_snapshot); returns the state and δ.
    pub fn from_snapshot(text: &str) -> Result<(Self, f64)> {
        let bad = |m: &str| Error::Config(format!("snapshot: {m}"));
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header: Vec<&str> = lines.next().ok_or_else(|| bad("empty"))?.split_whitespace().collect();
        if header.len() != 7 || header[0] != "#" || header[1] != "time" || header[3] != "delta" || header[5] != "period" {
            return Err(bad("malformed header"));
        }
        let num = |s: &str| s.parse::<f64>().map_err(|_| bad(&format!("bad number {s:?}")));
        let time = num(header[2])?;
        let delta = num(header[4])?;
        let period = if header[6] == "none" { None } else { Some(num(header[6])?) };
        let mut breakpoints = Vec::new();
        let mut values = Vec::new();
        for (i, line) in lines.enumerate() {
            let mut it = line.split_whitespace();
            let (x, v) = (it.next().ok_or_else(|| bad("short line"))?, it.next().ok_or_else(|| bad("short line"))?);
            if i == 0 {
                if x != "-inf" {
                    return Err(bad("first piece must start at -inf"));
                }
            } else {
                breakpoints.push(num(x)?);
            }
            values.push(num(v)?);
        }
        let state = PiecewiseConstantState::new(time, breakpoints, values, period)?;
        Ok((state, delta))
    }
}
