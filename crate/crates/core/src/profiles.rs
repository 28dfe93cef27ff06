//! Radial test functions on a uniform log-radius grid.
//!
//! A profile is stored as samples of g(t) = u(e^t) with per-node slopes
//! dg/dt, piecewise cubic Hermite interpolation between breakpoints, an
//! optional list of interior cuts (positions where the function or its
//! derivative is allowed to break, e.g. sharp truncations), and power-law
//! tails c e^{gamma t} outside the grid window. Every analytic family
//! supplies exact slopes; profiles built from bare samples fall back to
//! monotone-limited (Fritsch-Carlson) slope fitting.

use crate::error::{domain, Error, Result};
use crate::params::Params;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub t_min: f64,
    pub t_max: f64,
    pub n: usize,
}

impl GridSpec {
    pub fn new(t_min: f64, t_max: f64, n: usize) -> Result<Self> {
        if !(t_min < t_max) {
            return Err(domain("grid needs t_min < t_max"));
        }
        if n < 16 {
            return Err(domain("grid needs n >= 16"));
        }
        Ok(Self { t_min, t_max, n })
    }

    pub fn dt(&self) -> f64 {
        (self.t_max - self.t_min) / (self.n - 1) as f64
    }

    pub fn node(&self, j: usize) -> f64 {
        self.t_min + j as f64 * self.dt()
    }
}

impl Default for GridSpec {
    /// Ten decades of radius around r = 1 at spectral resolution
    /// dxi ~ 0.26 with Nyquist ~ 268.
    fn default() -> Self {
        GridSpec {
            t_min: -12.0,
            t_max: 12.0,
            n: 2048,
        }
    }
}

/// One power-law tail term c e^{gamma t} (i.e. c r^gamma).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailTerm {
    pub coef: f64,
    pub gamma: f64,
}

/// Sum of power-law terms; empty means identically zero beyond the grid.
/// Single-term tails cover every analytic family; two terms appear in
/// differences u - a omega formed by the distance functionals.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Tail {
    pub terms: Vec<TailTerm>,
}

impl Tail {
    pub fn zero() -> Self {
        Tail { terms: vec![] }
    }

    pub fn power(coef: f64, gamma: f64) -> Self {
        if coef == 0.0 {
            Tail::zero()
        } else {
            Tail {
                terms: vec![TailTerm { coef, gamma }],
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn eval(&self, t: f64) -> f64 {
        self.terms
            .iter()
            .map(|tt| tt.coef * (tt.gamma * t).exp())
            .sum()
    }

    pub fn deriv(&self, t: f64) -> f64 {
        self.terms
            .iter()
            .map(|tt| tt.coef * tt.gamma * (tt.gamma * t).exp())
            .sum()
    }

    /// Dominant term as t -> -inf (smallest gamma).
    pub fn dominant_inner(&self) -> Option<TailTerm> {
        self.terms
            .iter()
            .copied()
            .min_by(|a, b| a.gamma.total_cmp(&b.gamma))
    }

    /// Dominant term as t -> +inf (largest gamma).
    pub fn dominant_outer(&self) -> Option<TailTerm> {
        self.terms
            .iter()
            .copied()
            .max_by(|a, b| a.gamma.total_cmp(&b.gamma))
    }

    fn scaled(&self, c: f64) -> Tail {
        Tail {
            terms: self
                .terms
                .iter()
                .map(|tt| TailTerm {
                    coef: c * tt.coef,
                    gamma: tt.gamma,
                })
                .collect(),
        }
    }

    fn merged(tails: &[Tail]) -> Tail {
        let mut terms: Vec<TailTerm> = vec![];
        for tail in tails {
            for tt in &tail.terms {
                if let Some(existing) = terms.iter_mut().find(|e| e.gamma == tt.gamma) {
                    existing.coef += tt.coef;
                } else {
                    terms.push(*tt);
                }
            }
        }
        terms.retain(|tt| tt.coef != 0.0);
        terms.sort_by(|a, b| a.gamma.total_cmp(&b.gamma));
        Tail { terms }
    }
}

/// Interior breakpoint carrying one-sided values and slopes. Jump cuts
/// (left_value != right_value) represent sharp truncations; continuous
/// cuts pin down curvature breaks such as ramp joints so that piecewise
/// integration segments align with them.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Cut {
    pub t: f64,
    pub left_value: f64,
    pub left_slope: f64,
    pub right_value: f64,
    pub right_slope: f64,
}

impl Cut {
    pub fn jump(&self) -> f64 {
        self.right_value - self.left_value
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialProfile {
    pub grid: GridSpec,
    pub values: Vec<f64>,
    pub slopes: Vec<f64>,
    pub cuts: Vec<Cut>,
    pub inner_tail: Tail,
    pub outer_tail: Tail,
    pub label: String,
}

fn hermite(x0: f64, y0: f64, m0: f64, x1: f64, y1: f64, m1: f64, t: f64) -> f64 {
    let h = x1 - x0;
    if h <= 0.0 {
        return y1;
    }
    let f = (t - x0) / h;
    let f2 = f * f;
    let f3 = f2 * f;
    (2.0 * f3 - 3.0 * f2 + 1.0) * y0
        + (f3 - 2.0 * f2 + f) * h * m0
        + (-2.0 * f3 + 3.0 * f2) * y1
        + (f3 - f2) * h * m1
}

fn hermite_deriv(x0: f64, y0: f64, m0: f64, x1: f64, y1: f64, m1: f64, t: f64) -> f64 {
    let h = x1 - x0;
    if h <= 0.0 {
        return m1;
    }
    let f = (t - x0) / h;
    let f2 = f * f;
    (6.0 * f2 - 6.0 * f) * (y0 - y1) / h
        + (3.0 * f2 - 4.0 * f + 1.0) * m0
        + (3.0 * f2 - 2.0 * f) * m1
}

impl RadialProfile {
    /// Sample an analytic (value, slope) pair on the grid.
    pub fn from_fn(
        grid: GridSpec,
        f: impl Fn(f64) -> (f64, f64),
        inner_tail: Tail,
        outer_tail: Tail,
        label: impl Into<String>,
    ) -> Self {
        let mut values = Vec::with_capacity(grid.n);
        let mut slopes = Vec::with_capacity(grid.n);
        for j in 0..grid.n {
            let (v, s) = f(grid.node(j));
            values.push(v);
            slopes.push(s);
        }
        RadialProfile {
            grid,
            values,
            slopes,
            cuts: vec![],
            inner_tail,
            outer_tail,
            label: label.into(),
        }
    }

    /// Build from bare samples with monotone-limited slope fitting.
    pub fn from_samples(
        grid: GridSpec,
        values: Vec<f64>,
        inner_tail: Tail,
        outer_tail: Tail,
        label: impl Into<String>,
    ) -> Result<Self> {
        if values.len() != grid.n {
            return Err(Error::Input(format!(
                "expected {} samples, got {}",
                grid.n,
                values.len()
            )));
        }
        let slopes = fit_slopes_monotone(&values, grid.dt());
        Ok(RadialProfile {
            grid,
            values,
            slopes,
            cuts: vec![],
            inner_tail,
            outer_tail,
            label: label.into(),
        })
    }

    /// Segment endpoints (t, value, slope) bracketing `t`, cut-aware.
    pub(crate) fn piece_at(&self, t: f64) -> (f64, f64, f64, f64, f64, f64) {
        let dt = self.grid.dt();
        let j = (((t - self.grid.t_min) / dt) as usize).min(self.grid.n - 2);
        let mut x0 = self.grid.node(j);
        let mut y0 = self.values[j];
        let mut m0 = self.slopes[j];
        let mut x1 = self.grid.node(j + 1);
        let mut y1 = self.values[j + 1];
        let mut m1 = self.slopes[j + 1];
        // narrow by cuts: right-continuous at a cut position
        for c in &self.cuts {
            if c.t <= t && c.t > x0 {
                x0 = c.t;
                y0 = c.right_value;
                m0 = c.right_slope;
            }
            if c.t > t && c.t < x1 {
                x1 = c.t;
                y1 = c.left_value;
                m1 = c.left_slope;
            }
        }
        (x0, y0, m0, x1, y1, m1)
    }

    /// g(t) = u(e^t) everywhere, tails included.
    pub fn eval_t(&self, t: f64) -> f64 {
        if t < self.grid.t_min {
            return self.inner_tail.eval(t);
        }
        if t > self.grid.t_max {
            return self.outer_tail.eval(t);
        }
        let (x0, y0, m0, x1, y1, m1) = self.piece_at(t);
        hermite(x0, y0, m0, x1, y1, m1, t)
    }

    /// dg/dt everywhere.
    pub fn deriv_t(&self, t: f64) -> f64 {
        if t < self.grid.t_min {
            return self.inner_tail.deriv(t);
        }
        if t > self.grid.t_max {
            return self.outer_tail.deriv(t);
        }
        let (x0, y0, m0, x1, y1, m1) = self.piece_at(t);
        hermite_deriv(x0, y0, m0, x1, y1, m1, t)
    }

    /// u(r) for r > 0.
    pub fn evaluate(&self, r: f64) -> f64 {
        self.eval_t(r.ln())
    }

    /// du/dr = (dg/dt)/r.
    pub fn derivative(&self, r: f64) -> f64 {
        self.deriv_t(r.ln()) / r
    }

    /// Sorted breakpoints: grid endpoints, nodes and cuts.
    pub fn segment_points(&self) -> Vec<f64> {
        let mut pts = Vec::with_capacity(self.grid.n + self.cuts.len());
        let mut cut_iter = self.cuts.iter().peekable();
        for j in 0..self.grid.n {
            let x = self.grid.node(j);
            while let Some(c) = cut_iter.peek() {
                if c.t < x {
                    pts.push(c.t);
                    cut_iter.next();
                } else {
                    break;
                }
            }
            if pts.last() != Some(&x) {
                pts.push(x);
            }
        }
        for c in cut_iter {
            pts.push(c.t);
        }
        pts
    }

    /// Jump discontinuities as (t, |jump|).
    pub fn jumps(&self) -> Vec<(f64, f64)> {
        self.cuts
            .iter()
            .filter(|c| c.jump() != 0.0)
            .map(|c| (c.t, c.jump().abs()))
            .collect()
    }

    pub fn has_jumps(&self) -> bool {
        self.cuts.iter().any(|c| c.jump() != 0.0)
    }

    /// Hardy integrability of int |u|^p |x|^{-sp} dx from the tail data.
    pub fn hardy_finite(&self, params: &Params) -> bool {
        let (n, s, p) = (params.n as f64, params.s, params.p);
        let inner_ok = match self.inner_tail.dominant_inner() {
            None => true,
            Some(tt) => tt.gamma * p - s * p + n > 0.0,
        };
        let outer_ok = match self.outer_tail.dominant_outer() {
            None => true,
            Some(tt) => tt.gamma * p - s * p + n < 0.0,
        };
        inner_ok && outer_ok
    }

    /// Amplitude scaling and profile sums over a shared grid.
    pub fn linear_combination(parts: &[(f64, &RadialProfile)]) -> Result<RadialProfile> {
        let first = parts
            .first()
            .ok_or_else(|| domain("empty linear combination"))?
            .1;
        let grid = first.grid;
        for (_, p) in parts {
            if p.grid != grid {
                return Err(domain("linear combination requires a shared grid"));
            }
        }
        let mut values = vec![0.0; grid.n];
        let mut slopes = vec![0.0; grid.n];
        for (c, p) in parts {
            for j in 0..grid.n {
                values[j] += c * p.values[j];
                slopes[j] += c * p.slopes[j];
            }
        }
        // merge cut positions; each profile contributes its one-sided data
        let mut cut_ts: Vec<f64> = parts
            .iter()
            .flat_map(|(_, p)| p.cuts.iter().map(|c| c.t))
            .collect();
        cut_ts.sort_by(f64::total_cmp);
        cut_ts.dedup();
        let cuts = cut_ts
            .into_iter()
            .map(|t| {
                let mut cut = Cut {
                    t,
                    left_value: 0.0,
                    left_slope: 0.0,
                    right_value: 0.0,
                    right_slope: 0.0,
                };
                for (c, p) in parts {
                    if let Some(existing) = p.cuts.iter().find(|pc| pc.t == t) {
                        cut.left_value += c * existing.left_value;
                        cut.left_slope += c * existing.left_slope;
                        cut.right_value += c * existing.right_value;
                        cut.right_slope += c * existing.right_slope;
                    } else {
                        let v = p.eval_t(t);
                        let s = p.deriv_t(t);
                        cut.left_value += c * v;
                        cut.left_slope += c * s;
                        cut.right_value += c * v;
                        cut.right_slope += c * s;
                    }
                }
                cut
            })
            .collect();
        let inner =
            Tail::merged(&parts.iter().map(|(c, p)| p.inner_tail.scaled(*c)).collect::<Vec<_>>());
        let outer =
            Tail::merged(&parts.iter().map(|(c, p)| p.outer_tail.scaled(*c)).collect::<Vec<_>>());
        Ok(RadialProfile {
            grid,
            values,
            slopes,
            cuts,
            inner_tail: inner,
            outer_tail: outer,
            label: "combination".into(),
        })
    }

    pub fn scaled(&self, c: f64) -> RadialProfile {
        let mut out = RadialProfile::linear_combination(&[(c, self)]).expect("single part");
        out.label = format!("{} * {}", c, self.label);
        out
    }

    /// u(x / lambda): a pure log-shift of the grid.
    pub fn dilate(&self, lambda: f64) -> Result<RadialProfile> {
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(domain("dilation needs lambda > 0"));
        }
        let shift = lambda.ln();
        let grid = GridSpec {
            t_min: self.grid.t_min + shift,
            t_max: self.grid.t_max + shift,
            n: self.grid.n,
        };
        let retail = |tail: &Tail| Tail {
            terms: tail
                .terms
                .iter()
                .map(|tt| TailTerm {
                    coef: tt.coef * (-tt.gamma * shift).exp(),
                    gamma: tt.gamma,
                })
                .collect(),
        };
        Ok(RadialProfile {
            grid,
            values: self.values.clone(),
            slopes: self.slopes.clone(),
            cuts: self
                .cuts
                .iter()
                .map(|c| Cut {
                    t: c.t + shift,
                    ..*c
                })
                .collect(),
            inner_tail: retail(&self.inner_tail),
            outer_tail: retail(&self.outer_tail),
            label: format!("{} dilated by {}", self.label, lambda),
        })
    }

    fn signed_part(&self, positive: bool) -> Result<RadialProfile> {
        let clip = |v: f64| if positive { v.max(0.0) } else { (-v).max(0.0) };
        let sign = if positive { 1.0 } else { -1.0 };
        let keep = |v: f64| (sign * v) > 0.0;
        if self.inner_tail.terms.len() > 1 || self.outer_tail.terms.len() > 1 {
            return Err(domain("signed parts need single-term or zero tails"));
        }
        let clip_tail = |tail: &Tail| match tail.terms.first() {
            Some(tt) if keep(tt.coef) => Tail::power(sign * tt.coef, tt.gamma),
            _ => Tail::zero(),
        };
        let mut out = RadialProfile {
            grid: self.grid,
            values: self.values.iter().map(|&v| clip(v)).collect(),
            slopes: self
                .values
                .iter()
                .zip(&self.slopes)
                .map(|(&v, &s)| if keep(v) { sign * s } else { 0.0 })
                .collect(),
            cuts: self
                .cuts
                .iter()
                .map(|c| Cut {
                    t: c.t,
                    left_value: clip(c.left_value),
                    left_slope: if keep(c.left_value) {
                        sign * c.left_slope
                    } else {
                        0.0
                    },
                    right_value: clip(c.right_value),
                    right_slope: if keep(c.right_value) {
                        sign * c.right_slope
                    } else {
                        0.0
                    },
                })
                .collect(),
            inner_tail: clip_tail(&self.inner_tail),
            outer_tail: clip_tail(&self.outer_tail),
            label: format!(
                "{}{}",
                self.label,
                if positive { " (+part)" } else { " (-part)" }
            ),
        };
        // pin sign crossings with continuous cuts so the clipped
        // interpolant is exactly max(u, 0) piecewise
        let mut crossings = vec![];
        let pts = self.segment_points();
        for w in pts.windows(2) {
            let (a, b) = (w[0], w[1]);
            if b <= a {
                continue;
            }
            for root in cubic_roots_in_segment(self, a, b) {
                let slope = self.deriv_t(root);
                crossings.push(Cut {
                    t: root,
                    left_value: 0.0,
                    left_slope: if keep(slope * (root - a).signum()) { 0.0 } else { 0.0 },
                    right_value: 0.0,
                    right_slope: 0.0,
                });
            }
        }
        for mut c in crossings {
            // on the side where sign*u is positive the slope survives
            let d = sign * self.deriv_t(c.t);
            let before = sign * self.eval_t(c.t - 1e-12);
            if before > 0.0 {
                c.left_slope = d;
                c.right_slope = 0.0;
            } else {
                c.left_slope = 0.0;
                c.right_slope = d;
            }
            if !out.cuts.iter().any(|e| e.t == c.t) {
                out.cuts.push(c);
            }
        }
        out.cuts.sort_by(|a, b| a.t.total_cmp(&b.t));
        Ok(out)
    }

    /// max(u, 0) with sign crossings pinned as continuous cuts.
    pub fn positive_part(&self) -> Result<RadialProfile> {
        self.signed_part(true)
    }

    /// max(-u, 0).
    pub fn negative_part(&self) -> Result<RadialProfile> {
        self.signed_part(false)
    }
}

/// What the reduction engines need from a radial function in log
/// coordinates: pointwise values and slopes, a numeric window, integration
/// breakpoints, tails, and jump positions. Sampled profiles implement it
/// through interpolation; analytic shapes evaluate exactly.
pub trait RadialShape {
    fn eval_t(&self, t: f64) -> f64;
    fn deriv_t(&self, t: f64) -> f64;
    /// Numeric representation window [t_lo, t_hi].
    fn window(&self) -> (f64, f64);
    /// Sorted breakpoints covering the window, endpoints included.
    fn segment_points(&self) -> Vec<f64>;
    fn inner_tail(&self) -> &Tail;
    fn outer_tail(&self) -> &Tail;
    fn jumps(&self) -> Vec<(f64, f64)>;
    /// Sub-window outside which the shape vanishes identically (tails
    /// aside); integrators clip their grids to it.
    fn support_hint(&self) -> (f64, f64) {
        self.window()
    }
}

impl RadialShape for RadialProfile {
    fn eval_t(&self, t: f64) -> f64 {
        RadialProfile::eval_t(self, t)
    }
    fn deriv_t(&self, t: f64) -> f64 {
        RadialProfile::deriv_t(self, t)
    }
    fn window(&self) -> (f64, f64) {
        (self.grid.t_min, self.grid.t_max)
    }
    fn segment_points(&self) -> Vec<f64> {
        RadialProfile::segment_points(self)
    }
    fn inner_tail(&self) -> &Tail {
        &self.inner_tail
    }
    fn outer_tail(&self) -> &Tail {
        &self.outer_tail
    }
    fn jumps(&self) -> Vec<(f64, f64)> {
        RadialProfile::jumps(self)
    }
    fn support_hint(&self) -> (f64, f64) {
        let mut lo_idx = None;
        let mut hi_idx = None;
        for (j, v) in self.values.iter().enumerate() {
            if *v != 0.0 {
                lo_idx.get_or_insert(j);
                hi_idx = Some(j);
            }
        }
        let (Some(mut lo), Some(mut hi)) = (
            lo_idx.map(|j| self.grid.node(j.saturating_sub(1))),
            hi_idx.map(|j| self.grid.node((j + 1).min(self.grid.n - 1))),
        ) else {
            return (self.grid.t_min, self.grid.t_min);
        };
        for c in &self.cuts {
            if c.left_value != 0.0 || c.right_value != 0.0 {
                lo = lo.min(c.t);
                hi = hi.max(c.t);
            }
        }
        if !self.inner_tail.is_zero() {
            lo = self.grid.t_min;
        }
        if !self.outer_tail.is_zero() {
            hi = self.grid.t_max;
        }
        (lo, hi)
    }
}

/// Closure-backed shape for quadrature cross-checks that must not go
/// through the sampled representation.
pub struct AnalyticShape {
    pub eval: Box<dyn Fn(f64) -> f64 + Sync>,
    pub deriv: Box<dyn Fn(f64) -> f64 + Sync>,
    pub t_lo: f64,
    pub t_hi: f64,
    pub panels: usize,
    pub inner: Tail,
    pub outer: Tail,
}

impl RadialShape for AnalyticShape {
    fn eval_t(&self, t: f64) -> f64 {
        (self.eval)(t)
    }
    fn deriv_t(&self, t: f64) -> f64 {
        (self.deriv)(t)
    }
    fn window(&self) -> (f64, f64) {
        (self.t_lo, self.t_hi)
    }
    fn segment_points(&self) -> Vec<f64> {
        let h = (self.t_hi - self.t_lo) / self.panels as f64;
        (0..=self.panels)
            .map(|k| self.t_lo + k as f64 * h)
            .collect()
    }
    fn inner_tail(&self) -> &Tail {
        &self.inner
    }
    fn outer_tail(&self) -> &Tail {
        &self.outer
    }
    fn jumps(&self) -> Vec<(f64, f64)> {
        vec![]
    }
}

/// Solutions of the Hermite cubic through (x0, y0, m0), (x1, y1, m1) at the
/// given level, restricted to the open interval. Splits at the analytic
/// stationary points of the cubic and bisects each monotone piece.
pub(crate) fn hermite_level_crossings(
    x0: f64,
    y0: f64,
    m0: f64,
    x1: f64,
    y1: f64,
    m1: f64,
    level: f64,
) -> Vec<f64> {
    let h = x1 - x0;
    if h <= 0.0 {
        return vec![];
    }
    // cubic in f = (t - x0)/h
    let c3 = 2.0 * (y0 - y1) + h * (m0 + m1);
    let c2 = -3.0 * (y0 - y1) - h * (2.0 * m0 + m1);
    let c1 = h * m0;
    let c0 = y0 - level;
    let value = |f: f64| ((c3 * f + c2) * f + c1) * f + c0;
    // stationary points: 3 c3 f^2 + 2 c2 f + c1 = 0
    let mut knots = vec![0.0f64];
    let (qa, qb, qc) = (3.0 * c3, 2.0 * c2, c1);
    if qa.abs() > 1e-300 {
        let disc = qb * qb - 4.0 * qa * qc;
        if disc >= 0.0 {
            let sq = disc.sqrt();
            for f in [(-qb - sq) / (2.0 * qa), (-qb + sq) / (2.0 * qa)] {
                if f > 0.0 && f < 1.0 {
                    knots.push(f);
                }
            }
        }
    } else if qb.abs() > 1e-300 {
        let f = -qc / qb;
        if f > 0.0 && f < 1.0 {
            knots.push(f);
        }
    }
    knots.push(1.0);
    knots.sort_by(f64::total_cmp);
    let mut roots = vec![];
    for w in knots.windows(2) {
        let (f0v, f1v) = (value(w[0]), value(w[1]));
        if f0v == 0.0 && w[0] > 0.0 {
            roots.push(x0 + w[0] * h);
            continue;
        }
        if f0v * f1v < 0.0 {
            let (mut a, mut b, mut fa) = (w[0], w[1], f0v);
            for _ in 0..60 {
                let m = 0.5 * (a + b);
                let fm = value(m);
                if fm == 0.0 {
                    a = m;
                    b = m;
                    break;
                }
                if fa * fm < 0.0 {
                    b = m;
                } else {
                    a = m;
                    fa = fm;
                }
            }
            let f = 0.5 * (a + b);
            if f > 0.0 && f < 1.0 {
                roots.push(x0 + f * h);
            }
        }
    }
    roots.dedup_by(|a, b| (*a - *b).abs() < 1e-13 * (1.0 + a.abs()));
    roots
}

pub(crate) fn cubic_roots_in_segment(p: &RadialProfile, a: f64, b: f64) -> Vec<f64> {
    level_crossings_in_segment(p, a, b, 0.0)
}

/// Solutions of g(t) = level within one elementary segment (a, b) of the
/// profile (consecutive breakpoints, so a single Hermite piece applies).
pub(crate) fn level_crossings_in_segment(
    p: &RadialProfile,
    a: f64,
    b: f64,
    level: f64,
) -> Vec<f64> {
    if b <= a {
        return vec![];
    }
    let (x0, y0, m0, x1, y1, m1) = p.piece_at(0.5 * (a + b));
    hermite_level_crossings(x0, y0, m0, x1, y1, m1, level)
        .into_iter()
        .filter(|t| *t > a && *t < b)
        .collect()
}

/// Fritsch-Carlson monotone-limited slopes from bare samples.
pub fn fit_slopes_monotone(values: &[f64], dt: f64) -> Vec<f64> {
    let n = values.len();
    let mut d = vec![0.0; n.saturating_sub(1)];
    for j in 0..n - 1 {
        d[j] = (values[j + 1] - values[j]) / dt;
    }
    let mut m = vec![0.0; n];
    m[0] = d[0];
    m[n - 1] = d[n - 2];
    for j in 1..n - 1 {
        m[j] = if d[j - 1] * d[j] > 0.0 {
            0.5 * (d[j - 1] + d[j])
        } else {
            0.0
        };
    }
    for j in 0..n - 1 {
        if d[j] == 0.0 {
            m[j] = 0.0;
            m[j + 1] = 0.0;
        } else {
            let alpha = m[j] / d[j];
            let beta = m[j + 1] / d[j];
            let norm = (alpha * alpha + beta * beta).sqrt();
            if norm > 3.0 {
                let tau = 3.0 / norm;
                m[j] = tau * alpha * d[j];
                m[j + 1] = tau * beta * d[j];
            }
        }
    }
    m
}

/// omega_a(x) = a |x|^{-(N-sp)/p} sampled with exact slopes; flagged
/// non-normalizable through its power tails.
pub fn make_extremizer(params: &Params, a: f64, grid: GridSpec) -> RadialProfile {
    let beta = params.extremizer_exponent();
    let f = move |t: f64| {
        let v = a * (-beta * t).exp();
        (v, -beta * v)
    };
    let mut p = RadialProfile::from_fn(
        grid,
        f,
        Tail::power(a, -beta),
        Tail::power(a, -beta),
        format!("extremizer a={a}"),
    );
    p.label = format!("extremizer a={a}");
    p
}

/// omega_a restricted to [r_in, r_out], joined by C^1 cubic ramps of the
/// given log-width; ramp = 0 is the sharp plateau cutoff.
pub fn make_truncated_extremizer(
    params: &Params,
    a: f64,
    r_in: f64,
    r_out: f64,
    ramp: f64,
    grid: GridSpec,
) -> Result<RadialProfile> {
    if !(r_in > 0.0 && r_out > r_in && ramp >= 0.0) {
        return Err(domain("need 0 < r_in < r_out and ramp >= 0"));
    }
    if r_in * (2.0 * ramp).exp() >= r_out {
        return Err(domain("ramps overlap: need r_in e^{2 ramp} < r_out"));
    }
    let t_in = r_in.ln();
    let t_out = r_out.ln();
    if t_in <= grid.t_min || t_out >= grid.t_max {
        return Err(domain("truncation window must lie inside the grid"));
    }
    let beta = params.extremizer_exponent();
    let omega = |t: f64| a * (-beta * t).exp();
    let omega_d = |t: f64| -beta * omega(t);
    let eval = move |t: f64| -> (f64, f64) {
        if t < t_in || t > t_out {
            (0.0, 0.0)
        } else if ramp > 0.0 && t < t_in + ramp {
            let x1 = t_in + ramp;
            (
                hermite(t_in, 0.0, 0.0, x1, omega(x1), omega_d(x1), t),
                hermite_deriv(t_in, 0.0, 0.0, x1, omega(x1), omega_d(x1), t),
            )
        } else if ramp > 0.0 && t > t_out - ramp {
            let x0 = t_out - ramp;
            (
                hermite(x0, omega(x0), omega_d(x0), t_out, 0.0, 0.0, t),
                hermite_deriv(x0, omega(x0), omega_d(x0), t_out, 0.0, 0.0, t),
            )
        } else {
            (omega(t), omega_d(t))
        }
    };
    let mut p = RadialProfile::from_fn(
        grid,
        eval,
        Tail::zero(),
        Tail::zero(),
        format!("truncated extremizer a={a} window=[{r_in},{r_out}] ramp={ramp}"),
    );
    let mut push_cut = |t: f64, lv: f64, ls: f64, rv: f64, rs: f64| {
        p.cuts.push(Cut {
            t,
            left_value: lv,
            left_slope: ls,
            right_value: rv,
            right_slope: rs,
        });
    };
    if ramp == 0.0 {
        push_cut(t_in, 0.0, 0.0, omega(t_in), omega_d(t_in));
        push_cut(t_out, omega(t_out), omega_d(t_out), 0.0, 0.0);
    } else {
        push_cut(t_in, 0.0, 0.0, 0.0, 0.0);
        let (v, s) = eval(t_in + ramp);
        push_cut(t_in + ramp, v, s, v, s);
        let (v, s) = eval(t_out - ramp);
        push_cut(t_out - ramp, v, s, v, s);
        push_cut(t_out, 0.0, 0.0, 0.0, 0.0);
    }
    p.cuts.sort_by(|x, y| x.t.total_cmp(&y.t));
    Ok(p)
}

/// u(r) = e^{-r^2 / (2 sigma^2)}.
pub fn make_gaussian(sigma: f64, grid: GridSpec) -> Result<RadialProfile> {
    if !(sigma > 0.0) {
        return Err(domain("gaussian needs sigma > 0"));
    }
    let f = move |t: f64| {
        let z = (2.0 * t).exp() / (sigma * sigma);
        let v = (-0.5 * z).exp();
        (v, -z * v)
    };
    Ok(RadialProfile::from_fn(
        grid,
        f,
        Tail::power(1.0, 0.0),
        Tail::zero(),
        format!("gaussian sigma={sigma}"),
    ))
}

/// u(r) = A r^{-(N-2w)/2} e^{-alpha (ln r)^2}; its weight-w lift is exactly
/// the axial Gaussian A e^{-alpha t^2}.
pub fn make_cylinder_gaussian(
    n: u32,
    weight: f64,
    a: f64,
    alpha: f64,
    grid: GridSpec,
) -> Result<RadialProfile> {
    if n < 3 {
        return Err(domain("cylinder gaussian needs N >= 3"));
    }
    if !(weight > 0.0 && weight <= 1.0) {
        return Err(domain("weight must lie in (0, 1]"));
    }
    if !(alpha > 0.0) {
        return Err(domain("alpha must be positive"));
    }
    let half = (n as f64 - 2.0 * weight) / 2.0;
    let f = move |t: f64| {
        let v = a * (-half * t - alpha * t * t).exp();
        (v, v * (-half - 2.0 * alpha * t))
    };
    Ok(RadialProfile::from_fn(
        grid,
        f,
        Tail::zero(),
        Tail::zero(),
        format!("cylinder gaussian A={a} alpha={alpha} weight={weight}"),
    ))
}
