use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::function::integrate_steps;
use super::{Grid, GridFunction};
use crate::error::{param, LabError, Result};

/// Widest `ln t` panel handled by one Gauss–Legendre rule.
const LOG_PANEL: f64 = 0.25;
/// Positive nodes and weights of the 16-point Gauss–Legendre rule on `[-1, 1]`.
const GAUSS_NODES: [f64; 8] = [
    0.09501250983763745,
    0.2816035507792589,
    0.45801677765722737,
    0.6178762444026438,
    0.755404408355003,
    0.8656312023878318,
    0.9445750230732326,
    0.9894009349916499,
];
const GAUSS_WEIGHTS: [f64; 8] = [
    0.18945061045506859,
    0.1826034150449236,
    0.16915651939500262,
    0.14959598881657676,
    0.12462897125553403,
    0.09515851168249259,
    0.062253523938647706,
    0.027152459411754037,
];

/// `w(t) = scale · t^a · ℓ(t)` with `ℓ(t) = (1 + |ln t|)^{a0}` for `t < 1`
/// and `(1 + |ln t|)^{a_inf}` for `t ≥ 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PowerLog {
    #[serde(default = "unit_scale")]
    pub scale: f64,
    #[serde(default)]
    pub a: f64,
    #[serde(default)]
    pub a0: f64,
    #[serde(default)]
    pub a_inf: f64,
}

fn unit_scale() -> f64 {
    1.0
}

impl PowerLog {
    pub fn power(a: f64) -> Self {
        PowerLog { scale: 1.0, a, a0: 0.0, a_inf: 0.0 }
    }

    pub fn constant(c: f64) -> Self {
        PowerLog { scale: c, a: 0.0, a0: 0.0, a_inf: 0.0 }
    }

    pub fn with_log(self, a0: f64, a_inf: f64) -> Self {
        PowerLog { a0, a_inf, ..self }
    }

    pub fn scaled(self, c: f64) -> Self {
        PowerLog { scale: self.scale * c, ..self }
    }

    pub fn is_pure_power(&self) -> bool {
        self.a0 == 0.0 && self.a_inf == 0.0
    }

    fn log_factor(&self, t: f64) -> f64 {
        let e = if t < 1.0 { self.a0 } else { self.a_inf };
        if e == 0.0 {
            1.0
        } else {
            (1.0 + t.ln().abs()).powf(e)
        }
    }

    pub fn eval(&self, t: f64) -> f64 {
        self.scale * t.powf(self.a) * self.log_factor(t)
    }

    /// `w(t)^r`, evaluated factor by factor so that pure powers with
    /// `a·r = 1` reproduce `t` bit for bit.
    pub fn eval_pow(&self, t: f64, r: f64) -> f64 {
        let s = if self.scale == 1.0 { 1.0 } else { self.scale.powf(r) };
        let l = if self.is_pure_power() { 1.0 } else { self.log_factor(t).powf(r) };
        let mut e = self.a * r;
        if (e - e.round()).abs() <= 4.0 * f64::EPSILON * e.abs().max(1.0) {
            e = e.round();
        }
        s * t.powf(e) * l
    }

    /// `∫_lo^hi w`, analytic for pure powers, Gauss–Legendre in `ln t` otherwise.
    pub fn integral(&self, lo: f64, hi: f64) -> f64 {
        if !(hi > lo) {
            return 0.0;
        }
        if self.is_pure_power() {
            return self.scale * power_integral(self.a, lo, hi);
        }
        if lo < 1.0 && hi > 1.0 {
            return self.integral(lo, 1.0) + self.integral(1.0, hi);
        }
        // the integrand e^{(a+1)u} (1+|u|)^{a0} is smooth on each side of u = 0
        let (ul, uh) = (lo.ln(), hi.ln());
        let panels = ((uh - ul) / LOG_PANEL).ceil().max(1.0) as usize;
        let du = (uh - ul) / panels as f64;
        let mut sum = 0.0;
        for i in 0..panels {
            let mid = ul + (i as f64 + 0.5) * du;
            for (&x, &wt) in GAUSS_NODES.iter().zip(&GAUSS_WEIGHTS) {
                for u in [mid - 0.5 * du * x, mid + 0.5 * du * x] {
                    let t = u.exp();
                    sum += wt * self.eval(t) * t;
                }
            }
        }
        0.5 * du * sum
    }

    /// `∫_0^t w`, or `None` when `w` is not integrable at the origin.
    pub fn integral_from_zero(&self, t: f64) -> Option<f64> {
        let integrable = self.a > -1.0 || (self.a == -1.0 && self.a0 < -1.0);
        if !integrable {
            return None;
        }
        if self.is_pure_power() {
            return Some(self.scale * t.powf(self.a + 1.0) / (self.a + 1.0));
        }
        if t > 1.0 {
            return Some(self.integral_from_zero(1.0)? + self.integral(1.0, t));
        }
        // x = t·e^{-s}: ∫_0^t x^a (1 - ln x)^{a0} dx = t^{a+1} ∫_0^∞ e^{-(a+1)s} (L + s)^{a0} ds
        let l = 1.0 - t.ln();
        if self.a == -1.0 {
            return Some(self.scale * l.powf(self.a0 + 1.0) / (-self.a0 - 1.0));
        }
        let c = self.a + 1.0;
        let (steps, upper) = (8192usize, 60.0);
        let h = upper / steps as f64;
        let f = |sigma: f64| (-sigma).exp() * (l + sigma / c).powf(self.a0);
        // composite Simpson in σ = (a+1)s
        let mut acc = f(0.0) + f(upper);
        for i in 1..steps {
            let w = if i % 2 == 1 { 4.0 } else { 2.0 };
            acc += w * f(i as f64 * h);
        }
        Some(self.scale * t.powf(c) / c * acc * h / 3.0)
    }
}

/// `∫_lo^hi t^s dt` without cancellation for thin cells.
fn power_integral(s: f64, lo: f64, hi: f64) -> f64 {
    let c = s + 1.0;
    let log_ratio = (hi / lo).ln();
    if c == 0.0 {
        log_ratio
    } else {
        lo.powf(c) * (c * log_ratio).exp_m1() / c
    }
}

/// A weight: positive cell samples plus an optional power-log descriptor
/// that makes cell masses and the head `∫_0^{t_min} w` exact.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightSpec {
    samples: GridFunction,
    descriptor: Option<PowerLog>,
    head: Option<f64>,
    mass: Vec<f64>,
    half: Vec<f64>,
}

impl WeightSpec {
    /// Weight given by a descriptor; samples are its midpoint values.
    pub fn from_descriptor(grid: Arc<Grid>, d: PowerLog) -> Result<Self> {
        if !(d.scale > 0.0) || !d.scale.is_finite() {
            return param(format!("descriptor scale must be positive, got {}", d.scale));
        }
        let samples = GridFunction::from_fn(grid, |t| d.eval(t))?;
        Self::build(samples, Some(d), None, true)
    }

    /// Strictly positive cell samples without a descriptor.
    pub fn from_samples(samples: GridFunction) -> Result<Self> {
        Self::build(samples, None, None, true)
    }

    /// Samples checked against a descriptor at relative `1e-12`.
    pub fn with_descriptor(samples: GridFunction, d: PowerLog) -> Result<Self> {
        for (k, (&s, &m)) in samples.values().iter().zip(samples.grid().mids()).enumerate() {
            let e = d.eval(m);
            if (s - e).abs() > 1e-12 * e.abs() {
                return param(format!("sample {k} = {s} disagrees with descriptor value {e}"));
            }
        }
        Self::build(samples, Some(d), None, true)
    }

    /// Nonnegative samples with an explicitly known head mass `∫_0^{t_min} w`.
    ///
    /// Meant for indicator-like weights such as `χ_(0,1)` that vanish on part
    /// of the grid; the head keeps the cumulative strictly positive.
    pub fn from_samples_with_head(samples: GridFunction, head: f64) -> Result<Self> {
        if !(head > 0.0) || !head.is_finite() {
            return param(format!("head mass must be positive and finite, got {head}"));
        }
        Self::build(samples, None, Some(head), false)
    }

    fn build(samples: GridFunction, d: Option<PowerLog>, head: Option<f64>, strict: bool) -> Result<Self> {
        if strict {
            if let Some(k) = samples.values().iter().position(|v| !(*v > 0.0) || !v.is_finite()) {
                return param(format!("weight sample {k} is not strictly positive and finite"));
            }
        }
        let g = samples.grid().clone();
        let (e, m) = (g.edges(), g.mids());
        let (mass, half): (Vec<f64>, Vec<f64>) = (0..g.n())
            .map(|k| match d {
                Some(d) => (d.integral(e[k], e[k + 1]), d.integral(e[k], m[k])),
                None => {
                    let s = samples.values()[k];
                    (s * (e[k + 1] - e[k]), s * (m[k] - e[k]))
                }
            })
            .unzip();
        Ok(WeightSpec { samples, descriptor: d, head, mass, half })
    }

    pub fn grid(&self) -> &Arc<Grid> {
        self.samples.grid()
    }

    pub fn samples(&self) -> &GridFunction {
        &self.samples
    }

    pub fn values(&self) -> &[f64] {
        self.samples.values()
    }

    pub fn descriptor(&self) -> Option<&PowerLog> {
        self.descriptor.as_ref()
    }

    /// `∫` over each cell.
    pub fn masses(&self) -> &[f64] {
        &self.mass
    }

    /// `∫` from each left edge to the cell midpoint.
    pub fn half_masses(&self) -> &[f64] {
        &self.half
    }

    /// Pointwise value: descriptor where available, else the cell sample.
    pub fn value_at(&self, t: f64) -> f64 {
        match &self.descriptor {
            Some(d) => d.eval(t),
            None => self.samples.value_at(t),
        }
    }

    /// `w(t)^r` with bitwise-exact pure-power handling.
    pub fn value_pow(&self, t: f64, r: f64) -> f64 {
        match &self.descriptor {
            Some(d) => d.eval_pow(t, r),
            None => self.samples.value_at(t).powf(r),
        }
    }

    /// `∫_a^b w` over a sub-interval of the grid.
    pub fn integrate(&self, a: f64, b: f64) -> Result<f64> {
        let g = self.grid();
        if a > b {
            return param(format!("integration bounds reversed: {a} > {b}"));
        }
        if a < g.t_min() || b > g.t_max() {
            return param(format!("integration bounds ({a}, {b}] leave the grid"));
        }
        Ok(match &self.descriptor {
            Some(d) => {
                // sum whole cells so that cell-aligned bounds reuse the cell masses
                let e = g.edges();
                let mut sum = 0.0;
                for k in 0..g.n() {
                    let (lo, hi) = (e[k].max(a), e[k + 1].min(b));
                    if hi > lo {
                        sum += if lo == e[k] && hi == e[k + 1] { self.mass[k] } else { d.integral(lo, hi) };
                    }
                }
                sum
            }
            None => integrate_steps(g, self.values(), a, b),
        })
    }

    /// Multiply the weight by `c > 0`.
    pub fn scaled(&self, c: f64) -> Result<Self> {
        if !(c > 0.0) || !c.is_finite() {
            return param(format!("scale factor must be positive, got {c}"));
        }
        let samples = self.samples.scale(c);
        let descriptor = self.descriptor.map(|d| d.scaled(c));
        Ok(WeightSpec {
            samples,
            descriptor,
            head: self.head.map(|h| h * c),
            mass: self.mass.iter().map(|m| m * c).collect(),
            half: self.half.iter().map(|m| m * c).collect(),
        })
    }

    fn head_mass(&self) -> Option<f64> {
        self.head.or_else(|| self.descriptor.and_then(|d| d.integral_from_zero(self.grid().t_min())))
    }
}

/// How to treat a weight whose mass below `t_min` is not available.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HeadPolicy {
    /// Fail unless the head mass is known.
    Exact,
    /// Use head 0 and raise the truncation flag.
    Truncate,
}

/// Primitive `F(t) = ∫_0^t w` on the grid, e.g. `B`, `V`, `W`.
#[derive(Debug, Clone, PartialEq)]
pub struct CumulativeWeight {
    base: WeightSpec,
    head: f64,
    truncated: bool,
    at_edge: Vec<f64>,
    at_mid: Vec<f64>,
}

impl CumulativeWeight {
    pub fn new(w: &WeightSpec, policy: HeadPolicy) -> Result<Self> {
        let (head, truncated) = match w.head_mass() {
            Some(h) => (h, false),
            None if policy == HeadPolicy::Truncate => (0.0, true),
            None => {
                return Err(LabError::Configuration(
                    "head mass below t_min is not integrable or unknown; truncation not acknowledged".into(),
                ))
            }
        };
        let n = w.grid().n();
        let mut at_edge = Vec::with_capacity(n + 1);
        let mut at_mid = Vec::with_capacity(n);
        let mut acc = head;
        at_edge.push(acc);
        for k in 0..n {
            at_mid.push(acc + w.half[k]);
            acc += w.mass[k];
            at_edge.push(acc);
        }
        if at_edge[1..].iter().any(|v| !(*v > 0.0)) {
            return Err(LabError::Configuration("cumulative weight vanishes on part of the grid".into()));
        }
        Ok(CumulativeWeight { base: w.clone(), head, truncated, at_edge, at_mid })
    }

    /// Cumulative with truncation acknowledged.
    pub fn truncating(w: &WeightSpec) -> Self {
        Self::new(w, HeadPolicy::Truncate).expect("positive weights have positive cumulatives")
    }

    pub fn base(&self) -> &WeightSpec {
        &self.base
    }

    pub fn head(&self) -> f64 {
        self.head
    }

    pub fn truncated(&self) -> bool {
        self.truncated
    }

    /// `prefix[k] = F(e_{k+1})`.
    pub fn prefix(&self) -> &[f64] {
        &self.at_edge[1..]
    }

    /// `F(e_k)` for `k = 0..=N`.
    pub fn at_edges(&self) -> &[f64] {
        &self.at_edge
    }

    /// `F(m_k)` at the cell midpoints.
    pub fn at_mids(&self) -> &[f64] {
        &self.at_mid
    }

    /// `F(t)` for any `t > 0`; beyond `t_max` the last cell density is extended.
    pub fn at(&self, t: f64) -> f64 {
        let w = &self.base;
        let g = w.grid();
        let e = g.edges();
        if t <= g.t_min() {
            return match w.descriptor.and_then(|d| d.integral_from_zero(t)) {
                Some(v) if !self.truncated && w.head.is_none() => v,
                _ => self.head * t / g.t_min(),
            };
        }
        if t > g.t_max() {
            let n = g.n();
            let extra = match &w.descriptor {
                Some(d) => d.integral(g.t_max(), t),
                None => w.values()[n - 1] * (t - g.t_max()),
            };
            return self.at_edge[n] + extra;
        }
        let k = g.locate(t).expect("inside grid");
        let part = match &w.descriptor {
            Some(d) => d.integral(e[k], t),
            None => w.values()[k] * (t - e[k]),
        };
        self.at_edge[k] + part
    }

    pub fn scaled(&self, c: f64) -> Result<Self> {
        let base = self.base.scaled(c)?;
        Ok(CumulativeWeight {
            base,
            head: self.head * c,
            truncated: self.truncated,
            at_edge: self.at_edge.iter().map(|v| v * c).collect(),
            at_mid: self.at_mid.iter().map(|v| v * c).collect(),
        })
    }
}
