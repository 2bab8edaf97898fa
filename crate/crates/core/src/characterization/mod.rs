//! Closed-form characterization constants with regime dispatch.
//!
//! Discretization rules shared by every family:
//! * the outer variable `x` runs over the right edges `e_{k+1}`;
//! * primitives standing alone (`V(x)`, `W(x)`, `∫_0^x …`) are read at right edges;
//! * pointwise weight expressions (`u/B`, `u/V²`, `B/V`, `φ`) are read at midpoints;
//! * `∫_x^∞ G w` is the strict tail `Σ_{j>k} G_j w_j`;
//! * outer integrals are `Σ_k h_k w_k` plus `h_0` times the head mass of `w`.

mod maximal;
mod regime;
mod strong;
mod weak;

use serde::Serialize;

use crate::domain::{CumulativeWeight, GridInfo, WeightSpec};
use crate::error::{LabError, Result};
use crate::ext::{self, below_cap};

pub use maximal::{constants_maximal, MaximalProblem, Target};
pub use regime::{regime_select, Regime};
pub use strong::constants_t;
pub use weak::{constant_i, constants_t_weak};

/// One named constant.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Part {
    pub name: String,
    pub value: f64,
    pub finite: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Provenance {
    pub grid: GridInfo,
    pub cap: f64,
    pub p: f64,
    pub q: f64,
    pub alpha: Option<f64>,
    /// Names of primitives whose head below `t_min` was dropped.
    pub truncated: Vec<String>,
    /// `B(t_max)`, a proxy for `B(∞) = ∞`.
    pub b_t_max: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConstantReport {
    pub regime: Regime,
    pub parts: Vec<Part>,
    pub total: f64,
    pub finite: bool,
    pub provenance: Provenance,
    pub warnings: Vec<String>,
}

impl ConstantReport {
    pub(crate) fn assemble(regime: Regime, named: Vec<(&str, f64)>, provenance: Provenance, mut warnings: Vec<String>) -> Self {
        let cap = provenance.cap;
        let parts: Vec<Part> = named
            .into_iter()
            .map(|(name, value)| Part { name: name.to_string(), value, finite: below_cap(value, cap) })
            .collect();
        let total = parts.iter().map(|p| p.value).sum();
        let finite = parts.iter().all(|p| p.finite);
        if !provenance.truncated.is_empty() {
            warnings.push(format!("head mass dropped for {}", provenance.truncated.join(", ")));
        }
        if matches!(regime, Regime::V | Regime::VI) {
            warnings.push("regime guarded by p < 1 (inferred to make the cases disjoint)".into());
        }
        ConstantReport { regime, parts, total, finite, provenance, warnings }
    }

    pub fn part(&self, name: &str) -> Option<f64> {
        self.parts.iter().find(|p| p.name == name).map(|p| p.value)
    }
}

/// Primitives `B`, `V`, `W` on a common grid.
pub(crate) struct Primitives {
    pub b: CumulativeWeight,
    pub v: CumulativeWeight,
    pub w: CumulativeWeight,
}

impl Primitives {
    pub fn new(b: &CumulativeWeight, v: &WeightSpec, w: &WeightSpec) -> Result<Self> {
        let g = b.base().grid();
        if !g.same_as(v.grid()) || !g.same_as(w.grid()) {
            return Err(LabError::Configuration("weights live on different grids".into()));
        }
        Ok(Primitives { b: b.clone(), v: CumulativeWeight::truncating(v), w: CumulativeWeight::truncating(w) })
    }

    pub fn provenance(&self, p: f64, q: f64, alpha: Option<f64>, cap: f64) -> Provenance {
        let mut truncated = Vec::new();
        for (name, c) in [("B", &self.b), ("V", &self.v), ("W", &self.w)] {
            if c.truncated() {
                truncated.push(name.to_string());
            }
        }
        Provenance {
            grid: self.b.base().grid().info(),
            cap,
            p,
            q,
            alpha,
            truncated,
            b_t_max: *self.b.prefix().last().expect("nonempty grid"),
        }
    }
}

/// `g_k W(e_{k+1}) + Σ_{j>k} g_j w_j`.
pub(crate) fn bracket(g: &[f64], w: &CumulativeWeight) -> Vec<f64> {
    let tail = tail(g, w);
    g.iter().zip(w.prefix()).zip(&tail).map(|((&g, &we), &t)| ext::mul(g, we) + t).collect()
}

/// `Σ_{j>k} g_j w_j`.
pub(crate) fn tail(g: &[f64], w: &CumulativeWeight) -> Vec<f64> {
    let gw: Vec<f64> = g.iter().zip(w.base().masses()).map(|(&g, &m)| ext::mul(g, m)).collect();
    crate::domain::scan::strict_suffix_sum(&gw)
}

/// `∫_0^∞ h w` with the head read at `h_0`.
pub(crate) fn outer(h: &[f64], w: &CumulativeWeight) -> f64 {
    let body: f64 = h.iter().zip(w.base().masses()).map(|(&h, &m)| ext::mul(h, m)).sum();
    body + ext::mul(h[0], w.head())
}

/// `∫_0^{e_{k+1}} (B/V)^e v`, with the head read at `B/V` at `t_min`.
pub(crate) fn bv_integral(b: &CumulativeWeight, v: &CumulativeWeight, e: f64) -> Vec<f64> {
    let head = ext::mul(ext::pow(ext::div(b.head(), v.head()), e), v.head());
    let mut acc = head;
    b.at_mids()
        .iter()
        .zip(v.at_mids())
        .zip(v.base().masses())
        .map(|((&bm, &vm), &m)| {
            acc += ext::mul(ext::pow(bm / vm, e), m);
            acc
        })
        .collect()
}

/// `∫_0^{e_{k+1}} V^e v = V(e_{k+1})^{e+1}/(e+1)`.
pub(crate) fn v_power_integral(v: &CumulativeWeight, e: f64) -> Vec<f64> {
    v.prefix().iter().map(|&x| x.powf(e + 1.0) / (e + 1.0)).collect()
}

/// `max_k a_k^{ea} b_k^{eb}`.
pub(crate) fn sup_product(a: &[f64], ea: f64, b: &[f64], eb: f64) -> f64 {
    a.iter()
        .zip(b)
        .map(|(&a, &b)| ext::mul(ext::pow(a, ea), ext::pow(b, eb)))
        .fold(0.0, f64::max)
}

pub(crate) fn check_exponent(name: &str, x: f64) -> Result<()> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(LabError::Parameter(format!("{name} must be positive and finite, got {x}")))
    }
}
