//! Lorentz quasi-norms and the weight/parameter condition checkers.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::domain::{prefix_sup, suffix_sup, CumulativeWeight, GridFunction, MonotoneFunction, PowerLog, WeightSpec};
use crate::error::{param, Result};
use crate::ext::{self, below_cap};
use crate::rearrangement::doublestar;

/// Exponent and weight of `Λ^p(w)`, `Γ^p(w)` or `Λ^{p,∞}(w)`.
#[derive(Debug, Clone)]
pub struct LorentzParams {
    p: f64,
    w: CumulativeWeight,
}

impl LorentzParams {
    pub fn new(p: f64, w: &WeightSpec) -> Result<Self> {
        if !(p > 0.0) || !p.is_finite() {
            return param(format!("Lorentz exponent must be positive and finite, got {p}"));
        }
        Ok(LorentzParams { p, w: CumulativeWeight::truncating(w) })
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn cumulative(&self) -> &CumulativeWeight {
        &self.w
    }
}

/// `(∫ f^p w)^{1/p}` of a step function, head cell included.
pub fn weighted_lp(f: &GridFunction, p: f64, w: &CumulativeWeight) -> f64 {
    let masses = w.base().masses();
    let mut s = ext::mul(ext::pow(f.values()[0], p), w.head());
    for (&v, &m) in f.values().iter().zip(masses) {
        s += ext::mul(ext::pow(v, p), m);
    }
    ext::pow(s, 1.0 / p)
}

pub fn lambda_norm(fstar: &MonotoneFunction, prm: &LorentzParams) -> f64 {
    weighted_lp(fstar, prm.p, &prm.w)
}

/// `sup_k f*(m_k) W(e_{k+1})^{1/p}`.
pub fn weak_lambda_norm(fstar: &MonotoneFunction, prm: &LorentzParams) -> f64 {
    fstar
        .values()
        .iter()
        .zip(prm.w.prefix())
        .map(|(&f, &w)| ext::mul(f, w.powf(1.0 / prm.p)))
        .fold(0.0, f64::max)
}

pub fn gamma_norm(fstar: &MonotoneFunction, prm: &LorentzParams) -> f64 {
    weighted_lp(&doublestar(fstar), prm.p, &prm.w)
}

/// A cap-relative constant: `finite` is false when `value` exceeds the cap.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConditionValue {
    pub value: f64,
    pub finite: bool,
    pub cap: f64,
}

impl ConditionValue {
    pub fn new(value: f64, cap: f64) -> Self {
        ConditionValue { value, finite: below_cap(value, cap), cap }
    }
}

/// `sup F(2t)/F(t)` over the edges `t` with `2t ≤ t_max`.
pub fn check_delta2(f: &CumulativeWeight, cap: f64) -> ConditionValue {
    let g = f.base().grid();
    let sup = g
        .edges()
        .iter()
        .zip(f.at_edges())
        .filter(|(&t, &ft)| 2.0 * t <= g.t_max() && ft > 0.0)
        .map(|(&t, &ft)| f.at(2.0 * t) / ft)
        .fold(0.0, f64::max);
    ConditionValue::new(sup, cap)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Increasing,
    Decreasing,
}

/// Smallest grid constant `C` with `φ(t1) ≤ C φ(t2)` for `t1 ≤ t2`
/// (increasing) or `φ(t2) ≤ C φ(t1)` (decreasing).
pub fn quasi_monotone_constant(phi: &[f64], dir: Direction) -> f64 {
    let run = match dir {
        Direction::Increasing => prefix_sup(phi),
        Direction::Decreasing => suffix_sup(phi),
    };
    run.iter().zip(phi).map(|(&m, &v)| ext::div(m, v)).fold(0.0, f64::max)
}

pub fn check_quasi_monotone(phi: &GridFunction, dir: Direction, cap: f64) -> ConditionValue {
    ConditionValue::new(quasi_monotone_constant(phi.values(), dir), cap)
}

/// `φ(Σ t_i) / (Σ φ(t_i)^r)^{1/r}` for one finite set.
pub fn qr_ratio(phi: &WeightSpec, ts: &[f64], r: f64) -> f64 {
    let s: f64 = ts.iter().sum();
    let denom: f64 = ts.iter().map(|&t| phi.value_pow(t, r)).sum::<f64>().powf(1.0 / r);
    ext::div(phi.value_at(s), denom)
}

/// Randomized lower bound for the `Q_r` constant of `φ` over sets of 2 to 8 grid
/// edges whose sum stays inside the grid.
pub fn check_qr(phi: &WeightSpec, r: f64, trials: usize, seed: u64) -> Result<f64> {
    if !(r > 0.0) || !r.is_finite() {
        return param(format!("Q_r exponent must be positive, got {r}"));
    }
    let g = phi.grid();
    let edges = g.edges();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best: f64 = 0.0;
    let mut ts = Vec::with_capacity(8);
    for _ in 0..trials {
        let size = rng.random_range(2..=8usize);
        let limit = edges.partition_point(|&e| e * size as f64 <= g.t_max());
        if limit == 0 {
            continue;
        }
        ts.clear();
        ts.extend((0..size).map(|_| edges[rng.random_range(0..limit)]));
        best = best.max(qr_ratio(phi, &ts, r));
    }
    Ok(best)
}

/// Structural `Q_r` test for `φ = t^{1/r} g`: the quasi-decreasing constant of
/// `g(t) = φ(t)/t^{1/r}` on the grid midpoints bounds the `Q_r` constant.
pub fn qr_structural(phi: &PowerLog, r: f64, grid: &std::sync::Arc<crate::domain::Grid>, cap: f64) -> ConditionValue {
    let g: Vec<f64> = grid.mids().iter().map(|&t| phi.eval(t) / t.powf(1.0 / r)).collect();
    ConditionValue::new(quasi_monotone_constant(&g, Direction::Decreasing), cap)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LowerEstimate {
    pub verdict: bool,
    pub constant: ConditionValue,
}

/// `Λ^p(w)` satisfies a lower `r`-estimate iff `r ≥ p` and `W(t)/t^{p/r}` is
/// quasi-increasing; the constant is measured at the grid edges.
pub fn check_lower_r_estimate(p: f64, w: &WeightSpec, r: f64, cap: f64) -> Result<LowerEstimate> {
    if !(p > 0.0 && r > 0.0) {
        return param(format!("exponents must be positive, got p={p}, r={r}"));
    }
    let cw = CumulativeWeight::truncating(w);
    let e = &w.grid().edges()[1..];
    let h: Vec<f64> = cw.prefix().iter().zip(e).map(|(&wt, &t)| wt / t.powf(p / r)).collect();
    let constant = ConditionValue::new(quasi_monotone_constant(&h, Direction::Increasing), cap);
    Ok(LowerEstimate { verdict: r >= p && constant.finite, constant })
}
