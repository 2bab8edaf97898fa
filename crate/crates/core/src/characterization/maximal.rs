use serde::{Deserialize, Serialize};

use super::{bracket, bv_integral, check_exponent, outer, regime_select, tail, v_power_integral, ConstantReport, Primitives, Regime};
use crate::domain::{prefix_sup, suffix_sup, CumulativeWeight, WeightSpec};
use crate::error::{LabError, Result};
use crate::ext::{mul, pow};
use crate::lorentz::{check_delta2, check_qr, qr_structural, quasi_monotone_constant, ConditionValue, Direction};

/// Target space of the maximal operator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Target {
    /// `Λ^p(v) → Λ^q(w)`
    Strong,
    /// `Λ^p(v) → Λ^{q,∞}(w)`
    Weak,
    /// `Λ^{p,∞}(v) → Λ^{q,∞}(w)`
    WeakWeak,
}

/// Data of `M_{φ,Λ^α(b)}` between Lorentz spaces over `v` and `w`.
#[derive(Debug, Clone, Copy)]
pub struct MaximalProblem<'a> {
    pub phi: &'a WeightSpec,
    pub alpha: f64,
    pub b: &'a WeightSpec,
    pub v: &'a WeightSpec,
    pub w: &'a WeightSpec,
    pub p: f64,
    pub q: f64,
    /// Lower-estimate parameter `r` with `α ≤ r`; enables the `Q_r` and `B(t)/t^{α/r}` checks.
    pub r_est: Option<f64>,
    pub target: Target,
    pub cap: f64,
}

/// Constants characterizing boundedness of `M_{φ,Λ^α(b)}`, read directly off
/// their closed forms. Failed hypotheses are reported as warnings.
///
/// The `(v)`/`(vi)` families apply for `p < α`; `p = α` belongs to `(ii)`/`(iv)`.
/// In the weak-target case `p = α` uses `H1, H2`. `F1` carries `φ^{-α}(τ)`,
/// the exponent that the reduction to `T_{B/φ^α,b}` produces.
pub fn constants_maximal(m: &MaximalProblem) -> Result<ConstantReport> {
    check_exponent("alpha", m.alpha)?;
    check_exponent("p", m.p)?;
    check_exponent("q", m.q)?;
    if !m.phi.grid().same_as(m.b.grid()) {
        return Err(LabError::Configuration("phi and b live on different grids".into()));
    }
    let bc = CumulativeWeight::truncating(m.b);
    let pr = Primitives::new(&bc, m.v, m.w)?;
    let warnings = hypotheses(m, &bc);
    let (p, q, a) = (m.p, m.q, m.alpha);
    let (regime, parts) = match m.target {
        Target::Strong => {
            let regime = regime_select(p / a, q / a)?;
            (regime, strong(m.phi.values(), &pr, p, q, a, regime))
        }
        Target::Weak => weak(m.phi.values(), &pr, p, q, a),
        Target::WeakWeak => (Regime::WeakWeak, vec![("I", weak_weak(m.phi.values(), &pr, p, q, a))]),
    };
    Ok(ConstantReport::assemble(regime, parts, pr.provenance(p, q, Some(a), m.cap), warnings))
}

fn hypotheses(m: &MaximalProblem, b: &CumulativeWeight) -> Vec<String> {
    let mut out = Vec::new();
    fn flag(out: &mut Vec<String>, name: &str, c: ConditionValue) {
        if !c.finite {
            out.push(format!("{name} constant {:.6e} exceeds cap {:.1e}", c.value, c.cap));
        }
    }
    flag(&mut out, "phi quasi-increasing", ConditionValue::new(quasi_monotone_constant(m.phi.values(), Direction::Increasing), m.cap));
    flag(&mut out, "B doubling", check_delta2(b, m.cap));
    if let Some(r) = m.r_est {
        if m.alpha > r {
            out.push(format!("alpha = {} exceeds the lower-estimate parameter r = {r}", m.alpha));
        }
        let e = &m.b.grid().edges()[1..];
        let h: Vec<f64> = b.prefix().iter().zip(e).map(|(&bt, &t)| bt / t.powf(m.alpha / r)).collect();
        flag(&mut out, "B(t)/t^(alpha/r) quasi-increasing", ConditionValue::new(quasi_monotone_constant(&h, Direction::Increasing), m.cap));
        let qr = match m.phi.descriptor() {
            Some(d) => qr_structural(d, r, m.phi.grid(), m.cap),
            None => ConditionValue::new(check_qr(m.phi, r, 256, 0).unwrap_or(f64::INFINITY), m.cap),
        };
        flag(&mut out, "phi Q_r", qr);
    }
    out
}

fn powv(x: &[f64], e: f64) -> Vec<f64> {
    x.iter().map(|&a| pow(a, e)).collect()
}

fn sup2(a: &[f64], ea: f64, b: &[f64], eb: f64) -> f64 {
    super::sup_product(a, ea, b, eb)
}

/// `(∫_0^∞ h w)^{(p-q)/(pq)}`.
fn outer_root(h: &[f64], w: &CumulativeWeight, p: f64, q: f64) -> f64 {
    pow(outer(h, w), (p - q) / (p * q))
}

fn strong(phi: &[f64], pr: &Primitives, p: f64, q: f64, a: f64, regime: Regime) -> Vec<(&'static str, f64)> {
    let (b, v, w) = (&pr.b, &pr.v, &pr.w);
    let (bm, vm, ve, we) = (b.at_mids(), v.at_mids(), v.prefix(), w.prefix());
    let n = phi.len();
    let phi_q = powv(phi, -q);
    let phi_a = powv(phi, -a);
    // sup_{x ≤ τ} B/(φ^α V²)
    let rt = || {
        let r: Vec<f64> = (0..n).map(|k| bm[k] * phi_a[k] / (vm[k] * vm[k])).collect();
        suffix_sup(&r)
    };
    // sup_{x ≤ y} B^{1/α}/(φ V^{2/p})
    let et = || {
        let e: Vec<f64> = (0..n).map(|k| bm[k].powf(1.0 / a) / (phi[k] * vm[k].powf(2.0 / p))).collect();
        suffix_sup(&e)
    };
    let bv_sup = || {
        let r: Vec<f64> = bm.iter().zip(vm).map(|(&b, &v)| b / v).collect();
        prefix_sup(&r)
    };
    let pq_exp = p * q / (a * (p - q));
    let wq = |k: usize| pow(we[k], q / (p - q));

    match regime {
        Regime::I => {
            let pp = p / (p - a);
            let e = (p - a) / (p * a);
            let a1 = sup2(&bracket(&phi_q, w), 1.0 / q, &bv_integral(b, v, pp), e);
            let a2 = sup2(&bracket(&powv(&rt(), q / a), w), 1.0 / q, &v_power_integral(v, pp), e);
            vec![("A1", a1), ("A2", a2)]
        }
        Regime::II => {
            let b1 = sup2(&bracket(&phi_q, w), 1.0 / q, &bv_sup(), 1.0 / a);
            let b2 = sup2(&bracket(&powv(&rt(), q / a), w), 1.0 / q, ve, 1.0 / a);
            vec![("B1", b1), ("B2", b2)]
        }
        Regime::III => {
            let pp = p / (p - a);
            let iv = bv_integral(b, v, pp);
            let jv = v_power_integral(v, pp);
            let ie = q * (p - a) / (a * (p - q));
            let t = tail(&phi_q, w);
            let h1: Vec<f64> = (0..n).map(|k| mul(mul(pow(t[k], q / (p - q)), phi_q[k]), pow(iv[k], ie))).collect();
            let inner: Vec<f64> = (0..n).map(|k| phi_a[k] * pow(iv[k], (p - a) / p)).collect();
            let inner = suffix_sup(&inner);
            let h2: Vec<f64> = (0..n).map(|k| mul(wq(k), pow(inner[k], pq_exp))).collect();
            let r = powv(&rt(), q / a);
            let t = tail(&r, w);
            let h3: Vec<f64> = (0..n).map(|k| mul(mul(pow(t[k], q / (p - q)), r[k]), pow(jv[k], ie))).collect();
            let rr = rt();
            let inner: Vec<f64> = (0..n).map(|k| rr[k] * pow(jv[k], (p - a) / p)).collect();
            let inner = suffix_sup(&inner);
            let h4: Vec<f64> = (0..n).map(|k| mul(wq(k), pow(inner[k], pq_exp))).collect();
            vec![
                ("C1", outer_root(&h1, w, p, q)),
                ("C2", outer_root(&h2, w, p, q)),
                ("C3", outer_root(&h3, w, p, q)),
                ("C4", outer_root(&h4, w, p, q)),
            ]
        }
        Regime::IV => {
            let bv = bv_sup();
            let t = tail(&phi_q, w);
            let h1: Vec<f64> = (0..n).map(|k| mul(mul(pow(t[k], q / (p - q)), phi_q[k]), pow(bv[k], pq_exp))).collect();
            let inner: Vec<f64> = (0..n).map(|k| phi_a[k] * bv[k]).collect();
            let inner = suffix_sup(&inner);
            let h2: Vec<f64> = (0..n).map(|k| mul(wq(k), pow(inner[k], pq_exp))).collect();
            let rr = rt();
            let r = powv(&rr, q / a);
            let t = tail(&r, w);
            let h3: Vec<f64> = (0..n).map(|k| mul(mul(pow(t[k], q / (p - q)), r[k]), pow(ve[k], pq_exp))).collect();
            let inner: Vec<f64> = (0..n).map(|k| rr[k] * ve[k]).collect();
            let inner = suffix_sup(&inner);
            let h4: Vec<f64> = (0..n).map(|k| mul(wq(k), pow(inner[k], pq_exp))).collect();
            vec![
                ("D1", outer_root(&h1, w, p, q)),
                ("D2", outer_root(&h2, w, p, q)),
                ("D3", outer_root(&h3, w, p, q)),
                ("D4", outer_root(&h4, w, p, q)),
            ]
        }
        Regime::V => {
            let bvp: Vec<f64> = (0..n).map(|k| bm[k].powf(1.0 / a) / vm[k].powf(1.0 / p)).collect();
            let e1 = sup2(&bracket(&phi_q, w), 1.0 / q, &prefix_sup(&bvp), 1.0);
            let e2 = sup2(&bracket(&powv(&et(), q), w), 1.0 / q, ve, 1.0 / p);
            vec![("E1", e1), ("E2", e2)]
        }
        Regime::VI => {
            let bva: Vec<f64> = (0..n).map(|k| bm[k] / vm[k].powf(a / p)).collect();
            let bva = prefix_sup(&bva);
            let inner: Vec<f64> = (0..n).map(|k| phi_a[k] * bva[k]).collect();
            let inner = suffix_sup(&inner);
            let h1: Vec<f64> = (0..n).map(|k| mul(wq(k), pow(inner[k], pq_exp))).collect();
            let t = tail(&phi_q, w);
            let h2: Vec<f64> = (0..n).map(|k| mul(mul(pow(t[k], q / (p - q)), pow(bva[k], pq_exp)), phi_q[k])).collect();
            let e = et();
            let inner: Vec<f64> = (0..n).map(|k| e[k] * ve[k].powf(1.0 / p)).collect();
            let inner = suffix_sup(&inner);
            let h3: Vec<f64> = (0..n).map(|k| mul(wq(k), pow(inner[k], p * q / (p - q)))).collect();
            let eq = powv(&e, q);
            let t = tail(&eq, w);
            let h4: Vec<f64> = (0..n).map(|k| mul(mul(pow(t[k], q / (p - q)), eq[k]), pow(ve[k], q / (p - q)))).collect();
            vec![
                ("F1", outer_root(&h1, w, p, q)),
                ("F2", outer_root(&h2, w, p, q)),
                ("F3", outer_root(&h3, w, p, q)),
                ("F4", outer_root(&h4, w, p, q)),
            ]
        }
        _ => unreachable!("strong regimes only"),
    }
}

fn weak(phi: &[f64], pr: &Primitives, p: f64, q: f64, a: f64) -> (Regime, Vec<(&'static str, f64)>) {
    let (b, v, w) = (&pr.b, &pr.v, &pr.w);
    let (bm, vm, wm) = (b.at_mids(), v.at_mids(), w.at_mids());
    let n = phi.len();
    // sup_{x ≤ t} W^{1/q}(t)/φ(t)
    let sig: Vec<f64> = (0..n).map(|k| wm[k].powf(1.0 / q) / phi[k]).collect();
    let sig = suffix_sup(&sig);
    if p > a {
        let pp = p / (p - a);
        let e = (p - a) / (p * a);
        let g1 = sup2(&sig, 1.0, &bv_integral(b, v, pp), e);
        let s2: Vec<f64> = (0..n).map(|k| wm[k].powf(1.0 / q) * bm[k].powf(1.0 / a) / (phi[k] * vm[k].powf(2.0 / a))).collect();
        let g2 = sup2(&suffix_sup(&s2), 1.0, &v_power_integral(v, pp), e);
        (Regime::G, vec![("G1", g1), ("G2", g2)])
    } else {
        let bs: Vec<f64> = (0..n).map(|k| bm[k].powf(1.0 / a) * sig[k]).collect();
        let h1 = sup2(&prefix_sup(&bs), 1.0, v.prefix(), -1.0 / p);
        let h2 = (0..n)
            .map(|k| sig[k] * b.prefix()[k].powf(1.0 / a) / v.prefix()[k].powf(1.0 / p))
            .fold(0.0, f64::max);
        (Regime::H, vec![("H1", h1), ("H2", h2)])
    }
}

fn weak_weak(phi: &[f64], pr: &Primitives, p: f64, q: f64, a: f64) -> f64 {
    let (b, v, w) = (&pr.b, &pr.v, &pr.w);
    let (vm, wm) = (v.at_mids(), w.at_mids());
    let bmass = b.base().masses();
    let mut acc = b.head() / vm[0].powf(a / p);
    (0..phi.len())
        .map(|k| {
            acc += bmass[k] / vm[k].powf(a / p);
            acc.powf(1.0 / a) * wm[k].powf(1.0 / q) / phi[k]
        })
        .fold(0.0, f64::max)
}
