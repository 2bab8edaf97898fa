use super::{bv_integral, check_exponent, sup_product, v_power_integral, ConstantReport, Primitives, Regime};
use crate::domain::{prefix_sup, suffix_sup, WeightSpec};
use crate::error::Result;
use crate::ext::{mul, pow};
use crate::hardy::SupOpSpec;

/// Constants characterizing `‖T_{u,b} f‖_{∞,w} ≤ c ‖f‖_{p,v}`: `G1, G2` for
/// `p > 1` and `H1, H2` for `p ≤ 1`.
pub fn constants_t_weak(spec: &SupOpSpec, v: &WeightSpec, w: &WeightSpec, p: f64, cap: f64) -> Result<ConstantReport> {
    check_exponent("p", p)?;
    let pr = Primitives::new(spec.b(), v, w)?;
    let (regime, parts) = weak_parts(spec.kernel(), &pr, p);
    Ok(ConstantReport::assemble(regime, parts, pr.provenance(p, f64::INFINITY, None, cap), Vec::new()))
}

pub(super) fn weak_parts(kernel: &[f64], pr: &Primitives, p: f64) -> (Regime, Vec<(&'static str, f64)>) {
    let (b, v) = (&pr.b, &pr.v);
    let (bm, vm) = (b.at_mids(), v.at_mids());
    let w_run = prefix_sup(pr.w.base().values());
    // sup_{x ≤ t} [sup_{τ ≤ t} w(τ)] u(t)/B(t)
    let sig: Vec<f64> = w_run.iter().zip(kernel).map(|(&w, &k)| mul(w, k)).collect();
    let sig = suffix_sup(&sig);
    if p > 1.0 {
        let pp = p / (p - 1.0);
        let g1 = sup_product(&sig, 1.0, &bv_integral(b, v, pp), 1.0 / pp);
        let s2: Vec<f64> = (0..kernel.len()).map(|k| mul(mul(w_run[k], kernel[k]), bm[k]) / (vm[k] * vm[k])).collect();
        let g2 = sup_product(&suffix_sup(&s2), 1.0, &v_power_integral(v, pp), 1.0 / pp);
        (Regime::G, vec![("G1", g1), ("G2", g2)])
    } else {
        let bs: Vec<f64> = bm.iter().zip(&sig).map(|(&b, &s)| mul(b, s)).collect();
        let h1 = sup_product(&prefix_sup(&bs), 1.0, v.prefix(), -1.0 / p);
        let h2 = (0..sig.len())
            .map(|k| mul(sig[k], b.prefix()[k] / pow(v.prefix()[k], 1.0 / p)))
            .fold(0.0, f64::max);
        (Regime::H, vec![("H1", h1), ("H2", h2)])
    }
}

/// Constant characterizing `‖T_{u,b} f‖_{∞,w} ≤ c ‖f‖_{∞,v}`:
/// `sup_x (∫_0^x b / ess sup_{(0,y)} v) [sup_{τ ≤ x} w] u(x)/B(x)`.
pub fn constant_i(spec: &SupOpSpec, v: &WeightSpec, w: &WeightSpec, cap: f64) -> Result<ConstantReport> {
    let pr = Primitives::new(spec.b(), v, w)?;
    let value = i_value(spec.kernel(), &pr);
    Ok(ConstantReport::assemble(
        Regime::WeakWeak,
        vec![("I", value)],
        pr.provenance(f64::INFINITY, f64::INFINITY, None, cap),
        Vec::new(),
    ))
}

pub(super) fn i_value(kernel: &[f64], pr: &Primitives) -> f64 {
    let v_run = prefix_sup(pr.v.base().values());
    let w_run = prefix_sup(pr.w.base().values());
    let bmass = pr.b.base().masses();
    let mut acc = pr.b.head() / v_run[0];
    (0..kernel.len())
        .map(|k| {
            acc += bmass[k] / v_run[k];
            mul(mul(acc, w_run[k]), kernel[k])
        })
        .fold(0.0, f64::max)
}
