use super::{bracket, bv_integral, outer, regime_select, sup_product, tail, v_power_integral, ConstantReport, Primitives, Regime};
use crate::domain::{prefix_sup, suffix_sup, WeightSpec};
use crate::error::Result;
use crate::ext::{self, mul, pow};
use crate::hardy::SupOpSpec;

/// Constants characterizing `‖T_{u,b} f‖_{q,w} ≤ c ‖f‖_{p,v}` on the monotone cone.
///
/// Inside `sup_{x ≤ τ} [ … ] (∫_0^τ …)` the integral is taken up to `τ`, so the
/// double suprema in `C2, C4, D2, D4` are genuine (the `x`-reading would make the
/// outer supremum redundant).
pub fn constants_t(spec: &SupOpSpec, v: &WeightSpec, w: &WeightSpec, p: f64, q: f64, cap: f64) -> Result<ConstantReport> {
    let regime = regime_select(p, q)?;
    let pr = Primitives::new(spec.b(), v, w)?;
    let parts = strong_parts(spec.kernel(), &pr, p, q, regime);
    Ok(ConstantReport::assemble(regime, parts, pr.provenance(p, q, None, cap), Vec::new()))
}

pub(super) fn strong_parts(kernel: &[f64], pr: &Primitives, p: f64, q: f64, regime: Regime) -> Vec<(&'static str, f64)> {
    let (b, v, w) = (&pr.b, &pr.v, &pr.w);
    let (bm, vm) = (b.at_mids(), v.at_mids());
    let ve = v.prefix();
    let we = w.prefix();

    // sup_{x ≤ τ} u/B and sup_{x ≤ τ} u/V²
    let s = suffix_sup(kernel);
    let z = || {
        let uv2: Vec<f64> = kernel.iter().zip(bm).zip(vm).map(|((&k, &b), &v)| mul(k, b) / (v * v)).collect();
        suffix_sup(&uv2)
    };
    let powv = |x: &[f64], e: f64| -> Vec<f64> { x.iter().map(|&a| pow(a, e)).collect() };
    let bv_ratio_sup = || {
        let r: Vec<f64> = bm.iter().zip(vm).map(|(&b, &v)| b / v).collect();
        prefix_sup(&r)
    };

    match regime {
        Regime::I => {
            let pp = p / (p - 1.0);
            let a1 = sup_product(&bracket(&powv(&s, q), w), 1.0 / q, &bv_integral(b, v, pp), 1.0 / pp);
            let a2 = sup_product(&bracket(&powv(&z(), q), w), 1.0 / q, &v_power_integral(v, pp), 1.0 / pp);
            vec![("A1", a1), ("A2", a2)]
        }
        Regime::II => {
            let b1 = sup_product(&bracket(&powv(&s, q), w), 1.0 / q, &bv_ratio_sup(), 1.0);
            let b2 = sup_product(&bracket(&powv(&z(), q), w), 1.0 / q, ve, 1.0);
            vec![("B1", b1), ("B2", b2)]
        }
        Regime::III => {
            let pp = p / (p - 1.0);
            let r = 1.0 / (1.0 / q - 1.0 / p);
            let iv = bv_integral(b, v, pp);
            let jv = v_power_integral(v, pp);
            let c1 = tail_form(&s, q, &iv, r / pp, r, p, w);
            let c2 = double_sup_form(&s, &iv, 1.0 / pp, r, p, w);
            let z = z();
            let c3 = tail_form(&z, q, &jv, r / pp, r, p, w);
            let c4 = double_sup_form(&z, &jv, 1.0 / pp, r, p, w);
            vec![("C1", c1), ("C2", c2), ("C3", c3), ("C4", c4)]
        }
        Regime::IV => {
            let r = 1.0 / (1.0 / q - 1.0);
            let bv = bv_ratio_sup();
            let d1 = tail_form(&s, q, &bv, r, r, p, w);
            let d2 = double_sup_form(&s, &bv, 1.0, r, p, w);
            let z = z();
            let d3 = tail_form(&z, q, ve, r, r, p, w);
            let d4 = double_sup_form(&z, ve, 1.0, r, p, w);
            vec![("D1", d1), ("D2", d2), ("D3", d3), ("D4", d4)]
        }
        Regime::V => {
            let bvp: Vec<f64> = bm.iter().zip(vm).map(|(&b, &v)| b / v.powf(1.0 / p)).collect();
            let e1 = sup_product(&bracket(&powv(&s, q), w), 1.0 / q, &prefix_sup(&bvp), 1.0);
            let y = y_sup(kernel, bm, vm, p);
            let e2 = sup_product(&bracket(&powv(&y, q / p), w), 1.0 / q, ve, 1.0 / p);
            vec![("E1", e1), ("E2", e2)]
        }
        Regime::VI => {
            let r = 1.0 / (1.0 / q - 1.0 / p);
            let bpv: Vec<f64> = bm.iter().zip(vm).map(|(&b, &v)| b.powf(p) / v).collect();
            let bpv = prefix_sup(&bpv);
            // F1: W^{r/p}(x) [sup_{x≤τ} S(τ)^p sup_{y≤τ} B^p/V]^{r/p}
            let inner: Vec<f64> = s.iter().zip(&bpv).map(|(&s, &m)| mul(pow(s, p), m)).collect();
            let inner = suffix_sup(&inner);
            let h1: Vec<f64> = we.iter().zip(&inner).map(|(&w, &i)| mul(pow(w, r / p), pow(i, r / p))).collect();
            let f1 = pow(outer(&h1, w), 1.0 / r);
            // F2: (∫_x^∞ S^q w)^{r/p} [sup_{τ≤x} B^p/V]^{r/p} S^q(x)
            let sq = powv(&s, q);
            let t = tail(&sq, w);
            let h2: Vec<f64> = (0..s.len()).map(|k| mul(mul(pow(t[k], r / p), pow(bpv[k], r / p)), sq[k])).collect();
            let f2 = pow(outer(&h2, w), 1.0 / r);
            let y = y_sup(kernel, bm, vm, p);
            // F3: W^{r/p}(x) (sup_{x≤τ} Y(τ) V(τ))^{r/p}
            let yv: Vec<f64> = y.iter().zip(ve).map(|(&y, &v)| mul(y, v)).collect();
            let yv = suffix_sup(&yv);
            let h3: Vec<f64> = we.iter().zip(&yv).map(|(&w, &m)| mul(pow(w, r / p), pow(m, r / p))).collect();
            let f3 = pow(outer(&h3, w), 1.0 / r);
            // F4: (∫_x^∞ Y^{q/p} w)^{r/p} Y^{q/p}(x) V^{r/p}(x)
            let yq = powv(&y, q / p);
            let t = tail(&yq, w);
            let h4: Vec<f64> = (0..y.len()).map(|k| mul(mul(pow(t[k], r / p), yq[k]), pow(ve[k], r / p))).collect();
            let f4 = pow(outer(&h4, w), 1.0 / r);
            vec![("F1", f1), ("F2", f2), ("F3", f3), ("F4", f4)]
        }
        _ => unreachable!("strong regimes only"),
    }
}

/// `sup_{x ≤ y} u^p/V²`.
fn y_sup(kernel: &[f64], bm: &[f64], vm: &[f64], p: f64) -> Vec<f64> {
    let y: Vec<f64> = kernel.iter().zip(bm).zip(vm).map(|((&k, &b), &v)| pow(mul(k, b), p) / (v * v)).collect();
    suffix_sup(&y)
}

/// `(∫_0^∞ (∫_x^∞ G^q w)^{r/p} G(x)^q F(x)^{ef} w(x) dx)^{1/r}`.
fn tail_form(g: &[f64], q: f64, f: &[f64], ef: f64, r: f64, p: f64, w: &crate::domain::CumulativeWeight) -> f64 {
    let gq: Vec<f64> = g.iter().map(|&x| pow(x, q)).collect();
    let t = tail(&gq, w);
    let h: Vec<f64> = (0..g.len()).map(|k| mul(mul(pow(t[k], r / p), gq[k]), pow(f[k], ef))).collect();
    pow(outer(&h, w), 1.0 / r)
}

/// `(∫_0^∞ W^{r/p}(x) [sup_{x ≤ τ} G(τ) F(τ)^{ef}]^r w(x) dx)^{1/r}`.
fn double_sup_form(g: &[f64], f: &[f64], ef: f64, r: f64, p: f64, w: &crate::domain::CumulativeWeight) -> f64 {
    let inner: Vec<f64> = g.iter().zip(f).map(|(&g, &f)| mul(g, pow(f, ef))).collect();
    let inner = suffix_sup(&inner);
    let h: Vec<f64> = w.prefix().iter().zip(&inner).map(|(&we, &i)| mul(pow(we, r / p), pow(i, r))).collect();
    ext::pow(outer(&h, w), 1.0 / r)
}
