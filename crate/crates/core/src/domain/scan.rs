//! Linear-time running maxima and tail sums.

use super::GridFunction;

/// `out[k] = max_{j ≤ k} g[j]`.
pub fn prefix_sup(g: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(g.len());
    let mut m = f64::NEG_INFINITY;
    for &v in g {
        if v > m {
            m = v;
        }
        out.push(m);
    }
    out
}

/// `out[k] = max_{j ≥ k} g[j]`.
pub fn suffix_sup(g: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; g.len()];
    let mut m = f64::NEG_INFINITY;
    for k in (0..g.len()).rev() {
        if g[k] > m {
            m = g[k];
        }
        out[k] = m;
    }
    out
}

/// `out[k] = Σ_{j > k} g[j]`, accumulated from the right.
pub fn strict_suffix_sum(g: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; g.len()];
    let mut acc = 0.0;
    for k in (0..g.len()).rev() {
        out[k] = acc;
        acc += g[k];
    }
    out
}

pub fn prefix_sup_fn(g: &GridFunction) -> GridFunction {
    GridFunction::from_parts_unchecked(g.grid().clone(), prefix_sup(g.values()))
}

pub fn suffix_sup_fn(g: &GridFunction) -> GridFunction {
    GridFunction::from_parts_unchecked(g.grid().clone(), suffix_sup(g.values()))
}
