//! The iterated supremum operator
//! `T_{u,b} g(t) = sup_{τ ≥ t} (u(τ)/B(τ)) ∫_0^τ g b`.

use crate::domain::{prefix_sup, suffix_sup, CumulativeWeight, GridFunction, HeadPolicy, MonotoneFunction, WeightSpec};
use crate::error::{param, LabError, Result};
use crate::ext;

/// Data of `T_{u,b}`: the weight `b`, its primitive `B`, and the kernel
/// `u/B` sampled at the cell midpoints.
#[derive(Debug, Clone)]
pub struct SupOpSpec {
    b: CumulativeWeight,
    kernel: Vec<f64>,
}

impl SupOpSpec {
    /// `T_{u,b}` from the weights `u` and `b`.
    pub fn new(u: &WeightSpec, b: &WeightSpec, policy: HeadPolicy) -> Result<Self> {
        same_grid(u, b)?;
        let bc = CumulativeWeight::new(b, policy)?;
        let kernel = u.values().iter().zip(bc.at_mids()).map(|(&u, &bm)| ext::div(u, bm)).collect();
        Ok(SupOpSpec { b: bc, kernel })
    }

    /// `T_{u,b}` with the ratio `u/B` given directly as midpoint samples.
    pub fn from_ratio(ratio: &GridFunction, b: &WeightSpec, policy: HeadPolicy) -> Result<Self> {
        if !ratio.grid().same_as(b.grid()) {
            return Err(LabError::Configuration("kernel and b live on different grids".into()));
        }
        if ratio.values().iter().any(|v| !(*v > 0.0) || !v.is_finite()) {
            return param("kernel u/B must be strictly positive and finite");
        }
        let bc = CumulativeWeight::new(b, policy)?;
        Ok(SupOpSpec { b: bc, kernel: ratio.values().to_vec() })
    }

    /// The case `u = B`, i.e. kernel identically 1.
    pub fn u_equals_b(b: &WeightSpec, policy: HeadPolicy) -> Result<Self> {
        let one = GridFunction::constant(b.grid().clone(), 1.0)?;
        Self::from_ratio(&one, b, policy)
    }

    pub fn b(&self) -> &CumulativeWeight {
        &self.b
    }

    pub fn grid(&self) -> &std::sync::Arc<crate::domain::Grid> {
        self.b.base().grid()
    }

    /// `u/B` at the cell midpoints.
    pub fn kernel(&self) -> &[f64] {
        &self.kernel
    }

    /// `u` at the cell midpoints.
    pub fn u_values(&self) -> Vec<f64> {
        self.kernel.iter().zip(self.b.at_mids()).map(|(&k, &bm)| ext::mul(k, bm)).collect()
    }

    /// `∫_0^{m_k} g b` at every midpoint, head read at `g(t_min+)`.
    pub fn prefix_mass_mid(&self, g: &[f64]) -> Vec<f64> {
        let w = self.b.base();
        let (mass, half) = (w.masses(), w.half_masses());
        let mut acc = ext::mul(g[0], self.b.head());
        g.iter()
            .enumerate()
            .map(|(k, &v)| {
                let p = acc + ext::mul(v, half[k]);
                acc += ext::mul(v, mass[k]);
                p
            })
            .collect()
    }

    pub(crate) fn apply_values(&self, g: &[f64]) -> Vec<f64> {
        let p = self.prefix_mass_mid(g);
        let m: Vec<f64> = self.kernel.iter().zip(&p).map(|(&k, &p)| ext::mul(k, p)).collect();
        suffix_sup(&m)
    }
}

fn same_grid(a: &WeightSpec, b: &WeightSpec) -> Result<()> {
    if a.grid().same_as(b.grid()) {
        Ok(())
    } else {
        Err(LabError::Configuration("weights live on different grids".into()))
    }
}

/// `T_{u,b} g` at the cell midpoints; linear time.
pub fn apply_t(spec: &SupOpSpec, g: &GridFunction) -> Result<GridFunction> {
    if !g.grid().same_as(spec.grid()) {
        return Err(LabError::Configuration("function and operator live on different grids".into()));
    }
    GridFunction::new(g.grid().clone(), spec.apply_values(g.values()))
}

/// `‖T_{u,b} f‖_{∞,w}` through the three-scan identity
/// `sup_x (sup_{x ≤ t} [sup_{τ ≤ t} w(τ)] u(t)/B(t)) ∫_0^x f b`.
pub fn weighted_sup_norm_t(spec: &SupOpSpec, f: &MonotoneFunction, w: &WeightSpec) -> Result<f64> {
    if !f.grid().same_as(spec.grid()) || !w.grid().same_as(spec.grid()) {
        return Err(LabError::Configuration("inputs live on different grids".into()));
    }
    Ok(sup_norm_values(spec, f.values(), &prefix_sup(w.values())))
}

/// Same identity with the running maximum of `w` precomputed.
pub(crate) fn sup_norm_values(spec: &SupOpSpec, f: &[f64], w_run: &[f64]) -> f64 {
    let c: Vec<f64> = w_run.iter().zip(&spec.kernel).map(|(&w, &k)| ext::mul(w, k)).collect();
    let s = suffix_sup(&c);
    let p = spec.prefix_mass_mid(f);
    s.iter().zip(&p).map(|(&s, &p)| ext::mul(s, p)).fold(0.0, f64::max)
}

/// `T_{B/φ^α, b}`, the operator that controls `M_{φ,Λ^α(b)}`: kernel `φ^{-α}`.
pub fn reduce_maximal_to_t(phi: &WeightSpec, alpha: f64, b: &WeightSpec, policy: HeadPolicy) -> Result<SupOpSpec> {
    if !(alpha > 0.0) || !alpha.is_finite() {
        return param(format!("alpha must be positive, got {alpha}"));
    }
    same_grid(phi, b)?;
    let ratio = phi.samples().map(|v| v.powf(-alpha))?;
    SupOpSpec::from_ratio(&ratio, b, policy)
}
