//! Direct evaluation of `M_{φ,Λ^α(b)} f(x) = sup_{Q ∋ x} ‖f χ_Q‖_{Λ^α(b)} / φ(|Q|)`
//! on step and radial fields in dimension 1 and 2, and the rearrangement
//! sandwich that reduces it to `T_{B/φ^α, b}`.
//!
//! The supremum runs over a finite cube family, so every value is a lower bound
//! for the true one.

mod geometry;

use std::sync::Arc;

use serde::Serialize;

pub use geometry::{ball_box_measure, disc_rect_area, segment_overlap};

use crate::domain::{CumulativeWeight, Grid, GridFunction, HeadPolicy, MonotoneFunction, PowerLog, WeightSpec};
use crate::error::{param, LabError, Result};
use crate::ext;
use crate::hardy::{apply_t, reduce_maximal_to_t};
use crate::lorentz::{check_delta2, quasi_monotone_constant, Direction};
use crate::par::par_map;
use crate::rearrangement::{Cube, RadialField, Rearrangement, StepField};

/// The data `(φ, α, b)` of `M_{φ,Λ^α(b)}`, with `φ` and `b` given by descriptors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MaximalKernel {
    phi: PowerLog,
    alpha: f64,
    b: PowerLog,
}

impl MaximalKernel {
    pub fn new(phi: PowerLog, alpha: f64, b: PowerLog) -> Result<Self> {
        if !(alpha > 0.0) || !alpha.is_finite() {
            return param(format!("alpha must be positive and finite, got {alpha}"));
        }
        if !(phi.scale > 0.0) || !(b.scale > 0.0) {
            return param("phi and b need positive scale");
        }
        if b.integral_from_zero(1.0).is_none() {
            return param("b must be integrable near 0");
        }
        Ok(MaximalKernel { phi, alpha, b })
    }

    /// The Hardy–Littlewood operator `M`: `φ(t) = t`, `α = 1`, `b ≡ 1`.
    pub fn classical() -> Self {
        MaximalKernel { phi: PowerLog::power(1.0), alpha: 1.0, b: PowerLog::constant(1.0) }
    }

    /// `M_γ`: `φ(t) = t^{1-γ/n}`.
    pub fn fractional(gamma: f64, dim: usize) -> Result<Self> {
        Self::new(PowerLog::power(1.0 - gamma / dim as f64), 1.0, PowerLog::constant(1.0))
    }

    /// `M_{p,q}`: `φ(t) = t^{1/p}`, `α = q`, `b(t) = t^{q/p-1}`.
    pub fn lorentz_pq(p: f64, q: f64) -> Result<Self> {
        Self::new(PowerLog::power(1.0 / p), q, PowerLog::power(q / p - 1.0))
    }

    /// `M_{s,γ,𝔸}`: `φ(t) = t^{1-γ/n} ℓ^{𝔸}(t)`, `α = s`, `b ≡ 1`, with `𝔸 = (a0, a_inf)`.
    pub fn log_fractional(s: f64, gamma: f64, dim: usize, a0: f64, a_inf: f64) -> Result<Self> {
        Self::new(PowerLog::power(1.0 - gamma / dim as f64).with_log(a0, a_inf), s, PowerLog::constant(1.0))
    }

    pub fn phi(&self) -> &PowerLog {
        &self.phi
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn b(&self) -> &PowerLog {
        &self.b
    }

    fn big_b(&self, t: f64) -> f64 {
        self.b.integral_from_zero(t).expect("checked in the constructor")
    }

    /// `‖g‖_{Λ^α(b)}` of the rearrangement with `(value, end)` levels.
    fn lambda_norm(&self, levels: impl Iterator<Item = (f64, f64)>) -> f64 {
        let (mut s, mut prev) = (0.0, 0.0);
        for (v, end) in levels {
            let be = self.big_b(end);
            s += ext::mul(ext::pow(v, self.alpha), be - prev);
            prev = be;
        }
        ext::pow(s, 1.0 / self.alpha)
    }

    /// Failed hypotheses of the reduction, checked on `grid`.
    pub fn hypotheses(&self, grid: &Arc<Grid>, cap: f64) -> Result<Vec<String>> {
        let mut out = Vec::new();
        let phi: Vec<f64> = grid.mids().iter().map(|&t| self.phi.eval(t)).collect();
        let c = quasi_monotone_constant(&phi, Direction::Increasing);
        if !ext::below_cap(c, cap) {
            out.push(format!("phi quasi-increasing constant {c:.6e} exceeds cap"));
        }
        let bw = CumulativeWeight::new(&WeightSpec::from_descriptor(grid.clone(), self.b)?, HeadPolicy::Exact)?;
        let d = check_delta2(&bw, cap);
        if !d.finite {
            out.push(format!("B doubling constant {:.6e} exceeds cap", d.value));
        }
        Ok(out)
    }
}

/// A field on which the maximal operator can be evaluated.
#[derive(Debug, Clone, Copy)]
pub enum Field<'a> {
    Step(&'a StepField),
    Radial(&'a RadialField),
}

impl<'a> From<&'a StepField> for Field<'a> {
    fn from(f: &'a StepField) -> Self {
        Field::Step(f)
    }
}

impl<'a> From<&'a RadialField> for Field<'a> {
    fn from(f: &'a RadialField) -> Self {
        Field::Radial(f)
    }
}

impl Field<'_> {
    pub fn dim(&self) -> usize {
        match self {
            Field::Step(f) => f.dim(),
            Field::Radial(f) => f.dim(),
        }
    }

    pub fn support_radius(&self) -> f64 {
        match self {
            Field::Step(f) => f.support_radius(),
            Field::Radial(f) => f.support_radius(),
        }
    }

    /// Sorted coordinates where the field jumps along `axis`.
    fn lattice(&self, axis: usize) -> Vec<f64> {
        match self {
            Field::Step(f) => f.breakpoints(axis),
            Field::Radial(f) => {
                let mut pts: Vec<f64> = f.radii().iter().flat_map(|&r| [-r, r]).collect();
                pts.push(0.0);
                pts.sort_by(f64::total_cmp);
                pts
            }
        }
    }

    /// `‖f χ_Q‖_{Λ^α(b)}` by exact rearrangement of the restriction.
    fn norm_on(&self, q: &Cube, k: &MaximalKernel) -> f64 {
        match self {
            Field::Step(f) => k.lambda_norm(Rearrangement::from_levels(f.restricted_levels(q)).levels()),
            Field::Radial(f) => {
                // radial order is value order; annulus measures accumulate to |B(0,r_i) ∩ Q|
                let dim = f.dim();
                let mut prev = 0.0f64;
                let levels = f.radii().iter().zip(f.values()).take_while(|(_, &v)| v > 0.0).map(|(&r, &v)| {
                    prev = prev.max(ball_box_measure(dim, r, q));
                    (v, prev)
                });
                k.lambda_norm(levels)
            }
        }
    }

    fn is_zero(&self) -> bool {
        self.support_radius() == 0.0
    }
}

/// Precomputed, point-independent part of the cube family.
struct Family {
    dim: usize,
    lattice: [Vec<f64>; 2],
    sizes: Vec<f64>,
}

impl Family {
    fn new(field: &Field, budget: usize) -> Self {
        let dim = field.dim();
        let s = 2.0 * field.support_radius();
        let (lo, hi) = (s / 64.0, s * 1024.0);
        let sizes = (0..=budget).map(|j| lo * (hi / lo).powf(j as f64 / budget as f64)).collect();
        let lattice = [field.lattice(0), if dim == 2 { field.lattice(1) } else { Vec::new() }];
        Family { dim, lattice, sizes }
    }

    /// Left ends of side-`len` intervals containing `x` along `axis`.
    fn placements(&self, axis: usize, x: f64, len: f64) -> Vec<f64> {
        let mut out = vec![x - len / 2.0, x, x - len, (-len / 2.0).clamp(x - len, x)];
        let lat = &self.lattice[axis];
        let near: &[f64] = if self.dim == 1 {
            lat
        } else {
            let i = lat.partition_point(|&c| c < x);
            &lat[i.saturating_sub(2)..(i + 2).min(lat.len())]
        };
        for &c in near {
            if c <= x && x <= c + len {
                out.push(c);
            }
            if c - len <= x && x <= c {
                out.push(c - len);
            }
        }
        out
    }

    fn best_at(&self, field: &Field, k: &MaximalKernel, x: [f64; 2]) -> f64 {
        let mut best = 0.0f64;
        let mut eval = |q: Cube| {
            let m = q.measure(self.dim);
            best = best.max(ext::div(field.norm_on(&q, k), k.phi.eval(m)));
        };
        if self.dim == 1 {
            // every interval with endpoints in lattice ∪ {x}
            let lat = &self.lattice[0];
            let lefts: Vec<f64> = lat.iter().copied().filter(|&c| c < x[0]).chain([x[0]]).collect();
            let rights: Vec<f64> = lat.iter().copied().filter(|&c| c > x[0]).chain([x[0]]).collect();
            for &a in &lefts {
                for &b in &rights {
                    if b > a {
                        eval(Cube::interval(a, b));
                    }
                }
            }
            for &len in &self.sizes {
                for a in self.placements(0, x[0], len) {
                    eval(Cube::interval(a, a + len));
                }
            }
        } else {
            for &len in &self.sizes {
                let px = self.placements(0, x[0], len);
                let py = self.placements(1, x[1], len);
                for &a in &px {
                    for &b in &py {
                        eval(Cube::rect(a, a + len, b, b + len));
                    }
                }
            }
        }
        best
    }
}

/// `M_{φ,Λ^α(b)} f` at `points`, maximized over the cube family: every interval with
/// endpoints in the jump lattice of `f` plus `x` (dimension 1), and for each of
/// `cube_budget + 1` log-spaced sides the cubes centered at `x`, anchored at `x`,
/// pushed toward the origin, or aligned with nearby lattice coordinates.
pub fn eval_maximal(field: Field, kernel: &MaximalKernel, cube_budget: usize, points: &[[f64; 2]]) -> Result<Vec<f64>> {
    if cube_budget == 0 {
        return param("cube budget must be at least 1");
    }
    if field.is_zero() {
        return Ok(vec![0.0; points.len()]);
    }
    let fam = Family::new(&field, cube_budget);
    Ok(par_map(points.len(), |i| fam.best_at(&field, kernel, points[i])))
}

/// Sampling layout for `(Mf)*`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SampleOptions {
    /// Cells per axis on `[0, R]`.
    pub cells: usize,
    /// Log-spaced cells on `[R, R·tail_factor]`, sampled at their outer end (dimension 1 only).
    pub tail_cells: usize,
    pub tail_factor: f64,
    /// `R` as a multiple of the support radius.
    pub box_factor: f64,
}

impl SampleOptions {
    pub fn for_dim(dim: usize) -> Self {
        if dim == 1 {
            SampleOptions { cells: 400, tail_cells: 256, tail_factor: 1e3, box_factor: 8.0 }
        } else {
            SampleOptions { cells: 40, tail_cells: 0, tail_factor: 1.0, box_factor: 8.0 }
        }
    }
}

/// `(Mf)*` rebuilt from cell samples of `Mf`.
#[derive(Debug, Clone)]
pub struct MaximalSample {
    pub rearrangement: Rearrangement,
    pub box_radius: f64,
    /// Smallest measure carried by one sample.
    pub cell_measure: f64,
    /// Total sampled measure.
    pub sampled_measure: f64,
    /// Whether cells beyond the box were sampled; false means `(Mf)*` lacks the
    /// contribution of `|x| > R`.
    pub tail_included: bool,
}

pub fn maximal_rearrangement(field: Field, kernel: &MaximalKernel, cube_budget: usize, opts: &SampleOptions) -> Result<MaximalSample> {
    if opts.cells == 0 || !(opts.box_factor > 1.0) {
        return param("sampling needs at least one cell and a box factor above 1");
    }
    let dim = field.dim();
    let sr = field.support_radius();
    if sr == 0.0 {
        return Ok(MaximalSample { rearrangement: Rearrangement::from_levels(Vec::new()), box_radius: 0.0, cell_measure: 0.0, sampled_measure: 0.0, tail_included: false });
    }
    let r = opts.box_factor * sr;
    let h = r / opts.cells as f64;
    let symmetric = matches!(field, Field::Radial(_));
    let mut pts: Vec<[f64; 2]> = Vec::new();
    let mut meas: Vec<f64> = Vec::new();
    let centers: Vec<f64> = if symmetric {
        (0..opts.cells).map(|i| (i as f64 + 0.5) * h).collect()
    } else {
        (0..2 * opts.cells).map(|i| -r + (i as f64 + 0.5) * h).collect()
    };
    let mult = if symmetric { 2.0 } else { 1.0 };
    if dim == 1 {
        for &x in &centers {
            pts.push([x, 0.0]);
            meas.push(mult * h);
        }
    } else {
        for (i, &x) in centers.iter().enumerate() {
            for (j, &y) in centers.iter().enumerate() {
                if symmetric {
                    // octant 0 ≤ y ≤ x with its eight images
                    if j > i {
                        continue;
                    }
                    pts.push([x, y]);
                    meas.push(if i == j { 4.0 } else { 8.0 } * h * h);
                } else {
                    pts.push([x, y]);
                    meas.push(h * h);
                }
            }
        }
    }
    let cell_measure = meas.iter().copied().fold(f64::INFINITY, f64::min);
    let tail_included = dim == 1 && opts.tail_cells > 0 && opts.tail_factor > 1.0;
    if tail_included {
        let e: Vec<f64> = (0..=opts.tail_cells).map(|j| r * opts.tail_factor.powf(j as f64 / opts.tail_cells as f64)).collect();
        // outside the support Mf decreases in |x|, so the outer end is the cell infimum
        for w in e.windows(2) {
            let (m, width) = (w[1], w[1] - w[0]);
            pts.push([m, 0.0]);
            meas.push(mult * width);
            if !symmetric {
                pts.push([-m, 0.0]);
                meas.push(width);
            }
        }
    }
    let values = eval_maximal(field, kernel, cube_budget, &pts)?;
    let sampled_measure = meas.iter().sum();
    let rearrangement = Rearrangement::from_levels(values.into_iter().zip(meas).collect());
    Ok(MaximalSample { rearrangement, box_radius: r, cell_measure, sampled_measure, tail_included })
}

/// `(T_{B/φ^α,b} (f*)^α)^{1/α}`, i.e. `sup_{τ ≥ t} (∫_0^τ (f*)^α b)^{1/α} / φ(τ)` at the
/// cell midpoints of the grid of `fstar`.
pub fn rhs_reduction(fstar: &MonotoneFunction, kernel: &MaximalKernel) -> Result<GridFunction> {
    let g = fstar.grid();
    let a = kernel.alpha;
    let phi = WeightSpec::from_descriptor(g.clone(), kernel.phi)?;
    let b = WeightSpec::from_descriptor(g.clone(), kernel.b)?;
    let spec = reduce_maximal_to_t(&phi, a, &b, HeadPolicy::Exact)?;
    let psi = fstar.map(|v| ext::pow(v, a))?;
    apply_t(&spec, &psi)?.map(|v| ext::pow(v, 1.0 / a))
}

/// The same expression with the supremum dropped (`τ = t`):
/// `(∫_0^t (f*)^α b)^{1/α} / φ(t)` at the cell midpoints.
pub fn rhs_at_t(fstar: &MonotoneFunction, kernel: &MaximalKernel) -> Result<GridFunction> {
    let g = fstar.grid();
    let a = kernel.alpha;
    let phi = WeightSpec::from_descriptor(g.clone(), kernel.phi)?;
    let b = WeightSpec::from_descriptor(g.clone(), kernel.b)?;
    let spec = reduce_maximal_to_t(&phi, a, &b, HeadPolicy::Exact)?;
    let psi: Vec<f64> = fstar.values().iter().map(|&v| ext::pow(v, a)).collect();
    let p = spec.prefix_mass_mid(&psi);
    let vals = spec.kernel().iter().zip(&p).map(|(&k, &p)| ext::pow(ext::mul(k, p), 1.0 / a)).collect();
    GridFunction::new(g.clone(), vals)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SandwichRow {
    pub t: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
}

/// Pointwise comparison of `(Mf)*` with a reference over the trusted `t` range.
#[derive(Debug, Clone, Serialize)]
pub struct SandwichReport {
    pub rows: Vec<SandwichRow>,
    /// Smallest and largest ratio; `None` when every row was skipped as `0/0`.
    pub c_low: Option<f64>,
    pub c_high: Option<f64>,
    pub tail_included: bool,
    pub warnings: Vec<String>,
}

/// Comparison points: midpoints of a log grid spanning the sampled measures, with
/// the outer tenth of the log range dropped at each end.
const TRUST_TRIM: f64 = 0.1;
const RHS_CELLS: usize = 1024;

fn comparison_grid(ms: &MaximalSample) -> Result<(Arc<Grid>, f64, f64)> {
    let (lo, hi) = (2.0 * ms.cell_measure, ms.sampled_measure);
    let grid = Grid::log_uniform(lo / 100.0, hi * 100.0, RHS_CELLS)?;
    let span = (hi / lo).ln();
    Ok((grid, lo * (TRUST_TRIM * span).exp(), hi * (-TRUST_TRIM * span).exp()))
}

fn compare(ms: &MaximalSample, grid: &Grid, window: (f64, f64), rhs: impl Fn(usize) -> f64, warnings: Vec<String>) -> SandwichReport {
    let mut rows = Vec::new();
    for (k, &t) in grid.mids().iter().enumerate() {
        if t < window.0 || t > window.1 {
            continue;
        }
        let (lhs, r) = (ms.rearrangement.eval(t), rhs(k));
        if lhs == 0.0 && r == 0.0 {
            continue;
        }
        rows.push(SandwichRow { t, lhs, rhs: r, ratio: ext::div(lhs, r) });
    }
    let c_low = rows.iter().map(|r| r.ratio).reduce(f64::min);
    let c_high = rows.iter().map(|r| r.ratio).reduce(f64::max);
    let mut warnings = warnings;
    if !ms.tail_included {
        warnings.push("no samples beyond the box; (Mf)* misses the far tail".into());
    }
    SandwichReport { rows, c_low, c_high, tail_included: ms.tail_included, warnings }
}

/// `(M_{φ,Λ^α(b)} f)*(t)` against `rhs_reduction` for a radial non-increasing `f`.
pub fn sandwich_check(f: &RadialField, kernel: &MaximalKernel, cube_budget: usize, opts: &SampleOptions) -> Result<SandwichReport> {
    let ms = maximal_rearrangement(Field::Radial(f), kernel, cube_budget, opts)?;
    if ms.sampled_measure == 0.0 {
        return Ok(SandwichReport { rows: Vec::new(), c_low: None, c_high: None, tail_included: false, warnings: Vec::new() });
    }
    let (grid, a, b) = comparison_grid(&ms)?;
    let fstar = f.rearrange().resample(&grid);
    let rhs = rhs_reduction(&fstar, kernel)?;
    let warnings = kernel.hypotheses(&grid, ext::DEFAULT_CAP)?;
    Ok(compare(&ms, &grid, (a, b), |k| rhs.values()[k], warnings))
}

/// `(Mf)*(t) / f**(t)` for the Hardy–Littlewood operator on a step field.
pub fn herz_stein_check(f: &StepField, cube_budget: usize, opts: &SampleOptions) -> Result<SandwichReport> {
    let ms = maximal_rearrangement(Field::Step(f), &MaximalKernel::classical(), cube_budget, opts)?;
    if ms.sampled_measure == 0.0 {
        return Ok(SandwichReport { rows: Vec::new(), c_low: None, c_high: None, tail_included: false, warnings: Vec::new() });
    }
    let (grid, a, b) = comparison_grid(&ms)?;
    let fr = f.rearrange();
    let mids = grid.mids().to_vec();
    Ok(compare(&ms, &grid, (a, b), |k| fr.doublestar(mids[k]), Vec::new()))
}

/// Rejects fields outside dimensions 1 and 2 before any sampling work.
pub fn check_field_dim(dim: usize) -> Result<()> {
    if dim == 1 || dim == 2 {
        Ok(())
    } else {
        Err(LabError::Parameter(format!("dimension must be 1 or 2, got {dim}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bump() -> StepField {
        StepField::intervals(&[(-0.5, 0.5, 1.0)]).unwrap()
    }

    #[test]
    fn classical_on_unit_bump() {
        let f = bump();
        let xs: Vec<[f64; 2]> = [0.0, 0.25, 0.5, 0.75, 1.0, 2.0, 3.5].iter().map(|&x| [x, 0.0]).collect();
        let m = eval_maximal((&f).into(), &MaximalKernel::classical(), 16, &xs).unwrap();
        for (x, v) in xs.iter().zip(&m) {
            let want = if x[0] <= 0.5 { 1.0 } else { 1.0 / (x[0] + 0.5) };
            assert!((v - want).abs() < 1e-12, "x = {} got {v} want {want}", x[0]);
        }
    }

    #[test]
    fn zero_field() {
        let f = StepField::intervals(&[(-1.0, 1.0, 0.0)]).unwrap();
        let m = eval_maximal((&f).into(), &MaximalKernel::classical(), 8, &[[0.3, 0.0], [5.0, 0.0]]).unwrap();
        assert_eq!(m, vec![0.0, 0.0]);
    }

    #[test]
    fn fractional_at_the_edge() {
        let f = bump();
        let k = MaximalKernel::fractional(0.5, 1).unwrap();
        let m = eval_maximal((&f).into(), &k, 32, &[[0.5, 0.0]]).unwrap();
        assert!((m[0] - 1.0).abs() < 1e-12, "{}", m[0]);
    }

    #[test]
    fn radial_and_step_agree_in_one_dimension() {
        let rad = RadialField::new(1, vec![0.5, 1.0], vec![2.0, 1.0]).unwrap();
        let step = StepField::intervals(&[(-1.0, -0.5, 1.0), (-0.5, 0.5, 2.0), (0.5, 1.0, 1.0)]).unwrap();
        let k = MaximalKernel::lorentz_pq(2.0, 1.0).unwrap();
        let xs: Vec<[f64; 2]> = [0.1, 0.7, 1.3, 4.0].iter().map(|&x| [x, 0.0]).collect();
        let a = eval_maximal((&rad).into(), &k, 16, &xs).unwrap();
        let b = eval_maximal((&step).into(), &k, 16, &xs).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() < 1e-12 * x.max(1.0));
        }
    }

    #[test]
    fn rhs_of_indicator_is_doublestar() {
        let g = Grid::log_uniform(1e-3, 1e3, 600).unwrap();
        let fstar = MonotoneFunction::from_values(g.clone(), (0..600).map(|k| if k < 300 { 1.0 } else { 0.0 }).collect()).unwrap();
        let out = rhs_reduction(&fstar, &MaximalKernel::classical()).unwrap();
        for (&t, &v) in g.mids().iter().zip(out.values()) {
            let want = if t <= 1.0 { 1.0 } else { 1.0 / t };
            assert!((v - want).abs() < 1e-2 * want, "t = {t}: {v} vs {want}");
        }
    }
}
