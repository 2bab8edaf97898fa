//! Distribution functions, non-increasing rearrangements and `f**`.

use std::f64::consts::PI;
use std::sync::Arc;

use crate::domain::{Grid, GridFunction, MonotoneFunction};
use crate::error::{param, Result};
use crate::ext;

/// Lebesgue measure of the unit ball in dimension 1 or 2.
pub fn unit_ball_measure(dim: usize) -> f64 {
    if dim == 1 {
        2.0
    } else {
        PI
    }
}

fn check_dim(dim: usize) -> Result<()> {
    if dim == 1 || dim == 2 {
        Ok(())
    } else {
        param(format!("dimension must be 1 or 2, got {dim}"))
    }
}

/// Axis-aligned box in dimension 1 or 2; the second axis is ignored when `dim = 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cube {
    pub lo: [f64; 2],
    pub hi: [f64; 2],
}

impl Cube {
    pub fn interval(a: f64, b: f64) -> Self {
        Cube { lo: [a, 0.0], hi: [b, 0.0] }
    }

    pub fn rect(x0: f64, x1: f64, y0: f64, y1: f64) -> Self {
        Cube { lo: [x0, y0], hi: [x1, y1] }
    }

    pub fn measure(&self, dim: usize) -> f64 {
        (0..dim).map(|d| (self.hi[d] - self.lo[d]).max(0.0)).product()
    }

    pub fn overlap(&self, other: &Cube, dim: usize) -> f64 {
        (0..dim)
            .map(|d| (self.hi[d].min(other.hi[d]) - self.lo[d].max(other.lo[d])).max(0.0))
            .product()
    }
}

/// A finite sum of values on pairwise disjoint boxes.
#[derive(Debug, Clone, PartialEq)]
pub struct StepField {
    dim: usize,
    cells: Vec<(Cube, f64)>,
}

impl StepField {
    pub fn new(dim: usize, cells: Vec<(Cube, f64)>) -> Result<Self> {
        check_dim(dim)?;
        for (i, (c, v)) in cells.iter().enumerate() {
            if !(*v >= 0.0) || !v.is_finite() {
                return param(format!("cell {i} has invalid value {v}"));
            }
            if (0..dim).any(|d| !(c.hi[d] > c.lo[d]) || !c.lo[d].is_finite() || !c.hi[d].is_finite()) {
                return param(format!("cell {i} is empty or unbounded"));
            }
        }
        for i in 0..cells.len() {
            for j in i + 1..cells.len() {
                if cells[i].0.overlap(&cells[j].0, dim) > 0.0 {
                    return param(format!("cells {i} and {j} overlap"));
                }
            }
        }
        Ok(StepField { dim, cells })
    }

    /// One-dimensional field from `(a, b, value)` intervals.
    pub fn intervals(parts: &[(f64, f64, f64)]) -> Result<Self> {
        Self::new(1, parts.iter().map(|&(a, b, v)| (Cube::interval(a, b), v)).collect())
    }

    /// The monotone function viewed as a field on `(0, t_max]`, head cell included.
    pub fn from_grid_function(f: &GridFunction) -> Self {
        let g = f.grid();
        let e = g.edges();
        let mut cells = vec![(Cube::interval(0.0, e[0]), f.values()[0])];
        cells.extend((0..g.n()).map(|k| (Cube::interval(e[k], e[k + 1]), f.values()[k])));
        StepField { dim: 1, cells }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn cells(&self) -> &[(Cube, f64)] {
        &self.cells
    }

    /// `|{|f| > λ}|`.
    pub fn distribution(&self, lambda: f64) -> f64 {
        self.cells.iter().filter(|(_, v)| *v > lambda).map(|(c, _)| c.measure(self.dim)).sum()
    }

    pub fn rearrange(&self) -> Rearrangement {
        Rearrangement::from_levels(self.cells.iter().map(|(c, v)| (*v, c.measure(self.dim))).collect())
    }

    /// `(value, |cell ∩ Q|)` pairs of the restriction `f χ_Q`.
    pub fn restricted_levels(&self, q: &Cube) -> Vec<(f64, f64)> {
        self.cells
            .iter()
            .filter_map(|(c, v)| {
                let m = c.overlap(q, self.dim);
                (m > 0.0 && *v > 0.0).then_some((*v, m))
            })
            .collect()
    }

    /// `∫_E |f|` for a union of pairwise disjoint boxes `E`.
    pub fn integral_over(&self, boxes: &[Cube]) -> f64 {
        self.cells
            .iter()
            .map(|(c, v)| v * boxes.iter().map(|b| c.overlap(b, self.dim)).sum::<f64>())
            .sum()
    }

    /// Sorted distinct box coordinates along `axis`.
    pub fn breakpoints(&self, axis: usize) -> Vec<f64> {
        let mut pts: Vec<f64> = self.cells.iter().flat_map(|(c, _)| [c.lo[axis], c.hi[axis]]).collect();
        pts.sort_by(f64::total_cmp);
        pts.dedup();
        pts
    }

    /// Smallest `R` with the support inside `[-R, R]^n`.
    pub fn support_radius(&self) -> f64 {
        self.cells
            .iter()
            .filter(|(_, v)| *v > 0.0)
            .flat_map(|(c, _)| (0..self.dim).flat_map(move |d| [c.lo[d].abs(), c.hi[d].abs()]))
            .fold(0.0, f64::max)
    }

    pub fn value_at(&self, x: [f64; 2]) -> f64 {
        self.cells
            .iter()
            .find(|(c, _)| (0..self.dim).all(|d| c.lo[d] <= x[d] && x[d] <= c.hi[d]))
            .map_or(0.0, |(_, v)| *v)
    }
}

/// Radially non-increasing field `f(x) = h(|x|)` with `h = values[i]` on
/// `(radii[i-1], radii[i]]` (`radii[-1] = 0`) and `h = 0` beyond the last radius.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialField {
    dim: usize,
    radii: Vec<f64>,
    values: Vec<f64>,
}

impl RadialField {
    pub fn new(dim: usize, radii: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        check_dim(dim)?;
        if radii.is_empty() || radii.len() != values.len() {
            return param("radial field needs matching nonempty radii and values");
        }
        if !(radii[0] > 0.0) || radii.windows(2).any(|w| w[1] <= w[0]) || radii.iter().any(|r| !r.is_finite()) {
            return param("radii must be positive, finite and strictly increasing");
        }
        if values.iter().any(|v| !(*v >= 0.0) || !v.is_finite()) || values.windows(2).any(|w| w[1] > w[0]) {
            return param("profile values must be finite, nonnegative and non-increasing");
        }
        Ok(RadialField { dim, radii, values })
    }

    /// Profile `h` given on a radius grid; the first cell is extended down to 0.
    pub fn from_profile(dim: usize, h: &MonotoneFunction) -> Result<Self> {
        let g = h.grid();
        Self::new(dim, g.edges()[1..].to_vec(), h.values().to_vec())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn radii(&self) -> &[f64] {
        &self.radii
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn profile(&self, r: f64) -> f64 {
        let i = self.radii.partition_point(|&x| x < r);
        self.values.get(i).copied().unwrap_or(0.0)
    }

    pub fn support_radius(&self) -> f64 {
        self.values.iter().rposition(|v| *v > 0.0).map_or(0.0, |i| self.radii[i])
    }

    pub fn distribution(&self, lambda: f64) -> f64 {
        self.rearrange().distribution(lambda)
    }

    /// `f*(t) = h(r)` with `t = ω_n r^n`.
    pub fn rearrange(&self) -> Rearrangement {
        let w = unit_ball_measure(self.dim);
        let mut values = Vec::new();
        let mut ends: Vec<f64> = Vec::new();
        for (&r, &v) in self.radii.iter().zip(&self.values) {
            if v <= 0.0 {
                break;
            }
            let end = w * r.powi(self.dim as i32);
            if values.last() == Some(&v) {
                *ends.last_mut().expect("paired") = end;
            } else {
                values.push(v);
                ends.push(end);
            }
        }
        Rearrangement { values, ends }
    }
}

/// Exact rearrangement of a step function: `values[i]` on `[ends[i-1], ends[i])`
/// with strictly decreasing positive values, and 0 after the last end.
#[derive(Debug, Clone, PartialEq)]
pub struct Rearrangement {
    values: Vec<f64>,
    ends: Vec<f64>,
}

impl Rearrangement {
    /// Sorts `(value, measure)` pairs by decreasing value and merges ties.
    pub fn from_levels(mut levels: Vec<(f64, f64)>) -> Self {
        levels.retain(|(v, m)| *v > 0.0 && *m > 0.0);
        levels.sort_by(|a, b| b.0.total_cmp(&a.0));
        let mut values: Vec<f64> = Vec::new();
        let mut ends: Vec<f64> = Vec::new();
        let mut acc = 0.0;
        for (v, m) in levels {
            acc += m;
            if values.last() == Some(&v) {
                *ends.last_mut().expect("paired") = acc;
            } else {
                values.push(v);
                ends.push(acc);
            }
        }
        Rearrangement { values, ends }
    }

    pub fn levels(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.values.iter().copied().zip(self.ends.iter().copied())
    }

    pub fn support(&self) -> f64 {
        self.ends.last().copied().unwrap_or(0.0)
    }

    /// Right-continuous `f*(t)`.
    pub fn eval(&self, t: f64) -> f64 {
        let i = self.ends.partition_point(|&e| e <= t);
        self.values.get(i).copied().unwrap_or(0.0)
    }

    pub fn distribution(&self, lambda: f64) -> f64 {
        let i = self.values.partition_point(|&v| v > lambda);
        if i == 0 {
            0.0
        } else {
            self.ends[i - 1]
        }
    }

    /// `∫_0^t f*`.
    pub fn integral_to(&self, t: f64) -> f64 {
        let mut acc = 0.0;
        let mut start = 0.0;
        for (&v, &e) in self.values.iter().zip(&self.ends) {
            if t <= start {
                break;
            }
            acc += v * (e.min(t) - start);
            start = e;
        }
        acc
    }

    /// `f**(t) = (1/t) ∫_0^t f*`.
    pub fn doublestar(&self, t: f64) -> f64 {
        self.integral_to(t) / t
    }

    /// Essential sup of `f*` over each grid cell, i.e. `f*(e_k)`.
    pub fn resample(&self, grid: &Arc<Grid>) -> MonotoneFunction {
        let values = grid.edges()[..grid.n()].iter().map(|&e| self.eval(e)).collect();
        MonotoneFunction::from_parts_unchecked(grid.clone(), values)
    }
}

/// `|{f > λ}|` on the truncated line, the head `(0, t_min]` included.
pub fn grid_distribution(f: &GridFunction, lambda: f64) -> f64 {
    let g = f.grid();
    let head = if f.values()[0] > lambda { g.t_min() } else { 0.0 };
    head + (0..g.n()).filter(|&k| f.values()[k] > lambda).map(|k| g.width(k)).sum::<f64>()
}

/// `f**` at the cell midpoints, with the head `(0, t_min]` read at `f*(t_min+)`.
pub fn doublestar(fstar: &MonotoneFunction) -> GridFunction {
    let g = fstar.grid();
    let (e, m) = (g.edges(), g.mids());
    let f = fstar.values();
    let mut acc = ext::mul(f[0], g.t_min());
    let out = (0..g.n())
        .map(|k| {
            let v = ext::div(acc + ext::mul(f[k], m[k] - e[k]), m[k]);
            acc += ext::mul(f[k], e[k + 1] - e[k]);
            v
        })
        .collect();
    GridFunction::from_parts_unchecked(g.clone(), out)
}
