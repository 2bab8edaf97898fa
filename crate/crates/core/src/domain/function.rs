use std::ops::Deref;
use std::sync::Arc;

use super::Grid;
use crate::error::{param, Result};

/// Nonnegative piecewise-constant function: `values[k]` on `(e_k, e_{k+1}]`.
///
/// Below `t_min` the function is read as the constant `values[0]`, which is
/// the natural extension for members of the monotone cone.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    grid: Arc<Grid>,
    values: Vec<f64>,
}

impl GridFunction {
    /// Values may be `+∞` but never negative or NaN.
    pub fn new(grid: Arc<Grid>, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.n() {
            return param(format!("expected {} cell values, got {}", grid.n(), values.len()));
        }
        if let Some(k) = values.iter().position(|v| !(*v >= 0.0)) {
            return param(format!("cell value {k} is negative or NaN: {}", values[k]));
        }
        Ok(GridFunction { grid, values })
    }

    /// Samples `f` at the cell midpoints.
    pub fn from_fn(grid: Arc<Grid>, f: impl Fn(f64) -> f64) -> Result<Self> {
        let values = grid.mids().iter().map(|&t| f(t)).collect();
        Self::new(grid, values)
    }

    pub fn constant(grid: Arc<Grid>, c: f64) -> Result<Self> {
        let n = grid.n();
        Self::new(grid, vec![c; n])
    }

    /// `χ_(0,s]` restricted to whole cells: 1 on every cell whose midpoint is at most `s`.
    pub fn indicator(grid: Arc<Grid>, s: f64) -> Self {
        let values = grid.mids().iter().map(|&m| if m <= s { 1.0 } else { 0.0 }).collect();
        GridFunction { grid, values }
    }

    pub(crate) fn from_parts_unchecked(grid: Arc<Grid>, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), grid.n());
        GridFunction { grid, values }
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    /// Value on the cell containing `t`; constant extension outside the grid.
    pub fn value_at(&self, t: f64) -> f64 {
        if t <= self.grid.t_min() {
            self.values[0]
        } else if t > self.grid.t_max() {
            self.values[self.values.len() - 1]
        } else {
            self.values[self.grid.locate(t).unwrap_or(0)]
        }
    }

    pub fn scale(&self, c: f64) -> Self {
        let values = self.values.iter().map(|v| crate::ext::mul(c, *v)).collect();
        GridFunction { grid: self.grid.clone(), values }
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::new(self.grid.clone(), self.values.iter().map(|&v| f(v)).collect())
    }

    pub fn is_non_increasing(&self) -> bool {
        self.values.windows(2).all(|w| w[0] >= w[1])
    }
}

/// A member of the monotone cone: a non-increasing [`GridFunction`].
#[derive(Debug, Clone, PartialEq)]
pub struct MonotoneFunction(GridFunction);

impl MonotoneFunction {
    pub fn new(f: GridFunction) -> Result<Self> {
        if !f.is_non_increasing() {
            return param("values are not non-increasing");
        }
        Ok(MonotoneFunction(f))
    }

    pub fn from_values(grid: Arc<Grid>, values: Vec<f64>) -> Result<Self> {
        Self::new(GridFunction::new(grid, values)?)
    }

    pub fn into_inner(self) -> GridFunction {
        self.0
    }

    pub fn as_grid_function(&self) -> &GridFunction {
        &self.0
    }

    pub(crate) fn from_parts_unchecked(grid: Arc<Grid>, values: Vec<f64>) -> Self {
        debug_assert!(values.windows(2).all(|w| w[0] >= w[1]));
        MonotoneFunction(GridFunction::from_parts_unchecked(grid, values))
    }
}

impl Deref for MonotoneFunction {
    type Target = GridFunction;
    fn deref(&self) -> &GridFunction {
        &self.0
    }
}

/// Exact integral of the step representation over `(a, b]`.
pub fn integrate(f: &GridFunction, a: f64, b: f64) -> Result<f64> {
    let g = f.grid();
    if a > b {
        return param(format!("integration bounds reversed: {a} > {b}"));
    }
    if a < g.t_min() || b > g.t_max() {
        return param(format!("integration bounds ({a}, {b}] leave the grid"));
    }
    Ok(integrate_steps(g, f.values(), a, b))
}

pub(crate) fn integrate_steps(g: &Grid, values: &[f64], a: f64, b: f64) -> f64 {
    if a >= b {
        return 0.0;
    }
    let e = g.edges();
    let first = g.locate(a).map_or(0, |k| if e[k + 1] <= a { k + 1 } else { k });
    let mut sum = 0.0;
    for k in first..g.n() {
        if e[k] >= b {
            break;
        }
        let lo = e[k].max(a);
        let hi = e[k + 1].min(b);
        if hi > lo {
            sum += crate::ext::mul(values[k], hi - lo);
        }
    }
    sum
}
