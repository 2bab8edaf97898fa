use std::sync::Arc;

use serde::Serialize;

use crate::error::{param, Result};

/// A partition `t_min = e_0 < e_1 < ... < e_N = t_max` of a truncated half-line.
///
/// Cells are the half-open intervals `(e_k, e_{k+1}]`. Pointwise quantities are
/// sampled at the geometric midpoints `m_k = sqrt(e_k e_{k+1})`.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    edges: Vec<f64>,
    mids: Vec<f64>,
}

/// Compact description of a grid for report provenance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridInfo {
    pub t_min: f64,
    pub t_max: f64,
    pub n: usize,
}

impl Grid {
    /// Log-uniform grid with `e_k = t_min (t_max/t_min)^{k/n}`.
    pub fn log_uniform(t_min: f64, t_max: f64, n: usize) -> Result<Arc<Grid>> {
        if !(t_min > 0.0 && t_min.is_finite()) || !(t_max > t_min && t_max.is_finite()) {
            return param(format!("invalid grid bounds ({t_min}, {t_max}]"));
        }
        if n < 2 {
            return param(format!("grid needs at least 2 cells, got {n}"));
        }
        let log_ratio = (t_max / t_min).ln();
        let mut edges: Vec<f64> = (0..=n)
            .map(|k| t_min * (log_ratio * k as f64 / n as f64).exp())
            .collect();
        edges[0] = t_min;
        edges[n] = t_max;
        Self::from_edges(edges)
    }

    /// Grid with arbitrary strictly increasing positive edges.
    pub fn from_edges(edges: Vec<f64>) -> Result<Arc<Grid>> {
        if edges.len() < 3 {
            return param("grid needs at least 2 cells");
        }
        if !(edges[0] > 0.0) || edges.iter().any(|e| !e.is_finite()) {
            return param("grid edges must be positive and finite");
        }
        if edges.windows(2).any(|w| w[1] <= w[0]) {
            return param("grid edges must be strictly increasing");
        }
        let mids = edges.windows(2).map(|w| (w[0] * w[1]).sqrt()).collect();
        Ok(Arc::new(Grid { edges, mids }))
    }

    pub fn n(&self) -> usize {
        self.mids.len()
    }

    pub fn t_min(&self) -> f64 {
        self.edges[0]
    }

    pub fn t_max(&self) -> f64 {
        self.edges[self.n()]
    }

    pub fn edges(&self) -> &[f64] {
        &self.edges
    }

    pub fn mids(&self) -> &[f64] {
        &self.mids
    }

    pub fn width(&self, k: usize) -> f64 {
        self.edges[k + 1] - self.edges[k]
    }

    pub fn info(&self) -> GridInfo {
        GridInfo { t_min: self.t_min(), t_max: self.t_max(), n: self.n() }
    }

    /// Index of the cell `(e_k, e_{k+1}]` containing `t`, or `None` outside
    /// `(t_min, t_max]`.
    pub fn locate(&self, t: f64) -> Option<usize> {
        if !(t > self.t_min() && t <= self.t_max()) {
            return None;
        }
        // first edge >= t, minus one
        let idx = self.edges.partition_point(|&e| e < t);
        Some(idx - 1)
    }

    /// Same edges, compared by value.
    pub fn same_as(&self, other: &Grid) -> bool {
        std::ptr::eq(self, other) || self.edges == other.edges
    }
}
