//! Discretization substrate: grids, step functions, weights and scans.

mod function;
mod grid;
pub mod scan;
mod weight;

pub use function::{integrate, GridFunction, MonotoneFunction};
pub use grid::{Grid, GridInfo};
pub use scan::{prefix_sup, prefix_sup_fn, suffix_sup, suffix_sup_fn};
pub use weight::{CumulativeWeight, HeadPolicy, PowerLog, WeightSpec};
