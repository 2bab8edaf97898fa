//! Numerical laboratory for weighted Lorentz spaces, supremum operators on the
//! cone of non-increasing functions and fractional maximal operators.
//!
//! Everything lives on a logarithmic grid over `(t_min, t_max]`. Functions are
//! step functions on its cells; weights carry exact cell masses.

pub mod characterization;
pub mod domain;
pub mod error;
pub mod ext;
pub mod hardy;
pub mod lorentz;
pub mod oracle;
mod par;
pub mod rearrangement;
pub mod sandbox;

pub use characterization::{
    constant_i, constants_maximal, constants_t, constants_t_weak, regime_select, ConstantReport, MaximalProblem, Part,
    Provenance, Regime, Target,
};
pub use domain::{CumulativeWeight, Grid, GridFunction, HeadPolicy, MonotoneFunction, PowerLog, WeightSpec};
pub use error::{LabError, Result};
pub use hardy::SupOpSpec;
