//! JSON run configuration and its translation into library inputs.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use lorentz_lab::domain::GridFunction;
use lorentz_lab::rearrangement::{Cube, RadialField, StepField};
use lorentz_lab::sandbox::{MaximalKernel, SampleOptions};
use lorentz_lab::{Grid, LabError, PowerLog, Result, Target, WeightSpec};
use serde::Deserialize;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub grid: GridConfig,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_budget")]
    pub budget: usize,
    pub cap: Option<f64>,
    /// One problem, or a sweep in `cases`.
    pub problem: Option<Problem>,
    #[serde(default)]
    pub cases: Vec<Problem>,
    /// Grid multipliers for refinement studies.
    #[serde(default = "default_refinements")]
    pub refinements: Vec<usize>,
    pub sandbox: Option<SandboxConfig>,
}

fn default_budget() -> usize {
    256
}

fn default_refinements() -> Vec<usize> {
    vec![1, 2, 4]
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub t_min: f64,
    pub t_max: f64,
    pub n: usize,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Operator {
    /// `T_{u,b}` directly.
    #[default]
    T,
    /// `M_{φ,Λ^α(b)}` through its weight constants.
    Maximal,
}

/// A weight: analytic descriptor or a two-column `(t, value)` CSV.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeightConfig {
    pub descriptor: Option<PowerLog>,
    pub samples: Option<PathBuf>,
    /// `∫_0^{t_min}` for sampled weights; truncated when absent.
    pub head: Option<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Problem {
    pub label: Option<String>,
    #[serde(default)]
    pub operator: Operator,
    pub b: Option<WeightConfig>,
    /// `u`; defaults to `B`, i.e. kernel `u/B ≡ 1`.
    pub u: Option<WeightConfig>,
    /// The kernel `u/B` given directly; overrides `u`.
    pub ratio: Option<WeightConfig>,
    pub phi: Option<WeightConfig>,
    pub v: Option<WeightConfig>,
    pub w: Option<WeightConfig>,
    pub p: f64,
    pub q: f64,
    pub alpha: Option<f64>,
    pub r: Option<f64>,
    #[serde(default = "default_target")]
    pub target: Target,
}

fn default_target() -> Target {
    Target::Strong
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SandboxConfig {
    pub field: FieldConfig,
    #[serde(default)]
    pub kernel: KernelConfig,
    #[serde(default = "default_cube_budget")]
    pub cube_budget: usize,
    pub cells: Option<usize>,
    pub tail_cells: Option<usize>,
    /// Sample points for `maximal`.
    #[serde(default)]
    pub points: Vec<[f64; 2]>,
}

fn default_cube_budget() -> usize {
    16
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum FieldConfig {
    /// `h = values[i]` on `(radii[i-1], radii[i]]`.
    Radial { dim: usize, radii: Vec<f64>, values: Vec<f64> },
    /// Boxes `[lo, hi]` with values; `lo`, `hi` have one entry per dimension.
    Step { dim: usize, cells: Vec<StepCell> },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StepCell {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
    pub value: f64,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(tag = "name", rename_all = "kebab-case", deny_unknown_fields)]
pub enum KernelConfig {
    #[default]
    Classical,
    Fractional { gamma: f64 },
    LorentzPq { p: f64, q: f64 },
    LogFractional { s: f64, gamma: f64, a0: f64, a_inf: f64 },
    Custom { phi: PowerLog, alpha: f64, b: PowerLog },
}

impl Config {
    pub fn load(path: &Path) -> Result<(Self, PathBuf)> {
        let text = std::fs::read_to_string(path).map_err(|e| LabError::Configuration(format!("cannot read {}: {e}", path.display())))?;
        let cfg: Config = serde_json::from_str(&text).map_err(|e| LabError::Configuration(format!("invalid config {}: {e}", path.display())))?;
        if cfg.refinements.is_empty() || cfg.refinements.contains(&0) {
            return Err(LabError::Configuration("refinements must be positive multipliers".into()));
        }
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok((cfg, base))
    }

    /// Problems in sweep order.
    pub fn problems(&self) -> Result<Vec<Problem>> {
        let mut out: Vec<Problem> = self.problem.iter().cloned().collect();
        out.extend(self.cases.iter().cloned());
        if out.is_empty() {
            return Err(LabError::Configuration("config needs `problem` or `cases`".into()));
        }
        Ok(out)
    }

    pub fn grid(&self, multiplier: usize) -> Result<Arc<Grid>> {
        Grid::log_uniform(self.grid.t_min, self.grid.t_max, self.grid.n * multiplier)
    }

    pub fn sandbox(&self) -> Result<&SandboxConfig> {
        self.sandbox.as_ref().ok_or_else(|| LabError::Configuration("config needs a `sandbox` section".into()))
    }
}

impl WeightConfig {
    pub fn build(&self, grid: &Arc<Grid>, base: &Path) -> Result<WeightSpec> {
        match (&self.descriptor, &self.samples) {
            (Some(d), None) => WeightSpec::from_descriptor(grid.clone(), *d),
            (None, Some(path)) => {
                let samples = read_samples(&base.join(path), grid)?;
                match self.head {
                    Some(h) => WeightSpec::from_samples_with_head(samples, h),
                    None => WeightSpec::from_samples(samples),
                }
            }
            _ => Err(LabError::Configuration("a weight needs exactly one of `descriptor` or `samples`".into())),
        }
    }
}

/// Builds a weight, `1` when absent.
pub fn weight_or_one(w: &Option<WeightConfig>, grid: &Arc<Grid>, base: &Path) -> Result<WeightSpec> {
    match w {
        Some(w) => w.build(grid, base),
        None => WeightSpec::from_descriptor(grid.clone(), PowerLog::constant(1.0)),
    }
}

/// Reads `(t, value)` rows as a right-continuous step function `value_i` on
/// `(t_{i-1}, t_i]` and samples it at the grid midpoints; the last value extends
/// beyond the last `t`. A non-numeric first row is taken as a header.
fn read_samples(path: &Path, grid: &Arc<Grid>) -> Result<GridFunction> {
    let mut rd = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| LabError::Configuration(format!("cannot read {}: {e}", path.display())))?;
    let mut rows: Vec<(f64, f64)> = Vec::new();
    for (i, rec) in rd.records().enumerate() {
        let rec = rec.map_err(|e| LabError::Configuration(format!("{}: {e}", path.display())))?;
        let parsed = (rec.get(0).map(str::parse::<f64>), rec.get(1).map(str::parse::<f64>));
        match parsed {
            (Some(Ok(t)), Some(Ok(v))) => rows.push((t, v)),
            _ if i == 0 => continue,
            _ => return Err(LabError::Configuration(format!("{}: row {} is not (t, value)", path.display(), i + 1))),
        }
    }
    if rows.is_empty() || rows.windows(2).any(|w| w[1].0 <= w[0].0) {
        return Err(LabError::Configuration(format!("{}: needs rows with increasing t", path.display())));
    }
    let vals = grid
        .mids()
        .iter()
        .map(|&m| {
            let i = rows.partition_point(|r| r.0 < m).min(rows.len() - 1);
            rows[i].1
        })
        .collect();
    GridFunction::new(grid.clone(), vals)
}

impl KernelConfig {
    pub fn build(&self, dim: usize) -> Result<MaximalKernel> {
        match *self {
            KernelConfig::Classical => Ok(MaximalKernel::classical()),
            KernelConfig::Fractional { gamma } => MaximalKernel::fractional(gamma, dim),
            KernelConfig::LorentzPq { p, q } => MaximalKernel::lorentz_pq(p, q),
            KernelConfig::LogFractional { s, gamma, a0, a_inf } => MaximalKernel::log_fractional(s, gamma, dim, a0, a_inf),
            KernelConfig::Custom { phi, alpha, b } => MaximalKernel::new(phi, alpha, b),
        }
    }
}

pub enum BuiltField {
    Radial(RadialField),
    Step(StepField),
}

impl FieldConfig {
    pub fn dim(&self) -> usize {
        match self {
            FieldConfig::Radial { dim, .. } | FieldConfig::Step { dim, .. } => *dim,
        }
    }

    pub fn build(&self) -> Result<BuiltField> {
        match self {
            FieldConfig::Radial { dim, radii, values } => Ok(BuiltField::Radial(RadialField::new(*dim, radii.clone(), values.clone())?)),
            FieldConfig::Step { dim, cells } => {
                let mut out = Vec::with_capacity(cells.len());
                for c in cells {
                    if c.lo.len() != *dim || c.hi.len() != *dim {
                        return Err(LabError::Configuration(format!("step cells need {dim} coordinates")));
                    }
                    let hi1 = if *dim == 2 { c.hi[1] } else { 0.0 };
                    let lo1 = if *dim == 2 { c.lo[1] } else { 0.0 };
                    out.push((Cube::rect(c.lo[0], c.hi[0], lo1, hi1), c.value));
                }
                Ok(BuiltField::Step(StepField::new(*dim, out)?))
            }
        }
    }
}

impl SandboxConfig {
    pub fn options(&self) -> SampleOptions {
        let mut o = SampleOptions::for_dim(self.field.dim());
        if let Some(c) = self.cells {
            o.cells = c;
        }
        if let Some(t) = self.tail_cells {
            o.tail_cells = t;
        }
        o
    }
}
