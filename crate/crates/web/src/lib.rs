//! Browser bindings. Every entry point takes a JSON request and returns a JSON
//! reply, or throws a string on invalid input.

use lorentz_lab::oracle::oracle_t_norm;
use lorentz_lab::rearrangement::RadialField;
use lorentz_lab::sandbox::{eval_maximal, sandwich_check, Field, MaximalKernel, SampleOptions};
use lorentz_lab::{constants_t, Grid, HeadPolicy, PowerLog, Result, SupOpSpec, WeightSpec};
use serde::{Deserialize, Serialize};
use wasm_bindgen::prelude::*;

/// Pure power weights `t^a` on a log grid.
#[derive(Deserialize)]
pub struct ConstantsRequest {
    pub t_min: f64,
    pub t_max: f64,
    pub n: usize,
    pub p: f64,
    pub q: f64,
    /// Exponent of `b`.
    pub b: f64,
    /// Exponent of the kernel `u/B`.
    pub kernel: f64,
    pub v: f64,
    pub w: f64,
    /// Oracle budget; no oracle when zero.
    #[serde(default)]
    pub budget: usize,
}

#[derive(Serialize)]
struct ConstantsReply {
    regime: String,
    parts: Vec<(String, f64, bool)>,
    total: f64,
    finite: bool,
    oracle: Option<f64>,
}

#[derive(Deserialize, Clone, Copy)]
#[serde(tag = "name", rename_all = "kebab-case")]
pub enum KernelRequest {
    Classical,
    Fractional { gamma: f64 },
    LorentzPq { p: f64, q: f64 },
    LogFractional { s: f64, gamma: f64, a0: f64, a_inf: f64 },
}

/// `f = 1` on the ball of the given radius.
#[derive(Deserialize)]
pub struct SandboxRequest {
    pub dim: usize,
    pub radius: f64,
    pub kernel: KernelRequest,
    #[serde(default = "default_budget")]
    pub cube_budget: usize,
    /// Profile abscissae for `maximal`.
    #[serde(default)]
    pub xs: Vec<f64>,
}

fn default_budget() -> usize {
    8
}

impl KernelRequest {
    fn build(self, dim: usize) -> Result<MaximalKernel> {
        match self {
            KernelRequest::Classical => Ok(MaximalKernel::classical()),
            KernelRequest::Fractional { gamma } => MaximalKernel::fractional(gamma, dim),
            KernelRequest::LorentzPq { p, q } => MaximalKernel::lorentz_pq(p, q),
            KernelRequest::LogFractional { s, gamma, a0, a_inf } => MaximalKernel::log_fractional(s, gamma, dim, a0, a_inf),
        }
    }
}

fn parse<'a, T: Deserialize<'a>>(json: &'a str) -> std::result::Result<T, String> {
    serde_json::from_str(json).map_err(|e| format!("bad request: {e}"))
}

fn reply<T: Serialize>(r: Result<T>) -> std::result::Result<String, String> {
    let v = r.map_err(|e| e.to_string())?;
    serde_json::to_string(&v).map_err(|e| e.to_string())
}

pub fn constants_native(req: &ConstantsRequest) -> Result<impl Serialize> {
    let grid = Grid::log_uniform(req.t_min, req.t_max, req.n)?;
    let power = |a: f64| WeightSpec::from_descriptor(grid.clone(), PowerLog::power(a));
    let (b, v, w) = (power(req.b)?, power(req.v)?, power(req.w)?);
    let policy = if req.b > -1.0 { HeadPolicy::Exact } else { HeadPolicy::Truncate };
    let spec = SupOpSpec::from_ratio(power(req.kernel)?.samples(), &b, policy)?;
    let rep = constants_t(&spec, &v, &w, req.p, req.q, lorentz_lab::ext::DEFAULT_CAP)?;
    let oracle = match req.budget {
        0 => None,
        k => Some(oracle_t_norm(&spec, &v, &w, req.p, req.q, k, 0)?.best_ratio),
    };
    Ok(ConstantsReply {
        regime: rep.regime.to_string(),
        parts: rep.parts.iter().map(|p| (p.name.clone(), p.value, p.finite)).collect(),
        total: rep.total,
        finite: rep.finite,
        oracle,
    })
}

/// Characterization constants for power weights, with an optional oracle bound.
#[wasm_bindgen]
pub fn constants(json: &str) -> std::result::Result<String, String> {
    reply(constants_native(&parse(json)?))
}

pub fn sandwich_native(req: &SandboxRequest) -> Result<impl Serialize> {
    let f = RadialField::new(req.dim, vec![req.radius], vec![1.0])?;
    let k = req.kernel.build(req.dim)?;
    sandwich_check(&f, &k, req.cube_budget, &SampleOptions::for_dim(req.dim))
}

/// `(M f)^*` against its one-dimensional reduction for a ball indicator.
#[wasm_bindgen]
pub fn sandwich(json: &str) -> std::result::Result<String, String> {
    reply(sandwich_native(&parse(json)?))
}

pub fn maximal_native(req: &SandboxRequest) -> Result<Vec<(f64, f64)>> {
    let f = RadialField::new(req.dim, vec![req.radius], vec![1.0])?;
    let k = req.kernel.build(req.dim)?;
    let pts: Vec<[f64; 2]> = req.xs.iter().map(|&x| [x, 0.0]).collect();
    let vals = eval_maximal(Field::Radial(&f), &k, req.cube_budget, &pts)?;
    Ok(req.xs.iter().copied().zip(vals).collect())
}

/// `M f` along the first axis for a ball indicator.
#[wasm_bindgen]
pub fn maximal(json: &str) -> std::result::Result<String, String> {
    reply(maximal_native(&parse(json)?))
}
