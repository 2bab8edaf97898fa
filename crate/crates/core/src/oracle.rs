//! Brute-force lower bounds for the best constant of `T_{u,b}` between weighted
//! norms on the cone of non-increasing step functions.
//!
//! The cone is the conical hull of the left indicators `χ_{(0, e_{j+1}]}`, so every
//! candidate is a non-negative combination of them and stays in the cone.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::characterization::{ConstantReport, Target};
use crate::domain::{CumulativeWeight, GridInfo, MonotoneFunction, WeightSpec};
use crate::error::{param, LabError, Result};
use crate::ext;
use crate::hardy::SupOpSpec;
use crate::par::par_map;

/// Breakpoints of one random staircase.
pub const STAIRCASE_STEPS: usize = 8;
/// Log-uniform generators added to the coordinate-ascent dictionary.
const ASCENT_GENERATORS: usize = 32;
const ASCENT_STARTS: usize = 2;
const ASCENT_MAX_SWEEPS: usize = 40;
const ASCENT_MIN_STEP: f64 = 1.0 / 128.0;
const ASCENT_TOL: f64 = 1e-6;

/// A norm on grid functions, head cell `(0, t_min]` included.
#[derive(Debug, Clone)]
pub enum Norm {
    /// `(∫ f^p v)^{1/p}`
    Lebesgue { p: f64, weight: CumulativeWeight },
    /// `max_k f_k weight_k`
    Sup { weight: Vec<f64> },
}

impl Norm {
    /// `‖·‖_{p,v}`, the sup-form for `p = ∞`.
    pub fn weighted(p: f64, v: &WeightSpec) -> Result<Self> {
        if p == f64::INFINITY {
            Ok(Norm::Sup { weight: v.values().to_vec() })
        } else if p > 0.0 && p.is_finite() {
            Ok(Norm::Lebesgue { p, weight: CumulativeWeight::truncating(v) })
        } else {
            param(format!("norm exponent must lie in (0, ∞], got {p}"))
        }
    }

    pub fn eval(&self, f: &[f64]) -> f64 {
        match self {
            Norm::Lebesgue { p, weight } => {
                let mut s = ext::mul(ext::pow(f[0], *p), weight.head());
                for (&x, &m) in f.iter().zip(weight.base().masses()) {
                    s += ext::mul(ext::pow(x, *p), m);
                }
                ext::pow(s, 1.0 / p)
            }
            Norm::Sup { weight } => f.iter().zip(weight).map(|(&x, &w)| ext::mul(x, w)).fold(0.0, f64::max),
        }
    }

    fn len(&self) -> usize {
        match self {
            Norm::Lebesgue { weight, .. } => weight.base().values().len(),
            Norm::Sup { weight } => weight.len(),
        }
    }
}

/// The quotient `‖T f‖_target / ‖f‖_source` on one grid.
#[derive(Debug, Clone)]
pub struct RatioProblem<'a> {
    pub spec: &'a SupOpSpec,
    pub source: Norm,
    pub target: Norm,
}

impl RatioProblem<'_> {
    /// Ratio at `f`; `0/0 = 0`.
    pub fn ratio(&self, f: &[f64]) -> f64 {
        let tf = self.spec.apply_values(f);
        ext::div(self.target.eval(&tf), self.source.eval(f))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StrategyRecord {
    pub name: String,
    pub best: f64,
    pub evaluations: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct OracleResult {
    pub best_ratio: f64,
    #[serde(skip)]
    pub argmax: MonotoneFunction,
    pub strategy_log: Vec<StrategyRecord>,
    pub seed: u64,
    pub budget: usize,
    pub evaluations: usize,
    /// Whether coordinate ascent stopped because no move improved by more than `1e-6`.
    pub converged: bool,
    pub grid: GridInfo,
    /// Source and target exponents of the reduced inequality.
    pub p: f64,
    pub q: f64,
    /// `α` when the ratio bounds `C^α` of a maximal-operator inequality.
    pub alpha: Option<f64>,
}

/// Lower bound for the best `c` in `‖T f‖_{q,w} ≤ c ‖f‖_{p,v}` on the cone;
/// `p` or `q` may be `∞`.
pub fn oracle_t_norm(spec: &SupOpSpec, v: &WeightSpec, w: &WeightSpec, p: f64, q: f64, budget: usize, seed: u64) -> Result<OracleResult> {
    same_grid(spec, v, w)?;
    let prob = RatioProblem { spec, source: Norm::weighted(p, v)?, target: Norm::weighted(q, w)? };
    let mut out = oracle(&prob, budget, seed)?;
    out.p = p;
    out.q = q;
    Ok(out)
}

/// Lower bound for `C^α` in the reduced inequalities of `M_{φ,Λ^α(b)}`, with `spec`
/// the operator `T_{B/φ^α,b}` from [`crate::hardy::reduce_maximal_to_t`]:
/// * strong: `‖T ψ‖_{q/α,w} ≤ C^α ‖ψ‖_{p/α,v}`;
/// * weak: `‖T ψ‖_{∞,W^{α/q}} ≤ C^α ‖ψ‖_{p/α,v}`;
/// * weak-weak: `‖T ψ‖_{∞,W^{α/q}} ≤ C^α ‖ψ‖_{∞,V^{α/p}}`.
#[allow(clippy::too_many_arguments)]
pub fn oracle_weak_norms(
    spec: &SupOpSpec,
    v: &WeightSpec,
    w: &WeightSpec,
    p: f64,
    q: f64,
    alpha: f64,
    target: Target,
    budget: usize,
    seed: u64,
) -> Result<OracleResult> {
    same_grid(spec, v, w)?;
    for (name, x) in [("p", p), ("q", q), ("alpha", alpha)] {
        if !(x > 0.0) || !x.is_finite() {
            return param(format!("{name} must be positive and finite, got {x}"));
        }
    }
    let primitive_pow = |c: &WeightSpec, e: f64| -> Vec<f64> {
        CumulativeWeight::truncating(c).at_mids().iter().map(|&x| x.powf(e)).collect()
    };
    let weak_target = || Norm::Sup { weight: primitive_pow(w, alpha / q) };
    let (source, tgt) = match target {
        Target::Strong => (Norm::weighted(p / alpha, v)?, Norm::weighted(q / alpha, w)?),
        Target::Weak => (Norm::weighted(p / alpha, v)?, weak_target()),
        Target::WeakWeak => (Norm::Sup { weight: primitive_pow(v, alpha / p) }, weak_target()),
    };
    let prob = RatioProblem { spec, source, target: tgt };
    let mut out = oracle(&prob, budget, seed)?;
    out.p = p;
    out.q = q;
    out.alpha = Some(alpha);
    Ok(out)
}

fn same_grid(spec: &SupOpSpec, v: &WeightSpec, w: &WeightSpec) -> Result<()> {
    if spec.grid().same_as(v.grid()) && spec.grid().same_as(w.grid()) {
        Ok(())
    } else {
        Err(LabError::Configuration("operator and weights live on different grids".into()))
    }
}

/// Values of `Σ c_i χ_{(0, e_{j_i+1}]}` on `n` cells.
pub fn staircase(n: usize, terms: &[(usize, f64)]) -> Vec<f64> {
    let mut f = vec![0.0; n];
    for &(j, c) in terms {
        f[j] += c;
    }
    for k in (0..n.saturating_sub(1)).rev() {
        f[k] += f[k + 1];
    }
    f
}

/// All strategies on an arbitrary ratio problem.
pub fn oracle(prob: &RatioProblem, budget: usize, seed: u64) -> Result<OracleResult> {
    if budget == 0 {
        return param("oracle budget must be at least 1");
    }
    let grid = prob.spec.grid().clone();
    let n = grid.n();
    if prob.source.len() != n || prob.target.len() != n {
        return Err(LabError::Configuration("norm weights do not match the grid".into()));
    }
    let mut log = Vec::new();
    // (ratio, terms) of every staircase-shaped candidate
    let mut pool: Vec<(f64, Vec<(usize, f64)>)> = Vec::new();

    let ind = par_map(n, |j| prob.ratio(&staircase(n, &[(j, 1.0)])));
    let (j_best, r_ind) = argmax(&ind);
    log.push(StrategyRecord { name: "indicators".into(), best: r_ind, evaluations: n });
    pool.extend(ind.iter().enumerate().map(|(j, &r)| (r, vec![(j, 1.0)])));

    let ln_min = grid.t_min().ln();
    let ln_span = (grid.t_max() / grid.t_min()).ln();
    let edges = grid.edges().to_vec();
    let draw_index = move |rng: &mut ChaCha8Rng| -> usize {
        let t = (ln_min + ln_span * rng.random::<f64>()).exp();
        // the left indicator whose jump edge is nearest in log scale
        let i = edges.partition_point(|&e| e < t).clamp(1, n);
        if i < n && (edges[i + 1] / t) < (t / edges[i]) {
            i
        } else {
            i - 1
        }
    };
    let rand = par_map(budget, |i| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(i as u64 + 1);
        let terms: Vec<(usize, f64)> =
            (0..STAIRCASE_STEPS).map(|_| (draw_index(&mut rng), rng.random_range(-4.0..4.0f64).exp())).collect();
        (prob.ratio(&staircase(n, &terms)), terms)
    });
    let r_rand = rand.iter().map(|c| c.0).fold(0.0, f64::max);
    log.push(StrategyRecord { name: "random-staircases".into(), best: r_rand, evaluations: budget });
    pool.extend(rand);

    // power-law profiles t^{-β} cut at s: near-extremals for Hardy-type ratios
    let mids = grid.mids();
    let betas: Vec<f64> = (1..=30).map(|i| 0.05 * i as f64).collect();
    let cuts: Vec<usize> = (1..=16).map(|i| (i * n / 16).max(1) - 1).collect();
    let power = par_map(betas.len() * cuts.len(), |i| {
        let (beta, cut) = (betas[i / cuts.len()], cuts[i % cuts.len()]);
        let f: Vec<f64> = (0..n).map(|k| if k <= cut { mids[k].powf(-beta) } else { 0.0 }).collect();
        (prob.ratio(&f), f)
    });
    let (i_pow, r_pow) = argmax(&power.iter().map(|c| c.0).collect::<Vec<_>>());
    log.push(StrategyRecord { name: "power-profiles".into(), best: r_pow, evaluations: power.len() });

    // coordinate ascent from the best staircases
    pool.sort_by(|a, b| b.0.total_cmp(&a.0));
    pool.dedup_by(|a, b| a.1 == b.1);
    let starts: Vec<Vec<(usize, f64)>> = pool.iter().take(ASCENT_STARTS).map(|c| c.1.clone()).collect();
    let runs = par_map(starts.len(), |i| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(u64::MAX - i as u64);
        let gens: Vec<usize> = (0..ASCENT_GENERATORS).map(|_| draw_index(&mut rng)).collect();
        ascend(prob, n, &starts[i], &gens)
    });
    let asc_evals: usize = runs.iter().map(|r| r.evaluations).sum();
    let converged = runs.iter().all(|r| r.converged);
    let best_run = runs.into_iter().max_by(|a, b| a.ratio.total_cmp(&b.ratio));
    let r_asc = best_run.as_ref().map_or(0.0, |r| r.ratio);
    log.push(StrategyRecord { name: "coordinate-ascent".into(), best: r_asc, evaluations: asc_evals });

    let mut best = (r_ind, staircase(n, &[(j_best, 1.0)]));
    if r_rand > best.0 {
        let c = &pool.iter().find(|c| c.0 == r_rand).expect("pool holds every staircase").1;
        best = (r_rand, staircase(n, c));
    }
    if r_pow > best.0 {
        best = (r_pow, power[i_pow].1.clone());
    }
    if let Some(run) = best_run {
        if run.ratio > best.0 {
            best = (run.ratio, staircase(n, &run.terms));
        }
    }
    let evaluations = log.iter().map(|s| s.evaluations).sum();
    Ok(OracleResult {
        best_ratio: best.0,
        argmax: MonotoneFunction::from_parts_unchecked(grid.clone(), best.1),
        strategy_log: log,
        seed,
        budget,
        evaluations,
        converged,
        grid: grid.info(),
        p: f64::NAN,
        q: f64::NAN,
        alpha: None,
    })
}

struct AscentRun {
    ratio: f64,
    terms: Vec<(usize, f64)>,
    evaluations: usize,
    converged: bool,
}

/// Gauss–Seidel ascent on the coefficients of a fixed dictionary of left
/// indicators. Moves: `c(1 ± h)`, `c → 0`, `c + h·c̄` with `c̄` the mean active
/// coefficient. `h` halves after a sweep without accepted moves.
fn ascend(prob: &RatioProblem, n: usize, start: &[(usize, f64)], gens: &[usize]) -> AscentRun {
    let mut dict: Vec<usize> = start.iter().map(|t| t.0).chain(gens.iter().copied()).collect();
    dict.sort_unstable();
    dict.dedup();
    let mut coef = vec![0.0; dict.len()];
    for &(j, c) in start {
        let i = dict.binary_search(&j).expect("start index is in the dictionary");
        coef[i] += c;
    }
    let terms = |coef: &[f64]| -> Vec<(usize, f64)> { dict.iter().copied().zip(coef.iter().copied()).filter(|t| t.1 > 0.0).collect() };
    let mut cur = prob.ratio(&staircase(n, &terms(&coef)));
    let mut evaluations = 1;
    let mut h = 0.5;
    let mut converged = false;
    for _ in 0..ASCENT_MAX_SWEEPS {
        let mut moved = false;
        for i in 0..coef.len() {
            let active: Vec<f64> = coef.iter().copied().filter(|&c| c > 0.0).collect();
            let mean = active.iter().sum::<f64>() / active.len().max(1) as f64;
            let c0 = coef[i];
            let mut moves = vec![c0 + h * mean];
            if c0 > 0.0 {
                moves.extend([c0 * (1.0 + h), c0 * (1.0 - h)]);
                if active.len() > 1 {
                    moves.push(0.0);
                }
            }
            let mut best = (cur, c0);
            for m in moves {
                coef[i] = m;
                let r = prob.ratio(&staircase(n, &terms(&coef)));
                evaluations += 1;
                if r > best.0 {
                    best = (r, m);
                }
            }
            if best.0 > cur * (1.0 + ASCENT_TOL) {
                coef[i] = best.1;
                cur = best.0;
                moved = true;
            } else {
                coef[i] = c0;
            }
        }
        if !moved {
            if h <= ASCENT_MIN_STEP {
                converged = true;
                break;
            }
            h /= 2.0;
        }
    }
    AscentRun { ratio: cur, terms: terms(&coef), evaluations, converged }
}

fn argmax(x: &[f64]) -> (usize, f64) {
    x.iter().enumerate().fold((0, 0.0), |acc, (i, &v)| if v > acc.1 { (i, v) } else { acc })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Consistent,
    /// Formula and oracle both unbounded.
    ConsistentUnbounded,
    Inconsistent,
    Inconclusive,
}

impl Verdict {
    pub fn is_consistent(self) -> bool {
        matches!(self, Verdict::Consistent | Verdict::ConsistentUnbounded)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RefinementLevel {
    pub n: usize,
    pub total: f64,
    pub finite: bool,
    /// Oracle lower bound on the scale of `total` (root `1/α` taken for maximal problems).
    pub oracle: f64,
    pub rho: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct EquivalenceReport {
    pub rho: f64,
    pub verdict: Verdict,
    pub report_finite: bool,
    pub oracle_finite: bool,
    pub finiteness_agrees: bool,
    /// Relative change of `ρ` between consecutive levels.
    pub trend: Vec<f64>,
    pub levels: Vec<RefinementLevel>,
}

/// Window for `ρ` in which a finite formula and a finite oracle agree.
pub const RHO_WINDOW: (f64, f64) = (1.0 / 100.0, 100.0);
/// Relative drift of `ρ` under refinement tolerated as stable.
pub const STABLE_DRIFT: f64 = 0.2;

/// Compares formula and oracle across refinement levels (`N`, `2N`, `4N`, … on the
/// same domain, or growing domains). Level 0 fixes `ρ`.
///
/// * finite formula, stable `ρ` inside [`RHO_WINDOW`]: consistent;
/// * infinite formula and an oracle beyond `cap/100` or growing at least 2× per level: both unbounded;
/// * finite formula with a diverging oracle (beyond `cap`, growing 2× per level or `ρ` above the window), or
///   infinite formula with a stable small oracle: inconsistent;
/// * otherwise inconclusive.
pub fn verify_equivalence(levels: &[(ConstantReport, OracleResult)]) -> Result<EquivalenceReport> {
    let Some((r0, _)) = levels.first() else {
        return param("verify_equivalence needs at least one level");
    };
    let pv = &r0.provenance;
    let mut out = Vec::with_capacity(levels.len());
    for (rep, orc) in levels {
        let rp = &rep.provenance;
        let same_params = rp.p == pv.p && rp.q == pv.q && rp.alpha == pv.alpha && rp.cap == pv.cap && rep.regime == r0.regime;
        let same_data = orc.grid == rp.grid && orc.p == rp.p && orc.q == rp.q && orc.alpha == rp.alpha;
        if !same_params || !same_data {
            return param(format!("mismatched provenance at N = {}", rp.grid.n));
        }
        let oracle = match rp.alpha {
            Some(a) => ext::pow(orc.best_ratio, 1.0 / a),
            None => orc.best_ratio,
        };
        out.push(RefinementLevel { n: rp.grid.n, total: rep.total, finite: rep.finite, oracle, rho: ext::div(oracle, rep.total) });
    }
    let trend: Vec<f64> = out.windows(2).map(|w| (w[1].rho - w[0].rho).abs() / w[0].rho.max(f64::MIN_POSITIVE)).collect();
    let growth: Vec<f64> = out.windows(2).map(|w| ext::div(w[1].oracle, w[0].oracle)).collect();
    let growing = !growth.is_empty() && growth.iter().all(|&g| g >= 2.0);
    let cap = pv.cap;
    let last = out.last().expect("nonempty");
    let report_finite = out.iter().all(|l| l.finite);
    // a finite formula may sit anywhere below the cap, and the oracle up to ρ above it
    let oracle_limit = if report_finite { cap } else { cap / 100.0 };
    let oracle_finite = !growing && last.oracle < oracle_limit;
    let rho = out[0].rho;
    let stable = trend.iter().all(|&d| d < STABLE_DRIFT);
    let in_window = out.iter().all(|l| l.rho >= RHO_WINDOW.0 && l.rho <= RHO_WINDOW.1);
    let verdict = if report_finite {
        if !oracle_finite || out.iter().any(|l| l.rho > RHO_WINDOW.1) {
            Verdict::Inconsistent
        } else if stable && in_window {
            Verdict::Consistent
        } else {
            Verdict::Inconclusive
        }
    } else if !oracle_finite {
        Verdict::ConsistentUnbounded
    } else if stable && last.oracle < cap / 1e4 {
        Verdict::Inconsistent
    } else {
        Verdict::Inconclusive
    };
    Ok(EquivalenceReport { rho, verdict, report_finite, oracle_finite, finiteness_agrees: report_finite == oracle_finite, trend, levels: out })
}
