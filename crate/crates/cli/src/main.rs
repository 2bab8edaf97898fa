mod config;

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{error::ErrorKind, Parser, Subcommand};
use lorentz_lab::hardy::reduce_maximal_to_t;
use lorentz_lab::lorentz::{check_delta2, check_lower_r_estimate, check_qr, qr_structural, quasi_monotone_constant, ConditionValue, Direction};
use lorentz_lab::oracle::{oracle_t_norm, oracle_weak_norms, verify_equivalence, EquivalenceReport, OracleResult, Verdict};
use lorentz_lab::sandbox::{eval_maximal, herz_stein_check, sandwich_check, Field, SandwichReport};
use lorentz_lab::{
    constant_i, constants_maximal, constants_t, constants_t_weak, ConstantReport, CumulativeWeight, Grid, HeadPolicy, LabError,
    MaximalProblem, Result, SupOpSpec, Target, WeightSpec,
};
use serde::Serialize;

use config::{weight_or_one, BuiltField, Config, KernelConfig, Operator, Problem};

const EXIT_VALIDATION: u8 = 2;
const EXIT_INCONSISTENT: u8 = 3;
const EXIT_USAGE: u8 = 64;
const CAP_ENV: &str = "LORENTZ_LAB_CAP";

#[derive(Parser)]
#[command(name = "lorentz-lab", version, about = "Weight constants, oracles and maximal-operator sandboxes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// JSON run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Directory for report files.
    #[arg(long, global = true, default_value = ".")]
    out: PathBuf,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Overrides the config seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Characterization constants, one CSV row per (case, part).
    Constants,
    /// Brute-force lower bounds for the best constants.
    Oracle,
    /// Formula against oracle across grid refinements.
    Verify,
    /// Rearranged maximal function against its reduction.
    Sandwich,
    /// The maximal function at sample points.
    Maximal,
    /// Doubling, quasi-monotonicity, Q_r and lower-estimate checks.
    CheckConditions,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion | ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand => 0,
                _ => EXIT_USAGE,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_VALIDATION)
        }
    }
}

struct Ctx {
    cfg: Config,
    base: PathBuf,
    out: PathBuf,
    seed: u64,
    cap: f64,
}

fn run(cli: &Cli) -> Result<u8> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| LabError::Configuration(format!("thread pool: {e}")))?;
    }
    let path = cli.config.as_ref().ok_or_else(|| LabError::Configuration("--config <path> is required".into()))?;
    let (cfg, base) = Config::load(path)?;
    let cap = match std::env::var(CAP_ENV) {
        Ok(s) => s.trim().parse::<f64>().ok().filter(|c| *c > 0.0).ok_or_else(|| LabError::Configuration(format!("{CAP_ENV} must be a positive number")))?,
        Err(_) => cfg.cap.unwrap_or(lorentz_lab::ext::DEFAULT_CAP),
    };
    std::fs::create_dir_all(&cli.out).map_err(|e| LabError::Configuration(format!("cannot create {}: {e}", cli.out.display())))?;
    let ctx = Ctx { seed: cli.seed.unwrap_or(cfg.seed), cfg, base, out: cli.out.clone(), cap };
    match cli.command {
        Command::Constants => cmd_constants(&ctx),
        Command::Oracle => cmd_oracle(&ctx),
        Command::Verify => cmd_verify(&ctx),
        Command::Sandwich => cmd_sandwich(&ctx),
        Command::Maximal => cmd_maximal(&ctx),
        Command::CheckConditions => cmd_conditions(&ctx),
    }
}

/// Library inputs of one problem on one grid.
struct Inputs {
    spec: SupOpSpec,
    v: WeightSpec,
    w: WeightSpec,
    phi: Option<WeightSpec>,
    b: WeightSpec,
}

fn head_policy(b: &WeightSpec) -> HeadPolicy {
    if CumulativeWeight::new(b, HeadPolicy::Exact).is_ok() {
        HeadPolicy::Exact
    } else {
        HeadPolicy::Truncate
    }
}

fn build(p: &Problem, grid: &Arc<Grid>, base: &Path) -> Result<Inputs> {
    let b = weight_or_one(&p.b, grid, base)?;
    let policy = head_policy(&b);
    let v = weight_or_one(&p.v, grid, base)?;
    let w = weight_or_one(&p.w, grid, base)?;
    let (spec, phi) = match p.operator {
        Operator::T => {
            let spec = match (&p.ratio, &p.u) {
                (Some(r), _) => SupOpSpec::from_ratio(r.build(grid, base)?.samples(), &b, policy)?,
                (None, Some(u)) => SupOpSpec::new(&u.build(grid, base)?, &b, policy)?,
                (None, None) => SupOpSpec::u_equals_b(&b, policy)?,
            };
            let phi = p.phi.as_ref().map(|c| c.build(grid, base)).transpose()?;
            (spec, phi)
        }
        Operator::Maximal => {
            let phi = p.phi.as_ref().ok_or_else(|| LabError::Configuration("maximal problems need `phi`".into()))?.build(grid, base)?;
            (reduce_maximal_to_t(&phi, alpha(p)?, &b, policy)?, Some(phi))
        }
    };
    Ok(Inputs { spec, v, w, phi, b })
}

fn alpha(p: &Problem) -> Result<f64> {
    p.alpha.ok_or_else(|| LabError::Configuration("maximal problems need `alpha`".into()))
}

fn report(p: &Problem, inp: &Inputs, cap: f64) -> Result<ConstantReport> {
    match p.operator {
        Operator::T => match p.target {
            Target::Strong => constants_t(&inp.spec, &inp.v, &inp.w, p.p, p.q, cap),
            Target::Weak => constants_t_weak(&inp.spec, &inp.v, &inp.w, p.p, cap),
            Target::WeakWeak => constant_i(&inp.spec, &inp.v, &inp.w, cap),
        },
        Operator::Maximal => constants_maximal(&MaximalProblem {
            phi: inp.phi.as_ref().expect("built with phi"),
            alpha: alpha(p)?,
            b: &inp.b,
            v: &inp.v,
            w: &inp.w,
            p: p.p,
            q: p.q,
            r_est: p.r,
            target: p.target,
            cap,
        }),
    }
}

fn oracle(p: &Problem, inp: &Inputs, budget: usize, seed: u64) -> Result<OracleResult> {
    match p.operator {
        Operator::T => {
            let (sp, sq) = match p.target {
                Target::Strong => (p.p, p.q),
                Target::Weak => (p.p, f64::INFINITY),
                Target::WeakWeak => (f64::INFINITY, f64::INFINITY),
            };
            oracle_t_norm(&inp.spec, &inp.v, &inp.w, sp, sq, budget, seed)
        }
        Operator::Maximal => oracle_weak_norms(&inp.spec, &inp.v, &inp.w, p.p, p.q, alpha(p)?, p.target, budget, seed),
    }
}

fn regime_label(p: &Problem, r: &ConstantReport) -> String {
    match &p.label {
        Some(l) => format!("{l}:{}", r.regime),
        None => r.regime.to_string(),
    }
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    std::fs::write(path, bytes).map_err(|e| LabError::Configuration(format!("cannot write {}: {e}", path.display())))
}

fn write_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> Result<()> {
    let mut s = serde_json::to_string_pretty(value).map_err(|e| LabError::Configuration(e.to_string()))?;
    s.push('\n');
    write_file(path, s.as_bytes())
}

fn write_csv(path: &Path, header: &[&str], rows: &[Vec<String>]) -> Result<()> {
    let mut wr = csv::Writer::from_writer(Vec::new());
    let err = |e: csv::Error| LabError::Configuration(e.to_string());
    wr.write_record(header).map_err(err)?;
    for r in rows {
        wr.write_record(r).map_err(err)?;
    }
    let bytes = wr.into_inner().map_err(|e| LabError::Configuration(e.to_string()))?;
    write_file(path, &bytes)
}

#[derive(Serialize)]
struct Labeled<'a, T> {
    label: Option<&'a str>,
    seed: u64,
    #[serde(flatten)]
    inner: T,
}

fn cmd_constants(ctx: &Ctx) -> Result<u8> {
    let grid = ctx.cfg.grid(1)?;
    let mut rows = Vec::new();
    let mut reports = Vec::new();
    for p in ctx.cfg.problems()? {
        let inp = build(&p, &grid, &ctx.base)?;
        let r = report(&p, &inp, ctx.cap)?;
        let g = r.provenance.grid;
        for part in &r.parts {
            rows.push(vec![
                regime_label(&p, &r),
                part.name.clone(),
                part.value.to_string(),
                part.finite.to_string(),
                g.t_min.to_string(),
                g.t_max.to_string(),
                g.n.to_string(),
                ctx.seed.to_string(),
            ]);
        }
        reports.push((p.label.clone(), r));
    }
    write_csv(&ctx.out.join("constants.csv"), &["regime", "part", "value", "finite", "t_min", "t_max", "N", "seed"], &rows)?;
    let json: Vec<_> = reports.iter().map(|(l, r)| Labeled { label: l.as_deref(), seed: ctx.seed, inner: r }).collect();
    write_json(&ctx.out.join("constants.json"), &json)?;
    println!("constants: {} rows", rows.len());
    Ok(0)
}

fn cmd_oracle(ctx: &Ctx) -> Result<u8> {
    let grid = ctx.cfg.grid(1)?;
    let mut out = Vec::new();
    for p in ctx.cfg.problems()? {
        let inp = build(&p, &grid, &ctx.base)?;
        let o = oracle(&p, &inp, ctx.cfg.budget, ctx.seed)?;
        println!("{}: best ratio {}", p.label.as_deref().unwrap_or("case"), o.best_ratio);
        out.push((p.label.clone(), o));
    }
    let json: Vec<_> = out.iter().map(|(l, o)| Labeled { label: l.as_deref(), seed: ctx.seed, inner: o }).collect();
    write_json(&ctx.out.join("oracle.json"), &json)?;
    Ok(0)
}

fn cmd_verify(ctx: &Ctx) -> Result<u8> {
    let mut out: Vec<(Option<String>, EquivalenceReport)> = Vec::new();
    for p in ctx.cfg.problems()? {
        let mut levels = Vec::new();
        for &m in &ctx.cfg.refinements {
            let grid = ctx.cfg.grid(m)?;
            let inp = build(&p, &grid, &ctx.base)?;
            levels.push((report(&p, &inp, ctx.cap)?, oracle(&p, &inp, ctx.cfg.budget, ctx.seed)?));
        }
        out.push((p.label.clone(), verify_equivalence(&levels)?));
    }
    let json: Vec<_> = out.iter().map(|(l, e)| Labeled { label: l.as_deref(), seed: ctx.seed, inner: e }).collect();
    write_json(&ctx.out.join("verify.json"), &json)?;
    let ok = out.iter().filter(|(_, e)| e.verdict.is_consistent()).count();
    println!("consistent: {ok}/{}", out.len());
    let bad = out.iter().any(|(_, e)| e.verdict == Verdict::Inconsistent);
    Ok(if bad { EXIT_INCONSISTENT } else { 0 })
}

#[derive(Serialize)]
struct SandwichSummary<'a> {
    c_low: Option<f64>,
    c_high: Option<f64>,
    tail_included: bool,
    warnings: &'a [String],
    rows: usize,
}

fn cmd_sandwich(ctx: &Ctx) -> Result<u8> {
    let sb = ctx.cfg.sandbox()?;
    let kernel = sb.kernel.build(sb.field.dim())?;
    let opts = sb.options();
    let rep: SandwichReport = match sb.field.build()? {
        BuiltField::Radial(f) => sandwich_check(&f, &kernel, sb.cube_budget, &opts)?,
        BuiltField::Step(f) => {
            if !matches!(sb.kernel, KernelConfig::Classical) {
                return Err(LabError::Configuration("step fields are compared with f** under the classical kernel only".into()));
            }
            herz_stein_check(&f, sb.cube_budget, &opts)?
        }
    };
    let rows: Vec<Vec<String>> = rep.rows.iter().map(|r| vec![r.t.to_string(), r.lhs.to_string(), r.rhs.to_string(), r.ratio.to_string()]).collect();
    write_csv(&ctx.out.join("sandwich.csv"), &["t", "lhs", "rhs", "ratio"], &rows)?;
    write_json(
        &ctx.out.join("sandwich.json"),
        &SandwichSummary { c_low: rep.c_low, c_high: rep.c_high, tail_included: rep.tail_included, warnings: &rep.warnings, rows: rows.len() },
    )?;
    let show = |x: Option<f64>| x.map_or("none".to_string(), |v| v.to_string());
    println!("c_low: {}, c_high: {}", show(rep.c_low), show(rep.c_high));
    Ok(0)
}

fn cmd_maximal(ctx: &Ctx) -> Result<u8> {
    let sb = ctx.cfg.sandbox()?;
    if sb.points.is_empty() {
        return Err(LabError::Configuration("`sandbox.points` is empty".into()));
    }
    let kernel = sb.kernel.build(sb.field.dim())?;
    let built = sb.field.build()?;
    let field = match &built {
        BuiltField::Radial(f) => Field::Radial(f),
        BuiltField::Step(f) => Field::Step(f),
    };
    let vals = eval_maximal(field, &kernel, sb.cube_budget, &sb.points)?;
    let rows: Vec<Vec<String>> = sb.points.iter().zip(&vals).map(|(x, v)| vec![x[0].to_string(), x[1].to_string(), v.to_string()]).collect();
    write_csv(&ctx.out.join("maximal.csv"), &["x", "y", "value"], &rows)?;
    println!("maximal: {} points", rows.len());
    Ok(0)
}

#[derive(Serialize)]
struct Conditions {
    label: Option<String>,
    b_doubling: ConditionValue,
    phi_quasi_increasing: Option<ConditionValue>,
    phi_qr: Option<ConditionValue>,
    /// `B(t)/t^{α/r}` quasi-increasing.
    b_over_power: Option<ConditionValue>,
    /// Lower `r`-estimate of `Λ^p(w)`.
    lower_r_estimate: Option<bool>,
    lower_r_constant: Option<ConditionValue>,
}

fn cmd_conditions(ctx: &Ctx) -> Result<u8> {
    let grid = ctx.cfg.grid(1)?;
    let mut out = Vec::new();
    for p in ctx.cfg.problems()? {
        let inp = build(&p, &grid, &ctx.base)?;
        let bc = CumulativeWeight::truncating(&inp.b);
        let phi_qi = inp.phi.as_ref().map(|f| ConditionValue::new(quasi_monotone_constant(f.values(), Direction::Increasing), ctx.cap));
        let mut cond = Conditions {
            label: p.label.clone(),
            b_doubling: check_delta2(&bc, ctx.cap),
            phi_quasi_increasing: phi_qi,
            phi_qr: None,
            b_over_power: None,
            lower_r_estimate: None,
            lower_r_constant: None,
        };
        if let Some(r) = p.r {
            if let Some(phi) = &inp.phi {
                cond.phi_qr = Some(match phi.descriptor() {
                    Some(d) => qr_structural(d, r, &grid, ctx.cap),
                    None => ConditionValue::new(check_qr(phi, r, 1024, ctx.seed)?, ctx.cap),
                });
            }
            if let Some(a) = p.alpha {
                let h: Vec<f64> = bc.prefix().iter().zip(&grid.edges()[1..]).map(|(&b, &t)| b / t.powf(a / r)).collect();
                cond.b_over_power = Some(ConditionValue::new(quasi_monotone_constant(&h, Direction::Increasing), ctx.cap));
            }
            let le = check_lower_r_estimate(p.p, &inp.w, r, ctx.cap)?;
            cond.lower_r_estimate = Some(le.verdict);
            cond.lower_r_constant = Some(le.constant);
        }
        out.push(cond);
    }
    write_json(&ctx.out.join("conditions.json"), &out)?;
    println!("check-conditions: {} cases", out.len());
    Ok(0)
}
