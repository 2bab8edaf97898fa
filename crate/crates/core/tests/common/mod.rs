//! Quadratic-time references that follow the definitions literally, plus
//! random problem generators shared by the integration tests.

#![allow(dead_code)]

use std::sync::Arc;

use lorentz_lab::ext::{div, mul, pow};
use lorentz_lab::{CumulativeWeight, Grid, GridFunction, HeadPolicy, PowerLog, SupOpSpec, WeightSpec};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn rel(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / a.abs().max(b.abs())
    }
}

pub fn max_ge(x: &[f64], k: usize) -> f64 {
    x[k..].iter().fold(f64::NEG_INFINITY, |m, &v| m.max(v))
}

pub fn max_le(x: &[f64], k: usize) -> f64 {
    x[..=k].iter().fold(f64::NEG_INFINITY, |m, &v| m.max(v))
}

fn sum_gt(x: &[f64], k: usize) -> f64 {
    x[k + 1..].iter().sum()
}

/// `head + Σ_{j ≤ k} mass_j`, summed afresh for every `k`.
fn cum_edge(head: f64, mass: &[f64]) -> Vec<f64> {
    (0..mass.len()).map(|k| mass[..=k].iter().fold(head, |a, &m| a + m)).collect()
}

fn cum_mid(head: f64, mass: &[f64], half: &[f64]) -> Vec<f64> {
    (0..mass.len()).map(|k| mass[..k].iter().fold(head, |a, &m| a + m) + half[k]).collect()
}

/// Everything a constant needs, rebuilt from raw cell masses.
pub struct Naive {
    pub n: usize,
    pub kernel: Vec<f64>,
    pub b_head: f64,
    pub b_mass: Vec<f64>,
    pub b_half: Vec<f64>,
    pub b_mid: Vec<f64>,
    pub b_edge: Vec<f64>,
    pub v_head: f64,
    pub v_mass: Vec<f64>,
    pub v_vals: Vec<f64>,
    pub v_mid: Vec<f64>,
    pub v_edge: Vec<f64>,
    pub w_head: f64,
    pub w_mass: Vec<f64>,
    pub w_vals: Vec<f64>,
    pub w_edge: Vec<f64>,
}

impl Naive {
    pub fn new(spec: &SupOpSpec, v: &WeightSpec, w: &WeightSpec) -> Self {
        let b = spec.b();
        let bw = b.base();
        let vh = CumulativeWeight::truncating(v).head();
        let wh = CumulativeWeight::truncating(w).head();
        Naive {
            n: bw.masses().len(),
            kernel: spec.kernel().to_vec(),
            b_head: b.head(),
            b_mass: bw.masses().to_vec(),
            b_half: bw.half_masses().to_vec(),
            b_mid: cum_mid(b.head(), bw.masses(), bw.half_masses()),
            b_edge: cum_edge(b.head(), bw.masses()),
            v_head: vh,
            v_mass: v.masses().to_vec(),
            v_vals: v.values().to_vec(),
            v_mid: cum_mid(vh, v.masses(), v.half_masses()),
            v_edge: cum_edge(vh, v.masses()),
            w_head: wh,
            w_mass: w.masses().to_vec(),
            w_vals: w.values().to_vec(),
            w_edge: cum_edge(wh, w.masses()),
        }
    }

    /// `T g` at the midpoints: `max_{j ≥ k} (u/B)_j ∫_0^{m_j} g b`.
    pub fn apply_t(&self, g: &[f64]) -> Vec<f64> {
        let mass: Vec<f64> = (0..self.n)
            .map(|j| {
                let mut acc = mul(g[0], self.b_head);
                for i in 0..j {
                    acc += mul(g[i], self.b_mass[i]);
                }
                acc + mul(g[j], self.b_half[j])
            })
            .collect();
        let m: Vec<f64> = (0..self.n).map(|j| mul(self.kernel[j], mass[j])).collect();
        (0..self.n).map(|k| max_ge(&m, k)).collect()
    }

    fn s(&self) -> Vec<f64> {
        (0..self.n).map(|k| max_ge(&self.kernel, k)).collect()
    }

    fn z(&self) -> Vec<f64> {
        let r: Vec<f64> = (0..self.n).map(|j| mul(self.kernel[j], self.b_mid[j]) / (self.v_mid[j] * self.v_mid[j])).collect();
        (0..self.n).map(|k| max_ge(&r, k)).collect()
    }

    fn y(&self, p: f64) -> Vec<f64> {
        let r: Vec<f64> = (0..self.n).map(|j| pow(mul(self.kernel[j], self.b_mid[j]), p) / (self.v_mid[j] * self.v_mid[j])).collect();
        (0..self.n).map(|k| max_ge(&r, k)).collect()
    }

    fn w_tail(&self, g: &[f64], k: usize) -> f64 {
        let gw: Vec<f64> = (0..self.n).map(|j| mul(g[j], self.w_mass[j])).collect();
        sum_gt(&gw, k)
    }

    fn bracket(&self, g: &[f64]) -> Vec<f64> {
        (0..self.n).map(|k| mul(g[k], self.w_edge[k]) + self.w_tail(g, k)).collect()
    }

    fn bv_integral(&self, e: f64) -> Vec<f64> {
        let head = mul(pow(div(self.b_head, self.v_head), e), self.v_head);
        (0..self.n)
            .map(|k| (0..=k).fold(head, |a, j| a + mul(pow(self.b_mid[j] / self.v_mid[j], e), self.v_mass[j])))
            .collect()
    }

    fn v_power_integral(&self, e: f64) -> Vec<f64> {
        self.v_edge.iter().map(|&v| v.powf(e + 1.0) / (e + 1.0)).collect()
    }

    fn outer(&self, h: &[f64]) -> f64 {
        (0..self.n).map(|k| mul(h[k], self.w_mass[k])).sum::<f64>() + mul(h[0], self.w_head)
    }

    fn bv_sup(&self, e: f64) -> Vec<f64> {
        let r: Vec<f64> = (0..self.n).map(|j| self.b_mid[j] / pow(self.v_mid[j], e)).collect();
        (0..self.n).map(|k| max_le(&r, k)).collect()
    }

    fn sup_product(a: &[f64], ea: f64, b: &[f64], eb: f64) -> f64 {
        a.iter().zip(b).map(|(&a, &b)| mul(pow(a, ea), pow(b, eb))).fold(0.0, f64::max)
    }

    fn tail_form(&self, g: &[f64], q: f64, f: &[f64], ef: f64, r: f64, p: f64) -> f64 {
        let gq: Vec<f64> = g.iter().map(|&x| pow(x, q)).collect();
        let h: Vec<f64> = (0..self.n).map(|k| mul(mul(pow(self.w_tail(&gq, k), r / p), gq[k]), pow(f[k], ef))).collect();
        pow(self.outer(&h), 1.0 / r)
    }

    fn double_sup_form(&self, g: &[f64], f: &[f64], ef: f64, r: f64, p: f64) -> f64 {
        let inner: Vec<f64> = (0..self.n).map(|j| mul(g[j], pow(f[j], ef))).collect();
        let h: Vec<f64> = (0..self.n).map(|k| mul(pow(self.w_edge[k], r / p), pow(max_ge(&inner, k), r))).collect();
        pow(self.outer(&h), 1.0 / r)
    }

    /// Strong-target parts, named as in the report.
    pub fn strong(&self, p: f64, q: f64) -> Vec<(&'static str, f64)> {
        let s = self.s();
        let powv = |x: &[f64], e: f64| -> Vec<f64> { x.iter().map(|&a| pow(a, e)).collect() };
        if p > 1.0 && p <= q {
            let pp = p / (p - 1.0);
            vec![
                ("A1", Self::sup_product(&self.bracket(&powv(&s, q)), 1.0 / q, &self.bv_integral(pp), 1.0 / pp)),
                ("A2", Self::sup_product(&self.bracket(&powv(&self.z(), q)), 1.0 / q, &self.v_power_integral(pp), 1.0 / pp)),
            ]
        } else if p == 1.0 && q >= 1.0 {
            vec![
                ("B1", Self::sup_product(&self.bracket(&powv(&s, q)), 1.0 / q, &self.bv_sup(1.0), 1.0)),
                ("B2", Self::sup_product(&self.bracket(&powv(&self.z(), q)), 1.0 / q, &self.v_edge, 1.0)),
            ]
        } else if p > 1.0 {
            let pp = p / (p - 1.0);
            let r = 1.0 / (1.0 / q - 1.0 / p);
            let (iv, jv, z) = (self.bv_integral(pp), self.v_power_integral(pp), self.z());
            vec![
                ("C1", self.tail_form(&s, q, &iv, r / pp, r, p)),
                ("C2", self.double_sup_form(&s, &iv, 1.0 / pp, r, p)),
                ("C3", self.tail_form(&z, q, &jv, r / pp, r, p)),
                ("C4", self.double_sup_form(&z, &jv, 1.0 / pp, r, p)),
            ]
        } else if p == 1.0 {
            let r = 1.0 / (1.0 / q - 1.0);
            let (bv, z) = (self.bv_sup(1.0), self.z());
            vec![
                ("D1", self.tail_form(&s, q, &bv, r, r, p)),
                ("D2", self.double_sup_form(&s, &bv, 1.0, r, p)),
                ("D3", self.tail_form(&z, q, &self.v_edge, r, r, p)),
                ("D4", self.double_sup_form(&z, &self.v_edge, 1.0, r, p)),
            ]
        } else if p <= q {
            let y = self.y(p);
            vec![
                ("E1", Self::sup_product(&self.bracket(&powv(&s, q)), 1.0 / q, &self.bv_sup(1.0 / p), 1.0)),
                ("E2", Self::sup_product(&self.bracket(&powv(&y, q / p)), 1.0 / q, &self.v_edge, 1.0 / p)),
            ]
        } else {
            let r = 1.0 / (1.0 / q - 1.0 / p);
            let bpv_raw: Vec<f64> = (0..self.n).map(|j| self.b_mid[j].powf(p) / self.v_mid[j]).collect();
            let bpv: Vec<f64> = (0..self.n).map(|k| max_le(&bpv_raw, k)).collect();
            let y = self.y(p);
            let sq = powv(&s, q);
            let yq = powv(&y, q / p);
            let in1: Vec<f64> = (0..self.n).map(|j| mul(pow(s[j], p), bpv[j])).collect();
            let in3: Vec<f64> = (0..self.n).map(|j| mul(y[j], self.v_edge[j])).collect();
            let e = r / p;
            let h1: Vec<f64> = (0..self.n).map(|k| mul(pow(self.w_edge[k], e), pow(max_ge(&in1, k), e))).collect();
            let h2: Vec<f64> = (0..self.n).map(|k| mul(mul(pow(self.w_tail(&sq, k), e), pow(bpv[k], e)), sq[k])).collect();
            let h3: Vec<f64> = (0..self.n).map(|k| mul(pow(self.w_edge[k], e), pow(max_ge(&in3, k), e))).collect();
            let h4: Vec<f64> = (0..self.n).map(|k| mul(mul(pow(self.w_tail(&yq, k), e), yq[k]), pow(self.v_edge[k], e))).collect();
            vec![
                ("F1", pow(self.outer(&h1), 1.0 / r)),
                ("F2", pow(self.outer(&h2), 1.0 / r)),
                ("F3", pow(self.outer(&h3), 1.0 / r)),
                ("F4", pow(self.outer(&h4), 1.0 / r)),
            ]
        }
    }

    fn w_run(&self) -> Vec<f64> {
        (0..self.n).map(|k| max_le(&self.w_vals, k)).collect()
    }

    /// Weak-target parts.
    pub fn weak(&self, p: f64) -> Vec<(&'static str, f64)> {
        let wr = self.w_run();
        let c: Vec<f64> = (0..self.n).map(|j| mul(wr[j], self.kernel[j])).collect();
        let sig: Vec<f64> = (0..self.n).map(|k| max_ge(&c, k)).collect();
        if p > 1.0 {
            let pp = p / (p - 1.0);
            let c2: Vec<f64> = (0..self.n).map(|j| mul(mul(wr[j], self.kernel[j]), self.b_mid[j]) / (self.v_mid[j] * self.v_mid[j])).collect();
            let s2: Vec<f64> = (0..self.n).map(|k| max_ge(&c2, k)).collect();
            vec![
                ("G1", Self::sup_product(&sig, 1.0, &self.bv_integral(pp), 1.0 / pp)),
                ("G2", Self::sup_product(&s2, 1.0, &self.v_power_integral(pp), 1.0 / pp)),
            ]
        } else {
            let bs: Vec<f64> = (0..self.n).map(|j| mul(self.b_mid[j], sig[j])).collect();
            let bs: Vec<f64> = (0..self.n).map(|k| max_le(&bs, k)).collect();
            let h2 = (0..self.n).map(|k| mul(sig[k], self.b_edge[k] / pow(self.v_edge[k], 1.0 / p))).fold(0.0, f64::max);
            vec![("H1", Self::sup_product(&bs, 1.0, &self.v_edge, -1.0 / p)), ("H2", h2)]
        }
    }

    /// The weak-weak constant.
    pub fn i_value(&self) -> f64 {
        let vr: Vec<f64> = (0..self.n).map(|k| max_le(&self.v_vals, k)).collect();
        let wr = self.w_run();
        (0..self.n)
            .map(|k| {
                let acc = (0..=k).fold(self.b_head / vr[0], |a, j| a + self.b_mass[j] / vr[j]);
                mul(mul(acc, wr[k]), self.kernel[k])
            })
            .fold(0.0, f64::max)
    }
}

/// A random problem on a random log grid.
pub struct Case {
    pub grid: Arc<Grid>,
    pub spec: SupOpSpec,
    pub v: WeightSpec,
    pub w: WeightSpec,
}

/// Power-log descriptor or log-normal samples, with or without a head.
pub fn random_weight(r: &mut ChaCha8Rng, g: &Arc<Grid>) -> WeightSpec {
    match r.random_range(0..3) {
        0 => {
            let d = PowerLog::power(r.random_range(-0.9..1.5)).with_log(r.random_range(-1.0..1.0), r.random_range(-1.0..1.0));
            WeightSpec::from_descriptor(g.clone(), d.scaled(r.random_range(0.2..5.0))).unwrap()
        }
        k => {
            let vals: Vec<f64> = (0..g.n()).map(|_| r.random_range(-2.0f64..2.0).exp()).collect();
            let s = GridFunction::new(g.clone(), vals).unwrap();
            if k == 1 {
                WeightSpec::from_samples(s).unwrap()
            } else {
                WeightSpec::from_samples_with_head(s, r.random_range(0.01..1.0) * g.t_min()).unwrap()
            }
        }
    }
}

pub fn random_grid(r: &mut ChaCha8Rng, n: usize) -> Arc<Grid> {
    Grid::log_uniform(10f64.powf(r.random_range(-4.0..-1.0)), 10f64.powf(r.random_range(1.0..4.0)), n).unwrap()
}

pub fn random_case(r: &mut ChaCha8Rng, n: usize) -> Case {
    let grid = random_grid(r, n);
    let b = random_weight(r, &grid);
    let policy = if CumulativeWeight::new(&b, HeadPolicy::Exact).is_ok() { HeadPolicy::Exact } else { HeadPolicy::Truncate };
    let spec = if r.random_bool(0.5) {
        let u = random_weight(r, &grid);
        SupOpSpec::new(&u, &b, policy).unwrap()
    } else {
        let k = PowerLog::power(r.random_range(-2.0..0.5));
        let ratio = GridFunction::from_fn(grid.clone(), |t| k.eval(t)).unwrap();
        SupOpSpec::from_ratio(&ratio, &b, policy).unwrap()
    };
    let v = random_weight(r, &grid);
    let w = random_weight(r, &grid);
    Case { grid, spec, v, w }
}

/// A random staircase: nonnegative and non-increasing.
pub fn random_monotone(r: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    let mut out = vec![0.0; n];
    let mut acc = 0.0;
    for k in (0..n).rev() {
        if r.random_bool(0.2) {
            acc += r.random_range(-3.0f64..3.0).exp();
        }
        out[k] = acc;
    }
    if out[0] == 0.0 {
        out[0] = 1.0;
    }
    out
}

/// Exponent pairs covering the six strong regimes.
pub const REGIME_PAIRS: [(f64, f64); 6] = [(2.0, 3.0), (1.0, 2.0), (3.0, 2.0), (1.0, 0.5), (0.5, 1.0), (0.5, 0.25)];

/// Dyadic coordinates and values, so sums of measures are exact in `f64`.
pub fn random_step_field(r: &mut ChaCha8Rng) -> lorentz_lab::rearrangement::StepField {
    use lorentz_lab::rearrangement::{Cube, StepField};
    let dim = r.random_range(1..=2usize);
    let breaks = |r: &mut ChaCha8Rng| -> Vec<f64> {
        let mut b: Vec<i64> = (0..r.random_range(2..12)).map(|_| r.random_range(-256..256)).collect();
        b.sort_unstable();
        b.dedup();
        if b.len() < 2 {
            b = vec![-64, 64];
        }
        b.into_iter().map(|k| k as f64 / 64.0).collect()
    };
    let xs = breaks(r);
    let ys = if dim == 2 { breaks(r) } else { vec![0.0, 0.0] };
    let mut cells = Vec::new();
    for i in 0..xs.len() - 1 {
        for j in 0..ys.len() - 1 {
            if r.random_bool(0.7) {
                let v = r.random_range(0..24) as f64 / 8.0;
                cells.push((Cube::rect(xs[i], xs[i + 1], ys[j], ys[j + 1]), v));
            }
        }
    }
    StepField::new(dim, cells).unwrap()
}

/// A random union of pairwise disjoint boxes.
pub fn random_box_union(r: &mut ChaCha8Rng, dim: usize) -> Vec<lorentz_lab::rearrangement::Cube> {
    use lorentz_lab::rearrangement::Cube;
    let cuts = |r: &mut ChaCha8Rng| -> Vec<f64> {
        let mut c: Vec<f64> = (0..r.random_range(2..8)).map(|_| r.random_range(-5.0..5.0)).collect();
        c.sort_by(f64::total_cmp);
        c
    };
    let xs = cuts(r);
    let ys = if dim == 2 { cuts(r) } else { vec![0.0, 0.0] };
    let mut out = Vec::new();
    for i in 0..xs.len() - 1 {
        for j in 0..ys.len() - 1 {
            if r.random_bool(0.5) && xs[i + 1] > xs[i] && (dim == 1 || ys[j + 1] > ys[j]) {
                out.push(Cube::rect(xs[i], xs[i + 1], ys[j], ys[j + 1]));
            }
        }
    }
    out
}
