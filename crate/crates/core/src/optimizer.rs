//! Exhaustive search over gadget configurations for the CNOT bound.

use std::collections::HashMap;
use std::io::Write;
use std::sync::atomic::{AtomicU64, Ordering};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds::{self, clamp, ln_mx, ln_mz, prep_core, weighted_total, BoundBreakdown, BoundOptions, Rates};
use crate::config::{GadgetConfig, Locality, Variant};
use crate::error::{Error, Result};
use crate::noise::NoiseParams;
use crate::scalar::{log_add, LogProb};
use crate::sim::builder::build_circuit;
use crate::sim::circuit::CircuitKind;

/// Choice of cat lengths `p` for Nonlocal searches.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum PChoice {
    /// `⌈m/R⌉` for every fan-out `R`: the shortest cat giving each fan-out.
    Divisors,
    /// Every `p` in `lo..=hi`, capped at `3m`.
    Range { lo: u32, hi: u32 },
}

/// Grid of configurations; every list is sorted and deduplicated.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchSpace {
    pub n: Vec<u32>,
    pub m: Vec<u32>,
    pub p: PChoice,
    pub r: Vec<u32>,
    pub r_prime: Vec<u32>,
    pub r_plus: Vec<u32>,
    pub locality: Locality,
    pub variant: Variant,
}

fn odd(lo: u32, hi: u32) -> Vec<u32> {
    (lo.max(1)..=hi).filter(|v| v % 2 == 1).collect()
}

fn all(lo: u32, hi: u32) -> Vec<u32> {
    (lo.max(1)..=hi).collect()
}

impl SearchSpace {
    /// Default ranges: n ≤ 21, m ≤ 151, r ≤ 15 (odd), r′, r₊ ≤ 30.
    pub fn new(locality: Locality) -> Self {
        SearchSpace {
            n: odd(1, 21),
            m: odd(1, 151),
            p: PChoice::Divisors,
            r: odd(1, 15),
            r_prime: all(1, 30),
            r_plus: all(1, 30),
            locality,
            variant: Variant::A,
        }
    }

    /// The one-point space containing `cfg`.
    pub fn single(cfg: &GadgetConfig) -> Self {
        SearchSpace {
            n: vec![cfg.n],
            m: vec![cfg.m],
            p: PChoice::Range { lo: cfg.p, hi: cfg.p },
            r: vec![cfg.r],
            r_prime: vec![cfg.r_prime],
            r_plus: vec![cfg.r_plus],
            locality: cfg.locality,
            variant: cfg.variant,
        }
    }

    pub fn with_n(mut self, lo: u32, hi: u32) -> Self {
        self.n = odd(lo, hi);
        self
    }

    pub fn with_m(mut self, lo: u32, hi: u32) -> Self {
        self.m = odd(lo, hi);
        self
    }

    pub fn with_r(mut self, lo: u32, hi: u32) -> Self {
        self.r = odd(lo, hi);
        self
    }

    pub fn with_r_prime(mut self, lo: u32, hi: u32) -> Self {
        self.r_prime = all(lo, hi);
        self
    }

    pub fn with_r_plus(mut self, lo: u32, hi: u32) -> Self {
        self.r_plus = all(lo, hi);
        self
    }

    pub fn with_p(mut self, p: PChoice) -> Self {
        self.p = p;
        self
    }

    pub fn with_variant(mut self, variant: Variant) -> Self {
        self.variant = variant;
        self
    }

    /// Cat lengths searched for block width `m`.
    pub fn p_values(&self, m: u32) -> Vec<u32> {
        if self.locality == Locality::Local {
            return vec![2 * m];
        }
        let mut v: Vec<u32> = match self.p {
            PChoice::Divisors => (1..=m).map(|fan| m.div_ceil(fan)).collect(),
            PChoice::Range { lo, hi } => (lo.max(1)..=hi.min(3 * m)).collect(),
        };
        v.sort_unstable();
        v.dedup();
        v
    }

    pub fn validate(&self) -> Result<()> {
        let lists = [("n", &self.n), ("m", &self.m), ("r", &self.r), ("r_prime", &self.r_prime), ("r_plus", &self.r_plus)];
        for (name, l) in lists {
            if l.is_empty() {
                return Err(Error::InvalidSpace(format!("{name} range is empty")));
            }
            if l.contains(&0) {
                return Err(Error::InvalidSpace(format!("{name} contains 0")));
            }
        }
        for (name, l) in [("n", &self.n), ("m", &self.m), ("r", &self.r)] {
            if l.iter().any(|v| v % 2 == 0) {
                return Err(Error::InvalidSpace(format!("{name} must be odd")));
            }
        }
        if self.m.iter().any(|&m| self.p_values(m).is_empty()) {
            return Err(Error::InvalidSpace("p range is empty for some m".into()));
        }
        Ok(())
    }

    /// Number of grid points.
    pub fn size(&self) -> u64 {
        let inner = (self.n.len() * self.r.len() * self.r_prime.len() * self.r_plus.len()) as u64;
        self.m.iter().map(|&m| self.p_values(m).len() as u64).sum::<u64>() * inner
    }

    /// Every configuration, in search order.
    pub fn configs(&self) -> Vec<GadgetConfig> {
        let mut out = Vec::new();
        for &n in &self.n {
            for &m in &self.m {
                self.for_each_in_shard(n, m, |cfg| out.push(cfg));
            }
        }
        out
    }

    fn cfg(&self, n: u32, m: u32, p: u32, r: u32, rp: u32, rpl: u32) -> GadgetConfig {
        GadgetConfig::new(n, m, p, r, rp, rpl, self.locality).with_variant(self.variant)
    }

    fn for_each_in_shard(&self, n: u32, m: u32, mut f: impl FnMut(GadgetConfig)) {
        let ps = self.p_values(m);
        for &rpl in &self.r_plus {
            for &r in &self.r {
                for &rp in &self.r_prime {
                    for &p in &ps {
                        f(self.cfg(n, m, p, r, rp, rpl));
                    }
                }
            }
        }
    }
}

/// Location counts of one bare CNOT gadget.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResourceCount {
    pub cz_gates: u64,
    pub preps: u64,
    pub measurements: u64,
    pub wait_steps: u64,
    pub physical_qubits: u64,
}

/// Counts locations by building the gadget circuit.
pub fn count_resources(cfg: &GadgetConfig) -> Result<ResourceCount> {
    let c = build_circuit(CircuitKind::Cnot, cfg)?;
    let t = c.tally();
    Ok(ResourceCount {
        cz_gates: t.cz_gates,
        preps: t.preps,
        measurements: t.measurements,
        wait_steps: t.wait_steps,
        physical_qubits: c.num_qubits() as u64,
    })
}

fn checks(len: u64, locality: Locality) -> u64 {
    match (len, locality) {
        (0 | 1, _) => 0,
        (l, Locality::Nonlocal) => l,
        (l, Locality::Local) => l - 1,
    }
}

/// CZ count of the bare CNOT gadget without building it; equals the builder tally.
pub fn cz_count(cfg: &GadgetConfig) -> u64 {
    let (n, m, r, rp, rpl) = (cfg.n as u64, cfg.m as u64, cfg.r as u64, cfg.r_prime as u64, cfg.r_plus as u64);
    let plus = 2 * m * rpl * 2 * checks(n, cfg.locality);
    let meas: u64 = [2u64, 3]
        .iter()
        .map(|&w| {
            let len = cfg.cat_len(w as u32) as u64;
            n * r * (w * m + 2 * rp * checks(len, cfg.locality))
        })
        .sum();
    plus + meas
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Objective {
    MinBound,
    /// Cheapest configuration whose bound does not exceed this probability.
    MinCostForTarget(f64),
}

/// One point of a cost/bound frontier.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FrontierPoint {
    pub cz_gates: u64,
    pub bound: LogProb,
    pub cfg: GadgetConfig,
}

#[derive(Clone, Debug, Serialize)]
pub struct OptResult {
    pub best_cfg: GadgetConfig,
    pub bound: BoundBreakdown,
    pub resources: ResourceCount,
    pub frontier: Option<Vec<FrontierPoint>>,
    /// Grid points visited, including those skipped by pruning.
    pub visited: u64,
    /// Grid points whose full bound was evaluated. Pruning shares the incumbent
    /// across workers, so this count depends on scheduling and is not serialized.
    #[serde(skip)]
    pub evaluated: u64,
}

/// CNOT bound evaluation with the preparation sums cached per (length, rounds).
struct Evaluator {
    z: Rates<f64>,
    opts: BoundOptions,
    locality: Locality,
    cores: HashMap<(u32, u32), (f64, f64)>,
}

impl Evaluator {
    fn new(noise: &NoiseParams, space: &SearchSpace, opts: BoundOptions) -> Self {
        let z = Rates::of(noise);
        let mut keys = Vec::new();
        for &m in &space.m {
            let mut lens = space.p_values(m);
            if space.locality == Locality::Local {
                lens = vec![2 * m, 3 * m];
            }
            for &l in &lens {
                keys.extend(space.r_prime.iter().map(|&rp| (l, rp)));
            }
        }
        for &n in &space.n {
            keys.extend(space.r_plus.iter().map(|&rpl| (n, rpl)));
        }
        keys.sort_unstable();
        keys.dedup();
        let cores = keys
            .par_iter()
            .map(|&(l, rounds)| {
                let c = prep_core(l, rounds, space.locality, &z);
                ((l, rounds), (c.sum, c.misdecode))
            })
            .collect();
        Evaluator { z, opts, locality: space.locality, cores }
    }

    fn core(&self, len: u32, rounds: u32) -> (f64, f64) {
        match self.cores.get(&(len, rounds)) {
            Some(&c) => c,
            None => {
                let c = prep_core(len, rounds, self.locality, &self.z);
                (c.sum, c.misdecode)
            }
        }
    }

    fn plus(&self, n: u32, m: u32, r_plus: u32) -> f64 {
        let (sum, mis) = self.core(n, r_plus);
        let v = if self.opts.plus_misdecode { log_add(sum, mis) } else { sum };
        clamp((m as f64).ln() + v)
    }

    fn cat(&self, cfg: &GadgetConfig, w: u32) -> f64 {
        let (sum, mis) = self.core(cfg.cat_len(w), cfg.r_prime);
        clamp(((cfg.n as u64 * cfg.r as u64) as f64).ln() + log_add(sum, mis))
    }

    /// Lower bound on the total that is nondecreasing in `p` for fixed other parameters.
    fn monotone_floor(&self, cfg: &GadgetConfig, mzz: f64, mzzz: f64) -> f64 {
        let (sum2, _) = self.core(cfg.cat_len(2), cfg.r_prime);
        let cat = ((cfg.n as u64 * cfg.r as u64) as f64).ln() + sum2 + 3f64.ln();
        clamp(mzz.max(mzzz).max(cat))
    }
}

#[derive(Clone, Copy, Debug)]
struct Cand {
    ln: f64,
    cz: u64,
    cfg: GadgetConfig,
}

fn better(obj: Objective, a: &Cand, b: &Cand) -> bool {
    let ka = match obj {
        Objective::MinBound => (a.ln.total_cmp(&b.ln), a.cz.cmp(&b.cz)),
        Objective::MinCostForTarget(_) => (a.cz.cmp(&b.cz), a.ln.total_cmp(&b.ln)),
    };
    match ka {
        (std::cmp::Ordering::Equal, std::cmp::Ordering::Equal) => a.cfg < b.cfg,
        (std::cmp::Ordering::Equal, o) | (o, _) => o == std::cmp::Ordering::Less,
    }
}

fn pick(obj: Objective, a: Option<Cand>, b: Option<Cand>) -> Option<Cand> {
    match (a, b) {
        (Some(x), Some(y)) => Some(if better(obj, &y, &x) { y } else { x }),
        (x, None) => x,
        (None, y) => y,
    }
}

/// Lowers an f64 stored in `cell` to `v` if smaller.
fn lower_f64(cell: &AtomicU64, v: f64) {
    let _ = cell.fetch_update(Ordering::Relaxed, Ordering::Relaxed, |cur| (v < f64::from_bits(cur)).then_some(v.to_bits()));
}

#[derive(Default, Clone, Copy)]
struct Stats {
    visited: u64,
    evaluated: u64,
}

fn search_shard(ev: &Evaluator, space: &SearchSpace, n: u32, m: u32, obj: Objective, inc: &AtomicU64) -> (Option<Cand>, Stats) {
    let ps = space.p_values(m);
    let mut best: Option<Cand> = None;
    let mut st = Stats::default();
    let target = match obj {
        Objective::MinCostForTarget(t) => t.ln(),
        Objective::MinBound => f64::INFINITY,
    };
    let block = (space.r.len() * space.r_prime.len() * ps.len()) as u64;
    for &rpl in &space.r_plus {
        let plus = ev.plus(n, m, rpl);
        if obj == Objective::MinBound && clamp(plus + 4f64.ln()) > f64::from_bits(inc.load(Ordering::Relaxed)) {
            st.visited += block;
            continue;
        }
        for &r in &space.r {
            for &rp in &space.r_prime {
                for (k, &p) in ps.iter().enumerate() {
                    let cfg = space.cfg(n, m, p, r, rp, rpl);
                    let cz = cz_count(&cfg);
                    st.visited += 1;
                    let rest = (ps.len() - k - 1) as u64;
                    if let Objective::MinCostForTarget(_) = obj {
                        if cz > inc.load(Ordering::Relaxed) {
                            st.visited += rest;
                            break;
                        }
                    }
                    let mzz = ln_mz(&cfg, 2, &ev.z);
                    let mzzz = ln_mz(&cfg, 3, &ev.z);
                    if obj == Objective::MinBound && ev.monotone_floor(&cfg, mzz, mzzz) > f64::from_bits(inc.load(Ordering::Relaxed)) {
                        st.visited += rest;
                        break;
                    }
                    st.evaluated += 1;
                    let mx = ln_mx(&cfg, &ev.z);
                    let ln = weighted_total(mzz, mzzz, mx, plus, ev.cat(&cfg, 2), ev.cat(&cfg, 3));
                    if ln > target {
                        continue;
                    }
                    let c = Cand { ln, cz, cfg };
                    if best.as_ref().is_none_or(|b| better(obj, &c, b)) {
                        best = Some(c);
                        match obj {
                            Objective::MinBound => lower_f64(inc, ln),
                            Objective::MinCostForTarget(_) => {
                                inc.fetch_min(cz, Ordering::Relaxed);
                            }
                        }
                    }
                }
            }
        }
    }
    (best, st)
}

pub fn optimize(noise: &NoiseParams, space: &SearchSpace, objective: Objective) -> Result<OptResult> {
    optimize_with(noise, space, objective, BoundOptions::default())
}

pub fn optimize_with(noise: &NoiseParams, space: &SearchSpace, objective: Objective, opts: BoundOptions) -> Result<OptResult> {
    noise.validate()?;
    space.validate()?;
    if let Objective::MinCostForTarget(t) = objective {
        if !(t > 0.0 && t <= 1.0) {
            return Err(Error::InvalidProbability { field: "target", value: t });
        }
    }
    let ev = Evaluator::new(noise, space, opts);
    let inc = AtomicU64::new(match objective {
        Objective::MinBound => f64::INFINITY.to_bits(),
        Objective::MinCostForTarget(_) => u64::MAX,
    });
    let shards: Vec<(u32, u32)> = space.n.iter().flat_map(|&n| space.m.iter().map(move |&m| (n, m))).collect();
    let (best, st) = shards.par_iter().map(|&(n, m)| search_shard(&ev, space, n, m, objective, &inc)).reduce(
        || (None, Stats::default()),
        |(a, sa), (b, sb)| (pick(objective, a, b), Stats { visited: sa.visited + sb.visited, evaluated: sa.evaluated + sb.evaluated }),
    );
    let best = match (best, objective) {
        (Some(b), _) => b,
        (None, Objective::MinCostForTarget(target)) => return Err(Error::NotAchievable { target }),
        (None, Objective::MinBound) => return Err(Error::InvalidSpace("no configuration evaluated".into())),
    };
    Ok(OptResult {
        best_cfg: best.cfg,
        bound: bounds::cnot_bound_with(&best.cfg, noise, opts)?,
        resources: count_resources(&best.cfg)?,
        frontier: None,
        visited: st.visited,
        evaluated: st.evaluated,
    })
}

fn front_of(mut pts: Vec<FrontierPoint>) -> Vec<FrontierPoint> {
    pts.sort_by(|a, b| a.cz_gates.cmp(&b.cz_gates).then(a.bound.0.total_cmp(&b.bound.0)).then(a.cfg.cmp(&b.cfg)));
    let mut out: Vec<FrontierPoint> = Vec::new();
    for p in pts {
        if out.last().is_none_or(|l| p.bound.0 < l.bound.0) {
            out.push(p);
        }
    }
    out
}

/// Grid points not dominated in (cz gates, bound), by increasing cost.
pub fn pareto_front(noise: &NoiseParams, space: &SearchSpace) -> Result<Vec<FrontierPoint>> {
    noise.validate()?;
    space.validate()?;
    let ev = Evaluator::new(noise, space, BoundOptions::default());
    let shards: Vec<(u32, u32)> = space.n.iter().flat_map(|&n| space.m.iter().map(move |&m| (n, m))).collect();
    let pts = shards
        .par_iter()
        .map(|&(n, m)| {
            let mut pts = Vec::new();
            space.for_each_in_shard(n, m, |cfg| {
                let ln = weighted_total(
                    ln_mz(&cfg, 2, &ev.z),
                    ln_mz(&cfg, 3, &ev.z),
                    ln_mx(&cfg, &ev.z),
                    ev.plus(cfg.n, cfg.m, cfg.r_plus),
                    ev.cat(&cfg, 2),
                    ev.cat(&cfg, 3),
                );
                pts.push(FrontierPoint { cz_gates: cz_count(&cfg), bound: LogProb(ln), cfg });
            });
            front_of(pts)
        })
        .reduce(Vec::new, |mut a, b| {
            a.extend(b);
            front_of(a)
        });
    Ok(pts)
}

/// One optimized point of a noise sweep.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub eps: f64,
    pub bias: f64,
    pub eps_meas: f64,
    pub locality: Locality,
    pub n: u32,
    pub m: u32,
    pub p: u32,
    pub r: u32,
    pub r_prime: u32,
    pub r_plus: u32,
    pub log10_bound: String,
    pub cz_gates: u64,
    pub qubits: u64,
}

impl SweepRow {
    pub fn log10(&self) -> f64 {
        self.log10_bound.parse().unwrap_or(f64::NEG_INFINITY)
    }
}

/// Optimizes the bound at every (ε, bias, eps_meas/ε) combination. Storage and
/// injection rates are taken from `template`.
pub fn sweep(
    template: &NoiseParams,
    eps_grid: &[f64],
    bias_list: &[f64],
    meas_ratios: &[f64],
    space: &SearchSpace,
) -> Result<Vec<SweepRow>> {
    if eps_grid.is_empty() || bias_list.is_empty() || meas_ratios.is_empty() {
        return Err(Error::InvalidSpace("sweep grids must be nonempty".into()));
    }
    let mut rows = Vec::new();
    for &eps in eps_grid {
        for &bias in bias_list {
            for &ratio in meas_ratios {
                let mut noise = *template;
                noise.eps = eps;
                noise.eps_nd = eps / bias;
                noise.eps_meas = ratio * eps;
                let res = optimize(&noise, space, Objective::MinBound)?;
                let c = res.best_cfg;
                rows.push(SweepRow {
                    eps,
                    bias,
                    eps_meas: noise.eps_meas,
                    locality: c.locality,
                    n: c.n,
                    m: c.m,
                    p: c.p,
                    r: c.r,
                    r_prime: c.r_prime,
                    r_plus: c.r_plus,
                    log10_bound: res.bound.total.log10_string(),
                    cz_gates: res.resources.cz_gates,
                    qubits: res.resources.physical_qubits,
                });
            }
        }
    }
    Ok(rows)
}

pub fn write_csv<W: Write>(rows: &[SweepRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_json<W: Write>(rows: &[SweepRow], out: W) -> Result<()> {
    serde_json::to_writer_pretty(out, rows).map_err(|e| Error::Io(e.to_string()))
}
