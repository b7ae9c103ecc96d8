//! Monte-Carlo failure estimates and bound checks.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::bounds;
use crate::config::GadgetConfig;
use crate::error::Result;
use crate::noise::NoiseParams;
use crate::scalar::LogProb;
use crate::sim::builder::sim_circuit;
use crate::sim::circuit::{Circuit, CircuitKind};
use crate::sim::decode::{decode, Classification};
use crate::sim::faults::{FaultModel, FaultSet};
use crate::sim::propagate::{propagate_into, Trace};

/// Trials per independently seeded chunk. Chunk `c` uses ChaCha8 stream `c`
/// of the master seed, so results do not depend on the worker count.
pub const CHUNK: u64 = 4096;

const Z95: f64 = 1.959963984540054;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Tallies {
    pub success: u64,
    pub prep_failure: u64,
    pub logical_x: u64,
    pub logical_z: u64,
    pub logical_y: u64,
}

impl Tallies {
    fn add(&mut self, c: Classification) {
        match c {
            Classification::Success => self.success += 1,
            Classification::PrepFailure => self.prep_failure += 1,
            Classification::LogicalX => self.logical_x += 1,
            Classification::LogicalZ => self.logical_z += 1,
            Classification::LogicalY => self.logical_y += 1,
        }
    }

    fn merge(mut self, o: Tallies) -> Tallies {
        self.success += o.success;
        self.prep_failure += o.prep_failure;
        self.logical_x += o.logical_x;
        self.logical_z += o.logical_z;
        self.logical_y += o.logical_y;
        self
    }

    pub fn get(&self, c: Classification) -> u64 {
        match c {
            Classification::Success => self.success,
            Classification::PrepFailure => self.prep_failure,
            Classification::LogicalX => self.logical_x,
            Classification::LogicalZ => self.logical_z,
            Classification::LogicalY => self.logical_y,
        }
    }

    pub fn total(&self) -> u64 {
        Classification::ALL.iter().map(|&c| self.get(c)).sum()
    }
}

/// Whether a classification counts against the gadget's bound.
pub fn is_failure(kind: CircuitKind, c: Classification) -> bool {
    match kind {
        CircuitKind::Cnot => c != Classification::Success,
        CircuitKind::CatPrep | CircuitKind::PlusPrep => c == Classification::PrepFailure,
        CircuitKind::MzRow | CircuitKind::MxL | CircuitKind::MzzL | CircuitKind::MzzzL | CircuitKind::Injection => c.is_logical(),
    }
}

/// Wilson score interval for `k` successes in `n` trials.
pub fn wilson(k: u64, n: u64, z: f64) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    let (k, n) = (k as f64, n as f64);
    let p = k / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    let lo = if k == 0.0 { 0.0 } else { (center - half).max(0.0) };
    let hi = if k == n { 1.0 } else { (center + half).min(1.0) };
    (lo, hi)
}

#[derive(Clone, Debug, Serialize)]
pub struct Estimate {
    pub kind: CircuitKind,
    pub cfg: GadgetConfig,
    pub noise: NoiseParams,
    pub trials: u64,
    pub seed: u64,
    pub failures: u64,
    pub p_fail: f64,
    pub ci95: (f64, f64),
    pub tallies: Tallies,
}

pub fn estimate(kind: CircuitKind, cfg: &GadgetConfig, noise: &NoiseParams, trials: u64, seed: u64) -> Result<Estimate> {
    noise.validate()?;
    let circuit = sim_circuit(kind, cfg)?;
    Ok(estimate_circuit(&circuit, noise, trials, seed))
}

/// Runs `trials` independent trials of an already built circuit.
pub fn estimate_circuit(circuit: &Circuit, noise: &NoiseParams, trials: u64, seed: u64) -> Estimate {
    let model = FaultModel::new(circuit, noise);
    let chunks = trials.div_ceil(CHUNK);
    let tallies = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(c);
            let size = CHUNK.min(trials - c * CHUNK);
            let mut faults = FaultSet::empty();
            let mut trace = Trace::new(circuit);
            let mut t = Tallies::default();
            for _ in 0..size {
                model.sample_into(circuit, &mut rng, &mut faults);
                propagate_into(circuit, &faults, None, &mut trace);
                t.add(decode(circuit, &trace).classification);
            }
            t
        })
        .reduce(Tallies::default, Tallies::merge);
    let failures: u64 = Classification::ALL.iter().filter(|&&c| is_failure(circuit.kind, c)).map(|&c| tallies.get(c)).sum();
    let p_fail = if trials == 0 { 0.0 } else { failures as f64 / trials as f64 };
    let ci95 = if noise.is_noiseless() { (p_fail, p_fail) } else { wilson(failures, trials, Z95) };
    Estimate { kind: circuit.kind, cfg: circuit.cfg, noise: *noise, trials, seed, failures, p_fail, ci95, tallies }
}

/// The analytic bound matching a simulated kind.
pub fn analytic_bound(kind: CircuitKind, cfg: &GadgetConfig, noise: &NoiseParams) -> Result<LogProb> {
    match kind {
        CircuitKind::Cnot => Ok(bounds::cnot_bound(cfg, noise)?.total),
        CircuitKind::MxL => bounds::mx_bound(cfg, noise),
        CircuitKind::MzzL => bounds::mzz_bound(cfg, noise),
        CircuitKind::MzzzL => bounds::mzzz_bound(cfg, noise),
        CircuitKind::MzRow => bounds::mz_row_bound(cfg, noise),
        CircuitKind::PlusPrep => bounds::plus_prep_bound(cfg, noise),
        CircuitKind::CatPrep => bounds::single_cat_bound(cfg.cat_len(2), cfg.r_prime, cfg.locality, noise),
        CircuitKind::Injection => bounds::injection_bound(cfg, noise),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Verdict {
    Upheld,
    Violated,
}

#[derive(Clone, Debug, Serialize)]
pub struct BoundCheck {
    pub empirical: Estimate,
    /// Noise the analytic bound was evaluated at.
    pub bound_noise: NoiseParams,
    pub analytic: LogProb,
    pub verdict: Verdict,
}

pub fn check_bound(kind: CircuitKind, cfg: &GadgetConfig, noise: &NoiseParams, trials: u64, seed: u64) -> Result<BoundCheck> {
    check_bound_against(kind, cfg, noise, noise, trials, seed)
}

/// Simulates at `noise` but compares against the bound evaluated at `bound_noise`.
pub fn check_bound_against(
    kind: CircuitKind,
    cfg: &GadgetConfig,
    noise: &NoiseParams,
    bound_noise: &NoiseParams,
    trials: u64,
    seed: u64,
) -> Result<BoundCheck> {
    bound_noise.validate()?;
    let analytic = analytic_bound(kind, cfg, bound_noise)?;
    let empirical = estimate(kind, cfg, noise, trials, seed)?;
    let a = analytic.prob();
    let verdict = if a >= 1.0 || empirical.ci95.1 <= a { Verdict::Upheld } else { Verdict::Violated };
    Ok(BoundCheck { empirical, bound_noise: *bound_noise, analytic, verdict })
}
