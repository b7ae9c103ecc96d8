//! Decoding a propagated trace: winning syndromes, majority votes, frames.

use serde::{Deserialize, Serialize};

use crate::sim::circuit::{CatPlan, Circuit, FrameTarget, PlanItem, Qubit, Scoring};
use crate::sim::pauli::{BitVec, PauliMask};
use crate::sim::propagate::Trace;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Classification {
    Success,
    PrepFailure,
    LogicalX,
    LogicalZ,
    LogicalY,
}

impl Classification {
    pub const ALL: [Classification; 5] = [
        Classification::Success,
        Classification::PrepFailure,
        Classification::LogicalX,
        Classification::LogicalZ,
        Classification::LogicalY,
    ];

    pub fn is_logical(self) -> bool {
        matches!(self, Classification::LogicalX | Classification::LogicalZ | Classification::LogicalY)
    }

    fn from_parts(x: bool, z: bool) -> Self {
        match (x, z) {
            (false, false) => Classification::Success,
            (true, false) => Classification::LogicalX,
            (false, true) => Classification::LogicalZ,
            (true, true) => Classification::LogicalY,
        }
    }
}

/// Statistics of one cat preparation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct CatOutcome {
    pub accepted: u32,
    /// Number of accepted rounds showing the winning syndrome (t).
    pub winner_count: u32,
    /// Rounds whose observed syndrome differs from the true end-of-round syndrome (u).
    pub faulty_rounds: u32,
    /// Rounds in which the true X pattern changed (s).
    pub syndrome_changes: u32,
    pub tie: bool,
    pub failed: bool,
}

/// Logical error on one output block.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct BlockLogical {
    pub x: bool,
    pub z: bool,
}

/// Complete result of one trial.
#[derive(Clone, Debug, Serialize)]
pub struct TrialOutcome {
    pub flip_bits: BitVec,
    pub inferred_frame: PauliMask,
    pub actual_residual: PauliMask,
    /// Decoded flip of each logical measurement, in construction order.
    pub logical_flips: Vec<bool>,
    /// CNOT only: flip of the target-input X measurement (a) and of ZZZ (b).
    pub a_bit: bool,
    pub b_bit: bool,
    /// CNOT only: logical error on the control and target outputs after the frame update.
    pub outputs: Vec<BlockLogical>,
    pub prep_failed: bool,
    pub cats: Vec<CatOutcome>,
    pub classification: Classification,
}

fn majority(ones: usize, total: usize) -> bool {
    2 * ones > total
}

fn chain_syndrome(x: &BitVec, len: usize, wrap: bool) -> Vec<bool> {
    let mut s: Vec<bool> = (0..len.saturating_sub(1)).map(|j| x.get(j) ^ x.get(j + 1)).collect();
    if wrap {
        s.push(x.get(len - 1) ^ x.get(0));
    }
    s
}

/// Decodes one cat: returns the statistics and the inferred X pattern.
pub(crate) fn decode_cat(cat: &CatPlan, trace: &Trace) -> (CatOutcome, Vec<bool>) {
    let len = cat.qubits.len();
    let observed: Vec<Vec<bool>> = cat.rounds.iter().map(|ids| ids.iter().map(|&id| trace.flips.get(id as usize)).collect()).collect();
    let accepted: Vec<&Vec<bool>> = observed.iter().filter(|s| !cat.wrap || s.iter().filter(|&&b| b).count() % 2 == 0).collect();
    let mut best: Option<(&Vec<bool>, usize)> = None;
    let mut tie = false;
    for (i, s) in accepted.iter().enumerate() {
        if accepted[..i].iter().any(|o| o == s) {
            continue;
        }
        let c = accepted.iter().filter(|o| *o == s).count();
        match best {
            Some((_, bc)) if c < bc => {}
            Some((_, bc)) if c == bc => tie = true,
            _ => {
                best = Some((s, c));
                tie = false;
            }
        }
    }
    let truth: Vec<&BitVec> = cat.snapshots.iter().map(|&k| &trace.snapshots[k]).collect();
    let true_syn: Vec<Vec<bool>> = truth.iter().map(|t| chain_syndrome(t, len, cat.wrap)).collect();
    let faulty = observed.iter().enumerate().filter(|(k, s)| **s != true_syn[k + 1]).count() as u32;
    let changes = (1..truth.len()).filter(|&k| truth[k] != truth[k - 1]).count() as u32;
    let mut afflicted = BitVec::zeros(len);
    for t in &truth[1..] {
        for q in 0..len {
            if t.get(q) != truth[0].get(q) {
                afflicted.set(q, true);
            }
        }
    }

    let mut x = vec![false; len];
    let (winner_count, valid) = match best {
        Some((w, c)) => {
            let chain = &w[..len.saturating_sub(1)];
            for j in 0..chain.len() {
                x[j + 1] = x[j] ^ chain[j];
            }
            if 2 * x.iter().filter(|&&b| b).count() > len {
                x.iter_mut().for_each(|b| *b = !*b);
            }
            let valid = true_syn.iter().any(|s| s[..chain.len()] == *chain);
            (c as u32, valid)
        }
        None => (0, false),
    };
    let heavy = len >= 2 && 2 * afflicted.count_ones() >= len;
    let failed = best.is_none() || tie || !valid || heavy;
    let out = CatOutcome { accepted: accepted.len() as u32, winner_count, faulty_rounds: faulty, syndrome_changes: changes, tie, failed };
    (out, x)
}

fn block_logical(circuit: &Circuit, block: usize, residual: &PauliMask) -> BlockLogical {
    let (n, m) = (circuit.cfg.n as usize, circuit.cfg.m as usize);
    let qs = &circuit.blocks[block];
    let odd_rows = (0..n).filter(|&i| (0..m).filter(|&j| residual.x_bits.get(qs[i * m + j] as usize)).count() % 2 == 1).count();
    let odd_cols = (0..m).filter(|&j| (0..n).filter(|&i| residual.z_bits.get(qs[i * m + j] as usize)).count() % 2 == 1).count();
    BlockLogical { x: majority(odd_rows, n), z: majority(odd_cols, m) }
}

pub fn decode(circuit: &Circuit, trace: &Trace) -> TrialOutcome {
    let mut frame = PauliMask::identity(circuit.num_qubits());
    let mut cats = vec![None; circuit.cats.len()];
    let mut prep_failed = false;
    let mut flips = vec![false; circuit.measurement_count];

    let mut run_cat = |c: usize, frame: &mut PauliMask, prep_failed: &mut bool| {
        let plan = &circuit.cats[c];
        let (out, x) = decode_cat(plan, trace);
        *prep_failed |= out.failed;
        for (pos, &bit) in x.iter().enumerate() {
            if !bit {
                continue;
            }
            match plan.frame {
                FrameTarget::ZOnPartners => {
                    for &d in &plan.partners[pos] {
                        frame.z_bits.flip(d as usize);
                    }
                }
                FrameTarget::XOnSelf => frame.x_bits.flip(plan.qubits[pos] as usize),
            }
        }
        cats[c] = Some(out);
    };

    for item in &circuit.plan {
        match item {
            PlanItem::Cat { cat } => run_cat(*cat, &mut frame, &mut prep_failed),
            PlanItem::PlusPrep { cats: cs, .. } => {
                for &c in cs {
                    run_cat(c, &mut frame, &mut prep_failed);
                }
            }
            PlanItem::ZMeas { meas, rows, .. } => {
                let mut row_ones = 0;
                for reps in rows {
                    let mut ones = 0;
                    for read in reps {
                        run_cat(read.cat, &mut frame, &mut prep_failed);
                        let raw = read.readout.iter().fold(false, |a, &id| a ^ trace.flips.get(id as usize));
                        let corr = read.data.iter().fold(false, |a, &d: &Qubit| a ^ frame.x_bits.get(d as usize));
                        ones += (raw ^ corr) as usize;
                    }
                    row_ones += majority(ones, reps.len()) as usize;
                }
                flips[*meas] = majority(row_ones, rows.len());
            }
            PlanItem::MeasX { meas, block, ops } => {
                let (n, m) = (circuit.cfg.n as usize, circuit.cfg.m as usize);
                let qs = &circuit.blocks[*block];
                let odd = (0..m)
                    .filter(|&j| {
                        (0..n).fold(false, |a, i| a ^ trace.flips.get(ops[i * m + j] as usize) ^ frame.z_bits.get(qs[i * m + j] as usize))
                    })
                    .count();
                flips[*meas] = majority(odd, m);
            }
            PlanItem::MeasPsi { meas, op, qubit } => {
                flips[*meas] = trace.flips.get(*op as usize) ^ frame.z_bits.get(*qubit as usize);
            }
        }
    }

    let mut a_bit = false;
    let mut b_bit = false;
    let mut outputs = Vec::new();
    let classification = match circuit.scoring {
        _ if prep_failed => Classification::PrepFailure,
        Scoring::Prep => Classification::Success,
        Scoring::Measurement { meas, x_type } => match (flips[meas], x_type) {
            (false, _) => Classification::Success,
            (true, true) => Classification::LogicalZ,
            (true, false) => Classification::LogicalX,
        },
        Scoring::Injection { zz, mx_psi } => Classification::from_parts(flips[zz], flips[mx_psi]),
        Scoring::Cnot { .. } => Classification::Success,
    };
    if let Scoring::Cnot { zz, zzz, mx_control, mx_target, control_in_zzz, control_out, target_out } = circuit.scoring {
        a_bit = flips[mx_target];
        b_bit = flips[zzz];
        let mut residual = trace.frame.clone();
        residual.compose(&frame);
        let mut c = block_logical(circuit, control_out, &residual);
        let mut t = block_logical(circuit, target_out, &residual);
        let (s1, s2, ac, at) = (flips[zz], flips[zzz], flips[mx_control], flips[mx_target]);
        c.x ^= s1;
        t.x ^= s2 ^ (s1 && !control_in_zzz);
        c.z ^= ac ^ at;
        t.z ^= at;
        outputs = vec![c, t];
    }
    let classification = match (classification, outputs.as_slice()) {
        (Classification::Success, [c, t]) => Classification::from_parts(c.x || t.x, c.z || t.z),
        (cl, _) => cl,
    };
    TrialOutcome {
        flip_bits: trace.flips.clone(),
        inferred_frame: frame,
        actual_residual: trace.frame.clone(),
        logical_flips: flips,
        a_bit,
        b_bit,
        outputs,
        prep_failed,
        cats: cats.into_iter().map(|c| c.expect("every cat decoded")).collect(),
        classification,
    }
}
