//! Time-stepped circuits of fault locations and their decode plans.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::config::GadgetConfig;
use crate::noise::LocationClass;

pub type Qubit = u32;

/// Sentinel for the unused second operand of single-qubit locations.
pub const NO_QUBIT: Qubit = u32::MAX;

/// Gadget circuits the builder knows.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum CircuitKind {
    CatPrep,
    MzRow,
    MxL,
    MzzL,
    MzzzL,
    PlusPrep,
    Cnot,
    Injection,
}

impl CircuitKind {
    pub const ALL: [CircuitKind; 8] = [
        CircuitKind::CatPrep,
        CircuitKind::MzRow,
        CircuitKind::MxL,
        CircuitKind::MzzL,
        CircuitKind::MzzzL,
        CircuitKind::PlusPrep,
        CircuitKind::Cnot,
        CircuitKind::Injection,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CircuitKind::CatPrep => "cat_prep",
            CircuitKind::MzRow => "mz_row",
            CircuitKind::MxL => "mx",
            CircuitKind::MzzL => "mzz",
            CircuitKind::MzzzL => "mzzz",
            CircuitKind::PlusPrep => "plus_prep",
            CircuitKind::Cnot => "cnot",
            CircuitKind::Injection => "injection",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        let s = s.to_ascii_lowercase().replace('-', "_");
        CircuitKind::ALL.into_iter().find(|k| k.name() == s || format!("{k:?}").to_ascii_lowercase() == s)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Role {
    Data {
        block: u32,
        row: u32,
        col: u32,
    },
    /// Unprotected injected qubit.
    Psi,
    /// Cat or check ancilla.
    Ancilla,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct QubitInfo {
    pub role: Role,
    /// Lattice site `(row, column)` in Local mode.
    pub site: Option<(u32, u32)>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Location {
    pub class: LocationClass,
    pub qubits: [Qubit; 2],
    pub step: u32,
}

impl Location {
    pub fn operands(&self) -> &[Qubit] {
        if self.qubits[1] == NO_QUBIT {
            &self.qubits[..1]
        } else {
            &self.qubits[..]
        }
    }
}

/// How an accepted winning syndrome updates the frame.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum FrameTarget {
    /// Z on the data partners of every inferred-X cat qubit.
    ZOnPartners,
    /// X on the cat qubits themselves (|+⟩^L column cats are the data).
    XOnSelf,
}

/// One repeated-syndrome cat preparation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CatPlan {
    pub qubits: Vec<Qubit>,
    /// Per round, the check measurement locations: chain checks first, then the wrap check.
    pub rounds: Vec<Vec<u32>>,
    pub wrap: bool,
    /// Snapshot indices at the r′+1 round boundaries.
    pub snapshots: Vec<usize>,
    /// Data partners of each cat qubit.
    pub partners: Vec<Vec<Qubit>>,
    pub frame: FrameTarget,
}

/// One repetition of one row measurement.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RowRead {
    pub cat: usize,
    pub readout: Vec<u32>,
    /// Data qubits whose Z parity is measured.
    pub data: Vec<Qubit>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum PlanItem {
    PlusPrep {
        block: usize,
        cats: Vec<usize>,
    },
    /// Z-type logical measurement; `rows[i][k]` is repetition `k` of row `i`.
    ZMeas {
        meas: usize,
        blocks: Vec<usize>,
        rows: Vec<Vec<RowRead>>,
    },
    /// Transversal X measurement of a block; `ops[i*m + j]`.
    MeasX {
        meas: usize,
        block: usize,
        ops: Vec<u32>,
    },
    /// X measurement of the unprotected qubit.
    MeasPsi {
        meas: usize,
        op: u32,
        qubit: Qubit,
    },
    /// Standalone cat preparation.
    Cat {
        cat: usize,
    },
}

/// Capture of the X part on some qubits before a given step executes.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Snapshot {
    pub step: u32,
    pub qubits: Vec<Qubit>,
}

/// How a decoded trial is scored.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Scoring {
    /// Standalone preparation: failure iff prep failure.
    Prep,
    /// Outcome of one logical measurement (X-type if `x_type`).
    Measurement { meas: usize, x_type: bool },
    /// Teleported CNOT.
    Cnot { zz: usize, zzz: usize, mx_control: usize, mx_target: usize, control_in_zzz: bool, control_out: usize, target_out: usize },
    /// Injection: ZZ on the row and psi, then X on psi.
    Injection { zz: usize, mx_psi: usize },
}

/// A built gadget circuit.
#[derive(Clone, Debug, Serialize)]
pub struct Circuit {
    pub kind: CircuitKind,
    pub cfg: GadgetConfig,
    pub history: bool,
    pub qubits: Vec<QubitInfo>,
    /// Locations in construction order; a location's index is its id.
    pub locations: Vec<Location>,
    /// Location ids in execution order: by step, then id.
    pub order: Vec<u32>,
    pub depth: u32,
    /// Data qubits of each block, row-major.
    pub blocks: Vec<Vec<Qubit>>,
    pub cats: Vec<CatPlan>,
    pub plan: Vec<PlanItem>,
    pub snapshots: Vec<Snapshot>,
    /// Snapshot indices sorted by step.
    pub snapshot_order: Vec<usize>,
    pub measurement_count: usize,
    pub psi_location: Option<u32>,
    pub scoring: Scoring,
}

/// Location tally by class.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Tally {
    pub preps: u64,
    pub measurements: u64,
    pub cz_gates: u64,
    pub wait_steps: u64,
}

impl Circuit {
    pub fn num_qubits(&self) -> usize {
        self.qubits.len()
    }

    pub fn tally(&self) -> Tally {
        let mut t = Tally::default();
        for l in &self.locations {
            match l.class {
                LocationClass::PrepPlus => t.preps += 1,
                LocationClass::MeasX => t.measurements += 1,
                LocationClass::CZ => t.cz_gates += 1,
                LocationClass::Wait => t.wait_steps += 1,
            }
        }
        t
    }

    pub fn count(&self, class: LocationClass) -> usize {
        self.locations.iter().filter(|l| l.class == class).count()
    }

    /// Location ids grouped by step.
    pub fn layers(&self) -> Vec<Vec<u32>> {
        let mut out = vec![Vec::new(); self.depth as usize];
        for &id in &self.order {
            out[self.locations[id as usize].step as usize].push(id);
        }
        out
    }

    /// Line-oriented text: one layer per line, `KIND(q1[,q2])` separated by spaces.
    pub fn dump(&self) -> String {
        let mut s = String::new();
        for layer in self.layers() {
            let items: Vec<String> = layer
                .iter()
                .map(|&id| {
                    let l = &self.locations[id as usize];
                    let ops: Vec<String> = l.operands().iter().map(|q| q.to_string()).collect();
                    format!("{}({})", l.class.mnemonic(), ops.join(","))
                })
                .collect();
            s.push_str(&items.join(" "));
            s.push('\n');
        }
        s
    }

    /// Per-qubit busy steps, for structural checks.
    pub fn schedule_by_qubit(&self) -> BTreeMap<Qubit, Vec<(u32, u32)>> {
        let mut map: BTreeMap<Qubit, Vec<(u32, u32)>> = BTreeMap::new();
        for &id in &self.order {
            let l = &self.locations[id as usize];
            for &q in l.operands() {
                map.entry(q).or_default().push((l.step, id));
            }
        }
        map
    }
}
