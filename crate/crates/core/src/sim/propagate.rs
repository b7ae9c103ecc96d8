//! Pauli-frame propagation through a circuit.

use serde::Serialize;

use crate::noise::LocationClass;
use crate::sim::circuit::Circuit;
use crate::sim::faults::FaultSet;
use crate::sim::pauli::{BitVec, PauliMask};

/// Raw result of pushing faults through a circuit.
#[derive(Clone, Debug, Serialize)]
pub struct Trace {
    /// Outcome flip per location id (meaningful for X measurements).
    pub flips: BitVec,
    /// X part of the snapshot qubits at each snapshot.
    pub snapshots: Vec<BitVec>,
    /// Actual error on every qubit at the end of the circuit.
    pub frame: PauliMask,
}

impl Trace {
    pub fn new(circuit: &Circuit) -> Self {
        Trace {
            flips: BitVec::zeros(circuit.locations.len()),
            snapshots: circuit.snapshots.iter().map(|s| BitVec::zeros(s.qubits.len())).collect(),
            frame: PauliMask::identity(circuit.num_qubits()),
        }
    }
}

pub fn propagate(circuit: &Circuit, faults: &FaultSet) -> Trace {
    let mut t = Trace::new(circuit);
    propagate_into(circuit, faults, None, &mut t);
    t
}

/// Propagation starting from an initial error on the qubits (e.g. a logical Pauli on input blocks).
pub fn propagate_from(circuit: &Circuit, faults: &FaultSet, initial: &PauliMask) -> Trace {
    let mut t = Trace::new(circuit);
    propagate_into(circuit, faults, Some(initial), &mut t);
    t
}

pub(crate) fn propagate_into(circuit: &Circuit, faults: &FaultSet, initial: Option<&PauliMask>, t: &mut Trace) {
    t.flips.clear();
    match initial {
        Some(init) => t.frame.clone_from(init),
        None => t.frame.clear(),
    }
    let x = &mut t.frame.x_bits;
    let z = &mut t.frame.z_bits;
    let mut fi = 0;
    let mut si = 0;
    let snaps = &circuit.snapshot_order;
    for &id in &circuit.order {
        let loc = &circuit.locations[id as usize];
        while si < snaps.len() && circuit.snapshots[snaps[si]].step <= loc.step {
            let s = &circuit.snapshots[snaps[si]];
            let out = &mut t.snapshots[snaps[si]];
            for (k, &q) in s.qubits.iter().enumerate() {
                out.set(k, x.get(q as usize));
            }
            si += 1;
        }
        let fault = if fi < faults.faults.len() && faults.faults[fi].loc == id {
            fi += 1;
            Some(&faults.faults[fi - 1])
        } else {
            None
        };
        let a = loc.qubits[0] as usize;
        match loc.class {
            LocationClass::PrepPlus => {
                x.set(a, false);
                z.set(a, false);
            }
            LocationClass::CZ => {
                let b = loc.qubits[1] as usize;
                let (xa, xb) = (x.get(a), x.get(b));
                if xb {
                    z.flip(a);
                }
                if xa {
                    z.flip(b);
                }
            }
            LocationClass::MeasX => {
                let f = z.get(a) ^ fault.is_some_and(|f| f.flip);
                t.flips.set(id as usize, f);
                continue;
            }
            LocationClass::Wait => {}
        }
        if let Some(f) = fault {
            for (k, &q) in loc.operands().iter().enumerate() {
                let p = f.paulis[k];
                if p.x() {
                    x.flip(q as usize);
                }
                if p.z() {
                    z.flip(q as usize);
                }
            }
        }
    }
    while si < snaps.len() {
        let s = &circuit.snapshots[snaps[si]];
        for (k, &q) in s.qubits.iter().enumerate() {
            t.snapshots[snaps[si]].set(k, x.get(q as usize));
        }
        si += 1;
    }
}
