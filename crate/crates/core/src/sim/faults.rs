//! Biased Pauli fault sampling.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::noise::{LocationClass, NoiseParams, RateKind};
use crate::sim::circuit::Circuit;
use crate::sim::pauli::Pauli;

/// A fault at one location: Paulis applied to its operands after it acts,
/// and for X measurements a classical outcome flip.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Fault {
    pub loc: u32,
    pub paulis: [Pauli; 2],
    pub flip: bool,
}

impl Fault {
    pub fn pauli(loc: u32, a: Pauli, b: Pauli) -> Self {
        Fault { loc, paulis: [a, b], flip: false }
    }

    pub fn flip(loc: u32) -> Self {
        Fault { loc, paulis: [Pauli::I, Pauli::I], flip: true }
    }

    pub fn is_trivial(&self) -> bool {
        !self.flip && self.paulis.iter().all(|p| p.is_identity())
    }

    pub fn has_x(&self) -> bool {
        self.paulis.iter().any(|p| p.x())
    }
}

/// Faults of one trial, sorted by execution position.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct FaultSet {
    pub faults: Vec<Fault>,
}

impl FaultSet {
    pub fn empty() -> Self {
        FaultSet::default()
    }

    /// Orders arbitrary faults by execution position, merging faults on the same location.
    pub fn new(circuit: &Circuit, mut faults: Vec<Fault>) -> Self {
        let mut pos = vec![0u32; circuit.locations.len()];
        for (i, &id) in circuit.order.iter().enumerate() {
            pos[id as usize] = i as u32;
        }
        faults.sort_by_key(|f| pos[f.loc as usize]);
        let mut merged: Vec<Fault> = Vec::with_capacity(faults.len());
        for f in faults {
            match merged.last_mut() {
                Some(last) if last.loc == f.loc => {
                    last.paulis = [last.paulis[0].compose(f.paulis[0]), last.paulis[1].compose(f.paulis[1])];
                    last.flip ^= f.flip;
                }
                _ => merged.push(f),
            }
        }
        merged.retain(|f| !f.is_trivial());
        FaultSet { faults: merged }
    }

    pub fn len(&self) -> usize {
        self.faults.len()
    }

    pub fn is_empty(&self) -> bool {
        self.faults.is_empty()
    }
}

/// Per-location fault rates in execution order, as 64-bit thresholds.
#[derive(Clone, Debug)]
pub struct FaultModel {
    diag: Vec<u64>,
    nondiag: Vec<u64>,
    general: Vec<u64>,
}

fn threshold(p: f64) -> u64 {
    if p <= 0.0 {
        0
    } else if p >= 1.0 {
        u64::MAX
    } else {
        (p * 18446744073709551616.0) as u64
    }
}

#[inline]
fn hit(rng: &mut impl RngCore, t: u64) -> bool {
    t != 0 && (t == u64::MAX || rng.next_u64() < t)
}

const CZ_DIAG: [(Pauli, Pauli); 3] = [(Pauli::Z, Pauli::I), (Pauli::I, Pauli::Z), (Pauli::Z, Pauli::Z)];

fn cz_nondiag() -> &'static [(Pauli, Pauli); 12] {
    static TABLE: std::sync::OnceLock<[(Pauli, Pauli); 12]> = std::sync::OnceLock::new();
    TABLE.get_or_init(|| {
        let mut out = [(Pauli::I, Pauli::I); 12];
        let mut k = 0;
        for a in 0..4u8 {
            for b in 0..4u8 {
                let (pa, pb) = (Pauli(a), Pauli(b));
                if pa.x() || pb.x() {
                    out[k] = (pa, pb);
                    k += 1;
                }
            }
        }
        out
    })
}

impl FaultModel {
    pub fn new(circuit: &Circuit, noise: &NoiseParams) -> Self {
        let n = circuit.order.len();
        let (mut diag, mut nondiag, mut general) = (Vec::with_capacity(n), Vec::with_capacity(n), vec![0; n]);
        for (i, &id) in circuit.order.iter().enumerate() {
            let class = circuit.locations[id as usize].class;
            if Some(id) == circuit.psi_location {
                diag.push(0);
                nondiag.push(0);
                general[i] = threshold(noise.eps_psi);
                continue;
            }
            diag.push(threshold(noise.rate(class, RateKind::Diagonal)));
            nondiag.push(threshold(noise.rate(class, RateKind::NonDiagonal)));
        }
        FaultModel { diag, nondiag, general }
    }

    /// Draws one trial's faults into `out`.
    pub fn sample_into(&self, circuit: &Circuit, rng: &mut ChaCha8Rng, out: &mut FaultSet) {
        out.faults.clear();
        for i in 0..circuit.order.len() {
            let (td, tn, tg) = (self.diag[i], self.nondiag[i], self.general[i]);
            if td == 0 && tn == 0 && tg == 0 {
                continue;
            }
            let d = hit(rng, td);
            let nd = hit(rng, tn);
            let g = hit(rng, tg);
            if !(d || nd || g) {
                continue;
            }
            let id = circuit.order[i];
            let class = circuit.locations[id as usize].class;
            let mut f = Fault { loc: id, paulis: [Pauli::I, Pauli::I], flip: false };
            if class == LocationClass::MeasX {
                f.flip = d;
            } else if class == LocationClass::CZ {
                if d {
                    let (a, b) = CZ_DIAG[rng.gen_range(0..3)];
                    f.paulis = [a, b];
                }
                if nd {
                    let (a, b) = cz_nondiag()[rng.gen_range(0..12)];
                    f.paulis = [f.paulis[0].compose(a), f.paulis[1].compose(b)];
                }
            } else {
                let mut p = Pauli::I;
                if d {
                    p = p.compose(Pauli::Z);
                }
                if nd {
                    p = p.compose([Pauli::X, Pauli::Y][rng.gen_range(0..2)]);
                }
                if g {
                    p = p.compose([Pauli::X, Pauli::Y, Pauli::Z][rng.gen_range(0..3)]);
                }
                f.paulis[0] = p;
            }
            if !f.is_trivial() {
                out.faults.push(f);
            }
        }
    }
}

/// Independent per-location faults, reproducible from `seed`.
pub fn sample_faults(circuit: &Circuit, noise: &NoiseParams, seed: u64) -> FaultSet {
    let model = FaultModel::new(circuit, noise);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = FaultSet::empty();
    model.sample_into(circuit, &mut rng, &mut out);
    out
}

/// Every single fault a location can suffer: all nonidentity Paulis on its
/// operands, or the outcome flip of an X measurement.
pub fn single_faults(circuit: &Circuit) -> Vec<Fault> {
    let mut out = Vec::new();
    for (id, l) in circuit.locations.iter().enumerate() {
        let id = id as u32;
        match l.class {
            LocationClass::MeasX => out.push(Fault::flip(id)),
            LocationClass::CZ => {
                for a in 0..4u8 {
                    for b in 0..4u8 {
                        if a != 0 || b != 0 {
                            out.push(Fault::pauli(id, Pauli(a), Pauli(b)));
                        }
                    }
                }
            }
            _ => {
                for a in 1..4u8 {
                    out.push(Fault::pauli(id, Pauli(a), Pauli::I));
                }
            }
        }
    }
    out
}
