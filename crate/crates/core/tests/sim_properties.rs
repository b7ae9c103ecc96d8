use std::path::PathBuf;

use bsft_core::bounds::t_min;
use bsft_core::noise::LocationClass;
use bsft_core::optimizer::cz_count;
use bsft_core::sim::{
    build_circuit, decode, propagate, sample_faults, Circuit, CircuitKind, Classification, Fault, FaultSet, Pauli, Trace,
};
use bsft_core::{count_resources, GadgetConfig, Noise, Variant};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn odd(hi: u32) -> impl Strategy<Value = u32> {
    (0..=hi / 2).prop_map(|k| 2 * k + 1)
}

fn small_cfg() -> impl Strategy<Value = GadgetConfig> {
    (odd(3), odd(5), odd(3), 1u32..=3, 1u32..=3, any::<bool>(), 0.0f64..1.0, 0usize..4).prop_map(|(n, m, r, rp, rpl, local, pf, v)| {
        let c = if local {
            GadgetConfig::local(n, m, r, rp, rpl)
        } else {
            let p = (1 + (pf * (3 * m) as f64) as u32).min(3 * m);
            GadgetConfig::nonlocal(n, m, p, r, rp, rpl)
        };
        c.with_variant(Variant::ALL[v])
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn builder_tally_matches_resource_count(c in small_cfg()) {
        let circuit = build_circuit(CircuitKind::Cnot, &c).unwrap();
        let t = circuit.tally();
        let r = count_resources(&c).unwrap();
        prop_assert_eq!(t.cz_gates, r.cz_gates);
        prop_assert_eq!(t.preps, r.preps);
        prop_assert_eq!(t.measurements, r.measurements);
        prop_assert_eq!(t.wait_steps, r.wait_steps);
        prop_assert_eq!(circuit.num_qubits() as u64, r.physical_qubits);
        prop_assert_eq!(cz_count(&c), t.cz_gates);
        prop_assert_eq!(circuit.count(LocationClass::CZ) as u64, t.cz_gates);
    }

    #[test]
    fn winning_rounds_respect_pigeonhole(c in small_cfg(), seed in any::<u64>(), kind in 0usize..3) {
        let kind = [CircuitKind::CatPrep, CircuitKind::PlusPrep, CircuitKind::Cnot][kind];
        let circuit = build_circuit(kind, &c).unwrap();
        let noise = Noise::new(0.05, 0.02);
        for k in 0..16 {
            let fs = sample_faults(&circuit, &noise, seed.wrapping_add(k));
            let out = decode(&circuit, &propagate(&circuit, &fs));
            if out.classification != Classification::PrepFailure {
                continue;
            }
            for (plan, cat) in circuit.cats.iter().zip(&out.cats) {
                let rounds = plan.rounds.len() as u32;
                let need = t_min(rounds, cat.faulty_rounds, cat.syndrome_changes);
                prop_assert!(cat.winner_count >= need, "{:?}: t={} < {} for {:?}", c, cat.winner_count, need, cat);
            }
        }
    }

    #[test]
    fn classification_ignores_gauge(c in small_cfg(), seed in any::<u64>()) {
        let circuit = build_circuit(CircuitKind::Cnot, &c).unwrap();
        let noise = Noise::new(0.02, 0.005);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let roles = c.variant.roles();
        for k in 0..8 {
            let fs = sample_faults(&circuit, &noise, seed.wrapping_add(k));
            let trace = propagate(&circuit, &fs);
            let base = decode(&circuit, &trace).classification;
            let mut moved = trace.clone();
            for block in [roles.control_out, roles.target_out] {
                apply_random_gauge(&circuit, block, &mut moved, &mut rng);
            }
            prop_assert_eq!(decode(&circuit, &moved).classification, base);
        }
    }
}

/// Multiplies the final error on `block` by random weight-2 gauge operators:
/// XX on horizontal neighbours and ZZ on vertical neighbours.
fn apply_random_gauge(circuit: &Circuit, block: usize, trace: &mut Trace, rng: &mut ChaCha8Rng) {
    let (n, m) = (circuit.cfg.n as usize, circuit.cfg.m as usize);
    let qs = &circuit.blocks[block];
    for i in 0..n {
        for j in 0..m {
            if j + 1 < m && rng.gen_bool(0.5) {
                trace.frame.apply(qs[i * m + j] as usize, Pauli::X);
                trace.frame.apply(qs[i * m + j + 1] as usize, Pauli::X);
            }
            if i + 1 < n && rng.gen_bool(0.5) {
                trace.frame.apply(qs[i * m + j] as usize, Pauli::Z);
                trace.frame.apply(qs[(i + 1) * m + j] as usize, Pauli::Z);
            }
        }
    }
}

/// Symplectic propagation with explicit 2N×2N matrices over GF(2).
struct Dense {
    n: usize,
    v: Vec<u8>,
}

impl Dense {
    fn apply(&mut self, mat: &[Vec<u8>]) {
        let v: Vec<u8> = mat.iter().map(|row| row.iter().zip(&self.v).fold(0, |a, (r, x)| a ^ (r & x))).collect();
        self.v = v;
    }

    fn identity(&self) -> Vec<Vec<u8>> {
        (0..2 * self.n).map(|i| (0..2 * self.n).map(|j| (i == j) as u8).collect()).collect()
    }

    /// Conjugation by CZ: X_a picks up Z_b and X_b picks up Z_a.
    fn cz(&self, a: usize, b: usize) -> Vec<Vec<u8>> {
        let mut m = self.identity();
        m[self.n + b][a] ^= 1;
        m[self.n + a][b] ^= 1;
        m
    }

    /// Fresh |+⟩ on `a` discards any error there.
    fn reset(&self, a: usize) -> Vec<Vec<u8>> {
        let mut m = self.identity();
        m[a][a] = 0;
        m[self.n + a][self.n + a] = 0;
        m
    }
}

fn dense_propagate(circuit: &Circuit, faults: &[Fault]) -> (Vec<bool>, Vec<Pauli>) {
    let nq = circuit.num_qubits();
    let mut d = Dense { n: nq, v: vec![0; 2 * nq] };
    let mut flips = vec![false; circuit.locations.len()];
    for &id in &circuit.order {
        let loc = &circuit.locations[id as usize];
        let f = faults.iter().find(|f| f.loc == id);
        let a = loc.qubits[0] as usize;
        match loc.class {
            LocationClass::PrepPlus => d.apply(&d.reset(a)),
            LocationClass::CZ => d.apply(&d.cz(a, loc.qubits[1] as usize)),
            LocationClass::MeasX => {
                flips[id as usize] = (d.v[nq + a] == 1) ^ f.is_some_and(|f| f.flip);
                continue;
            }
            LocationClass::Wait => {}
        }
        if let Some(f) = f {
            for (k, &q) in loc.operands().iter().enumerate() {
                d.v[q as usize] ^= f.paulis[k].x() as u8;
                d.v[nq + q as usize] ^= f.paulis[k].z() as u8;
            }
        }
    }
    let frame = (0..nq)
        .map(|q| match (d.v[q], d.v[nq + q]) {
            (0, 0) => Pauli::I,
            (1, 0) => Pauli::X,
            (0, 1) => Pauli::Z,
            _ => Pauli::Y,
        })
        .collect();
    (flips, frame)
}

#[test]
fn propagation_matches_dense_symplectic_oracle() {
    let cases = [
        (CircuitKind::CatPrep, GadgetConfig::nonlocal(1, 3, 3, 1, 2, 1)),
        (CircuitKind::PlusPrep, GadgetConfig::local(3, 3, 1, 1, 2)),
        (CircuitKind::MzzL, GadgetConfig::nonlocal(1, 3, 2, 1, 1, 1)),
        (CircuitKind::Cnot, GadgetConfig::nonlocal(1, 3, 3, 1, 1, 1)),
        (CircuitKind::Injection, GadgetConfig::local(1, 3, 1, 1, 1)),
    ];
    let noise = Noise::new(0.1, 0.1).with_storage(0.05, 0.05).with_psi(0.2);
    for (kind, cfg) in cases {
        let circuit = build_circuit(kind, &cfg).unwrap();
        assert!(circuit.num_qubits() <= 80, "{kind:?} too large for the dense oracle");
        for seed in 0..12 {
            let fs = sample_faults(&circuit, &noise, seed);
            let t = propagate(&circuit, &fs);
            let (flips, frame) = dense_propagate(&circuit, &fs.faults);
            for &id in &circuit.order {
                if circuit.locations[id as usize].class == LocationClass::MeasX {
                    assert_eq!(t.flips.get(id as usize), flips[id as usize], "{kind:?} seed {seed} location {id}");
                }
            }
            for (q, p) in frame.iter().enumerate() {
                assert_eq!(t.frame.get(q), *p, "{kind:?} seed {seed} qubit {q}");
            }
        }
    }
}

#[test]
fn single_faults_spread_as_expected() {
    let circuit = build_circuit(CircuitKind::Cnot, &GadgetConfig::nonlocal(1, 3, 3, 1, 1, 1)).unwrap();
    let cz = circuit.order.iter().copied().find(|&id| circuit.locations[id as usize].class == LocationClass::CZ).unwrap();
    let fs = FaultSet::new(&circuit, vec![Fault::pauli(cz, Pauli::X, Pauli::I)]);
    let (_, frame) = dense_propagate(&circuit, &fs.faults);
    let t = propagate(&circuit, &fs);
    for (q, p) in frame.iter().enumerate() {
        assert_eq!(t.frame.get(q), *p);
    }
}

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

/// Byte-exact layer dumps of small circuits. Set `BSFT_BLESS=1` to rewrite them.
#[test]
fn golden_circuit_dumps() {
    let cases = [
        ("cat_prep_nonlocal_p2_r1.txt", CircuitKind::CatPrep, GadgetConfig::nonlocal(1, 1, 2, 1, 1, 1)),
        ("cat_prep_local_m1_r2.txt", CircuitKind::CatPrep, GadgetConfig::local(1, 1, 1, 2, 1)),
        ("plus_prep_nonlocal_n3_r2.txt", CircuitKind::PlusPrep, GadgetConfig::nonlocal(3, 1, 1, 1, 1, 2)),
        ("mx_nonlocal_1x3.txt", CircuitKind::MxL, GadgetConfig::nonlocal(1, 3, 3, 1, 1, 1)),
    ];
    let bless = std::env::var_os("BSFT_BLESS").is_some();
    for (name, kind, cfg) in cases {
        let got = build_circuit(kind, &cfg).unwrap().dump();
        let path = fixture(name);
        if bless {
            std::fs::write(&path, &got).unwrap();
            continue;
        }
        let want = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        assert_eq!(got, want, "{name}");
    }
}
