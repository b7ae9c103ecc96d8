//! Gadget circuit construction with ASAP scheduling.
//!
//! Nonlocal mode allocates a fresh ancilla for every cat and check qubit.
//! Local mode places qubits on a lattice: data `(block b, row i, col j)` at
//! `(2i, 2mb + 2j)`, cat qubit `t` of a row-`i` cat at `(2i+1, x0 + 2t)` and
//! the check between cat qubits `t, t+1` at `(2i+1, x0 + 2t + 1)`. Sites are
//! reused, so repeated cats on one row serialize and data idles in between.

use std::collections::HashMap;

use crate::config::{GadgetConfig, Locality};
use crate::error::{Error, Result};
use crate::noise::LocationClass;
use crate::sim::circuit::*;

/// Builds the bare gadget circuit for `kind`.
pub fn build_circuit(kind: CircuitKind, cfg: &GadgetConfig) -> Result<Circuit> {
    build_circuit_with(kind, cfg, false)
}

/// Circuit used for Monte-Carlo comparison against the bounds: the CNOT
/// includes the preceding gadget's exposure on both input blocks.
pub fn sim_circuit(kind: CircuitKind, cfg: &GadgetConfig) -> Result<Circuit> {
    build_circuit_with(kind, cfg, kind == CircuitKind::Cnot)
}

/// Builds `kind`; with `history`, input blocks of the CNOT are first
/// prepared and measured by two single-block Z-type measurements.
pub fn build_circuit_with(kind: CircuitKind, cfg: &GadgetConfig, history: bool) -> Result<Circuit> {
    cfg.validate()?;
    if history && kind != CircuitKind::Cnot {
        return Err(Error::InvalidKind { kind: kind.name(), reason: "history only applies to the CNOT".into() });
    }
    let mut b = Builder::new(*cfg);
    let scoring = match kind {
        CircuitKind::CatPrep => {
            let len = cfg.cat_len(2);
            let qs: Vec<Qubit> = (0..len).map(|t| b.cat_qubit(0, 0, t)).collect();
            for &q in &qs {
                b.push(LocationClass::PrepPlus, q, NO_QUBIT);
            }
            let cat =
                b.cat_rounds(qs, vec![Vec::new(); len as usize], FrameTarget::ZOnPartners, cfg.r_prime, CheckSites::Row { y: 1, x0: 0 });
            b.plan.push(PlanItem::Cat { cat });
            Scoring::Prep
        }
        CircuitKind::MzRow => {
            b.add_block(0);
            let meas = b.z_measure(&[0], &[0], cfg.cat_len(1), None);
            Scoring::Measurement { meas, x_type: false }
        }
        CircuitKind::PlusPrep => {
            b.add_block(0);
            b.plus_prep(0);
            Scoring::Prep
        }
        CircuitKind::MxL => {
            b.add_block(0);
            b.plus_prep(0);
            let rows: Vec<u32> = (0..cfg.n).collect();
            for _ in 0..3 {
                b.z_measure(&[0], &rows, cfg.cat_len(1), None);
            }
            let meas = b.measure_x(0);
            Scoring::Measurement { meas, x_type: true }
        }
        CircuitKind::MzzL | CircuitKind::MzzzL => {
            let w = if kind == CircuitKind::MzzL { 2 } else { 3 };
            for blk in 0..w {
                b.add_block(blk);
                b.plus_prep(blk);
            }
            let rows: Vec<u32> = (0..cfg.n).collect();
            for _ in 0..w {
                b.z_measure(&[0], &rows, cfg.cat_len(1), None);
            }
            let blocks: Vec<usize> = (0..w).collect();
            let meas = b.z_measure(&blocks, &rows, cfg.cat_len(w as u32), None);
            Scoring::Measurement { meas, x_type: false }
        }
        CircuitKind::Cnot => {
            let roles = cfg.variant.roles();
            for blk in 0..4 {
                b.add_block(blk);
            }
            b.plus_prep(roles.control_out);
            b.plus_prep(roles.target_out);
            let rows: Vec<u32> = (0..cfg.n).collect();
            if history {
                for input in [roles.control_in, roles.target_in] {
                    b.plus_prep(input);
                    b.z_measure(&[input], &rows, cfg.cat_len(1), None);
                    b.z_measure(&[input], &rows, cfg.cat_len(1), None);
                }
            }
            let zz = b.z_measure(&[0, 1], &rows, cfg.cat_len(2), None);
            let zzz = b.z_measure(&[1, 2, 3], &rows, cfg.cat_len(3), None);
            let mx_control = b.measure_x(roles.control_in);
            let mx_target = b.measure_x(roles.target_in);
            Scoring::Cnot {
                zz,
                zzz,
                mx_control,
                mx_target,
                control_in_zzz: roles.control_in == 1,
                control_out: roles.control_out,
                target_out: roles.target_out,
            }
        }
        CircuitKind::Injection => {
            b.add_block(0);
            b.plus_prep(0);
            let psi = b.psi_qubit();
            let zz = b.z_measure(&[0], &[0], cfg.m + 1, Some(psi));
            let op = b.push(LocationClass::MeasX, psi, NO_QUBIT);
            let mx_psi = b.next_meas();
            b.plan.push(PlanItem::MeasPsi { meas: mx_psi, op, qubit: psi });
            Scoring::Injection { zz, mx_psi }
        }
    };
    Ok(b.finish(kind, history, scoring))
}

enum CheckSites {
    /// Checks along an ancilla row.
    Row { y: u32, x0: u32 },
    /// Checks between vertically adjacent data qubits of one column.
    Column { x: u32 },
}

struct Builder {
    cfg: GadgetConfig,
    local: bool,
    qubits: Vec<QubitInfo>,
    free: Vec<u32>,
    locs: Vec<Location>,
    sites: HashMap<(u32, u32), Qubit>,
    blocks: Vec<Vec<Qubit>>,
    cats: Vec<CatPlan>,
    plan: Vec<PlanItem>,
    snapshots: Vec<Snapshot>,
    meas_count: usize,
    psi_loc: Option<u32>,
}

impl Builder {
    fn new(cfg: GadgetConfig) -> Self {
        Builder {
            cfg,
            local: cfg.locality == Locality::Local,
            qubits: Vec::new(),
            free: Vec::new(),
            locs: Vec::new(),
            sites: HashMap::new(),
            blocks: Vec::new(),
            cats: Vec::new(),
            plan: Vec::new(),
            snapshots: Vec::new(),
            meas_count: 0,
            psi_loc: None,
        }
    }

    fn next_meas(&mut self) -> usize {
        self.meas_count += 1;
        self.meas_count - 1
    }

    fn new_qubit(&mut self, role: Role, site: Option<(u32, u32)>, free: u32) -> Qubit {
        self.qubits.push(QubitInfo { role, site });
        self.free.push(free);
        (self.qubits.len() - 1) as Qubit
    }

    fn site(&mut self, y: u32, x: u32, role: Role) -> Qubit {
        if let Some(&q) = self.sites.get(&(y, x)) {
            return q;
        }
        let q = self.new_qubit(role, Some((y, x)), 0);
        self.sites.insert((y, x), q);
        q
    }

    /// Cat qubit `t` for row `row` starting at block `b0`.
    fn cat_qubit(&mut self, row: u32, b0: u32, t: u32) -> Qubit {
        if self.local {
            self.site(2 * row + 1, 2 * self.cfg.m * b0 + 2 * t, Role::Ancilla)
        } else {
            self.new_qubit(Role::Ancilla, None, 0)
        }
    }

    fn push(&mut self, class: LocationClass, a: Qubit, b: Qubit) -> u32 {
        let mut step = self.free[a as usize];
        if b != NO_QUBIT {
            step = step.max(self.free[b as usize]);
        }
        self.locs.push(Location { class, qubits: [a, b], step });
        self.free[a as usize] = step + 1;
        if b != NO_QUBIT {
            self.free[b as usize] = step + 1;
        }
        (self.locs.len() - 1) as u32
    }

    fn barrier(&mut self, qs: &[Qubit]) -> u32 {
        let t = qs.iter().map(|&q| self.free[q as usize]).max().unwrap_or(0);
        for &q in qs {
            self.free[q as usize] = t;
        }
        t
    }

    fn snapshot(&mut self, step: u32, qubits: &[Qubit]) -> usize {
        self.snapshots.push(Snapshot { step, qubits: qubits.to_vec() });
        self.snapshots.len() - 1
    }

    fn add_block(&mut self, block: usize) {
        assert_eq!(block, self.blocks.len());
        let (n, m) = (self.cfg.n, self.cfg.m);
        let mut qs = Vec::with_capacity((n * m) as usize);
        for i in 0..n {
            for j in 0..m {
                let role = Role::Data { block: block as u32, row: i, col: j };
                let q = if self.local { self.site(2 * i, 2 * m * block as u32 + 2 * j, role) } else { self.new_qubit(role, None, 0) };
                qs.push(q);
            }
        }
        self.blocks.push(qs);
    }

    fn psi_qubit(&mut self) -> Qubit {
        let m = self.cfg.m;
        let q = if self.local { self.site(0, 2 * m, Role::Psi) } else { self.new_qubit(Role::Psi, None, 0) };
        let ready = self.blocks[0][..m as usize].iter().map(|&d| self.free[d as usize]).max().unwrap_or(0);
        self.free[q as usize] = self.free[q as usize].max(ready.saturating_sub(1));
        self.psi_loc = Some(self.push(LocationClass::PrepPlus, q, NO_QUBIT));
        q
    }

    /// Check qubit `j` of a cat, created per round in Nonlocal mode.
    fn check_qubit(&mut self, sites: &CheckSites, j: u32, not_before: u32) -> Qubit {
        if self.local {
            match *sites {
                CheckSites::Row { y, x0 } => self.site(y, x0 + 2 * j + 1, Role::Ancilla),
                CheckSites::Column { x } => self.site(2 * j + 1, x, Role::Ancilla),
            }
        } else {
            self.new_qubit(Role::Ancilla, None, not_before)
        }
    }

    /// Runs `rounds` syndrome rounds on prepared cat qubits and records the plan.
    fn cat_rounds(&mut self, qs: Vec<Qubit>, partners: Vec<Vec<Qubit>>, frame: FrameTarget, rounds: u32, sites: CheckSites) -> usize {
        let len = qs.len() as u32;
        let wrap = !self.local && len >= 2;
        let mut pairs: Vec<(u32, u32)> = (0..len.saturating_sub(1)).map(|j| (j, j + 1)).collect();
        if wrap {
            pairs.push((len - 1, 0));
        }
        let phases: Vec<Vec<usize>> = if self.local {
            vec![(0..pairs.len()).step_by(2).collect(), (1..pairs.len()).step_by(2).collect()]
        } else {
            vec![(0..pairs.len()).collect()]
        };
        let local_checks: Vec<Qubit> =
            if self.local { (0..pairs.len() as u32).map(|j| self.check_qubit(&sites, j, 0)).collect() } else { Vec::new() };
        let mut fence: Vec<Qubit> = qs.clone();
        fence.extend(&local_checks);
        let t0 = self.barrier(&fence);
        let mut snaps = vec![self.snapshot(t0, &qs)];
        let mut round_ids = Vec::with_capacity(rounds as usize);
        for _ in 0..rounds {
            let mut ids = vec![0u32; pairs.len()];
            for phase in &phases {
                if phase.is_empty() {
                    continue;
                }
                let start = self.barrier(&fence);
                let checks: Vec<Qubit> =
                    phase.iter().map(|&j| if self.local { local_checks[j] } else { self.check_qubit(&sites, j as u32, start) }).collect();
                for &a in &checks {
                    self.push(LocationClass::PrepPlus, a, NO_QUBIT);
                }
                for (k, &j) in phase.iter().enumerate() {
                    self.push(LocationClass::CZ, checks[k], qs[pairs[j].0 as usize]);
                }
                for (k, &j) in phase.iter().enumerate() {
                    self.push(LocationClass::CZ, checks[k], qs[pairs[j].1 as usize]);
                }
                for (k, &j) in phase.iter().enumerate() {
                    ids[j] = self.push(LocationClass::MeasX, checks[k], NO_QUBIT);
                }
            }
            let end = self.barrier(&fence);
            snaps.push(self.snapshot(end, &qs));
            round_ids.push(ids);
        }
        self.cats.push(CatPlan { qubits: qs, rounds: round_ids, wrap, snapshots: snaps, partners, frame });
        self.cats.len() - 1
    }

    fn plus_prep(&mut self, block: usize) {
        let (n, m) = (self.cfg.n as usize, self.cfg.m as usize);
        let data = self.blocks[block].clone();
        for &q in &data {
            self.push(LocationClass::PrepPlus, q, NO_QUBIT);
        }
        let mut cats = Vec::with_capacity(m);
        for j in 0..m {
            let col: Vec<Qubit> = (0..n).map(|i| data[i * m + j]).collect();
            let partners = col.iter().map(|&q| vec![q]).collect();
            let x = 2 * self.cfg.m * block as u32 + 2 * j as u32;
            cats.push(self.cat_rounds(col, partners, FrameTarget::XOnSelf, self.cfg.r_plus, CheckSites::Column { x }));
        }
        self.plan.push(PlanItem::PlusPrep { block, cats });
    }

    /// Z-type measurement of the listed rows across contiguous `blocks`,
    /// repeated `r` times with cats of length `len`; `psi` extends every row.
    fn z_measure(&mut self, blocks: &[usize], rows: &[u32], len: u32, psi: Option<Qubit>) -> usize {
        let m = self.cfg.m as usize;
        let b0 = blocks[0] as u32;
        debug_assert!(blocks.windows(2).all(|w| w[1] == w[0] + 1));
        let meas = self.next_meas();
        let mut reads: Vec<Vec<RowRead>> = vec![Vec::new(); rows.len()];
        for _ in 0..self.cfg.r {
            for (ri, &i) in rows.iter().enumerate() {
                let mut data: Vec<Qubit> = Vec::with_capacity(blocks.len() * m + 1);
                for &blk in blocks {
                    data.extend_from_slice(&self.blocks[blk][i as usize * m..(i as usize + 1) * m]);
                }
                data.extend(psi);
                let ready = data.iter().map(|&d| self.free[d as usize]).max().unwrap_or(0);
                let qs: Vec<Qubit> = (0..len).map(|t| self.cat_qubit(i, b0, t)).collect();
                if !self.local {
                    for &q in &qs {
                        self.free[q as usize] = ready.saturating_sub(1);
                    }
                }
                for &q in &qs {
                    self.push(LocationClass::PrepPlus, q, NO_QUBIT);
                }
                let mut partners: Vec<Vec<Qubit>> = vec![Vec::new(); len as usize];
                for (t, &d) in data.iter().enumerate() {
                    let c = t % len as usize;
                    self.push(LocationClass::CZ, qs[c], d);
                    partners[c].push(d);
                }
                let cat = self.cat_rounds(
                    qs.clone(),
                    partners,
                    FrameTarget::ZOnPartners,
                    self.cfg.r_prime,
                    CheckSites::Row { y: 2 * i + 1, x0: 2 * self.cfg.m * b0 },
                );
                self.barrier(&qs);
                let readout = qs.iter().map(|&q| self.push(LocationClass::MeasX, q, NO_QUBIT)).collect();
                reads[ri].push(RowRead { cat, readout, data });
            }
        }
        self.plan.push(PlanItem::ZMeas { meas, blocks: blocks.to_vec(), rows: reads });
        meas
    }

    fn measure_x(&mut self, block: usize) -> usize {
        let meas = self.next_meas();
        let data = self.blocks[block].clone();
        let ops = data.iter().map(|&q| self.push(LocationClass::MeasX, q, NO_QUBIT)).collect();
        self.plan.push(PlanItem::MeasX { meas, block, ops });
        meas
    }

    /// Inserts storage locations for idle qubits holding state (Local only).
    fn insert_waits(&mut self) {
        let mut per_qubit: Vec<Vec<(u32, LocationClass)>> = vec![Vec::new(); self.qubits.len()];
        for l in &self.locs {
            for &q in l.operands() {
                per_qubit[q as usize].push((l.step, l.class));
            }
        }
        let mut waits = Vec::new();
        for (q, ops) in per_qubit.iter_mut().enumerate() {
            ops.sort_by_key(|o| o.0);
            for w in ops.windows(2) {
                let ((s0, c0), (s1, c1)) = (w[0], w[1]);
                if c0 == LocationClass::MeasX || c1 == LocationClass::PrepPlus {
                    continue;
                }
                for s in s0 + 1..s1 {
                    waits.push(Location { class: LocationClass::Wait, qubits: [q as Qubit, NO_QUBIT], step: s });
                }
            }
        }
        waits.sort_by_key(|l| (l.step, l.qubits[0]));
        self.locs.extend(waits);
    }

    fn finish(mut self, kind: CircuitKind, history: bool, scoring: Scoring) -> Circuit {
        if self.local {
            self.insert_waits();
        }
        let mut order: Vec<u32> = (0..self.locs.len() as u32).collect();
        order.sort_by_key(|&i| (self.locs[i as usize].step, i));
        let depth = self.locs.iter().map(|l| l.step + 1).max().unwrap_or(0);
        let mut snapshot_order: Vec<usize> = (0..self.snapshots.len()).collect();
        snapshot_order.sort_by_key(|&i| (self.snapshots[i].step, i));
        Circuit {
            snapshot_order,
            kind,
            cfg: self.cfg,
            history,
            qubits: self.qubits,
            locations: self.locs,
            order,
            depth,
            blocks: self.blocks,
            cats: self.cats,
            plan: self.plan,
            snapshots: self.snapshots,
            measurement_count: self.meas_count,
            psi_location: self.psi_loc,
            scoring,
        }
    }
}
