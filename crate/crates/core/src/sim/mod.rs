//! Pauli-frame simulation of gadget circuits.

pub mod builder;
pub mod circuit;
pub mod decode;
pub mod estimate;
pub mod faults;
pub mod pauli;
pub mod propagate;

pub use builder::{build_circuit, build_circuit_with, sim_circuit};
pub use circuit::{Circuit, CircuitKind, Location, Tally};
pub use decode::{decode, Classification, TrialOutcome};
pub use estimate::{
    analytic_bound, check_bound, check_bound_against, estimate, estimate_circuit, wilson, BoundCheck, Estimate, Tallies, Verdict,
};
pub use faults::{sample_faults, single_faults, Fault, FaultModel, FaultSet};
pub use pauli::{BitVec, Pauli, PauliMask};
pub use propagate::{propagate, propagate_from, Trace};
