//! Fault-tolerance bounds, gadget construction and Pauli-frame simulation
//! for asymmetric Bacon-Shor codes under highly biased noise.
//!
//! The core is generic over the scalar type; `f64` aliases are provided here.

pub mod bounds;
pub mod config;
pub mod distill;
pub mod error;
pub mod noise;
pub mod optimizer;
pub mod scalar;
pub mod sim;

pub use bounds::{BoundBreakdown, BoundOptions, BoundTerm};
pub use config::{GadgetConfig, Locality, Roles, Variant};
pub use distill::{distill_schedule, distill_step, end_to_end, DistillKind, DistillParams, Schedule};
pub use error::{Error, Result};
pub use noise::{LocationClass, NoiseParams, RateKind};
pub use optimizer::{count_resources, optimize, pareto_front, sweep, Objective, OptResult, ResourceCount, SearchSpace};
pub use scalar::{LogProb, Real};
pub use sim::{Circuit, CircuitKind, Classification};

pub type Noise = NoiseParams<f64>;
pub type Prob = LogProb<f64>;
pub type Breakdown = BoundBreakdown<f64>;
