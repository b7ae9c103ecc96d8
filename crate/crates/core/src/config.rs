//! Gadget shape parameters.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Locality {
    Nonlocal,
    Local,
}

/// CNOT gadget version. Blocks are numbered 1..4 top to bottom; the gadget
/// always measures ZZ on [12] and ZZZ on [234].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Variant {
    A,
    B,
    C,
    D,
}

/// Block roles of a CNOT variant, as 0-based block indices.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Roles {
    pub control_in: usize,
    pub target_in: usize,
    pub control_out: usize,
    pub target_out: usize,
}

impl Variant {
    pub const ALL: [Variant; 4] = [Variant::A, Variant::B, Variant::C, Variant::D];

    pub fn roles(self) -> Roles {
        let (ci, ti, co, to) = match self {
            Variant::A => (1, 2, 0, 3),
            Variant::B => (0, 2, 1, 3),
            Variant::C => (1, 3, 0, 2),
            Variant::D => (0, 3, 1, 2),
        };
        Roles { control_in: ci, target_in: ti, control_out: co, target_out: to }
    }
}

/// Code shape and repetition counts.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GadgetConfig {
    pub n: u32,
    pub m: u32,
    pub p: u32,
    pub r: u32,
    pub r_prime: u32,
    pub r_plus: u32,
    pub locality: Locality,
    pub variant: Variant,
}

impl GadgetConfig {
    pub fn new(n: u32, m: u32, p: u32, r: u32, r_prime: u32, r_plus: u32, locality: Locality) -> Self {
        GadgetConfig { n, m, p, r, r_prime, r_plus, locality, variant: Variant::A }
    }

    pub fn nonlocal(n: u32, m: u32, p: u32, r: u32, r_prime: u32, r_plus: u32) -> Self {
        Self::new(n, m, p, r, r_prime, r_plus, Locality::Nonlocal)
    }

    /// Local mode; `p` is recorded as `2m` and otherwise ignored.
    pub fn local(n: u32, m: u32, r: u32, r_prime: u32, r_plus: u32) -> Self {
        Self::new(n, m, 2 * m, r, r_prime, r_plus, Locality::Local)
    }

    pub fn with_variant(mut self, variant: Variant) -> Self {
        self.variant = variant;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let odd = |name: &str, v: u32| {
            if v == 0 || v.is_multiple_of(2) {
                Err(Error::InvalidConfig(format!("{name} must be odd and >= 1, got {v}")))
            } else {
                Ok(())
            }
        };
        odd("n", self.n)?;
        odd("m", self.m)?;
        odd("r", self.r)?;
        if self.r_prime == 0 {
            return Err(Error::InvalidConfig("r_prime must be >= 1".into()));
        }
        if self.r_plus == 0 {
            return Err(Error::InvalidConfig("r_plus must be >= 1".into()));
        }
        if self.locality == Locality::Nonlocal && (self.p == 0 || self.p > 3 * self.m) {
            return Err(Error::InvalidConfig(format!("p must lie in 1..={} , got {}", 3 * self.m, self.p)));
        }
        Ok(())
    }

    /// Cat length used for a `w`-block Z-type measurement.
    pub fn cat_len(&self, w: u32) -> u32 {
        match self.locality {
            Locality::Local => w * self.m,
            Locality::Nonlocal => self.p,
        }
    }

    /// Data qubits per block touched by one cat qubit (`⌈m/p⌉`, at least 1).
    pub fn fanout(&self) -> u32 {
        match self.locality {
            Locality::Local => 1,
            Locality::Nonlocal => self.m.div_ceil(self.p).max(1),
        }
    }
}
