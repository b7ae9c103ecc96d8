//! Physical noise rates and the fault-location rate table.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// All physical fault rates.
///
/// `eps` is the dephasing rate, `eps_nd` the non-diagonal rate, `eps_s` /
/// `eps_s_nd` the per-step storage rates, `eps_meas` the X-measurement error
/// rate and `eps_psi` the error rate of an unprotected injected qubit.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real", from = "RawNoise<T>")]
pub struct NoiseParams<T: Real = f64> {
    pub eps: T,
    pub eps_nd: T,
    pub eps_s: T,
    pub eps_s_nd: T,
    pub eps_meas: T,
    pub eps_psi: T,
}

#[derive(Deserialize)]
#[serde(bound = "T: Real", deny_unknown_fields)]
struct RawNoise<T: Real> {
    #[serde(default)]
    eps: T,
    #[serde(default)]
    eps_nd: T,
    #[serde(default)]
    eps_s: T,
    #[serde(default)]
    eps_s_nd: T,
    #[serde(default)]
    eps_meas: Option<T>,
    #[serde(default)]
    eps_psi: T,
}

impl<T: Real> From<RawNoise<T>> for NoiseParams<T> {
    fn from(r: RawNoise<T>) -> Self {
        NoiseParams {
            eps: r.eps,
            eps_nd: r.eps_nd,
            eps_s: r.eps_s,
            eps_s_nd: r.eps_s_nd,
            eps_meas: r.eps_meas.unwrap_or(r.eps),
            eps_psi: r.eps_psi,
        }
    }
}

impl<T: Real> Default for NoiseParams<T> {
    fn default() -> Self {
        Self::new(T::zero(), T::zero())
    }
}

impl<T: Real> NoiseParams<T> {
    /// Gate noise only: storage and injection rates zero, `eps_meas = eps`.
    pub fn new(eps: T, eps_nd: T) -> Self {
        NoiseParams { eps, eps_nd, eps_s: T::zero(), eps_s_nd: T::zero(), eps_meas: eps, eps_psi: T::zero() }
    }

    /// `eps_nd = eps / bias`.
    pub fn biased(eps: T, bias: T) -> Self {
        Self::new(eps, eps / bias)
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn with_storage(mut self, eps_s: T, eps_s_nd: T) -> Self {
        self.eps_s = eps_s;
        self.eps_s_nd = eps_s_nd;
        self
    }

    pub fn with_meas(mut self, eps_meas: T) -> Self {
        self.eps_meas = eps_meas;
        self
    }

    pub fn with_psi(mut self, eps_psi: T) -> Self {
        self.eps_psi = eps_psi;
        self
    }

    /// `eps / eps_nd`; an error when `eps_nd = 0`.
    pub fn bias(&self) -> Result<T> {
        if self.eps_nd == T::zero() {
            Err(Error::ZeroNonDiagonal)
        } else {
            Ok(self.eps / self.eps_nd)
        }
    }

    pub fn fields(&self) -> [(&'static str, T); 6] {
        [
            ("eps", self.eps),
            ("eps_nd", self.eps_nd),
            ("eps_s", self.eps_s),
            ("eps_s_nd", self.eps_s_nd),
            ("eps_meas", self.eps_meas),
            ("eps_psi", self.eps_psi),
        ]
    }

    pub fn validate(&self) -> Result<()> {
        for (field, v) in self.fields() {
            if !(v >= T::zero() && v <= T::one()) {
                return Err(Error::InvalidProbability { field, value: v.to_f64().unwrap_or(f64::NAN) });
            }
        }
        Ok(())
    }

    pub fn is_noiseless(&self) -> bool {
        self.fields().iter().all(|(_, v)| *v == T::zero())
    }

    /// Converts every rate to `U`.
    pub fn cast<U: Real>(&self) -> NoiseParams<U> {
        let c = |x: T| U::from_f64(x.to_f64().unwrap()).unwrap();
        NoiseParams {
            eps: c(self.eps),
            eps_nd: c(self.eps_nd),
            eps_s: c(self.eps_s),
            eps_s_nd: c(self.eps_s_nd),
            eps_meas: c(self.eps_meas),
            eps_psi: c(self.eps_psi),
        }
    }

    pub fn rate(&self, class: LocationClass, which: RateKind) -> T {
        rate_of(class, which, self)
    }
}

/// Kinds of fault location.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum LocationClass {
    PrepPlus,
    MeasX,
    CZ,
    Wait,
}

impl LocationClass {
    pub const ALL: [LocationClass; 4] = [LocationClass::PrepPlus, LocationClass::MeasX, LocationClass::CZ, LocationClass::Wait];

    pub fn arity(self) -> usize {
        match self {
            LocationClass::CZ => 2,
            _ => 1,
        }
    }

    /// Mnemonic used in circuit dumps.
    pub fn mnemonic(self) -> &'static str {
        match self {
            LocationClass::PrepPlus => "PREP",
            LocationClass::MeasX => "MEASX",
            LocationClass::CZ => "CZ",
            LocationClass::Wait => "WAIT",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RateKind {
    Diagonal,
    NonDiagonal,
}

/// Fault rate of a location class.
pub fn rate_of<T: Real>(class: LocationClass, which: RateKind, noise: &NoiseParams<T>) -> T {
    use LocationClass::*;
    use RateKind::*;
    match (class, which) {
        (PrepPlus, Diagonal) => noise.eps,
        (PrepPlus, NonDiagonal) => T::zero(),
        (MeasX, Diagonal) => noise.eps_meas,
        (MeasX, NonDiagonal) => T::zero(),
        (CZ, Diagonal) => noise.eps,
        (CZ, NonDiagonal) => noise.eps_nd,
        (Wait, Diagonal) => noise.eps_s,
        (Wait, NonDiagonal) => noise.eps_s_nd,
    }
}
