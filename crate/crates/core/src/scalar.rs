//! Scalar abstraction and log-space helpers.

use std::fmt::{self, Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, ToPrimitive};
use serde::de::DeserializeOwned;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

/// Floating scalar the bounds and distillation code are written against.
pub trait Real:
    Float + FromPrimitive + ToPrimitive + Sum + Debug + Display + Default + Send + Sync + Serialize + DeserializeOwned + 'static
{
}

impl Real for f32 {}
impl Real for f64 {}

/// Converts an `f64` constant into `T`.
#[inline]
pub fn lit<T: Real>(x: f64) -> T {
    T::from_f64(x).expect("f64 literal representable")
}

/// Converts an integer count into `T`.
#[inline]
pub fn count<T: Real>(k: u64) -> T {
    T::from_u64(k).expect("count representable")
}

/// `ln C(a, b)`, or `-inf` when `b > a`.
pub fn ln_binom<T: Real>(a: u64, b: u64) -> T {
    if b > a {
        return T::neg_infinity();
    }
    if b == 0 || b == a {
        return T::zero();
    }
    let b = b.min(a - b);
    // small arguments stay exact in u128
    if a <= 120 {
        let mut acc: u128 = 1;
        for i in 0..b {
            acc = acc * (a - i) as u128 / (i + 1) as u128;
        }
        return lit::<T>((acc as f64).ln());
    }
    use statrs::function::gamma::ln_gamma;
    let v = ln_gamma(a as f64 + 1.0) - ln_gamma(b as f64 + 1.0) - ln_gamma((a - b) as f64 + 1.0);
    lit(v)
}

/// `k * ln(x)` with the convention `x^0 = 1` even for `x = 0`.
#[inline]
pub fn ln_pow<T: Real>(x: T, k: u64) -> T {
    if k == 0 {
        T::zero()
    } else {
        count::<T>(k) * x.ln()
    }
}

/// `ln(Σ exp(x_i))`, tolerant of `-inf` entries.
pub fn log_sum_exp<T: Real>(terms: &[T]) -> T {
    let max = terms.iter().copied().fold(T::neg_infinity(), T::max);
    if max == T::neg_infinity() {
        return max;
    }
    if max == T::infinity() {
        return max;
    }
    let s: T = terms.iter().map(|&x| (x - max).exp()).sum();
    max + s.ln()
}

/// `ln(exp(a) + exp(b))`.
#[inline]
pub fn log_add<T: Real>(a: T, b: T) -> T {
    log_sum_exp(&[a, b])
}

/// A probability held as its natural logarithm.
#[derive(Clone, Copy, PartialEq, PartialOrd, Default)]
pub struct LogProb<T: Real = f64>(pub T);

impl<T: Real> LogProb<T> {
    pub fn zero() -> Self {
        LogProb(T::neg_infinity())
    }

    pub fn one() -> Self {
        LogProb(T::zero())
    }

    pub fn from_prob(p: T) -> Self {
        LogProb(p.ln())
    }

    /// Natural log.
    pub fn ln(self) -> T {
        self.0
    }

    pub fn log10(self) -> T {
        self.0 / lit::<T>(std::f64::consts::LN_10)
    }

    /// Linear value; underflows to zero below the type's range.
    pub fn prob(self) -> T {
        self.0.exp()
    }

    pub fn is_zero(self) -> bool {
        self.0 == T::neg_infinity()
    }

    /// Caps the probability at one.
    pub fn clamp_one(self) -> Self {
        if self.0 > T::zero() {
            LogProb(T::zero())
        } else {
            self
        }
    }

    /// Probability of the union bound `self + other`.
    pub fn plus(self, other: Self) -> Self {
        LogProb(log_add(self.0, other.0))
    }

    /// `k * self` in linear space.
    pub fn times(self, k: u64) -> Self {
        if k == 0 {
            LogProb::zero()
        } else {
            LogProb(self.0 + count::<T>(k).ln())
        }
    }

    /// `log10` rendered for text output; `-inf` for an exact zero.
    pub fn log10_string(self) -> String {
        if self.is_zero() {
            "-inf".to_string()
        } else {
            format!("{:.6}", self.log10().to_f64().unwrap_or(f64::NAN))
        }
    }
}

/// Serialized as `{prob, log10}`; `log10` is a string so values below the
/// f64 range survive.
impl<T: Real> Serialize for LogProb<T> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("Prob", 2)?;
        st.serialize_field("prob", &self.prob().to_f64().unwrap_or(0.0))?;
        st.serialize_field("log10", &self.log10_string())?;
        st.end()
    }
}

impl<T: Real> Debug for LogProb<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LogProb(10^{})", self.log10_string())
    }
}

impl<T: Real> Display for LogProb<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            write!(f, "0")
        } else {
            write!(f, "1e{}", self.log10_string())
        }
    }
}
