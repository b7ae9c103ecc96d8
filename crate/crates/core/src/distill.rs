//! Magic-state distillation with noisy CSS operations.

use serde::{Deserialize, Serialize};

use crate::bounds;
use crate::config::GadgetConfig;
use crate::error::{Error, Result};
use crate::noise::NoiseParams;
use crate::scalar::{lit, Real};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum DistillKind {
    /// |+i⟩ from 7 noisy copies.
    PlusI,
    /// |T⟩ from 15 noisy copies.
    T,
}

impl DistillKind {
    pub fn input_count(self) -> u32 {
        match self {
            DistillKind::PlusI => 7,
            DistillKind::T => 15,
        }
    }

    /// Leading coefficient of the ideal protocol's cubic suppression.
    pub fn cubic(self) -> f64 {
        match self {
            DistillKind::PlusI => 7.0,
            DistillKind::T => 35.0,
        }
    }

    /// Multiple of the CSS gate error the protocol cannot go below.
    pub fn floor_factor(self) -> f64 {
        match self {
            DistillKind::PlusI => 4.0,
            DistillKind::T => 8.0,
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s.to_ascii_lowercase().as_str() {
            "plusi" | "plus_i" | "plus-i" | "+i" => Some(DistillKind::PlusI),
            "t" => Some(DistillKind::T),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct DistillParams<T: Real = f64> {
    pub kind: DistillKind,
    pub eps_in: T,
    pub eps_css: T,
    pub rounds: u32,
    /// Overrides for the cubic coefficient and floor factor.
    pub coefficients: Option<(T, T)>,
}

impl<T: Real> DistillParams<T> {
    pub fn new(kind: DistillKind, eps_in: T, eps_css: T, rounds: u32) -> Self {
        DistillParams { kind, eps_in, eps_css, rounds, coefficients: None }
    }

    pub fn with_coefficients(mut self, cubic: T, floor: T) -> Self {
        self.coefficients = Some((cubic, floor));
        self
    }

    pub fn input_count(&self) -> u32 {
        self.kind.input_count()
    }

    fn coeffs(&self) -> (T, T) {
        self.coefficients.unwrap_or((lit(self.kind.cubic()), lit(self.kind.floor_factor())))
    }

    /// The level the schedule converges to, `F·eps_css`.
    pub fn floor(&self) -> T {
        self.coeffs().1 * self.eps_css
    }

    pub fn validate(&self) -> Result<()> {
        for (field, v) in [("eps_in", self.eps_in), ("eps_css", self.eps_css)] {
            if !(v >= T::zero() && v <= T::one()) {
                return Err(Error::InvalidProbability { field, value: v.to_f64().unwrap_or(f64::NAN) });
            }
        }
        if let Some((a, f)) = self.coefficients {
            if !(a >= T::zero() && f >= T::zero()) {
                return Err(Error::InvalidConfig("distillation coefficients must be nonnegative".into()));
            }
        }
        Ok(())
    }

    fn map(&self, x: T) -> T {
        let (a, f) = self.coeffs();
        (a * x * x * x + f * self.eps_css).min(T::one())
    }
}

/// One round: `min(1, A·eps_in³ + F·eps_css)`.
pub fn distill_step<T: Real>(params: &DistillParams<T>) -> Result<T> {
    params.validate()?;
    Ok(params.map(params.eps_in))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Schedule<T: Real = f64> {
    /// Error before distillation, then after each round.
    pub eps: Vec<T>,
    pub floor: T,
    /// First round whose output is within 10% of the floor.
    pub rounds_to_floor: Option<u32>,
}

pub fn distill_schedule<T: Real>(params: &DistillParams<T>) -> Result<Schedule<T>> {
    params.validate()?;
    let floor = params.floor();
    let mut eps = Vec::with_capacity(params.rounds as usize + 1);
    eps.push(params.eps_in);
    let mut x = params.eps_in;
    for _ in 0..params.rounds {
        x = params.map(x);
        eps.push(x);
    }
    let tol = lit::<T>(0.1) * floor;
    let rounds_to_floor = eps.iter().skip(1).position(|&e| (e - floor).abs() <= tol).map(|i| i as u32 + 1);
    Ok(Schedule { eps, floor, rounds_to_floor })
}

/// Rows `(round, eps)` for plotting.
pub fn schedule_csv<T: Real, W: std::io::Write>(schedule: &Schedule<T>, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["round", "eps"])?;
    for (i, e) in schedule.eps.iter().enumerate() {
        w.write_record([i.to_string(), format!("{:e}", e.to_f64().unwrap_or(f64::NAN))])?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EndToEnd<T: Real = f64> {
    pub kind: DistillKind,
    pub eps_inject: T,
    pub eps_css: T,
    /// |+i⟩ ancilla error used by T distillation (fully distilled: `4·eps_css`).
    pub eps_plus_i: Option<T>,
    pub schedule: Schedule<T>,
    pub floor: T,
}

/// Injection followed by `rounds` of distillation with CSS error taken from the CNOT bound.
pub fn end_to_end<T: Real>(noise: &NoiseParams<T>, cfg: &GadgetConfig, kind: DistillKind, rounds: u32) -> Result<EndToEnd<T>> {
    let eps_inject = bounds::injection_bound(cfg, noise)?.prob();
    let eps_css = bounds::cnot_bound(cfg, noise)?.total.prob();
    let params = DistillParams::new(kind, eps_inject, eps_css, rounds);
    let schedule = distill_schedule(&params)?;
    let eps_plus_i = (kind == DistillKind::T).then(|| lit::<T>(DistillKind::PlusI.floor_factor()) * eps_css);
    Ok(EndToEnd { kind, eps_inject, eps_css, eps_plus_i, floor: schedule.floor, schedule })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn t_from_fifteen_percent() {
        let v = distill_step(&DistillParams::<f64>::new(DistillKind::T, 0.15, 0.0, 1)).unwrap();
        assert!((v - 35.0 * 0.15f64.powi(3)).abs() < 1e-15);
        assert!((v - 0.118).abs() < 1e-3);
    }

    #[test]
    fn zero_in_zero_out() {
        for k in [DistillKind::PlusI, DistillKind::T] {
            assert_eq!(distill_step(&DistillParams::new(k, 0.0, 0.0, 1)).unwrap(), 0.0);
            assert_eq!(distill_step(&DistillParams::new(k, 0.0, 1e-5, 1)).unwrap(), k.floor_factor() * 1e-5);
        }
    }

    #[test]
    fn schedule_levels_off() {
        let s = distill_schedule(&DistillParams::<f64>::new(DistillKind::T, 0.15, 1e-5, 8)).unwrap();
        assert_eq!(s.eps.len(), 9);
        assert!(s.eps.windows(2).all(|w| w[1] <= w[0]));
        assert!((s.eps[8] / 8e-5 - 1.0).abs() < 1e-6);
        assert!(s.rounds_to_floor.is_some());
        let none = distill_schedule(&DistillParams::new(DistillKind::PlusI, 0.1, 1e-5, 0)).unwrap();
        assert_eq!(none.eps, vec![0.1]);
        assert_eq!(none.rounds_to_floor, None);
    }

    #[test]
    fn rejects_bad_probability() {
        assert!(distill_step(&DistillParams::new(DistillKind::T, 1.5, 0.0, 1)).is_err());
        assert!(distill_step(&DistillParams::new(DistillKind::T, 0.1, -1e-3, 1)).is_err());
    }

    #[test]
    fn generic_f32() {
        let v = distill_step(&DistillParams::<f32>::new(DistillKind::PlusI, 0.1, 1e-4, 1)).unwrap();
        assert!((v - (7e-3 + 4e-4)).abs() < 1e-6);
    }
}
