//! Closed-form failure bounds for the gadgets, evaluated in log space.

use serde::ser::{SerializeStruct, Serializer};
use serde::Serialize;

use crate::config::{GadgetConfig, Locality};
use crate::error::{Error, Result};
use crate::noise::NoiseParams;
use crate::scalar::{count, ln_binom, ln_pow, log_add, log_sum_exp, LogProb, Real};

/// Switches for terms the derivation leaves open.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct BoundOptions {
    /// Add `m·C(n,⌈n/2⌉)(2r₊ε′)^⌈n/2⌉` to the |+⟩ preparation bound.
    pub plus_misdecode: bool,
}

impl Default for BoundOptions {
    fn default() -> Self {
        BoundOptions { plus_misdecode: true }
    }
}

/// Smallest number of winning rounds compatible with `u` faulty rounds and
/// `s` rounds with non-diagonal faults, out of `r_prime`.
pub fn t_min(r_prime: u32, u: u32, s: u32) -> u32 {
    if u >= r_prime {
        0
    } else {
        (r_prime - u).div_ceil(s + 2)
    }
}

#[derive(Clone, Copy, Debug)]
pub(crate) struct Rates<T> {
    pub e: T,
    pub d: T,
    pub s: T,
    pub sd: T,
    pub em: T,
    pub psi: T,
}

impl<T: Real> Rates<T> {
    pub fn of(noise: &NoiseParams<T>) -> Self {
        Rates { e: noise.eps, d: noise.eps_nd, s: noise.eps_s, sd: noise.eps_s_nd, em: noise.eps_meas, psi: noise.eps_psi }
    }

    /// Gate location charged at (ε+ε′).
    fn gate(&self) -> T {
        self.e + self.d
    }

    /// Measurement location in a count otherwise charged at (ε+ε′).
    fn meas(&self) -> T {
        self.em + self.d
    }

    /// One syndrome bit: prep, two CZ, X measurement.
    fn syndrome_bit(&self) -> T {
        count::<T>(3) * self.e + self.em + count::<T>(2) * self.d
    }
}

fn c<T: Real>(k: u64) -> T {
    count(k)
}

pub(crate) fn clamp<T: Real>(x: T) -> T {
    if x > T::zero() {
        T::zero()
    } else {
        x
    }
}

/// `n(2r₊+3r+2)` data-qubit locations of an M_X column, one of them a measurement.
fn col_rate<T: Real>(n: u32, r: u32, r_plus: u32, z: &Rates<T>) -> T {
    let (n, r, rp) = (n as u64, r as u64, r_plus as u64);
    c::<T>(n) * (c::<T>(2 * rp + 3 * r + 1) * z.gate() + z.meas())
}

pub(crate) fn ln_mx<T: Real>(cfg: &GadgetConfig, z: &Rates<T>) -> T {
    let (n, m, r, rp) = (cfg.n as u64, cfg.m as u64, cfg.r as u64, cfg.r_prime as u64);
    let h = m.div_ceil(2);
    let col = col_rate(cfg.n, cfg.r, cfg.r_plus, z);
    let v = match cfg.locality {
        Locality::Local => {
            let b = col + c::<T>(32 * n * r * rp) * (z.s + z.sd) + c::<T>(8 * n * r * rp) * z.d;
            ln_binom::<T>(m, h) + ln_pow(b, h)
        }
        Locality::Nonlocal if cfg.p >= cfg.m => {
            let b = col + c::<T>(6 * n * r * rp) * z.d;
            ln_binom::<T>(m, h) + ln_pow(b, h)
        }
        Locality::Nonlocal => {
            let p = cfg.p as u64;
            let fan = m.div_ceil(p);
            let kmax = (m + 1).div_ceil(2 * fan);
            let frame = c::<T>(8 * n * r * fan) * z.d + c::<T>(6 * n * r * rp) * z.d;
            let terms: Vec<T> = (0..=kmax)
                .map(|k| {
                    let lk = h.saturating_sub(fan * k);
                    ln_binom::<T>(p, k) + ln_pow(frame, k) + ln_binom::<T>(m, lk) + ln_pow(col, lk)
                })
                .collect();
            log_sum_exp(&terms)
        }
    };
    clamp(v)
}

/// Row bracket of a `w`-block Z-type measurement (before the n-row majority).
pub(crate) fn ln_mz_row<T: Real>(cfg: &GadgetConfig, w: u32, z: &Rates<T>) -> T {
    let (m, r, rp, rpl) = (cfg.m as u64, cfg.r as u64, cfg.r_prime as u64, cfg.r_plus as u64);
    let w = w as u64;
    let p = cfg.cat_len(w as u32) as u64;
    let prior = match w {
        1 => 2 * rpl + 3 * r,
        2 => 2 * rpl + 3 * r,
        _ => 2 * rpl + 4 * r,
    };
    let store = match (cfg.locality, w) {
        (Locality::Local, 3) => c::<T>(32 * r * rp * w * m) * z.sd,
        (Locality::Local, _) => c::<T>(24 * r * rp * w * m) * z.sd,
        (Locality::Nonlocal, _) => T::zero(),
    };
    let linear = c::<T>(w * m * prior) * z.d + store;
    let locs = c::<T>(w * m + p + 2 * p * rp) * z.gate() + c::<T>(p) * z.meas();
    let h = r.div_ceil(2);
    log_add(linear.ln(), ln_binom::<T>(r, h) + ln_pow(locs, h))
}

pub(crate) fn ln_mz<T: Real>(cfg: &GadgetConfig, w: u32, z: &Rates<T>) -> T {
    let n = cfg.n as u64;
    let h = n.div_ceil(2);
    let row = ln_mz_row(cfg, w, z);
    clamp(ln_binom::<T>(n, h) + if h == 0 { T::zero() } else { c::<T>(h) * row })
}

/// Per-unit preparation sum and misdecode term for a length-`len` cat with
/// `rounds` syndrome rounds. The caller scales by `nr` (cats) or `m` (|+⟩).
#[derive(Clone, Copy, Debug)]
pub(crate) struct PrepCore<T> {
    pub sum: T,
    pub misdecode: T,
}

pub(crate) fn prep_core<T: Real>(len: u32, rounds: u32, locality: Locality, z: &Rates<T>) -> PrepCore<T> {
    let l = len as u64;
    let rr = rounds as u64;
    let bit = z.syndrome_bit();
    let mut terms = Vec::with_capacity(((rr + 1) * (rr + 1)) as usize);
    let (a, b, pair) = match locality {
        Locality::Nonlocal => (c::<T>(l) * bit, c::<T>(2 * l) * z.d, ln_binom::<T>(l, 2)),
        Locality::Local => (c::<T>(l) * bit + c::<T>(4 * l) * (z.s + z.sd), c::<T>(2 * l) * z.d + c::<T>(4 * l) * z.sd, T::zero()),
    };
    for s in 0..=rr {
        for u in 0..=rr {
            let t = t_min(rounds, u as u32, s as u32) as u64;
            if t < 1 || u + t > rr {
                continue;
            }
            let comb = ln_binom::<T>(rr, s) + ln_binom::<T>(rr, u + t) + ln_binom::<T>(u + t, u);
            let body = match locality {
                Locality::Nonlocal => pair + ln_pow(bit, 2 * t) + ln_pow(a, u) + ln_pow(b, s),
                Locality::Local => ln_pow(a, t + u) + ln_pow(b, s),
            };
            terms.push(comb + body);
        }
    }
    let q = l.div_ceil(2);
    let frame = match locality {
        Locality::Nonlocal => c::<T>(2 * rr) * z.d,
        Locality::Local => c::<T>(2 * rr) * z.d + c::<T>(4 * rr) * z.sd,
    };
    PrepCore { sum: log_sum_exp(&terms), misdecode: ln_binom::<T>(l, q) + ln_pow(frame, q) }
}

pub(crate) fn ln_cat<T: Real>(cfg: &GadgetConfig, w: u32, z: &Rates<T>) -> T {
    let core = prep_core(cfg.cat_len(w), cfg.r_prime, cfg.locality, z);
    clamp(count::<T>(cfg.n as u64 * cfg.r as u64).ln() + log_add(core.sum, core.misdecode))
}

pub(crate) fn ln_plus<T: Real>(cfg: &GadgetConfig, opts: BoundOptions, z: &Rates<T>) -> T {
    let core = prep_core(cfg.n, cfg.r_plus, cfg.locality, z);
    let v = if opts.plus_misdecode { log_add(core.sum, core.misdecode) } else { core.sum };
    clamp(count::<T>(cfg.m as u64).ln() + v)
}

pub(crate) fn ln_injection<T: Real>(cfg: &GadgetConfig, z: &Rates<T>) -> T {
    let (m, r, rp, rpl) = (cfg.m as u64, cfg.r as u64, cfg.r_prime as u64, cfg.r_plus as u64);
    let mx = c::<T>(r) * z.gate() + z.meas() + c::<T>(8 * (r - 1) * rp) * (z.s + z.sd) + c::<T>(2 * (m + 1) * r * rp) * z.d;
    let zz_lin = c::<T>(r) * z.d + c::<T>(8 * rp * (r - 1)) * z.sd + c::<T>(m * (2 * rpl + r)) * z.d;
    let locs = c::<T>((m + 1) * (rp + 2)) * z.gate() + c::<T>(m + 1) * z.meas();
    let h = r.div_ceil(2);
    let tail = ln_binom::<T>(r, h) + ln_pow(locs, h);
    clamp(log_sum_exp(&[z.psi.ln(), (mx + zz_lin).ln(), tail]))
}

fn checked<T: Real>(cfg: &GadgetConfig, noise: &NoiseParams<T>) -> Result<Rates<T>> {
    cfg.validate()?;
    noise.validate()?;
    Ok(Rates::of(noise))
}

/// Failure bound of M_X^L on a block measured after four Z-type measurements.
pub fn mx_bound<T: Real>(cfg: &GadgetConfig, noise: &NoiseParams<T>) -> Result<LogProb<T>> {
    let z = checked(cfg, noise)?;
    Ok(LogProb(ln_mx(cfg, &z)))
}

pub fn mzz_bound<T: Real>(cfg: &GadgetConfig, noise: &NoiseParams<T>) -> Result<LogProb<T>> {
    let z = checked(cfg, noise)?;
    Ok(LogProb(ln_mz(cfg, 2, &z)))
}

pub fn mzzz_bound<T: Real>(cfg: &GadgetConfig, noise: &NoiseParams<T>) -> Result<LogProb<T>> {
    let z = checked(cfg, noise)?;
    Ok(LogProb(ln_mz(cfg, 3, &z)))
}

/// Bound on a single row of a single-block Z^L measurement repeated `r` times.
pub fn mz_row_bound<T: Real>(cfg: &GadgetConfig, noise: &NoiseParams<T>) -> Result<LogProb<T>> {
    let z = checked(cfg, noise)?;
    Ok(LogProb(clamp(ln_mz_row(cfg, 1, &z))))
}

/// Failure bound summed over the `nr` cat preparations of one Z-type measurement.
pub fn cat_prep_bound<T: Real>(cfg: &GadgetConfig, noise: &NoiseParams<T>, weight_blocks: u32) -> Result<LogProb<T>> {
    if !(2..=3).contains(&weight_blocks) {
        return Err(Error::InvalidWeight(weight_blocks));
    }
    let z = checked(cfg, noise)?;
    Ok(LogProb(ln_cat(cfg, weight_blocks, &z)))
}

/// Failure bound of one cat preparation of length `len`.
pub fn single_cat_bound<T: Real>(len: u32, r_prime: u32, locality: Locality, noise: &NoiseParams<T>) -> Result<LogProb<T>> {
    noise.validate()?;
    if len == 0 || r_prime == 0 {
        return Err(Error::InvalidConfig("cat length and r_prime must be >= 1".into()));
    }
    let core = prep_core(len, r_prime, locality, &Rates::of(noise));
    Ok(LogProb(clamp(log_add(core.sum, core.misdecode))))
}

pub fn plus_prep_bound<T: Real>(cfg: &GadgetConfig, noise: &NoiseParams<T>) -> Result<LogProb<T>> {
    plus_prep_bound_with(cfg, noise, BoundOptions::default())
}

pub fn plus_prep_bound_with<T: Real>(cfg: &GadgetConfig, noise: &NoiseParams<T>, opts: BoundOptions) -> Result<LogProb<T>> {
    let z = checked(cfg, noise)?;
    Ok(LogProb(ln_plus(cfg, opts, &z)))
}

pub fn injection_bound<T: Real>(cfg: &GadgetConfig, noise: &NoiseParams<T>) -> Result<LogProb<T>> {
    let z = checked(cfg, noise)?;
    Ok(LogProb(ln_injection(cfg, &z)))
}

pub fn cnot_bound<T: Real>(cfg: &GadgetConfig, noise: &NoiseParams<T>) -> Result<BoundBreakdown<T>> {
    cnot_bound_with(cfg, noise, BoundOptions::default())
}

pub fn cnot_bound_with<T: Real>(cfg: &GadgetConfig, noise: &NoiseParams<T>, opts: BoundOptions) -> Result<BoundBreakdown<T>> {
    let z = checked(cfg, noise)?;
    Ok(breakdown(ln_mz(cfg, 2, &z), ln_mz(cfg, 3, &z), ln_mx(cfg, &z), ln_plus(cfg, opts, &z), ln_cat(cfg, 2, &z), ln_cat(cfg, 3, &z)))
}

pub(crate) fn breakdown<T: Real>(mzz: T, mzzz: T, mx: T, plus: T, zz: T, zzz: T) -> BoundBreakdown<T> {
    let terms = vec![
        BoundTerm { name: "mzz_star", multiplicity: 1, value: LogProb(mzz) },
        BoundTerm { name: "mzzz_star", multiplicity: 1, value: LogProb(mzzz) },
        BoundTerm { name: "mx_star", multiplicity: 2, value: LogProb(mx) },
        BoundTerm { name: "plus_prep", multiplicity: 4, value: LogProb(plus) },
        BoundTerm { name: "zz_cat_prep", multiplicity: 3, value: LogProb(zz) },
        BoundTerm { name: "zzz_cat_prep", multiplicity: 3, value: LogProb(zzz) },
    ];
    BoundBreakdown { total: LogProb(weighted_total(mzz, mzzz, mx, plus, zz, zzz)), terms }
}

/// `mzz + mzzz + 2mx + 4plus + 3zz + 3zzz`, clamped, in log space.
pub(crate) fn weighted_total<T: Real>(mzz: T, mzzz: T, mx: T, plus: T, zz: T, zzz: T) -> T {
    let w = [
        LogProb(mzz).0,
        LogProb(mzzz).0,
        LogProb(mx).times(2).0,
        LogProb(plus).times(4).0,
        LogProb(zz).times(3).0,
        LogProb(zzz).times(3).0,
    ];
    clamp(log_sum_exp(&w))
}

/// One weighted term of the CNOT bound.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundTerm<T: Real = f64> {
    pub name: &'static str,
    pub multiplicity: u32,
    pub value: LogProb<T>,
}

/// Per-term decomposition of the CNOT bound.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundBreakdown<T: Real = f64> {
    pub terms: Vec<BoundTerm<T>>,
    pub total: LogProb<T>,
}

impl<T: Real> BoundBreakdown<T> {
    pub fn term(&self, name: &str) -> Option<LogProb<T>> {
        self.terms.iter().find(|t| t.name == name).map(|t| t.value)
    }

    /// Name of the term with the largest weighted contribution.
    pub fn dominant(&self) -> &'static str {
        self.terms
            .iter()
            .max_by(|a, b| {
                let x = a.value.times(a.multiplicity as u64).0;
                let y = b.value.times(b.multiplicity as u64).0;
                x.partial_cmp(&y).unwrap_or(std::cmp::Ordering::Equal)
            })
            .map(|t| t.name)
            .unwrap_or("")
    }
}

impl<T: Real> Serialize for BoundTerm<T> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("BoundTerm", 4)?;
        st.serialize_field("name", self.name)?;
        st.serialize_field("multiplicity", &self.multiplicity)?;
        st.serialize_field("prob", &self.value.prob().to_f64().unwrap_or(0.0))?;
        st.serialize_field("log10", &self.value.log10_string())?;
        st.end()
    }
}

impl<T: Real> Serialize for BoundBreakdown<T> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("BoundBreakdown", 2)?;
        st.serialize_field("total", &self.total)?;
        st.serialize_field("terms", &self.terms)?;
        st.end()
    }
}
