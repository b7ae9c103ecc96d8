//! Exact rational re-derivation of every bound, compared in log space.

use bsft_core::bounds::{
    cat_prep_bound, cnot_bound, cnot_bound_with, injection_bound, mx_bound, mz_row_bound, mzz_bound, mzzz_bound, plus_prep_bound,
    plus_prep_bound_with, single_cat_bound,
};
use bsft_core::{BoundOptions, GadgetConfig, Locality, Noise};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

type Q = BigRational;

fn q(v: u64) -> Q {
    Q::from_integer(BigInt::from(v))
}

/// Exact value of a decimal literal such as "2.5e-4".
fn dec(s: &str) -> Q {
    let (mant, exp) = match s.split_once(['e', 'E']) {
        Some((m, e)) => (m, e.parse::<i32>().unwrap()),
        None => (s, 0),
    };
    let (int, frac) = mant.split_once('.').unwrap_or((mant, ""));
    let digits: BigInt = format!("{int}{frac}").parse().unwrap();
    let e = exp - frac.len() as i32;
    let ten = BigInt::from(10);
    if e >= 0 {
        Q::from_integer(digits * num_traits::pow(ten, e as usize))
    } else {
        Q::new(digits, num_traits::pow(ten, (-e) as usize))
    }
}

fn binom(a: u64, b: u64) -> Q {
    if b > a {
        return Q::zero();
    }
    let mut v = BigInt::one();
    for i in 0..b {
        v = v * BigInt::from(a - i) / BigInt::from(i + 1);
    }
    Q::from_integer(v)
}

fn pw(x: &Q, k: u64) -> Q {
    num_traits::pow(x.clone(), k as usize)
}

fn clamp(x: Q) -> Q {
    if x > Q::one() {
        Q::one()
    } else {
        x
    }
}

fn ln_int(n: &BigInt) -> f64 {
    let bits = n.bits();
    let shift = bits.saturating_sub(64);
    let top = (n >> shift).to_f64().unwrap();
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

fn ln(x: &Q) -> f64 {
    if x.is_zero() {
        return f64::NEG_INFINITY;
    }
    assert!(x.is_positive());
    ln_int(x.numer()) - ln_int(x.denom())
}

struct Z {
    e: Q,
    d: Q,
    s: Q,
    sd: Q,
    m: Q,
    psi: Q,
}

struct Point {
    cfg: GadgetConfig,
    z: Z,
    noise: Noise,
}

/// `(eps, eps_nd, eps_s, eps_s_nd, eps_meas, eps_psi)` as decimal strings.
fn point(cfg: GadgetConfig, rates: [&str; 6]) -> Point {
    let [e, d, s, sd, m, psi] = rates;
    let f = |s: &str| s.parse::<f64>().unwrap();
    let noise = Noise::new(f(e), f(d)).with_storage(f(s), f(sd)).with_meas(f(m)).with_psi(f(psi));
    Point { cfg, z: Z { e: dec(e), d: dec(d), s: dec(s), sd: dec(sd), m: dec(m), psi: dec(psi) }, noise }
}

fn col_rate(n: u64, r: u64, rpl: u64, z: &Z) -> Q {
    q(n) * (q(2 * rpl + 3 * r + 1) * (&z.e + &z.d) + (&z.m + &z.d))
}

fn mx(c: &GadgetConfig, z: &Z) -> Q {
    let (n, m, p, r, rp, rpl) = (c.n as u64, c.m as u64, c.p as u64, c.r as u64, c.r_prime as u64, c.r_plus as u64);
    let h = m.div_ceil(2);
    let col = col_rate(n, r, rpl, z);
    if c.locality == Locality::Local {
        let b = col + q(32 * n * r * rp) * (&z.s + &z.sd) + q(8 * n * r * rp) * &z.d;
        return clamp(binom(m, h) * pw(&b, h));
    }
    if p >= m {
        return clamp(binom(m, h) * pw(&(col + q(6 * n * r * rp) * &z.d), h));
    }
    let fan = m.div_ceil(p);
    let kmax = (m + 1).div_ceil(2 * fan);
    let frame = q(8 * n * r * fan) * &z.d + q(6 * n * r * rp) * &z.d;
    let mut tot = Q::zero();
    for k in 0..=kmax {
        let lk = h.saturating_sub(fan * k);
        tot += binom(p, k) * pw(&frame, k) * binom(m, lk) * pw(&col, lk);
    }
    clamp(tot)
}

/// Row bracket of a `w`-block Z measurement, before the row majority.
fn mz_row(c: &GadgetConfig, w: u64, z: &Z) -> Q {
    let (m, r, rp, rpl) = (c.m as u64, c.r as u64, c.r_prime as u64, c.r_plus as u64);
    let local = c.locality == Locality::Local;
    let p = if local { w * m } else { c.p as u64 };
    let pref = if w == 3 { 2 * rpl + 4 * r } else { 2 * rpl + 3 * r };
    let store = if local { q(if w == 3 { 32 } else { 24 } * r * rp * w * m) * &z.sd } else { Q::zero() };
    let locs = q(w * m + p + 2 * p * rp) * (&z.e + &z.d) + q(p) * (&z.m + &z.d);
    q(w * m * pref) * &z.d + store + binom(r, r.div_ceil(2)) * pw(&locs, r.div_ceil(2))
}

fn mz(c: &GadgetConfig, w: u64, z: &Z) -> Q {
    let n = c.n as u64;
    let h = n.div_ceil(2);
    clamp(binom(n, h) * pw(&mz_row(c, w, z), h))
}

fn t_min(rp: u64, u: u64, s: u64) -> u64 {
    if u >= rp {
        0
    } else {
        (rp - u).div_ceil(s + 2)
    }
}

fn prep_sum(len: u64, rounds: u64, local: bool, z: &Z) -> Q {
    let bit = q(3) * &z.e + &z.m + q(2) * &z.d;
    let mut tot = Q::zero();
    for s in 0..=rounds {
        for u in 0..=rounds {
            let t = t_min(rounds, u, s);
            if t < 1 || u + t > rounds {
                continue;
            }
            let c = binom(rounds, s) * binom(rounds, u + t) * binom(u + t, u);
            tot += if local {
                let a = q(len) * &bit + q(4 * len) * (&z.s + &z.sd);
                let b = q(2 * len) * &z.d + q(4 * len) * &z.sd;
                c * pw(&a, t + u) * pw(&b, s)
            } else {
                c * binom(len, 2) * pw(&bit, 2 * t) * pw(&(q(len) * &bit), u) * pw(&(q(2 * len) * &z.d), s)
            };
        }
    }
    tot
}

fn misdecode(len: u64, rounds: u64, local: bool, z: &Z) -> Q {
    let h = len.div_ceil(2);
    let mut f = q(2 * rounds) * &z.d;
    if local {
        f += q(4 * rounds) * &z.sd;
    }
    binom(len, h) * pw(&f, h)
}

fn cat_len(c: &GadgetConfig, w: u64) -> u64 {
    match c.locality {
        Locality::Local => w * c.m as u64,
        Locality::Nonlocal => c.p as u64,
    }
}

fn single_cat(len: u64, rounds: u64, local: bool, z: &Z) -> Q {
    clamp(prep_sum(len, rounds, local, z) + misdecode(len, rounds, local, z))
}

fn cat(c: &GadgetConfig, w: u64, z: &Z) -> Q {
    let local = c.locality == Locality::Local;
    let (len, rp) = (cat_len(c, w), c.r_prime as u64);
    clamp(q(c.n as u64 * c.r as u64) * (prep_sum(len, rp, local, z) + misdecode(len, rp, local, z)))
}

fn plus(c: &GadgetConfig, z: &Z, with_misdecode: bool) -> Q {
    let local = c.locality == Locality::Local;
    let (n, rpl) = (c.n as u64, c.r_plus as u64);
    let mut v = prep_sum(n, rpl, local, z);
    if with_misdecode {
        v += misdecode(n, rpl, local, z);
    }
    clamp(q(c.m as u64) * v)
}

fn injection(c: &GadgetConfig, z: &Z) -> Q {
    let (m, r, rp, rpl) = (c.m as u64, c.r as u64, c.r_prime as u64, c.r_plus as u64);
    let g = &z.e + &z.d;
    let meas = &z.m + &z.d;
    let mxp = q(r) * &g + &meas + q(8 * (r - 1) * rp) * (&z.s + &z.sd) + q(2 * (m + 1) * r * rp) * &z.d;
    let locs = q((m + 1) * (rp + 2)) * &g + q(m + 1) * &meas;
    let mzzp = q(r) * &z.d + q(8 * rp * (r - 1)) * &z.sd + q(m * (2 * rpl + r)) * &z.d + binom(r, r.div_ceil(2)) * pw(&locs, r.div_ceil(2));
    clamp(&z.psi + mxp + mzzp)
}

fn cnot_terms(c: &GadgetConfig, z: &Z, with_misdecode: bool) -> [(&'static str, Q); 6] {
    [
        ("mzz_star", mz(c, 2, z)),
        ("mzzz_star", mz(c, 3, z)),
        ("mx_star", mx(c, z)),
        ("plus_prep", plus(c, z, with_misdecode)),
        ("zz_cat_prep", cat(c, 2, z)),
        ("zzz_cat_prep", cat(c, 3, z)),
    ]
}

fn cnot_total(c: &GadgetConfig, z: &Z, with_misdecode: bool) -> Q {
    let [a, b, x, p, zz, zzz] = cnot_terms(c, z, with_misdecode).map(|t| t.1);
    clamp(a + b + q(2) * x + q(4) * p + q(3) * zz + q(3) * zzz)
}

fn points() -> Vec<Point> {
    let nl = GadgetConfig::nonlocal;
    let lo = GadgetConfig::local;
    vec![
        point(nl(3, 9, 27, 3, 3, 3), ["1e-4", "1e-8", "0", "0", "1e-4", "0"]),
        point(nl(3, 9, 3, 3, 3, 3), ["1e-4", "1e-8", "0", "0", "1e-4", "0"]),
        point(nl(5, 25, 5, 5, 4, 6), ["1e-3", "1e-5", "0", "0", "1e-3", "0"]),
        point(lo(3, 9, 3, 3, 3), ["1e-4", "1e-8", "1e-5", "1e-9", "1e-4", "0"]),
        point(lo(5, 13, 13, 16, 9), ["1e-4", "1e-8", "0", "0", "1e-4", "0"]),
        point(nl(15, 125, 25, 11, 13, 12), ["1e-4", "1e-8", "0", "0", "1e-4", "0"]),
        point(nl(1, 1, 1, 1, 1, 1), ["1e-2", "1e-2", "0", "0", "1e-2", "0"]),
        point(nl(1, 3, 3, 1, 1, 1), ["5e-2", "5e-3", "0", "0", "5e-2", "0"]),
        point(nl(3, 9, 9, 3, 2, 2), ["1e-3", "1e-5", "0", "0", "5e-3", "0"]),
        point(lo(3, 7, 5, 4, 3), ["1e-4", "1e-7", "0", "0", "1e-4", "1e-4"]),
        point(nl(7, 51, 17, 7, 8, 10), ["2e-4", "2e-8", "0", "0", "2e-4", "0"]),
        point(lo(1, 3, 1, 1, 1), ["2e-2", "2e-3", "0", "0", "2e-2", "0"]),
        point(nl(21, 151, 151, 15, 30, 30), ["1e-5", "1e-10", "0", "0", "1e-5", "0"]),
        point(nl(9, 45, 45, 5, 6, 6), ["3e-4", "3e-6", "1e-5", "1e-7", "6e-4", "0"]),
        point(lo(9, 31, 7, 10, 8), ["1e-4", "1e-8", "1e-6", "1e-10", "2e-4", "0"]),
        point(nl(3, 9, 2, 1, 5, 1), ["1e-3", "1e-3", "0", "0", "1e-3", "0"]),
        point(nl(5, 11, 4, 3, 2, 3), ["5e-4", "5e-5", "0", "0", "5e-4", "0"]),
        point(nl(3, 5, 15, 3, 2, 2), ["5e-2", "5e-4", "0", "0", "5e-2", "0"]),
        point(lo(11, 61, 9, 12, 10), ["1e-4", "1e-9", "0", "0", "1e-4", "0"]),
        point(nl(1, 151, 76, 1, 1, 1), ["1e-4", "1e-6", "0", "0", "1e-4", "0"]),
        point(lo(3, 3, 3, 2, 2), ["1e-3", "1e-5", "1e-4", "1e-6", "1e-3", "1e-3"]),
        point(nl(13, 99, 33, 9, 20, 15), ["1e-4", "1e-6", "0", "0", "3e-4", "2.5e-4"]),
    ]
}

const TOL: f64 = 1e-9;

/// Relative error of the probabilities, measured as the log difference.
fn assert_close(what: &str, cfg: &GadgetConfig, got: f64, want: &Q) {
    let w = ln(want);
    if w == f64::NEG_INFINITY {
        assert_eq!(got, f64::NEG_INFINITY, "{what} at {cfg:?}");
        return;
    }
    assert!((got - w).abs() <= TOL, "{what} at {cfg:?}: ln {got} vs oracle {w}");
}

#[test]
fn regression_set_is_large_enough() {
    let pts = points();
    assert!(pts.len() >= 20);
    assert!(pts.iter().any(|p| p.cfg.locality == Locality::Local));
    assert!(pts.iter().any(|p| p.cfg.locality == Locality::Nonlocal && p.cfg.p < p.cfg.m));
}

#[test]
fn measurement_bounds_match_oracle() {
    for p in points() {
        let c = &p.cfg;
        assert_close("mx", c, mx_bound(c, &p.noise).unwrap().0, &mx(c, &p.z));
        assert_close("mzz", c, mzz_bound(c, &p.noise).unwrap().0, &mz(c, 2, &p.z));
        assert_close("mzzz", c, mzzz_bound(c, &p.noise).unwrap().0, &mz(c, 3, &p.z));
        assert_close("mz_row", c, mz_row_bound(c, &p.noise).unwrap().0, &clamp(mz_row(c, 1, &p.z)));
    }
}

#[test]
fn preparation_bounds_match_oracle() {
    for p in points() {
        let c = &p.cfg;
        let local = c.locality == Locality::Local;
        for w in [2, 3] {
            assert_close("cat_prep", c, cat_prep_bound(c, &p.noise, w as u32).unwrap().0, &cat(c, w, &p.z));
            let len = cat_len(c, w);
            let single = single_cat_bound(len as u32, c.r_prime, c.locality, &p.noise).unwrap().0;
            assert_close("single_cat", c, single, &single_cat(len, c.r_prime as u64, local, &p.z));
        }
        assert_close("plus_prep", c, plus_prep_bound(c, &p.noise).unwrap().0, &plus(c, &p.z, true));
        let off = BoundOptions { plus_misdecode: false };
        assert_close("plus_prep_no_misdecode", c, plus_prep_bound_with(c, &p.noise, off).unwrap().0, &plus(c, &p.z, false));
    }
}

#[test]
fn injection_matches_oracle() {
    for p in points() {
        let c = &p.cfg;
        assert_close("injection", c, injection_bound(c, &p.noise).unwrap().0, &injection(c, &p.z));
    }
}

#[test]
fn cnot_breakdown_matches_oracle() {
    for p in points() {
        let c = &p.cfg;
        let b = cnot_bound(c, &p.noise).unwrap();
        assert_close("cnot", c, b.total.0, &cnot_total(c, &p.z, true));
        for (name, want) in cnot_terms(c, &p.z, true) {
            assert_close(name, c, b.term(name).unwrap().0, &want);
        }
        let off = cnot_bound_with(c, &p.noise, BoundOptions { plus_misdecode: false }).unwrap();
        assert_close("cnot_no_misdecode", c, off.total.0, &cnot_total(c, &p.z, false));
    }
}

#[test]
fn some_points_are_clamped_and_some_are_tiny() {
    let totals: Vec<f64> = points().iter().map(|p| ln(&cnot_total(&p.cfg, &p.z, true))).collect();
    assert!(totals.contains(&0.0));
    assert!(totals.iter().any(|&t| t < -40.0));
}

/// Natural logs from a separate 60-digit mpmath evaluation of the same formulas.
#[test]
fn frozen_high_precision_values() {
    let g = Noise::biased(1e-4, 1e4);
    let cases = [
        (GadgetConfig::nonlocal(3, 9, 27, 3, 3, 3), g, -8.4432796105309653448, -7.5797250892460777641),
        (GadgetConfig::local(5, 13, 13, 16, 9), g, -15.905682395012066369, -6.5275695655587651509),
        (GadgetConfig::nonlocal(15, 125, 25, 11, 13, 12), g, -46.361425224441647562, -3.4222502021375828733),
        (GadgetConfig::nonlocal(3, 9, 9, 3, 2, 2), Noise::new(1e-3, 1e-5).with_meas(5e-3), -1.226729242431728593, -3.3676441406395873171),
        (GadgetConfig::local(3, 3, 3, 2, 2), Noise::new(1e-3, 1e-5).with_storage(1e-4, 1e-6).with_psi(1e-3), 0.0, -4.5806610048543872471),
    ];
    for (cfg, noise, cnot, inj) in cases {
        let b = cnot_bound(&cfg, &noise).unwrap().total.0;
        let i = injection_bound(&cfg, &noise).unwrap().0;
        assert!((b - cnot).abs() <= TOL, "{cfg:?}: {b} vs {cnot}");
        assert!((i - inj).abs() <= TOL, "{cfg:?}: {i} vs {inj}");
    }
}
