use std::path::PathBuf;

use bsft_core::optimizer::PChoice;
use bsft_core::{CircuitKind, DistillKind, GadgetConfig, Locality, NoiseParams, SearchSpace, Variant};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
#[error("{flag}: {msg}")]
pub struct FlagError {
    pub flag: &'static str,
    pub msg: String,
}

fn bad(flag: &'static str, msg: impl Into<String>) -> FlagError {
    FlagError { flag, msg: msg.into() }
}

pub fn prob(s: &str) -> Result<f64, String> {
    let v: f64 = s.trim().parse().map_err(|_| format!("'{s}' is not a number"))?;
    if (0.0..=1.0).contains(&v) {
        Ok(v)
    } else {
        Err(format!("{v} is not a probability in [0, 1]"))
    }
}

fn positive(s: &str) -> Result<f64, String> {
    let v: f64 = s.trim().parse().map_err(|_| format!("'{s}' is not a number"))?;
    if v > 0.0 {
        Ok(v)
    } else {
        Err(format!("{v} must be positive"))
    }
}

fn kind(s: &str) -> Result<CircuitKind, String> {
    CircuitKind::parse(s).ok_or_else(|| {
        let names: Vec<_> = CircuitKind::ALL.iter().map(|k| k.name()).collect();
        format!("unknown kind '{s}', expected one of {}", names.join(", "))
    })
}

fn distill_kind(s: &str) -> Result<DistillKind, String> {
    DistillKind::parse(s).ok_or_else(|| format!("unknown kind '{s}', expected plusi or t"))
}

#[derive(Parser, Debug)]
#[command(name = "bsft", version, about = "Bounds, optimization and simulation for Bacon-Shor gadgets under biased noise")]
pub struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true, env = "BSFT_WORKERS")]
    pub workers: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Evaluate the CNOT and injection bounds for one configuration.
    Bounds {
        #[command(flatten)]
        cfg: CfgArgs,
        #[command(flatten)]
        noise: NoiseArgs,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Find the best configuration in a search space.
    Optimize {
        #[command(flatten)]
        space: SpaceArgs,
        #[command(flatten)]
        noise: NoiseArgs,
        /// Minimize CZ count subject to bound <= target instead of minimizing the bound.
        #[arg(long, value_parser = prob, allow_negative_numbers = true)]
        target: Option<f64>,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Optimize over a grid of noise rates.
    Sweep {
        #[command(flatten)]
        space: SpaceArgs,
        #[arg(long = "eps-list", value_delimiter = ',', required = true, value_parser = prob, allow_negative_numbers = true)]
        eps_list: Vec<f64>,
        #[arg(long = "bias-list", value_delimiter = ',', required = true, value_parser = positive, allow_negative_numbers = true)]
        bias_list: Vec<f64>,
        /// Ratios eps_meas / eps.
        #[arg(long = "meas-ratios", value_delimiter = ',', default_value = "1", value_parser = positive, allow_negative_numbers = true)]
        meas_ratios: Vec<f64>,
        #[arg(long = "eps-s", default_value_t = 0.0, value_parser = prob, allow_negative_numbers = true)]
        eps_s: f64,
        #[arg(long = "eps-s-nd", default_value_t = 0.0, value_parser = prob, allow_negative_numbers = true)]
        eps_s_nd: f64,
        #[arg(long = "eps-psi", default_value_t = 0.0, value_parser = prob, allow_negative_numbers = true)]
        eps_psi: f64,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Cost/bound frontier of a search space.
    Pareto {
        #[command(flatten)]
        space: SpaceArgs,
        #[command(flatten)]
        noise: NoiseArgs,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Monte-Carlo estimate of a gadget failure rate.
    Simulate {
        #[arg(long, value_parser = kind)]
        kind: CircuitKind,
        #[command(flatten)]
        cfg: CfgArgs,
        #[command(flatten)]
        noise: NoiseArgs,
        #[arg(long, default_value_t = 10_000)]
        trials: u64,
        /// Compare against the analytic bound; exit 2 when it is violated.
        #[arg(long)]
        check: bool,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Distillation schedule, optionally fed by the injection and CNOT bounds.
    Distill {
        #[arg(long, value_parser = distill_kind)]
        kind: DistillKind,
        #[arg(long = "eps-in", value_parser = prob, allow_negative_numbers = true)]
        eps_in: Option<f64>,
        #[arg(long = "eps-css", value_parser = prob, allow_negative_numbers = true)]
        eps_css: Option<f64>,
        #[arg(long, default_value_t = 6)]
        rounds: u32,
        /// Take eps-in and eps-css from the bounds at the given configuration.
        #[arg(long = "end-to-end")]
        end_to_end: bool,
        #[command(flatten)]
        cfg: CfgArgs,
        #[command(flatten)]
        noise: NoiseArgs,
        #[command(flatten)]
        out: OutArgs,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Bounds { .. } => "bounds",
            Command::Optimize { .. } => "optimize",
            Command::Sweep { .. } => "sweep",
            Command::Pareto { .. } => "pareto",
            Command::Simulate { .. } => "simulate",
            Command::Distill { .. } => "distill",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Args, Debug)]
pub struct OutArgs {
    /// Output file (default: stdout).
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum VariantArg {
    A,
    B,
    C,
    D,
}

impl From<VariantArg> for Variant {
    fn from(v: VariantArg) -> Self {
        match v {
            VariantArg::A => Variant::A,
            VariantArg::B => Variant::B,
            VariantArg::C => Variant::C,
            VariantArg::D => Variant::D,
        }
    }
}

#[derive(Args, Debug)]
pub struct CfgArgs {
    #[arg(long)]
    pub n: Option<u32>,
    #[arg(long)]
    pub m: Option<u32>,
    /// Cat length of Z-type measurements; ignored with --local.
    #[arg(long)]
    pub p: Option<u32>,
    #[arg(long)]
    pub r: Option<u32>,
    #[arg(long)]
    pub rprime: Option<u32>,
    #[arg(long)]
    pub rplus: Option<u32>,
    #[arg(long)]
    pub local: bool,
    #[arg(long, value_enum, default_value_t = VariantArg::A)]
    pub variant: VariantArg,
}

fn need(flag: &'static str, v: Option<u32>) -> Result<u32, FlagError> {
    v.ok_or_else(|| bad(flag, "is required"))
}

fn need_odd(flag: &'static str, v: Option<u32>) -> Result<u32, FlagError> {
    let v = need(flag, v)?;
    if v % 2 == 0 {
        return Err(bad(flag, format!("must be odd, got {v}")));
    }
    Ok(v)
}

fn need_pos(flag: &'static str, v: Option<u32>) -> Result<u32, FlagError> {
    let v = need(flag, v)?;
    if v == 0 {
        return Err(bad(flag, "must be at least 1"));
    }
    Ok(v)
}

impl CfgArgs {
    pub fn resolve(&self) -> Result<GadgetConfig, FlagError> {
        let n = need_odd("--n", self.n)?;
        let m = need_odd("--m", self.m)?;
        let r = need_odd("--r", self.r)?;
        let rp = need_pos("--rprime", self.rprime)?;
        let rpl = need_pos("--rplus", self.rplus)?;
        let cfg = if self.local {
            GadgetConfig::local(n, m, r, rp, rpl)
        } else {
            let p = need("--p", self.p)?;
            if p == 0 || p > 3 * m {
                return Err(bad("--p", format!("must lie in 1..={}, got {p}", 3 * m)));
            }
            GadgetConfig::nonlocal(n, m, p, r, rp, rpl)
        };
        Ok(cfg.with_variant(self.variant.into()))
    }
}

#[derive(Args, Debug)]
pub struct NoiseArgs {
    /// Dephasing rate.
    #[arg(long, value_parser = prob, allow_negative_numbers = true)]
    pub eps: Option<f64>,
    /// Non-diagonal rate.
    #[arg(long = "eps-nd", value_parser = prob, allow_negative_numbers = true, conflicts_with = "bias")]
    pub eps_nd: Option<f64>,
    /// Sets --eps-nd to eps / bias.
    #[arg(long, value_parser = positive, allow_negative_numbers = true)]
    pub bias: Option<f64>,
    #[arg(long = "eps-s", default_value_t = 0.0, value_parser = prob, allow_negative_numbers = true)]
    pub eps_s: f64,
    #[arg(long = "eps-s-nd", default_value_t = 0.0, value_parser = prob, allow_negative_numbers = true)]
    pub eps_s_nd: f64,
    /// X-measurement error (default: eps).
    #[arg(long = "eps-meas", value_parser = prob, allow_negative_numbers = true)]
    pub eps_meas: Option<f64>,
    #[arg(long = "eps-psi", default_value_t = 0.0, value_parser = prob, allow_negative_numbers = true)]
    pub eps_psi: f64,
}

impl NoiseArgs {
    pub fn resolve(&self) -> Result<NoiseParams, FlagError> {
        let eps = self.eps.ok_or_else(|| bad("--eps", "is required"))?;
        let eps_nd = match (self.eps_nd, self.bias) {
            (_, Some(b)) => eps / b,
            (Some(nd), None) => nd,
            (None, None) => 0.0,
        };
        Ok(NoiseParams::new(eps, eps_nd)
            .with_storage(self.eps_s, self.eps_s_nd)
            .with_meas(self.eps_meas.unwrap_or(eps))
            .with_psi(self.eps_psi))
    }
}

#[derive(Args, Debug)]
pub struct SpaceArgs {
    #[arg(long = "n-min", default_value_t = 1)]
    pub n_min: u32,
    #[arg(long = "n-max", default_value_t = 21)]
    pub n_max: u32,
    #[arg(long = "m-min", default_value_t = 1)]
    pub m_min: u32,
    #[arg(long = "m-max", default_value_t = 151)]
    pub m_max: u32,
    /// Search every p in [p-min, p-max] instead of the shortest cat per fan-out.
    #[arg(long = "p-min", requires = "p_max")]
    pub p_min: Option<u32>,
    #[arg(long = "p-max", requires = "p_min")]
    pub p_max: Option<u32>,
    #[arg(long = "r-min", default_value_t = 1)]
    pub r_min: u32,
    #[arg(long = "r-max", default_value_t = 15)]
    pub r_max: u32,
    #[arg(long = "rprime-min", default_value_t = 1)]
    pub rprime_min: u32,
    #[arg(long = "rprime-max", default_value_t = 30)]
    pub rprime_max: u32,
    #[arg(long = "rplus-min", default_value_t = 1)]
    pub rplus_min: u32,
    #[arg(long = "rplus-max", default_value_t = 30)]
    pub rplus_max: u32,
    #[arg(long)]
    pub local: bool,
    #[arg(long, value_enum, default_value_t = VariantArg::A)]
    pub variant: VariantArg,
}

impl SpaceArgs {
    pub fn resolve(&self) -> Result<SearchSpace, FlagError> {
        let ranges = [
            ("--n-min", "--n-max", self.n_min, self.n_max, true),
            ("--m-min", "--m-max", self.m_min, self.m_max, true),
            ("--r-min", "--r-max", self.r_min, self.r_max, true),
            ("--rprime-min", "--rprime-max", self.rprime_min, self.rprime_max, false),
            ("--rplus-min", "--rplus-max", self.rplus_min, self.rplus_max, false),
        ];
        for (lo_flag, hi_flag, lo, hi, odd) in ranges {
            if lo == 0 {
                return Err(bad(lo_flag, "must be at least 1"));
            }
            if hi < lo {
                return Err(bad(hi_flag, format!("{hi} is below {lo_flag} {lo}")));
            }
            if odd && lo == hi && lo % 2 == 0 {
                return Err(bad(lo_flag, format!("range {lo}..={hi} contains no odd value")));
            }
        }
        let locality = if self.local { Locality::Local } else { Locality::Nonlocal };
        let mut space = SearchSpace::new(locality)
            .with_n(self.n_min, self.n_max)
            .with_m(self.m_min, self.m_max)
            .with_r(self.r_min, self.r_max)
            .with_r_prime(self.rprime_min, self.rprime_max)
            .with_r_plus(self.rplus_min, self.rplus_max)
            .with_variant(self.variant.into());
        if let (Some(lo), Some(hi)) = (self.p_min, self.p_max) {
            if lo == 0 {
                return Err(bad("--p-min", "must be at least 1"));
            }
            if hi < lo {
                return Err(bad("--p-max", format!("{hi} is below --p-min {lo}")));
            }
            space = space.with_p(PChoice::Range { lo, hi });
        }
        space.validate().map_err(|e| bad("--p-min", e.to_string()))?;
        Ok(space)
    }
}
