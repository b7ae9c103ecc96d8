mod args;
mod output;

use std::ffi::OsString;
use std::io;
use std::process::ExitCode;

use bsft_core::bounds::{cnot_bound, injection_bound};
use bsft_core::distill::{distill_schedule, end_to_end, Schedule};
use bsft_core::optimizer::{sweep, FrontierPoint};
use bsft_core::sim::{check_bound, estimate, Estimate, Verdict};
use bsft_core::{count_resources, optimize, pareto_front, DistillParams, Error, Objective, Prob};
use clap::Parser;
use serde_json::json;

use args::{Cli, Command, FlagError};
use output::{Header, Rows, Sink};

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error(transparent)]
    Flag(#[from] FlagError),
    #[error(transparent)]
    Core(#[from] Error),
    #[error("io: {0}")]
    Io(#[from] io::Error),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Core(Error::NotAchievable { .. }) => 2,
            _ => 1,
        }
    }
}

fn main() -> ExitCode {
    ExitCode::from(run(std::env::args_os()))
}

fn run<I: IntoIterator<Item = OsString>>(argv: I) -> u8 {
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    if let Some(w) = cli.workers {
        if w == 0 {
            eprintln!("error: --workers: must be at least 1");
            return 1;
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(w).build_global() {
            eprintln!("error: --workers: {e}");
            return 1;
        }
    }
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.code()
        }
    }
}

fn log10(p: Prob) -> String {
    p.log10_string()
}

fn term_rows(b: &bsft_core::Breakdown, inj: Prob) -> Rows {
    let mut records: Vec<Vec<String>> = b
        .terms
        .iter()
        .map(|t| vec![t.name.to_string(), t.multiplicity.to_string(), format!("{:e}", t.value.prob()), log10(t.value)])
        .collect();
    records.push(vec!["total".into(), "1".into(), format!("{:e}", b.total.prob()), log10(b.total)]);
    records.push(vec!["injection".into(), "1".into(), format!("{:e}", inj.prob()), log10(inj)]);
    Rows { columns: vec!["term", "multiplicity", "prob", "log10"], records }
}

fn frontier_rows(pts: &[FrontierPoint]) -> Rows {
    let records = pts
        .iter()
        .map(|f| {
            let c = f.cfg;
            vec![
                f.cz_gates.to_string(),
                log10(f.bound),
                c.n.to_string(),
                c.m.to_string(),
                c.p.to_string(),
                c.r.to_string(),
                c.r_prime.to_string(),
                c.r_plus.to_string(),
            ]
        })
        .collect();
    Rows { columns: vec!["cz_gates", "log10_bound", "n", "m", "p", "r", "r_prime", "r_plus"], records }
}

fn estimate_rows(e: &Estimate, check: Option<(Prob, Verdict)>) -> Rows {
    let mut columns = vec![
        "kind",
        "trials",
        "seed",
        "failures",
        "p_fail",
        "ci_lo",
        "ci_hi",
        "success",
        "prep_failure",
        "logical_x",
        "logical_z",
        "logical_y",
    ];
    let t = e.tallies;
    let mut rec = vec![
        e.kind.name().to_string(),
        e.trials.to_string(),
        e.seed.to_string(),
        e.failures.to_string(),
        format!("{:e}", e.p_fail),
        format!("{:e}", e.ci95.0),
        format!("{:e}", e.ci95.1),
        t.success.to_string(),
        t.prep_failure.to_string(),
        t.logical_x.to_string(),
        t.logical_z.to_string(),
        t.logical_y.to_string(),
    ];
    if let Some((a, v)) = check {
        columns.extend(["bound_log10", "verdict"]);
        rec.push(log10(a));
        rec.push(match v {
            Verdict::Upheld => "UPHELD".into(),
            Verdict::Violated => "VIOLATED".into(),
        });
    }
    Rows { columns, records: vec![rec] }
}

fn schedule_rows(s: &Schedule) -> Rows {
    let records = s.eps.iter().enumerate().map(|(i, e)| vec![i.to_string(), format!("{e:e}")]).collect();
    Rows { columns: vec!["round", "eps"], records }
}

const SWEEP_COLUMNS: [&str; 13] =
    ["eps", "bias", "eps_meas", "locality", "n", "m", "p", "r", "r_prime", "r_plus", "log10_bound", "cz_gates", "qubits"];

fn dispatch(cmd: Command) -> Result<u8, CliError> {
    let name = cmd.name();
    match cmd {
        Command::Bounds { cfg, noise, out } => {
            let cfg = cfg.resolve()?;
            let noise = noise.resolve()?;
            let header = Header::new(name, out.seed, json!({ "cfg": cfg, "noise": noise, "format": out.format }));
            let b = cnot_bound(&cfg, &noise)?;
            let inj = injection_bound(&cfg, &noise)?;
            let res = count_resources(&cfg)?;
            let rows = term_rows(&b, inj);
            let result = json!({ "cnot": b, "injection": inj, "resources": res });
            Sink::open(out.out.as_deref(), out.format)?.document(&header, &result, rows)?;
            Ok(0)
        }
        Command::Optimize { space, noise, target, out } => {
            let space = space.resolve()?;
            let noise = noise.resolve()?;
            let header = Header::new(name, out.seed, json!({ "space": space, "noise": noise, "target": target, "format": out.format }));
            let objective = target.map_or(Objective::MinBound, Objective::MinCostForTarget);
            let r = optimize(&noise, &space, objective)?;
            let c = r.best_cfg;
            let rows = Rows {
                columns: vec!["locality", "n", "m", "p", "r", "r_prime", "r_plus", "log10_bound", "cz_gates", "qubits", "visited"],
                records: vec![vec![
                    format!("{:?}", c.locality),
                    c.n.to_string(),
                    c.m.to_string(),
                    c.p.to_string(),
                    c.r.to_string(),
                    c.r_prime.to_string(),
                    c.r_plus.to_string(),
                    log10(r.bound.total),
                    r.resources.cz_gates.to_string(),
                    r.resources.physical_qubits.to_string(),
                    r.visited.to_string(),
                ]],
            };
            Sink::open(out.out.as_deref(), out.format)?.document(&header, &r, rows)?;
            Ok(0)
        }
        Command::Sweep { space, eps_list, bias_list, meas_ratios, eps_s, eps_s_nd, eps_psi, out } => {
            let space = space.resolve()?;
            let template = bsft_core::Noise::zero().with_storage(eps_s, eps_s_nd).with_psi(eps_psi);
            let header = Header::new(
                name,
                out.seed,
                json!({
                    "space": space,
                    "eps_list": eps_list,
                    "bias_list": bias_list,
                    "meas_ratios": meas_ratios,
                    "eps_s": eps_s,
                    "eps_s_nd": eps_s_nd,
                    "eps_psi": eps_psi,
                    "format": out.format,
                }),
            );
            for &r in &meas_ratios {
                for &e in &eps_list {
                    if r * e > 1.0 {
                        return Err(FlagError { flag: "--meas-ratios", msg: format!("{r} x eps {e} exceeds 1") }.into());
                    }
                }
            }
            let mut stream = Sink::open(out.out.as_deref(), out.format)?.stream(&header, &SWEEP_COLUMNS)?;
            for &eps in &eps_list {
                for &bias in &bias_list {
                    for &ratio in &meas_ratios {
                        for row in sweep(&template, &[eps], &[bias], &[ratio], &space)? {
                            stream.row(&row)?;
                        }
                    }
                }
            }
            stream.finish()?;
            Ok(0)
        }
        Command::Pareto { space, noise, out } => {
            let space = space.resolve()?;
            let noise = noise.resolve()?;
            let header = Header::new(name, out.seed, json!({ "space": space, "noise": noise, "format": out.format }));
            let front = pareto_front(&noise, &space)?;
            let rows = frontier_rows(&front);
            Sink::open(out.out.as_deref(), out.format)?.document(&header, &front, rows)?;
            Ok(0)
        }
        Command::Simulate { kind, cfg, noise, trials, check, out } => {
            let cfg = cfg.resolve()?;
            let noise = noise.resolve()?;
            let header = Header::new(
                name,
                out.seed,
                json!({ "kind": kind, "cfg": cfg, "noise": noise, "trials": trials, "check": check, "format": out.format }),
            );
            let kind_err = |e: Error| match e {
                Error::InvalidKind { .. } => CliError::Flag(FlagError { flag: "--kind", msg: e.to_string() }),
                e => e.into(),
            };
            let sink = Sink::open(out.out.as_deref(), out.format)?;
            if check {
                let c = check_bound(kind, &cfg, &noise, trials, out.seed).map_err(kind_err)?;
                let rows = estimate_rows(&c.empirical, Some((c.analytic, c.verdict)));
                sink.document(&header, &c, rows)?;
                Ok(if c.verdict == Verdict::Violated { 2 } else { 0 })
            } else {
                let e = estimate(kind, &cfg, &noise, trials, out.seed).map_err(kind_err)?;
                let rows = estimate_rows(&e, None);
                sink.document(&header, &e, rows)?;
                Ok(0)
            }
        }
        Command::Distill { kind, eps_in, eps_css, rounds, end_to_end: e2e, cfg, noise, out } => {
            if e2e {
                if eps_in.is_some() {
                    return Err(FlagError { flag: "--eps-in", msg: "cannot be combined with --end-to-end".into() }.into());
                }
                if eps_css.is_some() {
                    return Err(FlagError { flag: "--eps-css", msg: "cannot be combined with --end-to-end".into() }.into());
                }
                let cfg = cfg.resolve()?;
                let noise = noise.resolve()?;
                let header = Header::new(
                    name,
                    out.seed,
                    json!({ "kind": kind, "rounds": rounds, "end_to_end": true, "cfg": cfg, "noise": noise, "format": out.format }),
                );
                let r = end_to_end(&noise, &cfg, kind, rounds)?;
                let rows = schedule_rows(&r.schedule);
                Sink::open(out.out.as_deref(), out.format)?.document(&header, &r, rows)?;
            } else {
                let eps_in = eps_in.ok_or(FlagError { flag: "--eps-in", msg: "is required without --end-to-end".into() })?;
                let eps_css = eps_css.ok_or(FlagError { flag: "--eps-css", msg: "is required without --end-to-end".into() })?;
                let header = Header::new(
                    name,
                    out.seed,
                    json!({ "kind": kind, "eps_in": eps_in, "eps_css": eps_css, "rounds": rounds, "format": out.format }),
                );
                let s = distill_schedule(&DistillParams::new(kind, eps_in, eps_css, rounds))?;
                let rows = schedule_rows(&s);
                Sink::open(out.out.as_deref(), out.format)?.document(&header, &s, rows)?;
            }
            Ok(0)
        }
    }
}
