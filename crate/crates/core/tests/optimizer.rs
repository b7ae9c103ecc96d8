use bsft_core::bounds::cnot_bound;
use bsft_core::optimizer::{cz_count, optimize_with, sweep, write_csv, FrontierPoint, PChoice};
use bsft_core::sim::build_circuit;
use bsft_core::{
    count_resources, optimize, pareto_front, BoundOptions, CircuitKind, Error, GadgetConfig, Locality, Noise, Objective, SearchSpace,
};
use proptest::prelude::*;

fn small(locality: Locality) -> SearchSpace {
    SearchSpace::new(locality).with_n(1, 7).with_m(1, 15).with_r(1, 5).with_r_prime(1, 4).with_r_plus(1, 4)
}

fn in_pool<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> T {
    rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap().install(f)
}

#[test]
fn resource_count_examples() {
    let r = count_resources(&GadgetConfig::nonlocal(1, 1, 1, 1, 1, 1)).unwrap();
    assert_eq!(r.cz_gates, 5);
    // |+⟩ checks 4·m·r₊·n, ZZ and ZZZ: n·r·(w·m + 2·r′·p).
    let r = count_resources(&GadgetConfig::nonlocal(3, 9, 27, 3, 3, 3)).unwrap();
    assert_eq!(r.cz_gates, 324 + 9 * (18 + 6 * 27) + 9 * (27 + 6 * 27));
    let c = GadgetConfig::local(3, 5, 3, 2, 2);
    let r = count_resources(&c).unwrap();
    assert_eq!(r.cz_gates, 4 * 5 * 2 * 2 + 9 * (10 + 4 * 9) + 9 * (15 + 4 * 14));
    assert!(r.wait_steps > 0);
    assert_eq!(count_resources(&GadgetConfig::nonlocal(3, 5, 5, 3, 2, 2)).unwrap().wait_steps, 0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn closed_form_cz_count_matches_builder(
        n in (0u32..5).prop_map(|k| 2 * k + 1),
        m in (0u32..8).prop_map(|k| 2 * k + 1),
        r in (0u32..3).prop_map(|k| 2 * k + 1),
        rp in 1u32..5,
        rpl in 1u32..5,
        pf in 0.0f64..1.0,
        local in any::<bool>(),
    ) {
        let c = if local {
            GadgetConfig::local(n, m, r, rp, rpl)
        } else {
            GadgetConfig::nonlocal(n, m, (1 + (pf * (3 * m) as f64) as u32).min(3 * m), r, rp, rpl)
        };
        let t = build_circuit(CircuitKind::Cnot, &c).unwrap().tally();
        prop_assert_eq!(cz_count(&c), t.cz_gates);
    }
}

#[test]
fn visits_every_grid_point() {
    let noise = Noise::biased(1e-3, 1e3);
    for loc in [Locality::Local, Locality::Nonlocal] {
        let s = small(loc);
        let res = optimize(&noise, &s, Objective::MinBound).unwrap();
        assert_eq!(res.visited, s.size());
        assert!(res.evaluated <= res.visited);
        assert_eq!(s.configs().len() as u64, s.size());
    }
}

#[test]
fn best_matches_brute_force() {
    let noise = Noise::biased(2e-3, 100.0);
    for loc in [Locality::Local, Locality::Nonlocal] {
        let s = small(loc);
        let res = optimize(&noise, &s, Objective::MinBound).unwrap();
        let best = s.configs().iter().map(|c| cnot_bound(c, &noise).unwrap().total.0).fold(f64::INFINITY, f64::min);
        assert_eq!(res.bound.total.0, best);
        assert_eq!(cnot_bound(&res.best_cfg, &noise).unwrap().total.0, best);
        assert_eq!(res.resources, count_resources(&res.best_cfg).unwrap());
    }
}

#[test]
fn result_independent_of_worker_count() {
    let noise = Noise::biased(1e-3, 1e4);
    let s = small(Locality::Nonlocal).with_p(PChoice::Range { lo: 1, hi: 15 });
    let runs: Vec<String> = [1, 2, 5]
        .into_iter()
        .map(|k| {
            let a = in_pool(k, || optimize(&noise, &s, Objective::MinBound).unwrap());
            let b = in_pool(k, || optimize(&noise, &s, Objective::MinCostForTarget(1e-3)).unwrap());
            let f = in_pool(k, || pareto_front(&noise, &s).unwrap());
            format!("{}{}{}", serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap(), serde_json::to_string(&f).unwrap())
        })
        .collect();
    assert!(runs.iter().all(|r| *r == runs[0]));
}

#[test]
fn min_cost_is_cheapest_feasible() {
    let noise = Noise::biased(1e-3, 1e3);
    let s = small(Locality::Local);
    let best = optimize(&noise, &s, Objective::MinBound).unwrap().bound.total.prob();
    let target = (best * 1e3).min(0.5);
    let res = optimize(&noise, &s, Objective::MinCostForTarget(target)).unwrap();
    assert!(res.bound.total.prob() <= target);
    let cheapest = s.configs().iter().filter(|c| cnot_bound(c, &noise).unwrap().total.prob() <= target).map(cz_count).min().unwrap();
    assert_eq!(res.resources.cz_gates, cheapest);
    assert!(res.resources.cz_gates < optimize(&noise, &s, Objective::MinBound).unwrap().resources.cz_gates);
    let hard = best / 2.0;
    assert_eq!(optimize(&noise, &s, Objective::MinCostForTarget(hard)).unwrap_err(), Error::NotAchievable { target: hard });
}

fn dominates(a: &FrontierPoint, b: &FrontierPoint) -> bool {
    a.cz_gates <= b.cz_gates && a.bound.0 <= b.bound.0 && (a.cz_gates < b.cz_gates || a.bound.0 < b.bound.0)
}

#[test]
fn pareto_points_are_mutually_non_dominated() {
    let noise = Noise::biased(1e-3, 1e3);
    for loc in [Locality::Local, Locality::Nonlocal] {
        let s = small(loc);
        let front = pareto_front(&noise, &s).unwrap();
        assert!(!front.is_empty());
        for a in &front {
            for b in &front {
                assert!(!dominates(a, b), "{a:?} dominates {b:?}");
            }
        }
        assert!(front.windows(2).all(|w| w[0].cz_gates < w[1].cz_gates && w[0].bound.0 > w[1].bound.0));
        for c in s.configs() {
            let p = FrontierPoint { cz_gates: cz_count(&c), bound: cnot_bound(&c, &noise).unwrap().total, cfg: c };
            assert!(front.iter().any(|f| dominates(f, &p) || (f.cz_gates == p.cz_gates && f.bound.0 == p.bound.0)), "{c:?} not covered");
        }
        let best = optimize(&noise, &s, Objective::MinBound).unwrap();
        assert_eq!(front.last().unwrap().bound.0, best.bound.total.0);
    }
}

#[test]
fn plus_misdecode_option_never_raises_the_optimum() {
    let noise = Noise::biased(1e-3, 1e3);
    let s = small(Locality::Nonlocal);
    let on = optimize(&noise, &s, Objective::MinBound).unwrap();
    let off = optimize_with(&noise, &s, Objective::MinBound, BoundOptions { plus_misdecode: false }).unwrap();
    assert!(off.bound.total.0 <= on.bound.total.0);
}

#[test]
fn sweep_trends() {
    let s = small(Locality::Local);
    let rows = sweep(&Noise::zero(), &[1e-4, 1e-3], &[1e2, 1e4], &[1.0, 2.0, 5.0], &s).unwrap();
    assert_eq!(rows.len(), 12);
    let at = |e: f64, b: f64, k: f64| rows.iter().find(|r| r.eps == e && r.bias == b && r.eps_meas == k * e).unwrap().log10();
    for e in [1e-4, 1e-3] {
        for b in [1e2, 1e4] {
            assert!(at(e, b, 1.0) <= at(e, b, 2.0) && at(e, b, 2.0) <= at(e, b, 5.0));
        }
        for k in [1.0, 2.0, 5.0] {
            assert!(at(e, 1e4, k) <= at(e, 1e2, k));
        }
    }
    for b in [1e2, 1e4] {
        assert!(at(1e-4, b, 1.0) <= at(1e-3, b, 1.0));
    }
    let mut buf = Vec::new();
    write_csv(&rows, &mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    assert!(text.starts_with("eps,bias,eps_meas,locality,n,m,p,r,r_prime,r_plus,log10_bound,cz_gates,qubits\n"));
    assert_eq!(text.lines().count(), 13);
}

#[test]
fn rejects_bad_spaces() {
    let noise = Noise::biased(1e-3, 1e3);
    assert!(matches!(optimize(&noise, &small(Locality::Local).with_n(2, 2), Objective::MinBound), Err(Error::InvalidSpace(_))));
    assert!(matches!(optimize(&noise, &small(Locality::Local), Objective::MinCostForTarget(0.0)), Err(Error::InvalidProbability { .. })));
    assert!(sweep(&noise, &[], &[1.0], &[1.0], &small(Locality::Local)).is_err());
}
