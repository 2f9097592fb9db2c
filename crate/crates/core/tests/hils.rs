mod common;

use phaseforest::hils::{
    break_tree, improve_pair, initial_solution, insert1_break1, local_search, merge, perturb, perturb_k, relocate,
    repair_balance, run_hils, run_hils_multi, set_partitioning, Closeness, ColumnPool, HilsConfig, Neighborhood,
};
use phaseforest::model::component_cost;
use phaseforest::rng;
use phaseforest::{add_border_vertices, evaluate, generate_puc, ChargedPoint, Instance, Partition, Vertex};
use proptest::prelude::*;

fn abstract_instance(pts: &[(f64, f64, i8)]) -> Instance {
    let vs =
        pts.iter().enumerate().map(|(id, &(x, y, charge))| Vertex { id, x, y, charge, is_border: false }).collect();
    Instance::new("t", vs, vec![f64::INFINITY; pts.len()]).unwrap()
}

fn cost(inst: &Instance, p: &Partition) -> f64 {
    evaluate(inst, p).unwrap().total_cost
}

fn sorted(p: &Partition) -> Vec<Vec<usize>> {
    p.canonical().components
}

fn quick() -> HilsConfig {
    HilsConfig { it_max: 30, ..HilsConfig::default() }
}

#[test]
fn initial_solution_thresholds() {
    // two pairs 1 apart, 50 apart from each other
    let inst = abstract_instance(&[(0.0, 0.0, 1), (1.0, 0.0, -1), (50.0, 0.0, 1), (51.0, 0.0, -1)]);
    assert_eq!(sorted(&initial_solution(&inst, 10.0)), vec![vec![0, 1], vec![2, 3]]);
    assert_eq!(initial_solution(&inst, f64::INFINITY).components.len(), 1);
    assert_eq!(initial_solution(&inst, 0.0).components.len(), 4);
}

#[test]
fn relocate_balances_the_extra_vertex() {
    let inst = abstract_instance(&[(0.0, 0.0, 1), (1.0, 0.0, -1), (10.0, 0.0, 1), (11.0, 0.0, -1)]);
    let cl = Closeness::new(&inst, 0.25, 5);
    let (a, b) = (vec![0, 1, 2], vec![3]);
    let before = Partition::new(vec![a.clone(), b.clone()]);
    let after = Partition::new(vec![vec![0, 1], vec![2, 3]]);
    let old = cost(&inst, &before);
    let m = relocate(&inst, &cl, &a, &b, old).unwrap();
    assert_eq!(m.kind, Neighborhood::Relocate);
    assert!((m.delta - (cost(&inst, &after) - old)).abs() < 1e-9);
    let parts = Partition::new(m.parts.iter().map(|p| p.0.clone()).collect());
    assert_eq!(sorted(&parts), vec![vec![0, 1], vec![2, 3]]);
}

#[test]
fn break_removes_the_bridge() {
    let inst = abstract_instance(&[(0.0, 0.0, 1), (1.0, 0.0, -1), (20.0, 0.0, 1), (21.0, 0.0, -1)]);
    let all = vec![0, 1, 2, 3];
    let m = break_tree(&inst, &all, component_cost(&inst, &all)).unwrap();
    assert!((m.delta + 19.0).abs() < 1e-9);
    assert_eq!(m.parts.len(), 2);
}

#[test]
fn insert1_break1_identity_is_not_improving() {
    let inst = abstract_instance(&[(0.0, 0.0, 1), (1.0, 0.0, -1), (20.0, 0.0, 1), (21.0, 0.0, -1)]);
    let (a, b) = (vec![0, 1], vec![2, 3]);
    let old = component_cost(&inst, &a) + component_cost(&inst, &b);
    assert!(insert1_break1(&inst, &a, &b, old).is_none());
}

#[test]
fn merge_of_close_unbalanced_singletons() {
    let inst = abstract_instance(&[(0.0, 0.0, 1), (1.0, 0.0, -1), (30.0, 0.0, 1), (31.0, 0.0, -1)]);
    let old = component_cost(&inst, &[0]) + component_cost(&inst, &[1]);
    let m = merge(&inst, &[0], &[1], old).unwrap();
    assert!((m.parts[0].1 - 1.0).abs() < 1e-12);
    let out = local_search(&inst, &Partition::singletons(4), &HilsConfig::default()).unwrap();
    let sol = evaluate(&inst, &out).unwrap();
    assert!(sol.is_feasible());
    assert!((sol.total_cost - 2.0).abs() < 1e-9);
}

#[test]
fn optimal_partition_is_kept() {
    for seed in 0..20 {
        let inst = generate_puc(2, seed).unwrap();
        let opt = common::oracle_optimum(&inst);
        let start = initial_solution(&inst, f64::INFINITY);
        let out = local_search(&inst, &start, &HilsConfig::default()).unwrap();
        let c = cost(&inst, &out);
        assert!(c <= cost(&inst, &start) + 1e-9);
        assert!((c - opt).abs() < 1e-9, "seed {seed}: {c} vs {opt}");
        let again = local_search(&inst, &out, &HilsConfig::default()).unwrap();
        assert!((cost(&inst, &again) - c).abs() < 1e-9);
    }
}

#[test]
fn local_search_ends_in_a_local_optimum() {
    let cfg = HilsConfig::default();
    for seed in 0..10 {
        let inst = generate_puc(16, seed).unwrap();
        let start = initial_solution(&inst, inst.average_distance());
        let out = local_search(&inst, &start, &cfg).unwrap();
        assert!(cost(&inst, &out) <= cost(&inst, &start) + 1e-9);
        let cl = Closeness::new(&inst, cfg.radius_fraction, cfg.close_candidates);
        let comps = &out.components;
        for (i, a) in comps.iter().enumerate() {
            assert!(break_tree(&inst, a, component_cost(&inst, a)).is_none());
            for b in &comps[i + 1..] {
                let old = component_cost(&inst, a) + component_cost(&inst, b);
                assert!(improve_pair(&inst, &cl, a, b, old).is_none(), "seed {seed}");
                assert!(improve_pair(&inst, &cl, b, a, old).is_none(), "seed {seed}");
            }
        }
        let again = local_search(&inst, &out, &cfg).unwrap();
        assert!((cost(&inst, &again) - cost(&inst, &out)).abs() < 1e-9);
    }
}

#[test]
fn set_partitioning_examples() {
    let inst = abstract_instance(&[(0.0, 0.0, 1), (1.0, 0.0, -1), (2.0, 0.0, 1), (3.0, 0.0, -1)]);
    let mut pool = ColumnPool::new(10);
    pool.add(vec![0, 1], 5.0);
    pool.add(vec![2, 3], 5.0);
    let (p, c) = set_partitioning(&inst, &pool, f64::INFINITY, 10.0).unwrap();
    assert_eq!(sorted(&p), vec![vec![0, 1], vec![2, 3]]);
    assert_eq!(c, 10.0);
    // not strictly better than the incumbent
    assert!(set_partitioning(&inst, &pool, 10.0, 10.0).is_none());
    pool.add(vec![0, 1, 2, 3], 8.0);
    let (p, c) = set_partitioning(&inst, &pool, f64::INFINITY, 10.0).unwrap();
    assert_eq!(sorted(&p), vec![vec![0, 1, 2, 3]]);
    assert_eq!(c, 8.0);

    let mut gaps = ColumnPool::new(10);
    gaps.add(vec![0, 1], 1.0);
    gaps.add(vec![1, 2, 3], 1.0);
    assert!(set_partitioning(&inst, &gaps, f64::INFINITY, 10.0).is_none());
    let mut short = ColumnPool::new(10);
    short.add(vec![0, 1], 1.0);
    assert!(set_partitioning(&inst, &short, f64::INFINITY, 10.0).is_none());
}

#[test]
fn perturbation_edge_cases() {
    let inst = abstract_instance(&[(0.0, 0.0, 1), (1.0, 0.0, -1)]);
    let p = Partition::new(vec![vec![0, 1]]);
    let mut r = rng::stream(1, 1);
    assert_eq!(perturb_k(&inst, &p, 0, &mut r), p);
    // both halves come from the same tree, so they are not re-paired
    assert_eq!(sorted(&perturb_k(&inst, &p, 1, &mut r)), vec![vec![0], vec![1]]);
    let q = Partition::new(vec![vec![0], vec![1]]);
    assert_eq!(perturb_k(&inst, &q, 3, &mut r), q);
}

#[test]
fn perturbation_keeps_a_partition() {
    let inst = generate_puc(24, 5).unwrap();
    let mut p = initial_solution(&inst, inst.average_distance());
    let mut r = rng::stream(9, 2);
    for _ in 0..1000 {
        p = perturb(&inst, &p, 0.15, &mut r);
        p.validate(inst.len()).unwrap();
    }
}

#[test]
fn run_hils_history_and_audit() {
    for seed in 0..5 {
        let inst = generate_puc(20, seed).unwrap();
        let res = run_hils(&inst, &quick().with_seed(seed)).unwrap();
        assert!(res.history.windows(2).all(|w| w[1] <= w[0] + 1e-12));
        assert_eq!(res.history.len(), res.iterations);
        let fresh = evaluate(&inst, &res.best.partition()).unwrap();
        assert!((fresh.total_cost - res.best.total_cost).abs() < 1e-6);
        if let Some(&last) = res.history.last() {
            assert!(res.best.total_cost <= last + 1e-6);
        }
        assert!(res.sp_calls > 0);
    }
}

#[test]
fn zero_iterations_returns_the_first_local_optimum() {
    let inst = generate_puc(16, 4).unwrap();
    let cfg = HilsConfig { it_max: 0, ..HilsConfig::default() };
    let res = run_hils(&inst, &cfg).unwrap();
    assert_eq!(res.iterations, 0);
    let start = initial_solution(&inst, inst.average_distance());
    let ls = local_search(&inst, &start, &cfg).unwrap();
    let out_cl = Closeness::new(&inst, cfg.radius_fraction, cfg.close_candidates);
    // both are local optima reached from the same start
    for p in [&res.best.partition(), &ls] {
        for (i, a) in p.components.iter().enumerate() {
            for b in &p.components[i + 1..] {
                let old = component_cost(&inst, a) + component_cost(&inst, b);
                assert!(improve_pair(&inst, &out_cl, a, b, old).is_none());
            }
        }
    }
    assert!(res.best.total_cost <= cost(&inst, &start) + 1e-9);
}

#[test]
fn best_of_ten_matches_the_oracle_on_eight_residues() {
    for seed in 1000..1010 {
        let inst = generate_puc(8, seed).unwrap();
        let opt = common::oracle_optimum(&inst);
        let (best, runs) = run_hils_multi(&inst, &HilsConfig::default(), 10).unwrap();
        assert_eq!(runs.len(), 10);
        assert!((best.total_cost - opt).abs() < 1e-6, "seed {seed}: {} vs {opt}", best.total_cost);
    }
}

#[test]
fn balance_repair_joins_penalised_components() {
    let inst = add_border_vertices(
        &[
            ChargedPoint { x: 4.0, y: 10.0, charge: 1 },
            ChargedPoint { x: 10.0, y: 3.0, charge: -1 },
            ChargedPoint { x: 10.0, y: 10.0, charge: 1 },
            ChargedPoint { x: 11.0, y: 10.0, charge: -1 },
        ],
        21,
        21,
    );
    // border pair 4 (+) and 5 (-); residues 0 and 1 only carry penalties
    let p = Partition::new(vec![vec![0], vec![1], vec![2, 3], vec![4, 5]]);
    let before = evaluate(&inst, &p).unwrap();
    assert!(!before.is_feasible());
    let fixed = evaluate(&inst, &repair_balance(&inst, &p)).unwrap();
    assert!(fixed.is_feasible());
    assert!(fixed.total_cost <= before.total_cost + 1e-12);
    assert_eq!(sorted(&fixed.partition()), vec![vec![0, 1, 4, 5], vec![2, 3]]);

    let abstract_p = Partition::singletons(2);
    let abs = abstract_instance(&[(0.0, 0.0, 1), (1.0, 0.0, -1)]);
    assert_eq!(repair_balance(&abs, &abstract_p), abstract_p);

    let puc = generate_puc(12, 1006).unwrap();
    let (best, _) = run_hils_multi(&puc, &HilsConfig::default(), 10).unwrap();
    assert!(best.is_feasible());
    assert!((best.total_cost - common::oracle_optimum(&puc)).abs() < 1e-6);
}

#[test]
fn invalid_configuration() {
    let inst = generate_puc(4, 0).unwrap();
    let bad = [
        HilsConfig { it_sp: Some(200), ..HilsConfig::default() },
        HilsConfig { radius_fraction: 0.0, ..HilsConfig::default() },
        HilsConfig { perturb_fraction: 1.5, ..HilsConfig::default() },
        HilsConfig { d_max: Some(-1.0), ..HilsConfig::default() },
    ];
    for cfg in bad {
        assert!(run_hils(&inst, &cfg).is_err());
    }
    assert!(run_hils_multi(&inst, &HilsConfig::default(), 0).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn local_search_never_worsens(seed in 0u64..10_000, d_frac in 0.0f64..2.0) {
        let inst = generate_puc(12, seed).unwrap();
        let start = initial_solution(&inst, d_frac * inst.average_distance());
        let out = local_search(&inst, &start, &HilsConfig::default().with_seed(seed)).unwrap();
        out.validate(inst.len()).unwrap();
        prop_assert!(cost(&inst, &out) <= cost(&inst, &start) + 1e-9);
    }
}
