mod common;

use phaseforest::model::mst_cost;
use phaseforest::{
    add_border_vertices, component_mst, evaluate, generate_puc, ChargedPoint, Instance, Partition, Vertex,
};
use proptest::prelude::*;

fn abstract_instance(pts: &[(f64, f64, i8)]) -> Instance {
    let vs =
        pts.iter().enumerate().map(|(id, &(x, y, charge))| Vertex { id, x, y, charge, is_border: false }).collect();
    Instance::new("t", vs, vec![f64::INFINITY; pts.len()]).unwrap()
}

fn points(max_len: usize) -> impl Strategy<Value = Vec<(f64, f64, i8)>> {
    (1..=max_len / 2).prop_flat_map(|half| {
        proptest::collection::vec((0.0f64..50.0, 0.0f64..50.0), 2 * half).prop_map(move |xy| {
            xy.into_iter().enumerate().map(|(k, (x, y))| (x, y, if k < half { 1 } else { -1 })).collect()
        })
    })
}

#[test]
fn border_distance_and_zero_border_border() {
    let inst = add_border_vertices(
        &[ChargedPoint { x: 3.0, y: 10.0, charge: 1 }, ChargedPoint { x: 50.0, y: 50.0, charge: -1 }],
        100,
        100,
    );
    assert_eq!(inst.len(), 4);
    assert_eq!(inst.border_distance(0), 3.0);
    assert_eq!(inst.distance(2, 3).unwrap(), 0.0);
    assert_eq!(inst.distance(0, 2).unwrap(), 3.0);
    assert_eq!(inst.distance(3, 1).unwrap(), 49.0);
    assert!(inst.distance(0, 0).is_err());
    assert!(inst.distance(0, 9).is_err());
}

#[test]
fn imbalance_adds_matching_border_vertices() {
    let pts: Vec<ChargedPoint> = [(1.0, 1.0, 1), (2.0, 2.0, 1), (3.0, 3.0, 1), (4.0, 4.0, -1)]
        .iter()
        .map(|&(x, y, charge)| ChargedPoint { x, y, charge })
        .collect();
    let inst = add_border_vertices(&pts, 10, 10);
    let border: Vec<i32> = (0..inst.len()).filter(|&v| inst.vertex(v).is_border).map(|v| inst.charge(v)).collect();
    assert_eq!(border.len(), 4);
    assert_eq!(border.iter().filter(|&&c| c == -1).count(), 3);
    let total: i32 = (0..inst.len()).map(|v| inst.charge(v)).sum();
    assert_eq!(total, 0);
}

#[test]
fn puc_arc_counts() {
    for (n, arcs) in [(8, 90), (12, 182), (32, 1122)] {
        let inst = generate_puc(n, 3).unwrap();
        assert_eq!(inst.len(), n + 2);
        assert_eq!(inst.arc_count(), arcs);
    }
}

#[test]
fn evaluate_penalties() {
    let inst = abstract_instance(&[(0.0, 0.0, 1), (3.0, 4.0, 1), (6.0, 8.0, -1), (9.0, 8.0, -1)]);
    let pi = inst.fixed_penalty();
    // max pairwise distance: (0,0)-(9,8)
    assert!((pi - (81.0f64 + 64.0).sqrt()).abs() < 1e-12);
    let sol = evaluate(&inst, &Partition::new(vec![vec![0, 1], vec![2, 3]])).unwrap();
    assert!(!sol.is_feasible());
    assert!((sol.trees[0].penalty - 2.0 * pi).abs() < 1e-12);
    assert!((sol.total_cost - (5.0 + 3.0 + 4.0 * pi)).abs() < 1e-9);
    let pairs = evaluate(&inst, &Partition::new(vec![vec![0, 2], vec![1, 3]])).unwrap();
    assert!(pairs.is_feasible());
    assert!((pairs.total_cost - (inst.d(0, 2) + inst.d(1, 3))).abs() < 1e-12);
    assert!(evaluate(&inst, &Partition::new(vec![vec![0, 1, 2]])).is_err());
    assert!(evaluate(&inst, &Partition::new(vec![vec![0, 1], vec![1, 2, 3]])).is_err());
}

#[test]
fn image_penalty_is_nearest_border() {
    let inst = add_border_vertices(
        &[ChargedPoint { x: 2.0, y: 5.0, charge: 1 }, ChargedPoint { x: 6.0, y: 5.0, charge: -1 }],
        12,
        12,
    );
    let sol = evaluate(&inst, &Partition::new(vec![vec![0], vec![1], vec![2, 3]])).unwrap();
    assert_eq!(sol.trees[0].penalty, 2.0);
    assert_eq!(sol.trees[1].penalty, 5.0);
    assert_eq!(sol.trees[2].penalty, 0.0);
}

#[test]
fn singleton_and_pair_mst() {
    let inst = abstract_instance(&[(0.0, 0.0, 1), (3.0, 4.0, -1)]);
    assert_eq!(component_mst(&inst, &[0]), (vec![], 0.0));
    let (edges, cost) = component_mst(&inst, &[0, 1]);
    assert_eq!(edges.len(), 1);
    assert_eq!(cost, 5.0);
}

#[test]
fn five_vertex_mst_matches_all_125_trees() {
    let inst = generate_puc(4, 77).unwrap();
    let comp = [0, 1, 2, 3, 4];
    let (count, best) = common::enumerate_spanning_trees(&inst, &comp);
    assert_eq!(count, 125);
    assert!((component_mst(&inst, &comp).1 - best).abs() < 1e-9);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn mst_matches_enumeration(pts in points(6)) {
        let inst = abstract_instance(&pts);
        let comp: Vec<usize> = (0..inst.len()).collect();
        let (edges, cost) = component_mst(&inst, &comp);
        prop_assert_eq!(edges.len(), comp.len() - 1);
        let (_, best) = common::enumerate_spanning_trees(&inst, &comp);
        prop_assert!((cost - best).abs() < 1e-9);
        prop_assert!((cost - common::kruskal(&inst, &comp)).abs() < 1e-9);
        let tree_cost: f64 = edges.iter().map(|&(a, b)| inst.d(a, b)).sum();
        prop_assert!((tree_cost - cost).abs() < 1e-9);
    }

    #[test]
    fn merge_costs_at_most_the_closest_link(pts in points(10), split in 1usize..9) {
        let inst = abstract_instance(&pts);
        let n = inst.len();
        let split = split.min(n - 1);
        let a: Vec<usize> = (0..split).collect();
        let b: Vec<usize> = (split..n).collect();
        let link = a.iter().flat_map(|&i| b.iter().map(move |&j| (i, j))).map(|(i, j)| inst.d(i, j)).fold(f64::INFINITY, f64::min);
        let all: Vec<usize> = (0..n).collect();
        prop_assert!(mst_cost(&inst, &all) <= mst_cost(&inst, &a) + mst_cost(&inst, &b) + link + 1e-9);
    }

    #[test]
    fn evaluate_is_deterministic(seed in 0u64..500) {
        let inst = generate_puc(8, seed).unwrap();
        let p = Partition::new(vec![vec![0, 4, 8], vec![1, 5, 9], vec![2, 6], vec![3, 7]]);
        let a = evaluate(&inst, &p).unwrap();
        let b = evaluate(&inst, &p).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn border_instances_are_balanced(raw in proptest::collection::vec((0.0f64..30.0, 0.0f64..20.0, proptest::bool::ANY), 0..15)) {
        let pts: Vec<ChargedPoint> = raw.iter().map(|&(x, y, p)| ChargedPoint { x, y, charge: if p { 1 } else { -1 } }).collect();
        let inst = add_border_vertices(&pts, 31, 21);
        let w: i32 = pts.iter().map(|p| p.charge as i32).sum();
        prop_assert_eq!(inst.len(), pts.len() + w.unsigned_abs() as usize + 2);
        let total: i32 = (0..inst.len()).map(|v| inst.charge(v)).sum();
        prop_assert_eq!(total, 0);
    }
}
