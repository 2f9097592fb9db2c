mod common;

use phaseforest::bc::{branch_and_cut, BcConfig, BcStatus};
use phaseforest::generate_puc;

#[test]
fn matches_oracle_on_small_instances() {
    for n in [4, 6, 8, 10] {
        for seed in 0..4 {
            let inst = generate_puc(n, seed).unwrap();
            let opt = common::oracle_optimum(&inst);
            let r = branch_and_cut(&inst, None, None, &BcConfig::default()).unwrap();
            assert_eq!(r.status, BcStatus::Optimal);
            let sol = r.solution.unwrap();
            assert!(sol.is_feasible());
            assert!((sol.total_cost - opt).abs() < 1e-6, "n={n} seed={seed}: {} vs {opt}", sol.total_cost);
            assert!(r.root_bound <= opt + 1e-6);
        }
    }
}
