use phaseforest::baselines::{goldstein, mcm};
use phaseforest::bc::{branch_and_cut, BcConfig};
use phaseforest::dual::{dual_ascent, dual_scaling, Strategy};
use phaseforest::generate_puc;
use phaseforest::hils::{run_hils, run_hils_multi, HilsConfig};
use phaseforest::phase::synth::{clustered_residues, noisy_surface};
use phaseforest::phase::{detect_residues, rasterize_branch_cuts, unwrap_2d};

#[test]
fn hils_is_reproducible() {
    let inst = generate_puc(24, 3).unwrap();
    let cfg = HilsConfig { it_max: 30, ..HilsConfig::default() }.with_seed(17);
    let a = run_hils(&inst, &cfg).unwrap();
    let b = run_hils(&inst, &cfg).unwrap();
    assert_eq!(a.best, b.best);
    assert_eq!(a.history, b.history);
    assert_eq!(serde_json::to_string(&a.best).unwrap(), serde_json::to_string(&b.best).unwrap());
    let (ma, _) = run_hils_multi(&inst, &cfg, 3).unwrap();
    let (mb, _) = run_hils_multi(&inst, &cfg, 3).unwrap();
    assert_eq!(ma, mb);
}

#[test]
fn bounds_are_reproducible() {
    let inst = generate_puc(16, 8).unwrap();
    for strategy in [Strategy::MinRc, Strategy::Random] {
        let a = dual_ascent(&inst, strategy, 4);
        assert_eq!(a, dual_ascent(&inst, strategy, 4));
        assert_eq!(dual_scaling(&inst, &a, 0.9, 10, 4).unwrap(), dual_scaling(&inst, &a, 0.9, 10, 4).unwrap());
    }
    let cfg = BcConfig::default();
    let a = branch_and_cut(&inst, None, None, &cfg).unwrap();
    let b = branch_and_cut(&inst, None, None, &cfg).unwrap();
    assert_eq!(a.solution, b.solution);
    assert_eq!(a.nodes, b.nodes);
    assert_eq!(a.lower_bound, b.lower_bound);
}

#[test]
fn image_pipeline_is_reproducible() {
    let run = || {
        let img = noisy_surface(32, 40, 0.9, 5);
        let res = detect_residues(&img).unwrap();
        let inst = res.instance(img.rows(), img.cols());
        let sol = mcm(&inst).unwrap();
        let mask = rasterize_branch_cuts(&sol, &inst, img.rows(), img.cols()).unwrap();
        let out = unwrap_2d(&img, &mask).unwrap();
        (serde_json::to_string(&sol).unwrap(), serde_json::to_string(&mask).unwrap(), out.values)
    };
    assert_eq!(run(), run());
    let res = clustered_residues(64, 64, 4, 6, 3, 2);
    assert_eq!(res.residues, clustered_residues(64, 64, 4, 6, 3, 2).residues);
    assert_eq!(goldstein(&res, 64, 64).unwrap().solution, goldstein(&res, 64, 64).unwrap().solution);
}
