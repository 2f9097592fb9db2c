use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use phaseforest::baselines::mcm;
use phaseforest::bc::{branch_and_cut, separate, BcConfig};
use phaseforest::dual::{dual_ascent, dual_scaling, Strategy};
use phaseforest::hils::{run_hils, HilsConfig};
use phaseforest::{component_mst, generate_puc};

fn dual(c: &mut Criterion) {
    let mut g = c.benchmark_group("dual_ascent");
    for n in [32, 64, 128] {
        let inst = generate_puc(n, 1).unwrap();
        g.bench_with_input(BenchmarkId::new("random", n), &inst, |b, inst| {
            b.iter(|| dual_ascent(inst, Strategy::Random, 0))
        });
        g.bench_with_input(BenchmarkId::new("min_rc", n), &inst, |b, inst| {
            b.iter(|| dual_ascent(inst, Strategy::MinRc, 0))
        });
        let ds = dual_ascent(&inst, Strategy::Random, 0);
        g.bench_with_input(BenchmarkId::new("scaling", n), &inst, |b, inst| {
            b.iter(|| dual_scaling(inst, &ds, 0.9, 10, 0).unwrap())
        });
    }
    g.finish();
}

fn primal(c: &mut Criterion) {
    let mut g = c.benchmark_group("primal");
    g.sample_size(10);
    for n in [16, 32] {
        let inst = generate_puc(n, 2).unwrap();
        g.bench_with_input(BenchmarkId::new("hils", n), &inst, |b, inst| {
            b.iter(|| run_hils(inst, &HilsConfig::default()).unwrap())
        });
        g.bench_with_input(BenchmarkId::new("bc", n), &inst, |b, inst| {
            b.iter(|| branch_and_cut(inst, None, None, &BcConfig::default()).unwrap())
        });
        g.bench_with_input(BenchmarkId::new("mcm", n), &inst, |b, inst| b.iter(|| mcm(inst).unwrap()));
    }
    g.finish();
}

fn kernels(c: &mut Criterion) {
    let inst = generate_puc(64, 3).unwrap();
    let all: Vec<usize> = (0..inst.len()).collect();
    c.bench_function("component_mst/66", |b| b.iter(|| component_mst(&inst, &all)));
    let small = generate_puc(24, 3).unwrap();
    let x: Vec<f64> = (0..small.arc_count()).map(|a| ((a * 37) % 101) as f64 / 400.0).collect();
    c.bench_function("separate/26", |b| b.iter(|| separate(&small, &x)));
}

criterion_group!(benches, dual, primal, kernels);
criterion_main!(benches);
