//! Seeded PUC groups solved by several methods, summarised one CSV row per (size, method).
//!
//! Gaps are percentages against a per-instance reference: the branch-and-cut
//! optimum when it was requested and proven, otherwise the cheapest feasible
//! solution any requested primal method found (one HILS run when none was requested).

use std::fs::File;
use std::io::Write;
use std::thread;
use std::time::Instant;

use phaseforest::baselines::mcm;
use phaseforest::bc::{branch_and_cut, BcConfig, BcStatus};
use phaseforest::dual::{dual_ascent, fix_by_reduced_cost, Strategy};
use phaseforest::hils::{run_hils, run_hils_multi, HilsConfig};
use phaseforest::{generate_puc, Instance};
use serde::{Deserialize, Serialize};

use crate::failure::Failure;
use crate::BenchArgs;

/// Fixed CSV layout; empty cells mean the column does not apply to the method.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub group: String,
    pub n: usize,
    pub method: String,
    pub instances: usize,
    pub gap_best: Option<f64>,
    pub gap_avg: Option<f64>,
    /// `solved/instances`: reference reached (heuristics) or optimality proven (bc).
    pub opt: Option<String>,
    pub avg_time: f64,
    pub dual_gap: Option<f64>,
    pub reduction: Option<f64>,
    pub gap_root: Option<f64>,
    pub gap_final: Option<f64>,
    pub nodes: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum BenchMethod {
    Hils,
    Bc,
    Mcm,
    Dual(Strategy),
}

impl BenchMethod {
    fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "hils" => BenchMethod::Hils,
            "bc" => BenchMethod::Bc,
            "mcm" => BenchMethod::Mcm,
            "dual-random" => BenchMethod::Dual(Strategy::Random),
            "dual-min-rc" => BenchMethod::Dual(Strategy::MinRc),
            _ => return None,
        })
    }

    fn name(self) -> &'static str {
        match self {
            BenchMethod::Hils => "hils",
            BenchMethod::Bc => "bc",
            BenchMethod::Mcm => "mcm",
            BenchMethod::Dual(Strategy::Random) => "dual-random",
            BenchMethod::Dual(Strategy::MinRc) => "dual-min-rc",
        }
    }
}

#[derive(Debug, Default, Clone)]
struct Outcome {
    /// Best and mean primal cost over runs.
    best: Option<f64>,
    mean: Option<f64>,
    seconds: f64,
    proven: bool,
    lower_bound: Option<f64>,
    root_bound: Option<f64>,
    nodes: Option<usize>,
}

struct Settings {
    methods: Vec<BenchMethod>,
    runs: usize,
    time_limit: f64,
}

fn hils_cfg(s: &Settings, seed: u64) -> HilsConfig {
    HilsConfig { t_max_seconds: s.time_limit, ..HilsConfig::default() }.with_seed(seed)
}

fn run_instance(inst: &Instance, seed: u64, s: &Settings) -> Result<(f64, Vec<Outcome>), phaseforest::Error> {
    let mut outcomes = Vec::with_capacity(s.methods.len());
    for &m in &s.methods {
        let started = Instant::now();
        let mut o = Outcome::default();
        match m {
            BenchMethod::Hils => {
                let (best, runs) = run_hils_multi(inst, &hils_cfg(s, seed), s.runs)?;
                o.best = Some(best.total_cost);
                o.mean = Some(runs.iter().map(|r| r.best.total_cost).sum::<f64>() / runs.len() as f64);
            }
            BenchMethod::Mcm => {
                let c = mcm(inst)?.total_cost;
                o.best = Some(c);
                o.mean = Some(c);
            }
            BenchMethod::Bc => {
                let cfg = BcConfig { time_limit_seconds: s.time_limit, seed, ..BcConfig::default() };
                let res = branch_and_cut(inst, None, None, &cfg)?;
                o.best = res.solution.as_ref().map(|x| x.total_cost);
                o.mean = o.best;
                o.proven = res.status == BcStatus::Optimal;
                o.lower_bound = Some(res.lower_bound);
                o.root_bound = Some(res.root_bound);
                o.nodes = Some(res.nodes);
            }
            BenchMethod::Dual(strategy) => {
                o.lower_bound = Some(dual_ascent(inst, strategy, seed).lower_bound);
            }
        }
        o.seconds = started.elapsed().as_secs_f64();
        outcomes.push(o);
    }
    let proven =
        s.methods.iter().zip(&outcomes).find(|(m, o)| **m == BenchMethod::Bc && o.proven).and_then(|(_, o)| o.best);
    let cheapest = outcomes.iter().filter_map(|o| o.best).fold(f64::INFINITY, f64::min);
    let reference = match proven {
        Some(c) => c,
        None if cheapest.is_finite() => cheapest,
        None => run_hils(inst, &hils_cfg(s, seed))?.best.total_cost,
    };
    Ok((reference, outcomes))
}

/// `100 * diff / reference`, with rounding noise below 1e-9 % reported as 0.
fn percent(diff: f64, reference: f64) -> f64 {
    let g = if reference.abs() < 1e-12 { 0.0 } else { 100.0 * diff / reference };
    if g.abs() < 1e-9 {
        0.0
    } else {
        g
    }
}

/// How far a primal cost lies above the reference.
fn gap(value: f64, reference: f64) -> f64 {
    percent(value - reference, reference)
}

/// How far a lower bound lies below the reference.
fn shortfall(bound: f64, reference: f64) -> f64 {
    percent(reference - bound, reference)
}

fn mean(xs: &[f64]) -> Option<f64> {
    (!xs.is_empty()).then(|| xs.iter().sum::<f64>() / xs.len() as f64)
}

fn summarise(
    n: usize,
    s: &Settings,
    insts: &[Instance],
    results: &[(f64, Vec<Outcome>)],
) -> Result<Vec<BenchRow>, Failure> {
    let mut rows = Vec::new();
    for (k, &m) in s.methods.iter().enumerate() {
        let (mut best, mut avg, mut time, mut dual, mut red, mut root, mut fin, mut nodes) =
            (vec![], vec![], vec![], vec![], vec![], vec![], vec![], vec![]);
        let mut solved = 0;
        for (inst, (reference, outcomes)) in insts.iter().zip(results) {
            let o = &outcomes[k];
            time.push(o.seconds);
            if let (Some(b), Some(a)) = (o.best, o.mean) {
                best.push(gap(b, *reference));
                avg.push(gap(a, *reference));
                if m != BenchMethod::Bc && (b - reference).abs() <= 1e-6 {
                    solved += 1;
                }
            }
            match m {
                BenchMethod::Bc => {
                    solved += usize::from(o.proven);
                    let ub = o.best.unwrap_or(f64::INFINITY);
                    if ub.is_finite() {
                        root.push(shortfall(o.root_bound.unwrap_or(0.0), ub));
                        fin.push(shortfall(o.lower_bound.unwrap_or(0.0), ub));
                    }
                    nodes.push(o.nodes.unwrap_or(0) as f64);
                }
                BenchMethod::Dual(strategy) => {
                    let lb = o.lower_bound.unwrap_or(0.0);
                    dual.push(shortfall(lb, *reference));
                    let ds = dual_ascent(inst, strategy, 0);
                    let ub = reference.max(ds.lower_bound);
                    let fixed = fix_by_reduced_cost(&ds, ub)?.len();
                    red.push(100.0 * fixed as f64 / inst.arc_count().max(1) as f64);
                }
                _ => {}
            }
        }
        let primal = !matches!(m, BenchMethod::Dual(_));
        rows.push(BenchRow {
            group: format!("PUC-{n}"),
            n,
            method: m.name().into(),
            instances: insts.len(),
            gap_best: mean(&best),
            gap_avg: mean(&avg),
            opt: primal.then(|| format!("{solved}/{}", insts.len())),
            avg_time: mean(&time).unwrap_or(0.0),
            dual_gap: mean(&dual),
            reduction: mean(&red),
            gap_root: mean(&root),
            gap_final: mean(&fin),
            nodes: mean(&nodes),
        });
    }
    Ok(rows)
}

pub fn write_csv(rows: &[BenchRow], out: impl Write) -> Result<(), csv::Error> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn bench(a: &BenchArgs) -> Result<(), Failure> {
    let names: Vec<&str> = a.methods.iter().map(|m| m.trim()).filter(|m| !m.is_empty()).collect();
    if names.is_empty() {
        return Err(Failure::usage("--methods must name at least one method"));
    }
    let methods = names
        .iter()
        .map(|m| BenchMethod::parse(m).ok_or_else(|| Failure::usage(format!("unknown bench method {m:?}"))))
        .collect::<Result<Vec<_>, _>>()?;
    if a.sizes.is_empty() || a.instances == 0 || a.runs == 0 || a.threads == 0 {
        return Err(Failure::usage("--sizes, --instances, --runs and --threads must be non-empty and positive"));
    }
    if !(a.time_limit > 0.0) {
        return Err(Failure::usage("--time-limit must be positive"));
    }
    let settings = Settings { methods, runs: a.runs, time_limit: a.time_limit };
    let mut rows = Vec::new();
    for &n in &a.sizes {
        let seeds: Vec<u64> = (0..a.instances).map(|k| a.seed + k).collect();
        let insts = seeds.iter().map(|&s| generate_puc(n, s)).collect::<Result<Vec<_>, _>>()?;
        let mut results: Vec<Option<Result<(f64, Vec<Outcome>), phaseforest::Error>>> =
            (0..insts.len()).map(|_| None).collect();
        let chunk = insts.len().div_ceil(a.threads);
        thread::scope(|scope| {
            for (slot, (part, seeds)) in results.chunks_mut(chunk).zip(insts.chunks(chunk).zip(seeds.chunks(chunk))) {
                let settings = &settings;
                scope.spawn(move || {
                    for ((out, inst), &seed) in slot.iter_mut().zip(part).zip(seeds) {
                        *out = Some(run_instance(inst, seed, settings));
                    }
                });
            }
        });
        let results = results.into_iter().map(|r| r.expect("every slot is filled")).collect::<Result<Vec<_>, _>>()?;
        rows.extend(summarise(n, &settings, &insts, &results)?);
    }
    match &a.csv {
        Some(path) => {
            let file = File::create(path).map_err(|e| Failure::io(path, e))?;
            write_csv(&rows, file).map_err(|e| Failure::io(path, std::io::Error::other(e)))?;
        }
        None => write_csv(&rows, std::io::stdout().lock())
            .map_err(|e| Failure { code: crate::failure::IO, message: e.to_string() })?,
    }
    Ok(())
}
