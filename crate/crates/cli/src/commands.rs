use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use phaseforest::baselines::{goldstein, mcm};
use phaseforest::bc::{branch_and_cut, BcConfig, BcStatus};
use phaseforest::dual::{dual_ascent, dual_scaling, fix_by_reduced_cost, Strategy};
use phaseforest::hils::{run_hils_multi, HilsConfig};
use phaseforest::phase::io::{read_wrapped, render_overlay, write_bytes, write_raw};
use phaseforest::phase::synth::{noisy_surface, ramp, vortex};
use phaseforest::phase::{
    detect_residues, metrics as image_metrics, rasterize_branch_cuts, unwrap_2d, ResidueMap, WrappedImage,
};
use phaseforest::{generate_puc, read_instance, write_instance, ForestSolution, Instance};
use serde::Serialize;

use crate::failure::Failure;
use crate::report::{BcReport, BoundReport, GenerateReport, MetricsReport, RunReport, SolveReport, SCHEMA};
use crate::{
    BoundArgs, GenerateArgs, Incumbent, Kind, Method, MetricsArgs, RenderArgs, SolveArgs, SolverArgs, StrategyArg,
    UnwrapArgs,
};

pub fn load_instance(path: &Path) -> Result<Instance, Failure> {
    read_instance(path).map_err(|e| match e {
        phaseforest::Error::Io { .. } => e.into(),
        other => {
            let code = Failure::from(other);
            Failure { message: format!("{}: {}", path.display(), code.message), ..code }
        }
    })
}

pub fn load_image(path: &Path) -> Result<WrappedImage, Failure> {
    read_wrapped(path).map_err(|e| match e {
        phaseforest::Error::Io { .. } => e.into(),
        other => {
            let code = Failure::from(other);
            Failure { message: format!("{}: {}", path.display(), code.message), ..code }
        }
    })
}

fn ensure_dir(dir: &Path) -> Result<(), Failure> {
    fs::create_dir_all(dir).map_err(|e| Failure::io(dir, e))
}

fn write_json(path: &Path, value: &impl Serialize) -> Result<(), Failure> {
    let mut text = serde_json::to_string_pretty(value).expect("reports serialize");
    text.push('\n');
    fs::write(path, text).map_err(|e| Failure::io(path, e))
}

/// `--json` alone prints the report instead of the summary line; `--json FILE` writes it there as well.
fn emit(json: &Option<Option<PathBuf>>, report: &impl Serialize, summary: impl FnOnce()) -> Result<(), Failure> {
    match json {
        None => summary(),
        Some(None) => say!("{}", serde_json::to_string_pretty(report).expect("reports serialize")),
        Some(Some(path)) => {
            write_json(path, report)?;
            summary();
        }
    }
    Ok(())
}

fn stem(path: &Path) -> String {
    path.file_stem().map_or_else(|| "input".into(), |s| s.to_string_lossy().into_owned())
}

pub fn generate(a: &GenerateArgs) -> Result<(), Failure> {
    let (kind, default_name) = match a.kind {
        Kind::Puc => ("puc", format!("puc-{}-{}.msfbcp", a.n, a.seed)),
        Kind::Vortex => ("vortex", format!("vortex-{}x{}.wph", a.rows, a.cols)),
        Kind::Ramp => ("ramp", format!("ramp-{}x{}-{}.wph", a.rows, a.cols, a.seed)),
        Kind::Noisy => ("noisy", format!("noisy-{}x{}-{}.wph", a.rows, a.cols, a.seed)),
    };
    let path = match &a.output {
        Some(p) => p.clone(),
        None => {
            ensure_dir(&a.out_dir)?;
            a.out_dir.join(default_name)
        }
    };
    let mut report = GenerateReport {
        schema: SCHEMA,
        command: "generate",
        kind,
        seed: a.seed,
        path: path.display().to_string(),
        vertices: None,
        rows: None,
        cols: None,
    };
    if a.kind == Kind::Puc {
        let inst = generate_puc(a.n, a.seed)?;
        write_instance(&inst, &path)?;
        report.vertices = Some(inst.len());
    } else {
        if a.rows < 2 || a.cols < 2 {
            return Err(Failure::usage("images need at least 2 rows and 2 columns"));
        }
        let img = match a.kind {
            // centre off the pixel grid so the vortex loop is unambiguous
            Kind::Vortex => vortex(a.rows, a.cols, a.rows as f64 / 2.0 - 0.3, a.cols as f64 / 2.0 + 0.2),
            Kind::Ramp => {
                let ay = 0.05 + (a.seed % 7) as f64 * 0.1;
                let ax = 0.03 + (a.seed % 5) as f64 * 0.15;
                ramp(a.rows, a.cols, ay, ax).0
            }
            _ => noisy_surface(a.rows, a.cols, a.noise, a.seed),
        };
        write_raw(&path, img.rows(), img.cols(), img.values())?;
        report.rows = Some(img.rows());
        report.cols = Some(img.cols());
    }
    emit(&a.json, &report, || {
        say!("wrote {}", report.path);
    })?;
    Ok(())
}

pub fn bound(a: &BoundArgs) -> Result<(), Failure> {
    let inst = load_instance(&a.instance)?;
    let started = Instant::now();
    let strategy = match a.strategy {
        StrategyArg::Random => Strategy::Random,
        StrategyArg::MinRc => Strategy::MinRc,
    };
    let mut ds = dual_ascent(&inst, strategy, a.seed);
    let scaling = a.scaling || a.alpha.is_some() || a.itds.is_some();
    if scaling {
        ds = dual_scaling(&inst, &ds, a.alpha.unwrap_or(0.9), a.itds.unwrap_or(10), a.seed)?;
    }
    let fixed = a.upper_bound.map(|ub| fix_by_reduced_cost(&ds, ub)).transpose()?.map(|f| f.len());
    let report = BoundReport {
        schema: SCHEMA,
        command: "bound",
        instance: inst.name().to_string(),
        strategy: match a.strategy {
            StrategyArg::Random => "random",
            StrategyArg::MinRc => "min_rc",
        },
        seed: a.seed,
        scaling,
        lower_bound: ds.lower_bound,
        iterations: ds.iterations,
        cuts: ds.cuts.len(),
        fixed_arcs: fixed,
        gap_percent: a.upper_bound.map(|ub| if ub.abs() < 1e-12 { 0.0 } else { 100.0 * (ub - ds.lower_bound) / ub }),
        reduction_percent: fixed.map(|f| 100.0 * f as f64 / inst.arc_count().max(1) as f64),
        time_seconds: started.elapsed().as_secs_f64(),
    };
    emit(&a.json, &report, || {
        say!("{}: lower bound {:.6} after {} iterations", report.instance, report.lower_bound, report.iterations);
        if let (Some(f), Some(r), Some(g)) = (report.fixed_arcs, report.reduction_percent, report.gap_percent) {
            say!("gap {g:.2}% to the upper bound, fixed {f} arcs ({r:.2}%)");
        }
    })?;
    Ok(())
}

/// What a solver call produced, with the instance its vertex ids refer to.
pub struct Solved {
    pub instance: Instance,
    pub solution: ForestSolution,
    pub status: &'static str,
    pub partial: bool,
    pub lower_bound: Option<f64>,
    pub nodes: Option<usize>,
    pub per_run: Vec<RunReport>,
    pub bc: Option<BcReport>,
}

fn hils_config(s: &SolverArgs) -> HilsConfig {
    HilsConfig { t_max_seconds: s.time_limit, ..HilsConfig::default() }.with_seed(s.seed)
}

fn validate_solver(s: &SolverArgs) -> Result<(), Failure> {
    if s.runs == 0 {
        return Err(Failure::usage("--runs must be at least 1"));
    }
    if !(s.time_limit > 0.0) {
        return Err(Failure::usage("--time-limit must be positive"));
    }
    Ok(())
}

/// Runs the chosen method. `image` supplies the residues Goldstein needs.
pub fn run_method(
    inst: Instance,
    image: Option<(&ResidueMap, usize, usize)>,
    s: &SolverArgs,
) -> Result<Solved, Failure> {
    validate_solver(s)?;
    let heuristic = |instance, solution| Solved {
        instance,
        solution,
        status: "heuristic",
        partial: false,
        lower_bound: None,
        nodes: None,
        per_run: Vec::new(),
        bc: None,
    };
    match s.method {
        Method::Hils => {
            let cfg = hils_config(s);
            let (best, runs) = run_hils_multi(&inst, &cfg, s.runs)?;
            let partial = runs.iter().any(|r| r.elapsed_seconds >= cfg.t_max_seconds);
            let per_run = runs
                .iter()
                .enumerate()
                .map(|(r, run)| RunReport {
                    seed: cfg.seed.wrapping_add(r as u64),
                    cost: run.best.total_cost,
                    feasible: run.best.is_feasible(),
                    iterations: run.iterations,
                    time_seconds: run.elapsed_seconds,
                })
                .collect();
            Ok(Solved { partial, per_run, ..heuristic(inst, best) })
        }
        Method::Mcm => {
            let sol = mcm(&inst)?;
            Ok(heuristic(inst, sol))
        }
        Method::Goldstein => {
            let Some((res, rows, cols)) = image else {
                return Err(Failure::usage("goldstein needs --image (it works on the pixel grid)"));
            };
            let g = goldstein(res, rows, cols)?;
            Ok(heuristic(g.instance, g.solution))
        }
        Method::Bc => {
            let started = Instant::now();
            let incumbent = match s.incumbent {
                Incumbent::Hils => Some(run_hils_multi(&inst, &hils_config(s), s.runs)?.0),
                Incumbent::None => None,
            };
            let remaining = (s.time_limit - started.elapsed().as_secs_f64()).max(1e-3);
            let cfg = BcConfig { time_limit_seconds: remaining, seed: s.seed, ..BcConfig::default() };
            let res = branch_and_cut(&inst, None, incumbent.as_ref(), &cfg)?;
            let status = match res.status {
                BcStatus::Optimal => "optimal",
                BcStatus::Gap => "gap",
                BcStatus::Infeasible => "infeasible",
            };
            let bc = BcReport {
                upper_bound: res.upper_bound,
                gap_percent: res.gap_percent(),
                root_bound: res.root_bound,
                cuts: res.cuts,
                fixed_arcs: res.fixed_arcs,
                t_flow: res.t_flow,
                t_root: res.t_root,
            };
            let Some(solution) = res.solution else {
                return Err(Failure::no_solution(format!(
                    "branch-and-cut found no forest within {} s (lower bound {:.6})",
                    s.time_limit, res.lower_bound
                )));
            };
            Ok(Solved {
                instance: inst,
                solution,
                status,
                partial: res.status != BcStatus::Optimal,
                lower_bound: Some(res.lower_bound),
                nodes: Some(res.nodes),
                per_run: Vec::new(),
                bc: Some(bc),
            })
        }
    }
}

fn solve_report(command: &str, s: &SolverArgs, solved: &Solved, seconds: f64) -> SolveReport {
    let sol = &solved.solution;
    SolveReport {
        schema: SCHEMA,
        command: command.into(),
        method: s.method.name().into(),
        instance: solved.instance.name().into(),
        seed: s.seed,
        runs: s.runs,
        status: solved.status.into(),
        partial: solved.partial,
        cost: sol.total_cost,
        penalty: sol.total_penalty(),
        feasible: sol.is_feasible(),
        lower_bound: solved.lower_bound,
        nodes: solved.nodes,
        trees: sol.trees.len(),
        per_run: solved.per_run.clone(),
        bc: solved.bc.clone(),
        solution: sol.clone(),
        time_seconds: seconds,
    }
}

fn image_instance(path: &Path) -> Result<(WrappedImage, ResidueMap, Instance), Failure> {
    let img = load_image(path)?;
    let res = detect_residues(&img)?;
    let inst = res.instance(img.rows(), img.cols()).with_name(stem(path));
    Ok((img, res, inst))
}

pub fn solve(a: &SolveArgs) -> Result<(), Failure> {
    let started = Instant::now();
    let solved = match (&a.instance, &a.image) {
        (Some(p), _) => run_method(load_instance(p)?, None, &a.solver)?,
        (None, Some(p)) => {
            let (img, res, inst) = image_instance(p)?;
            run_method(inst, Some((&res, img.rows(), img.cols())), &a.solver)?
        }
        (None, None) => return Err(Failure::usage("one of --instance or --image is required")),
    };
    let report = solve_report("solve", &a.solver, &solved, started.elapsed().as_secs_f64());
    if let Some(dir) = &a.out_dir {
        ensure_dir(dir)?;
        write_json(&dir.join("solution.json"), &report)?;
        if a.image.is_some() {
            write_instance(&solved.instance, dir.join("instance.msfbcp"))?;
        }
    }
    emit(&a.json, &report, || {
        say!(
            "{} [{}]: cost {:.6}, {} trees, status {}{}",
            report.instance,
            report.method,
            report.cost,
            report.trees,
            report.status,
            if report.partial { " (time limit reached)" } else { "" }
        );
    })?;
    Ok(())
}

pub fn unwrap(a: &UnwrapArgs) -> Result<(), Failure> {
    let started = Instant::now();
    let (img, res, inst) = image_instance(&a.image)?;
    let solved = run_method(inst, Some((&res, img.rows(), img.cols())), &a.solver)?;
    let mask = rasterize_branch_cuts(&solved.solution, &solved.instance, img.rows(), img.cols())?;
    let unwrapped = unwrap_2d(&img, &mask)?;
    let m = image_metrics(&img, &solved.instance, &solved.solution, &unwrapped);
    let seconds = started.elapsed().as_secs_f64();

    ensure_dir(&a.out_dir)?;
    write_raw(a.out_dir.join("unwrapped.wph"), img.rows(), img.cols(), &unwrapped.values)?;
    write_bytes(a.out_dir.join("overlay.ppm"), &render_overlay(&img, &solved.instance, Some(&solved.solution), &res))?;
    write_instance(&solved.instance, a.out_dir.join("instance.msfbcp"))?;
    write_json(&a.out_dir.join("solution.json"), &solve_report("unwrap", &a.solver, &solved, seconds))?;
    let report = MetricsReport {
        schema: SCHEMA,
        command: "unwrap",
        method: a.solver.method.name().into(),
        rows: img.rows(),
        cols: img.cols(),
        residues: res.len(),
        metrics: m,
        cost: solved.solution.total_cost,
        partial: solved.partial,
        time_seconds: seconds,
    };
    write_json(&a.out_dir.join("metrics.json"), &report)?;
    emit(&a.json, &report, || {
        say!(
            "{}x{}, {} residues: N {} L {:.3} T {} I {}{}",
            report.rows,
            report.cols,
            report.residues,
            m.n,
            m.l,
            m.t,
            m.i,
            if report.partial { " (time limit reached)" } else { "" }
        );
        say!("outputs in {}", a.out_dir.display());
    })?;
    Ok(())
}

fn load_solution(path: &Path) -> Result<SolveReport, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::io(path, e))?;
    let report: SolveReport = serde_json::from_str(&text).map_err(|e| Failure::input(path, e))?;
    if report.schema != SCHEMA {
        return Err(Failure::input(path, format!("unsupported schema {}", report.schema)));
    }
    Ok(report)
}

fn check_solution(inst: &Instance, sol: &ForestSolution, path: &Path) -> Result<(), Failure> {
    sol.partition().validate(inst.len()).map_err(|e| Failure::input(path, e))
}

pub fn metrics(a: &MetricsArgs) -> Result<(), Failure> {
    let started = Instant::now();
    let img = load_image(&a.image)?;
    let inst = load_instance(&a.instance)?;
    let saved = load_solution(&a.solution)?;
    check_solution(&inst, &saved.solution, &a.solution)?;
    let res = detect_residues(&img)?;
    let mask = rasterize_branch_cuts(&saved.solution, &inst, img.rows(), img.cols())?;
    let unwrapped = unwrap_2d(&img, &mask)?;
    let m = image_metrics(&img, &inst, &saved.solution, &unwrapped);
    let report = MetricsReport {
        schema: SCHEMA,
        command: "metrics",
        method: saved.method,
        rows: img.rows(),
        cols: img.cols(),
        residues: res.len(),
        metrics: m,
        cost: saved.solution.total_cost,
        partial: saved.partial,
        time_seconds: started.elapsed().as_secs_f64(),
    };
    emit(&a.json, &report, || {
        say!("N {} L {:.3} T {} I {}", m.n, m.l, m.t, m.i);
    })?;
    Ok(())
}

pub fn render(a: &RenderArgs) -> Result<(), Failure> {
    let img = load_image(&a.image)?;
    let res = detect_residues(&img)?;
    let bytes = match (&a.instance, &a.solution) {
        (Some(ip), Some(sp)) => {
            let inst = load_instance(ip)?;
            let saved = load_solution(sp)?;
            check_solution(&inst, &saved.solution, sp)?;
            render_overlay(&img, &inst, Some(&saved.solution), &res)
        }
        _ => render_overlay(&img, &res.instance(img.rows(), img.cols()), None, &res),
    };
    write_bytes(&a.output, &bytes)?;
    say!("wrote {}", a.output.display());
    Ok(())
}
