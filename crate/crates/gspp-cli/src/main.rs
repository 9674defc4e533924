//! gspp command line: validation, bounds, reduction, the matheuristic, the
//! exact solver, instance generators and batch sweeps.
//!
//! Exit codes: 0 success, 1 infeasible or no solution found, 2 usage or
//! input error. Flags take precedence over `GSPP_*` environment variables,
//! which take precedence over defaults.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;

use gspp::apps::{
    crew_lb2, enumerate_bacap, enumerate_scheduling, read_crew_file, sample_sched, BacapParams,
    SchedGen, SchedParams,
};
use gspp::fileformat::{read_instance_file, write_instance, write_solution};
use gspp::relaxation::BoundReport;
use gspp::{
    branch_and_bound, compute_bounds, export_lp, format_cost, matheuristic_solve,
    reduce_with_mode, validate_instance, Instance, MatheuristicResult, RankingParams,
    SolveOptions,
};

const RUN_REPORT_HEADER: &str =
    "instance,n_tasks,n_vars,seed,sigma,mu,trivial,lb1,lb2,z,gap_pct,kept_pct,status,rank_s,total_s";

#[derive(Parser)]
#[command(name = "gspp", version, about = "Set partitioning solver toolkit")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Clone)]
struct HeuristicOpts {
    /// Least fraction of best-ranked variables to keep.
    #[arg(long, env = "GSPP_SIGMA", default_value_t = 0.1)]
    sigma: f64,
    /// Least number of kept variables per task.
    #[arg(long, env = "GSPP_MU", default_value_t = 2000)]
    mu: usize,
    /// Time limit in seconds for the exact solve phase.
    #[arg(long, env = "GSPP_TIME_LIMIT")]
    time_limit: Option<f64>,
}

#[derive(Args, Clone)]
struct ReportOpts {
    /// Seed to record in report rows.
    #[arg(long, env = "GSPP_SEED", default_value_t = 0)]
    seed: u64,
    /// Report phase timings as 0.000 for byte-stable output.
    #[arg(long, env = "GSPP_ZERO_TIMINGS")]
    zero_timings: bool,
}

#[derive(Subcommand)]
enum Cmd {
    /// Check structural invariants of an instance file.
    Validate { instance: PathBuf },
    /// Matching bounds (trivial, LB1, LB2) as CSV, one row per instance.
    Bounds { instances: Vec<PathBuf> },
    /// Probe every variable against an upper bound and drop losers.
    Reduce {
        instance: PathBuf,
        /// Cost of a known feasible solution.
        #[arg(long)]
        ub: i64,
        /// Repeat passes on the shrinking instance until stable.
        #[arg(long)]
        fixpoint: bool,
        /// Write the reduced instance here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Rank, select and solve the reduced model; emits a CSV report row.
    Matheuristic {
        instance: PathBuf,
        #[command(flatten)]
        heur: HeuristicOpts,
        #[command(flatten)]
        report: ReportOpts,
        /// Write the solution file here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Exact branch-and-bound over the full variable set.
    Solve {
        instance: PathBuf,
        #[arg(long, env = "GSPP_TIME_LIMIT")]
        time_limit: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Generate a machine scheduling instance from a TOML parameter file.
    GenSched {
        params: PathBuf,
        #[arg(long, env = "GSPP_SEED", default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Generate a berth allocation instance from a TOML parameter file.
    GenBacap {
        params: PathBuf,
        #[arg(long, env = "GSPP_SEED", default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Matching bound for a crew recovery instance.
    CrewLb2 { instance: PathBuf },
    /// Write the model in LP format.
    ExportLp {
        instance: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a (sigma, mu) grid over every .gspp file in a directory.
    Sweep {
        dir: PathBuf,
        /// Comma-separated sigma values.
        #[arg(long, value_delimiter = ',', default_value = "0.0,0.1,0.2,0.3")]
        sigma: Vec<f64>,
        /// Comma-separated mu values.
        #[arg(long, value_delimiter = ',', default_value = "500,1000,1500,2000")]
        mu: Vec<usize>,
        #[arg(long, env = "GSPP_TIME_LIMIT")]
        time_limit: Option<f64>,
        /// Gap against the branch-and-bound optimum instead of LB2.
        #[arg(long)]
        exact_gap: bool,
        #[command(flatten)]
        report: ReportOpts,
        /// Write the CSV here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn load(path: &Path) -> Result<Instance> {
    read_instance_file(path).with_context(|| format!("reading {}", path.display()))
}

fn secs(s: Option<f64>) -> Option<Duration> {
    s.map(Duration::from_secs_f64)
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display()))?,
        None => print!("{text}"),
    }
    Ok(())
}

fn run(cli: Cli) -> Result<u8> {
    match cli.cmd {
        Cmd::Validate { instance } => {
            let inst = load(&instance)?;
            let report = validate_instance(&inst);
            if report.is_ok() {
                println!("{}: ok", inst.name);
                Ok(0)
            } else {
                for v in &report.violations {
                    println!("{}: {v}", inst.name);
                }
                Ok(1)
            }
        }
        Cmd::Bounds { instances } => {
            if instances.is_empty() {
                bail!("no instance files given");
            }
            println!("{}", BoundReport::CSV_HEADER);
            for path in &instances {
                let inst = load(path)?;
                let report = compute_bounds(&inst).map_err(anyhow::Error::from)?;
                println!("{}", report.csv_row(inst.scale()));
            }
            Ok(0)
        }
        Cmd::Reduce {
            instance,
            ub,
            fixpoint,
            out,
        } => {
            let inst = load(&instance)?;
            let r = reduce_with_mode(&inst, ub, fixpoint)?;
            println!(
                "{}: {} -> {} variables ({:.1}% kept, {} removed, {} pass(es), {:.3}s)",
                inst.name,
                r.vars_before,
                r.vars_after,
                r.kept_percent(),
                r.removed.len(),
                r.passes,
                r.probe_seconds
            );
            if let Some(p) = out {
                gspp::fileformat::write_instance_file(&r.reduced, &p)?;
            }
            Ok(0)
        }
        Cmd::Matheuristic {
            instance,
            heur,
            report,
            out,
        } => {
            let inst = load(&instance)?;
            let params = RankingParams {
                sigma: heur.sigma,
                mu: heur.mu,
                time_limit: secs(heur.time_limit),
            };
            let r = matheuristic_solve(&inst, &params)?;
            println!("{RUN_REPORT_HEADER}");
            println!("{}", report_row(&inst, &params, &r, &report, None));
            if let (Some(p), Some(sol)) = (&out, &r.solution) {
                std::fs::write(p, write_solution(&inst.name, sol))?;
            }
            Ok(u8::from(r.solution.is_none()))
        }
        Cmd::Solve {
            instance,
            time_limit,
            out,
        } => {
            let inst = load(&instance)?;
            let r = branch_and_bound(
                &inst,
                &SolveOptions {
                    time_limit: secs(time_limit),
                    ..SolveOptions::default()
                },
            )?;
            let scale = inst.scale();
            match &r.incumbent {
                Some(sol) => println!(
                    "{}: {} cost {} (bound {}, {} nodes)",
                    inst.name,
                    r.status.as_str(),
                    format_cost(sol.cost, scale),
                    format_cost(r.best_bound, scale),
                    r.nodes
                ),
                None => println!(
                    "{}: {} (bound {}, {} nodes)",
                    inst.name,
                    r.status.as_str(),
                    format_cost(r.best_bound, scale),
                    r.nodes
                ),
            }
            if let (Some(p), Some(sol)) = (&out, &r.incumbent) {
                std::fs::write(p, write_solution(&inst.name, sol))?;
            }
            Ok(u8::from(r.incumbent.is_none()))
        }
        Cmd::GenSched { params, seed, out } => {
            let text = std::fs::read_to_string(&params)
                .with_context(|| format!("reading {}", params.display()))?;
            // explicit job list first, sampling parameters as the fallback
            let (mut inst, named) = match SchedParams::from_toml(&text) {
                Ok(p) => (enumerate_scheduling(&p)?, "sched".to_string()),
                Err(_) => {
                    let gen = SchedGen::from_toml(&text)?;
                    (
                        enumerate_scheduling(&sample_sched(&gen, seed))?,
                        format!("sched_s{seed}"),
                    )
                }
            };
            inst.name = named;
            emit(out.as_deref(), &write_instance(&inst))?;
            Ok(0)
        }
        Cmd::GenBacap { params, seed, out } => {
            let text = std::fs::read_to_string(&params)
                .with_context(|| format!("reading {}", params.display()))?;
            let p = BacapParams::from_toml(&text)?;
            let inst = enumerate_bacap(&p, seed)?;
            emit(out.as_deref(), &write_instance(&inst))?;
            Ok(0)
        }
        Cmd::CrewLb2 { instance } => {
            let ci = read_crew_file(&instance)?;
            match crew_lb2(&ci) {
                Ok(bound) => {
                    println!("crew lb2: {bound}");
                    Ok(0)
                }
                Err(gspp::GsppError::NoCompatiblePair { a, b }) => {
                    println!("infeasible: tasks {a} and {b} admit no joint cover");
                    Ok(1)
                }
                Err(e) => Err(e.into()),
            }
        }
        Cmd::ExportLp { instance, out } => {
            let inst = load(&instance)?;
            emit(out.as_deref(), &export_lp(&inst))?;
            Ok(0)
        }
        Cmd::Sweep {
            dir,
            sigma,
            mu,
            time_limit,
            exact_gap,
            report,
            out,
        } => {
            let mut files: Vec<PathBuf> = std::fs::read_dir(&dir)
                .with_context(|| format!("reading {}", dir.display()))?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|p| p.extension().is_some_and(|x| x == "gspp"))
                .collect();
            files.sort();
            if files.is_empty() {
                bail!("no .gspp files in {}", dir.display());
            }
            let mut jobs = Vec::new();
            for path in &files {
                let inst = load(path)?;
                let z = if exact_gap {
                    branch_and_bound(
                        &inst,
                        &SolveOptions {
                            time_limit: secs(time_limit),
                            ..SolveOptions::default()
                        },
                    )?
                    .incumbent
                    .map(|s| s.cost)
                } else {
                    None
                };
                for &s in &sigma {
                    for &m in &mu {
                        jobs.push((inst.clone(), s, m, z));
                    }
                }
            }
            let rows: Result<Vec<(String, String)>> = jobs
                .par_iter()
                .map(|(inst, s, m, z)| {
                    let params = RankingParams {
                        sigma: *s,
                        mu: *m,
                        time_limit: secs(time_limit),
                    };
                    let r = matheuristic_solve(inst, &params).map_err(anyhow::Error::from)?;
                    let key = format!("{},{s:.4},{m:08}", inst.name);
                    Ok((key, report_row(inst, &params, &r, &report, *z)))
                })
                .collect();
            let mut rows = rows?;
            rows.sort();
            let mut csv = String::from(RUN_REPORT_HEADER);
            csv.push('\n');
            for (_, row) in rows {
                csv.push_str(&row);
                csv.push('\n');
            }
            emit(out.as_deref(), &csv)?;
            Ok(0)
        }
    }
}

/// One RunReport CSV row. `z_exact` switches the gap reference from LB2 to
/// a known optimum.
fn report_row(
    inst: &Instance,
    params: &RankingParams,
    r: &MatheuristicResult,
    opts: &ReportOpts,
    z_exact: Option<i64>,
) -> String {
    let scale = inst.scale();
    let bounds = compute_bounds(inst).expect("bounds already computed once");
    let z = r
        .ub
        .map(|u| format_cost(u, scale))
        .unwrap_or_default();
    let gap = match (r.ub, z_exact) {
        (Some(u), Some(z)) if z > 0 => Some(100.0 * (u - z) as f64 / z as f64),
        (Some(_), Some(_)) => None,
        _ => r.gap_vs_lb2.map(|g| 100.0 * g),
    };
    let gap = gap.map(|g| format!("{g:.3}")).unwrap_or_default();
    let (rank_s, total_s) = if opts.zero_timings {
        (0.0, 0.0)
    } else {
        (r.rank_seconds, r.rank_seconds + r.solve_seconds)
    };
    format!(
        "{},{},{},{},{},{},{},{},{},{},{},{:.1},{},{:.3},{:.3}",
        inst.name,
        inst.n_tasks(),
        r.total,
        opts.seed,
        params.sigma,
        params.mu,
        format_cost(bounds.trivial, scale),
        format_cost(bounds.lb1, scale),
        format_cost(bounds.lb2, scale),
        z,
        gap,
        r.kept_percent(),
        r.status.as_str(),
        rank_s,
        total_s,
    )
}
