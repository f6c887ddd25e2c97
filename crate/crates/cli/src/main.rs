use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use hyperjaya_cli::report::{self, PlotFormat};
use hyperjaya_cli::{run_experiment, EngineKind, ExperimentSpec, HarnessError, Mode, Result};
use hyperjaya_core::{wilcoxon_rank_sum, Objective};

#[derive(Parser)]
#[command(name = "hyperjaya", version, about = "Jaya / HHCPJaya experiment runner")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run repeated seeded optimisations and write per-run and summary CSVs.
    Run(RunArgs),
    /// Print the block decomposition for a list of thread counts.
    ExplainPlan(PlanArgs),
    /// Two-sided Wilcoxon rank-sum test on the best_fitness columns of two run files.
    Compare(CompareArgs),
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    function: Objective,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    m: usize,
    /// Comma-separated worker counts, e.g. 1,2,4,8,16.
    #[arg(long, value_delimiter = ',', required = true)]
    threads: Vec<usize>,
    #[arg(long, default_value_t = 1)]
    conf_h: usize,
    #[arg(long, default_value_t = 1)]
    conf_v: usize,
    #[arg(long)]
    max_iter: Option<u64>,
    #[arg(long)]
    target: Option<f64>,
    /// Candidate-evaluation budget (full-evaluation equivalents).
    #[arg(long)]
    budget: Option<u64>,
    #[arg(long, default_value_t = 20)]
    repeats: u32,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = "quality")]
    mode: Mode,
    #[arg(long, default_value = "hhcp")]
    engine: EngineKind,
    /// Per-run CSV path; the summary goes next to it as `<stem>_summary.csv`.
    #[arg(long)]
    out: PathBuf,
    /// Speedup chart format for timing mode.
    #[arg(long, default_value = "dat")]
    plot_format: PlotFormat,
    /// Check bounds and reductions every iteration.
    #[arg(long)]
    instrument: bool,
}

#[derive(Args)]
struct PlanArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    m: usize,
    #[arg(long, value_delimiter = ',', default_value = "1,2,4,8,16")]
    threads: Vec<usize>,
    #[arg(long, default_value_t = 1)]
    conf_h: usize,
    #[arg(long, default_value_t = 1)]
    conf_v: usize,
    /// Also check block width against the function's minimum arity.
    #[arg(long)]
    function: Option<Objective>,
}

#[derive(Args)]
struct CompareArgs {
    a: PathBuf,
    b: PathBuf,
    /// Only use rows with this worker count.
    #[arg(long)]
    threads: Option<usize>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(args) => run(args),
        Command::ExplainPlan(args) => explain_plan(args),
        Command::Compare(args) => compare(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn run(args: RunArgs) -> Result<()> {
    let mut spec = ExperimentSpec::new(
        args.function,
        args.n,
        args.m,
        args.threads,
        args.conf_h,
        args.conf_v,
        args.mode,
    );
    if let Some(v) = args.max_iter {
        spec.max_iter = v;
    }
    if args.target.is_some() {
        spec.target = args.target;
    }
    if args.budget.is_some() {
        spec.budget = args.budget;
    }
    spec.repeats = args.repeats;
    spec.base_seed = args.seed;
    spec.engine = args.engine;
    spec.instrument = args.instrument;

    let cores = std::thread::available_parallelism().map_or(1, |n| n.get());
    if let Some(&t) = spec.threads.iter().filter(|&&t| t > cores).max() {
        eprintln!(
            "warning: {t} workers on {cores} available core(s); results are valid but timings are oversubscribed"
        );
    }

    let report = run_experiment(&spec)?;
    report::write_runs(&report, &args.out)?;
    let summary_path = report::sibling(&args.out, "summary", "csv");
    report::write_summary(&report, &summary_path)?;

    println!(
        "{} n={} m={} conf_h={} conf_v={} mode={} repeats={}",
        spec.function, spec.n, spec.m, spec.conf_h, spec.conf_v, spec.mode, spec.repeats
    );
    println!(
        "{:>7} {:>12} {:>12} {:>10} {:>10} {:>10} {:>8}",
        "threads", "mean", "stddev", "time_s", "time_sd", "iters", "success"
    );
    for cell in &report.cells {
        match &cell.outcome {
            Ok(runs) => {
                let s = &runs.summary;
                println!(
                    "{:>7} {:>12.4e} {:>12.4e} {:>10.4} {:>10.4} {:>10.1} {:>8.2}",
                    cell.threads,
                    s.mean_fitness,
                    s.stddev_fitness,
                    s.mean_time,
                    s.stddev_time,
                    s.mean_iterations,
                    s.success_rate
                );
            }
            Err(e) => println!(
                "{:>7} {:>12} {:>12} {:>10} {:>10} {:>10} {:>8}  ({e})",
                cell.threads, "*", "*", "*", "*", "*", "*"
            ),
        }
    }

    if spec.mode == Mode::Timing {
        let rows = report::speedup_rows(&report)?;
        let conf = (spec.conf_h, spec.conf_v);
        let (text, ext) = match args.plot_format {
            PlotFormat::Dat => (report::speedup_dat(spec.function, conf, &rows), "dat"),
            PlotFormat::Svg => (report::speedup_svg(spec.function, conf, &rows), "svg"),
        };
        let path = report::sibling(&args.out, &format!("speedup_{}", spec.function), ext);
        report::write_text(&path, &text)?;
        for r in &rows {
            println!("speedup({}) = {:.3}", r.threads, r.speedup);
        }
        println!("wrote {}", path.display());
    }
    println!("wrote {} and {}", args.out.display(), summary_path.display());

    if report.valid_cells().next().is_none() {
        let err = report
            .cells
            .into_iter()
            .find_map(|c| c.outcome.err())
            .expect("at least one cell");
        return Err(HarnessError::Plan(err));
    }
    Ok(())
}

fn explain_plan(args: PlanArgs) -> Result<()> {
    let (table, invalid) = report::plan_table(args.n, args.m, &args.threads, args.conf_h, args.conf_v, args.function);
    print!("{table}");
    if invalid > 0 {
        return Err(HarnessError::Plan(hyperjaya_core::Error::Usage(format!(
            "{invalid} configuration(s) cannot be decomposed"
        ))));
    }
    Ok(())
}

fn compare(args: CompareArgs) -> Result<()> {
    let sample = |path: &PathBuf| -> Result<Vec<f64>> {
        let values: Vec<f64> = report::read_runs(path)?
            .into_iter()
            .filter(|r| args.threads.is_none_or(|t| r.threads == t))
            .filter_map(|r| r.record.map(|rec| rec.best_fitness))
            .collect();
        if values.is_empty() {
            return Err(HarnessError::Config(format!("{}: no usable runs", path.display())));
        }
        Ok(values)
    };
    let a = sample(&args.a)?;
    let b = sample(&args.b)?;
    let test = wilcoxon_rank_sum(&a, &b)?;
    println!("samples: {} vs {}", a.len(), b.len());
    println!("rank sum W = {}", test.statistic);
    println!("two-sided p = {:.6e} ({:?})", test.p_value, test.method);
    println!(
        "significant at {}: {}",
        hyperjaya_core::stats::SIGNIFICANCE_LEVEL,
        if test.significant() { "yes" } else { "no" }
    );
    Ok(())
}
