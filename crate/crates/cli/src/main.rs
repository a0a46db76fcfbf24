use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use hphs_core::explorer::{Planner, RunConfig, RunResult, RunStatus};
use hphs_core::harness::{
    bundled_map_names, render_svg, resolve_config, resolve_map, run_bench, run_scenario, summary_row,
    write_steps_csv, write_summary_csv, BenchmarkSpec, CONFIG_ENV,
};

#[derive(Parser)]
#[command(name = "hphs", version, about = "Frontier-based exploration on 2D occupancy grids")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Explore one map and write steps.csv, summary.csv and trajectory.svg.
    Explore(ExploreArgs),
    /// Run every (map, planner, seed) combination and write bench.csv.
    Bench(BenchArgs),
    /// Render a saved run (JSON lines) to SVG.
    Render(RenderArgs),
}

#[derive(Args)]
struct ConfigArg {
    /// Config file of `key = value` lines.
    #[arg(long, env = CONFIG_ENV)]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct ExploreArgs {
    /// Map file, or the name of a bundled map.
    #[arg(long)]
    map: String,
    #[command(flatten)]
    config: ConfigArg,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = "hphs")]
    planner: Planner,
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
    /// Overrides run.max_steps.
    #[arg(long)]
    max_steps: Option<u64>,
    /// Also save the full run as JSON lines to this path.
    #[arg(long)]
    save_run: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    /// Comma-separated map files or bundled names (default: all bundled maps).
    #[arg(long, value_delimiter = ',')]
    maps: Vec<String>,
    #[arg(long, value_delimiter = ',', default_value = "hphs,nearest")]
    planners: Vec<Planner>,
    /// Seeds as a comma-separated list; `a-b` is an inclusive range.
    #[arg(long, default_value = "0-9")]
    seeds: String,
    #[command(flatten)]
    config: ConfigArg,
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    #[arg(long, default_value = "bench.csv")]
    out: PathBuf,
}

#[derive(Args)]
struct RenderArgs {
    /// Run saved with `explore --save-run`.
    #[arg(long)]
    run: PathBuf,
    #[arg(long, default_value = "trajectory.svg")]
    out: PathBuf,
}

fn parse_seeds(s: &str) -> Result<Vec<u64>> {
    let mut seeds = Vec::new();
    for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        match part.split_once('-') {
            Some((a, b)) => {
                let (a, b): (u64, u64) = (a.trim().parse()?, b.trim().parse()?);
                if a > b {
                    bail!("empty seed range {part}");
                }
                seeds.extend(a..=b);
            }
            None => seeds.push(part.parse().with_context(|| format!("bad seed {part}"))?),
        }
    }
    if seeds.is_empty() {
        bail!("no seeds given");
    }
    Ok(seeds)
}

fn load_config(arg: &ConfigArg) -> Result<RunConfig> {
    resolve_config(arg.config.as_deref()).context("loading config")
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(
        File::create(path).with_context(|| format!("cannot write {}", path.display()))?,
    ))
}

fn explore(args: ExploreArgs) -> Result<RunStatus> {
    let mut config = load_config(&args.config)?;
    if let Some(n) = args.max_steps {
        config.max_steps = n;
        config.validate()?;
    }
    let map = resolve_map(&args.map, config.resolution)?;
    let result = run_scenario(&map, args.planner, args.seed, &config);
    let row = summary_row(&map.name, args.planner, args.seed, &result);
    let result = result.with_context(|| format!("exploring {}", args.map))?;

    fs::create_dir_all(&args.out_dir).with_context(|| format!("cannot create {}", args.out_dir.display()))?;
    write_steps_csv(create(&args.out_dir.join("steps.csv"))?, &result)?;
    write_summary_csv(create(&args.out_dir.join("summary.csv"))?, &[row.clone()])?;
    let svg_path = args.out_dir.join("trajectory.svg");
    fs::write(&svg_path, render_svg(&result)).with_context(|| format!("cannot write {}", svg_path.display()))?;
    if let Some(path) = &args.save_run {
        fs::write(path, result.to_jsonl()).with_context(|| format!("cannot write {}", path.display()))?;
    }
    let m = row.metrics.expect("successful run has metrics");
    eprintln!(
        "{} {} seed {}: {} after {} steps, {:.2} m, {:.1} s, {:.3} m2/m, completion {:.2}%",
        map.name,
        args.planner,
        args.seed,
        result.status.name(),
        result.steps.len() - 1,
        m.distance_m,
        m.time_s,
        m.rate_m2_per_m,
        100.0 * m.completion
    );
    Ok(result.status)
}

fn bench(args: BenchArgs) -> Result<()> {
    let config = load_config(&args.config)?;
    let names: Vec<String> = if args.maps.is_empty() {
        bundled_map_names().map(String::from).collect()
    } else {
        args.maps.clone()
    };
    let maps = names
        .iter()
        .map(|n| resolve_map(n, config.resolution))
        .collect::<Result<Vec<_>, _>>()?;
    let spec = BenchmarkSpec {
        maps,
        planners: args.planners.clone(),
        seeds: parse_seeds(&args.seeds)?,
        config,
    };
    let report = run_bench(&spec, args.jobs)?;
    for r in &report.runs {
        if let Err(e) = &r.result {
            eprintln!("{} {} seed {}: error: {e}", r.map, r.planner, r.seed);
        }
    }
    write_summary_csv(create(&args.out)?, &report.rows())?;
    eprintln!("wrote {} runs to {}", report.runs.len(), args.out.display());
    Ok(())
}

fn render(args: RenderArgs) -> Result<()> {
    let text = fs::read_to_string(&args.run).with_context(|| format!("cannot read {}", args.run.display()))?;
    let result = RunResult::from_jsonl(&text).with_context(|| format!("parsing {}", args.run.display()))?;
    fs::write(&args.out, render_svg(&result)).with_context(|| format!("cannot write {}", args.out.display()))?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::FAILURE } else { ExitCode::SUCCESS };
        }
    };
    let outcome = match cli.command {
        Command::Explore(a) => explore(a).map(|s| match s {
            RunStatus::Complete => ExitCode::SUCCESS,
            RunStatus::Budget => ExitCode::from(2),
        }),
        Command::Bench(a) => bench(a).map(|_| ExitCode::SUCCESS),
        Command::Render(a) => render(a).map(|_| ExitCode::SUCCESS),
    };
    outcome.unwrap_or_else(|e| {
        eprintln!("error: {e:#}");
        ExitCode::FAILURE
    })
}
