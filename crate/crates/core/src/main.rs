use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};

use corridor::bench::{self, MapInstance};
use corridor::cli::{config, pathset, BenchConfig, RunConfig, Summary, BENCH_KEYS, SOLVE_KEYS};
use corridor::{solve, GridPoint, TerrainGrid};

#[derive(Parser)]
#[command(name = "corridor", version, about = "Dissimilar near-optimal road corridors over terrain grids")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Find a corridor set; exits 0 when solved, 2 when not.
    Solve { config: PathBuf },
    /// Run an experiment matrix and write records, profile and terrain tables.
    Bench { config: PathBuf },
    /// Terrain utilities.
    Terrain {
        #[command(subcommand)]
        command: TerrainCommand,
    },
    /// List configuration keys with their defaults.
    Keys,
}

#[derive(Subcommand)]
enum TerrainCommand {
    /// Print dimensions and the A/B/C grade class shares of a grid.
    Classify { grid: PathBuf },
    /// Write a synthetic grid.
    Synth {
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 40)]
        nx: usize,
        #[arg(long, default_value_t = 20)]
        ny: usize,
        #[arg(long, default_value_t = 20.0)]
        relief: f64,
        #[arg(short, long)]
        output: PathBuf,
    },
}

fn create_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))
}

fn cmd_solve(path: &Path) -> Result<bool> {
    let cfg = RunConfig::load(path)?;
    let grid = TerrainGrid::<f64>::load(&cfg.grid)?;
    let mid = grid.ny() as u32 / 2;
    let (sx, sy) = cfg.src.unwrap_or((0, mid));
    let (dx, dy) = cfg.dst.unwrap_or((grid.nx() as u32 - 1, mid));
    for (x, y) in [(sx, sy), (dx, dy)] {
        if !grid.contains(x as i64, y as i64) {
            anyhow::bail!("endpoint ({x}, {y}) lies outside the {}x{} grid", grid.nx(), grid.ny());
        }
    }
    let src = GridPoint::on_ground(&grid, sx, sy);
    let dst = GridPoint::on_ground(&grid, dx, dy);

    let start = Instant::now();
    let result = solve(&grid, &cfg.solver.model, src, dst, &cfg.solver.multipath)?;
    let wall = start.elapsed().as_secs_f64();

    create_dir(&cfg.out)?;
    pathset::write(cfg.out.join("paths.txt"), &result)?;
    Summary::new(&result, wall).write(cfg.out.join("summary.json"))?;

    println!(
        "{}: {} of {} paths, {}",
        result.algorithm,
        result.paths.len(),
        cfg.solver.multipath.target(),
        if result.solved { "solved" } else { "unsolved" }
    );
    for (p, r) in result.paths.iter().zip(&result.ratios) {
        println!("  cost {:.2} ({:.1}% of optimum)", p.total_cost(), 100.0 * r);
    }
    if result.timed_out {
        println!("  stopped by the time or expansion limit");
    }
    if result.exhausted_memory {
        println!("  stopped by the label limit");
    }
    println!("wrote {}", cfg.out.display());
    Ok(result.solved)
}

fn cmd_bench(path: &Path) -> Result<()> {
    let cfg = BenchConfig::load(path)?;
    let maps: Vec<MapInstance> = if cfg.maps.is_empty() {
        bench::synth_maps(cfg.seed, &cfg.lengths, &cfg.shapes)
    } else {
        cfg.maps
            .iter()
            .map(|p| {
                let grid = TerrainGrid::load(p)?;
                let id = p.file_stem().map_or_else(|| p.display().to_string(), |s| s.to_string_lossy().into_owned());
                Ok(MapInstance::across(id, grid))
            })
            .collect::<Result<_>>()?
    };
    create_dir(&cfg.out)?;
    let paths_dir = cfg.write_paths.then(|| cfg.out.join("paths"));
    let records = bench::run_matrix(&maps, &cfg.variants, &cfg.settings, paths_dir.as_deref())?;

    let open = |name: &str| -> Result<BufWriter<File>> {
        let p = cfg.out.join(name);
        Ok(BufWriter::new(File::create(&p).with_context(|| format!("creating {}", p.display()))?))
    };
    bench::write_records(open("records.csv")?, &records)?;
    bench::write_terrain_table(open("terrain.csv")?, &maps)?;
    let solvers = bench::solvers_of(&records);
    let prof = bench::profile(&records, &solvers)?;
    prof.write_csv(open("profile.csv")?)?;

    let solved = records.iter().filter(|r| r.solved).count();
    let failed = records.iter().filter(|r| !r.error.is_empty()).count();
    println!(
        "{} runs over {} maps: {solved} solved, {failed} failed; profile over {} problems ({} excluded)",
        records.len(),
        maps.len(),
        prof.problems,
        prof.excluded
    );
    println!("wrote {}", cfg.out.display());
    Ok(())
}

fn cmd_keys() {
    let print = |title: &str, keys: &[config::KeyDoc]| {
        println!("{title}");
        for (k, d, m) in keys {
            println!("  {k:<14} {d:<24} {m}");
        }
    };
    print("solve:", SOLVE_KEYS);
    print("bench:", BENCH_KEYS);
    print("solver (both):", config::solver_keys());
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Solve { config } => Ok(if cmd_solve(&config)? { ExitCode::SUCCESS } else { ExitCode::from(2) }),
        Command::Bench { config } => cmd_bench(&config).map(|_| ExitCode::SUCCESS),
        Command::Terrain { command: TerrainCommand::Classify { grid } } => {
            let g = TerrainGrid::<f64>::load(&grid)?;
            let c = g.classify();
            println!("Dim x {}  Dim y {}  Dim z {}", g.nx(), g.ny(), g.levels());
            println!("{c}");
            Ok(ExitCode::SUCCESS)
        }
        Command::Terrain { command: TerrainCommand::Synth { seed, nx, ny, relief, output } } => {
            if nx < 2 || ny < 2 || !(relief >= 0.0) {
                anyhow::bail!("need nx, ny >= 2 and relief >= 0");
            }
            corridor::synth_terrain::<f64>(seed, nx, ny, relief).save(&output)?;
            println!("wrote {}", output.display());
            Ok(ExitCode::SUCCESS)
        }
        Command::Keys => {
            cmd_keys();
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
