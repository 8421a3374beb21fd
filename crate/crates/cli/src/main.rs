use std::collections::HashMap;
use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Deserialize;

use knn_lrta::agent::{AgentConfig, CandidateStage};
use knn_lrta::bench::{run_benchmark, solve_with, suboptimality, write_summary, Algorithm, BenchRun, BYTES_PER_STATE};
use knn_lrta::grid::maps::{maze, random_obstacles, MazeStyle};
use knn_lrta::grid::{
    generate_problems, parse_map, parse_scenario, validate_path, write_map, write_scenario, Cost, GridMap, Problem,
};
use knn_lrta::subgoal_db::{
    build_database, load_database, save_database, validate_database, BuildOptions, SubgoalDatabase,
};
use knn_lrta::tba::TbaConfig;

type Result<T> = std::result::Result<T, Box<dyn std::error::Error>>;

/// Real-time grid pathfinding with subgoal databases.
#[derive(Parser)]
#[command(name = "knn-lrta", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a subgoal database for a map.
    BuildDb {
        map: PathBuf,
        #[arg(long)]
        records: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        /// Minimum optimal-path length, in states, of a recorded path.
        #[arg(long, default_value_t = 3)]
        min_len: usize,
        /// Worker threads (default: all cores).
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Check every record of a database against its map.
    ValidateDb { map: PathBuf, db: PathBuf },
    /// Draw random solvable problems with a minimum optimal cost.
    GenProblems {
        map: PathBuf,
        #[arg(long)]
        count: usize,
        /// Minimum optimal cost in deci-cost units (default: 2 * (width + height)).
        #[arg(long)]
        min_cost: Option<u64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Solve every problem of a scenario file with one algorithm.
    Solve {
        map: PathBuf,
        problems: PathBuf,
        #[arg(long, value_enum)]
        algo: AlgoName,
        #[arg(long)]
        db: Option<PathBuf>,
        #[arg(long, default_value_t = 10)]
        m: usize,
        #[arg(long, default_value_t = 250)]
        hc_cap: usize,
        #[arg(long, default_value_t = 3.0)]
        quota: f64,
        /// Lookahead radius in deci-cost units.
        #[arg(long, default_value_t = 14)]
        g_max: u64,
        /// Score every record instead of querying the kd-tree.
        #[arg(long)]
        scan: bool,
        /// Expansions per move; omit for an unlimited slice.
        #[arg(long)]
        slice: Option<u64>,
        #[arg(long, default_value_t = 10)]
        trace_ratio: u64,
        /// Also print every executed path.
        #[arg(long)]
        paths: bool,
    },
    /// Run a benchmark specification and write per-problem and summary CSVs.
    Bench {
        map: PathBuf,
        problems: PathBuf,
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Write a synthetic map.
    GenMap {
        #[arg(long)]
        width: u32,
        #[arg(long)]
        height: u32,
        #[arg(long, value_enum, default_value_t = MapKind::Rooms)]
        kind: MapKind,
        /// Room side for mazes.
        #[arg(long, default_value_t = 63)]
        room: u32,
        /// Doorway width for mazes (default: half a room).
        #[arg(long)]
        door: Option<u32>,
        /// Extra doorway probability for mazes.
        #[arg(long, default_value_t = 0.5)]
        braid: f64,
        /// Obstacle probability for random maps.
        #[arg(long, default_value_t = 0.25)]
        density: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
enum AlgoName {
    Astar,
    Lrta,
    Knn,
    Tba,
}

#[derive(Clone, Copy, ValueEnum)]
enum MapKind {
    Rooms,
    Random,
}

fn read_map(path: &Path) -> Result<GridMap> {
    let file = File::open(path).map_err(|e| format!("{}: {e}", path.display()))?;
    Ok(parse_map(BufReader::new(file)).map_err(|e| format!("{}: {e}", path.display()))?)
}

fn read_problems(path: &Path, map: &GridMap) -> Result<Vec<Problem>> {
    let file = File::open(path).map_err(|e| format!("{}: {e}", path.display()))?;
    Ok(parse_scenario(BufReader::new(file), map).map_err(|e| format!("{}: {e}", path.display()))?)
}

fn read_db(path: &Path, map: &GridMap) -> Result<SubgoalDatabase> {
    let file = File::open(path).map_err(|e| format!("{}: {e}", path.display()))?;
    Ok(load_database(BufReader::new(file), map).map_err(|e| format!("{}: {e}", path.display()))?)
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path).map_err(|e| format!("{}: {e}", path.display()))?))
}

/// Problems loaded from a scenario may lack optimal costs; fill them in.
fn with_optimal(map: &GridMap, problems: Vec<Problem>) -> Result<Vec<Problem>> {
    problems
        .into_iter()
        .map(|mut p| {
            if p.optimal_cost.is_none() {
                let path = knn_lrta::search::astar(map, p.start, p.goal)
                    .ok_or_else(|| format!("problem {} -> {} is unsolvable", p.start, p.goal))?;
                p.optimal_cost = Some(path.cost);
            }
            Ok(p)
        })
        .collect()
}

fn knn_config(m: usize, hc_cap: usize, quota: f64, g_max: u64, scan: bool) -> Result<AgentConfig> {
    let cfg = AgentConfig {
        m,
        hc_cap,
        quota_mult: quota,
        g_max: Cost(g_max),
        candidates: if scan { CandidateStage::LinearScan } else { CandidateStage::KdTree },
    };
    cfg.validate()?;
    Ok(cfg)
}

/// One `[[run]]` table of a bench specification.
#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RunSpec {
    algo: AlgoName,
    /// Display label; defaults to the record count, slice or g_max.
    label: Option<String>,
    // knn: either a database file or a build request
    db: Option<PathBuf>,
    records: Option<usize>,
    #[serde(default)]
    seed: u64,
    #[serde(default = "default_min_len")]
    min_len: usize,
    #[serde(default = "default_m")]
    m: usize,
    #[serde(default = "default_hc_cap")]
    hc_cap: usize,
    #[serde(default = "default_quota")]
    quota: f64,
    #[serde(default = "default_g_max")]
    g_max: u64,
    #[serde(default)]
    scan: bool,
    // tba; no slice means unlimited
    slice: Option<u64>,
    #[serde(default = "default_trace_ratio")]
    trace_ratio: u64,
}

fn default_min_len() -> usize {
    3
}
fn default_m() -> usize {
    10
}
fn default_hc_cap() -> usize {
    250
}
fn default_quota() -> f64 {
    3.0
}
fn default_g_max() -> u64 {
    14
}
fn default_trace_ratio() -> u64 {
    10
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct BenchSpec {
    run: Vec<RunSpec>,
}

fn bench(map_path: &Path, problems_path: &Path, spec_path: &Path, out: &Path) -> Result<()> {
    let map = read_map(map_path)?;
    let problems = with_optimal(&map, read_problems(problems_path, &map)?)?;
    let text = std::fs::read_to_string(spec_path).map_err(|e| format!("{}: {e}", spec_path.display()))?;
    let spec: BenchSpec = toml::from_str(&text).map_err(|e| format!("{}: {e}", spec_path.display()))?;

    // Records come from independent per-record streams, so one build per
    // (seed, min_len) at the largest size serves every smaller size by prefix.
    let mut largest: HashMap<(u64, usize), usize> = HashMap::new();
    for r in spec.run.iter().filter(|r| r.algo == AlgoName::Knn && r.db.is_none()) {
        let n = r.records.ok_or("knn runs need `records` or `db`")?;
        let e = largest.entry((r.seed, r.min_len)).or_default();
        *e = (*e).max(n);
    }
    let mut built: HashMap<(u64, usize), SubgoalDatabase> = HashMap::new();
    for (&(seed, min_len), &n) in &largest {
        eprintln!("building {n} records (seed {seed})");
        let opts = BuildOptions { min_len, ..Default::default() };
        built.insert((seed, min_len), build_database(&map, n, seed, &opts)?);
    }

    let mut dbs: Vec<Option<SubgoalDatabase>> = Vec::new();
    let mut labels = Vec::new();
    let mut algos = Vec::new();
    for r in &spec.run {
        let (algo, db, default_label) = match r.algo {
            AlgoName::Astar => (Algorithm::AStar, None, String::new()),
            AlgoName::Lrta => (Algorithm::Lrta { g_max: Cost(r.g_max) }, None, r.g_max.to_string()),
            AlgoName::Tba => {
                let label = r.slice.map_or("inf".to_string(), |s| s.to_string());
                (Algorithm::Tba(TbaConfig { slice: r.slice, trace_ratio: r.trace_ratio }), None, label)
            }
            AlgoName::Knn => {
                let cfg = knn_config(r.m, r.hc_cap, r.quota, r.g_max, r.scan)?;
                let db = match (&r.db, r.records) {
                    (Some(path), _) => read_db(path, &map)?,
                    (None, Some(n)) => built[&(r.seed, r.min_len)].truncated(n),
                    (None, None) => unreachable!("checked above"),
                };
                let label = db.len().to_string();
                (Algorithm::Knn(cfg), Some(db), label)
            }
        };
        algos.push(algo);
        dbs.push(db);
        labels.push(r.label.clone().unwrap_or(default_label));
    }
    let runs: Vec<BenchRun> = algos
        .iter()
        .zip(&dbs)
        .zip(&labels)
        .map(|((a, d), l)| BenchRun { algorithm: *a, param: l, db: d.as_ref() })
        .collect();
    let report = run_benchmark(&map, &problems, &runs)?;
    report.write_rows(create(out)?)?;
    let summary = report.summary();
    let summary_path = out.with_extension("summary.csv");
    write_summary(&summary, create(&summary_path)?)?;

    println!(
        "{:<8} {:>8} {:>12} {:>12} {:>12} {:>14} {:>16}",
        "algo", "param", "mean subopt", "median", "us/move", "strict KB", "cumulative KB"
    );
    let kb = |states: f64| states * BYTES_PER_STATE as f64 / 1024.0;
    for s in &summary {
        println!(
            "{:<8} {:>8} {:>11.2}% {:>11.2}% {:>12.3} {:>14.2} {:>16.2}",
            s.algorithm,
            s.param,
            s.mean_subopt_pct,
            s.median_subopt_pct,
            s.mean_us_per_move,
            kb(s.mean_strict_mem_states),
            kb(s.mean_cumulative_mem_states)
        );
    }
    eprintln!("wrote {} and {}", out.display(), summary_path.display());
    Ok(())
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::BuildDb { map, records, seed, out, min_len, threads } => {
            let map = read_map(&map)?;
            let db = build_database(&map, records, seed, &BuildOptions { min_len, threads, ..Default::default() })?;
            save_database(&db, create(&out)?)?;
            eprintln!("{} records, {} stored states", db.len(), db.stored_states());
        }
        Command::ValidateDb { map, db } => {
            let map = read_map(&map)?;
            let db = read_db(&db, &map)?;
            let violations = validate_database(&map, &db);
            for v in &violations {
                println!("record {}: {}", v.record, v.problem);
            }
            println!("{} records, {} stored states, {} violations", db.len(), db.stored_states(), violations.len());
            if !violations.is_empty() {
                return Ok(ExitCode::FAILURE);
            }
        }
        Command::GenProblems { map, count, min_cost, seed, out } => {
            let map = read_map(&map)?;
            let min_cost = Cost(min_cost.unwrap_or(2 * (map.width() as u64 + map.height() as u64)));
            let problems = generate_problems(&map, count, min_cost, seed)?;
            let mut w = create(&out)?;
            write_scenario(&problems, &mut w)?;
            w.flush()?;
        }
        Command::Solve { map, problems, algo, db, m, hc_cap, quota, g_max, scan, slice, trace_ratio, paths } => {
            let map = read_map(&map)?;
            let problems = with_optimal(&map, read_problems(&problems, &map)?)?;
            let algorithm = match algo {
                AlgoName::Astar => Algorithm::AStar,
                AlgoName::Lrta => Algorithm::Lrta { g_max: Cost(g_max) },
                AlgoName::Knn => Algorithm::Knn(knn_config(m, hc_cap, quota, g_max, scan)?),
                AlgoName::Tba => Algorithm::Tba(TbaConfig { slice, trace_ratio }),
            };
            let db = db.map(|p| read_db(&p, &map)).transpose()?;
            let stdout = io::stdout();
            let mut out = stdout.lock();
            writeln!(out, "problem cost optimal subopt_pct moves max_gen updated_h")?;
            for (i, p) in problems.iter().enumerate() {
                let (path, stats) = solve_with(&map, &algorithm, db.as_ref(), p)?;
                validate_path(&map, &path, p.start, p.goal).map_err(|e| format!("problem {i}: {e}"))?;
                let optimal = p.optimal_cost.expect("filled in above");
                writeln!(
                    out,
                    "{i} {} {} {} {} {} {}",
                    path.cost.0,
                    optimal.0,
                    suboptimality(path.cost, optimal)?,
                    stats.moves,
                    stats.max_per_move_generated,
                    stats.updated_h_states
                )?;
                if paths {
                    let states: Vec<String> = path.states.iter().map(|c| format!("{},{}", c.x, c.y)).collect();
                    writeln!(out, "path {i} {}", states.join(" "))?;
                }
            }
        }
        Command::Bench { map, problems, spec, out } => bench(&map, &problems, &spec, &out)?,
        Command::GenMap { width, height, kind, room, door, braid, density, seed, out } => {
            let map = match kind {
                MapKind::Rooms => {
                    let style =
                        MazeStyle { door: door.unwrap_or(room.div_ceil(2)), braid, ..MazeStyle::open_rooms(room) };
                    maze(width, height, style, seed)
                }
                MapKind::Random => random_obstacles(width, height, density, seed),
            };
            let mut w = create(&out)?;
            write_map(&map, &mut w)?;
            w.flush()?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
