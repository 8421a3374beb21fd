//! Benchmark harness: runs algorithms over a problem set, validates every
//! path, and reports per-problem rows plus per-configuration aggregates.
//!
//! Costs in reports are integer deci-costs. Memory is counted in stored
//! states; [`BYTES_PER_STATE`] converts to bytes for display.

use std::fmt;
use std::io;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::agent::{lrta_solve, solve, AgentConfig};
use crate::grid::{validate_path, Cost, GridMap, Path, PathError, Problem};
use crate::search::AStarSearch;
use crate::stats::{SearchStats, SolveError};
use crate::subgoal_db::SubgoalDatabase;
use crate::tba::{tba_solve, TbaConfig};

/// Bytes per stored state when memory is shown in bytes: one 32-bit id.
pub const BYTES_PER_STATE: u64 = 4;

/// Suboptimality `(c / c* - 1) * 100` as an exact fraction of percent.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Percent {
    num: u64,
    den: u64,
}

impl Percent {
    pub fn as_f64(self) -> f64 {
        self.num as f64 / self.den as f64
    }

    /// Hundredths of a percent, rounded half up.
    pub fn hundredths(self) -> u64 {
        ((self.num as u128 * 200 + self.den as u128) / (2 * self.den as u128)) as u64
    }

    /// The value as printed, two decimals.
    pub fn rounded(self) -> f64 {
        self.to_string().parse().expect("formatted percent parses")
    }
}

impl fmt::Display for Percent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let h = self.hundredths();
        write!(f, "{}.{:02}", h / 100, h % 100)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MeasureError {
    #[error("optimal cost must be positive")]
    ZeroOptimal,
    #[error("cost {cost} is below the optimal {optimal}")]
    BelowOptimal { cost: Cost, optimal: Cost },
}

/// Exact suboptimality of a solution costing `c` against optimum `c_star`.
///
/// ```
/// use knn_lrta::bench::suboptimality;
/// use knn_lrta::grid::Cost;
/// assert_eq!(suboptimality(Cost(164), Cost(150)).unwrap().to_string(), "9.33");
/// assert_eq!(suboptimality(Cost(225), Cost(150)).unwrap().to_string(), "50.00");
/// ```
pub fn suboptimality(c: Cost, c_star: Cost) -> Result<Percent, MeasureError> {
    if c_star == Cost::ZERO {
        return Err(MeasureError::ZeroOptimal);
    }
    if c < c_star {
        return Err(MeasureError::BelowOptimal { cost: c, optimal: c_star });
    }
    Ok(Percent { num: (c.0 - c_star.0) * 100, den: c_star.0 })
}

/// Smallest number of agents `K` for which `db + K * strict_a < K * strict_b`,
/// i.e. the point where agents of algorithm A sharing one database use less
/// memory in total than the same number of agents of algorithm B. `None`
/// when A never catches up.
///
/// ```
/// use knn_lrta::bench::break_even;
/// assert_eq!(break_even(0.0, 1.0, 2.0), Some(1));
/// assert_eq!(break_even(10.0, 1.0, 2.0), Some(11));
/// assert_eq!(break_even(10.0, 2.0, 2.0), None);
/// ```
pub fn break_even(db: f64, strict_a: f64, strict_b: f64) -> Option<u64> {
    if strict_a >= strict_b {
        return None;
    }
    Some((db / (strict_b - strict_a)).floor() as u64 + 1)
}

/// One algorithm configuration.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Algorithm {
    AStar,
    Lrta { g_max: Cost },
    Knn(AgentConfig),
    Tba(TbaConfig),
}

impl Algorithm {
    pub fn name(&self) -> &'static str {
        match self {
            Algorithm::AStar => "astar",
            Algorithm::Lrta { .. } => "lrta",
            Algorithm::Knn(_) => "knn",
            Algorithm::Tba(_) => "tba",
        }
    }

    pub fn needs_database(&self) -> bool {
        matches!(self, Algorithm::Knn(_))
    }
}

/// A* as an agent: plans the whole path before its first move.
pub fn astar_solve(map: &GridMap, problem: &Problem) -> Result<(Path, SearchStats), SolveError> {
    let t0 = std::time::Instant::now();
    let mut search = AStarSearch::new(map, problem.start, problem.goal);
    search.run();
    let elapsed = t0.elapsed();
    let unreachable = SolveError::Unreachable { start: problem.start, goal: problem.goal };
    let path = if search.goal_expanded() {
        search.path_to(problem.goal).ok_or(unreachable)?
    } else {
        return Err(unreachable);
    };
    let moves = path.moves() as u64;
    let stats = SearchStats {
        solution_cost: path.cost,
        optimal_cost: problem.optimal_cost,
        moves,
        planning_time_per_move: crate::agent::per_move_us(elapsed, moves),
        max_per_move_generated: search.generated(),
        peak_open: search.peak_open() as u64,
        peak_closed: search.closed_len() as u64,
        ..Default::default()
    };
    Ok((path, stats))
}

/// Runs one algorithm on one problem. `db` is required for kNN LRTA*.
pub fn solve_with(
    map: &GridMap,
    algo: &Algorithm,
    db: Option<&SubgoalDatabase>,
    problem: &Problem,
) -> Result<(Path, SearchStats), SolveError> {
    match algo {
        Algorithm::AStar => astar_solve(map, problem),
        Algorithm::Lrta { g_max } => lrta_solve(map, problem, *g_max),
        Algorithm::Knn(cfg) => {
            let empty;
            let db = match db {
                Some(db) => db,
                None => {
                    empty = SubgoalDatabase::empty(map);
                    &empty
                }
            };
            solve(map, db, problem, cfg)
        }
        Algorithm::Tba(cfg) => tba_solve(map, problem, cfg),
    }
}

/// An algorithm with a display parameter and, for kNN LRTA*, its database.
#[derive(Clone, Copy, Debug)]
pub struct BenchRun<'a> {
    pub algorithm: Algorithm,
    /// Free-form label such as the record count or time slice.
    pub param: &'a str,
    pub db: Option<&'a SubgoalDatabase>,
}

/// One (algorithm, parameter, problem) measurement.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub algorithm: String,
    pub param: String,
    pub problem: usize,
    pub cost: u64,
    pub optimal: u64,
    pub subopt_pct: f64,
    pub moves: u64,
    pub us_per_move: f64,
    pub max_gen_per_move: u64,
    pub peak_open: u64,
    pub peak_closed: u64,
    pub updated_h: u64,
    pub db_states: u64,
    pub strict_mem_states: u64,
    pub cumulative_mem_states: u64,
}

/// Aggregates over all problems of one (algorithm, parameter).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub algorithm: String,
    pub param: String,
    pub problems: usize,
    pub mean_subopt_pct: f64,
    pub median_subopt_pct: f64,
    /// Standard error of the mean suboptimality.
    pub stderr_subopt_pct: f64,
    pub mean_cost: f64,
    pub mean_moves: f64,
    pub mean_us_per_move: f64,
    pub median_us_per_move: f64,
    pub max_gen_per_move: u64,
    pub mean_strict_mem_states: f64,
    pub mean_cumulative_mem_states: f64,
    pub db_states: u64,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct BenchReport {
    pub rows: Vec<BenchRow>,
}

#[derive(Debug, thiserror::Error)]
pub enum BenchError {
    #[error("problem {problem} has no recorded optimal cost")]
    MissingOptimal { problem: usize },
    #[error("{algorithm}({param}) needs a subgoal database")]
    MissingDatabase { algorithm: &'static str, param: String },
    #[error("{algorithm}({param}) failed on problem {problem}: {source}")]
    Solve { algorithm: &'static str, param: String, problem: usize, source: SolveError },
    #[error("{algorithm}({param}) returned an invalid path on problem {problem}: {source}")]
    InvalidPath { algorithm: &'static str, param: String, problem: usize, source: PathError },
    #[error("{algorithm}({param}) on problem {problem}: {source}")]
    Measure { algorithm: &'static str, param: String, problem: usize, source: MeasureError },
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] io::Error),
}

fn row_for(run: &BenchRun, problem: usize, p: &Problem, map: &GridMap) -> Result<BenchRow, BenchError> {
    let algorithm = run.algorithm.name();
    let param = || run.param.to_string();
    let optimal = p.optimal_cost.ok_or(BenchError::MissingOptimal { problem })?;
    let (path, stats) = solve_with(map, &run.algorithm, run.db, p).map_err(|source| BenchError::Solve {
        algorithm,
        param: param(),
        problem,
        source,
    })?;
    validate_path(map, &path, p.start, p.goal).map_err(|source| BenchError::InvalidPath {
        algorithm,
        param: param(),
        problem,
        source,
    })?;
    let subopt = suboptimality(path.cost, optimal).map_err(|source| BenchError::Measure {
        algorithm,
        param: param(),
        problem,
        source,
    })?;
    Ok(BenchRow {
        algorithm: algorithm.to_string(),
        param: param(),
        problem,
        cost: path.cost.0,
        optimal: optimal.0,
        subopt_pct: subopt.rounded(),
        moves: stats.moves,
        us_per_move: stats.planning_time_per_move,
        max_gen_per_move: stats.max_per_move_generated,
        peak_open: stats.peak_open,
        peak_closed: stats.peak_closed,
        updated_h: stats.updated_h_states,
        db_states: stats.db_states,
        strict_mem_states: stats.strict_memory(),
        cumulative_mem_states: stats.cumulative_memory(),
    })
}

/// Runs every configuration over every problem, in parallel over problems.
/// Rows are ordered by run, then problem.
pub fn run_benchmark(map: &GridMap, problems: &[Problem], runs: &[BenchRun]) -> Result<BenchReport, BenchError> {
    let mut rows = Vec::with_capacity(problems.len() * runs.len());
    for run in runs {
        if run.algorithm.needs_database() && run.db.is_none() {
            return Err(BenchError::MissingDatabase { algorithm: run.algorithm.name(), param: run.param.to_string() });
        }
        let batch: Vec<BenchRow> =
            problems.par_iter().enumerate().map(|(i, p)| row_for(run, i, p, map)).collect::<Result<_, _>>()?;
        rows.extend(batch);
    }
    Ok(BenchReport { rows })
}

fn mean(xs: impl Iterator<Item = f64>) -> (f64, usize) {
    let (sum, n) = xs.fold((0.0, 0usize), |(s, n), x| (s + x, n + 1));
    (if n == 0 { 0.0 } else { sum / n as f64 }, n)
}

fn median(mut xs: Vec<f64>) -> f64 {
    if xs.is_empty() {
        return 0.0;
    }
    xs.sort_by(f64::total_cmp);
    let n = xs.len();
    if n % 2 == 1 {
        xs[n / 2]
    } else {
        (xs[n / 2 - 1] + xs[n / 2]) / 2.0
    }
}

impl BenchReport {
    /// Per-(algorithm, param) aggregates, in order of first appearance.
    pub fn summary(&self) -> Vec<SummaryRow> {
        let mut keys: Vec<(&str, &str)> = Vec::new();
        for r in &self.rows {
            let k = (r.algorithm.as_str(), r.param.as_str());
            if !keys.contains(&k) {
                keys.push(k);
            }
        }
        keys.into_iter()
            .map(|(a, p)| {
                let rows: Vec<&BenchRow> = self.rows.iter().filter(|r| r.algorithm == a && r.param == p).collect();
                let subopt: Vec<f64> = rows.iter().map(|r| r.subopt_pct).collect();
                let (mean_subopt, n) = mean(subopt.iter().copied());
                let stderr = if n > 1 {
                    let var = subopt.iter().map(|x| (x - mean_subopt).powi(2)).sum::<f64>() / (n - 1) as f64;
                    (var / n as f64).sqrt()
                } else {
                    0.0
                };
                let us: Vec<f64> = rows.iter().map(|r| r.us_per_move).collect();
                SummaryRow {
                    algorithm: a.to_string(),
                    param: p.to_string(),
                    problems: n,
                    mean_subopt_pct: mean_subopt,
                    median_subopt_pct: median(subopt),
                    stderr_subopt_pct: stderr,
                    mean_cost: mean(rows.iter().map(|r| r.cost as f64)).0,
                    mean_moves: mean(rows.iter().map(|r| r.moves as f64)).0,
                    mean_us_per_move: mean(us.iter().copied()).0,
                    median_us_per_move: median(us),
                    max_gen_per_move: rows.iter().map(|r| r.max_gen_per_move).max().unwrap_or(0),
                    mean_strict_mem_states: mean(rows.iter().map(|r| r.strict_mem_states as f64)).0,
                    mean_cumulative_mem_states: mean(rows.iter().map(|r| r.cumulative_mem_states as f64)).0,
                    db_states: rows.iter().map(|r| r.db_states).max().unwrap_or(0),
                }
            })
            .collect()
    }

    pub fn write_rows<W: io::Write>(&self, sink: W) -> Result<(), BenchError> {
        write_csv(&self.rows, sink)
    }

    pub fn read_rows<R: io::Read>(source: R) -> Result<Self, BenchError> {
        Ok(BenchReport { rows: read_csv(source)? })
    }
}

pub fn write_summary<W: io::Write>(rows: &[SummaryRow], sink: W) -> Result<(), BenchError> {
    write_csv(rows, sink)
}

pub fn read_summary<R: io::Read>(source: R) -> Result<Vec<SummaryRow>, BenchError> {
    read_csv(source)
}

fn write_csv<T: Serialize, W: io::Write>(rows: &[T], sink: W) -> Result<(), BenchError> {
    let mut w = csv::Writer::from_writer(sink);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

fn read_csv<T: for<'de> Deserialize<'de>, R: io::Read>(source: R) -> Result<Vec<T>, BenchError> {
    csv::Reader::from_reader(source).deserialize().map(|r| r.map_err(BenchError::from)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{generate_problems, maps};

    #[test]
    fn suboptimality_examples() {
        assert_eq!(suboptimality(Cost(150), Cost(150)).unwrap().to_string(), "0.00");
        assert_eq!(suboptimality(Cost(300), Cost(200)).unwrap().to_string(), "50.00");
        let p = suboptimality(Cost(164), Cost(150)).unwrap();
        assert_eq!(p.to_string(), "9.33");
        assert!((p.as_f64() - 28.0 / 3.0).abs() < 1e-12);
        // half up: 1/8 percent of 800 is 0.125
        assert_eq!(suboptimality(Cost(801), Cost(800)).unwrap().to_string(), "0.13");
        assert_eq!(suboptimality(Cost(5), Cost(0)), Err(MeasureError::ZeroOptimal));
        assert!(suboptimality(Cost(5), Cost(6)).is_err());
    }

    #[test]
    fn break_even_against_reference_memory_figures() {
        // cumulative minus strictly on-line memory is the database share
        let tba = 1353.94;
        let knn = |strict: f64, cumulative: f64| break_even(cumulative - strict, strict, tba);
        assert_eq!(knn(8.62, 265.65), Some(1));
        assert_eq!(knn(5.04, 1034.08), Some(1));
        assert_eq!(knn(4.23, 1547.85), Some(2));
        assert_eq!(knn(4.22, 2062.20), Some(2));
        assert_eq!(knn(3.04, 87456.35), Some(65));
        assert_eq!(knn(8.24, 87066.34), Some(65));
        assert_eq!(knn(18.76, 87019.74), Some(66));
        assert_eq!(break_even(5.0, 3.0, 3.0), None);
    }

    #[test]
    fn report_round_trips_and_aggregates() {
        let map = maps::random_obstacles(32, 32, 0.2, 1);
        let problems = generate_problems(&map, 6, Cost(150), 2).unwrap();
        let db = crate::subgoal_db::build_database(&map, 20, 3, &Default::default()).unwrap();
        let runs = [
            BenchRun { algorithm: Algorithm::AStar, param: "", db: None },
            BenchRun { algorithm: Algorithm::Knn(AgentConfig::default()), param: "20", db: Some(&db) },
            BenchRun { algorithm: Algorithm::Tba(TbaConfig { slice: Some(5), trace_ratio: 10 }), param: "5", db: None },
        ];
        let report = run_benchmark(&map, &problems, &runs).unwrap();
        assert_eq!(report.rows.len(), 18);
        assert!(report.rows.iter().filter(|r| r.algorithm == "astar").all(|r| r.subopt_pct == 0.0));
        let mut bytes = Vec::new();
        report.write_rows(&mut bytes).unwrap();
        let header = String::from_utf8(bytes.clone()).unwrap().lines().next().unwrap().to_string();
        assert_eq!(
            header,
            "algorithm,param,problem,cost,optimal,subopt_pct,moves,us_per_move,max_gen_per_move,peak_open,\
             peak_closed,updated_h,db_states,strict_mem_states,cumulative_mem_states"
        );
        let back = BenchReport::read_rows(&bytes[..]).unwrap();
        assert_eq!(back, report);
        let summary = report.summary();
        assert_eq!(summary.len(), 3);
        let mut sbytes = Vec::new();
        write_summary(&summary, &mut sbytes).unwrap();
        assert_eq!(read_summary(&sbytes[..]).unwrap(), back.summary());
    }

    #[test]
    fn empty_problem_set() {
        let map = GridMap::open(4, 4);
        let runs = [BenchRun { algorithm: Algorithm::AStar, param: "", db: None }];
        assert!(run_benchmark(&map, &[], &runs).unwrap().rows.is_empty());
    }

    #[test]
    fn knn_without_database_is_rejected() {
        let map = GridMap::open(4, 4);
        let runs = [BenchRun { algorithm: Algorithm::Knn(AgentConfig::default()), param: "0", db: None }];
        assert!(matches!(run_benchmark(&map, &[], &runs), Err(BenchError::MissingDatabase { .. })));
    }
}
