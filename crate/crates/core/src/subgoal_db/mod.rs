//! Offline subgoal database: random optimal paths compressed into chains of
//! hill-climbing-reachable states, plus the binary file format.

mod compress;
mod io;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::grid::{Coord, GridMap};
use crate::kd_index::KdIndex;
use crate::search::{astar, hc_reachable};

pub use compress::compress;
pub use io::{load_database, save_database, FormatError, MAGIC, VERSION};

/// A compressed optimal path: start, zero or more subgoals, end.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SubgoalRecord {
    states: Vec<Coord>,
}

impl SubgoalRecord {
    /// Panics if fewer than two states are given.
    pub fn new(states: Vec<Coord>) -> Self {
        assert!(states.len() >= 2, "a record needs a start and an end");
        SubgoalRecord { states }
    }

    pub fn states(&self) -> &[Coord] {
        &self.states
    }

    pub fn start(&self) -> Coord {
        self.states[0]
    }

    pub fn end(&self) -> Coord {
        self.states[self.states.len() - 1]
    }

    /// Interior states between start and end.
    pub fn subgoals(&self) -> &[Coord] {
        &self.states[1..self.states.len() - 1]
    }

    pub fn subgoal_count(&self) -> usize {
        self.states.len() - 2
    }
}

/// An immutable set of subgoal records for one map, indexed by endpoints.
#[derive(Clone, Debug)]
pub struct SubgoalDatabase {
    width: u32,
    height: u32,
    records: Vec<SubgoalRecord>,
    index: KdIndex,
}

impl PartialEq for SubgoalDatabase {
    fn eq(&self, other: &Self) -> bool {
        self.width == other.width && self.height == other.height && self.records == other.records
    }
}

impl SubgoalDatabase {
    pub fn new(width: u32, height: u32, records: Vec<SubgoalRecord>) -> Self {
        let index = KdIndex::build(&records);
        SubgoalDatabase { width, height, records, index }
    }

    /// A database with no records; every selection falls back to the goal.
    pub fn empty(map: &GridMap) -> Self {
        Self::new(map.width(), map.height(), Vec::new())
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn records(&self) -> &[SubgoalRecord] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn index(&self) -> &KdIndex {
        &self.index
    }

    /// Total number of stored states across all records.
    pub fn stored_states(&self) -> u64 {
        self.records.iter().map(|r| r.states.len() as u64).sum()
    }

    /// The first `n` records as a database of their own. Records are built
    /// from independent random streams, so this equals building with `n`.
    pub fn truncated(&self, n: usize) -> Self {
        Self::new(self.width, self.height, self.records[..n.min(self.records.len())].to_vec())
    }

    pub fn matches(&self, map: &GridMap) -> bool {
        self.width == map.width() && self.height == map.height()
    }
}

/// Knobs for [`build_database`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BuildOptions {
    /// Minimum optimal-path length in states; shorter draws are redrawn.
    pub min_len: usize,
    /// Redraw bound per record before the map is declared degenerate.
    pub max_redraws: u64,
    /// Worker threads; `None` uses the global rayon pool.
    pub threads: Option<usize>,
}

impl Default for BuildOptions {
    fn default() -> Self {
        BuildOptions { min_len: 3, max_redraws: 1_000_000, threads: None }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum BuildError {
    #[error("map needs at least two passable cells")]
    TooFewCells,
    #[error("record {record}: no usable start/goal pair after {draws} draws")]
    Exhausted { record: usize, draws: u64 },
    #[error("record {record}: compressed states are not an ordered subset of the source path")]
    NotSubsequence { record: usize },
    #[error("could not start worker pool: {0}")]
    ThreadPool(String),
}

/// Random stream for record `r`: one ChaCha stream per record keyed by
/// `(seed, r)`, so records never depend on build order or parallelism.
fn record_rng(seed: u64, r: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(r as u64);
    rng
}

fn build_record(map: &GridMap, seed: u64, r: usize, opts: &BuildOptions) -> Result<SubgoalRecord, BuildError> {
    let ids = map.passable_ids();
    let mut rng = record_rng(seed, r);
    for _ in 0..opts.max_redraws {
        let start = map.coord(ids[rng.gen_range(0..ids.len())]);
        let goal = map.coord(ids[rng.gen_range(0..ids.len())]);
        if start == goal {
            continue;
        }
        let Some(path) = astar(map, start, goal) else { continue };
        if path.states.len() < opts.min_len.max(2) {
            continue;
        }
        let record = compress(map, &path);
        if !is_ordered_subset(record.states(), &path.states) {
            return Err(BuildError::NotSubsequence { record: r });
        }
        return Ok(record);
    }
    Err(BuildError::Exhausted { record: r, draws: opts.max_redraws })
}

fn is_ordered_subset(sub: &[Coord], full: &[Coord]) -> bool {
    let mut it = full.iter();
    sub.iter().all(|s| it.any(|p| p == s))
}

/// Builds `n` records from seeded random start/goal draws.
///
/// ```
/// use knn_lrta::grid::GridMap;
/// use knn_lrta::subgoal_db::{build_database, BuildOptions};
/// let map = GridMap::open(16, 16);
/// let db = build_database(&map, 5, 42, &BuildOptions::default()).unwrap();
/// assert_eq!(db.len(), 5);
/// // no obstacles, so every optimal path is one greedy climb
/// assert!(db.records().iter().all(|r| r.subgoal_count() == 0));
/// ```
pub fn build_database(map: &GridMap, n: usize, seed: u64, opts: &BuildOptions) -> Result<SubgoalDatabase, BuildError> {
    if n > 0 && map.passable_count() < 2 {
        return Err(BuildError::TooFewCells);
    }
    let build = || -> Result<Vec<SubgoalRecord>, BuildError> {
        (0..n).into_par_iter().map(|r| build_record(map, seed, r, opts)).collect()
    };
    let records = match opts.threads {
        None => build()?,
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build()
            .map_err(|e| BuildError::ThreadPool(e.to_string()))?
            .install(build)?,
    };
    Ok(SubgoalDatabase::new(map.width(), map.height(), records))
}

/// A record that failed validation, and why.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RecordViolation {
    pub record: usize,
    pub problem: String,
}

/// Checks every record against the map: passable states, and every
/// consecutive pair hill-climbing reachable with no step cap.
pub fn validate_database(map: &GridMap, db: &SubgoalDatabase) -> Vec<RecordViolation> {
    let mut out = Vec::new();
    if !db.matches(map) {
        out.push(RecordViolation {
            record: 0,
            problem: format!("database is {}x{}, map is {}x{}", db.width, db.height, map.width(), map.height()),
        });
        return out;
    }
    let checks: Vec<Option<RecordViolation>> = db
        .records
        .par_iter()
        .enumerate()
        .map(|(i, r)| {
            if let Some(s) = r.states.iter().find(|s| !map.is_passable(**s)) {
                return Some(RecordViolation { record: i, problem: format!("state {s} is not passable") });
            }
            if r.start() == r.end() {
                return Some(RecordViolation { record: i, problem: "start equals end".into() });
            }
            r.states.windows(2).find(|w| !hc_reachable(map, w[0], w[1], None)).map(|w| RecordViolation {
                record: i,
                problem: format!("{} is not hill-climbing reachable from {}", w[1], w[0]),
            })
        })
        .collect();
    out.extend(checks.into_iter().flatten());
    out
}
