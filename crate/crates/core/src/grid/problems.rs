use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rustc_hash::FxHashSet;

use super::{Coord, Cost, GridMap};
use crate::search::astar;

/// A start/goal pair, optionally annotated with its optimal cost.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Problem {
    pub start: Coord,
    pub goal: Coord,
    pub optimal_cost: Option<Cost>,
}

impl Problem {
    pub fn new(start: Coord, goal: Coord) -> Self {
        Problem { start, goal, optimal_cost: None }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ProblemError {
    #[error("map needs at least two passable cells")]
    TooFewCells,
    #[error("found only {found} of {requested} problems with cost >= {min_cost} after {draws} draws")]
    Exhausted { requested: usize, found: usize, min_cost: Cost, draws: u64 },
}

/// Default bound on random draws before giving up.
pub const DEFAULT_MAX_DRAWS: u64 = 1_000_000;

/// Draws `count` distinct solvable problems whose optimal cost is at least
/// `min_cost`. Deterministic for a given seed.
pub fn generate_problems(map: &GridMap, count: usize, min_cost: Cost, seed: u64) -> Result<Vec<Problem>, ProblemError> {
    generate_problems_with_limit(map, count, min_cost, seed, DEFAULT_MAX_DRAWS)
}

pub fn generate_problems_with_limit(
    map: &GridMap,
    count: usize,
    min_cost: Cost,
    seed: u64,
    max_draws: u64,
) -> Result<Vec<Problem>, ProblemError> {
    if count == 0 {
        return Ok(Vec::new());
    }
    let ids = map.passable_ids();
    if ids.len() < 2 {
        return Err(ProblemError::TooFewCells);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut seen = FxHashSet::default();
    let mut out = Vec::with_capacity(count);
    let mut draws = 0u64;
    while out.len() < count {
        if draws >= max_draws {
            return Err(ProblemError::Exhausted { requested: count, found: out.len(), min_cost, draws });
        }
        draws += 1;
        let start = map.coord(ids[rng.gen_range(0..ids.len())]);
        let goal = map.coord(ids[rng.gen_range(0..ids.len())]);
        if start == goal || seen.contains(&(start, goal)) {
            continue;
        }
        let Some(path) = astar(map, start, goal) else { continue };
        if path.cost < min_cost {
            continue;
        }
        seen.insert((start, goal));
        out.push(Problem { start, goal, optimal_cost: Some(path.cost) });
    }
    Ok(out)
}
