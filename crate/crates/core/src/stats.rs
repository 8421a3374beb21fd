//! Per-problem measurements shared by every solver.

use crate::grid::{octile, Coord, Cost, Problem};
use crate::search::SearchError;

/// Counters and timings for one solved problem.
///
/// Memory counters are in stored states. Strictly on-line memory is peak
/// open plus peak closed plus updated heuristic entries; cumulative memory
/// adds the database.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct SearchStats {
    pub solution_cost: Cost,
    pub optimal_cost: Option<Cost>,
    /// Edges traversed.
    pub moves: u64,
    /// Mean planning time per move in microseconds.
    pub planning_time_per_move: f64,
    pub max_per_move_generated: u64,
    pub peak_open: u64,
    pub peak_closed: u64,
    pub updated_h_states: u64,
    pub db_states: u64,
    /// Subgoal selections run, including the initial one.
    pub selections: u64,
    /// Selections that found no usable record.
    pub fallbacks: u64,
}

impl SearchStats {
    pub fn strict_memory(&self) -> u64 {
        self.peak_open + self.peak_closed + self.updated_h_states
    }

    pub fn cumulative_memory(&self) -> u64 {
        self.strict_memory() + self.db_states
    }

    /// A copy with wall-clock fields zeroed, for determinism comparisons.
    pub fn without_timing(&self) -> Self {
        SearchStats { planning_time_per_move: 0.0, ..self.clone() }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SolveError {
    #[error(transparent)]
    Search(#[from] SearchError),
    #[error("gave up at {at} after {moves} moves (budget {budget})")]
    MoveBudget { at: Coord, moves: u64, budget: u64 },
    #[error("no path from {start} to {goal}")]
    Unreachable { start: Coord, goal: Coord },
}

/// Moves allowed per optimal cardinal step before a solver aborts.
pub const MOVE_BUDGET_FACTOR: u64 = 10_000;

/// Defensive move limit for a problem: `MOVE_BUDGET_FACTOR` times the optimal
/// cost in cardinal steps, rounded up, or the octile distance when the
/// optimal cost is unknown.
pub fn move_budget(problem: &Problem) -> u64 {
    let c = problem.optimal_cost.unwrap_or_else(|| octile(problem.start, problem.goal));
    MOVE_BUDGET_FACTOR * c.0.div_ceil(Cost::CARDINAL.0).max(1)
}
