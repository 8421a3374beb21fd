//! Time-bounded A*: one persistent A* search, advanced a fixed number of
//! expansions per move, with the agent walking toward the most promising
//! open state and backing up along its own trail when that state's path no
//! longer passes through it.
//!
//! Bookkeeping per move, in units where an expansion costs `trace_ratio` and
//! one backtrace step costs 1, with `U = slice * trace_ratio`:
//!
//! 1. A trace left unfinished by an earlier move resumes first, using at
//!    most `U / 2` units (always at least one step). Once the search has
//!    finished it may use all of `U`.
//! 2. While the search is unfinished it expands
//!    `min(slice, max(1, (U - used) / trace_ratio))` states.
//! 3. With no trace pending, a new one starts from the most promising open
//!    state (the goal once expanded) and spends what is left of `U`.
//! 4. A trace is complete when it reaches the agent's state or the start;
//!    the traced states become the path to follow.
//! 5. The agent steps forward along that path when it stands on it, steps
//!    back along its trail when it does not, and waits at the path's head.

use std::time::{Duration, Instant};

use rustc_hash::FxHashMap;

use crate::agent::per_move_us;
use crate::grid::{Coord, Cost, GridMap, Path, Problem};
use crate::search::{AStarSearch, Expansion};
use crate::stats::{move_budget, SearchStats, SolveError};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TbaConfig {
    /// Expansions per move; `None` plans to completion before moving.
    pub slice: Option<u64>,
    /// Backtrace steps that cost as much as one expansion.
    pub trace_ratio: u64,
}

impl Default for TbaConfig {
    fn default() -> Self {
        TbaConfig { slice: Some(50), trace_ratio: 10 }
    }
}

struct Trace {
    head: Coord,
    cur: Coord,
    /// States from `head` back to `cur`, head first.
    states: Vec<Coord>,
}

impl Trace {
    fn new(head: Coord) -> Self {
        Trace { head, cur: head, states: vec![head] }
    }

    /// Follows parent pointers for up to `steps` steps; returns the steps
    /// taken and whether the trace reached `agent` or the start.
    fn run(&mut self, search: &AStarSearch, agent: Coord, steps: u64) -> (u64, bool) {
        let mut taken = 0;
        loop {
            if self.cur == agent || self.cur == search.start() {
                return (taken, true);
            }
            if taken >= steps {
                return (taken, false);
            }
            let p = search.parent(self.cur).expect("traced states descend from the start");
            self.cur = p;
            self.states.push(p);
            taken += 1;
        }
    }
}

/// Solves `problem` with time-bounded A*.
pub fn tba_solve(map: &GridMap, problem: &Problem, cfg: &TbaConfig) -> Result<(Path, SearchStats), SolveError> {
    assert!(cfg.trace_ratio >= 1 && cfg.slice != Some(0), "slice and trace_ratio must be positive");
    let (start, goal) = (problem.start, problem.goal);
    let budget = move_budget(problem);
    let ratio = cfg.trace_ratio;
    let units = cfg.slice.map(|t| t.saturating_mul(ratio));

    let mut search = AStarSearch::new(map, start, goal);
    let mut trace: Option<Trace> = None;
    let mut follow: Vec<Coord> = Vec::new();
    let mut follow_at: FxHashMap<Coord, usize> = FxHashMap::default();
    let mut trail = vec![start];
    let mut s = start;
    let mut states = vec![start];
    let mut cost = Cost::ZERO;
    let mut stats = SearchStats { optimal_cost: problem.optimal_cost, ..Default::default() };
    let mut planning = Duration::ZERO;
    let mut iterations = 0u64;

    while s != goal {
        if iterations >= budget {
            return Err(SolveError::MoveBudget { at: s, moves: stats.moves, budget });
        }
        iterations += 1;
        let t0 = Instant::now();
        let generated_before = search.generated();
        let mut used = 0u64;

        if search.goal_expanded() && trace.as_ref().is_some_and(|t| t.head != goal) {
            trace = None;
        }
        if let Some(t) = trace.as_mut() {
            let cap = match units {
                None => u64::MAX,
                Some(u) if search.is_finished() => u.max(1),
                Some(u) => (u / 2).max(1),
            };
            let (taken, done) = t.run(&search, s, cap);
            used += taken;
            if done {
                adopt(trace.take().unwrap(), &mut follow, &mut follow_at);
            }
        }
        if !search.is_finished() {
            let n = match (cfg.slice, units) {
                (Some(slice), Some(u)) => slice.min((u.saturating_sub(used) / ratio).max(1)),
                _ => u64::MAX,
            };
            for _ in 0..n {
                if search.expand() != Expansion::Continue {
                    break;
                }
            }
            used = used.saturating_add(n.saturating_mul(ratio));
            if search.is_finished() && !search.goal_expanded() {
                return Err(SolveError::Unreachable { start, goal });
            }
        }
        if trace.is_none() && follow.last() != Some(&goal) {
            let head = search.most_promising().ok_or(SolveError::Unreachable { start, goal })?;
            let mut t = Trace::new(head);
            let left = units.map_or(u64::MAX, |u| u.saturating_sub(used));
            let (_, done) = t.run(&search, s, left);
            if done {
                adopt(t, &mut follow, &mut follow_at);
            } else {
                trace = Some(t);
            }
        }

        let next = match follow_at.get(&s) {
            Some(&i) if i + 1 < follow.len() => Some(follow[i + 1]),
            Some(_) => None,
            None if trail.len() > 1 => {
                trail.pop();
                Some(*trail.last().unwrap())
            }
            None => None,
        };
        planning += t0.elapsed();
        stats.max_per_move_generated = stats.max_per_move_generated.max(search.generated() - generated_before);
        if let Some(n) = next {
            if follow_at.contains_key(&s) {
                trail.push(n);
            }
            cost += map.edge_cost(s, n).expect("tba moves along an edge");
            stats.moves += 1;
            s = n;
            states.push(n);
        }
    }

    stats.solution_cost = cost;
    stats.peak_open = search.peak_open() as u64;
    stats.peak_closed = search.closed_len() as u64;
    stats.planning_time_per_move = per_move_us(planning, iterations);
    Ok((Path { states, cost }, stats))
}

fn adopt(t: Trace, follow: &mut Vec<Coord>, follow_at: &mut FxHashMap<Coord, usize>) {
    debug_assert_eq!(t.states[0], t.head);
    *follow = t.states;
    follow.reverse();
    follow_at.clear();
    for (i, &c) in follow.iter().enumerate() {
        follow_at.insert(c, i);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::validate_path;
    use crate::search::astar;

    fn problem(map: &GridMap, a: Coord, b: Coord) -> Problem {
        Problem { start: a, goal: b, optimal_cost: astar(map, a, b).map(|p| p.cost) }
    }

    #[test]
    fn unlimited_slice_is_astar() {
        let map = crate::grid::maps::random_obstacles(40, 40, 0.25, 3);
        let probs = crate::grid::generate_problems(&map, 20, Cost(100), 1).unwrap();
        for p in probs {
            let (path, stats) = tba_solve(&map, &p, &TbaConfig { slice: None, trace_ratio: 10 }).unwrap();
            assert_eq!(Some(path.cost), p.optimal_cost);
            assert!(validate_path(&map, &path, p.start, p.goal).is_ok());
            assert_eq!(stats.moves as usize, path.moves());
        }
    }

    #[test]
    fn small_slice_on_empty_map() {
        let map = GridMap::open(10, 10);
        let p = problem(&map, Coord::new(0, 0), Coord::new(9, 9));
        let (path, stats) = tba_solve(&map, &p, &TbaConfig { slice: Some(5), trace_ratio: 10 }).unwrap();
        assert!(path.cost >= Cost(126));
        assert!(validate_path(&map, &path, p.start, p.goal).is_ok());
        assert!(stats.max_per_move_generated <= 5 * 8);
    }

    #[test]
    fn principal_path_flip_backtracks() {
        // The straight corridor looks best until its far end turns out to be
        // closed; the agent has to come back and take the lower corridor.
        let map = GridMap::from_rows(&[
            "....................",
            ".@@@@@@@@@@@@@@@@@@.",
            ".@@@@@@@@@@@@@@@@@@.",
            "...................@",
            ".@@@@@@@@@@@@@@@@@@@",
            ".@@@@@@@@@@@@@@@@@@.",
            "....................",
        ])
        .unwrap();
        let (a, b) = (Coord::new(0, 3), Coord::new(19, 5));
        let p = problem(&map, a, b);
        let (path, _) = tba_solve(&map, &p, &TbaConfig { slice: Some(2), trace_ratio: 10 }).unwrap();
        assert!(validate_path(&map, &path, a, b).is_ok());
        let mut seen = std::collections::HashSet::new();
        assert!(path.states.iter().any(|c| !seen.insert(*c)), "expected backtracked states");
        assert!(path.cost > p.optimal_cost.unwrap());
    }

    #[test]
    fn lists_do_not_depend_on_slice() {
        let map = crate::grid::maps::random_obstacles(32, 32, 0.3, 8);
        let p = crate::grid::generate_problems(&map, 1, Cost(200), 2).unwrap()[0];
        let sizes: Vec<(u64, u64)> = [Some(1), Some(7), Some(100), None]
            .into_iter()
            .map(|slice| {
                let (_, st) = tba_solve(&map, &p, &TbaConfig { slice, trace_ratio: 10 }).unwrap();
                (st.peak_open, st.peak_closed)
            })
            .collect();
        assert!(sizes.windows(2).all(|w| w[0] == w[1]), "{sizes:?}");
    }
}
