//! Greedy hill-climbing reachability.
//!
//! The climber is LRTA* without learning: from the current state it generates
//! the immediate successors, gives up if none has a strictly smaller heuristic
//! (a local minimum or plateau), and otherwise takes the same move LRTA* with
//! a one-move lookahead would take.

use super::lrta::best_successor;
use super::HeuristicTable;
use crate::grid::{octile, Coord, Cost, GridMap};

/// Summary of one climb.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Climb {
    pub reached: bool,
    pub moves: usize,
    pub cost: Cost,
    /// Successor states generated over the whole climb.
    pub generated: usize,
}

/// Limit on climbing moves. `None` means unlimited.
pub type StepCap = Option<usize>;

fn climb<H: Fn(Coord) -> Cost>(
    map: &GridMap,
    a: Coord,
    b: Coord,
    cap: StepCap,
    h: H,
    mut trace: Option<&mut Vec<Coord>>,
) -> Climb {
    // A climb is a deterministic function of its current state, so a climb
    // longer than the number of passable cells has revisited a state and
    // would cycle forever: unlimited is the same as a cap of S.
    let cap = cap.unwrap_or(map.passable_count()).min(map.passable_count());
    let mut out = Climb { reached: false, moves: 0, cost: Cost::ZERO, generated: 0 };
    let mut s = a;
    if let Some(t) = trace.as_deref_mut() {
        t.push(s);
    }
    while s != b {
        if out.moves >= cap {
            return out;
        }
        let successors = map.neighbors(s);
        out.generated += successors.len();
        let here = h(s);
        let lowest = successors.iter().map(|&(n, _)| h(n)).min();
        match lowest {
            Some(m) if here > m => {}
            _ => return out,
        }
        let (next, g, _) = best_successor(&successors, &h).expect("non-empty successors");
        s = next;
        out.moves += 1;
        out.cost += g;
        if let Some(t) = trace.as_deref_mut() {
            t.push(s);
        }
    }
    out.reached = true;
    out
}

/// Whether a greedy climber starting at `a` reaches `b` under the octile
/// heuristic within `cap` moves.
///
/// ```
/// use knn_lrta::grid::{Coord, GridMap};
/// use knn_lrta::search::hc_reachable;
/// let map = GridMap::open(8, 8);
/// assert!(hc_reachable(&map, Coord::new(0, 0), Coord::new(7, 3), None));
/// assert!(!hc_reachable(&map, Coord::new(0, 0), Coord::new(7, 3), Some(3)));
/// ```
pub fn hc_reachable(map: &GridMap, a: Coord, b: Coord, cap: StepCap) -> bool {
    hill_climb(map, a, b, cap).reached
}

/// Like [`hc_reachable`] but reports moves, cost and generated states.
pub fn hill_climb(map: &GridMap, a: Coord, b: Coord, cap: StepCap) -> Climb {
    climb(map, a, b, cap, |c| octile(c, b), None)
}

/// Runs the climb and records every visited state, starting with `a`.
pub fn hill_climb_trace(map: &GridMap, a: Coord, b: Coord, cap: StepCap) -> (Climb, Vec<Coord>) {
    let mut trace = Vec::new();
    let result = climb(map, a, b, cap, |c| octile(c, b), Some(&mut trace));
    (result, trace)
}

/// Climb toward `table.goal()` using learned heuristic values.
pub fn hill_climb_with(map: &GridMap, a: Coord, table: &HeuristicTable, cap: StepCap) -> Climb {
    climb(map, a, table.goal(), cap, |c| table.h(c), None)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// U-shaped wall opening to the east, goal inside the cup, start to the west.
    pub(crate) fn u_wall() -> GridMap {
        GridMap::from_rows(&[
            ".........",
            ".........",
            "..@@@@@..",
            "..@......",
            "..@......",
            "..@......",
            "..@@@@@..",
            ".........",
            ".........",
        ])
        .unwrap()
    }

    #[test]
    fn same_state_is_reachable() {
        let map = u_wall();
        assert!(hc_reachable(&map, Coord::new(4, 4), Coord::new(4, 4), Some(0)));
    }

    #[test]
    fn empty_map_is_always_reachable() {
        let map = GridMap::open(12, 9);
        for &a in map.passable_ids().iter().step_by(7) {
            for &b in map.passable_ids().iter().step_by(5) {
                assert!(hc_reachable(&map, map.coord(a), map.coord(b), None));
            }
        }
    }

    #[test]
    fn u_wall_traps_the_climber() {
        let map = u_wall();
        let (climb, trace) = hill_climb_trace(&map, Coord::new(0, 4), Coord::new(4, 4), None);
        assert!(!climb.reached);
        // the climber walks up against the back of the cup and stops there
        assert_eq!(*trace.last().unwrap(), Coord::new(1, 4));
        assert_eq!(climb.moves, 1);
        // the reverse direction is fine: out of the mouth and around
        assert!(!hc_reachable(&map, Coord::new(4, 4), Coord::new(0, 4), None));
        assert!(hc_reachable(&map, Coord::new(4, 4), Coord::new(8, 4), None));
    }

    #[test]
    fn cap_counts_moves() {
        let map = GridMap::open(10, 1);
        let (a, b) = (Coord::new(0, 0), Coord::new(5, 0));
        assert!(!hc_reachable(&map, a, b, Some(4)));
        assert!(hc_reachable(&map, a, b, Some(5)));
        let c = hill_climb(&map, a, b, Some(5));
        assert_eq!((c.moves, c.cost), (5, Cost(50)));
    }

    #[test]
    fn learned_values_can_block_a_climb() {
        let map = GridMap::open(5, 1);
        let goal = Coord::new(4, 0);
        let mut t = HeuristicTable::new(goal);
        assert!(hill_climb_with(&map, Coord::new(0, 0), &t, None).reached);
        t.raise(Coord::new(1, 0), Cost(100));
        assert!(!hill_climb_with(&map, Coord::new(0, 0), &t, None).reached);
    }
}
