//! LRTA* planning: local frontier generation, move selection and learning.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use rustc_hash::FxHashMap;

use super::HeuristicTable;
use crate::grid::{Coord, Cost, GridMap, Neighbors};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SearchError {
    #[error("dead end at {0}: no legal moves")]
    DeadEnd(Coord),
}

/// The result of one LRTA* planning step.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MoveChoice {
    /// One legal move from the current state toward `frontier_best`.
    pub next_state: Coord,
    /// Frontier state with the lowest `g + h`.
    pub frontier_best: Coord,
    /// Cost of a shortest local path to `frontier_best`.
    pub g: Cost,
    /// `g + h(frontier_best)`.
    pub f_value: Cost,
    /// States generated by the local search, excluding the current state.
    pub generated: usize,
}

/// True when candidate `(f, g)` beats the incumbent. Lower f wins, then
/// higher g; full ties keep the incumbent, i.e. the earlier candidate in
/// enumeration order.
#[inline]
fn beats(f: Cost, g: Cost, best_f: Cost, best_g: Cost) -> bool {
    f < best_f || (f == best_f && g > best_g)
}

/// The shared move-selection rule applied to the immediate successors of a
/// state: minimum `g + h`, ties toward higher g, then enumeration order.
/// Hill-climbing and LRTA* both go through here so they always agree.
#[inline]
pub(crate) fn best_successor(successors: &Neighbors, h: impl Fn(Coord) -> Cost) -> Option<(Coord, Cost, Cost)> {
    let mut best: Option<(Coord, Cost, Cost)> = None;
    for &(n, g) in successors {
        let f = g + h(n);
        match best {
            Some((_, bg, bf)) if !beats(f, g, bf, bg) => {}
            _ => best = Some((n, g, f)),
        }
    }
    best
}

/// Chooses the frontier state minimizing `g(s, s') + h(s', goal)` within a
/// cost-limited local search of radius `g_max`, and the first move toward it.
///
/// The frontier is every state other than `s` within `g_max` of `s`. For
/// `14 <= g_max < 20` that is exactly the immediate neighbors of `s`.
pub fn select_move(map: &GridMap, s: Coord, h: &HeuristicTable, g_max: Cost) -> Result<MoveChoice, SearchError> {
    debug_assert!(g_max >= Cost::CARDINAL, "g_max must allow at least one move");
    if g_max >= Cost::DIAGONAL && g_max < Cost(2 * Cost::CARDINAL.0) {
        let successors = map.neighbors(s);
        let (n, g, f) = best_successor(&successors, |c| h.h(c)).ok_or(SearchError::DeadEnd(s))?;
        return Ok(MoveChoice { next_state: n, frontier_best: n, g, f_value: f, generated: successors.len() });
    }
    select_move_general(map, s, h, g_max)
}

struct LocalNode {
    coord: Coord,
    g: Cost,
    first_step: Coord,
}

fn select_move_general(map: &GridMap, s: Coord, h: &HeuristicTable, g_max: Cost) -> Result<MoveChoice, SearchError> {
    // Uniform-cost expansion bounded by g_max. Nodes are stored in discovery
    // order, which is the tie-break order for equal (f, g).
    let mut nodes = vec![LocalNode { coord: s, g: Cost::ZERO, first_step: s }];
    let mut index: FxHashMap<Coord, usize> = FxHashMap::default();
    index.insert(s, 0);
    let mut settled = vec![false];
    let mut heap = BinaryHeap::new();
    heap.push(Reverse((Cost::ZERO, 0usize)));
    while let Some(Reverse((g, i))) = heap.pop() {
        if settled[i] || g > nodes[i].g {
            continue;
        }
        settled[i] = true;
        let u = nodes[i].coord;
        for (v, c) in map.neighbors(u) {
            let ng = g + c;
            if ng > g_max {
                continue;
            }
            let first = if i == 0 { v } else { nodes[i].first_step };
            match index.get(&v) {
                Some(&j) => {
                    if ng < nodes[j].g {
                        nodes[j].g = ng;
                        nodes[j].first_step = first;
                        heap.push(Reverse((ng, j)));
                    }
                }
                None => {
                    let j = nodes.len();
                    nodes.push(LocalNode { coord: v, g: ng, first_step: first });
                    settled.push(false);
                    index.insert(v, j);
                    heap.push(Reverse((ng, j)));
                }
            }
        }
    }
    if nodes.len() == 1 {
        return Err(SearchError::DeadEnd(s));
    }

    // Every generated state is a candidate. Restricting the choice to states
    // on the edge of the local space looks further ahead, but those states'
    // values are never learned unless the agent stands on them, and a stale
    // low value there can pull the agent back and forth forever. With all
    // states as candidates the best `g + h` drops by at least one edge cost
    // on every move that learns nothing, so the agent always terminates.
    let mut best: Option<(usize, Cost, Cost)> = None;
    for (i, n) in nodes.iter().enumerate().skip(1) {
        let f = n.g + h.h(n.coord);
        match best {
            Some((_, bf, bg)) if !beats(f, n.g, bf, bg) => {}
            _ => best = Some((i, f, n.g)),
        }
    }
    let (i, f, g) = best.expect("at least one generated state");
    Ok(MoveChoice {
        next_state: nodes[i].first_step,
        frontier_best: nodes[i].coord,
        g,
        f_value: f,
        generated: nodes.len() - 1,
    })
}

/// Outcome of [`lrta_step`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LrtaStep {
    pub choice: MoveChoice,
    /// Whether `h(s)` was raised by this step.
    pub learned: bool,
}

/// One LRTA* step: select a move, raise `h(s)` to the best frontier value if
/// that is larger, and return the chosen move. The table's goal is the
/// current target.
pub fn lrta_step(map: &GridMap, s: Coord, table: &mut HeuristicTable, g_max: Cost) -> Result<LrtaStep, SearchError> {
    let choice = select_move(map, s, table, g_max)?;
    let learned = table.raise(s, choice.f_value);
    Ok(LrtaStep { choice, learned })
}
