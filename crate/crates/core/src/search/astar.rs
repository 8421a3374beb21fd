use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::grid::{octile, Coord, Cost, GridMap, Path};

const NO_PARENT: u32 = u32::MAX;

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum Status {
    Unseen,
    Open,
    Closed,
}

#[derive(Clone, Copy, PartialEq, Eq)]
struct OpenEntry {
    f: u64,
    g: u64,
    seq: u64,
    id: u32,
}

impl Ord for OpenEntry {
    // max-heap: lowest f first, then highest g, then earliest insertion
    fn cmp(&self, other: &Self) -> Ordering {
        other.f.cmp(&self.f).then(self.g.cmp(&other.g)).then(other.seq.cmp(&self.seq))
    }
}

impl PartialOrd for OpenEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Outcome of a single expansion.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Expansion {
    /// A non-goal state was expanded; the search continues.
    Continue,
    /// The goal was popped from the open list.
    GoalExpanded,
    /// The open list ran dry without reaching the goal.
    Exhausted,
}

/// An A* search that can be advanced one expansion at a time.
///
/// Open-list ties break toward higher g, then toward earlier insertion, which
/// together with the fixed neighbor order makes every run deterministic.
/// Both [`astar`] and the time-sliced baseline drive this type.
pub struct AStarSearch<'m> {
    map: &'m GridMap,
    start: Coord,
    goal: Coord,
    g: Vec<u64>,
    parent: Vec<u32>,
    status: Vec<Status>,
    heap: BinaryHeap<OpenEntry>,
    seq: u64,
    open_len: usize,
    closed_len: usize,
    peak_open: usize,
    expansions: u64,
    generated: u64,
    finished: Option<Expansion>,
}

impl<'m> AStarSearch<'m> {
    pub fn new(map: &'m GridMap, start: Coord, goal: Coord) -> Self {
        let n = map.cell_count();
        let mut search = AStarSearch {
            map,
            start,
            goal,
            g: vec![u64::MAX; n],
            parent: vec![NO_PARENT; n],
            status: vec![Status::Unseen; n],
            heap: BinaryHeap::new(),
            seq: 0,
            open_len: 0,
            closed_len: 0,
            peak_open: 0,
            expansions: 0,
            generated: 0,
            finished: None,
        };
        let id = map.id(start) as usize;
        search.g[id] = 0;
        search.push(start, 0);
        search
    }

    fn push(&mut self, c: Coord, g: u64) {
        let id = self.map.id(c);
        if self.status[id as usize] != Status::Open {
            self.status[id as usize] = Status::Open;
            self.open_len += 1;
            self.peak_open = self.peak_open.max(self.open_len);
        }
        let f = g + octile(c, self.goal).0;
        self.heap.push(OpenEntry { f, g, seq: self.seq, id });
        self.seq += 1;
    }

    fn drop_stale(&mut self) {
        while let Some(top) = self.heap.peek() {
            let i = top.id as usize;
            if self.status[i] == Status::Open && self.g[i] == top.g {
                break;
            }
            self.heap.pop();
        }
    }

    /// Expands the most promising open state.
    pub fn expand(&mut self) -> Expansion {
        if let Some(done) = self.finished {
            return done;
        }
        self.drop_stale();
        let Some(top) = self.heap.pop() else {
            self.finished = Some(Expansion::Exhausted);
            return Expansion::Exhausted;
        };
        let id = top.id as usize;
        self.status[id] = Status::Closed;
        self.open_len -= 1;
        self.closed_len += 1;
        self.expansions += 1;
        let s = self.map.coord(top.id);
        if s == self.goal {
            self.finished = Some(Expansion::GoalExpanded);
            return Expansion::GoalExpanded;
        }
        let successors = self.map.neighbors(s);
        self.generated += successors.len() as u64;
        for (n, c) in successors {
            let nid = self.map.id(n) as usize;
            if self.status[nid] == Status::Closed {
                continue;
            }
            let ng = top.g + c.0;
            if ng < self.g[nid] {
                self.g[nid] = ng;
                self.parent[nid] = top.id;
                self.push(n, ng);
            }
        }
        Expansion::Continue
    }

    /// Expands until the goal is expanded or the open list is empty.
    pub fn run(&mut self) -> Expansion {
        loop {
            match self.expand() {
                Expansion::Continue => {}
                done => return done,
            }
        }
    }

    pub fn is_finished(&self) -> bool {
        self.finished.is_some()
    }

    pub fn goal_expanded(&self) -> bool {
        self.finished == Some(Expansion::GoalExpanded)
    }

    /// The open state A* would expand next, or the goal once it has been expanded.
    pub fn most_promising(&mut self) -> Option<Coord> {
        if self.goal_expanded() {
            return Some(self.goal);
        }
        self.drop_stale();
        self.heap.peek().map(|e| self.map.coord(e.id))
    }

    /// Current search-tree parent of `c`; `None` for the start and unseen states.
    pub fn parent(&self, c: Coord) -> Option<Coord> {
        let p = self.parent[self.map.id(c) as usize];
        (p != NO_PARENT).then(|| self.map.coord(p))
    }

    /// Best known g value of `c`.
    pub fn g(&self, c: Coord) -> Cost {
        let g = self.g[self.map.id(c) as usize];
        if g == u64::MAX {
            Cost::INFINITE
        } else {
            Cost(g)
        }
    }

    pub fn start(&self) -> Coord {
        self.start
    }

    pub fn goal(&self) -> Coord {
        self.goal
    }

    pub fn open_len(&self) -> usize {
        self.open_len
    }

    pub fn closed_len(&self) -> usize {
        self.closed_len
    }

    pub fn peak_open(&self) -> usize {
        self.peak_open
    }

    pub fn expansions(&self) -> u64 {
        self.expansions
    }

    /// Successor states generated across all expansions, duplicates included.
    pub fn generated(&self) -> u64 {
        self.generated
    }

    /// Follows parent pointers from `c` back to the start.
    pub fn path_to(&self, c: Coord) -> Option<Path> {
        let cost = self.g(c);
        if cost.is_infinite() {
            return None;
        }
        let mut states = vec![c];
        let mut cur = c;
        while let Some(p) = self.parent(cur) {
            states.push(p);
            cur = p;
        }
        states.reverse();
        Some(Path { states, cost })
    }
}

/// Minimum-cost path from `start` to `goal`, or `None` if the goal is
/// unreachable.
///
/// ```
/// use knn_lrta::grid::{Coord, Cost, GridMap};
/// use knn_lrta::search::astar;
/// let map = GridMap::open(10, 10);
/// let path = astar(&map, Coord::new(0, 0), Coord::new(9, 9)).unwrap();
/// assert_eq!(path.cost, Cost(126));
/// ```
pub fn astar(map: &GridMap, start: Coord, goal: Coord) -> Option<Path> {
    let mut search = AStarSearch::new(map, start, goal);
    match search.run() {
        Expansion::GoalExpanded => search.path_to(goal),
        _ => None,
    }
}
