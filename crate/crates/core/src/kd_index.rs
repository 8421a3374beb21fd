//! A 4-d kd-tree over record endpoints `(x_start, y_start, x_end, y_end)`.
//!
//! Built once by median split, split dimension cycling with depth. Queries
//! return the `M` records most similar to a (state, goal) pair, where
//! similarity is the larger of the two endpoint octile distances. Results are
//! ordered by `(similarity, record id)`, which makes them identical to a
//! sorted linear scan.

use std::collections::BinaryHeap;

use crate::grid::{octile, Coord, Cost};
use crate::subgoal_db::SubgoalRecord;

const NONE: u32 = u32::MAX;

type Point = [u32; 4];

/// How far a record is from serving a (state, goal) query: the larger of
/// `octile(s, start)` and `octile(goal, end)`. Zero means an exact match.
///
/// ```
/// use knn_lrta::grid::{Coord, Cost};
/// use knn_lrta::kd_index::similarity;
/// use knn_lrta::subgoal_db::SubgoalRecord;
/// let rec = SubgoalRecord::new(vec![Coord::new(3, 5), Coord::new(10, 3)]);
/// assert_eq!(similarity(Coord::new(0, 0), Coord::new(10, 7), &rec), Cost(62));
/// ```
pub fn similarity(s: Coord, goal: Coord, record: &SubgoalRecord) -> Cost {
    octile(s, record.start()).max(octile(goal, record.end()))
}

fn point_of(r: &SubgoalRecord) -> Point {
    let (a, b) = (r.start(), r.end());
    [a.x, a.y, b.x, b.y]
}

fn point_similarity(q: &Point, p: &Point) -> Cost {
    let s = octile(Coord::new(q[0], q[1]), Coord::new(p[0], p[1]));
    let e = octile(Coord::new(q[2], q[3]), Coord::new(p[2], p[3]));
    s.max(e)
}

/// Lower bound on similarity for every point inside `[lo, hi]`: each
/// endpoint distance is at least the distance to the nearest box point.
fn box_bound(q: &Point, lo: &Point, hi: &Point) -> Cost {
    let c: Point = std::array::from_fn(|d| q[d].clamp(lo[d], hi[d]));
    point_similarity(q, &c)
}

#[derive(Clone, Debug, PartialEq, Eq)]
struct Node {
    point: Point,
    id: u32,
    left: u32,
    right: u32,
    /// Bounding box of the subtree rooted here.
    lo: Point,
    hi: Point,
}

/// Which child a descent took.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

/// One returned record.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Hit {
    pub similarity: Cost,
    pub id: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct KdIndex {
    nodes: Vec<Node>,
}

impl KdIndex {
    /// Median-split build. Ties on the split value all go left of the node,
    /// so the left subtree holds values `<=` the node and the right `>`.
    pub fn build(records: &[SubgoalRecord]) -> Self {
        let mut items: Vec<(Point, u32)> = records.iter().enumerate().map(|(i, r)| (point_of(r), i as u32)).collect();
        let mut nodes = Vec::with_capacity(items.len());
        build_rec(&mut items, 0, &mut nodes);
        KdIndex { nodes }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// The sides taken and split values passed when descending toward the
    /// empty slot where `point` would be inserted.
    pub fn descent(&self, point: [u32; 4]) -> Vec<(Side, u32)> {
        let mut out = Vec::new();
        let mut at = if self.nodes.is_empty() { NONE } else { 0 };
        let mut depth = 0;
        while at != NONE {
            let n = &self.nodes[at as usize];
            let d = depth % 4;
            let side = if point[d] <= n.point[d] { Side::Left } else { Side::Right };
            out.push((side, n.point[d]));
            at = if side == Side::Left { n.left } else { n.right };
            depth += 1;
        }
        out
    }

    /// The root's point and record id.
    pub fn root(&self) -> Option<([u32; 4], usize)> {
        self.nodes.first().map(|n| (n.point, n.id as usize))
    }

    /// The `m` records most similar to `(s, goal)`, ascending by
    /// `(similarity, id)`.
    pub fn nearest_m(&self, s: Coord, goal: Coord, m: usize) -> Vec<Hit> {
        self.nearest_m_counted(s, goal, m).0
    }

    /// [`Self::nearest_m`] plus the number of records whose similarity was
    /// computed.
    pub fn nearest_m_counted(&self, s: Coord, goal: Coord, m: usize) -> (Vec<Hit>, usize) {
        assert!(m >= 1, "m must be at least 1");
        let q = [s.x, s.y, goal.x, goal.y];
        let mut best: BinaryHeap<Hit> = BinaryHeap::with_capacity(m + 1);
        let mut visited = 0;
        if !self.nodes.is_empty() {
            self.search(0, 0, &q, m, &mut best, &mut visited);
        }
        (best.into_sorted_vec(), visited)
    }

    fn search(&self, at: u32, depth: usize, q: &Point, m: usize, best: &mut BinaryHeap<Hit>, visited: &mut usize) {
        let n = &self.nodes[at as usize];
        // Equal bounds are not pruned: a record at the same similarity with a
        // smaller id would still displace the current worst.
        if best.len() == m && box_bound(q, &n.lo, &n.hi) > best.peek().unwrap().similarity {
            return;
        }
        *visited += 1;
        let hit = Hit { similarity: point_similarity(q, &n.point), id: n.id as usize };
        if best.len() < m {
            best.push(hit);
        } else if hit < *best.peek().unwrap() {
            best.pop();
            best.push(hit);
        }
        let d = depth % 4;
        let (near, far) = if q[d] <= n.point[d] { (n.left, n.right) } else { (n.right, n.left) };
        for child in [near, far] {
            if child != NONE {
                self.search(child, depth + 1, q, m, best, visited);
            }
        }
    }
}

fn build_rec(items: &mut [(Point, u32)], depth: usize, nodes: &mut Vec<Node>) -> u32 {
    if items.is_empty() {
        return NONE;
    }
    let d = depth % 4;
    items.sort_unstable_by_key(|&(p, id)| (p[d], id));
    let mut m = (items.len() - 1) / 2;
    while m + 1 < items.len() && items[m + 1].0[d] == items[m].0[d] {
        m += 1;
    }
    let mut lo = [u32::MAX; 4];
    let mut hi = [0u32; 4];
    for (p, _) in items.iter() {
        for k in 0..4 {
            lo[k] = lo[k].min(p[k]);
            hi[k] = hi[k].max(p[k]);
        }
    }
    let at = nodes.len();
    let (point, id) = items[m];
    nodes.push(Node { point, id, left: NONE, right: NONE, lo, hi });
    let (left, rest) = items.split_at_mut(m);
    let l = build_rec(left, depth + 1, nodes);
    let r = build_rec(&mut rest[1..], depth + 1, nodes);
    nodes[at].left = l;
    nodes[at].right = r;
    at as u32
}

/// Brute-force reference: every record scored, sorted by `(similarity, id)`.
pub fn linear_scan(records: &[SubgoalRecord], s: Coord, goal: Coord, m: usize) -> Vec<Hit> {
    let mut all: Vec<Hit> =
        records.iter().enumerate().map(|(id, r)| Hit { similarity: similarity(s, goal, r), id }).collect();
    all.sort_unstable();
    all.truncate(m);
    all
}
