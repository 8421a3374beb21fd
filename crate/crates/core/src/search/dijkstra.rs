use std::cmp::Reverse;
use std::collections::BinaryHeap;

use crate::grid::{Coord, Cost, GridMap};

/// Exact shortest-path costs from one source to every cell.
#[derive(Clone, Debug)]
pub struct DistanceField {
    width: u32,
    dist: Vec<Cost>,
}

impl DistanceField {
    /// Cost from the source to `c`; [`Cost::INFINITE`] when unreachable or blocked.
    pub fn get(&self, c: Coord) -> Cost {
        self.dist[(c.y * self.width + c.x) as usize]
    }

    /// Largest finite distance in the field.
    pub fn eccentricity(&self) -> Cost {
        self.dist.iter().copied().filter(|d| !d.is_infinite()).max().unwrap_or(Cost::ZERO)
    }
}

/// Plain Dijkstra over the whole map. Used as the reference for optimal costs.
pub fn dijkstra_oracle(map: &GridMap, source: Coord) -> DistanceField {
    let mut dist = vec![Cost::INFINITE; map.cell_count()];
    let mut heap = BinaryHeap::new();
    if map.is_passable(source) {
        dist[map.id(source) as usize] = Cost::ZERO;
        heap.push(Reverse((0u64, map.id(source))));
    }
    while let Some(Reverse((d, id))) = heap.pop() {
        if d > dist[id as usize].0 {
            continue;
        }
        for (n, c) in map.neighbors(map.coord(id)) {
            let nid = map.id(n) as usize;
            let nd = d + c.0;
            if nd < dist[nid].0 {
                dist[nid] = Cost(nd);
                heap.push(Reverse((nd, nid as u32)));
            }
        }
    }
    DistanceField { width: map.width(), dist }
}
