//! Seeded synthetic maps used by tests and benchmarks.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::GridMap;

/// Uniform random obstacles with the given blocked-cell probability.
pub fn random_obstacles(width: u32, height: u32, density: f64, seed: u64) -> GridMap {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cells = (0..width as usize * height as usize).map(|_| !rng.gen_bool(density)).collect();
    GridMap::from_cells(width, height, cells)
}

/// Shape of a [`maze`]: square rooms of side `room`, separated by walls of
/// thickness `wall`, joined through doorways `door` cells wide.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MazeStyle {
    pub room: u32,
    pub wall: u32,
    pub door: u32,
    /// Probability of opening each wall left closed by the spanning tree.
    /// Zero gives a perfect maze; larger values add loops.
    pub braid: f64,
}

impl MazeStyle {
    /// Corridor maze: one-room-wide passages with full-width openings.
    pub const fn corridors(width: u32) -> Self {
        MazeStyle { room: width, wall: 1, door: width, braid: 0.0 }
    }

    /// Large rooms joined by doorways half a room wide, with half of the
    /// spare walls opened. Plain LRTA* still scrubs badly here, but the
    /// map is open enough for a few thousand records to cover it.
    pub const fn open_rooms(room: u32) -> Self {
        MazeStyle { room, wall: 1, door: room.div_ceil(2), braid: 0.5 }
    }
}

/// A room-and-doorway maze carved by a randomized depth-first spanning tree
/// over a lattice of rooms, optionally braided with extra doorways. Cells
/// outside the last full room on either axis stay blocked.
///
/// Every passable cell lies in a single connected component.
pub fn maze(width: u32, height: u32, style: MazeStyle, seed: u64) -> GridMap {
    let MazeStyle { room, wall, door, braid } = style;
    assert!(room > 0 && door > 0 && door <= room, "invalid maze style {style:?}");
    let pitch = room + wall;
    let cols = width.saturating_sub(wall) / pitch;
    let rows = height.saturating_sub(wall) / pitch;
    assert!(cols > 0 && rows > 0, "map too small for maze style {style:?}");

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cells = vec![false; width as usize * height as usize];
    let carve = |x0: u32, y0: u32, w: u32, h: u32, cells: &mut Vec<bool>| {
        for y in y0..y0 + h {
            let row = y as usize * width as usize;
            cells[row + x0 as usize..row + (x0 + w) as usize].fill(true);
        }
    };
    for j in 0..rows {
        for i in 0..cols {
            carve(wall + i * pitch, wall + j * pitch, room, room, &mut cells);
        }
    }

    // doorways as (room column, room row, east side?); south side otherwise
    let idx = |i: u32, j: u32| (j * cols + i) as usize;
    let mut visited = vec![false; (cols * rows) as usize];
    let mut openings: Vec<(u32, u32, bool)> = Vec::new();
    let mut stack = vec![(rng.gen_range(0..cols), rng.gen_range(0..rows))];
    visited[idx(stack[0].0, stack[0].1)] = true;
    while let Some(&(i, j)) = stack.last() {
        let mut next = Vec::with_capacity(4);
        if i > 0 && !visited[idx(i - 1, j)] {
            next.push((i - 1, j));
        }
        if i + 1 < cols && !visited[idx(i + 1, j)] {
            next.push((i + 1, j));
        }
        if j > 0 && !visited[idx(i, j - 1)] {
            next.push((i, j - 1));
        }
        if j + 1 < rows && !visited[idx(i, j + 1)] {
            next.push((i, j + 1));
        }
        match next.choose(&mut rng) {
            Some(&(ni, nj)) => {
                visited[idx(ni, nj)] = true;
                let horizontal = nj == j;
                openings.push((i.min(ni), j.min(nj), horizontal));
                stack.push((ni, nj));
            }
            None => {
                stack.pop();
            }
        }
    }
    if braid > 0.0 {
        let mut tree = openings.clone();
        tree.sort_unstable();
        for j in 0..rows {
            for i in 0..cols {
                for horizontal in [true, false] {
                    let exists = if horizontal { i + 1 < cols } else { j + 1 < rows };
                    if exists && tree.binary_search(&(i, j, horizontal)).is_err() && rng.gen_bool(braid) {
                        openings.push((i, j, horizontal));
                    }
                }
            }
        }
    }
    for (i, j, horizontal) in openings {
        let offset = if door < room { rng.gen_range(0..=room - door) } else { 0 };
        let (x0, y0) = (wall + i * pitch, wall + j * pitch);
        if horizontal {
            carve(x0 + room, y0 + offset, wall, door, &mut cells);
        } else {
            carve(x0 + offset, y0 + room, door, wall, &mut cells);
        }
    }
    GridMap::from_cells(width, height, cells)
}
