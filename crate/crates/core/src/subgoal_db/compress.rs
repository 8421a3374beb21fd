use super::SubgoalRecord;
use crate::grid::{GridMap, Path};
use crate::search::hc_reachable;

/// Compresses an optimal path into the states a greedy climber can chain
/// through: each kept state is the furthest path state (found by binary
/// search) that is hill-climbing reachable from the previous one.
///
/// The search is seeded with the immediate successor, which is always
/// reachable, so every iteration makes progress and both endpoints survive.
///
/// Panics if the path has fewer than two states.
pub fn compress(map: &GridMap, path: &Path) -> SubgoalRecord {
    let p = &path.states;
    assert!(p.len() >= 2, "cannot compress a path of {} states", p.len());
    let last = p.len() - 1;
    let mut kept = vec![0usize];
    while *kept.last().unwrap() != last {
        let from = *kept.last().unwrap();
        let mut best = from + 1;
        let (mut lo, mut hi) = (best + 1, last);
        while lo <= hi {
            let mid = (lo + hi) / 2;
            if hc_reachable(map, p[from], p[mid], None) {
                best = mid;
                lo = mid + 1;
            } else {
                hi = mid - 1;
            }
        }
        kept.push(best);
    }
    SubgoalRecord::new(kept.into_iter().map(|i| p[i]).collect())
}
