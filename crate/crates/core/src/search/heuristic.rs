use rustc_hash::FxHashMap;

use crate::grid::{octile, Coord, Cost};

/// Per-goal heuristic with learned overrides on top of octile distance.
///
/// Overrides only ever grow: [`HeuristicTable::raise`] ignores values that are
/// not strictly above the current estimate.
#[derive(Clone, Debug)]
pub struct HeuristicTable {
    goal: Coord,
    overrides: FxHashMap<Coord, Cost>,
}

impl HeuristicTable {
    pub fn new(goal: Coord) -> Self {
        HeuristicTable { goal, overrides: FxHashMap::default() }
    }

    pub fn goal(&self) -> Coord {
        self.goal
    }

    #[inline]
    pub fn h(&self, s: Coord) -> Cost {
        match self.overrides.get(&s) {
            Some(&v) => v,
            None => octile(s, self.goal),
        }
    }

    /// Sets `h(s) = max(h(s), value)`. Returns whether the estimate changed.
    pub fn raise(&mut self, s: Coord, value: Cost) -> bool {
        if value > self.h(s) {
            self.overrides.insert(s, value);
            true
        } else {
            false
        }
    }

    /// Number of states with a learned value.
    pub fn updated_states(&self) -> usize {
        self.overrides.len()
    }

    pub fn overrides(&self) -> impl Iterator<Item = (Coord, Cost)> + '_ {
        self.overrides.iter().map(|(&c, &v)| (c, v))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn never_decreases() {
        let goal = Coord::new(0, 0);
        let s = Coord::new(3, 0);
        let mut t = HeuristicTable::new(goal);
        assert_eq!(t.h(s), Cost(30));
        assert!(!t.raise(s, Cost(30)));
        assert!(!t.raise(s, Cost(20)));
        assert_eq!(t.updated_states(), 0);
        assert!(t.raise(s, Cost(50)));
        assert!(!t.raise(s, Cost(40)));
        assert_eq!(t.h(s), Cost(50));
        assert_eq!(t.updated_states(), 1);
    }
}
