//! Optimal search oracles and the real-time search building blocks.

mod astar;
mod climb;
mod dijkstra;
mod heuristic;
mod lrta;

pub use astar::{astar, AStarSearch, Expansion};
pub use climb::{hc_reachable, hill_climb, hill_climb_trace, hill_climb_with, Climb, StepCap};
pub use dijkstra::{dijkstra_oracle, DistanceField};
pub use heuristic::HeuristicTable;
pub use lrta::{lrta_step, select_move, LrtaStep, MoveChoice, SearchError};
