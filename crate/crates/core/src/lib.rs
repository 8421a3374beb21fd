pub mod agent;
pub mod bench;
pub mod grid;
pub mod kd_index;
pub mod search;
pub mod stats;
pub mod subgoal_db;
pub mod tba;

/// The guide's chapters, compiled so their snippets run as doc-tests.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/grids.md")]
    mod grids {}
    #[doc = include_str!("../../../book/src/real-time-search.md")]
    mod real_time_search {}
    #[doc = include_str!("../../../book/src/subgoal-databases.md")]
    mod subgoal_databases {}
    #[doc = include_str!("../../../book/src/agent.md")]
    mod agent {}
    #[doc = include_str!("../../../book/src/time-bounded-astar.md")]
    mod time_bounded_astar {}
    #[doc = include_str!("../../../book/src/benchmarking.md")]
    mod benchmarking {}
}
