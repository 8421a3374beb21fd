//! The on-line kNN LRTA* agent.
//!
//! LRTA* pursues one target at a time from a plan of targets. Plans come from
//! [`select_record`]: the goal itself when a capped hill-climb reaches it,
//! otherwise the subgoal chain of the most similar database record whose ends
//! are both climbable, otherwise the bare goal under a travel quota.

use std::collections::VecDeque;
use std::time::{Duration, Instant};

use rustc_hash::FxHashMap;

use crate::grid::{octile, Coord, Cost, GridMap, Path, Problem};
use crate::kd_index::{linear_scan, Hit};
use crate::search::{hill_climb, lrta_step, HeuristicTable};
use crate::stats::{move_budget, SearchStats, SolveError};
use crate::subgoal_db::SubgoalDatabase;

pub use crate::kd_index::similarity;

/// How the `M` most similar records are found.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum CandidateStage {
    #[default]
    KdTree,
    /// Score every record; the reference the kd-tree must agree with.
    LinearScan,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AgentConfig {
    /// Records checked for reachability per selection.
    pub m: usize,
    /// Step cap for every on-line hill-climbing check.
    pub hc_cap: usize,
    /// Travel quota after a failed selection, as a multiple of the octile
    /// distance to the goal. Must exceed 1.
    pub quota_mult: f64,
    pub g_max: Cost,
    pub candidates: CandidateStage,
}

impl Default for AgentConfig {
    fn default() -> Self {
        AgentConfig { m: 10, hc_cap: 250, quota_mult: 3.0, g_max: Cost::DIAGONAL, candidates: CandidateStage::KdTree }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ConfigError {
    #[error("m must be at least 1")]
    ZeroM,
    #[error("hc_cap must be at least 1")]
    ZeroCap,
    #[error("quota multiplier must be greater than 1, got {0}")]
    Quota(String),
    #[error("g_max must allow one cardinal move, got {0}")]
    GMax(Cost),
}

impl AgentConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.m == 0 {
            return Err(ConfigError::ZeroM);
        }
        if self.hc_cap == 0 {
            return Err(ConfigError::ZeroCap);
        }
        if !(self.quota_mult > 1.0 && self.quota_mult.is_finite()) {
            return Err(ConfigError::Quota(self.quota_mult.to_string()));
        }
        if self.g_max < Cost::CARDINAL {
            return Err(ConfigError::GMax(self.g_max));
        }
        Ok(())
    }
}

/// Where a plan came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PlanSource {
    /// The goal was hill-climbing reachable; no record consulted.
    DirectGoal,
    /// Built from this record.
    Record(usize),
    /// No candidate passed; the agent heads for the goal under a quota.
    Fallback,
}

/// Targets to pursue in order; the last is always the global goal.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubgoalPlan {
    pub targets: Vec<Coord>,
    pub source: PlanSource,
    /// End of the selected record when it is not the goal itself; the agent
    /// may skip it once the goal is climbable from the state before it.
    pub record_end: Option<Coord>,
}

/// A plan and the states the selection generated.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Selection {
    pub plan: SubgoalPlan,
    pub generated: u64,
    /// Candidates whose reachability was checked.
    pub checked: usize,
}

fn candidates(db: &SubgoalDatabase, s: Coord, goal: Coord, cfg: &AgentConfig) -> Vec<Hit> {
    match cfg.candidates {
        CandidateStage::KdTree => db.index().nearest_m(s, goal, cfg.m),
        CandidateStage::LinearScan => linear_scan(db.records(), s, goal, cfg.m),
    }
}

/// Picks the next plan from state `s`.
pub fn select_record(map: &GridMap, s: Coord, goal: Coord, db: &SubgoalDatabase, cfg: &AgentConfig) -> Selection {
    let cap = Some(cfg.hc_cap);
    let mut generated = 0u64;
    let mut climbs = |a: Coord, b: Coord| {
        let c = hill_climb(map, a, b, cap);
        generated += c.generated as u64;
        c.reached
    };
    if climbs(s, goal) {
        let plan = SubgoalPlan { targets: vec![goal], source: PlanSource::DirectGoal, record_end: None };
        return Selection { plan, generated, checked: 0 };
    }
    let hits = candidates(db, s, goal, cfg);
    for (checked, hit) in hits.iter().enumerate() {
        let rec = &db.records()[hit.id];
        if !(climbs(s, rec.start()) && climbs(rec.end(), goal)) {
            continue;
        }
        let states = rec.states();
        // skip the record start when its successor is climbable directly
        let from = if climbs(s, states[1]) { 1 } else { 0 };
        let mut targets: Vec<Coord> = states[from..].to_vec();
        targets.push(goal);
        targets.dedup();
        let record_end = (rec.end() != goal).then_some(rec.end());
        let plan = SubgoalPlan { targets, source: PlanSource::Record(hit.id), record_end };
        return Selection { plan, generated, checked: checked + 1 };
    }
    let plan = SubgoalPlan { targets: vec![goal], source: PlanSource::Fallback, record_end: None };
    Selection { plan, generated, checked: hits.len() }
}

/// What happened on one move, for tests and tracing.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MoveRecord {
    pub from: Coord,
    pub to: Coord,
    pub target: Coord,
    pub generated: u64,
    pub selected: Option<PlanSource>,
}

/// Per-problem LRTA* state: heuristic tables keyed by target.
struct Tables(FxHashMap<Coord, HeuristicTable>);

impl Tables {
    fn get(&mut self, target: Coord) -> &mut HeuristicTable {
        self.0.entry(target).or_insert_with(|| HeuristicTable::new(target))
    }

    fn updated(&self) -> u64 {
        self.0.values().map(|t| t.updated_states() as u64).sum()
    }
}

struct Quota {
    /// `None` once a second consecutive fallback has disabled it.
    budget: Option<Cost>,
    used: Cost,
    streak: u32,
}

/// Solves `problem` with kNN LRTA*.
pub fn solve(
    map: &GridMap,
    db: &SubgoalDatabase,
    problem: &Problem,
    cfg: &AgentConfig,
) -> Result<(Path, SearchStats), SolveError> {
    solve_traced(map, db, problem, cfg, |_| {})
}

/// [`solve`] with a callback observing every move.
pub fn solve_traced(
    map: &GridMap,
    db: &SubgoalDatabase,
    problem: &Problem,
    cfg: &AgentConfig,
    mut observe: impl FnMut(&MoveRecord),
) -> Result<(Path, SearchStats), SolveError> {
    let goal = problem.goal;
    let budget = move_budget(problem);
    let mut s = problem.start;
    let mut states = vec![s];
    let mut cost = Cost::ZERO;
    let mut stats = SearchStats {
        optimal_cost: problem.optimal_cost,
        db_states: db.stored_states(),
        peak_closed: 1,
        ..Default::default()
    };
    let mut tables = Tables(FxHashMap::default());
    let mut plan: VecDeque<Coord> = VecDeque::new();
    let mut record_end: Option<Coord> = None;
    let mut quota: Option<Quota> = None;
    let mut planning = Duration::ZERO;

    while s != goal {
        if stats.moves >= budget {
            return Err(SolveError::MoveBudget { at: s, moves: stats.moves, budget });
        }
        let t0 = Instant::now();
        let mut generated = 0u64;
        let mut selected = None;

        let quota_spent = quota.as_ref().is_some_and(|q| q.budget.is_some_and(|b| q.used >= b));
        if plan.is_empty() || quota_spent {
            let sel = select_record(map, s, goal, db, cfg);
            generated += sel.generated;
            stats.selections += 1;
            if sel.plan.source == PlanSource::Fallback {
                stats.fallbacks += 1;
                let streak = quota.as_ref().map_or(0, |q| q.streak) + 1;
                let budget = (streak < 2).then(|| Cost((cfg.quota_mult * octile(s, goal).0 as f64).ceil() as u64));
                quota = Some(Quota { budget, used: Cost::ZERO, streak });
            } else {
                quota = None;
            }
            selected = Some(sel.plan.source);
            record_end = sel.plan.record_end;
            plan = sel.plan.targets.into();
        }

        while plan.front() == Some(&s) {
            plan.pop_front();
            // Arrived at the state before the record end. A selection this
            // step already tried climbing to the goal from here, so only
            // check on ordinary arrivals.
            if selected.is_none() && plan.len() >= 2 && plan.front().copied() == record_end {
                let c = hill_climb(map, s, goal, Some(cfg.hc_cap));
                generated += c.generated as u64;
                if c.reached {
                    plan.pop_front();
                }
            }
        }
        let target = *plan.front().expect("plan ends at the goal");

        let step = lrta_step(map, s, tables.get(target), cfg.g_max)?;
        let next = step.choice.next_state;
        generated += step.choice.generated as u64;
        stats.peak_open = stats.peak_open.max(step.choice.generated as u64);
        let c = map.edge_cost(s, next).expect("lrta moves along an edge");
        cost += c;
        if let Some(q) = quota.as_mut() {
            q.used += c;
        }
        planning += t0.elapsed();

        observe(&MoveRecord { from: s, to: next, target, generated, selected });
        stats.max_per_move_generated = stats.max_per_move_generated.max(generated);
        stats.moves += 1;
        s = next;
        states.push(s);
    }

    stats.solution_cost = cost;
    stats.updated_h_states = tables.updated();
    stats.planning_time_per_move = per_move_us(planning, stats.moves);
    Ok((Path { states, cost }, stats))
}

pub(crate) fn per_move_us(total: Duration, moves: u64) -> f64 {
    if moves == 0 {
        0.0
    } else {
        total.as_secs_f64() * 1e6 / moves as f64
    }
}

/// Plain LRTA* toward the goal with a single heuristic table.
pub fn lrta_solve(map: &GridMap, problem: &Problem, g_max: Cost) -> Result<(Path, SearchStats), SolveError> {
    let goal = problem.goal;
    let budget = move_budget(problem);
    let mut table = HeuristicTable::new(goal);
    let mut s = problem.start;
    let mut states = vec![s];
    let mut cost = Cost::ZERO;
    let mut stats = SearchStats { optimal_cost: problem.optimal_cost, peak_closed: 1, ..Default::default() };
    let mut planning = Duration::ZERO;
    while s != goal {
        if stats.moves >= budget {
            return Err(SolveError::MoveBudget { at: s, moves: stats.moves, budget });
        }
        let t0 = Instant::now();
        let step = lrta_step(map, s, &mut table, g_max)?;
        planning += t0.elapsed();
        let next = step.choice.next_state;
        let generated = step.choice.generated as u64;
        stats.max_per_move_generated = stats.max_per_move_generated.max(generated);
        stats.peak_open = stats.peak_open.max(generated);
        cost += map.edge_cost(s, next).expect("lrta moves along an edge");
        stats.moves += 1;
        s = next;
        states.push(s);
    }
    stats.solution_cost = cost;
    stats.updated_h_states = table.updated_states() as u64;
    stats.planning_time_per_move = per_move_us(planning, stats.moves);
    Ok((Path { states, cost }, stats))
}
