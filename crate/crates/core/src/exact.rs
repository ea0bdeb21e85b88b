//! Exact optimization for small instances: depth-first branch and bound
//! over schedules, plus a brute-force enumerator used as an independent
//! cross-check oracle in tests.
//!
//! The search branches on sequences sorted by `(start, task index)`, which
//! kills permutation symmetry among tasks sharing a start. Candidate starts
//! come from the event points of the partial state (predecessor ends, busy
//! interval ends, occupancy and balance profile events), which is complete
//! for semi-active schedules and hence for the makespan objective. Balance
//! bands break the left-shift argument, so instances that carry mass and
//! have at most [`ALL_TICKS_TASK_LIMIT`] tasks additionally branch on every
//! integer tick; beyond that size optimality is with respect to
//! event-aligned schedules.

use thiserror::Error;

use crate::model::{Axis, Instance, RelaxFlags, Schedule, Tick};
use crate::solve::{Indexed, SolverState};

#[derive(Debug, Error, PartialEq)]
pub enum ExactError {
    #[error("instance too large for brute-force enumeration: {0}")]
    ScaleExceeded(String),
}

/// Tick-level branching is enabled for massy instances up to this size.
pub const ALL_TICKS_TASK_LIMIT: usize = 6;

const ENUMERATE_TASK_LIMIT: usize = 5;
const ENUMERATE_HORIZON_LIMIT: Tick = 40;

#[derive(Debug, Clone)]
pub struct ExactParams {
    pub relax: RelaxFlags,
    /// Search aborts with `proven = false` once this many nodes expand.
    pub node_limit: u64,
    /// Optional initial upper bound (exclusive pruning threshold is
    /// `upper_bound`, i.e. only strictly better schedules are accepted).
    pub upper_bound: Option<Tick>,
}

impl Default for ExactParams {
    fn default() -> Self {
        ExactParams {
            relax: RelaxFlags::NONE,
            node_limit: 10_000_000,
            upper_bound: None,
        }
    }
}

#[derive(Debug)]
pub struct ExactResult {
    pub best: Option<Schedule>,
    pub optimum: Option<Tick>,
    /// True when the search space was exhausted: the result is the proven
    /// optimum, or proven infeasibility when `best` is `None`.
    pub proven: bool,
    pub nodes: u64,
}

struct Search<'a> {
    idx: &'a Indexed<'a>,
    relax: RelaxFlags,
    /// Signature id per technician; equal ids mean equal skills and equal
    /// seeded unavailability windows.
    tech_sig: Vec<usize>,
    topo: Vec<usize>,
    all_ticks: bool,
    /// Balance is not monotone under added tasks (a later simultaneous
    /// start can repair a partial violation), so it is checked over the
    /// finalized prefix at each node and in full at leaves.
    check_balance: bool,
    nodes: u64,
    node_limit: u64,
    aborted: bool,
    /// Exclusive bound: only schedules with makespan < `ub` are recorded.
    ub: Tick,
    best: Option<(Tick, Schedule)>,
}

impl<'a> Search<'a> {
    fn new(idx: &'a Indexed<'a>, params: &ExactParams) -> Self {
        let inst = idx.instance;
        let mut sigs: Vec<(Vec<String>, Vec<(Tick, Tick)>)> = Vec::new();
        let tech_sig = inst
            .technicians
            .iter()
            .map(|t| {
                let mut skills = t.skills.clone();
                skills.sort_unstable();
                skills.dedup();
                let key = (skills, t.merged_unavailabilities());
                match sigs.iter().position(|s| *s == key) {
                    Some(i) => i,
                    None => {
                        sigs.push(key);
                        sigs.len() - 1
                    }
                }
            })
            .collect();
        let topo: Vec<usize> = inst
            .topological_order()
            .expect("instance invariants hold")
            .iter()
            .map(|id| idx.task_index[id.as_str()])
            .collect();
        let check_balance = !params.relax.drop_balance;
        let massy = check_balance && idx.task_balance.iter().any(|b| b.is_some());
        Search {
            idx,
            relax: params.relax,
            tech_sig,
            topo,
            all_ticks: massy && inst.tasks.len() <= ALL_TICKS_TASK_LIMIT,
            check_balance,
            nodes: 0,
            node_limit: params.node_limit,
            aborted: false,
            ub: params.upper_bound.unwrap_or(idx.safety_horizon + 1),
            best: None,
        }
    }

    /// Start-time lower bounds for unscheduled tasks given the partial
    /// state and the sequence floor, propagated along precedences.
    fn lower_bound(&self, state: &SolverState<'_>, floor: Tick) -> Tick {
        let inst = self.idx.instance;
        let mut est = vec![0; inst.tasks.len()];
        let mut lb = 0;
        for &i in &self.topo {
            match state.start_of(i) {
                Some(s) => {
                    est[i] = s;
                    lb = lb.max(s + inst.tasks[i].duration);
                }
                None => {
                    let mut e = floor;
                    for &p in &self.idx.preds[i] {
                        e = e.max(est[p] + inst.tasks[p].duration);
                    }
                    est[i] = e;
                    lb = lb.max(e + self.idx.tail_chain[i]);
                }
            }
        }
        lb
    }

    /// Candidate starts for `task` in `[lo, cap]`: every event point of the
    /// partial state, or every tick when tick-level branching is on.
    fn candidates(&self, state: &SolverState<'_>, task: usize, lo: Tick, cap: Tick) -> Vec<Tick> {
        if lo > cap {
            return Vec::new();
        }
        if self.all_ticks {
            return (lo..=cap).collect();
        }
        let mut points = std::collections::BTreeSet::new();
        points.insert(lo);
        for intervals in &state.busy {
            for &(_, e) in intervals {
                if e > lo && e <= cap {
                    points.insert(e);
                }
            }
        }
        if let Some(loc) = self.idx.task_cap_loc[task] {
            for t in state.occupancy[loc].event_times() {
                if t > lo && t <= cap {
                    points.insert(t);
                }
            }
        }
        if let Some((axis, _)) = self.idx.task_balance[task] {
            for t in state.balance[crate::solve::axis_slot(axis)].event_times() {
                if t > lo && t <= cap {
                    points.insert(t);
                }
            }
        }
        points.into_iter().collect()
    }

    /// Canonical crews for `task` at `start`: technicians with identical
    /// signature and identical current busy intervals are interchangeable,
    /// so only the lowest-index members of each such group are drawn.
    fn canonical_crews(&self, state: &SolverState<'_>, task: usize, start: Tick) -> Vec<Vec<usize>> {
        let t = &self.idx.instance.tasks[task];
        let end = start + t.duration;
        let free: Vec<usize> = (0..self.idx.instance.technicians.len())
            .filter(|&j| state.tech_free(j, start, end))
            .collect();
        if free.len() < t.crew as usize {
            return Vec::new();
        }
        // group interchangeable free technicians
        let mut groups: Vec<Vec<usize>> = Vec::new();
        for &j in &free {
            match groups.iter_mut().find(|g| {
                let k = g[0];
                self.tech_sig[k] == self.tech_sig[j] && state.busy[k] == state.busy[j]
            }) {
                Some(g) => g.push(j),
                None => groups.push(vec![j]),
            }
        }
        let mut crews = Vec::new();
        let mut counts = vec![0usize; groups.len()];
        self.pick_counts(task, &groups, &mut counts, 0, t.crew as usize, &mut crews);
        crews
    }

    fn pick_counts(
        &self,
        task: usize,
        groups: &[Vec<usize>],
        counts: &mut Vec<usize>,
        g: usize,
        remaining: usize,
        out: &mut Vec<Vec<usize>>,
    ) {
        if g == groups.len() {
            if remaining != 0 {
                return;
            }
            if !self.relax.drop_requirements {
                for req in &self.idx.instance.tasks[task].requirements {
                    let have: usize = groups
                        .iter()
                        .zip(counts.iter())
                        .filter(|(grp, _)| {
                            self.idx.instance.technicians[grp[0]].has_skill(&req.skill)
                        })
                        .map(|(_, &c)| c)
                        .sum();
                    if have < req.count as usize {
                        return;
                    }
                }
            }
            let crew: Vec<usize> = groups
                .iter()
                .zip(counts.iter())
                .flat_map(|(grp, &c)| grp[..c].iter().copied())
                .collect();
            out.push(crew);
            return;
        }
        for c in 0..=groups[g].len().min(remaining) {
            counts[g] = c;
            self.pick_counts(task, groups, counts, g + 1, remaining - c, out);
        }
        counts[g] = 0;
    }

    /// Checks both balance profiles over `[0, cutoff)`. Values attained at
    /// or after `cutoff` can still change: future placements in the sorted
    /// sequence start at or after the current floor.
    fn balance_ok_before(&self, state: &SolverState<'_>, cutoff: Tick) -> bool {
        for axis in [Axis::AftFwd, Axis::LeftRight] {
            let band = self.idx.instance.band(axis);
            let mut v = 0i64;
            for &(t, d) in state.balance[crate::solve::axis_slot(axis)].deltas() {
                if t >= cutoff {
                    break;
                }
                v += d;
                if v > band || v < -band {
                    return false;
                }
            }
        }
        true
    }

    fn dfs(&mut self, state: &mut SolverState<'a>, last: Option<(Tick, usize)>) {
        if self.aborted {
            return;
        }
        self.nodes += 1;
        if self.nodes > self.node_limit {
            self.aborted = true;
            return;
        }
        let n = self.idx.instance.tasks.len();
        if state.scheduled_count() == n {
            if self.check_balance && !self.balance_ok_before(state, Tick::MAX) {
                return;
            }
            let makespan = (0..n)
                .filter_map(|i| {
                    state
                        .start_of(i)
                        .map(|s| s + self.idx.instance.tasks[i].duration)
                })
                .max()
                .unwrap_or(0);
            if makespan < self.ub {
                self.ub = makespan;
                self.best = Some((makespan, state.to_schedule()));
            }
            return;
        }
        let floor = last.map_or(0, |(s, _)| s);
        if self.check_balance && !self.balance_ok_before(state, floor) {
            return;
        }
        if self.lower_bound(state, floor) >= self.ub {
            return;
        }
        for i in 0..n {
            if state.start_of(i).is_some() {
                continue;
            }
            let mut est = floor;
            let mut ready = true;
            for &p in &self.idx.preds[i] {
                match state.start_of(p) {
                    Some(s) => est = est.max(s + self.idx.instance.tasks[p].duration),
                    None => {
                        ready = false;
                        break;
                    }
                }
            }
            if !ready {
                continue;
            }
            // completion is at least start + tail chain, so cap the start
            let cap = (self.ub - 1 - self.idx.tail_chain[i]).min(self.idx.safety_horizon);
            for start in self.candidates(state, i, est, cap) {
                if start + self.idx.tail_chain[i] >= self.ub {
                    break; // ub tightened mid-loop; candidates are ascending
                }
                // sequence rule: non-decreasing (start, index)
                if let Some((ls, li)) = last {
                    if start == ls && i <= li {
                        continue;
                    }
                }
                if !state.resources_admit(i, start) {
                    continue;
                }
                for crew in self.canonical_crews(state, i, start) {
                    state.place(i, start, &crew);
                    self.dfs(state, Some((start, i)));
                    state.unplace(i);
                    if self.aborted {
                        return;
                    }
                }
            }
        }
    }
}

/// Branch-and-bound search for a minimum-makespan schedule.
pub fn exact_solve(instance: &Instance, params: &ExactParams) -> ExactResult {
    let idx = Indexed::new(instance);
    if instance.tasks.is_empty() {
        return ExactResult {
            best: Some(Schedule::default()),
            optimum: Some(0),
            proven: true,
            nodes: 0,
        };
    }
    let mut search = Search::new(&idx, params);
    // balance is handled by the search itself (deferred checking)
    let state_relax = RelaxFlags {
        drop_balance: true,
        ..params.relax
    };
    let mut state = SolverState::new(&idx, state_relax);
    search.dfs(&mut state, None);
    let proven = !search.aborted;
    let (optimum, best) = match search.best {
        Some((m, s)) => (Some(m), Some(s)),
        None => (None, None),
    };
    ExactResult {
        best,
        optimum,
        proven,
        nodes: search.nodes,
    }
}

/// Visits every complete `(start, crew)` assignment with starts in
/// `[0, horizon_cap - d_i]`, pruning only on violations that later
/// placements cannot repair; balance is checked on the complete profile.
fn enumerate_accepted(
    instance: &Instance,
    horizon_cap: Tick,
    relax: RelaxFlags,
    mut visit: impl FnMut(&SolverState<'_>),
) -> Result<(), ExactError> {
    if instance.tasks.len() > ENUMERATE_TASK_LIMIT {
        return Err(ExactError::ScaleExceeded(format!(
            "{} tasks exceed the {ENUMERATE_TASK_LIMIT}-task limit",
            instance.tasks.len()
        )));
    }
    if horizon_cap > ENUMERATE_HORIZON_LIMIT {
        return Err(ExactError::ScaleExceeded(format!(
            "horizon cap {horizon_cap} exceeds {ENUMERATE_HORIZON_LIMIT}"
        )));
    }
    let idx = Indexed::new(instance);
    // balance is not monotone in added tasks, so it is deferred to the leaf
    let incremental = RelaxFlags {
        drop_balance: true,
        ..relax
    };
    let topo: Vec<usize> = instance
        .topological_order()
        .expect("instance invariants hold")
        .iter()
        .map(|id| idx.task_index[id.as_str()])
        .collect();
    let mut state = SolverState::new(&idx, incremental);

    fn subsets(m: usize, k: usize) -> Vec<Vec<usize>> {
        let mut out = Vec::new();
        let mut cur = Vec::new();
        fn rec(from: usize, m: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
            if cur.len() == k {
                out.push(cur.clone());
                return;
            }
            for j in from..m {
                cur.push(j);
                rec(j + 1, m, k, cur, out);
                cur.pop();
            }
        }
        rec(0, m, k, &mut cur, &mut out);
        out
    }

    let m = instance.technicians.len();
    let crew_choices: Vec<Vec<Vec<usize>>> = instance
        .tasks
        .iter()
        .map(|t| {
            subsets(m, t.crew as usize)
                .into_iter()
                .filter(|crew| {
                    relax.drop_requirements
                        || t.requirements.iter().all(|req| {
                            crew.iter()
                                .filter(|&&j| instance.technicians[j].has_skill(&req.skill))
                                .count()
                                >= req.count as usize
                        })
                })
                .collect()
        })
        .collect();

    fn rec<'a>(
        depth: usize,
        topo: &[usize],
        idx: &Indexed<'_>,
        state: &mut SolverState<'a>,
        crew_choices: &[Vec<Vec<usize>>],
        horizon_cap: Tick,
        relax: RelaxFlags,
        visit: &mut impl FnMut(&SolverState<'_>),
    ) {
        let inst = idx.instance;
        if depth == topo.len() {
            if !relax.drop_balance {
                for axis in [crate::model::Axis::AftFwd, crate::model::Axis::LeftRight] {
                    let band = inst.band(axis);
                    let (lo, hi) = state.balance[crate::solve::axis_slot(axis)].extrema_from(0);
                    if lo < -band || hi > band {
                        return;
                    }
                }
            }
            visit(state);
            return;
        }
        let i = topo[depth];
        let t = &inst.tasks[i];
        let est: Tick = idx.preds[i]
            .iter()
            .map(|&p| state.start_of(p).expect("topological order") + inst.tasks[p].duration)
            .max()
            .unwrap_or(0);
        for start in est..=(horizon_cap - t.duration) {
            if !state.resources_admit(i, start) {
                continue;
            }
            for crew in &crew_choices[i] {
                if !crew
                    .iter()
                    .all(|&j| state.tech_free(j, start, start + t.duration))
                {
                    continue;
                }
                state.place(i, start, crew);
                rec(
                    depth + 1,
                    topo,
                    idx,
                    state,
                    crew_choices,
                    horizon_cap,
                    relax,
                    visit,
                );
                state.unplace(i);
            }
        }
    }

    rec(
        0,
        &topo,
        &idx,
        &mut state,
        &crew_choices,
        horizon_cap,
        relax,
        &mut visit,
    );
    Ok(())
}

/// Counts the complete assignments the validator accepts, by brute force.
pub fn enumerate_feasible(instance: &Instance, horizon_cap: Tick) -> Result<u64, ExactError> {
    let mut count = 0u64;
    enumerate_accepted(instance, horizon_cap, RelaxFlags::NONE, |_| count += 1)?;
    Ok(count)
}

/// Minimum makespan over all accepted assignments, by brute force.
/// `None` means no feasible assignment exists within the cap.
pub fn enumerate_optimum(
    instance: &Instance,
    horizon_cap: Tick,
    relax: RelaxFlags,
) -> Result<Option<Tick>, ExactError> {
    let mut best: Option<Tick> = None;
    enumerate_accepted(instance, horizon_cap, relax, |state| {
        let inst = state.idx.instance;
        let makespan = (0..inst.tasks.len())
            .filter_map(|i| state.start_of(i).map(|s| s + inst.tasks[i].duration))
            .max()
            .unwrap_or(0);
        best = Some(best.map_or(makespan, |b: Tick| b.min(makespan)));
    })?;
    Ok(best)
}
