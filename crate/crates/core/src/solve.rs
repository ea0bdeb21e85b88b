//! Anytime heuristic solver: a serial schedule-generation scheme (SGS)
//! that places tasks one by one at their earliest feasible start, wrapped
//! in a large neighborhood search (LNS) that repeatedly destroys part of
//! the incumbent and rebuilds it greedily, keeping strict improvements.

use std::collections::{BTreeSet, HashMap};
use std::sync::Mutex;
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::metrics::AnytimeLog;
use crate::model::{
    horizon, latest_unavailability_end, Axis, Instance, RelaxFlags, Schedule, ScheduleEntry,
    TaskId, TechId, Tick,
};
use crate::profile::StepProfile;

#[derive(Debug, Error)]
pub enum SolveError {
    #[error("construction stalled: no remaining task admits a feasible start within the safety horizon")]
    ConstructionStalled,
    #[error("no solution found within the time limit ({attempts} construction attempts)")]
    NoSolutionFound { attempts: u64 },
    #[error("unknown task id {0}")]
    UnknownTask(String),
}

#[derive(Debug, Clone)]
pub struct SolveParams {
    pub time_limit_seconds: f64,
    pub seed: u64,
    pub relax: RelaxFlags,
    /// Fraction of tasks removed per LNS iteration, in (0, 1].
    pub destroy_fraction: f64,
    /// Construction restarts tolerated per attempt before giving up on it.
    pub restart_stall_limit: u32,
    pub workers: usize,
    /// Optional iteration budget; mainly for reproducible runs and tests.
    pub max_iterations: Option<u64>,
}

impl Default for SolveParams {
    fn default() -> Self {
        SolveParams {
            time_limit_seconds: 60.0,
            seed: 0,
            relax: RelaxFlags::NONE,
            destroy_fraction: 0.15,
            restart_stall_limit: 20,
            workers: 1,
            max_iterations: None,
        }
    }
}

/// Indexed view of an instance shared by the constructive and exact solvers.
pub(crate) struct Indexed<'a> {
    pub instance: &'a Instance,
    pub task_index: HashMap<&'a str, usize>,
    /// Predecessor indices per task.
    pub preds: Vec<Vec<usize>>,
    /// Merged unavailability windows per technician.
    pub tech_unavail: Vec<Vec<(Tick, Tick)>>,
    /// Technician skill-count ordering used by the greedy crew assignment.
    pub tech_order: Vec<usize>,
    /// Bounded-location index per task (unbounded and missing -> None).
    pub task_cap_loc: Vec<Option<usize>>,
    pub cap_locs: Vec<(&'a str, u32)>,
    /// Signed mass contribution per task, when it has one.
    pub task_balance: Vec<Option<(Axis, i64)>>,
    /// Longest duration chain from each task through its successors,
    /// including the task itself.
    pub tail_chain: Vec<Tick>,
    /// Latest start worth trying during construction.
    pub safety_horizon: Tick,
}

impl<'a> Indexed<'a> {
    pub fn new(instance: &'a Instance) -> Self {
        let task_index: HashMap<&str, usize> = instance
            .tasks
            .iter()
            .enumerate()
            .map(|(i, t)| (t.id.as_str(), i))
            .collect();
        let preds: Vec<Vec<usize>> = instance
            .tasks
            .iter()
            .map(|t| t.precedences.iter().map(|p| task_index[p.as_str()]).collect())
            .collect();
        let tech_unavail = instance
            .technicians
            .iter()
            .map(|t| t.merged_unavailabilities())
            .collect();
        // fewest skills first: save certified technicians for where needed
        let mut tech_order: Vec<usize> = (0..instance.technicians.len()).collect();
        tech_order.sort_by_key(|&j| {
            (
                instance.technicians[j].skills.len(),
                instance.technicians[j].id.clone(),
            )
        });
        let mut cap_locs = Vec::new();
        let mut cap_loc_index: HashMap<&str, usize> = HashMap::new();
        for l in &instance.locations {
            if let Some(k) = l.capacity {
                cap_loc_index.insert(l.id.as_str(), cap_locs.len());
                cap_locs.push((l.id.as_str(), k));
            }
        }
        let task_cap_loc = instance
            .tasks
            .iter()
            .map(|t| {
                t.location
                    .as_deref()
                    .and_then(|l| cap_loc_index.get(l).copied())
            })
            .collect();
        let task_balance = instance
            .tasks
            .iter()
            .map(|t| {
                if t.mass == 0 {
                    return None;
                }
                instance.task_zone(t).map(|z| {
                    let (axis, sign) = z.axis_sign();
                    (axis, sign * t.mass)
                })
            })
            .collect();

        // longest chain of durations starting at each task
        let mut succs: Vec<Vec<usize>> = vec![Vec::new(); instance.tasks.len()];
        for (i, ps) in preds.iter().enumerate() {
            for &p in ps {
                succs[p].push(i);
            }
        }
        let order = instance
            .topological_order()
            .expect("instance invariants hold");
        let mut tail_chain = vec![0; instance.tasks.len()];
        for id in order.iter().rev() {
            let i = task_index[id.as_str()];
            let tail = succs[i].iter().map(|&s| tail_chain[s]).max().unwrap_or(0);
            tail_chain[i] = instance.tasks[i].duration + tail;
        }

        let h = horizon(instance);
        Indexed {
            instance,
            task_index,
            preds,
            tech_unavail,
            tech_order,
            task_cap_loc,
            cap_locs,
            task_balance,
            tail_chain,
            // unavailability windows can push every feasible start past the
            // duration sum, so the stall guard accounts for them
            safety_horizon: h + latest_unavailability_end(instance),
        }
    }
}

/// Incremental solver state: fixed technician busy intervals, per-location
/// occupancy profiles, per-axis balance profiles and the partial schedule.
/// The partial schedule always passes validation restricted to its
/// scheduled subset.
pub struct SolverState<'a> {
    pub(crate) idx: &'a Indexed<'a>,
    relax: RelaxFlags,
    /// Sorted disjoint busy intervals per technician, seeded with the
    /// merged unavailability windows.
    pub(crate) busy: Vec<Vec<(Tick, Tick)>>,
    pub(crate) occupancy: Vec<StepProfile>,
    pub(crate) balance: [StepProfile; 2],
    pub(crate) starts: Vec<Option<Tick>>,
    crews: Vec<Vec<usize>>,
    scheduled: usize,
}

pub(crate) fn axis_slot(axis: Axis) -> usize {
    match axis {
        Axis::AftFwd => 0,
        Axis::LeftRight => 1,
    }
}

impl<'a> SolverState<'a> {
    pub(crate) fn new(idx: &'a Indexed<'a>, relax: RelaxFlags) -> Self {
        SolverState {
            idx,
            relax,
            busy: idx.tech_unavail.clone(),
            occupancy: vec![StepProfile::new(); idx.cap_locs.len()],
            balance: [StepProfile::new(), StepProfile::new()],
            starts: vec![None; idx.instance.tasks.len()],
            crews: vec![Vec::new(); idx.instance.tasks.len()],
            scheduled: 0,
        }
    }

    pub fn scheduled_count(&self) -> usize {
        self.scheduled
    }

    pub fn start_of(&self, task: usize) -> Option<Tick> {
        self.starts[task]
    }

    pub(crate) fn tech_free(&self, tech: usize, start: Tick, end: Tick) -> bool {
        let intervals = &self.busy[tech];
        let i = intervals.partition_point(|&(_, e)| e <= start);
        intervals.get(i).is_none_or(|&(s, _)| s >= end)
    }

    fn occupy_tech(&mut self, tech: usize, start: Tick, end: Tick) {
        let intervals = &mut self.busy[tech];
        let i = intervals.partition_point(|&(s, _)| s < start);
        intervals.insert(i, (start, end));
    }

    fn release_tech(&mut self, tech: usize, start: Tick, end: Tick) {
        let intervals = &mut self.busy[tech];
        let i = intervals
            .iter()
            .position(|&iv| iv == (start, end))
            .expect("interval was occupied");
        intervals.remove(i);
    }

    /// Greedy crew selection for `task` starting at `start`: fill each
    /// requirement from qualified free technicians with the fewest skills
    /// first, then top up with any free technicians. Returns `None` when no
    /// crew of the right size covers all requirements.
    pub fn assign_crew(&self, task: usize, start: Tick) -> Option<Vec<usize>> {
        self.assign_crew_ordered(task, start, &self.idx.tech_order)
    }

    /// [`Self::assign_crew`] with an explicit technician preference order,
    /// letting the search diversify over equally valid crews.
    pub(crate) fn assign_crew_ordered(
        &self,
        task: usize,
        start: Tick,
        order: &[usize],
    ) -> Option<Vec<usize>> {
        let t = &self.idx.instance.tasks[task];
        let end = start + t.duration;
        let free: Vec<usize> = order
            .iter()
            .copied()
            .filter(|&j| self.tech_free(j, start, end))
            .collect();
        if free.len() < t.crew as usize {
            return None;
        }
        let mut chosen: Vec<usize> = Vec::with_capacity(t.crew as usize);
        if !self.relax.drop_requirements && !t.requirements.is_empty() {
            // one technician counts toward every skill they hold, so this
            // is a small covering problem, not independent per-skill picks
            let mut counts: Vec<u32> = t.requirements.iter().map(|r| r.count).collect();
            if !self.cover_requirements(task, &free, t.crew as usize, &mut counts, 0, &mut chosen)
            {
                return None;
            }
        }
        for &j in &free {
            if chosen.len() >= t.crew as usize {
                break;
            }
            if !chosen.contains(&j) {
                chosen.push(j);
            }
        }
        debug_assert_eq!(chosen.len(), t.crew as usize);
        chosen.sort_unstable();
        Some(chosen)
    }

    /// Backtracking search for at most `k` free technicians jointly
    /// covering all outstanding requirement counts; fills `chosen` with
    /// the first cover in technician order.
    fn cover_requirements(
        &self,
        task: usize,
        free: &[usize],
        k: usize,
        counts: &mut Vec<u32>,
        from: usize,
        chosen: &mut Vec<usize>,
    ) -> bool {
        if counts.iter().all(|&c| c == 0) {
            return true;
        }
        if chosen.len() >= k {
            return false;
        }
        let reqs = &self.idx.instance.tasks[task].requirements;
        for f in from..free.len() {
            let j = free[f];
            let mut touched = Vec::new();
            for (ri, r) in reqs.iter().enumerate() {
                if counts[ri] > 0 && self.idx.instance.technicians[j].has_skill(&r.skill) {
                    counts[ri] -= 1;
                    touched.push(ri);
                }
            }
            if touched.is_empty() {
                continue;
            }
            chosen.push(j);
            if self.cover_requirements(task, free, k, counts, f + 1, chosen) {
                return true;
            }
            chosen.pop();
            for &ri in &touched {
                counts[ri] += 1;
            }
        }
        false
    }

    /// Checks occupancy and balance admissibility of starting `task` at
    /// `start` (crew availability is [`Self::assign_crew`]'s job).
    pub(crate) fn resources_admit(&self, task: usize, start: Tick) -> bool {
        let t = &self.idx.instance.tasks[task];
        if !self.relax.drop_capacity {
            if let Some(loc) = self.idx.task_cap_loc[task] {
                let cap = self.idx.cap_locs[loc].1 as i64;
                let peak = self.occupancy[loc]
                    .max_over(start, start + t.duration)
                    .expect("duration is positive");
                if peak + t.crew as i64 > cap {
                    return false;
                }
            }
        }
        if !self.relax.drop_balance {
            if let Some((axis, mass)) = self.idx.task_balance[task] {
                let band = self.idx.instance.band(axis);
                let (lo, hi) = self.balance[axis_slot(axis)].extrema_from(start);
                if lo + mass < -band || hi + mass > band {
                    return false;
                }
            }
        }
        true
    }

    /// Candidate start times at or after `est`: `est` itself plus every
    /// event point of the structures the task interacts with. Earliest
    /// feasible starts always lie on these points.
    fn candidate_starts(&self, task: usize, est: Tick) -> Vec<Tick> {
        let mut points: BTreeSet<Tick> = BTreeSet::new();
        points.insert(est);
        for intervals in &self.busy {
            for &(_, e) in intervals {
                if e >= est {
                    points.insert(e);
                }
            }
        }
        if let Some(loc) = self.idx.task_cap_loc[task] {
            for t in self.occupancy[loc].event_times() {
                if t >= est {
                    points.insert(t);
                }
            }
        }
        if let Some((axis, _)) = self.idx.task_balance[task] {
            for t in self.balance[axis_slot(axis)].event_times() {
                if t >= est {
                    points.insert(t);
                }
            }
            // mass steps are permanent, so on tiny instances optima can
            // need starts strictly between event points; use the full
            // tick grid there (same cutoff as the exact search)
            if self.idx.instance.tasks.len() <= crate::exact::ALL_TICKS_TASK_LIMIT {
                points.extend(est..=self.idx.safety_horizon);
            }
        }
        points
            .into_iter()
            .filter(|&t| t <= self.idx.safety_horizon)
            .collect()
    }

    /// Earliest feasible start and crew for `task`, or `None` when the task
    /// admits no start within the safety horizon.
    pub fn earliest_placement(&self, task: usize) -> Option<(Tick, Vec<usize>)> {
        let est = self.idx.preds[task]
            .iter()
            .map(|&p| {
                self.starts[p].expect("predecessors are scheduled first")
                    + self.idx.instance.tasks[p].duration
            })
            .max()
            .unwrap_or(0);
        for start in self.candidate_starts(task, est) {
            if !self.resources_admit(task, start) {
                continue;
            }
            if let Some(crew) = self.assign_crew(task, start) {
                return Some((start, crew));
            }
        }
        None
    }

    /// Diversified placement for the neighborhood search: occasionally
    /// delays past the earliest feasible start and shuffles the crew
    /// preference, reaching schedules the strict greedy cannot represent
    /// (some optima need a task held back or a different but equally
    /// valid crew).
    pub(crate) fn randomized_placement(
        &self,
        task: usize,
        rng: &mut ChaCha8Rng,
    ) -> Option<(Tick, Vec<usize>)> {
        let est = self.idx.preds[task]
            .iter()
            .map(|&p| {
                self.starts[p].expect("predecessors are scheduled first")
                    + self.idx.instance.tasks[p].duration
            })
            .max()
            .unwrap_or(0);
        let order: Vec<usize> = if rng.gen_bool(0.5) {
            let mut o = self.idx.tech_order.clone();
            o.shuffle(rng);
            o
        } else {
            self.idx.tech_order.clone()
        };
        // geometric delay: usually the earliest feasible start, sometimes
        // one or more feasible candidates later
        let mut skips = 0u32;
        while rng.gen_bool(if skips == 0 { 0.25 } else { 0.5 }) {
            skips += 1;
        }
        let mut last: Option<(Tick, Vec<usize>)> = None;
        for start in self.candidate_starts(task, est) {
            if !self.resources_admit(task, start) {
                continue;
            }
            let Some(crew) = self.assign_crew_ordered(task, start, &order) else {
                continue;
            };
            last = Some((start, crew));
            if skips == 0 {
                break;
            }
            skips -= 1;
        }
        last
    }

    pub fn place(&mut self, task: usize, start: Tick, crew: &[usize]) {
        let t = &self.idx.instance.tasks[task];
        let end = start + t.duration;
        for &j in crew {
            self.occupy_tech(j, start, end);
        }
        if let Some(loc) = self.idx.task_cap_loc[task] {
            self.occupancy[loc]
                .pulse(start, end, t.crew as i64)
                .expect("duration is positive");
        }
        if let Some((axis, mass)) = self.idx.task_balance[task] {
            self.balance[axis_slot(axis)].step_at(start, mass);
        }
        self.starts[task] = Some(start);
        self.crews[task] = crew.to_vec();
        self.scheduled += 1;
    }

    pub fn unplace(&mut self, task: usize) {
        let t = &self.idx.instance.tasks[task];
        let start = self.starts[task].expect("task was placed");
        let end = start + t.duration;
        let crew = std::mem::take(&mut self.crews[task]);
        for &j in &crew {
            self.release_tech(j, start, end);
        }
        if let Some(loc) = self.idx.task_cap_loc[task] {
            self.occupancy[loc]
                .pulse(start, end, -(t.crew as i64))
                .expect("duration is positive");
        }
        if let Some((axis, mass)) = self.idx.task_balance[task] {
            self.balance[axis_slot(axis)].step_at(start, -mass);
        }
        self.starts[task] = None;
        self.scheduled -= 1;
    }

    pub fn to_schedule(&self) -> Schedule {
        let mut schedule = Schedule::default();
        for (i, t) in self.idx.instance.tasks.iter().enumerate() {
            if let Some(start) = self.starts[i] {
                let techs: BTreeSet<TechId> = self.crews[i]
                    .iter()
                    .map(|&j| self.idx.instance.technicians[j].id.clone())
                    .collect();
                schedule
                    .entries
                    .insert(t.id.clone(), ScheduleEntry { start, techs });
            }
        }
        schedule
    }
}

/// Runs the serial schedule-generation scheme over a full priority ranking:
/// repeatedly place the highest-priority task whose predecessors are all
/// scheduled at its earliest feasible start.
fn sgs_by_rank<'a>(
    idx: &'a Indexed<'a>,
    rank: &[usize],
    relax: RelaxFlags,
    mut jitter: Option<&mut ChaCha8Rng>,
) -> Result<SolverState<'a>, SolveError> {
    let n = idx.instance.tasks.len();
    let mut state = SolverState::new(idx, relax);
    let mut remaining_preds: Vec<usize> = idx.preds.iter().map(|p| p.len()).collect();
    let mut succs: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (i, ps) in idx.preds.iter().enumerate() {
        for &p in ps {
            succs[p].push(i);
        }
    }
    // eligible tasks ordered by (rank, index)
    let mut eligible: BTreeSet<(usize, usize)> = (0..n)
        .filter(|&i| remaining_preds[i] == 0)
        .map(|i| (rank[i], i))
        .collect();
    while let Some(&(r, i)) = eligible.iter().next() {
        eligible.remove(&(r, i));
        let placement = match jitter.as_deref_mut() {
            Some(rng) => state.randomized_placement(i, rng),
            None => state.earliest_placement(i),
        };
        let Some((start, crew)) = placement else {
            return Err(SolveError::ConstructionStalled);
        };
        state.place(i, start, &crew);
        for &s in &succs[i] {
            remaining_preds[s] -= 1;
            if remaining_preds[s] == 0 {
                eligible.insert((rank[s], s));
            }
        }
    }
    Ok(state)
}

/// Constructs a complete schedule with the given task priority ordering.
/// The schedule passes validation under the same relaxation flags.
pub fn sgs(
    instance: &Instance,
    priority: &[TaskId],
    _seed: u64,
    relax: RelaxFlags,
) -> Result<Schedule, SolveError> {
    let idx = Indexed::new(instance);
    let mut rank = vec![usize::MAX; instance.tasks.len()];
    for (r, id) in priority.iter().enumerate() {
        let i = *idx
            .task_index
            .get(id.as_str())
            .ok_or_else(|| SolveError::UnknownTask(id.clone()))?;
        rank[i] = r;
    }
    // tasks absent from the priority list go last, in instance order
    for (i, r) in rank.iter_mut().enumerate() {
        if *r == usize::MAX {
            *r = priority.len() + i;
        }
    }
    sgs_by_rank(&idx, &rank, relax, None).map(|state| state.to_schedule())
}

struct SharedIncumbent {
    best: Option<(Tick, Schedule)>,
    log: AnytimeLog,
}

impl SharedIncumbent {
    /// Compare-and-improve; records the improvement in the anytime log.
    fn offer(&mut self, makespan: Tick, schedule: &Schedule, elapsed: f64) -> bool {
        let improved = match &self.best {
            Some((best, _)) => makespan < *best,
            None => true,
        };
        if improved {
            self.best = Some((makespan, schedule.clone()));
            self.log.push(elapsed, makespan);
        }
        improved
    }
}

fn state_makespan(state: &SolverState<'_>) -> Tick {
    state
        .starts
        .iter()
        .zip(&state.idx.instance.tasks)
        .filter_map(|(s, t)| s.map(|s| s + t.duration))
        .max()
        .unwrap_or(0)
}

fn random_rank(n: usize, rng: &mut ChaCha8Rng) -> Vec<usize> {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut rank = vec![0; n];
    for (r, &i) in order.iter().enumerate() {
        rank[i] = r;
    }
    rank
}

fn lns_worker(
    idx: &Indexed<'_>,
    params: &SolveParams,
    worker: usize,
    start_time: Instant,
    shared: &Mutex<SharedIncumbent>,
) -> u64 {
    let n = idx.instance.tasks.len();
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed.wrapping_add(worker as u64));
    let deadline = params.time_limit_seconds;
    let mut attempts: u64 = 0;
    let destroy_count = ((n as f64 * params.destroy_fraction).ceil() as usize).clamp(1, n.max(1));

    // initial incumbent: deterministic order first, then random restarts
    let mut current: Option<SolverState<'_>> = None;
    let base_rank: Vec<usize> = (0..n).collect();
    let mut stalls = 0u32;
    while current.is_none() && start_time.elapsed().as_secs_f64() < deadline {
        attempts += 1;
        let rank = if attempts == 1 {
            base_rank.clone()
        } else {
            random_rank(n, &mut rng)
        };
        let jitter = if attempts == 1 { None } else { Some(&mut rng) };
        match sgs_by_rank(idx, &rank, params.relax, jitter) {
            Ok(state) => current = Some(state),
            Err(_) => {
                stalls += 1;
                if stalls > params.restart_stall_limit {
                    return attempts;
                }
            }
        }
    }
    let Some(mut current) = current else {
        return attempts;
    };
    let mut current_makespan = state_makespan(&current);
    shared.lock().unwrap().offer(
        current_makespan,
        &current.to_schedule(),
        start_time.elapsed().as_secs_f64(),
    );

    let mut iterations: u64 = 0;
    while start_time.elapsed().as_secs_f64() < deadline {
        if let Some(limit) = params.max_iterations {
            if iterations >= limit {
                break;
            }
        }
        iterations += 1;

        // destroy: random subset or the makespan tail, 50/50; the subset
        // size varies up to a full teardown so the search mixes local
        // moves with fresh restarts and cannot orbit one incumbent shape
        let destroyed: Vec<usize> = if rng.gen_bool(0.5) {
            let count = if rng.gen_bool(0.1) {
                n
            } else {
                rng.gen_range(1..=destroy_count.max(1))
            };
            let mut ids: Vec<usize> = (0..n).collect();
            ids.shuffle(&mut rng);
            ids.truncate(count);
            ids
        } else {
            let cutoff = current_makespan - (current_makespan as f64 * 0.2).ceil() as Tick;
            (0..n)
                .filter(|&i| {
                    current.starts[i].map(|s| s + idx.instance.tasks[i].duration) > Some(cutoff)
                })
                .collect()
        };
        if destroyed.is_empty() {
            continue;
        }

        // rebuild: kept tasks keep their relative start order, destroyed
        // tasks are re-inserted at random ranks
        let mut keyed: Vec<(u64, usize)> = Vec::with_capacity(n);
        let destroyed_set: Vec<bool> = {
            let mut v = vec![false; n];
            for &i in &destroyed {
                v[i] = true;
            }
            v
        };
        for i in 0..n {
            let key = if destroyed_set[i] {
                rng.gen_range(0..=(idx.safety_horizon.max(1) as u64) * 1000)
            } else {
                // scale incumbent starts so random keys interleave
                (current.starts[i].unwrap_or(0) as u64) * 1000
            };
            keyed.push((key, i));
        }
        keyed.sort_unstable();
        let mut rank = vec![0; n];
        for (r, &(_, i)) in keyed.iter().enumerate() {
            rank[i] = r;
        }

        match sgs_by_rank(idx, &rank, params.relax, Some(&mut rng)) {
            Ok(state) => {
                let makespan = state_makespan(&state);
                if makespan < current_makespan {
                    current = state;
                    current_makespan = makespan;
                    shared.lock().unwrap().offer(
                        makespan,
                        &current.to_schedule(),
                        start_time.elapsed().as_secs_f64(),
                    );
                } else if makespan == current_makespan && rng.gen_bool(0.5) {
                    // sideways move: same objective, different shape
                    current = state;
                }
            }
            Err(_) => continue,
        }
    }
    attempts
}

/// Runs the LNS until the wall-clock limit (or the iteration budget) and
/// returns the best schedule found along with the anytime incumbent log.
pub fn lns_solve(
    instance: &Instance,
    params: &SolveParams,
) -> Result<(Schedule, AnytimeLog), SolveError> {
    let idx = Indexed::new(instance);
    if instance.tasks.is_empty() {
        return Ok((Schedule::default(), AnytimeLog::default()));
    }
    let shared = Mutex::new(SharedIncumbent {
        best: None,
        log: AnytimeLog::default(),
    });
    let start_time = Instant::now();
    let workers = params.workers.max(1);
    let mut attempts = 0u64;
    if workers == 1 {
        attempts += lns_worker(&idx, params, 0, start_time, &shared);
    } else {
        std::thread::scope(|scope| {
            let handles: Vec<_> = (0..workers)
                .map(|w| {
                    let idx = &idx;
                    let shared = &shared;
                    scope.spawn(move || lns_worker(idx, params, w, start_time, shared))
                })
                .collect();
            for h in handles {
                attempts += h.join().expect("worker panicked");
            }
        });
    }
    let inner = shared.into_inner().unwrap();
    match inner.best {
        Some((_, schedule)) => Ok((schedule, inner.log)),
        None => Err(SolveError::NoSolutionFound { attempts }),
    }
}
