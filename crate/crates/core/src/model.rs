//! Domain types, instance/schedule JSON I/O, planning horizon and the
//! random instance subsampler.
//!
//! Time is counted in integer ticks of 15 minutes; masses are integer
//! kilograms. All intervals are half-open `[start, end)`: a task ending at
//! `t` and an unavailability starting at `t` do not conflict.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Integer time in 15-minute ticks.
pub type Tick = i64;
/// Integer mass in kilograms.
pub type MassKg = i64;

pub type TaskId = String;
pub type TechId = String;
pub type LocationId = String;
pub type SkillId = String;

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid instance: {0}")]
    Validation(String),
    #[error("subsample count {n} out of range 0..={max}")]
    CountOutOfRange { n: usize, max: usize },
}

impl From<serde_json::Error> for ModelError {
    fn from(e: serde_json::Error) -> Self {
        ModelError::Parse(e.to_string())
    }
}

/// One of the four balance zones of the aircraft.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Zone {
    Aft,
    Fwd,
    Left,
    Right,
}

/// The two balance axes. `Aft`/`Left` count positive, `Fwd`/`Right` negative.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Axis {
    AftFwd,
    LeftRight,
}

impl Zone {
    /// Axis this zone contributes to and the sign of its contribution.
    pub fn axis_sign(self) -> (Axis, i64) {
        match self {
            Zone::Aft => (Axis::AftFwd, 1),
            Zone::Fwd => (Axis::AftFwd, -1),
            Zone::Left => (Axis::LeftRight, 1),
            Zone::Right => (Axis::LeftRight, -1),
        }
    }
}

/// A skill requirement: at least `count` assigned technicians hold `skill`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Requirement {
    pub skill: SkillId,
    pub count: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Task {
    pub id: TaskId,
    pub duration: Tick,
    #[serde(default)]
    pub location: Option<LocationId>,
    pub crew: u32,
    #[serde(default)]
    pub mass: MassKg,
    #[serde(default)]
    pub precedences: Vec<TaskId>,
    #[serde(default)]
    pub requirements: Vec<Requirement>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Technician {
    pub id: TechId,
    #[serde(default)]
    pub skills: Vec<SkillId>,
    /// Half-open `[start, end)` windows; may overlap, merged on demand.
    #[serde(default, rename = "unavailable")]
    pub unavailabilities: Vec<(Tick, Tick)>,
}

impl Technician {
    pub fn has_skill(&self, skill: &str) -> bool {
        self.skills.iter().any(|s| s == skill)
    }

    /// Unavailability windows merged into disjoint sorted intervals.
    pub fn merged_unavailabilities(&self) -> Vec<(Tick, Tick)> {
        let mut windows = self.unavailabilities.clone();
        windows.sort_unstable();
        let mut merged: Vec<(Tick, Tick)> = Vec::with_capacity(windows.len());
        for (s, e) in windows {
            match merged.last_mut() {
                Some(last) if s <= last.1 => last.1 = last.1.max(e),
                _ => merged.push((s, e)),
            }
        }
        merged
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Location {
    pub id: LocationId,
    /// `None` means unbounded.
    #[serde(default)]
    pub capacity: Option<u32>,
    #[serde(default)]
    pub zone: Option<Zone>,
}

/// A full problem input.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Instance {
    pub name: String,
    #[serde(rename = "balanceAF")]
    pub balance_af: MassKg,
    #[serde(rename = "balanceLR")]
    pub balance_lr: MassKg,
    pub locations: Vec<Location>,
    pub technicians: Vec<Technician>,
    pub tasks: Vec<Task>,
}

/// Which constraint families to skip during validation and search.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelaxFlags {
    #[serde(default)]
    pub drop_requirements: bool,
    #[serde(default)]
    pub drop_capacity: bool,
    #[serde(default)]
    pub drop_balance: bool,
}

impl RelaxFlags {
    pub const NONE: RelaxFlags = RelaxFlags {
        drop_requirements: false,
        drop_capacity: false,
        drop_balance: false,
    };

    pub const ALL: RelaxFlags = RelaxFlags {
        drop_requirements: true,
        drop_capacity: true,
        drop_balance: true,
    };
}

/// A candidate solution: per-task start time and assigned technician set.
/// Feasibility is the validator's job, not a type invariant.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Schedule {
    /// Keyed by task id; ordered for stable serialization.
    pub entries: BTreeMap<TaskId, ScheduleEntry>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScheduleEntry {
    pub start: Tick,
    pub techs: BTreeSet<TechId>,
}

#[derive(Serialize, Deserialize)]
struct ScheduleEntryJson {
    task: String,
    start: Tick,
    techs: Vec<String>,
}

#[derive(Serialize, Deserialize)]
struct ScheduleJson {
    entries: Vec<ScheduleEntryJson>,
}

impl Schedule {
    pub fn insert(&mut self, task: impl Into<TaskId>, start: Tick, techs: &[&str]) {
        self.entries.insert(
            task.into(),
            ScheduleEntry {
                start,
                techs: techs.iter().map(|t| t.to_string()).collect(),
            },
        );
    }

    pub fn to_json(&self) -> String {
        let entries = self
            .entries
            .iter()
            .map(|(task, e)| ScheduleEntryJson {
                task: task.clone(),
                start: e.start,
                techs: e.techs.iter().cloned().collect(),
            })
            .collect();
        serde_json::to_string_pretty(&ScheduleJson { entries }).expect("schedule serialization")
    }

    pub fn from_json(text: &str) -> Result<Schedule, ModelError> {
        let raw: ScheduleJson = serde_json::from_str(text)?;
        let mut schedule = Schedule::default();
        for e in raw.entries {
            if e.start < 0 {
                return Err(ModelError::Validation(format!(
                    "task {} has negative start {}",
                    e.task, e.start
                )));
            }
            schedule.entries.insert(
                e.task,
                ScheduleEntry {
                    start: e.start,
                    techs: e.techs.into_iter().collect(),
                },
            );
        }
        Ok(schedule)
    }
}

impl Instance {
    pub fn task(&self, id: &str) -> Option<&Task> {
        self.tasks.iter().find(|t| t.id == id)
    }

    pub fn technician(&self, id: &str) -> Option<&Technician> {
        self.technicians.iter().find(|t| t.id == id)
    }

    pub fn location(&self, id: &str) -> Option<&Location> {
        self.locations.iter().find(|l| l.id == id)
    }

    /// Zone of a task, if its location has one.
    pub fn task_zone(&self, task: &Task) -> Option<Zone> {
        task.location
            .as_deref()
            .and_then(|l| self.location(l))
            .and_then(|l| l.zone)
    }

    /// Balance tolerance of an axis.
    pub fn band(&self, axis: Axis) -> MassKg {
        match axis {
            Axis::AftFwd => self.balance_af,
            Axis::LeftRight => self.balance_lr,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("instance serialization")
    }

    /// Checks all structural invariants: unique ids, resolved references,
    /// acyclic precedences, positive durations and tolerances.
    pub fn check_invariants(&self) -> Result<(), ModelError> {
        let err = |msg: String| Err(ModelError::Validation(msg));
        if self.balance_af <= 0 || self.balance_lr <= 0 {
            return err("balance tolerances must be positive".into());
        }
        let mut task_ids = HashSet::new();
        for t in &self.tasks {
            if !task_ids.insert(t.id.as_str()) {
                return err(format!("duplicate task id {}", t.id));
            }
        }
        let mut loc_ids = HashSet::new();
        for l in &self.locations {
            if !loc_ids.insert(l.id.as_str()) {
                return err(format!("duplicate location id {}", l.id));
            }
            if l.capacity == Some(0) {
                return err(format!("location {} has zero capacity", l.id));
            }
        }
        let mut tech_ids = HashSet::new();
        for t in &self.technicians {
            if !tech_ids.insert(t.id.as_str()) {
                return err(format!("duplicate technician id {}", t.id));
            }
            for &(s, e) in &t.unavailabilities {
                if s >= e {
                    return err(format!(
                        "technician {} has empty unavailability window [{s}, {e})",
                        t.id
                    ));
                }
            }
        }
        for t in &self.tasks {
            if t.duration < 1 {
                return err(format!("task {} has nonpositive duration", t.id));
            }
            if t.crew < 1 {
                return err(format!("task {} has empty crew", t.id));
            }
            if t.mass < 0 {
                return err(format!("task {} has negative mass", t.id));
            }
            if let Some(l) = &t.location {
                if !loc_ids.contains(l.as_str()) {
                    return err(format!("task {} references unknown location {l}", t.id));
                }
            }
            for p in &t.precedences {
                if !task_ids.contains(p.as_str()) {
                    return err(format!("task {} references unknown precedence {p}", t.id));
                }
            }
            for r in &t.requirements {
                if r.count == 0 {
                    return err(format!("task {} has zero-count requirement", t.id));
                }
                if r.count > t.crew {
                    return err(format!(
                        "task {} requires {} x {} but has crew {}",
                        t.id, r.count, r.skill, t.crew
                    ));
                }
            }
        }
        self.topological_order()
            .map(|_| ())
            .map_err(|cycle| ModelError::Validation(format!("cyclic precedences involving {cycle}")))
    }

    /// Task ids in a precedence-respecting order, or a task on a cycle.
    pub fn topological_order(&self) -> Result<Vec<&TaskId>, TaskId> {
        let index: HashMap<&str, usize> = self
            .tasks
            .iter()
            .enumerate()
            .map(|(i, t)| (t.id.as_str(), i))
            .collect();
        let mut indegree = vec![0usize; self.tasks.len()];
        let mut successors: Vec<Vec<usize>> = vec![Vec::new(); self.tasks.len()];
        for (i, t) in self.tasks.iter().enumerate() {
            for p in &t.precedences {
                let pi = index[p.as_str()];
                successors[pi].push(i);
                indegree[i] += 1;
            }
        }
        let mut ready: Vec<usize> = (0..self.tasks.len()).filter(|&i| indegree[i] == 0).collect();
        let mut order = Vec::with_capacity(self.tasks.len());
        while let Some(i) = ready.pop() {
            order.push(&self.tasks[i].id);
            for &s in &successors[i] {
                indegree[s] -= 1;
                if indegree[s] == 0 {
                    ready.push(s);
                }
            }
        }
        if order.len() == self.tasks.len() {
            Ok(order)
        } else {
            let stuck = indegree.iter().position(|&d| d > 0).unwrap();
            Err(self.tasks[stuck].id.clone())
        }
    }
}

/// Parses and validates an instance from its JSON document.
pub fn load_instance(text: &str) -> Result<Instance, ModelError> {
    let instance: Instance = serde_json::from_str(text)?;
    instance.check_invariants()?;
    Ok(instance)
}

/// Planning horizon: the sum of all task durations.
pub fn horizon(instance: &Instance) -> Tick {
    instance.tasks.iter().map(|t| t.duration).sum()
}

/// Latest unavailability end over all technicians (0 when there is none).
pub fn latest_unavailability_end(instance: &Instance) -> Tick {
    instance
        .technicians
        .iter()
        .flat_map(|t| t.unavailabilities.iter().map(|&(_, e)| e))
        .max()
        .unwrap_or(0)
}

/// Keeps exactly `n` tasks drawn by the seeded generator. Surviving
/// successors of a removed task inherit its surviving predecessors
/// (transitive closure through removed tasks). Technicians and locations
/// are unchanged; the name gets a `-n` suffix.
pub fn subsample(instance: &Instance, n: usize, seed: u64) -> Result<Instance, ModelError> {
    if n > instance.tasks.len() {
        return Err(ModelError::CountOutOfRange {
            n,
            max: instance.tasks.len(),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut ids: Vec<&str> = instance.tasks.iter().map(|t| t.id.as_str()).collect();
    ids.shuffle(&mut rng);
    let kept: HashSet<&str> = ids.into_iter().take(n).collect();

    let by_id: HashMap<&str, &Task> = instance.tasks.iter().map(|t| (t.id.as_str(), t)).collect();
    // surviving predecessors of a task, walking through removed ones
    let surviving_preds = |task: &Task| -> BTreeSet<TaskId> {
        let mut out = BTreeSet::new();
        let mut stack: Vec<&str> = task.precedences.iter().map(|p| p.as_str()).collect();
        let mut seen: HashSet<&str> = stack.iter().copied().collect();
        while let Some(p) = stack.pop() {
            if kept.contains(p) {
                out.insert(p.to_string());
            } else {
                for q in &by_id[p].precedences {
                    if seen.insert(q.as_str()) {
                        stack.push(q.as_str());
                    }
                }
            }
        }
        out
    };

    let tasks = instance
        .tasks
        .iter()
        .filter(|t| kept.contains(t.id.as_str()))
        .map(|t| Task {
            precedences: surviving_preds(t).into_iter().collect(),
            ..t.clone()
        })
        .collect();

    let sub = Instance {
        name: format!("{}-{}", instance.name, n),
        tasks,
        ..instance.clone()
    };
    sub.check_invariants()?;
    Ok(sub)
}
