//! Feasibility checking of schedules and explanatory violation reports.
//!
//! A schedule is feasible when every instance task is scheduled, crews have
//! the right size, no technician works two tasks at once or during an
//! unavailability, precedences hold, skill requirements are covered,
//! bounded locations are never over-occupied, and both mass-balance
//! profiles stay inside their tolerance bands. The capacity, requirement
//! and balance families can be switched off through [`RelaxFlags`].

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{Axis, Instance, RelaxFlags, Schedule, TaskId, Tick};
use crate::profile::StepProfile;

/// Hard cap on report size so diagnostics on degenerate inputs stay bounded.
const MAX_VIOLATIONS: usize = 10_000;

#[derive(Debug, Error)]
pub enum ValidateError {
    #[error("unknown reference: {0}")]
    UnknownReference(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ViolationKind {
    CrewSize,
    TechOverlap,
    TechUnavailable,
    PrecedenceBroken,
    RequirementUnmet,
    CapacityExceeded,
    BalanceAF,
    BalanceLR,
    UnknownReference,
    TaskUnscheduled,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub kind: ViolationKind,
    /// Task, technician or location id the violation is about.
    pub subject: String,
    /// Time witness; always present for capacity and balance violations.
    pub time: Option<Tick>,
    pub detail: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?} [{}]", self.kind, self.subject)?;
        if let Some(t) = self.time {
            write!(f, " at t={t}")?;
        }
        write!(f, ": {}", self.detail)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ViolationReport {
    pub violations: Vec<Violation>,
}

impl ViolationReport {
    pub fn feasible(&self) -> bool {
        self.violations.is_empty()
    }

    /// One JSON object per line.
    pub fn to_json_lines(&self) -> String {
        self.violations
            .iter()
            .map(|v| serde_json::to_string(v).expect("violation serialization"))
            .collect::<Vec<_>>()
            .join("\n")
    }

    pub fn summary(&self) -> String {
        if self.feasible() {
            return "feasible".to_string();
        }
        let mut by_kind: Vec<(ViolationKind, usize)> = Vec::new();
        for v in &self.violations {
            match by_kind.iter_mut().find(|(k, _)| *k == v.kind) {
                Some((_, n)) => *n += 1,
                None => by_kind.push((v.kind, 1)),
            }
        }
        let kinds = by_kind
            .iter()
            .map(|(k, n)| format!("{k:?} x{n}"))
            .collect::<Vec<_>>()
            .join(", ");
        format!("infeasible: {} violation(s) ({kinds})", self.violations.len())
    }
}

/// End time of the latest-finishing scheduled task (0 for an empty schedule).
pub fn makespan(schedule: &Schedule, instance: &Instance) -> Result<Tick, ValidateError> {
    let mut max = 0;
    for (id, entry) in &schedule.entries {
        let task = instance
            .task(id)
            .ok_or_else(|| ValidateError::UnknownReference(id.clone()))?;
        max = max.max(entry.start + task.duration);
    }
    Ok(max)
}

/// Number of technicians working at `location` over time: the sum of
/// `pulse(start, end, crew)` over the scheduled tasks placed there.
pub fn occupancy_profile(
    instance: &Instance,
    schedule: &Schedule,
    location: &str,
) -> Result<StepProfile, ValidateError> {
    instance
        .location(location)
        .ok_or_else(|| ValidateError::UnknownReference(location.to_string()))?;
    let mut profile = StepProfile::new();
    for (id, entry) in &schedule.entries {
        if let Some(task) = instance.task(id) {
            if task.location.as_deref() == Some(location) {
                profile
                    .pulse(entry.start, entry.start + task.duration, task.crew as i64)
                    .expect("task durations are positive");
            }
        }
    }
    Ok(profile)
}

/// Signed mass difference along `axis`: a permanent step of `+mass` at the
/// start of every Aft/Left task and `-mass` for Fwd/Right. The feasibility
/// band on this profile is the symmetric `[-B, +B]`.
pub fn balance_profile(instance: &Instance, schedule: &Schedule, axis: Axis) -> StepProfile {
    let mut profile = StepProfile::new();
    for (id, entry) in &schedule.entries {
        let Some(task) = instance.task(id) else { continue };
        if task.mass == 0 {
            continue;
        }
        if let Some(zone) = instance.task_zone(task) {
            let (zone_axis, sign) = zone.axis_sign();
            if zone_axis == axis {
                profile.step_at(entry.start, sign * task.mass);
            }
        }
    }
    profile
}

/// Checks a schedule against all constraints (minus the relaxed families)
/// and lists every violated constraint instance, capped at 10,000 entries.
pub fn validate(instance: &Instance, schedule: &Schedule, relax: RelaxFlags) -> ViolationReport {
    let mut report = ViolationReport::default();
    let push = |report: &mut ViolationReport, v: Violation| {
        if report.violations.len() < MAX_VIOLATIONS {
            report.violations.push(v);
        }
    };

    // resolve references up front; dangling entries are skipped afterwards
    let mut resolved: Vec<(&TaskId, &crate::model::ScheduleEntry, &crate::model::Task)> =
        Vec::with_capacity(schedule.entries.len());
    for (id, entry) in &schedule.entries {
        match instance.task(id) {
            Some(task) => {
                let mut ok = true;
                for tech in &entry.techs {
                    if instance.technician(tech).is_none() {
                        push(
                            &mut report,
                            Violation {
                                kind: ViolationKind::UnknownReference,
                                subject: tech.clone(),
                                time: None,
                                detail: format!("task {id} assigned to unknown technician {tech}"),
                            },
                        );
                        ok = false;
                    }
                }
                if ok {
                    resolved.push((id, entry, task));
                }
            }
            None => push(
                &mut report,
                Violation {
                    kind: ViolationKind::UnknownReference,
                    subject: id.clone(),
                    time: None,
                    detail: "scheduled task does not exist in the instance".to_string(),
                },
            ),
        }
    }

    // completeness: every instance task must be scheduled
    for task in &instance.tasks {
        if !schedule.entries.contains_key(&task.id) {
            push(
                &mut report,
                Violation {
                    kind: ViolationKind::TaskUnscheduled,
                    subject: task.id.clone(),
                    time: None,
                    detail: "task is missing from the schedule".to_string(),
                },
            );
        }
    }

    let ends: HashMap<&str, Tick> = resolved
        .iter()
        .map(|(id, entry, task)| (id.as_str(), entry.start + task.duration))
        .collect();

    // (1) crew size
    for (id, entry, task) in &resolved {
        if entry.techs.len() != task.crew as usize {
            push(
                &mut report,
                Violation {
                    kind: ViolationKind::CrewSize,
                    subject: (*id).clone(),
                    time: Some(entry.start),
                    detail: format!(
                        "assigned {} technician(s), task needs exactly {}",
                        entry.techs.len(),
                        task.crew
                    ),
                },
            );
        }
    }

    // (2) + (3) per-technician disjointness and unavailabilities
    let mut per_tech: HashMap<&str, Vec<(Tick, Tick, &str)>> = HashMap::new();
    for (id, entry, task) in &resolved {
        for tech in &entry.techs {
            per_tech
                .entry(tech.as_str())
                .or_default()
                .push((entry.start, entry.start + task.duration, id.as_str()));
        }
    }
    for tech in &instance.technicians {
        let Some(intervals) = per_tech.get_mut(tech.id.as_str()) else { continue };
        intervals.sort_unstable();
        for w in intervals.windows(2) {
            let (s1, e1, t1) = w[0];
            let (s2, _, t2) = w[1];
            if s2 < e1 {
                push(
                    &mut report,
                    Violation {
                        kind: ViolationKind::TechOverlap,
                        subject: tech.id.clone(),
                        time: Some(s2),
                        detail: format!("tasks {t1} [{s1},{e1}) and {t2} overlap"),
                    },
                );
            }
        }
        for &(s, e, task) in intervals.iter() {
            for &(us, ue) in &tech.merged_unavailabilities() {
                if s < ue && us < e {
                    push(
                        &mut report,
                        Violation {
                            kind: ViolationKind::TechUnavailable,
                            subject: tech.id.clone(),
                            time: Some(s.max(us)),
                            detail: format!(
                                "task {task} [{s},{e}) intersects unavailability [{us},{ue})"
                            ),
                        },
                    );
                }
            }
        }
    }

    // (4) precedences
    for (id, entry, task) in &resolved {
        for p in &task.precedences {
            if let Some(&pred_end) = ends.get(p.as_str()) {
                if pred_end > entry.start {
                    push(
                        &mut report,
                        Violation {
                            kind: ViolationKind::PrecedenceBroken,
                            subject: (*id).clone(),
                            time: Some(entry.start),
                            detail: format!(
                                "predecessor {p} ends at {pred_end}, after start {}",
                                entry.start
                            ),
                        },
                    );
                }
            }
        }
    }

    // (5) skill requirements
    if !relax.drop_requirements {
        for (id, entry, task) in &resolved {
            for req in &task.requirements {
                let holders = entry
                    .techs
                    .iter()
                    .filter_map(|t| instance.technician(t))
                    .filter(|t| t.has_skill(&req.skill))
                    .count();
                if holders < req.count as usize {
                    push(
                        &mut report,
                        Violation {
                            kind: ViolationKind::RequirementUnmet,
                            subject: (*id).clone(),
                            time: Some(entry.start),
                            detail: format!(
                                "requirement {} x{} covered by only {holders} assigned technician(s)",
                                req.skill, req.count
                            ),
                        },
                    );
                }
            }
        }
    }

    // (6) location capacities
    if !relax.drop_capacity {
        for location in &instance.locations {
            let Some(capacity) = location.capacity else { continue };
            let profile = occupancy_profile(instance, schedule, &location.id)
                .expect("location comes from the instance");
            let mut value = 0i64;
            for &(t, d) in profile.deltas() {
                value += d;
                if value > capacity as i64 {
                    push(
                        &mut report,
                        Violation {
                            kind: ViolationKind::CapacityExceeded,
                            subject: location.id.clone(),
                            time: Some(t),
                            detail: format!("occupancy {value} exceeds capacity {capacity}"),
                        },
                    );
                }
            }
        }
    }

    // (7) + (8) balance bands
    if !relax.drop_balance {
        for (axis, kind, name) in [
            (Axis::AftFwd, ViolationKind::BalanceAF, "aft/fwd"),
            (Axis::LeftRight, ViolationKind::BalanceLR, "left/right"),
        ] {
            let band = instance.band(axis);
            let profile = balance_profile(instance, schedule, axis);
            let mut value = 0i64;
            for &(t, d) in profile.deltas() {
                value += d;
                if value.abs() > band {
                    push(
                        &mut report,
                        Violation {
                            kind,
                            subject: name.to_string(),
                            time: Some(t),
                            detail: format!("{name} mass difference {value} outside [-{band}, {band}]"),
                        },
                    );
                }
            }
        }
    }

    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Location, Requirement, Task, Technician, Zone};

    fn tiny_instance() -> Instance {
        Instance {
            name: "tiny".into(),
            balance_af: 300,
            balance_lr: 500,
            locations: vec![
                Location {
                    id: "bay".into(),
                    capacity: Some(1),
                    zone: None,
                },
                Location {
                    id: "lwing".into(),
                    capacity: None,
                    zone: Some(Zone::Left),
                },
            ],
            technicians: vec![
                Technician {
                    id: "j1".into(),
                    skills: vec!["B1".into()],
                    unavailabilities: vec![(0, 2)],
                },
                Technician {
                    id: "j2".into(),
                    skills: vec![],
                    unavailabilities: vec![],
                },
            ],
            tasks: vec![
                Task {
                    id: "a".into(),
                    duration: 3,
                    location: Some("bay".into()),
                    crew: 1,
                    mass: 0,
                    precedences: vec![],
                    requirements: vec![Requirement {
                        skill: "B1".into(),
                        count: 1,
                    }],
                },
                Task {
                    id: "b".into(),
                    duration: 2,
                    location: Some("lwing".into()),
                    crew: 1,
                    mass: 400,
                    precedences: vec!["a".into()],
                    requirements: vec![],
                },
            ],
        }
    }

    fn ok_schedule() -> Schedule {
        let mut s = Schedule::default();
        s.insert("a", 2, &["j1"]);
        s.insert("b", 5, &["j2"]);
        s
    }

    fn kinds(report: &ViolationReport) -> Vec<ViolationKind> {
        let mut ks: Vec<ViolationKind> = report.violations.iter().map(|v| v.kind).collect();
        ks.sort();
        ks.dedup();
        ks
    }

    #[test]
    fn feasible_schedule_passes() {
        let inst = tiny_instance();
        let report = validate(&inst, &ok_schedule(), RelaxFlags::NONE);
        assert!(report.feasible(), "{}", report.to_json_lines());
        assert_eq!(makespan(&ok_schedule(), &inst).unwrap(), 7);
    }

    #[test]
    fn makespan_empty_and_single() {
        let inst = tiny_instance();
        assert_eq!(makespan(&Schedule::default(), &inst).unwrap(), 0);
        let mut s = Schedule::default();
        s.insert("a", 3, &["j1"]);
        assert_eq!(makespan(&s, &inst).unwrap(), 6);
        let mut bad = Schedule::default();
        bad.insert("zz", 0, &[]);
        assert!(makespan(&bad, &inst).is_err());
    }

    #[test]
    fn incomplete_schedule_is_infeasible() {
        let inst = tiny_instance();
        let mut s = ok_schedule();
        s.entries.remove("b");
        let report = validate(&inst, &s, RelaxFlags::NONE);
        assert_eq!(kinds(&report), vec![ViolationKind::TaskUnscheduled]);
    }

    #[test]
    fn crew_size_mismatch() {
        let inst = tiny_instance();
        let mut s = ok_schedule();
        s.insert("b", 5, &["j1", "j2"]);
        let report = validate(&inst, &s, RelaxFlags::NONE);
        assert!(kinds(&report).contains(&ViolationKind::CrewSize));
    }

    #[test]
    fn tech_overlap_detected() {
        let inst = tiny_instance();
        let mut s = Schedule::default();
        s.insert("a", 2, &["j1"]);
        s.insert("b", 4, &["j1"]); // a runs [2,5), b [4,6)
        let report = validate(&inst, &s, RelaxFlags::NONE);
        assert!(kinds(&report).contains(&ViolationKind::TechOverlap));
    }

    #[test]
    fn unavailability_is_half_open() {
        let inst = tiny_instance();
        // j1 unavailable on [0,2): starting exactly at 2 is fine,
        // starting at 1 is not
        let mut s = ok_schedule();
        s.insert("a", 1, &["j1"]);
        s.insert("b", 4, &["j2"]);
        let report = validate(&inst, &s, RelaxFlags::NONE);
        assert!(kinds(&report).contains(&ViolationKind::TechUnavailable));
        assert!(!kinds(&report).contains(&ViolationKind::PrecedenceBroken));
    }

    #[test]
    fn precedence_broken() {
        let inst = tiny_instance();
        let mut s = ok_schedule();
        s.insert("b", 4, &["j2"]); // a ends at 5
        let report = validate(&inst, &s, RelaxFlags::NONE);
        assert!(kinds(&report).contains(&ViolationKind::PrecedenceBroken));
    }

    #[test]
    fn requirement_unmet_and_relaxed() {
        let inst = tiny_instance();
        let mut s = Schedule::default();
        s.insert("a", 2, &["j2"]); // j2 holds no skill
        s.insert("b", 5, &["j1"]);
        let report = validate(&inst, &s, RelaxFlags::NONE);
        assert!(kinds(&report).contains(&ViolationKind::RequirementUnmet));
        let relaxed = validate(
            &inst,
            &s,
            RelaxFlags {
                drop_requirements: true,
                ..RelaxFlags::NONE
            },
        );
        assert!(relaxed.feasible(), "{}", relaxed.to_json_lines());
    }

    #[test]
    fn capacity_exceeded_and_relaxed() {
        let mut inst = tiny_instance();
        inst.tasks[1].location = Some("bay".into());
        inst.tasks[1].precedences.clear();
        let mut s = Schedule::default();
        s.insert("a", 2, &["j1"]);
        s.insert("b", 3, &["j2"]); // both in "bay" (capacity 1) over [3,5)
        let report = validate(&inst, &s, RelaxFlags::NONE);
        let caps: Vec<&Violation> = report
            .violations
            .iter()
            .filter(|v| v.kind == ViolationKind::CapacityExceeded)
            .collect();
        assert!(!caps.is_empty());
        assert!(caps.iter().all(|v| v.time.is_some()));
        let relaxed = validate(
            &inst,
            &s,
            RelaxFlags {
                drop_capacity: true,
                ..RelaxFlags::NONE
            },
        );
        assert!(relaxed.feasible());
    }

    #[test]
    fn balance_violation_detected() {
        let mut inst = tiny_instance();
        inst.tasks[1].mass = 600; // band is 500
        let s = ok_schedule();
        let report = validate(&inst, &s, RelaxFlags::NONE);
        let lr: Vec<&Violation> = report
            .violations
            .iter()
            .filter(|v| v.kind == ViolationKind::BalanceLR)
            .collect();
        assert_eq!(lr.len(), 1);
        assert_eq!(lr[0].time, Some(5));
        let relaxed = validate(
            &inst,
            &s,
            RelaxFlags {
                drop_balance: true,
                ..RelaxFlags::NONE
            },
        );
        assert!(relaxed.feasible());
    }

    #[test]
    fn occupancy_profile_shapes() {
        let inst = tiny_instance();
        let s = ok_schedule();
        let p = occupancy_profile(&inst, &s, "bay").unwrap();
        assert_eq!(p.value_at(2), 1);
        assert_eq!(p.value_at(5), 0);
        assert!(occupancy_profile(&inst, &s, "nowhere").is_err());
        let empty = occupancy_profile(&inst, &Schedule::default(), "bay").unwrap();
        assert!(empty.is_empty());
    }

    #[test]
    fn balance_profile_signs() {
        let inst = tiny_instance();
        let s = ok_schedule();
        let lr = balance_profile(&inst, &s, Axis::LeftRight);
        assert_eq!(lr.value_at(5), 400);
        let af = balance_profile(&inst, &s, Axis::AftFwd);
        assert!(af.is_empty());
    }

    #[test]
    fn unknown_references_reported() {
        let inst = tiny_instance();
        let mut s = ok_schedule();
        s.insert("ghost", 0, &["j1"]);
        s.insert("b", 5, &["who"]);
        let report = validate(&inst, &s, RelaxFlags::NONE);
        let unknown: Vec<&Violation> = report
            .violations
            .iter()
            .filter(|v| v.kind == ViolationKind::UnknownReference)
            .collect();
        assert_eq!(unknown.len(), 2);
    }
}
