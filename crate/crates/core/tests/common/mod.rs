//! Shared test helpers: fixture loading and an independent per-tick
//! brute-force feasibility oracle, deliberately written against the raw
//! definitions (scan every tick) rather than the library's interval and
//! profile machinery.
#![allow(dead_code)] // each test target uses a different subset

use std::collections::BTreeSet;

use adsched::model::{Instance, Schedule, Tick};
use adsched::validate::ViolationKind;

pub fn fixture(name: &str) -> String {
    let path = format!("{}/tests/fixtures/{name}", env!("CARGO_MANIFEST_DIR"));
    std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("read {path}: {e}"))
}

pub fn golden_instance() -> Instance {
    adsched::model::load_instance(&fixture("example.json")).expect("golden instance parses")
}

pub fn golden_solution() -> Schedule {
    Schedule::from_json(&fixture("example-sol.json")).expect("golden solution parses")
}

/// Every violation kind present in `schedule`, found by scanning all ticks.
pub fn oracle_kinds(instance: &Instance, schedule: &Schedule) -> BTreeSet<ViolationKind> {
    let mut kinds = BTreeSet::new();
    let end = schedule
        .entries
        .iter()
        .filter_map(|(id, e)| instance.task(id).map(|t| e.start + t.duration))
        .max()
        .unwrap_or(0);

    for task in &instance.tasks {
        let Some(entry) = schedule.entries.get(&task.id) else {
            kinds.insert(ViolationKind::TaskUnscheduled);
            continue;
        };
        if entry.techs.len() != task.crew as usize {
            kinds.insert(ViolationKind::CrewSize);
        }
        for req in &task.requirements {
            let holders = entry
                .techs
                .iter()
                .filter(|j| {
                    instance
                        .technician(j)
                        .is_some_and(|t| t.has_skill(&req.skill))
                })
                .count();
            if holders < req.count as usize {
                kinds.insert(ViolationKind::RequirementUnmet);
            }
        }
        for p in &task.precedences {
            let (Some(pe), Some(pt)) = (schedule.entries.get(p), instance.task(p)) else {
                continue;
            };
            if pe.start + pt.duration > entry.start {
                kinds.insert(ViolationKind::PrecedenceBroken);
            }
        }
    }

    let active = |task_id: &str, t: Tick| -> bool {
        let Some(entry) = schedule.entries.get(task_id) else {
            return false;
        };
        let Some(task) = instance.task(task_id) else {
            return false;
        };
        entry.start <= t && t < entry.start + task.duration
    };

    for t in 0..=end {
        // technician clashes and unavailability
        for tech in &instance.technicians {
            let jobs = instance
                .tasks
                .iter()
                .filter(|task| {
                    active(&task.id, t)
                        && schedule.entries[&task.id].techs.contains(&tech.id)
                })
                .count();
            if jobs > 1 {
                kinds.insert(ViolationKind::TechOverlap);
            }
            let unavailable = tech.unavailabilities.iter().any(|&(s, e)| s <= t && t < e);
            if jobs > 0 && unavailable {
                kinds.insert(ViolationKind::TechUnavailable);
            }
        }
        // location capacity
        for loc in &instance.locations {
            let Some(cap) = loc.capacity else { continue };
            let used: u32 = instance
                .tasks
                .iter()
                .filter(|task| {
                    task.location.as_deref() == Some(loc.id.as_str()) && active(&task.id, t)
                })
                .map(|task| task.crew)
                .sum();
            if used > cap {
                kinds.insert(ViolationKind::CapacityExceeded);
            }
        }
        // balance: the mass step lands at the start tick and never leaves
        let mut af = 0i64;
        let mut lr = 0i64;
        for task in &instance.tasks {
            let Some(entry) = schedule.entries.get(&task.id) else {
                continue;
            };
            if task.mass == 0 || entry.start > t {
                continue;
            }
            match instance.task_zone(task) {
                Some(adsched::model::Zone::Aft) => af += task.mass,
                Some(adsched::model::Zone::Fwd) => af -= task.mass,
                Some(adsched::model::Zone::Left) => lr += task.mass,
                Some(adsched::model::Zone::Right) => lr -= task.mass,
                None => {}
            }
        }
        if af.abs() > instance.balance_af {
            kinds.insert(ViolationKind::BalanceAF);
        }
        if lr.abs() > instance.balance_lr {
            kinds.insert(ViolationKind::BalanceLR);
        }
    }
    kinds
}

/// Violation kinds reported by the library validator, as a set.
pub fn validator_kinds(instance: &Instance, schedule: &Schedule) -> BTreeSet<ViolationKind> {
    adsched::validate::validate(instance, schedule, adsched::model::RelaxFlags::NONE)
        .violations
        .iter()
        .map(|v| v.kind)
        .collect()
}
