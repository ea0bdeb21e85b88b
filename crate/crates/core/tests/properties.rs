//! Randomized cross-checks between the solvers, the validator and the
//! independent per-tick oracle.

mod common;

use common::{oracle_kinds, validator_kinds};

use adsched::generator::{random_instance, GenParams};
use adsched::model::{subsample, RelaxFlags, Schedule, ScheduleEntry};
use adsched::solve::{lns_solve, sgs, SolveParams};
use adsched::validate::validate;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn corpus(count: u64, tasks: usize) -> impl Iterator<Item = adsched::model::Instance> {
    (0..count).map(move |seed| {
        random_instance(&GenParams {
            tasks,
            technicians: 4,
            locations: 4,
            max_duration: 4,
            max_crew: 3,
            mass_prob: 0.3,
            seed,
            ..GenParams::default()
        })
    })
}

#[test]
fn sgs_output_always_validates() {
    for inst in corpus(100, 10) {
        let priority: Vec<String> = inst.tasks.iter().map(|t| t.id.clone()).collect();
        match sgs(&inst, &priority, 0, RelaxFlags::NONE) {
            Ok(s) => {
                let report = validate(&inst, &s, RelaxFlags::NONE);
                assert!(report.feasible(), "{}: {}", inst.name, report.summary());
            }
            Err(_) => {} // construction may stall; it must never lie
        }
    }
}

#[test]
fn lns_output_always_validates_under_its_relaxation() {
    let variants = [
        RelaxFlags::NONE,
        RelaxFlags {
            drop_requirements: true,
            ..RelaxFlags::NONE
        },
        RelaxFlags {
            drop_capacity: true,
            ..RelaxFlags::NONE
        },
        RelaxFlags {
            drop_balance: true,
            ..RelaxFlags::NONE
        },
        RelaxFlags::ALL,
    ];
    for (k, inst) in corpus(40, 8).enumerate() {
        let relax = variants[k % variants.len()];
        let params = SolveParams {
            time_limit_seconds: 10.0,
            max_iterations: Some(40),
            relax,
            seed: k as u64,
            ..SolveParams::default()
        };
        if let Ok((s, log)) = lns_solve(&inst, &params) {
            let report = validate(&inst, &s, relax);
            assert!(report.feasible(), "{}: {}", inst.name, report.summary());
            assert!(log.final_objective().is_some());
        }
    }
}

#[test]
fn validator_agrees_with_per_tick_oracle_on_perturbed_schedules() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let mut checked = 0;
    for inst in corpus(60, 6) {
        let params = SolveParams {
            time_limit_seconds: 5.0,
            max_iterations: Some(10),
            ..SolveParams::default()
        };
        let Ok((s, _)) = lns_solve(&inst, &params) else {
            continue;
        };
        // the feasible schedule and three random corruptions of it
        let mut variants: Vec<Schedule> = vec![s.clone()];
        for _ in 0..3 {
            let mut broken = s.clone();
            let victim = rng.gen_range(0..inst.tasks.len());
            let id = inst.tasks[victim].id.clone();
            let entry = broken.entries.get_mut(&id).unwrap();
            match rng.gen_range(0..3) {
                0 => entry.start = rng.gen_range(0..30),
                1 => {
                    // drop one technician from the crew
                    let tech = entry.techs.iter().next().cloned();
                    if let Some(t) = tech {
                        entry.techs.remove(&t);
                    }
                }
                _ => {
                    let j = &inst.technicians[rng.gen_range(0..inst.technicians.len())].id;
                    let start = entry.start;
                    let techs = entry.techs.clone();
                    broken.entries.insert(
                        id.clone(),
                        ScheduleEntry {
                            start,
                            techs: techs.into_iter().chain([j.clone()]).collect(),
                        },
                    );
                }
            }
            variants.push(broken);
        }
        for v in variants {
            assert_eq!(
                validator_kinds(&inst, &v),
                oracle_kinds(&inst, &v),
                "{}: validator and oracle disagree",
                inst.name
            );
            checked += 1;
        }
    }
    assert!(checked >= 200, "only {checked} schedules checked");
}

#[test]
fn subsampled_instances_keep_invariants_and_inherit_precedences() {
    for inst in corpus(30, 12) {
        let sub = subsample(&inst, 5, 7).unwrap();
        sub.check_invariants().unwrap();
        assert_eq!(sub.tasks.len(), 5);
        for t in &sub.tasks {
            let orig = inst.task(&t.id).unwrap();
            assert_eq!(t.duration, orig.duration);
            // kept precedences connect kept tasks only
            for p in &t.precedences {
                assert!(sub.task(p).is_some());
            }
        }
    }
}

#[test]
fn relaxed_validation_accepts_fully_feasible_schedules() {
    let variants = [
        RelaxFlags {
            drop_requirements: true,
            ..RelaxFlags::NONE
        },
        RelaxFlags {
            drop_capacity: true,
            ..RelaxFlags::NONE
        },
        RelaxFlags {
            drop_balance: true,
            ..RelaxFlags::NONE
        },
        RelaxFlags::ALL,
    ];
    for inst in corpus(40, 8) {
        let params = SolveParams {
            time_limit_seconds: 5.0,
            max_iterations: Some(10),
            ..SolveParams::default()
        };
        let Ok((s, _)) = lns_solve(&inst, &params) else {
            continue;
        };
        assert!(validate(&inst, &s, RelaxFlags::NONE).feasible());
        for relax in variants {
            assert!(
                validate(&inst, &s, relax).feasible(),
                "{}: relaxation rejected a fully feasible schedule",
                inst.name
            );
        }
    }
}
