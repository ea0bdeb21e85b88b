//! Acceptance gate: one test per release criterion, each printing a
//! single machine-grepable pass/fail line. Run with
//! `cargo test --test acceptance -- --nocapture` to see the lines.

mod common;

use common::{golden_instance, golden_solution, oracle_kinds, validator_kinds};

use adsched::exact::{enumerate_optimum, exact_solve, ExactParams};
use adsched::generator::{random_instance, GenParams};
use adsched::metrics::{gap_curve, primal_gap, primal_integral, AnytimeLog};
use adsched::mip::{check_assignment, decode_solution, emit_ooe, encode_solution, extended_tasks};
use adsched::model::{horizon, latest_unavailability_end, Instance, RelaxFlags, Schedule};
use adsched::solve::{lns_solve, SolveParams};
use adsched::validate::{makespan, validate, ViolationKind};
use std::time::Instant;

fn verdict(criterion: u32, what: &str, outcome: Result<String, String>) {
    match outcome {
        Ok(detail) => println!("criterion {criterion} ({what}): PASS — {detail}"),
        Err(detail) => {
            println!("criterion {criterion} ({what}): FAIL — {detail}");
            panic!("criterion {criterion} failed: {detail}");
        }
    }
}

fn small_corpus(count: u64, params: GenParams) -> impl Iterator<Item = Instance> {
    (0..count).map(move |seed| random_instance(&GenParams { seed, ..params.clone() }))
}

#[test]
fn criterion_1_golden_example() {
    let run = || -> Result<String, String> {
        let inst = golden_instance();
        let sol = golden_solution();
        let report = validate(&inst, &sol, RelaxFlags::NONE);
        if !report.feasible() {
            return Err(format!("published solution rejected: {}", report.summary()));
        }
        let ms = makespan(&sol, &inst).map_err(|e| e.to_string())?;
        if ms != 16 {
            return Err(format!("published makespan {ms}, expected 16"));
        }
        let start = Instant::now();
        let res = exact_solve(&inst, &ExactParams::default());
        let elapsed = start.elapsed().as_secs_f64();
        if !res.proven || res.optimum != Some(16) {
            return Err(format!(
                "exact search: proven={}, optimum={:?}",
                res.proven, res.optimum
            ));
        }
        if elapsed >= 5.0 {
            return Err(format!("exact search took {elapsed:.2} s (budget 5 s)"));
        }
        Ok(format!(
            "solution feasible, makespan 16, optimum proven in {elapsed:.3} s"
        ))
    };
    verdict(1, "golden example", run());
}

#[test]
fn criterion_2_mutation_suite() {
    let run = || -> Result<String, String> {
        let inst = golden_instance();
        let sol = golden_solution();

        // (label, mutated instance, mutated schedule, expected kind)
        let mut cases: Vec<(&str, Instance, Schedule, ViolationKind)> = Vec::new();

        let mut s = sol.clone();
        s.insert("D", 7, &["1"]);
        cases.push(("D to tech 1", inst.clone(), s, ViolationKind::RequirementUnmet));

        let mut s = sol.clone();
        s.insert("B", 2, &["1", "3"]);
        cases.push(("B at 2", inst.clone(), s, ViolationKind::TechUnavailable));

        // stacking both thrusters on one wing doubles the mass swing past
        // the band; this replaces reordering E/F, which cannot break the
        // band because the compensating pair keeps the profile inside it
        // in either order
        let mut i = inst.clone();
        i.tasks.iter_mut().find(|t| t.id == "E").unwrap().location = Some("R.Wing".into());
        cases.push(("E on the right wing", i, sol.clone(), ViolationKind::BalanceLR));

        let mut i = inst.clone();
        i.locations
            .iter_mut()
            .find(|l| l.id == "Cockpit")
            .unwrap()
            .capacity = Some(1);
        cases.push(("cockpit capacity 1", i, sol.clone(), ViolationKind::CapacityExceeded));

        let mut s = sol.clone();
        s.insert("G", 12, &["3", "4"]);
        cases.push(("G short one tech", inst.clone(), s, ViolationKind::CrewSize));

        let mut s = sol.clone();
        s.insert("D", 6, &["3"]);
        cases.push(("D before C ends", inst.clone(), s, ViolationKind::PrecedenceBroken));

        for (label, i, s, expected) in &cases {
            let found = validator_kinds(i, s);
            if !found.contains(expected) {
                return Err(format!("{label}: expected {expected:?}, validator found {found:?}"));
            }
            let oracle = oracle_kinds(i, s);
            if found != oracle {
                return Err(format!(
                    "{label}: validator {found:?} != per-tick oracle {oracle:?}"
                ));
            }
        }
        Ok(format!(
            "{} mutations each flagged with the expected kind, matching the per-tick oracle",
            cases.len()
        ))
    };
    verdict(2, "mutation suite", run());
}

#[test]
fn criterion_3_heuristic_matches_exact_on_small_instances() {
    // stands in for the published small-instance targets: the dataset is
    // not shipped, so the heuristic is scored against proven optima on a
    // random corpus instead
    let run = || -> Result<String, String> {
        let params = GenParams {
            tasks: 6,
            technicians: 4,
            locations: 4,
            max_duration: 4,
            max_crew: 3,
            mass_prob: 0.2,
            ..GenParams::default()
        };
        let mut proven = 0u32;
        let mut matched = 0u32;
        for inst in small_corpus(200, params) {
            let res = exact_solve(&inst, &ExactParams::default());
            if !res.proven {
                continue;
            }
            let Some(opt) = res.optimum else {
                continue; // proven infeasible: nothing for the heuristic to match
            };
            proven += 1;
            let solve = SolveParams {
                time_limit_seconds: 10.0,
                max_iterations: Some(400),
                ..SolveParams::default()
            };
            let Ok((s, _)) = lns_solve(&inst, &solve) else {
                continue;
            };
            let ms = makespan(&s, &inst).map_err(|e| e.to_string())?;
            if ms < opt {
                return Err(format!(
                    "{}: heuristic makespan {ms} beats the proven optimum {opt}",
                    inst.name
                ));
            }
            if ms == opt {
                matched += 1;
            }
        }
        if proven < 100 {
            return Err(format!("only {proven} instances proven optimal; corpus too thin"));
        }
        let rate = matched as f64 / proven as f64;
        if rate < 0.95 {
            return Err(format!(
                "heuristic matched the optimum on {matched}/{proven} = {:.1}%, need 95%",
                rate * 100.0
            ));
        }
        Ok(format!(
            "heuristic matched the proven optimum on {matched}/{proven} instances ({:.1}%), never beat it",
            rate * 100.0
        ))
    };
    verdict(3, "optimality rate on small instances", run());
}

#[test]
fn criterion_4_large_instance_feasibility() {
    // stands in for the 1454-task industrial teardown: same scale, random
    // content. Feasibility gates; the makespan is reported only.
    let run = || -> Result<String, String> {
        let inst = random_instance(&GenParams {
            tasks: 1454,
            technicians: 24,
            locations: 12,
            max_duration: 8,
            max_crew: 4,
            seed: 1454,
            ..GenParams::default()
        });
        let params = SolveParams {
            time_limit_seconds: 120.0,
            max_iterations: Some(5),
            ..SolveParams::default()
        };
        let start = Instant::now();
        let (s, _) = lns_solve(&inst, &params).map_err(|e| e.to_string())?;
        let elapsed = start.elapsed().as_secs_f64();
        let report = validate(&inst, &s, RelaxFlags::NONE);
        if !report.feasible() {
            return Err(format!("schedule infeasible: {}", report.summary()));
        }
        let ms = makespan(&s, &inst).map_err(|e| e.to_string())?;
        Ok(format!(
            "1454-task schedule feasible in {elapsed:.1} s, makespan {ms} (reported, not gated)"
        ))
    };
    verdict(4, "large-instance feasibility", run());
}

#[test]
fn criterion_5_mip_round_trip() {
    let run = || -> Result<String, String> {
        let start = Instant::now();
        let golden = golden_instance();
        let mut cases: Vec<(Instance, Schedule)> = vec![(golden, golden_solution())];

        let params = GenParams {
            tasks: 4,
            technicians: 3,
            locations: 3,
            max_duration: 3,
            max_crew: 2,
            mass_prob: 0.2,
            ..GenParams::default()
        };
        let mut seed = 0u64;
        while cases.len() < 51 {
            let inst = random_instance(&GenParams { seed, ..params.clone() });
            seed += 1;
            let res = exact_solve(&inst, &ExactParams::default());
            if let Some(s) = res.best {
                cases.push((inst, s));
            }
            if seed > 500 {
                return Err("could not collect 50 solvable random instances".into());
            }
        }

        for (inst, sol) in &cases {
            let model = emit_ooe(inst, RelaxFlags::NONE);
            // closed-form variable counts: n' extended tasks, R technicians
            let n = extended_tasks(inst).len();
            let r = inst.technicians.len();
            let count = |p: &str| model.variables.iter().filter(|v| v.name.starts_with(p)).count();
            let expected = [
                ("z_", n * n),
                ("a_", n * n),
                ("x_", n * r),
                ("y_", n * n * r),
                ("t_", n + 1),
                ("b_", 2 * n),
            ];
            for (prefix, want) in expected {
                let got = count(prefix);
                if got != want {
                    return Err(format!(
                        "{}: {got} {prefix} variables, closed form says {want}",
                        inst.name
                    ));
                }
            }
            let enc = encode_solution(inst, sol).map_err(|e| format!("{}: {e}", inst.name))?;
            let violated = check_assignment(&model, &enc).map_err(|e| e.to_string())?;
            if !violated.is_empty() {
                return Err(format!(
                    "{}: encoded solution violates rows {:?}",
                    inst.name,
                    &violated[..violated.len().min(5)]
                ));
            }
            let back = decode_solution(inst, &model, &enc).map_err(|e| e.to_string())?;
            let (m1, m2) = (
                makespan(sol, inst).map_err(|e| e.to_string())?,
                makespan(&back, inst).map_err(|e| e.to_string())?,
            );
            if m1 != m2 {
                return Err(format!("{}: decode changed makespan {m1} -> {m2}", inst.name));
            }
        }
        let elapsed = start.elapsed().as_secs_f64();
        if elapsed >= 60.0 {
            return Err(format!("round trips took {elapsed:.1} s (budget 60 s)"));
        }
        Ok(format!(
            "{} instances round-tripped with exact variable counts and zero violated rows in {elapsed:.1} s",
            cases.len()
        ))
    };
    verdict(5, "linear-model round trip", run());
}

#[test]
fn criterion_6_metrics_arithmetic() {
    let run = || -> Result<String, String> {
        const EPS: f64 = 1e-9;
        let check = |label: &str, got: f64, want: f64| -> Result<(), String> {
            if (got - want).abs() < EPS {
                Ok(())
            } else {
                Err(format!("{label}: got {got}, want {want}"))
            }
        };
        // the four branches of the gap definition
        check("gap equal", primal_gap(64, 64), 0.0)?;
        check("gap ratio", primal_gap(64, 128), 0.5)?;
        check("gap sign mismatch", primal_gap(-5, 5), 1.0)?;
        check("gap both zero", primal_gap(0, 0), 0.0)?;

        // gap curve shapes
        let log = AnytimeLog::from_points(vec![(10.0, 80), (20.0, 64)]).map_err(|e| e.to_string())?;
        let curve = gap_curve(&log, 64).map_err(|e| e.to_string())?;
        let want = [(0.0, 1.0), (10.0, 0.2), (20.0, 0.0)];
        if curve.breakpoints.len() != want.len() {
            return Err(format!("curve has {} breakpoints, want 3", curve.breakpoints.len()));
        }
        for (&(t, g), &(wt, wg)) in curve.breakpoints.iter().zip(&want) {
            check("curve time", t, wt)?;
            check("curve gap", g, wg)?;
        }
        let empty = AnytimeLog::default();
        let flat = gap_curve(&empty, 64).map_err(|e| e.to_string())?;
        if flat.breakpoints != vec![(0.0, 1.0)] {
            return Err(format!("empty log curve is {:?}, want constant 1", flat.breakpoints));
        }
        let instant = AnytimeLog::from_points(vec![(0.0, 64)]).map_err(|e| e.to_string())?;
        let zero = gap_curve(&instant, 64).map_err(|e| e.to_string())?;
        if zero.breakpoints != vec![(0.0, 0.0)] {
            return Err(format!("instant-solve curve is {:?}, want constant 0", zero.breakpoints));
        }

        // integrals
        check("integral worked example", primal_integral(&log, 64, 30.0), 12.0)?;
        check("integral empty log", primal_integral(&empty, 64, 3600.0), 3600.0)?;
        check("integral perfect solve", primal_integral(&instant, 64, 500.0), 0.0)?;
        Ok("all gap, curve and integral examples reproduced to 1e-9".into())
    };
    verdict(6, "metrics arithmetic", run());
}

#[test]
fn criterion_7_exact_search_equals_brute_force() {
    let run = || -> Result<String, String> {
        let start = Instant::now();
        let params = GenParams {
            tasks: 4,
            technicians: 3,
            locations: 3,
            max_duration: 3,
            max_crew: 2,
            mass_prob: 0.25,
            ..GenParams::default()
        };
        let mut agreed = 0u32;
        for inst in small_corpus(200, params) {
            let cap = horizon(&inst) + latest_unavailability_end(&inst);
            if cap > 40 {
                return Err(format!("{}: enumeration cap {cap} exceeds 40", inst.name));
            }
            let res = exact_solve(&inst, &ExactParams::default());
            if !res.proven {
                return Err(format!("{}: exact search did not exhaust", inst.name));
            }
            let brute = enumerate_optimum(&inst, cap, RelaxFlags::NONE).map_err(|e| e.to_string())?;
            if res.optimum != brute {
                return Err(format!(
                    "{}: exact says {:?}, brute force says {:?}",
                    inst.name, res.optimum, brute
                ));
            }
            agreed += 1;
        }
        let elapsed = start.elapsed().as_secs_f64();
        if elapsed >= 600.0 {
            return Err(format!("took {elapsed:.0} s (budget 600 s)"));
        }
        Ok(format!(
            "exact optimum equals the brute-force minimum on {agreed}/200 instances in {elapsed:.1} s"
        ))
    };
    verdict(7, "exact vs brute force", run());
}

#[test]
fn criterion_8_relaxation_superset_feasibility() {
    let run = || -> Result<String, String> {
        let variants: [(&str, RelaxFlags); 4] = [
            (
                "drop requirements",
                RelaxFlags {
                    drop_requirements: true,
                    ..RelaxFlags::NONE
                },
            ),
            (
                "drop capacity",
                RelaxFlags {
                    drop_capacity: true,
                    ..RelaxFlags::NONE
                },
            ),
            (
                "drop balance",
                RelaxFlags {
                    drop_balance: true,
                    ..RelaxFlags::NONE
                },
            ),
            ("drop all", RelaxFlags::ALL),
        ];
        let params = GenParams {
            tasks: 8,
            technicians: 4,
            locations: 4,
            max_duration: 4,
            max_crew: 3,
            mass_prob: 0.3,
            ..GenParams::default()
        };
        let mut checked = 0u32;
        for inst in small_corpus(100, params) {
            let solve = SolveParams {
                time_limit_seconds: 5.0,
                max_iterations: Some(20),
                ..SolveParams::default()
            };
            let Ok((s, _)) = lns_solve(&inst, &solve) else {
                continue;
            };
            if !validate(&inst, &s, RelaxFlags::NONE).feasible() {
                return Err(format!("{}: solver returned an infeasible schedule", inst.name));
            }
            for (label, relax) in &variants {
                if !validate(&inst, &s, *relax).feasible() {
                    return Err(format!(
                        "{}: feasible schedule rejected under '{label}'",
                        inst.name
                    ));
                }
            }
            checked += 1;
        }
        if checked < 80 {
            return Err(format!("only {checked} feasible schedules found; corpus too thin"));
        }
        Ok(format!(
            "{checked} fully feasible schedules accepted under all four relaxation variants"
        ))
    };
    verdict(8, "relaxation superset feasibility", run());
}
