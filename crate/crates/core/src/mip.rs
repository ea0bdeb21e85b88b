//! On/Off Event-based (OOE) linear formulation of the scheduling problem:
//! symbolic model emission, LP text output, schedule <-> variable-assignment
//! conversion, and a row-by-row evaluation oracle that needs no external
//! solver.
//!
//! Time is discretized into one event per potential task start. Technician
//! unavailability windows become pseudo-tasks with a fixed start, crew 1
//! and the owning technician pre-assigned; they occupy events but do not
//! contribute to the makespan. The event set has exactly one slot per task
//! (real or pseudo). Auxiliary "previous event" terms at the first event
//! are folded into row constants instead of being emitted as variables.

use std::collections::HashMap;

use thiserror::Error;

use crate::model::{horizon, latest_unavailability_end, Axis, Instance, RelaxFlags, Schedule, ScheduleEntry, Tick};
use crate::validate::validate;

#[derive(Debug, Error)]
pub enum MipError {
    #[error("schedule fails validation: {0}")]
    InfeasibleInput(String),
    #[error("assignment is missing variable {0}")]
    MissingVariable(String),
    #[error("assignment does not decode to a feasible schedule: {0}")]
    InconsistentAssignment(String),
    #[error("malformed solution file: {0}")]
    Parse(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VarType {
    Binary,
    Continuous,
}

#[derive(Debug, Clone)]
pub struct Variable {
    pub name: String,
    pub vtype: VarType,
    /// Lower bound; `f64::NEG_INFINITY` for free variables.
    pub lb: f64,
    pub ub: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Le,
    Eq,
    Ge,
}

#[derive(Debug, Clone)]
pub struct LinearRow {
    pub name: String,
    /// Variable name -> coefficient; merged, no zero entries.
    pub coeffs: Vec<(String, f64)>,
    pub sense: Sense,
    pub rhs: f64,
}

/// One member of the extended task set: a real task or an unavailability
/// pseudo-task with a fixed start and a pre-assigned technician.
#[derive(Debug, Clone)]
pub struct OoeTask {
    pub id: String,
    pub duration: Tick,
    pub crew: u32,
    /// Technician index for pseudo-tasks, `None` for real tasks.
    pub owner: Option<usize>,
    /// Fixed start for pseudo-tasks.
    pub fixed_start: Option<Tick>,
}

#[derive(Debug)]
pub struct OoeModel {
    pub variables: Vec<Variable>,
    pub rows: Vec<LinearRow>,
    pub objective_var: String,
    /// Extended task set backing the variable indices: real tasks in
    /// instance order, then pseudo-tasks.
    pub tasks: Vec<OoeTask>,
    pub num_events: usize,
    pub big_m: Tick,
}

fn zv(i: usize, e: usize) -> String {
    format!("z_i{i}_e{e}")
}
fn av(i: usize, e: usize) -> String {
    format!("a_i{i}_e{e}")
}
fn xv(i: usize, j: usize) -> String {
    format!("x_i{i}_j{j}")
}
fn yv(i: usize, j: usize, e: usize) -> String {
    format!("y_i{i}_j{j}_e{e}")
}
fn tv(e: usize) -> String {
    format!("t_e{e}")
}
fn bv(axis: Axis, e: usize) -> String {
    match axis {
        Axis::AftFwd => format!("b_af_e{e}"),
        Axis::LeftRight => format!("b_lr_e{e}"),
    }
}

struct RowBuilder {
    name: String,
    coeffs: HashMap<String, f64>,
    sense: Sense,
    rhs: f64,
}

impl RowBuilder {
    fn new(name: String, sense: Sense, rhs: f64) -> Self {
        RowBuilder {
            name,
            coeffs: HashMap::new(),
            sense,
            rhs,
        }
    }

    fn add(mut self, var: String, coeff: f64) -> Self {
        *self.coeffs.entry(var).or_insert(0.0) += coeff;
        self
    }

    fn build(self) -> LinearRow {
        let mut coeffs: Vec<(String, f64)> = self
            .coeffs
            .into_iter()
            .filter(|&(_, c)| c != 0.0)
            .collect();
        coeffs.sort_by(|a, b| a.0.cmp(&b.0));
        LinearRow {
            name: self.name,
            coeffs,
            sense: self.sense,
            rhs: self.rhs,
        }
    }
}

/// Extended task set: instance tasks followed by one pseudo-task per
/// unavailability window, in technician order.
pub fn extended_tasks(instance: &Instance) -> Vec<OoeTask> {
    let mut tasks: Vec<OoeTask> = instance
        .tasks
        .iter()
        .map(|t| OoeTask {
            id: t.id.clone(),
            duration: t.duration,
            crew: t.crew,
            owner: None,
            fixed_start: None,
        })
        .collect();
    for (j, tech) in instance.technicians.iter().enumerate() {
        for (k, &(s, e)) in tech.unavailabilities.iter().enumerate() {
            tasks.push(OoeTask {
                id: format!("unavail_{}_{k}", tech.id),
                duration: e - s,
                crew: 1,
                owner: Some(j),
                fixed_start: Some(s),
            });
        }
    }
    tasks
}

/// Builds the full event-based model. Relax flags drop the requirement
/// rows (eq33), the capacity rows (eq34) or the balance rows (eq35-eq37).
pub fn emit_ooe(instance: &Instance, relax: RelaxFlags) -> OoeModel {
    let tasks = extended_tasks(instance);
    let n = tasks.len();
    let num_real = instance.tasks.len();
    let r = instance.technicians.len();
    // unavailability windows can push event times past the duration sum,
    // so the big-M covers starts up to horizon + latest window end plus
    // one more task length (the padded final event)
    let theta = 2 * horizon(instance) + latest_unavailability_end(instance);
    let big_m = theta as f64;

    let mut variables = Vec::new();
    for i in 0..n {
        for e in 0..n {
            variables.push(Variable {
                name: zv(i, e),
                vtype: VarType::Binary,
                lb: 0.0,
                ub: 1.0,
            });
        }
    }
    for i in 0..n {
        for e in 0..n {
            variables.push(Variable {
                name: av(i, e),
                vtype: VarType::Binary,
                lb: 0.0,
                ub: 1.0,
            });
        }
    }
    for i in 0..n {
        for j in 0..r {
            variables.push(Variable {
                name: xv(i, j),
                vtype: VarType::Binary,
                lb: 0.0,
                ub: 1.0,
            });
        }
    }
    for i in 0..n {
        for j in 0..r {
            for e in 0..n {
                variables.push(Variable {
                    name: yv(i, j, e),
                    vtype: VarType::Binary,
                    lb: 0.0,
                    ub: 1.0,
                });
            }
        }
    }
    for e in 0..n {
        variables.push(Variable {
            name: tv(e),
            vtype: VarType::Continuous,
            lb: 0.0,
            ub: f64::INFINITY,
        });
    }
    variables.push(Variable {
        name: "t_max".into(),
        vtype: VarType::Continuous,
        lb: 0.0,
        ub: f64::INFINITY,
    });
    for e in 0..n {
        variables.push(Variable {
            name: bv(Axis::AftFwd, e),
            vtype: VarType::Continuous,
            lb: f64::NEG_INFINITY,
            ub: f64::INFINITY,
        });
    }
    for e in 0..n {
        variables.push(Variable {
            name: bv(Axis::LeftRight, e),
            vtype: VarType::Continuous,
            lb: f64::NEG_INFINITY,
            ub: f64::INFINITY,
        });
    }

    let mut rows = Vec::new();

    // eq11: the first event is at time zero
    rows.push(RowBuilder::new("eq11".into(), Sense::Eq, 0.0).add(tv(0), 1.0).build());
    // eq12: event times are non-decreasing
    for e in 1..n {
        rows.push(
            RowBuilder::new(format!("eq12_e{e}"), Sense::Ge, 0.0)
                .add(tv(e), 1.0)
                .add(tv(e - 1), -1.0)
                .build(),
        );
    }
    // eq14/eq15: start indicators linked to processing transitions;
    // the "previous event" term at e = 0 is the folded constant zero
    for i in 0..n {
        for e in 0..n {
            let mut row = RowBuilder::new(format!("eq14_i{i}_e{e}"), Sense::Ge, 0.0)
                .add(av(i, e), 1.0)
                .add(zv(i, e), -1.0);
            if e > 0 {
                row = row.add(zv(i, e - 1), 1.0);
            }
            rows.push(row.build());
            let mut row = RowBuilder::new(format!("eq15_i{i}_e{e}"), Sense::Le, 1.0)
                .add(av(i, e), 1.0);
            if e > 0 {
                row = row.add(zv(i, e - 1), 1.0);
            }
            rows.push(row.build());
        }
    }
    // eq16: every task is processed at some event
    for i in 0..n {
        let mut row = RowBuilder::new(format!("eq16_i{i}"), Sense::Ge, 1.0);
        for e in 0..n {
            row = row.add(zv(i, e), 1.0);
        }
        rows.push(row.build());
    }
    // eq17/eq18: processing happens in one contiguous block of events
    for i in 0..n {
        for e in 1..n {
            let mut row = RowBuilder::new(format!("eq17_i{i}_e{e}"), Sense::Le, e as f64)
                .add(zv(i, e), e as f64)
                .add(zv(i, e - 1), -(e as f64));
            for ep in 0..e {
                row = row.add(zv(i, ep), 1.0);
            }
            rows.push(row.build());

            let tail = (n - e) as f64;
            let mut row = RowBuilder::new(format!("eq18_i{i}_e{e}"), Sense::Le, tail)
                .add(zv(i, e), -tail)
                .add(zv(i, e - 1), tail);
            for ep in e..n {
                row = row.add(zv(i, ep), 1.0);
            }
            rows.push(row.build());
        }
    }
    // eq19: event spacing respects task durations
    for i in 0..n {
        let d = tasks[i].duration as f64;
        for e in 0..n {
            for f in (e + 1)..n {
                let mut row = RowBuilder::new(format!("eq19_i{i}_e{e}_f{f}"), Sense::Ge, -d)
                    .add(tv(f), 1.0)
                    .add(tv(e), -1.0)
                    .add(zv(i, e), -d)
                    .add(zv(i, f), d)
                    .add(zv(i, f - 1), -d);
                if e > 0 {
                    row = row.add(zv(i, e - 1), d);
                }
                rows.push(row.build());
            }
        }
    }
    // eq20: makespan covers real task completions (pseudo-tasks excluded)
    for i in 0..num_real {
        let d = tasks[i].duration as f64;
        for e in 0..n {
            rows.push(
                RowBuilder::new(format!("eq20_i{i}_e{e}"), Sense::Ge, d - big_m)
                    .add("t_max".into(), 1.0)
                    .add(tv(e), -1.0)
                    .add(av(i, e), -big_m)
                    .build(),
            );
        }
    }
    // eq21-eq23: y_ije = x_ij * z_ie linearized
    for i in 0..n {
        for j in 0..r {
            for e in 0..n {
                rows.push(
                    RowBuilder::new(format!("eq21_i{i}_j{j}_e{e}"), Sense::Le, 0.0)
                        .add(yv(i, j, e), 1.0)
                        .add(xv(i, j), -1.0)
                        .build(),
                );
                rows.push(
                    RowBuilder::new(format!("eq22_i{i}_j{j}_e{e}"), Sense::Le, 0.0)
                        .add(yv(i, j, e), 1.0)
                        .add(zv(i, e), -1.0)
                        .build(),
                );
                rows.push(
                    RowBuilder::new(format!("eq23_i{i}_j{j}_e{e}"), Sense::Ge, -1.0)
                        .add(yv(i, j, e), 1.0)
                        .add(xv(i, j), -1.0)
                        .add(zv(i, e), -1.0)
                        .build(),
                );
            }
        }
    }
    // eq24: exactly the crew size works whenever a task is processed
    for i in 0..n {
        for e in 0..n {
            let mut row = RowBuilder::new(format!("eq24_i{i}_e{e}"), Sense::Eq, 0.0)
                .add(zv(i, e), -(tasks[i].crew as f64));
            for j in 0..r {
                row = row.add(yv(i, j, e), 1.0);
            }
            rows.push(row.build());
        }
    }
    // eq25: a technician works at most one task per event
    for j in 0..r {
        for e in 0..n {
            let mut row = RowBuilder::new(format!("eq25_j{j}_e{e}"), Sense::Le, 1.0);
            for i in 0..n {
                row = row.add(yv(i, j, e), 1.0);
            }
            rows.push(row.build());
        }
    }
    // eq26/eq27: assignment variables consistent with event assignments
    for i in 0..n {
        for j in 0..r {
            let mut lb = RowBuilder::new(format!("eq26_i{i}_j{j}_lb"), Sense::Ge, 0.0)
                .add(xv(i, j), -1.0);
            let mut ub = RowBuilder::new(format!("eq26_i{i}_j{j}_ub"), Sense::Le, 0.0)
                .add(xv(i, j), -(n as f64));
            for e in 0..n {
                lb = lb.add(yv(i, j, e), 1.0);
                ub = ub.add(yv(i, j, e), 1.0);
            }
            rows.push(lb.build());
            rows.push(ub.build());

            let mut lb = RowBuilder::new(format!("eq27_i{i}_j{j}_lb"), Sense::Ge, 1.0)
                .add(xv(i, j), 1.0);
            let mut ub = RowBuilder::new(format!("eq27_i{i}_j{j}_ub"), Sense::Le, n as f64)
                .add(xv(i, j), n as f64);
            for e in 0..n {
                lb = lb.add(zv(i, e), 1.0).add(yv(i, j, e), -1.0);
                ub = ub.add(zv(i, e), 1.0).add(yv(i, j, e), -1.0);
            }
            rows.push(lb.build());
            rows.push(ub.build());
        }
    }
    // eq28: each task gets exactly its crew size
    for i in 0..n {
        let mut row =
            RowBuilder::new(format!("eq28_i{i}"), Sense::Eq, tasks[i].crew as f64);
        for j in 0..r {
            row = row.add(xv(i, j), 1.0);
        }
        rows.push(row.build());
    }
    // eq29-eq31: pseudo-tasks pinned to their technician and window start
    for (i, task) in tasks.iter().enumerate() {
        let (Some(j), Some(s)) = (task.owner, task.fixed_start) else {
            continue;
        };
        rows.push(
            RowBuilder::new(format!("eq29_i{i}_j{j}"), Sense::Eq, 1.0)
                .add(xv(i, j), 1.0)
                .build(),
        );
        for e in 0..n {
            rows.push(
                RowBuilder::new(format!("eq30_i{i}_j{j}_e{e}"), Sense::Ge, 0.0)
                    .add(tv(e), 1.0)
                    .add(av(i, e), -(s as f64))
                    .build(),
            );
            rows.push(
                RowBuilder::new(format!("eq31_i{i}_j{j}_e{e}"), Sense::Le, big_m)
                    .add(tv(e), 1.0)
                    .add(av(i, e), big_m - s as f64)
                    .build(),
            );
        }
    }
    // eq32: a task never runs at or before an event processing a predecessor
    for (i, t) in instance.tasks.iter().enumerate() {
        for p in &t.precedences {
            let pi = instance
                .tasks
                .iter()
                .position(|c| &c.id == p)
                .expect("instance invariants hold");
            for e in 0..n {
                let mut row = RowBuilder::new(
                    format!("eq32_i{i}_p{pi}_e{e}"),
                    Sense::Le,
                    1.0 + e as f64,
                )
                .add(zv(pi, e), 1.0 + e as f64);
                for ep in 0..=e {
                    row = row.add(zv(i, ep), 1.0);
                }
                rows.push(row.build());
            }
        }
    }
    // eq33: skill requirements on the assignment variables
    if !relax.drop_requirements {
        for (i, t) in instance.tasks.iter().enumerate() {
            for (q, req) in t.requirements.iter().enumerate() {
                let mut row = RowBuilder::new(
                    format!("eq33_i{i}_q{q}"),
                    Sense::Ge,
                    req.count as f64,
                );
                for (j, tech) in instance.technicians.iter().enumerate() {
                    if tech.has_skill(&req.skill) {
                        row = row.add(xv(i, j), 1.0);
                    }
                }
                rows.push(row.build());
            }
        }
    }
    // eq34: location capacity per event
    if !relax.drop_capacity {
        for (l, loc) in instance.locations.iter().enumerate() {
            let Some(cap) = loc.capacity else { continue };
            for e in 0..n {
                let mut row =
                    RowBuilder::new(format!("eq34_l{l}_e{e}"), Sense::Le, cap as f64);
                for (i, t) in instance.tasks.iter().enumerate() {
                    if t.location.as_deref() == Some(loc.id.as_str()) {
                        row = row.add(zv(i, e), t.crew as f64);
                    }
                }
                rows.push(row.build());
            }
        }
    }
    // eq35/eq36 balance recursion, eq37 band bounds
    if !relax.drop_balance {
        for (axis, eq) in [(Axis::AftFwd, 35), (Axis::LeftRight, 36)] {
            for e in 0..n {
                let mut row =
                    RowBuilder::new(format!("eq{eq}_e{e}"), Sense::Eq, 0.0).add(bv(axis, e), 1.0);
                if e > 0 {
                    row = row.add(bv(axis, e - 1), -1.0);
                }
                for (i, t) in instance.tasks.iter().enumerate() {
                    if t.mass == 0 {
                        continue;
                    }
                    if let Some(zone) = instance.task_zone(t) {
                        let (a, sign) = zone.axis_sign();
                        if a == axis {
                            row = row.add(av(i, e), -(sign * t.mass) as f64);
                        }
                    }
                }
                rows.push(row.build());
            }
        }
        for (axis, tag) in [(Axis::AftFwd, "af"), (Axis::LeftRight, "lr")] {
            let band = instance.band(axis) as f64;
            for e in 0..n {
                rows.push(
                    RowBuilder::new(format!("eq37_{tag}_e{e}_ub"), Sense::Le, band)
                        .add(bv(axis, e), 1.0)
                        .build(),
                );
                rows.push(
                    RowBuilder::new(format!("eq37_{tag}_e{e}_lb"), Sense::Ge, -band)
                        .add(bv(axis, e), 1.0)
                        .build(),
                );
            }
        }
    }

    OoeModel {
        variables,
        rows,
        objective_var: "t_max".into(),
        tasks,
        num_events: n,
        big_m: theta,
    }
}

/// Writes the model in LP text format.
pub fn to_lp(model: &OoeModel) -> String {
    let mut out = String::new();
    out.push_str("Minimize\n obj: ");
    out.push_str(&model.objective_var);
    out.push_str("\nSubject To\n");
    for row in &model.rows {
        out.push(' ');
        out.push_str(&row.name);
        out.push(':');
        for (var, coeff) in &row.coeffs {
            if *coeff >= 0.0 {
                out.push_str(&format!(" + {coeff} {var}"));
            } else {
                out.push_str(&format!(" - {} {var}", -coeff));
            }
        }
        let sense = match row.sense {
            Sense::Le => "<=",
            Sense::Eq => "=",
            Sense::Ge => ">=",
        };
        out.push_str(&format!(" {sense} {}\n", row.rhs));
    }
    out.push_str("Bounds\n");
    for v in &model.variables {
        if v.vtype == VarType::Continuous {
            if v.lb == f64::NEG_INFINITY && v.ub == f64::INFINITY {
                out.push_str(&format!(" {} free\n", v.name));
            } else if v.ub == f64::INFINITY {
                out.push_str(&format!(" {} >= {}\n", v.name, v.lb));
            } else {
                out.push_str(&format!(" {} <= {} <= {}\n", v.lb, v.name, v.ub));
            }
        }
    }
    out.push_str("Binary\n");
    for v in &model.variables {
        if v.vtype == VarType::Binary {
            out.push(' ');
            out.push_str(&v.name);
            out.push('\n');
        }
    }
    out.push_str("End\n");
    out
}

#[derive(Debug, Clone, Default)]
pub struct VarAssignment {
    pub values: HashMap<String, f64>,
}

impl VarAssignment {
    pub fn get(&self, name: &str) -> Result<f64, MipError> {
        self.values
            .get(name)
            .copied()
            .ok_or_else(|| MipError::MissingVariable(name.to_string()))
    }

    /// Parses a whitespace-separated `name value` per-line solution file.
    /// Blank lines and `#` comments are skipped.
    pub fn from_var_file(text: &str) -> Result<Self, MipError> {
        let mut values = HashMap::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut parts = line.split_whitespace();
            let name = parts
                .next()
                .ok_or_else(|| MipError::Parse(format!("line {}: empty", lineno + 1)))?;
            let value: f64 = parts
                .next()
                .ok_or_else(|| MipError::Parse(format!("line {}: missing value", lineno + 1)))?
                .parse()
                .map_err(|e| MipError::Parse(format!("line {}: {e}", lineno + 1)))?;
            if parts.next().is_some() {
                return Err(MipError::Parse(format!(
                    "line {}: trailing tokens",
                    lineno + 1
                )));
            }
            values.insert(name.to_string(), value);
        }
        Ok(VarAssignment { values })
    }

    pub fn to_var_file(&self) -> String {
        let mut names: Vec<&String> = self.values.keys().collect();
        names.sort();
        let mut out = String::new();
        for name in names {
            out.push_str(&format!("{name} {}\n", self.values[name]));
        }
        out
    }
}

/// Event times backing a schedule: sorted distinct start times of the
/// extended task set, padded to the event count with the maximum end time
/// so padded events sit at or after every stop transition.
fn event_times(tasks: &[OoeTask], starts: &[Tick]) -> Vec<Tick> {
    let mut times: Vec<Tick> = starts.to_vec();
    times.sort_unstable();
    times.dedup();
    let max_end = tasks
        .iter()
        .zip(starts)
        .map(|(t, &s)| s + t.duration)
        .max()
        .unwrap_or(0);
    while times.len() < tasks.len() {
        times.push(max_end);
    }
    times
}

/// Encodes a feasible schedule as a full OOE variable assignment.
pub fn encode_solution(instance: &Instance, schedule: &Schedule) -> Result<VarAssignment, MipError> {
    let report = validate(instance, schedule, RelaxFlags::NONE);
    if !report.feasible() {
        return Err(MipError::InfeasibleInput(report.summary()));
    }
    let tasks = extended_tasks(instance);
    let n = tasks.len();
    let r = instance.technicians.len();
    let starts: Vec<Tick> = tasks
        .iter()
        .map(|t| match t.fixed_start {
            Some(s) => s,
            None => schedule.entries[&t.id].start,
        })
        .collect();
    let times = event_times(&tasks, &starts);

    let mut values = HashMap::new();
    for (e, &t) in times.iter().enumerate() {
        values.insert(tv(e), t as f64);
    }
    let makespan = instance
        .tasks
        .iter()
        .map(|t| schedule.entries[&t.id].start + t.duration)
        .max()
        .unwrap_or(0);
    values.insert("t_max".into(), makespan as f64);

    // z by half-open membership, a at the first processed event
    for (i, task) in tasks.iter().enumerate() {
        let (s, end) = (starts[i], starts[i] + task.duration);
        let mut started = false;
        for (e, &t) in times.iter().enumerate() {
            let active = t >= s && t < end;
            values.insert(zv(i, e), if active { 1.0 } else { 0.0 });
            let is_start = active && !started;
            values.insert(av(i, e), if is_start { 1.0 } else { 0.0 });
            if active {
                started = true;
            }
        }
    }
    // x from crews (pseudo-tasks own exactly their technician), y = x * z
    for (i, task) in tasks.iter().enumerate() {
        for j in 0..r {
            let assigned = match task.owner {
                Some(owner) => j == owner,
                None => schedule.entries[&task.id]
                    .techs
                    .contains(&instance.technicians[j].id),
            };
            values.insert(xv(i, j), if assigned { 1.0 } else { 0.0 });
            for e in 0..n {
                let y = if assigned {
                    values[&zv(i, e)]
                } else {
                    0.0
                };
                values.insert(yv(i, j, e), y);
            }
        }
    }
    // balance recursion over start events
    for axis in [Axis::AftFwd, Axis::LeftRight] {
        let mut b = 0.0;
        for e in 0..n {
            for (i, t) in instance.tasks.iter().enumerate() {
                if t.mass == 0 {
                    continue;
                }
                if let Some(zone) = instance.task_zone(t) {
                    let (a, sign) = zone.axis_sign();
                    if a == axis && values[&av(i, e)] == 1.0 {
                        b += (sign * t.mass) as f64;
                    }
                }
            }
            values.insert(bv(axis, e), b);
        }
    }
    Ok(VarAssignment { values })
}

const TOL: f64 = 1e-6;

/// Evaluates every row and returns the names of the violated ones.
pub fn check_assignment(model: &OoeModel, assignment: &VarAssignment) -> Result<Vec<String>, MipError> {
    let mut violated = Vec::new();
    for row in &model.rows {
        let mut lhs = 0.0;
        for (var, coeff) in &row.coeffs {
            lhs += coeff * assignment.get(var)?;
        }
        let ok = match row.sense {
            Sense::Le => lhs <= row.rhs + TOL,
            Sense::Eq => (lhs - row.rhs).abs() <= TOL,
            Sense::Ge => lhs >= row.rhs - TOL,
        };
        if !ok {
            violated.push(row.name.clone());
        }
    }
    Ok(violated)
}

fn binary_value(assignment: &VarAssignment, name: &str) -> Result<bool, MipError> {
    let v = assignment.get(name)?;
    if (v - 1.0).abs() <= TOL {
        Ok(true)
    } else if v.abs() <= TOL {
        Ok(false)
    } else {
        Err(MipError::InconsistentAssignment(format!(
            "{name} = {v} is not binary"
        )))
    }
}

/// Reads task starts and crews back out of a satisfying assignment.
pub fn decode_solution(
    instance: &Instance,
    model: &OoeModel,
    assignment: &VarAssignment,
) -> Result<Schedule, MipError> {
    let n = model.num_events;
    let mut schedule = Schedule::default();
    for (i, task) in instance.tasks.iter().enumerate() {
        let mut start: Option<Tick> = None;
        for e in 0..n {
            if binary_value(assignment, &zv(i, e))? {
                let t = assignment.get(&tv(e))?;
                let rounded = t.round();
                if (t - rounded).abs() > TOL {
                    return Err(MipError::InconsistentAssignment(format!(
                        "event {e} time {t} is not integral"
                    )));
                }
                start = Some(rounded as Tick);
                break;
            }
        }
        let Some(start) = start else {
            return Err(MipError::InconsistentAssignment(format!(
                "task {} is processed at no event",
                task.id
            )));
        };
        let mut techs = std::collections::BTreeSet::new();
        for (j, tech) in instance.technicians.iter().enumerate() {
            if binary_value(assignment, &xv(i, j))? {
                techs.insert(tech.id.clone());
            }
        }
        schedule
            .entries
            .insert(task.id.clone(), ScheduleEntry { start, techs });
    }
    let report = validate(instance, &schedule, RelaxFlags::NONE);
    if !report.feasible() {
        return Err(MipError::InconsistentAssignment(report.summary()));
    }
    Ok(schedule)
}
