//! Primal gap, primal gap step function and primal integral over anytime
//! incumbent logs, for scoring solver runs.

use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum MetricsError {
    #[error("malformed log: {0}")]
    MalformedLog(String),
}

/// Timestamped incumbent objective sequence: strictly increasing times,
/// strictly decreasing objectives. May be empty (no incumbent found).
#[derive(Debug, Clone, Default, PartialEq)]
pub struct AnytimeLog {
    points: Vec<(f64, i64)>,
}

impl AnytimeLog {
    pub fn from_points(points: Vec<(f64, i64)>) -> Result<Self, MetricsError> {
        let log = AnytimeLog { points };
        log.check()?;
        Ok(log)
    }

    fn check(&self) -> Result<(), MetricsError> {
        for w in self.points.windows(2) {
            if w[1].0 <= w[0].0 {
                return Err(MetricsError::MalformedLog(format!(
                    "times not strictly increasing at {}",
                    w[1].0
                )));
            }
            if w[1].1 >= w[0].1 {
                return Err(MetricsError::MalformedLog(format!(
                    "objectives not strictly decreasing at {}",
                    w[1].0
                )));
            }
        }
        if let Some(&(t, _)) = self.points.first() {
            if t < 0.0 {
                return Err(MetricsError::MalformedLog("negative time".into()));
            }
        }
        Ok(())
    }

    /// Appends an improvement; ignored unless it strictly improves.
    pub fn push(&mut self, time: f64, objective: i64) {
        match self.points.last() {
            Some(&(t, obj)) if time <= t || objective >= obj => {
                // keep the log well-formed even with clock jitter
                if objective < obj {
                    self.points.push((t + f64::EPSILON.max(1e-9), objective));
                }
            }
            _ => self.points.push((time, objective)),
        }
    }

    pub fn points(&self) -> &[(f64, i64)] {
        &self.points
    }

    pub fn final_objective(&self) -> Option<i64> {
        self.points.last().map(|&(_, obj)| obj)
    }

    pub fn first_solution_time(&self) -> Option<f64> {
        self.points.first().map(|&(t, _)| t)
    }

    /// `elapsed_seconds,makespan` CSV.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("elapsed_seconds,makespan\n");
        for &(t, obj) in &self.points {
            out.push_str(&format!("{t},{obj}\n"));
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self, MetricsError> {
        let mut points = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || (lineno == 0 && line.starts_with("elapsed")) {
                continue;
            }
            let mut parts = line.split(',');
            let short = || MetricsError::MalformedLog(format!("short line {}", lineno + 1));
            let t: f64 = parts
                .next()
                .ok_or_else(short)?
                .trim()
                .parse()
                .map_err(|e| MetricsError::MalformedLog(format!("line {}: {e}", lineno + 1)))?;
            let obj: i64 = parts
                .next()
                .ok_or_else(short)?
                .trim()
                .parse()
                .map_err(|e| MetricsError::MalformedLog(format!("line {}: {e}", lineno + 1)))?;
            points.push((t, obj));
        }
        Self::from_points(points)
    }
}

/// Piecewise-constant primal-gap curve over time.
#[derive(Debug, Clone, PartialEq)]
pub struct GapCurve {
    /// `(time, gap)` breakpoints; the gap holds from each time until the
    /// next breakpoint. Starts at `(0, 1)` when the log starts after 0.
    pub breakpoints: Vec<(f64, f64)>,
}

/// Normalized distance between an objective and the best known one.
pub fn primal_gap(best_known: i64, objective: i64) -> f64 {
    if best_known == 0 && objective == 0 {
        0.0
    } else if (best_known as i128) * (objective as i128) < 0 {
        1.0
    } else {
        let diff = (best_known - objective).abs() as f64;
        diff / (best_known.abs().max(objective.abs()) as f64)
    }
}

/// Gap of the incumbent over time: 1 before the first incumbent, then the
/// primal gap of each incumbent until superseded.
pub fn gap_curve(log: &AnytimeLog, best_known: i64) -> Result<GapCurve, MetricsError> {
    log.check()?;
    let mut breakpoints = Vec::with_capacity(log.points.len() + 1);
    match log.points.first() {
        Some(&(t, _)) if t > 0.0 => breakpoints.push((0.0, 1.0)),
        None => breakpoints.push((0.0, 1.0)),
        _ => {}
    }
    for &(t, obj) in &log.points {
        breakpoints.push((t, primal_gap(best_known, obj)));
    }
    Ok(GapCurve { breakpoints })
}

/// Area under the gap curve from 0 to `until`.
pub fn primal_integral(log: &AnytimeLog, best_known: i64, until: f64) -> f64 {
    let curve = gap_curve(log, best_known).expect("log invariants hold");
    let mut total = 0.0;
    for (i, &(t, gap)) in curve.breakpoints.iter().enumerate() {
        if t >= until {
            break;
        }
        let next = curve
            .breakpoints
            .get(i + 1)
            .map(|&(t, _)| t)
            .unwrap_or(until)
            .min(until);
        total += gap * (next - t);
    }
    total
}

/// Per-run JSON report emitted by the CLI.
#[derive(Debug, Serialize)]
pub struct RunReport {
    #[serde(rename = "bestKnown")]
    pub best_known: i64,
    #[serde(rename = "P")]
    pub primal_integral: f64,
    #[serde(rename = "finalObjective")]
    pub final_objective: Option<i64>,
    #[serde(rename = "firstSolutionTime")]
    pub first_solution_time: Option<f64>,
}

pub fn run_report(log: &AnytimeLog, best_known: i64, until: f64) -> RunReport {
    RunReport {
        best_known,
        primal_integral: primal_integral(log, best_known, until),
        final_objective: log.final_objective(),
        first_solution_time: log.first_solution_time(),
    }
}
