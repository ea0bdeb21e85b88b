//! Piecewise-constant integer functions over time.
//!
//! A [`StepProfile`] is a sum of elementary contributions: `pulse(s, e, h)`
//! adds height `h` on the half-open interval `[s, e)` and `step_at(t, h)`
//! adds a permanent level change of `h` from `t` on. The profile value
//! before the first delta is 0. Occupancy and balance traces are both
//! instances of this type.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::Tick;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ProfileError {
    #[error("degenerate interval [{start}, {end})")]
    DegenerateInterval { start: Tick, end: Tick },
}

/// Piecewise-constant integer function, stored as sorted level deltas.
///
/// After normalization the delta times are strictly increasing and no delta
/// is zero. The value at time `t` is the sum of all deltas at times `<= t`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepProfile {
    deltas: Vec<(Tick, i64)>,
}

impl StepProfile {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn is_empty(&self) -> bool {
        self.deltas.is_empty()
    }

    /// Normalized `(time, delta)` pairs, strictly increasing in time.
    pub fn deltas(&self) -> &[(Tick, i64)] {
        &self.deltas
    }

    /// Times at which the profile changes value.
    pub fn event_times(&self) -> impl Iterator<Item = Tick> + '_ {
        self.deltas.iter().map(|&(t, _)| t)
    }

    fn insert(&mut self, time: Tick, delta: i64) {
        if delta == 0 {
            return;
        }
        match self.deltas.binary_search_by_key(&time, |&(t, _)| t) {
            Ok(idx) => {
                self.deltas[idx].1 += delta;
                if self.deltas[idx].1 == 0 {
                    self.deltas.remove(idx);
                }
            }
            Err(idx) => self.deltas.insert(idx, (time, delta)),
        }
    }

    /// Adds `height` on `[start, end)`.
    pub fn pulse(&mut self, start: Tick, end: Tick, height: i64) -> Result<(), ProfileError> {
        if start >= end {
            return Err(ProfileError::DegenerateInterval { start, end });
        }
        self.insert(start, height);
        self.insert(end, -height);
        Ok(())
    }

    /// Adds a permanent level change of `height` at `time`.
    pub fn step_at(&mut self, time: Tick, height: i64) {
        self.insert(time, height);
    }

    /// Value of the profile at time `t`.
    pub fn value_at(&self, t: Tick) -> i64 {
        self.deltas
            .iter()
            .take_while(|&&(time, _)| time <= t)
            .map(|&(_, d)| d)
            .sum()
    }

    /// Exact minimum and maximum of the value over the half-open `window`.
    pub fn extrema(&self, window: (Tick, Tick)) -> Result<(i64, i64), ProfileError> {
        let (start, end) = window;
        if start >= end {
            return Err(ProfileError::DegenerateInterval { start, end });
        }
        let mut value = 0i64;
        let mut min = i64::MAX;
        let mut max = i64::MIN;
        for &(t, d) in &self.deltas {
            if t >= end {
                break;
            }
            value += d;
            if t > start {
                // value changed inside the window; the pre-change level was
                // already recorded (or equals value_at(start), handled below)
                min = min.min(value);
                max = max.max(value);
            }
        }
        // level at the window start itself
        let at_start = self.value_at(start);
        Ok((min.min(at_start), max.max(at_start)))
    }

    /// Minimum and maximum over `[from, +inf)`.
    pub fn extrema_from(&self, from: Tick) -> (i64, i64) {
        let mut value = self.value_at(from);
        let mut min = value;
        let mut max = value;
        for &(t, d) in &self.deltas {
            if t <= from {
                continue;
            }
            value += d;
            min = min.min(value);
            max = max.max(value);
        }
        (min, max)
    }

    /// Maximum over the half-open `window`.
    pub fn max_over(&self, start: Tick, end: Tick) -> Result<i64, ProfileError> {
        self.extrema((start, end)).map(|(_, hi)| hi)
    }

    /// Two-column CSV rendering (`time,value`), one line per event time.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("time,value\n");
        let mut value = 0i64;
        for &(t, d) in &self.deltas {
            value += d;
            out.push_str(&format!("{t},{value}\n"));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn pulsed(ops: &[(Tick, Tick, i64)]) -> StepProfile {
        let mut p = StepProfile::new();
        for &(s, e, h) in ops {
            p.pulse(s, e, h).unwrap();
        }
        p
    }

    #[test]
    fn pulse_basic() {
        let p = pulsed(&[(3, 5, 2)]);
        assert_eq!(p.value_at(2), 0);
        assert_eq!(p.value_at(3), 2);
        assert_eq!(p.value_at(4), 2);
        assert_eq!(p.value_at(5), 0);
    }

    #[test]
    fn pulse_overlap_sums() {
        let p = pulsed(&[(3, 5, 2), (4, 6, 1)]);
        assert_eq!(p.value_at(4), 3);
        assert_eq!(p.extrema((0, 10)).unwrap(), (0, 3));
    }

    #[test]
    fn pulse_cancellation() {
        let p = pulsed(&[(3, 5, 2), (3, 5, -2)]);
        assert!(p.is_empty());
        assert_eq!(p, StepProfile::new());
    }

    #[test]
    fn pulse_degenerate() {
        let mut p = StepProfile::new();
        assert_eq!(
            p.pulse(5, 5, 1),
            Err(ProfileError::DegenerateInterval { start: 5, end: 5 })
        );
        assert_eq!(
            p.pulse(6, 5, 1),
            Err(ProfileError::DegenerateInterval { start: 6, end: 5 })
        );
    }

    #[test]
    fn step_at_constant() {
        let mut p = StepProfile::new();
        p.step_at(0, 500);
        assert_eq!(p.value_at(0), 500);
        assert_eq!(p.value_at(1000), 500);
    }

    #[test]
    fn step_at_window() {
        // mass removed at 2, compensated at 5
        let mut p = StepProfile::new();
        p.step_at(2, 500);
        p.step_at(5, -500);
        assert_eq!(p.value_at(1), 0);
        assert_eq!(p.value_at(2), 500);
        assert_eq!(p.value_at(4), 500);
        assert_eq!(p.value_at(5), 0);
        assert_eq!(p.value_at(23), 0);
    }

    #[test]
    fn step_at_zero_is_noop() {
        let mut p = pulsed(&[(3, 5, 2)]);
        let before = p.clone();
        p.step_at(4, 0);
        assert_eq!(p, before);
    }

    #[test]
    fn extrema_simple() {
        let p = pulsed(&[(3, 5, 2)]);
        assert_eq!(p.extrema((0, 10)).unwrap(), (0, 2));
        assert_eq!(p.extrema((3, 5)).unwrap(), (2, 2));
        assert_eq!(p.extrema((6, 9)).unwrap(), (0, 0));
        assert!(p.extrema((4, 4)).is_err());
    }

    #[test]
    fn extrema_cockpit_occupancy() {
        // cockpit tasks of the worked example: two seats then the panel
        let p = pulsed(&[(3, 5, 2), (5, 7, 2), (7, 10, 1)]);
        assert_eq!(p.extrema((0, 16)).unwrap(), (0, 2));
    }

    #[test]
    fn extrema_left_right_balance() {
        // thruster/engine removals alternating between wings
        let mut p = StepProfile::new();
        p.step_at(2, 500);
        p.step_at(5, -500);
        p.step_at(8, -1200);
        p.step_at(12, 1200);
        assert_eq!(p.extrema((0, 16)).unwrap(), (-1200, 500));
    }

    #[test]
    fn extrema_from_tail() {
        let mut p = StepProfile::new();
        p.step_at(2, 500);
        p.step_at(8, -1200);
        assert_eq!(p.extrema_from(0), (-700, 500));
        assert_eq!(p.extrema_from(3), (-700, 500));
        assert_eq!(p.extrema_from(8), (-700, -700));
    }

    /// Independent oracle: evaluate contributions pointwise per tick.
    fn brute_force_value(ops: &[(bool, Tick, Tick, i64)], t: Tick) -> i64 {
        let mut v = 0;
        for &(is_pulse, s, e, h) in ops {
            if is_pulse {
                if t >= s && t < e {
                    v += h;
                }
            } else if t >= s {
                v += h;
            }
        }
        v
    }

    proptest! {
        #[test]
        fn matches_pointwise_oracle(
            ops in proptest::collection::vec(
                (any::<bool>(), 0i64..30, 1i64..10, -5i64..6), 0..12)
        ) {
            let mut p = StepProfile::new();
            let mut normalized = Vec::new();
            for (is_pulse, s, len, h) in ops {
                if is_pulse {
                    p.pulse(s, s + len, h).unwrap();
                } else {
                    p.step_at(s, h);
                }
                normalized.push((is_pulse, s, s + len, h));
            }
            for t in 0..45 {
                prop_assert_eq!(p.value_at(t), brute_force_value(&normalized, t));
            }
            if let Ok((lo, hi)) = p.extrema((0, 45)) {
                let vals: Vec<i64> = (0..45).map(|t| p.value_at(t)).collect();
                prop_assert_eq!(lo, *vals.iter().min().unwrap());
                prop_assert_eq!(hi, *vals.iter().max().unwrap());
            }
        }

        #[test]
        fn pulse_then_inverse_restores(
            base in proptest::collection::vec((0i64..20, 1i64..8, -4i64..5), 0..6),
            s in 0i64..20, len in 1i64..8, h in -4i64..5,
        ) {
            let mut p = StepProfile::new();
            for &(bs, blen, bh) in &base {
                p.pulse(bs, bs + blen, bh).unwrap();
            }
            let before = p.clone();
            p.pulse(s, s + len, h).unwrap();
            p.pulse(s, s + len, -h).unwrap();
            prop_assert_eq!(p, before);
        }
    }
}
