use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeSensorState {
    pub cycle_interval: f64,
    pub looping: bool,
    pub start_time: f64,
    pub stop_time: f64,
    pub enabled: bool,
    pub is_active: bool,
}

impl Default for TimeSensorState {
    fn default() -> Self {
        TimeSensorState {
            cycle_interval: 1.0,
            looping: false,
            start_time: 0.0,
            stop_time: 0.0,
            enabled: true,
            is_active: false,
        }
    }
}

impl TimeSensorState {
    fn stopped(&self, now: f64) -> bool {
        self.stop_time > self.start_time && now >= self.stop_time
    }

    /// The activation rule: enabled, started, not past the end of a
    /// non-looping run, and not stopped.
    pub fn active_at(&self, now: f64) -> bool {
        self.enabled
            && now >= self.start_time
            && (self.looping || now <= self.start_time + self.cycle_interval)
            && !self.stopped(now)
    }

    /// Whether a non-looping run has reached its end at `now` (rather than
    /// having been stopped or disabled).
    pub fn finished_at(&self, now: f64) -> bool {
        self.enabled && !self.looping && now >= self.start_time + self.cycle_interval && !self.stopped(now)
    }
}

/// Fraction and activity at `now`.
///
/// An active sensor reports `(Some(frac), true)`. A non-looping run at or
/// past its end reports `(Some(1.0), false)`: the final fraction is exactly
/// 1, and the sensor is no longer active. Anything else is `(None, false)`.
pub fn timesensor_fraction(state: &TimeSensorState, now: f64) -> (Option<f64>, bool) {
    if state.finished_at(now) {
        return (Some(1.0), false);
    }
    if !state.active_at(now) {
        return (None, false);
    }
    let temp = (now - state.start_time) / state.cycle_interval;
    (Some(temp - temp.floor()), true)
}
