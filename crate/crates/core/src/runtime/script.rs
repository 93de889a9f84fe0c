//! Simulation scripts: one JSON object per line, e.g.
//! `{"at":1.0,"kind":"touch","node":"TrainBody"}`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::math::{Rotation, Vec3};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SimEventKind {
    /// Click on a node: fires the TouchSensor that watches it.
    Touch { node: String },
    SetViewerPose {
        position: Vec3,
        #[serde(default)]
        orientation: Rotation,
    },
    BindViewpoint { viewpoint: String },
    /// Stops every triggerable TimeSensor and sends fraction 0 down its routes.
    Reset,
    /// Advances the clock without injecting anything.
    AdvanceOnly,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimEvent {
    pub at: f64,
    #[serde(flatten)]
    pub kind: SimEventKind,
}

impl SimEvent {
    pub fn new(at: f64, kind: SimEventKind) -> Self {
        SimEvent { at, kind }
    }

    pub fn touch(at: f64, node: &str) -> Self {
        SimEvent::new(at, SimEventKind::Touch { node: node.to_string() })
    }

    pub fn bind(at: f64, viewpoint: &str) -> Self {
        SimEvent::new(at, SimEventKind::BindViewpoint { viewpoint: viewpoint.to_string() })
    }

    pub fn pose(at: f64, position: Vec3, orientation: Rotation) -> Self {
        SimEvent::new(at, SimEventKind::SetViewerPose { position, orientation })
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum ScriptError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: time {at} must be finite and non-negative")]
    BadTime { line: usize, at: f64 },
    #[error("line {line}: time {at} is earlier than the previous event")]
    OutOfOrder { line: usize, at: f64 },
}

/// Parses a JSONL script. Blank lines are skipped; events must be in
/// non-decreasing time order.
pub fn parse_script(text: &str) -> Result<Vec<SimEvent>, ScriptError> {
    let mut out: Vec<SimEvent> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        if raw.trim().is_empty() {
            continue;
        }
        let ev: SimEvent =
            serde_json::from_str(raw).map_err(|e| ScriptError::Syntax { line, message: e.to_string() })?;
        if !(ev.at.is_finite() && ev.at >= 0.0) {
            return Err(ScriptError::BadTime { line, at: ev.at });
        }
        if out.last().is_some_and(|p| p.at > ev.at) {
            return Err(ScriptError::OutOfOrder { line, at: ev.at });
        }
        out.push(ev);
    }
    Ok(out)
}

pub fn write_script(events: &[SimEvent]) -> String {
    events.iter().map(|e| serde_json::to_string(e).expect("events serialize") + "\n").collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_each_kind() {
        let text = r#"{"at":1.0,"kind":"touch","node":"TrainBody"}

{"at":2,"kind":"set_viewer_pose","position":[0,1,2],"orientation":[0,1,0,1.5]}
{"at":3,"kind":"bind_viewpoint","viewpoint":"GeorgiaOverhead"}
{"at":3,"kind":"reset"}
{"at":9,"kind":"advance_only"}"#;
        let s = parse_script(text).unwrap();
        assert_eq!(s.len(), 5);
        assert_eq!(s[0], SimEvent::touch(1.0, "TrainBody"));
        assert_eq!(s[1], SimEvent::pose(2.0, Vec3::new(0.0, 1.0, 2.0), Rotation::about_y(1.5)));
        assert_eq!(s[3].kind, SimEventKind::Reset);
        assert_eq!(parse_script(&write_script(&s)).unwrap(), s);
    }

    #[test]
    fn rejects_bad_lines() {
        assert!(matches!(parse_script(r#"{"at":1,"kind":"jump"}"#), Err(ScriptError::Syntax { line: 1, .. })));
        assert_eq!(
            parse_script(r#"{"at":-1,"kind":"reset"}"#),
            Err(ScriptError::BadTime { line: 1, at: -1.0 })
        );
        let text = "{\"at\":2,\"kind\":\"reset\"}\n{\"at\":1,\"kind\":\"reset\"}";
        assert_eq!(parse_script(text), Err(ScriptError::OutOfOrder { line: 2, at: 1.0 }));
        assert!(parse_script(r#"{"at":0,"kind":"set_viewer_pose","position":[0,0,0],"orientation":[0,0,0,1]}"#).is_err());
    }
}
