use std::io::{self, Write};

use serde_json::{json, Value};

use super::proximity::ViewerPose;
use crate::scene::{FieldValue, NodeRef};

/// One output event. `seq` counts records within a timestamp, so records
/// are strictly ordered by `(at, seq)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceRecord {
    pub at: f64,
    pub seq: u64,
    pub node: String,
    pub field: String,
    pub value: FieldValue,
}

impl TraceRecord {
    pub fn to_json(&self) -> Value {
        json!({
            "at": self.at,
            "seq": self.seq,
            "node": self.node,
            "field": self.field,
            "value": value_to_json(&self.value),
        })
    }
}

pub fn value_to_json(v: &FieldValue) -> Value {
    match v {
        FieldValue::Bool(b) => json!(b),
        FieldValue::Int(i) => json!(i),
        FieldValue::Float(x) | FieldValue::Time(x) => json!(x),
        FieldValue::String(s) => json!(s),
        FieldValue::Vec3(p) => json!(p.to_array()),
        FieldValue::Rotation(r) => json!(r.to_array()),
        FieldValue::Color(c) => json!(c.to_array()),
        FieldValue::Bools(v) => json!(v),
        FieldValue::Ints(v) => json!(v),
        FieldValue::Floats(v) | FieldValue::Times(v) => json!(v),
        FieldValue::Strings(v) => json!(v),
        FieldValue::Vec3s(v) => json!(v.iter().map(|p| p.to_array()).collect::<Vec<_>>()),
        FieldValue::Rotations(v) => json!(v.iter().map(|r| r.to_array()).collect::<Vec<_>>()),
        FieldValue::Colors(v) => json!(v.iter().map(|c| c.to_array()).collect::<Vec<_>>()),
        FieldValue::Node(NodeRef::Use(name)) => json!({ "use": name }),
        FieldValue::Node(NodeRef::Node(n)) => json!({ "node": n.kind.name() }),
    }
}

/// Final state appended after the records.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceSummary {
    pub events: usize,
    pub final_time: f64,
    pub viewer: ViewerPose,
    pub bound_viewpoint: Option<String>,
}

impl TraceSummary {
    pub fn to_json(&self) -> Value {
        json!({
            "summary": {
                "events": self.events,
                "final_time": self.final_time,
                "viewer_position": self.viewer.position.to_array(),
                "viewer_orientation": self.viewer.orientation.to_array(),
                "bound_viewpoint": self.bound_viewpoint,
            }
        })
    }
}

/// Writes records as JSON lines followed by the summary line.
pub fn write_trace(out: &mut dyn Write, records: &[TraceRecord], summary: &TraceSummary) -> io::Result<()> {
    for r in records {
        writeln!(out, "{}", r.to_json())?;
    }
    writeln!(out, "{}", summary.to_json())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::math::{Rotation, Vec3};

    #[test]
    fn record_line_shape() {
        let r = TraceRecord {
            at: 1.5,
            seq: 2,
            node: "Timer".into(),
            field: "fraction_changed".into(),
            value: FieldValue::Float(0.25),
        };
        assert_eq!(
            r.to_json().to_string(),
            r#"{"at":1.5,"field":"fraction_changed","node":"Timer","seq":2,"value":0.25}"#
        );
        let s = TraceSummary {
            events: 1,
            final_time: 2.0,
            viewer: ViewerPose { position: Vec3::ZERO, orientation: Rotation::IDENTITY },
            bound_viewpoint: None,
        };
        let mut buf = Vec::new();
        write_trace(&mut buf, &[r], &s).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap().lines().count(), 2);
    }
}
