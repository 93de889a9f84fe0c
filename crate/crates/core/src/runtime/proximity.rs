use serde::{Deserialize, Serialize};

use crate::math::{Mat4, Quat, Rotation, Vec3};
use crate::scene::FieldValue;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ViewerPose {
    pub position: Vec3,
    pub orientation: Rotation,
}

impl Default for ViewerPose {
    /// The X3D default viewpoint.
    fn default() -> Self {
        ViewerPose { position: Vec3::new(0.0, 0.0, 10.0), orientation: Rotation::IDENTITY }
    }
}

impl ViewerPose {
    /// World-to-viewer matrix.
    pub fn view_matrix(&self) -> Mat4 {
        let to_world = Mat4::translation(self.position) * Mat4::rotation(self.orientation);
        to_world.inverse_affine().expect("rigid transforms are invertible")
    }
}

/// An axis-aligned box in a sensor's local frame, placed in the world by
/// the product of its ancestor transforms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProximityRegion {
    pub center: Vec3,
    pub size: Vec3,
    /// Local-to-world matrix of the sensor's frame.
    pub world: Mat4,
    /// Rotation part of `world`, as the product of ancestor rotations.
    pub world_rotation: Quat,
}

impl ProximityRegion {
    pub fn to_local(&self, pose: &ViewerPose) -> (Vec3, Rotation) {
        let inv = self.world.inverse_affine().unwrap_or(Mat4::IDENTITY);
        let p = inv.transform_point(pose.position);
        let q = self.world_rotation.conjugate() * pose.orientation.to_quat();
        (p, q.normalize().to_rotation(pose.orientation.axis()))
    }

    /// Inclusive containment of a local-frame point.
    pub fn contains_local(&self, p: Vec3) -> bool {
        let d = p - self.center;
        d.x.abs() <= self.size.x / 2.0 && d.y.abs() <= self.size.y / 2.0 && d.z.abs() <= self.size.z / 2.0
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ProximityState {
    pub inside: bool,
    pub position: Option<Vec3>,
    pub orientation: Option<Rotation>,
}

/// Updates `state` for a new viewer pose at time `now` and returns the
/// output events in emission order.
///
/// Entering emits `isActive`, `enterTime`, `position_changed` and
/// `orientation_changed`; while inside only changed components are
/// emitted; leaving emits `exitTime` and `isActive`.
pub fn evaluate_proximity(
    region: &ProximityRegion,
    state: &mut ProximityState,
    pose: &ViewerPose,
    now: f64,
) -> Vec<(&'static str, FieldValue)> {
    let (p, q) = region.to_local(pose);
    let inside = region.contains_local(p);
    let mut out = Vec::new();
    match (state.inside, inside) {
        (false, true) => {
            out.push(("isActive", FieldValue::Bool(true)));
            out.push(("enterTime", FieldValue::Time(now)));
            out.push(("position_changed", FieldValue::Vec3(p)));
            out.push(("orientation_changed", FieldValue::Rotation(q)));
            *state = ProximityState { inside: true, position: Some(p), orientation: Some(q) };
        }
        (true, true) => {
            if state.position != Some(p) {
                out.push(("position_changed", FieldValue::Vec3(p)));
                state.position = Some(p);
            }
            if state.orientation != Some(q) {
                out.push(("orientation_changed", FieldValue::Rotation(q)));
                state.orientation = Some(q);
            }
        }
        (true, false) => {
            out.push(("exitTime", FieldValue::Time(now)));
            out.push(("isActive", FieldValue::Bool(false)));
            *state = ProximityState::default();
        }
        (false, false) => {}
    }
    out
}
