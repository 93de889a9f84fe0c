//! Node shorthands for the generators.

use crate::math::{ColorRGB, Rotation, Vec3};
use crate::scene::{FieldValue, Node, NodeKind};

/// Rounds to three decimals, the precision used for hand-placed values.
pub fn q3(x: f64) -> f64 {
    let r = (x * 1000.0).round() / 1000.0;
    if r == 0.0 {
        0.0
    } else {
        r
    }
}

pub fn q3v(v: Vec3) -> Vec3 {
    Vec3::new(q3(v.x), q3(v.y), q3(v.z))
}

pub fn yaw(angle: f64) -> Rotation {
    Rotation::about_y(q3(angle))
}

/// Yaw that turns the default view direction (−Z) toward `d`.
pub fn heading_of(d: Vec3) -> f64 {
    (-d.x).atan2(-d.z)
}

pub fn vec3(x: f64, y: f64, z: f64) -> FieldValue {
    FieldValue::Vec3(Vec3::new(x, y, z))
}

pub fn strings(items: &[&str]) -> FieldValue {
    FieldValue::Strings(items.iter().map(|s| s.to_string()).collect())
}

pub fn transform(def: &str, translation: Vec3) -> Node {
    let n = Node::new(NodeKind::Transform);
    let n = if def.is_empty() { n } else { n.def(def) };
    if translation == Vec3::ZERO {
        n
    } else {
        n.with("translation", FieldValue::Vec3(translation))
    }
}

pub fn material(diffuse: ColorRGB) -> Node {
    Node::new(NodeKind::Material).with("diffuseColor", FieldValue::Color(diffuse))
}

pub fn appearance(diffuse: ColorRGB, texture: Option<&str>) -> Node {
    let a = Node::new(NodeKind::Appearance).with("material", FieldValue::Node(material(diffuse).into()));
    match texture {
        Some(url) => a.with(
            "texture",
            FieldValue::Node(Node::new(NodeKind::ImageTexture).with("url", strings(&[url])).into()),
        ),
        None => a,
    }
}

pub fn shape(geometry: Node, look: Node) -> Node {
    Node::new(NodeKind::Shape)
        .with("appearance", FieldValue::Node(look.into()))
        .with("geometry", FieldValue::Node(geometry.into()))
}

pub fn box_shape(size: Vec3, diffuse: ColorRGB, texture: Option<&str>) -> Node {
    shape(Node::new(NodeKind::Box).with("size", FieldValue::Vec3(size)), appearance(diffuse, texture))
}

pub fn viewpoint(def: &str, description: &str, position: Vec3, orientation: Rotation) -> Node {
    Node::new(NodeKind::Viewpoint)
        .def(def)
        .with("description", FieldValue::String(description.to_string()))
        .with("position", FieldValue::Vec3(q3v(position)))
        .with("orientation", FieldValue::Rotation(orientation))
}

/// Tilt about X; a positive pitch looks down.
pub fn looking_down(pitch: f64) -> Rotation {
    Rotation::new(Vec3::X, q3(-pitch)).expect("unit axis")
}

pub fn timer(def: &str, cycle: f64, looping: bool, start: f64) -> Node {
    let n = Node::new(NodeKind::TimeSensor)
        .def(def)
        .with("cycleInterval", FieldValue::Time(cycle))
        .with("startTime", FieldValue::Time(start));
    if looping {
        n.with("loop", FieldValue::Bool(true))
    } else {
        n
    }
}

pub fn touch(def: &str, description: &str) -> Node {
    Node::new(NodeKind::TouchSensor)
        .def(def)
        .with("description", FieldValue::String(description.to_string()))
}

fn keys_field(keys: &[f64]) -> FieldValue {
    FieldValue::Floats(keys.iter().map(|k| q3(*k)).collect())
}

pub fn position_interpolator(def: &str, keys: &[f64], values: &[Vec3]) -> Node {
    Node::new(NodeKind::PositionInterpolator)
        .def(def)
        .with("key", keys_field(keys))
        .with("keyValue", FieldValue::Vec3s(values.iter().map(|v| q3v(*v)).collect()))
}

pub fn orientation_interpolator(def: &str, keys: &[f64], values: &[Rotation]) -> Node {
    Node::new(NodeKind::OrientationInterpolator)
        .def(def)
        .with("key", keys_field(keys))
        .with("keyValue", FieldValue::Rotations(values.to_vec()))
}

pub fn color_interpolator(def: &str, keys: &[f64], values: &[ColorRGB]) -> Node {
    Node::new(NodeKind::ColorInterpolator)
        .def(def)
        .with("key", keys_field(keys))
        .with("keyValue", FieldValue::Colors(values.to_vec()))
}

pub fn inline(def: &str, url: &str) -> Node {
    Node::new(NodeKind::Inline).def(def).with("url", strings(&[url]))
}

pub fn static_group() -> Node {
    Node::new(NodeKind::StaticGroup)
}

/// An LOD with `content` near and an empty StaticGroup far.
pub fn lod(def: &str, range: f64, content: Node) -> Node {
    Node::new(NodeKind::Lod)
        .def(def)
        .with("range", FieldValue::Floats(vec![range]))
        .child(content)
        .child(static_group())
}

pub fn uniform_keys(n: usize) -> Vec<f64> {
    (0..n).map(|i| i as f64 / (n - 1) as f64).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn headings() {
        assert_eq!(heading_of(Vec3::new(0.0, 0.0, -1.0)), 0.0);
        let h = heading_of(Vec3::new(1.0, 0.0, 0.0));
        let fwd = Rotation::about_y(h).to_quat().rotate(Vec3::new(0.0, 0.0, -1.0));
        assert!((fwd - Vec3::X).length() < 1e-12);
        assert_eq!(q3(-0.0001), 0.0);
        assert_eq!(uniform_keys(3), [0.0, 0.5, 1.0]);
    }
}
