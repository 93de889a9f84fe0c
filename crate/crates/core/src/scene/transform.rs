use thiserror::Error;

use super::{FieldValue, Node, NodeKind, NodePath, NodeRef, PathStep, SceneGraph};
use crate::math::{Mat4, Rotation, Vec3};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PathError {
    #[error("no node at {0}")]
    NotFound(String),
    #[error("USE '{0}' at {1} does not resolve")]
    Unresolved(String, String),
}

/// Local matrix of a Transform: T·C·R·SR·S·(−SR)·(−C). Identity for any
/// other kind.
pub fn transform_matrix(node: &Node) -> Mat4 {
    if node.kind != NodeKind::Transform {
        return Mat4::IDENTITY;
    }
    compose_transform(
        node.vec3("translation"),
        node.vec3("center"),
        node.rotation("rotation"),
        node.vec3("scale"),
        node.rotation("scaleOrientation"),
    )
}

pub(crate) fn compose_transform(t: Vec3, c: Vec3, r: Rotation, s: Vec3, sr: Rotation) -> Mat4 {
    let sr_inv = sr.to_quat().conjugate();
    Mat4::translation(t)
        * Mat4::translation(c)
        * Mat4::rotation(r)
        * Mat4::rotation(sr)
        * Mat4::scaling(s)
        * Mat4::from_quat(sr_inv)
        * Mat4::translation(Vec3::ZERO - c)
}

/// Product of the Transform matrices from the root down to the addressed
/// node, including the node itself. The result maps the node's child
/// coordinates to world coordinates. Steps through a USE continue into the
/// referenced node.
pub fn world_transform(scene: &SceneGraph, path: &NodePath) -> Result<Mat4, PathError> {
    let defs = scene.defs();
    let mut m = Mat4::IDENTITY;
    let mut current: Option<&Node> = None;
    let mut walked = NodePath::default();
    for step in &path.0 {
        let r: &NodeRef = match (current, step) {
            (None, PathStep::Child(i)) => scene.roots.get(*i),
            (None, PathStep::Field(_)) => None,
            (Some(n), PathStep::Child(i)) => n.children.get(*i),
            (Some(n), PathStep::Field(f)) => match n.fields.get(f) {
                Some(FieldValue::Node(r)) => Some(r),
                _ => None,
            },
        }
        .ok_or_else(|| {
            walked.0.push(step.clone());
            PathError::NotFound(walked.to_string())
        })?;
        walked.0.push(step.clone());
        let node = match r {
            NodeRef::Node(n) => &**n,
            NodeRef::Use(name) => *defs
                .get(name.as_str())
                .ok_or_else(|| PathError::Unresolved(name.clone(), walked.to_string()))?,
        };
        m = m * transform_matrix(node);
        current = Some(node);
    }
    if current.is_none() {
        return Err(PathError::NotFound(path.to_string()));
    }
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::math::Rotation;
    use std::f64::consts::FRAC_PI_2;

    #[test]
    fn no_transform_is_identity() {
        let scene = SceneGraph::new().with_root(Node::new(NodeKind::Group).child(Node::new(NodeKind::Shape)));
        let m = world_transform(&scene, &NodePath::children(&[0, 0])).unwrap();
        assert_eq!(m.max_abs_diff(&Mat4::IDENTITY), 0.0);
    }

    #[test]
    fn translated_below() {
        let scene = SceneGraph::new().with_root(
            Node::new(NodeKind::Transform)
                .with("translation", FieldValue::Vec3(Vec3::new(0.0, -500.0, 0.0)))
                .child(Node::new(NodeKind::Group)),
        );
        let m = world_transform(&scene, &NodePath::children(&[0, 0])).unwrap();
        assert_eq!(m.translation_part(), Vec3::new(0.0, -500.0, 0.0));
    }

    #[test]
    fn rotated_then_translated() {
        let scene = SceneGraph::new().with_root(
            Node::new(NodeKind::Transform)
                .with("rotation", FieldValue::Rotation(Rotation::about_z(FRAC_PI_2)))
                .child(Node::new(NodeKind::Transform).with("translation", FieldValue::Vec3(Vec3::X))),
        );
        let m = world_transform(&scene, &NodePath::children(&[0, 0])).unwrap();
        let p = m.transform_point(Vec3::ZERO);
        assert!((p - Vec3::new(0.0, 1.0, 0.0)).length() < 1e-9, "{p:?}");
    }

    #[test]
    fn center_and_scale_orientation() {
        // rotating 180° about y around center (1,0,0) sends the origin to (2,0,0)
        let n = Node::new(NodeKind::Transform)
            .with("center", FieldValue::Vec3(Vec3::X))
            .with("rotation", FieldValue::Rotation(Rotation::about_y(std::f64::consts::PI)));
        let p = transform_matrix(&n).transform_point(Vec3::ZERO);
        assert!((p - Vec3::new(2.0, 0.0, 0.0)).length() < 1e-12);
        // non-uniform scale along a rotated frame keeps the rotated axis scaled
        let n = Node::new(NodeKind::Transform)
            .with("scale", FieldValue::Vec3(Vec3::new(2.0, 1.0, 1.0)))
            .with("scaleOrientation", FieldValue::Rotation(Rotation::about_z(FRAC_PI_2)));
        let p = transform_matrix(&n).transform_point(Vec3::Y);
        assert!((p - Vec3::new(0.0, 2.0, 0.0)).length() < 1e-12, "{p:?}");
    }

    #[test]
    fn bad_paths() {
        let scene = SceneGraph::new().with_root(Node::new(NodeKind::Group));
        assert!(world_transform(&scene, &NodePath::children(&[3])).is_err());
        assert!(world_transform(&scene, &NodePath::default()).is_err());
    }
}
