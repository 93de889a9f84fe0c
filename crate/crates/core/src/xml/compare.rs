use std::collections::BTreeSet;

use crate::scene::{FieldValue, Node, NodePath, NodeRef, PathStep, SceneGraph};

/// Relative tolerance for real-valued fields.
pub const REAL_TOLERANCE: f64 = 1e-9;

/// True iff the scenes have the same header, isomorphic trees (kinds, DEF
/// names, effective field values, USE topology) and the same routes.
/// `meta` is not compared.
pub fn semantic_equal(a: &SceneGraph, b: &SceneGraph) -> bool {
    semantic_diff(a, b).is_empty()
}

/// Human-readable differences, in document order. Empty iff
/// [`semantic_equal`].
pub fn semantic_diff(a: &SceneGraph, b: &SceneGraph) -> Vec<String> {
    let mut d = Vec::new();
    if a.profile != b.profile {
        d.push(format!("profile: {} vs {}", a.profile, b.profile));
    }
    if a.version != b.version {
        d.push(format!("version: {} vs {}", a.version, b.version));
    }
    if a.components != b.components {
        d.push("components differ".to_string());
    }
    let mut path = NodePath::default();
    list(&a.roots, &b.roots, &mut path, &mut d);
    if a.routes.len() != b.routes.len() {
        d.push(format!("route count: {} vs {}", a.routes.len(), b.routes.len()));
    }
    for (i, (x, y)) in a.routes.iter().zip(&b.routes).enumerate() {
        if x != y {
            d.push(format!("{}: {x} vs {y}", NodePath::route(i)));
        }
    }
    d
}

fn list(a: &[NodeRef], b: &[NodeRef], path: &mut NodePath, d: &mut Vec<String>) {
    if a.len() != b.len() {
        d.push(format!("{path}: {} vs {} children", a.len(), b.len()));
    }
    for (i, (x, y)) in a.iter().zip(b).enumerate() {
        path.0.push(PathStep::Child(i));
        node_ref(x, y, path, d);
        path.0.pop();
    }
}

fn node_ref(a: &NodeRef, b: &NodeRef, path: &mut NodePath, d: &mut Vec<String>) {
    match (a, b) {
        (NodeRef::Use(x), NodeRef::Use(y)) => {
            if x != y {
                d.push(format!("{path}: USE {x} vs USE {y}"));
            }
        }
        (NodeRef::Node(x), NodeRef::Node(y)) => node(x, y, path, d),
        (NodeRef::Use(x), NodeRef::Node(_)) => d.push(format!("{path}: USE {x} vs a node")),
        (NodeRef::Node(_), NodeRef::Use(y)) => d.push(format!("{path}: a node vs USE {y}")),
    }
}

fn node(a: &Node, b: &Node, path: &mut NodePath, d: &mut Vec<String>) {
    if a.kind != b.kind {
        d.push(format!("{path}: {} vs {}", a.kind, b.kind));
        return;
    }
    if a.def_name != b.def_name {
        d.push(format!("{path}: DEF {:?} vs {:?}", a.def_name, b.def_name));
    }
    let names: BTreeSet<&String> = a.fields.keys().chain(b.fields.keys()).collect();
    for name in names {
        match (a.get(name), b.get(name)) {
            (Some(FieldValue::Node(x)), Some(FieldValue::Node(y))) => {
                path.0.push(PathStep::Field(name.clone()));
                node_ref(&x, &y, path, d);
                path.0.pop();
            }
            (x, y) => {
                let same = match (&x, &y) {
                    (Some(x), Some(y)) => values_close(x, y),
                    (None, None) => true,
                    _ => false,
                };
                if !same {
                    d.push(format!("{path}: {}.{name}: {x:?} vs {y:?}", a.kind));
                }
            }
        }
    }
    list(&a.children, &b.children, path, d);
}

fn real_close(x: f64, y: f64) -> bool {
    x == y || (x - y).abs() <= REAL_TOLERANCE * x.abs().max(y.abs())
}

fn all_close(x: &[f64], y: &[f64]) -> bool {
    x.len() == y.len() && x.iter().zip(y).all(|(a, b)| real_close(*a, *b))
}

fn flat<T, const N: usize>(v: &[T], f: impl Fn(&T) -> [f64; N]) -> Vec<f64> {
    v.iter().flat_map(f).collect()
}

/// Field equality with reals compared at [`REAL_TOLERANCE`].
pub fn values_close(a: &FieldValue, b: &FieldValue) -> bool {
    use FieldValue as V;
    match (a, b) {
        (V::Float(x), V::Float(y)) | (V::Time(x), V::Time(y)) => real_close(*x, *y),
        (V::Vec3(x), V::Vec3(y)) => all_close(&x.to_array(), &y.to_array()),
        (V::Rotation(x), V::Rotation(y)) => all_close(&x.to_array(), &y.to_array()),
        (V::Color(x), V::Color(y)) => all_close(&x.to_array(), &y.to_array()),
        (V::Floats(x), V::Floats(y)) | (V::Times(x), V::Times(y)) => all_close(x, y),
        (V::Vec3s(x), V::Vec3s(y)) => all_close(&flat(x, |p| p.to_array()), &flat(y, |p| p.to_array())),
        (V::Rotations(x), V::Rotations(y)) => all_close(&flat(x, |p| p.to_array()), &flat(y, |p| p.to_array())),
        (V::Colors(x), V::Colors(y)) => all_close(&flat(x, |p| p.to_array()), &flat(y, |p| p.to_array())),
        _ => a == b,
    }
}
