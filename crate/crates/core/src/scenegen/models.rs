//! The Inlined model files: station, engine, car and the debug backdrop.

use super::mesh::{facade_block, grid, hull, Mesh};
use super::nodes::{appearance, box_shape, shape, static_group, transform};
use crate::math::{ColorRGB, Vec3};
use crate::scene::{FieldValue, Node, NodeKind, SceneGraph};

pub const ENGINE_LENGTH: f64 = 8.0;
pub const CAR_LENGTH: f64 = 7.0;
pub const COUPLING_GAP: f64 = 1.0;

fn model_scene(title: &str, content: Node) -> SceneGraph {
    SceneGraph::new()
        .with_root(Node::new(NodeKind::WorldInfo).with("title", FieldValue::String(title.to_string())))
        .with_root(content)
}

fn mesh_shape(mesh: &Mesh, color: ColorRGB, texture: &str) -> Node {
    shape(mesh.to_node(), appearance(color, Some(texture)))
}

/// Locomotive centred on the origin, nose toward −Z.
pub fn engine_scene(density: usize) -> SceneGraph {
    let body = hull(ENGINE_LENGTH, 3.0, 3.6, density);
    let cab = box_shape(Vec3::new(2.6, 1.2, 2.0), ColorRGB::rgb(0.2, 0.2, 0.25), None);
    let content = static_group()
        .child(mesh_shape(&body, ColorRGB::rgb(0.7, 0.1, 0.1), "textures/engine_livery.jpg"))
        .child(transform("", Vec3::new(0.0, 4.2, 1.5)).child(cab));
    model_scene("Train Engine", content)
}

/// Passenger car centred on the origin.
pub fn car_scene(density: usize) -> SceneGraph {
    let body = hull(CAR_LENGTH, 3.0, 3.4, density);
    let content = static_group().child(mesh_shape(&body, ColorRGB::rgb(0.75, 0.75, 0.8), "textures/car_livery.jpg"));
    model_scene("Train Car", content)
}

/// Station house with platform and a canopy whose mesh resolution is
/// `density` per side.
pub fn station_scene(density: usize) -> SceneGraph {
    let house = facade_block(30.0, 10.0, 14.0, (density / 3).max(2));
    let canopy = grid(density.max(2), (density / 4).max(2), |u, v| {
        let x = -40.0 + 80.0 * u;
        let z = -4.0 + 8.0 * v;
        Vec3::new(x, 6.0 + 0.8 * (std::f64::consts::PI * v).sin(), z)
    });
    let content = static_group()
        .child(transform("", Vec3::new(0.0, 0.0, -12.0)).child(mesh_shape(
            &house,
            ColorRGB::rgb(0.6, 0.35, 0.25),
            "textures/station_brick.jpg",
        )))
        .child(mesh_shape(&canopy, ColorRGB::rgb(0.3, 0.3, 0.3), "textures/station_roof.jpg"))
        .child(
            transform("", Vec3::new(0.0, 0.5, 0.0))
                .child(box_shape(Vec3::new(90.0, 1.0, 6.0), ColorRGB::rgb(0.55, 0.55, 0.5), None)),
        );
    model_scene("Train Station", content)
}

pub fn backdrop_scene() -> SceneGraph {
    let rect = box_shape(Vec3::new(300.0, 150.0, 0.2), ColorRGB::WHITE, None);
    model_scene(
        "Backdrop",
        transform("", Vec3::new(0.0, 75.0, -170.0)).child(Node { def_name: Some("WhiteRectangleBackdrop".into()), ..rect }),
    )
}
