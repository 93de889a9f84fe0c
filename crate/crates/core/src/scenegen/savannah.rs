//! The Savannah city scene: riverfront blocks, the station and the
//! incoming and outgoing trains.

use std::f64::consts::PI;

use super::georgia::hud_menu;
use super::mesh::{facade_block, grid};
use super::models::{CAR_LENGTH, COUPLING_GAP, ENGINE_LENGTH};
use super::nodes::*;
use super::{Detail, GenParams, CAR_FILE, ENGINE_FILE, LOD_RANGE, STATION_FILE};
use crate::math::{ColorRGB, Vec3};
use crate::scene::{FieldValue, Node, NodeKind, Route, SceneGraph};

const TRAIN_CYCLE: f64 = 30.0;
const TRACK_Z: f64 = -60.0;
const PATH_KEYS: usize = 11;
const BLOCK_SPACING: f64 = 24.0;

/// x positions along the track: the incoming train slows into the
/// platform, the outgoing train speeds away from it.
pub(crate) fn incoming_x(f: f64) -> f64 {
    let s = 1.0 - (1.0 - f) * (1.0 - f);
    -220.0 + 210.0 * s
}

pub(crate) fn outgoing_x(f: f64) -> f64 {
    10.0 + 210.0 * f * f
}

fn consist(def: &str, start: Vec3, cars: usize) -> Node {
    let mut t = transform(def, start)
        .with("rotation", FieldValue::Rotation(yaw(-PI / 2.0)))
        .child(inline_anon(ENGINE_FILE));
    for i in 1..=cars {
        let z = ENGINE_LENGTH / 2.0 + (i - 1) as f64 * (CAR_LENGTH + COUPLING_GAP) + COUPLING_GAP + CAR_LENGTH / 2.0;
        t = t.child(transform("", Vec3::new(0.0, 0.0, z)).child(inline_anon(CAR_FILE)));
    }
    t
}

fn inline_anon(url: &str) -> Node {
    Node::new(NodeKind::Inline).with("url", strings(&[url]))
}

fn city(p: &GenParams, detail: &Detail) -> Node {
    let ground = grid(detail.ground, detail.ground, |u, v| Vec3::new(-200.0 + 400.0 * u, 0.0, -200.0 + 400.0 * v));
    let river = grid(8, 2, |u, v| Vec3::new(-200.0 + 400.0 * u, 0.05, -140.0 + 40.0 * v));
    let mut g = static_group()
        .child(shape(ground.to_node(), appearance(ColorRGB::rgb(0.4, 0.55, 0.3), Some("textures/savannah_ground.jpg"))))
        .child(shape(river.to_node(), appearance(ColorRGB::rgb(0.2, 0.35, 0.6), Some("textures/river.jpg"))));
    // blocks in a grid south of the track, the squares of the old plan
    let cols = 8;
    for b in 0..p.building_count {
        let (r, c) = (b / cols, b % cols);
        let x = -84.0 + BLOCK_SPACING * c as f64;
        let z = -20.0 + BLOCK_SPACING * r as f64;
        let h = 8.0 + 4.0 * ((b * 7) % 5) as f64;
        let block = facade_block(14.0, h, 14.0, detail.facade);
        let texture = format!("textures/facade_{}.jpg", b % 4);
        g = g.child(
            transform("", Vec3::new(x, 0.0, z))
                .child(shape(block.to_node(), appearance(ColorRGB::rgb(0.8, 0.75, 0.65), Some(&texture)))),
        );
    }
    g
}

pub(crate) fn savannah_scene(p: &GenParams, detail: &Detail) -> SceneGraph {
    let keys = uniform_keys(PATH_KEYS);
    let incoming: Vec<Vec3> = keys.iter().map(|f| Vec3::new(incoming_x(*f), 0.5, TRACK_Z)).collect();
    let outgoing: Vec<Vec3> = keys.iter().map(|f| Vec3::new(outgoing_x(*f), 0.5, TRACK_Z)).collect();
    let eye = |v: &Vec3| *v + Vec3::new(0.0, 2.0, 25.0);

    let viewpoints = [
        viewpoint("SavannahOverhead", "Savannah Overhead", Vec3::new(0.0, 150.0, 0.0), looking_down(PI / 2.0)),
        viewpoint("SavannahGroundLevel", "Savannah Ground Level", Vec3::new(-30.0, 1.7, 60.0), yaw(-0.3)),
        viewpoint("SavannahTrainStation", "Savannah Train Station", Vec3::new(0.0, 2.0, -40.0), yaw(0.0)),
        viewpoint("SavannahIncomingTrain", "Savannah Incoming Train", eye(&incoming[0]), yaw(0.0)),
        viewpoint("SavannahOutgoingTrain", "Savannah Outgoing Train", eye(&outgoing[0]), yaw(0.0)),
    ];

    let mut routes = vec![
        Route::new("IncomingTimer", "fraction_changed", "IncomingPath", "set_fraction"),
        Route::new("IncomingTimer", "fraction_changed", "IncomingEyePath", "set_fraction"),
        Route::new("IncomingPath", "value_changed", "IncomingTrain", "set_translation"),
        Route::new("IncomingEyePath", "value_changed", "SavannahIncomingTrain", "set_position"),
        Route::new("OutgoingTimer", "fraction_changed", "OutgoingPath", "set_fraction"),
        Route::new("OutgoingTimer", "fraction_changed", "OutgoingEyePath", "set_fraction"),
        Route::new("OutgoingPath", "value_changed", "OutgoingTrain", "set_translation"),
        Route::new("OutgoingEyePath", "value_changed", "SavannahOutgoingTrain", "set_position"),
        Route::new("MenuIncoming", "touchTime", "IncomingTimer", "set_startTime"),
        Route::new("MenuOutgoing", "touchTime", "OutgoingTimer", "set_startTime"),
    ];

    let content = Node::new(NodeKind::Group)
        .def("SavannahContent")
        .child(city(p, detail))
        .child(transform("", Vec3::new(0.0, 0.0, TRACK_Z - 8.0)).child(inline_anon(STATION_FILE)))
        .child(consist("IncomingTrain", incoming[0], p.car_count))
        .child(consist("OutgoingTrain", outgoing[0], p.car_count));

    let item_defs = [
        ("MenuSavannahOverhead", "Overhead"),
        ("MenuSavannahGroundLevel", "Ground Level"),
        ("MenuSavannahStation", "Train Station"),
        ("MenuSavannahIncoming", "Incoming Train"),
        ("MenuSavannahOutgoing", "Outgoing Train"),
        ("MenuIncoming", "Bring in a train"),
        ("MenuOutgoing", "Send out a train"),
    ];
    for ((def, _), vp) in item_defs.iter().zip(&viewpoints) {
        routes.push(Route::new(def, "isActive", vp.def_name.as_deref().unwrap(), "set_bind"));
    }
    let items: Vec<(String, String)> = item_defs.iter().map(|(d, l)| (d.to_string(), l.to_string())).collect();
    let (menu_nodes, menu_routes) =
        hud_menu("Savannah", Vec3::new(0.0, 50.0, 0.0), Vec3::new(400.0, 400.0, 400.0), &items);
    routes.extend(menu_routes);

    let mut scene = SceneGraph::new()
        .with_root(Node::new(NodeKind::WorldInfo).with("title", FieldValue::String("Savannah".into())))
        .with_root(
            Node::new(NodeKind::Background)
                .def("SavannahSky")
                .with("skyColor", FieldValue::Colors(vec![ColorRGB::rgb(0.3, 0.5, 0.9), ColorRGB::WHITE]))
                .with("skyAngle", FieldValue::Floats(vec![1.4])),
        );
    for v in viewpoints {
        scene.roots.push(v.into());
    }
    scene.roots.push(
        Node::new(NodeKind::Sound)
            .def("RiverSound")
            .with("location", vec3(0.0, 1.0, -120.0))
            .with("maxFront", FieldValue::Float(80.0))
            .with("maxBack", FieldValue::Float(80.0))
            .with(
                "source",
                FieldValue::Node(
                    Node::new(NodeKind::AudioClip)
                        .with("description", FieldValue::String("Riverfront".into()))
                        .with("url", strings(&["audio/riverfront_loop.wav"]))
                        .with("loop", FieldValue::Bool(true))
                        .into(),
                ),
            )
            .into(),
    );
    scene.roots.push(timer("IncomingTimer", TRAIN_CYCLE, false, -100.0).into());
    scene.roots.push(timer("OutgoingTimer", TRAIN_CYCLE, false, -100.0).into());
    scene.roots.push(position_interpolator("IncomingPath", &keys, &incoming).into());
    scene.roots.push(position_interpolator("IncomingEyePath", &keys, &incoming.iter().map(eye).collect::<Vec<_>>()).into());
    scene.roots.push(position_interpolator("OutgoingPath", &keys, &outgoing).into());
    scene.roots.push(position_interpolator("OutgoingEyePath", &keys, &outgoing.iter().map(eye).collect::<Vec<_>>()).into());
    scene.roots.push(lod("SavannahLOD", LOD_RANGE, content).into());
    for m in menu_nodes {
        scene.roots.push(m.into());
    }
    scene.routes = routes;
    scene
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trains_decelerate_in_and_accelerate_out() {
        let keys = uniform_keys(PATH_KEYS);
        let span = |g: fn(f64) -> f64| -> Vec<f64> { keys.windows(2).map(|w| g(w[1]) - g(w[0])).collect() };
        let inc = span(incoming_x);
        let out = span(outgoing_x);
        assert!(inc.windows(2).all(|w| w[1] < w[0]));
        assert!(out.windows(2).all(|w| w[1] > w[0]));
        assert_eq!(incoming_x(1.0), -10.0);
        assert_eq!(outgoing_x(0.0), 10.0);
    }
}
