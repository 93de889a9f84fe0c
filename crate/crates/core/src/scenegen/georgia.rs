//! The Georgia map scene: the articulated train, its synchronized
//! viewpoints, the route spotlight and the navigation menu.

use std::f64::consts::PI;

use super::mesh::grid;
use super::models::{CAR_LENGTH, COUPLING_GAP, ENGINE_LENGTH};
use super::nodes::*;
use super::{Coupling, Detail, GenParams, BACKDROP_FILE, CAR_FILE, ENGINE_FILE, LOD_RANGE, SAVANNAH_FILE, SAVANNAH_INLINE};
use crate::math::{ColorRGB, Rotation, Vec3};
use crate::scene::{FieldValue, Node, NodeKind, Route, SceneGraph};

/// Atlanta to Savannah across the map, in map coordinates (x, z).
const RAIL: [(f64, f64); 8] = [
    (-110.0, -90.0),
    (-80.0, -62.0),
    (-45.0, -52.0),
    (-12.0, -24.0),
    (18.0, -2.0),
    (48.0, 26.0),
    (80.0, 48.0),
    (112.0, 82.0),
];
const RAIL_HEIGHT: f64 = 0.5;
const TRAIN_CYCLE: f64 = 40.0;
const SPOTLIGHT_CYCLE: f64 = 12.0;
const SWING_KEYS: usize = 17;

pub(crate) struct Track {
    pub points: Vec<Vec3>,
    /// Arc-length fraction at each point.
    pub keys: Vec<f64>,
    /// Unwrapped heading at each point, bisecting the adjacent segments.
    pub headings: Vec<f64>,
    pub length: f64,
}

impl Track {
    pub fn new(points: Vec<Vec3>) -> Track {
        let mut acc = vec![0.0];
        for w in points.windows(2) {
            acc.push(acc.last().unwrap() + w[0].distance(w[1]));
        }
        let length = *acc.last().unwrap();
        let keys = acc.iter().map(|s| q3(s / length)).collect();
        let seg: Vec<f64> = points.windows(2).map(|w| heading_of(w[1] - w[0])).collect();
        let mut headings = Vec::with_capacity(points.len());
        for i in 0..points.len() {
            let h = match (i.checked_sub(1).map(|j| seg[j]), seg.get(i)) {
                (Some(a), Some(b)) => a + wrap(b - a) / 2.0,
                (Some(a), None) => a,
                (None, Some(b)) => *b,
                (None, None) => 0.0,
            };
            let h = match headings.last() {
                Some(prev) => prev + wrap(h - prev),
                None => h,
            };
            headings.push(q3(h));
        }
        Track { points, keys, headings, length }
    }

    /// Heading at fraction `f`, piecewise linear through the point keys.
    pub fn heading(&self, f: f64) -> f64 {
        let f = f.clamp(0.0, 1.0);
        let i = self.keys.partition_point(|k| *k <= f).clamp(1, self.keys.len() - 1);
        let (k0, k1) = (self.keys[i - 1], self.keys[i]);
        let t = if k1 > k0 { (f - k0) / (k1 - k0) } else { 0.0 };
        self.headings[i - 1] + (self.headings[i] - self.headings[i - 1]) * t
    }

    pub fn midpoint(&self) -> Vec3 {
        (self.points[0] + self.points[self.points.len() - 1]).scale(0.5)
    }
}

fn wrap(a: f64) -> f64 {
    (a + PI).rem_euclid(2.0 * PI) - PI
}

pub(crate) fn rail() -> Track {
    Track::new(RAIL.iter().map(|(x, z)| Vec3::new(*x, RAIL_HEIGHT, *z)).collect())
}

fn hinge_name(i: usize) -> String {
    format!("Car{i}Hinge")
}

/// Front coupling of car `i` (1-based) in the engine's frame at rest.
fn coupling_z(i: usize) -> f64 {
    ENGINE_LENGTH / 2.0 + COUPLING_GAP / 2.0 + (i - 1) as f64 * (CAR_LENGTH + COUPLING_GAP)
}

/// Engine, then each car hinged at its front coupling inside the section
/// ahead of it.
fn train(p: &GenParams, track: &Track) -> (Node, Vec<Node>, Vec<Route>, Vec<Coupling>) {
    let keys = uniform_keys(SWING_KEYS);
    let mut interps = Vec::new();
    let mut routes = Vec::new();
    let mut couplings = Vec::new();

    let mut sections: Vec<Node> = Vec::new();
    let mut prev_lag = 0.0;
    for i in 1..=p.car_count {
        let c = coupling_z(i);
        let lag = (c + CAR_LENGTH / 2.0) / track.length;
        let swing: Vec<Rotation> =
            keys.iter().map(|f| yaw(track.heading(f - lag) - track.heading(f - prev_lag))).collect();
        let name = hinge_name(i);
        let interp = format!("Car{i}Swing");
        interps.push(orientation_interpolator(&interp, &keys, &swing));
        routes.push(Route::new(&interp, "value_changed", &name, "set_rotation"));
        let leader = if i == 1 { "EngineYaw".to_string() } else { hinge_name(i - 1) };
        let rear_of_leader = if i == 1 {
            ENGINE_LENGTH / 2.0 + COUPLING_GAP / 2.0
        } else {
            coupling_z(i - 1) + COUPLING_GAP / 2.0 + CAR_LENGTH + COUPLING_GAP / 2.0
        };
        couplings.push(Coupling {
            section: name.clone(),
            leader,
            front: Vec3::new(0.0, 0.0, c),
            rear: Vec3::new(0.0, 0.0, rear_of_leader),
        });
        let body = transform("", Vec3::new(0.0, 0.0, c + COUPLING_GAP / 2.0 + CAR_LENGTH / 2.0))
            .child(inline(&format!("Car{i}Model"), CAR_FILE));
        sections.push(
            transform(&name, Vec3::ZERO)
                .with("rotation", FieldValue::Rotation(swing[0]))
                .with("center", FieldValue::Vec3(Vec3::new(0.0, 0.0, c)))
                .child(body),
        );
        prev_lag = lag;
    }
    // nest from the tail forward
    let mut tail: Option<Node> = None;
    while let Some(mut s) = sections.pop() {
        if let Some(t) = tail.take() {
            s.children.push(t.into());
        }
        tail = Some(s);
    }

    let mut yaw_node = transform("EngineYaw", Vec3::ZERO)
        .with("rotation", FieldValue::Rotation(yaw(track.headings[0])))
        .child(inline("EngineModel", ENGINE_FILE));
    if let Some(t) = tail {
        yaw_node = yaw_node.child(t);
    }
    let body = transform("TrainBody", q3v(track.points[0]))
        .child(touch("TrainTouch", "Start the train"))
        .child(yaw_node);
    (body, interps, routes, couplings)
}

struct MenuItem {
    def: &'static str,
    label: &'static str,
}

/// A viewer-locked menu: the sensor's pose events drive the menu
/// Transform, which holds the items at a fixed offset from the eye.
pub(crate) fn hud_menu(prefix: &str, box_center: Vec3, box_size: Vec3, items: &[(String, String)]) -> (Vec<Node>, Vec<Route>) {
    let sensor = format!("{prefix}MenuSensor");
    let menu = format!("{prefix}Menu");
    let mut panel = transform("", Vec3::new(0.55, 0.35, -1.5));
    for (i, (def, label)) in items.iter().enumerate() {
        let texture = format!("menu/{}.png", def.trim_start_matches("Menu").to_lowercase());
        panel = panel.child(
            transform("", Vec3::new(0.0, q3(-0.12 * i as f64), 0.0))
                .child(box_shape(Vec3::new(0.3, 0.1, 0.01), ColorRGB::WHITE, Some(&texture)))
                .child(touch(def, label)),
        );
    }
    let nodes = vec![
        Node::new(NodeKind::ProximitySensor)
            .def(&sensor)
            .with("center", FieldValue::Vec3(box_center))
            .with("size", FieldValue::Vec3(box_size)),
        transform(&menu, Vec3::ZERO).child(panel),
    ];
    let routes = vec![
        Route::new(&sensor, "position_changed", &menu, "set_translation"),
        Route::new(&sensor, "orientation_changed", &menu, "set_rotation"),
    ];
    (nodes, routes)
}

pub(crate) fn georgia_scene(p: &GenParams, detail: &Detail, composite: bool) -> (SceneGraph, Vec<Coupling>) {
    let track = rail();
    let keys = &track.keys;
    let mid = track.midpoint();
    let mut routes: Vec<Route> = Vec::new();

    // viewpoints
    let ground_eye = Vec3::new(25.0, 1.7, -40.0);
    let ground_look: Vec<f64> = track.points.iter().map(|pt| heading_of(*pt - ground_eye)).collect();
    let ground_look = unwrap_all(&ground_look);
    let eye_lift = Vec3::new(0.0, 3.2, 0.0);
    let cam_keys = uniform_keys(9);
    let cam_radius = 70.0;
    let cam_pos: Vec<Vec3> = cam_keys
        .iter()
        .map(|f| mid + Vec3::new(cam_radius * (PI * (1.0 - f)).cos(), 30.0, cam_radius * (PI * (1.0 - f)).sin()))
        .collect();
    let cam_turn = unwrap_all(&cam_pos.iter().map(|c| heading_of(mid - *c)).collect::<Vec<_>>());

    let viewpoints = [
        viewpoint("GeorgiaOverhead", "Georgia Overhead", Vec3::new(0.0, 200.0, 0.0), looking_down(PI / 2.0)),
        viewpoint("GeorgiaGroundLevel", "Georgia Ground Level", ground_eye, yaw(ground_look[0])),
        viewpoint("GeorgiaEngineLevel", "Georgia Engine Level", track.points[0] + eye_lift, yaw(track.headings[0])),
        viewpoint("GeorgiaMovingCamera", "Georgia Moving Camera", cam_pos[0], yaw(cam_turn[0])),
    ];

    // the shared clock and everything it drives
    let (train_node, swing_interps, swing_routes, couplings) = train(p, &track);
    let mut interps = vec![
        position_interpolator("TrainPath", keys, &track.points),
        orientation_interpolator("EngineHeading", keys, &track.headings.iter().map(|h| yaw(*h)).collect::<Vec<_>>()),
    ];
    interps.extend(swing_interps);
    interps.push(orientation_interpolator(
        "GroundLook",
        keys,
        &ground_look.iter().map(|h| yaw(*h)).collect::<Vec<_>>(),
    ));
    interps.push(position_interpolator(
        "EngineEyePath",
        keys,
        &track.points.iter().map(|pt| *pt + eye_lift).collect::<Vec<_>>(),
    ));
    interps.push(position_interpolator("MovingCameraPath", &cam_keys, &cam_pos));
    interps.push(orientation_interpolator(
        "MovingCameraTurn",
        &cam_keys,
        &cam_turn.iter().map(|h| yaw(*h)).collect::<Vec<_>>(),
    ));
    for i in &interps {
        routes.push(Route::new("TrainPathTimer", "fraction_changed", i.def_name.as_deref().unwrap(), "set_fraction"));
    }
    routes.push(Route::new("TrainTouch", "touchTime", "TrainPathTimer", "set_startTime"));
    routes.push(Route::new("MenuTrain", "touchTime", "TrainPathTimer", "set_startTime"));
    routes.push(Route::new("MenuReset", "touchTime", "TrainPathTimer", "set_stopTime"));
    routes.push(Route::new("TrainPath", "value_changed", "TrainBody", "set_translation"));
    routes.push(Route::new("EngineHeading", "value_changed", "EngineYaw", "set_rotation"));
    routes.extend(swing_routes);
    routes.push(Route::new("GroundLook", "value_changed", "GeorgiaGroundLevel", "set_orientation"));
    routes.push(Route::new("EngineEyePath", "value_changed", "GeorgiaEngineLevel", "set_position"));
    routes.push(Route::new("EngineHeading", "value_changed", "GeorgiaEngineLevel", "set_orientation"));
    routes.push(Route::new("MovingCameraPath", "value_changed", "GeorgiaMovingCamera", "set_position"));
    routes.push(Route::new("MovingCameraTurn", "value_changed", "GeorgiaMovingCamera", "set_orientation"));

    // spotlight over the route centre, cycling yellow to white and back
    let yellow = ColorRGB::rgb(1.0, 1.0, 0.0);
    interps.push(color_interpolator("SpotlightColor", &[0.0, 0.5, 1.0], &[yellow, ColorRGB::WHITE, yellow]));
    routes.push(Route::new("SpotlightTimer", "fraction_changed", "SpotlightColor", "set_fraction"));
    routes.push(Route::new("SpotlightColor", "value_changed", "RouteSpotlight", "set_color"));
    let spotlight = Node::new(NodeKind::SpotLight)
        .def("RouteSpotlight")
        .with("color", FieldValue::Color(yellow))
        .with("location", FieldValue::Vec3(q3v(mid + Vec3::new(0.0, 60.0, 0.0))))
        .with("direction", vec3(0.0, -1.0, 0.0))
        .with("beamWidth", FieldValue::Float(0.4))
        .with("cutOffAngle", FieldValue::Float(0.6))
        .with("radius", FieldValue::Float(200.0));

    // map and content
    let n = detail.map_grid;
    let map = grid(n, n, |u, v| Vec3::new(-150.0 + 300.0 * u, 0.0, -150.0 + 300.0 * v));
    let map_shape = shape(map.to_node(), appearance(ColorRGB::rgb(0.9, 0.9, 0.85), Some("textures/georgia_map.jpg")));
    let mut content = Node::new(NodeKind::Group)
        .def("GeorgiaContent")
        .child(static_group().child(map_shape))
        .child(spotlight)
        .child(train_node);
    if p.include_debug_camera_cube {
        content = content.child(
            transform("MovingCameraMarker", q3v(cam_pos[0]))
                .with("rotation", FieldValue::Rotation(yaw(cam_turn[0])))
                .child(box_shape(Vec3::new(2.0, 2.0, 2.0), ColorRGB::rgb(1.0, 0.0, 0.0), None)),
        );
        routes.push(Route::new("MovingCameraPath", "value_changed", "MovingCameraMarker", "set_translation"));
        routes.push(Route::new("MovingCameraTurn", "value_changed", "MovingCameraMarker", "set_rotation"));
    }
    if p.include_debug_backdrop {
        content = content.child(inline("Backdrop", BACKDROP_FILE));
    }

    // navigation menu
    let mut items = vec![
        MenuItem { def: "MenuOverhead", label: "Overhead" },
        MenuItem { def: "MenuGroundLevel", label: "Ground Level" },
        MenuItem { def: "MenuEngineLevel", label: "Engine Level" },
        MenuItem { def: "MenuMovingCamera", label: "Moving Camera" },
        MenuItem { def: "MenuTrain", label: "Start the train" },
        MenuItem { def: "MenuReset", label: "Reset the train" },
    ];
    for (item, vp) in items.iter().zip(&viewpoints) {
        routes.push(Route::new(item.def, "isActive", vp.def_name.as_deref().unwrap(), "set_bind"));
    }
    if composite {
        items.push(MenuItem { def: "MenuSavannah", label: "Go to Savannah" });
        routes.push(Route::new(
            "MenuSavannah",
            "isActive",
            &format!("{SAVANNAH_INLINE}.SavannahOverhead"),
            "set_bind",
        ));
    }
    let items: Vec<(String, String)> = items.iter().map(|i| (i.def.to_string(), i.label.to_string())).collect();
    let (menu_nodes, menu_routes) = hud_menu("Georgia", Vec3::new(0.0, 50.0, 0.0), Vec3::new(400.0, 400.0, 400.0), &items);
    routes.extend(menu_routes);

    let mut scene = SceneGraph::new()
        .with_root(Node::new(NodeKind::WorldInfo).with("title", FieldValue::String("Georgia".into())))
        .with_root(Node::new(NodeKind::NavigationInfo).with("speed", FieldValue::Float(4.0)))
        .with_root(
            Node::new(NodeKind::Background)
                .def("GeorgiaSky")
                .with("skyColor", FieldValue::Colors(vec![ColorRGB::rgb(0.2, 0.4, 0.9), ColorRGB::WHITE]))
                .with("skyAngle", FieldValue::Floats(vec![1.4])),
        );
    for v in viewpoints {
        scene.roots.push(v.into());
    }
    scene.roots.push(timer("TrainPathTimer", TRAIN_CYCLE, false, -100.0).into());
    scene.roots.push(timer("SpotlightTimer", SPOTLIGHT_CYCLE, true, 0.0).into());
    for i in interps {
        scene.roots.push(i.into());
    }
    scene.roots.push(lod("GeorgiaLOD", LOD_RANGE, content).into());
    for m in menu_nodes {
        scene.roots.push(m.into());
    }
    if composite {
        scene.roots.push(
            transform("SavannahPlacement", p.savannah_offset).child(inline(SAVANNAH_INLINE, SAVANNAH_FILE)).into(),
        );
    }
    scene.routes = routes;
    (scene, couplings)
}

fn unwrap_all(angles: &[f64]) -> Vec<f64> {
    let mut out: Vec<f64> = Vec::with_capacity(angles.len());
    for a in angles {
        let v = match out.last() {
            Some(prev) => prev + wrap(a - prev),
            None => *a,
        };
        out.push(v);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn track_headings_follow_segments() {
        let t = Track::new(vec![Vec3::ZERO, Vec3::new(0.0, 0.0, -10.0), Vec3::new(10.0, 0.0, -10.0)]);
        assert_eq!(t.keys, [0.0, 0.5, 1.0]);
        assert_eq!(t.headings[0], 0.0);
        assert_eq!(t.headings[2], q3(-PI / 2.0));
        assert_eq!(t.headings[1], q3(-PI / 4.0));
        assert_eq!(t.heading(0.25), q3(-PI / 4.0) / 2.0);
        assert_eq!(t.heading(-1.0), 0.0);
    }

    #[test]
    fn unwrap_avoids_jumps() {
        let u = unwrap_all(&[3.0, -3.0, 3.1]);
        assert!(u.windows(2).all(|w| (w[1] - w[0]).abs() < PI));
    }

    #[test]
    fn rail_stays_inside_the_lod_range() {
        let t = rail();
        assert!(t.points.iter().all(|p| p.length() < LOD_RANGE));
        assert!(t.length > 200.0);
    }
}
