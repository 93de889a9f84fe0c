use std::collections::BTreeMap;

use proptest::prelude::*;

use scenery::math::{ColorRGB, Rotation, Vec3};
use scenery::random::{random_scene_from_seed, RandomSceneOptions};
use scenery::runtime::{
    interpolate_color, interpolate_orientation, interpolate_position, lod_index, write_trace, KeyframeTrack, SimConfig,
    SimEvent, Simulation,
};
use scenery::scene::{FieldValue, NoInlines, Node, NodeKind, Route, SceneGraph};
use scenery::scenegen::{generate_composite, generate_georgia, GenParams, SAVANNAH_INLINE};

fn vec3(r: f64) -> impl Strategy<Value = Vec3> {
    (-r..r, -r..r, -r..r).prop_map(|(x, y, z)| Vec3::new(x, y, z))
}

fn rotation() -> impl Strategy<Value = Rotation> {
    (vec3(1.0), -3.0..3.0f64)
        .prop_filter("axis", |(a, _)| a.length() > 1e-3)
        .prop_map(|(a, ang)| Rotation::new(a, ang).unwrap())
}

fn sorted_keys() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.0..=1.0f64, 1..8).prop_map(|mut k| {
        k.sort_by(f64::total_cmp);
        k
    })
}

fn trace_text(scene: &SceneGraph, events: &[SimEvent], until: f64) -> String {
    let mut sim = Simulation::new(scene, &NoInlines, SimConfig::default());
    match sim.step_to(until, events) {
        Ok(recs) => {
            let mut out = Vec::new();
            write_trace(&mut out, &recs, &sim.summary()).unwrap();
            String::from_utf8(out).unwrap()
        }
        Err(e) => format!("error: {e}"),
    }
}

/// A ring of Transforms, each feeding the next, driven by a proximity
/// sensor.
fn ring(n: usize) -> SceneGraph {
    let mut s = SceneGraph::new().with_root(
        Node::new(NodeKind::ProximitySensor)
            .def("Prox")
            .with("size", FieldValue::Vec3(Vec3::new(1000.0, 1000.0, 1000.0))),
    );
    s = s.with_route(Route::new("Prox", "position_changed", "T0", "set_translation"));
    for i in 0..n {
        s = s.with_root(Node::new(NodeKind::Transform).def(format!("T{i}")));
        s = s.with_route(Route::new(&format!("T{i}"), "translation_changed", &format!("T{}", (i + 1) % n), "set_translation"));
    }
    s
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn runs_are_deterministic(seed in any::<u64>(), times in prop::collection::vec(0.0..5.0f64, 0..6), picks in prop::collection::vec(any::<prop::sample::Index>(), 6)) {
        let scene = random_scene_from_seed(seed, RandomSceneOptions::default());
        let defs: Vec<String> = scene.defs().keys().map(|s| s.to_string()).collect();
        let events: Vec<SimEvent> = times
            .iter()
            .zip(&picks)
            .map(|(t, p)| {
                if defs.is_empty() {
                    SimEvent::pose(*t, Vec3::new(*t, 0.0, 0.0), Rotation::IDENTITY)
                } else {
                    SimEvent::touch(*t, &defs[p.index(defs.len())])
                }
            })
            .collect();
        prop_assert_eq!(trace_text(&scene, &events, 5.0), trace_text(&scene, &events, 5.0));
    }

    #[test]
    fn cycles_terminate(n in 1usize..6, poses in prop::collection::vec(vec3(400.0), 1..10)) {
        let scene = ring(n);
        let mut sim = Simulation::new(&scene, &NoInlines, SimConfig::default());
        let events: Vec<SimEvent> = poses
            .iter()
            .enumerate()
            .map(|(i, p)| SimEvent::pose(0.1 * (i + 1) as f64, *p, Rotation::IDENTITY))
            .collect();
        let recs = sim.step_to(2.0, &events).unwrap();
        let mut per_stamp: BTreeMap<(u64, String), usize> = BTreeMap::new();
        for r in recs.iter().filter(|r| r.field == "translation") {
            *per_stamp.entry((r.at.to_bits(), r.node.clone())).or_default() += 1;
        }
        prop_assert!(!per_stamp.is_empty());
        // a ring of n routes lets the first Transform hear its own change once
        prop_assert!(per_stamp.iter().all(|((_, node), c)| *c == 1 || (node == "T0" && *c == 2)), "{:?}", per_stamp);
        let last = *poses.last().unwrap();
        for i in 0..n {
            prop_assert_eq!(sim.field(&format!("T{i}"), "translation"), Some(FieldValue::Vec3(last)));
        }
    }

    #[test]
    fn position_is_exact_at_keys_and_clamped(keys in sorted_keys(), vals in prop::collection::vec(vec3(100.0), 8), f in -1.0..2.0f64) {
        let vals = vals[..keys.len()].to_vec();
        let track = KeyframeTrack::new(keys.clone(), vals.clone()).unwrap();
        let n = keys.len();
        prop_assert_eq!(interpolate_position(&track, keys[0] - 1.0), vals[0]);
        prop_assert_eq!(interpolate_position(&track, keys[n - 1] + 1.0), vals[n - 1]);
        for (i, k) in keys.iter().enumerate() {
            // with duplicate keys the last value at that key wins
            let last = keys.iter().rposition(|x| x == k).unwrap();
            let want = if *k <= keys[0] { vals[0] } else if i == last { vals[i] } else { vals[last] };
            prop_assert_eq!(interpolate_position(&track, *k), want);
        }
        if f > keys[0] && f < keys[n - 1] {
            let v = interpolate_position(&track, f);
            let lo = vals.iter().fold(Vec3::new(f64::MAX, f64::MAX, f64::MAX), |a, b| Vec3::new(a.x.min(b.x), a.y.min(b.y), a.z.min(b.z)));
            let hi = vals.iter().fold(Vec3::new(f64::MIN, f64::MIN, f64::MIN), |a, b| Vec3::new(a.x.max(b.x), a.y.max(b.y), a.z.max(b.z)));
            prop_assert!(v.x >= lo.x - 1e-9 && v.y >= lo.y - 1e-9 && v.z >= lo.z - 1e-9);
            prop_assert!(v.x <= hi.x + 1e-9 && v.y <= hi.y + 1e-9 && v.z <= hi.z + 1e-9);
        }
    }

    #[test]
    fn orientation_and_color_clamp(keys in sorted_keys(), rots in prop::collection::vec(rotation(), 8), cols in prop::collection::vec((0.0..=1.0f64, 0.0..=1.0f64, 0.0..=1.0f64), 8), f in 0.0..=1.0f64) {
        let n = keys.len();
        let rots = rots[..n].to_vec();
        let cols: Vec<ColorRGB> = cols[..n].iter().map(|(r, g, b)| ColorRGB::rgb(*r, *g, *b)).collect();
        let rt = KeyframeTrack::new(keys.clone(), rots.clone()).unwrap();
        let ct = KeyframeTrack::new(keys.clone(), cols.clone()).unwrap();
        prop_assert_eq!(interpolate_orientation(&rt, keys[0] - 0.5), rots[0]);
        prop_assert_eq!(interpolate_orientation(&rt, keys[n - 1] + 0.5), rots[n - 1]);
        prop_assert_eq!(interpolate_color(&ct, keys[0] - 0.5), cols[0]);
        prop_assert_eq!(interpolate_color(&ct, keys[n - 1] + 0.5), cols[n - 1]);
        let c = interpolate_color(&ct, f);
        prop_assert!(c.in_range() || [c.r, c.g, c.b].iter().all(|x| (-1e-9..=1.0 + 1e-9).contains(x)));
        let r = interpolate_orientation(&rt, f);
        prop_assert!((r.axis().length() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn lod_picks_the_band(mut ranges in prop::collection::vec(0.0..1000.0f64, 0..6), d in 0.0..1200.0f64) {
        ranges.sort_by(f64::total_cmp);
        let i = lod_index(&ranges, d);
        prop_assert!(i <= ranges.len());
        prop_assert!(i == 0 || ranges[i - 1] <= d);
        prop_assert!(i == ranges.len() || d < ranges[i]);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn hinges_stay_joined(t in 0.0..45.0f64, cars in 1usize..5) {
        let p = GenParams { car_count: cars, ..Default::default() };
        let g = generate_georgia(&p).unwrap();
        let mut sim = Simulation::new(g.scene(), &g, SimConfig::default());
        sim.step_to(t, &[SimEvent::touch(0.0, "TrainTouch")]).unwrap();
        prop_assert_eq!(g.manifest.couplings.len(), cars);
        for c in &g.manifest.couplings {
            let front = sim.world_transform_of(&c.section).unwrap().transform_point(c.front);
            let rear = sim.world_transform_of(&c.leader).unwrap().transform_point(c.rear);
            prop_assert!(front.distance(rear) <= 1e-4, "{}: {}", c.section, front.distance(rear));
        }
    }

    #[test]
    fn hud_follows_the_viewer(poses in prop::collection::vec((-190.0..190.0f64, -140.0..240.0f64, -190.0..190.0f64, rotation()), 1..20)) {
        let g = generate_georgia(&GenParams::default()).unwrap();
        let mut sim = Simulation::new(g.scene(), &g, SimConfig::default());
        sim.step_to(0.0, &[]).unwrap();
        let reference = sim.viewer_pose().view_matrix() * sim.world_transform_of("GeorgiaMenu").unwrap();
        for (i, (x, y, z, r)) in poses.into_iter().enumerate() {
            let at = 0.05 * (i + 1) as f64;
            sim.step_to(at, &[SimEvent::pose(at, Vec3::new(x, y, z), r)]).unwrap();
            let m = sim.viewer_pose().view_matrix() * sim.world_transform_of("GeorgiaMenu").unwrap();
            prop_assert!(m.max_abs_diff(&reference) <= 1e-6);
        }
    }

    #[test]
    fn scenes_never_both_show(p in vec3(900.0)) {
        let g = generate_composite(&GenParams::default()).unwrap();
        let mut sim = Simulation::new(g.scene(), &g, SimConfig::default());
        sim.step_to(0.1, &[SimEvent::pose(0.1, p, Rotation::IDENTITY)]).unwrap();
        let georgia = sim.lod_level("GeorgiaLOD").unwrap();
        let savannah = sim.lod_level(&format!("{SAVANNAH_INLINE}.SavannahLOD")).unwrap();
        prop_assert!(georgia == 1 || savannah == 1, "viewer at {p:?}");
    }
}

#[test]
fn menu_stops_the_train_and_reset_rewinds_it() {
    use scenery::runtime::SimEventKind;
    let g = generate_georgia(&GenParams::default()).unwrap();
    let mut sim = Simulation::new(g.scene(), &g, SimConfig::default());
    let engine = |sim: &Simulation| sim.world_transform_of("EngineYaw").unwrap().translation_part();
    sim.step_to(0.0, &[]).unwrap();
    let start = engine(&sim);
    sim.step_to(5.0, &[SimEvent::touch(0.0, "TrainTouch"), SimEvent::touch(5.0, "MenuReset")]).unwrap();
    let stopped = engine(&sim);
    assert!(stopped.distance(start) > 1.0);
    sim.step_to(10.0, &[]).unwrap();
    assert_eq!(engine(&sim), stopped);
    sim.step_to(11.0, &[SimEvent::new(10.5, SimEventKind::Reset)]).unwrap();
    assert_eq!(engine(&sim), start);
}
