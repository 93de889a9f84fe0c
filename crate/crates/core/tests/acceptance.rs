//! Acceptance run: one PASS/FAIL line per criterion.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use rand::{Rng, RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

use scenery::binary::{compression_report, decode_binary, encode_binary, EncodeOptions, HEADER_LEN};
use scenery::math::{ColorRGB, Quat, Rotation, Vec3};
use scenery::random::{random_scene_from_seed, RandomSceneOptions};
use scenery::runtime::{
    hsv_to_rgb, interpolate_color, interpolate_orientation, interpolate_position, rgb_to_hsv, slerp_rotation,
    timesensor_fraction, write_trace, KeyframeTrack, SimConfig, SimEvent, Simulation, TimeSensorState, TraceRecord,
};
use scenery::scene::{FieldValue, Node, NodeKind, NoInlines, Route, SceneGraph};
use scenery::scenegen::{
    generate_bench_corpus, generate_composite, generate_georgia, Artifact, GenParams, SAVANNAH_INLINE,
};
use scenery::xml::{parse_xml, semantic_diff, serialize_xml};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("report arithmetic", report_arithmetic),
        ("compression on the bench corpus", compression),
        ("round trip and canonical fixpoint", round_trip),
        ("interpolator oracles", interpolator_oracles),
        ("time sensor", time_sensor),
        ("hinge continuity", hinge_continuity),
        ("dual-scene exclusion", dual_scene_exclusion),
        ("HUD invariance", hud_invariance),
        ("determinism and robustness", determinism_and_fuzz),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let r = catch_unwind(f).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let ms = t.elapsed().as_secs_f64() * 1e3;
        match r {
            Ok(detail) => println!("PASS {}. {name} ({ms:.0} ms): {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {}. {name} ({ms:.0} ms): {detail}", i + 1);
            }
        }
    }
    if failed > 0 {
        println!("{failed} criterion(s) failed");
        std::process::exit(1);
    }
}

// 1 -------------------------------------------------------------------

fn report_arithmetic() -> Outcome {
    let pairs = [
        ("Georgia Scene", 11_791u64, 4_808u64),
        ("Savannah Scene", 98_078, 37_494),
        ("Train Station", 54_717, 25_481),
        ("Train Engine", 502_209, 63_766),
        ("Train Car", 391_858, 73_575),
    ];
    let t = Instant::now();
    let r = compression_report(&pairs).map_err(|e| e.to_string())?;
    let elapsed = t.elapsed();
    let got: Vec<f64> = r.rows.iter().map(|row| row.reduction_pct).collect();
    ensure(got == [59.22, 61.77, 53.43, 87.30, 81.22], || format!("rows {got:?}"))?;
    ensure(r.average_reduction_pct == 68.59, || format!("average {}", r.average_reduction_pct))?;
    ensure(elapsed < Duration::from_millis(1), || format!("took {elapsed:?}"))?;
    Ok(format!("rows {got:?}, average {} in {elapsed:?}", r.average_reduction_pct))
}

// 2 -------------------------------------------------------------------

fn compression() -> Outcome {
    let t = Instant::now();
    let corpus = generate_bench_corpus(&GenParams::default()).map_err(|e| e.to_string())?;
    let mut rows = Vec::new();
    for a in &corpus {
        let target = a.artifact.target_xml_bytes() as f64;
        let x = a.xml_bytes as f64;
        ensure((x - target).abs() <= 0.25 * target, || format!("{}: {x} bytes vs {target}", a.label))?;
        let bin = encode_binary(&a.scene, EncodeOptions::default()).map_err(|e| e.to_string())?;
        rows.push((a.label.clone(), a.xml_bytes, bin.len() as u64));
    }
    let r = compression_report(&rows).map_err(|e| e.to_string())?;
    for (a, row) in corpus.iter().zip(&r.rows) {
        let floor = if matches!(a.artifact, Artifact::Engine | Artifact::Car) { 70.0 } else { 50.0 };
        ensure(row.reduction_pct >= floor, || format!("{}: {}% < {floor}%", row.label, row.reduction_pct))?;
    }
    ensure(r.average_reduction_pct >= 55.0, || format!("mean {}%", r.average_reduction_pct))?;
    let elapsed = t.elapsed();
    ensure(elapsed < Duration::from_secs(10), || format!("took {elapsed:?}"))?;
    let per: Vec<String> = r.rows.iter().map(|r| format!("{} {:.2}%", r.label, r.reduction_pct)).collect();
    Ok(format!("{}; mean {:.2}%", per.join(", "), r.average_reduction_pct))
}

// 3 -------------------------------------------------------------------

fn through_binary(s: &SceneGraph, compress: bool) -> Result<SceneGraph, String> {
    let opts = EncodeOptions { compress_payload: compress, ..Default::default() };
    let bin = encode_binary(s, opts).map_err(|e| e.to_string())?;
    decode_binary(&bin).map_err(|e| e.to_string())
}

fn round_trip_one(label: &str, s: &SceneGraph) -> Result<(), String> {
    let xml = serialize_xml(s);
    let parsed = parse_xml(&xml).map_err(|d| format!("{label}: {d:?}"))?;
    ensure(serialize_xml(&parsed) == xml, || format!("{label}: serialize∘parse∘serialize differs"))?;
    for compress in [true, false] {
        let back = through_binary(&parsed, compress)?;
        let again = parse_xml(&serialize_xml(&back)).map_err(|d| format!("{label}: {d:?}"))?;
        let diff = semantic_diff(s, &again);
        ensure(diff.is_empty(), || format!("{label}: {:?}", &diff[..diff.len().min(3)]))?;
    }
    Ok(())
}

fn round_trip() -> Outcome {
    let t = Instant::now();
    let opts = RandomSceneOptions::default();
    for seed in 0..1000 {
        round_trip_one(&format!("seed {seed}"), &random_scene_from_seed(seed, opts))?;
    }
    let corpus = generate_bench_corpus(&GenParams::default()).map_err(|e| e.to_string())?;
    for a in &corpus {
        round_trip_one(&a.label, &a.scene)?;
    }
    let elapsed = t.elapsed();
    ensure(elapsed < Duration::from_secs(60), || format!("took {elapsed:?}"))?;
    Ok(format!("1000 random scenes and {} corpus files, both payload modes", corpus.len()))
}

// 4 -------------------------------------------------------------------

/// Span containing `f` by linear scan: `Ok(i)` for a clamped or exact
/// value, `Err((i, t))` for a blend.
fn scan(keys: &[f64], f: f64) -> Result<usize, (usize, f64)> {
    let n = keys.len();
    if f <= keys[0] {
        return Ok(0);
    }
    if f >= keys[n - 1] {
        return Ok(n - 1);
    }
    let mut i = 0;
    for (j, k) in keys.iter().enumerate().take(n - 1) {
        if *k <= f {
            i = j;
        }
    }
    let t = (f - keys[i]) / (keys[i + 1] - keys[i]);
    if t == 0.0 {
        Ok(i)
    } else {
        Err((i, t))
    }
}

fn random_keys(rng: &mut impl Rng) -> Vec<f64> {
    let n = rng.random_range(1..=10);
    let mut keys: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..=1.0)).collect();
    if n > 2 && rng.random_bool(0.2) {
        keys[1] = keys[0];
    }
    keys.sort_by(f64::total_cmp);
    keys
}

fn random_fraction(rng: &mut impl Rng, keys: &[f64]) -> f64 {
    if rng.random_bool(0.2) {
        keys[rng.random_range(0..keys.len())]
    } else {
        rng.random_range(-0.2..1.2)
    }
}

fn random_rotation(rng: &mut impl Rng) -> Rotation {
    loop {
        let a = Vec3::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        if a.length() > 0.1 {
            return Rotation::new(a, rng.random_range(-3.0..3.0)).unwrap();
        }
    }
}

/// Angle between the rotations two unit quaternions represent.
fn quat_angle(a: Quat, b: Quat) -> f64 {
    let b = if a.dot(b) < 0.0 { -b } else { b };
    let diff = ((a.w - b.w).powi(2) + (a.x - b.x).powi(2) + (a.y - b.y).powi(2) + (a.z - b.z).powi(2)).sqrt();
    let sum = ((a.w + b.w).powi(2) + (a.x + b.x).powi(2) + (a.y + b.y).powi(2) + (a.z + b.z).powi(2)).sqrt();
    4.0 * diff.atan2(sum)
}

fn oracle_hsv(c: ColorRGB) -> (f64, f64, f64) {
    let max = c.r.max(c.g).max(c.b);
    let min = c.r.min(c.g).min(c.b);
    let delta = max - min;
    let s = if max == 0.0 { 0.0 } else { delta / max };
    let h = if delta == 0.0 {
        0.0
    } else if max == c.r {
        60.0 * ((c.g - c.b) / delta).rem_euclid(6.0)
    } else if max == c.g {
        60.0 * ((c.b - c.r) / delta + 2.0)
    } else {
        60.0 * ((c.r - c.g) / delta + 4.0)
    };
    (h, s, max)
}

fn oracle_rgb(h: f64, s: f64, v: f64) -> ColorRGB {
    let c = v * s;
    let hp = h.rem_euclid(360.0) / 60.0;
    let x = c * (1.0 - (hp.rem_euclid(2.0) - 1.0).abs());
    let (r, g, b) = match hp as u32 {
        0 => (c, x, 0.0),
        1 => (x, c, 0.0),
        2 => (0.0, c, x),
        3 => (0.0, x, c),
        4 => (x, 0.0, c),
        _ => (c, 0.0, x),
    };
    let m = v - c;
    ColorRGB::rgb(r + m, g + m, b + m)
}

fn oracle_color_mix(a: ColorRGB, b: ColorRGB, t: f64) -> ColorRGB {
    let (mut h0, s0, v0) = oracle_hsv(a);
    let (mut h1, s1, v1) = oracle_hsv(b);
    if s0 == 0.0 && s1 == 0.0 {
        h0 = 0.0;
        h1 = 0.0;
    } else if s0 == 0.0 {
        h0 = h1;
    } else if s1 == 0.0 {
        h1 = h0;
    }
    let mut dh = (h1 - h0).rem_euclid(360.0);
    if dh > 180.0 {
        dh -= 360.0;
    }
    oracle_rgb(h0 + dh * t, s0 + (s1 - s0) * t, v0 + (v1 - v0) * t)
}

fn color_dist(a: ColorRGB, b: ColorRGB) -> f64 {
    (a.r - b.r).abs().max((a.g - b.g).abs()).max((a.b - b.b).abs())
}

fn interpolator_oracles() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let samples = 10_000;
    let (mut worst_p, mut worst_o, mut worst_c) = (0.0f64, 0.0f64, 0.0f64);
    for _ in 0..samples {
        // position
        let keys = random_keys(&mut rng);
        let vals: Vec<Vec3> = keys
            .iter()
            .map(|_| Vec3::new(rng.random_range(-500.0..500.0), rng.random_range(-500.0..500.0), rng.random_range(-500.0..500.0)))
            .collect();
        let f = random_fraction(&mut rng, &keys);
        let got = interpolate_position(&KeyframeTrack::new(keys.clone(), vals.clone()).unwrap(), f);
        let want = match scan(&keys, f) {
            Ok(i) => vals[i],
            Err((i, t)) => vals[i].scale(1.0 - t) + vals[i + 1].scale(t),
        };
        let err = (got - want).length() / want.length().max(1.0);
        worst_p = worst_p.max(err);
        if let Ok(i) = scan(&keys, f) {
            ensure(got == vals[i], || format!("position at key {f} is not exact"))?;
        }

        // orientation
        let keys = random_keys(&mut rng);
        let vals: Vec<Rotation> = keys.iter().map(|_| random_rotation(&mut rng)).collect();
        let f = random_fraction(&mut rng, &keys);
        let got = interpolate_orientation(&KeyframeTrack::new(keys.clone(), vals.clone()).unwrap(), f);
        match scan(&keys, f) {
            Ok(i) => ensure(got == vals[i], || format!("orientation at key {f} is not exact"))?,
            Err((i, t)) => {
                let (a, b, r) = (vals[i].to_quat(), vals[i + 1].to_quat(), got.to_quat());
                let theta = quat_angle(a, b);
                let e1 = (quat_angle(a, r) - t * theta).abs();
                let e2 = (quat_angle(r, b) - (1.0 - t) * theta).abs();
                worst_o = worst_o.max(e1).max(e2);
            }
        }

        // color
        let keys = random_keys(&mut rng);
        let vals: Vec<ColorRGB> = keys
            .iter()
            .map(|_| {
                if rng.random_bool(0.1) {
                    let g = rng.random_range(0.0..=1.0);
                    ColorRGB::rgb(g, g, g)
                } else {
                    ColorRGB::rgb(rng.random_range(0.0..=1.0), rng.random_range(0.0..=1.0), rng.random_range(0.0..=1.0))
                }
            })
            .collect();
        let f = random_fraction(&mut rng, &keys);
        let got = interpolate_color(&KeyframeTrack::new(keys.clone(), vals.clone()).unwrap(), f);
        let want = match scan(&keys, f) {
            Ok(i) => vals[i],
            Err((i, t)) => oracle_color_mix(vals[i], vals[i + 1], t),
        };
        worst_c = worst_c.max(color_dist(got, want));
        let c = vals[0];
        let (h, s, v) = rgb_to_hsv(c);
        worst_c = worst_c.max(color_dist(hsv_to_rgb(h, s, v), c));
        worst_c = worst_c.max(color_dist(oracle_rgb(h, s, v), c));
    }
    ensure(worst_p <= 1e-9, || format!("position error {worst_p:e}"))?;
    ensure(worst_o <= 1e-9, || format!("orientation angle error {worst_o:e}"))?;
    ensure(worst_c <= 1e-6, || format!("color error {worst_c:e}"))?;

    // analytic checks
    let a = Rotation::IDENTITY;
    let b = Rotation::new(Vec3::Y, std::f64::consts::FRAC_PI_2).unwrap();
    let mid = slerp_rotation(a, b, 0.5);
    let half = quat_angle(a.to_quat(), mid.to_quat());
    ensure((half - std::f64::consts::FRAC_PI_4).abs() < 1e-12, || format!("90° bisection gave {half}"))?;
    let yellow = ColorRGB::rgb(1.0, 1.0, 0.0);
    let track = KeyframeTrack::new(vec![0.0, 1.0], vec![yellow, ColorRGB::WHITE]).unwrap();
    let m = interpolate_color(&track, 0.5);
    ensure(color_dist(m, ColorRGB::rgb(1.0, 1.0, 0.5)) < 1e-12, || format!("yellow→white midpoint {m:?}"))?;
    Ok(format!(
        "{samples} samples per type; worst errors position {worst_p:.1e}, orientation {worst_o:.1e} rad, color {worst_c:.1e}"
    ))
}

// 5 -------------------------------------------------------------------

fn timer_scene(looping: bool) -> SceneGraph {
    let mut t = Node::new(NodeKind::TimeSensor).def("Clock").with("cycleInterval", FieldValue::Time(12.0));
    if looping {
        t.set("loop", FieldValue::Bool(true));
    }
    SceneGraph::new().with_root(t)
}

fn records_of<'a>(recs: &'a [TraceRecord], node: &str, field: &str) -> Vec<&'a TraceRecord> {
    recs.iter().filter(|r| r.node == node && r.field == field).collect()
}

fn time_sensor() -> Outcome {
    let st = TimeSensorState { cycle_interval: 12.0, ..Default::default() };
    ensure(timesensor_fraction(&st, 3.0) == (Some(0.25), true), || "fraction(3 s) != 0.25".into())?;
    let looping = TimeSensorState { looping: true, ..st };
    ensure(timesensor_fraction(&looping, 18.0) == (Some(0.5), true), || "looping fraction(18 s) != 0.5".into())?;

    let mut sim = Simulation::new(&timer_scene(false), &NoInlines, SimConfig::default());
    let recs = sim.step_to(14.0, &[]).map_err(|e| e.to_string())?;
    let fr = records_of(&recs, "Clock", "fraction_changed");
    let at3 = fr.iter().find(|r| r.at == 3.0).map(|r| r.value.clone());
    ensure(at3 == Some(FieldValue::Float(0.25)), || format!("simulated fraction at 3 s: {at3:?}"))?;
    let ones: Vec<_> = fr.iter().filter(|r| r.value == FieldValue::Float(1.0)).collect();
    ensure(ones.len() == 1, || format!("{} fraction 1.0 events", ones.len()))?;
    let last = fr.last().ok_or("no fraction events")?;
    ensure(last.value == FieldValue::Float(1.0), || format!("last fraction {:?}", last.value))?;
    let active = records_of(&recs, "Clock", "isActive");
    ensure(
        active.last().map(|r| (&r.value, r.at)) == Some((&FieldValue::Bool(false), last.at)),
        || "run does not end with isActive FALSE at the final fraction".into(),
    )?;

    let mut sim = Simulation::new(&timer_scene(true), &NoInlines, SimConfig::default());
    let recs = sim.step_to(18.0, &[]).map_err(|e| e.to_string())?;
    let at18 = records_of(&recs, "Clock", "fraction_changed").last().map(|r| (r.at, r.value.clone()));
    ensure(at18 == Some((18.0, FieldValue::Float(0.5))), || format!("looping run at 18 s: {at18:?}"))?;
    Ok(format!("fraction(3)=0.25, looping fraction(18)=0.5, final emission 1.0 at {} s", last.at))
}

// 6 -------------------------------------------------------------------

fn hinge_continuity() -> Outcome {
    let g = generate_georgia(&GenParams::default()).map_err(|e| e.to_string())?;
    let couplings = g.manifest.couplings.clone();
    ensure(!couplings.is_empty(), || "no couplings".into())?;
    let mut sim = Simulation::new(g.scene(), &g, SimConfig::default());
    sim.step_to(0.0, &[SimEvent::touch(0.0, "TrainTouch")]).map_err(|e| e.to_string())?;
    let cycle = 40.0;
    let samples = (cycle * 30.0) as u64 + 30;
    let (mut worst, mut max_swing) = (0.0f64, 0.0f64);
    for k in 1..=samples {
        let t = k as f64 / 30.0;
        sim.step_to(t, &[]).map_err(|e| e.to_string())?;
        for c in &couplings {
            let sec = sim.world_transform_of(&c.section).ok_or("section missing")?;
            let lead = sim.world_transform_of(&c.leader).ok_or("leader missing")?;
            let front = sec.transform_point(c.front);
            let rear = lead.transform_point(c.rear);
            worst = worst.max(front.distance(rear));
            if let Some(FieldValue::Rotation(r)) = sim.field(&c.section, "rotation") {
                max_swing = max_swing.max(r.angle().abs());
            }
        }
    }
    ensure(worst <= 1e-4, || format!("coupling gap {worst:e}"))?;
    ensure(max_swing > 0.01, || format!("sections never swing (max {max_swing})"))?;
    Ok(format!(
        "{samples} samples at 30 Hz over {} couplings; worst gap {worst:.1e}, largest swing {:.1}°",
        couplings.len(),
        max_swing.to_degrees()
    ))
}

// 7 -------------------------------------------------------------------

fn dual_scene_exclusion() -> Outcome {
    let g = generate_composite(&GenParams::default()).map_err(|e| e.to_string())?;
    let m = &g.manifest;
    ensure(
        (m.viewpoints.len(), m.static_viewpoints(), m.animated_viewpoints()) == (9, 4, 5),
        || format!("inventory {} / {} / {}", m.viewpoints.len(), m.static_viewpoints(), m.animated_viewpoints()),
    )?;
    let names: Vec<String> = m.viewpoints.iter().filter_map(|v| v.name.clone()).collect();
    let savannah_lod = format!("{SAVANNAH_INLINE}.SavannahLOD");
    let in_savannah = |n: &str| n.starts_with(&format!("{SAVANNAH_INLINE}."));
    // every viewpoint, then back to the first
    let mut tour = names.clone();
    tour.push(names[0].clone());
    let mut expected_crossings = 0;
    for w in tour.windows(2) {
        if in_savannah(&w[0]) != in_savannah(&w[1]) {
            expected_crossings += 1;
        }
    }

    let mut sim = Simulation::new(g.scene(), &g, SimConfig::default());
    let mut recs = sim.step_to(0.0, &[]).map_err(|e| e.to_string())?;
    let dwell = 5.0;
    let mut tick = 0u64;
    for (i, vp) in tour.iter().enumerate() {
        let at = 1.0 + dwell * i as f64;
        recs.extend(sim.bind_viewpoint(vp, at).map_err(|e| e.to_string())?);
        while (tick as f64) / 30.0 < at + dwell - 0.5 {
            tick += 1;
            let t = tick as f64 / 30.0;
            if t <= sim.now() {
                continue;
            }
            recs.extend(sim.step_to(t, &[]).map_err(|e| e.to_string())?);
            let both = sim.lod_level("GeorgiaLOD") == Some(0) && sim.lod_level(&savannah_lod) == Some(0);
            ensure(!both, || format!("both scenes selected at {t} s"))?;
        }
        let level = sim.lod_level(&savannah_lod);
        let want = if in_savannah(vp) { 0 } else { 1 };
        ensure(level == Some(want), || format!("{vp}: Savannah LOD level {level:?}, expected {want}"))?;
        let georgia = sim.lod_level("GeorgiaLOD");
        ensure(georgia == Some(1 - want), || format!("{vp}: Georgia LOD level {georgia:?}"))?;
    }
    for lod in ["GeorgiaLOD", savannah_lod.as_str()] {
        let switches = recs.iter().filter(|r| r.node == lod && r.field == "level_changed" && r.at > 0.0).count();
        ensure(switches == expected_crossings, || format!("{lod}: {switches} switches for {expected_crossings} crossings"))?;
    }
    Ok(format!("{} viewpoints toured, {expected_crossings} crossings, one switch per crossing per LOD", names.len()))
}

// 8 -------------------------------------------------------------------

fn hud_invariance() -> Outcome {
    let g = generate_georgia(&GenParams::default()).map_err(|e| e.to_string())?;
    let mut sim = Simulation::new(g.scene(), &g, SimConfig::default());
    sim.step_to(0.0, &[]).map_err(|e| e.to_string())?;
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    // sensor box: centre (0, 50, 0), size 400
    let mut reference = None;
    let mut worst = 0.0f64;
    for i in 1..=100 {
        let at = i as f64 * 0.1;
        let p = Vec3::new(rng.random_range(-190.0..190.0), rng.random_range(-140.0..240.0), rng.random_range(-190.0..190.0));
        let o = random_rotation(&mut rng);
        sim.step_to(at, &[SimEvent::pose(at, p, o)]).map_err(|e| e.to_string())?;
        let menu = sim.world_transform_of("GeorgiaMenu").ok_or("no GeorgiaMenu")?;
        let in_view = sim.viewer_pose().view_matrix() * menu;
        match &reference {
            None => reference = Some(in_view),
            Some(r) => worst = worst.max(in_view.max_abs_diff(r)),
        }
    }
    ensure(worst <= 1e-6, || format!("menu drifts in the viewer frame by {worst:e}"))?;

    let before = sim.world_transform_of("GeorgiaMenu").ok_or("no GeorgiaMenu")?;
    let mut recs = Vec::new();
    for i in 1..=10 {
        let at = 10.0 + i as f64 * 0.1;
        let p = Vec3::new(1000.0 + i as f64, 0.0, 0.0);
        recs.extend(sim.step_to(at, &[SimEvent::pose(at, p, Rotation::IDENTITY)]).map_err(|e| e.to_string())?);
    }
    let updates = recs.iter().filter(|r| r.node == "GeorgiaMenu").count();
    let exits = records_of(&recs, "GeorgiaMenuSensor", "exitTime").len();
    let after = sim.world_transform_of("GeorgiaMenu").ok_or("no GeorgiaMenu")?;
    ensure(exits == 1, || format!("{exits} exit events"))?;
    ensure(updates == 0 && after.max_abs_diff(&before) == 0.0, || format!("{updates} menu updates after leaving"))?;
    Ok(format!("100 moves inside, worst viewer-frame drift {worst:.1e}; no menu updates after exit"))
}

// 9 -------------------------------------------------------------------

fn run_trace(scene: &SceneGraph, g: &dyn scenery::scene::InlineResolver, script: &[SimEvent], config: SimConfig) -> Result<Vec<u8>, String> {
    let mut sim = Simulation::new(scene, g, config);
    let recs = sim.step_to(20.0, script).map_err(|e| e.to_string())?;
    let mut out = Vec::new();
    write_trace(&mut out, &recs, &sim.summary()).map_err(|e| e.to_string())?;
    Ok(out)
}

fn reseal(bytes: &mut [u8]) {
    if bytes.len() < HEADER_LEN {
        return;
    }
    let len = (bytes.len() - HEADER_LEN) as u32;
    bytes[6..10].copy_from_slice(&len.to_le_bytes());
    let crc = crc32fast::hash(&bytes[HEADER_LEN..]);
    bytes[10..14].copy_from_slice(&crc.to_le_bytes());
}

fn mutate(rng: &mut impl Rng, base: &[u8]) -> Vec<u8> {
    let mut b = base.to_vec();
    match rng.random_range(0..5) {
        0 => {
            for _ in 0..rng.random_range(1..=8) {
                let i = rng.random_range(0..b.len());
                b[i] ^= 1 << rng.random_range(0..8);
            }
        }
        1 => b.truncate(rng.random_range(0..b.len())),
        2 => {
            let i = rng.random_range(0..=b.len());
            let junk: Vec<u8> = (0..rng.random_range(1..16)).map(|_| rng.random()).collect();
            b.splice(i..i, junk);
        }
        3 => {
            let i = rng.random_range(HEADER_LEN.min(b.len())..b.len());
            let n = rng.random_range(1..=16).min(b.len() - i);
            for x in &mut b[i..i + n] {
                *x = rng.random();
            }
        }
        _ => {
            let i = rng.random_range(0..b.len());
            let n = rng.random_range(1..=32).min(b.len() - i);
            let chunk = b[i..i + n].to_vec();
            b.splice(i..i, chunk);
        }
    }
    // most mutants get a valid checksum so the body parser sees them
    if rng.random_bool(0.8) {
        reseal(&mut b);
    }
    b
}

fn determinism_and_fuzz() -> Outcome {
    let g = generate_composite(&GenParams::default()).map_err(|e| e.to_string())?;
    let script = vec![
        SimEvent::touch(0.5, "TrainTouch"),
        SimEvent::bind(2.0, "GeorgiaEngineLevel"),
        SimEvent::pose(6.0, Vec3::new(10.0, 20.0, 30.0), Rotation::about_y(0.5)),
        SimEvent::bind(8.0, &format!("{SAVANNAH_INLINE}.SavannahOverhead")),
        SimEvent::touch(12.0, &format!("{SAVANNAH_INLINE}.MenuIncoming")),
    ];
    for config in [SimConfig::default(), SimConfig { tick_rate: 12.5, ..Default::default() }] {
        let a = run_trace(g.scene(), &g, &script, config)?;
        let b = run_trace(g.scene(), &g, &script, config)?;
        ensure(a == b, || format!("traces differ at tick rate {}", config.tick_rate))?;
        ensure(a.len() > 1000, || "trace is suspiciously short".into())?;
    }

    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut seeds: Vec<Vec<u8>> = Vec::new();
    for s in 0..20 {
        let scene = random_scene_from_seed(1000 + s, RandomSceneOptions::default());
        for compress in [true, false] {
            let opts = EncodeOptions { compress_payload: compress, ..Default::default() };
            seeds.push(encode_binary(&scene, opts).map_err(|e| e.to_string())?);
        }
    }
    let menu = SceneGraph::new()
        .with_root(Node::new(NodeKind::Group).def("G"))
        .with_route(Route::new("G", "children", "G", "children"));
    seeds.push(encode_binary(&menu, EncodeOptions::default()).map_err(|e| e.to_string())?);
    let (mut ok, mut typed, mut slowest) = (0, 0, Duration::ZERO);
    for i in 0..10_000 {
        let base = &seeds[i % seeds.len()];
        let input = mutate(&mut rng, base);
        let t = Instant::now();
        let r = catch_unwind(AssertUnwindSafe(|| decode_binary(&input)));
        let el = t.elapsed();
        slowest = slowest.max(el);
        match r {
            Ok(Ok(_)) => ok += 1,
            Ok(Err(_)) => typed += 1,
            Err(_) => return Err(format!("decoder panicked on mutant {i}")),
        }
        ensure(el < Duration::from_secs(1), || format!("mutant {i} took {el:?}"))?;
    }
    Ok(format!(
        "traces byte-identical at two tick rates; 10000 mutants: {typed} typed errors, {ok} decoded, slowest {slowest:?}"
    ))
}
