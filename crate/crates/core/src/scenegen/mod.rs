//! Parameterized reconstruction of the Georgia/Savannah rail scenes.
//!
//! A generated scene is a set of files: an entry scene plus the model
//! files it Inlines. [`GeneratedScene`] keeps them together and acts as
//! the Inline resolver for them.

mod corpus;
mod georgia;
pub mod mesh;
mod models;
mod nodes;
mod savannah;

use std::collections::BTreeMap;
use std::io;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::math::Vec3;
use crate::runtime::World;
use crate::scene::{scene_stats, viewpoint_inventory, InlineResolver, SceneGraph, SceneStats, ViewpointEntry};
use crate::xml::serialize_xml;

pub use corpus::{generate_bench_corpus, Artifact, BenchArtifact, CorpusError};
pub use models::{CAR_LENGTH, COUPLING_GAP, ENGINE_LENGTH};

/// Range of both scene LODs. The Savannah offset must be at least twice this.
pub const LOD_RANGE: f64 = 250.0;

pub const GEORGIA_FILE: &str = "Georgia.x3d";
pub const SAVANNAH_FILE: &str = "Savannah.x3d";
pub const STATION_FILE: &str = "Station.x3d";
pub const ENGINE_FILE: &str = "TrainEngine.x3d";
pub const CAR_FILE: &str = "TrainCar.x3d";
pub const BACKDROP_FILE: &str = "Backdrop.x3d";
pub const MANIFEST_FILE: &str = "manifest.json";

/// DEF of the Inline that places the Savannah scene in the composite.
pub const SAVANNAH_INLINE: &str = "SavannahScene";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GenParams {
    pub car_count: usize,
    pub building_count: usize,
    /// Side-mesh points of the engine hull.
    pub mesh_density: usize,
    pub include_debug_backdrop: bool,
    pub include_debug_camera_cube: bool,
    pub savannah_offset: Vec3,
}

impl Default for GenParams {
    fn default() -> Self {
        GenParams {
            car_count: 2,
            building_count: 12,
            mesh_density: 500,
            include_debug_backdrop: false,
            include_debug_camera_cube: false,
            savannah_offset: Vec3::new(0.0, -500.0, 0.0),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GenError {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
}

impl GenParams {
    pub fn check(&self) -> Result<(), GenError> {
        let bad = |m: String| Err(GenError::InvalidParams(m));
        if !(1..=32).contains(&self.car_count) {
            return bad(format!("car_count must be in 1..=32, got {}", self.car_count));
        }
        if self.building_count > 64 {
            return bad(format!("building_count must be at most 64, got {}", self.building_count));
        }
        if !(8..=1_000_000).contains(&self.mesh_density) {
            return bad(format!("mesh_density must be in 8..=1000000, got {}", self.mesh_density));
        }
        let off = self.savannah_offset;
        // every viewpoint lies within LOD_RANGE of its own scene's centre, so
        // twice the range keeps each outside the other scene's range
        if !off.is_finite() || off.length() < 2.0 * LOD_RANGE {
            return bad(format!("savannah_offset length must be at least {}, got {}", 2.0 * LOD_RANGE, off.length()));
        }
        Ok(())
    }
}

/// Mesh resolution of each file. The bench corpus tunes these one at a
/// time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Detail {
    pub map_grid: usize,
    pub facade: usize,
    pub ground: usize,
    pub station: usize,
    pub engine: usize,
    pub car: usize,
}

impl Detail {
    pub fn from_params(p: &GenParams) -> Self {
        Detail { map_grid: 6, facade: 3, ground: 4, station: 12, engine: p.mesh_density, car: (p.mesh_density * 4 / 5).max(8) }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InterpolatorEntry {
    pub name: String,
    pub kind: String,
    pub keys: usize,
    /// Route targets as `Node.field`.
    pub targets: Vec<String>,
}

/// A hinge between two train sections. `front` is the section's front
/// coupling in its own child coordinates; `rear` is the leading section's
/// rear coupling in the leading section's child coordinates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Coupling {
    pub section: String,
    pub leader: String,
    pub front: Vec3,
    pub rear: Vec3,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SceneManifest {
    pub root: String,
    pub files: Vec<String>,
    pub stats: SceneStats,
    pub viewpoints: Vec<ViewpointEntry>,
    pub route_count: usize,
    pub interpolators: Vec<InterpolatorEntry>,
    pub couplings: Vec<Coupling>,
}

impl SceneManifest {
    pub fn static_viewpoints(&self) -> usize {
        self.viewpoints.iter().filter(|v| !v.animated).count()
    }

    pub fn animated_viewpoints(&self) -> usize {
        self.viewpoints.iter().filter(|v| v.animated).count()
    }
}

#[derive(Debug, Clone)]
pub struct GeneratedScene {
    pub root: String,
    pub files: BTreeMap<String, Arc<SceneGraph>>,
    pub manifest: SceneManifest,
}

impl InlineResolver for GeneratedScene {
    fn resolve(&self, url: &str) -> Option<Arc<SceneGraph>> {
        self.files.get(url).cloned()
    }
}

impl GeneratedScene {
    fn assemble(root: &str, files: BTreeMap<String, Arc<SceneGraph>>, couplings: Vec<Coupling>) -> Self {
        let manifest = build_manifest(root, &files, couplings);
        GeneratedScene { root: root.to_string(), files, manifest }
    }

    /// The entry scene.
    pub fn scene(&self) -> &SceneGraph {
        &self.files[&self.root]
    }

    /// Writes every file as XML and the manifest as JSON into `dir`.
    pub fn write_to(&self, dir: &Path) -> io::Result<Vec<PathBuf>> {
        std::fs::create_dir_all(dir)?;
        let mut written = Vec::new();
        for (name, scene) in &self.files {
            let path = dir.join(name);
            std::fs::write(&path, serialize_xml(scene))?;
            written.push(path);
        }
        let path = dir.join(MANIFEST_FILE);
        let json = serde_json::to_string_pretty(&self.manifest).map_err(io::Error::other)?;
        std::fs::write(&path, json + "\n")?;
        written.push(path);
        Ok(written)
    }
}

fn build_manifest(root: &str, files: &BTreeMap<String, Arc<SceneGraph>>, couplings: Vec<Coupling>) -> SceneManifest {
    let scene = &files[root];
    let world = World::build(scene, files);
    let interpolators = (0..world.len())
        .filter(|id| world.node(*id).kind.is_interpolator())
        .map(|id| {
            let n = world.node(id);
            InterpolatorEntry {
                name: n.name.clone().unwrap_or_default(),
                kind: n.kind.name().to_string(),
                keys: n.floats("key").len(),
                targets: world
                    .routes()
                    .iter()
                    .filter(|r| r.from == id)
                    .map(|r| format!("{}.{}", world.name_of(r.to).unwrap_or("?"), r.to_field))
                    .collect(),
            }
        })
        .collect();
    SceneManifest {
        root: root.to_string(),
        files: files.keys().cloned().collect(),
        stats: scene_stats(scene, files),
        viewpoints: viewpoint_inventory(scene, files),
        route_count: world.routes().len(),
        interpolators,
        couplings,
    }
}

fn train_files(detail: &Detail) -> [(String, Arc<SceneGraph>); 2] {
    [
        (ENGINE_FILE.to_string(), Arc::new(models::engine_scene(detail.engine))),
        (CAR_FILE.to_string(), Arc::new(models::car_scene(detail.car))),
    ]
}

/// The Georgia map scene with its train, on its own.
pub fn generate_georgia(p: &GenParams) -> Result<GeneratedScene, GenError> {
    p.check()?;
    let detail = Detail::from_params(p);
    let (scene, couplings) = georgia::georgia_scene(p, &detail, false);
    let mut files: BTreeMap<_, _> = train_files(&detail).into_iter().collect();
    files.insert(GEORGIA_FILE.to_string(), Arc::new(scene));
    if p.include_debug_backdrop {
        files.insert(BACKDROP_FILE.to_string(), Arc::new(models::backdrop_scene()));
    }
    Ok(GeneratedScene::assemble(GEORGIA_FILE, files, couplings))
}

/// The Savannah city scene with its two trains, on its own.
pub fn generate_savannah(p: &GenParams) -> Result<GeneratedScene, GenError> {
    p.check()?;
    let detail = Detail::from_params(p);
    let mut files: BTreeMap<_, _> = train_files(&detail).into_iter().collect();
    files.insert(SAVANNAH_FILE.to_string(), Arc::new(savannah::savannah_scene(p, &detail)));
    files.insert(STATION_FILE.to_string(), Arc::new(models::station_scene(detail.station)));
    Ok(GeneratedScene::assemble(SAVANNAH_FILE, files, Vec::new()))
}

/// Georgia at the origin with Savannah Inlined at the offset.
pub fn generate_composite(p: &GenParams) -> Result<GeneratedScene, GenError> {
    p.check()?;
    composite_with(p, &Detail::from_params(p))
}

pub(crate) fn composite_with(p: &GenParams, detail: &Detail) -> Result<GeneratedScene, GenError> {
    let (georgia, couplings) = georgia::georgia_scene(p, detail, true);
    let mut files: BTreeMap<_, _> = train_files(detail).into_iter().collect();
    files.insert(GEORGIA_FILE.to_string(), Arc::new(georgia));
    files.insert(SAVANNAH_FILE.to_string(), Arc::new(savannah::savannah_scene(p, detail)));
    files.insert(STATION_FILE.to_string(), Arc::new(models::station_scene(detail.station)));
    if p.include_debug_backdrop {
        files.insert(BACKDROP_FILE.to_string(), Arc::new(models::backdrop_scene()));
    }
    Ok(GeneratedScene::assemble(GEORGIA_FILE, files, couplings))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scene::{validate, NodeKind};

    fn counts(g: &GeneratedScene) -> (usize, usize, usize) {
        let m = &g.manifest;
        (m.viewpoints.len(), m.static_viewpoints(), m.animated_viewpoints())
    }

    #[test]
    fn viewpoint_counts() {
        let p = GenParams::default();
        assert_eq!(counts(&generate_georgia(&p).unwrap()), (4, 1, 3));
        assert_eq!(counts(&generate_savannah(&p).unwrap()), (5, 3, 2));
        assert_eq!(counts(&generate_composite(&p).unwrap()), (9, 4, 5));
    }

    #[test]
    fn every_file_validates() {
        let g = generate_composite(&GenParams { include_debug_backdrop: true, ..Default::default() }).unwrap();
        for (name, scene) in &g.files {
            let r = validate(scene);
            assert!(r.errors.is_empty(), "{name}: {:?}", r.errors);
        }
        assert!(g.files.contains_key(BACKDROP_FILE));
    }

    #[test]
    fn one_swing_per_section() {
        let g = generate_georgia(&GenParams::default()).unwrap();
        let on_sections = g
            .manifest
            .interpolators
            .iter()
            .filter(|i| i.kind == "OrientationInterpolator")
            .filter(|i| i.targets.iter().any(|t| t == "EngineYaw.rotation" || t.ends_with("Hinge.rotation")))
            .count();
        assert_eq!(on_sections, 3);
        assert_eq!(g.manifest.couplings.len(), 2);
        assert_eq!(g.manifest.couplings[1].leader, "Car1Hinge");
    }

    #[test]
    fn debug_cube_follows_the_camera() {
        let plain = generate_georgia(&GenParams::default()).unwrap();
        assert!(plain.scene().find_def("MovingCameraMarker").is_none());
        let p = GenParams { include_debug_camera_cube: true, ..Default::default() };
        let g = generate_georgia(&p).unwrap();
        assert!(g.scene().find_def("MovingCameraMarker").is_some());
        assert_eq!(g.manifest.route_count, plain.manifest.route_count + 2);
    }

    #[test]
    fn no_buildings_is_allowed() {
        let g = generate_savannah(&GenParams { building_count: 0, ..Default::default() }).unwrap();
        assert!(validate(g.scene()).errors.is_empty());
    }

    #[test]
    fn manifest_matches_stats() {
        let g = generate_composite(&GenParams::default()).unwrap();
        assert_eq!(g.manifest.stats, scene_stats(g.scene(), &g));
        assert_eq!(g.manifest.stats.count(NodeKind::Viewpoint), 9);
        let json = serde_json::to_string(&g.manifest).unwrap();
        let back: SceneManifest = serde_json::from_str(&json).unwrap();
        assert_eq!(back, g.manifest);
    }

    #[test]
    fn params_are_checked() {
        let bad = [
            GenParams { car_count: 0, ..Default::default() },
            GenParams { building_count: 65, ..Default::default() },
            GenParams { mesh_density: 4, ..Default::default() },
            GenParams { savannah_offset: Vec3::new(0.0, -300.0, 0.0), ..Default::default() },
        ];
        for p in bad {
            assert!(matches!(generate_composite(&p), Err(GenError::InvalidParams(_))), "{p:?}");
        }
    }

    #[test]
    fn write_to_emits_xml_and_manifest() {
        let dir = tempfile::tempdir().unwrap();
        let g = generate_georgia(&GenParams::default()).unwrap();
        let written = g.write_to(dir.path()).unwrap();
        assert_eq!(written.len(), g.files.len() + 1);
        let back = crate::xml::parse_xml(&std::fs::read(dir.path().join(GEORGIA_FILE)).unwrap()).unwrap();
        assert!(crate::xml::semantic_equal(&back, g.scene()));
    }
}
