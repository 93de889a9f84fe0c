//! The five-file benchmark corpus, each file sized to its published XML
//! byte count by tuning one mesh knob.

use std::sync::Arc;

use thiserror::Error;

use super::{composite_with, models, savannah, Detail, GenError, GenParams};
use super::{CAR_FILE, ENGINE_FILE, GEORGIA_FILE, SAVANNAH_FILE, STATION_FILE};
use crate::scene::SceneGraph;
use crate::xml::serialize_xml;

/// Allowed relative distance from the target XML size.
pub const SIZE_TOLERANCE: f64 = 0.25;
const MAX_STEPS: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Artifact {
    Georgia,
    Savannah,
    Station,
    Engine,
    Car,
}

impl Artifact {
    pub const ALL: [Artifact; 5] =
        [Artifact::Georgia, Artifact::Savannah, Artifact::Station, Artifact::Engine, Artifact::Car];

    pub fn label(self) -> &'static str {
        match self {
            Artifact::Georgia => "Georgia Scene",
            Artifact::Savannah => "Savannah Scene",
            Artifact::Station => "Train Station",
            Artifact::Engine => "Train Engine",
            Artifact::Car => "Train Car",
        }
    }

    pub fn file_name(self) -> &'static str {
        match self {
            Artifact::Georgia => GEORGIA_FILE,
            Artifact::Savannah => SAVANNAH_FILE,
            Artifact::Station => STATION_FILE,
            Artifact::Engine => ENGINE_FILE,
            Artifact::Car => CAR_FILE,
        }
    }

    /// Published XML size in bytes.
    pub fn target_xml_bytes(self) -> u64 {
        match self {
            Artifact::Georgia => 11_791,
            Artifact::Savannah => 98_078,
            Artifact::Station => 54_717,
            Artifact::Engine => 502_209,
            Artifact::Car => 391_858,
        }
    }

    fn knob_range(self) -> (usize, usize) {
        match self {
            Artifact::Georgia => (2, 200),
            Artifact::Savannah => (2, 400),
            Artifact::Station => (2, 2000),
            Artifact::Engine | Artifact::Car => (8, 1_000_000),
        }
    }

    fn build(self, p: &GenParams, knob: usize) -> SceneGraph {
        let mut d = Detail::from_params(p);
        match self {
            Artifact::Georgia => {
                d.map_grid = knob;
                let g = composite_with(p, &d).expect("checked params");
                Arc::unwrap_or_clone(g.files[GEORGIA_FILE].clone())
            }
            Artifact::Savannah => {
                d.ground = knob;
                savannah::savannah_scene(p, &d)
            }
            Artifact::Station => models::station_scene(knob),
            Artifact::Engine => models::engine_scene(knob),
            Artifact::Car => models::car_scene(knob),
        }
    }
}

#[derive(Debug, Clone)]
pub struct BenchArtifact {
    pub artifact: Artifact,
    pub label: String,
    pub file_name: String,
    pub scene: SceneGraph,
    /// The tuned knob value.
    pub density: usize,
    pub xml_bytes: u64,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CorpusError {
    #[error(transparent)]
    Params(#[from] GenError),
    #[error("{label}: closest XML size {achieved} bytes is outside ±25% of {target}")]
    OutOfWindow { label: String, achieved: u64, target: u64 },
}

/// Generates the corpus in table order.
pub fn generate_bench_corpus(p: &GenParams) -> Result<Vec<BenchArtifact>, CorpusError> {
    p.check()?;
    Artifact::ALL.iter().map(|a| tune(*a, p)).collect()
}

fn tune(a: Artifact, p: &GenParams) -> Result<BenchArtifact, CorpusError> {
    let target = a.target_xml_bytes();
    let size = |k: usize| -> (SceneGraph, u64) {
        let s = a.build(p, k);
        let n = serialize_xml(&s).len() as u64;
        (s, n)
    };
    // size grows with the knob: double until the target is passed, then
    // bisect for the smallest knob at or above it
    let (min, max) = a.knob_range();
    let (mut lo, mut hi) = (min, min);
    while hi < max && size(hi).1 < target {
        lo = hi;
        hi = (hi * 2).min(max);
    }
    for _ in 0..MAX_STEPS {
        if hi - lo <= 1 {
            break;
        }
        let mid = lo + (hi - lo) / 2;
        if size(mid).1 < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let best = [lo, hi]
        .into_iter()
        .map(|k| {
            let (s, n) = size(k);
            (k, s, n)
        })
        .min_by_key(|(_, _, n)| n.abs_diff(target))
        .expect("two candidates");
    let (density, scene, xml_bytes) = best;
    if (xml_bytes as f64 - target as f64).abs() > SIZE_TOLERANCE * target as f64 {
        return Err(CorpusError::OutOfWindow { label: a.label().into(), achieved: xml_bytes, target });
    }
    Ok(BenchArtifact {
        artifact: a,
        label: a.label().into(),
        file_name: a.file_name().into(),
        scene,
        density,
        xml_bytes,
    })
}
