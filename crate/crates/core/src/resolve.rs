//! Loading scene files from disk and resolving Inline urls against a
//! directory.

use std::collections::HashMap;
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex};

use thiserror::Error;

use crate::binary::{decode_binary, DecodeError, MAGIC};
use crate::scene::{InlineResolver, SceneGraph};
use crate::xml::{parse_xml, ParseDiagnostic};

#[derive(Debug, Error)]
pub enum LoadError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: {}", first(.diagnostics))]
    Xml { path: PathBuf, diagnostics: Vec<ParseDiagnostic> },
    #[error("{path}: {source}")]
    Binary { path: PathBuf, source: DecodeError },
}

fn first(d: &[ParseDiagnostic]) -> String {
    match d {
        [] => "parse failed".into(),
        [one] => one.to_string(),
        [one, rest @ ..] => format!("{one} (and {} more)", rest.len()),
    }
}

/// True for bytes that start like a binary scene.
pub fn is_binary(bytes: &[u8]) -> bool {
    bytes.starts_with(&MAGIC)
}

/// Parses XML or binary, chosen by content.
pub fn load_scene_bytes(path: &Path, bytes: &[u8]) -> Result<SceneGraph, LoadError> {
    if is_binary(bytes) {
        decode_binary(bytes).map_err(|source| LoadError::Binary { path: path.to_path_buf(), source })
    } else {
        parse_xml(bytes).map_err(|diagnostics| LoadError::Xml { path: path.to_path_buf(), diagnostics })
    }
}

pub fn load_scene(path: &Path) -> Result<SceneGraph, LoadError> {
    let bytes = std::fs::read(path).map_err(|source| LoadError::Io { path: path.to_path_buf(), source })?;
    load_scene_bytes(path, &bytes)
}

/// Resolves Inline urls as paths relative to a directory. A url ending in
/// `.x3d` also finds a `.s3db` of the same stem. Loaded files are cached;
/// files that fail to load resolve to nothing.
pub struct DirResolver {
    dir: PathBuf,
    cache: Mutex<HashMap<String, Option<Arc<SceneGraph>>>>,
}

impl DirResolver {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        DirResolver { dir: dir.into(), cache: Mutex::new(HashMap::new()) }
    }

    /// Resolver for files next to `scene_path`.
    pub fn beside(scene_path: &Path) -> Self {
        DirResolver::new(scene_path.parent().map(Path::to_path_buf).unwrap_or_default())
    }

    fn candidates(&self, url: &str) -> Vec<PathBuf> {
        let rel = url.strip_prefix("file://").unwrap_or(url);
        if rel.contains("://") {
            return Vec::new();
        }
        let p = self.dir.join(rel);
        let mut out = vec![p.clone()];
        if p.extension().is_some_and(|e| e == "x3d") {
            out.push(p.with_extension("s3db"));
        }
        out
    }
}

impl InlineResolver for DirResolver {
    fn resolve(&self, url: &str) -> Option<Arc<SceneGraph>> {
        let mut cache = self.cache.lock().unwrap_or_else(|e| e.into_inner());
        if let Some(hit) = cache.get(url) {
            return hit.clone();
        }
        let found = self.candidates(url).into_iter().find_map(|p| load_scene(&p).ok()).map(Arc::new);
        cache.insert(url.to_string(), found.clone());
        found
    }
}
