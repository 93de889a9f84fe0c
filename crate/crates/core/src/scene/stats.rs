use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{FieldValue, InlineResolver, Node, NodeKind, NodeRef, SceneGraph};

/// Content counts over a scene with resolvable Inlines expanded. A node
/// reached through several USE sites or Inline instances counts once per
/// site.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SceneStats {
    pub shape_count: usize,
    pub image_texture_count: usize,
    pub audio_clip_count: usize,
    pub inline_count: usize,
    pub node_count_by_kind: BTreeMap<String, usize>,
    /// Inline URLs that could not be resolved, one entry per site.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub missing_inlines: Vec<String>,
}

impl SceneStats {
    pub fn total_nodes(&self) -> usize {
        self.node_count_by_kind.values().sum()
    }

    pub fn count(&self, kind: NodeKind) -> usize {
        self.node_count_by_kind.get(kind.name()).copied().unwrap_or(0)
    }

    /// The same stats with StaticGroup counted as Group.
    pub fn grouping_folded(&self) -> SceneStats {
        let mut out = self.clone();
        if let Some(n) = out.node_count_by_kind.remove(NodeKind::StaticGroup.name()) {
            *out.node_count_by_kind.entry(NodeKind::Group.name().to_string()).or_default() += n;
        }
        out
    }
}

/// A Viewpoint instance. `name` is namespaced by the DEF names of the
/// enclosing Inlines, e.g. `SavannahScene.SavannahOverhead`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ViewpointEntry {
    pub name: Option<String>,
    pub description: String,
    pub animated: bool,
}

/// Name under which an Inline's content is addressed from outside.
pub(crate) fn inline_namespace(node: &Node) -> String {
    if let Some(def) = &node.def_name {
        return def.clone();
    }
    let url = node.strings("url").into_iter().next().unwrap_or_default();
    let file = url.rsplit(['/', '\\']).next().unwrap_or("");
    file.split('.').next().unwrap_or("").to_string()
}

pub(crate) fn resolve_inline(node: &Node, resolver: &dyn InlineResolver) -> Option<(String, Arc<SceneGraph>)> {
    node.strings("url").into_iter().find_map(|u| resolver.resolve(&u).map(|s| (u, s)))
}

pub fn scene_stats(scene: &SceneGraph, resolver: &dyn InlineResolver) -> SceneStats {
    let mut stats = SceneStats::default();
    let mut walker = Walker { resolver, inline_stack: Vec::new() };
    walker.scene(scene, "", &mut |node, _| {
        match node.kind {
            NodeKind::Shape => stats.shape_count += 1,
            NodeKind::ImageTexture => stats.image_texture_count += 1,
            NodeKind::AudioClip => stats.audio_clip_count += 1,
            NodeKind::Inline => stats.inline_count += 1,
            _ => {}
        }
        *stats.node_count_by_kind.entry(node.kind.name().to_string()).or_default() += 1;
    }, &mut |url| stats.missing_inlines.push(url));
    stats
}

/// Viewpoint instances in traversal order. A viewpoint is animated when a
/// route targets its position or orientation.
pub fn viewpoint_inventory(scene: &SceneGraph, resolver: &dyn InlineResolver) -> Vec<ViewpointEntry> {
    let mut targets = BTreeSet::new();
    let mut viewpoints = Vec::new();
    let mut walker = Walker { resolver, inline_stack: Vec::new() };
    walker.scene_with_routes(scene, "", &mut |node, prefix| {
        if node.kind == NodeKind::Viewpoint {
            viewpoints.push((node.def_name.as_ref().map(|d| format!("{prefix}{d}")), node.string("description")));
        }
    }, &mut |prefix, route_scene| {
        for r in &route_scene.routes {
            let field = r.to_field.strip_prefix("set_").unwrap_or(&r.to_field);
            if field == "position" || field == "orientation" {
                targets.insert(format!("{prefix}{}", r.to_node));
            }
        }
    });
    viewpoints
        .into_iter()
        .map(|(name, description)| {
            let animated = name.as_ref().is_some_and(|n| targets.contains(n));
            ViewpointEntry { name, description, animated }
        })
        .collect()
}

/// Instantiation-order traversal through USE and resolved Inlines.
struct Walker<'r> {
    resolver: &'r dyn InlineResolver,
    inline_stack: Vec<String>,
}

impl Walker<'_> {
    fn scene(
        &mut self,
        scene: &SceneGraph,
        prefix: &str,
        visit: &mut dyn FnMut(&Node, &str),
        missing: &mut dyn FnMut(String),
    ) {
        let defs = scene.defs();
        let mut active = Vec::new();
        for r in &scene.roots {
            self.node_ref(r, &defs, prefix, &mut active, visit, missing, &mut |_, _| {});
        }
    }

    fn scene_with_routes(
        &mut self,
        scene: &SceneGraph,
        prefix: &str,
        visit: &mut dyn FnMut(&Node, &str),
        routes: &mut dyn FnMut(&str, &SceneGraph),
    ) {
        routes(prefix, scene);
        let defs = scene.defs();
        let mut active = Vec::new();
        for r in &scene.roots {
            self.node_ref(r, &defs, prefix, &mut active, visit, &mut |_| {}, routes);
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn node_ref<'a>(
        &mut self,
        r: &'a NodeRef,
        defs: &BTreeMap<&'a str, &'a Node>,
        prefix: &str,
        active: &mut Vec<&'a str>,
        visit: &mut dyn FnMut(&Node, &str),
        missing: &mut dyn FnMut(String),
        routes: &mut dyn FnMut(&str, &SceneGraph),
    ) {
        let node: &'a Node = match r {
            NodeRef::Node(n) => n,
            NodeRef::Use(name) => match defs.get(name.as_str()) {
                Some(n) if !active.contains(&name.as_str()) => n,
                _ => return,
            },
        };
        visit(node, prefix);
        if let Some(d) = node.def_name.as_deref() {
            active.push(d);
        }
        if node.kind == NodeKind::Inline && !matches!(node.get("load"), Some(FieldValue::Bool(false))) {
            match resolve_inline(node, self.resolver) {
                Some((url, sub)) if !self.inline_stack.contains(&url) => {
                    self.inline_stack.push(url);
                    let inner = format!("{prefix}{}.", inline_namespace(node));
                    let sub_defs = sub.defs();
                    routes(&inner, &sub);
                    let mut sub_active = Vec::new();
                    for root in &sub.roots {
                        self.node_ref(root, &sub_defs, &inner, &mut sub_active, visit, missing, routes);
                    }
                    self.inline_stack.pop();
                }
                Some(_) => {}
                None => missing(node.strings("url").join(" ")),
            }
        }
        for (_, child) in node.node_slots() {
            self.node_ref(child, defs, prefix, active, visit, missing, routes);
        }
        if node.def_name.is_some() {
            active.pop();
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scene::{NoInlines, Route};

    fn box_shape() -> Node {
        Node::new(NodeKind::Shape).with("geometry", FieldValue::Node(Node::new(NodeKind::Box).into()))
    }

    #[test]
    fn single_shape() {
        let s = scene_stats(&SceneGraph::new().with_root(box_shape()), &NoInlines);
        assert_eq!((s.shape_count, s.image_texture_count), (1, 0));
        assert_eq!(s.count(NodeKind::Box), 1);
    }

    #[test]
    fn use_counts_per_site() {
        let scene = SceneGraph::new()
            .with_root(box_shape().def("S"))
            .with_root(NodeRef::Use("S".into()))
            .with_root(Node::new(NodeKind::Transform).child(NodeRef::Use("S".into())));
        let s = scene_stats(&scene, &NoInlines);
        assert_eq!(s.shape_count, 3);
        assert_eq!(s.count(NodeKind::Box), 3);
    }

    #[test]
    fn inlines_expand_and_missing_warns() {
        let inner = Arc::new(
            SceneGraph::new()
                .with_root(box_shape())
                .with_root(Node::new(NodeKind::Viewpoint).def("Top"))
                .with_route(Route::new("P", "value_changed", "Top", "set_position")),
        );
        let mut files = BTreeMap::new();
        files.insert("inner.x3d".to_string(), inner);
        let url = |u: &str| FieldValue::Strings(vec![u.to_string()]);
        let scene = SceneGraph::new()
            .with_root(Node::new(NodeKind::Inline).def("In").with("url", url("inner.x3d")))
            .with_root(Node::new(NodeKind::Inline).with("url", url("inner.x3d")))
            .with_root(Node::new(NodeKind::Inline).with("url", url("gone.x3d")))
            .with_root(Node::new(NodeKind::Viewpoint).def("Here").with("description", FieldValue::String("h".into())));
        let s = scene_stats(&scene, &files);
        assert_eq!(s.shape_count, 2);
        assert_eq!(s.inline_count, 3);
        assert_eq!(s.missing_inlines, vec!["gone.x3d".to_string()]);

        let vps = viewpoint_inventory(&scene, &files);
        let names: Vec<_> = vps.iter().map(|v| (v.name.clone().unwrap(), v.animated)).collect();
        assert_eq!(
            names,
            vec![("In.Top".into(), true), ("inner.Top".into(), true), ("Here".into(), false)]
        );
    }

    #[test]
    fn self_inlining_terminates() {
        let mut files = BTreeMap::new();
        let me = Arc::new(SceneGraph::new().with_root(
            Node::new(NodeKind::Inline).with("url", FieldValue::Strings(vec!["me.x3d".into()])),
        ));
        files.insert("me.x3d".to_string(), me.clone());
        assert_eq!(scene_stats(&me, &files).inline_count, 2);
    }
}
